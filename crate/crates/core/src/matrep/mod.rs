//! Finite-N Hermitian representations: evaluation of symbolic objects on
//! matrix tuples, the Hessian superoperator and its minimum eigenvalue,
//! convexity certificates, Schwinger–Dyson residuals, and the HMT1
//! ensemble container.

pub mod certify;
pub mod eig;
pub mod eval;
pub mod hessian;
pub mod hmt1;
pub mod mat;
pub mod sdres;
pub mod tuple;

use thiserror::Error;

#[derive(Error, Debug)]
pub enum MatError {
    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },
    #[error("operator failed the symmetry check (relative defect {defect:.3e})")]
    NotSymmetric { defect: f64 },
    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("empty ensemble")]
    EmptyEnsemble,
    #[error("shape error: {0}")]
    Shape(String),
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub use certify::{certify_convexity, old_convexity_counterexample, Convexity};
pub use eig::{hermitian_eigenvalues, tridiag_eigenvalues};
pub use eval::{
    eval_poly, eval_poly_ctx, eval_tensor_apply, eval_tensor_apply_ctx, eval_trace_poly,
    eval_trace_poly_ctx, tau_hat, EvalCtx,
};
pub use hessian::{hessian_min_eig, HessianOp, MinEigReport};
pub use mat::Mat;
pub use sdres::{concentration_check, mean_stderr, pairwise_sum, sd_residual, SdEntry};
pub use tuple::{Ensemble, EnsembleMeta, HermMatrix, MatrixTuple};
