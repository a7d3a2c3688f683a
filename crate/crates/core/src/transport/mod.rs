//! The transport construction at matrix scale: differentiate the
//! semigroup to get the Poisson-equation drift 𝒟g_α, integrate the α-flow
//! dF/dα = 𝒟g_α(F) over the ensemble, and verify the pushforward.

pub mod flow;
pub mod gradient;

use thiserror::Error;

#[derive(Error, Debug)]
pub enum TransportError {
    #[error("invalid transport configuration: {0}")]
    Config(String),
    #[error("truncation tail bound {bound:.3e} exceeds tolerance {tol:.3e}")]
    TailBound { bound: f64, tol: f64 },
    #[error("adjoint and finite-difference gradients disagree: relative error {rel:.3e} > {tol:.3e}")]
    GradientMismatch { rel: f64, tol: f64 },
    #[error("sample {sample} escaped confinement at alpha = {alpha:.3}: norm {norm:.3} > {bound:.3}")]
    Confinement { sample: usize, alpha: f64, norm: f64, bound: f64 },
    #[error(transparent)]
    Sde(#[from] crate::freesde::SdeError),
    #[error(transparent)]
    Mat(#[from] crate::matrep::MatError),
}

pub use flow::{
    flow_transport, monomial_battery, pushforward_check, AlphaDiag, PushforwardReport,
    TransportOutcome,
};
pub use gradient::{
    dg_eval, semigroup_gradient, semigroup_gradient_fd, verify_gradient, AlphaCtx, DgEstimate,
    GradMode, TransportConfig,
};
