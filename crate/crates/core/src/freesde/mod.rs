//! Matrix-valued Euler–Maruyama for the free SDE
//! dX = dS − ½𝒟V_α(X)dt, coupled-path contraction, Monte-Carlo semigroup
//! evaluation, and Itô-residual / generator diagnostics.

pub mod family;
pub mod grid;
pub mod path;
pub mod semigroup;

use thiserror::Error;

#[derive(Error, Debug)]
pub enum SdeError {
    #[error("family: {0}")]
    Family(String),
    #[error("path blew up at t = {t:.3}: norm {norm:.3e} exceeds {bound:.3e}")]
    Blowup { t: f64, norm: f64, bound: f64 },
    #[error("coupled paths started at identical points")]
    Degenerate,
    #[error(transparent)]
    Mat(#[from] crate::matrep::MatError),
}

pub use family::{FamilySpec, PotentialFamily};
pub use grid::TimeGrid;
pub use path::{coupled_contraction, euler_step, sde_path, CompiledDrift, ContractionReport, PathOpts, SdePath};

pub use semigroup::{
    brownian_increment, generator_check, ito_martingale_stat, ito_residual, semigroup_eval,
    GeneratorCheck, ItoPoint, SemigroupPoint,
};
