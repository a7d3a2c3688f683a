//! One-variable reference stack: one-cut equilibrium measures solving the
//! Schwinger–Dyson equation, the quantile-map transport oracle, the
//! classical grid pipeline (semigroup → Poisson → flow), and spectral
//! goodness-of-fit against sampled ensembles.

pub mod classical;
pub mod eqmeasure;
pub mod quad;

use crate::matrep::{hermitian_eigenvalues, Ensemble};
use thiserror::Error;

#[derive(Error, Debug)]
pub enum OneVarError {
    #[error("solver: {0}")]
    Solver(String),
    #[error("density went negative at x = {x:.4} (value {value:.3e}); two-cut support rejected")]
    NegativeDensity { x: f64, value: f64 },
    #[error("empty ensemble")]
    EmptyEnsemble,
    #[error("ensemble has {0} letters; spectral comparison needs n = 1")]
    NotOneLetter(u8),
}

pub use classical::{
    classical_transport_1d, quantile_map, ClassicalConfig, ClassicalOutcome, GridDensity, GridFunc,
};
pub use eqmeasure::EqMeasure;

/// Kolmogorov–Smirnov distance between the pooled eigenvalue spectrum of a
/// one-letter ensemble and an equilibrium measure.
pub fn spectral_ks(ens: &Ensemble, mu: &EqMeasure) -> Result<f64, OneVarError> {
    if ens.is_empty() {
        return Err(OneVarError::EmptyEnsemble);
    }
    if ens.n_letters() != 1 {
        return Err(OneVarError::NotOneLetter(ens.n_letters()));
    }
    let mut eigs: Vec<f64> = Vec::with_capacity(ens.len() * ens.dim());
    for s in &ens.samples {
        eigs.extend(hermitian_eigenvalues(s.mats[0].mat()));
    }
    eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = eigs.len() as f64;
    let mut ks: f64 = 0.0;
    for (i, &x) in eigs.iter().enumerate() {
        let f = mu.cdf(x);
        ks = ks.max(((i + 1) as f64 / m - f).abs()).max((f - i as f64 / m).abs());
    }
    Ok(ks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::gaussian_ensemble;

    #[test]
    fn semicircle_ensemble_matches_semicircle_measure() {
        let ens = gaussian_ensemble(1, 64, 60, 5150);
        let mu = EqMeasure::solve(&[0.0, 0.0, 0.5]).unwrap();
        let ks = spectral_ks(&ens, &mu).unwrap();
        assert!(ks < 0.03, "ks {ks}");
        // deliberate mismatch: wrong measure gives a large distance
        let wrong = EqMeasure::solve(&[0.0, 0.0, 2.0]).unwrap();
        let ks_wrong = spectral_ks(&ens, &wrong).unwrap();
        assert!(ks_wrong > 0.15, "ks wrong {ks_wrong}");
    }

    #[test]
    fn empty_ensemble_is_an_error() {
        let ens = gaussian_ensemble(2, 8, 3, 1);
        let mu = EqMeasure::solve(&[0.0, 0.0, 0.5]).unwrap();
        assert!(matches!(spectral_ks(&ens, &mu), Err(OneVarError::NotOneLetter(2))));
    }
}
