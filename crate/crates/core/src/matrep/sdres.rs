//! Empirical Schwinger–Dyson residuals over an ensemble.
//!
//! For each test polynomial P and letter i, the per-sample residual is
//!   r(X) = Σ over ∂ᵢP terms of c·τ̂(a(X))·τ̂(b(X)) − τ̂((P·𝒟ᵢV)(X)).
//! Under the exact finite-N Gibbs measure E[r] = 0 identically (the
//! finite-N loop equation), so the per-sample mean is a sampler-exactness
//! diagnostic, the per-sample RMS measures the O(1/N) concentration scale,
//! and the factorized (plug-in) residual — ensemble means substituted into
//! the limiting relation — exposes the O(1/N²) covariance anomaly.

use super::eval::EvalCtx;
use super::tuple::Ensemble;
use super::MatError;
use crate::ncalg::{NcPoly, TracePoly, Word};
use num::complex::Complex64;
use rayon::prelude::*;
use std::collections::BTreeMap;

/// Deterministic pairwise-tree sum: independent of thread scheduling and
/// stable against naive accumulation error.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}

pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = pairwise_sum(xs) / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let sq: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
    let var = pairwise_sum(&sq) / (n as f64 - 1.0);
    (mean, (var / n as f64).sqrt())
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct SdEntry {
    pub label: String,
    pub letter: u8,
    /// Mean of the per-sample residual, with its standard error.
    pub mean: f64,
    pub stderr: f64,
    /// RMS of the per-sample residual: the concentration scale.
    pub rms: f64,
    /// Plug-in residual: ensemble-mean traces substituted into the
    /// limiting Schwinger–Dyson relation; jackknife standard error.
    pub factorized: f64,
    pub factorized_stderr: f64,
}

struct CompiledResidual {
    label: String,
    letter: u8,
    /// pairs (a, b, coeff) from ∂ᵢP
    pairs: Vec<(Word, Word, Complex64)>,
    /// words of P·𝒟ᵢV with coefficients
    rhs: Vec<(Word, Complex64)>,
}

/// Per-(P, letter) empirical residuals over the ensemble.
pub fn sd_residual(
    ens: &Ensemble,
    v: &NcPoly,
    polys: &[(String, NcPoly)],
) -> Result<Vec<SdEntry>, MatError> {
    if ens.is_empty() {
        return Err(MatError::EmptyEnsemble);
    }
    let n = ens.n_letters();
    assert_eq!(v.n, n, "potential letter count differs from ensemble");
    let vt = TracePoly::from(v.clone());
    let mut compiled = Vec::new();
    for (label, p) in polys {
        assert_eq!(p.n, n, "test polynomial letter count differs from ensemble");
        for i in 1..=n {
            let dp = TracePoly::from(p.clone()).fdq(i);
            let pairs = dp
                .terms
                .iter()
                .map(|(k, c)| {
                    debug_assert!(k.traces.is_empty());
                    (k.legs[0].clone(), k.legs[1].clone(), c.to_c64())
                })
                .collect();
            let pdv = p * &vt.cyclic_derivative(i).expect_plain();
            let rhs = pdv.terms.iter().map(|(w, c)| (w.clone(), c.to_c64())).collect();
            compiled.push(CompiledResidual { label: label.clone(), letter: i, pairs, rhs });
        }
    }

    // distinct words whose ensemble-mean traces feed the factorized form
    let mut word_set: BTreeMap<Word, usize> = BTreeMap::new();
    for c in &compiled {
        for (a, b, _) in &c.pairs {
            let next = word_set.len();
            word_set.entry(a.clone()).or_insert(next);
            let next = word_set.len();
            word_set.entry(b.clone()).or_insert(next);
        }
        for (w, _) in &c.rhs {
            let next = word_set.len();
            word_set.entry(w.clone()).or_insert(next);
        }
    }
    let words: Vec<Word> = {
        let mut v: Vec<(Word, usize)> = word_set.iter().map(|(w, &i)| (w.clone(), i)).collect();
        v.sort_by_key(|(_, i)| *i);
        v.into_iter().map(|(w, _)| w).collect()
    };

    // per-sample traces of every word (parallel over samples, fixed order)
    let traces: Vec<Vec<f64>> = ens
        .samples
        .par_iter()
        .map(|x| {
            let mut ctx = EvalCtx::new(x);
            words.iter().map(|w| ctx.tau_word(w).re).collect()
        })
        .collect();

    let s = ens.len();
    let mut out = Vec::new();
    for c in &compiled {
        let idx = |w: &Word| word_set[w];
        // per-sample residuals
        let per_sample: Vec<f64> = (0..s)
            .map(|k| {
                let t = &traces[k];
                let lhs: f64 = c.pairs.iter().map(|(a, b, co)| co.re * t[idx(a)] * t[idx(b)]).sum();
                let rhs: f64 = c.rhs.iter().map(|(w, co)| co.re * t[idx(w)]).sum();
                lhs - rhs
            })
            .collect();
        let (mean, stderr) = mean_stderr(&per_sample);
        let sq: Vec<f64> = per_sample.iter().map(|r| r * r).collect();
        let rms = (pairwise_sum(&sq) / s as f64).sqrt();

        // factorized residual from ensemble-mean traces, with jackknife
        let sums: Vec<f64> = (0..words.len())
            .map(|wi| {
                let col: Vec<f64> = (0..s).map(|k| traces[k][wi]).collect();
                pairwise_sum(&col)
            })
            .collect();
        let fact_of = |means: &dyn Fn(usize) -> f64| -> f64 {
            let lhs: f64 = c.pairs.iter().map(|(a, b, co)| co.re * means(idx(a)) * means(idx(b))).sum();
            let rhs: f64 = c.rhs.iter().map(|(w, co)| co.re * means(idx(w))).sum();
            lhs - rhs
        };
        let full = fact_of(&|wi| sums[wi] / s as f64);
        let mut jack = Vec::with_capacity(s);
        for k in 0..s {
            let f = fact_of(&|wi| (sums[wi] - traces[k][wi]) / (s as f64 - 1.0));
            jack.push(f);
        }
        let jack_mean = pairwise_sum(&jack) / s as f64;
        let jack_var: f64 = jack.iter().map(|j| (j - jack_mean) * (j - jack_mean)).sum::<f64>()
            * (s as f64 - 1.0)
            / s as f64;
        out.push(SdEntry {
            label: c.label.clone(),
            letter: c.letter,
            mean,
            stderr,
            rms,
            factorized: full,
            factorized_stderr: jack_var.sqrt(),
        });
    }
    Ok(out)
}

/// Covariance estimate |E[τ̂(P)τ̂(Q)] − E[τ̂(P)]E[τ̂(Q)]| with its jackknife
/// standard error and the ensemble dimension (so 1/N² scaling is visible
/// across runs).
#[derive(Clone, Debug, serde::Serialize)]
pub struct ConcentrationReport {
    pub dim: usize,
    pub covariance: f64,
    pub stderr: f64,
}

pub fn concentration_check(ens: &Ensemble, p: &NcPoly, q: &NcPoly) -> Result<ConcentrationReport, MatError> {
    if ens.is_empty() {
        return Err(MatError::EmptyEnsemble);
    }
    let vals: Vec<(f64, f64)> = ens
        .samples
        .par_iter()
        .map(|x| {
            let mut ctx = EvalCtx::new(x);
            let tp = super::eval::eval_poly_ctx(p, &mut ctx);
            let tq = super::eval::eval_poly_ctx(q, &mut ctx);
            (super::eval::tau_hat(&tp).re, super::eval::tau_hat(&tq).re)
        })
        .collect();
    let s = vals.len();
    let ps: Vec<f64> = vals.iter().map(|v| v.0).collect();
    let qs: Vec<f64> = vals.iter().map(|v| v.1).collect();
    let pq: Vec<f64> = vals.iter().map(|v| v.0 * v.1).collect();
    let (sp, sq, spq) = (pairwise_sum(&ps), pairwise_sum(&qs), pairwise_sum(&pq));
    let cov_of = |sp: f64, sq: f64, spq: f64, m: f64| spq / m - (sp / m) * (sq / m);
    let full = cov_of(sp, sq, spq, s as f64);
    let mut jack = Vec::with_capacity(s);
    for k in 0..s {
        jack.push(cov_of(sp - ps[k], sq - qs[k], spq - pq[k], s as f64 - 1.0));
    }
    let jm = pairwise_sum(&jack) / s as f64;
    let jv: f64 =
        jack.iter().map(|j| (j - jm) * (j - jm)).sum::<f64>() * (s as f64 - 1.0) / s as f64;
    Ok(ConcentrationReport { dim: ens.dim(), covariance: full.abs(), stderr: jv.sqrt() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_sum_matches_naive() {
        let xs: Vec<f64> = (0..1037).map(|i| (i as f64) * 0.5 - 17.0).collect();
        let naive: f64 = xs.iter().sum();
        assert!((pairwise_sum(&xs) - naive).abs() < 1e-9);
    }
}
