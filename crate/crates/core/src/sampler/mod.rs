//! Sampling of μ_{V,N} ∝ exp(−N Tr V) on n-tuples of Hermitian matrices by
//! unadjusted or Metropolis-adjusted Langevin chains.
//!
//! The chain moves X ← X − (h/2)𝒟V(X) + √h·W with the Hermitian Gaussian
//! increment of [`crate::rng::gue_increment`]; in these coordinates the
//! continuous-time limit is the coordinate Langevin diffusion with
//! potential N Tr V, stationary for μ_{V,N}, and the Gaussian proposal
//! density is exp(−(N/2h)·ΣᵢTr(·)²), which is what the MALA correction
//! uses.

use crate::matrep::eval::{eval_poly_ctx, EvalCtx};
use crate::matrep::{
    certify_convexity, tau_hat, Convexity, Ensemble, EnsembleMeta, HermMatrix, Mat, MatrixTuple,
};
use crate::ncalg::{NcPoly, PotentialSpec, TracePoly};
use crate::rng::{gue_increment, stream, Stream};
use rand::RngExt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Error, Debug)]
pub enum SampleError {
    #[error("invalid chain configuration: {0}")]
    Config(String),
    #[error("chain diverged at step {step}: operator norm {norm:.3e} exceeds {bound:.3e}")]
    Divergence { step: usize, norm: f64, bound: f64 },
    #[error(transparent)]
    Mat(#[from] crate::matrep::MatError),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChainConfig {
    pub potential: PotentialSpec,
    /// Letter count n.
    pub n: u8,
    /// Matrix dimension N.
    pub dim: usize,
    /// Samples to record.
    pub count: usize,
    /// Langevin time step h.
    pub step: f64,
    pub burnin: usize,
    pub thin: usize,
    /// Metropolis-adjust (default) or unadjusted.
    pub mala: bool,
    pub seed: u64,
    /// Independent chains run in parallel; samples are split across them.
    #[serde(default = "default_chains")]
    pub chains: usize,
    /// Divergence detector: abort when any operator norm exceeds this.
    #[serde(default = "default_blowup")]
    pub blowup_norm: f64,
}

fn default_chains() -> usize {
    2
}

fn default_blowup() -> f64 {
    50.0
}

impl ChainConfig {
    pub fn validate(&self) -> Result<(), SampleError> {
        if self.step <= 0.0 {
            return Err(SampleError::Config("step must be positive".into()));
        }
        if self.dim == 0 || self.n == 0 || self.count == 0 || self.chains == 0 {
            return Err(SampleError::Config("n, N, count, chains must be positive".into()));
        }
        if self.potential.n() != self.n {
            return Err(SampleError::Config(format!(
                "potential has {} letters, config says {}",
                self.potential.n(),
                self.n
            )));
        }
        self.potential.validate().map_err(SampleError::Config)?;
        Ok(())
    }
}

/// A potential compiled for chain use: the plain polynomial, its cyclic
/// gradient per letter, and the letter count.
pub struct CompiledPotential {
    pub v: NcPoly,
    pub grads: Vec<NcPoly>,
}

impl CompiledPotential {
    pub fn new(v: &NcPoly) -> Self {
        let vt = TracePoly::from(v.clone());
        let grads = (1..=v.n).map(|i| vt.cyclic_derivative(i).expect_plain()).collect();
        CompiledPotential { v: v.clone(), grads }
    }

    /// 𝒟V(X), symmetrized.
    pub fn drift(&self, mats: &[Mat]) -> Vec<Mat> {
        let mut ctx = EvalCtx::from_mats(mats);
        self.grads
            .iter()
            .map(|g| {
                let mut d = eval_poly_ctx(g, &mut ctx);
                d.hermitize();
                d
            })
            .collect()
    }

    /// Unnormalized Re Tr V(X).
    pub fn trace_v(&self, mats: &[Mat]) -> f64 {
        let mut ctx = EvalCtx::from_mats(mats);
        let m = eval_poly_ctx(&self.v, &mut ctx);
        m.trace().re
    }
}

/// One unadjusted Langevin step.
pub fn langevin_step(x: &[Mat], pot: &CompiledPotential, h: f64, rng: &mut Stream) -> Vec<Mat> {
    let drift = pot.drift(x);
    step_from_drift(x, &drift, h, rng).0
}

fn step_from_drift(x: &[Mat], drift: &[Mat], h: f64, rng: &mut Stream) -> (Vec<Mat>, Vec<Mat>) {
    let dim = x[0].n;
    let mut noises = Vec::with_capacity(x.len());
    let mut out = Vec::with_capacity(x.len());
    for (xi, di) in x.iter().zip(drift) {
        let w = gue_increment(dim, h, rng);
        let mut y = xi.clone();
        y.add_scaled(di, -h / 2.0);
        y.add_scaled(&w, 1.0);
        y.hermitize();
        out.push(y);
        noises.push(w);
    }
    (out, noises)
}

/// One MALA step; returns the (possibly unchanged) state and whether the
/// proposal was accepted. `cur` carries the cached drift and Tr V of the
/// current state and is updated on acceptance.
pub struct ChainState {
    pub x: Vec<Mat>,
    pub drift: Vec<Mat>,
    pub trace_v: f64,
}

impl ChainState {
    pub fn new(x: Vec<Mat>, pot: &CompiledPotential) -> Self {
        let drift = pot.drift(&x);
        let trace_v = pot.trace_v(&x);
        ChainState { x, drift, trace_v }
    }
}

pub fn mala_step(state: &mut ChainState, pot: &CompiledPotential, h: f64, rng: &mut Stream) -> bool {
    let dim = state.x[0].n;
    let nf = dim as f64;
    let (proposal, noises) = step_from_drift(&state.x, &state.drift, h, rng);
    let prop_drift = pot.drift(&proposal);
    let prop_trace = pot.trace_v(&proposal);
    // forward transition: Y − X + (h/2)𝒟V(X) is exactly the drawn noise
    let mut fwd = 0.0;
    for w in &noises {
        fwd += w.herm_inner(w);
    }
    // reverse transition: X − Y + (h/2)𝒟V(Y)
    let mut rev = 0.0;
    for ((xi, yi), dyi) in state.x.iter().zip(&proposal).zip(&prop_drift) {
        let mut r = xi.clone();
        r.add_scaled(yi, -1.0);
        r.add_scaled(dyi, h / 2.0);
        rev += r.herm_inner(&r);
    }
    let log_alpha = -nf * (prop_trace - state.trace_v) - nf / (2.0 * h) * (rev - fwd);
    let u: f64 = rng.random();
    if u.ln() < log_alpha {
        state.x = proposal;
        state.drift = prop_drift;
        state.trace_v = prop_trace;
        true
    } else {
        false
    }
}

/// Integrated autocorrelation time by the initial monotone positive
/// sequence estimator.
pub fn integrated_autocorr_time(series: &[f64]) -> f64 {
    let n = series.len();
    if n < 8 {
        return 1.0;
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let c0: f64 = series.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
    if c0 <= 0.0 {
        return 1.0;
    }
    let rho = |k: usize| -> f64 {
        let mut acc = 0.0;
        for i in 0..n - k {
            acc += (series[i] - mean) * (series[i + k] - mean);
        }
        acc / n as f64 / c0
    };
    let mut sum = 0.0;
    let mut prev_gamma = f64::INFINITY;
    let mut m = 0;
    loop {
        let k = 2 * m;
        if k + 1 >= n / 2 {
            break;
        }
        let gamma = rho(k) + rho(k + 1);
        if gamma <= 0.0 {
            break;
        }
        let gamma = gamma.min(prev_gamma);
        prev_gamma = gamma;
        sum += gamma;
        m += 1;
    }
    (2.0 * sum - 1.0).max(1.0)
}

struct ChainOutput {
    samples: Vec<MatrixTuple>,
    accepted: usize,
    proposed: usize,
    trace_series: Vec<f64>,
}

fn run_chain(cfg: &ChainConfig, pot: &CompiledPotential, chain_idx: u64, count: usize) -> Result<ChainOutput, SampleError> {
    let dim = cfg.dim;
    let blow2 = cfg.blowup_norm * cfg.blowup_norm;
    let x0: Vec<Mat> = (0..cfg.n).map(|_| Mat::zeros(dim)).collect();
    let mut state = ChainState::new(x0, pot);
    let mut accepted = 0usize;
    let mut proposed = 0usize;
    let mut samples = Vec::with_capacity(count);
    let mut trace_series = Vec::new();
    let total = cfg.burnin + cfg.thin.max(1) * count;
    for step_idx in 0..total {
        let mut rng = stream(cfg.seed, &[chain_idx, step_idx as u64]);
        if cfg.mala {
            proposed += 1;
            if mala_step(&mut state, pot, cfg.step, &mut rng) {
                accepted += 1;
            }
        } else {
            let x = langevin_step(&state.x, pot, cfg.step, &mut rng);
            state = ChainState::new(x, pot);
        }
        // divergence detector: τ̂(X²) > bound² implies the operator norm
        // exceeds the bound (mean of eigenvalue squares ≤ max square)
        for xi in &state.x {
            let t2 = xi.herm_inner(xi) / dim as f64;
            if t2 > blow2 {
                let norm = xi.herm_op_norm();
                if norm > cfg.blowup_norm {
                    return Err(SampleError::Divergence { step: step_idx, norm, bound: cfg.blowup_norm });
                }
            }
        }
        let t2 = tau_hat(&state.x[0].mul(&state.x[0])).re;
        trace_series.push(t2);
        if step_idx >= cfg.burnin && (step_idx - cfg.burnin + 1) % cfg.thin.max(1) == 0 && samples.len() < count {
            let mats = state.x.iter().map(|m| HermMatrix::symmetrized(m.clone())).collect();
            samples.push(MatrixTuple::new(mats)?);
        }
    }
    Ok(ChainOutput { samples, accepted, proposed, trace_series })
}

/// Samples `cfg.count` tuples from μ_{V,N}, splitting across independent
/// chains. Reproducible: streams are keyed by (seed, chain, step).
pub fn sample_ensemble(cfg: &ChainConfig) -> Result<Ensemble, SampleError> {
    cfg.validate()?;
    let v = cfg.potential.expand();
    let pot = CompiledPotential::new(&v);
    let mut notes = Vec::new();
    match certify_convexity(&cfg.potential) {
        Convexity::Certified { c } => notes.push(format!("certified h-convex with c = {c}")),
        Convexity::Rejected { reason } => {
            notes.push(format!("warning: potential not certified ({reason})"))
        }
    }
    let chains = cfg.chains.min(cfg.count).max(1);
    let per: Vec<usize> = (0..chains)
        .map(|k| cfg.count / chains + usize::from(k < cfg.count % chains))
        .collect();
    let outputs: Vec<Result<ChainOutput, SampleError>> = per
        .par_iter()
        .enumerate()
        .map(|(k, &cnt)| run_chain(cfg, &pot, k as u64, cnt))
        .collect();
    let mut samples = Vec::with_capacity(cfg.count);
    let mut accepted = 0;
    let mut proposed = 0;
    let mut iat_acc = 0.0;
    let mut iat_cnt = 0;
    for out in outputs {
        let out = out?;
        samples.extend(out.samples);
        accepted += out.accepted;
        proposed += out.proposed;
        iat_acc += integrated_autocorr_time(&out.trace_series);
        iat_cnt += 1;
    }
    let meta = EnsembleMeta {
        seed: cfg.seed,
        potential: Some(cfg.potential.clone()),
        chain: Some(serde_json::to_value(cfg).expect("chain config serializes")),
        acceptance_rate: if cfg.mala && proposed > 0 {
            Some(accepted as f64 / proposed as f64)
        } else {
            None
        },
        autocorr_time: Some(iat_acc / iat_cnt.max(1) as f64),
        notes,
    };
    Ensemble::new(samples, meta).map_err(SampleError::from)
}

/// Direct i.i.d. draws from the Gaussian ensemble μ_{½Σxᵢ²,N} (entry
/// variance 1/N): the exact semicircle-potential source.
pub fn gaussian_ensemble(n: u8, dim: usize, count: usize, seed: u64) -> Ensemble {
    let samples: Vec<MatrixTuple> = (0..count)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream(seed, &[k as u64]);
            let mats = (0..n)
                .map(|_| HermMatrix::symmetrized(gue_increment(dim, 1.0, &mut rng)))
                .collect();
            MatrixTuple::new(mats).expect("tuple")
        })
        .collect();
    let meta = EnsembleMeta {
        seed,
        potential: Some(PotentialSpec::quadratic_plus_quartic(1.0, 0.0)),
        chain: None,
        acceptance_rate: None,
        autocorr_time: Some(1.0),
        notes: vec!["i.i.d. Gaussian ensemble".into()],
    };
    Ensemble::new(samples, meta).expect("ensemble")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrep::mean_stderr;
    use crate::ncalg::monomial;
    use crate::scalar::Coeff;

    #[test]
    fn drift_of_quadratic_is_identity_map() {
        // V = ½ΣXᵢ²: 𝒟ᵢV = Xᵢ
        let v = &monomial(2, &[1, 1], Coeff::ratio(1, 2)) + &monomial(2, &[2, 2], Coeff::ratio(1, 2));
        let pot = CompiledPotential::new(&v);
        let mut rng = stream(3, &[]);
        let x: Vec<Mat> = (0..2).map(|_| gue_increment(6, 1.0, &mut rng)).collect();
        let d = pot.drift(&x);
        for (di, xi) in d.iter().zip(&x) {
            let mut diff = di.clone();
            diff.add_scaled(xi, -1.0);
            assert!(diff.max_abs() < 1e-14);
        }
    }

    #[test]
    fn drift_of_quartic() {
        // V = ¼X⁴: 𝒟V = X³
        let v = monomial(1, &[1, 1, 1, 1], Coeff::ratio(1, 4));
        let pot = CompiledPotential::new(&v);
        let mut rng = stream(4, &[]);
        let x = vec![gue_increment(5, 1.0, &mut rng)];
        let d = pot.drift(&x);
        let x3 = x[0].mul(&x[0]).mul(&x[0]);
        let mut diff = d[0].clone();
        diff.add_scaled(&x3, -1.0);
        assert!(diff.max_abs() < 1e-13);
    }

    #[test]
    fn noise_has_unit_trace_square() {
        // E[τ̂(W₁²)] = 1 at unit h
        let mut rng = stream(5, &[]);
        let mut vals = Vec::new();
        for _ in 0..300 {
            let w = gue_increment(16, 1.0, &mut rng);
            vals.push(tau_hat(&w.mul(&w)).re);
        }
        let (m, se) = mean_stderr(&vals);
        assert!((m - 1.0).abs() < 3.0 * se + 0.01, "mean {m} se {se}");
    }

    #[test]
    fn mala_accepts_everything_at_tiny_step() {
        let v = monomial(1, &[1, 1], Coeff::ratio(1, 2));
        let pot = CompiledPotential::new(&v);
        let mut rng = stream(6, &[]);
        let x = vec![gue_increment(8, 1.0, &mut rng)];
        let mut state = ChainState::new(x, &pot);
        let mut acc = 0;
        for _ in 0..50 {
            if mala_step(&mut state, &pot, 1e-6, &mut rng) {
                acc += 1;
            }
        }
        assert!(acc >= 49, "acceptance {acc}/50 at vanishing step");
    }

    #[test]
    fn rejection_leaves_state_unchanged() {
        let v = monomial(1, &[1, 1], Coeff::ratio(1, 2));
        let pot = CompiledPotential::new(&v);
        let mut rng = stream(7, &[]);
        let x = vec![gue_increment(8, 1.0, &mut rng)];
        let mut state = ChainState::new(x.clone(), &pot);
        // gigantic step: proposals fly far into the tail and get rejected
        let mut any_reject = false;
        for _ in 0..40 {
            let before = state.x[0].clone();
            if !mala_step(&mut state, &pot, 400.0, &mut rng) {
                any_reject = true;
                assert!(state.x[0] == before);
            }
        }
        assert!(any_reject);
    }

    #[test]
    fn seeded_determinism() {
        let cfg = ChainConfig {
            potential: PotentialSpec::quadratic_plus_quartic(1.0, 1.0),
            n: 1,
            dim: 8,
            count: 6,
            step: 0.1,
            burnin: 20,
            thin: 3,
            mala: true,
            seed: 99,
            chains: 2,
            blowup_norm: 50.0,
        };
        let a = sample_ensemble(&cfg).unwrap();
        let b = sample_ensemble(&cfg).unwrap();
        assert_eq!(a.len(), 6);
        for (s, t) in a.samples.iter().zip(&b.samples) {
            for (ma, mb) in s.mats.iter().zip(&t.mats) {
                assert_eq!(ma.mat().re, mb.mat().re);
                assert_eq!(ma.mat().im, mb.mat().im);
            }
        }
    }

    #[test]
    fn quadratic_target_entry_variance() {
        // V = ½c·X²: stationary diagonal entries have variance 1/(cN)
        let c = 2.0;
        let cfg = ChainConfig {
            potential: PotentialSpec::Quartic {
                a: vec![vec![c / 2.0]],
                lambda: vec![vec![1.0]],
                mu: vec![1.0],
                nu: vec![[0.0, 0.0, 1.0]],
                c_claim: None,
            },
            n: 1,
            dim: 16,
            count: 400,
            step: 0.08,
            burnin: 300,
            thin: 10,
            mala: true,
            seed: 123,
            chains: 2,
            blowup_norm: 50.0,
        };
        // note: pure quadratic via nu = 0 weights
        let cfg = ChainConfig {
            potential: PotentialSpec::Quartic {
                a: vec![vec![c / 2.0]],
                lambda: vec![vec![1.0]],
                mu: vec![0.0],
                nu: vec![[0.0, 0.0, 1.0]],
                c_claim: None,
            },
            ..cfg
        };
        let ens = sample_ensemble(&cfg).unwrap();
        let dim = ens.dim();
        let mut diag_sq = Vec::new();
        for s in &ens.samples {
            for i in 0..dim {
                let v = s.mats[0].get(i, i).re;
                diag_sq.push(v * v);
            }
        }
        let (m, se) = mean_stderr(&diag_sq);
        let want = 1.0 / (c * dim as f64);
        assert!((m - want).abs() < 4.0 * se + 0.02 * want, "var {m} want {want} se {se}");
        assert!(ens.meta.acceptance_rate.unwrap() > 0.3);
    }
}
