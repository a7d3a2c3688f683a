//! Gradients of the semigroup and the Poisson-equation drift
//! 𝒟g_α = −½∫₀^∞ 𝒟(φ_t^{α′}(W)) dt at matrix scale.
//!
//! The finite-N stand-in for 𝒟ᵢ(φ_t^{α′}(W))(Y) is
//! G_i = N·∇_{Y_i} E[τ̂(W(X_t^α(Y)))] with respect to the Σ Re Tr pairing.
//! Adjoint mode propagates the co-state backwards through the stored Euler
//! steps — the exact transpose of the discrete first-variation flow, using
//! the self-adjointness of the Hessian superoperator — and the time
//! quadrature folds into the same sweep as a trapezoid source term.
//! Finite differences with common random numbers are the oracle.

use crate::freesde::{CompiledDrift, PotentialFamily, TimeGrid};
use crate::matrep::eval::{CompiledNc, EvalCtx};
use crate::matrep::hessian::HessianOp;
use crate::matrep::{tau_hat, Mat};
use crate::ncalg::TracePoly;
use crate::rng::{gue_increment, stream};
use serde::{Deserialize, Serialize};

use super::TransportError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradMode {
    Adjoint,
    FiniteDifference,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TransportConfig {
    /// Shared time grid: path storage and semigroup quadrature.
    pub grid: TimeGrid,
    /// Monte-Carlo paths per drift evaluation (pairs when antithetic).
    pub paths: usize,
    #[serde(default = "default_true")]
    pub antithetic: bool,
    pub d_alpha: f64,
    pub alpha_max: f64,
    pub grad_mode: GradMode,
    #[serde(default = "default_fd_step")]
    pub fd_step: f64,
    pub seed: u64,
    /// Recorded exponential-tail budget for the truncated ∫₀^∞.
    #[serde(default = "default_tail_tol")]
    pub tail_tol: f64,
    /// Abort when a flowed sample's operator norm exceeds this.
    #[serde(default = "default_confine")]
    pub confine_norm: f64,
    /// α values at which snapshots and diagnostics are recorded.
    #[serde(default)]
    pub checkpoints: Vec<f64>,
}

fn default_true() -> bool {
    true
}

fn default_fd_step() -> f64 {
    1e-4
}

fn default_tail_tol() -> f64 {
    1e-2
}

fn default_confine() -> f64 {
    12.0
}

impl TransportConfig {
    pub fn validate(&self) -> Result<(), TransportError> {
        if self.d_alpha <= 0.0 || self.alpha_max <= 0.0 {
            return Err(TransportError::Config("alpha steps must be positive".into()));
        }
        if self.paths == 0 || (self.antithetic && self.paths % 2 != 0) {
            return Err(TransportError::Config(
                "paths must be positive (and even with antithetic pairing)".into(),
            ));
        }
        Ok(())
    }
}

/// Everything compiled once per interpolation node α.
pub struct AlphaCtx {
    pub alpha: f64,
    pub drift: CompiledDrift,
    pub hess: HessianOp,
    pub w_grads: Vec<CompiledNc>,
    pub w_poly: CompiledNc,
}

impl AlphaCtx {
    pub fn new(fam: &PotentialFamily, alpha: f64) -> Self {
        let w = fam.w();
        let wt = TracePoly::from(w.clone());
        AlphaCtx {
            alpha,
            drift: CompiledDrift::new(fam, alpha),
            hess: HessianOp::new(&fam.v_alpha(alpha)),
            w_grads: (1..=w.n)
                .map(|i| CompiledNc::compile(&wt.cyclic_derivative(i).expect_plain()))
                .collect(),
            w_poly: CompiledNc::compile(w),
        }
    }

    fn eval_w_grad_ctx(&self, ctx: &mut EvalCtx) -> Vec<Mat> {
        self.w_grads
            .iter()
            .map(|g| {
                let mut m = g.eval(ctx);
                m.hermitize();
                m
            })
            .collect()
    }
}

pub struct DgEstimate {
    pub drift: Vec<Mat>,
    /// RMS entrywise standard error across independent pairs.
    pub stderr: f64,
    /// Recorded bound on the truncated exponential tail.
    pub tail_bound: f64,
}

/// One forward simulation + backward co-state sweep; `weights[k]` is the
/// source injected at grid node k, so trapezoid weights give the full time
/// quadrature and an indicator gives the single-time gradient.
fn adjoint_sweep(
    actx: &AlphaCtx,
    states: &[Vec<Mat>],
    grid: &TimeGrid,
    weights: &[f64],
) -> (Vec<Mat>, f64) {
    let k_max = grid.steps();
    let dim = states[0][0].n;
    let n = states[0].len();
    let mut ctx = EvalCtx::from_mats(&states[k_max]);
    let w_end = actx.eval_w_grad_ctx(&mut ctx);
    let tail_scale: f64 = w_end.iter().map(|m| m.frobenius().powi(2)).sum::<f64>().sqrt();
    let mut r: Vec<Mat> = if weights[k_max] != 0.0 {
        let mut r = w_end;
        for m in r.iter_mut() {
            m.scale(weights[k_max]);
        }
        r
    } else {
        (0..n).map(|_| Mat::zeros(dim)).collect()
    };
    drop(ctx);
    for s in (0..k_max).rev() {
        let dt = grid.dt(s);
        let mut ctx = EvalCtx::from_mats(&states[s]);
        let hr = actx.hess.apply(&mut ctx, &r);
        for (ri, hi) in r.iter_mut().zip(&hr) {
            ri.add_scaled(hi, -dt / 2.0);
        }
        if weights[s] != 0.0 {
            let ws = actx.eval_w_grad_ctx(&mut ctx);
            for (ri, wi) in r.iter_mut().zip(&ws) {
                ri.add_scaled(wi, weights[s]);
            }
        }
        for ri in r.iter_mut() {
            ri.hermitize();
        }
    }
    (r, tail_scale)
}

fn forward_states(
    actx: &AlphaCtx,
    y: &[Mat],
    grid: &TimeGrid,
    rng: &mut crate::rng::Stream,
    sign_pair: bool,
) -> (Vec<Vec<Mat>>, Option<Vec<Vec<Mat>>>) {
    let dim = y[0].n;
    let mut xp: Vec<Mat> = y.to_vec();
    let mut xm: Option<Vec<Mat>> = sign_pair.then(|| y.to_vec());
    let mut states_p = Vec::with_capacity(grid.times.len());
    let mut states_m = sign_pair.then(|| Vec::with_capacity(grid.times.len()));
    states_p.push(xp.clone());
    if let (Some(sm), Some(x)) = (&mut states_m, &xm) {
        sm.push(x.clone());
    }
    for step in 0..grid.steps() {
        let dt = grid.dt(step);
        let noise: Vec<Mat> = (0..y.len()).map(|_| gue_increment(dim, dt, rng)).collect();
        let d = actx.drift.eval(&xp);
        crate::freesde::euler_step(&mut xp, &d, dt, Some(&noise));
        states_p.push(xp.clone());
        if let Some(x) = &mut xm {
            let mut neg: Vec<Mat> = noise.clone();
            for m in neg.iter_mut() {
                m.scale(-1.0);
            }
            let d = actx.drift.eval(x);
            crate::freesde::euler_step(x, &d, dt, Some(&neg));
            states_m.as_mut().unwrap().push(x.clone());
        }
    }
    (states_p, states_m)
}

/// 𝒟g_α(Y) estimate: −½ × time quadrature of the semigroup gradient over
/// the shared grid, one path bundle reused across all times.
pub fn dg_eval(
    actx: &AlphaCtx,
    y: &[Mat],
    grid: &TimeGrid,
    cfg: &TransportConfig,
    c_min: f64,
    key: &[u64],
) -> Result<DgEstimate, TransportError> {
    let weights = grid.trapezoid_weights();
    let pairs = if cfg.antithetic { cfg.paths / 2 } else { cfg.paths };
    let n = y.len();
    let dim = y[0].n;
    let mut acc: Vec<Mat> = (0..n).map(|_| Mat::zeros(dim)).collect();
    let mut per_pair: Vec<Vec<Mat>> = Vec::with_capacity(pairs);
    let mut tail_scales = Vec::with_capacity(pairs);
    for pair in 0..pairs {
        let mut ids = key.to_vec();
        ids.push(pair as u64);
        let mut rng = stream(cfg.seed, &ids);
        let (sp, sm) = forward_states(actx, y, grid, &mut rng, cfg.antithetic);
        let (rp, tp) = adjoint_sweep(actx, &sp, grid, &weights);
        let (contrib, tail) = if let Some(sm) = sm {
            let (rm, tm) = adjoint_sweep(actx, &sm, grid, &weights);
            let mut avg = rp;
            for (a, b) in avg.iter_mut().zip(&rm) {
                a.add_scaled(b, 1.0);
                a.scale(0.5);
            }
            (avg, 0.5 * (tp + tm))
        } else {
            (rp, tp)
        };
        tail_scales.push(tail);
        for (a, c) in acc.iter_mut().zip(&contrib) {
            a.add_scaled(c, 1.0);
        }
        per_pair.push(contrib);
    }
    let pf = pairs as f64;
    for a in acc.iter_mut() {
        a.scale(-0.5 / pf);
    }
    // entrywise variance across pairs → RMS standard error
    let stderr = if pairs > 1 {
        let mut var_sum = 0.0;
        for contrib in &per_pair {
            let mut dev2 = 0.0;
            for (c, mean) in contrib.iter().zip(&acc) {
                let mut d = c.clone();
                d.scale(-0.5);
                d.add_scaled(mean, -1.0);
                dev2 += d.herm_inner(&d);
            }
            var_sum += dev2;
        }
        (var_sum / (pf * (pf - 1.0)) / (n * dim * dim) as f64).sqrt()
    } else {
        0.0
    };
    let tail_scale = tail_scales.iter().sum::<f64>() / pf;
    let c = c_min.max(1e-9);
    let tail_bound = (-c * grid.horizon() / 2.0).exp() * tail_scale / c;
    if tail_bound > cfg.tail_tol * (1.0 + tail_scale) {
        return Err(TransportError::TailBound { bound: tail_bound, tol: cfg.tail_tol });
    }
    Ok(DgEstimate { drift: acc, stderr, tail_bound })
}

/// Single-time semigroup gradient G(t) = N∇E[τ̂(W(X_t))], adjoint mode.
pub fn semigroup_gradient(
    actx: &AlphaCtx,
    y: &[Mat],
    grid: &TimeGrid,
    t: f64,
    paths: usize,
    antithetic: bool,
    seed: u64,
    key: &[u64],
) -> Vec<Mat> {
    let idx = grid.index_of(t);
    let mut weights = vec![0.0; grid.times.len()];
    weights[idx] = 1.0;
    let sub = TimeGrid { times: grid.times[..=idx].to_vec() };
    let pairs = if antithetic { (paths / 2).max(1) } else { paths };
    let n = y.len();
    let dim = y[0].n;
    let mut acc: Vec<Mat> = (0..n).map(|_| Mat::zeros(dim)).collect();
    for pair in 0..pairs {
        let mut ids = key.to_vec();
        ids.push(pair as u64);
        let mut rng = stream(seed, &ids);
        let (sp, sm) = forward_states(actx, y, &sub, &mut rng, antithetic);
        let (rp, _) = adjoint_sweep(actx, &sp, &sub, &weights[..=idx]);
        if let Some(sm) = sm {
            let (rm, _) = adjoint_sweep(actx, &sm, &sub, &weights[..=idx]);
            for (a, (p, m)) in acc.iter_mut().zip(rp.iter().zip(&rm)) {
                a.add_scaled(p, 0.5);
                a.add_scaled(m, 0.5);
            }
        } else {
            for (a, p) in acc.iter_mut().zip(&rp) {
                a.add_scaled(p, 1.0);
            }
        }
    }
    for a in acc.iter_mut() {
        a.scale(1.0 / pairs as f64);
    }
    acc
}

/// Finite-difference oracle for the same gradient: central differences on
/// the Hermitian entry basis with common random numbers.
#[allow(clippy::too_many_arguments)]
pub fn semigroup_gradient_fd(
    actx: &AlphaCtx,
    y: &[Mat],
    grid: &TimeGrid,
    t: f64,
    paths: usize,
    seed: u64,
    key: &[u64],
    fd_step: f64,
) -> Vec<Mat> {
    let idx = grid.index_of(t);
    let sub = TimeGrid { times: grid.times[..=idx].to_vec() };
    let n = y.len();
    let dim = y[0].n;
    let h_of = |mats: &[Mat]| -> f64 {
        let mut acc = 0.0;
        for path in 0..paths {
            let mut ids = key.to_vec();
            ids.push(path as u64);
            let mut rng = stream(seed, &ids);
            let mut x = mats.to_vec();
            for step in 0..sub.steps() {
                let dt = sub.dt(step);
                let noise: Vec<Mat> = (0..n).map(|_| gue_increment(dim, dt, &mut rng)).collect();
                let d = actx.drift.eval(&x);
                crate::freesde::euler_step(&mut x, &d, dt, Some(&noise));
            }
            let mut ctx = EvalCtx::from_mats(&x);
            acc += tau_hat(&actx.w_poly.eval(&mut ctx)).re;
        }
        acc / paths as f64
    };
    let mut grad: Vec<Mat> = (0..n).map(|_| Mat::zeros(dim)).collect();
    let eps = fd_step;
    for i in 0..n {
        let probe = |basis: &Mat, norm2: f64, grad: &mut Vec<Mat>| {
            let mut plus = y.to_vec();
            plus[i].add_scaled(basis, eps);
            let mut minus = y.to_vec();
            minus[i].add_scaled(basis, -eps);
            let dh = (h_of(&plus) - h_of(&minus)) / (2.0 * eps);
            grad[i].add_scaled(basis, dim as f64 * dh / norm2);
        };
        for k in 0..dim {
            let mut b = Mat::zeros(dim);
            b.re[k * dim + k] = 1.0;
            probe(&b, 1.0, &mut grad);
            for l in (k + 1)..dim {
                let mut b = Mat::zeros(dim);
                b.re[k * dim + l] = 1.0;
                b.re[l * dim + k] = 1.0;
                probe(&b, 2.0, &mut grad);
                let mut b = Mat::zeros(dim);
                b.im[k * dim + l] = 1.0;
                b.im[l * dim + k] = -1.0;
                probe(&b, 2.0, &mut grad);
            }
        }
    }
    grad
}

/// Runs both gradient modes with matched seeds and reports the relative
/// error; fails beyond `tol` (finite differences are the oracle).
#[allow(clippy::too_many_arguments)]
pub fn verify_gradient(
    fam: &PotentialFamily,
    alpha: f64,
    y: &[Mat],
    grid: &TimeGrid,
    t: f64,
    paths: usize,
    seed: u64,
    fd_step: f64,
    tol: f64,
) -> Result<f64, TransportError> {
    let actx = AlphaCtx::new(fam, alpha);
    let adj = semigroup_gradient(&actx, y, grid, t, paths, false, seed, &[7001]);
    let fd = semigroup_gradient_fd(&actx, y, grid, t, paths, seed, &[7001], fd_step);
    let mut num = 0.0;
    let mut den = 0.0;
    for (a, f) in adj.iter().zip(&fd) {
        let mut d = a.clone();
        d.add_scaled(f, -1.0);
        num += d.herm_inner(&d);
        den += f.herm_inner(f);
    }
    let rel = (num / den.max(1e-300)).sqrt();
    if rel > tol {
        return Err(TransportError::GradientMismatch { rel, tol });
    }
    Ok(rel)
}
