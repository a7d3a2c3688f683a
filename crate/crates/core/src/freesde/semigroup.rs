//! Monte-Carlo semigroup estimates φ_t(P) = E₀[P(X_t)], the Itô-residual
//! martingale diagnostic, and the small-t generator check.

use super::family::PotentialFamily;
use super::grid::TimeGrid;
use super::path::{euler_step, CompiledDrift};
use super::SdeError;
use crate::matrep::eval::{CompiledTrace, EvalCtx};
use crate::matrep::{Mat, MatrixTuple};
use crate::ncalg::TracePoly;
use crate::rng::{gue_increment, stream};
use rayon::prelude::*;

#[derive(Clone)]
pub struct SemigroupPoint {
    pub t: f64,
    pub mean: Mat,
    /// Entrywise standard error (magnitude across re/im).
    pub stderr: Mat,
    pub paths: usize,
}

struct Accum {
    sum_re: Vec<f64>,
    sum_im: Vec<f64>,
    sq_re: Vec<f64>,
    sq_im: Vec<f64>,
}

impl Accum {
    fn new(sz: usize) -> Self {
        Accum { sum_re: vec![0.0; sz], sum_im: vec![0.0; sz], sq_re: vec![0.0; sz], sq_im: vec![0.0; sz] }
    }

    fn push(&mut self, m: &Mat) {
        for k in 0..m.re.len() {
            self.sum_re[k] += m.re[k];
            self.sum_im[k] += m.im[k];
            self.sq_re[k] += m.re[k] * m.re[k];
            self.sq_im[k] += m.im[k] * m.im[k];
        }
    }

    fn merge(&mut self, o: &Accum) {
        for k in 0..self.sum_re.len() {
            self.sum_re[k] += o.sum_re[k];
            self.sum_im[k] += o.sum_im[k];
            self.sq_re[k] += o.sq_re[k];
            self.sq_im[k] += o.sq_im[k];
        }
    }

    fn finish(&self, dim: usize, n: usize) -> (Mat, Mat) {
        let nf = n as f64;
        let mut mean = Mat::zeros(dim);
        let mut se = Mat::zeros(dim);
        for k in 0..self.sum_re.len() {
            let mre = self.sum_re[k] / nf;
            let mim = self.sum_im[k] / nf;
            mean.re[k] = mre;
            mean.im[k] = mim;
            if n > 1 {
                let vre = (self.sq_re[k] / nf - mre * mre).max(0.0) * nf / (nf - 1.0);
                let vim = (self.sq_im[k] / nf - mim * mim).max(0.0) * nf / (nf - 1.0);
                se.re[k] = ((vre + vim) / nf).sqrt();
            }
        }
        (mean, se)
    }
}

/// Monte Carlo over independent noise paths from a fixed start; one
/// simulated path serves every requested time.
#[allow(clippy::too_many_arguments)]
pub fn semigroup_eval(
    p: &TracePoly,
    x0: &MatrixTuple,
    fam: &PotentialFamily,
    alpha: f64,
    ts: &[f64],
    grid: &TimeGrid,
    paths: usize,
    seed: u64,
) -> Result<Vec<SemigroupPoint>, SdeError> {
    assert_eq!(p.n, fam.n(), "dimension mismatch");
    let t_idx: Vec<usize> = ts.iter().map(|&t| grid.index_of(t)).collect();
    let compiled = CompiledTrace::compile(p);
    let drift = CompiledDrift::new(fam, alpha);
    let dim = x0.dim();
    let nsq = dim * dim;
    let chunk = 64usize;
    let chunks: Vec<(usize, usize)> = (0..paths)
        .step_by(chunk)
        .map(|s| (s, (s + chunk).min(paths)))
        .collect();
    let partials: Vec<Result<Vec<Accum>, SdeError>> = chunks
        .par_iter()
        .map(|&(lo, hi)| {
            let mut acc: Vec<Accum> = t_idx.iter().map(|_| Accum::new(nsq)).collect();
            for path in lo..hi {
                let mut rng = stream(seed, &[path as u64]);
                let mut x: Vec<Mat> = x0.mats.iter().map(|m| m.mat().clone()).collect();
                let record = |x: &[Mat], at: usize, acc: &mut Vec<Accum>| {
                    for (slot, &ti) in t_idx.iter().enumerate() {
                        if ti == at {
                            let mut ctx = EvalCtx::from_mats(x);
                            let val = compiled.eval(&mut ctx);
                            acc[slot].push(&val);
                        }
                    }
                };
                record(&x, 0, &mut acc);
                for step in 0..grid.steps() {
                    let dt = grid.dt(step);
                    let d = drift.eval(&x);
                    let ns: Vec<Mat> = (0..x.len()).map(|_| gue_increment(dim, dt, &mut rng)).collect();
                    euler_step(&mut x, &d, dt, Some(&ns));
                    record(&x, step + 1, &mut acc);
                }
            }
            Ok(acc)
        })
        .collect();
    let mut total: Vec<Accum> = t_idx.iter().map(|_| Accum::new(nsq)).collect();
    for part in partials {
        let part = part?;
        for (t, p) in total.iter_mut().zip(&part) {
            t.merge(p);
        }
    }
    Ok(t_idx
        .iter()
        .enumerate()
        .map(|(slot, &ti)| {
            let (mean, stderr) = total[slot].finish(dim, paths);
            SemigroupPoint { t: grid.times[ti], mean, stderr, paths }
        })
        .collect())
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct ItoPoint {
    pub t: f64,
    pub mean: f64,
    pub stderr: f64,
}

/// Mean over paths of Re τ̂(M_t·A) for
/// M_t = P(X_t) − P(X₀) − ½∫₀ᵗ(Δ_{V_α}+δ_{V_α})P(X_s)ds (trapezoid).
/// The stochastic-integral term is a martingale, so the mean must vanish
/// within Monte-Carlo error.
#[allow(clippy::too_many_arguments)]
pub fn ito_martingale_stat(
    p: &TracePoly,
    x0: &MatrixTuple,
    fam: &PotentialFamily,
    alpha: f64,
    ts: &[f64],
    grid: &TimeGrid,
    paths: usize,
    seed: u64,
    probe: &Mat,
) -> Result<Vec<ItoPoint>, SdeError> {
    let v_alpha = fam.v_alpha(alpha);
    let p_c = CompiledTrace::compile(p);
    let gen_c = CompiledTrace::compile(&p.generator(&v_alpha));
    let drift = CompiledDrift::new(fam, alpha);
    let t_idx: Vec<usize> = ts.iter().map(|&t| grid.index_of(t)).collect();
    let dim = x0.dim();
    let chunk = 32usize;
    let chunks: Vec<(usize, usize)> = (0..paths)
        .step_by(chunk)
        .map(|s| (s, (s + chunk).min(paths)))
        .collect();
    let partials: Vec<Result<Vec<Vec<f64>>, SdeError>> = chunks
        .par_iter()
        .map(|&(lo, hi)| {
            let mut vals: Vec<Vec<f64>> = t_idx.iter().map(|_| Vec::new()).collect();
            for path in lo..hi {
                let mut rng = stream(seed, &[path as u64]);
                let mut x: Vec<Mat> = x0.mats.iter().map(|m| m.mat().clone()).collect();
                let mut ctx = EvalCtx::from_mats(&x);
                let p0 = p_c.eval(&mut ctx);
                let mut gen_prev = gen_c.eval(&mut ctx);
                drop(ctx);
                let mut integral = Mat::zeros(dim);
                for (slot, &ti) in t_idx.iter().enumerate() {
                    if ti == 0 {
                        vals[slot].push(0.0);
                    }
                }
                for step in 0..grid.steps() {
                    let dt = grid.dt(step);
                    let d = drift.eval(&x);
                    let ns: Vec<Mat> = (0..x.len()).map(|_| gue_increment(dim, dt, &mut rng)).collect();
                    euler_step(&mut x, &d, dt, Some(&ns));
                    let mut ctx = EvalCtx::from_mats(&x);
                    let gen_now = gen_c.eval(&mut ctx);
                    integral.add_scaled(&gen_prev, dt / 2.0);
                    integral.add_scaled(&gen_now, dt / 2.0);
                    gen_prev = gen_now;
                    for (slot, &ti) in t_idx.iter().enumerate() {
                        if ti == step + 1 {
                            let mut m = p_c.eval(&mut ctx);
                            m.add_scaled(&p0, -1.0);
                            m.add_scaled(&integral, -1.0);
                            vals[slot].push(m.trace_prod(probe).re / dim as f64);
                        }
                    }
                }
            }
            Ok(vals)
        })
        .collect();
    let mut per_t: Vec<Vec<f64>> = t_idx.iter().map(|_| Vec::new()).collect();
    for part in partials {
        let part = part?;
        for (dst, src) in per_t.iter_mut().zip(part) {
            dst.extend(src);
        }
    }
    Ok(t_idx
        .iter()
        .enumerate()
        .map(|(slot, &ti)| {
            let (mean, stderr) = crate::matrep::mean_stderr(&per_t[slot]);
            ItoPoint { t: grid.times[ti], mean, stderr }
        })
        .collect())
}

/// Single-path Itô residual series for a stored path.
pub fn ito_residual(p: &TracePoly, path: &super::path::SdePath, fam: &PotentialFamily) -> Vec<Mat> {
    let v_alpha = fam.v_alpha(path.alpha);
    let p_c = CompiledTrace::compile(p);
    let gen_c = CompiledTrace::compile(&p.generator(&v_alpha));
    let dim = path.states[0][0].n;
    let mut ctx = EvalCtx::from_mats(&path.states[0]);
    let p0 = p_c.eval(&mut ctx);
    let mut gen_prev = gen_c.eval(&mut ctx);
    drop(ctx);
    let mut integral = Mat::zeros(dim);
    let mut out = vec![Mat::zeros(dim)];
    for step in 1..path.times.len() {
        let dt = path.times[step] - path.times[step - 1];
        let mut ctx = EvalCtx::from_mats(&path.states[step]);
        let gen_now = gen_c.eval(&mut ctx);
        integral.add_scaled(&gen_prev, dt / 2.0);
        integral.add_scaled(&gen_now, dt / 2.0);
        gen_prev = gen_now;
        let mut m = p_c.eval(&mut ctx);
        m.add_scaled(&p0, -1.0);
        m.add_scaled(&integral, -1.0);
        out.push(m);
    }
    out
}

#[derive(Clone, Debug)]
pub struct GeneratorCheck {
    pub finite_t: Mat,
    pub exact: Mat,
    pub max_abs_diff: f64,
}

/// Compares (φ_t(P)(X₀) − P(X₀))/t against the symbolic generator value
/// L_αP(X₀) at a small t.
#[allow(clippy::too_many_arguments)]
pub fn generator_check(
    p: &TracePoly,
    x0: &MatrixTuple,
    fam: &PotentialFamily,
    alpha: f64,
    t: f64,
    dt: f64,
    paths: usize,
    seed: u64,
) -> Result<GeneratorCheck, SdeError> {
    let grid = TimeGrid::uniform(t, dt);
    let pts = semigroup_eval(p, x0, fam, alpha, &[t], &grid, paths, seed)?;
    let mut fd = pts[0].mean.clone();
    let mut ctx = EvalCtx::new(x0);
    let p0 = CompiledTrace::compile(p).eval(&mut ctx);
    fd.add_scaled(&p0, -1.0);
    fd.scale(1.0 / t);
    let exact = CompiledTrace::compile(&p.generator(&fam.v_alpha(alpha))).eval(&mut ctx);
    let mut diff = fd.clone();
    diff.add_scaled(&exact, -1.0);
    Ok(GeneratorCheck { finite_t: fd, exact, max_abs_diff: diff.max_abs() })
}

/// The Hermitian Brownian surrogate increment with E τ̂(ΔS²) = dt.
pub fn brownian_increment(dim: usize, dt: f64, rng: &mut crate::rng::Stream) -> Mat {
    gue_increment(dim, dt, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrep::HermMatrix;
    use crate::ncalg::{monomial, NcPoly};
    use crate::scalar::Coeff;

    fn x0_gue(dim: usize, seed: u64) -> MatrixTuple {
        let mut rng = stream(seed, &[]);
        MatrixTuple::new(vec![HermMatrix::symmetrized(gue_increment(dim, 1.0, &mut rng))]).unwrap()
    }

    #[test]
    fn semigroup_at_zero_is_evaluation() {
        let fam = PotentialFamily::quadratic(2.0);
        let x0 = x0_gue(6, 41);
        let p = TracePoly::from(monomial(1, &[1, 1], Coeff::one()));
        let grid = TimeGrid::uniform(0.5, 0.05);
        let pts = semigroup_eval(&p, &x0, &fam, 0.0, &[0.0], &grid, 3, 1).unwrap();
        let want = crate::matrep::eval_trace_poly(&p, &x0);
        let mut diff = pts[0].mean.clone();
        diff.add_scaled(&want, -1.0);
        assert!(diff.max_abs() < 1e-13);
        assert!(pts[0].stderr.max_abs() < 1e-7);
    }

    #[test]
    fn ou_first_moment_decays() {
        // φ_t(X) = e^{−t/2}X₀ for V = ½x²
        let fam = PotentialFamily::quadratic(2.0);
        let x0 = x0_gue(16, 42);
        let p = TracePoly::from(NcPoly::letter(1, 1));
        let grid = TimeGrid::uniform(1.0, 0.005);
        let pts = semigroup_eval(&p, &x0, &fam, 0.0, &[1.0], &grid, 400, 2).unwrap();
        let mut want = x0.mats[0].mat().clone();
        want.scale((-0.5f64).exp());
        let mut diff = pts[0].mean.clone();
        diff.add_scaled(&want, -1.0);
        let worst = diff.max_abs();
        let tol = 3.0 * pts[0].stderr.max_abs() + 0.01;
        assert!(worst < tol, "worst {worst} tol {tol}");
    }

    #[test]
    fn ito_residual_vanishes_for_constants() {
        let fam = PotentialFamily::quadratic(2.0);
        let x0 = x0_gue(6, 43);
        let one = TracePoly::one(1);
        let grid = TimeGrid::uniform(0.5, 0.01);
        let mut rng = stream(5, &[]);
        let path = sde_path(&x0, &fam, 0.3, &grid, &mut rng, &PathOpts::default()).unwrap();
        let res = ito_residual(&one, &path, &fam);
        for m in res {
            assert!(m.max_abs() < 1e-13);
        }
    }

    use super::super::path::{sde_path, PathOpts};

    #[test]
    fn single_path_residual_is_generally_nonzero() {
        let fam = PotentialFamily::quadratic(2.0);
        let x0 = x0_gue(8, 44);
        let p = TracePoly::from(monomial(1, &[1, 1], Coeff::one()));
        let grid = TimeGrid::uniform(0.5, 0.01);
        let mut rng = stream(6, &[]);
        let path = sde_path(&x0, &fam, 0.0, &grid, &mut rng, &PathOpts::default()).unwrap();
        let res = ito_residual(&p, &path, &fam);
        assert!(res.last().unwrap().max_abs() > 1e-4);
    }

    #[test]
    fn generator_matches_symbolic_value() {
        // L(X²) at X₀ = 0 for V = ½x² is the identity
        let fam = PotentialFamily::quadratic(2.0);
        let x0 = MatrixTuple::zeros(1, 8);
        let p = TracePoly::from(monomial(1, &[1, 1], Coeff::one()));
        let gc = generator_check(&p, &x0, &fam, 0.0, 0.02, 0.002, 2000, 3).unwrap();
        assert!((gc.exact.get(0, 0).re - 1.0).abs() < 1e-12);
        assert!(gc.max_abs_diff < 0.05, "diff {}", gc.max_abs_diff);
        // P = 1 gives zero
        let gc = generator_check(&TracePoly::one(1), &x0, &fam, 0.0, 0.02, 0.002, 10, 3).unwrap();
        assert!(gc.exact.max_abs() < 1e-14 && gc.finite_t.max_abs() < 1e-14);
    }
}
