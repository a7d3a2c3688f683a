//! Euler–Maruyama integration of dX = dS − ½𝒟V_α(X)dt and the coupled
//! two-path contraction diagnostic.

use super::family::PotentialFamily;
use super::grid::TimeGrid;
use super::SdeError;
use crate::matrep::eval::{CompiledNc, EvalCtx};
use crate::matrep::{Mat, MatrixTuple};
use crate::rng::{gue_increment, Stream};

pub struct SdePath {
    pub times: Vec<f64>,
    pub states: Vec<Vec<Mat>>,
    pub noise: Option<Vec<Vec<Mat>>>,
    pub alpha: f64,
}

pub struct CompiledDrift {
    grads: Vec<CompiledNc>,
}

impl CompiledDrift {
    pub fn new(fam: &PotentialFamily, alpha: f64) -> Self {
        CompiledDrift {
            grads: fam.grad_v_alpha(alpha).iter().map(CompiledNc::compile).collect(),
        }
    }

    pub fn eval(&self, mats: &[Mat]) -> Vec<Mat> {
        let mut ctx = EvalCtx::from_mats(mats);
        self.grads
            .iter()
            .map(|g| {
                let mut d = g.eval(&mut ctx);
                d.hermitize();
                d
            })
            .collect()
    }
}

/// One Euler step: X ← X + ΔS − (dt/2)·drift, re-hermitized.
pub fn euler_step(x: &mut [Mat], drift: &[Mat], dt: f64, noise: Option<&[Mat]>) {
    for (i, xi) in x.iter_mut().enumerate() {
        xi.add_scaled(&drift[i], -dt / 2.0);
        if let Some(ns) = noise {
            xi.add_scaled(&ns[i], 1.0);
        }
        xi.hermitize();
    }
}

fn blowup_guard(x: &[Mat], bound: f64, t: f64) -> Result<(), SdeError> {
    for xi in x {
        let t2 = xi.herm_inner(xi) / xi.n as f64;
        if t2 > bound * bound && xi.herm_op_norm() > bound {
            return Err(SdeError::Blowup { t, norm: t2.sqrt(), bound });
        }
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct PathOpts {
    pub store_noise: bool,
    pub zero_noise: bool,
    pub blowup_norm: f64,
}

impl Default for PathOpts {
    fn default() -> Self {
        PathOpts { store_noise: false, zero_noise: false, blowup_norm: 50.0 }
    }
}

/// Integrates one path from `x0`, storing every state (and optionally the
/// noise increments for replay).
pub fn sde_path(
    x0: &MatrixTuple,
    fam: &PotentialFamily,
    alpha: f64,
    grid: &TimeGrid,
    rng: &mut Stream,
    opts: &PathOpts,
) -> Result<SdePath, SdeError> {
    assert_eq!(x0.n_letters(), fam.n(), "dimension mismatch");
    let drift = CompiledDrift::new(fam, alpha);
    let dim = x0.dim();
    let mut x: Vec<Mat> = x0.mats.iter().map(|m| m.mat().clone()).collect();
    let mut states = Vec::with_capacity(grid.times.len());
    let mut noise_store = opts.store_noise.then(Vec::new);
    states.push(x.clone());
    for step in 0..grid.steps() {
        let dt = grid.dt(step);
        let d = drift.eval(&x);
        let noise: Option<Vec<Mat>> = if opts.zero_noise {
            None
        } else {
            Some((0..x.len()).map(|_| gue_increment(dim, dt, rng)).collect())
        };
        euler_step(&mut x, &d, dt, noise.as_deref());
        blowup_guard(&x, opts.blowup_norm, grid.times[step + 1])?;
        if let (Some(store), Some(ns)) = (&mut noise_store, noise) {
            store.push(ns);
        }
        states.push(x.clone());
    }
    Ok(SdePath { times: grid.times.clone(), states, noise: noise_store, alpha })
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct ContractionReport {
    /// Least-squares slope of log operator-norm distance over time.
    pub slope_op: f64,
    /// Same for the Σ Re Tr (Frobenius) tuple norm.
    pub slope_tr: f64,
    pub points: Vec<(f64, f64, f64)>,
}

/// Couples two paths through common noise and fits the decay slope of
/// log‖X_t − Y_t‖.
pub fn coupled_contraction(
    x0: &MatrixTuple,
    y0: &MatrixTuple,
    fam: &PotentialFamily,
    alpha: f64,
    grid: &TimeGrid,
    rng: &mut Stream,
    record_stride: usize,
) -> Result<ContractionReport, SdeError> {
    assert_eq!(x0.dim(), y0.dim());
    assert_eq!(x0.n_letters(), y0.n_letters());
    let dim = x0.dim();
    let drift = CompiledDrift::new(fam, alpha);
    let mut x: Vec<Mat> = x0.mats.iter().map(|m| m.mat().clone()).collect();
    let mut y: Vec<Mat> = y0.mats.iter().map(|m| m.mat().clone()).collect();
    let dist = |x: &[Mat], y: &[Mat]| -> (f64, f64) {
        let mut fro2 = 0.0;
        let mut opn: f64 = 0.0;
        for (xi, yi) in x.iter().zip(y) {
            let mut d = xi.clone();
            d.add_scaled(yi, -1.0);
            fro2 += d.herm_inner(&d);
            opn = opn.max(d.herm_op_norm());
        }
        (opn, fro2.sqrt())
    };
    let (op0, tr0) = dist(&x, &y);
    if tr0 < 1e-14 {
        return Err(SdeError::Degenerate);
    }
    let stride = record_stride.max(1);
    let mut points = vec![(0.0, op0.ln(), tr0.ln())];
    for step in 0..grid.steps() {
        let dt = grid.dt(step);
        let noise: Vec<Mat> = (0..x.len()).map(|_| gue_increment(dim, dt, rng)).collect();
        let dx = drift.eval(&x);
        let dy = drift.eval(&y);
        euler_step(&mut x, &dx, dt, Some(&noise));
        euler_step(&mut y, &dy, dt, Some(&noise));
        if (step + 1) % stride == 0 || step + 1 == grid.steps() {
            let (op, tr) = dist(&x, &y);
            if tr < 1e-300 {
                break;
            }
            points.push((grid.times[step + 1], op.ln(), tr.ln()));
        }
    }
    let slope = |sel: fn(&(f64, f64, f64)) -> f64| -> f64 {
        let m = points.len() as f64;
        let st: f64 = points.iter().map(|p| p.0).sum::<f64>() / m;
        let sy: f64 = points.iter().map(|p| sel(p)).sum::<f64>() / m;
        let num: f64 = points.iter().map(|p| (p.0 - st) * (sel(p) - sy)).sum();
        let den: f64 = points.iter().map(|p| (p.0 - st) * (p.0 - st)).sum();
        num / den
    };
    Ok(ContractionReport { slope_op: slope(|p| p.1), slope_tr: slope(|p| p.2), points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrep::{tau_hat, HermMatrix};
    use crate::rng::stream;

    #[test]
    fn zero_noise_quadratic_decays_exponentially() {
        // V_α = ½x² (α = 0): zero-noise path is X_t = e^{−t/2}X₀ + O(dt)
        let fam = PotentialFamily::quadratic(2.0);
        let dim = 8;
        let mut rng = stream(11, &[]);
        let x0 = MatrixTuple::new(vec![HermMatrix::symmetrized(gue_increment(dim, 1.0, &mut rng))]).unwrap();
        let grid = TimeGrid::uniform(1.0, 1e-3);
        let path = sde_path(&x0, &fam, 0.0, &grid, &mut rng, &PathOpts { zero_noise: true, ..Default::default() }).unwrap();
        let last = path.states.last().unwrap();
        let want = (-0.5f64).exp();
        let mut diff = last[0].clone();
        diff.add_scaled(x0.mats[0].mat(), -want);
        assert!(diff.max_abs() < 2e-4 * x0.mats[0].max_abs().max(1.0), "residual {}", diff.max_abs());
    }

    #[test]
    fn stationary_start_keeps_second_moment() {
        // OU with exact Gaussian start: τ̂(X_T²) stays near 1
        let fam = PotentialFamily::quadratic(2.0);
        let dim = 32;
        let mut vals = Vec::new();
        for path_idx in 0..24u64 {
            let mut rng = stream(21, &[path_idx]);
            let x0 = MatrixTuple::new(vec![HermMatrix::symmetrized(gue_increment(dim, 1.0, &mut rng))]).unwrap();
            let grid = TimeGrid::uniform(1.0, 0.01);
            let path = sde_path(&x0, &fam, 0.0, &grid, &mut rng, &PathOpts::default()).unwrap();
            let last = &path.states.last().unwrap()[0];
            vals.push(tau_hat(&last.mul(last)).re);
        }
        let (m, se) = crate::matrep::mean_stderr(&vals);
        assert!((m - 1.0).abs() < 3.0 * se + 0.02, "m2 {m} ± {se}");
    }

    #[test]
    fn quadratic_contraction_slope_is_exact() {
        // difference of coupled OU paths solves a deterministic linear ODE
        let fam = PotentialFamily::quadratic(2.0);
        let dim = 8;
        let mut rng = stream(31, &[]);
        let x0 = MatrixTuple::new(vec![HermMatrix::symmetrized(gue_increment(dim, 1.0, &mut rng))]).unwrap();
        let y0 = MatrixTuple::new(vec![HermMatrix::symmetrized(gue_increment(dim, 1.0, &mut rng))]).unwrap();
        let grid = TimeGrid::uniform(4.0, 1e-3);
        let rep = coupled_contraction(&x0, &y0, &fam, 0.0, &grid, &mut rng, 10).unwrap();
        assert!((rep.slope_op + 0.5).abs() < 0.01, "op slope {}", rep.slope_op);
        assert!((rep.slope_tr + 0.5).abs() < 0.01, "tr slope {}", rep.slope_tr);
    }

    #[test]
    fn identical_starts_are_degenerate() {
        let fam = PotentialFamily::quadratic(2.0);
        let x0 = MatrixTuple::zeros(1, 4);
        let grid = TimeGrid::uniform(1.0, 0.1);
        let mut rng = stream(1, &[]);
        assert!(matches!(
            coupled_contraction(&x0, &x0, &fam, 0.0, &grid, &mut rng, 1),
            Err(SdeError::Degenerate)
        ));
    }
}
