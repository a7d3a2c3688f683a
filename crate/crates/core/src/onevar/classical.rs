//! The classical one-dimensional pipeline on a grid: Gibbs densities
//! e^{−V}/Z, the Crank–Nicolson semigroup for ∂_s h = h″ − V′h′, the
//! Poisson solution g = ∫₀^∞ P_s W̃ ds, and the Heun α-flow of the
//! transport map. The monotone quantile rearrangement is the oracle.

use super::quad::{polyder, polyval};
use super::OneVarError;

/// Values on a uniform grid with cubic (Catmull–Rom) interpolation.
#[derive(Clone, Debug)]
pub struct GridFunc {
    pub x_lo: f64,
    pub x_hi: f64,
    pub ys: Vec<f64>,
}

impl GridFunc {
    pub fn new(x_lo: f64, x_hi: f64, ys: Vec<f64>) -> Self {
        assert!(ys.len() >= 4 && x_hi > x_lo);
        GridFunc { x_lo, x_hi, ys }
    }

    pub fn from_fn(x_lo: f64, x_hi: f64, n: usize, f: impl Fn(f64) -> f64) -> Self {
        let ys = (0..n)
            .map(|k| f(x_lo + (x_hi - x_lo) * k as f64 / (n - 1) as f64))
            .collect();
        GridFunc::new(x_lo, x_hi, ys)
    }

    pub fn len(&self) -> usize {
        self.ys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ys.is_empty()
    }

    pub fn h(&self) -> f64 {
        (self.x_hi - self.x_lo) / (self.ys.len() - 1) as f64
    }

    pub fn x(&self, k: usize) -> f64 {
        self.x_lo + self.h() * k as f64
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.ys.len();
        let h = self.h();
        let t = ((x - self.x_lo) / h).clamp(0.0, (n - 1) as f64);
        let k = (t.floor() as usize).min(n - 2);
        let u = t - k as f64;
        let y0 = self.ys[k.saturating_sub(1)];
        let y1 = self.ys[k];
        let y2 = self.ys[k + 1];
        let y3 = self.ys[(k + 2).min(n - 1)];
        let a = 0.5 * (-y0 + 3.0 * y1 - 3.0 * y2 + y3);
        let b = y0 - 2.5 * y1 + 2.0 * y2 - 0.5 * y3;
        let c = 0.5 * (y2 - y0);
        a * u * u * u + b * u * u + c * u + y1
    }

    /// Central-difference derivative as a new grid function.
    pub fn derivative(&self) -> GridFunc {
        let n = self.ys.len();
        let h = self.h();
        let mut d = vec![0.0; n];
        for k in 1..n - 1 {
            d[k] = (self.ys[k + 1] - self.ys[k - 1]) / (2.0 * h);
        }
        d[0] = (-3.0 * self.ys[0] + 4.0 * self.ys[1] - self.ys[2]) / (2.0 * h);
        d[n - 1] = (3.0 * self.ys[n - 1] - 4.0 * self.ys[n - 2] + self.ys[n - 3]) / (2.0 * h);
        GridFunc::new(self.x_lo, self.x_hi, d)
    }

    pub fn is_nondecreasing_on(&self, lo: f64, hi: f64) -> bool {
        let n = self.ys.len();
        (1..n).all(|k| {
            let x_prev = self.x(k - 1);
            let x_cur = self.x(k);
            if x_cur < lo || x_prev > hi {
                true
            } else {
                self.ys[k] + 1e-12 >= self.ys[k - 1]
            }
        })
    }
}

/// A probability density on a grid with cumulative table and quantiles.
#[derive(Clone, Debug)]
pub struct GridDensity {
    pub grid: GridFunc,
    cdf: Vec<f64>,
}

impl GridDensity {
    /// e^{−V}/Z on [x_lo, x_hi].
    pub fn gibbs(v: &[f64], x_lo: f64, x_hi: f64, n: usize) -> Self {
        let raw = GridFunc::from_fn(x_lo, x_hi, n, |x| (-polyval(v, x)).exp());
        GridDensity::from_unnormalized(raw)
    }

    pub fn from_unnormalized(mut raw: GridFunc) -> Self {
        let h = raw.h();
        let n = raw.ys.len();
        // composite Simpson mass (n odd intervals handled by trapezoid tail)
        let mut mass = 0.0;
        let mut k = 0;
        while k + 2 < n {
            mass += h / 3.0 * (raw.ys[k] + 4.0 * raw.ys[k + 1] + raw.ys[k + 2]);
            k += 2;
        }
        if k + 1 < n {
            mass += h / 2.0 * (raw.ys[k] + raw.ys[k + 1]);
        }
        for y in raw.ys.iter_mut() {
            *y /= mass;
        }
        // cumulative by local Simpson on half-steps via Hermite correction
        let mut cdf = vec![0.0; n];
        for k in 1..n {
            let mid = raw.eval(raw.x(k - 1) + 0.5 * h);
            cdf[k] = cdf[k - 1] + h / 6.0 * (raw.ys[k - 1] + 4.0 * mid + raw.ys[k]);
        }
        let total = cdf[n - 1];
        for c in cdf.iter_mut() {
            *c /= total;
        }
        GridDensity { grid: raw, cdf }
    }

    pub fn mean_of(&self, f: impl Fn(f64) -> f64) -> f64 {
        let h = self.grid.h();
        let n = self.grid.ys.len();
        let mut acc = 0.0;
        let mut k = 0;
        while k + 2 < n {
            acc += h / 3.0
                * (f(self.grid.x(k)) * self.grid.ys[k]
                    + 4.0 * f(self.grid.x(k + 1)) * self.grid.ys[k + 1]
                    + f(self.grid.x(k + 2)) * self.grid.ys[k + 2]);
            k += 2;
        }
        if k + 1 < n {
            acc += h / 2.0 * (f(self.grid.x(k)) * self.grid.ys[k] + f(self.grid.x(k + 1)) * self.grid.ys[k + 1]);
        }
        acc
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let n = self.grid.ys.len();
        if x <= self.grid.x_lo {
            return 0.0;
        }
        if x >= self.grid.x_hi {
            return 1.0;
        }
        let h = self.grid.h();
        let t = (x - self.grid.x_lo) / h;
        let k = (t.floor() as usize).min(n - 2);
        let u = t - k as f64;
        let f0 = self.cdf[k];
        let f1 = self.cdf[k + 1];
        let d0 = self.grid.ys[k] * h;
        let d1 = self.grid.ys[k + 1] * h;
        let h00 = (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u);
        let h10 = u * (1.0 - u) * (1.0 - u);
        let h01 = u * u * (3.0 - 2.0 * u);
        let h11 = u * u * (u - 1.0);
        (h00 * f0 + h10 * d0 + h01 * f1 + h11 * d1).clamp(0.0, 1.0)
    }

    pub fn quantile(&self, p: f64) -> f64 {
        let p = p.clamp(0.0, 1.0);
        let (mut lo, mut hi) = (self.grid.x_lo, self.grid.x_hi);
        for _ in 0..90 {
            let mid = 0.5 * (lo + hi);
            if self.cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Monotone rearrangement: T = Q_ν ∘ F_μ sampled on the μ grid.
pub fn quantile_map(src: &GridDensity, dst: &GridDensity, x_lo: f64, x_hi: f64, n: usize) -> GridFunc {
    GridFunc::from_fn(x_lo, x_hi, n, |x| dst.quantile(src.cdf(x)))
}

#[derive(Clone, Debug)]
pub struct ClassicalConfig {
    pub x_lo: f64,
    pub x_hi: f64,
    pub grid_points: usize,
    pub alpha_steps: usize,
    pub s_horizon: f64,
    pub ds: f64,
}

pub struct ClassicalOutcome {
    pub map: GridFunc,
    /// sup over the grid of |h_{s_horizon}| per α node, a decay record.
    pub tail: f64,
}

/// The grid pipeline: per interpolation node, build μ_{V_α}, evolve the
/// centered source by Crank–Nicolson up to `s_horizon`, integrate in s to
/// get g_α, then advance the map by Heun in α.
pub fn classical_transport_1d(
    v: &[f64],
    w: &[f64],
    cfg: &ClassicalConfig,
) -> Result<ClassicalOutcome, OneVarError> {
    let n = cfg.grid_points;
    let steps = cfg.alpha_steps;
    let d_alpha = 1.0 / steps as f64;
    // g'_α at every node, computed once
    let mut g_prime: Vec<GridFunc> = Vec::with_capacity(steps + 1);
    let mut tail: f64 = 0.0;
    for k in 0..=steps {
        let alpha = d_alpha * k as f64;
        let v_alpha: Vec<f64> = (0..v.len().max(w.len()))
            .map(|i| v.get(i).unwrap_or(&0.0) + alpha * w.get(i).unwrap_or(&0.0))
            .collect();
        let (g, t) = poisson_by_semigroup(&v_alpha, w, cfg)?;
        tail = tail.max(t);
        g_prime.push(g.derivative());
    }
    // Heun flow of the map values
    let mut f: Vec<f64> = (0..n)
        .map(|k| cfg.x_lo + (cfg.x_hi - cfg.x_lo) * k as f64 / (n - 1) as f64)
        .collect();
    for k in 0..steps {
        let gp0 = &g_prime[k];
        let gp1 = &g_prime[k + 1];
        for fx in f.iter_mut() {
            let k1 = gp0.eval(*fx);
            let k2 = gp1.eval(*fx + d_alpha * k1);
            *fx += d_alpha / 2.0 * (k1 + k2);
        }
    }
    Ok(ClassicalOutcome { map: GridFunc::new(cfg.x_lo, cfg.x_hi, f), tail })
}

/// g = −∫₀^{s_hor} P_s W̃ ds by Crank–Nicolson on ∂_s h = h″ − V′h′ with
/// far-field Dirichlet walls, W̃ the μ_{V_α}-centered source. The sign
/// makes L g = W̃: d/ds P_sW̃ = L P_sW̃ integrates to −W̃ because the
/// centered source decays to zero.
fn poisson_by_semigroup(
    v_alpha: &[f64],
    w: &[f64],
    cfg: &ClassicalConfig,
) -> Result<(GridFunc, f64), OneVarError> {
    let n = cfg.grid_points;
    let hx = (cfg.x_hi - cfg.x_lo) / (n - 1) as f64;
    let mu = GridDensity::gibbs(v_alpha, cfg.x_lo, cfg.x_hi, n);
    let w_mean = mu.mean_of(|x| polyval(w, x));
    let mut h: Vec<f64> = (0..n)
        .map(|k| polyval(w, cfg.x_lo + hx * k as f64) - w_mean)
        .collect();
    let vp = polyder(v_alpha);
    let vpx: Vec<f64> = (0..n).map(|k| polyval(&vp, cfg.x_lo + hx * k as f64)).collect();
    let ds = cfg.ds;
    let s_steps = (cfg.s_horizon / ds).round().max(1.0) as usize;
    // L h = h″ − V′h′ on interior points; Dirichlet h = 0 at the walls
    let r = ds / (2.0 * hx * hx);
    let q = ds / (4.0 * hx);
    // tridiagonal factors of (I − ds/2·L): a=sub, b=diag, c=super
    let mut a = vec![0.0; n];
    let mut b = vec![0.0; n];
    let mut c = vec![0.0; n];
    for k in 1..n - 1 {
        a[k] = -(r + q * vpx[k]);
        b[k] = 1.0 + 2.0 * r;
        c[k] = -(r - q * vpx[k]);
    }
    b[0] = 1.0;
    b[n - 1] = 1.0;
    let mut g = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    let mut scratch = vec![0.0; n];
    // trapezoid-in-s accumulation of ∫ h ds
    for (gk, hk) in g.iter_mut().zip(&h) {
        *gk += 0.5 * ds * hk;
    }
    for step in 0..s_steps {
        // rhs = (I + ds/2·L) h
        rhs[0] = 0.0;
        rhs[n - 1] = 0.0;
        for k in 1..n - 1 {
            rhs[k] = h[k]
                + r * (h[k + 1] - 2.0 * h[k] + h[k - 1])
                - q * vpx[k] * (h[k + 1] - h[k - 1]);
        }
        thomas_solve(&a, &b, &c, &rhs, &mut h, &mut scratch)?;
        let weight = if step + 1 == s_steps { 0.5 } else { 1.0 };
        for (gk, hk) in g.iter_mut().zip(&h) {
            *gk += weight * ds * hk;
        }
        if h.iter().any(|x| !x.is_finite()) {
            return Err(OneVarError::Solver("semigroup evolution became non-finite".into()));
        }
    }
    let tail = h.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    for gk in g.iter_mut() {
        *gk = -*gk;
    }
    Ok((GridFunc::new(cfg.x_lo, cfg.x_hi, g), tail))
}

fn thomas_solve(
    a: &[f64],
    b: &[f64],
    c: &[f64],
    rhs: &[f64],
    out: &mut [f64],
    scratch: &mut [f64],
) -> Result<(), OneVarError> {
    let n = b.len();
    let mut beta = b[0];
    if beta.abs() < 1e-300 {
        return Err(OneVarError::Solver("singular tridiagonal system".into()));
    }
    out[0] = rhs[0] / beta;
    for k in 1..n {
        scratch[k] = c[k - 1] / beta;
        beta = b[k] - a[k] * scratch[k];
        if beta.abs() < 1e-300 {
            return Err(OneVarError::Solver("singular tridiagonal system".into()));
        }
        out[k] = (rhs[k] - a[k] * out[k - 1]) / beta;
    }
    for k in (0..n - 1).rev() {
        out[k] -= scratch[k + 1] * out[k + 1];
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_map_between_equal_densities_is_identity() {
        let d = GridDensity::gibbs(&[0.0, 0.0, 0.5], -8.0, 8.0, 1601);
        let t = quantile_map(&d, &d, -3.0, 3.0, 301);
        for k in 0..t.len() {
            assert!((t.ys[k] - t.x(k)).abs() < 1e-8, "at {}", t.x(k));
        }
    }

    #[test]
    fn gaussian_to_scaled_gaussian_is_linear() {
        // e^{−x²/2} → e^{−cx²/2}: T(x) = x/√c
        let c = 2.0;
        let src = GridDensity::gibbs(&[0.0, 0.0, 0.5], -9.0, 9.0, 2401);
        let dst = GridDensity::gibbs(&[0.0, 0.0, 0.5 * c], -9.0, 9.0, 2401);
        let t = quantile_map(&src, &dst, -3.5, 3.5, 201);
        for k in 0..t.len() {
            let want = t.x(k) / c.sqrt();
            assert!((t.ys[k] - want).abs() < 2e-6, "at {}: {} vs {want}", t.x(k), t.ys[k]);
        }
    }

    #[test]
    fn classical_flow_gaussian_to_gaussian() {
        // V = x²/2, W = (c−1)x²/2: F(x) = x/√c
        let c = 2.0;
        let cfg = ClassicalConfig {
            x_lo: -6.0,
            x_hi: 6.0,
            grid_points: 1025,
            alpha_steps: 40,
            s_horizon: 14.0,
            ds: 0.01,
        };
        let out = classical_transport_1d(&[0.0, 0.0, 0.5], &[0.0, 0.0, (c - 1.0) * 0.5], &cfg).unwrap();
        let lo = -4.0 / c.sqrt();
        let hi = 4.0 / c.sqrt();
        let mut worst = 0.0f64;
        for k in 0..out.map.len() {
            let x = out.map.x(k);
            if x < lo || x > hi {
                continue;
            }
            worst = worst.max((out.map.ys[k] - x / c.sqrt()).abs());
        }
        assert!(worst < 1e-3, "sup error {worst}");
        assert!(out.map.is_nondecreasing_on(lo, hi));
        assert!(out.tail < 1e-4, "tail {}", out.tail);
    }

    #[test]
    fn zero_perturbation_is_identity_flow() {
        let cfg = ClassicalConfig {
            x_lo: -5.0,
            x_hi: 5.0,
            grid_points: 513,
            alpha_steps: 10,
            s_horizon: 8.0,
            ds: 0.02,
        };
        let out = classical_transport_1d(&[0.0, 0.0, 0.5], &[0.0], &cfg).unwrap();
        for k in 0..out.map.len() {
            assert!((out.map.ys[k] - out.map.x(k)).abs() < 1e-12);
        }
    }
}
