//! One-cut equilibrium measures: the resolvent ansatz
//! G(z) = ½(V′(z) − Q(z)√((z−a)(z−b))) with Q from polynomial division,
//! endpoints from the 1/z asymptotics of G, density from the cut
//! discontinuity: dμ = (1/2π)Q(x)√((b−x)(x−a))dx on [a,b].

use super::quad::{gauss_legendre, polyder, polyval};
use super::OneVarError;

#[derive(Clone, Debug)]
pub struct EqMeasure {
    pub a: f64,
    pub b: f64,
    /// Polynomial density factor Q.
    pub q: Vec<f64>,
    /// Cached Gauss–Legendre nodes in the θ parametrization.
    theta_nodes: (Vec<f64>, Vec<f64>),
    cdf_grid: Vec<(f64, f64)>,
}

/// Power-series coefficients of 1/√(1 + c₁t + c₂t²) up to order `m`.
fn inv_sqrt_series(c1: f64, c2: f64, m: usize) -> Vec<f64> {
    // s = √(1+c₁t+c₂t²): s₀=1, Σ_{i} s_i s_{k−i} = rhs_k
    let mut s = vec![0.0; m + 1];
    s[0] = 1.0;
    for k in 1..=m {
        let rhs = match k {
            1 => c1,
            2 => c2,
            _ => 0.0,
        };
        let mut acc = 0.0;
        for i in 1..k {
            acc += s[i] * s[k - i];
        }
        s[k] = (rhs - acc) / 2.0;
    }
    // u = 1/s
    let mut u = vec![0.0; m + 1];
    u[0] = 1.0;
    for k in 1..=m {
        let mut acc = 0.0;
        for i in 1..=k {
            acc += s[i] * u[k - i];
        }
        u[k] = -acc;
    }
    u
}

/// Laurent data of V′(z)/√((z−a)(z−b)): the coefficients of z^{−1} and
/// z^{−2}, plus the polynomial part Q.
fn resolvent_division(vprime: &[f64], a: f64, b: f64) -> (f64, f64, Vec<f64>) {
    let deg = vprime.len().saturating_sub(1);
    let u = inv_sqrt_series(-(a + b), a * b, deg + 2);
    // f_j = Σ_m v'_m u_{m−1−j}
    let coeff = |j: i64| -> f64 {
        let mut acc = 0.0;
        for (m, &vm) in vprime.iter().enumerate() {
            let k = m as i64 - 1 - j;
            if k >= 0 && (k as usize) < u.len() {
                acc += vm * u[k as usize];
            }
        }
        acc
    };
    let q: Vec<f64> = (0..deg as i64).map(coeff).collect();
    (coeff(-1), coeff(-2), q)
}

impl EqMeasure {
    /// Solves the one-cut problem for the polynomial potential
    /// V(x) = Σ v[k]·x^k by Newton iteration on the support endpoints.
    pub fn solve(v: &[f64]) -> Result<EqMeasure, OneVarError> {
        let vp = polyder(v);
        if vp.len() < 2 {
            return Err(OneVarError::Solver("potential must have degree at least 2".into()));
        }
        let mut a = -2.0;
        let mut b = 2.0;
        let f = |a: f64, b: f64| -> (f64, f64) {
            let (fm1, fm2, _) = resolvent_division(&vp, a, b);
            (fm1, fm2 - 2.0)
        };
        let mut converged = false;
        for _ in 0..200 {
            let (r1, r2) = f(a, b);
            let res = r1.hypot(r2);
            if res < 1e-13 {
                converged = true;
                break;
            }
            let h = 1e-7 * (1.0 + b - a);
            let (r1a, r2a) = f(a + h, b);
            let (r1b, r2b) = f(a, b + h);
            let j11 = (r1a - r1) / h;
            let j12 = (r1b - r1) / h;
            let j21 = (r2a - r2) / h;
            let j22 = (r2b - r2) / h;
            let det = j11 * j22 - j12 * j21;
            if det.abs() < 1e-300 {
                return Err(OneVarError::Solver("singular Newton step".into()));
            }
            let da = -(r1 * j22 - r2 * j12) / det;
            let db = -(j11 * r2 - j21 * r1) / det;
            // damped update keeping a < b
            let mut lambda = 1.0;
            loop {
                let (na, nb) = (a + lambda * da, b + lambda * db);
                if na < nb {
                    let (n1, n2) = f(na, nb);
                    if n1.hypot(n2) < res || lambda < 1.0 / 64.0 {
                        a = na;
                        b = nb;
                        break;
                    }
                }
                lambda /= 2.0;
                if lambda < 1e-8 {
                    return Err(OneVarError::Solver("Newton stalled".into()));
                }
            }
        }
        if !converged {
            let (r1, r2) = f(a, b);
            if r1.hypot(r2) > 1e-10 {
                return Err(OneVarError::Solver(format!(
                    "no convergence: residual ({r1:.2e}, {r2:.2e})"
                )));
            }
        }
        let (_, _, q) = resolvent_division(&vp, a, b);
        let measure = EqMeasure::from_parts(a, b, q)?;
        Ok(measure)
    }

    pub fn from_parts(a: f64, b: f64, q: Vec<f64>) -> Result<EqMeasure, OneVarError> {
        if !(a < b) {
            return Err(OneVarError::Solver("support endpoints out of order".into()));
        }
        let mut m = EqMeasure {
            a,
            b,
            q,
            theta_nodes: gauss_legendre(96),
            cdf_grid: Vec::new(),
        };
        // density must stay non-negative on the cut (two-cut situations
        // show up as sign changes of Q inside [a, b])
        for k in 0..=400 {
            let x = a + (b - a) * k as f64 / 400.0;
            let qv = polyval(&m.q, x);
            if qv < -1e-9 * (1.0 + qv.abs()) {
                return Err(OneVarError::NegativeDensity { x, value: qv });
            }
        }
        let mass = m.moment(0);
        if (mass - 1.0).abs() > 1e-10 {
            return Err(OneVarError::Solver(format!("mass {mass} does not normalize")));
        }
        m.build_cdf(4000);
        Ok(m)
    }

    pub fn density(&self, x: f64) -> f64 {
        if x <= self.a || x >= self.b {
            return 0.0;
        }
        polyval(&self.q, x) * ((self.b - x) * (x - self.a)).sqrt() / (2.0 * std::f64::consts::PI)
    }

    /// ∫ x^k dμ through the θ-substitution x = u + d·sinθ, which removes
    /// the edge square roots: the integrand becomes analytic.
    pub fn moment(&self, k: usize) -> f64 {
        let u = 0.5 * (self.a + self.b);
        let d = 0.5 * (self.b - self.a);
        let f = |theta: f64| -> f64 {
            let x = u + d * theta.sin();
            let jac = d * theta.cos();
            x.powi(k as i32) * polyval(&self.q, x) * d * theta.cos() * jac
        };
        super::quad::integrate(f, -std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2, &self.theta_nodes)
            / (2.0 * std::f64::consts::PI)
    }

    fn build_cdf(&mut self, points: usize) {
        // Simpson accumulation in θ; the integrand is smooth
        let u = 0.5 * (self.a + self.b);
        let d = 0.5 * (self.b - self.a);
        let n = points + points % 2;
        let h = std::f64::consts::PI / n as f64;
        let g = |theta: f64| -> f64 {
            let x = u + d * theta.sin();
            let c = theta.cos();
            polyval(&self.q, x) * d * d * c * c / (2.0 * std::f64::consts::PI)
        };
        let mut grid = Vec::with_capacity(n / 2 + 1);
        let mut acc = 0.0;
        let t0 = -std::f64::consts::FRAC_PI_2;
        grid.push((self.a, 0.0));
        for k in 0..n / 2 {
            let t = t0 + 2.0 * k as f64 * h;
            acc += h / 3.0 * (g(t) + 4.0 * g(t + h) + g(t + 2.0 * h));
            let theta = t + 2.0 * h;
            grid.push((u + d * theta.sin(), acc.min(1.0)));
        }
        if let Some(last) = grid.last_mut() {
            last.1 = 1.0;
            last.0 = self.b;
        }
        self.cdf_grid = grid;
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.a {
            return 0.0;
        }
        if x >= self.b {
            return 1.0;
        }
        let i = self.cdf_grid.partition_point(|(gx, _)| *gx <= x).max(1) - 1;
        let (x0, f0) = self.cdf_grid[i];
        let (x1, f1) = self.cdf_grid[(i + 1).min(self.cdf_grid.len() - 1)];
        if x1 <= x0 {
            return f0;
        }
        // Hermite correction with exact density slopes
        let t = (x - x0) / (x1 - x0);
        let d0 = self.density(x0) * (x1 - x0);
        let d1 = self.density(x1) * (x1 - x0);
        let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
        let h10 = t * (1.0 - t) * (1.0 - t);
        let h01 = t * t * (3.0 - 2.0 * t);
        let h11 = t * t * (t - 1.0);
        (h00 * f0 + h10 * d0 + h01 * f1 + h11 * d1).clamp(0.0, 1.0)
    }

    /// Monotone CDF inversion, bracketing to 1e−12 then Newton polish.
    pub fn quantile(&self, p: f64) -> f64 {
        assert!((0.0..=1.0).contains(&p), "quantile argument outside [0,1]");
        if p <= 0.0 {
            return self.a;
        }
        if p >= 1.0 {
            return self.b;
        }
        let (mut lo, mut hi) = (self.a, self.b);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if self.cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-12 * (1.0 + self.b - self.a) {
                break;
            }
        }
        let mut x = 0.5 * (lo + hi);
        for _ in 0..4 {
            let d = self.density(x);
            if d > 1e-12 {
                x -= (self.cdf(x) - p) / d;
                x = x.clamp(lo - 1e-9, hi + 1e-9);
            }
        }
        x.clamp(self.a, self.b)
    }

    /// Residual of the integrated Schwinger–Dyson relation for f = x^k:
    /// ∫∫ (f(x)−f(y))/(x−y) dμdμ − ∫ f·V′ dμ, a polynomial identity in the
    /// moments.
    pub fn sd_residual(&self, v: &[f64], k: usize) -> f64 {
        let vp = polyder(v);
        let mut lhs = 0.0;
        if k >= 1 {
            for a_pow in 0..k {
                lhs += self.moment(a_pow) * self.moment(k - 1 - a_pow);
            }
        }
        let mut rhs = 0.0;
        for (m, &c) in vp.iter().enumerate() {
            if c != 0.0 {
                rhs += c * self.moment(k + m);
            }
        }
        lhs - rhs
    }

    /// Pointwise principal-value check 2·P.V.∫dμ(y)/(x−y) − V′(x) at an
    /// interior point, by symmetric-interval subtraction around the pole.
    pub fn sd_pointwise_residual(&self, v: &[f64], x: f64) -> f64 {
        assert!(self.a < x && x < self.b, "point must be inside the support");
        let vp = polyder(v);
        let rho_x = self.density(x);
        // P.V.∫ ρ(y)/(x−y) dy = ∫ (ρ(y)−ρ(x))/(x−y) dy + ρ(x)·ln((x−a)/(b−x))
        let u = 0.5 * (self.a + self.b);
        let d = 0.5 * (self.b - self.a);
        let nodes = gauss_legendre(400);
        let f = |theta: f64| -> f64 {
            let y = u + d * theta.sin();
            let diff = x - y;
            let num = self.density(y) - rho_x;
            if diff.abs() < 1e-13 {
                // remove the 0/0 with the density slope
                let h = 1e-6 * (self.b - self.a);
                return (self.density(x - h) - self.density(x + h)) / (2.0 * h) * d * theta.cos();
            }
            num / diff * d * theta.cos()
        };
        let pv = super::quad::integrate(f, -std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2, &nodes)
            + rho_x * ((x - self.a) / (self.b - x)).ln();
        2.0 * pv - polyval(&vp, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn semicircle_from_quadratic_potential() {
        // V = x²/2: support [−2,2], Q ≡ 1, m₂ = 1, m₄ = 2
        let m = EqMeasure::solve(&[0.0, 0.0, 0.5]).unwrap();
        assert!((m.a + 2.0).abs() < 1e-9, "a = {}", m.a);
        assert!((m.b - 2.0).abs() < 1e-9, "b = {}", m.b);
        assert!((polyval(&m.q, 0.3) - 1.0).abs() < 1e-9);
        assert!((m.moment(2) - 1.0).abs() < 1e-10);
        assert!((m.moment(4) - 2.0).abs() < 1e-10);
        assert!((m.moment(1)).abs() < 1e-10);
    }

    #[test]
    fn quartic_support_endpoint_closed_form() {
        // V = t·x⁴/4: b = (16/(3t))^{1/4}, Q = t(x² + b²/2)
        for t in [1.0, 2.5] {
            let m = EqMeasure::solve(&[0.0, 0.0, 0.0, 0.0, t / 4.0]).unwrap();
            let want = (16.0 / (3.0 * t)).powf(0.25);
            assert!((m.b - want).abs() < 1e-8, "b {} want {want}", m.b);
            assert!((m.a + want).abs() < 1e-8);
            assert!((polyval(&m.q, 0.7) - t * (0.49 + want * want / 2.0)).abs() < 1e-7);
        }
    }

    #[test]
    fn symmetric_potential_symmetric_support() {
        let m = EqMeasure::solve(&[0.0, 0.0, 0.25, 0.0, 0.25]).unwrap();
        assert!((m.a + m.b).abs() < 1e-9);
    }

    #[test]
    fn quantile_examples() {
        let m = EqMeasure::solve(&[0.0, 0.0, 0.5]).unwrap();
        assert!(m.quantile(0.5).abs() < 1e-9);
        assert!((m.quantile(1.0) - 2.0).abs() < 1e-12);
        // median of pushforward = quantile of target, by definition
        let u = m.cdf(0.7);
        assert!((m.quantile(u) - 0.7).abs() < 1e-9);
    }

    #[test]
    fn sd_residual_battery_small() {
        let v = [0.0, 0.0, 0.5, 0.0, 0.25];
        let m = EqMeasure::solve(&v).unwrap();
        for k in 0..4 {
            let r = m.sd_residual(&v, k);
            assert!(r.abs() < 1e-8, "f = x^{k}: residual {r:.3e}");
        }
    }

    #[test]
    fn pointwise_pv_residual() {
        let v = [0.0, 0.0, 0.5];
        let m = EqMeasure::solve(&v).unwrap();
        for x in [-1.2, 0.35, 0.9] {
            let r = m.sd_pointwise_residual(&v, x);
            assert!(r.abs() < 1e-6, "pv residual at {x}: {r:.2e}");
        }
    }

    #[test]
    fn two_cut_is_rejected() {
        // deep double well: V = −2x² + x⁴/4 has a two-cut equilibrium
        let r = EqMeasure::solve(&[0.0, 0.0, -2.0, 0.0, 0.25]);
        assert!(r.is_err());
    }
}
