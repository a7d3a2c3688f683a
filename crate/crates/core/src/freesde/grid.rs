//! Time grids shared between path storage and time quadrature.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    /// Strictly increasing, starting at 0.
    pub times: Vec<f64>,
}

impl TimeGrid {
    pub fn uniform(t_end: f64, dt: f64) -> Self {
        assert!(t_end > 0.0 && dt > 0.0);
        let steps = (t_end / dt).round().max(1.0) as usize;
        let times = (0..=steps).map(|k| t_end * k as f64 / steps as f64).collect();
        TimeGrid { times }
    }

    /// Piecewise-uniform: `segments[i] = (t_end, dt)` with increasing ends;
    /// useful for resolving early transients and coarsening into the
    /// exponential tail.
    pub fn piecewise(segments: &[(f64, f64)]) -> Self {
        assert!(!segments.is_empty());
        let mut times = vec![0.0];
        let mut t = 0.0;
        for &(end, dt) in segments {
            assert!(end > t && dt > 0.0, "segments must advance");
            let steps = ((end - t) / dt).round().max(1.0) as usize;
            let start = t;
            for k in 1..=steps {
                times.push(start + (end - start) * k as f64 / steps as f64);
            }
            t = end;
        }
        TimeGrid { times }
    }

    pub fn steps(&self) -> usize {
        self.times.len() - 1
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn dt(&self, step: usize) -> f64 {
        self.times[step + 1] - self.times[step]
    }

    pub fn max_dt(&self) -> f64 {
        (0..self.steps()).map(|k| self.dt(k)).fold(0.0, f64::max)
    }

    /// Trapezoid quadrature weights on the (possibly nonuniform) grid.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let k = self.times.len();
        let mut w = vec![0.0; k];
        for s in 0..k - 1 {
            let dt = self.dt(s);
            w[s] += dt / 2.0;
            w[s + 1] += dt / 2.0;
        }
        w
    }

    /// Index of the grid point nearest to `t`; panics if off by more than
    /// half the local step.
    pub fn index_of(&self, t: f64) -> usize {
        let i = self
            .times
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - t).abs().partial_cmp(&(b.1 - t).abs()).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        let tol = if i == 0 { self.dt(0) } else { self.dt(i.min(self.steps()) - 1) };
        assert!(
            (self.times[i] - t).abs() <= tol * 0.51 + 1e-12,
            "time {t} not on the grid (nearest {})",
            self.times[i]
        );
        i
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trapezoid_weights_integrate_linear_functions() {
        let g = TimeGrid::piecewise(&[(1.0, 0.1), (3.0, 0.5)]);
        let w = g.trapezoid_weights();
        let total: f64 = w.iter().sum();
        assert!((total - 3.0).abs() < 1e-12);
        let integral: f64 = w.iter().zip(&g.times).map(|(w, t)| w * (2.0 * t + 1.0)).sum();
        assert!((integral - (9.0 + 3.0)).abs() < 1e-12);
    }

    #[test]
    fn uniform_grid_shape() {
        let g = TimeGrid::uniform(2.0, 0.25);
        assert_eq!(g.steps(), 8);
        assert_eq!(g.horizon(), 2.0);
        assert_eq!(g.index_of(1.0), 4);
    }
}
