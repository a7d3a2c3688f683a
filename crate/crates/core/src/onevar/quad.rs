//! Gauss–Legendre quadrature and small polynomial helpers.

/// Nodes and weights on [-1, 1] by Newton iteration on the Legendre
/// polynomial.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi-style initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        xs[i] = -x;
        ws[i] = w;
        xs[n - 1 - i] = x;
        ws[n - 1 - i] = w;
    }
    (xs, ws)
}

/// ∫_lo^hi f by mapped Gauss–Legendre.
pub fn integrate(f: impl Fn(f64) -> f64, lo: f64, hi: f64, nodes: &(Vec<f64>, Vec<f64>)) -> f64 {
    let c = 0.5 * (hi - lo);
    let m = 0.5 * (hi + lo);
    nodes
        .0
        .iter()
        .zip(&nodes.1)
        .map(|(&x, &w)| w * f(m + c * x))
        .sum::<f64>()
        * c
}

/// Evaluates Σ coeffs[k]·x^k.
pub fn polyval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// d/dx of the coefficient vector.
pub fn polyder(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| k as f64 * c)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_integrates_polynomials_exactly() {
        let nodes = gauss_legendre(24);
        let val = integrate(|x| x * x * x * x, -1.0, 3.0, &nodes);
        assert!((val - (3.0f64.powi(5) + 1.0) / 5.0).abs() < 1e-12);
        let total: f64 = nodes.1.iter().sum();
        assert!((total - 2.0).abs() < 1e-13);
    }

    #[test]
    fn polyval_and_der() {
        let p = [1.0, -2.0, 0.5]; // 1 − 2x + x²/2
        assert!((polyval(&p, 2.0) - (1.0 - 4.0 + 2.0)).abs() < 1e-15);
        let d = polyder(&p);
        assert_eq!(d, vec![-2.0, 1.0]);
    }
}
