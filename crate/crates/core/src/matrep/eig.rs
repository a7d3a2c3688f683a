//! Eigenvalues of Hermitian matrices: complex Householder reduction to a
//! real symmetric tridiagonal matrix, then implicit-shift QL. Eigenvalues
//! only; nothing here needs eigenvectors.

use super::mat::Mat;
use num::complex::Complex64;

/// Eigenvalues of a real symmetric tridiagonal matrix, ascending.
/// `d` holds the diagonal, `e[i]` couples `d[i]` and `d[i+1]`
/// (`e[n-1]` is scratch).
pub fn tridiag_eigenvalues(d: &mut [f64], e: &mut [f64]) -> Vec<f64> {
    let n = d.len();
    if n == 0 {
        return Vec::new();
    }
    assert_eq!(e.len(), n);
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter <= 60, "tridiagonal QL failed to converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            let sign_r = if g >= 0.0 { r } else { -r };
            g = d[m] - d[l] + e[l] / (g + sign_r);
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                let t = (d[i] - g) * s + 2.0 * c * b;
                p = s * t;
                d[i + 1] = g + p;
                g = c * t - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    let mut out = d.to_vec();
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

/// Eigenvalues of a Hermitian matrix, ascending. The input is symmetrized
/// defensively; callers are expected to pass Hermitian data.
pub fn hermitian_eigenvalues(m: &Mat) -> Vec<f64> {
    let n = m.n;
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![m.re[0]];
    }
    let mut a = m.clone();
    a.hermitize();
    let mut d = vec![0.0f64; n];
    let mut e = vec![0.0f64; n];
    // Householder reduction; after each step column k below the
    // subdiagonal is annihilated. Only the lower triangle is kept current.
    for k in 0..n.saturating_sub(2) {
        d[k] = a.re[k * n + k];
        // x = A[k+1.., k]
        let mut norm2 = 0.0;
        for i in (k + 1)..n {
            let (re, im) = (a.re[i * n + k], a.im[i * n + k]);
            norm2 += re * re + im * im;
        }
        let norm = norm2.sqrt();
        e[k] = norm;
        if norm < 1e-300 {
            continue;
        }
        // alpha = -phase(x0)·norm, v = normalize(x − alpha·e1)
        let x0 = Complex64::new(a.re[(k + 1) * n + k], a.im[(k + 1) * n + k]);
        let phase = if x0.norm() < 1e-300 { Complex64::new(1.0, 0.0) } else { x0 / x0.norm() };
        let alpha = -phase * norm;
        let mut v: Vec<Complex64> = (k + 1..n)
            .map(|i| Complex64::new(a.re[i * n + k], a.im[i * n + k]))
            .collect();
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm < 1e-300 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        let msub = n - k - 1;
        // w = A₂₂ v over the trailing block
        let mut w = vec![Complex64::new(0.0, 0.0); msub];
        for i in 0..msub {
            let row = (k + 1 + i) * n;
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..msub {
                let col = k + 1 + j;
                acc += Complex64::new(a.re[row + col], a.im[row + col]) * v[j];
            }
            w[i] = acc;
        }
        // s = v* w (real for Hermitian A), q = w − s v
        let s: Complex64 = v.iter().zip(&w).map(|(vi, wi)| vi.conj() * wi).sum();
        let q: Vec<Complex64> = w.iter().zip(&v).map(|(wi, vi)| wi - s * vi).collect();
        // A₂₂ ← A₂₂ − 2 v q* − 2 q v*
        for i in 0..msub {
            let row = (k + 1 + i) * n;
            for j in 0..msub {
                let col = k + 1 + j;
                let upd = 2.0 * (v[i] * q[j].conj() + q[i] * v[j].conj());
                a.re[row + col] -= upd.re;
                a.im[row + col] -= upd.im;
            }
        }
    }
    if n >= 2 {
        d[n - 2] = a.re[(n - 2) * n + (n - 2)];
        d[n - 1] = a.re[(n - 1) * n + (n - 1)];
        let x = Complex64::new(a.re[(n - 1) * n + (n - 2)], a.im[(n - 1) * n + (n - 2)]);
        e[n - 2] = x.norm();
    }
    tridiag_eigenvalues(&mut d, &mut e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn apply_reflection(a: &Mat, v: &[Complex64]) -> Mat {
        // P A P with P = I − 2vv*
        let n = a.n;
        let mut w = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                acc += a.get(i, j) * v[j];
            }
            w[i] = acc;
        }
        let s: Complex64 = v.iter().zip(&w).map(|(vi, wi)| vi.conj() * wi).sum();
        let q: Vec<Complex64> = w.iter().zip(v).map(|(wi, vi)| wi - s * vi).collect();
        let mut out = a.clone();
        for i in 0..n {
            for j in 0..n {
                let upd = 2.0 * (v[i] * q[j].conj() + q[i] * v[j].conj());
                out.set(i, j, out.get(i, j) - upd);
            }
        }
        out
    }

    #[test]
    fn known_spectrum_under_unitary_conjugation() {
        let n = 8;
        let spectrum: Vec<f64> = (0..n).map(|i| (i as f64) - 3.5).collect();
        let mut a = Mat::zeros(n);
        for i in 0..n {
            a.re[i * n + i] = spectrum[i];
        }
        // conjugate by a few unit reflections
        let mut seed = 99u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
            ((seed >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        for _ in 0..4 {
            let mut v: Vec<Complex64> = (0..n).map(|_| Complex64::new(next(), next())).collect();
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for z in v.iter_mut() {
                *z /= norm;
            }
            a = apply_reflection(&a, &v);
        }
        assert!(a.herm_defect() < 1e-12);
        let eig = hermitian_eigenvalues(&a);
        for (got, want) in eig.iter().zip(&spectrum) {
            assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        }
    }

    #[test]
    fn moment_invariants() {
        let n = 23;
        let mut a = Mat::zeros(n);
        let mut seed = 5u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
            ((seed >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        for k in 0..n * n {
            a.re[k] = next();
            a.im[k] = next();
        }
        a.hermitize();
        let eig = hermitian_eigenvalues(&a);
        let t1: f64 = eig.iter().sum();
        let t2: f64 = eig.iter().map(|l| l * l).sum();
        let t3: f64 = eig.iter().map(|l| l * l * l).sum();
        let a2 = a.mul(&a);
        let a3 = a2.mul(&a);
        assert!((t1 - a.trace().re).abs() < 1e-9, "trace");
        assert!((t2 - a2.trace().re).abs() < 1e-9, "trace sq");
        assert!((t3 - a3.trace().re).abs() < 1e-9, "trace cube");
        // ascending
        for w in eig.windows(2) {
            assert!(w[0] <= w[1] + 1e-14);
        }
    }

    #[test]
    fn two_by_two_closed_form() {
        let mut a = Mat::zeros(2);
        a.set(0, 0, Complex64::new(1.0, 0.0));
        a.set(1, 1, Complex64::new(-2.0, 0.0));
        a.set(0, 1, Complex64::new(0.5, 1.5));
        a.set(1, 0, Complex64::new(0.5, -1.5));
        let eig = hermitian_eigenvalues(&a);
        let tr = -1.0f64;
        let det = 1.0 * -2.0 - (0.5f64 * 0.5 + 1.5 * 1.5);
        let disc = (tr * tr / 4.0 - det).sqrt();
        let want = [tr / 2.0 - disc, tr / 2.0 + disc];
        for (g, w) in eig.iter().zip(want) {
            assert!((g - w).abs() < 1e-12);
        }
    }
}
