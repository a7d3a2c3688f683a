//! Dense complex matrices stored as separate real and imaginary planes,
//! so products run on real gemm kernels (three per complex product).

use num::complex::Complex64;
use std::cell::RefCell;
use std::fmt;

#[derive(Clone, PartialEq)]
pub struct Mat {
    pub n: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

thread_local! {
    static SCRATCH: RefCell<Vec<f64>> = const { RefCell::new(Vec::new()) };
}

impl Mat {
    pub fn zeros(n: usize) -> Self {
        Mat { n, re: vec![0.0; n * n], im: vec![0.0; n * n] }
    }

    pub fn eye(n: usize) -> Self {
        let mut m = Mat::zeros(n);
        for i in 0..n {
            m.re[i * n + i] = 1.0;
        }
        m
    }

    pub fn scaled_eye(n: usize, c: Complex64) -> Self {
        let mut m = Mat::zeros(n);
        for i in 0..n {
            m.re[i * n + i] = c.re;
            m.im[i * n + i] = c.im;
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(self.re[i * self.n + j], self.im[i * self.n + j])
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.re[i * self.n + j] = v.re;
        self.im[i * self.n + j] = v.im;
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        let mut m = Mat::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, *v);
            }
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.re.iter().all(|&x| x == 0.0) && self.im.iter().all(|&x| x == 0.0)
    }

    /// C = A·B through three real gemms.
    pub fn mul(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let mut out = Mat::zeros(self.n);
        self.mul_into(rhs, &mut out);
        out
    }

    pub fn mul_into(&self, rhs: &Mat, out: &mut Mat) {
        let n = self.n;
        assert_eq!(rhs.n, n, "dimension mismatch");
        assert_eq!(out.n, n, "dimension mismatch");
        let sz = n * n;
        SCRATCH.with(|s| {
            let mut buf = s.borrow_mut();
            buf.resize(3 * sz, 0.0);
            let (sa, rest) = buf.split_at_mut(sz);
            let (sb, t2) = rest.split_at_mut(sz);
            for k in 0..sz {
                sa[k] = self.re[k] + self.im[k];
                sb[k] = rhs.re[k] + rhs.im[k];
            }
            unsafe {
                // T3 = (Ar+Ai)(Br+Bi) into out.im
                matrixmultiply::dgemm(
                    n, n, n, 1.0, sa.as_ptr(), n as isize, 1, sb.as_ptr(), n as isize, 1, 0.0,
                    out.im.as_mut_ptr(), n as isize, 1,
                );
                // T2 = Ai·Bi
                matrixmultiply::dgemm(
                    n, n, n, 1.0, self.im.as_ptr(), n as isize, 1, rhs.im.as_ptr(), n as isize, 1,
                    0.0, t2.as_mut_ptr(), n as isize, 1,
                );
                // T1 = Ar·Br into out.re
                matrixmultiply::dgemm(
                    n, n, n, 1.0, self.re.as_ptr(), n as isize, 1, rhs.re.as_ptr(), n as isize, 1,
                    0.0, out.re.as_mut_ptr(), n as isize, 1,
                );
            }
            for k in 0..sz {
                out.im[k] -= out.re[k] + t2[k];
                out.re[k] -= t2[k];
            }
        });
    }

    pub fn adjoint(&self) -> Mat {
        let n = self.n;
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.re[j * n + i] = self.re[i * n + j];
                out.im[j * n + i] = -self.im[i * n + j];
            }
        }
        out
    }

    /// (M + M*)/2 in place.
    pub fn hermitize(&mut self) {
        let n = self.n;
        for i in 0..n {
            self.im[i * n + i] = 0.0;
            for j in (i + 1)..n {
                let re = 0.5 * (self.re[i * n + j] + self.re[j * n + i]);
                let im = 0.5 * (self.im[i * n + j] - self.im[j * n + i]);
                self.re[i * n + j] = re;
                self.re[j * n + i] = re;
                self.im[i * n + j] = im;
                self.im[j * n + i] = -im;
            }
        }
    }

    pub fn herm_defect(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            worst = worst.max(self.im[i * n + i].abs());
            for j in (i + 1)..n {
                let dre = self.re[i * n + j] - self.re[j * n + i];
                let dim = self.im[i * n + j] + self.im[j * n + i];
                worst = worst.max(dre.hypot(dim));
            }
        }
        worst
    }

    pub fn trace(&self) -> Complex64 {
        let n = self.n;
        let mut re = 0.0;
        let mut im = 0.0;
        for i in 0..n {
            re += self.re[i * n + i];
            im += self.im[i * n + i];
        }
        Complex64::new(re, im)
    }

    /// Tr(A·B) without forming the product.
    pub fn trace_prod(&self, rhs: &Mat) -> Complex64 {
        let n = self.n;
        assert_eq!(rhs.n, n);
        let mut re = 0.0;
        let mut im = 0.0;
        for i in 0..n {
            for k in 0..n {
                let (ar, ai) = (self.re[i * n + k], self.im[i * n + k]);
                let (br, bi) = (rhs.re[k * n + i], rhs.im[k * n + i]);
                re += ar * br - ai * bi;
                im += ar * bi + ai * br;
            }
        }
        Complex64::new(re, im)
    }

    pub fn add_scaled(&mut self, rhs: &Mat, s: f64) {
        assert_eq!(self.n, rhs.n);
        for k in 0..self.re.len() {
            self.re[k] += s * rhs.re[k];
            self.im[k] += s * rhs.im[k];
        }
    }

    pub fn add_scaled_complex(&mut self, rhs: &Mat, s: Complex64) {
        assert_eq!(self.n, rhs.n);
        for k in 0..self.re.len() {
            let (r, i) = (rhs.re[k], rhs.im[k]);
            self.re[k] += s.re * r - s.im * i;
            self.im[k] += s.re * i + s.im * r;
        }
    }

    pub fn scale(&mut self, s: f64) {
        for v in self.re.iter_mut().chain(self.im.iter_mut()) {
            *v *= s;
        }
    }

    pub fn frobenius(&self) -> f64 {
        self.re
            .iter()
            .chain(self.im.iter())
            .map(|&x| x * x)
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        (0..self.re.len())
            .map(|k| self.re[k].hypot(self.im[k]))
            .fold(0.0, f64::max)
    }

    /// Re Tr(A·B) for Hermitian A, B reduces to the plane dot products.
    pub fn herm_inner(&self, rhs: &Mat) -> f64 {
        assert_eq!(self.n, rhs.n);
        let mut acc = 0.0;
        for k in 0..self.re.len() {
            acc += self.re[k] * rhs.re[k] + self.im[k] * rhs.im[k];
        }
        acc
    }

    /// Operator norm (largest |eigenvalue|) of a Hermitian matrix.
    pub fn herm_op_norm(&self) -> f64 {
        super::eig::hermitian_eigenvalues(self)
            .into_iter()
            .fold(0.0, |a, l| a.max(l.abs()))
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.n, self.n)?;
        for i in 0..self.n.min(6) {
            write!(f, "  ")?;
            for j in 0..self.n.min(6) {
                let v = self.get(i, j);
                write!(f, "{:+.4}{:+.4}i ", v.re, v.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn randish(n: usize, seed: u64) -> Mat {
        let mut m = Mat::zeros(n);
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        for k in 0..n * n {
            m.re[k] = next();
            m.im[k] = next();
        }
        m
    }

    #[test]
    fn complex_product_matches_naive() {
        let n = 7;
        let a = randish(n, 1);
        let b = randish(n, 2);
        let c = a.mul(&b);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += a.get(i, k) * b.get(k, j);
                }
                let d = c.get(i, j) - acc;
                assert!(d.norm() < 1e-12, "entry ({i},{j}) off by {}", d.norm());
            }
        }
    }

    #[test]
    fn hermitize_and_inner() {
        let mut a = randish(5, 3);
        a.hermitize();
        assert!(a.herm_defect() < 1e-15);
        let mut b = randish(5, 4);
        b.hermitize();
        let tr = a.trace_prod(&b);
        assert!((tr.re - a.herm_inner(&b)).abs() < 1e-12);
        assert!(tr.im.abs() < 1e-12);
    }
}
