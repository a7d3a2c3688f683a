//! The Hessian superoperator H(V,X): (H#A)ⱼ = Σ_k ∂_k𝒟ⱼV(X) # A_k acting
//! on the real inner-product space of Hermitian n-tuples with
//! ⟨A,B⟩ = Σᵢ Re Tr(AᵢBᵢ), and its minimum eigenvalue by Lanczos.

use super::eval::EvalCtx;
use super::mat::Mat;
use super::tuple::MatrixTuple;
use super::MatError;
use crate::ncalg::{hessian, NcPoly, TensorPoly, Word};
use num::complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_distr::StandardNormal;
use rand_xoshiro::Xoshiro256PlusPlus;

/// Symbolic Hessian compiled for repeated evaluation; `entries[j][k]` is
/// ∂_{k+1}𝒟_{j+1}V.
pub struct HessianOp {
    pub n: u8,
    entries: Vec<Vec<CompiledTensor2>>,
}

/// A two-leg tensor flattened for evaluation: (leg a, leg b, trace words,
/// coefficient).
pub struct CompiledTensor2 {
    terms: Vec<(Word, Word, Vec<Word>, Complex64)>,
}

impl CompiledTensor2 {
    pub fn compile(t: &TensorPoly) -> Self {
        assert_eq!(t.legs, 2);
        CompiledTensor2 {
            terms: t
                .terms
                .iter()
                .map(|(k, c)| (k.legs[0].clone(), k.legs[1].clone(), k.traces.clone(), c.to_c64()))
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Accumulates (this # h) into `acc` using the shared context.
    pub fn apply_into(&self, ctx: &mut EvalCtx, h: &Mat, acc: &mut Mat) {
        for (a, b, traces, c0) in &self.terms {
            let mut c = *c0;
            for tw in traces {
                c *= ctx.tau_word(tw);
            }
            let ah = ctx.word_handle(a);
            let bh = ctx.word_handle(b);
            match (ah, bh) {
                (None, None) => acc.add_scaled_complex(h, c),
                (Some(a), None) => {
                    let prod = ctx.arena_mat(a).mul(h);
                    acc.add_scaled_complex(&prod, c);
                }
                (None, Some(b)) => {
                    let prod = h.mul(ctx.arena_mat(b));
                    acc.add_scaled_complex(&prod, c);
                }
                (Some(a), Some(b)) => {
                    let prod = ctx.arena_mat(a).mul(h).mul(ctx.arena_mat(b));
                    acc.add_scaled_complex(&prod, c);
                }
            }
        }
    }
}

impl HessianOp {
    pub fn new(v: &NcPoly) -> Self {
        let h = hessian(v);
        let n = v.n;
        let entries = (0..n as usize)
            .map(|j| (0..n as usize).map(|k| CompiledTensor2::compile(&h[k][j])).collect())
            .collect();
        HessianOp { n, entries }
    }

    /// (H#A)ⱼ = Σ_k ∂_k𝒟ⱼV(X) # A_k.
    pub fn apply(&self, ctx: &mut EvalCtx, a: &[Mat]) -> Vec<Mat> {
        assert_eq!(a.len(), self.n as usize);
        (0..self.n as usize)
            .map(|j| {
                let mut acc = Mat::zeros(ctx.dim());
                for (k, ak) in a.iter().enumerate() {
                    self.entries[j][k].apply_into(ctx, ak, &mut acc);
                }
                acc
            })
            .collect()
    }
}

fn tuple_inner(a: &[Mat], b: &[Mat]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.herm_inner(y)).sum()
}

fn tuple_norm(a: &[Mat]) -> f64 {
    tuple_inner(a, a).sqrt()
}

pub struct MinEigReport {
    pub min_eig: f64,
    pub iterations: usize,
    pub converged_change: f64,
}

/// Smallest eigenvalue of the Hessian superoperator at X via Lanczos with
/// full reorthogonalization on the nN²-dimensional real space. The
/// operator's symmetry is verified (to 1e-8) on random pairs first.
pub fn hessian_min_eig(
    v: &NcPoly,
    x: &MatrixTuple,
    iters: usize,
    seed: u64,
) -> Result<MinEigReport, MatError> {
    let op = HessianOp::new(v);
    let n = v.n as usize;
    assert_eq!(x.n_letters() as usize, n, "dimension mismatch");
    let dim = x.dim();
    let mut ctx = EvalCtx::new(x);
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);

    let rand_dir = |rng: &mut Xoshiro256PlusPlus| -> Vec<Mat> {
        (0..n)
            .map(|_| {
                let mut m = Mat::zeros(dim);
                for i in 0..dim {
                    for j in 0..dim {
                        m.re[i * dim + j] = rng.sample(StandardNormal);
                        m.im[i * dim + j] = rng.sample(StandardNormal);
                    }
                }
                m.hermitize();
                m
            })
            .collect()
    };

    // symmetry check: ⟨H#A, B⟩ = ⟨A, H#B⟩
    let mut scale = 0.0f64;
    for _ in 0..3 {
        let a = rand_dir(&mut rng);
        let b = rand_dir(&mut rng);
        let ha = op.apply(&mut ctx, &a);
        let hb = op.apply(&mut ctx, &b);
        let lhs = tuple_inner(&ha, &b);
        let rhs = tuple_inner(&a, &hb);
        scale = scale.max(lhs.abs()).max(rhs.abs()).max(1.0);
        if (lhs - rhs).abs() > 1e-8 * scale {
            return Err(MatError::NotSymmetric { defect: (lhs - rhs).abs() / scale });
        }
    }

    // Lanczos with full reorthogonalization
    let mut basis: Vec<Vec<Mat>> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut q = rand_dir(&mut rng);
    let nq = tuple_norm(&q);
    for m in q.iter_mut() {
        m.scale(1.0 / nq);
    }
    let mut prev_min = f64::INFINITY;
    let mut last_change = f64::INFINITY;
    let space_dim = n * dim * dim;
    let max_iters = iters.min(space_dim);
    for it in 0..max_iters {
        basis.push(q.clone());
        let mut w = op.apply(&mut ctx, &q);
        let alpha = tuple_inner(&w, &q);
        alphas.push(alpha);
        // w ← w − α q − β q_prev, then full reorthogonalization
        for (bi, bvec) in basis.iter().enumerate() {
            let coef = if bi == basis.len() - 1 { alpha } else { tuple_inner(&w, bvec) };
            for (wm, bm) in w.iter_mut().zip(bvec) {
                wm.add_scaled(bm, -coef);
            }
        }
        // second orthogonalization pass for stability
        for bvec in &basis {
            let coef = tuple_inner(&w, bvec);
            for (wm, bm) in w.iter_mut().zip(bvec) {
                wm.add_scaled(bm, -coef);
            }
        }
        let beta = tuple_norm(&w);
        let mut d = alphas.clone();
        let mut e = vec![0.0f64; d.len()];
        e[..betas.len()].copy_from_slice(&betas);
        let evs = super::eig::tridiag_eigenvalues(&mut d, &mut e);
        let cur_min = evs[0];
        last_change = (cur_min - prev_min).abs();
        prev_min = cur_min;
        let tol = 1e-10 * (1.0 + cur_min.abs());
        if beta < 1e-12 * (1.0 + alpha.abs()) {
            // Krylov space is invariant: eigenvalues are exact on it
            return Ok(MinEigReport { min_eig: cur_min, iterations: it + 1, converged_change: 0.0 });
        }
        if it >= 8 && last_change < tol {
            return Ok(MinEigReport { min_eig: cur_min, iterations: it + 1, converged_change: last_change });
        }
        if it + 1 == max_iters && max_iters == space_dim {
            // full-dimensional Krylov basis: exact
            return Ok(MinEigReport { min_eig: cur_min, iterations: it + 1, converged_change: last_change });
        }
        betas.push(beta);
        for m in w.iter_mut() {
            m.scale(1.0 / beta);
        }
        q = w;
    }
    Err(MatError::NonConvergence { iterations: max_iters, residual: last_change })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncalg::monomial;
    use crate::scalar::Coeff;
    use crate::matrep::tuple::HermMatrix;

    fn tuple_from_diag(entries: &[&[f64]]) -> MatrixTuple {
        let mats = entries
            .iter()
            .map(|vals| {
                let n = vals.len();
                let mut m = Mat::zeros(n);
                for (i, &v) in vals.iter().enumerate() {
                    m.re[i * n + i] = v;
                }
                HermMatrix::checked(m).unwrap()
            })
            .collect();
        MatrixTuple::new(mats).unwrap()
    }

    #[test]
    fn quadratic_hessian_is_identity() {
        // V = ½ΣXᵢ² gives the identity superoperator, min eig exactly 1
        let v = &monomial(2, &[1, 1], Coeff::ratio(1, 2)) + &monomial(2, &[2, 2], Coeff::ratio(1, 2));
        let x = tuple_from_diag(&[&[0.3, -0.7, 1.1], &[0.2, 0.0, -0.4]]);
        let rep = hessian_min_eig(&v, &x, 60, 11).unwrap();
        assert!((rep.min_eig - 1.0).abs() < 1e-9, "min eig {}", rep.min_eig);
    }

    #[test]
    fn quartic_hessian_vanishes_at_zero() {
        // V = ¼X₁⁴: Hessian = X²⊗1 + X⊗X + 1⊗X² vanishes at X = 0
        let v = monomial(1, &[1, 1, 1, 1], Coeff::ratio(1, 4));
        let x = tuple_from_diag(&[&[0.0, 0.0, 0.0]]);
        let rep = hessian_min_eig(&v, &x, 60, 3).unwrap();
        assert!(rep.min_eig.abs() < 1e-12);
    }

    #[test]
    fn shifted_quartic_stays_above_one() {
        // V = ½X₁² + ¼X₁⁴: the quartic part is positive semidefinite
        let v = &monomial(1, &[1, 1], Coeff::ratio(1, 2)) + &monomial(1, &[1, 1, 1, 1], Coeff::ratio(1, 4));
        let x = tuple_from_diag(&[&[0.9, -0.3, 0.5, -1.2]]);
        let rep = hessian_min_eig(&v, &x, 80, 5).unwrap();
        assert!(rep.min_eig >= 1.0 - 1e-6, "min eig {}", rep.min_eig);
    }
}
