//! Higher operations built from the basic derivations: iterated difference
//! quotients, Hessians, chain rules, and the Schwinger–Dyson residual
//! expression.

use super::poly::NcPoly;
use super::tensor::{TensorKey, TensorPoly};
use super::trace::TracePoly;
use super::word::Word;

/// Iterated free difference quotient ∂ᵏ_{(i₁,…,i_k)}: the rightmost index
/// applies first, every later quotient acts on the first tensor leg.
pub fn fdq_iter(p: &NcPoly, idx: &[u8]) -> TensorPoly {
    assert!(!idx.is_empty(), "need at least one index");
    let tp = TracePoly::from(p.clone());
    let mut t = tp.fdq(idx[idx.len() - 1]);
    for &i in idx[..idx.len() - 1].iter().rev() {
        t = t.fdq_leg1(i);
    }
    t
}

/// Hessian entries Hᵢⱼ = ∂ᵢ𝒟ⱼV as two-leg tensors, indexed H[i-1][j-1].
pub fn hessian(v: &NcPoly) -> Vec<Vec<TensorPoly>> {
    let n = v.n;
    let vt = TracePoly::from(v.clone());
    (1..=n)
        .map(|i| {
            (1..=n)
                .map(|j| {
                    let dj = vt.cyclic_derivative(j).expect_plain();
                    TracePoly::from(dj).fdq(i)
                })
                .collect()
        })
        .collect()
}

/// The scalar trace polynomial tr⊗tr(∂ᵢP) − tr(P·𝒟ᵢV); it vanishes
/// identically exactly when the Schwinger–Dyson relation holds formally.
pub fn sd_residual_expr(p: &TracePoly, v: &NcPoly, i: u8) -> TracePoly {
    assert_eq!(p.n, v.n, "letter count mismatch");
    let n = p.n;
    let mut lhs = TracePoly::zero(n);
    for (k, c) in &p.fdq(i).terms {
        let mut traces = k.traces.clone();
        for leg in &k.legs {
            if !leg.is_one() {
                traces.push(leg.cyclic_min());
            }
        }
        traces.sort();
        lhs.add_term(super::trace::TraceKey { base: Word::one(), traces }, c.clone());
    }
    let dv = TracePoly::from(v.clone()).cyclic_derivative(i);
    let rhs = (p * &dv).trace_close();
    &lhs - &rhs
}

/// Right side of the order-1 chain rule: Σⱼ (∂ⱼP)(Q) #₁ ∂ᵢQⱼ.
pub fn chain_rule_1_rhs(p: &NcPoly, args: &[NcPoly], i: u8) -> TensorPoly {
    let m = args.first().map(|q| q.n).unwrap_or(0);
    let mut out = TensorPoly::zero(m, 2);
    for j in 1..=p.n {
        let dp = TracePoly::from(p.clone()).fdq(j).compose(args);
        let dq = TracePoly::from(args[(j - 1) as usize].clone()).fdq(i);
        if dp.is_zero() || dq.is_zero() {
            continue;
        }
        out = &out + &dp.splice_at(1, &dq);
    }
    out
}

/// Right side of the order-2 chain rule:
/// Σⱼ (∂ⱼP)(Q) #₁ ∂²_{(i₁,i₂)}Qⱼ + Σ_{j₁,j₂} (∂²_{(j₁,j₂)}P)(Q) # (∂_{i₁}Q_{j₁}, ∂_{i₂}Q_{j₂}).
pub fn chain_rule_2_rhs(p: &NcPoly, args: &[NcPoly], i1: u8, i2: u8) -> TensorPoly {
    let m = args.first().map(|q| q.n).unwrap_or(0);
    let mut out = TensorPoly::zero(m, 3);
    for j in 1..=p.n {
        let dp = TracePoly::from(p.clone()).fdq(j).compose(args);
        let d2q = fdq_iter(&args[(j - 1) as usize], &[i1, i2]);
        if !dp.is_zero() && !d2q.is_zero() {
            out = &out + &dp.splice_at(1, &d2q);
        }
    }
    for j1 in 1..=p.n {
        for j2 in 1..=p.n {
            let d2p = fdq_iter(p, &[j1, j2]).compose(args);
            if d2p.is_zero() {
                continue;
            }
            let dq1 = TracePoly::from(args[(j1 - 1) as usize].clone()).fdq(i1);
            let dq2 = TracePoly::from(args[(j2 - 1) as usize].clone()).fdq(i2);
            if dq1.is_zero() || dq2.is_zero() {
                continue;
            }
            out = &out + &d2p.splice_all(&[dq1, dq2]);
        }
    }
    out
}

/// Right side of the cyclic chain rule:
/// 𝒟_{i,d}(P(Q)) = Σⱼ 𝒟_{i,wⱼ}(Qⱼ) with wⱼ = Σ_{P=aXⱼb} b(Q)·d·a(Q).
pub fn chain_rule_cyclic_rhs(p: &NcPoly, args: &[NcPoly], i: u8, d: &TracePoly) -> TracePoly {
    let m = args.first().map(|q| q.n).unwrap_or(0);
    let mut out = TracePoly::zero(m);
    for j in 1..=p.n {
        let weight = TracePoly::from(p.clone()).fdq(j).rho().compose(args).contract(d);
        if weight.is_zero() {
            continue;
        }
        out = &out + &TracePoly::from(args[(j - 1) as usize].clone()).cyclic_grad(i, &weight);
    }
    out
}

/// Tensor P⊗1 (left) or 1⊗P (right) from a trace polynomial, used to state
/// the derivation property of ∂ᵢ.
pub fn tensor_left(p: &TracePoly) -> TensorPoly {
    let mut out = TensorPoly::zero(p.n, 2);
    for (k, c) in &p.terms {
        out.add_term(
            TensorKey { legs: vec![k.base.clone(), Word::one()], traces: k.traces.clone() },
            c.clone(),
        );
    }
    out
}

pub fn tensor_right(p: &TracePoly) -> TensorPoly {
    let mut out = TensorPoly::zero(p.n, 2);
    for (k, c) in &p.terms {
        out.add_term(
            TensorKey { legs: vec![Word::one(), k.base.clone()], traces: k.traces.clone() },
            c.clone(),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncalg::poly::monomial;
    use crate::scalar::Coeff;

    #[test]
    fn iterated_quotient_examples() {
        // ∂²_{(1,1)}(X₁²) = 1⊗1⊗1 (single splitting of the two letters)
        let p = monomial(1, &[1, 1], Coeff::one());
        let t = fdq_iter(&p, &[1, 1]);
        let expected = TensorPoly::from_term(
            1,
            TensorKey::plain(vec![Word::one(), Word::one(), Word::one()]),
            Coeff::one(),
        );
        assert_eq!(t, expected);
        // ∂²_{(1,2)}(X₁X₂) = 1⊗1⊗1
        let p = monomial(2, &[1, 2], Coeff::one());
        let t = fdq_iter(&p, &[1, 2]);
        let expected = TensorPoly::from_term(
            2,
            TensorKey::plain(vec![Word::one(), Word::one(), Word::one()]),
            Coeff::one(),
        );
        assert_eq!(t, expected);
        // ∂²_{(1,1)}(X₂) = 0
        let p = monomial(2, &[2], Coeff::one());
        assert!(fdq_iter(&p, &[1, 1]).is_zero());
        // x³: three splittings
        let p = monomial(1, &[1, 1, 1], Coeff::one());
        assert_eq!(fdq_iter(&p, &[1, 1]).terms.len(), 3);
    }

    #[test]
    fn hessian_examples() {
        // V = ½(X₁²+X₂²): H = identity diagonal
        let n = 2;
        let v = &monomial(n, &[1, 1], Coeff::ratio(1, 2)) + &monomial(n, &[2, 2], Coeff::ratio(1, 2));
        let h = hessian(&v);
        for i in 0..2 {
            for j in 0..2 {
                if i == j {
                    assert_eq!(h[i][j], TensorPoly::unit(n));
                } else {
                    assert!(h[i][j].is_zero());
                }
            }
        }
        // V = ¼X₁⁴: H₁₁ = X₁²⊗1 + X₁⊗X₁ + 1⊗X₁²
        let v = monomial(1, &[1, 1, 1, 1], Coeff::ratio(1, 4));
        let h = hessian(&v);
        let mut expected = TensorPoly::zero(1, 2);
        expected.add_term(TensorKey::plain(vec![Word::from_letters(&[1, 1]), Word::one()]), Coeff::one());
        expected.add_term(TensorKey::plain(vec![Word::letter(1), Word::letter(1)]), Coeff::one());
        expected.add_term(TensorKey::plain(vec![Word::one(), Word::from_letters(&[1, 1])]), Coeff::one());
        assert_eq!(h[0][0], expected);
        // V = X₁X₂+X₂X₁: off-diagonal entries 1⊗1, ρ-symmetric
        let v = &monomial(2, &[1, 2], Coeff::one()) + &monomial(2, &[2, 1], Coeff::one());
        let h = hessian(&v);
        let unit2 = TensorPoly::unit(2).scale(&Coeff::from_int(2));
        assert_eq!(h[0][1], unit2);
        assert_eq!(h[1][0], unit2);
        assert_eq!(h[0][1], h[1][0].rho());
    }

    #[test]
    fn sd_residual_expression_examples() {
        let n = 1;
        let v = monomial(n, &[1, 1], Coeff::ratio(1, 2));
        // P = X₁: 1 − tr(X₁²)
        let p = TracePoly::from(NcPoly::letter(n, 1));
        let r = sd_residual_expr(&p, &v, 1);
        let mut expected = TracePoly::one(n);
        expected.add_term(
            crate::ncalg::trace::TraceKey::normalized(Word::one(), [Word::from_letters(&[1, 1])]),
            Coeff::from_int(-1),
        );
        assert_eq!(r, expected);
        // P = 1: −tr(𝒟V) = −tr(X₁)
        let p = TracePoly::one(n);
        let r = sd_residual_expr(&p, &v, 1);
        let mut expected = TracePoly::zero(n);
        expected.add_term(
            crate::ncalg::trace::TraceKey::normalized(Word::one(), [Word::letter(1)]),
            Coeff::from_int(-1),
        );
        assert_eq!(r, expected);
        // P = X₁²: 2tr(X₁) − tr(X₁³)
        let p = TracePoly::from(monomial(n, &[1, 1], Coeff::one()));
        let r = sd_residual_expr(&p, &v, 1);
        let mut expected = TracePoly::zero(n);
        expected.add_term(
            crate::ncalg::trace::TraceKey::normalized(Word::one(), [Word::letter(1)]),
            Coeff::from_int(2),
        );
        expected.add_term(
            crate::ncalg::trace::TraceKey::normalized(Word::one(), [Word::from_letters(&[1, 1, 1])]),
            Coeff::from_int(-1),
        );
        assert_eq!(r, expected);
    }

    #[test]
    fn chain_rule_worked_example() {
        // P = X₁X₂, Q = (X₂, X₁): ∂₁(P(Q)) = ∂₁(X₂X₁) = X₂⊗1
        let p = monomial(2, &[1, 2], Coeff::one());
        let args = [NcPoly::letter(2, 2), NcPoly::letter(2, 1)];
        let lhs = TracePoly::from(p.compose(&args)).fdq(1);
        let rhs = chain_rule_1_rhs(&p, &args, 1);
        assert_eq!(lhs, rhs);
        let expected = TensorPoly::from_term(
            2,
            TensorKey::plain(vec![Word::letter(2), Word::one()]),
            Coeff::one(),
        );
        assert_eq!(lhs, expected);
    }
}
