//! Trace polynomials: linear combinations of (base word)·∏tr(word) terms.
//!
//! These are the functions "of the variable and of expectations" on which
//! the diffusion semigroup closes. Trace words are stored in their
//! lexicographically least cyclic rotation, nested traces flatten (scalar
//! trace factors commute and pull out), and empty trace words drop since
//! tr(1) = 1.

use super::poly::NcPoly;
use super::tensor::{TensorKey, TensorPoly};
use super::word::Word;
use super::MAX_DEGREE;
use crate::scalar::Coeff;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TraceKey {
    pub base: Word,
    /// Sorted multiset of cyclic-minimal nonempty trace words.
    pub traces: Vec<Word>,
}

impl TraceKey {
    pub fn plain(base: Word) -> Self {
        TraceKey { base, traces: Vec::new() }
    }

    pub fn normalized(base: Word, traces: impl IntoIterator<Item = Word>) -> Self {
        let mut ts: Vec<Word> = traces
            .into_iter()
            .filter(|w| !w.is_one())
            .map(|w| w.cyclic_min())
            .collect();
        ts.sort();
        TraceKey { base, traces: ts }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct TracePoly {
    pub n: u8,
    pub terms: BTreeMap<TraceKey, Coeff>,
}

impl From<NcPoly> for TracePoly {
    fn from(p: NcPoly) -> Self {
        TracePoly {
            n: p.n,
            terms: p.terms.into_iter().map(|(w, c)| (TraceKey::plain(w), c)).collect(),
        }
    }
}

impl TracePoly {
    pub fn zero(n: u8) -> Self {
        TracePoly { n, terms: BTreeMap::new() }
    }

    pub fn one(n: u8) -> Self {
        let mut t = TracePoly::zero(n);
        t.add_term(TraceKey::plain(Word::one()), Coeff::one());
        t
    }

    /// The scalar tr(w).
    pub fn trace_of_word(n: u8, w: Word) -> Self {
        let mut t = TracePoly::zero(n);
        t.add_term(TraceKey::normalized(Word::one(), [w]), Coeff::one());
        t
    }

    pub fn add_term(&mut self, key: TraceKey, c: Coeff) {
        assert!(key.base.max_letter() <= self.n, "word uses letter above n={}", self.n);
        debug_assert!(key.traces.iter().all(|w| !w.is_one() && *w == w.cyclic_min()));
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &Coeff) -> TracePoly {
        if c.is_zero() {
            return TracePoly::zero(self.n);
        }
        TracePoly {
            n: self.n,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }

    /// True when no term carries a trace factor.
    pub fn is_plain(&self) -> bool {
        self.terms.keys().all(|k| k.traces.is_empty())
    }

    /// The plain part as an NcPoly; panics if a trace factor is present.
    pub fn expect_plain(&self) -> NcPoly {
        assert!(self.is_plain(), "polynomial has trace factors");
        NcPoly::from_terms(self.n, self.terms.iter().map(|(k, c)| (k.base.clone(), c.clone())))
    }

    pub fn base_degree(&self) -> usize {
        self.terms.keys().map(|k| k.base.degree()).max().unwrap_or(0)
    }

    /// Coefficient-conjugating involution: base and trace words reverse.
    pub fn adjoint(&self) -> TracePoly {
        let mut out = TracePoly::zero(self.n);
        for (k, c) in &self.terms {
            let key = TraceKey::normalized(k.base.reversed(), k.traces.iter().map(Word::reversed));
            out.add_term(key, c.conj());
        }
        out
    }

    pub fn is_self_adjoint(&self) -> bool {
        *self == self.adjoint()
    }

    /// Applies the formal trace to the whole polynomial: every base word
    /// moves into the trace multiset. The result has only scalar terms.
    pub fn trace_close(&self) -> TracePoly {
        let mut out = TracePoly::zero(self.n);
        for (k, c) in &self.terms {
            let mut traces = k.traces.clone();
            if !k.base.is_one() {
                traces.push(k.base.cyclic_min());
                traces.sort();
            }
            out.add_term(TraceKey { base: Word::one(), traces }, c.clone());
        }
        out
    }

    /// Free difference quotient ∂ᵢ. Trace factors behave as constants, so
    /// only the base word splits; each resulting two-leg term keeps the
    /// term's trace factors as coefficients.
    pub fn fdq(&self, i: u8) -> TensorPoly {
        assert!(1 <= i && i <= self.n, "letter X{i} outside 1..={}", self.n);
        let mut out = TensorPoly::zero(self.n, 2);
        for (k, c) in &self.terms {
            for (a, b) in k.base.occurrences(i) {
                out.add_term(TensorKey { legs: vec![a, b], traces: k.traces.clone() }, c.clone());
            }
        }
        out
    }

    /// Weighted cyclic gradient 𝒟_{i,p}. For a product of factors
    /// F₁·F₂⋯F_m the derivation rule gives, for the occurrence inside Fⱼ,
    /// the weight (F_{j+1}⋯F_m)·p·(F₁⋯F_{j−1}); a trace factor tr(w)
    /// differentiates as 𝒟_{i,q}(tr(w)) = 𝒟_{i,tr(q)}(w).
    pub fn cyclic_grad(&self, i: u8, weight: &TracePoly) -> TracePoly {
        assert!(1 <= i && i <= self.n, "letter X{i} outside 1..={}", self.n);
        assert_eq!(self.n, weight.n, "letter count mismatch");
        let mut out = TracePoly::zero(self.n);
        for (k, c) in &self.terms {
            // occurrences in the base word: weight picks up all trace
            // factors (scalars commute past everything).
            for (a, b) in k.base.occurrences(i) {
                for (wk, wc) in &weight.terms {
                    let base = b.concat(&wk.base).concat(&a);
                    assert!(base.degree() <= MAX_DEGREE, "degree budget exceeded");
                    let mut traces = k.traces.clone();
                    traces.extend(wk.traces.iter().cloned());
                    traces.sort();
                    out.add_term(TraceKey { base, traces }, c * wc);
                }
            }
            // occurrences inside a trace factor: the base word joins the
            // weight, the weight is trace-closed, and the factor opens up.
            for (l, tw) in k.traces.iter().enumerate() {
                if !tw.0.contains(&i) {
                    continue;
                }
                let mut rest: Vec<Word> = k.traces.clone();
                rest.remove(l);
                // tr(weight · base): scalar closure of the inner weight
                let base_poly = NcPoly::from_term(self.n, k.base.clone(), Coeff::one());
                let closed = (weight * &TracePoly::from(base_poly)).trace_close();
                for (a, b) in tw.occurrences(i) {
                    let opened = b.concat(&a);
                    for (ck, cc) in &closed.terms {
                        let mut traces = rest.clone();
                        traces.extend(ck.traces.iter().cloned());
                        traces.sort();
                        out.add_term(TraceKey { base: opened.clone(), traces }, c * cc);
                    }
                }
            }
        }
        out
    }

    /// Unweighted cyclic derivative 𝒟ᵢ = 𝒟_{i,1}.
    pub fn cyclic_derivative(&self, i: u8) -> TracePoly {
        self.cyclic_grad(i, &TracePoly::one(self.n))
    }

    /// Flat Laplacian: for every letter, every ordered pair of its
    /// occurrences u·Xᵢ·v·Xᵢ·w in the base word contributes 2·u·w·tr(v).
    /// Trace factors ride along untouched.
    pub fn laplacian(&self) -> TracePoly {
        let mut out = TracePoly::zero(self.n);
        let two = Coeff::from_int(2);
        for (k, c) in &self.terms {
            let letters = &k.base.0;
            for p in 0..letters.len() {
                for q in (p + 1)..letters.len() {
                    if letters[p] != letters[q] {
                        continue;
                    }
                    let u = &letters[..p];
                    let v = &letters[p + 1..q];
                    let w = &letters[q + 1..];
                    let base = Word::from_letters(u).concat(&Word::from_letters(w));
                    let mut traces = k.traces.clone();
                    if !v.is_empty() {
                        traces.push(Word::from_letters(v).cyclic_min());
                        traces.sort();
                    }
                    out.add_term(TraceKey { base, traces }, c * &two);
                }
            }
        }
        out
    }

    /// δ_Δ: vanishes on plain polynomials and acts as a derivation over the
    /// trace factors with δ_Δ(tr(w)) = tr(Δ(w)).
    pub fn delta_flat(&self) -> TracePoly {
        self.delta_with(|w| TracePoly::from(NcPoly::from_term(self.n, w.clone(), Coeff::one())).laplacian())
    }

    /// Δ_V = Δ − Σᵢ ∂ᵢ(·)#𝒟ᵢV on the base word.
    pub fn laplacian_v(&self, v: &NcPoly) -> TracePoly {
        assert_eq!(self.n, v.n, "letter count mismatch");
        let mut out = self.laplacian();
        for i in 1..=self.n {
            let dv = TracePoly::from(v.clone()).cyclic_derivative(i);
            let contracted = self.fdq(i).contract(&dv);
            out = &out - &contracted;
        }
        out
    }

    /// δ_V: vanishes on plain polynomials, derivation over trace factors
    /// with δ_V(tr(w)) = tr(Δ_V(w)).
    pub fn delta_v(&self, v: &NcPoly) -> TracePoly {
        self.delta_with(|w| {
            TracePoly::from(NcPoly::from_term(self.n, w.clone(), Coeff::one())).laplacian_v(v)
        })
    }

    fn delta_with(&self, inner: impl Fn(&Word) -> TracePoly) -> TracePoly {
        let mut out = TracePoly::zero(self.n);
        let mut memo: BTreeMap<Word, TracePoly> = BTreeMap::new();
        for (k, c) in &self.terms {
            for (l, tw) in k.traces.iter().enumerate() {
                let closed = memo.entry(tw.clone()).or_insert_with(|| inner(tw).trace_close());
                let mut rest = k.traces.clone();
                rest.remove(l);
                for (ck, cc) in &closed.terms {
                    let mut traces = rest.clone();
                    traces.extend(ck.traces.iter().cloned());
                    traces.sort();
                    out.add_term(TraceKey { base: k.base.clone(), traces }, c * cc);
                }
            }
        }
        out
    }

    /// The diffusion generator L_V = ½(Δ_V + δ_V).
    pub fn generator(&self, v: &NcPoly) -> TracePoly {
        let sum = &self.laplacian_v(v) + &self.delta_v(v);
        sum.scale(&Coeff::ratio(1, 2))
    }

    /// Full directional derivative along formal directions H₁,…,H_n (one
    /// word per letter, `None` for a zero direction, all direction words
    /// over fresh letters above n): Leibniz on the base word and under
    /// every trace factor.
    pub fn directional(&self, dirs: &[Option<Word>], n_out: u8) -> TracePoly {
        assert_eq!(dirs.len(), self.n as usize, "one direction per letter");
        for d in dirs.iter().flatten() {
            for &l in &d.0 {
                assert!(l > self.n && l <= n_out, "direction letter X{l} collides with X letters");
            }
        }
        let mut out = TracePoly::zero(n_out);
        for (k, c) in &self.terms {
            let letters = &k.base.0;
            for (pos, &l) in letters.iter().enumerate() {
                let Some(dir) = &dirs[(l - 1) as usize] else { continue };
                let mut base = Vec::new();
                base.extend_from_slice(&letters[..pos]);
                base.extend_from_slice(&dir.0);
                base.extend_from_slice(&letters[pos + 1..]);
                out.add_term(TraceKey { base: Word(base), traces: k.traces.clone() }, c.clone());
            }
            for (t, tw) in k.traces.iter().enumerate() {
                for (pos, &l) in tw.0.iter().enumerate() {
                    let Some(dir) = &dirs[(l - 1) as usize] else { continue };
                    let mut w = Vec::new();
                    w.extend_from_slice(&tw.0[..pos]);
                    w.extend_from_slice(&dir.0);
                    w.extend_from_slice(&tw.0[pos + 1..]);
                    let mut traces = k.traces.clone();
                    traces[t] = Word(w).cyclic_min();
                    traces.sort();
                    out.add_term(TraceKey { base: k.base.clone(), traces }, c.clone());
                }
            }
        }
        out
    }

    /// Extends the alphabet without touching terms.
    pub fn widen(&self, n: u8) -> TracePoly {
        assert!(n >= self.n);
        TracePoly { n, terms: self.terms.clone() }
    }
}

impl Add for &TracePoly {
    type Output = TracePoly;
    fn add(self, rhs: &TracePoly) -> TracePoly {
        assert_eq!(self.n, rhs.n, "letter count mismatch");
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }
}

impl Sub for &TracePoly {
    type Output = TracePoly;
    fn sub(self, rhs: &TracePoly) -> TracePoly {
        self + &(-rhs)
    }
}

impl Neg for &TracePoly {
    type Output = TracePoly;
    fn neg(self) -> TracePoly {
        TracePoly {
            n: self.n,
            terms: self.terms.iter().map(|(k, c)| (k.clone(), -c.clone())).collect(),
        }
    }
}

impl Mul for &TracePoly {
    type Output = TracePoly;
    fn mul(self, rhs: &TracePoly) -> TracePoly {
        assert_eq!(self.n, rhs.n, "letter count mismatch");
        let mut out = TracePoly::zero(self.n);
        for (k1, c1) in &self.terms {
            for (k2, c2) in &rhs.terms {
                let base = k1.base.concat(&k2.base);
                assert!(base.degree() <= MAX_DEGREE, "degree budget exceeded: {}", base.degree());
                let mut traces = k1.traces.clone();
                traces.extend(k2.traces.iter().cloned());
                traces.sort();
                out.add_term(TraceKey { base, traces }, c1 * c2);
            }
        }
        out
    }
}

impl fmt::Debug for TracePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for TracePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (k, c)) in self.terms.iter().enumerate() {
            if idx > 0 {
                write!(f, " + ")?;
            }
            let unit_coeff = *c == Coeff::one();
            let plain_unit = k.base.is_one() && k.traces.is_empty();
            if !unit_coeff || plain_unit {
                write!(f, "{c}")?;
                if !plain_unit {
                    write!(f, "·")?;
                }
            }
            if !k.base.is_one() {
                write!(f, "{}", k.base)?;
            } else if !k.traces.is_empty() && unit_coeff && !plain_unit {
                // nothing: traces follow
            }
            for (j, t) in k.traces.iter().enumerate() {
                if j > 0 || !k.base.is_one() {
                    write!(f, "·")?;
                }
                write!(f, "tr({t})")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncalg::poly::monomial;

    fn x(n: u8, i: u8) -> TracePoly {
        TracePoly::from(NcPoly::letter(n, i))
    }

    #[test]
    fn trace_factor_merge_in_products() {
        // (X₁·tr(X₂)) · (X₂·tr(X₂)) = X₁X₂·tr(X₂)²
        let n = 2;
        let mut p = TracePoly::zero(n);
        p.add_term(TraceKey::normalized(Word::letter(1), [Word::letter(2)]), Coeff::one());
        let mut q = TracePoly::zero(n);
        q.add_term(TraceKey::normalized(Word::letter(2), [Word::letter(2)]), Coeff::one());
        let pq = &p * &q;
        let mut expected = TracePoly::zero(n);
        expected.add_term(
            TraceKey::normalized(Word::from_letters(&[1, 2]), [Word::letter(2), Word::letter(2)]),
            Coeff::one(),
        );
        assert_eq!(pq, expected);
    }

    #[test]
    fn adjoint_normalizes_trace_words_cyclically() {
        // (X₁·tr(X₁X₂))* = X₁·tr(X₂X₁) = X₁·tr(X₁X₂)
        let n = 2;
        let mut p = TracePoly::zero(n);
        p.add_term(
            TraceKey::normalized(Word::letter(1), [Word::from_letters(&[1, 2])]),
            Coeff::one(),
        );
        assert_eq!(p.adjoint(), p);
        assert_eq!(p.adjoint().adjoint(), p);
    }

    #[test]
    fn fdq_ignores_trace_factors() {
        // ∂₁(X₂·tr(X₁)) = 0 (no X₁ in the base word)
        let n = 2;
        let mut p = TracePoly::zero(n);
        p.add_term(TraceKey::normalized(Word::letter(2), [Word::letter(1)]), Coeff::one());
        assert!(p.fdq(1).is_zero());
        // ∂₁(X₁X₂X₁) = 1⊗X₂X₁ + X₁X₂⊗1
        let q = TracePoly::from(monomial(n, &[1, 2, 1], Coeff::one()));
        let d = q.fdq(1);
        assert_eq!(d.terms.len(), 2);
        let mut expected = TensorPoly::zero(n, 2);
        expected.add_term(TensorKey::plain(vec![Word::one(), Word::from_letters(&[2, 1])]), Coeff::one());
        expected.add_term(TensorKey::plain(vec![Word::from_letters(&[1, 2]), Word::one()]), Coeff::one());
        assert_eq!(d, expected);
    }

    #[test]
    fn cyclic_derivative_examples() {
        // 𝒟₁(X₁X₂X₁X₂) = 2·X₂X₁X₂
        let p = TracePoly::from(monomial(2, &[1, 2, 1, 2], Coeff::one()));
        let d = p.cyclic_derivative(1);
        assert_eq!(d, TracePoly::from(monomial(2, &[2, 1, 2], Coeff::from_int(2))));
        // 𝒟₁(X₂³) = 0
        let q = TracePoly::from(monomial(2, &[2, 2, 2], Coeff::one()));
        assert!(q.cyclic_derivative(1).is_zero());
    }

    #[test]
    fn weighted_cyclic_gradient_worked_example() {
        // 𝒟_{1,p}(X₂·tr(b·X₁X₂)·X₁) with scalars b, p equals
        // p·b·X₂·tr(X₁X₂) + b·p·X₂·tr(X₁X₂).
        let n = 2;
        let b = Coeff::from_int(3);
        let p_scalar = Coeff::from_int(5);
        let mut arg = TracePoly::zero(n);
        arg.add_term(
            TraceKey::normalized(Word::from_letters(&[2, 1]), [Word::from_letters(&[1, 2])]),
            b.clone(),
        );
        // the term is X₂·tr(bX₁X₂)·X₁ = b·(X₂X₁)·tr(X₁X₂) after scalars pull out
        let weight = TracePoly::from(NcPoly::from_term(n, Word::one(), p_scalar.clone()));
        let got = arg.cyclic_grad(1, &weight);
        let mut expected = TracePoly::zero(n);
        expected.add_term(
            TraceKey::normalized(Word::letter(2), [Word::from_letters(&[1, 2])]),
            &(&b * &p_scalar) * &Coeff::from_int(2),
        );
        assert_eq!(got, expected);
    }

    #[test]
    fn weighted_gradient_with_word_weight() {
        // flip identity on a small instance: ρ(∂₁P)#Q = 𝒟_{1,Q}(P)
        let p = TracePoly::from(monomial(3, &[1, 2, 1], Coeff::one()));
        let q = TracePoly::from(monomial(3, &[3], Coeff::one()));
        let lhs = p.fdq(1).rho().contract(&q);
        let rhs = p.cyclic_grad(1, &q);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn laplacian_examples() {
        let n = 2;
        // Δ(X₁²) = 2
        let p = TracePoly::from(monomial(n, &[1, 1], Coeff::one()));
        assert_eq!(p.laplacian(), TracePoly::from(NcPoly::from_term(n, Word::one(), Coeff::from_int(2))));
        // Δ(X₁³) = 2(2X₁ + tr(X₁))
        let p = TracePoly::from(monomial(n, &[1, 1, 1], Coeff::one()));
        let mut expected = TracePoly::zero(n);
        expected.add_term(TraceKey::plain(Word::letter(1)), Coeff::from_int(4));
        expected.add_term(TraceKey::normalized(Word::one(), [Word::letter(1)]), Coeff::from_int(2));
        assert_eq!(p.laplacian(), expected);
        // Δ(X₂) = 0
        assert!(x(n, 2).laplacian().is_zero());
    }

    #[test]
    fn delta_flat_examples() {
        let n = 1;
        // δ_Δ(X₁) = 0
        assert!(x(n, 1).delta_flat().is_zero());
        // δ_Δ(tr(X₁²)) = 2
        let t = TracePoly::trace_of_word(n, Word::from_letters(&[1, 1]));
        assert_eq!(t.delta_flat(), TracePoly::from(NcPoly::from_term(n, Word::one(), Coeff::from_int(2))));
        // δ_Δ(X₂·tr(X₁²)) = 2X₂ (with n=2)
        let mut p = TracePoly::zero(2);
        p.add_term(TraceKey::normalized(Word::letter(2), [Word::from_letters(&[1, 1])]), Coeff::one());
        assert_eq!(p.delta_flat(), TracePoly::from(monomial(2, &[2], Coeff::from_int(2))));
    }

    #[test]
    fn laplacian_v_and_delta_v_examples() {
        let n = 1;
        let v = monomial(n, &[1, 1], Coeff::ratio(1, 2)); // ½X₁²
        // Δ_V(X₁²) = 2 − 2X₁²
        let p = TracePoly::from(monomial(n, &[1, 1], Coeff::one()));
        let got = p.laplacian_v(&v);
        let expected = &TracePoly::from(NcPoly::from_term(n, Word::one(), Coeff::from_int(2)))
            - &TracePoly::from(monomial(n, &[1, 1], Coeff::from_int(2)));
        assert_eq!(got, expected);
        // δ_V(tr(X₁²)) = 2 − 2tr(X₁²)
        let t = TracePoly::trace_of_word(n, Word::from_letters(&[1, 1]));
        let got = t.delta_v(&v);
        let mut expected = TracePoly::from(NcPoly::from_term(n, Word::one(), Coeff::from_int(2)));
        expected.add_term(TraceKey::normalized(Word::one(), [Word::from_letters(&[1, 1])]), Coeff::from_int(-2));
        assert_eq!(got, expected);
        // Δ_V(1) = 0
        assert!(TracePoly::one(n).laplacian_v(&v).is_zero());
    }

    #[test]
    fn generator_examples() {
        let n = 1;
        let v = monomial(n, &[1, 1], Coeff::ratio(1, 2));
        // L(X₁²) = 1 − X₁²
        let p = TracePoly::from(monomial(n, &[1, 1], Coeff::one()));
        let got = p.generator(&v);
        let expected = &TracePoly::one(n) - &TracePoly::from(monomial(n, &[1, 1], Coeff::one()));
        assert_eq!(got, expected);
        // L(X₁) = −½X₁
        let got = x(n, 1).generator(&v);
        assert_eq!(got, TracePoly::from(monomial(n, &[1], Coeff::ratio(-1, 2))));
        // L(1) = 0
        assert!(TracePoly::one(n).generator(&v).is_zero());
    }

    #[test]
    fn directional_examples() {
        let n = 1;
        // D_H(X₁²) = HX₁ + X₁H with H the fresh letter 2
        let p = TracePoly::from(monomial(n, &[1, 1], Coeff::one()));
        let d = p.directional(&[Some(Word::letter(2))], 2);
        let expected = &TracePoly::from(monomial(2, &[2, 1], Coeff::one()))
            + &TracePoly::from(monomial(2, &[1, 2], Coeff::one()));
        assert_eq!(d, expected);
        // D_H(tr(X₁²)) = 2tr(X₁H)
        let t = TracePoly::trace_of_word(n, Word::from_letters(&[1, 1]));
        let d = t.directional(&[Some(Word::letter(2))], 2);
        let mut expected = TracePoly::zero(2);
        expected.add_term(TraceKey::normalized(Word::one(), [Word::from_letters(&[1, 2])]), Coeff::from_int(2));
        assert_eq!(d, expected);
        // direction in slot 1 only, applied to X₂: zero
        let q = TracePoly::from(monomial(2, &[2], Coeff::one()));
        let d = q.directional(&[Some(Word::letter(3)), None], 3);
        assert!(d.is_zero());
    }

    #[test]
    #[should_panic(expected = "collides")]
    fn directional_rejects_colliding_letters() {
        let p = TracePoly::from(monomial(2, &[1], Coeff::one()));
        let _ = p.directional(&[Some(Word::letter(2)), Some(Word::letter(3))], 3);
    }
}
