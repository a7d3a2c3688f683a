//! Plain non-commutative polynomials: finite linear combinations of words
//! with exact coefficients.

use super::word::Word;
use super::MAX_DEGREE;
use crate::scalar::Coeff;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, PartialEq, Eq)]
pub struct NcPoly {
    /// Letter count; words only use letters 1..=n.
    pub n: u8,
    pub terms: BTreeMap<Word, Coeff>,
}

impl NcPoly {
    pub fn zero(n: u8) -> Self {
        NcPoly { n, terms: BTreeMap::new() }
    }

    pub fn one(n: u8) -> Self {
        NcPoly::from_term(n, Word::one(), Coeff::one())
    }

    pub fn letter(n: u8, i: u8) -> Self {
        assert!(1 <= i && i <= n, "letter X{i} outside 1..={n}");
        NcPoly::from_term(n, Word::letter(i), Coeff::one())
    }

    pub fn from_term(n: u8, w: Word, c: Coeff) -> Self {
        assert!(w.max_letter() <= n, "word uses letter above n={n}");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(w, c);
        }
        NcPoly { n, terms }
    }

    pub fn from_terms(n: u8, items: impl IntoIterator<Item = (Word, Coeff)>) -> Self {
        let mut p = NcPoly::zero(n);
        for (w, c) in items {
            p.add_term(w, c);
        }
        p
    }

    pub fn add_term(&mut self, w: Word, c: Coeff) {
        assert!(w.max_letter() <= self.n, "word uses letter above n={}", self.n);
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(w) {
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

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Word::degree).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &Coeff) -> NcPoly {
        if c.is_zero() {
            return NcPoly::zero(self.n);
        }
        NcPoly {
            n: self.n,
            terms: self.terms.iter().map(|(w, v)| (w.clone(), v * c)).collect(),
        }
    }

    /// (z X_{i1}…X_{ik})* = z̄ X_{ik}…X_{i1}
    pub fn adjoint(&self) -> NcPoly {
        NcPoly {
            n: self.n,
            terms: self.terms.iter().map(|(w, c)| (w.reversed(), c.conj())).collect(),
        }
    }

    pub fn is_self_adjoint(&self) -> bool {
        *self == self.adjoint()
    }

    /// Substitution homomorphism P(Q₁,…,Q_n). All Qᵢ must share a letter
    /// count, which becomes the letter count of the result.
    pub fn compose(&self, args: &[NcPoly]) -> NcPoly {
        assert_eq!(args.len(), self.n as usize, "compose needs one argument per letter");
        let m = args.first().map(|q| q.n).unwrap_or(0);
        assert!(args.iter().all(|q| q.n == m), "composition arguments disagree on letter count");
        let mut out = NcPoly::zero(m);
        for (w, c) in &self.terms {
            let mut acc = NcPoly::from_term(m, Word::one(), c.clone());
            for &l in &w.0 {
                acc = &acc * &args[(l - 1) as usize];
            }
            for (w2, c2) in acc.terms {
                out.add_term(w2, c2);
            }
        }
        out
    }

    /// Extends the alphabet without touching any term.
    pub fn widen(&self, n: u8) -> NcPoly {
        assert!(n >= self.n);
        NcPoly { n, terms: self.terms.clone() }
    }

    pub fn max_abs_f64(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.to_c64().norm())
            .fold(0.0, f64::max)
    }
}

impl Add for &NcPoly {
    type Output = NcPoly;
    fn add(self, rhs: &NcPoly) -> NcPoly {
        assert_eq!(self.n, rhs.n, "letter count mismatch");
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }
}

impl Sub for &NcPoly {
    type Output = NcPoly;
    fn sub(self, rhs: &NcPoly) -> NcPoly {
        self + &(-rhs)
    }
}

impl Neg for &NcPoly {
    type Output = NcPoly;
    fn neg(self) -> NcPoly {
        NcPoly {
            n: self.n,
            terms: self.terms.iter().map(|(w, c)| (w.clone(), -c.clone())).collect(),
        }
    }
}

impl Mul for &NcPoly {
    type Output = NcPoly;
    fn mul(self, rhs: &NcPoly) -> NcPoly {
        assert_eq!(self.n, rhs.n, "letter count mismatch");
        let mut out = NcPoly::zero(self.n);
        for (w1, c1) in &self.terms {
            for (w2, c2) in &rhs.terms {
                let w = w1.concat(w2);
                assert!(
                    w.degree() <= MAX_DEGREE,
                    "degree budget exceeded: {} > {MAX_DEGREE}",
                    w.degree()
                );
                out.add_term(w, c1 * c2);
            }
        }
        out
    }
}

impl fmt::Debug for NcPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for NcPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (w, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if w.is_one() {
                write!(f, "{c}")?;
            } else if c == &Coeff::one() {
                write!(f, "{w}")?;
            } else {
                write!(f, "{c}·{w}")?;
            }
        }
        Ok(())
    }
}

/// Builds c·X_{i1}…X_{ik} conveniently in tests and fixtures.
pub fn monomial(n: u8, letters: &[u8], c: Coeff) -> NcPoly {
    NcPoly::from_term(n, Word::from_letters(letters), c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_of_binomials() {
        let n = 1;
        let x = NcPoly::letter(n, 1);
        let one = NcPoly::one(n);
        let p = &(&x + &one) * &(&x - &one);
        let expected = &(&x * &x) - &one;
        assert_eq!(p, expected);
    }

    #[test]
    fn simple_word_product() {
        let p = NcPoly::letter(2, 1);
        let q = NcPoly::letter(2, 2);
        let pq = &p * &q;
        assert_eq!(pq, monomial(2, &[1, 2], Coeff::one()));
    }

    #[test]
    fn adjoint_reverses_and_conjugates() {
        let p = monomial(2, &[1, 2], Coeff::from_int(2));
        assert_eq!(p.adjoint(), monomial(2, &[2, 1], Coeff::from_int(2)));
        let q = monomial(1, &[1], Coeff::i());
        assert_eq!(q.adjoint(), monomial(1, &[1], -Coeff::i()));
        assert_eq!(q.adjoint().adjoint(), q);
    }

    #[test]
    fn compose_expands_substitution() {
        let p = monomial(1, &[1, 1], Coeff::one()); // X₁²
        let arg = &NcPoly::letter(2, 1) + &NcPoly::letter(2, 2);
        let out = p.compose(&[arg]);
        let mut expected = NcPoly::zero(2);
        for w in [[1u8, 1], [1, 2], [2, 1], [2, 2]] {
            expected.add_term(Word::from_letters(&w), Coeff::one());
        }
        assert_eq!(out, expected);
    }

    #[test]
    fn compose_identity_substitution() {
        let p = &monomial(2, &[1, 2, 1], Coeff::ratio(3, 7)) + &NcPoly::one(2);
        let args = [NcPoly::letter(2, 1), NcPoly::letter(2, 2)];
        assert_eq!(p.compose(&args), p);
    }

    #[test]
    #[should_panic(expected = "degree budget")]
    fn degree_budget_enforced() {
        let x = NcPoly::letter(1, 1);
        let mut p = x.clone();
        for _ in 0..20 {
            p = &p * &x;
        }
    }
}
