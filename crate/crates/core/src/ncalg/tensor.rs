//! Tensor-leg polynomials: linear combinations of word tuples a₁⊗…⊗a_k,
//! each term optionally carrying scalar trace factors inherited from the
//! trace-polynomial layer.

use super::trace::{TraceKey, TracePoly};
use super::word::Word;
use super::MAX_DEGREE;
use crate::scalar::Coeff;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TensorKey {
    pub legs: Vec<Word>,
    /// Sorted multiset of cyclic-minimal trace words.
    pub traces: Vec<Word>,
}

impl TensorKey {
    pub fn plain(legs: Vec<Word>) -> Self {
        TensorKey { legs, traces: Vec::new() }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct TensorPoly {
    pub n: u8,
    pub legs: usize,
    pub terms: BTreeMap<TensorKey, Coeff>,
}

impl TensorPoly {
    pub fn zero(n: u8, legs: usize) -> Self {
        assert!(legs >= 2, "tensor polynomials have at least two legs");
        TensorPoly { n, legs, terms: BTreeMap::new() }
    }

    pub fn from_term(n: u8, key: TensorKey, c: Coeff) -> Self {
        let legs = key.legs.len();
        let mut t = TensorPoly::zero(n, legs);
        t.add_term(key, c);
        t
    }

    /// 1⊗1 with two legs.
    pub fn unit(n: u8) -> Self {
        TensorPoly::from_term(n, TensorKey::plain(vec![Word::one(), Word::one()]), Coeff::one())
    }

    pub fn add_term(&mut self, key: TensorKey, c: Coeff) {
        assert_eq!(key.legs.len(), self.legs, "leg count mismatch");
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

    pub fn scale(&self, c: &Coeff) -> TensorPoly {
        if c.is_zero() {
            return TensorPoly::zero(self.n, self.legs);
        }
        TensorPoly {
            n: self.n,
            legs: self.legs,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }

    /// Cyclic rotation of legs: b₀⊗…⊗b_p ↦ b_p⊗b₀⊗…⊗b_{p−1}.
    pub fn rho(&self) -> TensorPoly {
        let mut out = TensorPoly::zero(self.n, self.legs);
        for (k, c) in &self.terms {
            let mut legs = Vec::with_capacity(self.legs);
            legs.push(k.legs[self.legs - 1].clone());
            legs.extend_from_slice(&k.legs[..self.legs - 1]);
            out.add_term(TensorKey { legs, traces: k.traces.clone() }, c.clone());
        }
        out
    }

    /// Leg-reversing adjoint: (a₁⊗…⊗a_k)* = a_k*⊗…⊗a₁*.
    pub fn adjoint(&self) -> TensorPoly {
        let mut out = TensorPoly::zero(self.n, self.legs);
        for (k, c) in &self.terms {
            let legs: Vec<Word> = k.legs.iter().rev().map(Word::reversed).collect();
            let mut traces: Vec<Word> = k.traces.iter().map(|w| w.reversed().cyclic_min()).collect();
            traces.sort();
            out.add_term(TensorKey { legs, traces }, c.conj());
        }
        out
    }

    /// The # contraction of a two-leg tensor: (a⊗b)#h = a·h·b, extended
    /// bilinearly. Trace factors of both operands merge.
    pub fn contract(&self, h: &TracePoly) -> TracePoly {
        assert_eq!(self.legs, 2, "# contraction needs exactly two legs");
        assert_eq!(self.n, h.n, "letter count mismatch");
        let mut out = TracePoly::zero(self.n);
        for (k, c) in &self.terms {
            for (hk, hc) in &h.terms {
                let base = k.legs[0].concat(&hk.base).concat(&k.legs[1]);
                assert!(base.degree() <= MAX_DEGREE, "degree budget exceeded");
                let mut traces = k.traces.clone();
                traces.extend(hk.traces.iter().cloned());
                traces.sort();
                out.add_term(TraceKey { base, traces }, c * hc);
            }
        }
        out
    }

    /// Inserts `v` at leg `i` (1-based): a₁⊗…⊗aᵢv₁⊗v₂⊗…⊗v_m·a_{i+1}⊗…⊗a_k.
    pub fn splice_at(&self, i: usize, v: &TensorPoly) -> TensorPoly {
        assert!(1 <= i && i < self.legs, "leg index {i} out of range 1..{}", self.legs);
        assert_eq!(self.n, v.n, "letter count mismatch");
        let out_legs = self.legs + v.legs - 2;
        let mut out = TensorPoly::zero(self.n, out_legs);
        for (k, c) in &self.terms {
            for (vk, vc) in &v.terms {
                let mut legs = Vec::with_capacity(out_legs);
                legs.extend_from_slice(&k.legs[..i - 1]);
                if v.legs == 1 {
                    legs.push(k.legs[i - 1].concat(&vk.legs[0]).concat(&k.legs[i]));
                } else {
                    legs.push(k.legs[i - 1].concat(&vk.legs[0]));
                    legs.extend_from_slice(&vk.legs[1..v.legs - 1]);
                    legs.push(vk.legs[v.legs - 1].concat(&k.legs[i]));
                }
                legs.extend_from_slice(&k.legs[i + 1..]);
                assert!(legs.iter().map(Word::degree).max().unwrap_or(0) <= MAX_DEGREE, "degree budget exceeded");
                let mut traces = k.traces.clone();
                traces.extend(vk.traces.iter().cloned());
                traces.sort();
                out.add_term(TensorKey { legs, traces }, c * vc);
            }
        }
        out
    }

    /// Multi-insertion U#(V₁,…,V_m) for U with m+1 legs: each gap between
    /// consecutive legs of U receives one Vⱼ.
    pub fn splice_all(&self, vs: &[TensorPoly]) -> TensorPoly {
        assert_eq!(vs.len() + 1, self.legs, "need one insert per gap");
        let mut acc = self.clone();
        for (j, v) in vs.iter().enumerate().rev() {
            acc = acc.splice_at(j + 1, v);
        }
        acc
    }

    /// Free difference quotient applied to the first leg; grows the leg
    /// count by one. This is the building block of the iterated quotient.
    pub fn fdq_leg1(&self, i: u8) -> TensorPoly {
        assert!(1 <= i && i <= self.n);
        let mut out = TensorPoly::zero(self.n, self.legs + 1);
        for (k, c) in &self.terms {
            for (a, b) in k.legs[0].occurrences(i) {
                let mut legs = Vec::with_capacity(self.legs + 1);
                legs.push(a);
                legs.push(b);
                legs.extend_from_slice(&k.legs[1..]);
                out.add_term(TensorKey { legs, traces: k.traces.clone() }, c.clone());
            }
        }
        out
    }

    /// Composes every leg (and trace word) with the substitution X ↦ Q.
    pub fn compose(&self, args: &[super::poly::NcPoly]) -> TensorPoly {
        assert_eq!(args.len(), self.n as usize);
        let m = args.first().map(|q| q.n).unwrap_or(0);
        let mut out = TensorPoly::zero(m, self.legs);
        for (k, c) in &self.terms {
            // expand each leg as a plain polynomial in the new letters
            let mut partial: Vec<(Vec<Word>, Coeff)> = vec![(Vec::new(), c.clone())];
            for leg in &k.legs {
                let leg_poly = super::poly::NcPoly::from_term(self.n, leg.clone(), Coeff::one()).compose(args);
                let mut next = Vec::new();
                for (legs_acc, c_acc) in &partial {
                    for (w, wc) in &leg_poly.terms {
                        let mut legs = legs_acc.clone();
                        legs.push(w.clone());
                        next.push((legs, c_acc * wc));
                    }
                }
                partial = next;
            }
            let mut trace_partial: Vec<(Vec<Word>, Coeff)> = vec![(Vec::new(), Coeff::one())];
            for tw in &k.traces {
                let tw_poly = super::poly::NcPoly::from_term(self.n, tw.clone(), Coeff::one()).compose(args);
                let mut next = Vec::new();
                for (tr_acc, c_acc) in &trace_partial {
                    for (w, wc) in &tw_poly.terms {
                        let mut tr = tr_acc.clone();
                        if !w.is_one() {
                            tr.push(w.cyclic_min());
                        }
                        next.push((tr, c_acc * wc));
                    }
                }
                trace_partial = next;
            }
            for (legs, lc) in &partial {
                for (tr, tc) in &trace_partial {
                    let mut traces = tr.clone();
                    traces.sort();
                    out.add_term(TensorKey { legs: legs.clone(), traces }, lc * tc);
                }
            }
        }
        out
    }

    pub fn max_degree(&self) -> usize {
        self.terms
            .keys()
            .map(|k| k.legs.iter().map(Word::degree).max().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }
}

impl Add for &TensorPoly {
    type Output = TensorPoly;
    fn add(self, rhs: &TensorPoly) -> TensorPoly {
        assert_eq!(self.n, rhs.n);
        assert_eq!(self.legs, rhs.legs);
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }
}

impl Sub for &TensorPoly {
    type Output = TensorPoly;
    fn sub(self, rhs: &TensorPoly) -> TensorPoly {
        self + &(-rhs)
    }
}

impl Neg for &TensorPoly {
    type Output = TensorPoly;
    fn neg(self) -> TensorPoly {
        TensorPoly {
            n: self.n,
            legs: self.legs,
            terms: self.terms.iter().map(|(k, c)| (k.clone(), -c.clone())).collect(),
        }
    }
}

/// Leg-wise product in the tensor algebra: (a⊗b)·(c⊗d) = ac⊗bd.
impl Mul for &TensorPoly {
    type Output = TensorPoly;
    fn mul(self, rhs: &TensorPoly) -> TensorPoly {
        assert_eq!(self.n, rhs.n);
        assert_eq!(self.legs, rhs.legs);
        let mut out = TensorPoly::zero(self.n, self.legs);
        for (k1, c1) in &self.terms {
            for (k2, c2) in &rhs.terms {
                let legs: Vec<Word> =
                    k1.legs.iter().zip(&k2.legs).map(|(a, b)| a.concat(b)).collect();
                assert!(legs.iter().map(Word::degree).max().unwrap_or(0) <= MAX_DEGREE, "degree budget exceeded");
                let mut traces = k1.traces.clone();
                traces.extend(k2.traces.iter().cloned());
                traces.sort();
                out.add_term(TensorKey { legs, traces }, c1 * c2);
            }
        }
        out
    }
}

impl fmt::Debug for TensorPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for TensorPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (k, c)) in self.terms.iter().enumerate() {
            if idx > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}·")?;
            for (j, leg) in k.legs.iter().enumerate() {
                if j > 0 {
                    write!(f, "⊗")?;
                }
                write!(f, "{leg}")?;
            }
            for t in &k.traces {
                write!(f, "·tr({t})")?;
            }
        }
        Ok(())
    }
}
