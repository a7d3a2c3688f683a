//! Evaluation of symbolic objects on matrix tuples. A per-tuple context
//! caches word products (all prefixes), so repeated polynomial evaluations
//! against the same tuple cost one product per new prefix.

use super::mat::Mat;
use super::tuple::MatrixTuple;
use crate::ncalg::{NcPoly, TensorPoly, TracePoly, Word};
use num::complex::Complex64;
use std::collections::HashMap;

/// Normalized trace.
pub fn tau_hat(m: &Mat) -> Complex64 {
    m.trace() / m.n as f64
}

pub struct EvalCtx<'a> {
    letters: Vec<&'a Mat>,
    dim: usize,
    cache: HashMap<Word, usize>,
    arena: Vec<Mat>,
}

impl<'a> EvalCtx<'a> {
    pub fn new(tuple: &'a MatrixTuple) -> Self {
        EvalCtx {
            letters: tuple.mats.iter().map(|m| m.mat()).collect(),
            dim: tuple.dim(),
            cache: HashMap::new(),
            arena: Vec::new(),
        }
    }

    pub fn from_mats(mats: &'a [Mat]) -> Self {
        assert!(!mats.is_empty());
        let dim = mats[0].n;
        assert!(mats.iter().all(|m| m.n == dim), "dimension mismatch");
        EvalCtx { letters: mats.iter().collect(), dim, cache: HashMap::new(), arena: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn letter(&self, l: u8) -> &Mat {
        assert!(
            1 <= l && (l as usize) <= self.letters.len(),
            "letter X{l} outside tuple of {} matrices",
            self.letters.len()
        );
        self.letters[(l - 1) as usize]
    }

    /// Index of the evaluated word in the arena (degree ≥ 1).
    fn word_idx(&mut self, w: &Word) -> usize {
        debug_assert!(!w.is_one());
        if let Some(&i) = self.cache.get(w) {
            return i;
        }
        // longest cached proper prefix
        let mut start = w.0.len() - 1;
        let mut cur: Option<usize> = None;
        while start >= 1 {
            if let Some(&i) = self.cache.get(&Word(w.0[..start].to_vec())) {
                cur = Some(i);
                break;
            }
            start -= 1;
        }
        let (mut prefix_len, mut cur_mat) = match cur {
            Some(i) => (start, self.arena[i].clone()),
            None => (1, self.letter(w.0[0]).clone()),
        };
        if prefix_len == 1 && !self.cache.contains_key(&Word(w.0[..1].to_vec())) {
            self.arena.push(cur_mat.clone());
            self.cache.insert(Word(w.0[..1].to_vec()), self.arena.len() - 1);
        }
        while prefix_len < w.0.len() {
            let next = cur_mat.mul(self.letter(w.0[prefix_len]));
            prefix_len += 1;
            cur_mat = next;
            self.arena.push(cur_mat.clone());
            self.cache.insert(Word(w.0[..prefix_len].to_vec()), self.arena.len() - 1);
        }
        self.arena.len() - 1
    }

    /// Evaluated word as an owned matrix.
    pub fn word(&mut self, w: &Word) -> Mat {
        if w.is_one() {
            return Mat::eye(self.dim);
        }
        let i = self.word_idx(w);
        self.arena[i].clone()
    }

    /// Arena handle for a non-empty word; `None` for the identity word.
    pub fn word_handle(&mut self, w: &Word) -> Option<usize> {
        if w.is_one() {
            None
        } else {
            Some(self.word_idx(w))
        }
    }

    pub fn arena_mat(&self, handle: usize) -> &Mat {
        &self.arena[handle]
    }

    /// Normalized trace of a word, splitting off the last letter so the
    /// full product is never formed.
    pub fn tau_word(&mut self, w: &Word) -> Complex64 {
        match w.0.len() {
            0 => Complex64::new(1.0, 0.0),
            1 => tau_hat(self.letter(w.0[0])),
            d => {
                let i = self.word_idx(&Word(w.0[..d - 1].to_vec()));
                let tr = self.arena[i].trace_prod(self.letter(w.0[d - 1]));
                tr / self.dim as f64
            }
        }
    }

    /// Accumulates c·w(X) into `acc`.
    fn accumulate_word(&mut self, w: &Word, c: Complex64, acc: &mut Mat) {
        if w.is_one() {
            for i in 0..self.dim {
                acc.re[i * self.dim + i] += c.re;
                acc.im[i * self.dim + i] += c.im;
            }
        } else {
            let i = self.word_idx(w);
            acc.add_scaled_complex(&self.arena[i], c);
        }
    }
}

/// A trace polynomial flattened to f64 coefficients for repeated
/// evaluation along stored trajectories.
pub struct CompiledTrace {
    terms: Vec<(Word, Vec<Word>, Complex64)>,
}

impl CompiledTrace {
    pub fn compile(p: &TracePoly) -> Self {
        CompiledTrace {
            terms: p
                .terms
                .iter()
                .map(|(k, c)| (k.base.clone(), k.traces.clone(), c.to_c64()))
                .collect(),
        }
    }

    pub fn eval(&self, ctx: &mut EvalCtx) -> Mat {
        let mut acc = Mat::zeros(ctx.dim());
        for (base, traces, c0) in &self.terms {
            let mut c = *c0;
            for tw in traces {
                c *= ctx.tau_word(tw);
            }
            ctx.accumulate_word(base, c, &mut acc);
        }
        acc
    }
}

/// A plain polynomial flattened to f64 coefficients.
pub struct CompiledNc {
    terms: Vec<(Word, Complex64)>,
}

impl CompiledNc {
    pub fn compile(p: &NcPoly) -> Self {
        CompiledNc { terms: p.terms.iter().map(|(w, c)| (w.clone(), c.to_c64())).collect() }
    }

    pub fn eval(&self, ctx: &mut EvalCtx) -> Mat {
        let mut acc = Mat::zeros(ctx.dim());
        for (w, c) in &self.terms {
            ctx.accumulate_word(w, *c, &mut acc);
        }
        acc
    }
}

/// Evaluation homomorphism for plain polynomials.
pub fn eval_poly_ctx(p: &NcPoly, ctx: &mut EvalCtx) -> Mat {
    let mut acc = Mat::zeros(ctx.dim());
    for (w, c) in &p.terms {
        ctx.accumulate_word(w, c.to_c64(), &mut acc);
    }
    acc
}

pub fn eval_poly(p: &NcPoly, x: &MatrixTuple) -> Mat {
    assert_eq!(p.n, x.n_letters(), "dimension mismatch: polynomial in {} letters, tuple of {}", p.n, x.n_letters());
    eval_poly_ctx(p, &mut EvalCtx::new(x))
}

/// Trace polynomials: every trace factor becomes the scalar tau of its word.
pub fn eval_trace_poly_ctx(p: &TracePoly, ctx: &mut EvalCtx) -> Mat {
    let mut acc = Mat::zeros(ctx.dim());
    for (k, c) in &p.terms {
        let mut coeff = c.to_c64();
        for tw in &k.traces {
            coeff *= ctx.tau_word(tw);
        }
        ctx.accumulate_word(&k.base, coeff, &mut acc);
    }
    acc
}

pub fn eval_trace_poly(p: &TracePoly, x: &MatrixTuple) -> Mat {
    assert_eq!(p.n, x.n_letters(), "dimension mismatch");
    eval_trace_poly_ctx(p, &mut EvalCtx::new(x))
}

/// Scalar value of a pure-trace polynomial (empty base words assumed).
pub fn eval_scalar_trace_poly_ctx(p: &TracePoly, ctx: &mut EvalCtx) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, c) in &p.terms {
        assert!(k.base.is_one(), "not a scalar trace polynomial");
        let mut coeff = c.to_c64();
        for tw in &k.traces {
            coeff *= ctx.tau_word(tw);
        }
        acc += coeff;
    }
    acc
}

/// The #-action of a two-leg tensor: (a⊗b)#H = a(X)·H·b(X), linearly.
pub fn eval_tensor_apply_ctx(t: &TensorPoly, ctx: &mut EvalCtx, h: &Mat) -> Mat {
    assert_eq!(t.legs, 2, "#-action needs a two-leg tensor");
    assert_eq!(h.n, ctx.dim(), "dimension mismatch");
    let mut acc = Mat::zeros(ctx.dim());
    for (k, c) in &t.terms {
        let mut coeff = c.to_c64();
        for tw in &k.traces {
            coeff *= ctx.tau_word(tw);
        }
        let prod = match (k.legs[0].is_one(), k.legs[1].is_one()) {
            (true, true) => h.clone(),
            (false, true) => ctx.word(&k.legs[0]).mul(h),
            (true, false) => h.mul(&ctx.word(&k.legs[1])),
            (false, false) => ctx.word(&k.legs[0]).mul(h).mul(&ctx.word(&k.legs[1])),
        };
        acc.add_scaled_complex(&prod, coeff);
    }
    acc
}

pub fn eval_tensor_apply(t: &TensorPoly, x: &MatrixTuple, h: &Mat) -> Mat {
    assert_eq!(t.n, x.n_letters(), "dimension mismatch");
    eval_tensor_apply_ctx(t, &mut EvalCtx::new(x), h)
}
