//! Seeded random polynomial instances for the identity suite.

use super::poly::NcPoly;
use super::trace::{TraceKey, TracePoly};
use super::word::Word;
use crate::scalar::Coeff;
use rand::RngExt;
use rand_xoshiro::Xoshiro256PlusPlus;

pub type TestRng = Xoshiro256PlusPlus;

pub fn rand_word(rng: &mut TestRng, n: u8, max_deg: usize) -> Word {
    let d = rng.random_range(0..=max_deg);
    Word((0..d).map(|_| rng.random_range(1..=n)).collect())
}

fn rand_coeff(rng: &mut TestRng) -> Coeff {
    let num = loop {
        let k = rng.random_range(-3i64..=3);
        if k != 0 {
            break k;
        }
    };
    let den = rng.random_range(1i64..=3);
    Coeff::ratio(num, den)
}

pub fn rand_ncpoly(rng: &mut TestRng, n: u8, max_deg: usize, max_terms: usize) -> NcPoly {
    let t = rng.random_range(1..=max_terms);
    let mut p = NcPoly::zero(n);
    for _ in 0..t {
        p.add_term(rand_word(rng, n, max_deg), rand_coeff(rng));
    }
    p
}

/// A random self-adjoint polynomial: (P + P*) / 1 with real coefficients
/// kept by symmetrization.
pub fn rand_self_adjoint(rng: &mut TestRng, n: u8, max_deg: usize, max_terms: usize) -> NcPoly {
    let p = rand_ncpoly(rng, n, max_deg, max_terms);
    &p + &p.adjoint()
}

/// A random trace polynomial: sparse base terms, zero to two trace factors.
pub fn rand_tracepoly(rng: &mut TestRng, n: u8, max_deg: usize, max_terms: usize) -> TracePoly {
    let t = rng.random_range(1..=max_terms);
    let mut p = TracePoly::zero(n);
    for _ in 0..t {
        let base = rand_word(rng, n, max_deg);
        let n_tr = rng.random_range(0..=2usize);
        let traces = (0..n_tr)
            .map(|_| {
                let mut w = rand_word(rng, n, max_deg.min(3));
                while w.is_one() {
                    w = rand_word(rng, n, max_deg.min(3));
                }
                w
            })
            .collect::<Vec<_>>();
        p.add_term(TraceKey::normalized(base, traces), rand_coeff(rng));
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn generators_are_deterministic() {
        let mut a = TestRng::seed_from_u64(7);
        let mut b = TestRng::seed_from_u64(7);
        for _ in 0..10 {
            assert_eq!(rand_tracepoly(&mut a, 3, 4, 4), rand_tracepoly(&mut b, 3, 4, 4));
        }
    }
}
