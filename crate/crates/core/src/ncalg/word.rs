//! Monomials in the non-commuting letters X₁…X_n.

use serde::{Deserialize, Serialize};
use std::fmt;

/// A word in letters 1..=n. The empty word is the identity monomial.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(pub Vec<u8>);

impl Word {
    pub fn one() -> Self {
        Word(Vec::new())
    }

    pub fn letter(i: u8) -> Self {
        assert!(i >= 1, "letters are 1-based");
        Word(vec![i])
    }

    pub fn from_letters(letters: &[u8]) -> Self {
        assert!(letters.iter().all(|&l| l >= 1), "letters are 1-based");
        Word(letters.to_vec())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_letter(&self) -> u8 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn reversed(&self) -> Word {
        let mut v = self.0.clone();
        v.reverse();
        Word(v)
    }

    /// Lexicographically least cyclic rotation; the canonical representative
    /// of a word under the trace.
    pub fn cyclic_min(&self) -> Word {
        let n = self.0.len();
        if n <= 1 {
            return self.clone();
        }
        let mut best = 0usize;
        for start in 1..n {
            for k in 0..n {
                let a = self.0[(start + k) % n];
                let b = self.0[(best + k) % n];
                if a < b {
                    best = start;
                    break;
                }
                if a > b {
                    break;
                }
            }
        }
        let mut v = Vec::with_capacity(n);
        v.extend_from_slice(&self.0[best..]);
        v.extend_from_slice(&self.0[..best]);
        Word(v)
    }

    /// All splittings w = a·Xᵢ·b at occurrences of letter `i`.
    pub fn occurrences(&self, i: u8) -> impl Iterator<Item = (Word, Word)> + '_ {
        self.0.iter().enumerate().filter_map(move |(p, &l)| {
            (l == i).then(|| (Word(self.0[..p].to_vec()), Word(self.0[p + 1..].to_vec())))
        })
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        let mut run: Option<(u8, usize)> = None;
        let emit = |f: &mut fmt::Formatter<'_>, l: u8, c: usize, first: &mut bool| -> fmt::Result {
            if !*first {
                write!(f, " ")?;
            }
            *first = false;
            if c == 1 {
                write!(f, "X{l}")
            } else {
                write!(f, "X{l}^{c}")
            }
        };
        for &l in &self.0 {
            match run {
                Some((r, c)) if r == l => run = Some((r, c + 1)),
                Some((r, c)) => {
                    emit(f, r, c, &mut first)?;
                    run = Some((l, 1));
                }
                None => run = Some((l, 1)),
            }
        }
        if let Some((r, c)) = run {
            emit(f, r, c, &mut first)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_min_picks_least_rotation() {
        assert_eq!(Word::from_letters(&[2, 1]).cyclic_min(), Word::from_letters(&[1, 2]));
        assert_eq!(Word::from_letters(&[3, 1, 2]).cyclic_min(), Word::from_letters(&[1, 2, 3]));
        assert_eq!(Word::from_letters(&[2, 1, 2, 1]).cyclic_min(), Word::from_letters(&[1, 2, 1, 2]));
        assert_eq!(Word::one().cyclic_min(), Word::one());
    }

    #[test]
    fn occurrence_splitting() {
        let w = Word::from_letters(&[1, 2, 1]);
        let occ: Vec<_> = w.occurrences(1).collect();
        assert_eq!(occ.len(), 2);
        assert_eq!(occ[0], (Word::one(), Word::from_letters(&[2, 1])));
        assert_eq!(occ[1], (Word::from_letters(&[1, 2]), Word::one()));
    }
}
