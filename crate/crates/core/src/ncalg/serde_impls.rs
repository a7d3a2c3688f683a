//! Canonical JSON forms: words as integer arrays, coefficients as exact
//! strings (or floats taken at their binary value). Terms are emitted in
//! the canonical map order, so serialization is deterministic.

use super::poly::NcPoly;
use super::tensor::{TensorKey, TensorPoly};
use super::trace::{TraceKey, TracePoly};
use super::word::Word;
use crate::scalar::Coeff;
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Serialize, Deserialize)]
struct NcTermJson {
    w: Word,
    c: Coeff,
}

#[derive(Serialize, Deserialize)]
struct NcPolyJson {
    n: u8,
    terms: Vec<NcTermJson>,
}

impl Serialize for NcPoly {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        NcPolyJson {
            n: self.n,
            terms: self.terms.iter().map(|(w, c)| NcTermJson { w: w.clone(), c: c.clone() }).collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for NcPoly {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let j = NcPolyJson::deserialize(de)?;
        let mut p = NcPoly::zero(j.n);
        for t in j.terms {
            if t.w.max_letter() > j.n {
                return Err(D::Error::custom(format!(
                    "word {:?} uses a letter above n={}",
                    t.w.0, j.n
                )));
            }
            p.add_term(t.w, t.c);
        }
        Ok(p)
    }
}

#[derive(Serialize, Deserialize)]
struct TraceTermJson {
    #[serde(default)]
    b: Word,
    #[serde(default)]
    tr: Vec<Word>,
    c: Coeff,
}

#[derive(Serialize, Deserialize)]
struct TracePolyJson {
    n: u8,
    terms: Vec<TraceTermJson>,
}

impl Serialize for TracePoly {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        TracePolyJson {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| TraceTermJson { b: k.base.clone(), tr: k.traces.clone(), c: c.clone() })
                .collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for TracePoly {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let j = TracePolyJson::deserialize(de)?;
        let mut p = TracePoly::zero(j.n);
        for t in j.terms {
            let max = t.b.max_letter().max(t.tr.iter().map(Word::max_letter).max().unwrap_or(0));
            if max > j.n {
                return Err(D::Error::custom(format!("term uses a letter above n={}", j.n)));
            }
            p.add_term(TraceKey::normalized(t.b, t.tr), t.c);
        }
        Ok(p)
    }
}

#[derive(Serialize, Deserialize)]
struct TensorTermJson {
    legs: Vec<Word>,
    #[serde(default)]
    tr: Vec<Word>,
    c: Coeff,
}

#[derive(Serialize, Deserialize)]
struct TensorPolyJson {
    n: u8,
    legs: usize,
    terms: Vec<TensorTermJson>,
}

impl Serialize for TensorPoly {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        TensorPolyJson {
            n: self.n,
            legs: self.legs,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| TensorTermJson { legs: k.legs.clone(), tr: k.traces.clone(), c: c.clone() })
                .collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for TensorPoly {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let j = TensorPolyJson::deserialize(de)?;
        let mut p = TensorPoly::zero(j.n, j.legs);
        for t in j.terms {
            if t.legs.len() != j.legs {
                return Err(D::Error::custom("term leg count differs from header"));
            }
            let max = t
                .legs
                .iter()
                .chain(t.tr.iter())
                .map(Word::max_letter)
                .max()
                .unwrap_or(0);
            if max > j.n {
                return Err(D::Error::custom(format!("term uses a letter above n={}", j.n)));
            }
            let mut traces: Vec<Word> =
                t.tr.into_iter().filter(|w| !w.is_one()).map(|w| w.cyclic_min()).collect();
            traces.sort();
            p.add_term(TensorKey { legs: t.legs, traces }, t.c);
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncalg::poly::monomial;

    #[test]
    fn ncpoly_json_round_trip() {
        let p = &monomial(2, &[1, 2], Coeff::ratio(1, 3)) + &monomial(2, &[2], Coeff::from_int(-2));
        let s = serde_json::to_string(&p).unwrap();
        let q: NcPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn trace_poly_loader_normalizes() {
        let raw = r#"{"n":2,"terms":[{"b":[1],"tr":[[2,1],[]],"c":"1"}]}"#;
        let p: TracePoly = serde_json::from_str(raw).unwrap();
        let mut expected = TracePoly::zero(2);
        expected.add_term(
            TraceKey::normalized(Word::letter(1), [Word::from_letters(&[1, 2])]),
            Coeff::one(),
        );
        assert_eq!(p, expected);
    }

    #[test]
    fn rejects_letter_above_n() {
        let raw = r#"{"n":1,"terms":[{"w":[2],"c":"1"}]}"#;
        assert!(serde_json::from_str::<NcPoly>(raw).is_err());
    }
}
