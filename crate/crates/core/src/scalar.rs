//! Exact coefficients for the symbolic layer: complex numbers with
//! arbitrary-precision rational real and imaginary parts.
//!
//! Identity tests demand exact equality, so everything symbolic runs on
//! rationals; numeric modules convert to `f64`/`Complex64` at evaluation
//! time.

use num::bigint::BigInt;
use num::complex::Complex64;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// Complex number with exact rational components.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Coeff {
    pub re: BigRational,
    pub im: BigRational,
}

impl Coeff {
    pub fn zero() -> Self {
        Coeff { re: BigRational::zero(), im: BigRational::zero() }
    }

    pub fn one() -> Self {
        Coeff { re: BigRational::one(), im: BigRational::zero() }
    }

    pub fn i() -> Self {
        Coeff { re: BigRational::zero(), im: BigRational::one() }
    }

    pub fn from_int(k: i64) -> Self {
        Coeff { re: BigRational::from_integer(BigInt::from(k)), im: BigRational::zero() }
    }

    /// Exact rational p/q.
    pub fn ratio(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        Coeff {
            re: BigRational::new(BigInt::from(p), BigInt::from(q)),
            im: BigRational::zero(),
        }
    }

    /// Exact conversion: every finite f64 is a dyadic rational.
    pub fn from_f64(x: f64) -> Self {
        let re = BigRational::from_float(x).expect("non-finite float coefficient");
        Coeff { re, im: BigRational::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Coeff { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().expect("rational out of f64 range"),
            self.im.to_f64().expect("rational out of f64 range"),
        )
    }

    /// Parses "3", "-1/2", "0.25", optionally with a trailing "i" part via
    /// the pair syntax handled one component at a time.
    pub fn parse_real(s: &str) -> Result<BigRational, String> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|e| format!("bad numerator {p:?}: {e}"))?;
            let q: BigInt = q.trim().parse().map_err(|e| format!("bad denominator {q:?}: {e}"))?;
            if q.is_zero() {
                return Err("zero denominator".into());
            }
            return Ok(BigRational::new(p, q));
        }
        if let Some((int, frac)) = s.split_once('.') {
            let neg = int.trim_start().starts_with('-');
            let int: BigInt = if int.is_empty() || int == "-" {
                BigInt::zero()
            } else {
                int.parse().map_err(|e| format!("bad decimal {s:?}: {e}"))?
            };
            let digits = frac.trim();
            let fnum: BigInt =
                if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|e| format!("bad decimal {s:?}: {e}"))? };
            let scale = num::pow::pow(BigInt::from(10), digits.len());
            let frac_part = BigRational::new(fnum, scale);
            let int_part = BigRational::from_integer(int);
            return Ok(if neg { int_part - frac_part } else { int_part + frac_part });
        }
        let p: BigInt = s.parse().map_err(|e| format!("bad integer {s:?}: {e}"))?;
        Ok(BigRational::from_integer(p))
    }

    /// Canonical text form: exact decimal when the denominator is 2^a·5^b,
    /// otherwise "p/q".
    pub fn format_real(r: &BigRational) -> String {
        if r.is_integer() {
            return r.numer().to_string();
        }
        let mut den = r.denom().clone();
        let mut twos = 0u32;
        let mut fives = 0u32;
        let two = BigInt::from(2);
        let five = BigInt::from(5);
        while (&den % &two).is_zero() {
            den /= &two;
            twos += 1;
        }
        while (&den % &five).is_zero() {
            den /= &five;
            fives += 1;
        }
        if den == BigInt::one() {
            let digits = twos.max(fives);
            let scale = num::pow::pow(BigInt::from(10), digits as usize);
            let scaled = r.numer() * &scale / r.denom();
            let neg = scaled.is_negative();
            let mut s = scaled.abs().to_string();
            while s.len() <= digits as usize {
                s.insert(0, '0');
            }
            s.insert(s.len() - digits as usize, '.');
            if neg {
                s.insert(0, '-');
            }
            s
        } else {
            format!("{}/{}", r.numer(), r.denom())
        }
    }
}

impl fmt::Debug for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", Coeff::format_real(&self.re))
        } else if self.re.is_zero() {
            write!(f, "{}i", Coeff::format_real(&self.im))
        } else {
            write!(f, "({}{}{}i)", Coeff::format_real(&self.re), if self.im.is_negative() { "" } else { "+" }, Coeff::format_real(&self.im))
        }
    }
}

impl Serialize for Coeff {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        if self.im.is_zero() {
            Coeff::format_real(&self.re).serialize(ser)
        } else {
            [Coeff::format_real(&self.re), Coeff::format_real(&self.im)].serialize(ser)
        }
    }
}

impl<'de> Deserialize<'de> for Coeff {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let v = serde_json::Value::deserialize(de)?;
        Coeff::from_json(&v).map_err(D::Error::custom)
    }
}

impl Coeff {
    /// Accepts a string ("1/3", "0.5"), a float (taken at its exact binary
    /// value), or a [re, im] pair of either.
    pub fn from_json(v: &serde_json::Value) -> Result<Self, String> {
        fn real(v: &serde_json::Value) -> Result<BigRational, String> {
            match v {
                serde_json::Value::String(s) => Coeff::parse_real(s),
                serde_json::Value::Number(n) => {
                    let x = n.as_f64().ok_or("non-finite number")?;
                    BigRational::from_float(x).ok_or_else(|| "non-finite number".into())
                }
                other => Err(format!("expected number or string, got {other}")),
            }
        }
        match v {
            serde_json::Value::Array(parts) => {
                if parts.len() != 2 {
                    return Err("coefficient array must be [re, im]".into());
                }
                Ok(Coeff { re: real(&parts[0])?, im: real(&parts[1])? })
            }
            other => Ok(Coeff { re: real(other)?, im: BigRational::zero() }),
        }
    }
}

impl Add for Coeff {
    type Output = Coeff;
    fn add(self, rhs: Coeff) -> Coeff {
        Coeff { re: self.re + rhs.re, im: self.im + rhs.im }
    }
}

impl AddAssign<&Coeff> for Coeff {
    fn add_assign(&mut self, rhs: &Coeff) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl Sub for Coeff {
    type Output = Coeff;
    fn sub(self, rhs: Coeff) -> Coeff {
        Coeff { re: self.re - rhs.re, im: self.im - rhs.im }
    }
}

impl Neg for Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        Coeff { re: -self.re, im: -self.im }
    }
}

impl Mul for Coeff {
    type Output = Coeff;
    fn mul(self, rhs: Coeff) -> Coeff {
        &self * &rhs
    }
}

impl Mul for &Coeff {
    type Output = Coeff;
    fn mul(self, rhs: &Coeff) -> Coeff {
        Coeff {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_conjugation() {
        let a = Coeff::ratio(1, 2);
        let b = Coeff::i();
        let c = &a * &b;
        assert_eq!(c, Coeff { re: BigRational::zero(), im: BigRational::new(1.into(), 2.into()) });
        assert_eq!(c.conj(), -c.clone());
        assert!((Coeff::one() - Coeff::one()).is_zero());
    }

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["3", "-7", "1/3", "-5/8", "0.25", "-0.125"] {
            let r = Coeff::parse_real(s).unwrap();
            let back = Coeff::parse_real(&Coeff::format_real(&r)).unwrap();
            assert_eq!(r, back, "round trip failed for {s}");
        }
        assert_eq!(Coeff::format_real(&Coeff::parse_real("-5/8").unwrap()), "-0.625");
        assert_eq!(Coeff::format_real(&Coeff::parse_real("1/3").unwrap()), "1/3");
    }

    #[test]
    fn f64_conversion_is_exact() {
        let c = Coeff::from_f64(0.1);
        assert_eq!(c.to_c64().re, 0.1);
        let c = Coeff::from_f64(1.0 / 3.0);
        assert_eq!(c.to_c64().re, 1.0 / 3.0);
    }
}
