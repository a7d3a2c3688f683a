//! Potential specifications: a generic self-adjoint polynomial, or the
//! structured quartic family
//!   V(X) = Σⱼ μⱼ·υⱼ(Σᵢ λᵢⱼXᵢ) + Σᵢⱼ AᵢⱼXᵢXⱼ,
//!   υⱼ(y) = ν_{j,2}·y²/2 + ν_{j,3}·y³/3 + ν_{j,4}·y⁴/4,
//! which admits a symbolic convexity certificate.

use super::poly::NcPoly;
use crate::scalar::Coeff;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PotentialSpec {
    Generic {
        poly: NcPoly,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c_claim: Option<f64>,
    },
    Quartic {
        /// Symmetric n×n real matrix of the quadratic part Σ AᵢⱼXᵢXⱼ.
        a: Vec<Vec<f64>>,
        /// n×k directions, one column per quartic summand.
        lambda: Vec<Vec<f64>>,
        /// k non-negative weights.
        mu: Vec<f64>,
        /// k rows (ν₂, ν₃, ν₄).
        nu: Vec<[f64; 3]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c_claim: Option<f64>,
    },
}

impl PotentialSpec {
    pub fn generic(poly: NcPoly) -> Self {
        PotentialSpec::Generic { poly, c_claim: None }
    }

    /// The single-letter potential ½·quad·x² + (quart/4)·x⁴ used throughout
    /// the quartic test battery (quart = 0 gives a pure quadratic).
    pub fn quadratic_plus_quartic(quad: f64, quart: f64) -> Self {
        PotentialSpec::Quartic {
            a: vec![vec![quad / 2.0]],
            lambda: vec![vec![1.0]],
            mu: vec![if quart == 0.0 { 0.0 } else { 1.0 }],
            nu: vec![[0.0, 0.0, quart]],
            c_claim: None,
        }
    }

    pub fn n(&self) -> u8 {
        match self {
            PotentialSpec::Generic { poly, .. } => poly.n,
            PotentialSpec::Quartic { a, .. } => a.len() as u8,
        }
    }

    pub fn c_claim(&self) -> Option<f64> {
        match self {
            PotentialSpec::Generic { c_claim, .. } | PotentialSpec::Quartic { c_claim, .. } => *c_claim,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        match self {
            PotentialSpec::Generic { poly, .. } => {
                if !poly.is_self_adjoint() {
                    return Err("generic potential is not self-adjoint".into());
                }
                Ok(())
            }
            PotentialSpec::Quartic { a, lambda, mu, nu, .. } => {
                let n = a.len();
                if n == 0 || a.iter().any(|row| row.len() != n) {
                    return Err("A must be square and non-empty".into());
                }
                for i in 0..n {
                    for j in 0..n {
                        if (a[i][j] - a[j][i]).abs() > 1e-14 * (1.0 + a[i][j].abs()) {
                            return Err("A must be symmetric".into());
                        }
                    }
                }
                let k = mu.len();
                if lambda.len() != n || lambda.iter().any(|row| row.len() != k) || nu.len() != k {
                    return Err("lambda must be n×k, nu must have k rows".into());
                }
                if mu.iter().any(|&m| m < 0.0) {
                    return Err("mu must be non-negative".into());
                }
                Ok(())
            }
        }
    }

    /// Expands to the plain polynomial (exact in the binary values of the
    /// given floats). The structured form always expands self-adjoint.
    pub fn expand(&self) -> NcPoly {
        match self {
            PotentialSpec::Generic { poly, .. } => poly.clone(),
            PotentialSpec::Quartic { a, lambda, mu, nu, .. } => {
                let n = a.len() as u8;
                let mut v = NcPoly::zero(n);
                for i in 0..a.len() {
                    for j in 0..a.len() {
                        if a[i][j] != 0.0 {
                            let term = &NcPoly::letter(n, (i + 1) as u8) * &NcPoly::letter(n, (j + 1) as u8);
                            v = &v + &term.scale(&Coeff::from_f64(a[i][j]));
                        }
                    }
                }
                for (j, &m) in mu.iter().enumerate() {
                    if m == 0.0 {
                        continue;
                    }
                    let mut y = NcPoly::zero(n);
                    for i in 0..a.len() {
                        let l = lambda[i][j];
                        if l != 0.0 {
                            y = &y + &NcPoly::letter(n, (i + 1) as u8).scale(&Coeff::from_f64(l));
                        }
                    }
                    let y2 = &y * &y;
                    let y3 = &y2 * &y;
                    let y4 = &y3 * &y;
                    let mu_c = Coeff::from_f64(m);
                    for (pow, num, den) in [(&y2, nu[j][0], 2i64), (&y3, nu[j][1], 3), (&y4, nu[j][2], 4)] {
                        if num != 0.0 {
                            let c = &(&mu_c * &Coeff::from_f64(num)) * &Coeff::ratio(1, den);
                            v = &v + &pow.scale(&c);
                        }
                    }
                }
                v
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncalg::poly::monomial;

    #[test]
    fn quartic_expansion_is_self_adjoint() {
        let spec = PotentialSpec::Quartic {
            a: vec![vec![0.5, 0.1], vec![0.1, 0.7]],
            lambda: vec![vec![1.0, 0.5], vec![-0.25, 1.0]],
            mu: vec![1.0, 2.0],
            nu: vec![[1.0, 0.5, 1.0], [0.0, 0.0, 0.25]],
            c_claim: None,
        };
        spec.validate().unwrap();
        let v = spec.expand();
        assert!(v.is_self_adjoint());
        assert_eq!(v.degree(), 4);
    }

    #[test]
    fn half_square_plus_quarter_quartic() {
        let spec = PotentialSpec::quadratic_plus_quartic(1.0, 1.0);
        spec.validate().unwrap();
        let v = spec.expand();
        let expected = &monomial(1, &[1, 1], Coeff::ratio(1, 2))
            + &monomial(1, &[1, 1, 1, 1], Coeff::ratio(1, 4));
        assert_eq!(v, expected);
    }
}
