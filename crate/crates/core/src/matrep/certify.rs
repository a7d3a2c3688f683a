//! Symbolic convexity certificates for the structured quartic family, and
//! the 2×2 pair showing that the older two-point convexity notion fails
//! for V(X) = X⁴ while the Hessian-form notion does not.

use super::eig::hermitian_eigenvalues;
use super::mat::Mat;
use crate::ncalg::PotentialSpec;

#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum Convexity {
    Certified { c: f64 },
    Rejected { reason: String },
}

impl Convexity {
    pub fn certified(&self) -> Option<f64> {
        match self {
            Convexity::Certified { c } => Some(*c),
            Convexity::Rejected { .. } => None,
        }
    }
}

/// Certifies a structured quartic potential: every column must satisfy
/// ν₄ > 0 and ν₃² ≤ 8ν₂ν₄/3 (non-strict), and the quadratic part must be
/// positive semidefinite. The certified constant is the exact Hessian
/// lower bound of the quadratic part, 2·λ_min(A); the quartic columns add
/// a non-negative contribution (convexity constants form a cone).
pub fn certify_convexity(spec: &PotentialSpec) -> Convexity {
    match spec {
        PotentialSpec::Generic { .. } => Convexity::Rejected {
            reason: "no symbolic certificate for generic potentials; check hessian_min_eig numerically".into(),
        },
        PotentialSpec::Quartic { a, lambda: _, mu, nu, .. } => {
            if let Err(e) = spec.validate() {
                return Convexity::Rejected { reason: e };
            }
            for (j, &m) in mu.iter().enumerate() {
                if m == 0.0 {
                    continue;
                }
                let [n2, n3, n4] = nu[j];
                if n4 <= 0.0 {
                    return Convexity::Rejected {
                        reason: format!("column {j}: quartic coefficient must be positive (got {n4})"),
                    };
                }
                if n3 * n3 > 8.0 * n2 * n4 / 3.0 {
                    return Convexity::Rejected {
                        reason: format!(
                            "column {j}: cubic term too large: v3^2 = {} > 8*v2*v4/3 = {}",
                            n3 * n3,
                            8.0 * n2 * n4 / 3.0
                        ),
                    };
                }
            }
            let n = a.len();
            let mut am = Mat::zeros(n);
            for i in 0..n {
                for j in 0..n {
                    am.re[i * n + j] = 0.5 * (a[i][j] + a[j][i]);
                }
            }
            let lmin = hermitian_eigenvalues(&am)[0];
            if lmin < 0.0 {
                return Convexity::Rejected {
                    reason: format!("quadratic part has a negative direction: lambda_min(A) = {lmin}"),
                };
            }
            Convexity::Certified { c: 2.0 * lmin }
        }
    }
}

/// The paper's 2×2 pair for V(X) = X⁴: builds
/// S = (4X³−4Y³)(X−Y) + (X−Y)(4X³−4Y³) and returns it with its minimum
/// eigenvalue, which is strictly negative.
pub fn old_convexity_counterexample() -> (Mat, f64) {
    let s11 = 11.0f64.sqrt() / 4.0;
    let x = Mat::from_rows(&[
        vec![(1.0).into(), (0.0).into()],
        vec![(0.0).into(), (-6.0).into()],
    ]);
    let y = Mat::from_rows(&[
        vec![(1.0).into(), s11.into()],
        vec![s11.into(), (-5.0).into()],
    ]);
    let x3 = x.mul(&x).mul(&x);
    let y3 = y.mul(&y).mul(&y);
    let mut grad_diff = x3.clone();
    grad_diff.add_scaled(&y3, -1.0);
    grad_diff.scale(4.0);
    let mut diff = x.clone();
    diff.add_scaled(&y, -1.0);
    let mut s = grad_diff.mul(&diff);
    let ba = diff.mul(&grad_diff);
    s.add_scaled(&ba, 1.0);
    s.hermitize();
    let min_eig = hermitian_eigenvalues(&s)[0];
    assert!(min_eig < 0.0, "counterexample form must have a negative eigenvalue");
    (s, min_eig)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_quartic_certifies_at_zero() {
        let spec = PotentialSpec::Quartic {
            a: vec![vec![0.0]],
            lambda: vec![vec![1.0]],
            mu: vec![1.0],
            nu: vec![[0.0, 0.0, 1.0]],
            c_claim: None,
        };
        assert_eq!(certify_convexity(&spec), Convexity::Certified { c: 0.0 });
    }

    #[test]
    fn boundary_cubic_is_accepted() {
        // v3² = 8 v2 v4 / 3 exactly: v2 = 3, v4 = 2, v3 = 4
        let spec = PotentialSpec::Quartic {
            a: vec![vec![0.0]],
            lambda: vec![vec![1.0]],
            mu: vec![1.0],
            nu: vec![[3.0, 4.0, 2.0]],
            c_claim: None,
        };
        assert!(matches!(certify_convexity(&spec), Convexity::Certified { .. }));
    }

    #[test]
    fn over_boundary_cubic_is_rejected() {
        // (v2, v3, v4) = (1, 2, 1): v3² = 4 > 8/3
        let spec = PotentialSpec::Quartic {
            a: vec![vec![0.0]],
            lambda: vec![vec![1.0]],
            mu: vec![1.0],
            nu: vec![[1.0, 2.0, 1.0]],
            c_claim: None,
        };
        assert!(matches!(certify_convexity(&spec), Convexity::Rejected { .. }));
    }

    #[test]
    fn quadratic_plus_quartic_certifies_tightly() {
        let spec = PotentialSpec::quadratic_plus_quartic(1.0, 1.0);
        assert_eq!(certify_convexity(&spec), Convexity::Certified { c: 1.0 });
    }

    #[test]
    fn counterexample_matrix_shape() {
        let (s, min_eig) = old_convexity_counterexample();
        assert_eq!(s.n, 2);
        assert!(s.herm_defect() < 1e-12);
        assert!(min_eig < 0.0);
    }
}
