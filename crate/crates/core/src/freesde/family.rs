//! The interpolation family V_α = V + αW with convexity bookkeeping.

use super::SdeError;
use crate::matrep::{certify_convexity, hessian_min_eig, Convexity, HermMatrix, MatrixTuple};
use crate::ncalg::{NcPoly, PotentialSpec, TracePoly};
use crate::rng::{gue_increment, stream};
use crate::scalar::Coeff;
use serde::{Deserialize, Serialize};

/// On-disk form of a family.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilySpec {
    pub v: PotentialSpec,
    pub w: NcPoly,
    /// Optional structured spec for V+W; when present it must expand to
    /// exactly V+W and enables a symbolic certificate for the endpoint.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<PotentialSpec>,
}

#[derive(Clone, Debug)]
pub struct PotentialFamily {
    pub spec: FamilySpec,
    v: NcPoly,
    w: NcPoly,
    grads_v: Vec<NcPoly>,
    grads_w: Vec<NcPoly>,
    /// Convexity constants of the two endpoints, with provenance.
    pub c_v: f64,
    pub c_vw: f64,
    pub certified: bool,
}

impl PotentialFamily {
    pub fn new(spec: FamilySpec) -> Result<Self, SdeError> {
        spec.v.validate().map_err(SdeError::Family)?;
        let v = spec.v.expand();
        let w = spec.w.clone();
        if w.n != v.n {
            return Err(SdeError::Family(format!(
                "W has {} letters, V has {}",
                w.n, v.n
            )));
        }
        if !w.is_self_adjoint() {
            return Err(SdeError::Family("W is not self-adjoint".into()));
        }
        let vw = &v + &w;
        let cert_v = certify_convexity(&spec.v);
        let cert_t = spec.target.as_ref().map(|t| {
            if t.expand() != vw {
                return Err(SdeError::Family("target spec does not expand to V+W".into()));
            }
            Ok(certify_convexity(t))
        });
        let (c_v, cv_cert) = match cert_v {
            Convexity::Certified { c } => (c, true),
            Convexity::Rejected { .. } => (numeric_convexity_probe(&v), false),
        };
        let (c_vw, ct_cert) = match cert_t {
            Some(r) => match r? {
                Convexity::Certified { c } => (c, true),
                Convexity::Rejected { .. } => (numeric_convexity_probe(&vw), false),
            },
            None => (numeric_convexity_probe(&vw), false),
        };
        let vt = TracePoly::from(v.clone());
        let wt = TracePoly::from(w.clone());
        let grads_v = (1..=v.n).map(|i| vt.cyclic_derivative(i).expect_plain()).collect();
        let grads_w = (1..=w.n).map(|i| wt.cyclic_derivative(i).expect_plain()).collect();
        Ok(PotentialFamily {
            spec,
            v,
            w,
            grads_v,
            grads_w,
            c_v,
            c_vw,
            certified: cv_cert && ct_cert,
        })
    }

    pub fn quadratic(c_target: f64) -> Self {
        // V = ½x², W = ½(c−1)x²: V_α = ½(1+α(c−1))x²
        let v = PotentialSpec::quadratic_plus_quartic(1.0, 0.0);
        let mut w = NcPoly::zero(1);
        w.add_term(
            crate::ncalg::Word::from_letters(&[1, 1]),
            &Coeff::from_f64(c_target - 1.0) * &Coeff::ratio(1, 2),
        );
        let target = PotentialSpec::quadratic_plus_quartic(c_target, 0.0);
        PotentialFamily::new(FamilySpec { v, w, target: Some(target) }).expect("quadratic family")
    }

    /// Semicircle to ½x² + (t/4)x⁴.
    pub fn semicircle_to_quartic(t: f64) -> Self {
        let v = PotentialSpec::quadratic_plus_quartic(1.0, 0.0);
        let mut w = NcPoly::zero(1);
        w.add_term(
            crate::ncalg::Word::from_letters(&[1, 1, 1, 1]),
            &Coeff::from_f64(t) * &Coeff::ratio(1, 4),
        );
        let target = PotentialSpec::quadratic_plus_quartic(1.0, t);
        PotentialFamily::new(FamilySpec { v, w, target: Some(target) }).expect("quartic family")
    }

    pub fn n(&self) -> u8 {
        self.v.n
    }

    pub fn v(&self) -> &NcPoly {
        &self.v
    }

    pub fn w(&self) -> &NcPoly {
        &self.w
    }

    pub fn v_alpha(&self, alpha: f64) -> NcPoly {
        &self.v + &self.w.scale(&Coeff::from_f64(alpha))
    }

    pub fn grad_v_alpha(&self, alpha: f64) -> Vec<NcPoly> {
        self.grads_v
            .iter()
            .zip(&self.grads_w)
            .map(|(gv, gw)| gv + &gw.scale(&Coeff::from_f64(alpha)))
            .collect()
    }

    pub fn grads_w(&self) -> &[NcPoly] {
        &self.grads_w
    }

    /// Conservative convexity constant across the interpolation.
    pub fn c_min(&self) -> f64 {
        self.c_v.min(self.c_vw)
    }
}

/// Numeric stand-in when no symbolic certificate applies: the smallest
/// Hessian eigenvalue over a few norm-bounded random tuples.
fn numeric_convexity_probe(v: &NcPoly) -> f64 {
    let dim = 8;
    let mut worst = f64::INFINITY;
    for probe in 0..5u64 {
        let mut rng = stream(0xC0FFEE ^ probe, &[probe]);
        let mats: Vec<HermMatrix> = (0..v.n)
            .map(|_| HermMatrix::symmetrized(gue_increment(dim, 1.0, &mut rng)))
            .collect();
        let x = MatrixTuple::new(mats).expect("tuple");
        if let Ok(rep) = hessian_min_eig(v, &x, 200, probe) {
            worst = worst.min(rep.min_eig);
        }
    }
    if worst.is_finite() {
        worst
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_family_constants() {
        let fam = PotentialFamily::quadratic(2.0);
        assert!((fam.c_v - 1.0).abs() < 1e-12);
        assert!((fam.c_vw - 2.0).abs() < 1e-12);
        assert!(fam.certified);
        assert!((fam.c_min() - 1.0).abs() < 1e-12);
        // V_α = ½(1+α)x²: gradient (1+α)x
        let g = fam.grad_v_alpha(0.5);
        let x15 = crate::ncalg::monomial(1, &[1], Coeff::from_f64(1.5));
        assert_eq!(g[0], x15);
    }

    #[test]
    fn quartic_family_certifies() {
        let fam = PotentialFamily::semicircle_to_quartic(1.0);
        assert!(fam.certified);
        assert!((fam.c_v - 1.0).abs() < 1e-12);
        assert!((fam.c_vw - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mismatched_target_is_rejected() {
        let v = PotentialSpec::quadratic_plus_quartic(1.0, 0.0);
        let mut w = NcPoly::zero(1);
        w.add_term(crate::ncalg::Word::from_letters(&[1, 1]), Coeff::ratio(1, 2));
        let target = PotentialSpec::quadratic_plus_quartic(3.0, 0.0); // wrong
        assert!(PotentialFamily::new(FamilySpec { v, w, target: Some(target) }).is_err());
    }
}
