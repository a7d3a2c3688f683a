//! Hermitian matrices, tuples, and sampled ensembles.

use super::mat::Mat;
use super::MatError;
use serde::{Deserialize, Serialize};

pub const HERM_TOL: f64 = 1e-12;

/// A Hermitian matrix; conjugate symmetry is checked (within 1e-12) on
/// construction and deserialization, then made exact.
#[derive(Clone, PartialEq, Debug)]
pub struct HermMatrix(Mat);

impl HermMatrix {
    pub fn checked(m: Mat) -> Result<Self, MatError> {
        let defect = m.herm_defect();
        if defect > HERM_TOL {
            return Err(MatError::NotHermitian { defect });
        }
        let mut m = m;
        m.hermitize();
        Ok(HermMatrix(m))
    }

    /// (M + M*)/2, unconditionally; the standard exit of every arithmetic
    /// pipeline stage.
    pub fn symmetrized(mut m: Mat) -> Self {
        m.hermitize();
        HermMatrix(m)
    }

    pub fn zeros(n: usize) -> Self {
        HermMatrix(Mat::zeros(n))
    }

    pub fn mat(&self) -> &Mat {
        &self.0
    }

    pub fn into_mat(self) -> Mat {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.n
    }
}

impl std::ops::Deref for HermMatrix {
    type Target = Mat;
    fn deref(&self) -> &Mat {
        &self.0
    }
}

/// An n-tuple of Hermitian N×N matrices.
#[derive(Clone, PartialEq, Debug)]
pub struct MatrixTuple {
    pub mats: Vec<HermMatrix>,
    /// Operator-norm cap; when tagged, construction verifies it.
    pub norm_cap: Option<f64>,
}

impl MatrixTuple {
    pub fn new(mats: Vec<HermMatrix>) -> Result<Self, MatError> {
        if mats.is_empty() {
            return Err(MatError::Shape("empty tuple".into()));
        }
        let dim = mats[0].dim();
        if mats.iter().any(|m| m.dim() != dim) {
            return Err(MatError::Shape("tuple matrices differ in dimension".into()));
        }
        Ok(MatrixTuple { mats, norm_cap: None })
    }

    pub fn zeros(n: u8, dim: usize) -> Self {
        MatrixTuple {
            mats: (0..n).map(|_| HermMatrix::zeros(dim)).collect(),
            norm_cap: None,
        }
    }

    pub fn with_norm_cap(mut self, cap: f64) -> Result<Self, MatError> {
        for m in &self.mats {
            let norm = m.herm_op_norm();
            if norm > cap {
                return Err(MatError::Shape(format!("operator norm {norm:.3} exceeds cap {cap}")));
            }
        }
        self.norm_cap = Some(cap);
        Ok(self)
    }

    pub fn n_letters(&self) -> u8 {
        self.mats.len() as u8
    }

    pub fn dim(&self) -> usize {
        self.mats[0].dim()
    }

    pub fn raw(&self) -> Vec<&Mat> {
        self.mats.iter().map(|m| m.mat()).collect()
    }

    pub fn max_op_norm(&self) -> f64 {
        self.mats.iter().map(|m| m.herm_op_norm()).fold(0.0, f64::max)
    }
}

/// Provenance carried with a sampled ensemble.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct EnsembleMeta {
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<crate::ncalg::PotentialSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub acceptance_rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub autocorr_time: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// A collection of matrix tuples with uniform (n, N).
#[derive(Clone, Debug)]
pub struct Ensemble {
    pub samples: Vec<MatrixTuple>,
    pub meta: EnsembleMeta,
}

impl Ensemble {
    pub fn new(samples: Vec<MatrixTuple>, meta: EnsembleMeta) -> Result<Self, MatError> {
        if samples.is_empty() {
            return Err(MatError::EmptyEnsemble);
        }
        let (n, dim) = (samples[0].n_letters(), samples[0].dim());
        if samples.iter().any(|s| s.n_letters() != n || s.dim() != dim) {
            return Err(MatError::Shape("ensemble samples differ in (n, N)".into()));
        }
        Ok(Ensemble { samples, meta })
    }

    pub fn n_letters(&self) -> u8 {
        self.samples[0].n_letters()
    }

    pub fn dim(&self) -> usize {
        self.samples[0].dim()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}
