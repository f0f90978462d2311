use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize, Serializer};

use super::eig::{eig_hermitian, EigenDecomposition};
use super::matrix::{ComplexMatrix, HermitianMatrix};
use super::spectrum::SpectrumList;
use super::tolerance::ToleranceConfig;
use crate::error::{Error, Result};

/// Positive semidefinite matrix together with its eigendecomposition.
///
/// Negative eigenvalues within `tau_psd · max(1, ‖A‖_∞)` are clamped to zero
/// on construction; anything more negative is rejected.
#[derive(Clone, PartialEq)]
pub struct PsdMatrix {
    base: HermitianMatrix,
    eig: EigenDecomposition,
}

impl PsdMatrix {
    pub fn new(h: HermitianMatrix, tol: &ToleranceConfig) -> Result<Self> {
        let eig = eig_hermitian(&h, tol)?;
        let min_eig = eig.eigenvalues.min();
        if min_eig >= 0.0 {
            return Ok(Self { base: h, eig });
        }
        let scale = eig.eigenvalues.abs_max();
        if min_eig < -tol.psd_slack(&[scale]) {
            return Err(Error::NotPsd { min_eig });
        }
        let clamped: Vec<f64> = eig.eigenvalues.values().iter().map(|&v| v.max(0.0)).collect();
        Ok(Self::from_spectral(eig.eigenvectors, clamped))
    }

    pub fn from_matrix(m: ComplexMatrix, tol: &ToleranceConfig) -> Result<Self> {
        Self::new(HermitianMatrix::new(m)?, tol)
    }

    /// Builds `Q diag(values) Q^*` from a unitary frame and non-negative values.
    /// Values are re-sorted descending together with their columns.
    pub fn from_spectral(frame: ComplexMatrix, values: Vec<f64>) -> Self {
        let n = values.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| values[j].partial_cmp(&values[i]).expect("finite spectral values"));
        let sorted: Vec<f64> = order.iter().map(|&i| values[i].max(0.0)).collect();
        let eigenvectors = ComplexMatrix::from_fn(frame.rows(), n, |i, j| frame.get(i, order[j]));
        let eig = EigenDecomposition {
            eigenvalues: SpectrumList::new(sorted).expect("sorted by construction"),
            eigenvectors,
        };
        let base = eig.reconstruct();
        Self { base, eig }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_spectral(ComplexMatrix::identity(n), vec![1.0; n])
    }

    pub fn from_diag(values: &[f64]) -> Result<Self> {
        if let Some(&v) = values.iter().find(|&&v| v < 0.0 || !v.is_finite()) {
            return Err(Error::NotPsd { min_eig: v });
        }
        Self::new(HermitianMatrix::from_diag(values), &ToleranceConfig::default())
    }

    pub fn as_hermitian(&self) -> &HermitianMatrix {
        &self.base
    }

    pub fn into_hermitian(self) -> HermitianMatrix {
        self.base
    }

    pub fn eig(&self) -> &EigenDecomposition {
        &self.eig
    }

    pub fn eigenvalues(&self) -> &SpectrumList {
        &self.eig.eigenvalues
    }

    pub fn min_eig_hint(&self) -> f64 {
        self.eig.eigenvalues.min()
    }

    /// Operator norm (largest eigenvalue).
    pub fn norm(&self) -> f64 {
        self.eig.eigenvalues.max()
    }

    /// Smallest eigenvalue exceeds `rel · ‖A‖_∞`.
    pub fn is_strictly_positive(&self, rel: f64) -> bool {
        self.min_eig_hint() > rel * self.norm() && self.norm() > 0.0
    }

    /// `X^* A X`, which stays positive semidefinite.
    pub fn congruence(&self, x: &ComplexMatrix, tol: &ToleranceConfig) -> Result<PsdMatrix> {
        PsdMatrix::new(self.base.congruence(x), tol)
    }

    pub fn add(&self, other: &PsdMatrix, tol: &ToleranceConfig) -> Result<PsdMatrix> {
        PsdMatrix::new(self.base.add(&other.base), tol)
    }

    pub fn scale(&self, s: f64) -> Result<PsdMatrix> {
        if !(s >= 0.0) {
            return Err(Error::Precondition(format!("PSD scaling needs s ≥ 0, got {s}")));
        }
        let vals = self.eig.eigenvalues.values().iter().map(|v| v * s).collect();
        Ok(Self::from_spectral(self.eig.eigenvectors.clone(), vals))
    }
}

impl Deref for PsdMatrix {
    type Target = HermitianMatrix;
    fn deref(&self) -> &HermitianMatrix {
        &self.base
    }
}

impl fmt::Debug for PsdMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Psd(min_eig={:.3e}){:?}", self.min_eig_hint(), self.base.as_matrix())
    }
}

impl Serialize for PsdMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.base.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PsdMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let h = HermitianMatrix::deserialize(d)?;
        PsdMatrix::new(h, &ToleranceConfig::default()).map_err(serde::de::Error::custom)
    }
}
