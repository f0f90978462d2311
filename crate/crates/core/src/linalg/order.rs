//! Loewner-order comparison and unitary-congruence witnesses.

use serde::{Deserialize, Serialize};

use super::eig::{eig_hermitian, hermitian_norm};
use super::matrix::{ComplexMatrix, HermitianMatrix};
use super::spectrum::dominance_gap;
use super::svd::op_norm;
use super::tolerance::ToleranceConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoewnerComparison {
    pub holds: bool,
    /// Smallest eigenvalue of `Y − X`.
    pub gap: f64,
    /// `tau_psd · max(1, ‖X‖_∞, ‖Y‖_∞)`.
    pub slack: f64,
}

/// Decides `X ≤ Y`: holds iff `λ_min(Y − X) ≥ −tau_psd · max(1, ‖X‖_∞, ‖Y‖_∞)`.
pub fn loewner_leq(x: &HermitianMatrix, y: &HermitianMatrix, tol: &ToleranceConfig) -> Result<LoewnerComparison> {
    if x.dim() != y.dim() {
        return Err(Error::Shape(format!("Loewner comparison of {}x{} and {}x{}", x.dim(), x.dim(), y.dim(), y.dim())));
    }
    let gap = eig_hermitian(&y.sub(x), tol)?.eigenvalues.min();
    let slack = tol.psd_slack(&[hermitian_norm(x, tol)?, hermitian_norm(y, tol)?]);
    Ok(LoewnerComparison { holds: gap >= -slack, gap, slack })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WitnessKind {
    Unitary,
    PartialIsometry,
    Contraction,
    /// A contraction `K` (first matrix) together with a unitary `U` (second).
    Pair,
}

/// Explicit operator whose existence a theorem asserts, with the margin of
/// the inequality it was verified to certify.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessCertificate {
    pub kind: WitnessKind,
    pub matrix: ComplexMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second: Option<ComplexMatrix>,
    /// Verification gap of the certified inequality.
    pub residual: f64,
    pub slack: f64,
}

pub const WITNESS_TOL: f64 = 1e-9;

impl WitnessCertificate {
    /// Structural check of the witness kind (unitarity, partial isometry, contraction).
    pub fn structure_defect(&self, tol: &ToleranceConfig) -> Result<f64> {
        fn unitary_defect(v: &ComplexMatrix, tol: &ToleranceConfig) -> Result<f64> {
            let g = v.adjoint_mul(v);
            op_norm(&(&g - &ComplexMatrix::identity(v.cols())), tol)
        }
        fn contraction_defect(k: &ComplexMatrix, tol: &ToleranceConfig) -> Result<f64> {
            Ok((op_norm(k, tol)? - 1.0).max(0.0))
        }
        match self.kind {
            WitnessKind::Unitary => unitary_defect(&self.matrix, tol),
            WitnessKind::PartialIsometry => {
                let v = &self.matrix;
                let vvv = v.matmul(&v.adjoint_mul(v));
                op_norm(&(&vvv - v), tol)
            }
            WitnessKind::Contraction => contraction_defect(&self.matrix, tol),
            WitnessKind::Pair => {
                let u = self.second.as_ref().ok_or_else(|| Error::Precondition("pair witness without unitary".into()))?;
                Ok(contraction_defect(&self.matrix, tol)?.max(unitary_defect(u, tol)?))
            }
        }
    }

    pub fn is_structurally_valid(&self, tol: &ToleranceConfig) -> bool {
        self.structure_defect(tol).map(|d| d <= WITNESS_TOL).unwrap_or(false)
    }

    pub fn certified(&self) -> bool {
        self.residual >= -self.slack
    }
}

/// `V Y V^*`
pub fn unitary_conjugate(v: &ComplexMatrix, y: &HermitianMatrix) -> HermitianMatrix {
    HermitianMatrix::from_hermitian_part(&v.matmul(y.as_matrix()).matmul(&v.adjoint()))
}

/// Given `λ_j(X) ≤ λ_j(Y)` for all `j`, returns the unitary `V = Q_X Q_Y^*`
/// aligning descending eigenframes, so that `X ≤ V Y V^*`.
pub fn align_witness(x: &HermitianMatrix, y: &HermitianMatrix, tol: &ToleranceConfig) -> Result<WitnessCertificate> {
    if x.dim() != y.dim() {
        return Err(Error::Shape("witness alignment of matrices of different size".into()));
    }
    let ex = eig_hermitian(x, tol)?;
    let ey = eig_hermitian(y, tol)?;
    let slack = tol.psd_slack(&[ex.eigenvalues.abs_max(), ey.eigenvalues.abs_max()]);
    let (gap, index) = dominance_gap(&ex.eigenvalues, &ey.eigenvalues);
    if gap < -slack {
        return Err(Error::Dominance { index, gap });
    }
    let v = ex.eigenvectors.matmul(&ey.eigenvectors.adjoint());
    let cmp = loewner_leq(x, &unitary_conjugate(&v, y), tol)?;
    Ok(WitnessCertificate { kind: WitnessKind::Unitary, matrix: v, second: None, residual: cmp.gap, slack: cmp.slack })
}
