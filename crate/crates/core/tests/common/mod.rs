//! Independent re-checks shared by the witness and acceptance targets. The
//! modulus is `(X^*X)^{1/2}` in double-double, not the SVD.

#![allow(dead_code)]

use oplab::linalg::dd::{dd_eig_hermitian, Dd, DdMatrix};
use oplab::linalg::{eig_hermitian, eigenvalues_desc, unitary_conjugate, ComplexMatrix, HermitianMatrix, PsdMatrix, ToleranceConfig};
use oplab::posmaps::{random_map, MapKind, PositiveMapSpec};
use oplab::rng::{haar_unitary, SplitMix64};
use oplab::verify::InequalityCheckReport;

pub const SECTION1: [MapKind; 4] = [MapKind::Compression, MapKind::Schur, MapKind::Pinching, MapKind::Congruence];
pub const UNITAL: [MapKind; 4] = [MapKind::Compression, MapKind::Schur, MapKind::Pinching, MapKind::Mixture];

pub fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

pub fn modulus(x: &ComplexMatrix) -> PsdMatrix {
    let xd = DdMatrix::from_complex(x);
    let xx = xd.adjoint().matmul(&xd).hermitian_part();
    let frame = eig_hermitian(&HermitianMatrix::from_hermitian_part(&xx.to_complex()), &tol()).unwrap().eigenvectors;
    let (vals, q) = dd_eig_hermitian(&xx, &frame);
    let roots: Vec<Dd> = vals.into_iter().map(|v| if v.hi <= 0.0 { Dd::ZERO } else { v.sqrt() }).collect();
    let m = DdMatrix::synthesize(&q, &roots).to_complex();
    PsdMatrix::from_matrix(m.hermitian_part(), &tol()).unwrap()
}

pub fn min_eig(h: &HermitianMatrix) -> f64 {
    eigenvalues_desc(h, &tol()).unwrap().min()
}

/// `λ_min(V Y V^* − lhs) / max(1, ‖Y‖)` for the report's unitary witness `V`.
pub fn unitary_witness_gap(report: &InequalityCheckReport, lhs: &HermitianMatrix, y: &HermitianMatrix) -> Result<f64, String> {
    let w = report.witness.as_ref().ok_or_else(|| format!("{} reported no witness", report.case_id))?;
    let v = &w.matrix;
    let defect = (&v.adjoint_mul(v) - &ComplexMatrix::identity(v.rows())).frobenius_norm();
    if defect >= 1e-9 {
        return Err(format!("{}: witness not unitary ({defect:.3e})", report.case_id));
    }
    let scale = eigenvalues_desc(y, &tol()).unwrap().abs_max().max(1.0);
    Ok(min_eig(&unitary_conjugate(v, y).sub(lhs)) / scale)
}

pub fn map(kinds: &[MapKind], n: usize, rng: &mut SplitMix64) -> PositiveMapSpec {
    let k = kinds[rng.range(0, kinds.len() - 1)];
    let m = if k == MapKind::Compression { rng.range(1, n) } else { n };
    random_map(k, n, m, rng)
}

pub fn projection(n: usize, rng: &mut SplitMix64) -> PsdMatrix {
    let rank = rng.range(0, n);
    let vals: Vec<f64> = (0..n).map(|i| if i < rank { 1.0 } else { 0.0 }).collect();
    PsdMatrix::from_spectral(haar_unitary(n, rng), vals)
}

/// Runs `f` on `per_dim` seeded trials for each dimension 2 through 6.
pub fn trials(label: &str, per_dim: u64, mut f: impl FnMut(usize, &mut SplitMix64)) {
    for n in 2..=6 {
        for t in 0..per_dim {
            let mut rng = SplitMix64::for_trial(7, &format!("{label}#{n}"), t);
            f(n, &mut rng);
        }
    }
}
