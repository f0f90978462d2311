//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary and then applies a real plane rotation, so the accumulated
//! similarity is unitary and the diagonal stays real.

use super::matrix::{ComplexMatrix, HermitianMatrix, C64, ZERO};
use super::spectrum::SpectrumList;
use super::tolerance::ToleranceConfig;
use crate::error::{Error, Result};

pub const MAX_SWEEPS: usize = 60;

#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub eigenvalues: SpectrumList,
    /// Unitary; column `j` pairs with `eigenvalues[j]`.
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `Q diag(values) Q^*` in this frame.
    pub fn synthesize(&self, values: &[f64]) -> HermitianMatrix {
        synthesize(&self.eigenvectors, values)
    }

    pub fn reconstruct(&self) -> HermitianMatrix {
        self.synthesize(self.eigenvalues.values())
    }
}

/// `Q diag(values) Q^*` for a square frame `Q`.
pub fn synthesize(q: &ComplexMatrix, values: &[f64]) -> HermitianMatrix {
    let n = q.rows();
    assert_eq!(q.cols(), values.len(), "frame/value count mismatch");
    let mut out = ComplexMatrix::zeros(n, n);
    for (k, &v) in values.iter().enumerate() {
        if v == 0.0 {
            continue;
        }
        for i in 0..n {
            let qi = q.get(i, k) * v;
            if qi == ZERO {
                continue;
            }
            for j in 0..n {
                out[(i, j)] += qi * q.get(j, k).conj();
            }
        }
    }
    HermitianMatrix::from_hermitian_part(&out)
}

fn off_diagonal_mass(a: &[C64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Eigendecomposition with eigenvalues sorted descending.
///
/// Converges when the off-diagonal Frobenius mass drops to
/// `tau_eig · ‖H‖_F`; gives up with `NumericFailure` after [`MAX_SWEEPS`].
pub fn eig_hermitian(h: &HermitianMatrix, tol: &ToleranceConfig) -> Result<EigenDecomposition> {
    let n = h.dim();
    let mut a: Vec<C64> = h.data().to_vec();
    let mut v = ComplexMatrix::identity(n);
    let target = tol.tau_eig * h.frobenius_norm();

    let mut converged = false;
    for _ in 0..=MAX_SWEEPS {
        if off_diagonal_mass(&a, n) <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, n, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NumericFailure(format!("Jacobi did not converge in {MAX_SWEEPS} sweeps")));
    }

    let diag: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    let mut order: Vec<usize> = (0..n).collect();
    // stable: ties keep Jacobi order
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).expect("finite eigenvalues"));
    let eigenvalues = SpectrumList::new(order.iter().map(|&i| diag[i]).collect())?;
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| v.get(i, order[j]));
    Ok(EigenDecomposition { eigenvalues, eigenvectors })
}

fn rotate(a: &mut [C64], v: &mut ComplexMatrix, n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta == 0.0 { 1.0 } else { theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt()) };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let phase = (apq / r).conj();

    // G = diag(1, e^{-iφ}) · [[c, s], [-s, c]] restricted to (p, q)
    let gpp = C64::new(c, 0.0);
    let gpq = C64::new(s, 0.0);
    let gqp = phase * (-s);
    let gqq = phase * c;

    for k in 0..n {
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        a[k * n + p] = akp * gpp + akq * gqp;
        a[k * n + q] = akp * gpq + akq * gqq;
    }
    for k in 0..n {
        let apk = a[p * n + k];
        let aqk = a[q * n + k];
        a[p * n + k] = gpp.conj() * apk + gqp.conj() * aqk;
        a[q * n + k] = gpq.conj() * apk + gqq.conj() * aqk;
    }
    a[p * n + q] = ZERO;
    a[q * n + p] = ZERO;
    a[p * n + p] = C64::new(app - t * r, 0.0);
    a[q * n + q] = C64::new(aqq + t * r, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * gpp + vkq * gqp;
        v[(k, q)] = vkp * gpq + vkq * gqq;
    }
}

/// Eigenvalues of a Hermitian matrix, descending.
pub fn eigenvalues_desc(h: &HermitianMatrix, tol: &ToleranceConfig) -> Result<SpectrumList> {
    Ok(eig_hermitian(h, tol)?.eigenvalues)
}

/// Operator norm of a Hermitian matrix (largest |eigenvalue|).
pub fn hermitian_norm(h: &HermitianMatrix, tol: &ToleranceConfig) -> Result<f64> {
    Ok(eigenvalues_desc(h, tol)?.abs_max())
}
