//! Singular values, modulus and polar decomposition from a one-sided
//! (Hestenes) Jacobi SVD: column pairs of `X` are rotated until mutually
//! orthogonal, which keeps small singular values accurate to `ε ‖X‖`.

use super::matrix::{ComplexMatrix, C64, ZERO};
use super::psd::PsdMatrix;
use super::spectrum::SpectrumList;
use super::tolerance::ToleranceConfig;
use crate::error::{Error, Result};

/// Sweep cap for the one-sided iteration.
pub const MAX_SVD_SWEEPS: usize = 60;

#[derive(Debug, Clone)]
pub struct Svd {
    /// Unitary, `rows × rows`.
    pub u: ComplexMatrix,
    /// Descending, length `cols`.
    pub sigma: Vec<f64>,
    /// Unitary, `cols × cols`.
    pub v: ComplexMatrix,
    /// Number of singular values above the rank cutoff.
    pub rank: usize,
}

fn column_norm(c: &[C64]) -> f64 {
    c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn rank_cutoff(x: &ComplexMatrix, sigma_max: f64) -> f64 {
    64.0 * f64::EPSILON * x.rows().max(x.cols()) as f64 * sigma_max
}

/// Rotates columns `i`, `j` of `u` (and of `v`) so that they become
/// orthogonal. Returns whether a rotation was applied.
/// Pairs involving a column of squared norm at most `negligible` are left alone.
fn rotate_pair(u: &mut [Vec<C64>], v: &mut [Vec<C64>], i: usize, j: usize, threshold: f64, negligible: f64) -> bool {
    let alpha: f64 = u[i].iter().map(|z| z.norm_sqr()).sum();
    let beta: f64 = u[j].iter().map(|z| z.norm_sqr()).sum();
    if alpha.min(beta) <= negligible {
        return false;
    }
    let gamma: C64 = u[i].iter().zip(&u[j]).map(|(a, b)| a.conj() * b).sum();
    let g = gamma.norm();
    if g == 0.0 || g <= threshold * (alpha * beta).sqrt() {
        return false;
    }
    let phase = gamma / g;
    let zeta = (beta - alpha) / (2.0 * g);
    let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = c * t;
    for cols in [u, v] {
        for k in 0..cols[i].len() {
            let a = cols[i][k];
            let b = cols[j][k] * phase.conj();
            cols[i][k] = a * c - b * s;
            cols[j][k] = a * s + b * c;
        }
    }
    true
}

pub fn svd(x: &ComplexMatrix, _tol: &ToleranceConfig) -> Result<Svd> {
    let (m, n) = (x.rows(), x.cols());
    let mut u: Vec<Vec<C64>> = (0..n).map(|j| x.column(j)).collect();
    let mut v: Vec<Vec<C64>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { C64::new(1.0, 0.0) } else { ZERO }).collect())
        .collect();
    let threshold = f64::EPSILON * m.max(1) as f64;
    let negligible = (f64::EPSILON * x.frobenius_norm()).powi(2);
    let mut converged = n < 2;
    for _ in 0..MAX_SVD_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for i in 0..n {
            for j in (i + 1)..n {
                rotated |= rotate_pair(&mut u, &mut v, i, j, threshold, negligible);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::NumericFailure(format!("one-sided Jacobi did not converge in {MAX_SVD_SWEEPS} sweeps")));
    }

    let norms: Vec<f64> = u.iter().map(|c| column_norm(c)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).expect("finite singular values"));
    let sigma: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let v = ComplexMatrix::from_columns(n, &order.iter().map(|&j| v[j].clone()).collect::<Vec<_>>());

    let cutoff = rank_cutoff(x, sigma.first().copied().unwrap_or(0.0));
    let rank = sigma.iter().take(m).filter(|&&s| s > cutoff).count();
    let mut cols: Vec<Vec<C64>> = (0..rank).map(|k| u[order[k]].iter().map(|z| z / sigma[k]).collect()).collect();
    complete_orthonormal(&mut cols, m);
    let u = ComplexMatrix::from_columns(m, &cols);
    Ok(Svd { u, sigma, v, rank })
}

/// Extends orthonormal columns to a basis of `C^dim` by modified Gram–Schmidt
/// of standard basis vectors against the columns already present.
pub fn complete_orthonormal(cols: &mut Vec<Vec<C64>>, dim: usize) {
    while cols.len() < dim {
        let mut best: Option<(f64, Vec<C64>)> = None;
        for k in 0..dim {
            let mut e = vec![ZERO; dim];
            e[k] = C64::new(1.0, 0.0);
            for _ in 0..2 {
                for c in cols.iter() {
                    let proj: C64 = c.iter().zip(&e).map(|(a, b)| a.conj() * b).sum();
                    for (ei, ci) in e.iter_mut().zip(c) {
                        *ei -= proj * ci;
                    }
                }
            }
            let nrm = column_norm(&e);
            if best.as_ref().map_or(true, |(b, _)| nrm > *b) {
                best = Some((nrm, e));
            }
        }
        let (nrm, e) = best.expect("dim > 0");
        cols.push(e.into_iter().map(|z| z / nrm).collect());
    }
}

pub fn singular_values_desc(x: &ComplexMatrix, tol: &ToleranceConfig) -> Result<SpectrumList> {
    let s = svd(x, tol)?;
    let k = x.rows().min(x.cols());
    Ok(SpectrumList::from_unsorted(s.sigma[..k].to_vec()))
}

/// Operator norm `σ_1(X)`.
pub fn op_norm(x: &ComplexMatrix, tol: &ToleranceConfig) -> Result<f64> {
    Ok(svd(x, tol)?.sigma.first().copied().unwrap_or(0.0))
}

/// `|X| = (X^* X)^{1/2}`.
pub fn operator_abs(x: &ComplexMatrix, tol: &ToleranceConfig) -> Result<PsdMatrix> {
    if !x.is_square() {
        return Err(Error::Shape(format!("modulus needs a square matrix, got {}x{}", x.rows(), x.cols())));
    }
    let s = svd(x, tol)?;
    Ok(PsdMatrix::from_spectral(s.v, s.sigma))
}

#[derive(Debug, Clone)]
pub struct PolarDecomposition {
    /// Partial isometry with `W^* W` the projection onto `range(|X|)`.
    pub isometry: ComplexMatrix,
    pub modulus: PsdMatrix,
    /// Unitary extension of `isometry` that agrees with it on `range(|X|)`.
    pub unitary: ComplexMatrix,
}

/// `X = W |X|`.
pub fn polar_decompose(x: &ComplexMatrix, tol: &ToleranceConfig) -> Result<PolarDecomposition> {
    if !x.is_square() {
        return Err(Error::Shape(format!("polar decomposition needs a square matrix, got {}x{}", x.rows(), x.cols())));
    }
    let s = svd(x, tol)?;
    let n = x.rows();
    let r = s.rank;
    let isometry = ComplexMatrix::from_fn(n, n, |i, j| (0..r).map(|k| s.u.get(i, k) * s.v.get(j, k).conj()).sum());
    let unitary = s.u.matmul(&s.v.adjoint());
    let modulus = PsdMatrix::from_spectral(s.v, s.sigma);
    Ok(PolarDecomposition { isometry, modulus, unitary })
}

/// `‖X‖_1 = Σ σ_j`.
pub fn trace_norm(x: &ComplexMatrix, tol: &ToleranceConfig) -> Result<f64> {
    Ok(svd(x, tol)?.sigma.iter().sum())
}

/// `‖X‖_2 = sqrt(Σ σ_j^2)`, computed from the entries.
pub fn frobenius_norm(x: &ComplexMatrix) -> f64 {
    x.frobenius_norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::HermitianMatrix;
    use crate::linalg::matrix::ONE;

    #[test]
    fn noise_level_matrix_converges() {
        // V^*V − I of a computed unitary; one column cancels to ~1e-49 during the sweeps
        let g: ComplexMatrix = serde_json::from_str(include_str!("../../tests/data/noise_gram.json")).unwrap();
        let s = svd(&g, &tol()).unwrap();
        assert!(s.sigma[0] < 1e-15);
    }

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn abs_of_diagonal() {
        let x = ComplexMatrix::from_diag(&[-2.0, 3.0]);
        let a = operator_abs(&x, &tol()).unwrap();
        assert_eq!(a.as_hermitian(), &HermitianMatrix::from_diag(&[2.0, 3.0]));
    }

    #[test]
    fn abs_of_unitary_is_identity() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let u = ComplexMatrix::new(2, 2, vec![C64::new(r, 0.0), C64::new(0.0, r), C64::new(0.0, r), C64::new(r, 0.0)]).unwrap();
        let a = operator_abs(&u, &tol()).unwrap();
        assert!((a.as_matrix() - &ComplexMatrix::identity(2)).max_abs() < 1e-15);
        let s = singular_values_desc(&u, &tol()).unwrap();
        assert!(s.values().iter().all(|v| (v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn polar_of_positive_diagonal() {
        let x = ComplexMatrix::from_diag(&[2.0, 5.0]);
        let p = polar_decompose(&x, &tol()).unwrap();
        assert_eq!(p.isometry, ComplexMatrix::identity(2));
        assert_eq!(p.unitary, ComplexMatrix::identity(2));
    }

    #[test]
    fn polar_of_nilpotent() {
        let x = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]).unwrap();
        let p = polar_decompose(&x, &tol()).unwrap();
        assert_eq!(p.isometry, x);
        assert_eq!(p.modulus.as_hermitian(), &HermitianMatrix::from_diag(&[0.0, 1.0]));
        // unitary extension is a genuine unitary
        let g = p.unitary.adjoint_mul(&p.unitary);
        assert!((&g - &ComplexMatrix::identity(2)).max_abs() < 1e-15);
        assert_eq!(p.unitary.matmul(p.modulus.as_matrix()), x);
    }

    #[test]
    fn completion_produces_basis() {
        let mut cols = vec![vec![C64::new(0.6, 0.0), C64::new(0.8, 0.0), ZERO]];
        complete_orthonormal(&mut cols, 3);
        let q = ComplexMatrix::from_columns(3, &cols);
        let g = q.adjoint_mul(&q);
        assert!((&g - &ComplexMatrix::identity(3)).max_abs() < 1e-15);
        assert_eq!(q.get(0, 0), C64::new(0.6, 0.0) * ONE);
    }
}
