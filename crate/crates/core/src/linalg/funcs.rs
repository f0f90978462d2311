use super::matrix::HermitianMatrix;
use super::psd::PsdMatrix;
use super::tolerance::ToleranceConfig;
use super::eig::eig_hermitian;
use crate::error::{Error, Result};

/// Closed real interval; `hi` may be `+∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const NON_NEGATIVE: Interval = Interval { lo: 0.0, hi: f64::INFINITY };
    pub const REAL_LINE: Interval = Interval { lo: f64::NEG_INFINITY, hi: f64::INFINITY };
    pub const UNIT: Interval = Interval { lo: 0.0, hi: 1.0 };

    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "empty interval");
        Self { lo, hi }
    }
}

/// Functional calculus `Q f(Λ) Q^*`.
///
/// Eigenvalues within `tau_psd · max(1, ‖H‖)` of the domain are clamped to the
/// nearest endpoint before `f` is applied.
pub fn matrix_function(
    h: &HermitianMatrix,
    f: impl Fn(f64) -> f64,
    domain: Interval,
    tol: &ToleranceConfig,
) -> Result<HermitianMatrix> {
    let eig = eig_hermitian(h, tol)?;
    let slack = tol.psd_slack(&[eig.eigenvalues.abs_max()]);
    let mut values = Vec::with_capacity(eig.dim());
    for &v in eig.eigenvalues.values() {
        if v < domain.lo - slack || v > domain.hi + slack {
            return Err(Error::Domain { value: v, lo: domain.lo, hi: domain.hi });
        }
        values.push(f(v.clamp(domain.lo, domain.hi)));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericFailure("matrix function produced a non-finite value".into()));
    }
    Ok(eig.synthesize(&values))
}

/// Negative powers need `λ_min > NEGATIVE_POWER_FLOOR · ‖P‖_∞`.
pub const NEGATIVE_POWER_FLOOR: f64 = 1e-10;

/// Spectral power `P^t` computed in the cached eigenframe of `P`.
/// `P^1 = P` and `P^0 = I` exactly.
pub fn frac_power(p: &PsdMatrix, t: f64) -> Result<PsdMatrix> {
    if !t.is_finite() {
        return Err(Error::Precondition(format!("non-finite exponent {t}")));
    }
    if t == 1.0 {
        return Ok(p.clone());
    }
    if t == 0.0 {
        return Ok(PsdMatrix::identity(p.dim()));
    }
    if t < 0.0 && !p.is_strictly_positive(NEGATIVE_POWER_FLOOR) {
        return Err(Error::Singular(format!(
            "power {t} of a matrix with smallest eigenvalue {:.3e} (norm {:.3e})",
            p.min_eig_hint(),
            p.norm()
        )));
    }
    let eig = p.eig();
    let values = eig.eigenvalues.values().iter().map(|&v| v.max(0.0).powf(t)).collect();
    Ok(PsdMatrix::from_spectral(eig.eigenvectors.clone(), values))
}

/// `P^{1/2}`
pub fn sqrt_psd(p: &PsdMatrix) -> PsdMatrix {
    frac_power(p, 0.5).expect("non-negative powers always exist")
}

/// Moore–Penrose pseudo-inverse of `P^{1/2}`, treating eigenvalues at or
/// below `rel · ‖P‖` as zero.
pub fn pinv_sqrt(p: &PsdMatrix, rel: f64) -> PsdMatrix {
    let eig = p.eig();
    let cut = rel * p.norm();
    let values = eig.eigenvalues.values().iter().map(|&v| if v > cut { 1.0 / v.sqrt() } else { 0.0 }).collect();
    PsdMatrix::from_spectral(eig.eigenvectors.clone(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::ComplexMatrix;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn square_on_diagonal_is_exact() {
        let h = HermitianMatrix::from_diag(&[1.0, 2.0]);
        let r = matrix_function(&h, |t| t * t, Interval::REAL_LINE, &tol()).unwrap();
        assert_eq!(r, HermitianMatrix::from_diag(&[1.0, 4.0]));
    }

    #[test]
    fn sqrt_maps_spectrum() {
        let h = HermitianMatrix::new(ComplexMatrix::from_real_rows(&[[2.0, 1.0], [1.0, 2.0]]).unwrap()).unwrap();
        let r = matrix_function(&h, f64::sqrt, Interval::NON_NEGATIVE, &tol()).unwrap();
        let e = eig_hermitian(&r, &tol()).unwrap();
        assert!((e.eigenvalues.values()[0] - 3f64.sqrt()).abs() < 1e-14);
        assert!((e.eigenvalues.values()[1] - 1.0).abs() < 1e-14);
        // same eigenvectors: r commutes with h
        let c = &(r.as_matrix() * h.as_matrix()) - &(h.as_matrix() * r.as_matrix());
        assert!(c.frobenius_norm() < 1e-14);
    }

    #[test]
    fn domain_violation() {
        let h = HermitianMatrix::from_diag(&[1.0, -0.5]);
        let err = matrix_function(&h, f64::sqrt, Interval::NON_NEGATIVE, &tol()).unwrap_err();
        assert!(matches!(err, Error::Domain { .. }));
        // within slack: clamped
        let h = HermitianMatrix::from_diag(&[1.0, -1e-12]);
        let r = matrix_function(&h, f64::sqrt, Interval::NON_NEGATIVE, &tol()).unwrap();
        assert_eq!(r.get(1, 1).re, 0.0);
    }

    #[test]
    fn powers_of_diagonal() {
        let p = PsdMatrix::from_diag(&[4.0, 9.0]).unwrap();
        let r = frac_power(&p, 0.5).unwrap();
        assert_eq!(r.as_hermitian(), &HermitianMatrix::from_diag(&[2.0, 3.0]));
        assert_eq!(frac_power(&p, 0.0).unwrap().as_hermitian(), &HermitianMatrix::identity(2));
        assert_eq!(frac_power(&p, 1.0).unwrap(), p);
    }

    #[test]
    fn negative_power_of_singular_matrix() {
        let p = PsdMatrix::from_diag(&[1.0, 0.0]).unwrap();
        assert!(matches!(frac_power(&p, -0.5), Err(Error::Singular(_))));
        assert!(frac_power(&p, 0.5).is_ok());
    }
}
