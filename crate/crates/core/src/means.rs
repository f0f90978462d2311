//! Weighted geometric means `A #_α B` and the order relations built on them:
//! congruence invariance, reiteration, the Ando–Hiai norm inequality, the
//! Fujii–Kamei lemmas and Furuta's inequality.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{frac_power, loewner_leq, singular_values_desc, ComplexMatrix, HermitianMatrix, PsdMatrix, ToleranceConfig};
use crate::rng::{psd_with_spectrum, SplitMix64};
use crate::verify::report::{InequalityCheckReport, InstanceDigest, Margin};

/// Strict positivity threshold: `λ_min > 1e-10 · ‖A‖_∞`.
pub const STRICT_POSITIVITY: f64 = 1e-10;
/// Relative Frobenius residual allowed for the algebraic identities.
pub const IDENTITY_RESIDUAL: f64 = 1e-8;
/// Relative slack of the Ando–Hiai norm comparison.
pub const NORM_SLACK: f64 = 1e-9;
/// Largest condition number accepted for congruence matrices.
pub const MAX_CONDITION: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MeanWeight(f64);

impl MeanWeight {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::Precondition(format!("mean weight {alpha} outside [0, 1]")));
        }
        Ok(Self(alpha))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FurutaParams {
    pub p: f64,
    pub r: f64,
    pub q: f64,
}

impl FurutaParams {
    pub fn new(p: f64, r: f64, q: f64) -> Self {
        Self { p, r, q }
    }

    /// Smallest admissible `q`: `(p + r) / (1 + r)`.
    pub fn q_bound(&self) -> f64 {
        (self.p + self.r) / (1.0 + self.r)
    }

    /// Exponent `w = (1 + r) / (p + r)` of the intermediate form.
    pub fn w(&self) -> f64 {
        (1.0 + self.r) / (self.p + self.r)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p >= 1.0) {
            return Err(Error::Precondition(format!("Furuta needs p ≥ 1, got {}", self.p)));
        }
        if !(self.r >= 0.0) {
            return Err(Error::Precondition(format!("Furuta needs r ≥ 0, got {}", self.r)));
        }
        if !(self.q >= self.q_bound() * (1.0 - 1e-12)) {
            return Err(Error::Precondition(format!("Furuta needs q ≥ {}, got {}", self.q_bound(), self.q)));
        }
        Ok(())
    }
}

fn require_strict(a: &PsdMatrix, name: &str) -> Result<()> {
    if a.is_strictly_positive(STRICT_POSITIVITY) {
        Ok(())
    } else {
        Err(Error::Singular(format!(
            "{name} is not strictly positive (λ_min = {:.3e}, ‖{name}‖ = {:.3e})",
            a.min_eig_hint(),
            a.norm()
        )))
    }
}

/// `A #_α B = A^{1/2} (A^{-1/2} B A^{-1/2})^α A^{1/2}`.
pub fn geometric_mean(a: &PsdMatrix, b: &PsdMatrix, alpha: MeanWeight, tol: &ToleranceConfig) -> Result<PsdMatrix> {
    if a.dim() != b.dim() {
        return Err(Error::Shape("geometric mean of matrices of different size".into()));
    }
    require_strict(a, "A")?;
    let alpha = alpha.value();
    if alpha == 0.0 {
        return Ok(a.clone());
    }
    if alpha == 1.0 {
        return Ok(b.clone());
    }
    let half = frac_power(a, 0.5)?;
    let inv_half = frac_power(a, -0.5)?;
    let inner = b.congruence(inv_half.as_matrix(), tol)?;
    let powered = frac_power(&inner, alpha)?;
    powered.congruence(half.as_matrix(), tol)
}

/// Mean with an optional ridge `A → A + εI`, `ε = 1e-8 · ‖A‖_∞`, applied
/// only when `A` fails strict positivity. Returns the ε used (0 if none).
pub fn geometric_mean_ridged(
    a: &PsdMatrix,
    b: &PsdMatrix,
    alpha: MeanWeight,
    tol: &ToleranceConfig,
    ridge: bool,
) -> Result<(PsdMatrix, f64)> {
    if a.is_strictly_positive(STRICT_POSITIVITY) || !ridge {
        return Ok((geometric_mean(a, b, alpha, tol)?, 0.0));
    }
    let eps = 1e-8 * a.norm().max(1e-300);
    let vals = a.eigenvalues().values().iter().map(|v| v + eps).collect();
    let shifted = PsdMatrix::from_spectral(a.eig().eigenvectors.clone(), vals);
    Ok((geometric_mean(&shifted, b, alpha, tol)?, eps))
}

fn relative_residual(lhs: &HermitianMatrix, rhs: &HermitianMatrix) -> f64 {
    (lhs.as_matrix() - rhs.as_matrix()).frobenius_norm() / rhs.frobenius_norm().max(f64::MIN_POSITIVE)
}

/// `(X^*AX) #_α (X^*BX) = X^*(A #_α B)X` for invertible `X`.
pub fn check_congruence_axiom(
    a: &PsdMatrix,
    b: &PsdMatrix,
    alpha: MeanWeight,
    x: &ComplexMatrix,
    tol: &ToleranceConfig,
) -> Result<InequalityCheckReport> {
    let sv = singular_values_desc(x, tol)?;
    let cond = sv.max() / sv.min();
    if !(cond <= MAX_CONDITION) {
        return Err(Error::Singular(format!("congruence matrix condition number {cond:.3e}")));
    }
    let lhs = geometric_mean(&a.congruence(x, tol)?, &b.congruence(x, tol)?, alpha, tol)?;
    let rhs = geometric_mean(a, b, alpha, tol)?.congruence(x, tol)?;
    let residual = relative_residual(&lhs, &rhs);
    Ok(InequalityCheckReport::builder("axiom2", tol)
        .margin(Margin::new("congruence", -residual, IDENTITY_RESIDUAL))
        .metric("condition", cond)
        .instance(InstanceDigest::new(vec![a.dim()]).exponent("alpha", alpha.value()))
        .build())
}

/// `(A #_x B) #_z (A #_y B) = A #_{x(1−z)+yz} B`.
pub fn check_reiteration(
    a: &PsdMatrix,
    b: &PsdMatrix,
    x: MeanWeight,
    y: MeanWeight,
    z: MeanWeight,
    tol: &ToleranceConfig,
) -> Result<InequalityCheckReport> {
    require_strict(a, "A")?;
    require_strict(b, "B")?;
    let ax = geometric_mean(a, b, x, tol)?;
    let ay = geometric_mean(a, b, y, tol)?;
    let lhs = geometric_mean(&ax, &ay, z, tol)?;
    let combined = MeanWeight::new((x.value() * (1.0 - z.value()) + y.value() * z.value()).clamp(0.0, 1.0))?;
    let rhs = geometric_mean(a, b, combined, tol)?;
    let residual = relative_residual(&lhs, &rhs);
    Ok(InequalityCheckReport::builder("reiteration", tol)
        .margin(Margin::new("reiteration", -residual, IDENTITY_RESIDUAL))
        .instance(
            InstanceDigest::new(vec![a.dim()])
                .exponent("x", x.value())
                .exponent("y", y.value())
                .exponent("z", z.value()),
        )
        .build())
}

/// `‖(A #_α B)^s‖_∞ ≤ ‖A^s #_α B^s‖_∞` for `0 < s < 1`.
pub fn check_ando_hiai(
    a: &PsdMatrix,
    b: &PsdMatrix,
    alpha: MeanWeight,
    s: f64,
    tol: &ToleranceConfig,
) -> Result<InequalityCheckReport> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Precondition(format!("Ando–Hiai needs 0 < s < 1, got {s}")));
    }
    require_strict(a, "A")?;
    require_strict(b, "B")?;
    let left = frac_power(&geometric_mean(a, b, alpha, tol)?, s)?.norm();
    let right = geometric_mean(&frac_power(a, s)?, &frac_power(b, s)?, alpha, tol)?.norm();
    Ok(InequalityCheckReport::builder("AH3.1", tol)
        .margin(Margin::new("norm", right - left, NORM_SLACK * right))
        .metric("left", left)
        .metric("right", right)
        .instance(InstanceDigest::new(vec![a.dim()]).exponent("alpha", alpha.value()).exponent("s", s))
        .build())
}

fn require_ordered(a: &PsdMatrix, b: &PsdMatrix, tol: &ToleranceConfig) -> Result<Margin> {
    let c = loewner_leq(b, a, tol)?;
    if !c.holds {
        return Err(Error::Precondition(format!("A ≥ B fails (gap {:.3e})", c.gap)));
    }
    Ok(Margin::from_loewner("B<=A", &c))
}

/// `A^{-r} #_{r/(p+r)} B^p ≤ I` and, for `p ≥ 1`, `A^{-r} #_{(1+r)/(p+r)} B^p ≤ B ≤ A`.
pub fn check_mean_lemmas(
    a: &PsdMatrix,
    b: &PsdMatrix,
    p: f64,
    r: f64,
    tol: &ToleranceConfig,
) -> Result<InequalityCheckReport> {
    if !(p > 0.0 && r > 0.0) {
        return Err(Error::Precondition(format!("lemmas need p, r > 0, got p = {p}, r = {r}")));
    }
    let order = require_ordered(a, b, tol)?;
    require_strict(a, "A")?;
    let a_neg = frac_power(a, -r)?;
    let b_pow = frac_power(b, p)?;
    let g = geometric_mean(&a_neg, &b_pow, MeanWeight::new(r / (p + r))?, tol)?;
    let id = HermitianMatrix::identity(a.dim());
    let mut report = InequalityCheckReport::builder(if p >= 1.0 { "L3.3" } else { "L3.2" }, tol)
        .margin(Margin::from_loewner("L3.2", &loewner_leq(&g, &id, tol)?))
        .instance(InstanceDigest::new(vec![a.dim()]).exponent("p", p).exponent("r", r));
    if p >= 1.0 {
        let g2 = geometric_mean(&a_neg, &b_pow, MeanWeight::new((1.0 + r) / (p + r))?, tol)?;
        report = report.margin(Margin::from_loewner("L3.3", &loewner_leq(&g2, b, tol)?)).margin(order);
    }
    Ok(report.build())
}

/// Evaluates `A^{(p+r)/q} ≥ (A^{r/2} B^p A^{r/2})^{1/q}` without checking
/// the admissible exponent region.
pub fn furuta_margin(a: &PsdMatrix, b: &PsdMatrix, params: FurutaParams, tol: &ToleranceConfig) -> Result<Margin> {
    let FurutaParams { p, r, q } = params;
    let lhs = frac_power(a, (p + r) / q)?;
    let inner = frac_power(b, p)?.congruence(frac_power(a, r / 2.0)?.as_matrix(), tol)?;
    let rhs = frac_power(&inner, 1.0 / q)?;
    Ok(Margin::from_loewner("F3.4", &loewner_leq(&rhs, &lhs, tol)?))
}

/// Furuta's inequality for `A ≥ B ≥ 0`, `p ≥ 1`, `r ≥ 0`, `q ≥ (p+r)/(1+r)`.
/// With `w_form`, also `A^{1+r} ≥ (A^{r/2} B^p A^{r/2})^{(1+r)/(p+r)}`.
pub fn check_furuta(
    a: &PsdMatrix,
    b: &PsdMatrix,
    params: FurutaParams,
    tol: &ToleranceConfig,
    w_form: bool,
) -> Result<InequalityCheckReport> {
    params.validate()?;
    let order = require_ordered(a, b, tol)?;
    let mut report = InequalityCheckReport::builder("F3.4", tol)
        .margin(furuta_margin(a, b, params, tol)?)
        .margin(order)
        .instance(
            InstanceDigest::new(vec![a.dim()])
                .exponent("p", params.p)
                .exponent("q", params.q)
                .exponent("r", params.r),
        );
    if w_form {
        let FurutaParams { p, r, .. } = params;
        let lhs = frac_power(a, 1.0 + r)?;
        let inner = frac_power(b, p)?.congruence(frac_power(a, r / 2.0)?.as_matrix(), tol)?;
        let rhs = frac_power(&inner, params.w())?;
        report = report.margin(Margin::from_loewner("w-form", &loewner_leq(&rhs, &lhs, tol)?));
    }
    Ok(report.build())
}

/// Monotony: `B_i ≤ A_i` implies `B_0 #_α B_1 ≤ A_0 #_α A_1`.
pub fn check_mean_monotony(
    a: (&PsdMatrix, &PsdMatrix),
    b: (&PsdMatrix, &PsdMatrix),
    alpha: MeanWeight,
    tol: &ToleranceConfig,
) -> Result<InequalityCheckReport> {
    require_ordered(a.0, b.0, tol)?;
    require_ordered(a.1, b.1, tol)?;
    let ga = geometric_mean(a.0, a.1, alpha, tol)?;
    let gb = geometric_mean(b.0, b.1, alpha, tol)?;
    Ok(InequalityCheckReport::builder("monotony", tol)
        .margin(Margin::from_loewner("monotony", &loewner_leq(&gb, &ga, tol)?))
        .instance(InstanceDigest::new(vec![a.0.dim()]).exponent("alpha", alpha.value()))
        .build())
}

/// Concavity: `λ(A_0 #_α A_1) + (1−λ)(B_0 #_α B_1) ≤ (λA_0 + (1−λ)B_0) #_α (λA_1 + (1−λ)B_1)`.
pub fn check_mean_concavity(
    a: (&PsdMatrix, &PsdMatrix),
    b: (&PsdMatrix, &PsdMatrix),
    alpha: MeanWeight,
    lambda: f64,
    tol: &ToleranceConfig,
) -> Result<InequalityCheckReport> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Precondition(format!("mixing weight {lambda} outside [0, 1]")));
    }
    let mix = |x: &PsdMatrix, y: &PsdMatrix| x.scale(lambda)?.add(&y.scale(1.0 - lambda)?, tol);
    let left = geometric_mean(a.0, a.1, alpha, tol)?
        .scale(lambda)?
        .add(&geometric_mean(b.0, b.1, alpha, tol)?.scale(1.0 - lambda)?, tol)?;
    let right = geometric_mean(&mix(a.0, b.0)?, &mix(a.1, b.1)?, alpha, tol)?;
    Ok(InequalityCheckReport::builder("concavity", tol)
        .margin(Margin::from_loewner("concavity", &loewner_leq(&left, &right, tol)?))
        .instance(InstanceDigest::new(vec![a.0.dim()]).exponent("alpha", alpha.value()).exponent("lambda", lambda))
        .build())
}

/// Random `A ≥ B ≥ 0`: `B = A^{1/2} C A^{1/2}` with `0 ≤ C ≤ I`. With
/// `strict`, both are positive definite.
pub fn random_ordered_pair(dim: usize, rng: &mut SplitMix64, strict: bool) -> (PsdMatrix, PsdMatrix) {
    let lo = if strict { 0.05 } else { 0.0 };
    let a_vals: Vec<f64> = (0..dim).map(|_| rng.uniform(lo, 2.0)).collect();
    let a = psd_with_spectrum(&a_vals, rng);
    let mut c_vals: Vec<f64> = (0..dim).map(|_| rng.uniform(if strict { 0.05 } else { 0.0 }, 1.0)).collect();
    if rng.bernoulli(0.3) {
        c_vals[0] = 1.0;
    }
    let c = psd_with_spectrum(&c_vals, rng);
    let half = frac_power(&a, 0.5).expect("non-negative power");
    let tol = ToleranceConfig::default();
    let b = c.congruence(half.as_matrix(), &tol).expect("congruence of a PSD matrix");
    (a, b)
}

/// Outcome of the boundary-sharpness search.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SharpnessOutcome {
    pub samples: usize,
    pub violations: usize,
    pub best_gap: f64,
    pub best_slack: f64,
    pub best_params: FurutaParams,
    pub best_a: PsdMatrix,
    pub best_b: PsdMatrix,
}

pub const SHARPNESS_P: [f64; 4] = [1.0, 1.5, 2.0, 3.0];
pub const SHARPNESS_R: [f64; 4] = [0.0, 0.5, 1.0, 2.0];

/// Samples `A ≥ B` of size `dim` with `q = factor · (p+r)/(1+r)` over the
/// exponent grid and records the most negative Furuta margin. A violation
/// is a gap below `−10 · slack`.
pub fn furuta_boundary_search(
    samples: usize,
    dim: usize,
    factor: f64,
    rng: &mut SplitMix64,
    tol: &ToleranceConfig,
) -> Result<SharpnessOutcome> {
    let mut best: Option<SharpnessOutcome> = None;
    let mut violations = 0;
    for _ in 0..samples {
        let p = SHARPNESS_P[rng.range(0, SHARPNESS_P.len() - 1)];
        let r = SHARPNESS_R[rng.range(0, SHARPNESS_R.len() - 1)];
        let mut params = FurutaParams::new(p, r, 0.0);
        params.q = factor * params.q_bound();
        let (a, b) = random_ordered_pair(dim, rng, false);
        let m = furuta_margin(&a, &b, params, tol)?;
        if m.gap < -10.0 * m.slack {
            violations += 1;
        }
        if best.as_ref().map_or(true, |o| m.gap / m.slack < o.best_gap / o.best_slack) {
            best = Some(SharpnessOutcome {
                samples,
                violations: 0,
                best_gap: m.gap,
                best_slack: m.slack,
                best_params: params,
                best_a: a,
                best_b: b,
            });
        }
    }
    let mut out = best.ok_or_else(|| Error::Precondition("boundary search needs at least one sample".into()))?;
    out.violations = violations;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn w(a: f64) -> MeanWeight {
        MeanWeight::new(a).unwrap()
    }

    #[test]
    fn scalar_mean() {
        let a = PsdMatrix::identity(2);
        let b = PsdMatrix::from_diag(&[4.0, 4.0]).unwrap();
        let g = geometric_mean(&a, &b, w(0.5), &tol()).unwrap();
        assert!((g.as_matrix() - &ComplexMatrix::from_diag(&[2.0, 2.0])).max_abs() < 1e-15);
    }

    #[test]
    fn endpoints() {
        let a = PsdMatrix::from_diag(&[1.0, 4.0]).unwrap();
        let b = PsdMatrix::from_matrix(ComplexMatrix::from_real_rows(&[[2.0, 1.0], [1.0, 2.0]]).unwrap(), &tol()).unwrap();
        assert_eq!(geometric_mean(&a, &b, w(0.0), &tol()).unwrap(), a);
        assert_eq!(geometric_mean(&a, &b, w(1.0), &tol()).unwrap(), b);
    }

    #[test]
    fn two_by_two_against_extended_precision_closed_form() {
        // A = diag(1,4), B = [[2,1],[1,2]], α = 1/2, evaluated with 40-digit
        // arithmetic from the 2x2 square-root formula
        // sqrt(M) = (M + sqrt(det M) I) / sqrt(tr M + 2 sqrt(det M)).
        let expected = [
            [1.393_171_556_269_222_0, 0.486_098_816_301_352_68],
            [0.486_098_816_301_352_68, 2.656_093_327_268_771_8],
        ];
        let a = PsdMatrix::from_diag(&[1.0, 4.0]).unwrap();
        let b = PsdMatrix::from_matrix(ComplexMatrix::from_real_rows(&[[2.0, 1.0], [1.0, 2.0]]).unwrap(), &tol()).unwrap();
        let g = geometric_mean(&a, &b, w(0.5), &tol()).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((g.get(i, j) - C64::new(expected[i][j], 0.0)).norm() < 1e-14, "{:?}", g);
            }
        }
    }

    #[test]
    fn singular_first_argument() {
        let a = PsdMatrix::from_diag(&[1.0, 0.0]).unwrap();
        let b = PsdMatrix::identity(2);
        assert!(matches!(geometric_mean(&a, &b, w(0.5), &tol()), Err(Error::Singular(_))));
        let (g, eps) = geometric_mean_ridged(&a, &b, w(0.5), &tol(), true).unwrap();
        assert_eq!(eps, 1e-8);
        assert!((g.get(1, 1).re - 1e-4).abs() < 1e-12);
    }

    #[test]
    fn identity_congruence_has_zero_residual() {
        let a = PsdMatrix::from_diag(&[1.0, 3.0]).unwrap();
        let b = PsdMatrix::from_diag(&[2.0, 0.5]).unwrap();
        let r = check_congruence_axiom(&a, &b, w(0.3), &ComplexMatrix::identity(2), &tol()).unwrap();
        assert!(r.holds);
        assert_eq!(r.gap, 0.0);
        let bad = ComplexMatrix::from_diag(&[1.0, 1e-10]);
        assert!(matches!(check_congruence_axiom(&a, &b, w(0.3), &bad, &tol()), Err(Error::Singular(_))));
    }

    #[test]
    fn reiteration_trivial_cases() {
        let a = PsdMatrix::from_diag(&[1.0, 3.0]).unwrap();
        let b = PsdMatrix::from_matrix(ComplexMatrix::from_real_rows(&[[2.0, 1.0], [1.0, 2.0]]).unwrap(), &tol()).unwrap();
        let r = check_reiteration(&a, &b, w(0.4), w(0.4), w(0.7), &tol()).unwrap();
        assert!(r.holds && r.gap.abs() < 1e-14);
        let r = check_reiteration(&a, &b, w(0.25), w(0.9), w(0.0), &tol()).unwrap();
        assert_eq!(r.gap, 0.0);
    }

    #[test]
    fn ando_hiai_commuting_equality() {
        let a = PsdMatrix::from_diag(&[1.0, 3.0, 0.5]).unwrap();
        let b = PsdMatrix::from_diag(&[2.0, 0.5, 4.0]).unwrap();
        let r = check_ando_hiai(&a, &b, w(0.5), 0.5, &tol()).unwrap();
        let expected = [1.0f64 * 2.0, 3.0 * 0.5, 0.5 * 4.0].iter().map(|v| v.powf(0.25)).fold(0.0, f64::max);
        assert!((r.metrics["left"] - expected).abs() < 1e-14);
        assert!((r.metrics["right"] - expected).abs() < 1e-14);
        assert!(r.holds);
        assert!(check_ando_hiai(&a, &b, w(0.5), 1.0, &tol()).is_err());
    }

    #[test]
    fn lemmas_on_identity_and_commuting_data() {
        let id = PsdMatrix::identity(2);
        let r = check_mean_lemmas(&id, &id, 2.0, 1.0, &tol()).unwrap();
        assert!(r.holds);
        assert!(r.margin("L3.2").unwrap().gap.abs() < 1e-15);

        let a = PsdMatrix::from_diag(&[2.0, 3.0]).unwrap();
        let b = PsdMatrix::from_diag(&[1.0, 2.0]).unwrap();
        let (p, rr) = (2.0, 1.0);
        let beta = rr / (p + rr);
        // scalar oracle: a^{-r(1-β)} b^{pβ} per eigenvalue
        let scalar: Vec<f64> = [(2.0f64, 1.0f64), (3.0, 2.0)]
            .iter()
            .map(|&(x, y)| x.powf(-rr * (1.0 - beta)) * y.powf(p * beta))
            .collect();
        let r = check_mean_lemmas(&a, &b, p, rr, &tol()).unwrap();
        let expected_gap = 1.0 - scalar.iter().cloned().fold(0.0, f64::max);
        assert!((r.margin("L3.2").unwrap().gap - expected_gap).abs() < 1e-14);
        assert!(r.holds);

        assert!(matches!(check_mean_lemmas(&b, &a, p, rr, &tol()), Err(Error::Precondition(_))));
    }

    #[test]
    fn furuta_equality_when_equal() {
        let mut rng = SplitMix64::new(5);
        let a = crate::rng::random_psd(3, 0.1, 2.0, &mut rng);
        let r = check_furuta(&a, &a, FurutaParams::new(2.0, 1.0, 1.5), &tol(), true).unwrap();
        assert!(r.holds);
        assert!(r.margin("F3.4").unwrap().gap.abs() < 1e-12);
        assert!(check_furuta(&a, &a, FurutaParams::new(2.0, 1.0, 1.0), &tol(), false).is_err());
        assert!(check_furuta(&a, &a, FurutaParams::new(0.5, 1.0, 2.0), &tol(), false).is_err());
    }

    #[test]
    fn ordered_pair_generator() {
        let mut rng = SplitMix64::new(9);
        for _ in 0..20 {
            let (a, b) = random_ordered_pair(3, &mut rng, true);
            assert!(loewner_leq(&b, &a, &tol()).unwrap().holds);
            assert!(a.is_strictly_positive(STRICT_POSITIVITY) && b.is_strictly_positive(STRICT_POSITIVITY));
        }
    }
}
