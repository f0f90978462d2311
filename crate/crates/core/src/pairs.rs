//! Monotone pairs `(A, B) = (f(C), g(C))`, concave pairs `A = h(B)`, power
//! pairs, and recognition of raw commuting pairs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, frac_power, ComplexMatrix, HermitianMatrix, PsdMatrix, ToleranceConfig};
use crate::rng::{haar_unitary, SplitMix64};

/// Commutation residual allowed relative to `‖A‖_F ‖B‖_F`.
pub const COMMUTE_TOL: f64 = 1e-9;
/// Co-monotonicity slack on `(a_i − a_j)(b_i − b_j)`, relative to `max(1, ‖A‖ ‖B‖)`.
pub const COMONOTONE_TOL: f64 = 1e-12;
/// Relative separation below which joint eigenvalues are treated as tied.
pub const TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionFlags {
    pub non_negative: bool,
    pub non_decreasing: bool,
    pub concave: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form")]
pub enum ScalarFunctionSpec {
    /// Linear interpolation between knots, extended linearly past the ends.
    PiecewiseLinear { knots: Vec<f64>, values: Vec<f64>, flags: FunctionFlags },
    /// `t ↦ t^exponent` on `[0, ∞)`.
    Power { exponent: f64 },
}

impl ScalarFunctionSpec {
    /// Builds a piecewise-linear function and verifies each claimed flag on the knot data.
    pub fn piecewise_linear(knots: Vec<f64>, values: Vec<f64>, flags: FunctionFlags) -> Result<Self> {
        if knots.is_empty() || knots.len() != values.len() {
            return Err(Error::Shape("piecewise-linear function needs one value per knot".into()));
        }
        if knots.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Precondition("knots must be strictly ascending".into()));
        }
        if knots.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::Precondition("non-finite knot data".into()));
        }
        let f = ScalarFunctionSpec::PiecewiseLinear { knots, values, flags };
        let actual = f.observed_flags();
        if (flags.non_negative && !actual.non_negative)
            || (flags.non_decreasing && !actual.non_decreasing)
            || (flags.concave && !actual.concave)
        {
            return Err(Error::Precondition(format!("claimed flags {flags:?} not satisfied ({actual:?})")));
        }
        Ok(f)
    }

    pub fn power(exponent: f64) -> Result<Self> {
        if !(exponent >= 0.0) || !exponent.is_finite() {
            return Err(Error::Singular(format!("power pairs need a non-negative exponent, got {exponent}")));
        }
        Ok(ScalarFunctionSpec::Power { exponent })
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            ScalarFunctionSpec::Power { exponent } => t.max(0.0).powf(*exponent),
            ScalarFunctionSpec::PiecewiseLinear { knots, values, .. } => {
                let n = knots.len();
                if n == 1 {
                    return values[0];
                }
                let k = match knots.iter().position(|&x| x > t) {
                    Some(0) => 0,
                    Some(i) => i - 1,
                    None => n - 2,
                };
                let slope = (values[k + 1] - values[k]) / (knots[k + 1] - knots[k]);
                values[k] + slope * (t - knots[k])
            }
        }
    }

    /// Flags that actually hold on the knot data (exactly, no slack).
    pub fn observed_flags(&self) -> FunctionFlags {
        match self {
            ScalarFunctionSpec::Power { exponent } => {
                FunctionFlags { non_negative: true, non_decreasing: true, concave: *exponent <= 1.0 }
            }
            ScalarFunctionSpec::PiecewiseLinear { knots, values, .. } => {
                let slopes: Vec<f64> =
                    knots.windows(2).zip(values.windows(2)).map(|(k, v)| (v[1] - v[0]) / (k[1] - k[0])).collect();
                FunctionFlags {
                    non_negative: values.iter().all(|&v| v >= 0.0),
                    non_decreasing: slopes.iter().all(|&s| s >= 0.0),
                    concave: slopes.windows(2).all(|w| w[1] <= w[0]),
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairGenerator {
    pub c: PsdMatrix,
    pub f: ScalarFunctionSpec,
    pub g: ScalarFunctionSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonePair {
    pub a: PsdMatrix,
    pub b: PsdMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<PairGenerator>,
    pub concave: bool,
}

/// Common eigenbasis of a commuting pair with the eigenvalues of each factor
/// in the columns of `frame`.
#[derive(Debug, Clone)]
pub struct JointSpectrum {
    pub frame: ComplexMatrix,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    /// Block-wise diagonalization was needed for near-degenerate `A + πB`.
    pub fallback: bool,
}

impl JointSpectrum {
    /// `Q diag(f(a_i, b_i)) Q^*`, a function of the pair.
    pub fn function(&self, f: impl Fn(f64, f64) -> f64) -> PsdMatrix {
        let vals = self.a.iter().zip(&self.b).map(|(&a, &b)| f(a, b).max(0.0)).collect();
        PsdMatrix::from_spectral(self.frame.clone(), vals)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairClassification {
    pub commuting: bool,
    pub monotone: bool,
    pub concave: bool,
    pub fallback: bool,
}

impl MonotonePair {
    /// Recognizes a raw pair; fails unless it is monotone.
    pub fn new(a: PsdMatrix, b: PsdMatrix, tol: &ToleranceConfig) -> Result<Self> {
        let c = classify_pair(&a, &b, tol)?;
        if !c.monotone {
            return Err(Error::Precondition("matrices do not form a monotone pair".into()));
        }
        Ok(Self { a, b, generator: None, concave: c.concave })
    }

    /// A pair taken as given; used for negative controls.
    pub fn unchecked(a: PsdMatrix, b: PsdMatrix) -> Self {
        Self { a, b, generator: None, concave: false }
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn joint_spectrum(&self, tol: &ToleranceConfig) -> Result<JointSpectrum> {
        match &self.generator {
            Some(g) => {
                let e = g.c.eig();
                let c = e.eigenvalues.values();
                Ok(JointSpectrum {
                    frame: e.eigenvectors.clone(),
                    a: c.iter().map(|&t| g.f.eval(t).max(0.0)).collect(),
                    b: c.iter().map(|&t| g.g.eval(t).max(0.0)).collect(),
                    fallback: false,
                })
            }
            None => joint_diagonalize(&self.a, &self.b, tol),
        }
    }

    /// `AB`, PSD because the factors commute.
    pub fn product(&self, tol: &ToleranceConfig) -> Result<PsdMatrix> {
        Ok(self.joint_spectrum(tol)?.function(|a, b| a * b))
    }
}

/// `(A^p, A^q)` generated by `(A, t^p, t^q)`; concave iff `p ≤ q`.
pub fn make_power_pair(a: &PsdMatrix, p: f64, q: f64) -> Result<MonotonePair> {
    let f = ScalarFunctionSpec::power(p)?;
    let g = ScalarFunctionSpec::power(q)?;
    Ok(MonotonePair {
        a: frac_power(a, p)?,
        b: frac_power(a, q)?,
        generator: Some(PairGenerator { c: a.clone(), f, g }),
        concave: p <= q,
    })
}

fn increasing_values(n: usize, start: f64, rng: &mut SplitMix64) -> Vec<f64> {
    let mut v = Vec::with_capacity(n);
    let mut cur = start;
    for _ in 0..n {
        v.push(cur);
        cur += if rng.bernoulli(0.2) { 0.0 } else { rng.uniform(0.05, 1.0) };
    }
    v
}

/// Random non-negative concave non-decreasing piecewise-linear `h` on `[0, top]`.
fn random_concave(top: f64, rng: &mut SplitMix64) -> Result<ScalarFunctionSpec> {
    let pieces = rng.range(1, 4);
    let mut cuts: Vec<f64> = (0..pieces - 1).map(|_| rng.uniform(0.0, top)).collect();
    cuts.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let mut knots = vec![0.0];
    for c in cuts {
        if c > *knots.last().expect("non-empty") + 1e-3 {
            knots.push(c);
        }
    }
    knots.push(top.max(knots.last().expect("non-empty") + 1.0));
    let mut slopes: Vec<f64> = (0..knots.len() - 1).map(|_| rng.uniform(0.0, 2.0)).collect();
    slopes.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    let mut values = vec![rng.uniform(0.05, 1.0)];
    for (k, s) in slopes.iter().enumerate() {
        let next = values[k] + s * (knots[k + 1] - knots[k]);
        values.push(next);
    }
    ScalarFunctionSpec::piecewise_linear(
        knots,
        values,
        FunctionFlags { non_negative: true, non_decreasing: true, concave: true },
    )
}

/// Random monotone pair from a generator `(C, f, g)`; with `concave`,
/// `f = h ∘ g` for a random concave `h`. Both factors are positive definite.
pub fn random_monotone_pair(dim: usize, rng: &mut SplitMix64, concave: bool) -> Result<MonotonePair> {
    if dim == 0 {
        return Err(Error::Precondition("pairs need dim ≥ 1".into()));
    }
    let mut c_vals: Vec<f64> = (0..dim).map(|_| rng.uniform(0.1, 3.0)).collect();
    c_vals.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    for i in 1..dim {
        if c_vals[i] <= c_vals[i - 1] {
            c_vals[i] = c_vals[i - 1] + 1e-3;
        }
    }
    let frame = haar_unitary(dim, rng);
    let c = PsdMatrix::from_spectral(frame, c_vals.clone());
    let g_vals = increasing_values(dim, rng.uniform(0.05, 1.0), rng);
    let f_vals = if concave {
        let h = random_concave(*g_vals.last().expect("dim ≥ 1"), rng)?;
        g_vals.iter().map(|&t| h.eval(t)).collect()
    } else {
        increasing_values(dim, rng.uniform(0.05, 1.0), rng)
    };
    let mono = FunctionFlags { non_negative: true, non_decreasing: true, concave: false };
    let f = ScalarFunctionSpec::piecewise_linear(c_vals.clone(), f_vals, mono)?;
    let g = ScalarFunctionSpec::piecewise_linear(c_vals, g_vals, mono)?;
    let pair_from = |func: &ScalarFunctionSpec| {
        let e = c.eig();
        let vals = e.eigenvalues.values().iter().map(|&t| func.eval(t).max(0.0)).collect();
        PsdMatrix::from_spectral(e.eigenvectors.clone(), vals)
    };
    let (a, b) = (pair_from(&f), pair_from(&g));
    Ok(MonotonePair { a, b, concave, generator: Some(PairGenerator { c, f, g }) })
}

/// Commuting pair with `a_i` increasing and `b_i` strictly decreasing along a
/// common random frame.
pub fn random_anti_monotone_pair(dim: usize, rng: &mut SplitMix64) -> MonotonePair {
    let frame = haar_unitary(dim, rng);
    let mut a = Vec::with_capacity(dim);
    let mut b = Vec::with_capacity(dim);
    let (mut x, mut y) = (rng.uniform(0.1, 1.0), rng.uniform(0.1, 1.0) + dim as f64);
    for _ in 0..dim {
        a.push(x);
        b.push(y);
        x += rng.uniform(0.2, 1.0);
        y -= rng.uniform(0.2, 0.9);
    }
    MonotonePair::unchecked(PsdMatrix::from_spectral(frame.clone(), a), PsdMatrix::from_spectral(frame, b))
}

fn commutes(a: &HermitianMatrix, b: &HermitianMatrix) -> bool {
    let ab = a.as_matrix().matmul(b.as_matrix());
    let ba = b.as_matrix().matmul(a.as_matrix());
    (&ab - &ba).frobenius_norm() <= COMMUTE_TOL * a.frobenius_norm() * b.frobenius_norm()
}

/// Diagonalizes a commuting pair through `A + πB`, refining clusters of
/// near-equal eigenvalues by diagonalizing `A` inside each cluster.
pub fn joint_diagonalize(a: &PsdMatrix, b: &PsdMatrix, tol: &ToleranceConfig) -> Result<JointSpectrum> {
    if a.dim() != b.dim() {
        return Err(Error::Shape("pair factors have different sizes".into()));
    }
    let n = a.dim();
    let m = a.as_hermitian().add(&b.as_hermitian().scale(std::f64::consts::PI));
    let e = eig_hermitian(&m, tol)?;
    let lam = e.eigenvalues.values();
    let sep = TIE_TOL * lam.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    let mut frame = e.eigenvectors.clone();
    let mut fallback = false;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && lam[end - 1] - lam[end] <= sep {
            end += 1;
        }
        if end - start > 1 {
            fallback = true;
            let q = frame.block(0, start, n, end - start);
            let sub = HermitianMatrix::from_hermitian_part(&q.adjoint_mul(&a.as_matrix().matmul(&q)));
            let rot = q.matmul(&eig_hermitian(&sub, tol)?.eigenvectors);
            for j in 0..end - start {
                frame.set_column(start + j, &rot.column(j));
            }
        }
        start = end;
    }
    let diag = |x: &PsdMatrix| -> Vec<f64> {
        let t = frame.adjoint_mul(&x.as_matrix().matmul(&frame));
        (0..n).map(|i| t.get(i, i).re).collect()
    };
    Ok(JointSpectrum { a: diag(a), b: diag(b), frame, fallback })
}

fn comonotone(a: &[f64], b: &[f64], scale: f64) -> bool {
    let slack = COMONOTONE_TOL * scale;
    (0..a.len()).all(|i| (0..i).all(|j| (a[i] - a[j]) * (b[i] - b[j]) >= -slack))
}

/// Whether points `(b_i, a_i)` admit a non-negative concave interpolant on `[0, ∞)`.
fn concave_points(a: &[f64], b: &[f64], norm_a: f64, norm_b: f64) -> bool {
    let da = TIE_TOL * norm_a.max(1.0);
    let db = TIE_TOL * norm_b.max(1.0);
    let mut pts: Vec<(f64, f64)> = b.iter().copied().zip(a.iter().copied()).collect();
    pts.sort_by(|x, y| x.partial_cmp(y).expect("finite spectra"));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for (x, y) in pts {
        match merged.last() {
            Some(&(px, py)) if x - px <= db => {
                if (y - py).abs() > da {
                    return false;
                }
            }
            _ => merged.push((x, y)),
        }
    }
    if merged.iter().any(|&(_, y)| y < -da) {
        return false;
    }
    let slack = da * norm_b.max(1.0);
    // chord slopes must be non-negative and non-increasing
    for w in merged.windows(2) {
        if w[1].1 - w[0].1 < -da {
            return false;
        }
    }
    for w in merged.windows(3) {
        let (x0, y0) = w[0];
        let (x1, y1) = w[1];
        let (x2, y2) = w[2];
        if (y1 - y0) * (x2 - x1) < (y2 - y1) * (x1 - x0) - slack {
            return false;
        }
    }
    // the segment from (0, h(0)) with h(0) ≥ 0 must not be steeper than the first chord
    if let [(x0, y0), (x1, y1), ..] = merged[..] {
        if y0 * (x1 - x0) < (y1 - y0) * x0 - slack {
            return false;
        }
    }
    true
}

pub fn classify_pair(a: &PsdMatrix, b: &PsdMatrix, tol: &ToleranceConfig) -> Result<PairClassification> {
    if a.dim() != b.dim() {
        return Err(Error::Shape("pair factors have different sizes".into()));
    }
    if !commutes(a.as_hermitian(), b.as_hermitian()) {
        return Ok(PairClassification { commuting: false, monotone: false, concave: false, fallback: false });
    }
    let js = joint_diagonalize(a, b, tol)?;
    let monotone = comonotone(&js.a, &js.b, (a.norm() * b.norm()).max(1.0));
    let concave = monotone && concave_points(&js.a, &js.b, a.norm(), b.norm());
    Ok(PairClassification { commuting: true, monotone, concave, fallback: js.fallback })
}

pub fn is_monotone_pair(a: &PsdMatrix, b: &PsdMatrix, tol: &ToleranceConfig) -> bool {
    classify_pair(a, b, tol).map(|c| c.monotone).unwrap_or(false)
}

pub fn is_concave_pair(a: &PsdMatrix, b: &PsdMatrix, tol: &ToleranceConfig) -> bool {
    classify_pair(a, b, tol).map(|c| c.concave).unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::random_psd;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn trivial_power_pairs() {
        let mut rng = SplitMix64::new(4);
        let a = random_psd(3, 0.1, 2.0, &mut rng);
        let p = make_power_pair(&a, 1.0, 1.0).unwrap();
        assert_eq!(p.a, p.b);
        assert!(p.concave);
        let p = make_power_pair(&a, 0.0, 2.0).unwrap();
        assert_eq!(p.a, PsdMatrix::identity(3));
        assert!(make_power_pair(&a, -1.0, 1.0).is_err());
    }

    #[test]
    fn power_pair_commutes() {
        let mut rng = SplitMix64::new(8);
        let a = random_psd(4, 0.0, 3.0, &mut rng);
        let p = make_power_pair(&a, 0.5, 2.0).unwrap();
        let ab = p.a.as_matrix().matmul(p.b.as_matrix());
        let ba = p.b.as_matrix().matmul(p.a.as_matrix());
        assert!((&ab - &ba).frobenius_norm() <= 1e-12 * p.a.frobenius_norm() * p.b.frobenius_norm());
        assert!(is_concave_pair(&p.a, &p.b, &tol()));
    }

    #[test]
    fn square_root_pair_is_concave() {
        let mut rng = SplitMix64::new(12);
        let a = random_psd(4, 0.1, 3.0, &mut rng);
        let a2 = frac_power(&a, 2.0).unwrap();
        assert!(is_monotone_pair(&a, &a2, &tol()));
        assert!(is_concave_pair(&a, &a2, &tol()));
        // (A², A) needs the convex h(t) = t²
        assert!(is_monotone_pair(&a2, &a, &tol()));
        assert!(!is_concave_pair(&a2, &a, &tol()));
    }

    #[test]
    fn anti_monotone_diagonal() {
        let a = PsdMatrix::from_diag(&[1.0, 2.0]).unwrap();
        let b = PsdMatrix::from_diag(&[2.0, 1.0]).unwrap();
        assert!(!is_monotone_pair(&a, &b, &tol()));
    }

    #[test]
    fn non_commuting_rejected() {
        let a = PsdMatrix::from_diag(&[1.0, 2.0]).unwrap();
        let b = PsdMatrix::from_matrix(ComplexMatrix::from_real_rows(&[[2.0, 1.0], [1.0, 2.0]]).unwrap(), &tol()).unwrap();
        let c = classify_pair(&a, &b, &tol()).unwrap();
        assert!(!c.commuting && !c.monotone);
    }

    #[test]
    fn degenerate_joint_spectrum_uses_fallback() {
        // a + πb ties between (π, 0) and (0, 1)
        let pi = std::f64::consts::PI;
        let a = PsdMatrix::from_diag(&[pi, 0.0, 5.0]).unwrap();
        let b = PsdMatrix::from_diag(&[0.0, 1.0, 2.0]).unwrap();
        let c = classify_pair(&a, &b, &tol()).unwrap();
        assert!(c.fallback);
        assert!(!c.monotone);
        let a = PsdMatrix::from_diag(&[pi, pi, 5.0]).unwrap();
        let b = PsdMatrix::from_diag(&[1.0, 1.0, 2.0]).unwrap();
        let c = classify_pair(&a, &b, &tol()).unwrap();
        assert!(c.monotone && c.concave);
    }

    #[test]
    fn generated_pairs_are_recognized() {
        let mut rng = SplitMix64::new(21);
        for dim in 1..=6 {
            let p = random_monotone_pair(dim, &mut rng, true).unwrap();
            let c = classify_pair(&p.a, &p.b, &tol()).unwrap();
            assert!(c.monotone && c.concave, "dim {dim}");
            let p = random_monotone_pair(dim, &mut rng, false).unwrap();
            assert!(is_monotone_pair(&p.a, &p.b, &tol()));
        }
    }

    #[test]
    fn swapping_eigenvalues_breaks_concavity() {
        let mut rng = SplitMix64::new(30);
        let p = random_monotone_pair(5, &mut rng, true).unwrap();
        let js = p.joint_spectrum(&tol()).unwrap();
        let mut a = js.a.clone();
        let (i, j) = (0..5)
            .flat_map(|i| (0..5).map(move |j| (i, j)))
            .find(|&(i, j)| js.b[i] < js.b[j] - 1e-3 && js.a[i] < js.a[j] - 1e-3)
            .expect("some strictly ordered pair");
        a.swap(i, j);
        let swapped = PsdMatrix::from_spectral(js.frame.clone(), a);
        assert!(!is_concave_pair(&swapped, &p.b, &tol()));
        assert!(!is_monotone_pair(&swapped, &p.b, &tol()));
    }

    #[test]
    fn deterministic_generation() {
        let a = random_monotone_pair(4, &mut SplitMix64::new(5), true).unwrap();
        let b = random_monotone_pair(4, &mut SplitMix64::new(5), true).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn flags_are_verified() {
        let ok = ScalarFunctionSpec::piecewise_linear(
            vec![0.0, 1.0, 2.0],
            vec![0.0, 2.0, 3.0],
            FunctionFlags { non_negative: true, non_decreasing: true, concave: true },
        );
        assert!(ok.is_ok());
        assert_eq!(ok.unwrap().eval(3.0), 4.0);
        let bad = ScalarFunctionSpec::piecewise_linear(
            vec![0.0, 1.0, 2.0],
            vec![0.0, 1.0, 3.0],
            FunctionFlags { non_negative: true, non_decreasing: true, concave: true },
        );
        assert!(bad.is_err());
    }
}
