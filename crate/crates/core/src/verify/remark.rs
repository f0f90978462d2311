//! Search for an instance where the unitary in the modulus-dominance
//! corollary cannot be dropped: `Φ(A^{p+q}) − |Φ(A^p)Φ(A^q)|` with a negative
//! eigenvalue for the Schur map below and `q < p`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::dd::{dd_eig_hermitian, Dd, DdMatrix};
use crate::linalg::{eig_hermitian, ComplexMatrix, HermitianMatrix, PsdMatrix, ToleranceConfig};
use crate::posmaps::{apply_power, PositiveMapSpec};
use crate::verify::checks::check_c12;
use crate::verify::report::{InequalityCheckReport, InstanceDigest, Margin};
use crate::linalg::operator_abs;

/// `A(ε)`: diagonal `(1+ε, 2+ε, 3+ε)`, every off-diagonal entry `ε`.
pub fn remark_matrix(eps: f64) -> ComplexMatrix {
    ComplexMatrix::from_fn(3, 3, |i, j| if i == j { (i as f64 + 1.0 + eps).into() } else { eps.into() })
}

pub fn remark_symbol() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[[1.0, 1.0, 0.5], [1.0, 1.0, 0.5], [0.5, 0.5, 1.0]]).expect("finite")
}

pub fn remark_map(tol: &ToleranceConfig) -> Result<PositiveMapSpec> {
    Ok(PositiveMapSpec::schur(PsdMatrix::from_matrix(remark_symbol(), tol)?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchGrid {
    pub eps: Vec<f64>,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

impl Default for SearchGrid {
    fn default() -> Self {
        Self {
            eps: (1..=6).map(|k| 10f64.powi(-k)).collect(),
            p: vec![1.5, 2.0, 3.0],
            q: vec![0.25, 0.5, 1.0],
        }
    }
}

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub eps: f64,
    pub p: f64,
    pub q: f64,
    /// `λ_min(Φ(A^{p+q}) − |Φ(A^p)Φ(A^q)|)`
    pub gap: f64,
    /// Threshold below which `gap` counts as a violation.
    pub threshold: f64,
    pub dominance: Margin,
}

impl GridPoint {
    pub fn violates(&self) -> bool {
        self.gap < self.threshold && self.dominance.holds()
    }
}

/// Everything needed to replay a found instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleBundle {
    pub eps: f64,
    pub p: f64,
    pub q: f64,
    pub a: ComplexMatrix,
    pub map: PositiveMapSpec,
    pub gap: f64,
    pub refined_gap: f64,
    pub dominance_gap: f64,
    pub tolerances: ToleranceConfig,
}

pub fn evaluate_point(eps: f64, p: f64, q: f64, tol: &ToleranceConfig) -> Result<GridPoint> {
    let phi = remark_map(tol)?;
    let a = PsdMatrix::from_matrix(remark_matrix(eps), tol)?;
    let fp = apply_power(&phi, &a, p, tol)?;
    let fq = apply_power(&phi, &a, q, tol)?;
    let fpq = apply_power(&phi, &a, p + q, tol)?;
    let abs = operator_abs(&fp.as_matrix().matmul(fq.as_matrix()), tol)?;
    let diff = fpq.as_hermitian().sub(abs.as_hermitian());
    let gap = eig_hermitian(&diff, tol)?.eigenvalues.min();
    let c12 = check_c12(&phi, &a, p, q, tol)?;
    let dominance = c12.margin("dominance").cloned().expect("dominance margin");
    Ok(GridPoint { eps, p, q, gap, threshold: -10.0 * tol.psd_slack(&[abs.norm(), fpq.norm()]), dominance })
}

fn f64_frame(m: &DdMatrix, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    Ok(eig_hermitian(&HermitianMatrix::from_hermitian_part(&m.to_complex()), tol)?.eigenvectors)
}

fn dd_function(m: &DdMatrix, tol: &ToleranceConfig, f: impl Fn(Dd) -> Dd) -> Result<DdMatrix> {
    let (vals, q) = dd_eig_hermitian(m, &f64_frame(m, tol)?);
    let mapped: Vec<Dd> = vals.into_iter().map(f).collect();
    Ok(DdMatrix::synthesize(&q, &mapped))
}

fn dd_power(m: &DdMatrix, t: f64, tol: &ToleranceConfig) -> Result<DdMatrix> {
    dd_function(m, tol, |v| if v.hi <= 0.0 { Dd::ZERO } else { v.powf(t) })
}

/// The same gap evaluated in double-double arithmetic, starting from the
/// stored `A(ε)`.
pub fn refine_gap(a: &ComplexMatrix, symbol: &ComplexMatrix, p: f64, q: f64, tol: &ToleranceConfig) -> Result<f64> {
    if !a.is_square() || a.rows() != symbol.rows() || !symbol.is_square() {
        return Err(Error::Shape("refinement needs equal square matrices".into()));
    }
    let a = DdMatrix::from_complex(a).hermitian_part();
    let s = DdMatrix::from_complex(symbol);
    let fp = dd_power(&a, p, tol)?.hadamard(&s);
    let fq = dd_power(&a, q, tol)?.hadamard(&s);
    let fpq = dd_power(&a, p + q, tol)?.hadamard(&s);
    let x = fp.matmul(&fq);
    let xx = x.adjoint().matmul(&x).hermitian_part();
    let abs = dd_function(&xx, tol, |v| if v.hi <= 0.0 { Dd::ZERO } else { v.sqrt() })?;
    let d = fpq.sub(&abs).hermitian_part();
    let (vals, _) = dd_eig_hermitian(&d, &f64_frame(&d, tol)?);
    Ok(vals.last().expect("non-empty").to_f64())
}

/// Scans the grid and returns the most negative point whose dominance check
/// passes. Fails with `SearchExhausted` unless that point is below the
/// threshold and keeps its sign in double-double.
pub fn search_remark_counterexample(grid: &SearchGrid, tol: &ToleranceConfig) -> Result<(CounterexampleBundle, InequalityCheckReport)> {
    let mut best: Option<GridPoint> = None;
    for &eps in &grid.eps {
        for &p in &grid.p {
            for &q in &grid.q {
                let pt = evaluate_point(eps, p, q, tol)?;
                if pt.dominance.holds() && best.as_ref().is_none_or(|b| pt.gap < b.gap) {
                    best = Some(pt);
                }
            }
        }
    }
    let best = best.ok_or(Error::SearchExhausted { best_gap: f64::NAN })?;
    if !best.violates() {
        return Err(Error::SearchExhausted { best_gap: best.gap });
    }
    let a = remark_matrix(best.eps);
    let refined = refine_gap(&a, &remark_symbol(), best.p, best.q, tol)?;
    if refined >= best.threshold {
        return Err(Error::SearchExhausted { best_gap: refined });
    }
    let bundle = CounterexampleBundle {
        eps: best.eps,
        p: best.p,
        q: best.q,
        a,
        map: remark_map(tol)?,
        gap: best.gap,
        refined_gap: refined,
        dominance_gap: best.dominance.gap,
        tolerances: *tol,
    };
    Ok((bundle.clone(), bundle_report(&bundle, best.threshold)))
}

fn bundle_report(b: &CounterexampleBundle, threshold: f64) -> InequalityCheckReport {
    InequalityCheckReport::builder("remark", &b.tolerances)
        .margin(Margin::new("violation", threshold - b.gap, 0.0))
        .margin(Margin::new("refined-violation", threshold - b.refined_gap, 0.0))
        .margin(Margin::new("dominance", b.dominance_gap, b.tolerances.psd_slack(&[1.0])))
        .metric("eps", b.eps)
        .metric("loewner_gap", b.gap)
        .metric("refined_gap", b.refined_gap)
        .instance(
            InstanceDigest { map_hash: Some(b.map.hash()), ..InstanceDigest::new(vec![3]) }
                .exponent("p", b.p)
                .exponent("q", b.q),
        )
        .build()
}

/// Re-evaluates a bundle from its stored matrices.
pub fn replay(bundle: &CounterexampleBundle) -> Result<GridPoint> {
    let tol = bundle.tolerances;
    let a = PsdMatrix::from_matrix(bundle.a.clone(), &tol)?;
    let phi = &bundle.map;
    let fp = apply_power(phi, &a, bundle.p, &tol)?;
    let fq = apply_power(phi, &a, bundle.q, &tol)?;
    let fpq = apply_power(phi, &a, bundle.p + bundle.q, &tol)?;
    let abs = operator_abs(&fp.as_matrix().matmul(fq.as_matrix()), &tol)?;
    let gap = eig_hermitian(&fpq.as_hermitian().sub(abs.as_hermitian()), &tol)?.eigenvalues.min();
    let c12 = check_c12(phi, &a, bundle.p, bundle.q, &tol)?;
    Ok(GridPoint {
        eps: bundle.eps,
        p: bundle.p,
        q: bundle.q,
        gap,
        threshold: -10.0 * tol.psd_slack(&[abs.norm(), fpq.norm()]),
        dominance: c12.margin("dominance").cloned().expect("dominance margin"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commuting_baseline_has_no_violation() {
        let tol = ToleranceConfig::default();
        for (p, q) in [(1.5, 0.25), (3.0, 1.0)] {
            let pt = evaluate_point(0.0, p, q, &tol).unwrap();
            assert!(pt.gap >= -1e-12, "{pt:?}");
        }
        let grid = SearchGrid { eps: vec![0.0], ..SearchGrid::default() };
        assert!(matches!(search_remark_counterexample(&grid, &tol), Err(Error::SearchExhausted { .. })));
    }

    #[test]
    fn default_grid_finds_violation() {
        let tol = ToleranceConfig::default();
        let (bundle, report) = search_remark_counterexample(&SearchGrid::default(), &tol).unwrap();
        assert!(report.holds);
        assert!(bundle.gap < -1e-6 && bundle.refined_gap < -1e-6);
        assert!((bundle.gap - bundle.refined_gap).abs() < 1e-10);
        let json = serde_json::to_string(&bundle).unwrap();
        let back: CounterexampleBundle = serde_json::from_str(&json).unwrap();
        assert!((replay(&back).unwrap().gap - bundle.gap).abs() < 1e-12);
    }

    #[test]
    fn refinement_agrees_on_positive_instance() {
        let tol = ToleranceConfig::default();
        let pt = evaluate_point(1e-3, 1.0, 0.5, &tol).unwrap();
        let r = refine_gap(&remark_matrix(1e-3), &remark_symbol(), 1.0, 0.5, &tol).unwrap();
        assert!((pt.gap - r).abs() < 1e-10);
    }

    #[test]
    fn refined_gap_matches_high_precision_oracle() {
        // 40-digit evaluation at ε = 0.1 (the binary double), p = 3, q = 1
        let r = refine_gap(&remark_matrix(0.1), &remark_symbol(), 3.0, 1.0, &ToleranceConfig::default()).unwrap();
        assert!((r - -0.021_259_430_605_890_870).abs() < 1e-15);
    }
}
