//! Case registry: for every case id, a generator of random instances and the
//! checker that judges them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{PsdMatrix, ToleranceConfig};
use crate::means::{self, FurutaParams, MeanWeight};
use crate::pairs::{random_anti_monotone_pair, random_monotone_pair, MonotonePair};
use crate::posmaps::{random_map, MapKind, PositiveMapSpec};
use crate::rng::{gaussian_matrix, psd_with_spectrum, random_hermitian, random_psd, SplitMix64};
use crate::verify::checks::{self, Eq21};
use crate::verify::remark::{search_remark_counterexample, SearchGrid};
use crate::verify::report::{InequalityCheckReport, Margin};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Group {
    Kernel,
    Maps,
    Pairs,
    Means,
    Search,
    Control,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CaseSpec {
    pub id: &'static str,
    pub group: Group,
    /// Runs once per suite instead of once per (dim, trial).
    pub single_shot: bool,
    pub summary: &'static str,
}

const fn case(id: &'static str, group: Group, summary: &'static str) -> CaseSpec {
    CaseSpec { id, group, single_shot: false, summary }
}

pub const CASES: &[CaseSpec] = &[
    case("T1.1", Group::Maps, "|Φ(A^p)Φ(A^q)| ≤ Φ(A^{p+q}), 0 ≤ p ≤ q"),
    case("ineq1.1", Group::Maps, "|Φ(A^p)Φ(A^q)| ≤ Φ(A^q)^{1+p/q} ≤ Φ(A^{p+q})"),
    case("C1.2", Group::Maps, "|Φ(A^p)Φ(A^q)| ≤ VΦ(A^{p+q})V^*, any p, q ≥ 0"),
    case("P1.3", Group::Maps, "|Φ(A^p)Φ(A^q)Φ(A^r)| ≤ VΦ(A^{p+q+r})V^*"),
    case("P1.4", Group::Maps, "Ky Fan form of the two-unitary bound, q ≥ p, r"),
    case("BK", Group::Maps, "|XY^*| ≤ U(|X|²+|Y|²)/2 U^*"),
    case("kadison", Group::Maps, "Φ(H)² ≤ Φ(H²)"),
    case("choi-low", Group::Maps, "Φ(A^p) ≤ Φ(A)^p, 0 ≤ p ≤ 1"),
    case("choi-high", Group::Maps, "Φ(A)^p ≤ Φ(A^p), 1 ≤ p ≤ 2"),
    case("T2.1", Group::Pairs, "|AEB| ≤ V|ABE|V^*"),
    case("eq2.1a", Group::Pairs, "λ[(EAE)(EBE)] ≤ λ[EABE]"),
    case("eq2.1b", Group::Pairs, "λ[(EAE)(EBE)(EAE)] ≤ λ[EABAE]"),
    case("C2.2", Group::Pairs, "Φ(A)Φ(B)Φ(A) ≤ VΦ(ABA)V^*, unital Φ"),
    case("C2.2a", Group::Pairs, "sub-unital congruence, checked through its dilation"),
    case("T2.3", Group::Pairs, "Φ(B)Φ(A) = √Φ(AB) K √Φ(AB) U"),
    case("C2.4", Group::Pairs, "|Φ(A)Φ(B)| ≤ (Φ(AB) + VΦ(AB)V^*)/2"),
    case("C2.5", Group::Pairs, "|Φ(A)Φ(B)| ≺wlog Φ(AB)"),
    case("P2.6", Group::Pairs, "λ_j[Φ(A^p)]λ_j[Φ(A^q)] ≤ λ_j[Φ(A^{p+q})]"),
    case("tri2.8", Group::Kernel, "|A+B| ≤ (|A|+|B|+V^*(|A^*|+|B^*|)V)/2"),
    case("axiom2", Group::Means, "(X^*AX) #α (X^*BX) = X^*(A #α B)X"),
    case("reiteration", Group::Means, "(A #x B) #z (A #y B) = A #_{x(1−z)+yz} B"),
    case("monotony", Group::Means, "B_i ≤ A_i ⇒ B_0 #α B_1 ≤ A_0 #α A_1"),
    case("concavity", Group::Means, "joint concavity of #α"),
    case("AH3.1", Group::Means, "‖(A #α B)^s‖ ≤ ‖A^s #α B^s‖"),
    case("L3.2", Group::Means, "A^{-r} #_{r/(p+r)} B^p ≤ I"),
    case("L3.3", Group::Means, "A^{-r} #_{(1+r)/(p+r)} B^p ≤ B ≤ A"),
    case("F3.4", Group::Means, "A^{(p+r)/q} ≥ (A^{r/2}B^pA^{r/2})^{1/q}"),
    case("kwong", Group::Means, "A² ≥ (AB²A)^{1/2}"),
    case("C2.4x", Group::Control, "C2.4 on non-concave monotone pairs (not asserted)"),
    case("C2.5x", Group::Control, "C2.5 on non-concave monotone pairs (not asserted)"),
    case("neg-T2.1", Group::Control, "T2.1 on anti-monotone pairs (expected to fail, not asserted)"),
    case("F3.4-sharp", Group::Control, "Furuta at q = 0.9·(p+r)/(1+r) (expected to fail, not asserted)"),
    CaseSpec { id: "remark", group: Group::Search, single_shot: true, summary: "the unitary cannot be dropped" },
];

pub fn lookup(id: &str) -> Result<&'static CaseSpec> {
    CASES.iter().find(|c| c.id == id).ok_or_else(|| Error::Parse(format!("unknown case id {id:?}")))
}

/// User-fixed exponents replacing the sampled ones.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ExponentOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
}

impl ExponentOverrides {
    pub fn is_empty(&self) -> bool {
        self.p.is_none() && self.q.is_none() && self.r.is_none()
    }
}

/// Rejects overrides that break a case's exponent constraints.
pub fn validate_overrides(id: &str, o: &ExponentOverrides) -> Result<()> {
    lookup(id)?;
    for v in [o.p, o.q, o.r].into_iter().flatten() {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::Precondition(format!("exponents must be finite and non-negative, got {v}")));
        }
    }
    let bad = |msg: &str| Err(Error::Precondition(format!("{id}: {msg}")));
    match id {
        "T1.1" | "ineq1.1" => {
            if let (Some(p), Some(q)) = (o.p, o.q) {
                if p > q {
                    return bad("need p ≤ q");
                }
            }
        }
        "P1.3" => {
            if let (Some(p), Some(q), Some(r)) = (o.p, o.q, o.r) {
                if p.min(r) > q / 2.0 || p.max(r) > q {
                    return bad("need min(p,r) ≤ q/2 and max(p,r) ≤ q");
                }
            }
        }
        "P1.4" => {
            if let Some(q) = o.q {
                if o.p.is_some_and(|p| p > q) || o.r.is_some_and(|r| r > q) {
                    return bad("need q ≥ p, r");
                }
            }
        }
        "choi-low" if o.p.is_some_and(|p| p > 1.0) => return bad("need p ∈ [0, 1]"),
        "choi-high" if o.p.is_some_and(|p| !(1.0..=2.0).contains(&p)) => return bad("need p ∈ [1, 2]"),
        "L3.2" | "L3.3" => {
            if o.p == Some(0.0) || o.r == Some(0.0) {
                return bad("need p, r > 0");
            }
            if id == "L3.3" && o.p.is_some_and(|p| p < 1.0) {
                return bad("need p ≥ 1");
            }
        }
        "F3.4" => {
            if o.p.is_some_and(|p| p < 1.0) {
                return bad("need p ≥ 1");
            }
            if let (Some(p), Some(r), Some(q)) = (o.p, o.r, o.q) {
                FurutaParams::new(p, r, q).validate()?;
            }
        }
        _ => {}
    }
    Ok(())
}

/// Everything a single trial depends on.
#[derive(Debug, Clone, Copy)]
pub struct TrialContext {
    pub seed: u64,
    pub dim: usize,
    pub trial: u64,
    pub tol: ToleranceConfig,
    pub overrides: ExponentOverrides,
}

impl TrialContext {
    pub fn rng(&self, id: &str) -> SplitMix64 {
        SplitMix64::for_trial(self.seed, &format!("{id}#{}", self.dim), self.trial)
    }
}

const SECTION1_MAPS: [MapKind; 4] = [MapKind::Compression, MapKind::Schur, MapKind::Pinching, MapKind::Congruence];
const UNITAL_MAPS: [MapKind; 4] = [MapKind::Compression, MapKind::Schur, MapKind::Pinching, MapKind::Mixture];

fn pick_map(kinds: &[MapKind], dim: usize, rng: &mut SplitMix64) -> PositiveMapSpec {
    let kind = kinds[rng.range(0, kinds.len() - 1)];
    let out = rng.range(1, dim);
    random_map(kind, dim, out, rng)
}

fn random_projection(dim: usize, rng: &mut SplitMix64) -> PsdMatrix {
    let rank = rng.range(1, dim);
    let vals: Vec<f64> = (0..dim).map(|i| if i < rank { 1.0 } else { 0.0 }).collect();
    psd_with_spectrum(&vals, rng)
}

fn weight(rng: &mut SplitMix64) -> MeanWeight {
    MeanWeight::new(rng.uniform(0.0, 1.0)).expect("in range")
}

fn strict_psd(dim: usize, rng: &mut SplitMix64) -> PsdMatrix {
    random_psd(dim, 0.05, 3.0, rng)
}

fn with_id(mut r: InequalityCheckReport, id: &str) -> InequalityCheckReport {
    r.case_id = id.to_string();
    r
}

fn exploratory(mut r: InequalityCheckReport, id: &str) -> InequalityCheckReport {
    r.case_id = id.to_string();
    r.asserted = false;
    r
}

/// Generates the instance for `(id, ctx)` and checks it.
pub fn run_trial(id: &str, ctx: &TrialContext) -> Result<InequalityCheckReport> {
    let spec = lookup(id)?;
    let mut rng = ctx.rng(id);
    let rng = &mut rng;
    let (n, tol, o) = (ctx.dim, &ctx.tol, ctx.overrides);
    let report = match spec.id {
        "T1.1" | "ineq1.1" => {
            let phi = pick_map(&SECTION1_MAPS, n, rng);
            let a = random_psd(n, 0.0, 3.0, rng);
            let (mut p, mut q) = (rng.uniform(0.0, 3.0), rng.uniform(0.0, 3.0));
            if p > q {
                std::mem::swap(&mut p, &mut q);
            }
            let (p, q) = match (o.p, o.q) {
                (Some(p), Some(q)) => (p, q),
                (Some(p), None) => (p, q.max(p)),
                (None, Some(q)) => (p.min(q), q),
                (None, None) => (p, q),
            };
            checks::check_t11(&phi, &a, p, q, tol, id == "ineq1.1")?
        }
        "C1.2" => {
            let phi = pick_map(&SECTION1_MAPS, n, rng);
            let a = random_psd(n, 0.0, 3.0, rng);
            let (p, q) = (rng.uniform(0.0, 3.0), rng.uniform(0.0, 3.0));
            checks::check_c12(&phi, &a, o.p.unwrap_or(p), o.q.unwrap_or(q), tol)?
        }
        "P1.3" => {
            let phi = pick_map(&SECTION1_MAPS, n, rng);
            let a = random_psd(n, 0.0, 3.0, rng);
            let q = o.q.unwrap_or_else(|| rng.uniform(0.0, 3.0));
            let mut p = rng.uniform(0.0, q);
            let mut r = rng.uniform(0.0, q);
            if p.min(r) > q / 2.0 {
                if p < r {
                    p = rng.uniform(0.0, q / 2.0);
                } else {
                    r = rng.uniform(0.0, q / 2.0);
                }
            }
            checks::check_p13(&phi, &a, o.p.unwrap_or(p), q, o.r.unwrap_or(r), tol)?
        }
        "P1.4" => {
            let phi = pick_map(&SECTION1_MAPS, n, rng);
            let a = random_psd(n, 0.0, 3.0, rng);
            let q = o.q.unwrap_or_else(|| rng.uniform(0.0, 3.0));
            let (p, r) = (rng.uniform(0.0, q), rng.uniform(0.0, q));
            checks::check_p14(&phi, &a, o.p.unwrap_or(p), q, o.r.unwrap_or(r), tol)?
        }
        "BK" => {
            let x = gaussian_matrix(n, n, rng);
            let y = gaussian_matrix(n, n, rng);
            checks::check_bk(&x, &y, tol)?
        }
        "kadison" => {
            let phi = pick_map(&SECTION1_MAPS, n, rng);
            checks::check_kadison(&phi, &random_hermitian(n, rng), tol)?
        }
        "choi-low" | "choi-high" => {
            let phi = pick_map(&UNITAL_MAPS, n, rng);
            let a = random_psd(n, 0.0, 3.0, rng);
            let p = if id == "choi-low" { rng.uniform(0.0, 1.0) } else { rng.uniform(1.0, 2.0) };
            checks::check_choi(&phi, &a, o.p.unwrap_or(p), tol)?
        }
        "T2.1" | "eq2.1a" | "eq2.1b" => {
            let concave = rng.bernoulli(0.5);
            let pair = random_monotone_pair(n, rng, concave)?;
            let e = random_projection(n, rng);
            match id {
                "T2.1" => checks::check_t21(&pair, &e, tol)?,
                "eq2.1a" => checks::check_eq21(&pair, &e, Eq21::Pair, tol)?,
                _ => checks::check_eq21(&pair, &e, Eq21::Triple, tol)?,
            }
        }
        "C2.2" => {
            let phi = pick_map(&UNITAL_MAPS, n, rng);
            let concave = rng.bernoulli(0.5);
            let pair = random_monotone_pair(n, rng, concave)?;
            checks::check_c22(&phi, &pair, tol)?
        }
        "C2.2a" => {
            let concave = rng.bernoulli(0.5);
            let pair = random_monotone_pair(n, rng, concave)?;
            let z = random_psd(n, 0.0, 1.0, rng);
            checks::check_c22a_dilation(&z, &pair, tol)?
        }
        "T2.3" | "C2.4" | "C2.5" => {
            let phi = pick_map(&UNITAL_MAPS, n, rng);
            let pair = random_monotone_pair(n, rng, true)?;
            match id {
                "T2.3" => checks::factorize_t23(&phi, &pair, tol)?.report,
                "C2.4" => checks::check_c24(&phi, &pair, tol)?,
                _ => checks::check_c25(&phi, &pair, tol)?,
            }
        }
        "C2.4x" | "C2.5x" => {
            let phi = pick_map(&UNITAL_MAPS, n, rng);
            let pair = random_monotone_pair(n, rng, false)?;
            let pair = MonotonePair { concave: false, ..pair };
            let r = if id == "C2.4x" { checks::check_c24(&phi, &pair, tol)? } else { checks::check_c25(&phi, &pair, tol)? };
            exploratory(r, id)
        }
        "P2.6" => {
            let phi = pick_map(&UNITAL_MAPS, n, rng);
            let a = random_psd(n, 0.0, 3.0, rng);
            let (p, q) = (rng.uniform(0.0, 3.0), rng.uniform(0.0, 3.0));
            checks::check_p26(&phi, &a, o.p.unwrap_or(p), o.q.unwrap_or(q), tol)?
        }
        "tri2.8" => {
            let a = gaussian_matrix(n, n, rng);
            let b = gaussian_matrix(n, n, rng);
            checks::check_triangle_28(&a, &b, tol)?
        }
        "neg-T2.1" => {
            let pair = random_anti_monotone_pair(n, rng);
            let e = random_projection(n, rng);
            exploratory(checks::check_t21(&pair, &e, tol)?, id)
        }
        "axiom2" => {
            let (a, b) = (strict_psd(n, rng), strict_psd(n, rng));
            let alpha = weight(rng);
            let x = gaussian_matrix(n, n, rng);
            means::check_congruence_axiom(&a, &b, alpha, &x, tol)?
        }
        "reiteration" => {
            let (a, b) = (strict_psd(n, rng), strict_psd(n, rng));
            let (x, y, z) = (weight(rng), weight(rng), weight(rng));
            means::check_reiteration(&a, &b, x, y, z, tol)?
        }
        "monotony" | "concavity" => {
            let (a0, b0) = means::random_ordered_pair(n, rng, true);
            let (a1, b1) = means::random_ordered_pair(n, rng, true);
            let alpha = weight(rng);
            if id == "monotony" {
                means::check_mean_monotony((&a0, &a1), (&b0, &b1), alpha, tol)?
            } else {
                let lambda = [0.25, 0.5, 0.75][rng.range(0, 2)];
                means::check_mean_concavity((&a0, &a1), (&b0, &b1), alpha, lambda, tol)?
            }
        }
        "AH3.1" => {
            let (a, b) = (strict_psd(n, rng), strict_psd(n, rng));
            let alpha = weight(rng);
            let s = rng.uniform(0.02, 0.98);
            means::check_ando_hiai(&a, &b, alpha, s, tol)?
        }
        "L3.2" | "L3.3" => {
            let (a, b) = means::random_ordered_pair(n, rng, true);
            let p = if id == "L3.2" { rng.uniform(0.1, 3.0) } else { rng.uniform(1.0, 3.0) };
            let r = rng.uniform(0.1, 3.0);
            with_id(means::check_mean_lemmas(&a, &b, o.p.unwrap_or(p), o.r.unwrap_or(r), tol)?, id)
        }
        "F3.4" => {
            let (a, b) = means::random_ordered_pair(n, rng, false);
            let p = o.p.unwrap_or_else(|| rng.uniform(1.0, 3.0));
            let r = o.r.unwrap_or_else(|| rng.uniform(0.0, 3.0));
            let mut params = FurutaParams::new(p, r, 0.0);
            let factor = rng.uniform(1.0, 2.0);
            params.q = o.q.unwrap_or(factor * params.q_bound());
            means::check_furuta(&a, &b, params, tol, true)?
        }
        "kwong" => {
            let (a, b) = means::random_ordered_pair(n, rng, false);
            with_id(means::check_furuta(&a, &b, FurutaParams::new(2.0, 2.0, 2.0), tol, false)?, id)
        }
        "F3.4-sharp" => {
            let out = means::furuta_boundary_search(50, n, 0.9, rng, tol)?;
            let params = out.best_params;
            InequalityCheckReport::builder(id, tol)
                .margin(Margin::new("F3.4", out.best_gap, out.best_slack))
                .metric("samples", out.samples as f64)
                .metric("violations", out.violations as f64)
                .instance(
                    crate::verify::InstanceDigest::new(vec![n])
                        .exponent("p", params.p)
                        .exponent("q", params.q)
                        .exponent("r", params.r),
                )
                .exploratory()
                .build()
        }
        "remark" => search_remark_counterexample(&SearchGrid::default(), tol)?.1,
        other => return Err(Error::Parse(format!("case {other:?} has no generator"))),
    };
    let mut report = report;
    if !spec.single_shot {
        report.instance.seed = Some(ctx.seed);
        report.instance.trial = Some(ctx.trial);
    }
    Ok(report)
}
