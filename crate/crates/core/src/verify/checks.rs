//! One checker per inequality. Existential "for some unitary V" statements are
//! decided through eigenvalue dominance and certified by frame alignment.

use crate::error::{Error, Result};
use crate::linalg::{
    align_witness, eigenvalues_desc, frac_power, loewner_leq, op_norm, operator_abs, pinv_sqrt, polar_decompose,
    singular_values_desc, sqrt_psd, trace_norm, unitary_conjugate, ComplexMatrix, HermitianMatrix, PsdMatrix,
    SpectrumList, ToleranceConfig, WitnessCertificate, WitnessKind,
};
use crate::linalg::spectrum::{dominance_gap, weak_majorization_gap};
use crate::pairs::MonotonePair;
use crate::posmaps::{apply_power, dilation_projection, PositiveMapSpec, Unitality, PROJECTION_TOL};
use crate::verify::report::{InequalityCheckReport, InstanceDigest, Margin, ReportBuilder};

/// Relative bound for reconstruction and contraction checks of the factorization.
pub const FACTOR_TOL: f64 = 1e-8;
/// Relative bound for spectra that must agree exactly.
pub const SPECTRAL_AGREEMENT: f64 = 1e-8;

fn require_unitality(phi: &PositiveMapSpec, tol: &ToleranceConfig, unital_only: bool) -> Result<Unitality> {
    let u = phi.classify_unitality(tol)?;
    match u {
        Unitality::Unital => Ok(u),
        Unitality::SubUnital if !unital_only => Ok(u),
        _ => Err(Error::Precondition(format!(
            "map must be {}, classified {u:?}",
            if unital_only { "unital" } else { "unital or sub-unital" }
        ))),
    }
}

fn spectrum(h: &HermitianMatrix, tol: &ToleranceConfig) -> Result<SpectrumList> {
    eigenvalues_desc(h, tol)
}

/// Margin of `λ_j(x) ≤ λ_j(y)` for all `j`.
pub fn dominance_margin(name: &str, x: &SpectrumList, y: &SpectrumList, tol: &ToleranceConfig) -> Margin {
    let (gap, _) = dominance_gap(x, y);
    Margin::new(name, gap, tol.psd_slack(&[x.abs_max(), y.abs_max()]))
}

/// Margin of the Ky Fan partial-sum condition.
pub fn kyfan_margin(name: &str, x: &SpectrumList, y: &SpectrumList, tol: &ToleranceConfig) -> Margin {
    let (gap, _) = weak_majorization_gap(x, y);
    let sx: f64 = x.values().iter().map(|v| v.abs()).sum();
    let sy: f64 = y.values().iter().map(|v| v.abs()).sum();
    Margin::new(name, gap, tol.psd_slack(&[sx, sy]))
}

/// Relative partial-product margin of `x ≺_wlog y`, each `y` factor inflated by `1 + 1e-9`.
/// Values below `1e-12 · scale` are treated as zeros.
pub fn wlog_margin(name: &str, x: &SpectrumList, y: &SpectrumList) -> Margin {
    let scale = x.abs_max().max(y.abs_max());
    let x = x.snap_to_zero(1e-12 * scale);
    let y = y.snap_to_zero(1e-12 * scale);
    let (mut px, mut py) = (1.0f64, 1.0f64);
    let mut gap = f64::INFINITY;
    for (a, b) in x.values().iter().zip(y.values()) {
        px *= a;
        py *= b * (1.0 + 1e-9);
        let denom = px.max(py).max(f64::MIN_POSITIVE);
        gap = gap.min((py - px) / denom);
    }
    Margin::new(name, gap, 0.0)
}

/// Aligns `x ≤ V y V^*`; a dominance failure yields no witness.
fn try_witness(x: &HermitianMatrix, y: &HermitianMatrix, tol: &ToleranceConfig) -> Result<Option<WitnessCertificate>> {
    match align_witness(x, y, tol) {
        Ok(w) => Ok(Some(w)),
        Err(Error::Dominance { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn attach_witness(mut b: ReportBuilder, w: Option<WitnessCertificate>) -> ReportBuilder {
    if let Some(w) = w {
        b.push_margin(Margin::new("witness", w.residual, w.slack));
        b.set_witness(w);
    }
    b
}

fn map_digest(phi: &PositiveMapSpec, dims: Vec<usize>) -> InstanceDigest {
    InstanceDigest { map_hash: Some(phi.hash()), ..InstanceDigest::new(dims) }
}

fn check_exponents(p: f64, q: f64) -> Result<()> {
    if !(p >= 0.0 && q >= 0.0) || !p.is_finite() || !q.is_finite() {
        return Err(Error::Precondition(format!("exponents must be non-negative, got p = {p}, q = {q}")));
    }
    Ok(())
}

/// `|Φ(A^p)Φ(A^q)| ≤ Φ(A^{p+q})` for `0 ≤ p ≤ q`, together with
/// `|Φ(A^p)Φ(A^q)| ≤ Φ(A^q)^{1+p/q}` when `q > 0`. With `strengthened` the
/// report is filed under `ineq1.1` and also carries `Φ(A^q)^{1+p/q} ≤ Φ(A^{p+q})`.
pub fn check_t11(
    phi: &PositiveMapSpec,
    a: &PsdMatrix,
    p: f64,
    q: f64,
    tol: &ToleranceConfig,
    strengthened: bool,
) -> Result<InequalityCheckReport> {
    check_exponents(p, q)?;
    if p > q {
        return Err(Error::Precondition(format!("need p ≤ q, got p = {p}, q = {q}")));
    }
    require_unitality(phi, tol, false)?;
    let fp = apply_power(phi, a, p, tol)?;
    let fq = apply_power(phi, a, q, tol)?;
    let fpq = apply_power(phi, a, p + q, tol)?;
    let abs = operator_abs(&fp.as_matrix().matmul(fq.as_matrix()), tol)?;
    let mut b = InequalityCheckReport::builder(if strengthened { "ineq1.1" } else { "T1.1" }, tol)
        .instance(map_digest(phi, vec![a.dim(), phi.out_dim()]).exponent("p", p).exponent("q", q));
    if !strengthened {
        b.push_margin(Margin::from_loewner("T1.1", &loewner_leq(&abs, &fpq, tol)?));
    }
    if q > 0.0 {
        let mid = frac_power(&fq, 1.0 + p / q)?;
        b.push_margin(Margin::from_loewner("1.1", &loewner_leq(&abs, &mid, tol)?));
        if strengthened {
            b.push_margin(Margin::from_loewner("1.2", &loewner_leq(&mid, &fpq, tol)?));
        }
    } else if strengthened {
        b.push_margin(Margin::from_loewner("T1.1", &loewner_leq(&abs, &fpq, tol)?));
    }
    let report = b.build();
    if report.gap.abs() <= report.slack {
        // near equality: sample the multiplicative-domain defect
        let f1 = apply_power(phi, a, 1.0, tol)?;
        let mut defect: f64 = 0.0;
        for t in [0.5, 2.0] {
            let lhs = apply_power(phi, a, t, tol)?;
            let rhs = frac_power(&f1, t)?;
            defect = defect.max((lhs.as_matrix() - rhs.as_matrix()).max_abs());
        }
        let mut report = report;
        report.metrics.insert("multiplicative_defect".into(), defect);
        return Ok(report);
    }
    Ok(report)
}

/// `Φ(H)^2 ≤ Φ(H^2)` for Hermitian `H`.
pub fn check_kadison(phi: &PositiveMapSpec, h: &HermitianMatrix, tol: &ToleranceConfig) -> Result<InequalityCheckReport> {
    require_unitality(phi, tol, false)?;
    let fh = phi.apply(h)?;
    let lhs = HermitianMatrix::from_hermitian_part(&fh.as_matrix().matmul(fh.as_matrix()));
    let rhs = phi.apply(&HermitianMatrix::from_hermitian_part(&h.as_matrix().matmul(h.as_matrix())))?;
    Ok(InequalityCheckReport::builder("kadison", tol)
        .margin(Margin::from_loewner("kadison", &loewner_leq(&lhs, &rhs, tol)?))
        .instance(map_digest(phi, vec![h.dim(), phi.out_dim()]))
        .build())
}

/// `Φ(A^p) ≤ Φ(A)^p` for `p ∈ [0, 1]` and `Φ(A)^p ≤ Φ(A^p)` for `p ∈ [1, 2]`.
pub fn check_choi(phi: &PositiveMapSpec, a: &PsdMatrix, p: f64, tol: &ToleranceConfig) -> Result<InequalityCheckReport> {
    if !(0.0..=2.0).contains(&p) {
        return Err(Error::Precondition(format!("Choi's inequality needs p ∈ [0, 2], got {p}")));
    }
    require_unitality(phi, tol, false)?;
    let f_pow = apply_power(phi, a, p, tol)?;
    let pow_f = frac_power(&phi.apply_psd(a, tol)?, p)?;
    let (id, cmp) = if p <= 1.0 {
        ("choi-low", loewner_leq(&f_pow, &pow_f, tol)?)
    } else {
        ("choi-high", loewner_leq(&pow_f, &f_pow, tol)?)
    };
    Ok(InequalityCheckReport::builder(id, tol)
        .margin(Margin::from_loewner(id, &cmp))
        .instance(map_digest(phi, vec![a.dim(), phi.out_dim()]).exponent("p", p))
        .build())
}

/// `λ_j(|Φ(A^p)Φ(A^q)|) ≤ λ_j(Φ(A^{p+q}))` with the aligning unitary.
pub fn check_c12(phi: &PositiveMapSpec, a: &PsdMatrix, p: f64, q: f64, tol: &ToleranceConfig) -> Result<InequalityCheckReport> {
    check_exponents(p, q)?;
    let fp = apply_power(phi, a, p, tol)?;
    let fq = apply_power(phi, a, q, tol)?;
    let fpq = apply_power(phi, a, p + q, tol)?;
    let abs = operator_abs(&fp.as_matrix().matmul(fq.as_matrix()), tol)?;
    let b = InequalityCheckReport::builder("C1.2", tol)
        .margin(dominance_margin("dominance", abs.eigenvalues(), fpq.eigenvalues(), tol))
        .instance(map_digest(phi, vec![a.dim(), phi.out_dim()]).exponent("p", p).exponent("q", q));
    Ok(attach_witness(b, try_witness(&abs, &fpq, tol)?).build())
}

fn triple_product(phi: &PositiveMapSpec, a: &PsdMatrix, p: f64, q: f64, r: f64, tol: &ToleranceConfig) -> Result<(ComplexMatrix, PsdMatrix)> {
    let x = apply_power(phi, a, p, tol)?
        .as_matrix()
        .matmul(apply_power(phi, a, q, tol)?.as_matrix())
        .matmul(apply_power(phi, a, r, tol)?.as_matrix());
    Ok((x, apply_power(phi, a, p + q + r, tol)?))
}

/// `|Φ(A^p)Φ(A^q)Φ(A^r)| ≤ V Φ(A^{p+q+r}) V^*` when `min(p,r) ≤ q/2` and `max(p,r) ≤ q`.
pub fn check_p13(phi: &PositiveMapSpec, a: &PsdMatrix, p: f64, q: f64, r: f64, tol: &ToleranceConfig) -> Result<InequalityCheckReport> {
    check_exponents(p, q)?;
    check_exponents(r, 0.0)?;
    if p.min(r) > q / 2.0 || p.max(r) > q {
        return Err(Error::Precondition(format!("need min(p,r) ≤ q/2 and max(p,r) ≤ q, got ({p}, {q}, {r})")));
    }
    let (x, y) = triple_product(phi, a, p, q, r, tol)?;
    let abs = operator_abs(&x, tol)?;
    let b = InequalityCheckReport::builder("P1.3", tol)
        .margin(dominance_margin("dominance", abs.eigenvalues(), y.eigenvalues(), tol))
        .instance(map_digest(phi, vec![a.dim(), phi.out_dim()]).exponent("p", p).exponent("q", q).exponent("r", r));
    Ok(attach_witness(b, try_witness(&abs, &y, tol)?).build())
}

/// Ky Fan consequence of the two-unitary average bound, for `q ≥ p, r`.
pub fn check_p14(phi: &PositiveMapSpec, a: &PsdMatrix, p: f64, q: f64, r: f64, tol: &ToleranceConfig) -> Result<InequalityCheckReport> {
    check_exponents(p, q)?;
    check_exponents(r, 0.0)?;
    if q < p || q < r {
        return Err(Error::Precondition(format!("need q ≥ p, r, got ({p}, {q}, {r})")));
    }
    let (x, y) = triple_product(phi, a, p, q, r, tol)?;
    let s = singular_values_desc(&x, tol)?;
    Ok(InequalityCheckReport::builder("P1.4", tol)
        .margin(kyfan_margin("kyfan", &s, y.eigenvalues(), tol))
        .instance(map_digest(phi, vec![a.dim(), phi.out_dim()]).exponent("p", p).exponent("q", q).exponent("r", r))
        .build())
}

/// `|XY^*| ≤ U (|X|^2 + |Y|^2)/2 U^*`.
pub fn check_bk(x: &ComplexMatrix, y: &ComplexMatrix, tol: &ToleranceConfig) -> Result<InequalityCheckReport> {
    if x.rows() != y.rows() || x.cols() != y.cols() || !x.is_square() {
        return Err(Error::Shape("Bhatia–Kittaneh needs square matrices of equal size".into()));
    }
    let abs = operator_abs(&x.matmul(&y.adjoint()), tol)?;
    let avg = HermitianMatrix::from_hermitian_part(&(&x.adjoint_mul(x) + &y.adjoint_mul(y)).scale(0.5));
    let ev = spectrum(&avg, tol)?;
    let b = InequalityCheckReport::builder("BK", tol)
        .margin(dominance_margin("dominance", abs.eigenvalues(), &ev, tol))
        .instance(InstanceDigest::new(vec![x.rows()]));
    Ok(attach_witness(b, try_witness(&abs, &avg, tol)?).build())
}

fn require_projection(e: &PsdMatrix, dim: usize) -> Result<()> {
    if e.dim() != dim {
        return Err(Error::Shape(format!("projection of size {} for a pair of size {dim}", e.dim())));
    }
    let m = e.as_matrix();
    let defect = (&m.matmul(m) - m).frobenius_norm();
    if defect > PROJECTION_TOL {
        return Err(Error::Precondition(format!("E is not a projection (‖E²−E‖ = {defect:.3e})")));
    }
    Ok(())
}

fn pair_digest(pair: &MonotonePair) -> InstanceDigest {
    InstanceDigest::new(vec![pair.dim()])
}

/// `|AEB| ≤ V|ABE|V^*` through `σ_j(AEB) ≤ σ_j(ABE)`.
pub fn check_t21(pair: &MonotonePair, e: &PsdMatrix, tol: &ToleranceConfig) -> Result<InequalityCheckReport> {
    require_projection(e, pair.dim())?;
    let (a, b, em) = (pair.a.as_matrix(), pair.b.as_matrix(), e.as_matrix());
    let aeb = operator_abs(&a.matmul(em).matmul(b), tol)?;
    let abe = operator_abs(&a.matmul(b).matmul(em), tol)?;
    let rb = InequalityCheckReport::builder("T2.1", tol)
        .margin(dominance_margin("dominance", aeb.eigenvalues(), abe.eigenvalues(), tol))
        .instance(pair_digest(pair));
    let mut rb = attach_witness(rb, try_witness(&aeb, &abe, tol)?);
    if !pair.concave && pair.generator.is_none() {
        rb = rb.note("pair taken without generator");
    }
    Ok(rb.build())
}

/// Which compressed Chebyshev display to check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Eq21 {
    /// `λ_j[(EAE)(EBE)] ≤ λ_j[EABE]`
    Pair,
    /// `λ_j[(EAE)(EBE)(EAE)] ≤ λ_j[EABAE]`
    Triple,
}

pub fn check_eq21(pair: &MonotonePair, e: &PsdMatrix, which: Eq21, tol: &ToleranceConfig) -> Result<InequalityCheckReport> {
    require_projection(e, pair.dim())?;
    let em = e.as_matrix();
    let eae = pair.a.congruence(em, tol)?;
    let ebe = pair.b.congruence(em, tol)?;
    let js = pair.joint_spectrum(tol)?;
    let (id, lhs, rhs) = match which {
        Eq21::Pair => {
            let lhs = eae.congruence(sqrt_psd(&ebe).as_matrix(), tol)?;
            let rhs = js.function(|a, b| a * b).congruence(em, tol)?;
            ("eq2.1a", lhs, rhs)
        }
        Eq21::Triple => {
            let lhs = ebe.congruence(eae.as_matrix(), tol)?;
            let rhs = js.function(|a, b| a * a * b).congruence(em, tol)?;
            ("eq2.1b", lhs, rhs)
        }
    };
    Ok(InequalityCheckReport::builder(id, tol)
        .margin(dominance_margin("dominance", lhs.eigenvalues(), rhs.eigenvalues(), tol))
        .instance(pair_digest(pair))
        .build())
}

/// `Φ(A)Φ(B)Φ(A) ≤ VΦ(ABA)V^*`; filed as `C2.2` for unital and `C2.2a` for
/// sub-unital maps.
pub fn check_c22(phi: &PositiveMapSpec, pair: &MonotonePair, tol: &ToleranceConfig) -> Result<InequalityCheckReport> {
    let u = require_unitality(phi, tol, false)?;
    let fa = phi.apply_psd(&pair.a, tol)?;
    let fb = phi.apply_psd(&pair.b, tol)?;
    let lhs = fb.congruence(fa.as_matrix(), tol)?;
    let aba = pair.joint_spectrum(tol)?.function(|a, b| a * a * b);
    let rhs = phi.apply_psd(&aba, tol)?;
    let id = if u == Unitality::Unital { "C2.2" } else { "C2.2a" };
    let b = InequalityCheckReport::builder(id, tol)
        .margin(dominance_margin("dominance", lhs.eigenvalues(), rhs.eigenvalues(), tol))
        .instance(map_digest(phi, vec![pair.dim(), phi.out_dim()]));
    Ok(attach_witness(b, try_witness(&lhs, &rhs, tol)?).build())
}

fn padded(s: &SpectrumList, n: usize) -> Vec<f64> {
    let mut v = s.values().to_vec();
    v.resize(n, 0.0);
    v
}

fn max_deviation(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

/// The sub-unital corollary for `X ↦ ZXZ`, `0 ≤ Z ≤ I`, cross-checked
/// against the projection dilating `Z^2`: the spectra of
/// `(EA_0E)(EB_0E)(EA_0E)` and `EA_0B_0A_0E` must reproduce the direct ones.
pub fn check_c22a_dilation(z: &PsdMatrix, pair: &MonotonePair, tol: &ToleranceConfig) -> Result<InequalityCheckReport> {
    let n = pair.dim();
    let phi = PositiveMapSpec::Congruence { z: z.as_matrix().clone(), sub_unital: true };
    let direct = check_c22(&phi, pair, tol)?;
    let fa = phi.apply_psd(&pair.a, tol)?;
    let fb = phi.apply_psd(&pair.b, tol)?;
    let lhs = fb.congruence(fa.as_matrix(), tol)?;
    let aba = pair.joint_spectrum(tol)?.function(|a, b| a * a * b);
    let rhs = phi.apply_psd(&aba, tol)?;

    let e = dilation_projection(&frac_power(z, 2.0)?, tol)?;
    let em = e.as_matrix();
    let zeros = ComplexMatrix::zeros(n, n);
    let lift = |m: &PsdMatrix| PsdMatrix::from_matrix(ComplexMatrix::direct_sum(m.as_matrix(), &zeros), tol);
    let (a0, b0, aba0) = (lift(&pair.a)?, lift(&pair.b)?, lift(&aba)?);
    let ea = a0.congruence(em, tol)?;
    let eb = b0.congruence(em, tol)?;
    let dil_lhs = eb.congruence(ea.as_matrix(), tol)?;
    let dil_rhs = aba0.congruence(em, tol)?;

    let scale = rhs.norm().max(lhs.norm()).max(1.0);
    let dev_l = max_deviation(&padded(lhs.eigenvalues(), 2 * n), dil_lhs.eigenvalues().values());
    let dev_r = max_deviation(&padded(rhs.eigenvalues(), 2 * n), dil_rhs.eigenvalues().values());
    let proj_defect = (&em.matmul(em) - em).frobenius_norm();

    let mut b = InequalityCheckReport::builder("C2.2a", tol).instance(direct.instance.clone());
    for m in direct.margins {
        b.push_margin(m);
    }
    if let Some(w) = direct.witness {
        b.set_witness(w);
    }
    Ok(b.margin(Margin::new("projection", -proj_defect, 1e-9))
        .margin(Margin::new("dilation-left", -dev_l / scale, SPECTRAL_AGREEMENT))
        .margin(Margin::new("dilation-right", -dev_r / scale, SPECTRAL_AGREEMENT))
        .margin(dominance_margin("dilation-dominance", dil_lhs.eigenvalues(), dil_rhs.eigenvalues(), tol))
        .build())
}

/// Factorization `Φ(B)Φ(A) = √P K √P U` with `P = Φ(AB)`.
#[derive(Debug, Clone)]
pub struct Factorization {
    pub k: ComplexMatrix,
    pub u: ComplexMatrix,
    pub report: InequalityCheckReport,
}

/// Builds `U` from the aligning unitary of `Φ(A)Φ(BA^{-1})Φ(A) ≤ VΦ(AB)V^*`
/// (`U = V^*`) and `K = P^{+1/2} Φ(B)Φ(A) U^* P^{+1/2}`.
pub fn factorize_t23(phi: &PositiveMapSpec, pair: &MonotonePair, tol: &ToleranceConfig) -> Result<Factorization> {
    if !pair.concave {
        return Err(Error::Precondition("factorization needs a concave pair".into()));
    }
    require_unitality(phi, tol, true)?;
    let js = pair.joint_spectrum(tol)?;
    let amax = js.a.iter().cloned().fold(0.0, f64::max);
    let amin = js.a.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(amin > crate::means::STRICT_POSITIVITY * amax) {
        return Err(Error::Singular(format!("A is not invertible (λ_min = {amin:.3e})")));
    }
    let p = phi.apply_psd(&js.function(|a, b| a * b), tol)?;
    let fa = phi.apply_psd(&pair.a, tol)?;
    let fb = phi.apply_psd(&pair.b, tol)?;
    let fbai = phi.apply_psd(&js.function(|a, b| b / a), tol)?;
    let lower = fbai.congruence(fa.as_matrix(), tol)?;
    let v = align_witness(&lower, &p, tol)?;
    let u = v.matrix.adjoint();

    let x = fb.as_matrix().matmul(fa.as_matrix());
    let ps = pinv_sqrt(&p, 1e-12);
    let k = ps.as_matrix().matmul(&x).matmul(&v.matrix).matmul(ps.as_matrix());
    let sq = sqrt_psd(&p);
    let recon = sq.as_matrix().matmul(&k).matmul(sq.as_matrix()).matmul(&u);
    let residual = (&recon - &x).frobenius_norm() / x.frobenius_norm().max(f64::MIN_POSITIVE);
    let knorm = op_norm(&k, tol)?;

    // positivity of [[P, X], [X^*, U^*PU]]
    let upu = unitary_conjugate(&v.matrix, &p);
    let block = HermitianMatrix::from_hermitian_part(&ComplexMatrix::from_blocks(p.as_matrix(), &x, &x.adjoint(), upu.as_matrix())?);
    let block_min = spectrum(&block, tol)?.min();

    let witness = WitnessCertificate {
        kind: WitnessKind::Pair,
        matrix: k.clone(),
        second: Some(u.clone()),
        residual: -residual,
        slack: FACTOR_TOL,
    };
    let report = InequalityCheckReport::builder("T2.3", tol)
        .margin(Margin::new("C2.2-step", v.residual, v.slack))
        .margin(Margin::new("contraction", 1.0 - knorm, FACTOR_TOL))
        .margin(Margin::new("reconstruction", -residual, FACTOR_TOL))
        .margin(Margin::new("block", block_min, tol.psd_slack(&[p.norm()])))
        .metric("k_norm", knorm)
        .metric("reconstruction", residual)
        .witness(witness)
        .instance(map_digest(phi, vec![pair.dim(), phi.out_dim()]))
        .build();
    Ok(Factorization { k, u, report })
}

struct ProductData {
    y: ComplexMatrix,
    sigma: SpectrumList,
    p: PsdMatrix,
}

fn product_data(phi: &PositiveMapSpec, pair: &MonotonePair, tol: &ToleranceConfig) -> Result<ProductData> {
    require_unitality(phi, tol, true)?;
    let fa = phi.apply_psd(&pair.a, tol)?;
    let fb = phi.apply_psd(&pair.b, tol)?;
    let y = fa.as_matrix().matmul(fb.as_matrix());
    let sigma = singular_values_desc(&y, tol)?;
    let p = phi.apply_psd(&pair.product(tol)?, tol)?;
    Ok(ProductData { y, sigma, p })
}

fn norm_margin(name: &str, lhs: f64, rhs: f64, tol: &ToleranceConfig) -> Margin {
    Margin::new(name, rhs - lhs, tol.psd_slack(&[rhs]))
}

/// `|Φ(A)Φ(B)| ≤ (Φ(AB) + VΦ(AB)V^*)/2` with `V = W^*U^*` (`W` the unitary
/// polar factor of `Φ(A)Φ(B)`, `U` from the factorization), plus the Ky Fan
/// and symmetric-norm consequences. Non-concave pairs run exploratorily.
pub fn check_c24(phi: &PositiveMapSpec, pair: &MonotonePair, tol: &ToleranceConfig) -> Result<InequalityCheckReport> {
    let d = product_data(phi, pair, tol)?;
    let pm = d.p.as_matrix();
    let mut b = InequalityCheckReport::builder("C2.4", tol)
        .margin(kyfan_margin("kyfan", &d.sigma, d.p.eigenvalues(), tol))
        .margin(norm_margin("operator-norm", d.sigma.max(), d.p.norm(), tol))
        .margin(norm_margin("trace-norm", d.sigma.values().iter().sum(), d.p.trace_re(), tol))
        .margin(norm_margin("frobenius-norm", d.y.frobenius_norm(), pm.frobenius_norm(), tol))
        .instance(map_digest(phi, vec![pair.dim(), phi.out_dim()]));
    if pair.concave {
        let f = factorize_t23(phi, pair, tol)?;
        let w = polar_decompose(&d.y, tol)?.unitary;
        let v = w.adjoint().matmul(&f.u.adjoint());
        let avg = d.p.as_hermitian().add(&unitary_conjugate(&v, d.p.as_hermitian())).scale(0.5);
        let abs = operator_abs(&d.y, tol)?;
        let cmp = loewner_leq(&abs, &avg, tol)?;
        b = b.margin(Margin::from_loewner("C2.4", &cmp)).witness(WitnessCertificate {
            kind: WitnessKind::Unitary,
            matrix: v,
            second: None,
            residual: cmp.gap,
            slack: cmp.slack,
        });
    } else {
        b = b.exploratory().note("non-concave pair: outcome recorded, not asserted");
    }
    Ok(b.build())
}

/// `|Φ(A)Φ(B)| ≺_wlog Φ(AB)`, with the implied Ky Fan condition.
pub fn check_c25(phi: &PositiveMapSpec, pair: &MonotonePair, tol: &ToleranceConfig) -> Result<InequalityCheckReport> {
    let d = product_data(phi, pair, tol)?;
    let mut b = InequalityCheckReport::builder("C2.5", tol)
        .margin(wlog_margin("wlog", &d.sigma, d.p.eigenvalues()))
        .margin(kyfan_margin("kyfan", &d.sigma, d.p.eigenvalues(), tol))
        .instance(map_digest(phi, vec![pair.dim(), phi.out_dim()]));
    if !pair.concave {
        b = b.exploratory().note("non-concave pair: outcome recorded, not asserted");
    }
    Ok(b.build())
}

/// `λ_j[Φ(A^p)] λ_j[Φ(A^q)] ≤ λ_j[Φ(A^{p+q})]`, and for `j = 1` the route
/// through the scalar Young inequality and norm Jensen inequality.
pub fn check_p26(phi: &PositiveMapSpec, a: &PsdMatrix, p: f64, q: f64, tol: &ToleranceConfig) -> Result<InequalityCheckReport> {
    check_exponents(p, q)?;
    require_unitality(phi, tol, true)?;
    let fp = apply_power(phi, a, p, tol)?;
    let fq = apply_power(phi, a, q, tol)?;
    let fpq = apply_power(phi, a, p + q, tol)?;
    let prod: Vec<f64> = fp.eigenvalues().values().iter().zip(fq.eigenvalues().values()).map(|(x, y)| x * y).collect();
    let prod = SpectrumList::from_unsorted(prod);
    let mut b = InequalityCheckReport::builder("P2.6", tol)
        .margin(Margin::new(
            "product",
            dominance_gap(&prod, fpq.eigenvalues()).0,
            tol.psd_slack(&[prod.abs_max(), fpq.norm()]),
        ))
        .instance(map_digest(phi, vec![a.dim(), phi.out_dim()]).exponent("p", p).exponent("q", q));
    if p > 0.0 && q > 0.0 {
        let (np, nq, npq) = (fp.norm(), fq.norm(), fpq.norm());
        let s = p + q;
        let young = p / s * np.powf(s / p) + q / s * nq.powf(s / q);
        if young.is_finite() {
            let slack = tol.psd_slack(&[young, npq]);
            b = b.margin(Margin::new("young", young - np * nq, slack)).margin(Margin::new("jensen", npq - young, slack));
        } else {
            b = b.note("Young route overflowed; skipped");
        }
    }
    Ok(b.build())
}

/// `|A+B| ≤ (|A| + |B| + V^*(|A^*| + |B^*|)V)/2` with `V` the partial
/// isometry of `A+B`, and `‖A+B‖_1 ≤ ‖A‖_1 + ‖B‖_1`.
pub fn check_triangle_28(a: &ComplexMatrix, b: &ComplexMatrix, tol: &ToleranceConfig) -> Result<InequalityCheckReport> {
    if !a.is_square() || a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::Shape("triangle inequality needs square matrices of equal size".into()));
    }
    let s = a + b;
    let polar = polar_decompose(&s, tol)?;
    let v = polar.isometry;
    let star = operator_abs(&a.adjoint(), tol)?.add(&operator_abs(&b.adjoint(), tol)?, tol)?;
    let plain = operator_abs(a, tol)?.add(&operator_abs(b, tol)?, tol)?;
    let rhs = plain.as_hermitian().add(&star.as_hermitian().congruence(&v)).scale(0.5);
    let cmp = loewner_leq(&polar.modulus, &rhs, tol)?;
    let (ts, ta, tb) = (trace_norm(&s, tol)?, trace_norm(a, tol)?, trace_norm(b, tol)?);
    Ok(InequalityCheckReport::builder("tri2.8", tol)
        .margin(Margin::from_loewner("tri2.8", &cmp))
        .margin(norm_margin("trace-norm", ts, ta + tb, tol))
        .witness(WitnessCertificate { kind: WitnessKind::PartialIsometry, matrix: v, second: None, residual: cmp.gap, slack: cmp.slack })
        .instance(InstanceDigest::new(vec![a.rows()]))
        .build())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairs::{make_power_pair, random_monotone_pair};
    use crate::posmaps::{random_map, MapKind};
    use crate::rng::{gaussian_matrix, random_psd, SplitMix64};

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn t11_zero_exponents_gap_zero() {
        let mut rng = SplitMix64::new(1);
        let a = random_psd(3, 0.1, 2.0, &mut rng);
        let phi = random_map(MapKind::Schur, 3, 3, &mut rng);
        let r = check_t11(&phi, &a, 0.0, 0.0, &tol(), false).unwrap();
        assert!(r.holds);
        assert!(r.gap.abs() < 1e-14);
        assert!(check_t11(&phi, &a, 2.0, 1.0, &tol(), false).is_err());
    }

    #[test]
    fn t11_random_compression() {
        let mut rng = SplitMix64::new(2);
        let a = random_psd(5, 0.0, 3.0, &mut rng);
        let phi = random_map(MapKind::Compression, 5, 3, &mut rng);
        let r = check_t11(&phi, &a, 0.7, 1.8, &tol(), false).unwrap();
        assert!(r.holds, "{r:?}");
        assert!(r.margin("1.1").is_some());
    }

    #[test]
    fn t11_with_p_equal_q_one_matches_kadison() {
        let mut rng = SplitMix64::new(3);
        let a = random_psd(4, 0.0, 2.0, &mut rng);
        let phi = random_map(MapKind::Pinching, 4, 4, &mut rng);
        let r = check_t11(&phi, &a, 1.0, 1.0, &tol(), false).unwrap();
        let k = check_kadison(&phi, a.as_hermitian(), &tol()).unwrap();
        assert!((r.margin("T1.1").unwrap().gap - k.gap).abs() < 1e-12);
    }

    #[test]
    fn c12_with_reversed_exponents() {
        let mut rng = SplitMix64::new(4);
        let a = random_psd(4, 0.0, 3.0, &mut rng);
        let phi = random_map(MapKind::Compression, 4, 3, &mut rng);
        let r = check_c12(&phi, &a, 2.0, 0.5, &tol()).unwrap();
        assert!(r.holds);
        let w = r.witness.unwrap();
        assert!(w.is_structurally_valid(&tol()) && w.certified());
    }

    #[test]
    fn p13_trivial_and_normalized_cases() {
        let mut rng = SplitMix64::new(5);
        let a = random_psd(4, 0.0, 2.0, &mut rng);
        let phi = random_map(MapKind::Schur, 4, 4, &mut rng);
        let r = check_p13(&phi, &a, 0.0, 1.3, 0.0, &tol()).unwrap();
        assert!(r.holds && r.gap.abs() < 1e-12);
        assert!(check_p13(&phi, &a, 1.0, 2.0, 1.0, &tol()).unwrap().holds);
        assert!(check_p13(&phi, &a, 1.0, 1.0, 0.5, &tol()).unwrap().holds);
        assert!(check_p13(&phi, &a, 1.0, 1.0, 0.8, &tol()).is_err());
    }

    #[test]
    fn p14_cases() {
        let mut rng = SplitMix64::new(6);
        let a = random_psd(4, 0.0, 2.0, &mut rng);
        let phi = random_map(MapKind::Compression, 4, 4, &mut rng);
        let r = check_p14(&phi, &a, 0.0, 0.0, 0.0, &tol()).unwrap();
        assert!(r.holds && r.gap.abs() < 1e-12);
        assert!(check_p14(&phi, &a, 0.8, 1.0, 0.9, &tol()).unwrap().holds);
    }

    #[test]
    fn bk_random() {
        let mut rng = SplitMix64::new(7);
        let x = gaussian_matrix(4, 4, &mut rng);
        let y = gaussian_matrix(4, 4, &mut rng);
        let r = check_bk(&x, &y, &tol()).unwrap();
        assert!(r.holds);
        assert!(r.witness.unwrap().is_structurally_valid(&tol()));
    }

    #[test]
    fn t21_identity_projection_is_equality() {
        let mut rng = SplitMix64::new(8);
        let pair = random_monotone_pair(4, &mut rng, false).unwrap();
        let r = check_t21(&pair, &PsdMatrix::identity(4), &tol()).unwrap();
        assert!(r.holds && r.margin("dominance").unwrap().gap.abs() < 1e-12);
    }

    #[test]
    fn eq21_coordinate_projection_scalar_oracle() {
        // diagonal pair, E onto coordinates {0, 2}
        let a = PsdMatrix::from_diag(&[1.0, 2.0, 3.0]).unwrap();
        let b = PsdMatrix::from_diag(&[0.5, 1.0, 4.0]).unwrap();
        let pair = MonotonePair::new(a, b, &tol()).unwrap();
        let e = PsdMatrix::from_diag(&[1.0, 0.0, 1.0]).unwrap();
        let r = check_eq21(&pair, &e, Eq21::Pair, &tol()).unwrap();
        // both sides have spectrum {12, 0.5, 0}
        assert!(r.holds && r.gap.abs() < 1e-14);
        let r = check_eq21(&pair, &e, Eq21::Triple, &tol()).unwrap();
        assert!(r.holds && r.gap.abs() < 1e-13);
    }

    #[test]
    fn c22_identity_map_equality() {
        let mut rng = SplitMix64::new(9);
        let pair = random_monotone_pair(3, &mut rng, false).unwrap();
        let r = check_c22(&PositiveMapSpec::identity(3), &pair, &tol()).unwrap();
        assert_eq!(r.case_id, "C2.2");
        assert!(r.holds && r.gap.abs() < 1e-12);
    }

    #[test]
    fn c22a_dilation_consistency() {
        let mut rng = SplitMix64::new(10);
        let pair = random_monotone_pair(3, &mut rng, false).unwrap();
        let z = random_psd(3, 0.0, 1.0, &mut rng);
        let r = check_c22a_dilation(&z, &pair, &tol()).unwrap();
        assert_eq!(r.case_id, "C2.2a");
        assert!(r.holds, "{r:?}");
    }

    #[test]
    fn t23_identity_pair() {
        let id = PsdMatrix::identity(3);
        let pair = make_power_pair(&id, 1.0, 1.0).unwrap();
        let f = factorize_t23(&PositiveMapSpec::identity(3), &pair, &tol()).unwrap();
        assert!(f.report.holds);
        assert!((&f.k - &ComplexMatrix::identity(3)).max_abs() < 1e-14);
    }

    #[test]
    fn t23_commuting_diagonal_compression() {
        let a = PsdMatrix::from_diag(&[1.0, 2.0, 2.5, 3.0]).unwrap();
        let pair = make_power_pair(&a, 0.5, 1.0).unwrap();
        let e = PsdMatrix::from_diag(&[1.0, 1.0, 0.0, 1.0]).unwrap();
        let phi = PositiveMapSpec::Compression { projection: e };
        let f = factorize_t23(&phi, &pair, &tol()).unwrap();
        assert!(f.report.metrics["reconstruction"] <= 1e-9);
        assert!(f.report.holds);
    }

    #[test]
    fn t23_random_schur() {
        let mut rng = SplitMix64::new(11);
        let pair = random_monotone_pair(4, &mut rng, true).unwrap();
        let phi = random_map(MapKind::Schur, 4, 4, &mut rng);
        let f = factorize_t23(&phi, &pair, &tol()).unwrap();
        assert!(f.report.holds, "{:?}", f.report);
        assert!(f.report.witness.as_ref().unwrap().is_structurally_valid(&tol()));
    }

    #[test]
    fn c24_c25_identity_commuting() {
        let mut rng = SplitMix64::new(12);
        let pair = random_monotone_pair(4, &mut rng, true).unwrap();
        let phi = PositiveMapSpec::identity(4);
        let r = check_c24(&phi, &pair, &tol()).unwrap();
        assert!(r.holds && r.asserted);
        assert!(r.margin("operator-norm").unwrap().gap.abs() < 1e-12);
        assert!(check_c25(&phi, &pair, &tol()).unwrap().holds);
        let convex = random_monotone_pair(4, &mut rng, false).unwrap();
        let r = check_c25(&phi, &MonotonePair { concave: false, ..convex }, &tol()).unwrap();
        assert!(!r.asserted);
    }

    #[test]
    fn p26_zero_exponent_equality() {
        let mut rng = SplitMix64::new(13);
        let a = random_psd(4, 0.0, 2.0, &mut rng);
        let phi = random_map(MapKind::Compression, 4, 4, &mut rng);
        let r = check_p26(&phi, &a, 0.0, 1.5, &tol()).unwrap();
        assert!(r.holds && r.gap.abs() < 1e-12);
        let r = check_p26(&phi, &a, 1.3, 0.4, &tol()).unwrap();
        assert!(r.holds && r.margin("young").is_some());
    }

    #[test]
    fn triangle_with_zero_summand() {
        let mut rng = SplitMix64::new(14);
        let a = gaussian_matrix(4, 4, &mut rng);
        let r = check_triangle_28(&a, &ComplexMatrix::zeros(4, 4), &tol()).unwrap();
        assert!(r.holds && r.margin("tri2.8").unwrap().gap.abs() < 1e-10);
        let b = gaussian_matrix(4, 4, &mut rng);
        assert!(check_triangle_28(&a, &b, &tol()).unwrap().holds);
    }

    #[test]
    fn triangle_positive_summands() {
        let mut rng = SplitMix64::new(15);
        let a = random_psd(3, 0.0, 1.0, &mut rng);
        let b = random_psd(3, 0.0, 1.0, &mut rng);
        let r = check_triangle_28(a.as_matrix(), b.as_matrix(), &tol()).unwrap();
        assert!(r.holds && r.margin("tri2.8").unwrap().gap.abs() < 1e-10);
    }
}
