//! Positive linear maps as symbolic specs: compressions, congruences, Schur
//! multipliers, pinchings, mixtures, compositions, states and the transpose.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::{
    eig_hermitian, frac_power, hermitian_norm, loewner_leq, svd, ComplexMatrix, HermitianMatrix, PsdMatrix,
    ToleranceConfig, C64,
};
use crate::rng::{gaussian_matrix, haar_unitary, psd_with_spectrum, random_psd, SplitMix64};

/// Projection and Hermiticity defect allowed for compression projections.
pub const PROJECTION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params")]
pub enum PositiveMapSpec {
    /// `X ↦ V^* X V`, `V` an orthonormal basis of `range(E)`.
    Compression { projection: PsdMatrix },
    /// `X ↦ Z^* X Z`.
    Congruence {
        z: ComplexMatrix,
        #[serde(default)]
        sub_unital: bool,
    },
    /// `X ↦ B ∘ X`.
    SchurMultiplier { symbol: PsdMatrix },
    /// `X ↦ Σ P_k X P_k` over the coordinate blocks.
    Pinching { blocks: Vec<Vec<usize>> },
    Mixture { weights: Vec<f64>, parts: Vec<PositiveMapSpec> },
    Compose { outer: Box<PositiveMapSpec>, inner: Box<PositiveMapSpec> },
    /// `X ↦ tr(ρX)` as a 1x1 matrix.
    TraceState { density: PsdMatrix },
    /// Positive but not completely positive.
    Transpose { dim: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Unitality {
    Unital,
    SubUnital,
    Neither,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapKind {
    Compression,
    Congruence,
    Schur,
    Pinching,
    Mixture,
    Compose,
    TraceState,
    Transpose,
}

impl MapKind {
    pub const ALL: [MapKind; 8] = [
        MapKind::Compression,
        MapKind::Congruence,
        MapKind::Schur,
        MapKind::Pinching,
        MapKind::Mixture,
        MapKind::Compose,
        MapKind::TraceState,
        MapKind::Transpose,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MapKind::Compression => "compression",
            MapKind::Congruence => "congruence",
            MapKind::Schur => "schur",
            MapKind::Pinching => "pinching",
            MapKind::Mixture => "mixture",
            MapKind::Compose => "compose",
            MapKind::TraceState => "trace-state",
            MapKind::Transpose => "transpose",
        }
    }
}

impl fmt::Display for MapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MapKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MapKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown map kind {s:?}")))
    }
}

/// Orthonormal basis of the range of a projection, from its leading eigenvectors.
fn range_basis(e: &PsdMatrix) -> ComplexMatrix {
    let k = projection_rank(e);
    let q = &e.eig().eigenvectors;
    q.block(0, 0, q.rows(), k)
}

fn projection_rank(e: &PsdMatrix) -> usize {
    e.eigenvalues().values().iter().filter(|&&v| v > 0.5).count()
}

impl PositiveMapSpec {
    pub fn identity(n: usize) -> Self {
        PositiveMapSpec::Compression { projection: PsdMatrix::identity(n) }
    }

    pub fn schur(symbol: PsdMatrix) -> Self {
        PositiveMapSpec::SchurMultiplier { symbol }
    }

    pub fn in_dim(&self) -> usize {
        match self {
            PositiveMapSpec::Compression { projection } => projection.dim(),
            PositiveMapSpec::Congruence { z, .. } => z.rows(),
            PositiveMapSpec::SchurMultiplier { symbol } => symbol.dim(),
            PositiveMapSpec::Pinching { blocks } => blocks.iter().map(Vec::len).sum(),
            PositiveMapSpec::Mixture { parts, .. } => parts.first().map_or(0, |p| p.in_dim()),
            PositiveMapSpec::Compose { inner, .. } => inner.in_dim(),
            PositiveMapSpec::TraceState { density } => density.dim(),
            PositiveMapSpec::Transpose { dim } => *dim,
        }
    }

    pub fn out_dim(&self) -> usize {
        match self {
            PositiveMapSpec::Compression { projection } => projection_rank(projection),
            PositiveMapSpec::Congruence { z, .. } => z.cols(),
            PositiveMapSpec::Mixture { parts, .. } => parts.first().map_or(0, |p| p.out_dim()),
            PositiveMapSpec::Compose { outer, .. } => outer.out_dim(),
            PositiveMapSpec::TraceState { .. } => 1,
            _ => self.in_dim(),
        }
    }

    pub fn kind(&self) -> MapKind {
        match self {
            PositiveMapSpec::Compression { .. } => MapKind::Compression,
            PositiveMapSpec::Congruence { .. } => MapKind::Congruence,
            PositiveMapSpec::SchurMultiplier { .. } => MapKind::Schur,
            PositiveMapSpec::Pinching { .. } => MapKind::Pinching,
            PositiveMapSpec::Mixture { .. } => MapKind::Mixture,
            PositiveMapSpec::Compose { .. } => MapKind::Compose,
            PositiveMapSpec::TraceState { .. } => MapKind::TraceState,
            PositiveMapSpec::Transpose { .. } => MapKind::Transpose,
        }
    }

    /// Checks the structural invariants of the map.
    pub fn validate(&self, tol: &ToleranceConfig) -> Result<()> {
        match self {
            PositiveMapSpec::Compression { projection } => {
                let e = projection.as_matrix();
                let defect = (&e.matmul(e) - e).frobenius_norm();
                if defect > PROJECTION_TOL {
                    return Err(Error::Precondition(format!("compression matrix is not a projection (‖E²−E‖ = {defect:.3e})")));
                }
                if projection_rank(projection) == 0 {
                    return Err(Error::Precondition("compression onto the zero subspace".into()));
                }
            }
            PositiveMapSpec::Congruence { z, sub_unital } => {
                if *sub_unital {
                    let n = crate::linalg::op_norm(z, tol)?;
                    if n > 1.0 + PROJECTION_TOL {
                        return Err(Error::Precondition(format!("sub-unital congruence with ‖Z‖ = {n}")));
                    }
                }
            }
            PositiveMapSpec::SchurMultiplier { .. } => {}
            PositiveMapSpec::Pinching { blocks } => {
                let n = self.in_dim();
                let mut seen = vec![false; n];
                for &i in blocks.iter().flatten() {
                    if i >= n || seen[i] {
                        return Err(Error::Precondition("pinching blocks are not a partition".into()));
                    }
                    seen[i] = true;
                }
                if n == 0 {
                    return Err(Error::Precondition("empty pinching".into()));
                }
            }
            PositiveMapSpec::Mixture { weights, parts } => {
                if weights.len() != parts.len() || parts.is_empty() {
                    return Err(Error::Precondition("mixture needs one weight per part".into()));
                }
                if weights.iter().any(|w| !(*w >= 0.0)) || weights.iter().sum::<f64>() > 1.0 + 1e-12 {
                    return Err(Error::Precondition(format!("mixture weights {weights:?} must be non-negative with sum ≤ 1")));
                }
                for p in parts {
                    p.validate(tol)?;
                    if p.in_dim() != parts[0].in_dim() || p.out_dim() != parts[0].out_dim() {
                        return Err(Error::Shape("mixture parts have different dimensions".into()));
                    }
                }
            }
            PositiveMapSpec::Compose { outer, inner } => {
                outer.validate(tol)?;
                inner.validate(tol)?;
                if outer.in_dim() != inner.out_dim() {
                    return Err(Error::Shape(format!("cannot compose {}→{} after {}→{}", outer.in_dim(), outer.out_dim(), inner.in_dim(), inner.out_dim())));
                }
            }
            PositiveMapSpec::TraceState { density } => {
                let t = density.trace_re();
                if (t - 1.0).abs() > PROJECTION_TOL {
                    return Err(Error::Precondition(format!("density has trace {t}")));
                }
            }
            PositiveMapSpec::Transpose { dim } => {
                if *dim == 0 {
                    return Err(Error::Precondition("transpose of dimension 0".into()));
                }
            }
        }
        Ok(())
    }

    /// Applies the map to an arbitrary square matrix.
    pub fn apply_general(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.rows() != self.in_dim() || x.cols() != self.in_dim() {
            return Err(Error::Shape(format!("map on {0}x{0} applied to {1}x{2}", self.in_dim(), x.rows(), x.cols())));
        }
        Ok(match self {
            PositiveMapSpec::Compression { projection } => {
                let v = range_basis(projection);
                v.adjoint_mul(&x.matmul(&v))
            }
            PositiveMapSpec::Congruence { z, .. } => z.adjoint_mul(&x.matmul(z)),
            PositiveMapSpec::SchurMultiplier { symbol } => symbol.as_matrix().hadamard(x),
            PositiveMapSpec::Pinching { blocks } => {
                let mut out = ComplexMatrix::zeros(x.rows(), x.cols());
                for b in blocks {
                    for &i in b {
                        for &j in b {
                            out[(i, j)] = x[(i, j)];
                        }
                    }
                }
                out
            }
            PositiveMapSpec::Mixture { weights, parts } => {
                let mut out = ComplexMatrix::zeros(self.out_dim(), self.out_dim());
                for (w, p) in weights.iter().zip(parts) {
                    out = &out + &p.apply_general(x)?.scale(*w);
                }
                out
            }
            PositiveMapSpec::Compose { outer, inner } => outer.apply_general(&inner.apply_general(x)?)?,
            PositiveMapSpec::TraceState { density } => {
                ComplexMatrix::new(1, 1, vec![density.as_matrix().matmul(x).trace()])?
            }
            PositiveMapSpec::Transpose { .. } => x.transpose(),
        })
    }

    pub fn apply(&self, x: &HermitianMatrix) -> Result<HermitianMatrix> {
        Ok(HermitianMatrix::from_hermitian_part(&self.apply_general(x.as_matrix())?))
    }

    /// Image of a PSD matrix, re-validated as PSD within `tau_psd`.
    pub fn apply_psd(&self, x: &PsdMatrix, tol: &ToleranceConfig) -> Result<PsdMatrix> {
        PsdMatrix::new(self.apply(x.as_hermitian())?, tol)
    }

    /// `Φ(I)`
    pub fn image_of_identity(&self) -> Result<HermitianMatrix> {
        self.apply(&HermitianMatrix::identity(self.in_dim()))
    }

    pub fn classify_unitality(&self, tol: &ToleranceConfig) -> Result<Unitality> {
        let phi_i = self.image_of_identity()?;
        let id = HermitianMatrix::identity(phi_i.dim());
        if hermitian_norm(&phi_i.sub(&id), tol)? <= tol.tau_id {
            return Ok(Unitality::Unital);
        }
        if loewner_leq(&phi_i, &id, tol)?.holds {
            return Ok(Unitality::SubUnital);
        }
        Ok(Unitality::Neither)
    }

    /// `Σ_{ij} E_ij ⊗ Φ(E_ij)`, assembled blockwise.
    pub fn choi_matrix(&self) -> Result<ChoiMatrix> {
        let (n, m) = (self.in_dim(), self.out_dim());
        let mut c = ComplexMatrix::zeros(n * m, n * m);
        for i in 0..n {
            for j in 0..n {
                let mut e = ComplexMatrix::zeros(n, n);
                e[(i, j)] = C64::new(1.0, 0.0);
                let img = self.apply_general(&e)?;
                for a in 0..m {
                    for b in 0..m {
                        c[(i * m + a, j * m + b)] = img[(a, b)];
                    }
                }
            }
        }
        Ok(ChoiMatrix { matrix: HermitianMatrix::new(c)? })
    }

    pub fn is_completely_positive(&self, tol: &ToleranceConfig) -> Result<bool> {
        let choi = self.choi_matrix()?;
        let eig = eig_hermitian(&choi.matrix, tol)?;
        Ok(eig.eigenvalues.min() >= -tol.psd_slack(&[eig.eigenvalues.abs_max()]))
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("map specs serialize");
        let digest = Sha256::digest(&json);
        digest.iter().take(16).map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChoiMatrix {
    pub matrix: HermitianMatrix,
}

/// The projection `[[Z, (Z(I−Z))^{1/2}], [(Z(I−Z))^{1/2}, I−Z]]` dilating a
/// positive contraction `Z`.
pub fn dilation_projection(z: &PsdMatrix, tol: &ToleranceConfig) -> Result<PsdMatrix> {
    let top = z.norm();
    if top > 1.0 + tol.tau_psd {
        return Err(Error::Precondition(format!("dilation needs 0 ≤ Z ≤ I, got ‖Z‖ = {top}")));
    }
    let eig = z.eig();
    let vals: Vec<f64> = eig.eigenvalues.values().iter().map(|v| v.clamp(0.0, 1.0)).collect();
    let off = eig.synthesize(&vals.iter().map(|v| (v * (1.0 - v)).sqrt()).collect::<Vec<_>>());
    let co = eig.synthesize(&vals.iter().map(|v| 1.0 - v).collect::<Vec<_>>());
    let zz = eig.synthesize(&vals);
    let e = ComplexMatrix::from_blocks(zz.as_matrix(), off.as_matrix(), off.as_matrix(), co.as_matrix())?;
    PsdMatrix::from_matrix(e, tol)
}

/// Top-left `n x n` block of `E diag(X, 0) E`.
pub fn compressed_dilation(e: &PsdMatrix, x: &HermitianMatrix) -> ComplexMatrix {
    let n = x.dim();
    let padded = ComplexMatrix::direct_sum(x.as_matrix(), &ComplexMatrix::zeros(n, n));
    let em = e.as_matrix();
    em.matmul(&padded).matmul(em).block(0, 0, n, n)
}

fn random_projection(dim: usize, rank: usize, rng: &mut SplitMix64) -> PsdMatrix {
    let vals: Vec<f64> = (0..dim).map(|i| if i < rank { 1.0 } else { 0.0 }).collect();
    psd_with_spectrum(&vals, rng)
}

/// Contraction with singular values of a Gaussian matrix clamped to at most 1.
pub fn random_contraction(rows: usize, cols: usize, rng: &mut SplitMix64) -> ComplexMatrix {
    let g = gaussian_matrix(rows, cols, rng);
    let tol = ToleranceConfig::default();
    let s = svd::svd(&g, &tol).expect("Gaussian matrices have finite entries");
    let k = rows.min(cols);
    ComplexMatrix::from_fn(rows, cols, |i, j| {
        (0..k).map(|t| s.u.get(i, t) * s.sigma[t].min(1.0) * s.v.get(j, t).conj()).sum()
    })
}

/// `D^{-1/2} G^*G D^{-1/2}` with `D` the diagonal of `G^*G`.
pub fn random_schur_symbol(dim: usize, rng: &mut SplitMix64) -> PsdMatrix {
    let g = gaussian_matrix(dim, dim, rng);
    let b = g.adjoint_mul(&g);
    let d: Vec<f64> = (0..dim).map(|i| b.get(i, i).re.sqrt()).collect();
    let unit = ComplexMatrix::from_fn(dim, dim, |i, j| if i == j { C64::new(1.0, 0.0) } else { b.get(i, j) / (d[i] * d[j]) });
    PsdMatrix::from_matrix(unit, &ToleranceConfig::default()).expect("normalized Gram matrices are PSD")
}

fn random_partition(dim: usize, rng: &mut SplitMix64) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..dim).collect();
    rng.shuffle(&mut idx);
    let mut blocks = Vec::new();
    let mut start = 0;
    while start < dim {
        let len = rng.range(1, dim - start);
        let mut b = idx[start..start + len].to_vec();
        b.sort_unstable();
        blocks.push(b);
        start += len;
    }
    blocks
}

/// Random valid map of the requested kind. `out_dim` is the rank of the
/// projection for compressions and the column count for congruences; the
/// other kinds are square and ignore it.
pub fn random_map(kind: MapKind, in_dim: usize, out_dim: usize, rng: &mut SplitMix64) -> PositiveMapSpec {
    let out_dim = out_dim.clamp(1, in_dim);
    match kind {
        MapKind::Compression => PositiveMapSpec::Compression { projection: random_projection(in_dim, out_dim, rng) },
        MapKind::Congruence => {
            PositiveMapSpec::Congruence { z: random_contraction(in_dim, out_dim, rng), sub_unital: true }
        }
        MapKind::Schur => PositiveMapSpec::SchurMultiplier { symbol: random_schur_symbol(in_dim, rng) },
        MapKind::Pinching => PositiveMapSpec::Pinching { blocks: random_partition(in_dim, rng) },
        MapKind::Mixture => {
            let a = rng.uniform(0.1, 0.9);
            let b = rng.uniform(0.1, 0.9);
            let w = [a, b, 1.0];
            let total: f64 = w.iter().sum();
            PositiveMapSpec::Mixture {
                weights: w.iter().map(|v| v / total).collect(),
                parts: vec![
                    random_map(MapKind::Schur, in_dim, in_dim, rng),
                    random_map(MapKind::Pinching, in_dim, in_dim, rng),
                    PositiveMapSpec::Congruence { z: haar_unitary(in_dim, rng), sub_unital: true },
                ],
            }
        }
        MapKind::Compose => PositiveMapSpec::Compose {
            outer: Box::new(random_map(MapKind::Schur, out_dim, out_dim, rng)),
            inner: Box::new(random_map(MapKind::Compression, in_dim, out_dim, rng)),
        },
        MapKind::TraceState => {
            let rho = random_psd(in_dim, 0.0, 1.0, rng);
            let t = rho.trace_re();
            PositiveMapSpec::TraceState { density: rho.scale(1.0 / t).expect("positive trace") }
        }
        MapKind::Transpose => PositiveMapSpec::Transpose { dim: in_dim },
    }
}

/// `Φ(A^t)` for a PSD `A`.
pub fn apply_power(phi: &PositiveMapSpec, a: &PsdMatrix, t: f64, tol: &ToleranceConfig) -> Result<PsdMatrix> {
    phi.apply_psd(&frac_power(a, t)?, tol)
}
