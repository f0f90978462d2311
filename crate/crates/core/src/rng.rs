//! Deterministic random instances.
//!
//! The generators are fixed algorithms so that other implementations can
//! reproduce every instance from a seed: SplitMix64 streams, Box–Muller
//! Gaussians, and Haar unitaries from Gram–Schmidt of complex Gaussian
//! matrices.

use std::f64::consts::PI;

use crate::linalg::{ComplexMatrix, PsdMatrix, C64};

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// 64-bit FNV-1a.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// Independent stream for `(case, trial)`:
    /// `seed' = mix64(mix64(seed ^ fnv1a(case)) ^ trial)`.
    pub fn for_trial(seed: u64, case_id: &str, trial: u64) -> Self {
        Self::new(mix64(mix64(seed ^ fnv1a(case_id.as_bytes())) ^ trial))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer in `lo..=hi`.
    pub fn range(&mut self, lo: usize, hi: usize) -> usize {
        lo + (self.next_u64() % (hi - lo + 1) as u64) as usize
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// Box–Muller pair `(r cos θ, r sin θ)` with `r = sqrt(−2 ln(1 − u1))`, `θ = 2π u2`.
    fn box_muller(&mut self) -> (f64, f64) {
        let u1 = self.next_f64();
        let u2 = self.next_f64();
        let r = (-2.0 * (1.0 - u1).ln()).sqrt();
        let th = 2.0 * PI * u2;
        (r * th.cos(), r * th.sin())
    }

    /// Standard real normal (cosine branch of one Box–Muller draw).
    pub fn gaussian(&mut self) -> f64 {
        self.box_muller().0
    }

    /// Complex normal with `E|z|² = 1`.
    pub fn complex_gaussian(&mut self) -> C64 {
        let (a, b) = self.box_muller();
        C64::new(a, b) * std::f64::consts::FRAC_1_SQRT_2
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.range(0, i);
            items.swap(i, j);
        }
    }
}

/// Entries drawn row-major.
pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut SplitMix64) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| rng.complex_gaussian())
}

/// Haar-distributed unitary: modified Gram–Schmidt on the columns of a
/// complex Gaussian matrix.
pub fn haar_unitary(n: usize, rng: &mut SplitMix64) -> ComplexMatrix {
    let g = gaussian_matrix(n, n, rng);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v = g.column(j);
        for c in &cols {
            let proj: C64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, ci) in v.iter_mut().zip(c) {
                *vi -= proj * ci;
            }
        }
        let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        cols.push(v.into_iter().map(|z| z / nrm).collect());
    }
    ComplexMatrix::from_columns(n, &cols)
}

/// `U diag(values) U^*` with Haar `U`.
pub fn psd_with_spectrum(values: &[f64], rng: &mut SplitMix64) -> PsdMatrix {
    let u = haar_unitary(values.len(), rng);
    PsdMatrix::from_spectral(u, values.to_vec())
}

/// Random PSD matrix with eigenvalues uniform on `[lo, hi]`.
pub fn random_psd(n: usize, lo: f64, hi: f64, rng: &mut SplitMix64) -> PsdMatrix {
    let values: Vec<f64> = (0..n).map(|_| rng.uniform(lo, hi)).collect();
    psd_with_spectrum(&values, rng)
}

/// Random Hermitian matrix `(G + G^*) / 2`.
pub fn random_hermitian(n: usize, rng: &mut SplitMix64) -> crate::linalg::HermitianMatrix {
    crate::linalg::HermitianMatrix::from_hermitian_part(&gaussian_matrix(n, n, rng))
}
