use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Real values sorted non-increasing, multiplicities kept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpectrumList(Vec<f64>);

impl SpectrumList {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Precondition("spectrum must be sorted non-increasing".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericFailure("non-finite spectral value".into()));
        }
        Ok(Self(values))
    }

    /// Sorts descending; stable, so ties keep their input order.
    pub fn from_unsorted(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.partial_cmp(a).expect("finite spectral values"));
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.0.first().copied().unwrap_or(0.0)
    }

    pub fn min(&self) -> f64 {
        self.0.last().copied().unwrap_or(0.0)
    }

    pub fn abs_max(&self) -> f64 {
        self.max().abs().max(self.min().abs())
    }

    /// Values at or below `threshold` in absolute value become exact zeros.
    pub fn snap_to_zero(&self, threshold: f64) -> Self {
        Self(self.0.iter().map(|&v| if v.abs() <= threshold { 0.0 } else { v }).collect())
    }
}

/// `min_j (y_j − x_j)`, the eigenvalue-dominance margin, with the first index attaining it.
pub fn dominance_gap(x: &SpectrumList, y: &SpectrumList) -> (f64, usize) {
    assert_eq!(x.len(), y.len(), "dominance on spectra of different lengths");
    x.values()
        .iter()
        .zip(y.values())
        .enumerate()
        .map(|(j, (a, b))| (b - a, j))
        .fold((f64::INFINITY, 0), |acc, v| if v.0 < acc.0 { v } else { acc })
}

/// Ky Fan margin `min_k Σ_{j≤k} (y_j − x_j)` with the attaining `k` (1-based).
pub fn weak_majorization_gap(x: &SpectrumList, y: &SpectrumList) -> (f64, usize) {
    assert_eq!(x.len(), y.len(), "majorization on spectra of different lengths");
    let (mut sx, mut sy) = (0.0, 0.0);
    let mut best = (f64::INFINITY, 0);
    for (k, (a, b)) in x.values().iter().zip(y.values()).enumerate() {
        sx += a;
        sy += b;
        if sy - sx < best.0 {
            best = (sy - sx, k + 1);
        }
    }
    best
}

/// `x ≺_wlog y`: every partial product of `x` is at most the matching partial
/// product of `y` times `(1 + 1e-9)^k`.
pub fn weak_log_majorizes(x: &SpectrumList, y: &SpectrumList) -> bool {
    first_log_majorization_failure(x, y).is_none()
}

/// The first `k` (1-based) where the partial-product condition fails.
pub fn first_log_majorization_failure(x: &SpectrumList, y: &SpectrumList) -> Option<usize> {
    assert_eq!(x.len(), y.len(), "majorization on spectra of different lengths");
    let (mut px, mut py) = (1.0, 1.0);
    for (k, (a, b)) in x.values().iter().zip(y.values()).enumerate() {
        px *= a;
        py *= b * (1.0 + 1e-9);
        if px > py {
            return Some(k + 1);
        }
    }
    None
}
