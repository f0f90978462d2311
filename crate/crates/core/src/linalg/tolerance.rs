use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical slacks shared by every check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Loewner-order slack, scaled by `max(1, ‖X‖, ‖Y‖)`.
    pub tau_psd: f64,
    /// Jacobi stopping threshold on off-diagonal Frobenius mass relative to `‖A‖_F`.
    pub tau_eig: f64,
    /// Identity-check slack (unitality).
    pub tau_id: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self { tau_psd: 1e-8, tau_eig: 1e-13, tau_id: 1e-10 }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("tau_psd", self.tau_psd), ("tau_eig", self.tau_eig), ("tau_id", self.tau_id)] {
            if !(v > 0.0 && v <= 1e-3) {
                return Err(Error::Tolerance(format!("{name} = {v} must lie in (0, 1e-3]")));
            }
        }
        Ok(())
    }

    pub fn with_tau_psd(self, tau_psd: f64) -> Result<Self> {
        let t = Self { tau_psd, ..self };
        t.validate()?;
        Ok(t)
    }

    /// Absolute Loewner slack for operators of the given norms.
    pub fn psd_slack(&self, norms: &[f64]) -> f64 {
        self.tau_psd * norms.iter().copied().fold(1.0, f64::max)
    }
}
