//! Physical and numerical configuration of a single Rabi-model calculation.
//!
//! Energies are measured in units of the mode frequency, so `delta` and `g`
//! are dimensionless.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Two-level splitting used throughout unless overridden.
pub const DEFAULT_DELTA: f64 = 50.0;
/// Largest photon number kept in the truncated Fock space.
pub const DEFAULT_N_MAX: usize = 200;
pub const DEFAULT_LEVELS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub delta: f64,
    pub g: f64,
    pub n_max: usize,
    pub k_levels: usize,
}

impl ModelParams {
    pub fn new(delta: f64, g: f64, n_max: usize, k_levels: usize) -> Result<Self> {
        let params = Self {
            delta,
            g,
            n_max,
            k_levels,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta.is_finite() && self.delta >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "delta must be finite and >= 0, got {}",
                self.delta
            )));
        }
        if !(self.g.is_finite() && self.g >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "g must be finite and >= 0, got {}",
                self.g
            )));
        }
        if self.n_max < 1 {
            return Err(Error::InvalidParams("n_max must be >= 1".into()));
        }
        if self.k_levels < 1 || self.k_levels > self.dim() {
            return Err(Error::InvalidParams(format!(
                "k_levels must lie in 1..={}, got {}",
                self.dim(),
                self.k_levels
            )));
        }
        Ok(())
    }

    /// Same configuration at a different coupling.
    pub fn with_g(&self, g: f64) -> Result<Self> {
        Self::new(self.delta, g, self.n_max, self.k_levels)
    }

    /// Dimension of the truncated product space, `2 (N + 1)`.
    pub fn dim(&self) -> usize {
        2 * (self.n_max + 1)
    }

    pub fn critical_coupling(&self) -> f64 {
        crate::pattern::critical_coupling(self.delta)
    }
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            delta: DEFAULT_DELTA,
            g: 0.0,
            n_max: DEFAULT_N_MAX,
            k_levels: DEFAULT_LEVELS,
        }
    }
}
