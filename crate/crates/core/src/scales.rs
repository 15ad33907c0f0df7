//! Geometric scale ladders `r_j = r₀·ρʲ` and per-scale value profiles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ladder of radii `r₀, r₀ρ, r₀ρ², …` (`count` values, `0 < ρ < 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScaleConfig {
    pub r0: f64,
    pub ratio: f64,
    pub count: usize,
}

impl Default for ScaleConfig {
    fn default() -> Self {
        ScaleConfig {
            r0: 1.0,
            ratio: 0.5,
            count: 12,
        }
    }
}

impl ScaleConfig {
    pub fn new(r0: f64, ratio: f64, count: usize) -> Result<Self> {
        let cfg = ScaleConfig { r0, ratio, count };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r0 > 0.0 && self.r0.is_finite()) {
            return Err(Error::param("r0", format!("must be positive, got {}", self.r0)));
        }
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return Err(Error::param("ratio", format!("must lie in (0, 1), got {}", self.ratio)));
        }
        if self.count == 0 {
            return Err(Error::param("count", "at least one scale is required"));
        }
        Ok(())
    }

    /// The radii, strictly decreasing.
    pub fn radii(&self) -> Vec<f64> {
        (0..self.count)
            .map(|j| self.r0 * self.ratio.powi(j as i32))
            .collect()
    }

    /// The `dr/r` mass of one ladder step, `ln(1/ρ)`.
    pub fn log_step(&self) -> f64 {
        (1.0 / self.ratio).ln()
    }
}

/// Values of one quantity along a scale ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleProfile {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub alpha: f64,
    pub ratio: f64,
}

impl ScaleProfile {
    pub fn new(radii: Vec<f64>, values: Vec<f64>, alpha: f64, ratio: f64) -> Result<Self> {
        if radii.len() != values.len() {
            return Err(Error::param("values", "length differs from radii"));
        }
        if radii.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::param("radii", "must be strictly decreasing"));
        }
        Ok(ScaleProfile {
            radii,
            values,
            alpha,
            ratio,
        })
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }
}
