use serde::{Deserialize, Serialize};

use crate::error::{Result, invalid};
use crate::grid::GridSpec;

/// Geometric radii `r_min * ratio^k`, `k = 0..count`, standing in for the supremum over
/// all `r > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusLadder {
    pub r_min: f64,
    pub ratio: f64,
    pub count: usize,
}

impl RadiusLadder {
    pub const DEFAULT_RATIO: f64 = 1.189_207_115_002_721; // 2^{1/4}

    pub fn new(r_min: f64, ratio: f64, count: usize) -> Result<Self> {
        let l = Self { r_min, ratio, count };
        l.validate()?;
        Ok(l)
    }

    /// Starts at the cell spacing and ends at the first radius covering the domain
    /// diameter.
    pub fn covering(spec: &GridSpec) -> Self {
        Self::covering_with(spec, spec.spacing(), Self::DEFAULT_RATIO)
    }

    pub fn covering_with(spec: &GridSpec, r_min: f64, ratio: f64) -> Self {
        let target = spec.diameter();
        let mut count = 1;
        while r_min * ratio.powi(count as i32 - 1) < target {
            count += 1;
        }
        Self { r_min, ratio, count }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_min.is_finite() && self.r_min > 0.0) {
            return Err(invalid(format!("ladder r_min must be positive, got {}", self.r_min)));
        }
        if !(self.ratio.is_finite() && self.ratio > 1.0) {
            return Err(invalid(format!("ladder ratio must exceed 1, got {}", self.ratio)));
        }
        if self.count == 0 {
            return Err(invalid("ladder needs at least one radius"));
        }
        Ok(())
    }

    pub fn radius(&self, k: usize) -> f64 {
        self.r_min * self.ratio.powi(k as i32)
    }

    pub fn radii(&self) -> Vec<f64> {
        (0..self.count).map(|k| self.radius(k)).collect()
    }

    /// Whether the last radius reaches the domain diameter.
    pub fn reaches(&self, spec: &GridSpec) -> bool {
        self.radius(self.count - 1) >= spec.diameter() * (1.0 - 1e-12)
    }

    /// Same ladder extended by `extra` radii.
    pub fn extended(&self, extra: usize) -> Self {
        Self { count: self.count + extra, ..*self }
    }

    /// Multiplicative slack `ratio^n` incurred by sampling radii geometrically.
    pub fn slack(&self, dim: usize) -> f64 {
        self.ratio.powi(dim as i32)
    }
}
