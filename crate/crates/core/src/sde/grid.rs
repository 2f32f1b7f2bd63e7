use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default integration step.
pub const DEFAULT_DT: f64 = 0.05;

/// Fixed-step time discretisation of `[t0, t_end]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t0: f64,
    pub t_end: f64,
    pub dt: f64,
}

impl TimeGrid {
    pub fn new(t0: f64, t_end: f64, dt: f64) -> Result<Self> {
        let grid = TimeGrid { t0, t_end, dt };
        grid.validate()?;
        Ok(grid)
    }

    /// Grid starting at zero with the default step.
    pub fn horizon(t_end: f64) -> Result<Self> {
        Self::new(0.0, t_end, DEFAULT_DT)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidGrid(format!("dt must be > 0, got {}", self.dt)));
        }
        if !(self.t0.is_finite() && self.t_end.is_finite() && self.t_end > self.t0) {
            return Err(Error::InvalidGrid(format!("t_end ({}) must exceed t0 ({})", self.t_end, self.t0)));
        }
        let n = ((self.t_end - self.t0) / self.dt).round();
        if !(n >= 1.0 && n < u32::MAX as f64) {
            return Err(Error::InvalidGrid(format!("step count {n} out of range")));
        }
        Ok(())
    }

    /// Number of steps, `round((t_end - t0) / dt)`.
    pub fn steps(&self) -> usize {
        ((self.t_end - self.t0) / self.dt).round() as usize
    }

    /// Time of step `k`. Computed by multiplication so that long runs do not
    /// accumulate rounding drift.
    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }
}
