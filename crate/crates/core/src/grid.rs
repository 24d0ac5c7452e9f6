//! Time discretization with step `delta^2` and floor-to-grid rounding.

use crate::error::{Error, Result};

/// Guard added before flooring so that horizons which are exact multiples of
/// the step in real arithmetic do not gain a spurious extra step from
/// floating-point representation.
const FLOOR_GUARD: f64 = 1e-9;

/// Uniform grid `0, delta^2, 2 delta^2, ...` for a step parameter
/// `delta` in (0, 1].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    delta: f64,
}

impl TimeGrid {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "step parameter must lie in (0, 1], got {delta}"
            )));
        }
        Ok(Self { delta })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// The actual step size `delta^2`.
    pub fn step(&self) -> f64 {
        self.delta * self.delta
    }

    /// Number of full steps fitting into `[0, t]`.
    pub fn full_steps(&self, t: f64) -> Result<u64> {
        if !(t >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "time must be nonnegative, got {t}"
            )));
        }
        Ok((t / self.step() + FLOOR_GUARD).floor() as u64)
    }

    /// Largest grid time not exceeding `t` (up to the floor guard).
    pub fn floor_time(&self, t: f64) -> Result<f64> {
        Ok(self.full_steps(t)? as f64 * self.step())
    }

    /// Length of the trailing partial interval `[floor_time(t), t]`, clamped
    /// to zero when `t` sits on the grid.
    pub fn remainder(&self, t: f64) -> Result<f64> {
        Ok((t - self.floor_time(t)?).max(0.0))
    }
}
