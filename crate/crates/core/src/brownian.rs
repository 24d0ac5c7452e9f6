//! Brownian increments aligned to the time grid, one bundle per Monte Carlo
//! sample.
//!
//! Each increment has its own counter stream keyed on
//! `(seed, dimension, sample, interval)`, so paths for distinct samples are
//! independent and any single path can be regenerated without touching the
//! others. Increments are stored raw (no diffusion factor applied) with
//! per-coordinate variance equal to the interval length; a horizon on the
//! grid makes the trailing increment the zero vector.

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::rng::CounterRng;

/// Gaussian increments for one sample path: `full_steps` intervals of length
/// `delta^2` followed by the trailing partial interval.
#[derive(Clone, Debug, PartialEq)]
pub struct BrownianPath {
    sample_index: u64,
    seed: u64,
    increments: Vec<Vec<f64>>,
}

impl BrownianPath {
    /// Draws the increments for sample `sample_index` of the stream `seed`.
    pub fn sample(
        dim: usize,
        horizon: f64,
        grid: &TimeGrid,
        sample_index: u64,
        seed: u64,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        if !(horizon > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "horizon must be positive, got {horizon}"
            )));
        }
        let full = grid.full_steps(horizon)?;
        let remainder = grid.remainder(horizon)?;
        let mut increments = Vec::with_capacity(full as usize + 1);
        for interval in 1..=(full + 1) {
            let length = if interval <= full { grid.step() } else { remainder };
            increments.push(Self::draw_increment(
                dim,
                length,
                seed,
                sample_index,
                interval,
            ));
        }
        Ok(Self {
            sample_index,
            seed,
            increments,
        })
    }

    fn draw_increment(dim: usize, length: f64, seed: u64, sample: u64, interval: u64) -> Vec<f64> {
        if length == 0.0 {
            return vec![0.0; dim];
        }
        let mut rng = CounterRng::from_parts(&[seed, dim as u64, sample, interval]);
        let sd = length.sqrt();
        (0..dim).map(|_| sd * rng.standard_normal()).collect()
    }

    pub fn sample_index(&self) -> u64 {
        self.sample_index
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// All increments, the trailing partial interval last.
    pub fn increments(&self) -> &[Vec<f64>] {
        &self.increments
    }

    /// Number of increments (full steps plus the trailing interval).
    pub fn len(&self) -> usize {
        self.increments.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        self.increments[0].len()
    }
}
