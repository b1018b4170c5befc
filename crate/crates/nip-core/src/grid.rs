//! Uniform time grids.
//!
//! Non-uniform grids are rejected at construction; fixed-step finite
//! differences and integration assume equal spacing throughout.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    start: f64,
    step: f64,
    len: usize,
}

impl TimeGrid {
    /// `len` equally spaced samples covering `[start, end]` inclusive.
    pub fn new(start: f64, end: f64, len: usize) -> Result<Self> {
        if len < 2 || !(end > start) || !start.is_finite() || !end.is_finite() {
            return Err(Error::InvalidGrid);
        }
        Ok(Self { start, step: (end - start) / (len - 1) as f64, len })
    }

    /// Adopt explicit samples, requiring uniform spacing.
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidGrid);
        }
        let step = samples[1] - samples[0];
        if !(step > 0.0) {
            return Err(Error::InvalidGrid);
        }
        let span = samples[samples.len() - 1] - samples[0];
        for (k, pair) in samples.windows(2).enumerate() {
            let local = pair[1] - pair[0];
            if (local - step).abs() > 1e-9 * span.abs().max(1.0) {
                let _ = k;
                return Err(Error::InvalidGrid);
            }
        }
        Ok(Self { start: samples[0], step, len: samples.len() })
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.t(self.len - 1)
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn t(&self, k: usize) -> f64 {
        self.start + self.step * k as f64
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len).map(|k| self.t(k)).collect()
    }

    /// Index of the last sample at or before `t`, clamped to the grid.
    pub fn bracket(&self, t: f64) -> usize {
        if t <= self.start {
            return 0;
        }
        let k = ((t - self.start) / self.step).floor() as usize;
        k.min(self.len - 2)
    }

    pub fn same_as(&self, other: &Self) -> bool {
        self.len == other.len
            && (self.start - other.start).abs() <= 1e-12 * self.start.abs().max(1.0)
            && (self.step - other.step).abs() <= 1e-12 * self.step.abs().max(1.0)
    }
}
