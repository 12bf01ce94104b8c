//! Uniformly sampled history buffer with ring eviction.

use std::collections::VecDeque;

use super::FracError;

/// Relative slack allowed when checking that a timestamp lands on the grid.
const GRID_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct HistoryWindow {
    samples: VecDeque<f64>,
    capacity: usize,
    step: f64,
    origin_time: f64,
    pushed: u64,
}

impl HistoryWindow {
    pub fn new(capacity: usize, step: f64, origin_time: f64) -> Result<Self, FracError> {
        if capacity == 0 {
            return Err(FracError::Usage("window capacity must be at least 1".into()));
        }
        if !(step.is_finite() && step > 0.0) {
            return Err(FracError::Domain(format!("window step must be positive, got {step}")));
        }
        if !origin_time.is_finite() {
            return Err(FracError::Domain("window origin must be finite".into()));
        }
        Ok(Self {
            samples: VecDeque::with_capacity(capacity.min(1 << 20)),
            capacity,
            step,
            origin_time,
            pushed: 0,
        })
    }

    /// Window holding a memory of `length` seconds: capacity ⌊length/step⌋ + 1.
    pub fn with_memory(length: f64, step: f64, origin_time: f64) -> Result<Self, FracError> {
        Self::new(capacity_for_memory(length, step)?, step, origin_time)
    }

    /// Builds a window from uniformly spaced samples, oldest first.
    pub fn from_samples(
        values: &[f64],
        capacity: usize,
        step: f64,
        origin_time: f64,
    ) -> Result<Self, FracError> {
        let mut w = Self::new(capacity, step, origin_time)?;
        for &v in values {
            w.push(v)?;
        }
        Ok(w)
    }

    /// Appends the sample for the next grid point.
    pub fn push(&mut self, value: f64) -> Result<(), FracError> {
        if !value.is_finite() {
            return Err(FracError::NonFinite { index: self.pushed });
        }
        if self.samples.len() == self.capacity {
            self.samples.pop_front();
        }
        self.samples.push_back(value);
        self.pushed += 1;
        Ok(())
    }

    /// Appends a sample taken at time `t`, refusing anything off the grid.
    pub fn push_at(&mut self, t: f64, value: f64) -> Result<(), FracError> {
        let expected = self.next_time();
        if !t.is_finite() || (t - expected).abs() > GRID_TOLERANCE * self.step.max(expected.abs()) {
            return Err(FracError::IrregularSample { expected, got: t });
        }
        self.push(value)
    }

    /// Time of the grid point the next `push` fills.
    pub fn next_time(&self) -> f64 {
        self.origin_time + self.pushed as f64 * self.step
    }

    pub fn latest(&self) -> Option<f64> {
        self.samples.back().copied()
    }

    /// Samples from newest to oldest.
    pub fn newest_first(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().rev().copied()
    }

    pub fn samples(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn origin_time(&self) -> f64 {
        self.origin_time
    }

    /// Total samples ever pushed, including evicted ones.
    pub fn pushed(&self) -> u64 {
        self.pushed
    }

    /// True once at least one sample has been evicted.
    pub fn is_truncated(&self) -> bool {
        self.pushed > self.samples.len() as u64
    }

    pub fn clear(&mut self) {
        self.samples.clear();
        self.pushed = 0;
    }
}

/// ⌊length/step⌋ + 1, treating ratios within 1e-9 of an integer as that integer.
pub fn capacity_for_memory(length: f64, step: f64) -> Result<usize, FracError> {
    if !(length.is_finite() && length > 0.0) {
        return Err(FracError::Domain(format!("memory length must be positive, got {length}")));
    }
    if !(step.is_finite() && step > 0.0) {
        return Err(FracError::Domain(format!("step must be positive, got {step}")));
    }
    let ratio = length / step;
    let nearest = ratio.round();
    let whole = if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest
    } else {
        ratio.floor()
    };
    if whole >= (usize::MAX / 2) as f64 {
        return Err(FracError::Domain(format!("memory of {length} s at step {step} is too long")));
    }
    Ok(whole as usize + 1)
}
