//! Grünwald–Letnikov fractional derivatives and integrals on uniformly
//! sampled windows, with short-memory truncation and its error bound.

mod coeffs;
mod gamma;
mod memory;
mod window;

use thiserror::Error;

pub use coeffs::{gl_coeffs, gl_coeffs_with_step, CoeffCache, FracCoeffTable};
pub use gamma::gamma;
pub use memory::{memory_length_for_accuracy, short_memory_error_bound, MemoryPlan};
pub use window::{capacity_for_memory, HistoryWindow};

use coeffs::compensated_dot;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FracError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("non-finite sample at index {index}")]
    NonFinite { index: u64 },
    #[error("sample at t = {got} is off the grid (expected t = {expected})")]
    IrregularSample { expected: f64, got: f64 },
    #[error("window step {window} does not match operator step {operator}")]
    StepMismatch { window: f64, operator: f64 },
    #[error("window holds {len} samples but the operator only has {capacity} weights")]
    WindowTooLong { len: usize, capacity: usize },
}

fn same_step(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

/// Weighted GL sum with a fixed weight table; evaluation is a single dot product.
///
/// A positive order differentiates, a negative one integrates, and zero
/// returns the newest sample.
#[derive(Debug, Clone, PartialEq)]
pub struct FracOperator {
    table: FracCoeffTable,
}

impl FracOperator {
    pub fn new(order: f64, capacity: usize, step: f64) -> Result<Self, FracError> {
        if capacity == 0 {
            return Err(FracError::Usage("operator capacity must be at least 1".into()));
        }
        Ok(Self {
            table: gl_coeffs_with_step(order, capacity - 1, step)?,
        })
    }

    pub fn cached(order: f64, capacity: usize, step: f64, cache: &CoeffCache) -> Result<Self, FracError> {
        if capacity == 0 {
            return Err(FracError::Usage("operator capacity must be at least 1".into()));
        }
        Ok(Self {
            table: cache.table(order, capacity, step)?,
        })
    }

    pub fn from_table(table: FracCoeffTable) -> Self {
        Self { table }
    }

    pub fn order(&self) -> f64 {
        self.table.order
    }

    pub fn capacity(&self) -> usize {
        self.table.len()
    }

    pub fn table(&self) -> &FracCoeffTable {
        &self.table
    }

    pub fn eval(&self, window: &HistoryWindow) -> Result<f64, FracError> {
        if window.is_empty() {
            return Err(FracError::Usage("fractional operator applied to an empty window".into()));
        }
        if !same_step(window.step(), self.table.step) {
            return Err(FracError::StepMismatch {
                window: window.step(),
                operator: self.table.step,
            });
        }
        if window.len() > self.table.len() {
            return Err(FracError::WindowTooLong {
                len: window.len(),
                capacity: self.table.len(),
            });
        }
        if self.table.order == 0.0 {
            return Ok(window.latest().unwrap_or(0.0));
        }
        let sum = compensated_dot(&self.table.coeffs, window.newest_first());
        Ok(sum / self.table.step.powf(self.table.order))
    }
}

fn eval_signed(window: &HistoryWindow, order: f64) -> Result<f64, FracError> {
    if window.is_empty() {
        return Err(FracError::Usage("fractional operator applied to an empty window".into()));
    }
    let op = FracOperator::new(order, window.len(), window.step())?;
    op.eval(window)
}

/// GL derivative of positive `order` using every sample in the window.
pub fn gl_derivative(window: &HistoryWindow, order: f64) -> Result<f64, FracError> {
    if !(order.is_finite() && order > 0.0) {
        return Err(FracError::Domain(format!("derivative order must be positive, got {order}")));
    }
    eval_signed(window, order)
}

/// GL approximation of the Riemann–Liouville integral of positive `order`.
pub fn frac_integral(window: &HistoryWindow, order: f64) -> Result<f64, FracError> {
    if !(order.is_finite() && order > 0.0) {
        return Err(FracError::Domain(format!("integral order must be positive, got {order}")));
    }
    eval_signed(window, -order)
}

/// Differentiates for positive orders, integrates for negative, identity at zero.
pub fn frac_operator(window: &HistoryWindow, order: f64) -> Result<f64, FracError> {
    if order > 0.0 {
        gl_derivative(window, order)
    } else if order < 0.0 {
        frac_integral(window, -order)
    } else if order == 0.0 {
        window
            .latest()
            .ok_or_else(|| FracError::Usage("fractional operator applied to an empty window".into()))
    } else {
        Err(FracError::Domain("order is NaN".into()))
    }
}
