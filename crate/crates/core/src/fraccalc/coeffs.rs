//! Grünwald–Letnikov binomial weights and the dot product that applies them.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use super::FracError;

/// Precomputed weights `c_0..c_n` for a signed order (negative for integrals).
#[derive(Debug, Clone, PartialEq)]
pub struct FracCoeffTable {
    pub order: f64,
    pub coeffs: Arc<[f64]>,
    pub step: f64,
}

impl FracCoeffTable {
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

pub(crate) fn weights(order: f64, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    out.push(1.0);
    let shifted = 1.0 + order;
    for j in 1..count {
        let prev = out[j - 1];
        out.push((1.0 - shifted / j as f64) * prev);
    }
    out
}

/// Table of `n + 1` weights for `order`, tagged with a step of 1.
///
/// Use [`gl_coeffs_with_step`] when the table is going to evaluate a window.
pub fn gl_coeffs(order: f64, n: usize) -> Result<FracCoeffTable, FracError> {
    gl_coeffs_with_step(order, n, 1.0)
}

pub fn gl_coeffs_with_step(order: f64, n: usize, step: f64) -> Result<FracCoeffTable, FracError> {
    if !order.is_finite() {
        return Err(FracError::Domain(format!("order must be finite, got {order}")));
    }
    if !(step.is_finite() && step > 0.0) {
        return Err(FracError::Domain(format!("step must be positive, got {step}")));
    }
    let count = n
        .checked_add(1)
        .ok_or_else(|| FracError::Domain("coefficient count overflows".into()))?;
    Ok(FracCoeffTable {
        order,
        coeffs: weights(order, count).into(),
        step,
    })
}

type TableKey = (u64, usize);

/// Shares weight vectors between operators built for the same order and length.
#[derive(Debug, Default)]
pub struct CoeffCache {
    tables: Mutex<HashMap<TableKey, Arc<[f64]>>>,
}

impl CoeffCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Weights for `order` with exactly `capacity` entries.
    pub fn weights(&self, order: f64, capacity: usize) -> Arc<[f64]> {
        let key = (order.to_bits(), capacity);
        let mut map = self.tables.lock().unwrap_or_else(|p| p.into_inner());
        map.entry(key)
            .or_insert_with(|| weights(order, capacity).into())
            .clone()
    }

    pub fn table(&self, order: f64, capacity: usize, step: f64) -> Result<FracCoeffTable, FracError> {
        if !order.is_finite() {
            return Err(FracError::Domain(format!("order must be finite, got {order}")));
        }
        if !(step.is_finite() && step > 0.0) {
            return Err(FracError::Domain(format!("step must be positive, got {step}")));
        }
        Ok(FracCoeffTable {
            order,
            coeffs: self.weights(order, capacity),
            step,
        })
    }

    pub fn len(&self) -> usize {
        self.tables.lock().unwrap_or_else(|p| p.into_inner()).len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Σ w_j·x_j with error-free products and a running compensation term,
/// accurate to about one rounding of the exact result.
///
/// `samples` yields the newest value first, matching `w[0]`.
#[inline]
pub(crate) fn compensated_dot<I>(weights: &[f64], samples: I) -> f64
where
    I: Iterator<Item = f64>,
{
    let mut sum = 0.0;
    let mut carry = 0.0;
    for (&w, x) in weights.iter().zip(samples) {
        let p = w * x;
        let p_err = w.mul_add(x, -p);
        let (s, s_err) = two_sum(sum, p);
        sum = s;
        carry += s_err + p_err;
    }
    sum + carry
}
