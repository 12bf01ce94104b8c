//! Error bound of short-memory truncation and the inverse planning rule.

use serde::{Deserialize, Serialize};

use super::{gamma, FracError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MemoryPlan {
    pub bound_m: f64,
    pub accuracy: f64,
    pub order: f64,
    /// Memory length in seconds.
    pub length: f64,
}

fn check_order(order: f64) -> Result<(), FracError> {
    if order > 0.0 && order < 1.0 {
        Ok(())
    } else {
        Err(FracError::Domain(format!("order must lie in (0, 1), got {order}")))
    }
}

/// M·L^{−α}/|Γ(1−α)|: worst-case deviation of a window of `length_l` seconds
/// from the full-memory value for signals bounded by `bound_m`.
pub fn short_memory_error_bound(bound_m: f64, length_l: f64, order: f64) -> Result<f64, FracError> {
    check_order(order)?;
    if !(bound_m.is_finite() && bound_m >= 0.0) {
        return Err(FracError::Domain(format!("signal bound must be non-negative, got {bound_m}")));
    }
    if !(length_l.is_finite() && length_l > 0.0) {
        return Err(FracError::Domain(format!("memory length must be positive, got {length_l}")));
    }
    Ok(bound_m * length_l.powf(-order) / gamma(1.0 - order)?.abs())
}

/// Shortest memory meeting `accuracy`, nudged up until the bound holds in
/// floating point as well.
pub fn memory_length_for_accuracy(bound_m: f64, accuracy: f64, order: f64) -> Result<MemoryPlan, FracError> {
    check_order(order)?;
    if !(bound_m.is_finite() && bound_m > 0.0) {
        return Err(FracError::Domain(format!("signal bound must be positive, got {bound_m}")));
    }
    if !(accuracy.is_finite() && accuracy > 0.0) {
        return Err(FracError::Domain(format!("accuracy must be positive, got {accuracy}")));
    }
    let g = gamma(1.0 - order)?.abs();
    let mut length = (bound_m / (accuracy * g)).powf(1.0 / order);
    if !(length.is_finite() && length > 0.0) {
        return Err(FracError::Domain("requested accuracy needs an unrepresentable memory length".into()));
    }
    while short_memory_error_bound(bound_m, length, order)? > accuracy {
        length = length.next_up();
    }
    Ok(MemoryPlan {
        bound_m,
        accuracy,
        order,
        length,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_examples() {
        let b = short_memory_error_bound(1.0, 100.0, 0.5).unwrap();
        assert!((b - 0.056_418_958_354_775_63).abs() < 1e-12, "{b}");
        assert_eq!(short_memory_error_bound(0.0, 3.0, 0.4).unwrap(), 0.0);
        let b = short_memory_error_bound(1.0, 3183.1, 0.5).unwrap();
        assert!((b - 0.01).abs() < 1e-4, "{b}");
    }

    #[test]
    fn bound_rejects_orders_outside_unit_interval() {
        for order in [0.0, 1.0, -0.2, 1.5, f64::NAN] {
            assert!(matches!(
                short_memory_error_bound(1.0, 1.0, order),
                Err(FracError::Domain(_))
            ));
        }
    }

    #[test]
    fn planner_examples() {
        let plan = memory_length_for_accuracy(1.0, 0.01, 0.5).unwrap();
        assert!((plan.length - 3_183.098_861_837_907).abs() < 1e-6, "{}", plan.length);
        assert!(short_memory_error_bound(1.0, plan.length, 0.5).unwrap() <= 0.01);

        let acc = 1.0 / gamma(0.5).unwrap();
        let plan = memory_length_for_accuracy(1.0, acc, 0.5).unwrap();
        assert!((plan.length - 1.0).abs() < 1e-12, "{}", plan.length);
        assert!(short_memory_error_bound(1.0, plan.length, 0.5).unwrap() <= acc);
    }
}
