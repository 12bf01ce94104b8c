//! Control laws: the adaptive fractional-order sliding mode controller, its
//! critic-network compensator, and the PID and SMC baselines with a
//! disturbance observer.

mod afosmc;
mod baseline;
mod compensator;

use thiserror::Error;

use crate::fraccalc::FracError;

pub use afosmc::{
    afosmc_control, pi_bound, sliding_surface, update_beta, update_epsilon, Afosmc, AfosmcOperators,
    AfosmcOutput, AfosmcParams, AfosmcState,
};
pub use baseline::{
    dob_estimate, pid_dob_control, smc_dob_control, BaselineParams, DobState, PidGains, SmcGains,
};
pub use compensator::{
    activation, compensator_control, compensator_io, hamiltonian_estimate, update_weights, Compensator,
    CompensatorParams, CompensatorState, Mat3, Vec3,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ControlError {
    #[error("invalid controller parameters: {0}")]
    Invalid(String),
    #[error("controller produced a non-finite {0}")]
    Fault(&'static str),
    #[error(transparent)]
    Frac(#[from] FracError),
}

/// Sign with sgn(0) = 0.
pub fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Unit saturation: identity on [−1, 1], clipped outside.
pub fn sat(x: f64) -> f64 {
    x.clamp(-1.0, 1.0)
}

pub fn total_control(mu_s: f64, mu_c: f64) -> f64 {
    mu_s + mu_c
}

pub(crate) fn require_positive(name: &str, v: f64) -> Result<(), ControlError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(ControlError::Invalid(format!("{name} must be positive, got {v}")))
    }
}
