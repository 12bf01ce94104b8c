//! Comparison controllers: PID and boundary-layer SMC, both fed by a
//! nominal-model disturbance observer.

use serde::{Deserialize, Serialize};

use crate::plant::PlantParams;

use super::{require_positive, sat, ControlError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PidGains {
    pub k_x1: f64,
    pub k_x2: f64,
    pub k_x3: f64,
}

impl Default for PidGains {
    fn default() -> Self {
        Self {
            k_x1: 37.0,
            k_x2: 0.1,
            k_x3: 160.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SmcGains {
    pub lambda_y: f64,
    pub k_y1: f64,
    pub k_y2: f64,
    /// Boundary-layer width of the saturation.
    pub sigma_y: f64,
}

impl Default for SmcGains {
    fn default() -> Self {
        Self {
            lambda_y: 50.0,
            k_y1: 500.0,
            k_y2: 300.0,
            sigma_y: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BaselineParams {
    pub pid: PidGains,
    pub smc: SmcGains,
    /// Observer bandwidth, rad/s.
    pub dob_bandwidth: f64,
}

impl Default for BaselineParams {
    fn default() -> Self {
        Self {
            pid: PidGains::default(),
            smc: SmcGains::default(),
            dob_bandwidth: 500.0,
        }
    }
}

impl BaselineParams {
    pub fn validate(&self) -> Result<(), ControlError> {
        require_positive("k_x1", self.pid.k_x1)?;
        require_positive("k_x2", self.pid.k_x2)?;
        require_positive("k_x3", self.pid.k_x3)?;
        require_positive("lambda_y", self.smc.lambda_y)?;
        require_positive("k_y1", self.smc.k_y1)?;
        require_positive("k_y2", self.smc.k_y2)?;
        require_positive("sigma_y", self.smc.sigma_y)?;
        require_positive("dob_bandwidth", self.dob_bandwidth)
    }
}

/// Observer memory: the auxiliary state and the last estimate.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DobState {
    pub aux: f64,
    pub d_hat: f64,
}

impl DobState {
    /// State that treats `q_dot0` as already steady, so a nonzero starting
    /// velocity does not register as an acceleration impulse.
    pub fn at_velocity(q_dot0: f64, plant_nominal: &PlantParams, dt: f64, bandwidth: f64) -> Self {
        let a = (-bandwidth * dt).exp();
        Self {
            aux: -(1.0 - a) * plant_nominal.m_bar / dt * q_dot0,
            d_hat: 0.0,
        }
    }
}

/// Discrete first-order low-pass (pole e^{−ω·dt}) of the lumped mismatch
/// m̄q̈ + b̄q̇ + c̄q − ḡμ. The acceleration enters only through the velocity
/// difference, which the auxiliary state carries between calls.
pub fn dob_estimate(
    state: &DobState,
    q: f64,
    q_dot: f64,
    mu: f64,
    plant_nominal: &PlantParams,
    dt: f64,
    bandwidth: f64,
) -> (DobState, f64) {
    let a = (-bandwidth * dt).exp();
    let gain = plant_nominal.m_bar / dt;
    let rest = plant_nominal.b_bar * q_dot + plant_nominal.c_bar * q - plant_nominal.g_bar * mu;
    let x = state.aux + (1.0 - a) * rest;
    let d_hat = x + (1.0 - a) * gain * q_dot;
    let aux = a * x - (1.0 - a) * (1.0 - a) * gain * q_dot;
    (DobState { aux, d_hat }, d_hat)
}

/// −k_x1·e − k_x2·∫e − k_x3·ė − d̂.
pub fn pid_dob_control(e: f64, integral_e: f64, e_dot: f64, d_hat: f64, params: &BaselineParams) -> f64 {
    let g = &params.pid;
    -g.k_x1 * e - g.k_x2 * integral_e - g.k_x3 * e_dot - d_hat
}

/// Nominal-model SMC on s_y = ė + λ_y·e with a saturated switching term.
#[allow(clippy::too_many_arguments)]
pub fn smc_dob_control(
    e: f64,
    e_dot: f64,
    q: f64,
    q_dot: f64,
    q_ddot_ref: f64,
    d_hat: f64,
    plant_nominal: &PlantParams,
    params: &BaselineParams,
) -> f64 {
    let PlantParams {
        m_bar: m,
        b_bar: b,
        c_bar: c,
        g_bar: g,
        ..
    } = *plant_nominal;
    let k = &params.smc;
    let s_y = e_dot + k.lambda_y * e;
    (m / g)
        * (b / m * q_dot + c / m * q + q_ddot_ref
            - k.lambda_y * e_dot
            - k.k_y1 * s_y
            - k.k_y2 * sat(s_y / k.sigma_y)
            - d_hat / m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pid_examples() {
        let p = BaselineParams::default();
        assert_eq!(pid_dob_control(0.0, 0.0, 0.0, 0.0, &p), 0.0);
        assert_eq!(pid_dob_control(1.0, 0.0, 0.0, 0.0, &p), -37.0);
        assert_eq!(pid_dob_control(0.0, 0.0, 0.0, 1.0, &p), -1.0);
    }

    #[test]
    fn smc_examples() {
        let p = BaselineParams::default();
        let plant = PlantParams::nominal();
        assert_eq!(smc_dob_control(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, &plant, &p), 0.0);
        let mu = smc_dob_control(0.0, 0.0, 1.0, 0.0, 0.0, 0.0, &plant, &p);
        assert!((mu - 202.0 / 4940.0).abs() < 1e-15, "{mu}");
        // s_y/σ_y = 2 saturates: the switching term contributes exactly k_y2
        let e_dot = 0.2;
        let mu = smc_dob_control(0.0, e_dot, 0.0, 0.0, 0.0, 0.0, &plant, &p);
        let want = (-50.0 * e_dot - 500.0 * e_dot - 300.0) / 4940.0;
        assert!((mu - want).abs() < 1e-15, "{mu} vs {want}");
    }

    #[test]
    fn dob_rests_at_zero() {
        let plant = PlantParams::nominal();
        let mut st = DobState::default();
        for _ in 0..100 {
            let (next, d) = dob_estimate(&st, 0.0, 0.0, 0.0, &plant, 1e-3, 500.0);
            assert_eq!(d, 0.0);
            st = next;
        }
    }

    #[test]
    fn dob_infinite_bandwidth_is_the_raw_residual() {
        let plant = PlantParams::nominal();
        let dt = 1e-3;
        let (st, _) = dob_estimate(&DobState::default(), 0.1, 2.0, 0.01, &plant, dt, f64::INFINITY);
        let (_, d) = dob_estimate(&st, 0.12, 2.5, 0.02, &plant, dt, f64::INFINITY);
        let residual = plant.m_bar * (2.5 - 2.0) / dt + plant.b_bar * 2.5 + plant.c_bar * 0.12 - plant.g_bar * 0.02;
        assert!((d - residual).abs() < 1e-9 * residual.abs(), "{d} vs {residual}");
    }

    #[test]
    fn primed_observer_ignores_initial_velocity() {
        let plant = PlantParams::nominal();
        let st = DobState::at_velocity(6.0, &plant, 1e-3, 500.0);
        let mu = plant.b_bar * 6.0 / plant.g_bar;
        let (_, d) = dob_estimate(&st, 0.0, 6.0, mu, &plant, 1e-3, 500.0);
        assert!(d.abs() < 1e-9, "{d}");
    }
}
