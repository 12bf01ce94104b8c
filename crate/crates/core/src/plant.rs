//! Second-order ultrasonic-motor model with time-varying parameter
//! uncertainty, integrated by fixed-step RK4 under a zero-order hold.
//!
//! Positions are in mm, velocities in mm/s, time in seconds.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlantError {
    #[error("invalid plant parameters: {0}")]
    Invalid(String),
    #[error("plant state became non-finite at t = {t}")]
    Diverged { t: f64 },
}

/// `amplitude·sin(2π·frequency·t + phase)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Sinusoid {
    pub amplitude: f64,
    pub frequency: f64,
    pub phase: f64,
}

impl Sinusoid {
    pub fn new(amplitude: f64, frequency: f64) -> Self {
        Self {
            amplitude,
            frequency,
            phase: 0.0,
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn at(&self, t: f64) -> f64 {
        if self.amplitude == 0.0 {
            0.0
        } else {
            self.amplitude * (TAU * self.frequency * t + self.phase).sin()
        }
    }

    fn is_finite(&self) -> bool {
        self.amplitude.is_finite() && self.frequency.is_finite() && self.phase.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Friction {
    /// Coulomb level in N, smoothed by tanh over `transition_width`.
    pub coulomb_level: f64,
    pub viscous_extra: f64,
    /// Velocity scale of the tanh transition, mm/s.
    pub transition_width: f64,
}

impl Default for Friction {
    fn default() -> Self {
        Self {
            coulomb_level: 0.5,
            viscous_extra: 0.0,
            transition_width: 1e-3,
        }
    }
}

impl Friction {
    pub fn none() -> Self {
        Self {
            coulomb_level: 0.0,
            viscous_extra: 0.0,
            ..Self::default()
        }
    }

    pub fn force(&self, q_dot: f64) -> f64 {
        let mut f = self.viscous_extra * q_dot;
        if self.coulomb_level != 0.0 {
            f += self.coulomb_level * (q_dot / self.transition_width).tanh();
        }
        f
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct UncertaintyModel {
    pub dm: Sinusoid,
    pub db: Sinusoid,
    pub dc: Sinusoid,
    pub dg: Sinusoid,
    pub friction: Friction,
}

impl Default for UncertaintyModel {
    /// 10 % swings on damping, stiffness and gain at 0.5 Hz plus smooth Coulomb friction.
    fn default() -> Self {
        let nominal = PlantParams::nominal();
        Self {
            dm: Sinusoid::zero(),
            db: Sinusoid::new(0.1 * nominal.b_bar, 0.5),
            dc: Sinusoid::new(0.1 * nominal.c_bar, 0.5),
            dg: Sinusoid::new(0.1 * nominal.g_bar, 0.5),
            friction: Friction::default(),
        }
    }
}

impl UncertaintyModel {
    pub fn none() -> Self {
        Self {
            dm: Sinusoid::zero(),
            db: Sinusoid::zero(),
            dc: Sinusoid::zero(),
            dg: Sinusoid::zero(),
            friction: Friction::none(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlantParams {
    pub m_bar: f64,
    pub b_bar: f64,
    pub c_bar: f64,
    pub g_bar: f64,
    pub uncertainty: UncertaintyModel,
}

impl Default for PlantParams {
    fn default() -> Self {
        let mut p = Self::nominal();
        p.uncertainty = UncertaintyModel::default();
        p
    }
}

impl PlantParams {
    /// Identified nominal motor with no uncertainty or friction.
    pub fn nominal() -> Self {
        Self {
            m_bar: 1.0,
            b_bar: 248.4,
            c_bar: 202.0,
            g_bar: 4940.0,
            uncertainty: UncertaintyModel::none(),
        }
    }

    pub fn without_uncertainty(&self) -> Self {
        Self {
            uncertainty: UncertaintyModel::none(),
            ..*self
        }
    }

    pub fn validate(&self) -> Result<(), PlantError> {
        let bad = |msg: String| Err(PlantError::Invalid(msg));
        for (name, v) in [
            ("m_bar", self.m_bar),
            ("b_bar", self.b_bar),
            ("c_bar", self.c_bar),
            ("g_bar", self.g_bar),
        ] {
            if !v.is_finite() {
                return bad(format!("{name} must be finite"));
            }
        }
        if self.m_bar <= 0.0 {
            return bad(format!("m_bar must be positive, got {}", self.m_bar));
        }
        if self.g_bar == 0.0 {
            return bad("g_bar must be nonzero".into());
        }
        let u = &self.uncertainty;
        for (name, s) in [("dm", u.dm), ("db", u.db), ("dc", u.dc), ("dg", u.dg)] {
            if !s.is_finite() {
                return bad(format!("uncertainty {name} must be finite"));
            }
        }
        if u.dm.amplitude.abs() >= self.m_bar {
            return bad(format!(
                "mass uncertainty amplitude {} would allow a non-positive mass",
                u.dm.amplitude
            ));
        }
        let f = &u.friction;
        if !(f.coulomb_level.is_finite() && f.viscous_extra.is_finite()) {
            return bad("friction coefficients must be finite".into());
        }
        if !(f.transition_width.is_finite() && f.transition_width > 0.0) {
            return bad("friction transition width must be positive".into());
        }
        Ok(())
    }

    pub fn mass_at(&self, t: f64) -> f64 {
        self.m_bar + self.uncertainty.dm.at(t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PlantState {
    pub q: f64,
    pub q_dot: f64,
    pub t: f64,
}

impl PlantState {
    pub fn is_finite(&self) -> bool {
        self.q.is_finite() && self.q_dot.is_finite() && self.t.is_finite()
    }

    /// ½m̄q̇² + ½c̄q² under the nominal coefficients.
    pub fn nominal_energy(&self, params: &PlantParams) -> f64 {
        0.5 * params.m_bar * self.q_dot * self.q_dot + 0.5 * params.c_bar * self.q * self.q
    }
}

fn accel_at(t: f64, q: f64, q_dot: f64, mu: f64, p: &PlantParams) -> f64 {
    let u = &p.uncertainty;
    let m = p.m_bar + u.dm.at(t);
    let b = p.b_bar + u.db.at(t);
    let c = p.c_bar + u.dc.at(t);
    let g = p.g_bar + u.dg.at(t);
    (g * mu - b * q_dot - c * q - u.friction.force(q_dot)) / m
}

/// q̈ with every coefficient evaluated as nominal plus uncertain part at `state.t`.
pub fn acceleration(state: &PlantState, mu: f64, params: &PlantParams) -> f64 {
    accel_at(state.t, state.q, state.q_dot, mu, params)
}

/// One classical RK4 step with `mu` held constant.
pub fn step(state: &PlantState, mu: f64, params: &PlantParams, dt: f64) -> Result<PlantState, PlantError> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(PlantError::Invalid(format!("step size must be positive, got {dt}")));
    }
    let (t, q, v) = (state.t, state.q, state.q_dot);
    let h = 0.5 * dt;

    let k1q = v;
    let k1v = accel_at(t, q, v, mu, params);
    let k2q = v + h * k1v;
    let k2v = accel_at(t + h, q + h * k1q, k2q, mu, params);
    let k3q = v + h * k2v;
    let k3v = accel_at(t + h, q + h * k2q, k3q, mu, params);
    let k4q = v + dt * k3v;
    let k4v = accel_at(t + dt, q + dt * k3q, k4q, mu, params);

    let next = PlantState {
        q: q + dt / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q),
        q_dot: v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
        t: t + dt,
    };
    if next.is_finite() {
        Ok(next)
    } else {
        Err(PlantError::Diverged { t: next.t })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at_rest() -> PlantState {
        PlantState::default()
    }

    #[test]
    fn input_gain() {
        assert_eq!(acceleration(&at_rest(), 1.0, &PlantParams::nominal()), 4940.0);
    }

    #[test]
    fn equilibrium() {
        assert_eq!(acceleration(&at_rest(), 0.0, &PlantParams::nominal()), 0.0);
        let s = step(&at_rest(), 0.0, &PlantParams::nominal(), 1e-3).unwrap();
        assert_eq!((s.q, s.q_dot, s.t), (0.0, 0.0, 1e-3));
    }

    #[test]
    fn spring_term() {
        let s = PlantState { q: 1.0, ..at_rest() };
        assert_eq!(acceleration(&s, 0.0, &PlantParams::nominal()), -202.0);
    }

    #[test]
    fn free_decay() {
        let p = PlantParams::nominal();
        let mut s = PlantState { q: 1.0, ..at_rest() };
        for _ in 0..10_000 {
            s = step(&s, 0.0, &p, 1e-3).unwrap();
        }
        assert!(s.q.abs() < 1e-3 && s.q_dot.abs() < 1e-3, "{s:?}");
    }

    #[test]
    fn divergence_is_reported() {
        let s = PlantState { q: f64::MAX, q_dot: f64::MAX, t: 0.0 };
        assert!(matches!(
            step(&s, 0.0, &PlantParams::nominal(), 1e-3),
            Err(PlantError::Diverged { .. })
        ));
    }

    #[test]
    fn validation() {
        let mut p = PlantParams::default();
        p.validate().unwrap();
        p.m_bar = 0.0;
        assert!(p.validate().is_err());
        let p = PlantParams {
            g_bar: 0.0,
            ..PlantParams::default()
        };
        assert!(p.validate().is_err());
        let mut p = PlantParams::default();
        p.uncertainty.dm.amplitude = 1.0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn default_uncertainty_shape() {
        let u = UncertaintyModel::default();
        assert!((u.db.amplitude - 24.84).abs() < 1e-12);
        assert!((u.dg.amplitude - 494.0).abs() < 1e-12);
        assert_eq!(u.dg.frequency, 0.5);
        assert_eq!(u.friction.coulomb_level, 0.5);
        assert_eq!(u.friction.viscous_extra, 0.0);
    }
}
