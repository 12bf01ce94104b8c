use crate::fraccalc::{capacity_for_memory, CoeffCache, FracOperator, HistoryWindow};
use crate::plant::PlantParams;

use super::{require_positive, sgn, ControlError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AfosmcParams {
    /// Weight on the error in the sliding surface.
    pub lambda: f64,
    /// Fractional order, strictly between 0 and 1.
    pub alpha: f64,
    pub k_p: f64,
    pub k_s: f64,
    /// Decay rate of the robustness gain denominator.
    pub l_bar: f64,
    /// Adaptation rate of the uncertainty bound estimate.
    pub k1: f64,
    pub epsilon0: f64,
    pub beta0: f64,
    /// Projection ceiling for the bound estimate. The robust term's gain grows
    /// as β̂², and the sampled loop tolerates only a limited total gain.
    pub beta_max: f64,
    /// Operator memory in seconds.
    pub memory_l: f64,
    pub epsilon_floor: f64,
}

impl Default for AfosmcParams {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            alpha: 0.5,
            k_p: 2000.0,
            k_s: 1.0,
            l_bar: 0.01,
            k1: 0.1,
            epsilon0: 1.0,
            beta0: 0.1,
            beta_max: 2.0,
            memory_l: 50.0,
            epsilon_floor: 1e-6,
        }
    }
}

impl AfosmcParams {
    pub fn validate(&self) -> Result<(), ControlError> {
        require_positive("lambda", self.lambda)?;
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(ControlError::Invalid(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        require_positive("k_p", self.k_p)?;
        require_positive("k_s", self.k_s)?;
        require_positive("l_bar", self.l_bar)?;
        require_positive("k1", self.k1)?;
        require_positive("epsilon0", self.epsilon0)?;
        require_positive("beta0", self.beta0)?;
        if !(self.beta_max.is_finite() && self.beta_max >= self.beta0) {
            return Err(ControlError::Invalid(format!(
                "beta_max must be finite and at least beta0 = {}, got {}",
                self.beta0, self.beta_max
            )));
        }
        require_positive("memory_l", self.memory_l)?;
        if !(self.epsilon_floor.is_finite() && self.epsilon_floor >= 0.0) {
            return Err(ControlError::Invalid(format!(
                "epsilon_floor must be non-negative, got {}",
                self.epsilon_floor
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AfosmcState {
    pub s: f64,
    pub beta_hat: f64,
    pub epsilon: f64,
    /// Time since the controller started, drives the closed-form ε.
    pub elapsed: f64,
    pub e_window: HistoryWindow,
    pub e_dot_window: HistoryWindow,
    pub s_window: HistoryWindow,
    /// History of s·Π²/ε.
    pub robust_window: HistoryWindow,
}

impl AfosmcState {
    pub fn new(params: &AfosmcParams, step: f64, origin_time: f64) -> Result<Self, ControlError> {
        let cap = capacity_for_memory(params.memory_l, step)?;
        let window = HistoryWindow::new(cap, step, origin_time)?;
        Ok(Self {
            s: 0.0,
            beta_hat: params.beta0,
            epsilon: params.epsilon0.max(params.epsilon_floor),
            elapsed: 0.0,
            e_window: window.clone(),
            e_dot_window: window.clone(),
            s_window: window.clone(),
            robust_window: window,
        })
    }
}

/// Weight tables shared by the four windows: one of order 1+α for the
/// surface and one of order −α for the integrals.
#[derive(Debug, Clone, PartialEq)]
pub struct AfosmcOperators {
    pub surface: FracOperator,
    pub integral: FracOperator,
}

impl AfosmcOperators {
    pub fn new(alpha: f64, capacity: usize, step: f64) -> Result<Self, ControlError> {
        Ok(Self {
            surface: FracOperator::new(1.0 + alpha, capacity, step)?,
            integral: FracOperator::new(-alpha, capacity, step)?,
        })
    }

    pub fn cached(alpha: f64, capacity: usize, step: f64, cache: &CoeffCache) -> Result<Self, ControlError> {
        Ok(Self {
            surface: FracOperator::cached(1.0 + alpha, capacity, step, cache)?,
            integral: FracOperator::cached(-alpha, capacity, step, cache)?,
        })
    }

    fn for_window(alpha: f64, w: &HistoryWindow) -> Result<Self, ControlError> {
        Self::new(alpha, w.capacity().max(w.len()).max(1), w.step())
    }
}

fn surface_with(op: &FracOperator, e_window: &HistoryWindow, lambda: f64) -> Result<f64, ControlError> {
    let latest = e_window.latest().ok_or_else(|| {
        ControlError::Frac(crate::fraccalc::FracError::Usage(
            "sliding surface needs at least one error sample".into(),
        ))
    })?;
    Ok(lambda * latest + op.eval(e_window)?)
}

/// s = λe + D^{1+α}e, the derivative taken in one GL sum over the window.
pub fn sliding_surface(e_window: &HistoryWindow, params: &AfosmcParams) -> Result<f64, ControlError> {
    let ops = AfosmcOperators::for_window(params.alpha, e_window)?;
    surface_with(&ops.surface, e_window, params.lambda)
}

/// β̂·(|q|+1)².
pub fn pi_bound(beta_hat: f64, q: f64) -> f64 {
    let w = q.abs() + 1.0;
    beta_hat * w * w
}

#[allow(clippy::too_many_arguments)]
fn law_with(
    state: &AfosmcState,
    ops: &AfosmcOperators,
    plant: &PlantParams,
    q: f64,
    q_dot: f64,
    q_ddot_ref: f64,
    params: &AfosmcParams,
) -> Result<f64, ControlError> {
    let m = plant.m_bar;
    let e_dot_int = ops.integral.eval(&state.e_dot_window)?;
    let s_int = ops.integral.eval(&state.s_window)?;
    let robust_int = ops.integral.eval(&state.robust_window)?;
    let numer = plant.b_bar * q_dot + plant.c_bar * q + m * q_ddot_ref
        - params.lambda * m * e_dot_int
        - params.k_p * m * s_int
        - params.k_s * m * sgn(state.s)
        - m * robust_int;
    let mu = numer / plant.g_bar;
    if mu.is_finite() {
        Ok(mu)
    } else {
        Err(ControlError::Fault("sliding-mode control"))
    }
}

/// Sliding-mode part of the control input computed from the windows held in `state`.
pub fn afosmc_control(
    state: &AfosmcState,
    plant_nominal: &PlantParams,
    q: f64,
    q_dot: f64,
    q_ddot_ref: f64,
    params: &AfosmcParams,
) -> Result<f64, ControlError> {
    let ops = AfosmcOperators::for_window(params.alpha, &state.s_window)?;
    law_with(state, &ops, plant_nominal, q, q_dot, q_ddot_ref, params)
}

/// Forward-Euler step of β̂' = k1·|s|·(|q|+1)², projected onto β̂ ≤ beta_max.
/// An estimate already above the ceiling is held, never lowered.
pub fn update_beta(state: &AfosmcState, q: f64, dt: f64, params: &AfosmcParams) -> AfosmcState {
    let mut next = state.clone();
    advance_beta(&mut next, q, dt, params);
    next
}

fn advance_beta(state: &mut AfosmcState, q: f64, dt: f64, params: &AfosmcParams) {
    let grown = state.beta_hat + dt * params.k1 * state.s.abs() * pi_bound(1.0, q);
    state.beta_hat = grown.min(params.beta_max.max(state.beta_hat));
}

/// Advances ε by `dt` along ε₀·exp(−l̄·t), never dropping below the floor.
pub fn update_epsilon(state: &AfosmcState, dt: f64, params: &AfosmcParams) -> AfosmcState {
    let mut next = state.clone();
    advance_epsilon(&mut next, dt, params);
    next
}

fn advance_epsilon(state: &mut AfosmcState, dt: f64, params: &AfosmcParams) {
    state.elapsed += dt;
    if state.epsilon <= params.epsilon_floor {
        state.epsilon = params.epsilon_floor;
        return;
    }
    let decayed = params.epsilon0 * (-params.l_bar * state.elapsed).exp();
    state.epsilon = decayed.max(params.epsilon_floor);
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AfosmcOutput {
    pub mu_s: f64,
    pub s: f64,
    /// Estimate and gain in force during this tick, before adaptation.
    pub beta_hat: f64,
    pub epsilon: f64,
}

/// The sliding-mode controller with its own windows and weight tables.
#[derive(Debug, Clone)]
pub struct Afosmc {
    params: AfosmcParams,
    plant: PlantParams,
    ops: AfosmcOperators,
    state: AfosmcState,
}

impl Afosmc {
    pub fn new(params: AfosmcParams, plant_nominal: PlantParams, step: f64) -> Result<Self, ControlError> {
        Self::with_cache(params, plant_nominal, step, &CoeffCache::new())
    }

    pub fn with_cache(
        params: AfosmcParams,
        plant_nominal: PlantParams,
        step: f64,
        cache: &CoeffCache,
    ) -> Result<Self, ControlError> {
        params.validate()?;
        let state = AfosmcState::new(&params, step, 0.0)?;
        let ops = AfosmcOperators::cached(params.alpha, state.e_window.capacity(), step, cache)?;
        Ok(Self {
            params,
            plant: plant_nominal,
            ops,
            state,
        })
    }

    pub fn state(&self) -> &AfosmcState {
        &self.state
    }

    pub fn params(&self) -> &AfosmcParams {
        &self.params
    }

    /// One controller tick: record the new error samples, form the surface,
    /// compute μ_s, then adapt β̂ and ε for the next tick.
    pub fn tick(
        &mut self,
        e: f64,
        e_dot: f64,
        q: f64,
        q_dot: f64,
        q_ddot_ref: f64,
        dt: f64,
    ) -> Result<AfosmcOutput, ControlError> {
        let st = &mut self.state;
        st.e_window.push(e)?;
        st.e_dot_window.push(e_dot)?;
        st.s = surface_with(&self.ops.surface, &st.e_window, self.params.lambda)?;
        if !st.s.is_finite() {
            return Err(ControlError::Fault("sliding value"));
        }
        st.s_window.push(st.s)?;
        let pi = pi_bound(st.beta_hat, q);
        let robust = st.s * pi * pi / st.epsilon;
        if !robust.is_finite() {
            return Err(ControlError::Fault("robust term"));
        }
        st.robust_window.push(robust)?;

        let mu_s = law_with(st, &self.ops, &self.plant, q, q_dot, q_ddot_ref, &self.params)?;
        let out = AfosmcOutput {
            mu_s,
            s: st.s,
            beta_hat: st.beta_hat,
            epsilon: st.epsilon,
        };
        advance_beta(st, q, dt, &self.params);
        advance_epsilon(st, dt, &self.params);
        Ok(out)
    }
}
