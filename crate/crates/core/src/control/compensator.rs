//! Single-layer critic network approximating the optimal cost of the
//! error dynamics, and the compensating input it implies.

use serde::{Deserialize, Serialize};

use super::{require_positive, ControlError};

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];

const IDENTITY: Mat3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

fn mat_vec(m: &Mat3, v: &Vec3) -> Vec3 {
    [0, 1, 2].map(|i| m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2])
}

fn mat_t_vec(m: &Mat3, v: &Vec3) -> Vec3 {
    [0, 1, 2].map(|j| m[0][j] * v[0] + m[1][j] * v[1] + m[2][j] * v[2])
}

fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CompensatorParams {
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    /// State weight of the cost; must be symmetric positive-definite.
    pub q: Mat3,
    /// Control weight of the cost.
    pub r: f64,
    /// Critic learning rate.
    pub kappa: f64,
    /// Number of critic features; only 3 is supported.
    pub n_c: usize,
}

impl Default for CompensatorParams {
    fn default() -> Self {
        Self {
            lambda1: 10.0,
            lambda2: 1.0,
            lambda3: 0.1,
            q: IDENTITY,
            r: 494.0,
            kappa: 1e-5,
            n_c: 3,
        }
    }
}

impl CompensatorParams {
    pub fn validate(&self) -> Result<(), ControlError> {
        require_positive("lambda1", self.lambda1)?;
        require_positive("lambda2", self.lambda2)?;
        require_positive("lambda3", self.lambda3)?;
        require_positive("r", self.r)?;
        require_positive("kappa", self.kappa)?;
        if self.n_c != 3 {
            return Err(ControlError::Invalid(format!(
                "critic width must be 3, got {}",
                self.n_c
            )));
        }
        check_spd(&self.q)
    }
}

/// Symmetry to a relative 1e-12, then positive-definiteness via Cholesky.
#[allow(clippy::needless_range_loop)]
fn check_spd(q: &Mat3) -> Result<(), ControlError> {
    if q.iter().flatten().any(|v| !v.is_finite()) {
        return Err(ControlError::Invalid("Q must be finite".into()));
    }
    let scale = q.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    for i in 0..3 {
        for j in (i + 1)..3 {
            if (q[i][j] - q[j][i]).abs() > 1e-12 * scale {
                return Err(ControlError::Invalid("Q must be symmetric".into()));
            }
        }
    }
    let mut l = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..=i {
            let mut acc = q[i][j];
            for k in 0..j {
                acc -= l[i][k] * l[j][k];
            }
            if i == j {
                if acc <= 0.0 {
                    return Err(ControlError::Invalid("Q must be positive-definite".into()));
                }
                l[i][i] = acc.sqrt();
            } else {
                l[i][j] = acc / l[j][j];
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CompensatorState {
    /// Weighted error vector [λ1∫e, λ2·e, λ3·ė].
    pub i: Vec3,
    pub w_hat: Vec3,
    pub integral_e: f64,
    /// Error vector of the previous tick, for its backward difference.
    pub prev_i: Option<Vec3>,
}

pub fn compensator_io(e: f64, e_dot: f64, integral_e: f64, params: &CompensatorParams) -> Vec3 {
    [
        params.lambda1 * integral_e,
        params.lambda2 * e,
        params.lambda3 * e_dot,
    ]
}

/// Logistic features and their (diagonal) Jacobian.
pub fn activation(i: &Vec3) -> (Vec3, Mat3) {
    let sigma = i.map(|x| 1.0 / (1.0 + (-x).exp()));
    let mut grad = [[0.0; 3]; 3];
    for k in 0..3 {
        grad[k][k] = sigma[k] * (1.0 - sigma[k]);
    }
    (sigma, grad)
}

/// −½·R⁻¹·g_c3·(∇σᵀŴ)₃; only the third input channel is actuated.
pub fn compensator_control(state: &CompensatorState, g_c3: f64, params: &CompensatorParams) -> f64 {
    let (_, grad) = activation(&state.i);
    let cost_grad = mat_t_vec(&grad, &state.w_hat);
    -0.5 / params.r * g_c3 * cost_grad[2]
}

/// Hamiltonian residual IᵀQI + R·μ_c² + (∇σᵀŴ)·İ.
pub fn hamiltonian_estimate(i: &Vec3, i_dot: &Vec3, mu_c: f64, w_hat: &Vec3, params: &CompensatorParams) -> f64 {
    let (_, grad) = activation(i);
    let cost_grad = mat_t_vec(&grad, w_hat);
    dot(i, &mat_vec(&params.q, i)) + params.r * mu_c * mu_c + dot(&cost_grad, i_dot)
}

/// Gradient step Ŵ ← Ŵ − dt·κ·Ĥ·(∇σ·İ).
pub fn update_weights(
    state: &CompensatorState,
    h_hat: f64,
    grad_sigma: &Mat3,
    i_dot: &Vec3,
    dt: f64,
    params: &CompensatorParams,
) -> CompensatorState {
    let regressor = mat_vec(grad_sigma, i_dot);
    let gain = dt * params.kappa * h_hat;
    let mut next = *state;
    for (w, r) in next.w_hat.iter_mut().zip(regressor) {
        *w -= gain * r;
    }
    next
}

/// Compensator with running state; one `tick` per controller sample.
#[derive(Debug, Clone)]
pub struct Compensator {
    params: CompensatorParams,
    g_c3: f64,
    state: CompensatorState,
}

impl Compensator {
    /// `g_c3` is λ3·ḡ/m̄, the input gain seen by the third error channel.
    pub fn new(params: CompensatorParams, g_c3: f64) -> Result<Self, ControlError> {
        params.validate()?;
        if !g_c3.is_finite() {
            return Err(ControlError::Invalid("compensator input gain must be finite".into()));
        }
        Ok(Self {
            params,
            g_c3,
            state: CompensatorState::default(),
        })
    }

    pub fn state(&self) -> &CompensatorState {
        &self.state
    }

    /// Integrates the error, forms I, emits μ_c, then adapts Ŵ using the
    /// backward difference of I (zero on the first tick).
    pub fn tick(&mut self, e: f64, e_dot: f64, dt: f64) -> Result<f64, ControlError> {
        let st = &mut self.state;
        st.integral_e += e * dt;
        st.i = compensator_io(e, e_dot, st.integral_e, &self.params);
        let mu_c = compensator_control(st, self.g_c3, &self.params);
        let i_dot = match st.prev_i {
            Some(prev) => [0, 1, 2].map(|k| (st.i[k] - prev[k]) / dt),
            None => [0.0; 3],
        };
        let h = hamiltonian_estimate(&st.i, &i_dot, mu_c, &st.w_hat, &self.params);
        let (_, grad) = activation(&st.i);
        let next = update_weights(st, h, &grad, &i_dot, dt, &self.params);
        st.w_hat = next.w_hat;
        st.prev_i = Some(st.i);
        if !(mu_c.is_finite() && st.w_hat.iter().all(|w| w.is_finite())) {
            return Err(ControlError::Fault("compensator output"));
        }
        Ok(mu_c)
    }
}
