use serde::{Deserialize, Serialize};

use crate::control::{
    dob_estimate, pid_dob_control, smc_dob_control, total_control, Afosmc, AfosmcParams, BaselineParams,
    Compensator, CompensatorParams, ControlError, DobState,
};
use crate::fraccalc::CoeffCache;
use crate::plant::{self, PlantParams, PlantState};

use super::{reference_at, HarnessError, Reference};

/// Which controller stack closes the loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum CaseId {
    /// Fractional sliding mode with the critic compensator.
    Afosmc,
    /// PID with disturbance observer.
    PidDob,
    /// Boundary-layer SMC with disturbance observer.
    SmcDob,
}

impl CaseId {
    pub const ALL: [CaseId; 3] = [CaseId::Afosmc, CaseId::PidDob, CaseId::SmcDob];

    pub fn number(self) -> u8 {
        match self {
            CaseId::Afosmc => 1,
            CaseId::PidDob => 2,
            CaseId::SmcDob => 3,
        }
    }
}

impl TryFrom<u8> for CaseId {
    type Error = String;
    fn try_from(v: u8) -> Result<Self, String> {
        match v {
            1 => Ok(CaseId::Afosmc),
            2 => Ok(CaseId::PidDob),
            3 => Ok(CaseId::SmcDob),
            _ => Err(format!("case must be 1, 2 or 3, got {v}")),
        }
    }
}

impl From<CaseId> for u8 {
    fn from(c: CaseId) -> u8 {
        c.number()
    }
}

impl std::fmt::Display for CaseId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Case {}", self.number())
    }
}

/// Loop-level choices that are not controller gains.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunOptions {
    /// Plant step and controller tick, s.
    pub step: f64,
    /// Start the plant at the reference position and velocity instead of at rest.
    pub start_on_reference: bool,
    /// Add the mean feedforward change over the coming held interval to the
    /// reference acceleration (cases 1 and 3).
    pub hold_compensation: bool,
    /// Factor applied to e, ∫e and ė before the PID gains (1e-3: mm to m).
    pub pid_error_scale: f64,
    /// Encoder resolution in mm; 0 disables quantization.
    pub quantization: f64,
    /// Include the critic compensator in case 1.
    pub compensator: bool,
    /// |q| beyond this many mm counts as divergence.
    pub divergence_limit: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            step: 1e-3,
            start_on_reference: true,
            hold_compensation: true,
            pid_error_scale: 1e-3,
            quantization: 0.0,
            compensator: true,
            divergence_limit: 1e6,
        }
    }
}

impl RunOptions {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Invalid(m));
        if !(self.step.is_finite() && self.step > 0.0) {
            return bad(format!("step must be positive, got {}", self.step));
        }
        if !(self.pid_error_scale.is_finite() && self.pid_error_scale > 0.0) {
            return bad(format!("pid_error_scale must be positive, got {}", self.pid_error_scale));
        }
        if !(self.quantization.is_finite() && self.quantization >= 0.0) {
            return bad(format!("quantization must be non-negative, got {}", self.quantization));
        }
        if self.divergence_limit.is_nan() || self.divergence_limit <= 0.0 {
            return bad(format!("divergence_limit must be positive, got {}", self.divergence_limit));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub case: CaseId,
    pub reference: Reference,
    /// The simulated motor, uncertainty included.
    pub plant: PlantParams,
    pub afosmc: AfosmcParams,
    pub compensator: CompensatorParams,
    pub baseline: BaselineParams,
    pub options: RunOptions,
}

impl Scenario {
    /// Default gains and plant for `case` on `reference`.
    pub fn new(case: CaseId, reference: Reference) -> Self {
        Self {
            case,
            reference,
            plant: PlantParams::default(),
            afosmc: AfosmcParams::default(),
            compensator: CompensatorParams::default(),
            baseline: BaselineParams::default(),
            options: RunOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        self.reference.validate()?;
        self.options.validate()?;
        self.plant
            .validate()
            .map_err(|e| HarnessError::Invalid(e.to_string()))?;
        match self.case {
            CaseId::Afosmc => {
                self.afosmc.validate()?;
                if self.options.compensator {
                    self.compensator.validate()?;
                }
            }
            CaseId::PidDob | CaseId::SmcDob => self.baseline.validate()?,
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TraceRecord {
    pub t: f64,
    pub q_r: f64,
    pub q: f64,
    pub e: f64,
    pub mu: f64,
    pub mu_s: Option<f64>,
    pub mu_c: Option<f64>,
    pub s: Option<f64>,
    pub beta_hat: Option<f64>,
    pub epsilon: Option<f64>,
    pub w_hat: Option<[f64; 3]>,
    pub d_hat: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub case: CaseId,
    pub reference: Reference,
    pub step: f64,
    pub records: Vec<TraceRecord>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn errors(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.e).collect()
    }

    /// Mean of `f` over consecutive blocks of `block` seconds; a trailing
    /// partial block is dropped.
    pub fn block_means(&self, block: f64, f: impl Fn(&TraceRecord) -> f64) -> Vec<f64> {
        let per = (block / self.step).round().max(1.0) as usize;
        self.records
            .chunks_exact(per)
            .map(|c| c.iter().map(&f).sum::<f64>() / per as f64)
            .collect()
    }
}

/// ⌈duration/step⌉, taking ratios within 1e-9 of an integer as exact.
pub fn tick_count(duration: f64, step: f64) -> usize {
    let ratio = duration / step;
    let nearest = ratio.round();
    if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest as usize
    } else {
        ratio.ceil() as usize
    }
}

fn quantize(q: f64, resolution: f64) -> f64 {
    if resolution > 0.0 {
        (q / resolution).round() * resolution
    } else {
        q
    }
}

fn diverged(tick: usize, signal: impl Into<String>) -> HarnessError {
    HarnessError::Diverged {
        tick,
        signal: signal.into(),
    }
}

fn control_fault(tick: usize, e: ControlError) -> HarnessError {
    match e {
        ControlError::Fault(what) => diverged(tick, what),
        other => HarnessError::Invalid(other.to_string()),
    }
}

enum Stack {
    Afosmc {
        smc: Box<Afosmc>,
        comp: Option<Box<Compensator>>,
    },
    Baseline {
        dob: DobState,
    },
}

pub fn run_scenario(s: &Scenario) -> Result<Trace, HarnessError> {
    run_scenario_cached(s, &CoeffCache::new())
}

/// Closed-loop run sharing fractional weight tables through `cache`.
pub fn run_scenario_cached(s: &Scenario, cache: &CoeffCache) -> Result<Trace, HarnessError> {
    s.validate()?;
    let opts = &s.options;
    let dt = opts.step;
    let nominal = s.plant.without_uncertainty();
    let n = tick_count(s.reference.duration, dt);
    let (qr0, qrd0, _) = reference_at(&s.reference, 0.0)?;

    let mut state = if opts.start_on_reference {
        PlantState { q: qr0, q_dot: qrd0, t: 0.0 }
    } else {
        PlantState::default()
    };

    let mut stack = match s.case {
        CaseId::Afosmc => {
            let smc = Afosmc::with_cache(s.afosmc, nominal, dt, cache)?;
            let comp = if opts.compensator {
                let g_c3 = s.compensator.lambda3 * nominal.g_bar / nominal.m_bar;
                Some(Box::new(Compensator::new(s.compensator, g_c3)?))
            } else {
                None
            };
            Stack::Afosmc {
                smc: Box::new(smc),
                comp,
            }
        }
        CaseId::PidDob | CaseId::SmcDob => Stack::Baseline {
            dob: DobState::at_velocity(
                if opts.start_on_reference { qrd0 } else { 0.0 },
                &nominal,
                dt,
                s.baseline.dob_bandwidth,
            ),
        },
    };

    let feedforward = |qr: f64, qrd: f64, qrdd: f64| nominal.b_bar * qrd + nominal.c_bar * qr + nominal.m_bar * qrdd;

    let mut records = Vec::with_capacity(n);
    let mut prev_e: Option<f64> = None;
    let mut integral_e = 0.0;
    let mut mu_prev = 0.0;

    for k in 0..n {
        let t = k as f64 * dt;
        let (qr, qrd, qrdd) = reference_at(&s.reference, t)?;
        let q = quantize(state.q, opts.quantization);
        let e = q - qr;
        let e_dot = prev_e.map_or(0.0, |p| (e - p) / dt);
        prev_e = Some(e);
        integral_e += e * dt;
        let q_dot = qrd + e_dot;

        let qdd_eff = if opts.hold_compensation && s.case != CaseId::PidDob {
            let (a, b, c) = reference_at(&s.reference, t + 0.5 * dt)?;
            qrdd + (feedforward(a, b, c) - feedforward(qr, qrd, qrdd)) / nominal.m_bar
        } else {
            qrdd
        };

        let mut rec = TraceRecord {
            t,
            q_r: qr,
            q,
            e,
            ..TraceRecord::default()
        };

        let mu = match &mut stack {
            Stack::Afosmc { smc, comp } => {
                let out = smc
                    .tick(e, e_dot, q, q_dot, qdd_eff, dt)
                    .map_err(|err| control_fault(k, err))?;
                let mu_c = match comp {
                    Some(c) => {
                        let v = c.tick(e, e_dot, dt).map_err(|err| control_fault(k, err))?;
                        rec.w_hat = Some(c.state().w_hat);
                        v
                    }
                    None => 0.0,
                };
                rec.mu_s = Some(out.mu_s);
                rec.mu_c = Some(mu_c);
                rec.s = Some(out.s);
                rec.beta_hat = Some(out.beta_hat);
                rec.epsilon = Some(out.epsilon);
                total_control(out.mu_s, mu_c)
            }
            Stack::Baseline { dob } => {
                let (next, d_hat) = dob_estimate(dob, q, q_dot, mu_prev, &nominal, dt, s.baseline.dob_bandwidth);
                *dob = next;
                rec.d_hat = Some(d_hat);
                if s.case == CaseId::PidDob {
                    let sc = opts.pid_error_scale;
                    pid_dob_control(sc * e, sc * integral_e, sc * e_dot, d_hat / nominal.g_bar, &s.baseline)
                } else {
                    smc_dob_control(e, e_dot, q, q_dot, qdd_eff, d_hat, &nominal, &s.baseline)
                }
            }
        };

        if !mu.is_finite() {
            return Err(diverged(k, "control input"));
        }
        rec.mu = mu;
        records.push(rec);
        mu_prev = mu;

        state.t = t;
        state = plant::step(&state, mu, &s.plant, dt).map_err(|_| diverged(k, "plant state"))?;
        if state.q.abs() > opts.divergence_limit {
            return Err(diverged(k, format!("position {} mm beyond limit", state.q)));
        }
    }

    Ok(Trace {
        case: s.case,
        reference: s.reference,
        step: dt,
        records,
    })
}
