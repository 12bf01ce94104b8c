//! Adaptive fractional-order sliding mode control of an ultrasonic motor.
//!
//! * [`fraccalc`]: Grünwald–Letnikov operators, short-memory windows, gamma.
//! * [`plant`]: motor dynamics with bounded time-varying uncertainty.
//! * [`control`]: the sliding-mode controller, critic compensator and baselines.
//! * [`harness`]: references, closed-loop runs, tracking metrics.
//! * [`config`] and [`cli`]: JSON configuration and the command-line front end.

pub mod cli;
pub mod config;
pub mod control;
pub mod fraccalc;
pub mod harness;
pub mod plant;
