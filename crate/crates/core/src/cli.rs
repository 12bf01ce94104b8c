//! Subcommand implementations behind the `afosmc` binary.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use thiserror::Error;

use crate::config::{Config, ConfigError};
use crate::fraccalc::{capacity_for_memory, short_memory_error_bound, FracOperator, HistoryWindow};
use crate::harness::{
    compare_cases, compute_metrics, run_scenario, CaseId, HarnessError, Metrics, MetricsTable, Trace,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Diverged(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Diverged(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Io { .. } => CliError::Io(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Diverged { .. } => CliError::Diverged(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

pub const TRACE_HEADER: [&str; 14] = [
    "t", "q_r", "q", "e", "mu", "mu_s", "mu_c", "s", "beta_hat", "epsilon", "W1", "W2", "W3", "d_hat",
];

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// Writes the trace as CSV: fixed columns, 17 significant digits, LF line ends.
pub fn write_trace_csv<W: Write>(trace: &Trace, out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(TRACE_HEADER)?;
    for r in &trace.records {
        let weights = r.w_hat.map(|w| w.map(Some)).unwrap_or([None; 3]);
        w.write_record([
            num(r.t),
            num(r.q_r),
            num(r.q),
            num(r.e),
            num(r.mu),
            opt(r.mu_s),
            opt(r.mu_c),
            opt(r.s),
            opt(r.beta_hat),
            opt(r.epsilon),
            opt(weights[0]),
            opt(weights[1]),
            opt(weights[2]),
            opt(r.d_hat),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|e| io_err(path, e))
}

fn resolve_out(flag: Option<&Path>, fallback: Option<&PathBuf>, what: &str) -> Result<PathBuf, CliError> {
    flag.map(Path::to_path_buf)
        .or_else(|| fallback.cloned())
        .ok_or_else(|| CliError::Config(format!("no output path for the {what}: pass --out or set it in the config")))
}

/// Runs one case on the configured reference, writes its trace and returns its metrics.
pub fn cmd_run(config_path: &Path, case: CaseId, out: Option<&Path>) -> Result<Metrics, CliError> {
    let cfg = Config::load(config_path)?;
    let out = resolve_out(out, cfg.output.trace.as_ref(), "trace")?;
    let trace = run_scenario(&cfg.scenario(case, cfg.reference))?;
    let metrics = compute_metrics(&trace, cfg.settle_skip_for(&cfg.reference))?;
    let mut file = create(&out)?;
    write_trace_csv(&trace, &mut file).map_err(|e| io_err(&out, e))?;
    file.flush().map_err(|e| io_err(&out, e))?;
    println!(
        "{} on {}: MAE {:.6e} mm, RMSE {:.6e} mm",
        case,
        cfg.reference.label(),
        metrics.mae,
        metrics.rmse
    );
    Ok(metrics)
}

/// All three cases on every configured table reference.
pub fn build_table(cfg: &Config) -> Result<MetricsTable, CliError> {
    let mut columns = Vec::with_capacity(cfg.table_references.len());
    for r in &cfg.table_references {
        let scenarios: Vec<_> = CaseId::ALL.iter().map(|&c| cfg.scenario(c, *r)).collect();
        let rows = compare_cases(&scenarios, Some(cfg.settle_skip_for(r)))?;
        columns.push((*r, rows));
    }
    Ok(MetricsTable::from_columns(columns))
}

pub fn cmd_table(config_path: &Path) -> Result<MetricsTable, CliError> {
    let cfg = Config::load(config_path)?;
    let table = build_table(&cfg)?;
    print!("{table}");
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub length: f64,
    pub capacity: usize,
    /// Largest |windowed − full| after the window has filled.
    pub max_deviation: f64,
    pub bound: f64,
    /// Largest |e| over the run, the M in the bound.
    pub signal_bound: f64,
    pub eval_ns_per_tick: f64,
}

/// Short-memory versus full-memory D^α on the case-1 error signal of the
/// configured reference, one row per configured memory length.
pub fn memory_sweep(cfg: &Config) -> Result<Vec<SweepRow>, CliError> {
    let trace = run_scenario(&cfg.scenario(CaseId::Afosmc, cfg.reference))?;
    let errors = trace.errors();
    let step = trace.step;
    let alpha = cfg.alpha;
    let frac = |e: crate::fraccalc::FracError| CliError::Config(e.to_string());

    let n = errors.len();
    let full_op = FracOperator::new(alpha, n, step).map_err(frac)?;
    let mut full_window = HistoryWindow::new(n, step, 0.0).map_err(frac)?;
    let mut full = Vec::with_capacity(n);
    for &e in &errors {
        full_window.push(e).map_err(frac)?;
        full.push(full_op.eval(&full_window).map_err(frac)?);
    }
    let m = errors.iter().fold(0.0f64, |a, e| a.max(e.abs()));

    let mut rows = Vec::with_capacity(cfg.sweep.lengths.len());
    for &length in &cfg.sweep.lengths {
        let capacity = capacity_for_memory(length, step).map_err(frac)?;
        let op = FracOperator::new(alpha, capacity, step).map_err(frac)?;
        let mut window = HistoryWindow::new(capacity, step, 0.0).map_err(frac)?;
        let mut windowed = Vec::with_capacity(n);
        let started = Instant::now();
        for &e in &errors {
            window.push(e).map_err(frac)?;
            windowed.push(op.eval(&window).map_err(frac)?);
        }
        let elapsed = started.elapsed();
        let warm: Vec<f64> = (0..n)
            .filter(|&k| k as f64 * step > length)
            .map(|k| (windowed[k] - full[k]).abs())
            .collect();
        let max_deviation = if warm.is_empty() {
            windowed.iter().zip(&full).fold(0.0f64, |a, (w, f)| a.max((w - f).abs()))
        } else {
            warm.into_iter().fold(0.0, f64::max)
        };
        rows.push(SweepRow {
            length,
            capacity,
            max_deviation,
            bound: short_memory_error_bound(m, length, alpha).map_err(frac)?,
            signal_bound: m,
            eval_ns_per_tick: elapsed.as_nanos() as f64 / n.max(1) as f64,
        });
    }
    Ok(rows)
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(["length_s", "capacity", "max_deviation", "bound", "signal_bound", "eval_ns_per_tick"])?;
    for r in rows {
        w.write_record([
            num(r.length),
            r.capacity.to_string(),
            num(r.max_deviation),
            num(r.bound),
            num(r.signal_bound),
            format!("{:.1}", r.eval_ns_per_tick),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn cmd_sweep_memory(config_path: &Path, out: Option<&Path>) -> Result<Vec<SweepRow>, CliError> {
    let cfg = Config::load(config_path)?;
    let out = resolve_out(out, cfg.output.sweep.as_ref(), "sweep")?;
    let rows = memory_sweep(&cfg)?;
    let mut file = create(&out)?;
    write_sweep_csv(&rows, &mut file).map_err(|e| io_err(&out, e))?;
    file.flush().map_err(|e| io_err(&out, e))?;
    let stdout = io::stdout();
    let mut so = stdout.lock();
    for r in &rows {
        let _ = writeln!(
            so,
            "L = {:>8} s: deviation {:.3e}, bound {:.3e}, {:.0} ns/tick",
            r.length, r.max_deviation, r.bound, r.eval_ns_per_tick
        );
    }
    Ok(rows)
}
