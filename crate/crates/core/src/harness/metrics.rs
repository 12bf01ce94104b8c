use std::fmt;

use serde::Serialize;

use crate::fraccalc::CoeffCache;

use super::{run_scenario_cached, CaseId, HarnessError, Reference, Scenario, Trace};

/// Tracking error summary in mm.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Metrics {
    pub mae: f64,
    pub rmse: f64,
}

/// MAE and RMSE of an error sequence.
///
/// Squares are normalised by the MAE, sorted and summed with compensation,
/// so the result does not depend on sample order and never exceeds the MAE.
pub fn metrics_from_errors(errors: &[f64]) -> Result<Metrics, HarnessError> {
    if errors.is_empty() {
        return Err(HarnessError::Usage("no samples in the metric window".into()));
    }
    if errors.iter().any(|e| !e.is_finite()) {
        return Err(HarnessError::Usage("non-finite tracking error".into()));
    }
    let mae = errors.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    if mae == 0.0 {
        return Ok(Metrics { mae, rmse: 0.0 });
    }
    let mut squares: Vec<f64> = errors
        .iter()
        .map(|e| {
            let r = e / mae;
            r * r
        })
        .collect();
    squares.sort_by(f64::total_cmp);
    let (mut sum, mut carry) = (0.0f64, 0.0f64);
    for x in squares {
        let t = sum + x;
        carry += if sum.abs() >= x.abs() {
            (sum - t) + x
        } else {
            (x - t) + sum
        };
        sum = t;
    }
    let mean = (sum + carry) / errors.len() as f64;
    let rmse = (mae * mean.sqrt()).min(mae);
    Ok(Metrics { mae, rmse })
}

fn settled(trace: &Trace, settle_skip: f64) -> Result<impl Iterator<Item = &super::TraceRecord>, HarnessError> {
    if !(settle_skip.is_finite() && settle_skip >= 0.0) {
        return Err(HarnessError::Usage(format!("settle_skip must be non-negative, got {settle_skip}")));
    }
    if settle_skip >= trace.reference.duration {
        return Err(HarnessError::Usage(format!(
            "settle_skip {settle_skip} s leaves nothing of a {} s run",
            trace.reference.duration
        )));
    }
    let from = settle_skip - 1e-9 * trace.step;
    Ok(trace.records.iter().filter(move |r| r.t >= from))
}

/// Metrics over the records at or after `settle_skip` seconds.
pub fn compute_metrics(trace: &Trace, settle_skip: f64) -> Result<Metrics, HarnessError> {
    let errors: Vec<f64> = settled(trace, settle_skip)?.map(|r| r.e).collect();
    metrics_from_errors(&errors)
}

/// Σ(Δμ)² over the settled part of the run: a proxy for chattering.
pub fn control_variation(trace: &Trace, settle_skip: f64) -> Result<f64, HarnessError> {
    let mu: Vec<f64> = settled(trace, settle_skip)?.map(|r| r.mu).collect();
    Ok(mu.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseRow {
    pub case: CaseId,
    pub metrics: Metrics,
}

/// Runs each scenario on its own thread and returns one row per scenario,
/// in input order. `settle_skip` defaults to one reference period.
pub fn compare_cases(scenarios: &[Scenario], settle_skip: Option<f64>) -> Result<Vec<CaseRow>, HarnessError> {
    let Some(first) = scenarios.first() else {
        return Ok(Vec::new());
    };
    if scenarios.iter().any(|s| s.reference != first.reference) {
        return Err(HarnessError::Usage("compared scenarios must share one reference".into()));
    }
    let skip = settle_skip.unwrap_or_else(|| first.reference.period());
    let cache = CoeffCache::new();
    let results: Vec<Result<Metrics, HarnessError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = scenarios
            .iter()
            .map(|s| {
                let cache = &cache;
                scope.spawn(move || compute_metrics(&run_scenario_cached(s, cache)?, skip))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|p| std::panic::resume_unwind(p)))
            .collect()
    });
    scenarios
        .iter()
        .zip(results)
        .map(|(s, m)| {
            Ok(CaseRow {
                case: s.case,
                metrics: m?,
            })
        })
        .collect()
}

/// Cases down the side, one MAE/RMSE column pair per reference.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsTable {
    pub references: Vec<Reference>,
    pub rows: Vec<(CaseId, Vec<Metrics>)>,
}

impl MetricsTable {
    /// Assembles a table from per-reference comparisons sharing the same case list.
    pub fn from_columns(columns: Vec<(Reference, Vec<CaseRow>)>) -> Self {
        let mut rows: Vec<(CaseId, Vec<Metrics>)> = Vec::new();
        let mut references = Vec::with_capacity(columns.len());
        for (col, (reference, cases)) in columns.into_iter().enumerate() {
            references.push(reference);
            for row in cases {
                match rows.iter_mut().find(|(c, _)| *c == row.case) {
                    Some((_, v)) => v.push(row.metrics),
                    None if col == 0 => rows.push((row.case, vec![row.metrics])),
                    None => {}
                }
            }
        }
        Self { references, rows }
    }
}

impl fmt::Display for MetricsTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<8}", "")?;
        for r in &self.references {
            write!(f, " | {:^27}", r.label())?;
        }
        writeln!(f)?;
        write!(f, "{:<8}", "case")?;
        for _ in &self.references {
            write!(f, " | {:>13} {:>13}", "MAE (mm)", "RMSE (mm)")?;
        }
        writeln!(f)?;
        for (case, cells) in &self.rows {
            write!(f, "{:<8}", case.to_string())?;
            for m in cells {
                write!(f, " | {:>13.6e} {:>13.6e}", m.mae, m.rmse)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_example() {
        let m = metrics_from_errors(&[0.1, -0.2, 0.2]).unwrap();
        assert_eq!(m.mae, 0.2);
        assert!((m.rmse - 0.173_205).abs() < 5e-7, "{}", m.rmse);
        assert!((m.rmse - 0.03f64.sqrt()).abs() <= f64::EPSILON * 0.2, "{}", m.rmse);
    }

    #[test]
    fn zero_and_constant() {
        assert_eq!(metrics_from_errors(&[0.0; 10]).unwrap(), Metrics { mae: 0.0, rmse: 0.0 });
        let m = metrics_from_errors(&[-0.37; 17]).unwrap();
        assert_eq!(m.mae, 0.37);
        assert_eq!(m.rmse, 0.37);
    }

    #[test]
    fn empty_is_usage_error() {
        assert!(matches!(metrics_from_errors(&[]), Err(HarnessError::Usage(_))));
    }
}
