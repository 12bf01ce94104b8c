use afosmc::harness::{
    compare_cases, compute_metrics, metrics_from_errors, run_scenario, tick_count, CaseId, HarnessError, Reference,
    Scenario,
};
use afosmc::plant::UncertaintyModel;
use proptest::prelude::*;

fn quiet(case: CaseId, reference: Reference) -> Scenario {
    let mut s = Scenario::new(case, reference);
    s.plant.uncertainty = UncertaintyModel::none();
    s
}

#[test]
fn zero_reference_keeps_every_case_at_rest() {
    let reference = Reference::sine(1.0, 0.0, 1.0);
    for case in CaseId::ALL {
        let trace = run_scenario(&quiet(case, reference)).unwrap();
        assert_eq!(trace.len(), tick_count(1.0, 1e-3));
        for r in &trace.records {
            assert_eq!((r.e, r.q, r.mu), (0.0, 0.0, 0.0), "{case} at t = {}", r.t);
        }
    }
}

#[test]
fn zero_reference_gives_identical_zero_rows() {
    let reference = Reference::triangle(2.0, 0.0, 1.0);
    let scenarios: Vec<_> = CaseId::ALL.iter().map(|&c| quiet(c, reference)).collect();
    let rows = compare_cases(&scenarios, None).unwrap();
    assert_eq!(rows.len(), 3);
    for (row, case) in rows.iter().zip(CaseId::ALL) {
        assert_eq!(row.case, case);
        assert_eq!((row.metrics.mae, row.metrics.rmse), (0.0, 0.0));
    }
}

#[test]
fn single_scenario_gives_one_row() {
    let s = Scenario::new(CaseId::SmcDob, Reference::sine(2.0, 1.0, 1.0));
    let rows = compare_cases(std::slice::from_ref(&s), None).unwrap();
    assert_eq!(rows.len(), 1);
    let direct = compute_metrics(&run_scenario(&s).unwrap(), 0.5).unwrap();
    assert_eq!(rows[0].metrics, direct);
}

#[test]
fn mixed_references_are_rejected() {
    let a = Scenario::new(CaseId::Afosmc, Reference::sine(1.0, 1.0, 1.0));
    let b = Scenario::new(CaseId::PidDob, Reference::sine(2.0, 1.0, 1.0));
    assert!(matches!(compare_cases(&[a, b], None), Err(HarnessError::Usage(_))));
}

#[test]
fn runs_are_bit_identical() {
    for case in CaseId::ALL {
        let s = Scenario::new(case, Reference::triangle(1.0, 1.0, 1.5));
        let a = run_scenario(&s).unwrap();
        let b = run_scenario(&s).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.records.iter().zip(&b.records) {
            assert_eq!(x.q.to_bits(), y.q.to_bits(), "{case} at t = {}", x.t);
            assert_eq!(x.mu.to_bits(), y.mu.to_bits(), "{case} at t = {}", x.t);
        }
    }
}

#[test]
fn trace_length_is_the_tick_count() {
    for (duration, step) in [(1.0, 1e-3), (0.3, 1e-3), (0.2005, 1e-3), (0.25, 2e-3)] {
        let mut s = Scenario::new(CaseId::PidDob, Reference::sine(5.0, 1.0, duration));
        s.options.step = step;
        let trace = run_scenario(&s).unwrap();
        assert_eq!(trace.len(), tick_count(duration, step), "duration {duration} step {step}");
        assert_eq!(trace.len(), (duration / step - 1e-9).ceil() as usize);
    }
}

#[test]
fn linear_loop_scales_with_the_reference_amplitude() {
    // Without uncertainty the PID loop and plant are linear in the reference.
    let run = |amplitude: f64| run_scenario(&quiet(CaseId::PidDob, Reference::sine(1.0, amplitude, 1.0))).unwrap();
    let (one, three) = (run(1.0), run(3.0));
    let scale = one.records.iter().fold(0.0f64, |m, r| m.max(r.e.abs()));
    for (a, b) in one.records.iter().zip(&three.records) {
        assert!((b.e - 3.0 * a.e).abs() <= 1e-9 * 3.0 * scale, "t = {}: {} vs {}", a.t, b.e, 3.0 * a.e);
    }
}

#[test]
fn invalid_scenarios_are_rejected_before_running() {
    let mut s = Scenario::new(CaseId::Afosmc, Reference::sine(1.0, 1.0, 1.0));
    s.plant.m_bar = 0.0;
    assert!(matches!(run_scenario(&s), Err(HarnessError::Invalid(_))));
    let mut s = Scenario::new(CaseId::PidDob, Reference::sine(1.0, 1.0, 1.0));
    s.options.step = -1e-3;
    assert!(matches!(run_scenario(&s), Err(HarnessError::Invalid(_))));
}

#[test]
fn unstable_gains_report_divergence() {
    let mut s = Scenario::new(CaseId::PidDob, Reference::sine(1.0, 1.0, 2.0));
    // a stiffness this high is unstable with a one-tick control delay
    s.baseline.pid.k_x1 = 1e7;
    match run_scenario(&s) {
        Err(HarnessError::Diverged { tick, signal }) => {
            assert!(tick > 0 && tick < 2000, "tick {tick}");
            assert!(!signal.is_empty());
        }
        other => panic!("expected divergence, got {other:?}"),
    }
}

proptest! {
    #[test]
    fn rmse_never_exceeds_mae(errors in prop::collection::vec(-1e3f64..1e3, 1..500)) {
        let m = metrics_from_errors(&errors).unwrap();
        prop_assert!(m.rmse <= m.mae);
        prop_assert!(m.rmse >= 0.0);
    }

    #[test]
    fn metrics_ignore_sample_order(
        (errors, shuffled) in prop::collection::vec(-1e3f64..1e3, 1..300)
            .prop_flat_map(|v| (Just(v.clone()), Just(v).prop_shuffle()))
    ) {
        prop_assert_eq!(metrics_from_errors(&errors).unwrap(), metrics_from_errors(&shuffled).unwrap());
    }

    #[test]
    fn constant_error_has_equal_mae_and_rmse(c in -1e3f64..1e3, n in 1usize..200) {
        let m = metrics_from_errors(&vec![c; n]).unwrap();
        prop_assert_eq!(m.mae, c.abs());
        prop_assert!((m.rmse - c.abs()).abs() <= 4.0 * f64::EPSILON * c.abs());
    }
}
