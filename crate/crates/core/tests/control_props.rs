use afosmc::control::{
    activation, compensator_control, dob_estimate, hamiltonian_estimate, sat, sgn, update_beta, update_weights,
    AfosmcParams, AfosmcState, CompensatorParams, CompensatorState, DobState,
};
use afosmc::plant::{step, PlantParams, PlantState};
use proptest::prelude::*;

#[test]
fn observer_follows_the_first_order_step_response() {
    // The input cancels the disturbance, so the plant stays at rest and the
    // lumped residual the observer sees is exactly the disturbance.
    let plant = PlantParams::nominal();
    let (dt, bandwidth): (f64, f64) = (1e-3, 500.0);
    let disturbance = 3.0;
    let mu = -disturbance / plant.g_bar;
    let pole = (-bandwidth * dt).exp();
    let settle = (5.0 / bandwidth / dt).ceil() as i32;
    let mut state = PlantState::default();
    let mut dob = DobState::default();
    for k in 1..=4 * settle {
        let (next, d_hat) = dob_estimate(&dob, state.q, state.q_dot, mu, &plant, dt, bandwidth);
        dob = next;
        let want = disturbance * (1.0 - pole.powi(k));
        assert!((d_hat - want).abs() <= 1e-12 * disturbance, "tick {k}: {d_hat} vs {want}");
        if k >= settle {
            assert!((d_hat - disturbance).abs() <= 0.01 * disturbance, "tick {k}: {d_hat}");
        }
        state = step(&state, mu + disturbance / plant.g_bar, &plant, dt).unwrap();
        assert_eq!((state.q, state.q_dot), (0.0, 0.0));
    }
}

#[test]
fn observer_recovers_a_disturbance_on_a_moving_plant() {
    // Open loop the plant's own velocity transient (about 4 ms) leaks through
    // the one-step acceleration estimate, so settling is judged after 30 ticks.
    let plant = PlantParams::nominal();
    let (dt, bandwidth) = (1e-3, 500.0);
    let disturbance = 3.0;
    let mu = 0.01;
    let mut state = PlantState::default();
    let mut dob = DobState::default();
    let mut mu_prev = 0.0;
    for k in 0..400 {
        let (next, d_hat) = dob_estimate(&dob, state.q, state.q_dot, mu_prev, &plant, dt, bandwidth);
        dob = next;
        if k >= 30 {
            assert!((d_hat - disturbance).abs() <= 0.01 * disturbance, "tick {k}: {d_hat}");
        }
        state = step(&state, mu + disturbance / plant.g_bar, &plant, dt).unwrap();
        mu_prev = mu;
    }
}

#[test]
fn saturation_matches_sign_outside_the_layer() {
    let sigma = 0.1;
    for x in [-5.0, -0.1, 0.1, 0.2, 7.0] {
        assert_eq!(sat(x / sigma), sgn(x), "x = {x}");
    }
}

proptest! {
    #[test]
    fn beta_never_decreases(
        steps in prop::collection::vec((-10.0f64..10.0, -5.0f64..5.0), 1..200),
        k1 in 1e-3f64..10.0,
        beta_max in 0.1f64..5.0,
    ) {
        let params = AfosmcParams { k1, beta_max, memory_l: 0.01, ..AfosmcParams::default() };
        let mut st = AfosmcState::new(&params, 1e-3, 0.0).unwrap();
        for (s, q) in steps {
            st.s = s;
            let next = update_beta(&st, q, 1e-3, &params);
            prop_assert!(next.beta_hat >= st.beta_hat);
            prop_assert!(next.beta_hat <= beta_max);
            st = next;
        }
    }

    #[test]
    fn beta_above_the_ceiling_is_held(start in 2.0f64..10.0, s in -10.0f64..10.0, q in -5.0f64..5.0) {
        let params = AfosmcParams { beta_max: 1.0, memory_l: 0.01, ..AfosmcParams::default() };
        let mut st = AfosmcState::new(&params, 1e-3, 0.0).unwrap();
        st.beta_hat = start;
        st.s = s;
        prop_assert_eq!(update_beta(&st, q, 1e-3, &params).beta_hat, start);
    }

    #[test]
    fn compensator_is_linear_in_the_weights(
        w in prop::array::uniform3(-5.0f64..5.0),
        i in prop::array::uniform3(-3.0f64..3.0),
        c in -4.0f64..4.0,
    ) {
        let p = CompensatorParams::default();
        let a = CompensatorState { i, w_hat: w, ..Default::default() };
        let b = CompensatorState { i, w_hat: w.map(|x| c * x), ..Default::default() };
        let ua = compensator_control(&a, 494.0, &p);
        let ub = compensator_control(&b, 494.0, &p);
        prop_assert!((ub - c * ua).abs() <= 1e-14 * (1.0 + ua.abs() * c.abs()));
    }

    #[test]
    fn weight_step_does_not_increase_the_squared_residual(
        w in prop::array::uniform3(-5.0f64..5.0),
        i in prop::array::uniform3(-3.0f64..3.0),
        i_dot in prop::array::uniform3(-50.0f64..50.0),
        mu_c in -0.5f64..0.5,
        dt in 1e-5f64..1e-2,
    ) {
        let p = CompensatorParams::default();
        let st = CompensatorState { i, w_hat: w, ..Default::default() };
        let h = hamiltonian_estimate(&i, &i_dot, mu_c, &w, &p);
        let (_, grad) = activation(&i);
        let next = update_weights(&st, h, &grad, &i_dot, dt, &p);
        let h_next = hamiltonian_estimate(&i, &i_dot, mu_c, &next.w_hat, &p);
        prop_assert!(h_next * h_next <= h * h + 1e-12, "{} -> {}", h, h_next);
    }
}
