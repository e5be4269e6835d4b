use proptest::prelude::*;

use spinboson::chimap::{apply_map, check_cpt, kraus_from_mapstate, CPT_TOL};
use spinboson::dynamics::{default_ode_options, evolve, map_states, Engine, EvolutionConfig, QubitState};
use spinboson::measure::trace_distance;
use spinboson::spectral::{CoefficientSet, SpectralModel};

fn bloch_ball() -> impl Strategy<Value = QubitState> {
    (0.0..1.0f64, 0.0..std::f64::consts::PI, 0.0..std::f64::consts::TAU).prop_map(|(r, th, ph)| {
        QubitState::new(r * th.sin() * ph.cos(), r * th.sin() * ph.sin(), r * th.cos()).unwrap()
    })
}

fn lorentzian() -> impl Strategy<Value = SpectralModel> {
    (0.002..0.05f64, 0.05..1.0f64, -1.5..1.5f64)
        .prop_map(|(a, l, d)| SpectralModel::lorentzian(a, l, d).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn bloch_and_closed_engines_agree(model in lorentzian(), rho0 in bloch_ball(), t in 0.5..60.0f64) {
        let coeffs = CoefficientSet::with_horizon(&model, t).unwrap();
        let run = |e| evolve(&coeffs, &rho0, &EvolutionConfig::new(e, &coeffs, t).with_stride(400)).unwrap();
        let a = run(Engine::FullBloch);
        let b = run(Engine::FullClosed);
        prop_assert_eq!(&a.times, &b.times);
        for (x, y) in a.states.iter().zip(&b.states) {
            prop_assert!(trace_distance(x, y) <= 1e-6);
        }
    }

    #[test]
    fn kraus_form_reproduces_the_closed_engine(model in lorentzian(), rho0 in bloch_ball(), t in 0.5..60.0f64) {
        let coeffs = CoefficientSet::with_horizon(&model, t).unwrap();
        let m = map_states(&coeffs, &[t], default_ode_options(&coeffs)).unwrap()[0];
        let kd = kraus_from_mapstate(&m);
        prop_assert!(check_cpt(&kd, CPT_TOL).unwrap().pass);
        let via_kraus = apply_map(&kd, &rho0).unwrap();
        prop_assert!(trace_distance(&via_kraus, &m.apply(&rho0)) <= 1e-10);
    }
}

#[test]
fn ohmic_engines_agree_past_the_tabulated_window() {
    // the tabulation stops after 400 time units; the run continues on the limits
    let model = SpectralModel::ohmic(0.02, 5.0).unwrap();
    let t = 500.0;
    let coeffs = CoefficientSet::with_horizon(&model, t).unwrap();
    assert!(coeffs.window_end() < t);
    let rho0 = QubitState::new(0.3, -0.6, 0.2).unwrap();
    let run = |e| evolve(&coeffs, &rho0, &EvolutionConfig::new(e, &coeffs, t).with_stride(4000)).unwrap();
    let a = run(Engine::FullBloch);
    let b = run(Engine::FullClosed);
    for (x, y) in a.states.iter().zip(&b.states) {
        assert!(trace_distance(x, y) <= 1e-6);
    }
}
