//! The same initial state under the four engines.
//!
//! cargo run --release --example evolve_engines

use spinboson::dynamics::{evolve, Engine, EvolutionConfig, QubitState};
use spinboson::measure::trace_distance;
use spinboson::spectral::{CoefficientSet, SpectralModel};

fn main() -> spinboson::Result<()> {
    let model = SpectralModel::lorentzian(0.05, 0.3, -0.5)?;
    let t_max = 200.0;
    let coeffs = CoefficientSet::with_horizon(&model, t_max)?;
    let rho0 = QubitState::equatorial(0.0);
    let times = [1.0, 10.0, 50.0, 200.0];

    let runs: Vec<_> = [Engine::FullBloch, Engine::FullClosed, Engine::Rwa, Engine::Sa]
        .into_iter()
        .map(|e| evolve(&coeffs, &rho0, &EvolutionConfig::new(e, &coeffs, t_max).with_times(&times)))
        .collect::<Result<_, _>>()?;

    println!("{:>6} {:>8} {:>28} {:>12}", "t", "engine", "lambda", "|rho10|");
    for &t in &times {
        for run in &runs {
            let s = run.states[run.nearest(t)];
            let [x, y, z] = s.lambda;
            println!("{t:>6} {:>8} {x:>+9.5} {y:>+9.5} {z:>+9.5} {:>12.6}", run.engine, s.rho10().norm());
        }
    }
    let (a, b) = (&runs[0], &runs[1]);
    let worst = a.states.iter().zip(&b.states).map(|(x, y)| trace_distance(x, y)).fold(0.0, f64::max);
    println!("bloch vs closed: max trace distance {worst:.2e}");
    Ok(())
}
