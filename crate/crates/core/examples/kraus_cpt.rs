//! Kraus decomposition of the full dynamical map and its CPT check at a
//! few times.
//!
//! cargo run --release --example kraus_cpt

use spinboson::chimap::{apply_map, check_cpt, kraus_from_mapstate, CPT_TOL};
use spinboson::dynamics::{default_ode_options, map_states, QubitState};
use spinboson::spectral::{CoefficientSet, SpectralModel};

fn main() -> spinboson::Result<()> {
    let model = SpectralModel::lorentzian(0.01, 0.1, -0.9)?;
    let coeffs = CoefficientSet::new(&model)?;
    let times = [0.0, 1.0, 10.0, 1e3, 1e4, 1e5];
    let maps = map_states(&coeffs, &times, default_ode_options(&coeffs))?;
    for m in &maps {
        let kd = kraus_from_mapstate(m);
        let rep = check_cpt(&kd, CPT_TOL)?;
        println!(
            "t = {:>8}: Lambda = [{:.4e}, {:.4e}, {:.4e}, {:.4e}]  residual {:.1e}  {}",
            m.t,
            rep.lambda[0],
            rep.lambda[1],
            rep.lambda[2],
            rep.lambda[3],
            rep.completeness_residual,
            if rep.pass { "CPT" } else { "NOT CPT" }
        );
    }
    let kd = kraus_from_mapstate(&maps[3]);
    let out = apply_map(&kd, &QubitState::excited())?;
    println!("excited state at t = {}: lambda = {:?}", maps[3].t, out.lambda);
    Ok(())
}
