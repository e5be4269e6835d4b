//! Master-equation rates for a Lorentzian and an Ohmic bath, with the
//! long-time limits and the three timescales.
//!
//! cargo run --release --example coefficients

use spinboson::spectral::{CoefficientSet, SpectralModel};

fn main() -> spinboson::Result<()> {
    let models = [
        ("lorentzian", SpectralModel::lorentzian(0.01, 0.1, -0.9)?),
        ("ohmic", SpectralModel::ohmic(0.01, 2.0)?),
    ];
    for (name, model) in &models {
        let coeffs = CoefficientSet::new(model)?;
        let a = coeffs.asymptotics();
        let ts = coeffs.timescales()?;
        println!("{name}: g_r(inf) = {:.4e}, g_i(inf) = {:.4e}, nu = {:.4}, mu = {:.4}", a.g_r(), a.g_i(), a.nu(), a.mu());
        println!(
            "  tau_s = {:.3}, tau_c = {:.3}, tau_r = {:.1}, weak coupling: {}",
            ts.tau_s, ts.tau_c, ts.tau_r, ts.weak_coupling
        );
        for t in [0.5, 5.0, 50.0] {
            let c = coeffs.at(t)?;
            println!(
                "  t = {t:>4}: f+ = {:+.3e}  f- = {:+.3e}  g = {:+.3e}{:+.3e}i  h = {:+.3e}",
                c.f_plus, c.f_minus, c.g.re, c.g.im, c.h
            );
        }
    }
    // the full table goes to stdout with --csv
    if std::env::args().any(|a| a == "--csv") {
        let coeffs = CoefficientSet::new(&models[0].1)?;
        coeffs.write_csv(std::io::stdout().lock(), 100.0, 40)?;
    }
    Ok(())
}
