//! Analytic non-Markovianity: the nu formula, its finite-horizon and
//! corrected forms, and the positivity windows of sigma.
//!
//! cargo run --release --example analytic_formula

use spinboson::measure::{n_ana_of_nu, AnalyticMeasure};
use spinboson::spectral::{Asymptotics, SpectralModel};

fn main() -> spinboson::Result<()> {
    for nu in [0.0, 0.5, 1.0, 5.0, 20.0] {
        println!("nu = {nu:>5}: N_ana = {:.5}", n_ana_of_nu(nu));
    }
    let model = SpectralModel::lorentzian(0.01, 0.1, -0.9)?;
    let a = AnalyticMeasure::from_asymptotics(&Asymptotics::of(&model)?)?;
    println!("nu = {:.4}, mu = {:.4}, tau_r = {:.1}, epsilon = {:.3e}", a.nu, a.mu, a.tau_r, a.epsilon);
    println!("N_ana = {:.5}", a.n_ana());
    for m in [1.0, 2.0, 4.0] {
        println!("N_ana over {m} tau_r = {:.5}", a.n_ana_finite(m * a.tau_r)?);
    }
    let xi0 = 0.0;
    println!("corrected (xi0 = 0) = {:.5}, first order = {:.5}", a.n_ana_corrected(xi0), a.n_ana_first_order(xi0));
    println!("first windows of sigma > 0:");
    for (k, (t0, t1)) in a.positivity_windows(xi0, 5).into_iter().enumerate() {
        println!("  {k}: [{t0:.4}, {t1:.4}]  sigma mid = {:.3e}", a.sigma_perp(xi0, 0.5 * (t0 + t1)));
    }
    Ok(())
}
