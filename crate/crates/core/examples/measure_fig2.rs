//! Non-Markovianity of the full master equation for a detuned Lorentzian
//! bath, compared with the analytic estimate and the RWA/SA values.
//!
//! cargo run --release --example measure_fig2

use std::time::Instant;

use spinboson::dynamics::Engine;
use spinboson::measure::{n_rwa_closed, n_sa_closed, nonmarkovianity, AnalyticMeasure, MeasureConfig};
use spinboson::spectral::{CoefficientSet, SpectralModel};

fn main() -> spinboson::Result<()> {
    let model = SpectralModel::lorentzian(0.01, 0.1, -0.9)?;
    let coeffs = CoefficientSet::new(&model)?;
    let ts = coeffs.timescales()?;
    let ana = AnalyticMeasure::new(&coeffs)?;
    println!("tau_r = {:.1}, tau_r/tau_c = {:.0}", ts.tau_r, ts.tau_r / ts.tau_c);
    println!("nu = {:.4}, mu = {:.4}, N_ana = {:.4}", ana.nu, ana.mu, ana.n_ana());

    let start = Instant::now();
    let res = nonmarkovianity(Engine::FullClosed, &coeffs, &MeasureConfig::default())?;
    println!(
        "N(full) = {:.4} over T = {:.0} ({} evaluations, {:.1?})",
        res.n,
        res.horizon,
        res.evaluations,
        start.elapsed()
    );
    match res.xi0 {
        Some(xi) => println!("optimal pair: equatorial, xi0 = {xi:.4}"),
        None => println!("optimal pair: lambda0 = {:?}", res.lambda0),
    }
    println!("growth intervals: {}", res.intervals.len());
    println!("N_RWA = {:.3e}, N_SA = {:.3e}", n_rwa_closed(&coeffs)?, n_sa_closed(&coeffs)?);
    Ok(())
}
