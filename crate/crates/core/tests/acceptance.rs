//! One PASS/FAIL line per acceptance criterion. Run with
//! `cargo test --release --test acceptance`.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spinboson::dynamics::{default_ode_options, evolve, Engine, EvolutionConfig, QubitState};
use spinboson::measure::{
    maximize, n_rwa_closed, n_sa_closed, nonmarkovianity, trace_distance, AnalyticMeasure, MeasureConfig,
    PairKernel, KERNEL_STEP,
};
use spinboson::spectral::{Asymptotics, CoefficientSet, SpectralModel};
use spinboson::toolcli::{certify_cpt, cycle_maxima, fig2_model, fit_decay, lorentzian_sweep, ohmic_sweep, FigureOptions};
use spinboson::Result;

struct Report {
    lines: Vec<(u32, bool, String)>,
}

impl Report {
    fn line(&mut self, id: u32, pass: bool, start: Instant, detail: String) {
        let verdict = if pass { "PASS" } else { "FAIL" };
        let text = format!("criterion {id:>2}: {verdict}  {detail}  [{:.1?}]", start.elapsed());
        self.lines.push((id, pass, text));
    }

    fn error(&mut self, id: u32, start: Instant, e: spinboson::Error) {
        self.line(id, false, start, format!("error: {e}"));
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

// Fig-2 quantities shared by several criteria.
struct Fig2 {
    coeffs: CoefficientSet,
    ana: AnalyticMeasure,
    kernel: PairKernel,
    n_full: f64,
    n_dir: [f64; 3],
    xi0: f64,
}

fn fig2() -> Result<Fig2> {
    let coeffs = CoefficientSet::new(&fig2_model())?;
    let ana = AnalyticMeasure::new(&coeffs)?;
    let cfg = MeasureConfig::default();
    let horizon = cfg.resolve_horizon(&coeffs)?;
    let kernel = PairKernel::build(Engine::FullClosed, &coeffs, horizon, KERNEL_STEP, default_ode_options(&coeffs))?;
    let best = maximize(&kernel, &cfg, horizon)?;
    let mut n_dir = best.direction();
    let e = QubitState::equatorial(best.xi()).lambda;
    if n_dir[0] * e[0] + n_dir[1] * e[1] < 0.0 {
        n_dir = n_dir.map(|v| -v);
    }
    Ok(Fig2 {
        coeffs,
        ana,
        kernel,
        n_full: best.value,
        n_dir,
        xi0: best.xi(),
    })
}

fn c1(r: &mut Report) {
    let start = Instant::now();
    let res = CoefficientSet::new(&fig2_model()).and_then(|c| c.timescales());
    match res {
        Ok(ts) => {
            let ratio = ts.tau_r / ts.tau_c;
            r.line(1, rel(ratio, 1494.0) <= 0.01, start, format!("tau_r/tau_c = {ratio:.1} (target 1494 +-1%)"));
        }
        Err(e) => r.error(1, start, e),
    }
}

fn c2(r: &mut Report, f: &Fig2, start: Instant) {
    let n_ana = f.ana.n_ana();
    let err = rel(f.n_full, n_ana);
    r.line(
        2,
        err <= 0.05,
        start,
        format!("N(full) = {:.4}, N_ana = {n_ana:.4}, rel err {:.2e} (<= 5%)", f.n_full, err),
    );
}

fn c3(r: &mut Report, f: &Fig2) {
    let start = Instant::now();
    match n_rwa_closed(&f.coeffs).and_then(|a| Ok((a, n_sa_closed(&f.coeffs)?))) {
        Ok((rwa, sa)) => {
            let ratio = f.n_full / rwa.max(sa);
            r.line(
                3,
                ratio > 10.0,
                start,
                format!("N_RWA = {rwa:.3e}, N_SA = {sa:.3e}, N(full)/max = {ratio:.0} (> 10)"),
            );
        }
        Err(e) => r.error(3, start, e),
    }
}

fn c4(r: &mut Report) {
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for wc in [0.5, 1.0, 2.0, 10.0] {
        let res = (|| -> Result<(f64, f64, f64)> {
            let coeffs = CoefficientSet::new(&SpectralModel::ohmic(0.01, wc)?)?;
            let full = nonmarkovianity(Engine::FullClosed, &coeffs, &MeasureConfig::default())?;
            Ok((n_rwa_closed(&coeffs)?, n_sa_closed(&coeffs)?, full.n))
        })();
        match res {
            Ok((rwa, sa, full)) => {
                let ok_full = if wc == 1.0 { full < 0.01 } else { full > 0.0 };
                pass &= rwa == 0.0 && sa == 0.0 && ok_full;
                parts.push(format!("wc={wc}: RWA {rwa} SA {sa} full {full:.3e}"));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("wc={wc}: error {e}"));
            }
        }
    }
    r.line(4, pass, start, parts.join("; "));
}

fn c5(r: &mut Report) {
    let start = Instant::now();
    let lambda = 0.1;
    match SpectralModel::lorentzian(0.01, lambda, 0.0).and_then(|m| Asymptotics::of(&m)) {
        Ok(a) => {
            let ratio = a.g_i().abs() / a.g_r();
            r.line(5, ratio < lambda / 2.0, start, format!("|g_i|/g_r = {ratio:.4e} (< {})", lambda / 2.0));
        }
        Err(e) => r.error(5, start, e),
    }
}

fn c6(r: &mut Report) {
    let start = Instant::now();
    let opts = FigureOptions {
        points: 15,
        ..FigureOptions::default()
    };
    let mut pass = true;
    let mut worst_l = f64::INFINITY;
    let mut worst_res = 0.0f64;
    let mut count = 0;
    let mut errors = Vec::new();
    for spec in [lorentzian_sweep(&opts), ohmic_sweep(&opts)] {
        for x in spec.values() {
            let res = (|| -> Result<(bool, f64, f64)> {
                let model = spec.model_at(x)?;
                let t_end = 10.0 / Asymptotics::of(&model)?.g_r();
                let coeffs = CoefficientSet::with_horizon(&model, t_end)?;
                certify_cpt(&coeffs, t_end, 50)
            })();
            match res {
                Ok((p, l, c)) => {
                    pass &= p && l >= -1e-9 && c <= 1e-9;
                    worst_l = worst_l.min(l);
                    worst_res = worst_res.max(c);
                    count += 1;
                }
                Err(e) => {
                    pass = false;
                    errors.push(format!("{} = {x}: {e}", spec.param));
                }
            }
        }
    }
    let mut detail = format!("{count} points x 50 times, min Lambda = {worst_l:.3e}, max residual = {worst_res:.3e}");
    if !errors.is_empty() {
        detail.push_str(&format!("; errors: {}", errors.join("; ")));
    }
    r.line(6, pass, start, detail);
}

fn c7(r: &mut Report) {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    let mut errors = 0;
    for k in 0..100 {
        let res = (|| -> Result<f64> {
            let model = if k % 2 == 0 {
                SpectralModel::lorentzian(
                    rng.gen_range(0.002..0.05),
                    rng.gen_range(0.05..1.0),
                    rng.gen_range(-1.5..1.5),
                )?
            } else {
                SpectralModel::ohmic(rng.gen_range(0.002..0.05), rng.gen_range(0.2..10.0))?
            };
            let t = rng.gen_range(0.1..150.0);
            let dir = rng.gen::<[f64; 3]>().map(|v| 2.0 * v - 1.0);
            let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
            let radius = rng.gen::<f64>().cbrt() / norm.max(1e-12);
            let rho0 = QubitState::new(dir[0] * radius, dir[1] * radius, dir[2] * radius)?;
            let coeffs = CoefficientSet::with_horizon(&model, t)?;
            let cfg = |e| EvolutionConfig::new(e, &coeffs, t).with_stride(usize::MAX / 2);
            let a = evolve(&coeffs, &rho0, &cfg(Engine::FullBloch))?;
            let b = evolve(&coeffs, &rho0, &cfg(Engine::FullClosed))?;
            Ok(trace_distance(a.states.last().unwrap(), b.states.last().unwrap()))
        })();
        match res {
            Ok(d) => worst = worst.max(d),
            Err(_) => errors += 1,
        }
    }
    r.line(
        7,
        worst <= 1e-6 && errors == 0,
        start,
        format!("100 samples, max trace distance {worst:.3e} (<= 1e-6), {errors} errors"),
    );
}

fn c8(r: &mut Report, f: &Fig2) {
    let start = Instant::now();
    let a = &f.ana;
    let tau_c = f.coeffs.model().tau_c();
    let t0 = 5.0 * tau_c;
    let t1 = 3.0 * a.tau_r;
    let (ts, _, sigma) = f.kernel.series(&f.n_dir);
    let bound = 0.05 * (-t0 / a.tau_r).exp() * (a.mu - 1.0) / a.tau_r;
    let mut worst = 0.0f64;
    for (t, s) in ts.iter().zip(&sigma) {
        if *t > t0 && *t <= t1 {
            worst = worst.max((s - a.sigma_perp(f.xi0, *t)).abs());
        }
    }
    let maxima = cycle_maxima(&ts, &sigma, t0, t1, PI / (1.0 - a.g_i));
    match fit_decay(&maxima) {
        Ok((tau, _)) => {
            let err = rel(tau, a.tau_r);
            r.line(
                8,
                worst <= bound && err <= 0.02,
                start,
                format!(
                    "max |sigma - sigma_ana| = {worst:.3e} (<= {bound:.3e}), fitted tau_r = {tau:.1} vs {:.1} (rel {err:.2e})",
                    a.tau_r
                ),
            );
        }
        Err(e) => r.error(8, start, e),
    }
}

fn c9(r: &mut Report, f: &Fig2) {
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for m in [1.0, 2.0, 4.0] {
        let t = m * f.ana.tau_r;
        match maximize(&f.kernel, &MeasureConfig::default(), t) {
            Ok(best) => {
                let target = (1.0 - (-m).exp()) * f.ana.n_ana();
                let err = rel(best.value, target);
                pass &= err <= 0.05;
                parts.push(format!("T={m}tau_r: {:.4} vs {target:.4} (rel {err:.2e})", best.value));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("T={m}tau_r: error {e}"));
            }
        }
    }
    r.line(9, pass, start, parts.join("; "));
}

fn c10(r: &mut Report, f: &Fig2) {
    let start = Instant::now();
    let t0 = 10.0 * f.coeffs.model().tau_c();
    let step = f.kernel.step();
    let found: Vec<(f64, f64)> = f
        .kernel
        .intervals(&f.n_dir, f.kernel.horizon())
        .iter()
        .filter(|i| i.start >= t0)
        .take(20)
        .map(|i| (i.start, i.end))
        .collect();
    let expected: Vec<(f64, f64)> = f
        .ana
        .positivity_windows(f.xi0, 200)
        .into_iter()
        .filter(|w| w.0 >= t0)
        .take(20)
        .collect();
    let mut worst = 0.0f64;
    for (a, b) in found.iter().zip(&expected) {
        worst = worst.max((a.0 - b.0).abs()).max((a.1 - b.1).abs());
    }
    let pass = found.len() == 20 && expected.len() == 20 && worst <= step;
    r.line(
        10,
        pass,
        start,
        format!("{} windows matched, max edge offset {worst:.3e} (<= step {step:.3e})", found.len().min(expected.len())),
    );
}

fn c11(r: &mut Report, f: &Fig2) {
    let start = Instant::now();
    let res = SpectralModel::lorentzian(0.005, 0.1, -0.9)
        .and_then(|m| CoefficientSet::new(&m))
        .and_then(|c| nonmarkovianity(Engine::FullClosed, &c, &MeasureConfig::default()));
    match res {
        Ok(half) => {
            let err = rel(half.n, f.n_full);
            r.line(
                11,
                err <= 0.02,
                start,
                format!("N(alpha=0.005) = {:.4}, N(alpha=0.01) = {:.4}, rel {err:.2e} (<= 2%)", half.n, f.n_full),
            );
        }
        Err(e) => r.error(11, start, e),
    }
}

fn main() -> ExitCode {
    // the default test runner passes flags such as --list; only run for real
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let mut r = Report { lines: Vec::new() };
    c1(&mut r);
    let start = Instant::now();
    match fig2() {
        Ok(f) => {
            c2(&mut r, &f, start);
            c3(&mut r, &f);
            c8(&mut r, &f);
            c9(&mut r, &f);
            c10(&mut r, &f);
            c11(&mut r, &f);
        }
        Err(e) => {
            for id in [2, 3, 8, 9, 10, 11] {
                r.line(id, false, start, format!("error: {e}"));
            }
        }
    }
    c4(&mut r);
    c5(&mut r);
    c6(&mut r);
    c7(&mut r);
    r.lines.sort_by_key(|l| l.0);
    for (_, _, text) in &r.lines {
        println!("{text}");
    }
    let failed = r.lines.iter().filter(|l| !l.1).count();
    println!("{failed} of {} criteria failed", r.lines.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
