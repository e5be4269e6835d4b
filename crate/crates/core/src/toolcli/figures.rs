use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::config::SweepSpec;
use super::sweep::{run_sweep, SweepTable};
use crate::num::Num;
use crate::dynamics::{default_ode_options, Engine, QubitState};
use crate::error::{Error, Result};
use crate::measure::{maximize, AnalyticMeasure, MeasureConfig, PairKernel, KERNEL_STEP};
use crate::spectral::{gi_kernel, Asymptotics, CoefficientSet, SpectralModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureTag {
    Fig1a,
    Fig1b,
    Fig2a,
    Fig2b,
    Fig3a,
    Fig3b,
    Fig4,
}

impl FigureTag {
    pub const ALL: [FigureTag; 7] = [
        FigureTag::Fig1a,
        FigureTag::Fig1b,
        FigureTag::Fig2a,
        FigureTag::Fig2b,
        FigureTag::Fig3a,
        FigureTag::Fig3b,
        FigureTag::Fig4,
    ];
}

impl FromStr for FigureTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        FigureTag::ALL
            .into_iter()
            .find(|t| t.to_string() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::Unknown {
                kind: "figure",
                value: s.to_string(),
            })
    }
}

impl fmt::Display for FigureTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FigureTag::Fig1a => "fig1a",
            FigureTag::Fig1b => "fig1b",
            FigureTag::Fig2a => "fig2a",
            FigureTag::Fig2b => "fig2b",
            FigureTag::Fig3a => "fig3a",
            FigureTag::Fig3b => "fig3b",
            FigureTag::Fig4 => "fig4",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureOptions {
    /// Sweep resolution for fig1/fig3.
    pub points: usize,
    /// Overrides the swept range of fig1/fig3.
    pub range: Option<[f64; 2]>,
    /// Measure horizon in relaxation times.
    pub horizon: f64,
    pub workers: Option<usize>,
    pub seed: u64,
    /// CPT times per sweep point; 0 skips the check.
    pub cpt_times: usize,
}

impl Default for FigureOptions {
    fn default() -> Self {
        FigureOptions {
            points: 61,
            range: None,
            horizon: 10.0,
            workers: None,
            seed: 0,
            cpt_times: 0,
        }
    }
}

/// Parameters shared by the fig2 panels.
pub fn fig2_model() -> SpectralModel {
    SpectralModel::lorentzian(0.01, 0.1, -0.9).expect("valid parameters")
}

/// Sweep behind fig1a/fig3a.
pub fn lorentzian_sweep(opts: &FigureOptions) -> SweepSpec {
    SweepSpec {
        horizon: opts.horizon,
        workers: opts.workers,
        seed: opts.seed,
        cpt_times: opts.cpt_times,
        ..SweepSpec::lorentzian_delta(0.01, 0.1, opts.range.unwrap_or([-1.0, 0.5]), opts.points)
    }
}

/// Sweep behind fig1b/fig3b.
pub fn ohmic_sweep(opts: &FigureOptions) -> SweepSpec {
    SweepSpec {
        horizon: opts.horizon,
        workers: opts.workers,
        seed: opts.seed,
        cpt_times: opts.cpt_times,
        ..SweepSpec::ohmic_cutoff(0.01, opts.range.unwrap_or([0.2, 20.0]), opts.points)
    }
}

/// Largest sigma in each cycle of length `period` over [t0, t1], refined
/// by a parabola through the largest sample and its neighbours.
pub fn cycle_maxima(times: &[f64], sigma: &[f64], t0: f64, t1: f64, period: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut start = t0;
    let mut k = times.partition_point(|&t| t < t0);
    while start + period <= t1 {
        let end = start + period;
        let mut best: Option<usize> = None;
        while k < times.len() && times[k] < end {
            if best.map_or(true, |b| sigma[k] > sigma[b]) {
                best = Some(k);
            }
            k += 1;
        }
        if let Some(b) = best {
            let (mut t, mut v) = (times[b], sigma[b]);
            if b > 0 && b + 1 < times.len() {
                let (y0, y1, y2) = (sigma[b - 1], sigma[b], sigma[b + 1]);
                let den = y0 - 2.0 * y1 + y2;
                if den < 0.0 {
                    let h = times[b + 1] - times[b];
                    let x = 0.5 * (y0 - y2) / den;
                    t += x * h;
                    v = y1 - 0.25 * (y0 - y2) * x;
                }
            }
            out.push((t, v));
        }
        start = end;
    }
    out
}

/// Least-squares fit of v = A e^{-t/tau}; returns (tau, A).
pub fn fit_decay(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    let pts: Vec<(f64, f64)> = points.iter().filter(|p| p.1 > 0.0).map(|&(t, v)| (t, v.ln())).collect();
    if pts.len() < 2 {
        return Err(Error::param("points", "need two positive values to fit"));
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    let slope = sxy / sxx;
    Ok((-1.0 / slope, (my - slope * mt).exp()))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("figure");
    let name = match path.extension().and_then(|e| e.to_str()) {
        Some(ext) => format!("{stem}_{suffix}.{ext}"),
        None => format!("{stem}_{suffix}"),
    };
    path.with_file_name(name)
}

fn provenance<W: Write>(out: &mut W, tag: FigureTag, line: &str) -> Result<()> {
    writeln!(out, "# spinboson {} {tag}", env!("CARGO_PKG_VERSION"))?;
    writeln!(out, "# {line}")?;
    Ok(())
}

fn write_sweep_columns<W: Write>(
    out: &mut W,
    tag: FigureTag,
    table: &SweepTable,
    analytic: bool,
) -> Result<()> {
    let s = &table.spec;
    provenance(
        out,
        tag,
        &format!(
            "family = {}, alpha = {}, lambda = {}, sweep = {} over [{}, {}], points = {}, horizon = {} tau_r, seed = {}",
            s.family,
            s.alpha,
            s.lambda.map(|l| l.to_string()).unwrap_or_default(),
            s.param,
            s.range[0],
            s.range[1],
            s.points,
            s.horizon,
            s.seed
        ),
    )?;
    let f = |v: Option<f64>| v.map(|x| Num(x).to_string()).unwrap_or_default();
    if analytic {
        writeln!(out, "{},N_full,N_ana,nu,mu,status", s.param)?;
    } else {
        writeln!(out, "{},N_full,N_RWA,N_SA,status", s.param)?;
    }
    for r in &table.rows {
        let status = r.status.replace([',', '\n'], ";");
        if analytic {
            writeln!(out, "{},{},{},{},{},{}", Num(r.x), f(r.n_full), f(r.n_ana), f(r.nu), f(r.mu), status)?;
        } else {
            writeln!(out, "{},{},{},{},{}", Num(r.x), f(r.n_full), f(r.n_rwa), f(r.n_sa), status)?;
        }
    }
    Ok(())
}

/// Writes the data behind one figure to `out`; fig2b also writes the
/// cycle-maximum envelope next to it. Returns the files written.
pub fn emit_figure_data(which: FigureTag, opts: &FigureOptions, out: &Path) -> Result<Vec<PathBuf>> {
    match which {
        FigureTag::Fig1a | FigureTag::Fig1b | FigureTag::Fig3a | FigureTag::Fig3b => {
            let mut spec = match which {
                FigureTag::Fig1a | FigureTag::Fig3a => lorentzian_sweep(opts),
                _ => ohmic_sweep(opts),
            };
            let analytic = matches!(which, FigureTag::Fig3a | FigureTag::Fig3b);
            if analytic {
                spec.engines = vec![Engine::FullClosed];
            }
            let table = run_sweep(&spec)?;
            let mut w = create(out)?;
            write_sweep_columns(&mut w, which, &table, analytic)?;
            w.flush()?;
            Ok(vec![out.to_path_buf()])
        }
        FigureTag::Fig2a => {
            let t_end = 200.0;
            let coeffs = CoefficientSet::with_horizon(&fig2_model(), t_end)?;
            let kernel = PairKernel::build(Engine::Sa, &coeffs, t_end, KERNEL_STEP, default_ode_options(&coeffs))?;
            let cfg = MeasureConfig {
                seed: opts.seed,
                workers: opts.workers,
                ..MeasureConfig::default()
            };
            let best = maximize(&kernel, &cfg, t_end)?;
            let (ts, _, sigma) = kernel.series(&best.direction());
            let mut w = create(out)?;
            provenance(
                &mut w,
                which,
                &format!(
                    "SA engine, {}, optimal pair theta = {}, phi = {}, N_SA(t <= {t_end}) = {}",
                    coeffs.model(),
                    best.theta,
                    best.phi,
                    best.value
                ),
            )?;
            writeln!(w, "t,sigma_positive,sigma")?;
            for (t, s) in ts.iter().zip(&sigma) {
                writeln!(w, "{},{},{}", Num(*t), Num(s.max(0.0)), Num(*s))?;
            }
            w.flush()?;
            Ok(vec![out.to_path_buf()])
        }
        FigureTag::Fig2b => {
            let model = fig2_model();
            let ana = AnalyticMeasure::from_asymptotics(&Asymptotics::of(&model)?)?;
            let t_long = 3.0 * ana.tau_r;
            let coeffs = CoefficientSet::with_horizon(&model, t_long)?;
            let xi0 = std::f64::consts::PI;
            let n = QubitState::equatorial(xi0).lambda;
            let kernel = PairKernel::build(Engine::FullClosed, &coeffs, t_long, KERNEL_STEP, default_ode_options(&coeffs))?;
            let (ts, _, sigma) = kernel.series(&n);
            let mut w = create(out)?;
            provenance(&mut w, which, &format!("full engine, {model}, equatorial pair xi0 = pi"))?;
            writeln!(w, "t,sigma_numeric,sigma_ana")?;
            for (t, s) in ts.iter().zip(&sigma).take_while(|(t, _)| **t <= 200.0) {
                writeln!(w, "{},{},{}", Num(*t), Num(*s), Num(ana.sigma_perp(xi0, *t)))?;
            }
            w.flush()?;

            let env_path = sibling(out, "envelope");
            let t0 = 5.0 * model.tau_c();
            let maxima = cycle_maxima(&ts, &sigma, t0, t_long, std::f64::consts::PI / (1.0 - ana.g_i));
            let (tau_fit, _) = fit_decay(&maxima)?;
            let mut e = create(&env_path)?;
            provenance(
                &mut e,
                which,
                &format!("cycle maxima over [{t0}, {t_long}], fitted decay time = {tau_fit}, tau_r = {}", ana.tau_r),
            )?;
            writeln!(e, "t,sigma_max,envelope_ana")?;
            for (t, v) in &maxima {
                writeln!(e, "{},{},{}", Num(*t), Num(*v), Num(ana.envelope(*t)))?;
            }
            e.flush()?;
            Ok(vec![out.to_path_buf(), env_path])
        }
        FigureTag::Fig4 => {
            let ohmic = SpectralModel::ohmic(0.01, 1.0)?;
            let lorentz = SpectralModel::lorentzian(0.01, 0.1, 0.0)?;
            let (jo, jl) = (ohmic.j(1.0), lorentz.j(1.0));
            let mut w = create(out)?;
            provenance(
                &mut w,
                which,
                "gi kernel at t = 10 and t = 40; J_O (omega_c = 1) and J_L (lambda = 0.1, delta = 0) scaled to peak 1",
            )?;
            writeln!(w, "omega,gi_t10,gi_t40,J_O,J_L")?;
            for k in 0..=600 {
                let om = 3.0 * k as f64 / 600.0;
                writeln!(
                    w,
                    "{},{},{},{},{}",
                    Num(om),
                    Num(gi_kernel(om, 10.0)),
                    Num(gi_kernel(om, 40.0)),
                    Num(ohmic.j(om) / jo),
                    Num(lorentz.j(om) / jl)
                )?;
            }
            w.flush()?;
            Ok(vec![out.to_path_buf()])
        }
    }
}
