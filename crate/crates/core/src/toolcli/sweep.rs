use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::config::SweepSpec;
use crate::num::Num;
use crate::chimap::{check_cpt, kraus_from_mapstate, CPT_TOL};
use crate::dynamics::{default_ode_options, map_states, Engine};
use crate::error::{Error, Result};
use crate::measure::{n_rwa_closed, n_sa_closed, nonmarkovianity, AnalyticMeasure, Horizon, MeasureConfig};
use crate::spectral::{Asymptotics, CoefficientSet};

pub const SWEEP_CSV_HEADER: &str =
    "x,status,N_full,N_RWA,N_SA,N_ana,nu,mu,xi0,cpt_pass,min_Lambda,cpt_residual,tau_s,tau_c,tau_r";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub x: f64,
    /// "ok", or the error that stopped this point.
    pub status: String,
    pub n_full: Option<f64>,
    pub n_rwa: Option<f64>,
    pub n_sa: Option<f64>,
    pub n_ana: Option<f64>,
    pub nu: Option<f64>,
    pub mu: Option<f64>,
    pub xi0: Option<f64>,
    pub cpt_pass: Option<bool>,
    pub min_lambda: Option<f64>,
    pub cpt_residual: Option<f64>,
    pub tau_s: Option<f64>,
    pub tau_c: Option<f64>,
    pub tau_r: Option<f64>,
}

impl SweepRow {
    fn empty(x: f64) -> Self {
        SweepRow {
            x,
            status: "ok".into(),
            n_full: None,
            n_rwa: None,
            n_sa: None,
            n_ana: None,
            nu: None,
            mu: None,
            xi0: None,
            cpt_pass: None,
            min_lambda: None,
            cpt_residual: None,
            tau_s: None,
            tau_c: None,
            tau_r: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub spec: SweepSpec,
    pub rows: Vec<SweepRow>,
}

/// `n` times spread logarithmically over [t0, t1].
pub fn log_times(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![t1];
    }
    let (a, b) = (t0.ln(), t1.ln());
    (0..n)
        .map(|k| if k + 1 == n { t1 } else { (a + (b - a) * k as f64 / (n - 1) as f64).exp() })
        .collect()
}

/// Worst CPT figures over log-spaced times: (pass, min Lambda, residual).
pub fn certify_cpt(coeffs: &CoefficientSet, t_end: f64, n: usize) -> Result<(bool, f64, f64)> {
    let times = log_times(1e-3, t_end, n);
    let maps = map_states(coeffs, &times, default_ode_options(coeffs))?;
    let mut pass = true;
    let mut min_l = f64::INFINITY;
    let mut resid = 0.0f64;
    for m in &maps {
        let r = check_cpt(&kraus_from_mapstate(m), CPT_TOL)?;
        pass &= r.pass;
        min_l = min_l.min(r.min_lambda);
        resid = resid.max(r.completeness_residual);
    }
    Ok((pass, min_l, resid))
}

fn run_point(spec: &SweepSpec, x: f64) -> SweepRow {
    let mut row = SweepRow::empty(x);
    if let Err(e) = fill_point(spec, x, &mut row) {
        row.status = format!("error: {e}");
    }
    row
}

fn fill_point(spec: &SweepSpec, x: f64, row: &mut SweepRow) -> Result<()> {
    let model = spec.model_at(x)?;
    let asym = Asymptotics::of(&model)?;
    row.nu = Some(asym.nu());
    row.mu = Some(asym.mu());
    row.tau_c = Some(model.tau_c());
    if !(asym.g_r() > 0.0) {
        return Err(Error::Regime(format!("g_r(inf) = {:e}", asym.g_r())));
    }
    let tau_r = 1.0 / asym.g_r();
    let horizon = spec.horizon * tau_r;
    let coeffs = CoefficientSet::with_horizon(&model, horizon)?;
    let ts = coeffs.timescales()?;
    row.tau_s = Some(ts.tau_s);
    row.tau_r = Some(ts.tau_r);
    row.n_ana = AnalyticMeasure::new(&coeffs).ok().map(|a| a.n_ana());
    if spec.engines.contains(&Engine::Rwa) {
        row.n_rwa = Some(n_rwa_closed(&coeffs)?);
    }
    if spec.engines.contains(&Engine::Sa) {
        row.n_sa = Some(n_sa_closed(&coeffs)?);
    }
    if spec.engines.iter().any(|e| e.is_full()) {
        let cfg = MeasureConfig {
            horizon: Horizon::RelaxationTimes(spec.horizon),
            seed: spec.seed,
            ..MeasureConfig::default()
        };
        let res = nonmarkovianity(Engine::FullClosed, &coeffs, &cfg)?;
        row.n_full = Some(res.n);
        row.xi0 = res.xi0;
    }
    if spec.cpt_times > 0 {
        let (pass, min_l, resid) = certify_cpt(&coeffs, horizon, spec.cpt_times)?;
        row.cpt_pass = Some(pass);
        row.min_lambda = Some(min_l);
        row.cpt_residual = Some(resid);
    }
    Ok(())
}

/// Evaluates every sweep point. Failures are recorded in the row status;
/// rows come back in sweep order whatever the worker count.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepTable> {
    spec.validate()?;
    let xs = spec.values();
    let run = || xs.par_iter().map(|&x| run_point(spec, x)).collect::<Vec<_>>();
    let rows = match spec.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::param("workers", e.to_string()))?
            .install(run),
        None => run(),
    };
    Ok(SweepTable {
        spec: spec.clone(),
        rows,
    })
}

fn opt(v: &Option<f64>) -> String {
    v.map(|x| Num(x).to_string()).unwrap_or_default()
}

impl SweepTable {
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let s = &self.spec;
        writeln!(out, "# spinboson {}", env!("CARGO_PKG_VERSION"))?;
        writeln!(
            out,
            "# family = {}, sweep = {}, range = [{}, {}], points = {}, spacing = {:?}",
            s.family, s.param, s.range[0], s.range[1], s.points, s.spacing
        )?;
        writeln!(
            out,
            "# alpha = {}, lambda = {}, delta = {}, omega_c = {}",
            s.alpha,
            opt(&s.lambda),
            opt(&s.delta),
            opt(&s.omega_c)
        )?;
        let engines: Vec<String> = s.engines.iter().map(|e| e.to_string()).collect();
        writeln!(
            out,
            "# engines = {}, horizon = {} tau_r, seed = {}, cpt_times = {}",
            engines.join(" "),
            s.horizon,
            s.seed,
            s.cpt_times
        )?;
        writeln!(out, "{SWEEP_CSV_HEADER}")?;
        for r in &self.rows {
            let status = r.status.replace([',', '\n'], ";");
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                Num(r.x),
                status,
                opt(&r.n_full),
                opt(&r.n_rwa),
                opt(&r.n_sa),
                opt(&r.n_ana),
                opt(&r.nu),
                opt(&r.mu),
                opt(&r.xi0),
                r.cpt_pass.map(|p| p.to_string()).unwrap_or_default(),
                opt(&r.min_lambda),
                opt(&r.cpt_residual),
                opt(&r.tau_s),
                opt(&r.tau_c),
                opt(&r.tau_r)
            )?;
        }
        Ok(())
    }
}
