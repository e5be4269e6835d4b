//! Command-line front end. `main_entry` returns the process exit code:
//! 0 on success, 1 for invalid input, 2 for numerical failure.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use super::config::load_config;
use super::figures::{emit_figure_data, FigureOptions, FigureTag};
use super::sweep::run_sweep;
use crate::chimap::{check_cpt, kraus_from_mapstate, CPT_TOL};
use crate::dynamics::{default_ode_options, evolve, map_states, Engine, EvolutionConfig, QubitState};
use crate::error::{Error, Result};
use crate::measure::{nonmarkovianity, AnalyticMeasure, Horizon, MeasureConfig};
use crate::spectral::{Asymptotics, CoefficientSet, SpectralModel, SpectralTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "spinboson", version, about = "Spin-boson qubit dynamics and non-Markovianity")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// lorentzian, ohmic or table:<path>
    #[arg(long, global = true, default_value = "lorentzian")]
    pub spectral: String,
    #[arg(long, global = true, default_value_t = 0.01, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, global = true, default_value_t = 0.1, allow_negative_numbers = true)]
    pub lambda: f64,
    #[arg(long, global = true, default_value_t = -0.9, allow_negative_numbers = true)]
    pub delta: f64,
    #[arg(long = "omega-c", global = true, default_value_t = 1.0, allow_negative_numbers = true)]
    pub omega_c: f64,
    /// Correlation time of a tabulated density.
    #[arg(long = "tau-c", global = true)]
    pub tau_c: Option<f64>,
    /// bloch, closed, rwa or sa
    #[arg(long, global = true, default_value = "closed")]
    pub engine: String,
    #[arg(long, global = true)]
    pub tmax: Option<f64>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate f_+, f_-, g, h and Gamma.
    Coeffs {
        #[arg(long, default_value_t = 40)]
        stride: usize,
    },
    /// Evolve one initial state.
    Evolve {
        /// Initial Bloch vector lx,ly,lz.
        #[arg(long, default_value = "0,0,1", allow_hyphen_values = true)]
        state: String,
        #[arg(long, default_value_t = 10)]
        stride: usize,
    },
    /// Operator-sum weights and CPT check at the given times.
    Kraus {
        #[arg(long, value_delimiter = ',', required = true)]
        at: Vec<f64>,
        #[arg(long, default_value_t = CPT_TOL)]
        tol: f64,
    },
    /// Non-Markovianity measure.
    Measure {
        /// auto, or a fixed equatorial phase in radians.
        #[arg(long, default_value = "auto", allow_hyphen_values = true)]
        xi0: String,
        /// Horizon in relaxation times.
        #[arg(long, default_value_t = 10.0)]
        horizon: f64,
        #[arg(long, default_value_t = 0)]
        restarts: usize,
    },
    /// Parameter sweep from a TOML file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Long-time analytic estimate.
    Analytic {
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        xi0: f64,
        #[arg(long, default_value_t = 20)]
        windows: usize,
    },
    /// Write the data behind a figure panel.
    Figure {
        /// fig1a, fig1b, fig2a, fig2b, fig3a, fig3b or fig4
        which: String,
        #[arg(long, default_value_t = 61)]
        points: usize,
        #[arg(long, num_args = 2, allow_negative_numbers = true)]
        range: Option<Vec<f64>>,
        #[arg(long, default_value_t = 10.0)]
        horizon: f64,
        #[arg(long = "cpt-times", default_value_t = 0)]
        cpt_times: usize,
    },
}

impl GlobalArgs {
    pub fn model(&self) -> Result<SpectralModel> {
        match self.spectral.as_str() {
            "lorentzian" => SpectralModel::lorentzian(self.alpha, self.lambda, self.delta),
            "ohmic" => SpectralModel::ohmic(self.alpha, self.omega_c),
            s => match s.strip_prefix("table:") {
                Some(path) => {
                    let tau_c = self
                        .tau_c
                        .ok_or_else(|| Error::param("tau-c", "required for a tabulated density"))?;
                    SpectralModel::tabulated(SpectralTable::from_file(path)?, tau_c)
                }
                None => Err(Error::Unknown {
                    kind: "spectral family",
                    value: s.to_string(),
                }),
            },
        }
    }

    fn engine(&self) -> Result<Engine> {
        self.engine.parse()
    }

    fn sink(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }

    fn json<T: Serialize>(&self, value: &T) -> Result<()> {
        let mut w = self.sink()?;
        serde_json::to_writer_pretty(&mut w, value).map_err(|e| io::Error::other(e.to_string()))?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }
}

fn parse_state(s: &str) -> Result<QubitState> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::param("state", e.to_string()))?;
    match v[..] {
        [x, y, z] => QubitState::new(x, y, z),
        _ => Err(Error::param("state", "expected three components lx,ly,lz")),
    }
}

fn relaxation_horizon(model: &SpectralModel, multiple: f64) -> Result<f64> {
    let gr = Asymptotics::of(model)?.g_r();
    if !(gr > 0.0) {
        return Err(Error::Regime(format!("g_r(inf) = {gr:e}; pass an explicit --tmax")));
    }
    Ok(multiple / gr)
}

#[derive(Serialize)]
struct CoeffsJson<'a> {
    model: String,
    asymptotics: &'a Asymptotics,
    nu: f64,
    mu: f64,
    theta: f64,
    timescales: Option<crate::spectral::Timescales>,
    samples: Vec<crate::spectral::Coefficients>,
}

#[derive(Serialize)]
struct AnalyticJson {
    #[serde(flatten)]
    measure: AnalyticMeasure,
    #[serde(rename = "N_ana")]
    n_ana: f64,
    #[serde(rename = "N_ana_T")]
    n_ana_t: Option<f64>,
    #[serde(rename = "N_ana_corrected")]
    n_ana_corrected: f64,
    xi0: f64,
    windows: Vec<(f64, f64)>,
}

pub fn run(cli: Cli) -> Result<()> {
    let g = &cli.global;
    match &cli.command {
        Command::Coeffs { stride } => {
            let model = g.model()?;
            let t_max = match g.tmax {
                Some(t) => t,
                None => 100.0 * model.tau_c().max(1.0),
            };
            let cs = CoefficientSet::with_horizon(&model, t_max)?;
            match g.format {
                Format::Csv => {
                    let mut w = g.sink()?;
                    cs.write_csv(&mut w, t_max, *stride)?;
                    w.flush()?;
                }
                Format::Json => {
                    let samples = cs
                        .grid_times(t_max)
                        .step_by((*stride).max(1))
                        .map(|t| cs.at(t))
                        .collect::<Result<Vec<_>>>()?;
                    g.json(&CoeffsJson {
                        model: model.to_string(),
                        asymptotics: cs.asymptotics(),
                        nu: cs.nu(),
                        mu: cs.mu(),
                        theta: cs.theta(),
                        timescales: cs.timescales().ok(),
                        samples,
                    })?;
                }
            }
        }
        Command::Evolve { state, stride } => {
            let model = g.model()?;
            let rho0 = parse_state(state)?;
            let t_max = g.tmax.unwrap_or(100.0);
            let cs = CoefficientSet::with_horizon(&model, t_max)?;
            let cfg = EvolutionConfig::new(g.engine()?, &cs, t_max).with_stride(*stride);
            let tr = evolve(&cs, &rho0, &cfg)?;
            match g.format {
                Format::Csv => {
                    let mut w = g.sink()?;
                    tr.write_csv(&mut w)?;
                    w.flush()?;
                }
                Format::Json => g.json(&tr)?,
            }
        }
        Command::Kraus { at, tol } => {
            let model = g.model()?;
            let mut times = at.clone();
            if let Some(t) = times.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
                return Err(Error::InvalidTime(*t));
            }
            times.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let t_max = times.last().copied().unwrap_or(0.0).max(1e-9);
            let cs = CoefficientSet::with_horizon(&model, t_max)?;
            let reports = map_states(&cs, &times, default_ode_options(&cs))?
                .iter()
                .map(|m| check_cpt(&kraus_from_mapstate(m), *tol))
                .collect::<Result<Vec<_>>>()?;
            g.json(&reports)?;
        }
        Command::Measure { xi0, horizon, restarts } => {
            let model = g.model()?;
            let t = relaxation_horizon(&model, *horizon)?;
            let cs = CoefficientSet::with_horizon(&model, t)?;
            let mut cfg = MeasureConfig {
                horizon: Horizon::RelaxationTimes(*horizon),
                restarts: *restarts,
                seed: g.seed,
                workers: g.workers,
                ..MeasureConfig::default()
            };
            if xi0 != "auto" {
                let x: f64 = xi0.parse().map_err(|_| Error::param("xi0", format!("`{xi0}` is not auto or a number")))?;
                cfg = cfg.with_xi0(x);
            }
            g.json(&nonmarkovianity(g.engine()?, &cs, &cfg)?)?;
        }
        Command::Sweep { config } => {
            let mut spec = load_config(config)?;
            if g.workers.is_some() {
                spec.workers = g.workers;
            }
            let table = run_sweep(&spec)?;
            let out = g.out.clone().or(spec.out.clone());
            let mut w: Box<dyn Write> = match out {
                Some(p) => Box::new(BufWriter::new(File::create(p)?)),
                None => Box::new(BufWriter::new(io::stdout().lock())),
            };
            match g.format {
                Format::Csv => table.write_csv(&mut w)?,
                Format::Json => {
                    serde_json::to_writer_pretty(&mut w, &table).map_err(|e| io::Error::other(e.to_string()))?;
                    writeln!(w)?;
                }
            }
            w.flush()?;
        }
        Command::Analytic { xi0, windows } => {
            let a = AnalyticMeasure::from_asymptotics(&Asymptotics::of(&g.model()?)?)?;
            g.json(&AnalyticJson {
                measure: a,
                n_ana: a.n_ana(),
                n_ana_t: g.tmax.map(|t| a.n_ana_finite(t)).transpose()?,
                n_ana_corrected: a.n_ana_corrected(*xi0),
                xi0: *xi0,
                windows: a.positivity_windows(*xi0, windows.saturating_sub(1)),
            })?;
        }
        Command::Figure {
            which,
            points,
            range,
            horizon,
            cpt_times,
        } => {
            let tag: FigureTag = which.parse()?;
            let opts = FigureOptions {
                points: *points,
                range: range.as_ref().map(|r| [r[0], r[1]]),
                horizon: *horizon,
                workers: g.workers,
                seed: g.seed,
                cpt_times: *cpt_times,
            };
            let out = g.out.clone().unwrap_or_else(|| PathBuf::from(format!("{tag}.csv")));
            for p in emit_figure_data(tag, &opts, &out)? {
                eprintln!("wrote {}", p.display());
            }
        }
    }
    Ok(())
}

/// Parses `args` (program name first) and runs; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                1
            } else {
                2
            }
        }
    }
}

pub fn main_entry() -> i32 {
    main_with_args(std::env::args_os())
}
