use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::map::{check_times, for_each_map_state, BlochAffine, MapState, URunner};
use super::state::QubitState;
use crate::num::Num;
use crate::error::{Error, Result};
use crate::ode::{integrate, OdeOptions};
use crate::spectral::{CoefficientSet, Coefficients};
use crate::OMEGA_A;

pub const TRAJECTORY_CSV_HEADER: &str = "t,lx,ly,lz,rho11_re,rho10_re,rho10_im";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    /// Full master equation, Bloch equations integrated directly.
    #[serde(rename = "bloch")]
    FullBloch,
    /// Full master equation through the closed-form map.
    #[serde(rename = "closed")]
    FullClosed,
    Rwa,
    Sa,
}

impl Engine {
    pub fn is_full(self) -> bool {
        matches!(self, Engine::FullBloch | Engine::FullClosed)
    }
}

impl FromStr for Engine {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bloch" | "full" => Ok(Engine::FullBloch),
            "closed" => Ok(Engine::FullClosed),
            "rwa" => Ok(Engine::Rwa),
            "sa" => Ok(Engine::Sa),
            _ => Err(Error::Unknown {
                kind: "engine",
                value: s.to_string(),
            }),
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::FullBloch => "bloch",
            Engine::FullClosed => "closed",
            Engine::Rwa => "rwa",
            Engine::Sa => "sa",
        })
    }
}

/// Linear part of the equatorial Bloch equations, d(lx, ly)/dt = A (lx, ly).
pub fn xy_generator(engine: Engine, c: &Coefficients) -> [[f64; 2]; 2] {
    match engine {
        Engine::FullBloch | Engine::FullClosed => {
            let big = c.g * Complex64::from_polar(1.0, 2.0 * OMEGA_A * c.t);
            [
                [-c.g.re + big.re, c.g.im - big.im],
                [-c.g.im - big.im, -c.g.re - big.re],
            ]
        }
        Engine::Rwa => [[-0.5 * c.f_minus, c.h], [-c.h, -0.5 * c.f_minus]],
        Engine::Sa => [[-c.g.re, c.g.im], [-c.g.im, -c.g.re]],
    }
}

/// Right-hand side of the Bloch equations at the time stored in `c`.
pub fn bloch_rhs(engine: Engine, c: &Coefficients, lambda: &[f64; 3]) -> [f64; 3] {
    let a = xy_generator(engine, c);
    let [x, y, z] = *lambda;
    let dz = match engine {
        Engine::Rwa => -c.f_minus * (1.0 + z),
        _ => c.f_plus - c.f_minus - 2.0 * c.g.re * z,
    };
    [a[0][0] * x + a[0][1] * y, a[1][0] * x + a[1][1] * y, dz]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub engine: Engine,
    /// Base step; the ODE maximum step and the output grid unit.
    pub dt: f64,
    pub t_max: f64,
    pub rtol: f64,
    pub atol: f64,
    /// Output every `stride` base steps.
    pub stride: usize,
    /// Additional output times, hit exactly.
    pub extra_times: Vec<f64>,
}

impl EvolutionConfig {
    pub fn new(engine: Engine, coeffs: &CoefficientSet, t_max: f64) -> Self {
        EvolutionConfig {
            engine,
            dt: coeffs.dt(),
            t_max,
            rtol: 1e-9,
            atol: 1e-12,
            stride: 10,
            extra_times: Vec::new(),
        }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.stride = stride;
        self
    }

    pub fn with_times(mut self, times: &[f64]) -> Self {
        self.extra_times.extend_from_slice(times);
        self
    }

    pub fn validate(&self, coeffs: &CoefficientSet) -> Result<()> {
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return Err(Error::param("t_max", format!("must be > 0, got {}", self.t_max)));
        }
        if !(self.dt > 0.0) || self.dt > coeffs.dt() * (1.0 + 1e-12) {
            return Err(Error::param(
                "dt",
                format!(
                    "must lie in (0, min(tau_s, tau_c)/40 = {}], got {}",
                    coeffs.dt(),
                    self.dt
                ),
            ));
        }
        if self.stride == 0 {
            return Err(Error::param("stride", "must be at least 1"));
        }
        if !(self.rtol > 0.0 && self.atol > 0.0) {
            return Err(Error::param("rtol", "tolerances must be positive"));
        }
        if let Some(t) = self.extra_times.iter().find(|t| !(**t >= 0.0 && **t <= self.t_max)) {
            return Err(Error::param("extra_times", format!("{t} outside [0, t_max]")));
        }
        coeffs.check_time(self.t_max)
    }

    pub fn ode_options(&self) -> OdeOptions {
        OdeOptions {
            rtol: self.rtol,
            atol: self.atol,
            max_step: self.dt,
        }
    }

    /// Stride points k * stride * dt, the requested extra times and t_max,
    /// sorted without duplicates.
    pub fn output_times(&self) -> Vec<f64> {
        let unit = self.dt * self.stride as f64;
        let n = (self.t_max / unit + 1e-9).floor() as usize;
        let mut ts: Vec<f64> = (0..=n).map(|k| k as f64 * unit).collect();
        ts.extend(self.extra_times.iter().copied());
        ts.push(self.t_max);
        ts.retain(|t| *t <= self.t_max);
        ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
        ts
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub engine: Engine,
    pub times: Vec<f64>,
    pub states: Vec<QubitState>,
    /// Map data, filled by the closed-form full engine.
    pub maps: Option<Vec<MapState>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Index of the stored time nearest to `t`.
    pub fn nearest(&self, t: f64) -> usize {
        let k = self.times.partition_point(|&x| x < t);
        if k == 0 {
            0
        } else if k >= self.times.len() {
            self.times.len() - 1
        } else if t - self.times[k - 1] <= self.times[k] - t {
            k - 1
        } else {
            k
        }
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{TRAJECTORY_CSV_HEADER}")?;
        for (t, s) in self.times.iter().zip(&self.states) {
            let r = s.rho10();
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                Num(*t),
                Num(s.lambda[0]),
                Num(s.lambda[1]),
                Num(s.lambda[2]),
                Num(s.rho11()),
                Num(r.re),
                Num(r.im)
            )?;
        }
        Ok(())
    }
}

fn require(engine: Engine, cfg: &EvolutionConfig) -> Result<()> {
    if cfg.engine != engine {
        return Err(Error::param(
            "engine",
            format!("configuration selects {}, expected {}", cfg.engine, engine),
        ));
    }
    Ok(())
}

/// Full master equation by direct integration of the Bloch equations.
pub fn evolve_full_bloch(
    coeffs: &CoefficientSet,
    rho0: &QubitState,
    cfg: &EvolutionConfig,
) -> Result<Trajectory> {
    require(Engine::FullBloch, cfg)?;
    cfg.validate(coeffs)?;
    let times = cfg.output_times();
    let mut states = Vec::with_capacity(times.len());
    integrate(
        |t, y: &[f64; 3]| bloch_rhs(Engine::FullBloch, &coeffs.eval(t), y),
        0.0,
        rho0.lambda,
        &times,
        cfg.ode_options(),
        |_, _, y| states.push(QubitState::from_bloch(*y)),
    )?;
    Ok(Trajectory {
        engine: Engine::FullBloch,
        times,
        states,
        maps: None,
    })
}

/// Full master equation through Gamma, u and the v equations.
pub fn evolve_full_closed(
    coeffs: &CoefficientSet,
    rho0: &QubitState,
    cfg: &EvolutionConfig,
) -> Result<Trajectory> {
    require(Engine::FullClosed, cfg)?;
    cfg.validate(coeffs)?;
    let times = cfg.output_times();
    let mut maps = Vec::with_capacity(times.len());
    for_each_map_state(coeffs, &times, cfg.ode_options(), true, |_, m| maps.push(m))?;
    let states = maps.iter().map(|m| m.apply(rho0)).collect();
    Ok(Trajectory {
        engine: Engine::FullClosed,
        times,
        states,
        maps: Some(maps),
    })
}

/// Bloch map of the rotating-wave equation at the time stored in `c`.
pub fn rwa_map(c: &Coefficients) -> BlochAffine {
    let decay = (-c.gamma_rwa).exp();
    let p = Complex64::from_polar((-0.5 * c.gamma_rwa).exp(), c.h_int);
    BlochAffine::from_coherence(p, Complex64::new(0.0, 0.0), decay, decay - 1.0)
}

/// Bloch map of the secular equation; `u` comes from the population
/// integral.
pub fn sa_map(c: &Coefficients, u: f64) -> BlochAffine {
    let p = (Complex64::new(-0.5 * c.gamma.re, 0.5 * c.gamma.im)).exp();
    BlochAffine::from_coherence(p, Complex64::new(0.0, 0.0), (-c.gamma.re).exp(), u)
}

pub fn evolve_rwa(
    coeffs: &CoefficientSet,
    rho0: &QubitState,
    cfg: &EvolutionConfig,
) -> Result<Trajectory> {
    require(Engine::Rwa, cfg)?;
    cfg.validate(coeffs)?;
    let times = cfg.output_times();
    let states = times
        .iter()
        .map(|&t| rwa_map(&coeffs.eval(t)).apply(rho0))
        .collect();
    Ok(Trajectory {
        engine: Engine::Rwa,
        times,
        states,
        maps: None,
    })
}

pub fn evolve_sa(
    coeffs: &CoefficientSet,
    rho0: &QubitState,
    cfg: &EvolutionConfig,
) -> Result<Trajectory> {
    require(Engine::Sa, cfg)?;
    cfg.validate(coeffs)?;
    let times = cfg.output_times();
    let mut runner = URunner::new(coeffs);
    let states = times
        .iter()
        .map(|&t| {
            let u = runner.advance_to(t);
            sa_map(&coeffs.eval(t), u).apply(rho0)
        })
        .collect();
    Ok(Trajectory {
        engine: Engine::Sa,
        times,
        states,
        maps: None,
    })
}

/// Dispatches on `cfg.engine`.
pub fn evolve(
    coeffs: &CoefficientSet,
    rho0: &QubitState,
    cfg: &EvolutionConfig,
) -> Result<Trajectory> {
    match cfg.engine {
        Engine::FullBloch => evolve_full_bloch(coeffs, rho0, cfg),
        Engine::FullClosed => evolve_full_closed(coeffs, rho0, cfg),
        Engine::Rwa => evolve_rwa(coeffs, rho0, cfg),
        Engine::Sa => evolve_sa(coeffs, rho0, cfg),
    }
}

/// Bloch maps of any engine at sorted `times`; the full engines go
/// through the v equations.
pub fn bloch_maps(
    engine: Engine,
    coeffs: &CoefficientSet,
    times: &[f64],
    opts: OdeOptions,
) -> Result<Vec<BlochAffine>> {
    check_times(coeffs, times)?;
    match engine {
        Engine::FullBloch | Engine::FullClosed => {
            let mut out = Vec::with_capacity(times.len());
            for_each_map_state(coeffs, times, opts, true, |_, m| out.push(m.affine()))?;
            Ok(out)
        }
        Engine::Rwa => Ok(times.iter().map(|&t| rwa_map(&coeffs.eval(t))).collect()),
        Engine::Sa => {
            let mut runner = URunner::new(coeffs);
            Ok(times
                .iter()
                .map(|&t| {
                    let u = runner.advance_to(t);
                    sa_map(&coeffs.eval(t), u)
                })
                .collect())
        }
    }
}

/// Pointwise Bloch-vector difference of two trajectories on one grid.
pub fn pair_difference(a: &Trajectory, b: &Trajectory) -> Result<Vec<[f64; 3]>> {
    if a.len() != b.len() {
        return Err(Error::GridMismatch(format!(
            "lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    if let Some(k) = (0..a.len()).find(|&k| (a.times[k] - b.times[k]).abs() > 1e-12 * a.times[k].abs().max(1.0)) {
        return Err(Error::GridMismatch(format!(
            "sample {k}: t = {} vs {}",
            a.times[k], b.times[k]
        )));
    }
    Ok(a
        .states
        .iter()
        .zip(&b.states)
        .map(|(s1, s2)| {
            [
                s1.lambda[0] - s2.lambda[0],
                s1.lambda[1] - s2.lambda[1],
                s1.lambda[2] - s2.lambda[2],
            ]
        })
        .collect())
}
