use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{AnalyticMeasure, GrowthInterval, PairKernel, KERNEL_STEP};
use crate::dynamics::{Engine, QubitState};
use crate::error::{Error, Result};
use crate::ode::OdeOptions;
use crate::spectral::CoefficientSet;

/// Candidates this close to the best value count as ties.
const TIE: f64 = 1e-9;
/// Optima with |lambda_z| below this are reported as equatorial.
const EQUATORIAL: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Horizon {
    /// Multiple of tau_r.
    RelaxationTimes(f64),
    Absolute(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureConfig {
    pub horizon: Horizon,
    pub step: f64,
    /// Polar angles from the pole to the equator, inclusive.
    pub polar: usize,
    pub azimuth: usize,
    pub xi_tol: f64,
    /// Extra random starting points, refined like the grid optimum.
    pub restarts: usize,
    pub seed: u64,
    pub workers: Option<usize>,
    /// Fixes the pair to the equatorial one with this phase.
    pub xi0: Option<f64>,
    pub rtol: f64,
    pub atol: f64,
}

impl Default for MeasureConfig {
    fn default() -> Self {
        MeasureConfig {
            horizon: Horizon::RelaxationTimes(10.0),
            step: KERNEL_STEP,
            polar: 13,
            azimuth: 24,
            xi_tol: 1e-3,
            restarts: 0,
            seed: 0,
            workers: None,
            xi0: None,
            rtol: 1e-9,
            atol: 1e-12,
        }
    }
}

impl MeasureConfig {
    pub fn with_horizon(mut self, h: Horizon) -> Self {
        self.horizon = h;
        self
    }

    pub fn with_xi0(mut self, xi0: f64) -> Self {
        self.xi0 = Some(xi0);
        self
    }

    pub fn resolve_horizon(&self, coeffs: &CoefficientSet) -> Result<f64> {
        let t = match self.horizon {
            Horizon::Absolute(t) => t,
            Horizon::RelaxationTimes(m) => m * coeffs.timescales()?.tau_r,
        };
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::param("horizon", format!("must be finite and > 0, got {t}")));
        }
        let minimum = 10.0 * coeffs.model().tau_c();
        if t < minimum {
            return Err(Error::HorizonTooShort { horizon: t, minimum });
        }
        coeffs.check_time(t)?;
        Ok(t)
    }

    fn validate(&self) -> Result<()> {
        if self.polar < 2 || self.azimuth < 1 {
            return Err(Error::param("grid", "need at least 2 polar and 1 azimuthal angles"));
        }
        if !(self.xi_tol > 0.0) {
            return Err(Error::param("xi_tol", "must be > 0"));
        }
        if let Some(x) = self.xi0 {
            if !x.is_finite() {
                return Err(Error::param("xi0", "must be finite"));
            }
        }
        if self.workers == Some(0) {
            return Err(Error::param("workers", "must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureResult {
    #[serde(rename = "N")]
    pub n: f64,
    pub xi0: Option<f64>,
    pub lambda0: [f64; 3],
    pub engine: Engine,
    pub horizon: f64,
    pub intervals: Vec<GrowthInterval>,
    /// e^{-T/tau_r} N_ana, the analytic tail beyond the horizon.
    pub residual_estimate: Option<f64>,
    pub nu: f64,
    pub mu: f64,
    #[serde(rename = "N_ana")]
    pub n_ana: Option<f64>,
    pub evaluations: usize,
    pub converged: bool,
}

/// Best pair direction found on a kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimum {
    pub theta: f64,
    pub phi: f64,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl Optimum {
    /// Canonical representative of the pair: polar angle in [0, pi/2].
    fn canonical(theta: f64, phi: f64) -> (f64, f64) {
        let (mut th, mut ph) = (theta.rem_euclid(TAU), phi);
        if th > PI {
            th = TAU - th;
            ph += PI;
        }
        if th > FRAC_PI_2 {
            th = PI - th;
            ph += PI;
        }
        (th, ph.rem_euclid(TAU))
    }

    pub fn direction(&self) -> [f64; 3] {
        direction(self.theta, self.phi)
    }

    /// 2 phi mod 2 pi, the same for both members of the pair.
    pub fn xi(&self) -> f64 {
        (2.0 * self.phi).rem_euclid(TAU)
    }
}

fn direction(theta: f64, phi: f64) -> [f64; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [st * cp, st * sp, ct]
}

/// Strictly better, with ties broken toward the equator, then small xi.
fn better(a: &Optimum, b: &Optimum) -> bool {
    if a.value > b.value + TIE {
        return true;
    }
    if a.value < b.value - TIE {
        return false;
    }
    let (ta, _) = Optimum::canonical(a.theta, a.phi);
    let (tb, _) = Optimum::canonical(b.theta, b.phi);
    let (da, db) = (FRAC_PI_2 - ta, FRAC_PI_2 - tb);
    if (da - db).abs() > 1e-12 {
        return da < db;
    }
    a.xi() < b.xi()
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section maximization of `f` on [a, b].
fn golden<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64, evals: &mut usize) -> (f64, f64, bool) {
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    *evals += 2;
    for _ in 0..200 {
        if b - a < tol {
            break;
        }
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
        *evals += 1;
    }
    if f1 >= f2 {
        (x1, f1, b - a < tol)
    } else {
        (x2, f2, b - a < tol)
    }
}

/// Coordinate refinement in phi, theta, phi around a start point.
fn refine(kernel: &PairKernel, start: Optimum, dtheta: f64, dphi: f64, tol: f64, t_end: f64) -> Optimum {
    let eval = |th: f64, ph: f64| kernel.measure_until(&direction(th, ph), t_end);
    let mut best = start;
    let mut evals = 0;
    let mut converged = true;
    let passes = [(false, dphi), (true, dtheta), (false, 0.5 * dphi)];
    for (polar, width) in passes {
        // phi carries a factor sin(theta) that makes it meaningless at the pole
        if !polar && best.theta.sin() < 1e-12 {
            continue;
        }
        let (x, v, ok) = if polar {
            let lo = (best.theta - width).max(0.0);
            let hi = (best.theta + width).min(PI);
            golden(|th| eval(th, best.phi), lo, hi, tol, &mut evals)
        } else {
            // xi = 2 phi, so half the tolerance in phi
            golden(|ph| eval(best.theta, ph), best.phi - width, best.phi + width, 0.5 * tol, &mut evals)
        };
        converged &= ok;
        let cand = if polar {
            Optimum { theta: x, value: v, ..best }
        } else {
            Optimum { phi: x, value: v, ..best }
        };
        if better(&cand, &best) {
            best = cand;
        }
    }
    let (theta, phi) = Optimum::canonical(best.theta, best.phi);
    Optimum {
        theta,
        phi,
        evaluations: start.evaluations + evals,
        converged,
        ..best
    }
}

/// Maximizes N over antipodal pure pairs on a prepared kernel, counting
/// growth up to `t_end`.
pub fn maximize(kernel: &PairKernel, cfg: &MeasureConfig, t_end: f64) -> Result<Optimum> {
    cfg.validate()?;
    let run = || {
        let dtheta = FRAC_PI_2 / (cfg.polar - 1) as f64;
        let dphi = TAU / cfg.azimuth as f64;
        let mut grid = vec![(0.0, 0.0)];
        for i in 1..cfg.polar {
            for j in 0..cfg.azimuth {
                grid.push((i as f64 * dtheta, j as f64 * dphi));
            }
        }
        let values: Vec<f64> = grid
            .par_iter()
            .map(|&(th, ph)| kernel.measure_until(&direction(th, ph), t_end))
            .collect();
        let mut best = Optimum {
            theta: 0.0,
            phi: 0.0,
            value: values[0],
            evaluations: grid.len(),
            converged: true,
        };
        for (&(theta, phi), &value) in grid.iter().zip(&values).skip(1) {
            let c = Optimum { theta, phi, value, ..best };
            if better(&c, &best) {
                best = c;
            }
        }
        let mut starts = vec![best];
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        for _ in 0..cfg.restarts {
            let theta = rng.gen::<f64>().acos();
            let phi = TAU * rng.gen::<f64>();
            let value = kernel.measure_until(&direction(theta, phi), t_end);
            starts.push(Optimum {
                theta,
                phi,
                value,
                evaluations: 1,
                converged: true,
            });
        }
        let refined: Vec<Optimum> = starts
            .par_iter()
            .map(|s| refine(kernel, *s, dtheta, dphi, cfg.xi_tol, t_end))
            .collect();
        let total: usize = refined.iter().map(|o| o.evaluations).sum();
        let mut out = refined[0];
        for r in &refined[1..] {
            if better(r, &out) {
                out = *r;
            }
        }
        out.evaluations = total;
        out
    };
    match cfg.workers {
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::param("workers", e.to_string()))?;
            Ok(pool.install(run))
        }
        None => Ok(run()),
    }
}

/// Maximizes the sum of trace-distance increases over antipodal pure
/// initial pairs, integrating to the configured horizon.
pub fn nonmarkovianity(
    engine: Engine,
    coeffs: &CoefficientSet,
    cfg: &MeasureConfig,
) -> Result<MeasureResult> {
    cfg.validate()?;
    let horizon = cfg.resolve_horizon(coeffs)?;
    let opts = OdeOptions {
        rtol: cfg.rtol,
        atol: cfg.atol,
        max_step: coeffs.dt(),
    };
    let kernel = PairKernel::build(engine, coeffs, horizon, cfg.step, opts)?;
    let best = match cfg.xi0 {
        Some(xi0) => {
            let phi = 0.5 * xi0.rem_euclid(TAU);
            Optimum {
                theta: FRAC_PI_2,
                phi,
                value: kernel.measure(&direction(FRAC_PI_2, phi)),
                evaluations: 1,
                converged: true,
            }
        }
        None => maximize(&kernel, cfg, horizon)?,
    };
    let mut n = best.direction();
    let xi0 = (n[2].abs() < EQUATORIAL).then(|| best.xi());
    if let Some(xi) = xi0 {
        let e = QubitState::equatorial(xi).lambda;
        if n[0] * e[0] + n[1] * e[1] < 0.0 {
            n = n.map(|v| -v);
        }
    }
    let analytic = AnalyticMeasure::new(coeffs).ok();
    let n_ana = analytic.map(|a| a.n_ana());
    Ok(MeasureResult {
        n: best.value,
        xi0,
        lambda0: n,
        engine,
        horizon,
        intervals: kernel.intervals(&n, horizon),
        residual_estimate: analytic.map(|a| (-horizon / a.tau_r).exp() * a.n_ana()),
        nu: coeffs.nu(),
        mu: coeffs.mu(),
        n_ana,
        evaluations: best.evaluations,
        converged: best.converged,
    })
}
