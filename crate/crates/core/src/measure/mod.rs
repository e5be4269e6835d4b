//! Trace distance, its growth rate and the non-Markovianity measure.

mod analytic;
mod closed;
mod kernel;
mod optimize;

pub use analytic::{n_ana_of_nu, AnalyticMeasure};
pub use closed::{n_rwa_closed, n_sa_closed};
pub use kernel::{PairKernel, KERNEL_STEP};
pub use optimize::{maximize, nonmarkovianity, Horizon, MeasureConfig, MeasureResult, Optimum};

use serde::Serialize;

use crate::dynamics::{bloch_rhs, QubitState, Trajectory};
use crate::error::{Error, Result};
use crate::spectral::CoefficientSet;

/// Sampling steps above this alias the 2 omega_A oscillation of sigma.
pub const MAX_SIGMA_STEP: f64 = std::f64::consts::PI / 10.0;

/// D = |delta lambda| / 2.
pub fn trace_distance(a: &QubitState, b: &QubitState) -> f64 {
    let d: f64 = (0..3).map(|k| (a.lambda[k] - b.lambda[k]).powi(2)).sum();
    0.5 * d.sqrt()
}

/// Half the sum of absolute eigenvalues of rho_1 - rho_2.
pub fn trace_distance_eigen(a: &QubitState, b: &QubitState) -> f64 {
    let e = (a.density_matrix() - b.density_matrix()).hermitian_eigenvalues();
    0.5 * (e[0].abs() + e[1].abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthInterval {
    pub start: f64,
    pub end: f64,
    pub d_start: f64,
    pub d_end: f64,
}

impl GrowthInterval {
    pub fn increase(&self) -> f64 {
        self.d_end - self.d_start
    }
}

/// Cubic Hermite value at `t` from endpoint values and slopes.
pub(crate) fn hermite(t0: f64, d0: f64, s0: f64, t1: f64, d1: f64, s1: f64, t: f64) -> f64 {
    let h = t1 - t0;
    let x = (t - t0) / h;
    let x2 = x * x;
    let x3 = x2 * x;
    (2.0 * x3 - 3.0 * x2 + 1.0) * d0
        + (x3 - 2.0 * x2 + x) * h * s0
        + (-2.0 * x3 + 3.0 * x2) * d1
        + (x3 - x2) * h * s1
}

/// Streams (t, D, sigma) samples and sums D over the intervals where
/// sigma > 0. Sign changes are located by linear interpolation of sigma.
#[derive(Debug, Clone)]
pub(crate) struct GrowthScan {
    prev: Option<(f64, f64, f64)>,
    open: Option<(f64, f64)>,
    total: f64,
    record: bool,
    intervals: Vec<GrowthInterval>,
}

impl GrowthScan {
    pub(crate) fn new(record: bool) -> Self {
        GrowthScan {
            prev: None,
            open: None,
            total: 0.0,
            record,
            intervals: Vec::new(),
        }
    }

    fn close(&mut self, t: f64, d: f64) {
        if let Some((a, da)) = self.open.take() {
            if d > da {
                self.total += d - da;
            }
            if self.record {
                self.intervals.push(GrowthInterval {
                    start: a,
                    end: t,
                    d_start: da,
                    d_end: d,
                });
            }
        }
    }

    #[inline]
    pub(crate) fn push(&mut self, t: f64, d: f64, s: f64) {
        match self.prev {
            None => {
                if s > 0.0 {
                    self.open = Some((t, d));
                }
            }
            Some((t0, d0, s0)) => {
                let was = s0 > 0.0;
                let is = s > 0.0;
                if was != is {
                    let tr = t0 + (t - t0) * s0 / (s0 - s);
                    let dr = hermite(t0, d0, s0, t, d, s, tr);
                    if is {
                        self.open = Some((tr, dr));
                    } else {
                        self.close(tr, dr);
                    }
                }
            }
        }
        self.prev = Some((t, d, s));
    }

    pub(crate) fn finish(mut self) -> (f64, Vec<GrowthInterval>) {
        if let Some((t, d, _)) = self.prev {
            self.close(t, d);
        }
        (self.total, self.intervals)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SigmaTrace {
    pub times: Vec<f64>,
    pub d: Vec<f64>,
    pub sigma: Vec<f64>,
    pub intervals: Vec<GrowthInterval>,
}

impl SigmaTrace {
    /// Sum of D(b) - D(a) over the growth intervals.
    pub fn increase(&self) -> f64 {
        self.intervals.iter().map(|g| g.increase().max(0.0)).sum()
    }

    fn from_samples(times: Vec<f64>, d: Vec<f64>, sigma: Vec<f64>) -> Self {
        let mut scan = GrowthScan::new(true);
        for k in 0..times.len() {
            scan.push(times[k], d[k], sigma[k]);
        }
        let (_, intervals) = scan.finish();
        SigmaTrace {
            times,
            d,
            sigma,
            intervals,
        }
    }
}

/// Derivative at `xs[k]` of the polynomial through the points.
fn lagrange_derivative(xs: &[f64], ys: &[f64], k: usize) -> f64 {
    let x = xs[k];
    let n = xs.len();
    let mut total = 0.0;
    for j in 0..n {
        // d/dx of the j-th basis polynomial at x
        let mut dl = 0.0;
        for m in 0..n {
            if m == j {
                continue;
            }
            let mut term = 1.0 / (xs[j] - xs[m]);
            for l in 0..n {
                if l != j && l != m {
                    term *= (x - xs[l]) / (xs[j] - xs[l]);
                }
            }
            dl += term;
        }
        total += ys[j] * dl;
    }
    total
}

/// Fourth-order finite-difference derivative on a possibly uneven grid.
pub fn finite_difference(times: &[f64], values: &[f64]) -> Vec<f64> {
    let n = times.len();
    if n < 5 {
        return (0..n).map(|k| lagrange_derivative(times, values, k)).collect();
    }
    (0..n)
        .map(|k| {
            let lo = k.saturating_sub(2).min(n - 5);
            lagrange_derivative(&times[lo..lo + 5], &values[lo..lo + 5], k - lo)
        })
        .collect()
}

/// D(t) and sigma(t) for two trajectories on one grid. With coefficient
/// data sigma comes from the Bloch equations, otherwise from finite
/// differences of D.
pub fn sigma_series(
    a: &Trajectory,
    b: &Trajectory,
    coeffs: Option<&CoefficientSet>,
) -> Result<SigmaTrace> {
    let diff = crate::dynamics::pair_difference(a, b)?;
    if a.engine != b.engine {
        return Err(Error::param("engine", format!("{} vs {}", a.engine, b.engine)));
    }
    let step = a.times.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    if step > MAX_SIGMA_STEP {
        return Err(Error::GridTooCoarse {
            step,
            limit: MAX_SIGMA_STEP,
        });
    }
    let d: Vec<f64> = diff
        .iter()
        .map(|v| 0.5 * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt())
        .collect();
    let sigma = match coeffs {
        Some(cs) => {
            a.times.last().map(|&t| cs.check_time(t)).transpose()?;
            (0..a.len())
                .map(|k| {
                    if d[k] == 0.0 {
                        return 0.0;
                    }
                    let c = cs.eval(a.times[k]);
                    let ra = bloch_rhs(a.engine, &c, &a.states[k].lambda);
                    let rb = bloch_rhs(a.engine, &c, &b.states[k].lambda);
                    let dot: f64 = (0..3).map(|i| diff[k][i] * (ra[i] - rb[i])).sum();
                    dot / (4.0 * d[k])
                })
                .collect()
        }
        None => finite_difference(&a.times, &d),
    };
    Ok(SigmaTrace::from_samples(a.times.clone(), d, sigma))
}
