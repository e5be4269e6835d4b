use std::f64::consts::PI;

use super::{hermite, GrowthInterval, GrowthScan};
use crate::dynamics::{for_each_map_state, xy_generator, Engine};
use crate::error::{Error, Result};
use crate::ode::OdeOptions;
use crate::spectral::CoefficientSet;

/// Largest sampling step of the measure grid.
pub const KERNEL_STEP: f64 = PI / 40.0;

/// Pair-independent data for antipodal pure pairs lambda^{1,2}(0) = +-n.
///
/// With m_z the population decay factor and B the equatorial Bloch map,
/// D(t)^2 = m_z^2 n_z^2 + n_xy^T Q n_xy where Q = B^T B, and sigma follows
/// from d(m_z^2)/dt and dQ/dt = B^T (A + A^T) B.
#[derive(Debug, Clone)]
pub struct PairKernel {
    engine: Engine,
    step: f64,
    horizon: f64,
    /// [m_z^2, d(m_z^2)/dt, Q00, Q01, Q11, dQ00, dQ01, dQ11] at k * step.
    samples: Vec<[f64; 8]>,
}

impl PairKernel {
    /// Samples on an even grid ending at `horizon` with step at most
    /// `max_step`.
    pub fn build(
        engine: Engine,
        coeffs: &CoefficientSet,
        horizon: f64,
        max_step: f64,
        opts: OdeOptions,
    ) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::param("horizon", format!("must be finite and > 0, got {horizon}")));
        }
        if !(max_step > 0.0) || max_step > super::MAX_SIGMA_STEP {
            return Err(Error::GridTooCoarse {
                step: max_step,
                limit: super::MAX_SIGMA_STEP,
            });
        }
        coeffs.check_time(horizon)?;
        let n = (horizon / max_step).ceil().max(1.0) as usize;
        let step = horizon / n as f64;
        let time = |k: usize| if k == n { horizon } else { k as f64 * step };
        let mut samples = Vec::with_capacity(n + 1);
        match engine {
            Engine::FullBloch | Engine::FullClosed => {
                let times: Vec<f64> = (0..=n).map(time).collect();
                for_each_map_state(coeffs, &times, opts, false, |_, m| {
                    let c = coeffs.eval(m.t);
                    let b = m.affine().xy;
                    let a = xy_generator(engine, &c);
                    let s = [
                        [2.0 * a[0][0], a[0][1] + a[1][0]],
                        [a[0][1] + a[1][0], 2.0 * a[1][1]],
                    ];
                    let q = sym_congruence(&b, &[[1.0, 0.0], [0.0, 1.0]]);
                    let qd = sym_congruence(&b, &s);
                    let mz2 = (-2.0 * c.gamma.re).exp();
                    samples.push([mz2, -4.0 * c.g.re * mz2, q[0], q[1], q[2], qd[0], qd[1], qd[2]]);
                })?;
            }
            Engine::Rwa => {
                for k in 0..=n {
                    let c = coeffs.eval(time(k));
                    let q = (-c.gamma_rwa).exp();
                    let qd = -c.f_minus * q;
                    samples.push([q * q, 2.0 * qd * q, q, 0.0, q, qd, 0.0, qd]);
                }
            }
            Engine::Sa => {
                for k in 0..=n {
                    let c = coeffs.eval(time(k));
                    let q = (-c.gamma.re).exp();
                    let qd = -2.0 * c.g.re * q;
                    samples.push([q * q, 2.0 * qd * q, q, 0.0, q, qd, 0.0, qd]);
                }
            }
        }
        Ok(PairKernel {
            engine,
            step,
            horizon,
            samples,
        })
    }

    pub fn engine(&self) -> Engine {
        self.engine
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn time(&self, k: usize) -> f64 {
        if k + 1 == self.samples.len() {
            self.horizon
        } else {
            k as f64 * self.step
        }
    }

    /// (D, sigma) at sample `k` for the unit direction `n`.
    #[inline]
    pub fn d_sigma(&self, k: usize, n: &[f64; 3]) -> (f64, f64) {
        let s = &self.samples[k];
        let (x, y, z) = (n[0], n[1], n[2]);
        let z2 = z * z;
        let d2 = s[0] * z2 + s[2] * x * x + 2.0 * s[3] * x * y + s[4] * y * y;
        let dd2 = s[1] * z2 + s[5] * x * x + 2.0 * s[6] * x * y + s[7] * y * y;
        let d = d2.max(0.0).sqrt();
        let sigma = if d > 0.0 { 0.5 * dd2 / d } else { 0.0 };
        (d, sigma)
    }

    /// N for the pair +-n over [0, t_end], t_end clamped to the horizon.
    pub fn measure_until(&self, n: &[f64; 3], t_end: f64) -> f64 {
        self.scan(n, t_end, false).0
    }

    pub fn measure(&self, n: &[f64; 3]) -> f64 {
        self.scan(n, self.horizon, false).0
    }

    pub fn intervals(&self, n: &[f64; 3], t_end: f64) -> Vec<GrowthInterval> {
        self.scan(n, t_end, true).1
    }

    /// D and sigma at every sample for the pair +-n.
    pub fn series(&self, n: &[f64; 3]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let mut t = Vec::with_capacity(self.len());
        let mut d = Vec::with_capacity(self.len());
        let mut s = Vec::with_capacity(self.len());
        for k in 0..self.len() {
            let (dk, sk) = self.d_sigma(k, n);
            t.push(self.time(k));
            d.push(dk);
            s.push(sk);
        }
        (t, d, s)
    }

    fn scan(&self, n: &[f64; 3], t_end: f64, record: bool) -> (f64, Vec<GrowthInterval>) {
        let mut g = GrowthScan::new(record);
        let t_end = t_end.min(self.horizon);
        let mut prev = (0.0, 0.0, 0.0);
        for k in 0..self.len() {
            let t = self.time(k);
            let (d, s) = self.d_sigma(k, n);
            if t > t_end {
                // end the scan at t_end inside this cell
                let (t0, d0, s0) = prev;
                let de = hermite(t0, d0, s0, t, d, s, t_end);
                let se = s0 + (s - s0) * (t_end - t0) / (t - t0);
                if t_end > t0 {
                    g.push(t_end, de, se);
                }
                break;
            }
            g.push(t, d, s);
            prev = (t, d, s);
        }
        g.finish()
    }
}

/// Upper triangle of B^T S B for symmetric S.
fn sym_congruence(b: &[[f64; 2]; 2], s: &[[f64; 2]; 2]) -> [f64; 3] {
    let sb = [
        [s[0][0] * b[0][0] + s[0][1] * b[1][0], s[0][0] * b[0][1] + s[0][1] * b[1][1]],
        [s[1][0] * b[0][0] + s[1][1] * b[1][0], s[1][0] * b[0][1] + s[1][1] * b[1][1]],
    ];
    [
        b[0][0] * sb[0][0] + b[1][0] * sb[1][0],
        b[0][0] * sb[0][1] + b[1][0] * sb[1][1],
        b[0][1] * sb[0][1] + b[1][1] * sb[1][1],
    ]
}
