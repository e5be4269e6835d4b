use num_complex::Complex64;
use serde::Serialize;

use super::state::QubitState;
use crate::error::{Error, Result};
use crate::ode::{integrate, OdeOptions};
use crate::quad::{GL8_NODES, GL8_WEIGHTS};
use crate::spectral::CoefficientSet;
use crate::OMEGA_A;

/// Data of the full dynamical map at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MapState {
    pub t: f64,
    pub gamma: Complex64,
    pub u: f64,
    pub v1: Complex64,
    pub v2: Complex64,
}

impl MapState {
    pub fn identity() -> Self {
        MapState {
            t: 0.0,
            gamma: Complex64::new(0.0, 0.0),
            u: 0.0,
            v1: Complex64::new(1.0, 0.0),
            v2: Complex64::new(0.0, 0.0),
        }
    }

    /// |v1|^2 - |v2|^2, conserved by the v equations.
    pub fn v_invariant(&self) -> f64 {
        self.v1.norm_sqr() - self.v2.norm_sqr()
    }

    /// rho_10(t) = P rho_10(0) + S rho_01(0); returns (P, S).
    pub fn coherence_factors(&self) -> (Complex64, Complex64) {
        let e = (-0.5 * self.gamma.conj()).exp();
        (e * self.v1, e * self.v2)
    }

    pub fn affine(&self) -> BlochAffine {
        let (p, s) = self.coherence_factors();
        BlochAffine::from_coherence(p, s, (-self.gamma.re).exp(), self.u)
    }

    /// Closed-form evolution of `rho0` through this map.
    pub fn apply(&self, rho0: &QubitState) -> QubitState {
        self.affine().apply(rho0)
    }
}

/// lambda_xy(t) = xy . lambda_xy(0), lambda_z(t) = zz lambda_z(0) + z0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlochAffine {
    pub xy: [[f64; 2]; 2],
    pub zz: f64,
    pub z0: f64,
}

impl BlochAffine {
    pub fn identity() -> Self {
        BlochAffine {
            xy: [[1.0, 0.0], [0.0, 1.0]],
            zz: 1.0,
            z0: 0.0,
        }
    }

    /// From rho_10 -> P rho_10 + S rho_01 with rho_10 = (x - i y)/2.
    pub fn from_coherence(p: Complex64, s: Complex64, zz: f64, z0: f64) -> Self {
        BlochAffine {
            xy: [
                [p.re + s.re, p.im - s.im],
                [-(p.im + s.im), p.re - s.re],
            ],
            zz,
            z0,
        }
    }

    pub fn apply(&self, rho0: &QubitState) -> QubitState {
        let [x, y, z] = rho0.lambda;
        QubitState::from_bloch([
            self.xy[0][0] * x + self.xy[0][1] * y,
            self.xy[1][0] * x + self.xy[1][1] * y,
            self.zz * z + self.z0,
        ])
    }
}

/// Advances u(t) = int_0^t e^{Gamma_r(s) - Gamma_r(t)} [f_+ - f_-](s) ds
/// without ever forming e^{+Gamma_r}.
pub(crate) struct URunner<'a> {
    coeffs: &'a CoefficientSet,
    t: f64,
    u: f64,
    gamma_r: f64,
    piece: f64,
}

impl<'a> URunner<'a> {
    pub(crate) fn new(coeffs: &'a CoefficientSet) -> Self {
        URunner {
            coeffs,
            t: 0.0,
            u: 0.0,
            gamma_r: 0.0,
            piece: 10.0 * coeffs.dt(),
        }
    }

    pub(crate) fn advance_to(&mut self, t: f64) -> f64 {
        let span = t - self.t;
        if span <= 0.0 {
            return self.u;
        }
        let n = (span / self.piece).ceil().max(1.0) as usize;
        let start = self.t;
        for k in 1..=n {
            let s1 = if k == n {
                t
            } else {
                start + span * k as f64 / n as f64
            };
            self.step(s1);
        }
        self.u
    }

    fn step(&mut self, s1: f64) {
        let s0 = self.t;
        let c1 = self.coeffs.eval(s1);
        let g1 = c1.gamma.re;
        if s0 >= self.coeffs.window_end() && self.coeffs.asymptotics().g_r() > 0.0 {
            // constant rates: relax exactly toward the stationary value
            let a = self.coeffs.asymptotics();
            let target = (a.f_plus - a.f_minus) / (2.0 * a.g_r());
            self.u = target + (self.u - target) * (-(g1 - self.gamma_r)).exp();
        } else {
            let mid = 0.5 * (s0 + s1);
            let half = 0.5 * (s1 - s0);
            let mut acc = 0.0;
            for i in 0..4 {
                for sign in [-1.0, 1.0] {
                    let c = self.coeffs.eval(mid + sign * half * GL8_NODES[i]);
                    acc += GL8_WEIGHTS[i] * (c.gamma.re - g1).exp() * (c.f_plus - c.f_minus);
                }
            }
            self.u = (-(g1 - self.gamma_r)).exp() * self.u + acc * half;
        }
        self.t = s1;
        self.gamma_r = g1;
    }
}

pub(crate) fn check_times(coeffs: &CoefficientSet, times: &[f64]) -> Result<()> {
    for w in times.windows(2) {
        if !(w[1] >= w[0]) {
            return Err(Error::param("times", "must be sorted ascending"));
        }
    }
    if let Some(&t0) = times.first() {
        coeffs.check_time(t0)?;
    }
    if let Some(&t1) = times.last() {
        coeffs.check_time(t1)?;
    }
    Ok(())
}

/// Default integrator settings: rtol 1e-9, atol 1e-12, maximum step
/// min(tau_s, tau_c)/40.
pub fn default_ode_options(coeffs: &CoefficientSet) -> OdeOptions {
    OdeOptions {
        rtol: 1e-9,
        atol: 1e-12,
        max_step: coeffs.dt(),
    }
}

/// Streams the map data at each of `times`. When `with_u` is false the
/// `u` field is left at 0, which saves the population integral for
/// callers that only need coherences.
pub fn for_each_map_state<F: FnMut(usize, MapState)>(
    coeffs: &CoefficientSet,
    times: &[f64],
    opts: OdeOptions,
    with_u: bool,
    mut visit: F,
) -> Result<()> {
    check_times(coeffs, times)?;
    let mut runner = URunner::new(coeffs);
    let rhs = |t: f64, y: &[f64; 4]| {
        let c = coeffs.eval(t);
        let k = c.g * Complex64::from_polar(1.0, 2.0 * OMEGA_A * t - c.gamma.im);
        let v1c = Complex64::new(y[0], -y[1]);
        let v2c = Complex64::new(y[2], -y[3]);
        let d1 = k * v2c;
        let d2 = k * v1c;
        [d1.re, d1.im, d2.re, d2.im]
    };
    integrate(rhs, 0.0, [1.0, 0.0, 0.0, 0.0], times, opts, |i, t, y| {
        let c = coeffs.eval(t);
        let u = if with_u { runner.advance_to(t) } else { 0.0 };
        visit(
            i,
            MapState {
                t,
                gamma: c.gamma,
                u,
                v1: Complex64::new(y[0], y[1]),
                v2: Complex64::new(y[2], y[3]),
            },
        );
    })?;
    Ok(())
}

/// Map data at each of `times` (sorted, within the coefficient horizon).
pub fn map_states(
    coeffs: &CoefficientSet,
    times: &[f64],
    opts: OdeOptions,
) -> Result<Vec<MapState>> {
    let mut out = Vec::with_capacity(times.len());
    for_each_map_state(coeffs, times, opts, true, |_, m| out.push(m))?;
    Ok(out)
}
