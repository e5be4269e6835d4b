use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::{Asymptotics, CoefficientSet};
use crate::OMEGA_A;

/// (nu - arctan nu)/pi.
pub fn n_ana_of_nu(nu: f64) -> f64 {
    let nu = nu.abs();
    (nu - nu.atan()) / PI
}

/// Long-time approximation of sigma for the optimal equatorial pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalyticMeasure {
    pub nu: f64,
    pub mu: f64,
    /// Phase of g(inf).
    pub theta: f64,
    pub g_i: f64,
    pub tau_r: f64,
    pub epsilon: f64,
}

impl AnalyticMeasure {
    pub fn from_asymptotics(a: &Asymptotics) -> Result<Self> {
        let gr = a.g_r();
        if !(gr > 0.0) {
            return Err(Error::Regime(format!(
                "g_r(inf) = {gr:e} is not positive; the analytic measure needs relaxation"
            )));
        }
        let tau_r = 1.0 / gr;
        Ok(AnalyticMeasure {
            nu: a.nu(),
            mu: a.mu(),
            theta: a.theta(),
            g_i: a.g_i(),
            tau_r,
            epsilon: 1.0 / (2.0 * tau_r * (OMEGA_A - a.g_i())),
        })
    }

    pub fn new(coeffs: &CoefficientSet) -> Result<Self> {
        Self::from_asymptotics(coeffs.asymptotics())
    }

    /// xi(t) = xi(0) - 2 g_i(inf) t.
    pub fn xi(&self, xi0: f64, t: f64) -> f64 {
        xi0 - 2.0 * self.g_i * t
    }

    pub fn sigma_perp(&self, xi0: f64, t: f64) -> f64 {
        let phase = 2.0 * OMEGA_A * t + self.xi(xi0, t) + self.theta;
        (-t / self.tau_r).exp() / self.tau_r * (self.mu * phase.cos() - 1.0)
    }

    /// Largest sigma_perp over a period near `t`.
    pub fn envelope(&self, t: f64) -> f64 {
        (-t / self.tau_r).exp() / self.tau_r * (self.mu - 1.0)
    }

    pub fn n_ana(&self) -> f64 {
        n_ana_of_nu(self.nu)
    }

    /// Accumulated over [0, T] in the limit epsilon -> 0 at fixed T/tau_r.
    pub fn n_ana_finite(&self, horizon: f64) -> Result<f64> {
        if !(horizon > 0.0) {
            return Err(Error::param("T", format!("must be > 0, got {horizon}")));
        }
        Ok(-(-horizon / self.tau_r).exp_m1() * self.n_ana())
    }

    /// Exact integral of the positive part of sigma_perp summed over the
    /// whole windows n = 0, 1, 2, ...
    pub fn n_ana_corrected(&self, xi0: f64) -> f64 {
        if self.mu <= 1.0 {
            return 0.0;
        }
        let e = self.epsilon;
        let asec = (1.0 / self.mu).acos();
        let root = (self.mu * self.mu - 1.0).sqrt();
        (e * (PI + self.theta + xi0)).exp() * (e * (e * asec).cosh() * root - (e * asec).sinh())
            / ((e * PI).sinh() * (1.0 + e * e))
    }

    /// First order in epsilon of `n_ana_corrected`.
    pub fn n_ana_first_order(&self, xi0: f64) -> f64 {
        self.n_ana() * (1.0 + (PI + self.theta + xi0) * self.epsilon)
    }

    /// Angular frequency of the sigma_perp oscillation.
    pub fn carrier(&self) -> f64 {
        2.0 * (OMEGA_A - self.g_i)
    }

    /// Width of each positivity window.
    pub fn window_width(&self) -> f64 {
        if self.mu <= 1.0 {
            0.0
        } else {
            2.0 * (1.0 / self.mu).acos() / self.carrier()
        }
    }

    /// (t_n^-, t_n^+) for n = 0..=n_max; windows reaching below t = 0 are
    /// dropped, and none exist for mu <= 1.
    pub fn positivity_windows(&self, xi0: f64, n_max: usize) -> Vec<(f64, f64)> {
        if self.mu <= 1.0 {
            return Vec::new();
        }
        let half = (1.0 / self.mu).acos();
        let w = self.carrier();
        (0..=n_max)
            .map(|n| {
                let c = 2.0 * n as f64 * PI - self.theta - xi0;
                ((c - half) / w, (c + half) / w)
            })
            .filter(|&(a, _)| a >= 0.0)
            .collect()
    }
}
