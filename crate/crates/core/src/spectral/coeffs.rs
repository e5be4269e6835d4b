use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;

use super::correlation::correlation;
use super::lorentzian::LorentzianClosed;
use super::quadrature::principal_values;
use super::SpectralModel;
use crate::num::Num;
use crate::error::{Error, Result};
use crate::quad::{adaptive_vec, gl8_vec, Tolerance};
use crate::OMEGA_A;

pub const COEFF_CSV_HEADER: &str = "t,f_plus,f_minus,g_re,g_im,h,Gamma_re,Gamma_im";

/// Master-equation coefficients at one time, together with the running
/// integrals the closed-form solutions need.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Coefficients {
    pub t: f64,
    pub f_plus: f64,
    pub f_minus: f64,
    pub g: Complex64,
    pub h: f64,
    /// 2 * int_0^t g
    pub gamma: Complex64,
    /// int_0^t f_-
    pub gamma_rwa: f64,
    /// int_0^t h
    pub h_int: f64,
}

impl Coefficients {
    pub fn zero() -> Self {
        Coefficients {
            t: 0.0,
            f_plus: 0.0,
            f_minus: 0.0,
            g: Complex64::new(0.0, 0.0),
            h: 0.0,
            gamma: Complex64::new(0.0, 0.0),
            gamma_rwa: 0.0,
            h_int: 0.0,
        }
    }

    pub fn g_r(&self) -> f64 {
        self.g.re
    }

    pub fn g_i(&self) -> f64 {
        self.g.im
    }
}

/// Long-time limits of the rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Asymptotics {
    pub f_plus: f64,
    pub f_minus: f64,
    pub g: Complex64,
    pub h: f64,
}

impl Asymptotics {
    pub fn of(model: &SpectralModel) -> Result<Self> {
        match model {
            SpectralModel::Lorentzian {
                alpha,
                lambda,
                delta,
            } => Ok(LorentzianClosed::new(*alpha, *lambda, *delta).asymptotics()),
            SpectralModel::Ohmic { alpha, omega_c } => {
                let j1 = model.j(OMEGA_A);
                let c = *omega_c;
                let ln = (c / OMEGA_A).ln();
                Ok(Asymptotics {
                    f_plus: 0.0,
                    f_minus: 2.0 * PI * j1,
                    g: Complex64::new(PI * j1, 2.0 * j1 * ln),
                    h: alpha * c * c / PI * (ln + PI * c / (2.0 * OMEGA_A))
                        / (OMEGA_A * OMEGA_A + c * c),
                })
            }
            SpectralModel::Tabulated { .. } => {
                let j1 = model.j(OMEGA_A);
                let (pv_minus, plus) = principal_values(model)?;
                Ok(Asymptotics {
                    f_plus: 0.0,
                    f_minus: 2.0 * PI * j1,
                    g: Complex64::new(PI * j1, pv_minus - plus),
                    h: pv_minus,
                })
            }
        }
    }

    pub fn g_r(&self) -> f64 {
        self.g.re
    }

    pub fn g_i(&self) -> f64 {
        self.g.im
    }

    /// Phase of g(inf).
    pub fn theta(&self) -> f64 {
        self.g.arg()
    }

    /// |g_i(inf)| / g_r(inf).
    pub fn nu(&self) -> f64 {
        self.g.im.abs() / self.g.re
    }

    /// |g(inf)| / g_r(inf).
    pub fn mu(&self) -> f64 {
        self.g.norm() / self.g.re
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Timescales {
    pub tau_s: f64,
    pub tau_c: f64,
    pub tau_r: f64,
    /// tau_r / tau_c > 100
    pub weak_coupling: bool,
}

#[derive(Debug, Clone)]
enum Source {
    Closed(LorentzianClosed),
    // nodes at k * dt up to the end of the transient window
    Grid(Vec<Coefficients>),
}

/// Coefficients on a uniform time grid of step min(tau_s, tau_c)/40.
///
/// Lorentzian values come from closed forms at any requested time. For the
/// other families the transient window (several hundred correlation times)
/// is tabulated from the bath correlation function; any time is reached
/// from the nearest node by an exact cell integral, and past the window
/// the rates sit at their limits while the running integrals grow linearly.
#[derive(Debug, Clone)]
pub struct CoefficientSet {
    model: SpectralModel,
    dt: f64,
    horizon: f64,
    window_end: f64,
    asym: Asymptotics,
    source: Source,
}

const WINDOW_CORRELATION_TIMES: f64 = 400.0;

impl CoefficientSet {
    /// Horizon defaults to ten relaxation times, or a thousand correlation
    /// times when the relaxation rate is not positive.
    pub fn new(model: &SpectralModel) -> Result<Self> {
        model.validate()?;
        let asym = Asymptotics::of(model)?;
        let horizon = if asym.g_r() > 0.0 {
            10.0 / asym.g_r()
        } else {
            1000.0 * model.tau_c().max(1.0 / OMEGA_A)
        };
        Self::build(model, horizon, asym)
    }

    pub fn with_horizon(model: &SpectralModel, horizon: f64) -> Result<Self> {
        model.validate()?;
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::param("horizon", format!("must be finite and > 0, got {horizon}")));
        }
        let asym = Asymptotics::of(model)?;
        Self::build(model, horizon, asym)
    }

    fn build(model: &SpectralModel, horizon: f64, asym: Asymptotics) -> Result<Self> {
        let dt = model.tau_c().min(1.0 / OMEGA_A) / 40.0;
        let (source, window_end) = match model {
            SpectralModel::Lorentzian {
                alpha,
                lambda,
                delta,
            } => (
                Source::Closed(LorentzianClosed::new(*alpha, *lambda, *delta)),
                // e^{-lambda t} below 1e-16
                (37.0 / lambda).min(horizon),
            ),
            _ => {
                let window = WINDOW_CORRELATION_TIMES * model.tau_c().max(1.0 / OMEGA_A);
                let n = (window.min(horizon) / dt).ceil() as usize;
                let mut nodes = Vec::with_capacity(n + 1);
                nodes.push(Coefficients::zero());
                for k in 0..n {
                    let t0 = k as f64 * dt;
                    let next = advance(model, &nodes[k], t0, (k + 1) as f64 * dt, k < 4)?;
                    nodes.push(next);
                }
                let end = n as f64 * dt;
                (Source::Grid(nodes), end)
            }
        };
        Ok(CoefficientSet {
            model: model.clone(),
            dt,
            horizon,
            window_end,
            asym,
            source,
        })
    }

    pub fn model(&self) -> &SpectralModel {
        &self.model
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// End of the transient window; later rates equal their limits to the
    /// accuracy of the tabulation.
    pub fn window_end(&self) -> f64 {
        self.window_end
    }

    pub fn asymptotics(&self) -> &Asymptotics {
        &self.asym
    }

    pub fn nu(&self) -> f64 {
        self.asym.nu()
    }

    pub fn mu(&self) -> f64 {
        self.asym.mu()
    }

    pub fn theta(&self) -> f64 {
        self.asym.theta()
    }

    pub fn check_time(&self, t: f64) -> Result<()> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::InvalidTime(t));
        }
        if t > self.horizon * (1.0 + 1e-12) {
            return Err(Error::BeyondHorizon {
                t,
                horizon: self.horizon,
            });
        }
        Ok(())
    }

    pub fn at(&self, t: f64) -> Result<Coefficients> {
        self.check_time(t)?;
        Ok(self.eval(t))
    }

    /// Complex decay exponent Gamma(t).
    pub fn big_gamma(&self, t: f64) -> Result<Complex64> {
        Ok(self.at(t)?.gamma)
    }

    /// Unchecked evaluation; callers validate the time range up front.
    pub(crate) fn eval(&self, t: f64) -> Coefficients {
        match &self.source {
            Source::Closed(c) => c.at(t),
            Source::Grid(nodes) => {
                if t >= self.window_end {
                    let last = nodes.last().unwrap();
                    let d = t - last.t;
                    return Coefficients {
                        t,
                        f_plus: self.asym.f_plus,
                        f_minus: self.asym.f_minus,
                        g: self.asym.g,
                        h: self.asym.h,
                        gamma: last.gamma + 2.0 * self.asym.g * d,
                        gamma_rwa: last.gamma_rwa + self.asym.f_minus * d,
                        h_int: last.h_int + self.asym.h * d,
                    };
                }
                let k = ((t / self.dt).floor() as usize).min(nodes.len() - 1);
                let node = &nodes[k];
                if t == node.t {
                    return *node;
                }
                // exactness matters more than speed in the singular first cells
                advance(&self.model, node, node.t, t, k < 4).unwrap_or_else(|_| {
                    advance(&self.model, node, node.t, t, false).expect("cell rule")
                })
            }
        }
    }

    pub fn timescales(&self) -> Result<Timescales> {
        let gr = self.asym.g_r();
        if !(gr > 0.0) {
            return Err(Error::Regime(format!(
                "g_r(inf) = {gr:e} is not positive, so no relaxation time exists"
            )));
        }
        let tau_r = 1.0 / gr;
        let tau_c = self.model.tau_c();
        Ok(Timescales {
            tau_s: 1.0 / OMEGA_A,
            tau_c,
            tau_r,
            weak_coupling: tau_r / tau_c > 100.0,
        })
    }

    /// Grid times k * dt up to `t_max`.
    pub fn grid_times(&self, t_max: f64) -> impl Iterator<Item = f64> + '_ {
        let n = (t_max / self.dt + 1e-9).floor() as usize;
        (0..=n).map(move |k| k as f64 * self.dt)
    }

    /// Smallest f_- and g_r over the transient window, sampled on the grid.
    pub fn transient_minima(&self) -> (f64, f64) {
        let mut min_f = f64::INFINITY;
        let mut min_g = f64::INFINITY;
        let mut visit = |c: &Coefficients| {
            min_f = min_f.min(c.f_minus);
            min_g = min_g.min(c.g.re);
        };
        match &self.source {
            Source::Grid(nodes) => nodes.iter().skip(1).for_each(&mut visit),
            Source::Closed(c) => {
                let n = (self.window_end / self.dt).ceil() as usize;
                (1..=n).for_each(|k| visit(&c.at(k as f64 * self.dt)));
            }
        }
        min_f = min_f.min(self.asym.f_minus);
        min_g = min_g.min(self.asym.g_r());
        (min_f, min_g)
    }

    /// Writes `t,f_plus,f_minus,g_re,g_im,h,Gamma_re,Gamma_im` every
    /// `stride` grid steps up to `t_max`.
    pub fn write_csv<W: Write>(&self, mut out: W, t_max: f64, stride: usize) -> Result<()> {
        self.check_time(t_max)?;
        writeln!(out, "{COEFF_CSV_HEADER}")?;
        for t in self.grid_times(t_max).step_by(stride.max(1)) {
            let c = self.eval(t);
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                Num(t),
                Num(c.f_plus),
                Num(c.f_minus),
                Num(c.g.re),
                Num(c.g.im),
                Num(c.h),
                Num(c.gamma.re),
                Num(c.gamma.im)
            )?;
        }
        Ok(())
    }
}

/// Moves the coefficients from `t0` to `t1` using the derivatives
///   f_-' = 2 (K_c cos t + K_s sin t),  f_+' = 2 (K_c cos t - K_s sin t),
///   g'   = 2 K_c e^{-i t},             h'   = K_s cos t - K_c sin t,
/// with the running integrals picked up through (t1 - s) weights.
fn advance(
    model: &SpectralModel,
    start: &Coefficients,
    t0: f64,
    t1: f64,
    careful: bool,
) -> Result<Coefficients> {
    let integrand = |s: f64| {
        let k = correlation(model, s);
        let (sn, cs) = (OMEGA_A * s).sin_cos();
        let w = t1 - s;
        let a = [k.re * cs, k.im * sn, k.re * sn, k.im * cs];
        [a[0], a[1], a[2], a[3], w * a[0], w * a[1], w * a[2], w * a[3]]
    };
    let v = if careful {
        let tol = Tolerance {
            abs: 1e-18,
            rel: 1e-12,
            max_intervals: 200,
        };
        adaptive_vec(integrand, t0, t1, tol, "coefficient cell")?.0
    } else {
        gl8_vec(integrand, t0, t1)
    };
    let [i1, i2, i3, i4, w1, w2, w3, w4] = v;
    let d = t1 - t0;
    Ok(Coefficients {
        t: t1,
        f_plus: start.f_plus + 2.0 * (i1 - i2),
        f_minus: start.f_minus + 2.0 * (i1 + i2),
        g: start.g + 2.0 * Complex64::new(i1, -i3),
        h: start.h + i4 - i3,
        gamma: start.gamma + 2.0 * start.g * d + 4.0 * Complex64::new(w1, -w3),
        gamma_rwa: start.gamma_rwa + start.f_minus * d + 2.0 * (w1 + w2),
        h_int: start.h_int + start.h * d + w4 - w3,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::adaptive;
    use crate::spectral::{quadrature_coefficients, QuadOptions, SpectralTable};

    fn fig2() -> SpectralModel {
        SpectralModel::lorentzian(0.01, 0.1, -0.9).unwrap()
    }

    #[test]
    fn figure_two_timescales() {
        let cs = CoefficientSet::new(&fig2()).unwrap();
        let ts = cs.timescales().unwrap();
        assert_eq!(ts.tau_s, 1.0);
        assert!((ts.tau_c - 10.0).abs() < 1e-12);
        assert!((ts.tau_r / ts.tau_c - 1494.0).abs() < 0.01 * 1494.0);
        assert!(ts.weak_coupling);
        assert!((cs.nu() - 5.628).abs() < 1e-3);
        assert!((cs.mu() * cs.mu() - 1.0 - cs.nu() * cs.nu()).abs() < 1e-9);
    }

    #[test]
    fn gamma_starts_at_zero_and_grows_like_twice_gr() {
        let cs = CoefficientSet::new(&fig2()).unwrap();
        assert_eq!(cs.big_gamma(0.0).unwrap(), Complex64::new(0.0, 0.0));
        let t = 2000.0;
        let slope = (cs.big_gamma(t + 100.0).unwrap() - cs.big_gamma(t).unwrap()) / 100.0;
        assert!((slope.re - 2.0 * cs.asymptotics().g_r()).abs() < 1e-12);
    }

    #[test]
    fn horizon_is_enforced() {
        let cs = CoefficientSet::with_horizon(&fig2(), 100.0).unwrap();
        assert!(cs.at(100.0).is_ok());
        assert!(matches!(cs.at(101.0), Err(Error::BeyondHorizon { .. })));
        assert!(matches!(cs.at(-1.0), Err(Error::InvalidTime(_))));
    }

    #[test]
    fn ohmic_grid_matches_frequency_quadrature() {
        for c in [0.5, 1.0, 4.0] {
            let m = SpectralModel::ohmic(0.01, c).unwrap();
            let cs = CoefficientSet::new(&m).unwrap();
            for t in [0.05, 0.6, 3.3, 20.0] {
                let a = cs.at(t).unwrap();
                let q = quadrature_coefficients(&m, t, QuadOptions::default()).unwrap();
                let scale = cs.asymptotics().f_minus;
                assert!((a.f_minus - q.f_minus).abs() < 1e-6 * scale, "c={c} t={t}");
                assert!((a.f_plus - q.f_plus).abs() < 1e-6 * scale, "c={c} t={t}");
                assert!((a.g.im - q.g.im).abs() < 1e-6 * scale, "c={c} t={t}");
                assert!((a.h - q.h).abs() < 1e-6 * scale, "c={c} t={t}");
            }
        }
    }

    #[test]
    fn ohmic_running_integrals_are_integrals_of_the_rates() {
        let m = SpectralModel::ohmic(0.01, 2.0).unwrap();
        let cs = CoefficientSet::new(&m).unwrap();
        let t = 7.3;
        let tol = Tolerance {
            abs: 1e-15,
            rel: 1e-11,
            max_intervals: 400,
        };
        let re = adaptive(|s| 2.0 * cs.eval(s).g.re, 0.0, t, tol, "").unwrap().0;
        let im = adaptive(|s| 2.0 * cs.eval(s).g.im, 0.0, t, tol, "").unwrap().0;
        let rwa = adaptive(|s| cs.eval(s).f_minus, 0.0, t, tol, "").unwrap().0;
        let hi = adaptive(|s| cs.eval(s).h, 0.0, t, tol, "").unwrap().0;
        let c = cs.at(t).unwrap();
        assert!((c.gamma.re - re).abs() < 1e-10);
        assert!((c.gamma.im - im).abs() < 1e-10);
        assert!((c.gamma_rwa - rwa).abs() < 1e-10);
        assert!((c.h_int - hi).abs() < 1e-10);
    }

    #[test]
    fn ohmic_limits() {
        let m = SpectralModel::ohmic(0.01, 1.0).unwrap();
        let a = Asymptotics::of(&m).unwrap();
        let j1 = m.j(1.0);
        assert!((a.g - Complex64::new(PI * j1, 0.0)).norm() < 1e-18);
        let m = SpectralModel::ohmic(0.01, 10.0).unwrap();
        let a = Asymptotics::of(&m).unwrap();
        assert!((a.g.im / m.j(1.0) - 4.6052).abs() < 1e-4);
        assert!(a.f_plus >= 0.0 && a.f_minus >= 0.0);
    }

    #[test]
    fn rates_settle_after_ten_correlation_times() {
        // the Ohmic correlation function decays as 1/s^2 on the scale of
        // the system period, so the slower of the two clocks sets the pace
        for m in [
            fig2(),
            SpectralModel::ohmic(0.01, 2.0).unwrap(),
            SpectralModel::ohmic(0.01, 0.5).unwrap(),
        ] {
            let cs = CoefficientSet::new(&m).unwrap();
            let a = *cs.asymptotics();
            let tc = m.tau_c().max(1.0 / OMEGA_A);
            for k in [10.0, 20.0, 50.0] {
                let c = cs.at(k * tc).unwrap();
                assert!((c.f_minus - a.f_minus).abs() <= 0.01 * a.f_minus.abs(), "{m}");
                assert!((c.g - a.g).norm() <= 0.01 * a.g.norm(), "{m}");
            }
        }
    }

    #[test]
    fn tabulated_model_runs_end_to_end() {
        // sampled Ohmic density, compared with the exact Ohmic limits
        let ohm = SpectralModel::ohmic(0.01, 1.0).unwrap();
        let samples: Vec<(f64, f64)> = (0..=4000).map(|k| {
            let w = k as f64 * 0.01;
            (w, ohm.j(w))
        }).collect();
        let m = SpectralModel::tabulated(SpectralTable::new(samples).unwrap(), 1.0).unwrap();
        let cs = CoefficientSet::with_horizon(&m, 50.0).unwrap();
        let a = cs.asymptotics();
        assert!((a.f_minus - 2.0 * PI * ohm.j(1.0)).abs() < 1e-8);
        let c = cs.at(5.0).unwrap();
        let q = quadrature_coefficients(&m, 5.0, QuadOptions::default()).unwrap();
        assert!((c.f_minus - q.f_minus).abs() < 1e-6 * a.f_minus);
        assert!((c.g.im - q.g.im).abs() < 1e-6 * a.f_minus);
    }

    #[test]
    fn csv_header_and_rows() {
        let cs = CoefficientSet::with_horizon(&fig2(), 10.0).unwrap();
        let mut buf = Vec::new();
        cs.write_csv(&mut buf, 1.0, 10).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(COEFF_CSV_HEADER));
        assert_eq!(lines.count(), 5);
    }
}
