use crate::error::{Error, Result};
use crate::quad::{adaptive, Tolerance};
use crate::spectral::{CoefficientSet, Coefficients};

/// Integral of the negative part of `rate` weighted by e^{-decay}, over the
/// transient window; past it the rate is constant.
fn negative_part(
    coeffs: &CoefficientSet,
    rate: impl Fn(&Coefficients) -> f64,
    decay: impl Fn(&Coefficients) -> f64,
    limit: f64,
    what: &'static str,
) -> Result<f64> {
    if limit < 0.0 {
        return Err(Error::Regime(format!(
            "{what}: asymptotic rate {limit:e} is negative, the integral diverges"
        )));
    }
    let t_end = coeffs.window_end().min(coeffs.horizon());
    let settled = rate(&coeffs.eval(t_end));
    if (settled - limit).abs() > 1e-3 * limit.abs() + 1e-15 {
        return Err(Error::HorizonTooShort {
            horizon: coeffs.horizon(),
            minimum: 2.0 * t_end,
        });
    }
    let h = 4.0 * coeffs.dt();
    let n = (t_end / h).ceil() as usize;
    let f = |t: f64| rate(&coeffs.eval(t));
    let root = |mut a: f64, mut b: f64| {
        let fa_neg = f(a) < 0.0;
        for _ in 0..100 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if (f(m) < 0.0) == fa_neg {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    };
    let tol = Tolerance {
        abs: 1e-16,
        rel: 1e-10,
        max_intervals: 2000,
    };
    let integrand = |t: f64| {
        let c = coeffs.eval(t);
        let r = rate(&c);
        if r < 0.0 {
            -r * (-decay(&c)).exp()
        } else {
            0.0
        }
    };
    let mut total = 0.0;
    let mut start: Option<f64> = None;
    // the rates vanish at t = 0, so the sign at the first node decides
    let mut prev_t = 0.0;
    let mut prev_neg = f(h.min(t_end)) < 0.0;
    if prev_neg {
        start = Some(0.0);
    }
    for k in 1..=n {
        let t = (k as f64 * h).min(t_end);
        let neg = f(t) < 0.0;
        if neg != prev_neg {
            let r = root(prev_t, t);
            if neg {
                start = Some(r);
            } else if let Some(a) = start.take() {
                total += adaptive(integrand, a, r, tol, what)?.0;
            }
        }
        prev_t = t;
        prev_neg = neg;
    }
    if let Some(a) = start {
        total += adaptive(integrand, a, t_end, tol, what)?.0;
    }
    Ok(total)
}

/// Measure of the rotating-wave equation, the integral of the negative
/// part of f_- weighted by e^{-Gamma_RWA}.
pub fn n_rwa_closed(coeffs: &CoefficientSet) -> Result<f64> {
    let lim = coeffs.asymptotics().f_minus;
    negative_part(coeffs, |c| c.f_minus, |c| c.gamma_rwa, lim, "N_RWA")
}

/// Measure of the secular equation, with 2 g_r and Gamma_r.
pub fn n_sa_closed(coeffs: &CoefficientSet) -> Result<f64> {
    let lim = 2.0 * coeffs.asymptotics().g_r();
    negative_part(coeffs, |c| 2.0 * c.g.re, |c| c.gamma.re, lim, "N_SA")
}
