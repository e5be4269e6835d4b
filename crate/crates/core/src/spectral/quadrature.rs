//! Coefficients at a single time by frequency quadrature, after doing the
//! time integral analytically.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::kernel::{gi_kernel, sine_kernel, versine_kernel};
use super::lorentzian::LorentzianClosed;
use super::{Sign, SpectralModel};
use crate::error::{Error, Result};
use crate::quad::{adaptive, adaptive_vec, panel_edges, panels_vec, Tolerance};
use crate::OMEGA_A;

/// Frequency range of the integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Domain {
    /// The model's own support: the real axis for the Lorentzian,
    /// omega >= 0 otherwise.
    #[default]
    Natural,
    /// Always omega >= 0.
    NonNegative,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub domain: Domain,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            rel_tol: 1e-8,
            domain: Domain::Natural,
            max_intervals: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadCoefficients {
    pub t: f64,
    pub f_plus: f64,
    pub f_minus: f64,
    pub g: Complex64,
    pub h: f64,
    /// Sum of the per-panel error estimates, largest component.
    pub abs_err: f64,
}

struct Layout {
    lo: f64,
    hi: f64,
    lower_tail: bool,
    upper_tail: bool,
    breaks: Vec<f64>,
}

fn layout(model: &SpectralModel, t: f64, domain: Domain) -> Layout {
    let reach = 50f64.max(100.0 / t);
    match model {
        SpectralModel::Lorentzian { lambda, delta, .. } => {
            let w0 = OMEGA_A - delta;
            let span = reach.max(50.0 * lambda) + w0.abs();
            let mut breaks = vec![-OMEGA_A, OMEGA_A, w0];
            for k in [1.0, 5.0, 20.0] {
                breaks.push(w0 - k * lambda);
                breaks.push(w0 + k * lambda);
            }
            let extended = domain == Domain::Natural;
            Layout {
                lo: if extended { -span } else { 0.0 },
                hi: span,
                lower_tail: extended,
                upper_tail: true,
                breaks,
            }
        }
        SpectralModel::Ohmic { omega_c, .. } => Layout {
            lo: 0.0,
            hi: reach.max(50.0 * omega_c),
            lower_tail: false,
            upper_tail: true,
            breaks: vec![OMEGA_A, *omega_c],
        },
        SpectralModel::Tabulated { table, .. } => {
            let mut breaks = table.nodes().to_vec();
            breaks.push(OMEGA_A);
            Layout {
                lo: 0.0,
                hi: table.max_frequency(),
                lower_tail: false,
                upper_tail: false,
                breaks,
            }
        }
    }
}

/// Rough magnitude of the rates, used to turn the relative tolerance into
/// an absolute floor for panels whose contribution nearly cancels.
fn rate_scale(model: &SpectralModel, lo: f64, hi: f64) -> f64 {
    let n = 400;
    let peak = (0..=n)
        .map(|k| model.j(lo + (hi - lo) * k as f64 / n as f64))
        .fold(0.0, f64::max);
    let peak = match model {
        SpectralModel::Lorentzian { alpha, .. } => peak.max(alpha / (2.0 * PI)),
        _ => peak,
    };
    2.0 * PI * peak.max(model.j(OMEGA_A))
}

/// int a(w) e^{i w t} over [edge, inf) (upper) or (-inf, edge] by three
/// integrations by parts.
fn oscillatory_tail(a: &dyn Fn(f64) -> f64, t: f64, edge: f64, upper: bool) -> Complex64 {
    let hd = 1e-2 * edge.abs().max(1.0);
    let a0 = a(edge);
    let ap = a(edge + hd);
    let am = a(edge - hd);
    let d1 = (ap - am) / (2.0 * hd);
    let d2 = (ap - 2.0 * a0 + am) / (hd * hd);
    let it = Complex64::new(0.0, t);
    let series = a0 / it - d1 / (it * it) + d2 / (it * it * it);
    let phase = Complex64::from_polar(1.0, edge * t);
    if upper {
        -phase * series
    } else {
        phase * series
    }
}

/// int b(w) over [edge, inf) (upper) or (-inf, edge] via w = edge/u.
fn smooth_tail(b: &dyn Fn(f64) -> f64, edge: f64, tol: Tolerance) -> Result<f64> {
    let (v, _) = adaptive(
        |u| {
            let w = edge / u;
            b(w) * edge.abs() / (u * u)
        },
        0.0,
        1.0,
        tol,
        "frequency tail",
    )?;
    Ok(v)
}

/// f_+, f_-, g and h at time t by adaptive frequency quadrature.
pub fn quadrature_coefficients(
    model: &SpectralModel,
    t: f64,
    opts: QuadOptions,
) -> Result<QuadCoefficients> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidTime(t));
    }
    if t == 0.0 {
        return Ok(QuadCoefficients {
            t,
            f_plus: 0.0,
            f_minus: 0.0,
            g: Complex64::new(0.0, 0.0),
            h: 0.0,
            abs_err: 0.0,
        });
    }
    let lay = layout(model, t, opts.domain);
    let width = (PI / (4.0 * t)).min(1.0);
    let edges = panel_edges(lay.lo, lay.hi, width, &lay.breaks);
    let scale = rate_scale(model, lay.lo, lay.hi);
    let tol = Tolerance {
        abs: 1e-3 * opts.rel_tol * scale / edges.len() as f64,
        rel: opts.rel_tol,
        max_intervals: opts.max_intervals,
    };
    let integrand = |w: f64| {
        let j = model.j(w);
        [
            2.0 * j * sine_kernel(w - OMEGA_A, t),
            2.0 * j * sine_kernel(w + OMEGA_A, t),
            2.0 * j * gi_kernel(w, t),
            j * versine_kernel(w - OMEGA_A, t),
        ]
    };
    let (mut v, err) = panels_vec(integrand, &edges, tol, "coefficient frequency integral")?;

    let am = |w: f64| model.j(w) / (w - OMEGA_A);
    let ap = |w: f64| model.j(w) / (w + OMEGA_A);
    let tail_tol = Tolerance {
        abs: 1e-3 * opts.rel_tol * scale,
        rel: opts.rel_tol,
        max_intervals: opts.max_intervals,
    };
    let mut tails = Vec::new();
    if lay.upper_tail {
        tails.push((lay.hi, true));
    }
    if lay.lower_tail {
        tails.push((lay.lo, false));
    }
    let rot_m = Complex64::from_polar(1.0, -OMEGA_A * t);
    let rot_p = Complex64::from_polar(1.0, OMEGA_A * t);
    for (edge, upper) in tails {
        let pm = oscillatory_tail(&am, t, edge, upper);
        let pp = oscillatory_tail(&ap, t, edge, upper);
        let nm = smooth_tail(&am, edge, tail_tol)?;
        let np = smooth_tail(&ap, edge, tail_tol)?;
        v[0] += 2.0 * (rot_m * pm).im;
        v[1] += 2.0 * (rot_p * pp).im;
        v[2] += (nm - np) - (rot_m * pm).re + (rot_p * pp).re;
        v[3] += nm - (rot_m * pm).re;
    }
    let (f_minus, f_plus, gi, h) = (v[0], v[1], v[2], v[3]);
    Ok(QuadCoefficients {
        t,
        f_plus,
        f_minus,
        g: Complex64::new(0.5 * (f_plus + f_minus), gi),
        h,
        abs_err: err.iter().cloned().fold(0.0, f64::max),
    })
}

fn closed_or_quadrature(model: &SpectralModel, t: f64) -> Result<QuadCoefficients> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidTime(t));
    }
    match model {
        SpectralModel::Lorentzian {
            alpha,
            lambda,
            delta,
        } => {
            let c = LorentzianClosed::new(*alpha, *lambda, *delta).at(t);
            Ok(QuadCoefficients {
                t,
                f_plus: c.f_plus,
                f_minus: c.f_minus,
                g: c.g,
                h: c.h,
                abs_err: 0.0,
            })
        }
        _ => quadrature_coefficients(model, t, QuadOptions::default()),
    }
}

/// f_+(t) or f_-(t): closed form for the Lorentzian, quadrature otherwise.
pub fn coeff_f(model: &SpectralModel, sign: Sign, t: f64) -> Result<f64> {
    let c = closed_or_quadrature(model, t)?;
    Ok(match sign {
        Sign::Plus => c.f_plus,
        Sign::Minus => c.f_minus,
    })
}

/// g(t), with real part (f_+ + f_-)/2.
pub fn coeff_g(model: &SpectralModel, t: f64) -> Result<Complex64> {
    Ok(closed_or_quadrature(model, t)?.g)
}

/// The shift coefficient h(t) of the rotating-wave equation.
pub fn coeff_h(model: &SpectralModel, t: f64) -> Result<f64> {
    Ok(closed_or_quadrature(model, t)?.h)
}

/// Principal values (PV int J/(w - omega_A), int J/(w + omega_A)) over the
/// model's non-negative support.
pub(crate) fn principal_values(model: &SpectralModel) -> Result<(f64, f64)> {
    let (top, tail) = match model {
        SpectralModel::Tabulated { table, .. } => (table.max_frequency(), false),
        SpectralModel::Ohmic { omega_c, .. } => (50f64.max(50.0 * omega_c), true),
        SpectralModel::Lorentzian { lambda, delta, .. } => {
            (50f64.max(50.0 * lambda) + (OMEGA_A - delta).abs(), true)
        }
    };
    let mut breaks = vec![OMEGA_A];
    if let SpectralModel::Tabulated { table, .. } = model {
        breaks.extend_from_slice(table.nodes());
    }
    let edges = panel_edges(0.0, top, 1.0, &breaks);
    let scale = rate_scale(model, 0.0, top);
    let tol = Tolerance {
        abs: 1e-13 * scale / edges.len() as f64,
        rel: 1e-10,
        max_intervals: 400,
    };
    let j1 = model.j(OMEGA_A);
    let resonance_inside = top > OMEGA_A;
    let mut pv = 0.0;
    let mut plus = 0.0;
    for w in edges.windows(2) {
        let (v, _) = adaptive_vec(
            |x| {
                let j = model.j(x);
                let sub = if resonance_inside {
                    (j - j1) / (x - OMEGA_A)
                } else {
                    j / (x - OMEGA_A)
                };
                [sub, j / (x + OMEGA_A)]
            },
            w[0],
            w[1],
            tol,
            "principal value",
        )?;
        pv += v[0];
        plus += v[1];
    }
    if resonance_inside {
        pv += j1 * ((top - OMEGA_A) / OMEGA_A).ln();
    } else if top == OMEGA_A && j1 != 0.0 {
        return Err(Error::InvalidTable(
            "table ends exactly at resonance with J != 0; principal value diverges".into(),
        ));
    }
    if tail {
        let tol = Tolerance {
            abs: 1e-13 * scale,
            rel: 1e-10,
            max_intervals: 400,
        };
        pv += smooth_tail(&|x| model.j(x) / (x - OMEGA_A), top, tol)?;
        plus += smooth_tail(&|x| model.j(x) / (x + OMEGA_A), top, tol)?;
    }
    Ok((pv, plus))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::SpectralTable;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn zero_time_gives_zero() {
        let m = SpectralModel::ohmic(0.01, 1.0).unwrap();
        let c = quadrature_coefficients(&m, 0.0, QuadOptions::default()).unwrap();
        assert_eq!(c.f_minus, 0.0);
        assert_eq!(c.g, Complex64::new(0.0, 0.0));
        assert!(coeff_h(&m, -1.0).is_err());
        assert!(coeff_f(&m, Sign::Plus, f64::NAN).is_err());
    }

    #[test]
    fn lorentzian_closed_forms_match_quadrature_on_same_domain() {
        let m = SpectralModel::lorentzian(0.01, 0.1, -0.9).unwrap();
        let closed = match m {
            SpectralModel::Lorentzian {
                alpha,
                lambda,
                delta,
            } => LorentzianClosed::new(alpha, lambda, delta),
            _ => unreachable!(),
        };
        for t in [0.5, 3.0, 17.0, 50.0, 120.0] {
            let q = quadrature_coefficients(&m, t, QuadOptions::default()).unwrap();
            let c = closed.at(t);
            assert!(rel(q.f_minus, c.f_minus) < 1e-5, "t={t}");
            assert!(rel(q.f_plus, c.f_plus) < 1e-5, "t={t}");
            assert!(rel(q.g.im, c.g.im) < 1e-5, "t={t}");
            assert!(rel(q.h, c.h) < 1e-5, "t={t}");
        }
    }

    #[test]
    fn gr_is_mean_of_rates() {
        let m = SpectralModel::ohmic(0.01, 2.0).unwrap();
        for t in [0.3, 4.0, 25.0] {
            let q = quadrature_coefficients(&m, t, QuadOptions::default()).unwrap();
            let bound = 1e-7 * q.f_plus.abs().max(q.f_minus.abs()).max(1e-12);
            assert!((q.g.re - 0.5 * (q.f_plus + q.f_minus)).abs() <= bound);
        }
    }

    #[test]
    fn ohmic_principal_values_match_closed_forms() {
        for c in [0.5, 1.0, 2.0, 10.0] {
            let m = SpectralModel::ohmic(0.01, c).unwrap();
            let (pv, plus) = principal_values(&m).unwrap();
            let j1 = m.j(1.0);
            let gi = pv - plus;
            let h = 0.01 * c * c / PI * (f64::ln(c) + PI * c / 2.0) / (1.0 + c * c);
            assert!((gi - 2.0 * j1 * c.ln()).abs() < 1e-9 * j1, "c={c}");
            assert!((pv - h).abs() < 1e-9 * j1, "c={c}");
        }
    }

    #[test]
    fn table_principal_value_of_flat_density() {
        // J = 1 on [0, 3]: PV int 1/(w-1) = ln 2, int 1/(w+1) = ln 4
        let t = SpectralTable::new(vec![(0.0, 1.0), (3.0, 1.0)]).unwrap();
        let m = SpectralModel::tabulated(t, 1.0).unwrap();
        let (pv, plus) = principal_values(&m).unwrap();
        assert!((pv - 2f64.ln()).abs() < 1e-10);
        assert!((plus - 4f64.ln()).abs() < 1e-10);
    }
}
