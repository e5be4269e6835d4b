//! Frequency kernels left after the time integrals are done analytically.

use crate::OMEGA_A;

/// Half-width of the band around resonance where [`gi_kernel`] switches
/// to the cancellation-free form.
pub const GI_SERIES_BAND: f64 = 1e-3 * OMEGA_A;

/// sin(x t)/x, equal to t at x = 0.
#[inline]
pub(crate) fn sine_kernel(x: f64, t: f64) -> f64 {
    let xt = x * t;
    if xt.abs() < 1e-8 {
        t * (1.0 - xt * xt / 6.0)
    } else {
        xt.sin() / x
    }
}

/// (1 - cos x t)/x written as 2 sin^2(x t / 2)/x, zero at x = 0.
#[inline]
pub(crate) fn versine_kernel(x: f64, t: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let s = (0.5 * x * t).sin();
    2.0 * s * s / x
}

/// The imaginary-part kernel as written, with 1 - cos in the numerators.
/// Not defined at omega = omega_A.
pub fn gi_kernel_direct(w: f64, t: f64) -> f64 {
    let dm = w - OMEGA_A;
    let dp = w + OMEGA_A;
    0.5 * ((1.0 - (dm * t).cos()) / dm - (1.0 - (dp * t).cos()) / dp)
}

/// The same kernel in half-angle form, finite and accurate at resonance.
pub fn gi_kernel_near_resonance(w: f64, t: f64) -> f64 {
    0.5 * (versine_kernel(w - OMEGA_A, t) - versine_kernel(w + OMEGA_A, t))
}

/// Kernel whose frequency integral against 2 J gives Im g(t).
pub fn gi_kernel(w: f64, t: f64) -> f64 {
    if (w - OMEGA_A).abs() < GI_SERIES_BAND {
        gi_kernel_near_resonance(w, t)
    } else {
        gi_kernel_direct(w, t)
    }
}
