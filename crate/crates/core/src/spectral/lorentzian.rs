//! Closed-form coefficients for the Lorentzian density with the frequency
//! integrals extended over the whole real axis.

use num_complex::Complex64;

use super::coeffs::{Asymptotics, Coefficients};
use crate::OMEGA_A;

/// (1 - e^{-z t})/z.
fn phi1(z: Complex64, t: f64) -> Complex64 {
    let zt = z * t;
    if zt.norm() < 0.1 {
        // t * sum (-zt)^k/(k+1)!
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        for k in 1..14 {
            term *= -zt / (k as f64 + 1.0);
            sum += term;
        }
        sum * t
    } else if zt.re > 40.0 {
        z.inv()
    } else {
        (Complex64::new(1.0, 0.0) - (-zt).exp()) / z
    }
}

/// (t - phi1)/z, the integral of phi1 from 0 to t.
fn phi2(z: Complex64, t: f64) -> Complex64 {
    let zt = z * t;
    if zt.norm() < 0.1 {
        // t^2 * sum (-zt)^k/(k+2)!
        let mut term = Complex64::new(0.5, 0.0);
        let mut sum = term;
        for k in 1..14 {
            term *= -zt / (k as f64 + 2.0);
            sum += term;
        }
        sum * t * t
    } else {
        (t - phi1(z, t)) / z
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct LorentzianClosed {
    pref: f64,
    a: Complex64,
    b: Complex64,
}

impl LorentzianClosed {
    pub(crate) fn new(alpha: f64, lambda: f64, delta: f64) -> Self {
        LorentzianClosed {
            pref: alpha * lambda,
            a: Complex64::new(lambda, delta),
            b: Complex64::new(lambda, 2.0 * OMEGA_A - delta),
        }
    }

    pub(crate) fn at(&self, t: f64) -> Coefficients {
        let pa = phi1(self.a, t);
        let pb = phi1(self.b, t);
        let qa = phi2(self.a, t);
        let qb = phi2(self.b, t);
        Coefficients {
            t,
            f_plus: self.pref * pb.re,
            f_minus: self.pref * pa.re,
            g: 0.5 * self.pref * (pa + pb),
            h: 0.5 * self.pref * pa.im,
            gamma: self.pref * (qa + qb),
            gamma_rwa: self.pref * qa.re,
            h_int: 0.5 * self.pref * qa.im,
        }
    }

    pub(crate) fn asymptotics(&self) -> Asymptotics {
        let ia = self.a.inv();
        let ib = self.b.inv();
        Asymptotics {
            f_plus: self.pref * ib.re,
            f_minus: self.pref * ia.re,
            g: 0.5 * self.pref * (ia + ib),
            h: 0.5 * self.pref * ia.im,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn series_and_direct_branches_meet() {
        let z = Complex64::new(0.1, -0.9);
        let t = 0.1 / z.norm();
        let below = phi1(z, t * (1.0 - 1e-14));
        let above = phi1(z, t * (1.0 + 1e-14));
        assert!((below - above).norm() < 1e-12 * below.norm());
        let below = phi2(z, t * (1.0 - 1e-14));
        let above = phi2(z, t * (1.0 + 1e-14));
        assert!((below - above).norm() < 1e-11 * below.norm());
    }

    #[test]
    fn figure_two_asymptotics() {
        let l = LorentzianClosed::new(0.01, 0.1, -0.9);
        let a = l.asymptotics();
        // f_-(inf) = 2 pi J(omega_A)
        let j1 = 0.01 / (2.0 * PI) * 0.01 / 0.82;
        assert!((a.f_minus - 2.0 * PI * j1).abs() < 1e-16);
        assert!((a.f_minus - 1.2195e-4).abs() < 1e-8);
        assert!((a.g.im - 3.7657e-4).abs() < 1e-8);
    }

    #[test]
    fn late_time_matches_limit() {
        let l = LorentzianClosed::new(0.01, 0.1, -0.9);
        let c = l.at(1000.0);
        let a = l.asymptotics();
        assert!((c.f_minus - a.f_minus).abs() < 1e-18);
        assert!((c.g - a.g).norm() < 1e-18);
    }
}
