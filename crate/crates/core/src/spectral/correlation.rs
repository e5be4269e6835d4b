//! Bath correlation function K(s) = int J(w) e^{i w s} dw.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::SpectralModel;
use crate::quad::gl8_vec;
use crate::special::ei_e1_difference;
use crate::OMEGA_A;

/// K(s) = K_c(s) + i K_s(s), the cosine and sine transforms of J over its
/// domain (the whole real axis for the Lorentzian). The Ohmic cosine part
/// diverges logarithmically at s = 0 and is returned as +inf there.
pub fn correlation(model: &SpectralModel, s: f64) -> Complex64 {
    match model {
        SpectralModel::Lorentzian {
            alpha,
            lambda,
            delta,
        } => {
            let w0 = OMEGA_A - delta;
            0.5 * alpha * lambda * (-lambda * s).exp() * Complex64::from_polar(1.0, w0 * s)
        }
        SpectralModel::Ohmic { alpha, omega_c } => {
            let c2 = omega_c * omega_c;
            let x = omega_c * s;
            let ks = 0.5 * alpha * c2 * (-x).exp();
            let kc = if x == 0.0 {
                f64::INFINITY
            } else {
                -alpha * c2 / (2.0 * PI) * ei_e1_difference(x)
            };
            Complex64::new(kc, ks)
        }
        SpectralModel::Tabulated { table, .. } => {
            let w = table.nodes();
            let j = table.values();
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..w.len() - 1 {
                let (a, b) = (w[k], w[k + 1]);
                let (ja, jb) = (j[k], j[k + 1]);
                let m = (jb - ja) / (b - a);
                if s * (b - a) < 0.5 {
                    let v = gl8_vec(
                        |x| {
                            let jv = ja + m * (x - a);
                            let (sn, cs) = (x * s).sin_cos();
                            [jv * cs, jv * sn]
                        },
                        a,
                        b,
                    );
                    acc += Complex64::new(v[0], v[1]);
                } else {
                    let i_s = Complex64::new(0.0, s);
                    let prim = |x: f64, jv: f64| {
                        let e = Complex64::from_polar(1.0, x * s);
                        e * jv / i_s + e * (m / (s * s))
                    };
                    acc += prim(b, jb) - prim(a, ja);
                }
            }
            acc
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{adaptive_vec, panel_edges, panels_vec, Tolerance};
    use crate::spectral::SpectralTable;

    fn by_frequency_quadrature(model: &SpectralModel, s: f64, top: f64) -> Complex64 {
        let edges = panel_edges(0.0, top, (PI / (4.0 * s)).min(1.0), &[1.0]);
        let tol = Tolerance {
            abs: 1e-16,
            rel: 1e-12,
            max_intervals: 500,
        };
        let (v, _) = panels_vec(
            |w| {
                let j = model.j(w);
                let (sn, cs) = (w * s).sin_cos();
                [j * cs, j * sn]
            },
            &edges,
            tol,
            "K",
        )
        .unwrap();
        Complex64::new(v[0], v[1])
    }

    #[test]
    fn ohmic_sine_part_is_exponential() {
        let m = SpectralModel::ohmic(0.02, 2.0).unwrap();
        let k = correlation(&m, 0.7);
        assert!((k.im - 0.5 * 0.02 * 4.0 * (-1.4f64).exp()).abs() < 1e-16);
    }

    #[test]
    fn ohmic_cosine_part_matches_frequency_integral() {
        // tail beyond W by two integrations by parts
        let m = SpectralModel::ohmic(0.01, 1.0).unwrap();
        for s in [0.5, 2.0, 6.0] {
            let top = 4000.0;
            let mut k = by_frequency_quadrature(&m, s, top);
            let jw = m.j(top);
            let djw = (m.j(top * (1.0 + 1e-4)) - m.j(top * (1.0 - 1e-4))) / (2e-4 * top);
            k.re += -jw * (top * s).sin() / s - djw * (top * s).cos() / (s * s);
            let exact = correlation(&m, s);
            assert!((k.re - exact.re).abs() < 1e-9, "s={s}: {} vs {}", k.re, exact.re);
        }
    }

    #[test]
    fn tabulated_branches_agree_with_quadrature() {
        let table =
            SpectralTable::new(vec![(0.0, 0.0), (0.7, 0.002), (1.5, 0.001), (4.0, 0.0)]).unwrap();
        let m = SpectralModel::tabulated(table, 1.0).unwrap();
        for s in [0.0, 0.1, 0.4, 1.0, 5.0, 30.0] {
            let k = correlation(&m, s);
            let tol = Tolerance {
                abs: 1e-16,
                rel: 1e-13,
                max_intervals: 500,
            };
            let mut direct = [0.0; 2];
            for (a, b) in [(0.0, 0.7), (0.7, 1.5), (1.5, 4.0)] {
                let (v, _) = adaptive_vec(
                    |w| {
                        let j = m.j(w);
                        [j * (w * s).cos(), j * (w * s).sin()]
                    },
                    a,
                    b,
                    tol,
                    "K",
                )
                .unwrap();
                direct[0] += v[0];
                direct[1] += v[1];
            }
            assert!((k.re - direct[0]).abs() < 1e-14, "s={s}");
            assert!((k.im - direct[1]).abs() < 1e-14, "s={s}");
        }
    }

    #[test]
    fn lorentzian_transform() {
        let m = SpectralModel::lorentzian(0.01, 0.1, -0.9).unwrap();
        let k0 = correlation(&m, 0.0);
        // int J over the real line = alpha lambda / 2
        assert!((k0.re - 0.0005).abs() < 1e-16);
        assert_eq!(k0.im, 0.0);
    }
}
