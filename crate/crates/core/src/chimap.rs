//! Operator-sum form of the full dynamical map and its CPT certificate.

use num_complex::Complex64;
use serde::Serialize;

use crate::dynamics::{MapState, QubitState};
use crate::error::{Error, Result};
use crate::mat2::Mat2;

pub const CPT_TOL: f64 = 1e-9;

/// Below this norm both projective forms of a w_j are treated as degenerate.
const DEGENERATE: f64 = 1e-14;

/// rho(t) = sum_i Lambda_i A_i^dag rho(0) A_i.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KrausDecomposition {
    pub t: f64,
    pub lambda: [f64; 4],
    /// w_j as (numerator, denominator); w_j = num/den, den may vanish.
    pub w: [(Complex64, Complex64); 4],
    pub p: [Complex64; 2],
    pub ops: [Mat2; 4],
}

impl KrausDecomposition {
    /// w_j as a number, infinite when its denominator vanishes.
    pub fn w_value(&self, j: usize) -> Complex64 {
        let (n, d) = self.w[j];
        if d.norm() == 0.0 {
            Complex64::new(f64::INFINITY, 0.0)
        } else {
            n / d
        }
    }

    /// sum_i Lambda_i A_i A_i^dag.
    pub fn completeness(&self) -> Mat2 {
        (0..4).fold(Mat2::zero(), |acc, i| {
            acc + (self.ops[i] * self.ops[i].adjoint()).scale(Complex64::new(self.lambda[i], 0.0))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CptReport {
    pub t: f64,
    #[serde(rename = "Lambda")]
    pub lambda: [f64; 4],
    pub min_lambda: f64,
    pub completeness_residual: f64,
    pub pass: bool,
}

/// The two w_j of one pair, s = -1 then s = +1, in projective form.
fn w_pair(p: Complex64, u: f64) -> [(Complex64, Complex64); 2] {
    let r = (0.25 * u * u + p.norm_sqr()).sqrt();
    let d = Complex64::new(0.5 * u, p.im);
    [-1.0, 1.0].map(|s| {
        // (sR + p_r)/d = conj(d)/(sR - p_r); keep the better conditioned one
        let a = (Complex64::new(s * r + p.re, 0.0), d);
        let b = (d.conj(), Complex64::new(s * r - p.re, 0.0));
        let na = a.0.norm_sqr() + a.1.norm_sqr();
        let nb = b.0.norm_sqr() + b.1.norm_sqr();
        if na >= nb {
            a
        } else {
            b
        }
    })
}

fn pair_norm((n, d): (Complex64, Complex64)) -> f64 {
    (n.norm_sqr() + d.norm_sqr()).sqrt()
}

pub fn kraus_from_mapstate(ms: &MapState) -> KrausDecomposition {
    let half = (-0.5 * ms.gamma).exp();
    let p = [half * ms.v1.conj(), half * ms.v2.conj()];
    let er = (-ms.gamma.re).exp();
    let u = ms.u;
    let r1 = (4.0 * p[0].norm_sqr() + u * u).sqrt();
    let r2 = (4.0 * p[1].norm_sqr() + u * u).sqrt();
    let lambda = [
        0.25 * (1.0 + er - r1),
        0.25 * (1.0 + er + r1),
        0.25 * (1.0 - er - r2),
        0.25 * (1.0 - er + r2),
    ];
    let [w1, w2] = w_pair(p[0], u);
    let [w3, w4] = w_pair(p[1], u);
    let w = [w1, w2, w3, w4];

    let (id, sx, sy, sz) = (Mat2::identity(), Mat2::sigma_x(), Mat2::sigma_y(), Mat2::sigma_z());
    let i = Complex64::new(0.0, 1.0);
    let one = Complex64::new(1.0, 0.0);
    let ops = [0, 1, 2, 3].map(|j| {
        let norm = pair_norm(w[j]);
        let even = j < 2;
        if pair_norm(w[j & 2]) < DEGENERATE && pair_norm(w[(j & 2) + 1]) < DEGENERATE {
            // |p| = u = 0: the pair's weights coincide and any orthonormal
            // choice works
            return match j {
                0 => sz,
                1 => id,
                2 => sy,
                _ => sx.scale(i),
            };
        }
        let (n, d) = w[j];
        let s = one / norm;
        if even {
            (id.scale(n) + sz.scale(d)).scale(s)
        } else {
            (sx.scale(i * n) + sy.scale(d)).scale(s)
        }
    });
    KrausDecomposition {
        t: ms.t,
        lambda,
        w,
        p,
        ops,
    }
}

pub fn check_cpt(kd: &KrausDecomposition, tol: f64) -> Result<CptReport> {
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(Error::param("tol", format!("must be finite and >= 0, got {tol}")));
    }
    let min_lambda = kd.lambda.iter().copied().fold(f64::INFINITY, f64::min);
    let residual = (kd.completeness() - Mat2::identity()).max_abs();
    Ok(CptReport {
        t: kd.t,
        lambda: kd.lambda,
        min_lambda,
        completeness_residual: residual,
        pass: min_lambda >= -tol && residual <= tol,
    })
}

pub fn apply_map_matrix(kd: &KrausDecomposition, rho0: &Mat2) -> Mat2 {
    (0..4).fold(Mat2::zero(), |acc, i| {
        let a = &kd.ops[i];
        acc + (a.adjoint() * *rho0 * *a).scale(Complex64::new(kd.lambda[i], 0.0))
    })
}

pub fn apply_map(kd: &KrausDecomposition, rho0: &QubitState) -> Result<QubitState> {
    QubitState::from_density_matrix(&apply_map_matrix(kd, &rho0.density_matrix()))
}
