use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat2::Mat2;

/// Slack allowed on the Bloch-ball constraint.
pub const BLOCH_TOL: f64 = 1e-9;

/// Qubit state as a Bloch vector, rho = (I + lambda . sigma)/2 in the
/// basis (|1>, |0>), so lambda_z = +1 is the excited state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitState {
    pub lambda: [f64; 3],
}

impl QubitState {
    pub fn new(lx: f64, ly: f64, lz: f64) -> Result<Self> {
        let s = QubitState {
            lambda: [lx, ly, lz],
        };
        if !s.lambda.iter().all(|v| v.is_finite()) {
            return Err(Error::param("lambda", "components must be finite"));
        }
        if s.purity_radius() > 1.0 + BLOCH_TOL {
            return Err(Error::param(
                "lambda",
                format!("Bloch vector length {} exceeds 1", s.purity_radius()),
            ));
        }
        Ok(s)
    }

    pub(crate) fn from_bloch(lambda: [f64; 3]) -> Self {
        QubitState { lambda }
    }

    pub fn excited() -> Self {
        QubitState::from_bloch([0.0, 0.0, 1.0])
    }

    pub fn ground() -> Self {
        QubitState::from_bloch([0.0, 0.0, -1.0])
    }

    pub fn maximally_mixed() -> Self {
        QubitState::from_bloch([0.0; 3])
    }

    /// Pure equatorial state with rho_10 = e^{-i xi / 2} / 2.
    pub fn equatorial(xi: f64) -> Self {
        let (s, c) = (0.5 * xi).sin_cos();
        QubitState::from_bloch([c, s, 0.0])
    }

    /// Pure state at polar angle theta from +z and azimuth phi.
    pub fn pure(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        QubitState::from_bloch([st * cp, st * sp, ct])
    }

    pub fn antipode(&self) -> Self {
        QubitState::from_bloch(self.lambda.map(|v| -v))
    }

    pub fn purity_radius(&self) -> f64 {
        self.lambda.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn rho11(&self) -> f64 {
        0.5 * (1.0 + self.lambda[2])
    }

    pub fn rho00(&self) -> f64 {
        0.5 * (1.0 - self.lambda[2])
    }

    pub fn rho10(&self) -> Complex64 {
        Complex64::new(0.5 * self.lambda[0], -0.5 * self.lambda[1])
    }

    pub fn rho01(&self) -> Complex64 {
        self.rho10().conj()
    }

    pub fn density_matrix(&self) -> Mat2 {
        Mat2::new(
            Complex64::new(self.rho11(), 0.0),
            self.rho10(),
            self.rho01(),
            Complex64::new(self.rho00(), 0.0),
        )
    }

    /// Reads the Bloch vector off a density matrix, checking that it is
    /// Hermitian with unit trace.
    pub fn from_density_matrix(m: &Mat2) -> Result<Self> {
        let r = &m.0;
        let herm = (r[0][1] - r[1][0].conj()).norm()
            + r[0][0].im.abs()
            + r[1][1].im.abs();
        if herm > BLOCH_TOL {
            return Err(Error::param("rho", format!("not Hermitian (residual {herm:e})")));
        }
        let tr = (m.trace() - 1.0).norm();
        if tr > BLOCH_TOL {
            return Err(Error::param("rho", format!("trace differs from 1 by {tr:e}")));
        }
        let rho10 = r[0][1];
        QubitState::new(2.0 * rho10.re, -2.0 * rho10.im, r[0][0].re - r[1][1].re)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        0.5 * (1.0 - self.purity_radius())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poles_and_coherence_convention() {
        assert_eq!(QubitState::excited().rho11(), 1.0);
        assert_eq!(QubitState::ground().rho00(), 1.0);
        let s = QubitState::equatorial(1.2);
        let expect = Complex64::from_polar(0.5, -0.6);
        assert!((s.rho10() - expect).norm() < 1e-15);
    }

    #[test]
    fn density_matrix_round_trip() {
        let s = QubitState::new(0.3, -0.4, 0.5).unwrap();
        let m = s.density_matrix();
        let back = QubitState::from_density_matrix(&m).unwrap();
        for k in 0..3 {
            assert!((s.lambda[k] - back.lambda[k]).abs() < 1e-15);
        }
        // the Pauli expansion agrees with the entries
        let half = Complex64::new(0.5, 0.0);
        let expand = (Mat2::identity()
            + Mat2::sigma_x().scale(Complex64::new(0.3, 0.0))
            + Mat2::sigma_y().scale(Complex64::new(-0.4, 0.0))
            + Mat2::sigma_z().scale(Complex64::new(0.5, 0.0)))
        .scale(half);
        assert!((expand - m).max_abs() < 1e-15);
        let e = m.hermitian_eigenvalues();
        assert!((e[0] - s.min_eigenvalue()).abs() < 1e-15);
    }

    #[test]
    fn rejects_outside_ball() {
        assert!(QubitState::new(1.0, 1.0, 0.0).is_err());
        assert!(QubitState::new(f64::NAN, 0.0, 0.0).is_err());
        assert!(QubitState::new(1.0 + 1e-12, 0.0, 0.0).is_ok());
    }
}
