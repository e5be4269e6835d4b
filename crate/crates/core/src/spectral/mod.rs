//! Spectral densities and the time-dependent master-equation coefficients.

mod coeffs;
mod correlation;
mod kernel;
mod lorentzian;
mod quadrature;

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use coeffs::{Asymptotics, CoefficientSet, Coefficients, Timescales, COEFF_CSV_HEADER};
pub use correlation::correlation;
pub use kernel::{gi_kernel, gi_kernel_direct, gi_kernel_near_resonance, GI_SERIES_BAND};
pub use quadrature::{
    coeff_f, coeff_g, coeff_h, quadrature_coefficients, Domain, QuadCoefficients, QuadOptions,
};

/// Which of the two counter-rotating shifts a rate carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// Piecewise-linear spectral density sampled on `omega >= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralTable {
    omega: Vec<f64>,
    j: Vec<f64>,
}

impl SpectralTable {
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidTable(format!(
                "need at least two samples, got {}",
                samples.len()
            )));
        }
        let (omega, j): (Vec<f64>, Vec<f64>) = samples.into_iter().unzip();
        if omega[0] != 0.0 {
            return Err(Error::InvalidTable(format!(
                "first frequency must be 0, got {}",
                omega[0]
            )));
        }
        for (k, w) in omega.windows(2).enumerate() {
            if !(w[1] > w[0]) || !w[1].is_finite() {
                return Err(Error::InvalidTable(format!(
                    "frequencies must be finite and strictly increasing (row {})",
                    k + 2
                )));
            }
        }
        if let Some(k) = j.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidTable(format!(
                "J must be finite and non-negative (row {}, value {})",
                k + 1,
                j[k]
            )));
        }
        Ok(SpectralTable { omega, j })
    }

    /// Reads two whitespace- or comma-separated columns; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut samples = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            if cols.len() != 2 {
                return Err(Error::InvalidTable(format!(
                    "line {}: expected two columns, found {}",
                    n + 1,
                    cols.len()
                )));
            }
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|_| {
                    Error::InvalidTable(format!("line {}: cannot parse `{}`", n + 1, s))
                })
            };
            samples.push((parse(cols[0])?, parse(cols[1])?));
        }
        SpectralTable::new(samples)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.omega
    }

    pub fn values(&self) -> &[f64] {
        &self.j
    }

    pub fn max_frequency(&self) -> f64 {
        *self.omega.last().unwrap()
    }

    pub fn eval(&self, w: f64) -> f64 {
        if w < 0.0 || w > self.max_frequency() {
            return 0.0;
        }
        let k = self.omega.partition_point(|&x| x <= w);
        if k >= self.omega.len() {
            return *self.j.last().unwrap();
        }
        let (w0, w1) = (self.omega[k - 1], self.omega[k]);
        let (j0, j1) = (self.j[k - 1], self.j[k]);
        j0 + (j1 - j0) * (w - w0) / (w1 - w0)
    }
}

/// Environment spectral density J(omega).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum SpectralModel {
    Lorentzian {
        alpha: f64,
        lambda: f64,
        delta: f64,
    },
    Ohmic {
        alpha: f64,
        omega_c: f64,
    },
    Tabulated {
        table: SpectralTable,
        tau_c: f64,
    },
}

/// The spectral family without parameters, for command-line parsing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Lorentzian,
    Ohmic,
    Tabulated,
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lorentzian" => Ok(Family::Lorentzian),
            "ohmic" => Ok(Family::Ohmic),
            "table" | "tabulated" => Ok(Family::Tabulated),
            _ => Err(Error::Unknown {
                kind: "spectral family",
                value: s.to_string(),
            }),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Lorentzian => "lorentzian",
            Family::Ohmic => "ohmic",
            Family::Tabulated => "tabulated",
        })
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be finite and > 0, got {v}")))
    }
}

impl SpectralModel {
    pub fn lorentzian(alpha: f64, lambda: f64, delta: f64) -> Result<Self> {
        positive("alpha", alpha)?;
        positive("lambda", lambda)?;
        if !delta.is_finite() {
            return Err(Error::param("delta", "must be finite"));
        }
        Ok(SpectralModel::Lorentzian {
            alpha,
            lambda,
            delta,
        })
    }

    pub fn ohmic(alpha: f64, omega_c: f64) -> Result<Self> {
        positive("alpha", alpha)?;
        positive("omega_c", omega_c)?;
        Ok(SpectralModel::Ohmic { alpha, omega_c })
    }

    pub fn tabulated(table: SpectralTable, tau_c: f64) -> Result<Self> {
        positive("tau_c", tau_c)?;
        Ok(SpectralModel::Tabulated { table, tau_c })
    }

    /// Re-checks invariants, for models built by hand or deserialized.
    pub fn validate(&self) -> Result<()> {
        match self {
            SpectralModel::Lorentzian {
                alpha,
                lambda,
                delta,
            } => Self::lorentzian(*alpha, *lambda, *delta).map(|_| ()),
            SpectralModel::Ohmic { alpha, omega_c } => Self::ohmic(*alpha, *omega_c).map(|_| ()),
            SpectralModel::Tabulated { table, tau_c } => {
                SpectralTable::new(table.omega.iter().copied().zip(table.j.iter().copied()).collect())?;
                positive("tau_c", *tau_c)
            }
        }
    }

    pub fn family(&self) -> Family {
        match self {
            SpectralModel::Lorentzian { .. } => Family::Lorentzian,
            SpectralModel::Ohmic { .. } => Family::Ohmic,
            SpectralModel::Tabulated { .. } => Family::Tabulated,
        }
    }

    /// J(omega). The Lorentzian is defined on the whole real axis; the
    /// other families vanish for omega < 0.
    pub fn j(&self, w: f64) -> f64 {
        match self {
            SpectralModel::Lorentzian {
                alpha,
                lambda,
                delta,
            } => {
                let x = w - (crate::OMEGA_A - delta);
                alpha / (2.0 * PI) * lambda * lambda / (x * x + lambda * lambda)
            }
            SpectralModel::Ohmic { alpha, omega_c } => {
                if w <= 0.0 {
                    0.0
                } else {
                    alpha / PI * w * omega_c * omega_c / (w * w + omega_c * omega_c)
                }
            }
            SpectralModel::Tabulated { table, .. } => table.eval(w),
        }
    }

    /// J(omega) with the domain check of the public operation.
    pub fn density(&self, w: f64) -> Result<f64> {
        if !w.is_finite() {
            return Err(Error::param("omega", "must be finite"));
        }
        if w < 0.0 && !matches!(self, SpectralModel::Lorentzian { .. }) {
            return Err(Error::param(
                "omega",
                format!("{} density is defined for omega >= 0", self.family()),
            ));
        }
        Ok(self.j(w))
    }

    pub fn alpha(&self) -> Option<f64> {
        match self {
            SpectralModel::Lorentzian { alpha, .. } | SpectralModel::Ohmic { alpha, .. } => {
                Some(*alpha)
            }
            SpectralModel::Tabulated { .. } => None,
        }
    }

    /// Environment correlation time.
    pub fn tau_c(&self) -> f64 {
        match self {
            SpectralModel::Lorentzian { lambda, .. } => 1.0 / lambda,
            SpectralModel::Ohmic { omega_c, .. } => 1.0 / omega_c,
            SpectralModel::Tabulated { tau_c, .. } => *tau_c,
        }
    }

    /// False when the Lorentzian peak sits within five widths of zero
    /// frequency, where extending the integrals to negative frequencies
    /// is no longer a good approximation. Always true for other families.
    pub fn extension_reliable(&self) -> bool {
        match self {
            SpectralModel::Lorentzian { lambda, delta, .. } => {
                (crate::OMEGA_A - delta) / lambda >= 5.0
            }
            _ => true,
        }
    }

    /// Same family with the coupling multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        positive("factor", factor)?;
        Ok(match self {
            SpectralModel::Lorentzian {
                alpha,
                lambda,
                delta,
            } => SpectralModel::Lorentzian {
                alpha: alpha * factor,
                lambda: *lambda,
                delta: *delta,
            },
            SpectralModel::Ohmic { alpha, omega_c } => SpectralModel::Ohmic {
                alpha: alpha * factor,
                omega_c: *omega_c,
            },
            SpectralModel::Tabulated { table, tau_c } => SpectralModel::Tabulated {
                table: SpectralTable {
                    omega: table.omega.clone(),
                    j: table.j.iter().map(|v| v * factor).collect(),
                },
                tau_c: *tau_c,
            },
        })
    }
}

impl fmt::Display for SpectralModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectralModel::Lorentzian {
                alpha,
                lambda,
                delta,
            } => write!(f, "lorentzian(alpha={alpha}, lambda={lambda}, delta={delta})"),
            SpectralModel::Ohmic { alpha, omega_c } => {
                write!(f, "ohmic(alpha={alpha}, omega_c={omega_c})")
            }
            SpectralModel::Tabulated { table, tau_c } => write!(
                f,
                "tabulated({} samples up to {}, tau_c={tau_c})",
                table.omega.len(),
                table.max_frequency()
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lorentzian_peak_and_offpeak() {
        let m = SpectralModel::lorentzian(0.01, 0.1, -0.9).unwrap();
        assert!((m.density(1.9).unwrap() - 0.01 / (2.0 * PI)).abs() < 1e-15);
        let expect = 0.01 / (2.0 * PI) * (0.01 / 0.82);
        assert!((m.density(1.0).unwrap() - expect).abs() < 1e-16);
        assert!(m.density(-3.0).unwrap() > 0.0);
    }

    #[test]
    fn ohmic_vanishes_at_zero_and_rejects_negative() {
        let m = SpectralModel::ohmic(0.01, 1.0).unwrap();
        assert_eq!(m.density(0.0).unwrap(), 0.0);
        assert!(m.density(-1.0).is_err());
        assert!((m.density(1.0).unwrap() - 0.01 / (2.0 * PI)).abs() < 1e-16);
    }

    #[test]
    fn invalid_parameters_name_the_field() {
        match SpectralModel::lorentzian(0.01, 0.0, 0.0) {
            Err(Error::InvalidParameter { name, .. }) => assert_eq!(name, "lambda"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(SpectralModel::ohmic(-1.0, 1.0).is_err());
        assert!(SpectralModel::ohmic(1.0, f64::NAN).is_err());
    }

    #[test]
    fn table_interpolates_and_vanishes_outside() {
        let t = SpectralTable::parse("# w J\n0 0\n1, 2\n3 0 # tail\n").unwrap();
        assert_eq!(t.eval(0.5), 1.0);
        assert_eq!(t.eval(2.0), 1.0);
        assert_eq!(t.eval(1.0), 2.0);
        assert_eq!(t.eval(3.5), 0.0);
        assert_eq!(t.eval(-0.1), 0.0);
    }

    #[test]
    fn table_validation() {
        assert!(SpectralTable::parse("").is_err());
        assert!(SpectralTable::parse("0 1").is_err());
        assert!(SpectralTable::parse("0.1 0\n1 1").is_err());
        assert!(SpectralTable::parse("0 0\n1 -1").is_err());
        assert!(SpectralTable::parse("0 0\n1 1\n1 2").is_err());
        assert!(SpectralTable::parse("0 0\n1 1 3").is_err());
        assert!(SpectralTable::parse("0 0\nx 1").is_err());
    }

    #[test]
    fn family_parsing() {
        assert_eq!("Ohmic".parse::<Family>().unwrap(), Family::Ohmic);
        assert!(matches!(
            "gaussian".parse::<Family>(),
            Err(Error::Unknown { .. })
        ));
    }

    #[test]
    fn extension_flag() {
        assert!(SpectralModel::lorentzian(0.01, 0.1, -0.9)
            .unwrap()
            .extension_reliable());
        assert!(!SpectralModel::lorentzian(0.01, 0.1, 0.6)
            .unwrap()
            .extension_reliable());
    }
}
