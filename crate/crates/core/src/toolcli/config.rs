use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynamics::Engine;
use crate::error::{Error, Result};
use crate::spectral::{Family, SpectralModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Delta,
    OmegaC,
    Alpha,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Delta => "delta",
            SweepParam::OmegaC => "omega_c",
            SweepParam::Alpha => "alpha",
        }
    }
}

impl FromStr for SweepParam {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "delta" => Ok(SweepParam::Delta),
            "omega_c" => Ok(SweepParam::OmegaC),
            "alpha" => Ok(SweepParam::Alpha),
            _ => Err(Error::Unknown {
                kind: "sweep parameter",
                value: s.to_string(),
            }),
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

/// A validated parameter sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub family: Family,
    pub param: SweepParam,
    pub range: [f64; 2],
    pub points: usize,
    pub spacing: Spacing,
    pub alpha: f64,
    pub lambda: Option<f64>,
    pub delta: Option<f64>,
    pub omega_c: Option<f64>,
    pub engines: Vec<Engine>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub seed: u64,
    /// Measure horizon in relaxation times.
    pub horizon: f64,
    /// Log-spaced CPT check times per point; 0 skips the check.
    pub cpt_times: usize,
}

impl SweepSpec {
    /// Lorentzian detuning sweep with the given fixed width.
    pub fn lorentzian_delta(alpha: f64, lambda: f64, range: [f64; 2], points: usize) -> Self {
        SweepSpec {
            family: Family::Lorentzian,
            param: SweepParam::Delta,
            range,
            points,
            spacing: Spacing::Linear,
            alpha,
            lambda: Some(lambda),
            delta: None,
            omega_c: None,
            engines: vec![Engine::FullClosed, Engine::Rwa, Engine::Sa],
            out: None,
            workers: None,
            seed: 0,
            horizon: 10.0,
            cpt_times: 50,
        }
    }

    /// Ohmic cutoff sweep, log-spaced.
    pub fn ohmic_cutoff(alpha: f64, range: [f64; 2], points: usize) -> Self {
        SweepSpec {
            family: Family::Ohmic,
            param: SweepParam::OmegaC,
            spacing: Spacing::Log,
            lambda: None,
            ..SweepSpec::lorentzian_delta(alpha, 0.0, range, points)
        }
    }

    pub fn values(&self) -> Vec<f64> {
        let [a, b] = self.range;
        let n = self.points;
        (0..n)
            .map(|k| {
                let x = k as f64 / (n - 1) as f64;
                match self.spacing {
                    Spacing::Linear => a + (b - a) * x,
                    Spacing::Log => (a.ln() + (b.ln() - a.ln()) * x).exp(),
                }
            })
            .collect()
    }

    /// Model at one value of the swept parameter.
    pub fn model_at(&self, x: f64) -> Result<SpectralModel> {
        let alpha = if self.param == SweepParam::Alpha { x } else { self.alpha };
        match self.family {
            Family::Lorentzian => {
                let delta = if self.param == SweepParam::Delta { Some(x) } else { self.delta };
                SpectralModel::lorentzian(
                    alpha,
                    self.lambda.ok_or_else(|| Error::param("lambda", "required"))?,
                    delta.ok_or_else(|| Error::param("delta", "required"))?,
                )
            }
            Family::Ohmic => {
                let wc = if self.param == SweepParam::OmegaC { Some(x) } else { self.omega_c };
                SpectralModel::ohmic(alpha, wc.ok_or_else(|| Error::param("omega_c", "required"))?)
            }
            Family::Tabulated => Err(Error::param("family", "tabulated densities cannot be swept")),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let [a, b] = self.range;
        if !(a.is_finite() && b.is_finite()) || a == b {
            return Err(Error::param("range", format!("need two distinct finite ends, got [{a}, {b}]")));
        }
        if self.points < 2 {
            return Err(Error::param("points", "need at least 2"));
        }
        if self.spacing == Spacing::Log && !(a > 0.0 && b > 0.0) {
            return Err(Error::param("spacing", "log spacing needs a positive range"));
        }
        let allowed: &[SweepParam] = match self.family {
            Family::Lorentzian => &[SweepParam::Delta, SweepParam::Alpha],
            Family::Ohmic => &[SweepParam::OmegaC, SweepParam::Alpha],
            Family::Tabulated => &[],
        };
        if !allowed.contains(&self.param) {
            return Err(Error::param(
                "sweep",
                format!("`{}` cannot be swept for the {} family", self.param, self.family),
            ));
        }
        let foreign = match self.family {
            Family::Lorentzian => self.omega_c.map(|_| "omega_c"),
            _ => self.lambda.map(|_| "lambda").or(self.delta.map(|_| "delta")),
        };
        if let Some(name) = foreign {
            return Err(Error::param(name, format!("not a parameter of the {} family", self.family)));
        }
        let fixed_twice = match self.param {
            SweepParam::Delta => self.delta.is_some(),
            SweepParam::OmegaC => self.omega_c.is_some(),
            SweepParam::Alpha => false,
        };
        if fixed_twice {
            return Err(Error::param(self.param.name(), "is swept and cannot also be fixed"));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::param("horizon", "must be > 0"));
        }
        if self.engines.is_empty() {
            return Err(Error::param("engines", "list is empty"));
        }
        if self.workers == Some(0) {
            return Err(Error::param("workers", "must be at least 1"));
        }
        // every point must give a valid model
        for x in [a, b] {
            self.model_at(x)?;
        }
        Ok(())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    family: String,
    sweep: Option<String>,
    range: Option<[f64; 2]>,
    points: Option<usize>,
    spacing: Option<Spacing>,
    alpha: Option<f64>,
    lambda: Option<f64>,
    delta: Option<f64>,
    omega_c: Option<f64>,
    engines: Option<Vec<String>>,
    out: Option<PathBuf>,
    workers: Option<usize>,
    seed: Option<u64>,
    horizon: Option<f64>,
    cpt_times: Option<usize>,
}

/// Parses and validates a TOML sweep description.
///
/// Defaults: Lorentzian sweeps `delta` over [-1, 0.5] with lambda = 0.1,
/// Ohmic sweeps `omega_c` log-spaced over [0.2, 20]; 61 points,
/// alpha = 0.01, engines closed/rwa/sa, horizon 10 tau_r, seed 0 and 50
/// CPT times.
pub fn parse_config(text: &str) -> Result<SweepSpec> {
    let raw: RawSpec = toml::from_str(text).map_err(|e| {
        let line = e
            .span()
            .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
            .unwrap_or(0);
        Error::ConfigParse {
            line,
            message: e.message().to_string(),
        }
    })?;
    let family: Family = raw.family.parse()?;
    let param = match raw.sweep.as_deref() {
        Some(s) => s.parse()?,
        None if family == Family::Ohmic => SweepParam::OmegaC,
        None => SweepParam::Delta,
    };
    let (range, spacing) = match param {
        SweepParam::Delta => ([-1.0, 0.5], Spacing::Linear),
        SweepParam::OmegaC => ([0.2, 20.0], Spacing::Log),
        SweepParam::Alpha => ([0.005, 0.02], Spacing::Linear),
    };
    let lambda = match family {
        Family::Lorentzian => Some(raw.lambda.unwrap_or(0.1)),
        _ => raw.lambda,
    };
    if let Some(l) = lambda {
        if !(l > 0.0) {
            return Err(Error::param("lambda", format!("must be > 0, got {l}")));
        }
    }
    let engines = match raw.engines {
        Some(list) => list.iter().map(|s| s.parse()).collect::<Result<Vec<Engine>>>()?,
        None => vec![Engine::FullClosed, Engine::Rwa, Engine::Sa],
    };
    let spec = SweepSpec {
        family,
        param,
        range: raw.range.unwrap_or(range),
        points: raw.points.unwrap_or(61),
        spacing: raw.spacing.unwrap_or(spacing),
        alpha: raw.alpha.unwrap_or(0.01),
        lambda,
        delta: raw.delta,
        omega_c: raw.omega_c,
        engines,
        out: raw.out,
        workers: raw.workers,
        seed: raw.seed.unwrap_or(0),
        horizon: raw.horizon.unwrap_or(10.0),
        cpt_times: raw.cpt_times.unwrap_or(50),
    };
    spec.validate()?;
    Ok(spec)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<SweepSpec> {
    parse_config(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_takes_defaults() {
        let s = parse_config("family = \"lorentzian\"\n").unwrap();
        assert_eq!(s.param, SweepParam::Delta);
        assert_eq!(s.range, [-1.0, 0.5]);
        assert_eq!(s.points, 61);
        assert_eq!(s.lambda, Some(0.1));
        assert_eq!(s.alpha, 0.01);
        assert_eq!(s.engines.len(), 3);
        let v = s.values();
        assert_eq!(v[0], -1.0);
        assert_eq!(v[60], 0.5);
        let o = parse_config("family = \"ohmic\"").unwrap();
        assert_eq!(o.param, SweepParam::OmegaC);
        assert_eq!(o.spacing, Spacing::Log);
        assert!((o.values()[30] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn bad_lambda_is_named() {
        let e = parse_config("family = \"lorentzian\"\nlambda = 0.0\n").unwrap_err();
        assert!(matches!(e, Error::InvalidParameter { name: "lambda", .. }), "{e}");
    }

    #[test]
    fn cutoff_rejected_for_lorentzian() {
        let e = parse_config("family = \"lorentzian\"\nomega_c = 2.0\n").unwrap_err();
        assert!(matches!(e, Error::InvalidParameter { name: "omega_c", .. }), "{e}");
        let e = parse_config("family = \"ohmic\"\nsweep = \"delta\"\n").unwrap_err();
        assert!(matches!(e, Error::InvalidParameter { name: "sweep", .. }), "{e}");
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let e = parse_config("family = \"ohmic\"\npoints = 5\ncolour = \"red\"\n").unwrap_err();
        assert!(matches!(e, Error::ConfigParse { line: 3, .. }), "{e}");
        let e = parse_config("family = \"ohmic\"\n\npoints = = 5\n").unwrap_err();
        assert!(matches!(e, Error::ConfigParse { line: 3, .. }), "{e}");
        assert!(matches!(parse_config("family = \"cauchy\""), Err(Error::Unknown { .. })));
    }

    #[test]
    fn ranges_validated() {
        assert!(parse_config("family = \"ohmic\"\nrange = [0.0, 2.0]\n").is_err());
        assert!(parse_config("family = \"lorentzian\"\npoints = 1\n").is_err());
        assert!(parse_config("family = \"lorentzian\"\nengines = [\"warp\"]\n").is_err());
    }
}
