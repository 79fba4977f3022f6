//! Run configurations and their JSON form.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use lzslab::twolevel::Basis;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub job: Job,
    /// Primary output file, relative to the output root unless absolute.
    pub output_path: PathBuf,
    #[serde(flatten, skip_serializing)]
    unknown: BTreeMap<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", content = "parameters", rename_all = "kebab-case")]
pub enum Job {
    LzPopulations(LzPopulations),
    LzsSweep(LzsSweep),
    Waveguide(Waveguide),
    Selftest(Selftest),
}

impl Job {
    pub fn name(&self) -> &'static str {
        match self {
            Job::LzPopulations(_) => "lz-populations",
            Job::LzsSweep(_) => "lzs-sweep",
            Job::Waveguide(_) => "waveguide",
            Job::Selftest(_) => "selftest",
        }
    }
}

/// Populations of the generic two-level sweep against z_a = √F·T, one
/// curve pair per δ′.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LzPopulations {
    pub delta: f64,
    pub delta_primes: Vec<f64>,
    pub z_min: f64,
    pub z_max: f64,
    pub points: usize,
    #[serde(default = "adiabatic")]
    pub basis: Basis,
    /// Logarithmic spacing of the z_a grid.
    #[serde(default)]
    pub log_grid: bool,
}

fn adiabatic() -> Basis {
    Basis::Adiabatic
}

/// Inclusive uniform grid of field strengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldGrid {
    pub e_min: f64,
    pub e_max: f64,
    pub points: usize,
}

impl FieldGrid {
    pub fn values(&self) -> Vec<f64> {
        linspace(self.e_min, self.e_max, self.points)
    }

    fn validate(&self) -> Result<(), CliError> {
        positive("e_min", self.e_min)?;
        positive("e_max", self.e_max)?;
        if self.e_max < self.e_min {
            return Err(CliError::Config(format!(
                "e_max = {} is below e_min = {}",
                self.e_max, self.e_min
            )));
        }
        at_least("points", self.points, 1)
    }
}

/// One Bloch period at k = 0 from the lower band, exact against
/// adiabatic-impulse, over a field grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LzsSweep {
    pub j: f64,
    pub alpha: f64,
    pub gamma: f64,
    #[serde(default = "unit")]
    pub d: f64,
    pub field: FieldGrid,
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Waveguide {
    pub j: f64,
    pub alpha: f64,
    pub gamma: f64,
    #[serde(default = "unit")]
    pub d: f64,
    pub sites: usize,
    /// Defaults to 40 sites in from the high-index end.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<f64>,
    /// Beam width, default 8d.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
    /// Single run: field strength. Ignored when `sweep` is set.
    #[serde(default = "default_field")]
    pub e_field: f64,
    /// Default one Bloch period.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_max: Option<f64>,
    /// Default 1/400 of a Bloch period.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_every: Option<f64>,
    /// Centre of mass after one Bloch period over a field grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<FieldGrid>,
}

fn default_field() -> f64 {
    0.05
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct Selftest {
    #[serde(default)]
    pub quick: bool,
}

impl RunConfig {
    pub fn new(job: Job, output_path: impl Into<PathBuf>) -> Self {
        RunConfig {
            job,
            output_path: output_path.into(),
            unknown: BTreeMap::new(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        if let Some(key) = cfg.unknown.keys().next() {
            return Err(CliError::Config(format!("unknown field `{key}`")));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    /// Single-line form for CSV headers.
    pub fn to_compact_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.output_path.as_os_str().is_empty() {
            return Err(CliError::Config("output_path is empty".into()));
        }
        match &self.job {
            Job::LzPopulations(p) => {
                finite("delta", p.delta)?;
                if p.delta_primes.is_empty() {
                    return Err(CliError::Config("delta_primes is empty".into()));
                }
                for &dp in &p.delta_primes {
                    finite("delta_primes", dp)?;
                }
                positive("z_min", p.z_min)?;
                positive("z_max", p.z_max)?;
                if p.z_max < p.z_min {
                    return Err(CliError::Config(format!(
                        "z_max = {} is below z_min = {}",
                        p.z_max, p.z_min
                    )));
                }
                at_least("points", p.points, 1)
            }
            Job::LzsSweep(p) => {
                positive("j", p.j)?;
                finite("alpha", p.alpha)?;
                finite("gamma", p.gamma)?;
                positive("d", p.d)?;
                p.field.validate()
            }
            Job::Waveguide(p) => {
                positive("j", p.j)?;
                finite("alpha", p.alpha)?;
                finite("gamma", p.gamma)?;
                positive("d", p.d)?;
                at_least("sites", p.sites, 4)?;
                if p.sites % 2 != 0 {
                    return Err(CliError::Config(format!(
                        "sites must be even, got {}",
                        p.sites
                    )));
                }
                for (name, v) in [
                    ("x0", p.x0),
                    ("l", p.l),
                    ("z_max", p.z_max),
                    ("sample_every", p.sample_every),
                ] {
                    if let Some(x) = v {
                        finite(name, x)?;
                    }
                }
                match &p.sweep {
                    Some(g) => g.validate(),
                    None => positive("e_field", p.e_field),
                }
            }
            Job::Selftest(_) => Ok(()),
        }
    }
}

/// Uniform grid including both ends; a single point sits at `a`.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

fn finite(name: &str, x: f64) -> Result<(), CliError> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} must be finite, got {x}")))
    }
}

fn positive(name: &str, x: f64) -> Result<(), CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} must be positive, got {x}")))
    }
}

fn at_least(name: &str, n: usize, min: usize) -> Result<(), CliError> {
    if n >= min {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} must be at least {min}, got {n}")))
    }
}
