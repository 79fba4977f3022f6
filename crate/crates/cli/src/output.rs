//! CSV emission.

use std::io::{self, Write};

use serde::Serialize;

use crate::config::RunConfig;
use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub version: String,
    pub config: RunConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub axis: Series,
    pub curves: Vec<Series>,
    pub metadata: Metadata,
}

impl SweepResult {
    pub fn new(axis: Series, curves: Vec<Series>, config: &RunConfig) -> Result<Self, CliError> {
        for c in &curves {
            if c.values.len() != axis.values.len() {
                return Err(CliError::Internal(format!(
                    "curve {} has {} values, axis {} has {}",
                    c.name,
                    c.values.len(),
                    axis.name,
                    axis.values.len()
                )));
            }
        }
        Ok(SweepResult {
            axis,
            curves,
            metadata: Metadata {
                version: VERSION.to_string(),
                config: config.clone(),
            },
        })
    }

    pub fn curve(&self, name: &str) -> Option<&[f64]> {
        self.curves
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.values.as_slice())
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        write_header(&mut w, &self.metadata.config)?;
        let names: Vec<&str> = std::iter::once(self.axis.name.as_str())
            .chain(self.curves.iter().map(|c| c.name.as_str()))
            .collect();
        writeln!(w, "{}", names.join(","))?;
        for (i, x) in self.axis.values.iter().enumerate() {
            write!(w, "{}", num(*x))?;
            for c in &self.curves {
                write!(w, ",{}", num(c.values[i]))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// `#` lines: artifact version, command, parameter echo.
pub fn write_header<W: Write>(w: &mut W, config: &RunConfig) -> io::Result<()> {
    writeln!(w, "# lzslab {VERSION}")?;
    writeln!(w, "# command: {}", config.job.name())?;
    writeln!(w, "# config: {}", config.to_compact_json())
}

/// 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}
