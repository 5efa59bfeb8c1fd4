//! Run configuration: defaults, an optional flat `key = value` file, and
//! command-line overrides, applied in that order.

use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::QuadratureConfig;
use crate::roots::Bisection;

/// Environment variable naming the config file.
pub const CONFIG_ENV: &str = "HARDY_MEANS_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::Parse(format!("unknown output format '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub quad: QuadratureConfig,
    pub root_tol: f64,
    pub root_max_iter: usize,
    /// Default horizon `s` for Hardy evaluations and function families.
    pub horizon: f64,
    /// Envelope schedule for `imean --method envelope`.
    pub grid_sizes: Vec<usize>,
    /// Default number of cells for the Hardy functional.
    pub hardy_grid: usize,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        let root = Bisection::default();
        RunConfig {
            quad: QuadratureConfig::default(),
            root_tol: root.tol,
            root_max_iter: root.max_iter,
            horizon: 1.0,
            grid_sizes: crate::integral_means::doubling_schedule(1024),
            hardy_grid: 256,
            format: OutputFormat::Csv,
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Parse(format!("invalid value '{value}' for '{key}'")))
}

impl RunConfig {
    pub fn bisection(&self) -> Bisection {
        Bisection {
            tol: self.root_tol,
            max_iter: self.root_max_iter,
        }
    }

    /// Sets one key; unknown keys are rejected.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "quad_tol" => self.quad.tol = parse_value(key, value)?,
            "quad_max_depth" => self.quad.max_depth = parse_value(key, value)?,
            "quad_grading_ratio" => self.quad.grading_ratio = parse_value(key, value)?,
            "root_tol" => self.root_tol = parse_value(key, value)?,
            "root_max_iter" => self.root_max_iter = parse_value(key, value)?,
            "horizon" => self.horizon = parse_value(key, value)?,
            "grid_sizes" => {
                self.grid_sizes = value
                    .split(',')
                    .map(|v| parse_value(key, v.trim()))
                    .collect::<Result<_>>()?
            }
            "hardy_grid" => self.hardy_grid = parse_value(key, value)?,
            "format" => self.format = value.parse()?,
            _ => return Err(Error::Parse(format!("unknown config key '{key}'"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_str(&mut self, text: &str) -> Result<()> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", n + 1)))?;
            self.set(key.trim(), value.trim())
                .map_err(|e| Error::Parse(format!("line {}: {e}", n + 1)))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        self.apply_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.quad.validate()?;
        if !(self.root_tol > 0.0) || self.root_max_iter == 0 {
            return Err(Error::Argument(
                "root finder needs tol > 0 and max_iter ≥ 1".into(),
            ));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::Argument(format!(
                "horizon must be positive, got {}",
                self.horizon
            )));
        }
        if self.grid_sizes.is_empty() || self.grid_sizes.contains(&0) || self.hardy_grid == 0 {
            return Err(Error::Argument("grid sizes must be at least 1".into()));
        }
        Ok(())
    }
}
