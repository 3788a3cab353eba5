//! Run configuration: defaults, then a `key = value` file, then flags.

use std::path::Path;

use twoboson::determinants::ScanConfig;
use twoboson::lattice::{CouplingTriple, Quasimomentum};
use twoboson::verify::VerifyConfig;
use twoboson::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub gamma: Option<f64>,
    pub lambda: Option<f64>,
    pub mu: Option<f64>,
    pub k: Option<(f64, f64)>,
    /// Oracle grid L.
    pub grid: usize,
    /// Oracle grid for the quasimomentum checks of `verify`.
    pub theorem_grid: usize,
    pub scan: ScanConfig,
    pub threads: Option<usize>,
    pub format: Format,
    pub seed: u64,
    pub samples_per_component: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let v = VerifyConfig::default();
        Self {
            gamma: None,
            lambda: None,
            mu: None,
            k: None,
            grid: v.comparison_grid,
            theorem_grid: v.theorem_grid,
            scan: v.scan,
            threads: None,
            format: Format::Csv,
            seed: v.seed,
            samples_per_component: v.samples_per_component,
        }
    }
}

fn bad(key: &str, value: &str) -> Error {
    Error::Config(format!("cannot parse `{value}` for `{key}`"))
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| bad(key, value))
}

/// Parses `kx,ky`.
pub fn parse_pair(value: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = value.split_once(',').ok_or_else(|| format!("expected two comma-separated numbers, got `{value}`"))?;
    let parse = |s: &str| s.trim().parse::<f64>().map_err(|_| format!("`{s}` is not a number"));
    Ok((parse(a)?, parse(b)?))
}

impl RunConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let q = &mut self.scan.quadrature;
        match key {
            "gamma" | "g" => self.gamma = Some(num(key, value)?),
            "lambda" | "l" => self.lambda = Some(num(key, value)?),
            "mu" | "u" => self.mu = Some(num(key, value)?),
            "k" | "K" => self.k = Some(parse_pair(value).map_err(Error::Config)?),
            "grid" => self.grid = num(key, value)?,
            "theorem_grid" => self.theorem_grid = num(key, value)?,
            "tol" | "rel_tol" => q.rel_tol = num(key, value)?,
            "initial_points" => q.initial_points = num(key, value)?,
            "max_doublings" => q.max_doublings = num(key, value)?,
            "edge_offset" => self.scan.edge_offset = num(key, value)?,
            "initial_step" => self.scan.initial_step = num(key, value)?,
            "growth" => self.scan.growth = num(key, value)?,
            "bisect_tol" => self.scan.bisect_tol = num(key, value)?,
            "proximity" => self.scan.proximity = num(key, value)?,
            "direct_greens" => self.scan.direct_greens = num(key, value)?,
            "threads" => self.threads = Some(num(key, value)?),
            "seed" => self.seed = num(key, value)?,
            "samples_per_component" => self.samples_per_component = num(key, value)?,
            "format" => {
                self.format = match value {
                    "csv" => Format::Csv,
                    "json" => Format::Json,
                    _ => return Err(bad(key, value)),
                }
            }
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Reads `key = value` lines; blank lines and `#` comments are skipped.
    pub fn load(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", n + 1)))?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    pub fn load_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        self.load(&text)
    }

    pub fn couplings(&self) -> Result<CouplingTriple> {
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| Error::Config(format!("missing coupling -{name}")))
        };
        CouplingTriple::new(need(self.gamma, "g")?, need(self.lambda, "l")?, need(self.mu, "u")?)
    }

    pub fn quasimomentum(&self) -> Quasimomentum {
        let (a, b) = self.k.unwrap_or((0.0, 0.0));
        Quasimomentum::new(a, b)
    }

    pub fn verify_config(&self) -> VerifyConfig {
        VerifyConfig {
            seed: self.seed,
            quadrature: self.scan.quadrature,
            scan: self.scan,
            comparison_grid: self.grid,
            theorem_grid: self.theorem_grid,
            samples_per_component: self.samples_per_component,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.verify_config().validate()?;
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be positive".into()));
        }
        Ok(())
    }
}
