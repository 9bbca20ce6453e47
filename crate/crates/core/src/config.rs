//! Flat `key = value` run configuration shared by all suites.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::weights::WeightParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Freq,
    Global31,
    Global21,
    Seminorm,
    Partition,
    Assembly,
    Calibrate,
}

impl Suite {
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "freq" => Suite::Freq,
            "global31" => Suite::Global31,
            "global21" => Suite::Global21,
            "seminorm" => Suite::Seminorm,
            "partition" => Suite::Partition,
            "assembly" => Suite::Assembly,
            "calibrate" => Suite::Calibrate,
            other => return Err(Error::Config(format!("unknown suite '{other}'"))),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Freq => "freq",
            Suite::Global31 => "global31",
            Suite::Global21 => "global21",
            Suite::Seminorm => "seminorm",
            Suite::Partition => "partition",
            Suite::Assembly => "assembly",
            Suite::Calibrate => "calibrate",
        }
    }
}

/// Full run configuration. Every key has a desk-scale default so a config
/// file only needs to list overrides.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub field: String,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub jobs: Option<usize>,
    pub params: WeightParams,
    /// x grid: `grid_x` nodes on [−x_half, x_half].
    pub grid_x: usize,
    pub x_half: f64,
    /// y grid: `grid_y` cells per half-line, half-width `y_half`.
    pub grid_y: usize,
    pub y_half: f64,
    pub ensemble: usize,
    pub tau_list: Vec<f64>,
    pub xi_list: Vec<f64>,
    pub eps_list: Vec<f64>,
    pub delta_list: Vec<f64>,
    pub mu_list: Vec<f64>,
    pub support_x: f64,
    pub support_y: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            field: "identity".into(),
            seed: 1,
            out_dir: PathBuf::from("out"),
            jobs: None,
            params: WeightParams::defaults(1),
            grid_x: 512,
            x_half: 4.0,
            grid_y: 128,
            y_half: 1.0,
            ensemble: 8,
            tau_list: vec![16.0, 32.0, 64.0],
            xi_list: vec![0.5, 2.0, 8.0, 32.0],
            eps_list: vec![0.1],
            delta_list: vec![0.05, 0.1],
            mu_list: vec![4.0, 8.0, 16.0],
            support_x: 0.5,
            support_y: 0.1,
        }
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse()
        .map_err(|_| Error::Config(format!("key '{key}': expected a number, got '{v}'")))
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.trim()
        .parse()
        .map_err(|_| Error::Config(format!("key '{key}': expected an integer, got '{v}'")))
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    let items: Vec<&str> = v
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if items.is_empty() {
        return Err(Error::Config(format!("key '{key}': empty sweep list")));
    }
    items.iter().map(|s| parse_f64(key, s)).collect()
}

impl RunConfig {
    /// Parse a flat key=value file on top of the defaults. Lines starting
    /// with `#` and blank lines are ignored; unknown keys are errors.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_str(&text)
    }

    pub fn from_str(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let mut seen = BTreeSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key = value", lineno + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            if !seen.insert(key.to_string()) {
                return Err(Error::Config(format!("duplicate key '{key}'")));
            }
            cfg.apply(key, value)?;
        }
        Ok(cfg)
    }

    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "field" => self.field = value.to_string(),
            "seed" => {
                self.seed = value
                    .parse()
                    .map_err(|_| Error::Config(format!("bad seed '{value}'")))?
            }
            "out" => self.out_dir = PathBuf::from(value),
            "jobs" => self.jobs = Some(parse_usize(key, value)?),
            "grid_x" => self.grid_x = parse_usize(key, value)?,
            "grid_y" => self.grid_y = parse_usize(key, value)?,
            "x_half" => self.x_half = parse_f64(key, value)?,
            "y_half" => self.y_half = parse_f64(key, value)?,
            "ensemble" => self.ensemble = parse_usize(key, value)?,
            "support_x" => self.support_x = parse_f64(key, value)?,
            "support_y" => self.support_y = parse_f64(key, value)?,
            "tau_list" => self.tau_list = parse_list(key, value)?,
            "xi_list" => self.xi_list = parse_list(key, value)?,
            "eps_list" => self.eps_list = parse_list(key, value)?,
            "delta_list" => self.delta_list = parse_list(key, value)?,
            "mu_list" => self.mu_list = parse_list(key, value)?,
            "alpha_plus" => self.params.alpha_plus = parse_f64(key, value)?,
            "alpha_minus" => self.params.alpha_minus = parse_f64(key, value)?,
            "beta" => self.params.beta = parse_f64(key, value)?,
            "s" => self.params.s = parse_f64(key, value)?,
            "s0" => self.params.s0 = parse_f64(key, value)?,
            "epsilon" => self.params.epsilon = parse_f64(key, value)?,
            "delta" => self.params.delta = parse_f64(key, value)?,
            "tau" => self.params.tau = parse_f64(key, value)?,
            "tau0" => self.params.tau0 = parse_f64(key, value)?,
            "r0" => self.params.r0 = parse_f64(key, value)?,
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid_x < 8 || self.grid_y < 8 {
            return Err(Error::Config("grids need at least 8 nodes per axis".into()));
        }
        if self.ensemble == 0 {
            return Err(Error::Config("ensemble size must be positive".into()));
        }
        if self.tau_list.is_empty()
            || self.xi_list.is_empty()
            || self.eps_list.is_empty()
            || self.delta_list.is_empty()
            || self.mu_list.is_empty()
        {
            return Err(Error::Config("empty sweep list".into()));
        }
        Ok(())
    }
}
