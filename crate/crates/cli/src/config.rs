// Copyright 2026 The qacz Developers
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not use this file except
// in compliance with the License. You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License
// is distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express
// or implied. See the License for the specific language governing permissions and limitations under
// the License.


use std::path::PathBuf;

use thiserror::Error;

/// Default fidelity slack for simulation checks.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Environment variable consulted for the worker count.
pub const WORKERS_ENV: &str = "QACZ_WORKERS";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("grid axis `{0}` is empty")]
    EmptyAxis(String),
    #[error("cannot parse grid spec `{spec}`: {why}")]
    Grid { spec: String, why: String },
    #[error("tolerance must be positive, got {0}")]
    Tolerance(f64),
    #[error("worker count must be at least 1")]
    Workers,
    #[error("unknown fault `{0}`")]
    Fault(String),
}

/// Parameter axes for the claim sweep. `ell` defaults to `k³` at each point.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub m: Vec<usize>,
    pub k: Vec<usize>,
    pub ell: Option<Vec<usize>>,
}

impl Default for Grid {
    fn default() -> Grid {
        Grid { m: (1..=64).collect(), k: (1..=6).collect(), ell: None }
    }
}

fn parse_axis(spec: &str, text: &str) -> Result<Vec<usize>, ConfigError> {
    let bad = |why: &str| ConfigError::Grid { spec: spec.to_string(), why: why.to_string() };
    let mut out = Vec::new();
    for part in text.split('|').filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let a: usize = a.trim().parse().map_err(|_| bad("range start is not a number"))?;
            let b: usize = b.trim().parse().map_err(|_| bad("range end is not a number"))?;
            out.extend(a..=b);
        } else {
            out.push(part.trim().parse().map_err(|_| bad("value is not a number"))?);
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

impl Grid {
    /// Parses `m=1..16,k=1|2|3,ell=8..27`. Omitted axes keep their defaults.
    pub fn parse(spec: &str) -> Result<Grid, ConfigError> {
        let mut grid = Grid::default();
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, values) = item
                .split_once('=')
                .ok_or_else(|| ConfigError::Grid { spec: spec.to_string(), why: format!("`{item}` has no `=`") })?;
            let values = parse_axis(spec, values)?;
            match key.trim() {
                "m" => grid.m = values,
                "k" => grid.k = values,
                "ell" => grid.ell = Some(values),
                other => {
                    return Err(ConfigError::Grid { spec: spec.to_string(), why: format!("unknown axis `{other}`") })
                }
            }
        }
        Ok(grid)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.m.is_empty() {
            return Err(ConfigError::EmptyAxis("m".into()));
        }
        if self.k.is_empty() {
            return Err(ConfigError::EmptyAxis("k".into()));
        }
        if matches!(&self.ell, Some(l) if l.is_empty()) {
            return Err(ConfigError::EmptyAxis("ell".into()));
        }
        Ok(())
    }

    /// Bucket counts to use with weight cap `k`.
    pub fn ells(&self, k: usize) -> Vec<usize> {
        match &self.ell {
            Some(l) => l.clone(),
            None => vec![k.pow(3)],
        }
    }
}

/// Deliberate defects used as negative controls for the sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Adds one to the damped-binomial normalizer before checking its bounds.
    LambdaOffByOne,
}

impl std::str::FromStr for Fault {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Fault, ConfigError> {
        match s {
            "lambda" | "lambda-off-by-one" => Ok(Fault::LambdaOffByOne),
            other => Err(ConfigError::Fault(other.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub grid: Grid,
    pub tol: f64,
    pub workers: usize,
    pub out: Option<PathBuf>,
    /// Keep only rows whose id (or criterion number) matches.
    pub only: Option<String>,
    pub timings: bool,
    pub fault: Option<Fault>,
}

impl Default for SweepConfig {
    fn default() -> SweepConfig {
        SweepConfig { grid: Grid::default(), tol: DEFAULT_TOL, workers: 1, out: None, only: None, timings: false, fault: None }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.grid.validate()?;
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(ConfigError::Tolerance(self.tol));
        }
        if self.workers == 0 {
            return Err(ConfigError::Workers);
        }
        Ok(())
    }

    /// Worker count from the environment, falling back to one.
    pub fn workers_from_env() -> usize {
        std::env::var(WORKERS_ENV).ok().and_then(|v| v.parse().ok()).filter(|&w| w > 0).unwrap_or(1)
    }
}
