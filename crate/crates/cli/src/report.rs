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


//! Report rows and their JSON and plain-text renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_rational::BigRational;
use qacz::dist::to_f64;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
}

/// A compared value: an exact rational when one exists, and a float for display.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub exact: Option<String>,
    pub approx: Option<f64>,
}

impl Quantity {
    pub fn rational(r: &BigRational) -> Quantity {
        Quantity { exact: Some(r.to_string()), approx: Some(to_f64(r)) }
    }

    pub fn float(x: f64) -> Quantity {
        Quantity { exact: None, approx: Some(x) }
    }

    pub fn int(x: usize) -> Quantity {
        Quantity { exact: Some(x.to_string()), approx: Some(x as f64) }
    }

    pub fn text(s: impl Into<String>) -> Quantity {
        Quantity { exact: Some(s.into()), approx: None }
    }

    fn show(&self) -> String {
        match (&self.exact, self.approx) {
            (Some(e), Some(a)) if e.contains('/') => format!("{e} (≈{a:.6})"),
            (Some(e), _) => e.clone(),
            (None, Some(a)) => format!("{a:.12}"),
            (None, None) => "-".into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Verdict {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

/// One checked relation `lhs relation rhs` at one parameter point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClaimVerdict {
    pub id: String,
    pub params: BTreeMap<String, Value>,
    pub lhs: Quantity,
    pub relation: String,
    pub rhs: Quantity,
    pub verdict: Verdict,
    /// Wall time, only recorded when timings are requested.
    pub seconds: Option<f64>,
}

impl ClaimVerdict {
    pub fn new(id: &str, params: BTreeMap<String, Value>, lhs: Quantity, relation: &str, rhs: Quantity, ok: bool) -> Self {
        ClaimVerdict {
            id: id.to_string(),
            params,
            lhs,
            relation: relation.to_string(),
            rhs,
            verdict: Verdict::from_bool(ok),
            seconds: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }

    pub fn params_text(&self) -> String {
        self.params.iter().map(|(k, v)| format!("{k}={}", compact(v))).collect::<Vec<_>>().join(" ")
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Builds a parameter map from `(name, value)` pairs.
#[macro_export]
macro_rules! params {
    ($($k:literal => $v:expr),* $(,)?) => {{
        #[allow(unused_mut)]
        let mut m = std::collections::BTreeMap::<String, serde_json::Value>::new();
        $( m.insert($k.to_string(), serde_json::json!($v)); )*
        m
    }};
}

/// Plain-text table, one row per verdict.
pub fn table(rows: &[ClaimVerdict]) -> String {
    let mut out = String::new();
    for r in rows {
        let time = r.seconds.map(|s| format!("  {s:.3}s")).unwrap_or_default();
        let _ = writeln!(
            out,
            "{:<4} {:<28} {:<36} {} {} {}{}",
            if r.passed() { "ok" } else { "FAIL" },
            r.id,
            r.params_text(),
            r.lhs.show(),
            r.relation,
            r.rhs.show(),
            time
        );
    }
    out
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports always serialize");
    s.push('\n');
    s
}

pub fn write_file(path: &Path, contents: &[u8]) -> Result<(), ReportError> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(|source| ReportError::Write { path: dir.to_path_buf(), source })?;
        }
    }
    std::fs::write(path, contents).map_err(|source| ReportError::Write { path: path.to_path_buf(), source })
}

pub fn read_file(path: &Path) -> Result<Vec<u8>, ReportError> {
    std::fs::read(path).map_err(|source| ReportError::Read { path: path.to_path_buf(), source })
}
