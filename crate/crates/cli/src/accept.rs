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


//! The acceptance suite: eight numbered criteria, each a list of verdict rows.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use num_complex::Complex64;
use qacz::ir::{AmpRecord, Weight, C64};
use qacz::prim::skeleton;
use qacz::synth::{build_dicke, build_symmetric, padding_keep_probability, SynthesisOutput};
use serde::{Deserialize, Serialize};

use crate::certify::certification_rows;
use crate::claims::{run_claims, SweepError};
use crate::config::SweepConfig;
use crate::params;
use crate::report::{to_json, ClaimVerdict, Quantity};

type Params = BTreeMap<String, serde_json::Value>;

pub const CRITERIA: [(usize, &str); 8] = [
    (1, "dicke"),
    (2, "padding"),
    (3, "symmetric"),
    (4, "uniformity"),
    (5, "claims"),
    (6, "certification"),
    (7, "constant-depth"),
    (8, "determinism"),
];

/// `(n, k, ℓ)` for exact Dicke preparation with `ℓ | n`.
pub const DICKE_CASES: [(usize, usize, usize); 7] = [(4, 1, 2), (4, 1, 4), (4, 2, 2), (6, 2, 3), (8, 2, 4), (6, 1, 3), (8, 1, 4)];
/// `(n, k, ℓ)` with `ℓ ∤ n`.
pub const PADDING_CASES: [(usize, usize, usize); 2] = [(5, 1, 2), (7, 2, 4)];
pub const SYMMETRIC_N: usize = 4;
pub const DEPTH_NS: [usize; 4] = [8, 16, 24, 32];
pub const DEPTH_K: usize = 2;
pub const DEPTH_ELL: usize = 4;
/// Relative spread allowed within one Hamming-weight class.
pub const UNIFORMITY_TOL: f64 = 1e-9;

/// Named unit vectors `η` over `|D^4_k⟩`.
pub fn symmetric_cases() -> Vec<(&'static str, Vec<C64>)> {
    let r = |x: f64| Complex64::new(x, 0.0);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    vec![
        ("weights-0-1", vec![r(0.6), r(0.8)]),
        ("weights-1-2", vec![r(0.0), r(h), Complex64::new(0.0, -h)]),
        ("weights-0-1-2", vec![r(0.6), Complex64::new(0.0, 0.48), r(0.64)]),
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub number: usize,
    pub name: String,
    pub passed: bool,
    pub failures: usize,
    /// Wall time, only recorded when timings are requested.
    pub seconds: Option<f64>,
    pub rows: Vec<ClaimVerdict>,
}

impl CriterionResult {
    fn new(number: usize, rows: Vec<ClaimVerdict>) -> CriterionResult {
        let failures = rows.iter().filter(|r| !r.passed()).count();
        CriterionResult {
            number,
            name: CRITERIA[number - 1].1.to_string(),
            passed: failures == 0 && !rows.is_empty(),
            failures,
            seconds: None,
            rows,
        }
    }

    pub fn line(&self) -> String {
        let time = self.seconds.map(|s| format!(" in {s:.2}s")).unwrap_or_default();
        format!(
            "criterion {} {:<15} {} ({} rows, {} failed){}",
            self.number,
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.rows.len(),
            self.failures,
            time
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceReport {
    pub criteria: Vec<CriterionResult>,
}

impl AcceptanceReport {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }

    pub fn rows(&self) -> impl Iterator<Item = &ClaimVerdict> {
        self.criteria.iter().flat_map(|c| c.rows.iter())
    }

    /// One summary line per criterion.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.criteria {
            let _ = writeln!(out, "{}", c.line());
        }
        out
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    fn without_timings(&self) -> AcceptanceReport {
        let mut r = self.clone();
        for c in &mut r.criteria {
            c.seconds = None;
            c.rows.iter_mut().for_each(|row| row.seconds = None);
        }
        r
    }
}

/// Whether criterion `number` is picked by a filter naming its number or its name.
pub fn criterion_selected(only: &Option<String>, number: usize) -> bool {
    match only {
        None => true,
        Some(f) => f == &number.to_string() || f == CRITERIA[number - 1].1,
    }
}

/// Data-register simulation of one synthesized circuit.
struct Prepared {
    fidelity: f64,
    residual: f64,
    /// Largest relative spread within a Hamming-weight class the target occupies.
    spread: f64,
}

fn simulate(out: &SynthesisOutput) -> Result<Prepared, String> {
    let keep = &out.data.qubits;
    let lazy = qacz::sim::run_lazy(&out.circuit, keep).map_err(|e| e.to_string())?;
    let ancillas: Vec<_> = lazy.state.qubit_order().iter().copied().filter(|q| !keep.contains(q)).collect();
    let excited = lazy.state.excited_mass(&ancillas).map_err(|e| e.to_string())?;
    let survive = 1.0 - lazy.released_mass;
    let residual = lazy.released_mass + survive * excited;
    let data = lazy
        .state
        .restrict_clean(keep, 1.0)
        .map_err(|e| e.to_string())?
        .ok_or("no clean branch")?
        .reorder(keep)
        .map_err(|e| e.to_string())?;
    let amps = data.amplitudes();
    let entries = out.target.entries().map_err(|e| e.to_string())?;
    let overlap: C64 = entries.iter().map(|(i, t)| t.conj() * amps[*i]).sum();
    let fidelity = overlap.norm_sqr() * (1.0 - excited) * survive;

    let mut classes: Vec<Vec<C64>> = vec![Vec::new(); keep.len() + 1];
    for (i, a) in amps.iter().enumerate() {
        classes[i.count_ones() as usize].push(*a);
    }
    let mut occupied = vec![false; keep.len() + 1];
    for (i, t) in &entries {
        if t.norm() > 0.0 {
            occupied[i.count_ones() as usize] = true;
        }
    }
    let mut spread = 0.0f64;
    for (class, _) in classes.iter().zip(&occupied).filter(|(_, o)| **o) {
        let mean = class.iter().sum::<C64>() / class.len() as f64;
        let worst = class.iter().map(|a| (a - mean).norm()).fold(0.0, f64::max);
        spread = spread.max(if mean.norm() > 0.0 { worst / mean.norm() } else { f64::INFINITY });
    }
    Ok(Prepared { fidelity, residual, spread })
}

/// Fidelity row plus the uniformity row for one synthesized state.
fn synthesis_rows(id: &str, ps: Params, built: Result<SynthesisOutput, String>, tol: f64) -> (Vec<ClaimVerdict>, ClaimVerdict) {
    let fail = |what: &str, e: &str| ClaimVerdict::new(what, ps.clone(), Quantity::text(format!("error: {e}")), ">=", Quantity::float(1.0 - tol), false);
    let out = match built {
        Ok(out) => out,
        Err(e) => return (vec![fail(id, &e)], fail("uniformity", &e)),
    };
    match simulate(&out) {
        Err(e) => (vec![fail(id, &e)], fail("uniformity", &e)),
        Ok(p) => {
            let fid = ClaimVerdict::new(id, ps.clone(), Quantity::float(p.fidelity), ">=", Quantity::float(1.0 - tol), p.fidelity >= 1.0 - tol);
            let clean = ClaimVerdict::new(
                &format!("{id}:ancilla-mass"),
                ps.clone(),
                Quantity::float(p.residual),
                "<",
                Quantity::float(tol),
                p.residual < tol,
            );
            let uniform =
                ClaimVerdict::new("uniformity", ps, Quantity::float(p.spread), "<=", Quantity::float(UNIFORMITY_TOL), p.spread <= UNIFORMITY_TOL);
            (vec![fid, clean], uniform)
        }
    }
}

fn padding_row(n: usize, k: usize, ell: usize, out: &SynthesisOutput) -> ClaimVerdict {
    let want = padding_keep_probability(n, out.padded_n, k);
    let rec: Option<&AmpRecord> = out.circuit.metadata().amplifications.iter().find(|r| r.site == "dicke.pad");
    let ps = params! {"n" => n, "k" => k, "ell" => ell, "padded_n" => out.padded_n};
    match rec {
        Some(AmpRecord { alpha: Weight::Exact(a), .. }) => {
            ClaimVerdict::new("padding:keep-probability", ps, Quantity::rational(a), "=", Quantity::rational(&want), *a == want)
        }
        _ => ClaimVerdict::new("padding:keep-probability", ps, Quantity::text("no exact amplification"), "=", Quantity::rational(&want), false),
    }
}

fn eta_text(eta: &[C64]) -> Vec<String> {
    eta.iter().map(|z| format!("{:.4}{:+.4}i", z.re, z.im)).collect()
}

/// Criteria 1 to 4, which share their simulations.
fn synthesis_criteria(cfg: &SweepConfig, wanted: &[usize]) -> Vec<CriterionResult> {
    let tol = cfg.tol;
    let mut by = vec![Vec::new(); 5];
    let mut uniform = Vec::new();
    let timed = |f: &mut dyn FnMut()| {
        let start = Instant::now();
        f();
        start.elapsed().as_secs_f64()
    };
    let mut secs = [0.0f64; 5];
    if [1, 4].iter().any(|c| wanted.contains(c)) {
        secs[1] = timed(&mut || {
            for (n, k, ell) in DICKE_CASES {
                let (rows, u) = synthesis_rows("dicke", params! {"n" => n, "k" => k, "ell" => ell}, build_dicke(n, k, Some(ell)).map_err(|e| e.to_string()), tol);
                by[1].extend(rows);
                uniform.push(u);
            }
        });
    }
    if [2, 4].iter().any(|c| wanted.contains(c)) {
        secs[2] = timed(&mut || {
            for (n, k, ell) in PADDING_CASES {
                let built = build_dicke(n, k, Some(ell)).map_err(|e| e.to_string());
                if let Ok(out) = &built {
                    by[2].push(padding_row(n, k, ell, out));
                }
                let (rows, u) = synthesis_rows("padding", params! {"n" => n, "k" => k, "ell" => ell}, built, tol);
                by[2].extend(rows);
                uniform.push(u);
            }
        });
    }
    if [3, 4].iter().any(|c| wanted.contains(c)) {
        secs[3] = timed(&mut || {
            for (name, eta) in symmetric_cases() {
                let ps = params! {"n" => SYMMETRIC_N, "case" => name, "eta" => eta_text(&eta)};
                let (rows, u) = synthesis_rows("symmetric", ps, build_symmetric(SYMMETRIC_N, &eta, None).map_err(|e| e.to_string()), tol);
                by[3].extend(rows);
                uniform.push(u);
            }
        });
    }
    by[4] = uniform;
    secs[4] = secs[1] + secs[2] + secs[3];
    wanted
        .iter()
        .filter(|c| (1..=4).contains(*c))
        .map(|&c| {
            let mut r = CriterionResult::new(c, std::mem::take(&mut by[c]));
            r.seconds = cfg.timings.then_some(secs[c]);
            r
        })
        .collect()
}

fn depth_rows() -> Vec<ClaimVerdict> {
    let mut rows = Vec::new();
    let mut base: Option<(usize, usize)> = None;
    for n in DEPTH_NS {
        let ps = params! {"n" => n, "k" => DEPTH_K, "ell" => DEPTH_ELL};
        let built = build_dicke(n, DEPTH_K, Some(DEPTH_ELL)).and_then(|full| Ok((full, skeleton(|| build_dicke(n, DEPTH_K, Some(DEPTH_ELL)))?)));
        let (full, bare) = match built {
            Ok(pair) => pair,
            Err(e) => {
                rows.push(ClaimVerdict::new("depth:build", ps, Quantity::text(format!("error: {e}")), "=", Quantity::text("ok"), false));
                continue;
            }
        };
        let (width0, layers0) = *base.get_or_insert((full.report.max_fanout_width, bare.report.layers));
        rows.push(ClaimVerdict::new(
            "depth:fanout-width",
            ps.clone(),
            Quantity::int(full.report.max_fanout_width),
            "=",
            Quantity::int(width0),
            full.report.max_fanout_width == width0,
        ));
        rows.push(ClaimVerdict::new(
            "depth:skeleton-layers",
            ps.clone(),
            Quantity::int(bare.report.layers),
            "=",
            Quantity::int(layers0),
            bare.report.layers == layers0,
        ));
        let delta: usize = full.circuit.metadata().amplifications.iter().map(|r| r.rounds * r.round_layers).sum();
        let mut ps = ps;
        ps.insert("round_delta".into(), delta.into());
        ps.insert("depth".into(), full.report.depth.into());
        rows.push(ClaimVerdict::new(
            "depth:layers",
            ps,
            Quantity::int(full.report.layers),
            "=",
            Quantity::int(bare.report.layers + delta),
            full.report.layers == bare.report.layers + delta,
        ));
    }
    rows
}

fn run_criteria(cfg: &SweepConfig, wanted: &[usize]) -> Result<Vec<CriterionResult>, SweepError> {
    let mut out = synthesis_criteria(cfg, wanted);
    let timed = |number: usize, f: &dyn Fn() -> Result<Vec<ClaimVerdict>, SweepError>| -> Result<CriterionResult, SweepError> {
        let start = Instant::now();
        let rows = f()?;
        let mut r = CriterionResult::new(number, rows);
        r.seconds = cfg.timings.then(|| start.elapsed().as_secs_f64());
        Ok(r)
    };
    if wanted.contains(&5) {
        let claims_cfg = SweepConfig { only: None, ..cfg.clone() };
        out.push(timed(5, &|| run_claims(&claims_cfg))?);
    }
    if wanted.contains(&6) {
        out.push(timed(6, &|| Ok(certification_rows(cfg.tol)))?);
    }
    if wanted.contains(&7) {
        out.push(timed(7, &|| Ok(depth_rows()))?);
    }
    Ok(out)
}

/// Runs the selected criteria. Criterion 8 reruns 1 to 7 and compares the two reports byte for byte.
pub fn run_acceptance(cfg: &SweepConfig) -> Result<AcceptanceReport, SweepError> {
    cfg.validate()?;
    let wanted: Vec<usize> = (1..=7).filter(|&c| criterion_selected(&cfg.only, c)).collect();
    let mut criteria = run_criteria(cfg, &wanted)?;
    if criterion_selected(&cfg.only, 8) {
        let start = Instant::now();
        let all: Vec<usize> = (1..=7).collect();
        let first = if wanted == all { criteria.clone() } else { run_criteria(cfg, &all)? };
        let second = run_criteria(cfg, &all)?;
        let a = AcceptanceReport { criteria: first }.without_timings().to_json();
        let b = AcceptanceReport { criteria: second }.without_timings().to_json();
        let same = a == b;
        let lhs = if same {
            Quantity::text(format!("{} bytes identical", a.len()))
        } else {
            let at = a.bytes().zip(b.bytes()).position(|(x, y)| x != y).unwrap_or(a.len().min(b.len()));
            Quantity::text(format!("first difference at byte {at}"))
        };
        let row = ClaimVerdict::new("determinism", params! {"runs" => 2}, lhs, "=", Quantity::text("identical"), same);
        let mut r = CriterionResult::new(8, vec![row]);
        r.seconds = cfg.timings.then(|| start.elapsed().as_secs_f64());
        criteria.push(r);
    }
    Ok(AcceptanceReport { criteria })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filter_matches_number_or_name() {
        assert!(criterion_selected(&None, 3));
        assert!(criterion_selected(&Some("3".into()), 3));
        assert!(criterion_selected(&Some("symmetric".into()), 3));
        assert!(!criterion_selected(&Some("3".into()), 4));
    }

    #[test]
    fn symmetric_cases_are_unit_vectors() {
        for (_, eta) in symmetric_cases() {
            let norm: f64 = eta.iter().map(|z| z.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_criterion_filter() {
        let cfg = SweepConfig { only: Some("7".into()), ..SweepConfig::default() };
        let report = run_acceptance(&cfg).unwrap();
        assert_eq!(report.criteria.len(), 1);
        assert_eq!(report.criteria[0].number, 7);
        assert!(report.passed(), "{}", crate::report::table(&report.criteria[0].rows));
    }

    #[test]
    fn padding_criterion_checks_keep_probability() {
        let cfg = SweepConfig { only: Some("padding".into()), ..SweepConfig::default() };
        let report = run_acceptance(&cfg).unwrap();
        let rows: Vec<_> = report.rows().filter(|r| r.id == "padding:keep-probability").collect();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].lhs.exact.as_deref(), Some("5/6"));
        assert!(report.passed());
    }
}
