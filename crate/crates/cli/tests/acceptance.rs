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


//! Runs the eight acceptance criteria and prints one line per criterion.
//!
//! Lines go straight to the stdout handle so they show up without `--nocapture`.

use std::io::Write;

use qacz_cli::accept::{CRITERIA, UNIFORMITY_TOL};
use qacz_cli::report::table;
use qacz_cli::{run_acceptance, SweepConfig};

/// Fidelity slack for criteria 1 to 3 and 6.
const FIDELITY_TOL: f64 = 1e-9;

#[test]
fn acceptance_criteria() {
    assert_eq!(UNIFORMITY_TOL, 1e-9);
    let cfg = SweepConfig { tol: FIDELITY_TOL, workers: SweepConfig::workers_from_env(), timings: true, ..SweepConfig::default() };
    qacz::sim::set_workers(cfg.workers);
    let report = run_acceptance(&cfg).expect("acceptance run");
    assert_eq!(report.criteria.len(), CRITERIA.len());
    let mut out = std::io::stdout().lock();
    writeln!(out).unwrap();
    for c in &report.criteria {
        writeln!(out, "{}", c.line()).unwrap();
        let failed: Vec<_> = c.rows.iter().filter(|r| !r.passed()).cloned().collect();
        if !failed.is_empty() {
            write!(out, "{}", table(&failed)).unwrap();
        }
    }
    writeln!(out, "tolerances: fidelity {FIDELITY_TOL:e}, weight-class spread {UNIFORMITY_TOL:e}").unwrap();
    assert!(report.passed());
}
