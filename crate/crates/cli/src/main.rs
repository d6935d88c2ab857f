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


use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use qacz::ir::{deserialize, serialize, Circuit};
use qacz::sim::check_clean_preparation;
use qacz::synth::{SynthesisOutput, SynthesisRequest, Target};
use qacz_cli::certify::certification_rows;
use qacz_cli::claims::selected;
use qacz_cli::config::{DEFAULT_TOL, WORKERS_ENV};
use qacz_cli::report::{read_file, table, to_json, write_file};
use qacz_cli::{run_acceptance, run_claims, AcceptanceReport, ClaimVerdict, Fault, Grid, SweepConfig};
use serde_json::json;

#[derive(Parser)]
#[command(name = "qacz", version, about = "Constant-depth Dicke and symmetric state synthesis")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Worker threads for sweeps and simulation.
    #[arg(long, global = true, env = WORKERS_ENV, default_value_t = 1)]
    workers: usize,
    /// Directory for reports and circuits.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Fidelity slack for simulation checks.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Record wall times in reports. Timed reports are not byte-reproducible.
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Exact-arithmetic sweep of the distribution inequalities.
    Claims {
        /// Grid such as `m=1..16,k=1|2,ell=8`.
        #[arg(long)]
        grid: Option<String>,
        /// Keep only one claim id.
        #[arg(long)]
        only: Option<String>,
        /// Negative control, e.g. `lambda`.
        #[arg(long)]
        inject_fault: Option<Fault>,
    },
    /// Full acceptance suite.
    Accept {
        /// Run one criterion, by number or name.
        #[arg(long)]
        only: Option<String>,
        #[arg(long)]
        grid: Option<String>,
    },
    /// Build a state-preparation circuit.
    Synth {
        #[command(subcommand)]
        what: SynthCommand,
    },
    /// Simulate a circuit file against the state recorded in its metadata.
    Verify { circuit: PathBuf },
    /// Render a circuit cost report, or a claims or acceptance report, as text.
    Report { file: PathBuf },
    /// Certify primitives against their semantic maps.
    Primitive {
        /// Primitive name such as `ham-gadget`; all when omitted.
        name: Option<String>,
    },
}

#[derive(Subcommand)]
enum SynthCommand {
    /// `|D^n_k⟩`.
    Dicke {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        ell: Option<usize>,
        /// Also simulate the result.
        #[arg(long)]
        verify: bool,
    },
    /// `Σ_k η_k |D^n_k⟩`, with `η` read from lines `k re im`.
    Symmetric {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        eta: PathBuf,
        #[arg(long)]
        ell: Option<usize>,
        #[arg(long)]
        verify: bool,
    },
}

type Failure = Box<dyn std::error::Error>;

fn sweep_config(common: &Common, grid: Option<&str>, only: Option<String>, fault: Option<Fault>) -> Result<SweepConfig, Failure> {
    let grid = match grid {
        Some(g) => Grid::parse(g)?,
        None => Grid::default(),
    };
    Ok(SweepConfig { grid, tol: common.tol, workers: common.workers, out: common.out.clone(), only, timings: common.timings, fault })
}

fn save(out: &Option<PathBuf>, name: &str, contents: &[u8]) -> Result<(), Failure> {
    if let Some(dir) = out {
        let path = dir.join(name);
        write_file(&path, contents)?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn finish_rows(common: &Common, name: &str, rows: &[ClaimVerdict]) -> Result<bool, Failure> {
    print!("{}", table(rows));
    let failed = rows.iter().filter(|r| !r.passed()).count();
    println!("{} rows, {failed} failed", rows.len());
    save(&common.out, name, to_json(&rows).as_bytes())?;
    Ok(failed == 0)
}

/// Parses `k re im` lines; blank lines and `#` comments are skipped.
fn parse_eta(text: &str) -> Result<Vec<Complex64>, String> {
    let mut eta = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let bad = || format!("line {}: expected `k re [im]`", no + 1);
        if fields.len() < 2 || fields.len() > 3 {
            return Err(bad());
        }
        let k: usize = fields[0].parse().map_err(|_| bad())?;
        let re: f64 = fields[1].parse().map_err(|_| bad())?;
        let im: f64 = fields.get(2).map(|f| f.parse()).transpose().map_err(|_| bad())?.unwrap_or(0.0);
        if eta.len() <= k {
            eta.resize(k + 1, Complex64::new(0.0, 0.0));
        }
        eta[k] = Complex64::new(re, im);
    }
    Ok(eta)
}

fn cost_json(c: &Circuit) -> serde_json::Value {
    let r = c.cost();
    let m = c.metadata();
    let amps: Vec<_> = m
        .amplifications
        .iter()
        .map(|a| json!({"site": a.site, "alpha": a.alpha.value(), "rounds": a.rounds, "round_layers": a.round_layers}))
        .collect();
    json!({
        "n": m.n, "k": m.k, "ell": m.ell, "fanout_budget": m.fanout_budget,
        "qubits": r.qubits, "layers": r.layers, "depth": r.depth, "ancilla_count": r.ancilla_count,
        "max_fanout_width": r.max_fanout_width, "grover_rounds": r.grover_rounds, "amplifications": amps,
    })
}

fn synth(common: &Common, what: &SynthCommand) -> Result<bool, Failure> {
    let (req, ell, verify, name) = match what {
        SynthCommand::Dicke { n, k, ell, verify } => (SynthesisRequest::dicke(*n, *k), ell, verify, format!("dicke-n{n}-k{k}")),
        SynthCommand::Symmetric { n, eta, ell, verify } => {
            let text = String::from_utf8_lossy(&read_file(eta)?).into_owned();
            (SynthesisRequest::symmetric(*n, parse_eta(&text)?), ell, verify, format!("symmetric-n{n}"))
        }
    };
    let req = match ell {
        Some(l) => req.with_ell(*l),
        None => req,
    };
    let out: SynthesisOutput = req.build()?;
    println!("{}", serde_json::to_string_pretty(&cost_json(&out.circuit))?);
    save(&common.out, &format!("{name}.json"), &serialize(&out.circuit))?;
    if *verify {
        let v = out.verify()?;
        println!("fidelity {:.12} ancilla mass {:.3e}", v.fidelity, v.residual_ancilla_mass);
        return Ok(v.clean && v.fidelity >= 1.0 - common.tol);
    }
    Ok(true)
}

fn load_circuit(path: &Path) -> Result<Circuit, Failure> {
    Ok(deserialize(&read_file(path)?)?)
}

fn verify(common: &Common, path: &Path) -> Result<bool, Failure> {
    let c = load_circuit(path)?;
    let m = c.metadata();
    let target = match &m.eta {
        Some(eta) => Target::Symmetric { n: m.n, eta: eta.clone() },
        None => Target::Dicke { n: m.n, k: m.k },
    };
    let data = c.register("T")?.clone();
    let v = check_clean_preparation(&c, &data, &target.state(&data)?)?;
    let ok = v.clean && v.fidelity >= 1.0 - common.tol;
    println!("fidelity {:.12} ancilla mass {:.3e} {}", v.fidelity, v.residual_ancilla_mass, if ok { "ok" } else { "FAIL" });
    Ok(ok)
}

fn report(path: &Path) -> Result<bool, Failure> {
    let bytes = read_file(path)?;
    if let Ok(c) = deserialize(&bytes) {
        println!("{}", serde_json::to_string_pretty(&cost_json(&c))?);
        return Ok(true);
    }
    if let Ok(rows) = serde_json::from_slice::<Vec<ClaimVerdict>>(&bytes) {
        print!("{}", table(&rows));
        return Ok(rows.iter().all(|r| r.passed()));
    }
    let acc: AcceptanceReport = serde_json::from_slice(&bytes)?;
    print!("{}", acc.summary());
    Ok(acc.passed())
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let common = &cli.common;
    qacz::sim::set_workers(common.workers.max(1));
    match &cli.command {
        Command::Claims { grid, only, inject_fault } => {
            let cfg = sweep_config(common, grid.as_deref(), only.clone(), *inject_fault)?;
            finish_rows(common, "claims.json", &run_claims(&cfg)?)
        }
        Command::Accept { only, grid } => {
            let cfg = sweep_config(common, grid.as_deref(), only.clone(), None)?;
            let report = run_acceptance(&cfg)?;
            let failed: Vec<ClaimVerdict> = report.rows().filter(|r| !r.passed()).cloned().collect();
            print!("{}", table(&failed));
            print!("{}", report.summary());
            save(&common.out, "accept.json", report.to_json().as_bytes())?;
            Ok(report.passed())
        }
        Command::Synth { what } => synth(common, what),
        Command::Verify { circuit } => verify(common, circuit),
        Command::Report { file } => report(file),
        Command::Primitive { name } => {
            let filter = name.as_ref().map(|n| format!("certify:{n}"));
            let rows: Vec<ClaimVerdict> = certification_rows(common.tol).into_iter().filter(|r| selected(&filter, &r.id)).collect();
            if rows.is_empty() {
                return Err(format!("no primitive named `{}`", name.as_deref().unwrap_or("")).into());
            }
            finish_rows(common, "primitives.json", &rows)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
