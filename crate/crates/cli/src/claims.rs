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


//! Exact-arithmetic sweep over the damped-binomial and occupancy inequalities.
//!
//! | id | relation |
//! |----|----------|
//! | `normalizer-bounds` | `k²/(k+1) ≤ λ ≤ k` |
//! | `binomial-domination` | `s(j) ≤ 4·Pr[Binom(m, 1/m) = j]` for `k ≤ m/2` |
//! | `slice-uniformity` | every string of `j` samples has probability `λ^j (1/mk)^{|x|}` |
//! | `occupancy-ratio` | `p(j)/q(j) ≤ e²·k^{j−k}` for `ℓ ≥ k³` |
//! | `weighted-ratio` | `R_k ≤ 2e⁴` with samples capped at `k* ≥ k`, `ℓ ≥ k*³` |
//! | `light-samples` | `Pr[j samples all of weight ≤ k] ≥ e^{−2j/k}` |

use std::time::Instant;

use num_rational::BigRational;
use num_traits::One;
use qacz::dist::{
    all_light_prob, binomial_pmf, damped_binomial, ge_exp, int, le_exp_times, pow, rat, ratio_report,
    slice_uniformity, to_f64, weight_ratio, DistError,
};
use rayon::prelude::*;
use thiserror::Error;

use crate::config::{ConfigError, Fault, SweepConfig};
use crate::params;
use crate::report::{ClaimVerdict, Quantity};

pub const CLAIM_IDS: [&str; 6] =
    ["normalizer-bounds", "binomial-domination", "slice-uniformity", "occupancy-ratio", "weighted-ratio", "light-samples"];

/// Largest `m·j` enumerated by the slice-uniformity check.
pub const SLICE_LIMIT: usize = 20;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("distribution error at {at}: {source}")]
    Dist { at: String, source: DistError },
    #[error("cannot start worker pool: {0}")]
    Pool(String),
}

#[derive(Clone, Copy, Debug)]
enum Task {
    Normalizer { m: usize, k: usize },
    Domination { m: usize, k: usize },
    Slice { m: usize, k: usize, j: usize },
    Occupancy { m: usize, k: usize, ell: usize },
    Weighted { m: usize, k_star: usize, ell: usize },
    Light { m: usize, k_star: usize },
}

impl Task {
    fn id(&self) -> &'static str {
        match self {
            Task::Normalizer { .. } => CLAIM_IDS[0],
            Task::Domination { .. } => CLAIM_IDS[1],
            Task::Slice { .. } => CLAIM_IDS[2],
            Task::Occupancy { .. } => CLAIM_IDS[3],
            Task::Weighted { .. } => CLAIM_IDS[4],
            Task::Light { .. } => CLAIM_IDS[5],
        }
    }
}

/// Whether a row or task id is selected by `only`.
pub fn selected(only: &Option<String>, id: &str) -> bool {
    match only {
        None => true,
        Some(f) => id == f || id.starts_with(&format!("{f}:")),
    }
}

fn tasks(cfg: &SweepConfig) -> Vec<Task> {
    let g = &cfg.grid;
    let pairs: Vec<(usize, usize)> =
        g.m.iter().flat_map(|&m| g.k.iter().filter(move |&&k| k >= 1 && k <= m).map(move |&k| (m, k))).collect();
    let mut out = Vec::new();
    out.extend(pairs.iter().map(|&(m, k)| Task::Normalizer { m, k }));
    out.extend(pairs.iter().filter(|(m, k)| *m >= 2 && 2 * k <= *m).map(|&(m, k)| Task::Domination { m, k }));
    for &(m, k) in &pairs {
        out.extend((1..=SLICE_LIMIT / m).map(|j| Task::Slice { m, k, j }));
    }
    for &(m, k) in &pairs {
        out.extend(g.ells(k).into_iter().filter(|&l| l >= k.pow(3)).map(|ell| Task::Occupancy { m, k, ell }));
    }
    for &(m, k) in &pairs {
        out.extend(g.ells(k).into_iter().filter(|&l| l >= k.pow(3)).map(|ell| Task::Weighted { m, k_star: k, ell }));
    }
    out.extend(pairs.iter().map(|&(m, k)| Task::Light { m, k_star: k }));
    out.retain(|t| selected(&cfg.only, t.id()));
    out
}

fn dist_err(at: String) -> impl FnOnce(DistError) -> SweepError {
    move |source| SweepError::Dist { at, source }
}

fn e_power_text(scale: &str, power: &str) -> Quantity {
    Quantity::text(format!("{scale}e^{power}"))
}

/// `a ≤ e^x · b`, falling back to floating point with slack `tol` when the bracket is too wide.
fn le_exp(a: &BigRational, x: &BigRational, b: &BigRational, tol: f64) -> (bool, f64) {
    let bound = to_f64(x).exp() * to_f64(b);
    let ok = le_exp_times(a, x, b).unwrap_or_else(|| to_f64(a) <= bound * (1.0 + tol));
    (ok, bound)
}

fn run_task(task: Task, cfg: &SweepConfig) -> Result<Vec<ClaimVerdict>, SweepError> {
    let id = task.id();
    let at = format!("{task:?}");
    let rows = match task {
        Task::Normalizer { m, k } => {
            let d = damped_binomial(m, k).map_err(dist_err(at))?;
            let lambda = match cfg.fault {
                Some(Fault::LambdaOffByOne) => &d.lambda + BigRational::one(),
                None => d.lambda.clone(),
            };
            let lo = rat((k * k) as i64, (k + 1) as i64);
            let hi = int(k);
            let ok = lo <= lambda && lambda <= hi;
            let rhs = Quantity { exact: Some(format!("[{lo}, {hi}]")), approx: None };
            vec![ClaimVerdict::new(id, params! {"m" => m, "k" => k}, Quantity::rational(&lambda), "in", rhs, ok)]
        }
        Task::Domination { m, k } => {
            let d = damped_binomial(m, k).map_err(dist_err(at))?;
            let p = rat(1, m as i64);
            (1..=k)
                .map(|j| {
                    let s = d.pmf(j);
                    let bound = binomial_pmf(m, &p, j) * rat(4, 1);
                    let ok = s <= bound;
                    let ps = params! {"m" => m, "k" => k, "j" => j};
                    ClaimVerdict::new(id, ps, Quantity::rational(&s), "<=", Quantity::rational(&bound), ok)
                })
                .collect()
        }
        Task::Slice { m, k, j } => {
            let d = damped_binomial(m, k).map_err(dist_err(at.clone()))?;
            let (uniform, classes) = slice_uniformity(m, k, j).map_err(dist_err(at))?;
            let v = d.v();
            let lam = pow(&d.lambda, j);
            let wrong = classes.iter().filter(|(w, p)| *p != &lam * pow(&v, *w)).count() + usize::from(!uniform);
            let ps = params! {"m" => m, "k" => k, "j" => j};
            vec![ClaimVerdict::new(id, ps, Quantity::int(wrong), "=", Quantity::int(0), wrong == 0)]
        }
        Task::Occupancy { m, k, ell } => {
            let model = ratio_report(m * ell, k, ell).map_err(dist_err(at))?;
            model
                .rows
                .iter()
                .map(|row| {
                    let scale = pow(&rat(1, k as i64), k - row.j);
                    let (float_ok, bound) = le_exp(&row.r, &int(2), &scale, cfg.tol);
                    let ok = row.bound_holds.unwrap_or(float_ok);
                    let ps = params! {"m" => m, "k" => k, "ell" => ell, "j" => row.j};
                    let rhs = Quantity { approx: Some(bound), ..e_power_text(&format!("k^{}·", row.j as i64 - k as i64), "2") };
                    ClaimVerdict::new(id, ps, Quantity::rational(&row.r), "<=", rhs, ok)
                })
                .collect()
        }
        Task::Weighted { m, k_star, ell } => (1..=k_star)
            .map(|k| {
                let r = weight_ratio(m, k_star, ell, k).map_err(dist_err(at.clone()))?;
                let (ok, bound) = le_exp(&r, &int(4), &int(2), cfg.tol);
                let ps = params! {"m" => m, "k_star" => k_star, "ell" => ell, "k" => k};
                let rhs = Quantity { approx: Some(bound), ..e_power_text("2·", "4") };
                Ok(ClaimVerdict::new(id, ps, Quantity::rational(&r), "<=", rhs, ok))
            })
            .collect::<Result<_, SweepError>>()?,
        Task::Light { m, k_star } => {
            let mut rows = Vec::new();
            for k in 1..=k_star {
                for j in 1..=k {
                    let a = all_light_prob(m, k_star, j, k).map_err(dist_err(at.clone()))?;
                    let x = rat(-2 * j as i64, k as i64);
                    let bound = to_f64(&x).exp();
                    let ok = ge_exp(&a, &x).unwrap_or_else(|| to_f64(&a) >= bound * (1.0 - cfg.tol));
                    let ps = params! {"m" => m, "k_star" => k_star, "k" => k, "j" => j};
                    let rhs = Quantity { approx: Some(bound), ..e_power_text("", &format!("(-{}/{k})", 2 * j)) };
                    rows.push(ClaimVerdict::new(id, ps, Quantity::rational(&a), ">=", rhs, ok));
                }
            }
            rows
        }
    };
    Ok(rows)
}

/// Runs `f` on a pool of `workers` threads.
pub(crate) fn with_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T, SweepError> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().map_err(|e| SweepError::Pool(e.to_string()))?;
    Ok(pool.install(f))
}

/// One verdict per claim and grid point, in grid order.
pub fn run_claims(cfg: &SweepConfig) -> Result<Vec<ClaimVerdict>, SweepError> {
    cfg.validate()?;
    let tasks = tasks(cfg);
    let results: Vec<Result<Vec<ClaimVerdict>, SweepError>> = with_pool(cfg.workers, || {
        tasks
            .par_iter()
            .map(|&t| {
                let start = Instant::now();
                let mut rows = run_task(t, cfg)?;
                if cfg.timings {
                    let per_row = start.elapsed().as_secs_f64() / rows.len().max(1) as f64;
                    rows.iter_mut().for_each(|r| r.seconds = Some(per_row));
                }
                Ok(rows)
            })
            .collect()
    })?;
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    Ok(rows)
}
