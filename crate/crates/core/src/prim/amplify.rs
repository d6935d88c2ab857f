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


use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use super::{copy_metadata, skeleton_mode, MarkedPreparation, PrimError, PRECHECK_QUBITS};
use crate::ir::{rot, rot_from_one, AmpRecord, Circuit, CircuitBuilder, Gate, LibraryGate, QubitId, Weight, C64};
use crate::sim::run_lazy;

/// Smallest marked mass [`amplify_to_exact`] accepts by default.
pub const DEFAULT_FLOOR: f64 = 1e-4;
/// Largest copy count [`parallel_amplify`] accepts.
pub const PARALLEL_CAP: usize = 64;

const ANGLE_TOL: f64 = 1e-12;
const WEIGHT_TOL: f64 = 1e-12;

/// How a marked mass is brought to an exact Grover angle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroverSchedule {
    /// Odd multiple with `r·θ' = π/2`.
    pub r: usize,
    /// `sin²(π/2r)`, the mass after the optional rotation.
    pub exact_alpha: f64,
    /// Whether a shrinking rotation is needed.
    pub rotate: bool,
}

impl GroverSchedule {
    pub fn rounds(&self) -> usize {
        (self.r - 1) / 2
    }
}

fn exact_mass(r: usize) -> f64 {
    (PI / (2.0 * r as f64)).sin().powi(2)
}

/// Scans odd `r` upward for the largest angle `π/2r` not exceeding `arcsin √α`.
pub fn grover_schedule(alpha: f64, floor: f64) -> Result<GroverSchedule, PrimError> {
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(PrimError::NothingToAmplify);
    }
    if alpha > 1.0 + WEIGHT_TOL {
        return Err(PrimError::Weights(format!("marked mass {alpha} exceeds 1")));
    }
    if alpha < floor {
        return Err(PrimError::BelowFloor { alpha, floor });
    }
    let mut r = 1;
    while exact_mass(r) > alpha + ANGLE_TOL {
        r += 2;
    }
    let exact_alpha = exact_mass(r);
    Ok(GroverSchedule { r, exact_alpha, rotate: (alpha - exact_alpha).abs() > ANGLE_TOL })
}

fn exact_r(alpha: f64) -> Result<usize, PrimError> {
    let s = grover_schedule(alpha, 0.0)?;
    if s.rotate {
        return Err(PrimError::NotExactAngle { alpha });
    }
    Ok(s.r)
}

fn grover(mp: &MarkedPreparation, r: usize, recorded: Weight) -> Result<Circuit, PrimError> {
    let c = &mp.circuit;
    let rounds = if skeleton_mode() { 0 } else { (r - 1) / 2 };
    let mut b = CircuitBuilder::new(c.metadata().fanout_budget);
    copy_metadata(&mut b, mp.data.len());
    let map = b.import(c);
    let flag = map.get(mp.flag);
    let all = map.host_qubits();
    b.embed(c, &map, false)?;
    let start = b.layer_count();
    for _ in 0..rounds {
        b.gate(Gate::unitary(flag, crate::ir::diag(C64::new(-1.0, 0.0), C64::new(1.0, 0.0)))?)?;
        b.embed(c, &map, true)?;
        b.gate(Gate::reflect_zero(&all))?;
        b.embed(c, &map, false)?;
    }
    let round_layers = (b.layer_count() - start).checked_div(rounds).unwrap_or(2 * c.layer_count() + 2);
    let meta = b.metadata_mut();
    meta.grover_rounds += rounds;
    meta.amplifications.push(AmpRecord { site: mp.site.clone(), alpha: recorded, rounds, round_layers });
    Ok(b.finish())
}

/// Exact amplitude amplification for a marked mass of the form `sin²(π/2r)`, `r` odd.
///
/// The output keeps the registers of `mp.circuit` and holds `|ψ⟩|1⟩` exactly.
pub fn exact_grover(mp: &MarkedPreparation) -> Result<Circuit, PrimError> {
    let r = exact_r(mp.alpha.value())?;
    grover(mp, r, mp.alpha.clone())
}

/// [`amplify_to_exact_with`] at [`DEFAULT_FLOOR`].
pub fn amplify_to_exact(mp: &MarkedPreparation) -> Result<Circuit, PrimError> {
    amplify_to_exact_with(mp, DEFAULT_FLOOR)
}

/// Clean preparation of `|ψ⟩` from any marked preparation with mass at least `floor`.
///
/// A controlled rotation on a fresh ancilla `"amp"` shrinks the mass to the nearest exact angle,
/// exact Grover follows, and the flag and ancilla are flipped back to `|0⟩`.
pub fn amplify_to_exact_with(mp: &MarkedPreparation, floor: f64) -> Result<Circuit, PrimError> {
    let alpha = mp.alpha.value();
    let sched = grover_schedule(alpha, floor)?;
    let budget = mp.circuit.metadata().fanout_budget;
    let (grown, flags) = if sched.rotate {
        let mut b = CircuitBuilder::new(budget);
        copy_metadata(&mut b, mp.data.len());
        let map = b.import(&mp.circuit);
        let flag = map.get(mp.flag);
        let a = b.qubit("amp");
        b.embed(&mp.circuit, &map, false)?;
        b.gate(Gate::controlled(vec![flag], a, rot(1.0 - sched.exact_alpha / alpha))?)?;
        let data = crate::ir::Register::new(mp.data.name.clone(), mp.data.qubits.iter().map(|&q| map.get(q)).collect());
        let shrunk = MarkedPreparation {
            circuit: b.finish(),
            data,
            flag: a,
            alpha: Weight::Approx(sched.exact_alpha),
            site: mp.site.clone(),
        };
        (grover(&shrunk, sched.r, mp.alpha.clone())?, vec![flag, a])
    } else {
        (grover(mp, sched.r, mp.alpha.clone())?, vec![mp.flag])
    };
    let mut b = CircuitBuilder::new(budget);
    copy_metadata(&mut b, mp.data.len());
    let map = b.import(&grown);
    let flips = flags.iter().map(|&q| Gate::x(map.get(q))).collect();
    b.embed(&grown, &map, false)?;
    b.layer(flips)?;
    Ok(b.finish())
}

/// Reweights the branches of a one-hot superposition.
///
/// `prep` prepares `√α₀|0⟩|φ₀⟩ + Σ_i √α_i |e_i⟩_X |φ_i⟩` with `x` naming the one-hot register; the
/// zero branch, if any, keeps weight one. The output prepares the same branches with amplitudes
/// scaled by `√β_i` and renormalized, using ancillas `"adj.a"`, `"adj.q"` and the amplifier's.
pub fn adjust_amplitudes(prep: &Circuit, x: &str, alphas: &[f64], betas: &[f64]) -> Result<Circuit, PrimError> {
    let xs = prep.register(x)?.qubits.clone();
    if alphas.len() != xs.len() || betas.len() != xs.len() {
        return Err(PrimError::Weights(format!("{} branches, {} alphas, {} betas", xs.len(), alphas.len(), betas.len())));
    }
    if let Some(b) = betas.iter().find(|b| !(-WEIGHT_TOL..=1.0 + WEIGHT_TOL).contains(*b)) {
        return Err(PrimError::Weights(format!("beta {b} outside [0, 1]")));
    }
    if alphas.iter().any(|a| *a < -WEIGHT_TOL) {
        return Err(PrimError::Weights("negative branch weight".into()));
    }
    let total: f64 = alphas.iter().sum();
    if total > 1.0 + 1e-9 {
        return Err(PrimError::Weights(format!("branch weights sum to {total}")));
    }
    let z = (1.0 - total).max(0.0) + alphas.iter().zip(betas).map(|(a, b)| a * b.clamp(0.0, 1.0)).sum::<f64>();
    if z <= WEIGHT_TOL {
        return Err(PrimError::Weights("adjusted weights vanish".into()));
    }
    let budget = prep.metadata().fanout_budget;
    let mut b = CircuitBuilder::new(budget);
    let map = b.import(prep);
    let data_len = prep.metadata().n;
    copy_metadata(&mut b, data_len);
    let a = b.register("adj.a", xs.len());
    let q = b.qubit("adj.q");
    b.embed_merged(prep, &map, false, a.iter().map(|&q| Gate::x(q)).collect())?;
    let mut rotations = Vec::new();
    for (i, beta) in betas.iter().enumerate() {
        if *beta < 1.0 - WEIGHT_TOL {
            rotations.push(Gate::controlled(vec![map.get(xs[i])], a[i], rot_from_one(beta.clamp(0.0, 1.0)))?);
        }
    }
    b.layer(rotations)?;
    b.gate(Gate::toffoli(&a, q))?;
    let marked = b.finish();
    let data = marked.register(x)?.clone();
    let mp = MarkedPreparation { circuit: marked, data, flag: q, alpha: Weight::Approx(z), site: "adjust_amplitudes".into() };
    let amplified = amplify_to_exact(&mp)?;
    let mut b = CircuitBuilder::new(budget);
    copy_metadata(&mut b, data_len);
    let map = b.import(&amplified);
    b.embed(&amplified, &map, false)?;
    b.layer(a.iter().map(|&q| Gate::x(map.get(q))).collect())?;
    Ok(b.finish())
}

fn binomial_one(t: usize, alpha: &Weight) -> Weight {
    match alpha {
        Weight::Exact(a) => {
            let mut rest = BigRational::one();
            for _ in 1..t {
                rest *= BigRational::one() - a;
            }
            Weight::Exact(BigRational::from_integer(BigInt::from(t)) * a * rest)
        }
        Weight::Approx(a) => Weight::Approx(t as f64 * a * (1.0 - a).powi(t as i32 - 1)),
    }
}

fn copies_needed(alpha: &Weight) -> Result<usize, PrimError> {
    let t = match alpha {
        Weight::Exact(a) => {
            let inv = BigRational::one() / a;
            inv.ceil().to_integer().to_usize()
        }
        Weight::Approx(a) => Some((1.0 / a - 1e-9).ceil() as usize),
    };
    match t {
        Some(t) if (1..=PARALLEL_CAP).contains(&t) => Ok(t),
        _ => Err(PrimError::Precondition(format!("1/α exceeds the copy cap {PARALLEL_CAP}"))),
    }
}

fn check_zero_bad_branch(base: &MarkedPreparation) -> Result<(), PrimError> {
    if base.circuit.num_qubits() > PRECHECK_QUBITS || skeleton_mode() {
        return Ok(());
    }
    let mut keep = base.data.qubits.clone();
    keep.push(base.flag);
    let run = run_lazy(&base.circuit, &keep)?;
    let s = &run.state;
    let flag = 1usize << s.position(base.flag)?;
    let stray: f64 =
        s.amplitudes().iter().enumerate().filter(|(i, _)| i & flag == 0 && i & !flag != 0).map(|(_, a)| a.norm_sqr()).sum();
    if stray > 1e-10 {
        return Err(PrimError::Precondition(format!("unmarked branch is not |0…0⟩ (stray mass {stray:e})")));
    }
    Ok(())
}

/// Amplifies a marked preparation whose unmarked branch is `|0…0⟩|0⟩` by running `⌈1/α⌉` copies
/// in parallel, amplifying the event that exactly one copy is marked, and gathering that copy's
/// data into a fresh register `"T"` with W-controlled swaps.
pub fn parallel_amplify(base: &MarkedPreparation) -> Result<Circuit, PrimError> {
    let t = copies_needed(&base.alpha)?;
    check_zero_bad_branch(base)?;
    let width = base.data.len();
    let budget = base.circuit.metadata().fanout_budget.max(width);
    let mut b = CircuitBuilder::new(budget);
    copy_metadata(&mut b, width);
    let maps: Vec<_> = (1..=t).map(|i| b.bind(&base.circuit, &[], &format!("copy{i}"))).collect::<Result<_, _>>()?;
    let flags: Vec<QubitId> = maps.iter().map(|m| m.get(base.flag)).collect();
    let slots: Vec<Vec<QubitId>> = maps.iter().map(|m| base.data.qubits.iter().map(|&q| m.get(q)).collect()).collect();
    let a0 = b.qubit("a0");
    let parts: Vec<_> = maps.iter().map(|m| (&base.circuit, m)).collect();
    b.embed_parallel(&parts, false)?;
    let mut marker = flags.clone();
    marker.push(a0);
    b.gate(Gate::library(LibraryGate::threshold(t, 1), marker.clone())?)?;
    if t >= 2 {
        b.gate(Gate::library(LibraryGate::threshold(t, 2), marker)?)?;
    }
    let marked = b.finish();
    let data = crate::ir::Register::new("copies.flags", flags.clone());
    let p_star = binomial_one(t, &base.alpha);
    let mp = MarkedPreparation { circuit: marked, data, flag: a0, alpha: p_star, site: format!("{}.parallel", base.site) };
    let amplified = amplify_to_exact(&mp)?;

    let mut b = CircuitBuilder::new(budget);
    copy_metadata(&mut b, width);
    let map = b.import(&amplified);
    let target = b.register("T", width);
    b.embed(&amplified, &map, false)?;
    let flags: Vec<QubitId> = flags.iter().map(|&q| map.get(q)).collect();
    let mut swap_qubits = flags.clone();
    for s in &slots {
        swap_qubits.extend(s.iter().map(|&q| map.get(q)));
    }
    swap_qubits.extend(target.iter().copied());
    b.gate(Gate::library(LibraryGate::w_swap(t, width), swap_qubits)?)?;
    b.gate(Gate::library(LibraryGate::w_state(t).adjoint(), flags)?)?;
    Ok(b.finish())
}
