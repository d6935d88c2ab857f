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

//! Gate kernels.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::OnceLock;

use crate::ir::{Gate, GateKind, LibraryGate, Mat2, PrepTable, Semantic, C64};

use super::state::{StateVector, AMP_EPS};
use super::SimError;

/// Environment variable selecting the worker count for large kernels.
pub const WORKERS_ENV: &str = "QACZ_WORKERS";

static WORKERS: OnceLock<AtomicUsize> = OnceLock::new();

fn workers_cell() -> &'static AtomicUsize {
    WORKERS.get_or_init(|| {
        let n = std::env::var(WORKERS_ENV).ok().and_then(|v| v.parse().ok()).unwrap_or(1usize);
        AtomicUsize::new(n.max(1))
    })
}

pub fn workers() -> usize {
    workers_cell().load(Ordering::Relaxed)
}

pub fn set_workers(n: usize) {
    workers_cell().store(n.max(1), Ordering::Relaxed);
}

/// Below this many amplitudes kernels always run on the calling thread.
const PARALLEL_MIN: usize = 1 << 14;

/// Tolerance on the norm after every gate.
pub const NORM_TOL: f64 = 1e-10;

fn mask_of(s: &StateVector, qs: &[crate::ir::QubitId]) -> Result<usize, SimError> {
    let mut m = 0usize;
    for q in qs {
        m |= 1 << s.position(*q)?;
    }
    Ok(m)
}

fn positions(s: &StateVector, qs: &[crate::ir::QubitId]) -> Result<Vec<usize>, SimError> {
    qs.iter().map(|q| s.position(*q)).collect()
}

/// Applies `m` to target bit `t` on every pair whose control bits are all set.
fn kernel_2x2(amps: &mut [C64], t: usize, cmask: usize, m: &Mat2) {
    let block = 2usize << t;
    let half = 1usize << t;
    let run = |base: usize, chunk: &mut [C64]| {
        for (bi, blk) in chunk.chunks_mut(block).enumerate() {
            let offset = base + bi * block;
            let (lo, hi) = blk.split_at_mut(half);
            for (i, (a0, a1)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
                if (offset + i) & cmask != cmask {
                    continue;
                }
                let (x, y) = (*a0, *a1);
                *a0 = m[0][0] * x + m[0][1] * y;
                *a1 = m[1][0] * x + m[1][1] * y;
            }
        }
    };
    let w = workers();
    let blocks = amps.len() / block;
    if w <= 1 || amps.len() < PARALLEL_MIN || blocks < 2 {
        run(0, amps);
        return;
    }
    let per = blocks.div_ceil(w) * block;
    std::thread::scope(|scope| {
        for (ci, chunk) in amps.chunks_mut(per).enumerate() {
            let run = &run;
            scope.spawn(move || run(ci * per, chunk));
        }
    });
}

/// Moves every nonzero amplitude with all controls set from `i` to `partner(i)`.
///
/// `partner` must be a bijection on the indices it accepts. An index it rejects (`None`) is an
/// error when it carries more than [`AMP_EPS`] of amplitude and is dropped otherwise; the offending
/// index is returned.
fn permute_sparse(amps: &mut [C64], cmask: usize, partner: impl Fn(usize) -> Option<usize>) -> Result<(), usize> {
    let zero = C64::new(0.0, 0.0);
    let mut moves = Vec::new();
    for (i, a) in amps.iter().enumerate() {
        if *a == zero || i & cmask != cmask {
            continue;
        }
        match partner(i) {
            Some(j) if j == i => {}
            Some(j) => moves.push((i, j, *a)),
            None if a.norm() > AMP_EPS => return Err(i),
            None => moves.push((i, usize::MAX, *a)),
        }
    }
    for &(i, _, _) in &moves {
        amps[i] = zero;
    }
    for (_, j, a) in moves {
        if j != usize::MAX {
            amps[j] = a;
        }
    }
    Ok(())
}

fn reflection(amps: &mut [C64], tpos: &[usize], cmask: usize, states: &[[C64; 2]]) {
    let tmask: usize = tpos.iter().map(|p| 1usize << p).sum();
    // Support of the product state as (offset, amplitude), built one qubit at a time.
    let mut support = vec![(0usize, C64::new(1.0, 0.0))];
    for (p, st) in tpos.iter().zip(states) {
        let mut next = Vec::with_capacity(support.len() * 2);
        for &(o, a) in &support {
            for (bit, amp) in st.iter().enumerate() {
                if amp.norm() > 0.0 {
                    next.push((o | bit << p, a * amp));
                }
            }
        }
        support = next;
    }
    for base in 0..amps.len() {
        if base & tmask != 0 || base & cmask != cmask {
            continue;
        }
        let overlap: C64 = support.iter().map(|&(o, t)| t.conj() * amps[base | o]).sum();
        if overlap.norm() == 0.0 {
            continue;
        }
        for &(o, t) in &support {
            amps[base | o] -= 2.0 * t * overlap;
        }
    }
}

/// Unit vector `u` and phase `e^{iφ}` with `V = (I − 2uu†)·diag(e^{iφ}, 1, …)` and `V|0⟩ = ψ`.
fn householder(state: &[(u64, C64)]) -> (Vec<(u64, C64)>, C64) {
    let psi0: C64 = state.iter().filter(|(i, _)| *i == 0).map(|(_, a)| *a).sum();
    let phase = if psi0.norm() > 0.0 { psi0 / psi0.norm() } else { C64::new(1.0, 0.0) };
    let mut u: Vec<(u64, C64)> = state.iter().filter(|(i, _)| *i != 0).map(|(i, a)| (*i, -a / phase)).collect();
    u.push((0, C64::new(1.0 - psi0.norm(), 0.0)));
    let norm = u.iter().map(|(_, a)| a.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-15 {
        return (Vec::new(), phase);
    }
    u.iter_mut().for_each(|(_, a)| *a /= norm);
    (u, phase)
}

/// Control value, reflection vector at state offsets, and phase of one branch.
type PreparedBranch = (u64, Vec<(usize, C64)>, C64);

fn prep(s: &mut StateVector, lib: &LibraryGate, table: &PrepTable, gate: &Gate, cmask: usize) -> Result<(), SimError> {
    let pos = positions(s, &gate.targets)?;
    let (cpos, tpos) = pos.split_at(table.control_bits);
    let tmask: usize = tpos.iter().map(|p| 1usize << p).sum();
    let offset = |local: u64| -> usize { tpos.iter().enumerate().map(|(b, p)| ((local >> b & 1) as usize) << p).sum() };
    let prepared: Vec<PreparedBranch> = table
        .branches
        .iter()
        .map(|b| {
            let (u, phase) = householder(&b.state);
            (b.control, u.into_iter().map(|(l, a)| (offset(l), a)).collect(), phase)
        })
        .collect();
    let block: Vec<usize> = (0..1u64 << tpos.len()).map(offset).collect();
    let amps = s.amps_mut();
    for base in 0..amps.len() {
        if base & tmask != 0 || base & cmask != cmask {
            continue;
        }
        let control: u64 = cpos.iter().enumerate().map(|(b, p)| ((base >> p & 1) as u64) << b).sum();
        if lib.semantic.prep_violation(control) {
            if block.iter().any(|o| amps[base | o].norm() > AMP_EPS) {
                return Err(SimError::DomainViolation { tag: lib.tag.clone(), input: format!("control value {control:#b}") });
            }
            continue;
        }
        let Some((_, u, phase)) = prepared.iter().find(|(c, _, _)| *c == control) else { continue };
        if !lib.adjoint {
            amps[base] *= phase;
        }
        let overlap: C64 = u.iter().map(|(o, a)| a.conj() * amps[base | o]).sum();
        for (o, a) in u {
            amps[base | o] -= 2.0 * a * overlap;
        }
        if lib.adjoint {
            amps[base] *= phase.conj();
        }
    }
    Ok(())
}

pub(super) fn apply_gate(s: &mut StateVector, g: &Gate) -> Result<(), SimError> {
    let cmask = mask_of(s, &g.controls)?;
    let tpos = positions(s, &g.targets)?;
    match &g.kind {
        GateKind::Unitary(m) | GateKind::Controlled(m) => kernel_2x2(s.amps_mut(), tpos[0], cmask, m),
        GateKind::ProductReflection(states) => reflection(s.amps_mut(), &tpos, cmask, states),
        GateKind::And | GateKind::Or | GateKind::Nor => {
            let (inputs, out) = tpos.split_at(tpos.len() - 1);
            let imask: usize = inputs.iter().map(|p| 1usize << p).sum();
            let obit = 1usize << out[0];
            let fire = |i: usize| match g.kind {
                GateKind::And => i & imask == imask,
                GateKind::Or => i & imask != 0,
                _ => i & imask == 0,
            };
            permute_sparse(s.amps_mut(), cmask, |i| Some(if fire(i) { i ^ obit } else { i })).expect("total map");
        }
        GateKind::Fanout { .. } => {
            let src = 1usize << tpos[0];
            let copies: usize = tpos[1..].iter().map(|p| 1usize << p).sum();
            permute_sparse(s.amps_mut(), cmask, |i| Some(if i & src != 0 { i ^ copies } else { i })).expect("total map");
        }
        GateKind::Swap => {
            let (a, b) = (tpos[0], tpos[1]);
            permute_sparse(s.amps_mut(), cmask, |i| {
                Some(if (i >> a & 1) != (i >> b & 1) { i ^ (1 << a) ^ (1 << b) } else { i })
            })
            .expect("total map");
        }
        GateKind::Library(lib) => match &lib.semantic {
            Semantic::Prep(table) => prep(s, lib, table, g, cmask)?,
            sem => {
                let offsets: Vec<usize> = tpos.iter().map(|p| 1usize << p).collect();
                let tmask: usize = offsets.iter().sum();
                let local_of = |i: usize| -> u64 { tpos.iter().enumerate().map(|(b, p)| ((i >> p & 1) as u64) << b).sum() };
                let moved = permute_sparse(s.amps_mut(), cmask, |i| {
                    sem.permute(local_of(i)).ok().map(|img| {
                        let spread: usize =
                            offsets.iter().enumerate().filter(|(b, _)| img >> b & 1 == 1).map(|(_, o)| *o).sum();
                        (i & !tmask) | spread
                    })
                });
                if let Err(i) = moved {
                    return Err(SimError::DomainViolation {
                        tag: lib.tag.clone(),
                        input: format!("local input {:#b}", local_of(i)),
                    });
                }
            }
        },
    }
    let drift = (s.norm() - 1.0).abs();
    if drift > NORM_TOL {
        return Err(SimError::NormDrift(drift));
    }
    Ok(())
}
