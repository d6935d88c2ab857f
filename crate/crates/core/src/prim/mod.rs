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


//! Circuit builders for amplification, amplitude adjustment, one-hot machinery and controlled
//! constructions.
//!
//! Builders are pure functions returning a [`Circuit`]. Registers keep stable names so callers can
//! locate data: a builder's data register is `"T"` unless documented otherwise, and every other
//! register is an ancilla that starts and ends in `|0⟩`. Most builders come in two forms, the
//! explicit circuit and a [`LibraryGate`] carrying the same map with the explicit circuit's depth
//! and fanout width, so larger constructions can compose them without simulating every level.

mod amplify;
mod control;
mod gadgets;
mod onehot;
#[cfg(test)]
mod tests;

use std::cell::Cell;

use thiserror::Error;

use crate::ir::{
    Circuit, CircuitBuilder, Gate, IrError, LibraryGate, PrepBranch, PrepTable, Promise, QubitId, Register, Semantic,
    Weight, C64,
};
use crate::sim::{run_lazy, SimError};

pub use amplify::{
    adjust_amplitudes, amplify_to_exact, amplify_to_exact_with, exact_grover, grover_schedule, parallel_amplify,
    GroverSchedule, DEFAULT_FLOOR, PARALLEL_CAP,
};
pub use control::{
    ctrl_circuit, ctrl_dicke, ctrl_dicke_semantic, ctrl_from_zero_overlap, ctrl_from_zero_overlap_with, ctrl_state,
    OVERLAP_FLOOR,
};
pub use gadgets::{custom_threshold, custom_threshold_semantic, ham_gadget, ham_semantic};
pub use onehot::{onehot_dist_base, prepare_onehot_dist, prepare_small_state};

/// Qubit count up to which builders verify their preconditions by simulation.
pub const PRECHECK_QUBITS: usize = 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PrimError {
    #[error("marked mass {alpha} is not sin²(π/2r) for an odd r; use amplify_to_exact")]
    NotExactAngle { alpha: f64 },
    #[error("marked mass is zero, nothing to amplify")]
    NothingToAmplify,
    #[error("marked mass {alpha} is below the floor {floor}")]
    BelowFloor { alpha: f64, floor: f64 },
    #[error("invalid weights: {0}")]
    Weights(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Ir(#[from] IrError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// A circuit preparing `√α|ψ⟩|1⟩ + √(1−α)|bad⟩|0⟩`, the last factor being `flag`.
#[derive(Clone, Debug)]
pub struct MarkedPreparation {
    pub circuit: Circuit,
    pub data: Register,
    pub flag: QubitId,
    pub alpha: Weight,
    /// Name under which amplifications of this preparation are recorded.
    pub site: String,
}

impl MarkedPreparation {
    /// Looks up the data register and the single-qubit flag register by name.
    pub fn new(circuit: Circuit, data: &str, flag: &str, alpha: Weight) -> Result<MarkedPreparation, PrimError> {
        let data = circuit.register(data)?.clone();
        let flag_reg = circuit.register(flag)?;
        if flag_reg.len() != 1 {
            return Err(IrError::Arity { kind: flag.to_string(), expected: "1".into(), found: flag_reg.len() }.into());
        }
        let flag = flag_reg.qubits[0];
        Ok(MarkedPreparation { circuit, data, flag, alpha, site: "amplify".into() })
    }

    pub fn at(mut self, site: impl Into<String>) -> MarkedPreparation {
        self.site = site.into();
        self
    }

    /// Probability of `flag = 1` on the output, by simulation.
    pub fn measured_alpha(&self) -> Result<f64, PrimError> {
        let run = run_lazy(&self.circuit, &[self.flag])?;
        Ok(run.state.marginal(&[self.flag])?[1] * (1.0 - run.released_mass))
    }
}

thread_local! {
    static SKELETON: Cell<bool> = const { Cell::new(false) };
}

/// Runs `f` with every amplification built with zero rounds.
///
/// The resulting circuits are wrong as state preparations; their cost reports isolate the part of
/// the cost that does not depend on round counts.
pub fn skeleton<T>(f: impl FnOnce() -> T) -> T {
    let prev = SKELETON.with(|s| s.replace(true));
    let out = f();
    SKELETON.with(|s| s.set(prev));
    out
}

pub(crate) fn skeleton_mode() -> bool {
    SKELETON.with(|s| s.get())
}

/// `out ^= [|x| ≥ k]` on `[x (n), out]`.
pub fn threshold_gate(n: usize, k: usize) -> LibraryGate {
    LibraryGate::threshold(n, k)
}

/// `out ^= [|x| = k]` on `[x (n), out]`.
pub fn exact_gate(n: usize, k: usize) -> LibraryGate {
    LibraryGate::exact(n, k)
}

/// Binary `i` on `bits` qubits to `e_i` on `slots` qubits; `0` maps to the zero string.
pub fn one_hot(bits: usize, slots: usize) -> LibraryGate {
    LibraryGate::one_hot(bits, slots, 0)
}

/// Swaps `Q_i` with `Q*` when the control register holds `e_i`.
pub fn w_controlled_swap(t: usize, width: usize) -> LibraryGate {
    LibraryGate::w_swap(t, width)
}

/// `(|0^n⟩ + |W_n⟩)/√2` on register `"T"`.
pub fn build_zero_w(n: usize) -> Result<Circuit, PrimError> {
    library_circuit(LibraryGate::zero_w(n), n)
}

/// A one-gate circuit applying `lib` to a fresh register `"T"` of `len` qubits.
pub fn library_circuit(lib: LibraryGate, len: usize) -> Result<Circuit, PrimError> {
    let mut b = CircuitBuilder::new(lib.declared_width.max(1));
    let t = b.register("T", len);
    b.gate(Gate::library(lib, t)?)?;
    Ok(b.finish())
}

/// Library gate for `semantic` charged with the depth and fanout width of `explicit`.
pub fn semantic_of(tag: &str, explicit: &Circuit, semantic: Semantic) -> LibraryGate {
    let cost = explicit.cost();
    LibraryGate::new(tag, semantic, cost.depth, cost.max_fanout_width)
}

/// Prep semantic with explicit control branches, charged with the cost of `explicit`.
pub fn prep_semantic(
    tag: &str,
    explicit: &Circuit,
    control_bits: usize,
    target_bits: usize,
    branches: Vec<(u64, Vec<(u64, C64)>)>,
    promise: Promise,
) -> LibraryGate {
    let branches = branches.into_iter().map(|(control, state)| PrepBranch { control, state }).collect();
    semantic_of(tag, explicit, Semantic::Prep(PrepTable { control_bits, target_bits, branches, promise }))
}

/// Sparse nonzero entries of a dense amplitude vector.
pub fn sparse(amps: &[C64]) -> Vec<(u64, C64)> {
    amps.iter().enumerate().filter(|(_, a)| a.norm() > 0.0).map(|(i, a)| (i as u64, *a)).collect()
}

pub(crate) fn copy_metadata(b: &mut CircuitBuilder, data_len: usize) {
    b.metadata_mut().n = data_len;
}
