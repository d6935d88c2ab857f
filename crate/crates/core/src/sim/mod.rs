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

//! Exact statevector simulation, fidelity, cleanness checks and gadget certification.

mod apply;
mod state;

use thiserror::Error;

use crate::ir::{Circuit, CircuitBuilder, Gate, IrError, LibraryGate, QubitId, Register, C64};

pub use apply::{set_workers, workers, NORM_TOL, WORKERS_ENV};
pub use state::{DumpRow, StateVector, AMP_EPS};

/// Fidelity threshold for exact constructions and for cleanness.
pub const CLEAN_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("qubit {0} is not part of the state")]
    UnknownQubit(QubitId),
    #[error("amplitude array of length {found}, expected {expected}")]
    Length { expected: usize, found: usize },
    #[error("norm drifted by {0:e}")]
    NormDrift(f64),
    #[error("qubit sets differ: {0}")]
    QubitMismatch(String),
    #[error("library gate {tag} applied outside its domain at {input}")]
    DomainViolation { tag: String, input: String },
    #[error(transparent)]
    Ir(#[from] IrError),
}

/// Applies one gate, returning the new state.
pub fn apply(s: &StateVector, g: &Gate) -> Result<StateVector, SimError> {
    let mut out = s.clone();
    apply_in_place(&mut out, g)?;
    Ok(out)
}

pub fn apply_in_place(s: &mut StateVector, g: &Gate) -> Result<(), SimError> {
    apply::apply_gate(s, g)
}

/// Runs every layer of `c` in order. `input` may carry qubits the circuit does not touch.
pub fn run(c: &Circuit, input: &StateVector) -> Result<StateVector, SimError> {
    let mut s = input.clone();
    run_in_place(c, &mut s)?;
    Ok(s)
}

pub fn run_in_place(c: &Circuit, s: &mut StateVector) -> Result<(), SimError> {
    for q in c.qubits() {
        s.position(q)?;
    }
    for layer in c.layers() {
        for g in layer {
            apply::apply_gate(s, g)?;
        }
    }
    Ok(())
}

/// Runs `c` on `|0…0⟩` over all of its qubits.
pub fn run_from_zero(c: &Circuit) -> Result<StateVector, SimError> {
    run(c, &StateVector::zero(&c.qubits()))
}

/// `|⟨target|s⟩|²`, independent of qubit order.
pub fn fidelity(s: &StateVector, target: &StateVector) -> Result<f64, SimError> {
    Ok(target.inner(s)?.norm_sqr())
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationResult {
    pub fidelity: f64,
    pub clean: bool,
    pub residual_ancilla_mass: f64,
}

impl VerificationResult {
    pub fn passed(&self) -> bool {
        self.clean && self.fidelity >= 1.0 - CLEAN_TOL
    }
}

/// Outcome of [`run_lazy`].
#[derive(Clone, Debug)]
pub struct LazyRun {
    /// State of the kept qubits and of every qubit still live at the end.
    pub state: StateVector,
    pub released: Vec<QubitId>,
    /// Total excited mass projected away when qubits were released.
    pub released_mass: f64,
}

/// Excited mass up to which [`run_lazy`] releases a qubit after its last use.
pub const RELEASE_TOL: f64 = 1e-10;

/// Runs `c` on zeros, allocating each qubit at its first use and releasing it after its last use
/// when it is back in `|0⟩` (up to [`RELEASE_TOL`]) and not in `keep`. Dirty qubits stay
/// live. Peak memory follows the live-qubit count rather than the total.
pub fn run_lazy(c: &Circuit, keep: &[QubitId]) -> Result<LazyRun, SimError> {
    let mut last = std::collections::BTreeMap::new();
    for (i, layer) in c.layers().enumerate() {
        for g in layer {
            for q in g.qubits() {
                last.insert(q, i);
            }
        }
    }
    let mut s = StateVector::zero(&[]);
    let mut released = Vec::new();
    let mut survive = 1.0f64;
    for (i, layer) in c.layers().enumerate() {
        let fresh: Vec<QubitId> = layer.iter().flat_map(|g| g.qubits()).filter(|q| !s.contains(*q)).collect();
        if !fresh.is_empty() {
            s = s.extend_zero(&fresh)?;
        }
        for g in layer {
            apply::apply_gate(&mut s, g)?;
        }
        let mut done = Vec::new();
        for q in layer.iter().flat_map(|g| g.qubits()) {
            if last[&q] == i && !keep.contains(&q) && s.excited_mass(&[q])? <= RELEASE_TOL {
                done.push(q);
            }
        }
        if !done.is_empty() {
            survive *= 1.0 - s.release(&done)?;
            released.extend(done);
        }
    }
    let s = s.extend_zero(keep)?;
    Ok(LazyRun { state: s, released, released_mass: 1.0 - survive })
}

/// Runs `c` on zeros and compares with `target ⊗ |0…0⟩`, the target living on `target_register`.
pub fn check_clean_preparation(
    c: &Circuit,
    target_register: &Register,
    target: &StateVector,
) -> Result<VerificationResult, SimError> {
    let keep = &target_register.qubits;
    let lazy = run_lazy(c, keep)?;
    let out = lazy.state;
    let target = target.reorder(keep)?;
    let full = target.extend_zero(out.qubit_order())?;
    let ancillas: Vec<QubitId> = out.qubit_order().iter().copied().filter(|q| !keep.contains(q)).collect();
    let survive = 1.0 - lazy.released_mass;
    let residual = lazy.released_mass + survive * out.excited_mass(&ancillas)?;
    Ok(VerificationResult {
        fidelity: fidelity(&out, &full)? * survive,
        clean: residual < CLEAN_TOL,
        residual_ancilla_mass: residual,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub inputs_checked: usize,
    pub min_fidelity: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CertifyError {
    #[error("explicit and semantic forms disagree on input {input} (fidelity {fidelity})")]
    Mismatch { input: String, fidelity: f64 },
    #[error("simulation failed on input {input}: {source}")]
    Sim { input: String, source: SimError },
    #[error("no domain inputs given")]
    Empty,
}

fn input_name(ports: usize, v: u64) -> String {
    (0..ports).map(|b| if v >> b & 1 == 1 { '1' } else { '0' }).collect()
}

/// Checks that `explicit` acts like `reference` on the given domain inputs.
///
/// `reference` acts on `ports` (its sorted qubits are mapped onto `ports` in order); every other
/// qubit of `explicit` starts in `|0⟩` and must return there. Inputs are port values with bit `b`
/// on `ports[b]`. Each basis input is checked, then their uniform superposition to catch relative
/// phases.
pub fn certify(explicit: &Circuit, ports: &[QubitId], reference: &Circuit, inputs: &[u64]) -> Result<Certificate, CertifyError> {
    if inputs.is_empty() {
        return Err(CertifyError::Empty);
    }
    let ref_qubits = reference.qubits();
    let to_port = |q: QubitId| ports[ref_qubits.binary_search(&q).expect("reference qubit")];
    let order = explicit.qubits();
    let sim = |input: &str, f: &dyn Fn() -> Result<f64, SimError>| {
        f().map_err(|source| CertifyError::Sim { input: input.to_string(), source })
    };
    let compare = |start: &StateVector| -> Result<f64, SimError> {
        let a = run(explicit, start)?;
        let mut b = start.clone();
        for layer in reference.layers() {
            for g in layer {
                apply_in_place(&mut b, &g.remap(&to_port))?;
            }
        }
        fidelity(&a, &b)
    };
    let mut min_fidelity = 1.0f64;
    for &v in inputs {
        let name = input_name(ports.len(), v);
        let f = sim(&name, &|| {
            let start = StateVector::basis(&order, StateVector::zero(&order).index_of(ports, v)?);
            compare(&start)
        })?;
        if f < 1.0 - CLEAN_TOL {
            return Err(CertifyError::Mismatch { input: name, fidelity: f });
        }
        min_fidelity = min_fidelity.min(f);
    }
    if inputs.len() > 1 {
        let name = "uniform superposition of domain inputs".to_string();
        let f = sim(&name, &|| {
            let probe = StateVector::zero(&order);
            let entries: Vec<(usize, C64)> =
                inputs.iter().map(|&v| probe.index_of(ports, v).map(|i| (i, C64::new(1.0, 0.0)))).collect::<Result<_, _>>()?;
            compare(&StateVector::from_sparse(&order, &entries)?)
        })?;
        if f < 1.0 - CLEAN_TOL {
            return Err(CertifyError::Mismatch { input: name, fidelity: f });
        }
        min_fidelity = min_fidelity.min(f);
    }
    Ok(Certificate { inputs_checked: inputs.len(), min_fidelity })
}

/// [`certify`] against a single library gate acting on `ports`.
pub fn certify_library_gate(
    explicit: &Circuit,
    ports: &[QubitId],
    semantic: &LibraryGate,
    inputs: &[u64],
) -> Result<Certificate, CertifyError> {
    let mut b = CircuitBuilder::new(1);
    let local = b.register("ports", ports.len());
    b.gate(Gate::library(semantic.clone(), local).map_err(|e| CertifyError::Sim { input: "gate".into(), source: e.into() })?)
        .map_err(|e| CertifyError::Sim { input: "gate".into(), source: e.into() })?;
    certify(explicit, ports, &b.finish(), inputs)
}

#[cfg(test)]
mod tests;
