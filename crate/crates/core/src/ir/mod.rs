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

//! Circuit intermediate representation: qubits, registers, gates, layered circuits and costs.

mod format;
mod gate;
mod library;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use thiserror::Error;

pub use format::{deserialize, serialize, ParseError, FORMAT_VERSION};
pub use gate::*;
pub use library::{
    concat, cost_table, dicke_support, LibraryGate, PrepBranch, PrepTable, Promise, Semantic, Violation,
    WeightTest,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IrError {
    #[error("registers overlap on {0}")]
    OverlappingRegisters(QubitId),
    #[error("duplicate register name {0:?}")]
    DuplicateRegister(String),
    #[error("qubit {qubit} used by more than one gate in layer {layer}")]
    LayerCollision { layer: usize, qubit: QubitId },
    #[error("unknown qubit {0}")]
    UnknownQubit(QubitId),
    #[error("unknown register {0:?}")]
    UnknownRegister(String),
    #[error("fanout of width {width} exceeds budget {budget} without the widened flag")]
    FanoutOverBudget { width: usize, budget: usize },
    #[error("fanout budget must be at least 1")]
    EmptyBudget,
    #[error("{kind} gate expects {expected} targets, found {found}")]
    Arity { kind: String, expected: String, found: usize },
    #[error("controlled matrix is not Hermitian (defect {0:e})")]
    NotHermitian(f64),
    #[error("matrix is not unitary (defect {0:e})")]
    NotUnitary(f64),
    #[error("controlled gate without controls")]
    MissingControl,
    #[error("gate cannot be controlled: {0}")]
    NotControllable(String),
    #[error("{0} gate repeats a qubit")]
    RepeatedQubit(String),
    #[error("invalid library semantic: {0}")]
    BadSemantic(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Register {
    pub name: String,
    pub qubits: Vec<QubitId>,
}

impl Register {
    pub fn new(name: impl Into<String>, qubits: Vec<QubitId>) -> Register {
        Register { name: name.into(), qubits }
    }

    /// A register over the contiguous ids `start..start+len`.
    pub fn span(name: impl Into<String>, start: usize, len: usize) -> Register {
        Register::new(name, (start..start + len).map(QubitId).collect())
    }

    pub fn len(&self) -> usize {
        self.qubits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.qubits.is_empty()
    }
}

/// A probability recorded exactly when it is rational.
#[derive(Clone, Debug, PartialEq)]
pub enum Weight {
    Exact(BigRational),
    Approx(f64),
}

impl Weight {
    pub fn value(&self) -> f64 {
        match self {
            Weight::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Weight::Approx(x) => *x,
        }
    }
}

/// One amplification performed directly by a builder.
#[derive(Clone, Debug, PartialEq)]
pub struct AmpRecord {
    pub site: String,
    pub alpha: Weight,
    pub rounds: usize,
    /// Layers added by each round.
    pub round_layers: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Metadata {
    pub n: usize,
    pub k: usize,
    pub ell: usize,
    pub fanout_budget: usize,
    /// Rounds executed over the whole circuit, counting repeated embeddings.
    pub grover_rounds: usize,
    pub amplifications: Vec<AmpRecord>,
    /// Symmetric-state weights, when the circuit targets one.
    pub eta: Option<Vec<C64>>,
}

impl Metadata {
    pub fn with_budget(fanout_budget: usize) -> Metadata {
        Metadata { n: 0, k: 0, ell: 0, fanout_budget, grover_rounds: 0, amplifications: Vec::new(), eta: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostReport {
    pub qubits: usize,
    pub layers: usize,
    /// Layer count with library gates charged their declared depth.
    pub depth: usize,
    pub ancilla_count: usize,
    pub max_fanout_width: usize,
    pub grover_rounds: usize,
}

/// An immutable layered circuit. Layers are shared, so appending is cheap.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    registers: Vec<Register>,
    layers: Vec<Arc<Vec<Gate>>>,
    metadata: Metadata,
    qubits: BTreeSet<QubitId>,
}

fn check_registers(registers: &[Register]) -> Result<BTreeSet<QubitId>, IrError> {
    let mut seen = BTreeSet::new();
    let mut names = BTreeSet::new();
    for r in registers {
        if !names.insert(r.name.as_str()) {
            return Err(IrError::DuplicateRegister(r.name.clone()));
        }
        for &q in &r.qubits {
            if !seen.insert(q) {
                return Err(IrError::OverlappingRegisters(q));
            }
        }
    }
    Ok(seen)
}

fn check_layer(
    qubits: &BTreeSet<QubitId>,
    budget: usize,
    layer_index: usize,
    gates: &[Gate],
) -> Result<(), IrError> {
    let mut used = BTreeSet::new();
    for g in gates {
        g.validate()?;
        if let GateKind::Fanout { width, widened } = g.kind {
            if width > budget && !widened {
                return Err(IrError::FanoutOverBudget { width, budget });
            }
        }
        for q in g.qubits() {
            if !qubits.contains(&q) {
                return Err(IrError::UnknownQubit(q));
            }
            if !used.insert(q) {
                return Err(IrError::LayerCollision { layer: layer_index, qubit: q });
            }
        }
    }
    Ok(())
}

impl Circuit {
    pub fn new(registers: Vec<Register>, fanout_budget: usize) -> Result<Circuit, IrError> {
        if fanout_budget == 0 {
            return Err(IrError::EmptyBudget);
        }
        let qubits = check_registers(&registers)?;
        Ok(Circuit { registers, layers: Vec::new(), metadata: Metadata::with_budget(fanout_budget), qubits })
    }

    /// A new circuit with one more layer; `self` is left untouched.
    pub fn append_layer(&self, gates: Vec<Gate>) -> Result<Circuit, IrError> {
        check_layer(&self.qubits, self.metadata.fanout_budget, self.layers.len(), &gates)?;
        let mut next = self.clone();
        next.layers.push(Arc::new(gates));
        Ok(next)
    }

    pub(crate) fn from_parts(
        registers: Vec<Register>,
        layers: Vec<Vec<Gate>>,
        metadata: Metadata,
    ) -> Result<Circuit, IrError> {
        let mut c = Circuit::new(registers, metadata.fanout_budget.max(1))?;
        for (i, gates) in layers.iter().enumerate() {
            check_layer(&c.qubits, c.metadata.fanout_budget, i, gates)?;
        }
        c.layers = layers.into_iter().map(Arc::new).collect();
        c.metadata = metadata;
        Ok(c)
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn register(&self, name: &str) -> Result<&Register, IrError> {
        self.registers.iter().find(|r| r.name == name).ok_or_else(|| IrError::UnknownRegister(name.to_string()))
    }

    pub fn layers(&self) -> impl Iterator<Item = &[Gate]> {
        self.layers.iter().map(|l| l.as_slice())
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    pub fn gate_count(&self) -> usize {
        self.layers.iter().map(|l| l.len()).sum()
    }

    pub fn qubits(&self) -> Vec<QubitId> {
        self.qubits.iter().copied().collect()
    }

    pub fn num_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn contains(&self, q: QubitId) -> bool {
        self.qubits.contains(&q)
    }

    pub fn metadata(&self) -> &Metadata {
        &self.metadata
    }

    pub fn with_metadata(mut self, metadata: Metadata) -> Circuit {
        self.metadata = metadata;
        self
    }

    pub fn cost(&self) -> CostReport {
        let mut depth = 0;
        let mut width = 0;
        for layer in &self.layers {
            depth += layer.iter().map(Gate::depth).max().unwrap_or(1);
            width = layer.iter().map(Gate::fanout_width).fold(width, usize::max);
        }
        CostReport {
            qubits: self.num_qubits(),
            layers: self.layers.len(),
            depth,
            ancilla_count: self.num_qubits().saturating_sub(self.metadata.n),
            max_fanout_width: width,
            grover_rounds: self.metadata.grover_rounds,
        }
    }

    /// The inverse circuit over the same registers.
    pub fn inverse(&self) -> Circuit {
        let mut c = self.clone();
        c.layers = self.layers.iter().rev().map(|l| Arc::new(l.iter().map(Gate::inverse).collect())).collect();
        c
    }
}

/// Maps the qubits of an embedded circuit onto the qubits of its host.
#[derive(Clone, Debug, Default)]
pub struct QubitMap(BTreeMap<QubitId, QubitId>);

impl QubitMap {
    pub fn get(&self, q: QubitId) -> QubitId {
        self.0[&q]
    }

    /// Host qubits of one child register, in order.
    pub fn register(&self, child: &Circuit, name: &str) -> Result<Vec<QubitId>, IrError> {
        Ok(child.register(name)?.qubits.iter().map(|&q| self.get(q)).collect())
    }

    pub fn host_qubits(&self) -> Vec<QubitId> {
        self.0.values().copied().collect()
    }
}

/// Mutable construction helper; every builder in the crate goes through it.
#[derive(Clone, Debug)]
pub struct CircuitBuilder {
    registers: Vec<Register>,
    layers: Vec<Vec<Gate>>,
    metadata: Metadata,
    qubits: BTreeSet<QubitId>,
    next: usize,
}

impl CircuitBuilder {
    pub fn new(fanout_budget: usize) -> CircuitBuilder {
        CircuitBuilder {
            registers: Vec::new(),
            layers: Vec::new(),
            metadata: Metadata::with_budget(fanout_budget.max(1)),
            qubits: BTreeSet::new(),
            next: 0,
        }
    }

    fn unique_name(&self, name: &str) -> String {
        if !self.registers.iter().any(|r| r.name == name) {
            return name.to_string();
        }
        (2..).map(|i| format!("{name}#{i}")).find(|c| !self.registers.iter().any(|r| &r.name == c)).unwrap()
    }

    /// Allocates a fresh register and returns its qubits.
    pub fn register(&mut self, name: &str, len: usize) -> Vec<QubitId> {
        let name = self.unique_name(name);
        let qubits: Vec<QubitId> = (self.next..self.next + len).map(QubitId).collect();
        self.next += len;
        self.qubits.extend(qubits.iter().copied());
        self.registers.push(Register::new(name, qubits.clone()));
        qubits
    }

    pub fn qubit(&mut self, name: &str) -> QubitId {
        self.register(name, 1)[0]
    }

    pub fn metadata_mut(&mut self) -> &mut Metadata {
        &mut self.metadata
    }

    pub fn metadata(&self) -> &Metadata {
        &self.metadata
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    pub fn layer(&mut self, gates: Vec<Gate>) -> Result<(), IrError> {
        if gates.is_empty() {
            return Ok(());
        }
        check_layer(&self.qubits, self.metadata.fanout_budget, self.layers.len(), &gates)?;
        self.layers.push(gates);
        Ok(())
    }

    pub fn gate(&mut self, g: Gate) -> Result<(), IrError> {
        self.layer(vec![g])
    }

    /// Binds child registers to host qubits; unbound child registers get fresh host registers
    /// named `prefix.name`.
    pub fn bind(&mut self, child: &Circuit, bindings: &[(&str, &[QubitId])], prefix: &str) -> Result<QubitMap, IrError> {
        let mut map = BTreeMap::new();
        for reg in child.registers() {
            let host = match bindings.iter().find(|(n, _)| *n == reg.name) {
                Some((_, qs)) => {
                    if qs.len() != reg.len() {
                        return Err(IrError::Arity { kind: reg.name.clone(), expected: reg.len().to_string(), found: qs.len() });
                    }
                    qs.to_vec()
                }
                None => self.register(&format!("{prefix}.{}", reg.name), reg.len()),
            };
            for (c, h) in reg.qubits.iter().zip(host) {
                map.insert(*c, h);
            }
        }
        for (name, _) in bindings {
            child.register(name)?;
        }
        self.metadata.amplifications.extend(child.metadata.amplifications.iter().cloned());
        Ok(QubitMap(map))
    }

    /// Adds every child register under the same name, keeping the child's qubit ids where they are
    /// free. Importing into an empty builder is therefore the identity map.
    pub fn import(&mut self, child: &Circuit) -> QubitMap {
        let mut map = BTreeMap::new();
        for reg in child.registers() {
            let host = if reg.qubits.iter().any(|q| self.qubits.contains(q)) {
                self.register(&reg.name, reg.len())
            } else {
                let name = self.unique_name(&reg.name);
                self.qubits.extend(reg.qubits.iter().copied());
                self.next = self.next.max(reg.qubits.iter().map(|q| q.0 + 1).max().unwrap_or(0));
                self.registers.push(Register::new(name, reg.qubits.clone()));
                reg.qubits.clone()
            };
            map.extend(reg.qubits.iter().copied().zip(host));
        }
        self.metadata.amplifications.extend(child.metadata.amplifications.iter().cloned());
        QubitMap(map)
    }

    /// Replays `child` (or its inverse) on host qubits, one host layer per child layer.
    pub fn embed(&mut self, child: &Circuit, map: &QubitMap, adjoint: bool) -> Result<(), IrError> {
        self.embed_parallel(&[(child, map)], adjoint)
    }

    /// Like [`CircuitBuilder::embed`], with `extra` host gates merged into the first replayed layer.
    pub fn embed_merged(&mut self, child: &Circuit, map: &QubitMap, adjoint: bool, extra: Vec<Gate>) -> Result<(), IrError> {
        self.replay(&[(child, map)], adjoint, extra)
    }

    /// Replays several children side by side, zipping their layers.
    pub fn embed_parallel(&mut self, parts: &[(&Circuit, &QubitMap)], adjoint: bool) -> Result<(), IrError> {
        self.replay(parts, adjoint, Vec::new())
    }

    fn replay(&mut self, parts: &[(&Circuit, &QubitMap)], adjoint: bool, mut extra: Vec<Gate>) -> Result<(), IrError> {
        let depth = parts.iter().map(|(c, _)| c.layer_count()).max().unwrap_or(0).max(usize::from(!extra.is_empty()));
        for i in 0..depth {
            let mut gates = std::mem::take(&mut extra);
            for (child, map) in parts {
                let n = child.layer_count();
                if i >= n {
                    continue;
                }
                let idx = if adjoint { n - 1 - i } else { i };
                for g in child.layers[idx].iter() {
                    let g = if adjoint { g.inverse() } else { g.clone() };
                    gates.push(g.remap(&|q| map.get(q)));
                }
            }
            self.layer(gates)?;
        }
        for (child, _) in parts {
            self.metadata.grover_rounds += child.metadata.grover_rounds;
        }
        Ok(())
    }

    pub fn finish(self) -> Circuit {
        Circuit {
            registers: self.registers,
            layers: self.layers.into_iter().map(Arc::new).collect(),
            metadata: self.metadata,
            qubits: self.qubits,
        }
    }
}
