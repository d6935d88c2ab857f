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

//! Dense statevectors over an ordered set of qubits.

use std::collections::BTreeSet;

use crate::ir::{QubitId, C64};

use super::SimError;

/// Amplitudes below this magnitude are treated as zero in dumps and domain checks.
pub const AMP_EPS: f64 = 1e-12;

/// `amps[i]` is the amplitude of the basis state whose bit `p` is the value of `order[p]`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    order: Vec<QubitId>,
    slots: Vec<usize>,
    amps: Vec<C64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DumpRow {
    pub bits: String,
    pub re: f64,
    pub im: f64,
}

fn slot_table(order: &[QubitId]) -> Vec<usize> {
    let top = order.iter().map(|q| q.0 + 1).max().unwrap_or(0);
    let mut slots = vec![usize::MAX; top];
    for (p, q) in order.iter().enumerate() {
        slots[q.0] = p;
    }
    slots
}

impl StateVector {
    /// `|0…0⟩` over `order`.
    pub fn zero(order: &[QubitId]) -> StateVector {
        StateVector::basis(order, 0)
    }

    pub fn basis(order: &[QubitId], index: usize) -> StateVector {
        let mut amps = vec![C64::new(0.0, 0.0); 1usize << order.len()];
        amps[index] = C64::new(1.0, 0.0);
        StateVector { order: order.to_vec(), slots: slot_table(order), amps }
    }

    pub fn from_amplitudes(order: &[QubitId], amps: Vec<C64>) -> Result<StateVector, SimError> {
        if amps.len() != 1usize << order.len() {
            return Err(SimError::Length { expected: 1usize << order.len(), found: amps.len() });
        }
        if order.iter().collect::<BTreeSet<_>>().len() != order.len() {
            return Err(SimError::QubitMismatch("repeated qubit in order".into()));
        }
        let s = StateVector { order: order.to_vec(), slots: slot_table(order), amps };
        let drift = (s.norm() - 1.0).abs();
        if drift > 1e-10 {
            return Err(SimError::NormDrift(drift));
        }
        Ok(s)
    }

    /// Builds a state from sparse `(index, amplitude)` entries, normalizing them.
    pub fn from_sparse(order: &[QubitId], entries: &[(usize, C64)]) -> Result<StateVector, SimError> {
        let mut amps = vec![C64::new(0.0, 0.0); 1usize << order.len()];
        for &(i, a) in entries {
            amps[i] += a;
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(SimError::NormDrift(1.0));
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        StateVector::from_amplitudes(order, amps)
    }

    pub fn qubit_order(&self) -> &[QubitId] {
        &self.order
    }

    pub fn num_qubits(&self) -> usize {
        self.order.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub(crate) fn amps_mut(&mut self) -> &mut Vec<C64> {
        &mut self.amps
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amps[index]
    }

    /// Bit position of a qubit in the amplitude index.
    pub fn position(&self, q: QubitId) -> Result<usize, SimError> {
        match self.slots.get(q.0) {
            Some(&p) if p != usize::MAX => Ok(p),
            _ => Err(SimError::UnknownQubit(q)),
        }
    }

    pub fn contains(&self, q: QubitId) -> bool {
        self.position(q).is_ok()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Global index of a basis state given per-qubit bits, `bits[i]` for `qubits[i]`.
    pub fn index_of(&self, qubits: &[QubitId], value: u64) -> Result<usize, SimError> {
        let mut idx = 0usize;
        for (i, q) in qubits.iter().enumerate() {
            if value >> i & 1 == 1 {
                idx |= 1 << self.position(*q)?;
            }
        }
        Ok(idx)
    }

    /// `self ⊗ other` with `other`'s qubits placed above `self`'s.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector, SimError> {
        if other.order.iter().any(|q| self.contains(*q)) {
            return Err(SimError::QubitMismatch("tensor factors share a qubit".into()));
        }
        let mut order = self.order.clone();
        order.extend_from_slice(&other.order);
        let shift = self.order.len();
        let mut amps = vec![C64::new(0.0, 0.0); 1usize << order.len()];
        for (j, b) in other.amps.iter().enumerate() {
            if *b == C64::new(0.0, 0.0) {
                continue;
            }
            for (i, a) in self.amps.iter().enumerate() {
                amps[(j << shift) | i] = a * b;
            }
        }
        Ok(StateVector { slots: slot_table(&order), order, amps })
    }

    /// Pads with `|0⟩` on every listed qubit not already present.
    pub fn extend_zero(&self, qubits: &[QubitId]) -> Result<StateVector, SimError> {
        let extra: Vec<QubitId> = qubits.iter().copied().filter(|q| !self.contains(*q)).collect();
        self.tensor(&StateVector::zero(&extra))
    }

    /// The same state with qubits listed in `order`, which must be a permutation of the current order.
    pub fn reorder(&self, order: &[QubitId]) -> Result<StateVector, SimError> {
        if order.len() != self.order.len() {
            return Err(SimError::QubitMismatch(format!("{} vs {} qubits", order.len(), self.order.len())));
        }
        let src: Vec<usize> = order.iter().map(|q| self.position(*q)).collect::<Result<_, _>>()?;
        if src.iter().collect::<BTreeSet<_>>().len() != src.len() {
            return Err(SimError::QubitMismatch("repeated qubit in order".into()));
        }
        let mut amps = vec![C64::new(0.0, 0.0); self.amps.len()];
        for (i, a) in self.amps.iter().enumerate() {
            let mut j = 0usize;
            for (p, s) in src.iter().enumerate() {
                j |= (i >> s & 1) << p;
            }
            amps[j] = *a;
        }
        Ok(StateVector { order: order.to_vec(), slots: slot_table(order), amps })
    }

    /// `⟨self|other⟩`, aligning qubit orders first.
    pub fn inner(&self, other: &StateVector) -> Result<C64, SimError> {
        let other = if other.order == self.order { other.clone() } else { other.reorder(&self.order)? };
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// Probability of each value of `qubits` (bit `i` of the value is `qubits[i]`).
    pub fn marginal(&self, qubits: &[QubitId]) -> Result<Vec<f64>, SimError> {
        let pos: Vec<usize> = qubits.iter().map(|q| self.position(*q)).collect::<Result<_, _>>()?;
        let mut probs = vec![0.0; 1usize << qubits.len()];
        for (i, a) in self.amps.iter().enumerate() {
            let mut v = 0usize;
            for (b, p) in pos.iter().enumerate() {
                v |= (i >> p & 1) << b;
            }
            probs[v] += a.norm_sqr();
        }
        Ok(probs)
    }

    /// Probability that at least one listed qubit reads 1.
    pub fn excited_mass(&self, qubits: &[QubitId]) -> Result<f64, SimError> {
        let mut mask = 0usize;
        for q in qubits {
            mask |= 1 << self.position(*q)?;
        }
        Ok(self.amps.iter().enumerate().filter(|(i, _)| i & mask != 0).map(|(_, a)| a.norm_sqr()).sum())
    }

    /// The state of `keep` when every other qubit is exactly `|0⟩`, or `None` if that is not the case
    /// within `tol` of probability mass.
    pub fn restrict_clean(&self, keep: &[QubitId], tol: f64) -> Result<Option<StateVector>, SimError> {
        let others: Vec<QubitId> = self.order.iter().copied().filter(|q| !keep.contains(q)).collect();
        if self.excited_mass(&others)? > tol {
            return Ok(None);
        }
        let pos: Vec<usize> = keep.iter().map(|q| self.position(*q)).collect::<Result<_, _>>()?;
        let mut amps = vec![C64::new(0.0, 0.0); 1usize << keep.len()];
        for (v, a) in amps.iter_mut().enumerate() {
            let mut i = 0usize;
            for (b, p) in pos.iter().enumerate() {
                i |= (v >> b & 1) << p;
            }
            *a = self.amps[i];
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|a| *a /= norm);
        Ok(Some(StateVector { order: keep.to_vec(), slots: slot_table(keep), amps }))
    }

    /// Projects the listed qubits onto `|0⟩`, removes them and renormalizes. Returns the excited
    /// mass that was discarded.
    pub fn release(&mut self, qubits: &[QubitId]) -> Result<f64, SimError> {
        let mut mask = 0usize;
        for q in qubits {
            mask |= 1 << self.position(*q)?;
        }
        let order: Vec<QubitId> = self.order.iter().copied().filter(|q| !qubits.contains(q)).collect();
        let kept: Vec<usize> = (0..self.order.len()).filter(|p| mask >> p & 1 == 0).collect();
        let mut amps = vec![C64::new(0.0, 0.0); 1usize << order.len()];
        let mut mass = 0.0;
        for (i, a) in self.amps.iter().enumerate() {
            if i & mask != 0 {
                mass += a.norm_sqr();
                continue;
            }
            let mut j = 0usize;
            for (b, p) in kept.iter().enumerate() {
                j |= (i >> p & 1) << b;
            }
            amps[j] = *a;
        }
        if mass < 1.0 {
            let scale = (1.0 - mass).sqrt();
            amps.iter_mut().for_each(|a| *a /= scale);
        }
        self.slots = slot_table(&order);
        self.order = order;
        self.amps = amps;
        Ok(mass)
    }

    /// Rows `(bits, re, im)` for every amplitude above [`AMP_EPS`], bits listed in `order`.
    pub fn dump(&self, order: &[QubitId]) -> Result<Vec<DumpRow>, SimError> {
        let pos: Vec<usize> = order.iter().map(|q| self.position(*q)).collect::<Result<_, _>>()?;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > AMP_EPS)
            .map(|(i, a)| DumpRow {
                bits: pos.iter().map(|p| if i >> p & 1 == 1 { '1' } else { '0' }).collect(),
                re: a.re,
                im: a.im,
            })
            .collect())
    }
}
