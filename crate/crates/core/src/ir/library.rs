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

//! Library gates: black-box subroutines carrying an exact semantic map and a declared cost.
//!
//! Classical semantics are involutive permutations of the local basis. State preparations are
//! stored as one target state per control value and extended to a unitary by a phase on |0⟩
//! followed by a Householder reflection, so they can be inverted inside amplification loops.

use super::gate::{C64, QubitId};
use super::IrError;

/// Declared costs of prior-work subroutines. Only their independence from `n` matters.
pub mod cost_table {
    pub const THRESHOLD_DEPTH: usize = 3;
    pub const EXACT_DEPTH: usize = 2 * THRESHOLD_DEPTH;
    pub const ONE_HOT_DEPTH: usize = 2;
    pub const W_SWAP_DEPTH: usize = 3;
    pub const ZERO_W_DEPTH: usize = 4;
    pub const W_STATE_DEPTH: usize = 4;
    pub const DICKE_DEPTH: usize = 6;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightTest {
    /// Flag `[|x| ≤ j]`.
    AtMost,
    /// Flag `[|x| = j]`.
    Equal,
}

impl WeightTest {
    pub fn holds(self, weight: usize, j: usize) -> bool {
        match self {
            WeightTest::AtMost => weight <= j,
            WeightTest::Equal => weight == j,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            WeightTest::AtMost => "at_most",
            WeightTest::Equal => "equal",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Promise {
    Free,
    /// The control part must have Hamming weight at most one.
    OneHotOrZero,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PrepBranch {
    pub control: u64,
    /// Sparse target state as (local basis index, amplitude).
    pub state: Vec<(u64, C64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PrepTable {
    pub control_bits: usize,
    pub target_bits: usize,
    pub branches: Vec<PrepBranch>,
    pub promise: Promise,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Semantic {
    /// Local layout `[x (n), out]`: `out ^= [|x| ≥ k]`, negated when asked.
    Threshold { n: usize, k: usize, negate: bool },
    /// Local layout `[x (n), out]`: `out ^= [|x| = k]`.
    Exact { n: usize, k: usize },
    /// Local layout `[bin (bits), hot (slots)]`: `|v⟩|0⟩ ↔ |0⟩|e_{v+shift}⟩`.
    OneHot { bits: usize, slots: usize, shift: usize },
    /// Local layout `[x (n), y (k+1)]`: `y ^= e_{min(k+1,|x|)}`.
    Ham { n: usize, k: usize },
    /// Local layout `[a (k), x (n), q]`: with `a = e_j`, `q ^= test(|x|, j)`.
    WeightSelect { n: usize, k: usize, test: WeightTest },
    /// Local layout `[a (t), Q_1 .. Q_t, Q*]`, registers of `width` qubits; `a = e_i` swaps `Q_i`, `Q*`.
    WSwap { t: usize, width: usize },
    Prep(PrepTable),
}

/// A basis input outside the gate's promised domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Violation(pub u64);

fn mask(bits: usize) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

fn weight(x: u64) -> usize {
    x.count_ones() as usize
}

/// Position (1-based) of the single set bit, 0 for the zero string, `None` when weight ≥ 2.
fn one_hot_index(x: u64) -> Option<usize> {
    match x.count_ones() {
        0 => Some(0),
        1 => Some(x.trailing_zeros() as usize + 1),
        _ => None,
    }
}

impl Semantic {
    pub fn arity(&self) -> usize {
        match self {
            Semantic::Threshold { n, .. } | Semantic::Exact { n, .. } => n + 1,
            Semantic::OneHot { bits, slots, .. } => bits + slots,
            Semantic::Ham { n, k } => n + k + 1,
            Semantic::WeightSelect { n, k, .. } => k + n + 1,
            Semantic::WSwap { t, width } => t + (t + 1) * width,
            Semantic::Prep(p) => p.control_bits + p.target_bits,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Semantic::Threshold { .. } => "threshold",
            Semantic::Exact { .. } => "exact",
            Semantic::OneHot { .. } => "one_hot",
            Semantic::Ham { .. } => "ham",
            Semantic::WeightSelect { .. } => "weight_select",
            Semantic::WSwap { .. } => "w_swap",
            Semantic::Prep(_) => "prep",
        }
    }

    pub fn validate(&self) -> Result<(), IrError> {
        let bad = |why: &str| Err(IrError::BadSemantic(format!("{}: {why}", self.name())));
        match self {
            Semantic::Threshold { n, .. } | Semantic::Exact { n, .. } if *n == 0 => bad("empty input"),
            Semantic::OneHot { bits, slots, shift } => {
                if *bits == 0 || *slots == 0 || *shift > 1 {
                    return bad("needs bits, slots > 0 and shift ∈ {0, 1}");
                }
                Ok(())
            }
            Semantic::Ham { n, k } if *k > *n || *n == 0 => bad("needs 1 ≤ n and k ≤ n"),
            Semantic::WeightSelect { n, k, .. } if *n == 0 || *k == 0 => bad("needs n, k ≥ 1"),
            Semantic::WSwap { t, width } if *t == 0 || *width == 0 => bad("empty registers"),
            Semantic::Prep(p) => {
                if p.target_bits == 0 {
                    return bad("empty target");
                }
                for b in &p.branches {
                    if b.control > mask(p.control_bits) {
                        return bad("control value out of range");
                    }
                    let norm: f64 = b.state.iter().map(|(_, a)| a.norm_sqr()).sum();
                    if (norm - 1.0).abs() > 1e-10 {
                        return Err(IrError::BadSemantic(format!("prep branch {} has norm² {norm}", b.control)));
                    }
                    if b.state.iter().any(|(i, _)| *i > mask(p.target_bits)) {
                        return bad("state index out of range");
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn is_permutation(&self) -> bool {
        !matches!(self, Semantic::Prep(_))
    }

    /// The involutive permutation of a classical semantic on one local basis index.
    pub fn permute(&self, local: u64) -> Result<u64, Violation> {
        match self {
            Semantic::Threshold { n, k, negate } => {
                let flag = (weight(local & mask(*n)) >= *k) ^ negate;
                Ok(if flag { local ^ (1 << n) } else { local })
            }
            Semantic::Exact { n, k } => {
                let flag = weight(local & mask(*n)) == *k;
                Ok(if flag { local ^ (1 << n) } else { local })
            }
            Semantic::OneHot { bits, slots, shift } => {
                let bin = local & mask(*bits);
                let hot = (local >> bits) & mask(*slots);
                if hot == 0 {
                    let idx = bin as usize + shift;
                    if idx == 0 {
                        Ok(local)
                    } else if idx <= *slots {
                        Ok(1u64 << (bits + idx - 1))
                    } else {
                        Err(Violation(local))
                    }
                } else if bin == 0 && hot.count_ones() == 1 {
                    let idx = hot.trailing_zeros() as usize + 1;
                    let value = idx - shift;
                    if (value as u64) <= mask(*bits) {
                        Ok(value as u64)
                    } else {
                        Err(Violation(local))
                    }
                } else {
                    Err(Violation(local))
                }
            }
            Semantic::Ham { n, k } => {
                let h = weight(local & mask(*n)).min(k + 1);
                Ok(if h == 0 { local } else { local ^ (1u64 << (n + h - 1)) })
            }
            Semantic::WeightSelect { n, k, test } => {
                let j = one_hot_index(local & mask(*k)).ok_or(Violation(local))?;
                let x = (local >> k) & mask(*n);
                Ok(if test.holds(weight(x), j) { local ^ (1u64 << (k + n)) } else { local })
            }
            Semantic::WSwap { t, width } => {
                let i = one_hot_index(local & mask(*t)).ok_or(Violation(local))?;
                if i == 0 {
                    return Ok(local);
                }
                let slot_shift = t + (i - 1) * width;
                let star_shift = t + t * width;
                let slot = (local >> slot_shift) & mask(*width);
                let star = (local >> star_shift) & mask(*width);
                let cleared = local & !(mask(*width) << slot_shift) & !(mask(*width) << star_shift);
                Ok(cleared | (star << slot_shift) | (slot << star_shift))
            }
            Semantic::Prep(_) => unreachable!("prep semantics are not permutations"),
        }
    }

    /// Whether a basis input of a prep semantic violates its control promise.
    pub fn prep_violation(&self, control: u64) -> bool {
        match self {
            Semantic::Prep(p) => p.promise == Promise::OneHotOrZero && control.count_ones() > 1,
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LibraryGate {
    pub tag: String,
    pub semantic: Semantic,
    pub declared_depth: usize,
    pub declared_width: usize,
    pub adjoint: bool,
}

impl LibraryGate {
    pub fn new(tag: impl Into<String>, semantic: Semantic, declared_depth: usize, declared_width: usize) -> LibraryGate {
        LibraryGate { tag: tag.into(), semantic, declared_depth, declared_width, adjoint: false }
    }

    pub fn adjoint(&self) -> LibraryGate {
        let mut g = self.clone();
        if !g.semantic.is_permutation() {
            g.adjoint = !g.adjoint;
        }
        g
    }

    pub fn threshold(n: usize, k: usize) -> LibraryGate {
        LibraryGate::new("threshold", Semantic::Threshold { n, k, negate: false }, cost_table::THRESHOLD_DEPTH, k)
    }

    /// `out ^= [|x| < k]`.
    pub fn threshold_negated(n: usize, k: usize) -> LibraryGate {
        LibraryGate::new("threshold", Semantic::Threshold { n, k, negate: true }, cost_table::THRESHOLD_DEPTH, k)
    }

    pub fn exact(n: usize, k: usize) -> LibraryGate {
        LibraryGate::new("exact", Semantic::Exact { n, k }, cost_table::EXACT_DEPTH, k + 1)
    }

    pub fn one_hot(bits: usize, slots: usize, shift: usize) -> LibraryGate {
        LibraryGate::new("one_hot", Semantic::OneHot { bits, slots, shift }, cost_table::ONE_HOT_DEPTH, slots)
    }

    pub fn w_swap(t: usize, width: usize) -> LibraryGate {
        LibraryGate::new("w_controlled_swap", Semantic::WSwap { t, width }, cost_table::W_SWAP_DEPTH, width)
    }

    /// Unconditioned preparation of `state` on `target_bits` qubits.
    pub fn prep(tag: impl Into<String>, target_bits: usize, state: Vec<(u64, C64)>, depth: usize, width: usize) -> LibraryGate {
        let table = PrepTable {
            control_bits: 0,
            target_bits,
            branches: vec![PrepBranch { control: 0, state }],
            promise: Promise::Free,
        };
        LibraryGate::new(tag, Semantic::Prep(table), depth, width)
    }

    pub fn w_state(n: usize) -> LibraryGate {
        let amp = super::gate::real(1.0 / (n as f64).sqrt());
        let state = (0..n).map(|i| (1u64 << i, amp)).collect();
        LibraryGate::prep("w_state", n, state, cost_table::W_STATE_DEPTH, 0)
    }

    /// `(|0^n⟩ + |W_n⟩)/√2`.
    pub fn zero_w(n: usize) -> LibraryGate {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let amp = super::gate::real(h / (n as f64).sqrt());
        let mut state = vec![(0u64, super::gate::real(h))];
        state.extend((0..n).map(|i| (1u64 << i, amp)));
        LibraryGate::prep("zero_w", n, state, cost_table::ZERO_W_DEPTH, 0)
    }

    /// `|D^n_w⟩`, declared with fanout width `n` as for fanout-based Dicke preparation.
    pub fn dicke(n: usize, w: usize) -> LibraryGate {
        LibraryGate::prep("dicke", n, dicke_support(n, w), cost_table::DICKE_DEPTH, n)
    }
}

/// Sparse uniform superposition over the weight-`w` strings of `n` bits.
pub fn dicke_support(n: usize, w: usize) -> Vec<(u64, C64)> {
    let states: Vec<u64> = (0..1u64 << n).filter(|x| weight(*x) == w).collect();
    let amp = super::gate::real(1.0 / (states.len() as f64).sqrt());
    states.into_iter().map(|x| (x, amp)).collect()
}

/// Local qubit lists for semantic layouts, in the order the semantic expects.
pub fn concat(parts: &[&[QubitId]]) -> Vec<QubitId> {
    parts.iter().flat_map(|p| p.iter().copied()).collect()
}
