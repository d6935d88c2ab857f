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


//! Dicke, occupancy and symmetric-state synthesis.
//!
//! The data register `"T"` is cut into `ℓ` buckets of `m = n/ℓ` consecutive qubits. A one-hot
//! register `"A"` picks how many buckets are occupied, `"B"` marks which, every marked bucket
//! receives a damped-binomial state, and amplification keeps the strings of the right weight.
//! Sub-circuits enter as library gates charged with the cost of their explicit construction;
//! those constructions are certified on their own at small sizes.
//!
//! When `ℓ` does not divide `n`, the state is built on `ℓ⌈n/ℓ⌉` qubits and the branch with the
//! padding qubits at zero is amplified out.

mod damped;
#[cfg(test)]
mod tests;

use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::dist::{
    check_normalized, choose, hybrid_hit_prob, occupancy_pmf, ratio_report, symmetric_r, to_f64, DistError,
};
use crate::ir::{
    concat, dicke_support, Circuit, CircuitBuilder, CostReport, Gate, IrError, LibraryGate, Promise, QubitId, Register,
    Weight, WeightTest, C64,
};
use crate::prim::{
    amplify_to_exact, ctrl_dicke_semantic, custom_threshold_semantic, exact_gate, ham_semantic, one_hot, prep_semantic,
    prepare_onehot_dist, prepare_small_state, MarkedPreparation, PrimError,
};
use crate::sim::{check_clean_preparation, SimError, StateVector, VerificationResult};

pub use damped::{ctrl_damped, ctrl_damped_semantic, prepare_zero_damped, zero_damped_gamma};

/// Largest data width for which targets are materialized.
pub const TARGET_QUBITS: usize = 26;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("invalid request: {0}")]
    Request(String),
    #[error(transparent)]
    Prim(#[from] PrimError),
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error(transparent)]
    Ir(#[from] IrError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// What to synthesize. `eta` selects symmetric-state mode, with `k` the largest weight.
#[derive(Clone, Debug, PartialEq)]
pub struct SynthesisRequest {
    pub n: usize,
    pub k: usize,
    pub ell: Option<usize>,
    pub eta: Option<Vec<C64>>,
    /// Recorded in the circuit metadata; defaults to `k`.
    pub fanout_budget: Option<usize>,
}

impl SynthesisRequest {
    pub fn dicke(n: usize, k: usize) -> SynthesisRequest {
        SynthesisRequest { n, k, ell: None, eta: None, fanout_budget: None }
    }

    /// `eta[k]` is the amplitude on `|D^n_k⟩`.
    pub fn symmetric(n: usize, eta: Vec<C64>) -> SynthesisRequest {
        SynthesisRequest { n, k: eta.len().saturating_sub(1), ell: None, eta: Some(eta), fanout_budget: None }
    }

    pub fn with_ell(mut self, ell: usize) -> SynthesisRequest {
        self.ell = Some(ell);
        self
    }

    pub fn build(&self) -> Result<SynthesisOutput, SynthError> {
        let mut out = match &self.eta {
            None => build_dicke(self.n, self.k, self.ell)?,
            Some(eta) => build_symmetric(self.n, eta, self.ell)?,
        };
        if let Some(budget) = self.fanout_budget {
            let mut meta = out.circuit.metadata().clone();
            meta.fanout_budget = budget;
            out.circuit = out.circuit.with_metadata(meta);
        }
        Ok(out)
    }
}

/// The analytic state a synthesized circuit should leave on its data register.
#[derive(Clone, Debug, PartialEq)]
pub enum Target {
    Dicke { n: usize, k: usize },
    Symmetric { n: usize, eta: Vec<C64> },
    /// `Σ_j √p(j) |e_j⟩_A |D^{m,ℓ}_{k,j}⟩_T` on `[A, T]`.
    Occupancy { n: usize, k: usize, ell: usize },
}

impl Target {
    fn data_width(&self) -> usize {
        match self {
            Target::Dicke { n, .. } | Target::Symmetric { n, .. } => *n,
            Target::Occupancy { n, k, .. } => n + k,
        }
    }

    /// Sparse amplitudes indexed with bit `b` on the `b`-th data qubit.
    pub fn entries(&self) -> Result<Vec<(usize, C64)>, SynthError> {
        if self.data_width() > TARGET_QUBITS {
            return Err(SynthError::Request(format!("target on {} qubits is too large to write out", self.data_width())));
        }
        let as_usize = |v: Vec<(u64, C64)>| v.into_iter().map(|(i, a)| (i as usize, a)).collect::<Vec<_>>();
        Ok(match self {
            Target::Dicke { n, k } => as_usize(dicke_support(*n, *k)),
            Target::Symmetric { n, eta } => {
                let mut out = Vec::new();
                for (k, z) in eta.iter().enumerate() {
                    if z.norm() > 0.0 {
                        out.extend(dicke_support(*n, k).into_iter().map(|(i, a)| (i as usize, a * z)));
                    }
                }
                out
            }
            Target::Occupancy { n, k, ell } => {
                let m = n / ell;
                dicke_support(*n, *k)
                    .into_iter()
                    .map(|(x, a)| {
                        let j = (0..*ell).filter(|i| (x >> (i * m)) & ((1u64 << m) - 1) != 0).count();
                        ((1usize << (j - 1)) | (x as usize) << k, a)
                    })
                    .collect()
            }
        })
    }

    pub fn state(&self, data: &Register) -> Result<StateVector, SynthError> {
        Ok(StateVector::from_sparse(&data.qubits, &self.entries()?)?)
    }
}

#[derive(Clone, Debug)]
pub struct SynthesisOutput {
    pub circuit: Circuit,
    pub report: CostReport,
    pub target: Target,
    /// Qubits carrying the target; every other qubit is an ancilla.
    pub data: Register,
    pub ell: usize,
    /// Data width the buckets were laid out on.
    pub padded_n: usize,
}

impl SynthesisOutput {
    fn new(circuit: Circuit, data: Register, target: Target, ell: usize, padded_n: usize) -> SynthesisOutput {
        let report = circuit.cost();
        SynthesisOutput { circuit, report, target, data, ell, padded_n }
    }

    /// Simulates the circuit from all zeros against the target.
    pub fn verify(&self) -> Result<VerificationResult, SynthError> {
        let target = self.target.state(&self.data)?;
        Ok(check_clean_preparation(&self.circuit, &self.data, &target)?)
    }
}

/// Largest `ℓ ≤ min(k³, n)` with `ℓ ≥ k`, `ℓ | n` and buckets of at least `k` qubits.
pub fn default_ell(n: usize, k: usize) -> Option<usize> {
    let k = k.max(1);
    let cap = k.pow(3).min(n);
    (k..=cap).rev().find(|&l| n.is_multiple_of(l) && n / l >= k)
}

/// Resolves `ℓ` and the padded width for weights up to `k_cap`.
fn layout(n: usize, k_cap: usize, ell: Option<usize>) -> Result<(usize, usize), SynthError> {
    let ell = ell.or_else(|| default_ell(n, k_cap)).unwrap_or(k_cap);
    if ell < k_cap {
        return Err(SynthError::Request(format!("ℓ = {ell} is below the weight {k_cap}")));
    }
    let padded = ell * n.div_ceil(ell);
    if padded / ell < k_cap {
        return Err(SynthError::Request(format!("buckets of {} qubits cannot hold weight {k_cap}", padded / ell)));
    }
    Ok((ell, padded))
}

fn stamp(b: &mut CircuitBuilder, n: usize, k: usize, ell: usize) {
    let meta = b.metadata_mut();
    meta.n = n;
    meta.k = k;
    meta.ell = ell;
}

fn bucket(t: &[QubitId], m: usize, i: usize) -> &[QubitId] {
    &t[i * m..(i + 1) * m]
}

fn or_flags(t: &[QubitId], flags: &[QubitId], m: usize) -> Vec<Gate> {
    flags.iter().enumerate().map(|(i, &f)| Gate::or(bucket(t, m, i), f)).collect()
}

fn library(lib: LibraryGate, ports: Vec<QubitId>) -> Result<Gate, SynthError> {
    Ok(Gate::library(lib, ports)?)
}

/// One-hot register `A` of `k_cap` qubits selects `j`; `B` receives `|D^ℓ_j⟩`, every marked
/// bucket of `T` receives a damped binomial, and `B` is cleared again.
fn load_buckets(b: &mut CircuitBuilder, a: &[QubitId], flags: &[QubitId], t: &[QubitId], k_cap: usize) -> Result<(), SynthError> {
    let ell = flags.len();
    let m = t.len() / ell;
    let weights: Vec<usize> = (1..=k_cap).collect();
    b.gate(library(ctrl_dicke_semantic(ell, &weights)?, concat(&[a, flags]))?)?;
    let damped = ctrl_damped_semantic(m, k_cap)?;
    let loads = (0..ell).map(|i| library(damped.clone(), concat(&[&[flags[i]], bucket(t, m, i)]))).collect::<Result<_, _>>()?;
    b.layer(loads)?;
    b.layer(or_flags(t, flags, m))?;
    Ok(())
}

/// Clears the one-hot occupancy record `A` of a state whose buckets are filled.
fn clear_occupancy(b: &mut CircuitBuilder, a: &[QubitId], flags: &[QubitId], t: &[QubitId], y: QubitId) -> Result<(), SynthError> {
    let ell = flags.len();
    let m = t.len() / ell;
    b.layer(or_flags(t, flags, m))?;
    b.gate(library(ham_semantic(ell, a.len())?, concat(&[flags, a, &[y]]))?)?;
    b.layer(or_flags(t, flags, m))?;
    Ok(())
}

/// `Σ_j √p_j |e_j⟩` as a library gate charged with the explicit construction.
fn onehot_gate(p: &[f64]) -> Result<LibraryGate, SynthError> {
    let explicit = prepare_onehot_dist(p)?;
    let state = p.iter().enumerate().filter(|(_, x)| **x > 0.0).map(|(j, x)| (1u64 << j, C64::new(x.sqrt(), 0.0))).collect();
    Ok(prep_semantic("onehot_dist", &explicit, 0, p.len(), vec![(0, state)], Promise::Free))
}

fn check_occupancy(n: usize, k: usize, ell: usize) -> Result<usize, SynthError> {
    if k == 0 || ell == 0 || !n.is_multiple_of(ell) {
        return Err(SynthError::Request(format!("occupancy needs k ≥ 1 and ℓ | n, got n = {n}, k = {k}, ℓ = {ell}")));
    }
    let m = n / ell;
    if k > m || k > ell {
        return Err(SynthError::Request(format!("weight {k} needs at least {k} buckets of at least {k} qubits")));
    }
    Ok(m)
}

fn occupancy_circuit(n: usize, k: usize, ell: usize) -> Result<Circuit, SynthError> {
    check_occupancy(n, k, ell)?;
    let model = ratio_report(n, k, ell)?;
    let p: Vec<f64> = model.rows.iter().map(|row| to_f64(&(&row.r / &model.big_r))).collect();
    let mut b = CircuitBuilder::new(k);
    stamp(&mut b, n, k, ell);
    let t = b.register("T", n);
    let a = b.register("A", k);
    let flags = b.register("B", ell);
    let flag = b.qubit("flag");
    b.gate(library(onehot_gate(&p)?, a.clone())?)?;
    load_buckets(&mut b, &a, &flags, &t, k)?;
    b.gate(library(exact_gate(n, k), concat(&[&t, &[flag]]))?)?;
    let alpha = Weight::Exact(model.big_r.recip());
    let mp = MarkedPreparation::new(b.finish(), "T", "flag", alpha)?.at("occupancy");
    Ok(amplify_to_exact(&mp)?)
}

/// Clean preparation of the occupancy state of `|D^n_k⟩` with `ℓ` buckets on registers `"A"`
/// (one-hot, `k` qubits) and `"T"` (`n` qubits).
pub fn build_occupancy_state(n: usize, k: usize, ell: usize) -> Result<SynthesisOutput, SynthError> {
    let circuit = occupancy_circuit(n, k, ell)?;
    let data = Register::new("occupancy", concat(&[&circuit.register("A")?.qubits, &circuit.register("T")?.qubits]));
    Ok(SynthesisOutput::new(circuit, data, Target::Occupancy { n, k, ell }, ell, n))
}

fn dicke_divisible(n: usize, k: usize, ell: usize) -> Result<Circuit, SynthError> {
    let occ = occupancy_circuit(n, k, ell)?;
    let mut b = CircuitBuilder::new(k);
    let map = b.import(&occ);
    stamp(&mut b, n, k, ell);
    let t = map.register(&occ, "T")?;
    let a = map.register(&occ, "A")?;
    let flags = map.register(&occ, "B")?;
    let y = b.qubit("y");
    b.embed(&occ, &map, false)?;
    clear_occupancy(&mut b, &a, &flags, &t, y)?;
    Ok(b.finish())
}

/// Builds on `padded` qubits and amplifies the branch whose trailing `padded − n` qubits are zero.
fn pad_and_amplify(inner: &Circuit, n: usize, padded: usize, alpha: Weight, site: &str) -> Result<Circuit, SynthError> {
    let meta = inner.metadata().clone();
    let mut b = CircuitBuilder::new(meta.fanout_budget);
    let t = b.register("T", n);
    let pad = b.register("pad", padded - n);
    let map = b.bind(inner, &[("T", &concat(&[&t, &pad]))], "inner")?;
    stamp(&mut b, n, meta.k, meta.ell);
    b.metadata_mut().eta = meta.eta;
    let flag = b.qubit("pad.flag");
    b.embed(inner, &map, false)?;
    b.gate(Gate::nor(&pad, flag))?;
    let mp = MarkedPreparation::new(b.finish(), "T", "pad.flag", alpha)?.at(site);
    Ok(amplify_to_exact(&mp)?)
}

fn empty_circuit(n: usize, k: usize) -> Circuit {
    let mut b = CircuitBuilder::new(k.max(1));
    b.metadata_mut().n = n;
    b.metadata_mut().k = k;
    b.register("T", n);
    b.finish()
}

fn data_output(circuit: Circuit, target: Target, ell: usize, padded: usize) -> Result<SynthesisOutput, SynthError> {
    let data = circuit.register("T")?.clone();
    Ok(SynthesisOutput::new(circuit, data, target, ell, padded))
}

/// Clean preparation of `|D^n_k⟩` on register `"T"`.
///
/// `ell` defaults to [`default_ell`], falling back to `ℓ = k` with padding. For `2k > n` the
/// complement weight is built and every data qubit flipped.
pub fn build_dicke(n: usize, k: usize, ell: Option<usize>) -> Result<SynthesisOutput, SynthError> {
    if k > n {
        return Err(SynthError::Request(format!("weight {k} exceeds {n} qubits")));
    }
    let target = Target::Dicke { n, k };
    if 2 * k > n {
        let inner = build_dicke(n, n - k, ell)?;
        let mut b = CircuitBuilder::new(inner.circuit.metadata().fanout_budget);
        let map = b.import(&inner.circuit);
        stamp(&mut b, n, k, inner.ell);
        let t = map.register(&inner.circuit, "T")?;
        b.embed(&inner.circuit, &map, false)?;
        b.layer(t.iter().map(|&q| Gate::x(q)).collect())?;
        return data_output(b.finish(), target, inner.ell, inner.padded_n);
    }
    if k == 0 {
        return data_output(empty_circuit(n, 0), target, 0, n);
    }
    let (ell, padded) = layout(n, k, ell)?;
    let inner = dicke_divisible(padded, k, ell)?;
    let circuit = if padded == n {
        inner
    } else {
        let p0 = padding_keep_probability(n, padded, k);
        pad_and_amplify(&inner, n, padded, Weight::Exact(p0), "dicke.pad")?
    };
    data_output(circuit, target, ell, padded)
}

fn bit_length(v: usize) -> usize {
    (usize::BITS - v.leading_zeros()) as usize
}

/// `Σ δ(k,j)|e_k⟩_Q|e_j⟩_A` as a library gate on `[Q, A]`, charged with a small-state preparation
/// of the binary encoding `k·2^b + j` followed by one-hot conversion.
fn pair_state_gate(k_star: usize, delta: &[(usize, usize, C64)]) -> Result<LibraryGate, SynthError> {
    let b_bits = bit_length(k_star);
    let mut amps = vec![C64::new(0.0, 0.0); 1 << (2 * b_bits)];
    for &(k, j, d) in delta {
        amps[(k << b_bits) | j] = d;
    }
    let small = prepare_small_state(&amps)?;
    let mut b = CircuitBuilder::new(k_star);
    let q = b.register("Q", k_star);
    let a = b.register("A", k_star);
    let bin = b.register("bin", 2 * b_bits);
    let map = b.bind(&small, &[("T", &bin)], "small")?;
    b.embed(&small, &map, false)?;
    b.layer(vec![
        Gate::library(one_hot(b_bits, k_star), concat(&[&bin[..b_bits], &a]))?,
        Gate::library(one_hot(b_bits, k_star), concat(&[&bin[b_bits..], &q]))?,
    ])?;
    let explicit = b.finish();
    let hot = |v: usize, shift: usize| if v == 0 { 0 } else { 1u64 << (v - 1 + shift) };
    let state = delta.iter().filter(|(_, _, d)| d.norm() > 0.0).map(|&(k, j, d)| (hot(k, 0) | hot(j, k_star), d)).collect();
    Ok(prep_semantic("pair_state", &explicit, 0, 2 * k_star, vec![(0, state)], Promise::Free))
}

fn symmetric_divisible(n: usize, eta: &[C64], ell: usize) -> Result<Circuit, SynthError> {
    let k_star = eta.len() - 1;
    let m = check_occupancy(n, k_star, ell)?;
    let ratio = symmetric_r(n, k_star, ell, eta)?;
    let big_r = ratio.total + eta[0].norm_sqr();
    let mut delta = vec![(0, 0, eta[0] / big_r.sqrt())];
    for (k, z) in eta.iter().enumerate().skip(1) {
        let p = occupancy_pmf(n, k, ell)?;
        for (j, pj) in p.iter().enumerate().skip(1) {
            let r = pj / hybrid_hit_prob(m, k_star, j, k)?;
            delta.push((k, j, z * (to_f64(&r) / big_r).sqrt()));
        }
    }

    let mut b = CircuitBuilder::new(k_star);
    stamp(&mut b, n, k_star, ell);
    b.metadata_mut().eta = Some(eta.to_vec());
    let t = b.register("T", n);
    let q = b.register("Q", k_star);
    let a = b.register("A", k_star);
    let flags = b.register("B", ell);
    let flag = b.qubit("flag");
    b.gate(library(pair_state_gate(k_star, &delta)?, concat(&[&q, &a]))?)?;
    load_buckets(&mut b, &a, &flags, &t, k_star)?;
    b.gate(library(custom_threshold_semantic(n, k_star, WeightTest::Equal)?, concat(&[&q, &t, &[flag]]))?)?;
    let mp = MarkedPreparation::new(b.finish(), "T", "flag", Weight::Approx(1.0 / big_r))?.at("symmetric");
    let amplified = amplify_to_exact(&mp)?;

    let mut b = CircuitBuilder::new(k_star);
    let map = b.import(&amplified);
    stamp(&mut b, n, k_star, ell);
    b.metadata_mut().eta = Some(eta.to_vec());
    let y = b.qubit("y");
    let t = map.register(&amplified, "T")?;
    let q = map.register(&amplified, "Q")?;
    let a = map.register(&amplified, "A")?;
    let flags = map.register(&amplified, "B")?;
    b.embed(&amplified, &map, false)?;
    b.gate(library(ham_semantic(n, k_star)?, concat(&[&t, &q, &[y]]))?)?;
    clear_occupancy(&mut b, &a, &flags, &t, y)?;
    Ok(b.finish())
}

/// Clean preparation of `Σ_k η_k |D^n_k⟩` on register `"T"`, for unit-norm `η`.
///
/// Trailing zero weights are dropped, so the largest weight is the last nonzero index. Without
/// padding, `ℓ` must be at least that weight; with padding the weights are rescaled so the
/// amplified branch has the requested amplitudes.
pub fn build_symmetric(n: usize, eta: &[C64], ell: Option<usize>) -> Result<SynthesisOutput, SynthError> {
    check_normalized(eta)?;
    let k_star = eta.iter().rposition(|z| z.norm_sqr() > 0.0).unwrap_or(0);
    if k_star > n {
        return Err(SynthError::Request(format!("weight {k_star} exceeds {n} qubits")));
    }
    let eta = &eta[..=k_star];
    let target = Target::Symmetric { n, eta: eta.to_vec() };
    if k_star == 0 {
        let circuit = empty_circuit(n, 0);
        let mut meta = circuit.metadata().clone();
        meta.eta = Some(eta.to_vec());
        return data_output(circuit.with_metadata(meta), target, 0, n);
    }
    let (ell, padded) = layout(n, k_star, ell)?;
    let circuit = if padded == n {
        symmetric_divisible(n, eta, ell)?
    } else {
        let keep: Vec<f64> = (0..=k_star).map(|k| to_f64(&padding_keep_probability(n, padded, k))).collect();
        let z: f64 = eta.iter().zip(&keep).map(|(e, p)| e.norm_sqr() / p).sum();
        let reweighted: Vec<C64> = eta.iter().zip(&keep).map(|(e, p)| e / (p * z).sqrt()).collect();
        let inner = symmetric_divisible(padded, &reweighted, ell)?;
        pad_and_amplify(&inner, n, padded, Weight::Approx(1.0 / z), "symmetric.pad")?
    };
    let mut meta = circuit.metadata().clone();
    meta.eta = Some(eta.to_vec());
    data_output(circuit.with_metadata(meta), target, ell, padded)
}

/// Exact probability that a uniform weight-`k` string on `padded` qubits is zero past the first `n`.
pub fn padding_keep_probability(n: usize, padded: usize, k: usize) -> BigRational {
    if k > n {
        return BigRational::zero();
    }
    if padded == n {
        return BigRational::one();
    }
    BigRational::new(choose(n, k), choose(padded, k))
}
