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


use super::{adjust_amplitudes, copy_metadata, parallel_amplify, semantic_of, MarkedPreparation, PrimError};
use crate::ir::{diag, CircuitBuilder, Gate, LibraryGate, PrepBranch, PrepTable, Promise, Semantic, Weight, C64};
use crate::ir::Circuit;

const NORM_TOL: f64 = 1e-10;

fn bits_for(values: usize) -> usize {
    (usize::BITS - values.leading_zeros()) as usize
}

fn check_pmf(p: &[f64]) -> Result<(), PrimError> {
    if p.is_empty() {
        return Err(PrimError::Weights("empty distribution".into()));
    }
    if p.iter().any(|x| *x < 0.0 || x.is_nan()) {
        return Err(PrimError::Weights("negative probability".into()));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > NORM_TOL {
        return Err(PrimError::Weights(format!("probabilities sum to {total}")));
    }
    Ok(())
}

/// The marked preparation amplified by [`prepare_onehot_dist`], in explicit form.
///
/// Registers: `"bin"` holds `i` in binary on the marked branch, `"a"` is the flag, and the marked
/// mass is exactly `1/(n+1)`. The unmarked branch is `|0⟩_bin|0⟩_a`.
pub fn onehot_dist_base(p: &[f64]) -> Result<MarkedPreparation, PrimError> {
    check_pmf(p)?;
    let n = p.len();
    let bits = bits_for(n);
    // `hot ∪ {a}` is one-hot over n+1 branches: W-branches on `hot`, the zero branch on `a`.
    let mut b = CircuitBuilder::new(1);
    let branches = b.register("branches", n + 1);
    let (hot, a) = (&branches[..n], branches[n]);
    b.gate(Gate::library(LibraryGate::zero_w(n), hot.to_vec())?)?;
    b.gate(Gate::or(hot, a))?;
    b.gate(Gate::x(a))?;
    let spread = b.finish();
    let mut alphas = vec![1.0 / (2.0 * n as f64); n];
    alphas.push(0.5);
    let mut betas = p.to_vec();
    betas.push(1.0);
    let adjusted = adjust_amplitudes(&spread, "branches", &alphas, &betas)?;

    let mut b = CircuitBuilder::new(n.max(1));
    copy_metadata(&mut b, bits);
    let map = b.import(&adjusted);
    let bin = b.register("bin", bits);
    b.embed(&adjusted, &map, false)?;
    let mut convert = bin.clone();
    convert.extend(hot.iter().map(|&q| map.get(q)));
    b.gate(Gate::library(LibraryGate::one_hot(bits, n, 0), convert)?)?;
    b.gate(Gate::x(map.get(a)))?;
    let circuit = b.finish();
    let data = circuit.register("bin")?.clone();
    Ok(MarkedPreparation {
        circuit,
        data,
        flag: map.get(a),
        alpha: Weight::Exact(crate::dist::rat(1, n as i64 + 1)),
        site: "onehot_dist".into(),
    })
}

/// Semantic form of [`onehot_dist_base`] on `[bin, flag]`.
fn onehot_base_semantic(p: &[f64], explicit: &Circuit) -> LibraryGate {
    let n = p.len();
    let bits = bits_for(n);
    let scale = 1.0 / (n as f64 + 1.0);
    let mut state = vec![(0u64, C64::new((n as f64 * scale).sqrt(), 0.0))];
    for (i, pi) in p.iter().enumerate() {
        if *pi > 0.0 {
            state.push((((i + 1) as u64) | 1u64 << bits, C64::new((pi * scale).sqrt(), 0.0)));
        }
    }
    let table = PrepTable {
        control_bits: 0,
        target_bits: bits + 1,
        branches: vec![PrepBranch { control: 0, state }],
        promise: Promise::Free,
    };
    semantic_of("onehot_dist_base", explicit, Semantic::Prep(table))
}

/// Clean preparation of `Σ_i √p_i |e_i⟩` on register `"T"` of `p.len()` qubits.
///
/// The base preparation reaches mass `1/(n+1)` on its flag and is parallel-amplified; the base
/// enters the parallel stage as a library gate charged with its explicit cost.
pub fn prepare_onehot_dist(p: &[f64]) -> Result<Circuit, PrimError> {
    let base = onehot_dist_base(p)?;
    let n = p.len();
    let bits = bits_for(n);
    let lib = onehot_base_semantic(p, &base.circuit);
    let mut b = CircuitBuilder::new(n.max(1));
    let bin = b.register("bin", bits);
    let flag = b.qubit("flag");
    let mut ports = bin.clone();
    ports.push(flag);
    b.gate(Gate::library(lib, ports)?)?;
    b.metadata_mut().amplifications.extend(base.circuit.metadata().amplifications.iter().cloned());
    let compact = MarkedPreparation::new(b.finish(), "bin", "flag", base.alpha.clone())?.at("onehot_dist");
    let gathered = parallel_amplify(&compact)?;

    let mut b = CircuitBuilder::new(n.max(1));
    copy_metadata(&mut b, n);
    let bin = b.register("bin", bits);
    let map = b.bind(&gathered, &[("T", &bin)], "par")?;
    let target = b.register("T", n);
    b.embed(&gathered, &map, false)?;
    let mut convert = bin.clone();
    convert.extend_from_slice(&target);
    b.gate(Gate::library(LibraryGate::one_hot(bits, n, 0), convert)?)?;
    Ok(b.finish())
}

/// Clean preparation of an arbitrary `ℓ`-qubit state on register `"T"`, from its `2^ℓ` amplitudes.
///
/// The magnitudes are prepared in one-hot form over `2^ℓ` slots, phases are applied slot by slot,
/// and the one-hot form is converted to binary.
pub fn prepare_small_state(amps: &[C64]) -> Result<Circuit, PrimError> {
    let size = amps.len();
    if size < 2 || !size.is_power_of_two() {
        return Err(PrimError::Weights(format!("{size} amplitudes is not a power of two ≥ 2")));
    }
    let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if norm == 0.0 {
        return Err(PrimError::Weights("zero vector".into()));
    }
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(PrimError::Weights(format!("squared norm {norm}")));
    }
    let ell = size.trailing_zeros() as usize;
    let p: Vec<f64> = amps.iter().map(|a| a.norm_sqr()).collect();
    let dist = prepare_onehot_dist(&p)?;
    let mut b = CircuitBuilder::new(size);
    copy_metadata(&mut b, ell);
    let target = b.register("T", ell);
    let hot = b.register("hot", size);
    let map = b.bind(&dist, &[("T", &hot)], "dist")?;
    b.embed(&dist, &map, false)?;
    let mut phases = Vec::new();
    for (v, a) in amps.iter().enumerate() {
        let mag = a.norm();
        if mag > 0.0 && (a / mag - C64::new(1.0, 0.0)).norm() > 1e-15 {
            phases.push(Gate::unitary(hot[v], diag(C64::new(1.0, 0.0), a / mag))?);
        }
    }
    b.layer(phases)?;
    let mut convert = target.clone();
    convert.extend_from_slice(&hot);
    b.gate(Gate::library(LibraryGate::one_hot(ell, size, 1), convert)?)?;
    Ok(b.finish())
}
