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


use super::{copy_metadata, semantic_of, PrimError};
use crate::ir::{concat, Circuit, CircuitBuilder, Gate, LibraryGate, QubitId, Semantic, WeightTest};

fn fanout_layer(xs: &[QubitId], copies: &[Vec<QubitId>], budget: usize) -> Vec<Gate> {
    if copies.is_empty() {
        return Vec::new();
    }
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let targets: Vec<QubitId> = copies.iter().map(|c| c[i]).collect();
            Gate::fanout(x, &targets, targets.len() > budget)
        })
        .collect()
}

/// `|x⟩|0^{k+1}⟩ ↦ |x⟩|e_{min(k+1,|x|)}⟩` on registers `"X"` (n) and `"Y"` (k+1).
///
/// Each input bit is fanned out to `k` copies, copy `j` feeds `EXACT_j` into `y_j`, the original
/// feeds `THRESHOLD_{k+1}` into `y_{k+1}`, and the copies are uncomputed.
pub fn ham_gadget(n: usize, k: usize) -> Result<Circuit, PrimError> {
    if k > n || n == 0 {
        return Err(PrimError::Precondition(format!("ham gadget needs 1 ≤ n and k ≤ n, got n={n}, k={k}")));
    }
    let mut b = CircuitBuilder::new(k.max(1));
    copy_metadata(&mut b, n);
    b.metadata_mut().k = k;
    let x = b.register("X", n);
    let y = b.register("Y", k + 1);
    let copies: Vec<Vec<QubitId>> = (0..k).map(|_| b.register("copies", n)).collect();
    let fan = fanout_layer(&x, &copies, k);
    b.layer(fan.clone())?;
    let mut tests = Vec::new();
    for (j, copy) in copies.iter().enumerate() {
        tests.push(Gate::library(LibraryGate::exact(n, j + 1), concat(&[copy, &[y[j]]]))?);
    }
    if k < n {
        tests.push(Gate::library(LibraryGate::threshold(n, k + 1), concat(&[&x, &[y[k]]]))?);
    }
    b.layer(tests)?;
    b.layer(fan)?;
    Ok(b.finish())
}

/// Semantic form of [`ham_gadget`] on `[X, Y]`.
pub fn ham_semantic(n: usize, k: usize) -> Result<LibraryGate, PrimError> {
    Ok(semantic_of("ham", &ham_gadget(n, k)?, Semantic::Ham { n, k }))
}

/// `|e_j⟩|x⟩|0⟩ ↦ |e_j⟩|x⟩|test(|x|, j)⟩` on registers `"A"` (k), `"X"` (n) and `"q"`.
///
/// `y_i` holds the test against `i` on copy `i` of the input, `z_0` catches `j = 0` with a NOR over
/// `A` and `X`, `z_i = AND(y_i, a_i)`, and `q` receives the OR of the `z`s before everything is
/// uncomputed. The control register is promised to be one-hot or zero.
pub fn custom_threshold(n: usize, k: usize, test: WeightTest) -> Result<Circuit, PrimError> {
    if n == 0 || k == 0 {
        return Err(PrimError::Precondition(format!("custom threshold needs n, k ≥ 1, got n={n}, k={k}")));
    }
    let mut b = CircuitBuilder::new(k.max(1));
    copy_metadata(&mut b, n);
    b.metadata_mut().k = k;
    let a = b.register("A", k);
    let x = b.register("X", n);
    let q = b.qubit("q");
    let copies: Vec<Vec<QubitId>> = (0..k).map(|_| b.register("copies", n)).collect();
    let y = b.register("y", k);
    let z = b.register("z", k + 1);
    let fan = fanout_layer(&x, &copies, k);
    let mut tests = Vec::new();
    for (i, copy) in copies.iter().enumerate() {
        let lib = match test {
            WeightTest::AtMost => LibraryGate::threshold_negated(n, i + 2),
            WeightTest::Equal => LibraryGate::exact(n, i + 1),
        };
        tests.push(Gate::library(lib, concat(&[copy, &[y[i]]]))?);
    }
    tests.push(Gate::nor(&concat(&[&a, &x]), z[0]));
    let ands: Vec<Gate> = (0..k).map(|i| Gate::toffoli(&[y[i], a[i]], z[i + 1])).collect();
    b.layer(fan.clone())?;
    b.layer(tests.clone())?;
    b.layer(ands.clone())?;
    b.gate(Gate::or(&z, q))?;
    b.layer(ands)?;
    b.layer(tests)?;
    b.layer(fan)?;
    Ok(b.finish())
}

/// Semantic form of [`custom_threshold`] on `[A, X, q]`.
pub fn custom_threshold_semantic(n: usize, k: usize, test: WeightTest) -> Result<LibraryGate, PrimError> {
    Ok(semantic_of("custom_threshold", &custom_threshold(n, k, test)?, Semantic::WeightSelect { n, k, test }))
}
