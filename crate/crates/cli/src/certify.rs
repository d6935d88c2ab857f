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


//! Micro-scale certification of every primitive against its semantic map.
//!
//! Preparations are checked from all zeros against their analytic output with every ancilla
//! required back in `|0⟩`. Gadgets with inputs are checked on their whole promised domain plus
//! the uniform superposition of that domain.

use std::collections::BTreeMap;

use num_rational::BigRational;
use qacz::dist::{damped_binomial, rat, to_f64};
use qacz::ir::{
    concat, dicke_support, hadamard, real, rot, Circuit, CircuitBuilder, Gate, LibraryGate, PrepBranch, PrepTable,
    Promise, QubitId, Register, Semantic, Weight, WeightTest, C64,
};
use qacz::prim::{
    adjust_amplitudes, amplify_to_exact, build_zero_w, ctrl_dicke, ctrl_dicke_semantic, ctrl_from_zero_overlap,
    ctrl_state, custom_threshold, custom_threshold_semantic, exact_grover, ham_gadget, ham_semantic, library_circuit,
    parallel_amplify, prepare_onehot_dist, MarkedPreparation,
};
use qacz::sim::{certify, certify_library_gate, check_clean_preparation, StateVector};
use qacz::synth::{ctrl_damped, ctrl_damped_semantic, prepare_zero_damped, zero_damped_gamma};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use crate::report::{ClaimVerdict, Quantity};
use crate::params;

/// Seed for the random amplitude-adjustment draws.
pub const ADJUST_SEED: u64 = 0x5eed_0001;
pub const ADJUST_DRAWS: usize = 5;

type Check = Result<f64, String>;

fn verdict(id: &str, params: BTreeMap<String, Value>, check: Check, tol: f64) -> ClaimVerdict {
    let rhs = Quantity::float(1.0 - tol);
    match check {
        Ok(f) => ClaimVerdict::new(id, params, Quantity::float(f), ">=", rhs, f >= 1.0 - tol),
        Err(e) => ClaimVerdict::new(id, params, Quantity::text(format!("error: {e}")), ">=", rhs, false),
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Fidelity of a clean preparation, or an error when an ancilla is left dirty.
fn prepares(c: &Circuit, data: &Register, entries: &[(usize, C64)]) -> Check {
    let want = StateVector::from_sparse(&data.qubits, entries).map_err(err)?;
    let v = check_clean_preparation(c, data, &want).map_err(err)?;
    if !v.clean {
        return Err(format!("ancilla mass {:.3e}", v.residual_ancilla_mass));
    }
    Ok(v.fidelity)
}

fn registers(c: &Circuit, names: &[&str]) -> Result<Register, String> {
    let mut qubits = Vec::new();
    for n in names {
        qubits.extend(c.register(n).map_err(err)?.qubits.iter().copied());
    }
    Ok(Register::new("out", qubits))
}

/// `√α|1⟩|+⟩|1⟩ + √(1−α)|00⟩|0⟩` on data `T` and flag `t`.
fn toy(alpha: f64) -> Result<MarkedPreparation, String> {
    let mut b = CircuitBuilder::new(1);
    let t = b.register("T", 2);
    let flag = b.qubit("t");
    b.gate(Gate::unitary(flag, rot(1.0 - alpha)).map_err(err)?).map_err(err)?;
    b.gate(Gate::cnot(flag, t[0])).map_err(err)?;
    b.gate(Gate::controlled(vec![flag], t[1], hadamard()).map_err(err)?).map_err(err)?;
    MarkedPreparation::new(b.finish(), "T", "t", Weight::Approx(alpha)).map_err(err)
}

fn toy_good() -> Vec<(usize, C64)> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    vec![(0b01, real(h)), (0b11, real(h))]
}

fn check_exact_grover(alpha: f64) -> Check {
    let mp = toy(alpha)?;
    let c = exact_grover(&mp).map_err(err)?;
    // The flag stays set after exact search.
    let out = registers(&c, &["T", "t"])?;
    let good: Vec<(usize, C64)> = toy_good().into_iter().map(|(i, a)| (i | 0b100, a)).collect();
    prepares(&c, &out, &good)
}

fn check_amplify_to_exact(alpha: f64) -> Check {
    let c = amplify_to_exact(&toy(alpha)?).map_err(err)?;
    prepares(&c, &registers(&c, &["T"])?, &toy_good())
}

/// `Σ √α_i |e_i⟩_X |i mod 2⟩_T`, with the zero branch taking the rest.
fn branch_prep(alphas: &[f64]) -> Result<Circuit, String> {
    let n = alphas.len();
    let rest = (1.0 - alphas.iter().sum::<f64>()).max(0.0);
    let mut state = Vec::new();
    if rest > 0.0 {
        state.push((0u64, real(rest.sqrt())));
    }
    for (i, a) in alphas.iter().enumerate() {
        state.push((1u64 << i | (i as u64 % 2) << n, real(a.sqrt())));
    }
    let mut b = CircuitBuilder::new(1);
    let x = b.register("X", n);
    let t = b.register("T", 1);
    let lib = LibraryGate::prep("branches", n + 1, state, 1, 0);
    b.gate(Gate::library(lib, concat(&[&x, &t])).map_err(err)?).map_err(err)?;
    Ok(b.finish())
}

fn check_adjust(alphas: &[f64], betas: &[f64]) -> Check {
    let prep = branch_prep(alphas)?;
    let c = adjust_amplitudes(&prep, "X", alphas, betas).map_err(err)?;
    let n = alphas.len();
    let rest = (1.0 - alphas.iter().sum::<f64>()).max(0.0);
    let z = rest + alphas.iter().zip(betas).map(|(a, b)| a * b).sum::<f64>();
    let mut want = vec![(0usize, real((rest / z).sqrt()))];
    for i in 0..n {
        want.push((1 << i | (i % 2) << n, real((alphas[i] * betas[i] / z).sqrt())));
    }
    prepares(&c, &registers(&c, &["X", "T"])?, &want)
}

/// Seeded draws of branch weights `α` (with some mass left on the zero branch) and factors `β`.
pub fn adjust_draws(seed: u64, draws: usize) -> Vec<(Vec<f64>, Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..draws)
        .map(|_| {
            let n = rng.gen_range(1..=4);
            let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
            let zero = rng.gen_range(0.0..0.5);
            let total: f64 = raw.iter().sum();
            let alphas = raw.iter().map(|a| a / total * (1.0 - zero)).collect();
            let betas = (0..n).map(|_| rng.gen_range(0.05..=1.0)).collect();
            (alphas, betas)
        })
        .collect()
}

/// `√α|1⟩|1⟩ + √(1−α)|0⟩|0⟩` on data `T` and flag `t`.
fn coin(alpha: BigRational) -> Result<MarkedPreparation, String> {
    let mut b = CircuitBuilder::new(1);
    let t = b.register("T", 1);
    let flag = b.qubit("t");
    b.gate(Gate::unitary(flag, rot(1.0 - to_f64(&alpha))).map_err(err)?).map_err(err)?;
    b.gate(Gate::cnot(flag, t[0])).map_err(err)?;
    MarkedPreparation::new(b.finish(), "T", "t", Weight::Exact(alpha)).map_err(err)
}

fn check_parallel(alpha: BigRational) -> Check {
    let c = parallel_amplify(&coin(alpha)?).map_err(err)?;
    prepares(&c, &registers(&c, &["T"])?, &[(1, real(1.0))])
}

fn ports(c: &Circuit, names: &[&str]) -> Result<Vec<QubitId>, String> {
    Ok(registers(c, names)?.qubits)
}

fn check_ham(n: usize, k: usize) -> Check {
    let c = ham_gadget(n, k).map_err(err)?;
    let inputs: Vec<u64> = (0..1u64 << n).collect();
    let cert = certify_library_gate(&c, &ports(&c, &["X", "Y"])?, &ham_semantic(n, k).map_err(err)?, &inputs).map_err(err)?;
    Ok(cert.min_fidelity)
}

fn controlled_prep(tag: &str, targets: usize, state: Vec<(u64, C64)>) -> Circuit {
    let mut b = CircuitBuilder::new(1);
    let r = b.register("r", targets + 1);
    let table = PrepTable {
        control_bits: 1,
        target_bits: targets,
        branches: vec![PrepBranch { control: 1, state }],
        promise: Promise::Free,
    };
    b.gate(Gate::library(LibraryGate::new(tag, Semantic::Prep(table), 1, 0), r).expect("register fits the table"))
        .expect("fresh builder");
    b.finish()
}

/// `(|00⟩|0⟩ + |Φ⁺⟩|1⟩)/√2` on data `T` and flag `t`.
fn bell_split() -> Result<MarkedPreparation, String> {
    let mut b = CircuitBuilder::new(1);
    let t = b.register("T", 2);
    let flag = b.qubit("t");
    b.gate(Gate::h(flag)).map_err(err)?;
    b.gate(Gate::controlled(vec![flag], t[0], hadamard()).map_err(err)?).map_err(err)?;
    b.gate(Gate::toffoli(&[flag, t[0]], t[1])).map_err(err)?;
    MarkedPreparation::new(b.finish(), "T", "t", Weight::Approx(0.5)).map_err(err)
}

fn check_ctrl_state() -> Check {
    let c = ctrl_state(&bell_split()?).map_err(err)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let reference = controlled_prep("bell", 2, vec![(0b00, real(h)), (0b11, real(h))]);
    Ok(certify(&c, &ports(&c, &["x", "T"])?, &reference, &[0, 1]).map_err(err)?.min_fidelity)
}

fn check_ctrl_from_zero(prep: &Circuit, alpha: f64, perp: Vec<(u64, C64)>) -> Check {
    let c = ctrl_from_zero_overlap(prep, "T", alpha).map_err(err)?;
    let targets = c.register("T").map_err(err)?.len();
    let reference = controlled_prep("perp", targets, perp);
    Ok(certify(&c, &ports(&c, &["x", "T"])?, &reference, &[0, 1]).map_err(err)?.min_fidelity)
}

fn zero_overlap(alpha: f64) -> Result<Circuit, String> {
    let state = vec![(0u64, real(alpha.sqrt())), (0b11, real((1.0 - alpha).sqrt()))];
    library_circuit(LibraryGate::prep("zero_overlap", 2, state, 1, 0), 2).map_err(err)
}

/// Zero plus every one-hot value on `bits` control bits.
fn one_hot_domain(bits: usize) -> Vec<u64> {
    std::iter::once(0).chain((0..bits).map(|i| 1 << i)).collect()
}

fn check_ctrl_dicke(ell: usize, weights: &[usize]) -> Check {
    let c = ctrl_dicke(ell, weights).map_err(err)?;
    let lib = ctrl_dicke_semantic(ell, weights).map_err(err)?;
    let inputs = one_hot_domain(weights.len());
    Ok(certify_library_gate(&c, &ports(&c, &["A", "T"])?, &lib, &inputs).map_err(err)?.min_fidelity)
}

fn check_threshold(n: usize, k: usize, test: WeightTest) -> Check {
    let c = custom_threshold(n, k, test).map_err(err)?;
    let lib = custom_threshold_semantic(n, k, test).map_err(err)?;
    let inputs: Vec<u64> = one_hot_domain(k).iter().flat_map(|a| (0..1u64 << n).map(move |x| a | x << k)).collect();
    Ok(certify_library_gate(&c, &ports(&c, &["A", "X", "q"])?, &lib, &inputs).map_err(err)?.min_fidelity)
}

fn check_ctrl_damped(m: usize, k: usize) -> Check {
    let c = ctrl_damped(m, k).map_err(err)?;
    let lib = ctrl_damped_semantic(m, k).map_err(err)?;
    Ok(certify_library_gate(&c, &ports(&c, &["x", "T"])?, &lib, &[0, 1]).map_err(err)?.min_fidelity)
}

fn check_zero_damped(m: usize, k: usize) -> Check {
    let c = prepare_zero_damped(m, k).map_err(err)?;
    let gamma = to_f64(&zero_damped_gamma(m, k).map_err(err)?);
    let amps = damped_binomial(m, k).map_err(err)?.amplitudes();
    let want: Vec<(usize, C64)> = amps
        .iter()
        .enumerate()
        .map(|(i, a)| (i, if i == 0 { real((1.0 - gamma).sqrt()) } else { a * gamma.sqrt() }))
        .collect();
    prepares(&c, &registers(&c, &["T"])?, &want)
}

fn check_onehot(p: &[f64]) -> Check {
    let c = prepare_onehot_dist(p).map_err(err)?;
    let want: Vec<(usize, C64)> = p.iter().enumerate().map(|(i, x)| (1 << i, real(x.sqrt()))).collect();
    prepares(&c, &registers(&c, &["T"])?, &want)
}

fn fmt_weights(w: &[f64]) -> Vec<String> {
    w.iter().map(|x| format!("{x:.6}")).collect()
}

/// Runs the whole suite in a fixed order.
pub fn certification_rows(tol: f64) -> Vec<ClaimVerdict> {
    let mut rows = Vec::new();
    let mut push = |id: &str, params, check| rows.push(verdict(id, params, check, tol));

    let tenth = (std::f64::consts::PI / 10.0).sin().powi(2);
    for (name, alpha) in [("1/4", 0.25), ("sin^2(pi/10)", tenth)] {
        push("certify:exact-grover", params! {"alpha" => name}, check_exact_grover(alpha));
    }
    for alpha in [0.4, 1.0] {
        push("certify:amplify-to-exact", params! {"alpha" => alpha}, check_amplify_to_exact(alpha));
    }
    for (i, (alphas, betas)) in adjust_draws(ADJUST_SEED, ADJUST_DRAWS).into_iter().enumerate() {
        let ps = params! {"draw" => i, "alpha" => fmt_weights(&alphas), "beta" => fmt_weights(&betas)};
        push("certify:adjust-amplitudes", ps, check_adjust(&alphas, &betas));
    }
    for (num, den) in [(1, 2), (1, 3)] {
        push("certify:parallel-amplify", params! {"alpha" => format!("{num}/{den}")}, check_parallel(rat(num, den)));
    }
    for n in 1..=4 {
        for k in 0..=2.min(n) {
            push("certify:ham-gadget", params! {"n" => n, "k" => k}, check_ham(n, k));
        }
    }
    push("certify:ctrl-state", params! {"prep" => "bell-split"}, check_ctrl_state());
    match build_zero_w(3) {
        Ok(w) => push("certify:ctrl-from-zero-overlap", params! {"prep" => "zero-w3"}, check_ctrl_from_zero(&w, 0.5, dicke_support(3, 1))),
        Err(e) => push("certify:ctrl-from-zero-overlap", params! {"prep" => "zero-w3"}, Err(err(e))),
    }
    for (name, alpha) in [("1/3", 1.0 / 3.0), ("4/5", 0.8)] {
        let check = zero_overlap(alpha).and_then(|p| check_ctrl_from_zero(&p, alpha, vec![(0b11, real(1.0))]));
        push("certify:ctrl-from-zero-overlap", params! {"prep" => "ghz-pair", "alpha" => name}, check);
    }
    for (ell, weights) in [(4, vec![0usize, 1, 2]), (3, vec![1, 2]), (2, vec![0, 1, 2])] {
        push("certify:ctrl-dicke", params! {"ell" => ell, "weights" => weights.clone()}, check_ctrl_dicke(ell, &weights));
    }
    for (n, k) in [(2, 1), (2, 2), (3, 1), (3, 2)] {
        for (name, test) in [("at-most", WeightTest::AtMost), ("equal", WeightTest::Equal)] {
            push("certify:custom-threshold", params! {"n" => n, "k" => k, "test" => name}, check_threshold(n, k, test));
        }
    }
    for (m, k) in [(1, 1), (2, 1), (2, 2), (3, 1), (3, 2)] {
        push("certify:ctrl-damped", params! {"m" => m, "k" => k}, check_ctrl_damped(m, k));
    }
    for (m, k) in [(2, 1), (2, 2), (3, 1), (4, 2)] {
        push("certify:zero-damped", params! {"m" => m, "k" => k}, check_zero_damped(m, k));
    }
    for p in [vec![0.5, 1.0 / 3.0, 1.0 / 6.0], vec![1.0, 0.0, 0.0], vec![0.25; 4]] {
        push("certify:onehot-dist", params! {"p" => fmt_weights(&p)}, check_onehot(&p));
    }
    rows
}
