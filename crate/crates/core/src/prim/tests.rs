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


use proptest::prelude::*;

use super::*;
use crate::ir::{c, dicke_support, diag, hadamard, real, rot, Circuit, CircuitBuilder, Gate, LibraryGate, Promise, WeightTest};
use crate::sim::{certify, certify_library_gate, check_clean_preparation, run, run_lazy, StateVector};

const TOL: f64 = 1e-9;

/// Output state of `c` on zeros restricted to the named registers, asserting every other qubit is clean.
fn prepared(c: &Circuit, names: &[&str]) -> StateVector {
    let keep: Vec<QubitId> = names.iter().flat_map(|n| c.register(n).unwrap().qubits.clone()).collect();
    let out = run_lazy(c, &keep).unwrap();
    assert!(out.released_mass < TOL, "released mass {}", out.released_mass);
    out.state.restrict_clean(&keep, TOL).unwrap().expect("ancillas not clean")
}

fn target(order: &[QubitId], entries: &[(usize, C64)]) -> StateVector {
    StateVector::from_sparse(order, entries).unwrap()
}

fn assert_fidelity(s: &StateVector, t: &StateVector) {
    let f = crate::sim::fidelity(s, t).unwrap();
    assert!(f > 1.0 - TOL, "fidelity {f}");
}

/// Marked preparation on data `T` (2 qubits) and flag `t`: `√α|1⟩|+⟩|1⟩ + √(1−α)|00⟩|0⟩`.
fn toy(alpha: f64) -> MarkedPreparation {
    let mut b = CircuitBuilder::new(1);
    let t = b.register("T", 2);
    let flag = b.qubit("t");
    b.gate(Gate::unitary(flag, rot(1.0 - alpha)).unwrap()).unwrap();
    b.layer(vec![Gate::cnot(flag, t[0])]).unwrap();
    b.gate(Gate::controlled(vec![flag], t[1], hadamard()).unwrap()).unwrap();
    MarkedPreparation::new(b.finish(), "T", "t", Weight::Approx(alpha)).unwrap()
}

fn toy_target(c: &Circuit) -> StateVector {
    let t = c.register("T").unwrap().qubits.clone();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    target(&t, &[(0b01, real(h)), (0b11, real(h))])
}

#[test]
fn schedule_examples() {
    let s = grover_schedule(0.4, DEFAULT_FLOOR).unwrap();
    assert_eq!(s.r, 3);
    assert!((s.exact_alpha - 0.25).abs() < 1e-15);
    assert!(s.rotate);
    assert!((s.exact_alpha / 0.4 - 0.625).abs() < 1e-12);
    assert!(!grover_schedule(0.25, DEFAULT_FLOOR).unwrap().rotate);
    assert_eq!(grover_schedule(1.0, DEFAULT_FLOOR).unwrap().r, 1);
    assert_eq!(grover_schedule(0.0, DEFAULT_FLOOR), Err(PrimError::NothingToAmplify));
    assert!(matches!(grover_schedule(1e-5, DEFAULT_FLOOR), Err(PrimError::BelowFloor { .. })));
}

#[test]
fn exact_grover_reaches_marked_state() {
    let tenth = (std::f64::consts::PI / 10.0).sin().powi(2);
    for (alpha, rounds) in [(0.25, 1), (tenth, 2), (1.0, 0)] {
        let mp = toy(alpha);
        let g = exact_grover(&mp).unwrap();
        assert_eq!(g.metadata().grover_rounds, rounds);
        let l = mp.circuit.layer_count();
        assert_eq!(g.layer_count(), l + rounds * (2 * l + 2));
        let out = run_lazy(&g, &[mp.flag]).unwrap();
        let marked = out.state.marginal(&[mp.flag]).unwrap()[1];
        assert!((marked - 1.0).abs() < 1e-12, "α={alpha}: marked mass {marked}");
    }
    assert!(matches!(exact_grover(&toy(0.5)), Err(PrimError::NotExactAngle { .. })));
}

#[test]
fn amplify_to_exact_is_clean() {
    for alpha in [0.4, 0.25, 1.0, 0.07] {
        let mp = toy(alpha);
        assert!((mp.measured_alpha().unwrap() - alpha).abs() < 1e-10);
        let c = amplify_to_exact(&mp).unwrap();
        let v = check_clean_preparation(&c, c.register("T").unwrap(), &toy_target(&c)).unwrap();
        assert!(v.passed(), "α={alpha}: {v:?}");
    }
    let tie = amplify_to_exact(&toy(0.25)).unwrap();
    assert!(tie.register("amp").is_err());
}

/// `Σ √α_i |e_i⟩_X` with the zero branch taking the rest, times `|i mod 2⟩_T`.
fn branch_prep(alphas: &[f64]) -> Circuit {
    let n = alphas.len();
    let rest = (1.0 - alphas.iter().sum::<f64>()).max(0.0);
    let mut state = vec![];
    if rest > 0.0 {
        state.push((0u64, real(rest.sqrt())));
    }
    for (i, a) in alphas.iter().enumerate() {
        if *a > 0.0 {
            state.push((1u64 << i | ((i as u64 % 2) << n), real(a.sqrt())));
        }
    }
    let norm: f64 = state.iter().map(|(_, a)| a.norm_sqr()).sum();
    let state = state.into_iter().map(|(i, a)| (i, a / norm.sqrt())).collect();
    let mut b = CircuitBuilder::new(1);
    let x = b.register("X", n);
    let t = b.register("T", 1);
    let mut ports = x.clone();
    ports.extend(t);
    b.gate(Gate::library(LibraryGate::prep("branches", n + 1, state, 1, 0), ports).unwrap()).unwrap();
    b.finish()
}

fn check_adjusted(alphas: &[f64], betas: &[f64]) {
    let prep = branch_prep(alphas);
    let c = adjust_amplitudes(&prep, "X", alphas, betas).unwrap();
    let n = alphas.len();
    let rest = (1.0 - alphas.iter().sum::<f64>()).max(0.0);
    let z = rest + alphas.iter().zip(betas).map(|(a, b)| a * b).sum::<f64>();
    let s = prepared(&c, &["X", "T"]);
    let order = s.qubit_order().to_vec();
    let x = c.register("X").unwrap().qubits.clone();
    let t = c.register("T").unwrap().qubits.clone();
    let index = |v: u64, bit: u64| s.index_of(&x, v).unwrap() | s.index_of(&t, bit).unwrap();
    assert!((s.amplitude(index(0, 0)).re - (rest / z).sqrt()).abs() < 1e-10);
    for i in 0..n {
        let want = (alphas[i] * betas[i] / z).sqrt();
        let got = s.amplitude(index(1 << i, i as u64 % 2));
        assert!((got - real(want)).norm() < 1e-10, "branch {i}: {got} vs {want}");
    }
    let _ = order;
}

#[test]
fn adjust_examples() {
    check_adjusted(&[0.5, 0.5], &[1.0, 0.25]);
    check_adjusted(&[0.5, 0.5], &[1.0, 1.0]);
    check_adjusted(&[0.2, 0.3, 0.5], &[0.0, 1.0, 0.0]);
    let prep = branch_prep(&[0.5, 0.5]);
    assert!(matches!(adjust_amplitudes(&prep, "X", &[0.5, 0.5], &[0.0, 0.0]), Err(PrimError::Weights(_))));
    assert!(matches!(adjust_amplitudes(&prep, "X", &[0.5, 0.5], &[1.5, 0.0]), Err(PrimError::Weights(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]
    #[test]
    fn adjust_random(raw in prop::collection::vec(0.05f64..1.0, 1..5), betas in prop::collection::vec(0.05f64..=1.0, 4), zero in 0.0f64..0.5) {
        let total: f64 = raw.iter().sum();
        let alphas: Vec<f64> = raw.iter().map(|a| a / total * (1.0 - zero)).collect();
        check_adjusted(&alphas, &betas[..alphas.len()]);
    }
}

/// Base on data `T` (1 qubit) and flag `t`: `√α|1⟩|1⟩ + √(1−α)|0⟩|0⟩`.
fn coin(alpha: Weight) -> MarkedPreparation {
    let mut b = CircuitBuilder::new(1);
    let t = b.register("T", 1);
    let flag = b.qubit("t");
    b.gate(Gate::unitary(flag, rot(1.0 - alpha.value())).unwrap()).unwrap();
    b.gate(Gate::cnot(flag, t[0])).unwrap();
    MarkedPreparation::new(b.finish(), "T", "t", alpha).unwrap()
}

#[test]
fn parallel_amplify_examples() {
    for (num, den, p_star) in [(1, 2, crate::dist::rat(1, 2)), (1, 3, crate::dist::rat(4, 9)), (1, 1, crate::dist::rat(1, 1))] {
        let c = parallel_amplify(&coin(Weight::Exact(crate::dist::rat(num, den)))).unwrap();
        let rec = c.metadata().amplifications.iter().find(|r| r.site.ends_with(".parallel")).unwrap();
        assert_eq!(rec.alpha, Weight::Exact(p_star));
        let t = c.register("T").unwrap();
        let v = check_clean_preparation(&c, t, &StateVector::basis(&t.qubits, 1)).unwrap();
        assert!(v.passed(), "α={num}/{den}: {v:?}");
    }
}

#[test]
fn parallel_amplify_rejects_dirty_unmarked_branch() {
    let mut b = CircuitBuilder::new(1);
    let t = b.register("T", 1);
    let flag = b.qubit("t");
    b.layer(vec![Gate::h(flag), Gate::x(t[0])]).unwrap();
    let mp = MarkedPreparation::new(b.finish(), "T", "t", Weight::Approx(0.5)).unwrap();
    assert!(matches!(parallel_amplify(&mp), Err(PrimError::Precondition(_))));
}

#[test]
fn zero_w_examples() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for n in [1, 3] {
        let c = build_zero_w(n).unwrap();
        let s = prepared(&c, &["T"]);
        assert!((s.amplitude(0).re - h).abs() < 1e-12);
        for i in 0..n {
            assert!((s.amplitude(1 << i).re - h / (n as f64).sqrt()).abs() < 1e-12);
        }
    }
}

fn one_hot_target(c: &Circuit, p: &[f64]) -> StateVector {
    let t = c.register("T").unwrap().qubits.clone();
    let entries: Vec<(usize, C64)> = p.iter().enumerate().map(|(i, x)| (1 << i, real(x.sqrt()))).collect();
    target(&t, &entries)
}

#[test]
fn onehot_dist_base_has_exact_mass() {
    for p in [vec![0.5, 1.0 / 3.0, 1.0 / 6.0], vec![1.0, 0.0, 0.0], vec![0.25; 4]] {
        let base = onehot_dist_base(&p).unwrap();
        let want = 1.0 / (p.len() as f64 + 1.0);
        assert!((base.measured_alpha().unwrap() - want).abs() < 1e-10);
    }
}

#[test]
fn onehot_dist_examples() {
    for p in [vec![0.5, 1.0 / 3.0, 1.0 / 6.0], vec![1.0, 0.0, 0.0], vec![0.25; 4]] {
        let c = prepare_onehot_dist(&p).unwrap();
        let v = check_clean_preparation(&c, c.register("T").unwrap(), &one_hot_target(&c, &p)).unwrap();
        assert!(v.passed(), "{p:?}: {v:?}");
    }
    assert!(matches!(prepare_onehot_dist(&[0.5, 0.2]), Err(PrimError::Weights(_))));
}

#[test]
fn small_state_examples() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let cases: Vec<Vec<C64>> = vec![
        vec![real(h), real(h)],
        vec![real(h), real(0.0), real(0.0), c(0.0, h)],
        vec![real(0.0), real(0.0), real(1.0), real(0.0)],
    ];
    for amps in cases {
        let circuit = prepare_small_state(&amps).unwrap();
        let t = circuit.register("T").unwrap();
        let want = StateVector::from_amplitudes(&t.qubits, amps.clone()).unwrap();
        let v = check_clean_preparation(&circuit, t, &want).unwrap();
        assert!(v.passed(), "{amps:?}: {v:?}");
    }
    assert!(matches!(prepare_small_state(&[real(0.0), real(0.0)]), Err(PrimError::Weights(_))));
}

fn ham_ports(c: &Circuit) -> Vec<QubitId> {
    let mut ports = c.register("X").unwrap().qubits.clone();
    ports.extend(c.register("Y").unwrap().qubits.iter().copied());
    ports
}

#[test]
fn ham_gadget_examples() {
    let c = ham_gadget(4, 2).unwrap();
    let ports = ham_ports(&c);
    for (x, y) in [(0b0110u64, 0b010u64), (0b0111, 0b100), (0, 0)] {
        let start = StateVector::basis(&c.qubits(), StateVector::zero(&c.qubits()).index_of(&ports, x).unwrap());
        let out = run(&c, &start).unwrap();
        let want = out.index_of(&ports, x | y << 4).unwrap();
        assert!((out.amplitude(want).norm() - 1.0).abs() < 1e-12, "x={x:04b}");
    }
}

#[test]
fn ham_gadget_matches_semantic() {
    for n in 1..=4 {
        for k in 0..=2.min(n) {
            let c = ham_gadget(n, k).unwrap();
            let inputs: Vec<u64> = (0..1u64 << n).collect();
            certify_library_gate(&c, &ham_ports(&c), &ham_semantic(n, k).unwrap(), &inputs).unwrap();
        }
    }
}

#[test]
fn library_gate_examples() {
    let check = |lib: LibraryGate, len: usize, input: u64, output: u64| {
        let order: Vec<QubitId> = (0..len).map(QubitId).collect();
        let s = crate::sim::apply(&StateVector::basis(&order, input as usize), &Gate::library(lib, order.clone()).unwrap()).unwrap();
        assert!((s.amplitude(output as usize).norm() - 1.0).abs() < 1e-12);
    };
    check(exact_gate(3, 2), 4, 0b101, 0b1101);
    check(threshold_gate(3, 1), 4, 0, 0);
    // i = 3 on three binary qubits sets the third of four slots.
    check(one_hot(3, 4), 7, 0b011, 0b0100 << 3);
    // e_2 on A, Q_2 = |10⟩, Q* = |00⟩.
    let a = 0b10u64;
    let q2 = 0b01u64 << 4;
    check(w_controlled_swap(2, 2), 8, a | q2, a | 0b01 << 6);
}

#[test]
fn w_swap_superposition() {
    let order: Vec<QubitId> = (0..8).map(QubitId).collect();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let start = target(&order, &[(0b01 | 0b01 << 2, real(h)), (0b10 | 0b10 << 4, real(h))]);
    let s = crate::sim::apply(&start, &Gate::library(w_controlled_swap(2, 2), order.clone()).unwrap()).unwrap();
    let want = target(&order, &[(0b01 | 0b01 << 6, real(h)), (0b10 | 0b10 << 6, real(h))]);
    assert_fidelity(&s, &want);
}

/// Runs `c` from the basis state with `value` on `ports`, everything else zero.
fn run_basis(c: &Circuit, ports: &[QubitId], value: u64) -> StateVector {
    let order = c.qubits();
    run(c, &StateVector::basis(&order, StateVector::zero(&order).index_of(ports, value).unwrap())).unwrap()
}

#[test]
fn ctrl_circuit_examples() {
    let mut b = CircuitBuilder::new(1);
    let t = b.register("T", 1);
    b.gate(Gate::x(t[0])).unwrap();
    let cx = ctrl_circuit(&b.finish()).unwrap();
    let ctrl = cx.register("ctrl").unwrap().qubits[0];
    let t = cx.register("body.T").unwrap().qubits[0];
    for (input, output) in [(0b00u64, 0b00u64), (0b01, 0b11), (0b11, 0b01)] {
        let s = run_basis(&cx, &[ctrl, t], input);
        assert!((s.amplitude(s.index_of(&[ctrl, t], output).unwrap()).norm() - 1.0).abs() < 1e-12);
    }

    let w3 = library_circuit(LibraryGate::w_state(3), 3).unwrap();
    let cw = ctrl_circuit(&w3).unwrap();
    let ctrl = cw.register("ctrl").unwrap().qubits[0];
    let t = cw.register("body.T").unwrap().qubits.clone();
    let mut ports = vec![ctrl];
    ports.extend(t.iter().copied());
    let mut reference = CircuitBuilder::new(3);
    let r = reference.register("r", 4);
    reference.gate(Gate::library(LibraryGate::w_state(3), r[1..].to_vec()).unwrap().with_controls(&[r[0]])).unwrap();
    certify(&cw, &ports, &reference.finish(), &[0, 1]).unwrap();

    let zero = run_basis(&cw, &ports, 0);
    assert!((zero.amplitude(0).norm() - 1.0).abs() < 1e-12);
    let one = run_basis(&cw, &ports, 1);
    for i in 0..3 {
        let idx = one.index_of(&ports, 1 | 2 << i).unwrap();
        assert!((one.amplitude(idx).norm_sqr() - 1.0 / 3.0).abs() < 1e-12);
    }

    let mut b = CircuitBuilder::new(1);
    let t = b.register("T", 1);
    b.gate(Gate::unitary(t[0], diag(real(1.0), c(0.0, 1.0))).unwrap()).unwrap();
    assert!(matches!(ctrl_circuit(&b.finish()), Err(PrimError::Ir(IrError::NotControllable(_)))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]
    #[test]
    fn ctrl_circuit_is_linear(eps in 0.05f64..0.95) {
        let w3 = library_circuit(LibraryGate::w_state(3), 3).unwrap();
        let cw = ctrl_circuit(&w3).unwrap();
        let ctrl = cw.register("ctrl").unwrap().qubits[0];
        let t = cw.register("body.T").unwrap().qubits.clone();
        let order = cw.qubits();
        let probe = StateVector::zero(&order);
        let start = target(&order, &[(0, real((1.0 - eps).sqrt())), (probe.index_of(&[ctrl], 1).unwrap(), real(eps.sqrt()))]);
        let out = run(&cw, &start).unwrap();
        let mut entries = vec![(0, real((1.0 - eps).sqrt()))];
        for i in 0..3 {
            let idx = probe.index_of(&[ctrl], 1).unwrap() | probe.index_of(&t, 1 << i).unwrap();
            entries.push((idx, real((eps / 3.0).sqrt())));
        }
        let f = crate::sim::fidelity(&out, &target(&order, &entries)).unwrap();
        prop_assert!(f > 1.0 - TOL);
    }
}

fn ctrl_dicke_ports(c: &Circuit) -> Vec<QubitId> {
    let mut ports = c.register("A").unwrap().qubits.clone();
    ports.extend(c.register("T").unwrap().qubits.iter().copied());
    ports
}

#[test]
fn ctrl_dicke_examples() {
    let weights = [0usize, 1, 2];
    let c = ctrl_dicke(4, &weights).unwrap();
    let ports = ctrl_dicke_ports(&c);
    let out = run_basis(&c, &ports, 0b010);
    for i in 0..4 {
        let idx = out.index_of(&ports, 0b010 | 1 << (3 + i)).unwrap();
        assert!((out.amplitude(idx).re - 0.5).abs() < 1e-12);
    }
    let out = run_basis(&c, &ports, 0b001);
    assert!((out.amplitude(out.index_of(&ports, 0b001).unwrap()).norm() - 1.0).abs() < 1e-12);
    certify_library_gate(&c, &ports, &ctrl_dicke_semantic(4, &weights).unwrap(), &[0, 0b001, 0b010, 0b100]).unwrap();
    let order = c.qubits();
    let probe = StateVector::zero(&order);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let start = target(&order, &[(probe.index_of(&ports, 0b001).unwrap(), real(h)), (probe.index_of(&ports, 0b100).unwrap(), real(h))]);
    let out = run(&c, &start).unwrap();
    let mut entries = vec![(probe.index_of(&ports, 0b001).unwrap(), real(h))];
    for (x, a) in dicke_support(4, 2) {
        entries.push((probe.index_of(&ports, 0b100 | x << 3).unwrap(), a * h));
    }
    assert_fidelity(&out, &target(&order, &entries));
}

/// `(|φ₀⟩|0⟩ + |φ₁⟩|1⟩)/√2` with `φ₀ = |00⟩`, `φ₁` the Bell state.
fn bell_split() -> MarkedPreparation {
    let mut b = CircuitBuilder::new(1);
    let t = b.register("T", 2);
    let flag = b.qubit("t");
    b.gate(Gate::h(flag)).unwrap();
    b.gate(Gate::controlled(vec![flag], t[0], hadamard()).unwrap()).unwrap();
    b.gate(Gate::toffoli(&[flag, t[0]], t[1])).unwrap();
    MarkedPreparation::new(b.finish(), "T", "t", Weight::Approx(0.5)).unwrap()
}

#[test]
fn ctrl_state_examples() {
    let split = bell_split();
    let d = split.circuit.cost().depth;
    let c = ctrl_state(&split).unwrap();
    assert_eq!(c.cost().depth, 3 * d + 5);
    let x = c.register("x").unwrap().qubits[0];
    let t = c.register("T").unwrap().qubits.clone();
    let mut ports = vec![x];
    ports.extend(t.iter().copied());
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut reference = CircuitBuilder::new(1);
    let r = reference.register("r", 3);
    let bell = vec![(0b00u64, real(h)), (0b11, real(h))];
    let table = crate::ir::PrepTable {
        control_bits: 1,
        target_bits: 2,
        branches: vec![crate::ir::PrepBranch { control: 1, state: bell }],
        promise: Promise::Free,
    };
    reference.gate(Gate::library(LibraryGate::new("bell", crate::ir::Semantic::Prep(table), 1, 0), r).unwrap()).unwrap();
    certify(&c, &ports, &reference.finish(), &[0, 1]).unwrap();

    let mut b = CircuitBuilder::new(1);
    let t = b.register("T", 1);
    let flag = b.qubit("t");
    b.gate(Gate::h(flag)).unwrap();
    b.gate(Gate::cnot(flag, t[0])).unwrap();
    let cnot_like = ctrl_state(&MarkedPreparation::new(b.finish(), "T", "t", Weight::Approx(0.5)).unwrap()).unwrap();
    let x = cnot_like.register("x").unwrap().qubits[0];
    let t = cnot_like.register("T").unwrap().qubits[0];
    let out = run_basis(&cnot_like, &[x, t], 1);
    assert!((out.amplitude(out.index_of(&[x, t], 0b11).unwrap()).norm() - 1.0).abs() < 1e-12);

    let lopsided = toy(0.3);
    assert!(matches!(ctrl_state(&lopsided), Err(PrimError::Precondition(_))));
}

fn zero_overlap_prep(state: Vec<(u64, C64)>, n: usize) -> Circuit {
    library_circuit(LibraryGate::prep("zero_overlap", n, state, 1, 0), n).unwrap()
}

fn check_ctrl_from_zero(prep: &Circuit, alpha: f64, perp: &[(u64, C64)]) {
    let c = ctrl_from_zero_overlap(prep, "T", alpha).unwrap();
    let x = c.register("x").unwrap().qubits[0];
    let t = c.register("T").unwrap().qubits.clone();
    let mut ports = vec![x];
    ports.extend(t.iter().copied());
    let mut reference = CircuitBuilder::new(1);
    let r = reference.register("r", t.len() + 1);
    let table = crate::ir::PrepTable {
        control_bits: 1,
        target_bits: t.len(),
        branches: vec![crate::ir::PrepBranch { control: 1, state: perp.to_vec() }],
        promise: Promise::Free,
    };
    reference.gate(Gate::library(LibraryGate::new("perp", crate::ir::Semantic::Prep(table), 1, 0), r).unwrap()).unwrap();
    certify(&c, &ports, &reference.finish(), &[0, 1]).unwrap();
}

#[test]
fn ctrl_from_zero_overlap_examples() {
    check_ctrl_from_zero(&build_zero_w(3).unwrap(), 0.5, &dicke_support(3, 1));
    let third = |a: f64| vec![(0u64, real(a.sqrt())), (0b11, real((1.0 - a).sqrt()))];
    check_ctrl_from_zero(&zero_overlap_prep(third(1.0 / 3.0), 2), 1.0 / 3.0, &[(0b11, real(1.0))]);
    check_ctrl_from_zero(&zero_overlap_prep(third(0.8), 2), 0.8, &[(0b11, real(1.0))]);
    let prep = zero_overlap_prep(third(1.0 / 3.0), 2);
    assert!(matches!(ctrl_from_zero_overlap(&prep, "T", 0.25), Err(PrimError::Precondition(_))));
    assert!(matches!(ctrl_from_zero_overlap(&prep, "T", 0.005), Err(PrimError::BelowFloor { .. })));
    assert!(matches!(ctrl_from_zero_overlap(&prep, "T", 1.0), Err(PrimError::Precondition(_))));
}

fn threshold_ports(c: &Circuit) -> Vec<QubitId> {
    ["A", "X", "q"].iter().flat_map(|n| c.register(n).unwrap().qubits.clone()).collect()
}

fn promised_inputs(n: usize, k: usize) -> Vec<u64> {
    let controls: Vec<u64> = std::iter::once(0).chain((0..k).map(|i| 1 << i)).collect();
    controls.iter().flat_map(|a| (0..1u64 << n).map(move |x| a | x << k)).collect()
}

#[test]
fn custom_threshold_examples() {
    let sem = |a: u64, x: u64| {
        let c = custom_threshold(4, 2, WeightTest::AtMost).unwrap();
        let ports = threshold_ports(&c);
        let out = run_basis(&c, &ports, a | x << 2);
        let one = out.index_of(&ports, a | x << 2 | 1 << 6).unwrap();
        out.amplitude(one).norm() > 0.5
    };
    assert!(sem(0b10, 0b0110));
    assert!(!sem(0b01, 0b0110));
    assert!(!sem(0, 0b0100));
    assert!(sem(0, 0));
}

#[test]
fn custom_threshold_matches_semantic() {
    for (n, k) in [(2, 1), (2, 2), (3, 1), (3, 2)] {
        for test in [WeightTest::AtMost, WeightTest::Equal] {
            let c = custom_threshold(n, k, test).unwrap();
            let lib = custom_threshold_semantic(n, k, test).unwrap();
            certify_library_gate(&c, &threshold_ports(&c), &lib, &promised_inputs(n, k)).unwrap();
        }
    }
}

#[test]
fn explicit_builders_fit_the_fanout_budget() {
    // EXACT_k is charged width k + 1.
    assert_eq!(ham_gadget(4, 2).unwrap().cost().max_fanout_width, 3);
    assert_eq!(custom_threshold(3, 2, WeightTest::Equal).unwrap().cost().max_fanout_width, 3);
}
