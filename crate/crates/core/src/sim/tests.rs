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


use super::*;
use crate::ir::{dicke_support, real, rot, Circuit, CircuitBuilder, Gate, LibraryGate, Register};

fn qs(n: usize) -> Vec<QubitId> {
    (0..n).map(QubitId).collect()
}

fn close(a: C64, b: C64) -> bool {
    (a - b).norm() < 1e-12
}

#[test]
fn x_flips_zero() {
    let s = apply(&StateVector::zero(&qs(1)), &Gate::x(QubitId(0))).unwrap();
    assert!(close(s.amplitude(1), real(1.0)));
}

#[test]
fn fanout_copies_one() {
    let s = StateVector::basis(&qs(3), 0b001);
    let s = apply(&s, &Gate::fanout(QubitId(0), &[QubitId(1), QubitId(2)], false)).unwrap();
    assert!(close(s.amplitude(0b111), real(1.0)));
}

#[test]
fn rot_quarter_on_zero() {
    let s = apply(&StateVector::zero(&qs(1)), &Gate::unitary(QubitId(0), rot(0.25)).unwrap()).unwrap();
    assert!(close(s.amplitude(0), real(0.5)));
    assert!(close(s.amplitude(1), real(3f64.sqrt() / 2.0)));
}

#[test]
fn run_examples() {
    let c = Circuit::new(vec![Register::span("T", 0, 3)], 1).unwrap();
    let s = StateVector::basis(&qs(3), 0b101);
    assert_eq!(run(&c, &s).unwrap(), s);
    let hh = c.append_layer(vec![Gate::h(QubitId(0))]).unwrap().append_layer(vec![Gate::h(QubitId(0))]).unwrap();
    let out = run(&hh, &StateVector::zero(&qs(3))).unwrap();
    assert!(close(out.amplitude(0), real(1.0)));
    let toff = c.append_layer(vec![Gate::toffoli(&[QubitId(0), QubitId(1)], QubitId(2))]).unwrap();
    let out = run(&toff, &StateVector::basis(&qs(3), 0b011)).unwrap();
    assert!(close(out.amplitude(0b111), real(1.0)));
}

#[test]
fn fidelity_examples() {
    let zero = StateVector::zero(&qs(1));
    let one = StateVector::basis(&qs(1), 1);
    assert!((fidelity(&zero, &zero).unwrap() - 1.0).abs() < 1e-15);
    assert_eq!(fidelity(&zero, &one).unwrap(), 0.0);
    let eps = StateVector::from_amplitudes(&qs(1), vec![real(0.7f64.sqrt()), real(0.3f64.sqrt())]).unwrap();
    assert!((fidelity(&eps, &zero).unwrap() - 0.7).abs() < 1e-12);
    let other = StateVector::zero(&[QubitId(5)]);
    assert!(fidelity(&zero, &other).is_err());
}

#[test]
fn fidelity_ignores_qubit_order() {
    let a = StateVector::basis(&qs(2), 0b01);
    let b = StateVector::basis(&[QubitId(1), QubitId(0)], 0b10);
    assert!((fidelity(&a, &b).unwrap() - 1.0).abs() < 1e-15);
}

#[test]
fn clean_preparation_of_library_dicke() {
    let mut b = CircuitBuilder::new(4);
    let t = b.register("T", 4);
    b.gate(Gate::library(LibraryGate::dicke(4, 2), t.clone()).unwrap()).unwrap();
    let c = b.finish();
    let target = StateVector::from_sparse(
        &t,
        &dicke_support(4, 2).into_iter().map(|(i, a)| (i as usize, a)).collect::<Vec<_>>(),
    )
    .unwrap();
    let r = check_clean_preparation(&c, c.register("T").unwrap(), &target).unwrap();
    assert!(r.passed(), "{r:?}");
}

#[test]
fn dirty_ancilla_is_reported() {
    let mut b = CircuitBuilder::new(1);
    let t = b.register("T", 1);
    let a = b.qubit("a");
    b.gate(Gate::x(a)).unwrap();
    let c = b.finish();
    let r = check_clean_preparation(&c, c.register("T").unwrap(), &StateVector::zero(&t)).unwrap();
    assert!(!r.clean);
    assert_eq!(r.fidelity, 0.0);
    assert!((r.residual_ancilla_mass - 1.0).abs() < 1e-12);
}

#[test]
fn prep_adjoint_undoes_prep_with_phases() {
    let state = vec![(0u64, C64::new(0.0, 0.5)), (1, C64::new(0.5, 0.0)), (3, C64::new(-0.5, 0.5))];
    let lib = LibraryGate::prep("demo", 2, state.clone(), 1, 0);
    let mut b = CircuitBuilder::new(1);
    let t = b.register("T", 2);
    b.gate(Gate::library(lib.clone(), t.clone()).unwrap()).unwrap();
    let c = b.finish();
    let out = run_from_zero(&c).unwrap();
    for (i, a) in &state {
        assert!(close(out.amplitude(*i as usize), *a));
    }
    let back = run(&c.inverse(), &out).unwrap();
    assert!(close(back.amplitude(0), real(1.0)));
}

#[test]
fn library_domain_violation_is_reported() {
    let mut b = CircuitBuilder::new(1);
    let a = b.register("a", 2);
    let q = b.register("Q", 3);
    let mut ports = a.clone();
    ports.extend_from_slice(&q);
    b.gate(Gate::library(LibraryGate::w_swap(2, 1), ports).unwrap()).unwrap();
    let c = b.finish();
    let bad = StateVector::basis(&c.qubits(), 0b11);
    assert!(matches!(run(&c, &bad), Err(SimError::DomainViolation { .. })));
    let good = StateVector::basis(&c.qubits(), 0b01 | 0b100);
    assert!(close(run(&c, &good).unwrap().amplitude(0b01 | 0b10000), real(1.0)));
}

#[test]
fn certification_catches_corruption() {
    let mut b = CircuitBuilder::new(1);
    let x = b.register("x", 2);
    let o = b.qubit("o");
    b.gate(Gate::toffoli(&x, o)).unwrap();
    let good = b.finish();
    let ports = vec![x[0], x[1], o];
    let inputs: Vec<u64> = (0..4).collect();
    assert!(certify_library_gate(&good, &ports, &LibraryGate::threshold(2, 2), &inputs).is_ok());
    let err = certify_library_gate(&good, &ports, &LibraryGate::threshold(2, 1), &inputs).unwrap_err();
    assert!(matches!(err, CertifyError::Mismatch { ref input, .. } if input == "100"), "{err}");
}

#[test]
fn dump_lists_nonzero_rows() {
    let s = StateVector::from_sparse(&qs(2), &[(0b01, real(1.0)), (0b10, real(1.0))]).unwrap();
    let rows = s.dump(&qs(2)).unwrap();
    assert_eq!(rows.iter().map(|r| r.bits.as_str()).collect::<Vec<_>>(), vec!["10", "01"]);
}
