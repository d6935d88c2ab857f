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


//! Property tests over randomly generated circuits.

use proptest::prelude::*;
use qacz::ir::{c, deserialize, diag, real, rot, serialize, Circuit, CircuitBuilder, Gate, QubitId, C64};
use qacz::sim::{apply_in_place, fidelity, run, set_workers, StateVector, NORM_TOL};

/// One random gate: a kind selector, a seed for its qubits and an angle.
type Spec = (u8, u64, f64);

/// `count` distinct qubits out of `n`, chosen from `seed`.
fn pick(n: usize, count: usize, mut seed: u64) -> Vec<QubitId> {
    let mut pool: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    for _ in 0..count.min(n) {
        let i = (seed % pool.len() as u64) as usize;
        seed /= pool.len() as u64;
        out.push(QubitId(pool.remove(i)));
    }
    out
}

fn gate(n: usize, (kind, seed, x): Spec) -> Gate {
    let q = |count| pick(n, count, seed);
    match kind % 10 {
        0 => Gate::unitary(q(1)[0], rot(x)).unwrap(),
        1 => Gate::h(q(1)[0]),
        2 => {
            let p = q(2);
            Gate::cnot(p[0], p[1])
        }
        3 => {
            let p = q(3);
            Gate::toffoli(&p[..2], p[2])
        }
        4 => {
            let p = q(2);
            Gate::controlled(vec![p[0]], p[1], rot(x)).unwrap()
        }
        5 => Gate::unitary(q(1)[0], diag(real(1.0), c((6.0 * x).cos(), (6.0 * x).sin()))).unwrap(),
        6 => {
            let p = q(3);
            Gate::fanout(p[0], &p[1..], false)
        }
        7 => {
            let p = q(2);
            Gate::swap(p[0], p[1])
        }
        8 => Gate::reflect_zero(&q(2)),
        _ => {
            let p = q(3);
            Gate::or(&p[..2], p[2])
        }
    }
}

/// Packs gates greedily into layers of disjoint qubits.
fn circuit(n: usize, specs: &[Spec]) -> Circuit {
    let mut b = CircuitBuilder::new(2);
    b.register("q", n);
    let mut layer: Vec<Gate> = Vec::new();
    for s in specs {
        let g = gate(n, *s);
        if layer.iter().any(|h| h.qubits().any(|a| g.qubits().any(|b| a == b))) {
            b.layer(std::mem::take(&mut layer)).unwrap();
        }
        layer.push(g);
    }
    b.layer(layer).unwrap();
    b.finish()
}

fn specs(max: usize) -> impl Strategy<Value = Vec<Spec>> {
    prop::collection::vec((any::<u8>(), any::<u64>(), 0.0f64..=1.0), 1..max)
}

fn random_state(order: &[QubitId], raw: &[(f64, f64)]) -> StateVector {
    let amps: Vec<C64> = raw.iter().cycle().take(1 << order.len()).map(|&(re, im)| c(re, im)).collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    StateVector::from_amplitudes(order, amps.into_iter().map(|a| a / norm).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn serialization_round_trips(n in 3usize..8, specs in specs(40)) {
        let c = circuit(n, &specs);
        let bytes = serialize(&c);
        let back = deserialize(&bytes).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(serialize(&back), bytes);
    }

    #[test]
    fn norm_is_preserved_after_every_layer(n in 3usize..8, specs in specs(40), raw in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..9)) {
        let c = circuit(n, &specs);
        let mut s = random_state(&c.qubits(), &raw);
        for layer in c.layers() {
            for g in layer {
                apply_in_place(&mut s, g).unwrap();
            }
            prop_assert!((s.norm() - 1.0).abs() < NORM_TOL);
        }
    }

    #[test]
    fn layers_are_disjoint(n in 3usize..8, specs in specs(40)) {
        for layer in circuit(n, &specs).layers() {
            let mut seen = std::collections::BTreeSet::new();
            for q in layer.iter().flat_map(|g| g.qubits()) {
                prop_assert!(seen.insert(q));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn worker_count_does_not_change_amplitudes(specs in specs(24), raw in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..9)) {
        // Large enough for the kernels to split work across threads.
        let c = circuit(16, &specs);
        let start = random_state(&c.qubits(), &raw);
        set_workers(1);
        let one = run(&c, &start).unwrap();
        set_workers(4);
        let four = run(&c, &start).unwrap();
        set_workers(1);
        prop_assert_eq!(one.amplitudes(), four.amplitudes());
    }
}

/// Random clean preparation on data `T` (3 qubits) with one ancilla that is computed and uncomputed.
fn clean_prep(specs: &[Spec], x: f64) -> Circuit {
    let body = circuit(3, specs);
    let mut b = CircuitBuilder::new(2);
    let t = b.register("T", 3);
    let a = b.qubit("a");
    for layer in body.layers() {
        b.layer(layer.to_vec()).unwrap();
    }
    b.gate(Gate::toffoli(&t[..2], a)).unwrap();
    b.gate(Gate::controlled(vec![a], t[2], rot(x)).unwrap()).unwrap();
    b.gate(Gate::toffoli(&t[..2], a)).unwrap();
    b.finish()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    /// `U (I − 2|0⟩⟨0|) U†` reflects the data register about the state `U` prepares.
    #[test]
    fn reflection_about_prepared_state(
        specs in specs(16),
        x in 0.0f64..=1.0,
        input in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 8),
    ) {
        let u = clean_prep(&specs, x);
        let all = u.qubits();
        let data = u.register("T").unwrap().qubits.clone();
        let prepared = run(&u, &StateVector::zero(&all)).unwrap();
        let psi = prepared.restrict_clean(&data, 1e-12).unwrap().expect("ancilla returns to zero").reorder(&data).unwrap();
        let mut r = u.inverse().append_layer(vec![Gate::reflect_zero(&all)]).unwrap();
        for layer in u.layers() {
            r = r.append_layer(layer.to_vec()).unwrap();
        }
        let phi = random_state(&data, &input);
        let overlap = psi.inner(&phi).unwrap();
        let want: Vec<C64> = phi.amplitudes().iter().zip(psi.amplitudes()).map(|(p, s)| p - s * overlap * 2.0).collect();
        let want = StateVector::from_amplitudes(&data, want).unwrap().extend_zero(&all).unwrap();
        let out = run(&r, &phi.extend_zero(&all).unwrap()).unwrap();
        prop_assert!(fidelity(&out, &want).unwrap() > 1.0 - 1e-9);
    }
}
