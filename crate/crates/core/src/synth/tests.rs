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
use crate::dist::rat;
use crate::ir::c;
use crate::prim::skeleton;
use crate::sim::{certify_library_gate, run_lazy};

const TOL: f64 = 1e-9;

fn real(x: f64) -> C64 {
    c(x, 0.0)
}

fn assert_prepares(out: &SynthesisOutput) {
    let v = out.verify().unwrap();
    assert!(v.fidelity > 1.0 - TOL, "fidelity {}", v.fidelity);
    assert!(v.clean, "ancilla mass {}", v.residual_ancilla_mass);
}

/// Output amplitudes on the data register, assuming a clean run.
fn data_amplitudes(c: &Circuit, data: &Register) -> Vec<C64> {
    let run = run_lazy(c, &data.qubits).unwrap();
    let s = run.state.restrict_clean(&data.qubits, 1e-9).unwrap().expect("clean output");
    let s = s.reorder(&data.qubits).unwrap();
    s.amplitudes().to_vec()
}

fn damped_target(m: usize, k: usize) -> Vec<C64> {
    let gamma = to_f64(&zero_damped_gamma(m, k).unwrap());
    let s = crate::dist::damped_binomial(m, k).unwrap().amplitudes();
    s.iter().enumerate().map(|(i, a)| if i == 0 { real((1.0 - gamma).sqrt()) } else { a * gamma.sqrt() }).collect()
}

fn assert_close(a: &[C64], b: &[C64]) {
    assert_eq!(a.len(), b.len());
    for (i, (x, y)) in a.iter().zip(b).enumerate() {
        assert!((x - y).norm() < 1e-9, "index {i}: {x} vs {y}");
    }
}

#[test]
fn zero_damped_gamma_values() {
    assert_eq!(zero_damped_gamma(2, 2).unwrap(), rat(1, 2));
    // m = 3, k = 1: a₀ = 8/27, Pr[≤1] = 20/27, α₀ = 2/5.
    assert_eq!(zero_damped_gamma(3, 1).unwrap(), rat(5, 13));
    assert!(zero_damped_gamma(2, 3).is_err());
}

#[test]
fn zero_damped_m2_k2() {
    let c = prepare_zero_damped(2, 2).unwrap();
    let out = data_amplitudes(&c, c.register("T").unwrap());
    let h = 0.5f64.sqrt();
    let split = h * (8.0f64 / 9.0).sqrt() * h;
    assert_close(&out, &[real(h), real(split), real(split), real(h / 3.0)]);
}

#[test]
fn zero_damped_matches_analytic_vector() {
    for (m, k) in [(3, 1), (4, 1), (3, 2), (4, 2), (4, 3)] {
        let c = prepare_zero_damped(m, k).unwrap();
        let out = data_amplitudes(&c, c.register("T").unwrap());
        assert_close(&out, &damped_target(m, k));
        let gamma = to_f64(&zero_damped_gamma(m, k).unwrap());
        assert!((out[0].norm_sqr() - (1.0 - gamma)).abs() < 1e-9);
    }
}

#[test]
fn ctrl_damped_certifies() {
    for (m, k) in [(1, 1), (2, 1), (2, 2), (3, 2)] {
        let explicit = ctrl_damped(m, k).unwrap();
        let ports = concat(&[&explicit.register("x").unwrap().qubits, &explicit.register("T").unwrap().qubits]);
        let lib = ctrl_damped_semantic(m, k).unwrap();
        let cert = certify_library_gate(&explicit, &ports, &lib, &[0, 1]).unwrap();
        assert!(cert.min_fidelity > 1.0 - TOL);
    }
}

#[test]
fn ctrl_damped_branch_amplitudes() {
    let lib = ctrl_damped_semantic(2, 2).unwrap();
    let mut b = CircuitBuilder::new(2);
    let x = b.qubit("x");
    let t = b.register("T", 2);
    b.gate(Gate::x(x)).unwrap();
    b.gate(Gate::library(lib, concat(&[&[x], &t])).unwrap()).unwrap();
    let c = b.finish();
    let run = run_lazy(&c, &concat(&[&t, &[x]])).unwrap();
    let s = run.state.reorder(&concat(&[&t, &[x]])).unwrap();
    let split = (8.0f64 / 9.0).sqrt() * 0.5f64.sqrt();
    assert_close(&s.amplitudes()[4..], &[real(0.0), real(split), real(split), real(1.0 / 3.0)]);
}

#[test]
fn default_ell_choices() {
    assert_eq!(default_ell(4, 2), Some(2));
    assert_eq!(default_ell(6, 2), Some(3));
    assert_eq!(default_ell(16, 2), Some(8));
    assert_eq!(default_ell(8, 1), Some(1));
    assert_eq!(default_ell(7, 2), None);
}

#[test]
fn occupancy_single_bucket_weight_one() {
    let out = build_occupancy_state(4, 1, 4).unwrap();
    assert_prepares(&out);
    let amps = data_amplitudes(&out.circuit, &out.data);
    // A = e₁ is bit 0; T is bits 1..5.
    for i in 0..4 {
        assert!((amps[1 | 2 << i].re - 0.5).abs() < 1e-9);
    }
}

#[test]
fn occupancy_n4_k2_l2() {
    let out = build_occupancy_state(4, 2, 2).unwrap();
    assert_prepares(&out);
    let amps = data_amplitudes(&out.circuit, &out.data);
    let t = |x: usize| x << 2;
    // One occupied bucket (e₁ = bit 0): 11|00 and 00|11.
    for x in [0b0011, 0b1100] {
        assert!((amps[1 | t(x)].norm() - (1.0f64 / 6.0).sqrt()).abs() < 1e-9);
    }
    // Two occupied buckets (e₂ = bit 1): the four split patterns.
    for x in [0b0101, 0b0110, 0b1001, 0b1010] {
        assert!((amps[2 | t(x)].norm() - (2.0f64 / 3.0).sqrt() * 0.5).abs() < 1e-9);
    }
    let run = run_lazy(&out.circuit, &out.data.qubits).unwrap();
    let a = &out.circuit.register("A").unwrap().qubits;
    let marginal = run.state.marginal(a).unwrap();
    assert!((marginal[1] - 1.0 / 3.0).abs() < 1e-9 && (marginal[2] - 2.0 / 3.0).abs() < 1e-9);
}

#[test]
fn occupancy_rejects_indivisible() {
    assert!(build_occupancy_state(5, 1, 2).is_err());
    assert!(build_occupancy_state(4, 3, 2).is_err());
}

#[test]
fn dicke_small_cases() {
    for (n, k, ell) in [(4, 2, None), (6, 2, Some(3)), (4, 1, Some(2)), (3, 1, None), (2, 1, None)] {
        let out = build_dicke(n, k, ell).unwrap();
        assert_prepares(&out);
    }
    let out = build_dicke(4, 2, None).unwrap();
    assert_eq!(out.ell, 2);
    let amps = data_amplitudes(&out.circuit, &out.data);
    for (x, a) in amps.iter().enumerate() {
        let expect = if x.count_ones() == 2 { 1.0 / 6.0f64.sqrt() } else { 0.0 };
        assert!((a.norm() - expect).abs() < 1e-9);
    }
}

#[test]
fn dicke_padding_path() {
    let out = build_dicke(5, 1, Some(2)).unwrap();
    assert_eq!(out.padded_n, 6);
    let rec = out.circuit.metadata().amplifications.iter().find(|r| r.site == "dicke.pad").unwrap();
    assert_eq!(rec.alpha, Weight::Exact(rat(5, 6)));
    assert_prepares(&out);
}

#[test]
fn dicke_edge_weights() {
    assert_prepares(&build_dicke(3, 0, None).unwrap());
    assert_prepares(&build_dicke(4, 3, None).unwrap());
    assert_prepares(&build_dicke(3, 3, None).unwrap());
    assert!(build_dicke(3, 4, None).is_err());
    assert!(build_dicke(4, 2, Some(1)).is_err());
}

#[test]
fn weight_classes_are_uniform() {
    let out = build_dicke(6, 2, Some(3)).unwrap();
    let amps = data_amplitudes(&out.circuit, &out.data);
    let mags: Vec<f64> = amps.iter().enumerate().filter(|(x, _)| x.count_ones() == 2).map(|(_, a)| a.norm()).collect();
    let (lo, hi) = mags.iter().fold((f64::MAX, 0.0f64), |(lo, hi), m| (lo.min(*m), hi.max(*m)));
    assert!(hi / lo - 1.0 < 1e-9);
}

#[test]
fn symmetric_reduces_to_dicke() {
    let eta = vec![real(0.0), real(0.0), real(1.0)];
    let sym = build_symmetric(4, &eta, None).unwrap();
    assert_prepares(&sym);
    let dicke = build_dicke(4, 2, None).unwrap();
    let a = data_amplitudes(&sym.circuit, &sym.data);
    let b = data_amplitudes(&dicke.circuit, &dicke.data);
    let overlap: C64 = a.iter().zip(&b).map(|(x, y)| x.conj() * y).sum();
    assert!((overlap.norm_sqr() - 1.0).abs() < 1e-9);
}

#[test]
fn symmetric_weights_one_and_two() {
    let h = 0.5f64.sqrt();
    let out = build_symmetric(4, &[real(0.0), real(h), real(h)], None).unwrap();
    assert_prepares(&out);
    let amps = data_amplitudes(&out.circuit, &out.data);
    let phase = amps[1] / amps[1].norm();
    for (x, a) in amps.iter().enumerate() {
        let expect = match x.count_ones() {
            1 => h * 0.5,
            2 => h / 6.0f64.sqrt(),
            _ => 0.0,
        };
        assert!((a / phase - real(expect)).norm() < 1e-9, "x = {x:04b}: {a}");
    }
}

#[test]
fn symmetric_with_zero_weight_and_phase() {
    let eta = vec![real(0.6), c(0.0, 0.48), real(0.64)];
    assert_prepares(&build_symmetric(4, &eta, None).unwrap());
}

#[test]
fn symmetric_zero_weight_only() {
    let out = build_symmetric(4, &[real(1.0)], None).unwrap();
    assert_eq!(out.circuit.gate_count(), 0);
    assert_prepares(&out);
}

#[test]
fn symmetric_padding_path() {
    let h = 0.5f64.sqrt();
    let out = build_symmetric(3, &[real(h), c(0.0, h)], Some(2)).unwrap();
    assert_eq!(out.padded_n, 4);
    assert_prepares(&out);
}

#[test]
fn symmetric_rejects_bad_weights() {
    assert!(build_symmetric(4, &[real(1.0), real(1.0)], None).is_err());
    assert!(build_symmetric(2, &[real(0.0), real(0.0), real(0.0), real(1.0)], None).is_err());
}

#[test]
fn fanout_width_does_not_grow_with_n() {
    let a = build_dicke(16, 2, None).unwrap();
    let b = build_dicke(32, 2, None).unwrap();
    assert_eq!(a.report.max_fanout_width, b.report.max_fanout_width);
}

#[test]
fn skeleton_layers_do_not_grow_with_n() {
    let layers: Vec<(usize, usize)> = [8, 16]
        .iter()
        .map(|&n| {
            let full = build_dicke(n, 2, Some(4)).unwrap();
            let bare = skeleton(|| build_dicke(n, 2, Some(4))).unwrap();
            let extra: usize = full.circuit.metadata().amplifications.iter().map(|r| r.rounds * r.round_layers).sum();
            assert_eq!(full.report.layers, bare.report.layers + extra);
            (bare.report.layers, bare.report.max_fanout_width)
        })
        .collect();
    assert_eq!(layers[0], layers[1]);
}

#[test]
fn request_builds_both_modes() {
    let out = SynthesisRequest::dicke(4, 1).with_ell(2).build().unwrap();
    assert_eq!(out.ell, 2);
    let h = 0.5f64.sqrt();
    let req = SynthesisRequest { fanout_budget: Some(3), ..SynthesisRequest::symmetric(4, vec![real(h), real(h)]) };
    let out = req.build().unwrap();
    assert_eq!(out.circuit.metadata().fanout_budget, 3);
    assert_prepares(&out);
}
