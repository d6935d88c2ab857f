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


use super::{amplify_to_exact, copy_metadata, prep_semantic, skeleton_mode, MarkedPreparation, PrimError, PRECHECK_QUBITS};
use crate::ir::{
    dicke_support, is_hermitian, pauli_x, rot_from_one, Circuit, CircuitBuilder, Gate, GateKind, IrError, LibraryGate,
    Promise, QubitId, Register, Weight,
};
use crate::sim::{run_lazy, CLEAN_TOL};

/// Default bound keeping `α` and `1 − α` away from zero in [`ctrl_from_zero_overlap`].
pub const OVERLAP_FLOOR: f64 = 0.01;

/// Controlled version of `c`: register `"ctrl"` selects between identity and `c`.
///
/// The control is fanned out to one copy per gate of the widest layer, each gate takes its own
/// copy as an extra control, and the copies are uncomputed. Single-qubit unitaries must be
/// Hermitian to be controllable.
pub fn ctrl_circuit(c: &Circuit) -> Result<Circuit, PrimError> {
    let widest = c.layers().map(|l| l.len()).max().unwrap_or(0);
    let budget = c.metadata().fanout_budget;
    let mut b = CircuitBuilder::new(budget);
    copy_metadata(&mut b, c.metadata().n);
    let ctrl = b.qubit("ctrl");
    let map = b.bind(c, &[], "body")?;
    let copies = b.register("ctrl.copies", widest.saturating_sub(1));
    let mut lines = vec![ctrl];
    lines.extend(copies.iter().copied());
    let fan = if copies.is_empty() { vec![] } else { vec![Gate::fanout(ctrl, &copies, copies.len() > budget)] };
    b.layer(fan.clone())?;
    for layer in c.layers() {
        let mut gates = Vec::new();
        for (g, &line) in layer.iter().zip(&lines) {
            let g = g.remap(&|q| map.get(q));
            let controlled = match &g.kind {
                GateKind::Unitary(m) => {
                    if !is_hermitian(m) {
                        return Err(IrError::NotControllable("single-qubit unitary is not Hermitian".into()).into());
                    }
                    Gate::controlled(vec![line], g.targets[0], *m)?
                }
                _ => g.with_controls(&[line]),
            };
            gates.push(controlled);
        }
        b.layer(gates)?;
    }
    b.layer(fan)?;
    let mut out = b.finish();
    let mut meta = out.metadata().clone();
    meta.grover_rounds = c.metadata().grover_rounds;
    out = out.with_metadata(meta);
    Ok(out)
}

/// `|e_i⟩_A|0^ℓ⟩_T ↦ |e_i⟩_A|D^ℓ_{w_i}⟩_T` and `|0⟩_A|0^ℓ⟩_T ↦ |0⟩_A|0^ℓ⟩_T`, for `A` of
/// `weights.len()` qubits.
///
/// Slot `i` receives a controlled Dicke preparation into its own register, then W-controlled swaps
/// move the selected slot into `"T"`. The control register is promised one-hot or zero.
pub fn ctrl_dicke(ell: usize, weights: &[usize]) -> Result<Circuit, PrimError> {
    if weights.is_empty() || ell == 0 || weights.iter().any(|&w| w > ell) {
        return Err(PrimError::Precondition(format!("weights {weights:?} do not fit {ell} qubits")));
    }
    let t = weights.len();
    let mut b = CircuitBuilder::new(ell);
    copy_metadata(&mut b, ell);
    let a = b.register("A", t);
    let target = b.register("T", ell);
    let slots: Vec<Vec<QubitId>> = (0..t).map(|_| b.register("Q", ell)).collect();
    let mut preps = Vec::new();
    for (i, &w) in weights.iter().enumerate() {
        if w > 0 {
            preps.push(Gate::library(LibraryGate::dicke(ell, w), slots[i].clone())?.with_controls(&[a[i]]));
        }
    }
    b.layer(preps)?;
    let mut swap = a.clone();
    for s in &slots {
        swap.extend_from_slice(s);
    }
    swap.extend_from_slice(&target);
    b.gate(Gate::library(LibraryGate::w_swap(t, ell), swap)?)?;
    Ok(b.finish())
}

/// Semantic form of [`ctrl_dicke`] on `[A, T]`.
pub fn ctrl_dicke_semantic(ell: usize, weights: &[usize]) -> Result<LibraryGate, PrimError> {
    let explicit = ctrl_dicke(ell, weights)?;
    let branches = weights.iter().enumerate().map(|(i, &w)| (1u64 << i, dicke_support(ell, w))).collect();
    Ok(prep_semantic("ctrl_dicke", &explicit, weights.len(), ell, branches, Promise::OneHotOrZero))
}

fn check_balanced(prep: &MarkedPreparation) -> Result<(), PrimError> {
    if prep.circuit.num_qubits() > PRECHECK_QUBITS || skeleton_mode() {
        return Ok(());
    }
    let mut keep = prep.data.qubits.clone();
    keep.push(prep.flag);
    let run = run_lazy(&prep.circuit, &keep)?;
    let others: Vec<QubitId> = run.state.qubit_order().iter().copied().filter(|q| !keep.contains(q)).collect();
    let dirty = run.released_mass + run.state.excited_mass(&others)?;
    let marked = run.state.marginal(&[prep.flag])?[1];
    if dirty > CLEAN_TOL || (marked - 0.5).abs() > CLEAN_TOL {
        return Err(PrimError::Precondition(format!(
            "preparation is not a clean balanced superposition (flag mass {marked}, ancilla mass {dirty:e})"
        )));
    }
    Ok(())
}

/// `|0⟩_x|0⟩ ↦ |0⟩_x|φ₀⟩` and `|1⟩_x|0⟩ ↦ |1⟩_x|φ₁⟩`, given a clean preparation of
/// `(|φ₀⟩|0⟩ + |φ₁⟩|1⟩)/√2` with the last factor on `prep.flag`.
///
/// The control register is `"x"`. After the preparation, a reflection about
/// `(|φ₀⟩|01⟩ − |φ₁⟩|10⟩)/√2` on (data, flag, x) exchanges the two mismatched branches; a Hadamard
/// on `x` and a swap of `x` with the flag finish the map. Depth is `3d + 5`.
pub fn ctrl_state(prep: &MarkedPreparation) -> Result<Circuit, PrimError> {
    check_balanced(prep)?;
    let c0 = &prep.circuit;
    let mut b = CircuitBuilder::new(c0.metadata().fanout_budget);
    copy_metadata(&mut b, prep.data.len() + 1);
    let map = b.import(c0);
    let x = b.qubit("x");
    let a = map.get(prep.flag);
    let mut all = map.host_qubits();
    all.push(x);
    let neg_x = pauli_x().map(|row| row.map(|v| -v));
    b.embed(c0, &map, false)?;
    b.gate(Gate::controlled(vec![a], x, neg_x)?)?;
    b.embed_merged(c0, &map, true, vec![Gate::x(x)])?;
    b.gate(Gate::reflect_zero(&all))?;
    b.embed_merged(c0, &map, false, vec![Gate::x(x)])?;
    b.gate(Gate::controlled(vec![a], x, neg_x)?)?;
    b.gate(Gate::h(x))?;
    b.gate(Gate::swap(x, a))?;
    Ok(b.finish())
}

/// [`ctrl_from_zero_overlap_with`] at [`OVERLAP_FLOOR`].
pub fn ctrl_from_zero_overlap(prep: &Circuit, data: &str, alpha: f64) -> Result<Circuit, PrimError> {
    ctrl_from_zero_overlap_with(prep, data, alpha, OVERLAP_FLOOR)
}

fn check_overlap(prep: &Circuit, data: &Register, alpha: f64) -> Result<(), PrimError> {
    if prep.num_qubits() > PRECHECK_QUBITS || skeleton_mode() {
        return Ok(());
    }
    let run = run_lazy(prep, &data.qubits)?;
    let zero = run.state.amplitude(0).norm_sqr() * (1.0 - run.released_mass);
    if (zero - alpha).abs() > 1e-10 {
        return Err(PrimError::Precondition(format!("mass on |0…0⟩ is {zero}, expected {alpha}")));
    }
    Ok(())
}

/// `|0⟩_x|0^n⟩ ↦ |0⟩_x|0^n⟩` and `|1⟩_x|0^n⟩ ↦ |1⟩_x|⊥⟩`, given a clean preparation of
/// `√α|0^n⟩ + √(1−α)|⊥⟩` on register `data` with `⟨0^n|⊥⟩ = 0`.
///
/// An OR flag (a NOR flag when `α > 1/2`) and a controlled rotation balance the two branches, the
/// balanced state `(|0^n⟩ + |⊥⟩)/√2` is amplified out exactly, an OR marks its branches, and
/// [`ctrl_state`] does the rest.
pub fn ctrl_from_zero_overlap_with(prep: &Circuit, data: &str, alpha: f64, floor: f64) -> Result<Circuit, PrimError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(PrimError::Precondition(format!("α = {alpha} must lie strictly between 0 and 1")));
    }
    if alpha < floor || 1.0 - alpha < floor {
        return Err(PrimError::BelowFloor { alpha: alpha.min(1.0 - alpha), floor });
    }
    let data_reg = prep.register(data)?.clone();
    check_overlap(prep, &data_reg, alpha)?;
    let mirrored = alpha > 0.5;
    let small = if mirrored { 1.0 - alpha } else { alpha };
    let gamma = small / (1.0 - small);
    let budget = prep.metadata().fanout_budget;

    let mut b = CircuitBuilder::new(budget);
    copy_metadata(&mut b, data_reg.len());
    let map = b.import(prep);
    let t = map.register(prep, data)?;
    let a = b.qubit("czo.a");
    let mark = b.qubit("czo.mark");
    let marker = |q| if mirrored { Gate::nor(&t, q) } else { Gate::or(&t, q) };
    b.embed_merged(prep, &map, false, vec![Gate::x(a)])?;
    b.gate(marker(mark))?;
    if (gamma - 1.0).abs() > 1e-12 {
        b.gate(Gate::controlled(vec![mark], a, rot_from_one(gamma))?)?;
    }
    b.gate(marker(mark))?;
    let marked = MarkedPreparation {
        circuit: b.finish(),
        data: Register::new(data, t.clone()),
        flag: a,
        alpha: Weight::Approx(2.0 * small),
        site: "ctrl_from_zero_overlap".into(),
    };
    let balanced = amplify_to_exact(&marked)?;

    let mut b = CircuitBuilder::new(budget);
    copy_metadata(&mut b, data_reg.len());
    let map = b.import(&balanced);
    let branch = b.qubit("czo.t");
    b.embed(&balanced, &map, false)?;
    let t: Vec<QubitId> = t.iter().map(|&q| map.get(q)).collect();
    b.gate(Gate::or(&t, branch))?;
    let c0 = b.finish();
    let split = MarkedPreparation {
        circuit: c0,
        data: Register::new(data, t),
        flag: branch,
        alpha: Weight::Approx(0.5),
        site: "ctrl_from_zero_overlap".into(),
    };
    ctrl_state(&split)
}
