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


use num_rational::BigRational;
use num_traits::{One, Zero};

use super::SynthError;
use crate::dist::{binomial_pmf, damped_binomial, rat, to_f64};
use crate::ir::{concat, rot, Circuit, CircuitBuilder, Gate, LibraryGate, Promise, Weight};
use crate::prim::{adjust_amplitudes, amplify_to_exact, ctrl_from_zero_overlap, ham_semantic, prep_semantic, sparse, MarkedPreparation};

fn check_domain(m: usize, k: usize) -> Result<(), SynthError> {
    if k < 1 || k > m {
        return Err(SynthError::Request(format!("damped binomial needs 1 ≤ k ≤ m, got m = {m}, k = {k}")));
    }
    Ok(())
}

/// `Pr[Binom(m, 1/m) = j]` for `j ∈ 0..=k`, and their sum.
fn truncated_binomial(m: usize, k: usize) -> (Vec<BigRational>, BigRational) {
    let p = rat(1, m as i64);
    let a: Vec<BigRational> = (0..=k).map(|j| binomial_pmf(m, &p, j)).collect();
    let total = a.iter().fold(BigRational::zero(), |acc, x| acc + x);
    (a, total)
}

/// Weight `γ` of the damped-binomial branch in [`prepare_zero_damped`], `1/(1 + 4α₀)` with `α₀`
/// the zero-weight mass of the truncated binomial.
pub fn zero_damped_gamma(m: usize, k: usize) -> Result<BigRational, SynthError> {
    check_domain(m, k)?;
    let (a, total) = truncated_binomial(m, k);
    let alpha0 = &a[0] / &total;
    Ok((BigRational::one() + alpha0 * rat(4, 1)).recip())
}

/// Clean preparation of `√(1−γ)|0^m⟩ + √γ|S^m_k⟩` on register `"T"`.
///
/// Each qubit is rotated to `|1/m⟩`, a Hamming-weight gadget records the weight in `"Y"`, weights
/// above `k` are amplified away, the weight branches are reweighted towards the damped binomial
/// and the gadget is run again to clear `"Y"`.
pub fn prepare_zero_damped(m: usize, k: usize) -> Result<Circuit, SynthError> {
    check_domain(m, k)?;
    let d = damped_binomial(m, k)?;
    let (a, total) = truncated_binomial(m, k);
    let ham = ham_semantic(m, k)?;

    let mut b = CircuitBuilder::new(k);
    b.metadata_mut().n = m;
    b.metadata_mut().k = k;
    let t = b.register("T", m);
    let y = b.register("Y", k);
    let over = b.qubit("over");
    let ports = concat(&[&t, &y, &[over]]);
    let lift = rot(1.0 - 1.0 / m as f64);
    b.layer(t.iter().map(|&q| Gate::unitary(q, lift)).collect::<Result<_, _>>()?)?;
    b.gate(Gate::library(ham.clone(), ports.clone())?)?;
    b.gate(Gate::x(over))?;
    let marked = MarkedPreparation::new(b.finish(), "T", "over", Weight::Exact(total.clone()))?.at("zero_damped.truncate");
    let truncated = amplify_to_exact(&marked)?;

    let alphas: Vec<f64> = (1..=k).map(|j| to_f64(&(&a[j] / &total))).collect();
    let betas: Vec<f64> = (1..=k).map(|j| to_f64(&(d.pmf(j) * &total / (&a[j] * rat(4, 1))))).collect();
    let adjusted = adjust_amplitudes(&truncated, "Y", &alphas, &betas)?;

    let mut b = CircuitBuilder::new(k);
    let map = b.import(&adjusted);
    b.metadata_mut().n = m;
    b.metadata_mut().k = k;
    b.embed(&adjusted, &map, false)?;
    let ports: Vec<_> = ports.iter().map(|&q| map.get(q)).collect();
    b.gate(Gate::library(ham, ports)?)?;
    Ok(b.finish())
}

/// `|0⟩_x|0^m⟩ ↦ |0⟩_x|0^m⟩` and `|1⟩_x|0^m⟩ ↦ |1⟩_x|S^m_k⟩`, control register `"x"`, data `"T"`.
///
/// For `m = 1` the damped binomial is `|1⟩` and the map is a CNOT.
pub fn ctrl_damped(m: usize, k: usize) -> Result<Circuit, SynthError> {
    check_domain(m, k)?;
    if m == 1 {
        let mut b = CircuitBuilder::new(1);
        b.metadata_mut().n = 1;
        let x = b.qubit("x");
        let t = b.qubit("T");
        b.gate(Gate::cnot(x, t))?;
        return Ok(b.finish());
    }
    let prep = prepare_zero_damped(m, k)?;
    let gamma = zero_damped_gamma(m, k)?;
    Ok(ctrl_from_zero_overlap(&prep, "T", to_f64(&(BigRational::one() - gamma)))?)
}

/// Semantic form of [`ctrl_damped`] on `[x, T]`.
pub fn ctrl_damped_semantic(m: usize, k: usize) -> Result<LibraryGate, SynthError> {
    let explicit = ctrl_damped(m, k)?;
    let state = sparse(&damped_binomial(m, k)?.amplitudes());
    Ok(prep_semantic("ctrl_damped", &explicit, 1, m, vec![(1, state)], Promise::Free))
}
