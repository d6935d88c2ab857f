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

//! Gates, matrices and the single-qubit conventions used throughout the crate.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::library::LibraryGate;
use super::IrError;

pub type C64 = Complex64;

/// Row-major 2×2 complex matrix.
pub type Mat2 = [[C64; 2]; 2];

/// Tolerance for Hermiticity and unitarity checks on gate matrices.
pub const MATRIX_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QubitId(pub usize);

impl std::fmt::Display for QubitId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "q{}", self.0)
    }
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn real(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn identity() -> Mat2 {
    [[real(1.0), real(0.0)], [real(0.0), real(1.0)]]
}

pub fn pauli_x() -> Mat2 {
    [[real(0.0), real(1.0)], [real(1.0), real(0.0)]]
}

pub fn pauli_z() -> Mat2 {
    [[real(1.0), real(0.0)], [real(0.0), real(-1.0)]]
}

pub fn hadamard() -> Mat2 {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [[real(h), real(h)], [real(h), real(-h)]]
}

pub fn diag(a: C64, b: C64) -> Mat2 {
    [[a, real(0.0)], [real(0.0), b]]
}

/// `Rot_γ = [[√γ, √(1−γ)], [√(1−γ), −√γ]]`, Hermitian and unitary for γ ∈ [0, 1].
pub fn rot(gamma: f64) -> Mat2 {
    let g = gamma.clamp(0.0, 1.0);
    let (s, t) = (g.sqrt(), (1.0 - g).sqrt());
    [[real(s), real(t)], [real(t), real(-s)]]
}

/// `X·Rot_β·X`: sends |1⟩ to √β|1⟩ + √(1−β)|0⟩ and stays Hermitian.
pub fn rot_from_one(beta: f64) -> Mat2 {
    let b = beta.clamp(0.0, 1.0);
    let (s, t) = (b.sqrt(), (1.0 - b).sqrt());
    [[real(-s), real(t)], [real(t), real(s)]]
}

pub fn dagger(m: &Mat2) -> Mat2 {
    [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]]
}

pub fn matmul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[real(0.0); 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn max_abs_diff(a: &Mat2, b: &Mat2) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..2 {
        for j in 0..2 {
            worst = worst.max((a[i][j] - b[i][j]).norm());
        }
    }
    worst
}

pub fn hermitian_defect(m: &Mat2) -> f64 {
    max_abs_diff(m, &dagger(m))
}

pub fn unitary_defect(m: &Mat2) -> f64 {
    max_abs_diff(&matmul(&dagger(m), m), &identity())
}

pub fn is_hermitian(m: &Mat2) -> bool {
    hermitian_defect(m) < MATRIX_TOL
}

pub fn is_unitary(m: &Mat2) -> bool {
    unitary_defect(m) < MATRIX_TOL
}

/// A single-qubit pure state used as one factor of a product reflection.
pub type Ket1 = [C64; 2];

pub fn ket0() -> Ket1 {
    [real(1.0), real(0.0)]
}

pub fn ket1() -> Ket1 {
    [real(0.0), real(1.0)]
}

pub fn ket_plus() -> Ket1 {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [real(h), real(h)]
}

#[derive(Clone, Debug, PartialEq)]
pub enum GateKind {
    /// Any single-qubit unitary. Targets `[q]`, no controls.
    Unitary(Mat2),
    /// Hermitian single-qubit matrix applied when every control is 1.
    Controlled(Mat2),
    /// `I − 2|ϑ⟩⟨ϑ|` with `|ϑ⟩` the product of the listed single-qubit states, one per target.
    ProductReflection(Vec<Ket1>),
    /// Targets `[inputs.., out]`; XORs the AND of the inputs into `out`.
    And,
    /// Targets `[inputs.., out]`; XORs the OR of the inputs into `out`.
    Or,
    /// Targets `[inputs.., out]`; XORs the NOR of the inputs into `out`.
    Nor,
    /// Targets `[source, copies..]`; XORs the source bit into every copy.
    Fanout { width: usize, widened: bool },
    /// Targets `[a, b]`.
    Swap,
    Library(LibraryGate),
}

impl GateKind {
    pub fn tag(&self) -> &'static str {
        match self {
            GateKind::Unitary(_) => "unitary",
            GateKind::Controlled(_) => "controlled",
            GateKind::ProductReflection(_) => "product_reflection",
            GateKind::And => "and",
            GateKind::Or => "or",
            GateKind::Nor => "nor",
            GateKind::Fanout { .. } => "fanout",
            GateKind::Swap => "swap",
            GateKind::Library(_) => "library",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub targets: Vec<QubitId>,
    pub controls: Vec<QubitId>,
}

impl Gate {
    /// Builds a gate after checking arity, Hermiticity and unitarity.
    pub fn new(kind: GateKind, targets: Vec<QubitId>, controls: Vec<QubitId>) -> Result<Gate, IrError> {
        let g = Gate { kind, targets, controls };
        g.validate()?;
        Ok(g)
    }

    pub fn unitary(q: QubitId, m: Mat2) -> Result<Gate, IrError> {
        Gate::new(GateKind::Unitary(m), vec![q], vec![])
    }

    pub fn x(q: QubitId) -> Gate {
        Gate { kind: GateKind::Unitary(pauli_x()), targets: vec![q], controls: vec![] }
    }

    pub fn z(q: QubitId) -> Gate {
        Gate { kind: GateKind::Unitary(pauli_z()), targets: vec![q], controls: vec![] }
    }

    pub fn h(q: QubitId) -> Gate {
        Gate { kind: GateKind::Unitary(hadamard()), targets: vec![q], controls: vec![] }
    }

    pub fn cnot(control: QubitId, target: QubitId) -> Gate {
        Gate { kind: GateKind::Controlled(pauli_x()), targets: vec![target], controls: vec![control] }
    }

    pub fn controlled(controls: Vec<QubitId>, target: QubitId, m: Mat2) -> Result<Gate, IrError> {
        Gate::new(GateKind::Controlled(m), vec![target], controls)
    }

    pub fn toffoli(inputs: &[QubitId], out: QubitId) -> Gate {
        Gate::xor_gate(GateKind::And, inputs, out)
    }

    pub fn or(inputs: &[QubitId], out: QubitId) -> Gate {
        Gate::xor_gate(GateKind::Or, inputs, out)
    }

    pub fn nor(inputs: &[QubitId], out: QubitId) -> Gate {
        Gate::xor_gate(GateKind::Nor, inputs, out)
    }

    fn xor_gate(kind: GateKind, inputs: &[QubitId], out: QubitId) -> Gate {
        let mut targets = inputs.to_vec();
        targets.push(out);
        Gate { kind, targets, controls: vec![] }
    }

    pub fn fanout(source: QubitId, copies: &[QubitId], widened: bool) -> Gate {
        let mut targets = vec![source];
        targets.extend_from_slice(copies);
        Gate { kind: GateKind::Fanout { width: copies.len(), widened }, targets, controls: vec![] }
    }

    pub fn swap(a: QubitId, b: QubitId) -> Gate {
        Gate { kind: GateKind::Swap, targets: vec![a, b], controls: vec![] }
    }

    /// `I − 2|0…0⟩⟨0…0|` on the given qubits.
    pub fn reflect_zero(qubits: &[QubitId]) -> Gate {
        Gate {
            kind: GateKind::ProductReflection(vec![ket0(); qubits.len()]),
            targets: qubits.to_vec(),
            controls: vec![],
        }
    }

    pub fn library(lib: LibraryGate, targets: Vec<QubitId>) -> Result<Gate, IrError> {
        Gate::new(GateKind::Library(lib), targets, vec![])
    }

    pub fn with_controls(mut self, controls: &[QubitId]) -> Gate {
        self.controls.extend_from_slice(controls);
        self
    }

    /// Every qubit the gate touches, controls first.
    pub fn qubits(&self) -> impl Iterator<Item = QubitId> + '_ {
        self.controls.iter().chain(self.targets.iter()).copied()
    }

    pub fn validate(&self) -> Result<(), IrError> {
        let arity_err = |expected: String| IrError::Arity {
            kind: self.kind.tag().to_string(),
            expected,
            found: self.targets.len(),
        };
        match &self.kind {
            GateKind::Unitary(m) => {
                if self.targets.len() != 1 {
                    return Err(arity_err("1".into()));
                }
                if !self.controls.is_empty() {
                    return Err(IrError::NotControllable("unitary gates take no controls; use a Hermitian controlled gate".into()));
                }
                if !is_unitary(m) {
                    return Err(IrError::NotUnitary(unitary_defect(m)));
                }
            }
            GateKind::Controlled(m) => {
                if self.targets.len() != 1 {
                    return Err(arity_err("1".into()));
                }
                if self.controls.is_empty() {
                    return Err(IrError::MissingControl);
                }
                if !is_hermitian(m) {
                    return Err(IrError::NotHermitian(hermitian_defect(m)));
                }
                if !is_unitary(m) {
                    return Err(IrError::NotUnitary(unitary_defect(m)));
                }
            }
            GateKind::ProductReflection(states) => {
                if states.len() != self.targets.len() || states.is_empty() {
                    return Err(arity_err(format!("{}", states.len())));
                }
                for s in states {
                    let norm = s[0].norm_sqr() + s[1].norm_sqr();
                    if (norm - 1.0).abs() > MATRIX_TOL {
                        return Err(IrError::NotUnitary((norm - 1.0).abs()));
                    }
                }
            }
            GateKind::And | GateKind::Or | GateKind::Nor => {
                if self.targets.len() < 2 {
                    return Err(arity_err(">= 2".into()));
                }
            }
            GateKind::Fanout { width, .. } => {
                if self.targets.len() != width + 1 || *width == 0 {
                    return Err(arity_err(format!("{}", width + 1)));
                }
            }
            GateKind::Swap => {
                if self.targets.len() != 2 {
                    return Err(arity_err("2".into()));
                }
            }
            GateKind::Library(lib) => {
                let want = lib.semantic.arity();
                if self.targets.len() != want {
                    return Err(arity_err(format!("{want}")));
                }
                lib.semantic.validate()?;
            }
        }
        let mut seen: Vec<QubitId> = self.qubits().collect();
        seen.sort();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(IrError::RepeatedQubit(self.kind.tag().to_string()));
        }
        Ok(())
    }

    /// The inverse gate. Everything except general unitaries and library gates is an involution.
    pub fn inverse(&self) -> Gate {
        let kind = match &self.kind {
            GateKind::Unitary(m) => GateKind::Unitary(dagger(m)),
            GateKind::Library(lib) => GateKind::Library(lib.adjoint()),
            other => other.clone(),
        };
        Gate { kind, targets: self.targets.clone(), controls: self.controls.clone() }
    }

    /// Same gate acting on remapped qubits.
    pub fn remap(&self, f: &impl Fn(QubitId) -> QubitId) -> Gate {
        Gate {
            kind: self.kind.clone(),
            targets: self.targets.iter().map(|&q| f(q)).collect(),
            controls: self.controls.iter().map(|&q| f(q)).collect(),
        }
    }

    /// Depth contributed by this gate inside a layer.
    pub fn depth(&self) -> usize {
        match &self.kind {
            GateKind::Library(lib) => lib.declared_depth.max(1),
            _ => 1,
        }
    }

    /// Fanout width charged to this gate.
    pub fn fanout_width(&self) -> usize {
        match &self.kind {
            GateKind::Fanout { width, .. } => *width,
            GateKind::Library(lib) => lib.declared_width,
            _ => 0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rot_grid_is_hermitian_and_unitary() {
        for i in 0..100 {
            let g = i as f64 / 99.0;
            let m = rot(g);
            assert!(hermitian_defect(&m) < 1e-12);
            assert!(unitary_defect(&m) < 1e-12);
            assert!((m[0][0].re - g.sqrt()).abs() < 1e-15);
            assert!((m[0][1].re - (1.0 - g).sqrt()).abs() < 1e-15);
            assert!((m[1][1].re + g.sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn rot_from_one_acts_on_one() {
        let m = rot_from_one(0.3);
        assert!((m[0][1].re - 0.7f64.sqrt()).abs() < 1e-15);
        assert!((m[1][1].re - 0.3f64.sqrt()).abs() < 1e-15);
        assert!(is_hermitian(&m) && is_unitary(&m));
    }

    #[test]
    fn controlled_requires_hermitian() {
        let s = diag(real(1.0), c(0.0, 1.0));
        assert!(matches!(
            Gate::controlled(vec![QubitId(0)], QubitId(1), s),
            Err(IrError::NotHermitian(_))
        ));
        assert!(Gate::controlled(vec![QubitId(0)], QubitId(1), hadamard()).is_ok());
    }

    #[test]
    fn inverse_of_unitary_is_dagger() {
        let s = diag(real(1.0), c(0.0, 1.0));
        let g = Gate::unitary(QubitId(0), s).unwrap();
        match g.inverse().kind {
            GateKind::Unitary(m) => assert_eq!(m[1][1], c(0.0, -1.0)),
            _ => unreachable!(),
        }
    }
}
