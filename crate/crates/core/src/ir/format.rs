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

//! JSON interchange format for circuits.
//!
//! Probabilities are written as `{"num": "..", "den": ".."}` when exact and as decimals otherwise.
//! Floats use shortest round-trip formatting, so `deserialize(serialize(c)) == c` holds bit for bit.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Map, Value};
use thiserror::Error;

use super::library::{LibraryGate, PrepBranch, PrepTable, Promise, Semantic, WeightTest};
use super::{AmpRecord, Circuit, Gate, GateKind, IrError, Metadata, QubitId, Register, Weight, C64};

pub const FORMAT_VERSION: u64 = 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("truncated input: {0}")]
    Truncated(String),
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unsupported format version {0}")]
    Version(u64),
    #[error("layer {layer}, gate {gate}: unknown gate kind {tag:?}")]
    UnknownKind { layer: usize, gate: usize, tag: String },
    #[error("{at}: {what}")]
    Malformed { at: String, what: String },
    #[error("{at}: {source}")]
    Invalid { at: String, source: IrError },
}

fn complex(z: C64) -> Value {
    json!([z.re, z.im])
}

fn matrix(m: &[[C64; 2]; 2]) -> Value {
    json!([[complex(m[0][0]), complex(m[0][1])], [complex(m[1][0]), complex(m[1][1])]])
}

fn rational(r: &BigRational) -> Value {
    json!({"num": r.numer().to_string(), "den": r.denom().to_string()})
}

fn semantic(s: &Semantic) -> Value {
    let mut v = match s {
        Semantic::Threshold { n, k, negate } => json!({"n": n, "k": k, "negate": negate}),
        Semantic::Exact { n, k } => json!({"n": n, "k": k}),
        Semantic::OneHot { bits, slots, shift } => json!({"bits": bits, "slots": slots, "shift": shift}),
        Semantic::Ham { n, k } => json!({"n": n, "k": k}),
        Semantic::WeightSelect { n, k, test } => json!({"n": n, "k": k, "test": test.name()}),
        Semantic::WSwap { t, width } => json!({"t": t, "width": width}),
        Semantic::Prep(p) => {
            let branches: Vec<Value> = p
                .branches
                .iter()
                .map(|b| {
                    let state: Vec<Value> = b.state.iter().map(|(i, a)| json!([i, a.re, a.im])).collect();
                    json!({"control": b.control, "state": state})
                })
                .collect();
            let promise = match p.promise {
                Promise::Free => "free",
                Promise::OneHotOrZero => "one_hot_or_zero",
            };
            json!({
                "control_bits": p.control_bits,
                "target_bits": p.target_bits,
                "promise": promise,
                "branches": branches,
            })
        }
    };
    v.as_object_mut().unwrap().insert("name".into(), json!(s.name()));
    v
}

fn gate(g: &Gate) -> Value {
    let params = match &g.kind {
        GateKind::Unitary(m) | GateKind::Controlled(m) => json!({"matrix": matrix(m)}),
        GateKind::ProductReflection(states) => {
            json!({"states": states.iter().map(|s| json!([complex(s[0]), complex(s[1])])).collect::<Vec<_>>()})
        }
        GateKind::Fanout { width, widened } => json!({"width": width, "widened": widened}),
        GateKind::Library(lib) => json!({"tag": lib.tag, "adjoint": lib.adjoint, "semantic": semantic(&lib.semantic)}),
        GateKind::And | GateKind::Or | GateKind::Nor | GateKind::Swap => json!({}),
    };
    let mut v = json!({
        "kind": g.kind.tag(),
        "params": params,
        "targets": g.targets,
        "controls": g.controls,
    });
    if let GateKind::Library(lib) = &g.kind {
        let o = v.as_object_mut().unwrap();
        o.insert("declared_depth".into(), json!(lib.declared_depth));
        o.insert("declared_width".into(), json!(lib.declared_width));
    }
    v
}

pub fn to_value(c: &Circuit) -> Value {
    let m = c.metadata();
    let amps: Vec<Value> = m
        .amplifications
        .iter()
        .map(|a| {
            let alpha = match &a.alpha {
                Weight::Exact(r) => rational(r),
                Weight::Approx(x) => json!(x),
            };
            json!({"site": a.site, "alpha": alpha, "rounds": a.rounds, "round_layers": a.round_layers})
        })
        .collect();
    let eta = m.eta.as_ref().map(|e| e.iter().map(|z| complex(*z)).collect::<Vec<_>>());
    json!({
        "version": FORMAT_VERSION,
        "metadata": {
            "n": m.n,
            "k": m.k,
            "ell": m.ell,
            "fanout_budget": m.fanout_budget,
            "grover_rounds": m.grover_rounds,
            "amplifications": amps,
            "eta": eta,
        },
        "registers": c.registers().iter().map(|r| json!({"name": r.name, "qubits": r.qubits})).collect::<Vec<_>>(),
        "layers": c.layers().map(|l| l.iter().map(gate).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

pub fn serialize(c: &Circuit) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(&to_value(c)).expect("circuit values always serialize");
    out.push(b'\n');
    out
}

struct Cursor<'a> {
    at: String,
    v: &'a Value,
}

impl<'a> Cursor<'a> {
    fn new(at: impl Into<String>, v: &'a Value) -> Self {
        Cursor { at: at.into(), v }
    }

    fn err<T>(&self, what: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Malformed { at: self.at.clone(), what: what.into() })
    }

    fn field(&self, name: &str) -> Result<Cursor<'a>, ParseError> {
        match self.v.get(name) {
            Some(v) => Ok(Cursor::new(format!("{}.{name}", self.at), v)),
            None => self.err(format!("missing field {name:?}")),
        }
    }

    fn opt(&self, name: &str) -> Option<Cursor<'a>> {
        self.v.get(name).filter(|v| !v.is_null()).map(|v| Cursor::new(format!("{}.{name}", self.at), v))
    }

    fn items(&self) -> Result<Vec<Cursor<'a>>, ParseError> {
        match self.v.as_array() {
            Some(a) => Ok(a.iter().enumerate().map(|(i, v)| Cursor::new(format!("{}[{i}]", self.at), v)).collect()),
            None => self.err("expected an array"),
        }
    }

    fn object(&self) -> Result<&'a Map<String, Value>, ParseError> {
        self.v.as_object().map_or_else(|| self.err("expected an object"), Ok)
    }

    fn u64(&self) -> Result<u64, ParseError> {
        self.v.as_u64().map_or_else(|| self.err("expected a non-negative integer"), Ok)
    }

    fn usize(&self) -> Result<usize, ParseError> {
        self.u64().map(|x| x as usize)
    }

    fn f64(&self) -> Result<f64, ParseError> {
        self.v.as_f64().map_or_else(|| self.err("expected a number"), Ok)
    }

    fn bool(&self) -> Result<bool, ParseError> {
        self.v.as_bool().map_or_else(|| self.err("expected a boolean"), Ok)
    }

    fn str(&self) -> Result<&'a str, ParseError> {
        self.v.as_str().map_or_else(|| self.err("expected a string"), Ok)
    }

    fn complex(&self) -> Result<C64, ParseError> {
        let parts = self.items()?;
        if parts.len() != 2 {
            return self.err("expected [re, im]");
        }
        Ok(C64::new(parts[0].f64()?, parts[1].f64()?))
    }

    fn qubits(&self) -> Result<Vec<QubitId>, ParseError> {
        self.items()?.iter().map(|q| q.usize().map(QubitId)).collect()
    }

    fn bigint(&self) -> Result<BigInt, ParseError> {
        self.str()?.parse().map_or_else(|_| self.err("expected a decimal integer string"), Ok)
    }
}

fn parse_matrix(c: &Cursor) -> Result<[[C64; 2]; 2], ParseError> {
    let rows = c.items()?;
    if rows.len() != 2 {
        return c.err("expected a 2×2 matrix");
    }
    let mut m = [[C64::new(0.0, 0.0); 2]; 2];
    for (i, row) in rows.iter().enumerate() {
        let cells = row.items()?;
        if cells.len() != 2 {
            return row.err("expected two entries");
        }
        for (j, cell) in cells.iter().enumerate() {
            m[i][j] = cell.complex()?;
        }
    }
    Ok(m)
}

fn parse_semantic(c: &Cursor) -> Result<Semantic, ParseError> {
    let u = |name: &str| c.field(name)?.usize();
    Ok(match c.field("name")?.str()? {
        "threshold" => Semantic::Threshold { n: u("n")?, k: u("k")?, negate: c.field("negate")?.bool()? },
        "exact" => Semantic::Exact { n: u("n")?, k: u("k")? },
        "one_hot" => Semantic::OneHot { bits: u("bits")?, slots: u("slots")?, shift: u("shift")? },
        "ham" => Semantic::Ham { n: u("n")?, k: u("k")? },
        "weight_select" => {
            let test = match c.field("test")?.str()? {
                "at_most" => WeightTest::AtMost,
                "equal" => WeightTest::Equal,
                other => return c.err(format!("unknown weight test {other:?}")),
            };
            Semantic::WeightSelect { n: u("n")?, k: u("k")?, test }
        }
        "w_swap" => Semantic::WSwap { t: u("t")?, width: u("width")? },
        "prep" => {
            let promise = match c.field("promise")?.str()? {
                "free" => Promise::Free,
                "one_hot_or_zero" => Promise::OneHotOrZero,
                other => return c.err(format!("unknown promise {other:?}")),
            };
            let mut branches = Vec::new();
            for b in c.field("branches")?.items()? {
                let mut state = Vec::new();
                for e in b.field("state")?.items()? {
                    let parts = e.items()?;
                    if parts.len() != 3 {
                        return e.err("expected [index, re, im]");
                    }
                    state.push((parts[0].u64()?, C64::new(parts[1].f64()?, parts[2].f64()?)));
                }
                branches.push(PrepBranch { control: b.field("control")?.u64()?, state });
            }
            Semantic::Prep(PrepTable { control_bits: u("control_bits")?, target_bits: u("target_bits")?, branches, promise })
        }
        other => return c.err(format!("unknown library semantic {other:?}")),
    })
}

fn parse_gate(c: &Cursor, layer: usize, index: usize) -> Result<Gate, ParseError> {
    c.object()?;
    let tag = c.field("kind")?.str()?;
    let params = c.field("params")?;
    let kind = match tag {
        "unitary" => GateKind::Unitary(parse_matrix(&params.field("matrix")?)?),
        "controlled" => GateKind::Controlled(parse_matrix(&params.field("matrix")?)?),
        "product_reflection" => {
            let mut states = Vec::new();
            for s in params.field("states")?.items()? {
                let parts = s.items()?;
                if parts.len() != 2 {
                    return s.err("expected a single-qubit state");
                }
                states.push([parts[0].complex()?, parts[1].complex()?]);
            }
            GateKind::ProductReflection(states)
        }
        "and" => GateKind::And,
        "or" => GateKind::Or,
        "nor" => GateKind::Nor,
        "swap" => GateKind::Swap,
        "fanout" => GateKind::Fanout { width: params.field("width")?.usize()?, widened: params.field("widened")?.bool()? },
        "library" => GateKind::Library(LibraryGate {
            tag: params.field("tag")?.str()?.to_string(),
            semantic: parse_semantic(&params.field("semantic")?)?,
            declared_depth: c.field("declared_depth")?.usize()?,
            declared_width: c.field("declared_width")?.usize()?,
            adjoint: params.field("adjoint")?.bool()?,
        }),
        other => return Err(ParseError::UnknownKind { layer, gate: index, tag: other.to_string() }),
    };
    let g = Gate { kind, targets: c.field("targets")?.qubits()?, controls: c.field("controls")?.qubits()? };
    g.validate().map_err(|source| ParseError::Invalid { at: c.at.clone(), source })?;
    Ok(g)
}

fn parse_metadata(c: &Cursor) -> Result<Metadata, ParseError> {
    let mut amplifications = Vec::new();
    if let Some(list) = c.opt("amplifications") {
        for a in list.items()? {
            let alpha = a.field("alpha")?;
            let alpha = if alpha.v.is_object() {
                let den = alpha.field("den")?.bigint()?;
                if den == BigInt::from(0) {
                    return alpha.err("zero denominator");
                }
                Weight::Exact(BigRational::new(alpha.field("num")?.bigint()?, den))
            } else {
                Weight::Approx(alpha.f64()?)
            };
            amplifications.push(AmpRecord {
                site: a.field("site")?.str()?.to_string(),
                alpha,
                rounds: a.field("rounds")?.usize()?,
                round_layers: a.field("round_layers")?.usize()?,
            });
        }
    }
    let eta = match c.opt("eta") {
        Some(e) => Some(e.items()?.iter().map(Cursor::complex).collect::<Result<Vec<_>, _>>()?),
        None => None,
    };
    Ok(Metadata {
        n: c.field("n")?.usize()?,
        k: c.field("k")?.usize()?,
        ell: c.field("ell")?.usize()?,
        fanout_budget: c.field("fanout_budget")?.usize()?,
        grover_rounds: c.opt("grover_rounds").map(|g| g.usize()).transpose()?.unwrap_or(0),
        amplifications,
        eta,
    })
}

pub fn from_value(v: &Value) -> Result<Circuit, ParseError> {
    let root = Cursor::new("$", v);
    root.object()?;
    let version = root.field("version")?.u64()?;
    if version != FORMAT_VERSION {
        return Err(ParseError::Version(version));
    }
    let metadata = parse_metadata(&root.field("metadata")?)?;
    let mut registers = Vec::new();
    for r in root.field("registers")?.items()? {
        registers.push(Register::new(r.field("name")?.str()?, r.field("qubits")?.qubits()?));
    }
    let mut layers = Vec::new();
    for (li, l) in root.field("layers")?.items()?.iter().enumerate() {
        let mut gates = Vec::new();
        for (gi, g) in l.items()?.iter().enumerate() {
            gates.push(parse_gate(g, li, gi)?);
        }
        layers.push(gates);
    }
    Circuit::from_parts(registers, layers, metadata).map_err(|source| ParseError::Invalid { at: "$".into(), source })
}

pub fn deserialize(bytes: &[u8]) -> Result<Circuit, ParseError> {
    let v: Value = serde_json::from_slice(bytes).map_err(|e| {
        if e.is_eof() {
            ParseError::Truncated(e.to_string())
        } else {
            ParseError::Syntax(e.to_string())
        }
    })?;
    from_value(&v)
}
