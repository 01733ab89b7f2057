//! Logical phases of the gates on codes with gapped boundaries: bulk,
//! boundary and hinge actions evaluated on the stored `|1⟩` configuration.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::cochain::formula::{eval, Local, Shape};
use crate::code::boundary::{simplex_code, BoundaryCode};
use crate::error::{input, Result};
use crate::synth::{cube_gate_circuit, DiagonalCircuit, Gate, Poly};

/// Phase `exp(2πi num/den)` acquired by `|1⟩`, with the contribution of each
/// action term.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundaryAction {
    pub code: String,
    pub num: u64,
    pub den: u64,
    pub terms: Vec<TermValue>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TermValue {
    pub support: Vec<u32>,
    pub num: i64,
    pub den: u64,
}

impl BoundaryAction {
    /// The phase as a power of `exp(2πi/den)`, e.g. `exp(2πi·7/8)`.
    pub fn describe(&self) -> String {
        format!("exp(2πi·{}/{})", self.num, self.den)
    }
}

/// `coeff · local` integrated over the simplex `support`.
struct ActionTerm {
    support: Vec<u32>,
    coeff: (i64, u64),
    local: Local,
}

fn a(j: usize) -> Local {
    Local::leaf(j, 1)
}

fn cup(v: Vec<Local>) -> Local {
    Local::cup_chain(v)
}

fn cup1(x: Local, y: Local) -> Local {
    Local::cup_i(1, x, y)
}

/// Action terms of the `R_{Nc}` gate on the `Nc`-simplex. `a(j)` is the field
/// of copy `j`, labelled `a_{j+1}` in the usual notation; each coefficient
/// is in units of a full turn.
fn simplex_terms(nc: usize) -> Result<Vec<ActionTerm>> {
    let face = |k: u32| (1..=k).collect::<Vec<u32>>();
    let top: Vec<u32> = (0..=nc as u32).collect();
    let t = |support: Vec<u32>, num: i64, den: u64, local: Local| ActionTerm {
        support,
        coeff: (num, den),
        local,
    };
    Ok(match nc {
        2 => vec![t(top, 1, 2, cup(vec![a(0), a(1)])), t(face(2), -1, 4, a(0))],
        3 => vec![
            t(top, 1, 2, cup(vec![a(0), a(2), a(1)])),
            t(face(3), -1, 4, cup(vec![a(0), a(1)])),
            t(face(2), 1, 8, a(0)),
        ],
        4 => vec![
            t(top, 1, 2, cup(vec![a(0), a(3), a(2), a(1)])),
            t(face(4), -1, 4, cup(vec![a(0), a(2), a(1)])),
            t(face(4), -1, 2, cup(vec![a(0), cup1(a(1), a(2)), a(1)])),
            t(face(3), -1, 8, cup(vec![a(0), a(1)])),
            t(face(2), 1, 16, a(0)),
        ],
        5 => vec![
            t(top, 1, 2, cup(vec![a(0), a(4), a(3), a(2), a(1)])),
            t(face(5), -1, 4, cup(vec![a(0), a(3), a(2), a(1)])),
            t(face(5), -1, 2, cup(vec![a(0), cup1(a(2), a(3)), a(2), a(1)])),
            t(face(5), -1, 2, cup(vec![a(0), cup1(a(1), a(3)), a(2), a(1)])),
            t(face(5), -1, 2, cup(vec![a(0), a(3), cup1(a(1), a(2)), a(1)])),
            t(face(4), 1, 8, cup(vec![a(0), a(2), a(1)])),
            t(face(4), -1, 4, cup(vec![a(0), cup1(a(1), a(2)), a(1)])),
            t(face(3), 1, 16, cup(vec![a(0), a(1)])),
            t(face(2), -1, 32, a(0)),
        ],
        _ => return input(format!("simplex gates are tabulated for Nc = 2..5, got {nc}")),
    })
}

fn check_simplex(b: &BoundaryCode) -> Result<usize> {
    let nc = b.factors();
    if b.complex().dim() != nc || b.complex().num_cells(nc) != 1 || b.geometry().is_some() {
        return input("expected a code built by simplex_code");
    }
    Ok(nc)
}

/// Phase of the gate on the `Nc`-simplex code acting on `|1⟩`, summing
/// every action term on the holonomy configuration of `|1⟩`.
pub fn simplex_gate_action(nc: usize) -> Result<BoundaryAction> {
    let b = simplex_code(nc)?;
    let b = &b;
    let c = b.complex();
    let code = b.code();
    let one = &b.reference_configurations()[1];
    let mut terms = Vec::new();
    let den = 32u64;
    let mut total: i64 = 0;
    for term in simplex_terms(nc)? {
        let mut leaf = |id: usize, sub: &[u32]| -> i64 {
            c.cell_index(1, sub).map_or(0, |e| one[code.qudit(id, e)] as i64)
        };
        let v: i64 = eval(&term.local, &term.support, Shape::Simplicial, &mut leaf);
        let (num, d) = term.coeff;
        total += num * v * (den / d) as i64;
        terms.push(TermValue {
            support: term.support,
            num: num * v,
            den: d,
        });
    }
    Ok(reduced(b.name(), total, den, terms))
}

fn reduced(name: &str, total: i64, den: u64, terms: Vec<TermValue>) -> BoundaryAction {
    let num = total.rem_euclid(den as i64) as u64;
    let g = num_integer::gcd(num, den).max(1);
    BoundaryAction {
        code: name.to_string(),
        num: num / g,
        den: den / g,
        terms,
    }
}

/// The simplex gate as a diagonal circuit: each action term expanded on its
/// simplex into monomials of edge qubits.
pub fn simplex_gate_circuit(b: &BoundaryCode) -> Result<DiagonalCircuit> {
    let nc = check_simplex(b)?;
    let c = b.complex();
    let code = b.code();
    let mut gates = Vec::new();
    for term in simplex_terms(nc)? {
        let mut leaf = |id: usize, sub: &[u32]| -> Poly {
            c.cell_index(1, sub)
                .map_or_else(Poly::default, |e| Poly::var(code.qudit(id, e) as u32))
        };
        let p: Poly = eval(&term.local, &term.support, Shape::Simplicial, &mut leaf);
        let mut merged: BTreeMap<Vec<u32>, i64> = BTreeMap::new();
        for (mut m, k) in p.0 {
            m.dedup();
            *merged.entry(m).or_default() += k;
        }
        let (num, den) = term.coeff;
        for (m, k) in merged {
            if !m.is_empty() {
                gates.extend(Gate::new(m.iter().map(|&q| q as usize).collect(), num * k, den));
            }
        }
    }
    Ok(DiagonalCircuit {
        num_qudits: code.num_qudits(),
        modulus: 2,
        gates,
    })
}

/// Phase of the cube gate on `|1⟩`, evaluated on the stored configuration.
pub fn cube_gate_action(b: &BoundaryCode) -> Result<BoundaryAction> {
    let circ = cube_gate_circuit(b)?;
    let den = circ.denominator();
    let one = &b.reference_configurations()[1];
    let total = circ.phase(one, den) as i64;
    Ok(reduced(b.name(), total, den, Vec::new()))
}
