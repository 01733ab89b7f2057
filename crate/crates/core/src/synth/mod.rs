//! Circuit synthesis: diagonal phase circuits from gate expressions, the CX
//! layer between two copies, and the cube-code gate.

pub mod expr;

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use crate::cochain::formula::{eval, Coeff, Local, Shape};
use crate::cochain::Cochain;
use crate::code::boundary::BoundaryCode;
use crate::code::CssCode;
use crate::complex::CellComplex;
use crate::error::{input, precondition, unsupported, Error, Result};
pub use expr::{Expr, GateExpression, LeafRef, Term};

/// Named constant cochains referenced by `CONST(name)`.
pub type Constants = BTreeMap<String, Cochain>;

/// Integer polynomial in qudit values. A monomial is its sorted list of
/// variables, with repetition for powers.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Poly(pub BTreeMap<Vec<u32>, i64>);

impl Poly {
    pub fn var(v: u32) -> Poly {
        Poly(BTreeMap::from([(vec![v], 1)]))
    }
}

impl Coeff for Poly {
    fn zero() -> Self {
        Poly::default()
    }
    fn from_i64(v: i64) -> Self {
        if v == 0 {
            Poly::default()
        } else {
            Poly(BTreeMap::from([(Vec::new(), v)]))
        }
    }
    fn add(&self, other: &Self) -> Self {
        let mut out = self.0.clone();
        for (m, c) in &other.0 {
            let e = out.entry(m.clone()).or_default();
            *e += c;
            if *e == 0 {
                out.remove(m);
            }
        }
        Poly(out)
    }
    fn mul(&self, other: &Self) -> Self {
        let mut out: BTreeMap<Vec<u32>, i64> = BTreeMap::new();
        for (a, x) in &self.0 {
            for (b, y) in &other.0 {
                let mut m = Vec::with_capacity(a.len() + b.len());
                m.extend_from_slice(a);
                m.extend_from_slice(b);
                m.sort_unstable();
                let e = out.entry(m).or_default();
                *e += x * y;
            }
        }
        out.retain(|_, c| *c != 0);
        Poly(out)
    }
    fn scale(&self, s: i64) -> Self {
        if s == 0 {
            return Poly::default();
        }
        Poly(self.0.iter().map(|(m, c)| (m.clone(), c * s)).collect())
    }
    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
}

/// Diagonal gate multiplying `|z⟩` by `exp(2πi num Π z_q / den)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Gate {
    pub qudits: Vec<usize>,
    pub num: i64,
    pub den: u64,
}

impl Gate {
    /// Gate with the fraction reduced and `num` in `0..den`; `None` if trivial.
    pub fn new(qudits: Vec<usize>, num: i64, den: u64) -> Option<Gate> {
        let num = num.rem_euclid(den as i64);
        if num == 0 {
            return None;
        }
        let g = (num as u64).gcd(&den);
        Some(Gate {
            qudits,
            num: num / g as i64,
            den: den / g,
        })
    }

    /// Phase numerator over `m` (a multiple of `den`) on assignment `z`.
    pub fn phase(&self, z: &[u64], m: u64) -> u64 {
        let mut prod: u64 = 1;
        for &q in &self.qudits {
            prod = prod * z[q] % m;
            if prod == 0 {
                return 0;
            }
        }
        (self.num as u64 % m) * (m / self.den) % m * prod % m
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DiagonalCircuit {
    pub num_qudits: usize,
    /// Qudit dimension.
    pub modulus: u64,
    pub gates: Vec<Gate>,
}

#[derive(Serialize)]
struct NamedGate {
    name: String,
    qudits: Vec<usize>,
}

impl DiagonalCircuit {
    pub fn new(num_qudits: usize, modulus: u64) -> DiagonalCircuit {
        DiagonalCircuit {
            num_qudits,
            modulus,
            gates: Vec::new(),
        }
    }

    /// Least common multiple of the gate denominators.
    pub fn denominator(&self) -> u64 {
        self.gates.iter().fold(1, |m, g| m.lcm(&g.den))
    }

    /// Phase numerator over `m` (a multiple of every denominator).
    pub fn phase(&self, z: &[u64], m: u64) -> u64 {
        self.gates.iter().fold(0, |acc, g| (acc + g.phase(z, m)) % m)
    }

    /// Gates touching each qudit.
    pub fn gates_by_qudit(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_qudits];
        for (i, g) in self.gates.iter().enumerate() {
            for &q in &g.qudits {
                if out[q].last() != Some(&i) {
                    out[q].push(i);
                }
            }
        }
        out
    }

    /// Largest number of gates sharing one qudit.
    pub fn max_gates_per_qudit(&self) -> usize {
        self.gates_by_qudit().iter().map(|v| v.len()).max().unwrap_or(0)
    }

    pub fn concat(mut self, other: DiagonalCircuit) -> DiagonalCircuit {
        self.gates.extend(other.gates);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.gates).expect("serializable")
    }

    /// Gates named `Z`, `S`, `T`, `CZ`, `CS`, `CCZ`, `CkRm`, ... Only for
    /// qubits with power-of-two denominators.
    pub fn to_named_json(&self) -> Result<String> {
        if self.modulus != 2 {
            return precondition("gate names are defined for qubits");
        }
        let mut out = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            let name = gate_name(g.qudits.len(), g.num, g.den)
                .ok_or_else(|| Error::Precondition(format!("denominator {} is not a power of two", g.den)))?;
            out.push(NamedGate {
                name,
                qudits: g.qudits.clone(),
            });
        }
        Ok(serde_json::to_string_pretty(&out).expect("serializable"))
    }
}

/// Name of the `k`-qubit gate `exp(2πi num Π z / den)`, e.g. `CCZ`, `CS†`,
/// `C3R4^3`.
pub fn gate_name(k: usize, num: i64, den: u64) -> Option<String> {
    if k == 0 || !den.is_power_of_two() || den < 2 {
        return None;
    }
    let m = den.trailing_zeros();
    let u = num.rem_euclid(den as i64) as u64;
    let base = match m {
        1 => "Z".to_string(),
        2 => "S".to_string(),
        3 => "T".to_string(),
        _ => format!("R{m}"),
    };
    let controls = match k - 1 {
        0 => String::new(),
        1 => "C".into(),
        2 if m == 1 => "CC".into(),
        c => format!("C{c}"),
    };
    let power = if u == 1 || m == 1 {
        String::new()
    } else if u == den - 1 {
        "†".into()
    } else {
        format!("^{u}")
    };
    Some(format!("{controls}{base}{power}"))
}

fn shape_of(c: &CellComplex) -> Shape<'_> {
    match c.grid() {
        Some(d) => Shape::Torus(d),
        None => Shape::Simplicial,
    }
}

/// A term prepared for evaluation on one complex.
struct Prepared {
    num: i64,
    den: u64,
    local: Local,
    leaves: Vec<LeafRef>,
}

fn prepare(expr: &GateExpression, code: &CssCode, consts: &Constants) -> Result<(Arc<CellComplex>, Vec<Prepared>)> {
    let complex = code.copies()[0].complex.clone();
    for k in expr.fields() {
        let cp = code
            .copies()
            .get(k)
            .ok_or_else(|| Error::Input(format!("field a{k} but the code has {} copies", code.num_copies())))?;
        if cp.complex.uid() != complex.uid() {
            return unsupported("fields on different complexes");
        }
    }
    for (name, c) in consts {
        if c.complex().uid() != complex.uid() {
            return input(format!("constant \"{name}\" lives on another complex"));
        }
    }
    let field = |k: usize| code.copies().get(k).map(|c| c.degree);
    let constant = |s: &str| consts.get(s).map(|c| c.degree());
    let dim = complex.dim();
    let mut out = Vec::new();
    for t in &expr.terms {
        if t.den == 0 {
            return input("zero denominator");
        }
        let d = t.expr.degree(&field, &constant)?;
        if d != dim {
            return input(format!("term {} has degree {d}, expected {dim}", t.expr));
        }
        if t.expr.has_nested_pont() {
            return unsupported("nested PONT is evaluated in ring mode only");
        }
        check_operators(&t.expr, code, &field, &constant, complex.is_simplicial())?;
        let mut leaves = Vec::new();
        let local = t.expr.to_local(&mut leaves, &field, &constant)?;
        if complex.orientation().is_none() && (2 * t.num).rem_euclid(t.den as i64) != 0 {
            return precondition(format!(
                "term {}/{} needs an orientation to be integrated",
                t.num, t.den
            ));
        }
        out.push(Prepared {
            num: t.num,
            den: t.den,
            local,
            leaves,
        });
    }
    Ok((complex, out))
}

fn check_operators(
    e: &Expr,
    code: &CssCode,
    field: &dyn Fn(usize) -> Option<usize>,
    constant: &dyn Fn(&str) -> Option<usize>,
    simplicial: bool,
) -> Result<()> {
    match e {
        Expr::CupI(i, x, y) => {
            if *i > 0 && !simplicial {
                return unsupported("higher cup on cubical lattice out of scope");
            }
            check_operators(x, code, field, constant, simplicial)?;
            check_operators(y, code, field, constant, simplicial)
        }
        Expr::Sq(i, x) => {
            let d = x.degree(field, constant)?;
            if *i < d && !simplicial {
                return unsupported("Steenrod squares below the top need higher cups, simplicial only");
            }
            check_operators(x, code, field, constant, simplicial)
        }
        Expr::Pont(x, n) => {
            if *n > 1 && !simplicial {
                return unsupported("Pontryagin powers need higher cups, simplicial only");
            }
            if !x.fields().is_empty() && !code.modulus().is_multiple_of(*n as u64) {
                return precondition(format!("PONT power {n} must divide N = {}", code.modulus()));
            }
            check_operators(x, code, field, constant, simplicial)
        }
        Expr::Cup(v) => v.iter().try_for_each(|x| check_operators(x, code, field, constant, simplicial)),
        _ => Ok(()),
    }
}

/// Diagonal circuit for `expr` on `code`: one gate per top cell and
/// monomial of each term's cell-local expansion, in top-cell order.
pub fn synthesize_diagonal(expr: &GateExpression, code: &CssCode, consts: &Constants) -> Result<DiagonalCircuit> {
    let (complex, terms) = prepare(expr, code, consts)?;
    let dim = complex.dim();
    let shape = shape_of(&complex);
    let n = code.modulus();
    let lifts: HashMap<&str, Cochain> = consts.iter().map(|(k, c)| (k.as_str(), c.integer_lift())).collect();
    let orientation = complex.orientation();
    let per_cell: Vec<Vec<Gate>> = complex
        .cells(dim)
        .par_iter()
        .enumerate()
        .map(|(ci, key)| {
            let o = orientation.map_or(1, |o| o[ci]);
            let mut gates = Vec::new();
            for t in &terms {
                if o == 0 {
                    continue;
                }
                let mut leaf = |id: usize, sub: &[u32]| -> Poly {
                    let Some(r) = t.leaves.get(id) else {
                        return Poly::default();
                    };
                    match r {
                        LeafRef::Field(k) => {
                            let deg = code.copies()[*k].degree;
                            match complex.cell_index(deg, sub) {
                                Some(c) => Poly::var(code.qudit(*k, c) as u32),
                                None => Poly::default(),
                            }
                        }
                        LeafRef::Const(s) => {
                            let c = &lifts[s.as_str()];
                            match complex.cell_index(c.degree(), sub) {
                                Some(i) => Poly::from_i64(c.value(i)),
                                None => Poly::default(),
                            }
                        }
                    }
                };
                let p: Poly = eval(&t.local, key, shape, &mut leaf);
                let mut merged: BTreeMap<Vec<u32>, i64> = BTreeMap::new();
                for (m, c) in p.0 {
                    let mut m = m;
                    if n == 2 {
                        m.dedup();
                    }
                    *merged.entry(m).or_default() += c;
                }
                for (m, c) in merged {
                    if m.is_empty() {
                        // constant phases are global and dropped
                        continue;
                    }
                    let num = (t.num as i128 * c as i128 * o as i128).rem_euclid(t.den as i128) as i64;
                    if let Some(g) = Gate::new(m.iter().map(|&v| v as usize).collect(), num, t.den) {
                        gates.push(g);
                    }
                }
            }
            gates
        })
        .collect();
    Ok(DiagonalCircuit {
        num_qudits: code.num_qudits(),
        modulus: n,
        gates: per_cell.into_iter().flatten().collect(),
    })
}

/// Phase of `expr` on assignment `z` computed from cochains, as a numerator
/// over `expr.denominator()`. Independent of circuit synthesis; constant
/// terms are dropped in both.
pub fn expression_phase(expr: &GateExpression, code: &CssCode, consts: &Constants, z: &[u64]) -> Result<u64> {
    let (complex, terms) = prepare(expr, code, consts)?;
    let m = expr.denominator();
    let zero = vec![0u64; z.len()];
    let value = |z: &[u64]| -> Result<u64> {
        let mut acc: i128 = 0;
        for t in &terms {
            let leaves: Vec<Cochain> = t
                .leaves
                .iter()
                .map(|r| match r {
                    LeafRef::Field(k) => {
                        let off = code.offset(*k);
                        let deg = code.copies()[*k].degree;
                        let vals = (0..complex.num_cells(deg)).map(|c| z[off + c] as i64).collect();
                        Cochain::from_values(&complex, deg, 0, vals)
                    }
                    LeafRef::Const(s) => Ok(consts[s].integer_lift().with_modulus(0)),
                })
                .collect::<Result<_>>()?;
            let refs: Vec<&Cochain> = leaves.iter().collect();
            let v = Cochain::evaluate(&complex, &t.local, &refs, 0);
            let total: i128 = match complex.orientation() {
                Some(o) => o.iter().zip(v.values()).map(|(&a, &b)| a as i128 * b as i128).sum(),
                None => v.values().iter().map(|&b| b as i128).sum(),
            };
            acc += total * t.num as i128 * (m / t.den) as i128;
        }
        Ok(acc.rem_euclid(m as i128) as u64)
    };
    let base = value(&zero)?;
    Ok((value(z)? + m - base) % m)
}

/// Symplectic map of a layer of CX gates `(control, target)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CliffordMap {
    pub num_qudits: usize,
    pub modulus: u64,
    pub cx: Vec<(usize, usize)>,
}

#[derive(Serialize)]
struct CxJson {
    cx: [usize; 2],
}

impl CliffordMap {
    /// Image of the X-type Pauli with exponents `x`: `X_c → X_c X_t`.
    pub fn conjugate_x(&self, x: &[u64]) -> Vec<u64> {
        let mut out = x.to_vec();
        for &(c, t) in &self.cx {
            out[t] = (out[t] + out[c]) % self.modulus;
        }
        out
    }

    /// Image of the Z-type Pauli with exponents `z`: `Z_t → Z_c^{-1} Z_t`.
    pub fn conjugate_z(&self, z: &[u64]) -> Vec<u64> {
        let mut out = z.to_vec();
        for &(c, t) in &self.cx {
            out[c] = (out[c] + self.modulus - out[t] % self.modulus) % self.modulus;
        }
        out
    }

    /// Action on computational basis states: `|z⟩ → |z'⟩` with `z'_t = z_t + z_c`.
    pub fn apply_basis(&self, z: &[u64]) -> Vec<u64> {
        self.conjugate_x(z)
    }

    /// This layer followed by `other`.
    pub fn then(&self, other: &CliffordMap) -> CliffordMap {
        let mut cx = self.cx.clone();
        cx.extend_from_slice(&other.cx);
        CliffordMap {
            num_qudits: self.num_qudits,
            modulus: self.modulus,
            cx,
        }
    }

    /// Whether every X and Z generator is mapped to itself.
    pub fn is_identity(&self) -> bool {
        (0..self.num_qudits).all(|i| {
            let mut e = vec![0u64; self.num_qudits];
            e[i] = 1;
            self.conjugate_x(&e) == e && self.conjugate_z(&e) == e
        })
    }

    /// Checks `⟨φ(u), φ(v)⟩ = ⟨u, v⟩` on all pairs of generators.
    pub fn preserves_symplectic_form(&self) -> bool {
        let n = self.num_qudits;
        let m = self.modulus;
        let unit = |i: usize| {
            let mut e = vec![0u64; n];
            e[i] = 1;
            e
        };
        let xs: Vec<Vec<u64>> = (0..n).map(|i| self.conjugate_x(&unit(i))).collect();
        let zs: Vec<Vec<u64>> = (0..n).map(|i| self.conjugate_z(&unit(i))).collect();
        let dot = |a: &[u64], b: &[u64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<u64>() % m;
        // X and Z parts are transformed separately, so only X·Z pairings matter
        (0..n).all(|i| (0..n).all(|j| dot(&xs[i], &zs[j]) == u64::from(i == j)))
    }

    pub fn to_json(&self) -> String {
        let v: Vec<CxJson> = self.cx.iter().map(|&(c, t)| CxJson { cx: [c, t] }).collect();
        serde_json::to_string_pretty(&v).expect("serializable")
    }
}

/// CX on every cell, controlled by copy `control` and targeting copy
/// `target` on the same cell.
pub fn synthesize_cnot_layer(code: &CssCode, control: usize, target: usize) -> Result<CliffordMap> {
    if code.modulus() != 2 {
        return precondition("the CX layer is built for qubit codes");
    }
    let (Some(a), Some(b)) = (code.copies().get(control), code.copies().get(target)) else {
        return input("control or target copy out of range");
    };
    if control == target {
        return input("control and target must be different copies");
    }
    if a.complex.torus_dims().is_none() {
        return unsupported("the CX layer needs a cubical torus");
    }
    if a.complex.uid() != b.complex.uid() || a.degree != b.degree {
        return input("control and target copies must share complex and degree");
    }
    let cx = (0..a.complex.num_cells(a.degree))
        .map(|c| (code.qudit(control, c), code.qudit(target, c)))
        .collect();
    Ok(CliffordMap {
        num_qudits: code.num_qudits(),
        modulus: 2,
        cx,
    })
}

/// The cube-code gate: `(-1)^{a1∪a3∪a2}` on every cube, `(-i)^{[a1]∪[a2]}`
/// on every plaquette of F4, F5 and F6, and `exp(2πi [a1]/8)` on every edge
/// of the hinges E35 and E36. Both cups are the signed cubical cup.
pub fn cube_gate_circuit(b: &BoundaryCode) -> Result<DiagonalCircuit> {
    if b.geometry().is_none() || b.factors() != 3 {
        return input("cube gate needs a code built by cube_code");
    }
    let code = b.code();
    let c = b.complex();
    let grid = c.grid().expect("box");
    let ne = c.num_cells(1);
    let qubit = |copy: usize, key: &[u32]| copy * ne + c.cell_index(1, key).expect("edge in box");
    let mut gates = Vec::new();
    // cubes: the six axis orderings of the cubical triple cup
    let local = Local::cup_chain(vec![Local::leaf(0, 1), Local::leaf(1, 1), Local::leaf(2, 1)]);
    let copy_of_leaf = [0usize, 2, 1];
    for key in c.cells(3) {
        let mut leaf = |id: usize, sub: &[u32]| Poly::var(qubit(copy_of_leaf[id], sub) as u32);
        let p: Poly = eval(&local, key, Shape::Torus(grid), &mut leaf);
        for (m, coeff) in p.0 {
            if let Some(g) = Gate::new(m.iter().map(|&v| v as usize).collect(), coeff, 2) {
                gates.push(g);
            }
        }
    }
    // plaquettes on F4..F6: the signed cubical cup [a1]∪[a2], so the path
    // along the lower axis first gets CS† and the other path CS
    let on = |k: usize, i: usize, f: &str| b.region(f).is_some_and(|r| r.members[k][i]);
    for (pi, key) in c.cells(2).iter().enumerate() {
        if !["F4", "F5", "F6"].iter().any(|f| on(2, pi, f)) {
            continue;
        }
        let mask = key[3];
        let axes: Vec<usize> = (0..3).filter(|&a| mask & (1 << a) != 0).collect();
        for (first, second, sign) in [(axes[0], axes[1], 1), (axes[1], axes[0], -1)] {
            let mut e1 = key.to_vec();
            e1[3] = 1 << first;
            let mut e2 = key.to_vec();
            e2[first] += 1;
            e2[3] = 1 << second;
            gates.extend(Gate::new(vec![qubit(0, &e1), qubit(1, &e2)], -sign, 4));
        }
    }
    // hinge edges of E35 and E36
    for (ei, key) in c.cells(1).iter().enumerate() {
        if on(1, ei, "F3") && (on(1, ei, "F5") || on(1, ei, "F6")) {
            gates.extend(Gate::new(vec![qubit(0, key)], 1, 8));
        }
    }
    Ok(DiagonalCircuit {
        num_qudits: code.num_qudits(),
        modulus: 2,
        gates,
    })
}
