//! Logical action of a verified circuit, as a phase polynomial in the
//! coordinates of the cohomology classes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::code::CssCode;
use crate::error::{input, precondition, Error, Result};
use crate::homology::modular::solve_mod_n;
use crate::synth::{gate_name, CliffordMap, DiagonalCircuit};

/// Size limit for evaluating the full logical grid.
const GRID_CAP: u128 = 1 << 20;

/// A generator of the logical space: a flat configuration whose multiples
/// realize the class coordinate `m`.
#[derive(Clone, Debug)]
pub struct LogicalGenerator {
    pub label: String,
    pub config: Vec<u64>,
    pub order: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LogicalVariable {
    pub label: String,
    pub order: u64,
}

/// `num/den · Π_α C(m_α, e_α)`, a term of the Newton expansion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Monomial {
    pub exponents: Vec<u32>,
    pub num: u64,
    pub den: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NamedLogicalGate {
    pub name: String,
    pub variables: Vec<String>,
}

/// Phase `exp(2πi Σ terms)` as a function of the class coordinates. The
/// terms are the Newton coefficients of the phase function, so the form is
/// canonical; over qubits it is the Möbius expansion over variable subsets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PhasePolynomial {
    pub modulus: u64,
    pub denominator: u64,
    pub variables: Vec<LogicalVariable>,
    pub terms: Vec<Monomial>,
    /// False when only the degree-bounded part of the grid was evaluated.
    pub full_grid: bool,
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

impl PhasePolynomial {
    /// Phase numerator over `denominator` at coordinates `m`.
    pub fn evaluate(&self, m: &[u64]) -> u64 {
        let d = self.denominator;
        self.terms.iter().fold(0u64, |acc, t| {
            let weight = t
                .exponents
                .iter()
                .zip(m)
                .fold(1u64, |w, (&e, &x)| w * (binomial(x, e as u64) % d) % d);
            (acc + t.num * (d / t.den) % d * weight) % d
        })
    }

    pub fn is_trivial(&self) -> bool {
        self.terms.is_empty()
    }

    /// Product of `C^{k-1}R_m`-type gates, one per term. Qubits with
    /// power-of-two denominators only.
    pub fn named_gates(&self) -> Result<Vec<NamedLogicalGate>> {
        if self.modulus != 2 {
            return precondition("named logical gates are defined for qubits");
        }
        self.terms
            .iter()
            .map(|t| {
                let vars: Vec<String> = t
                    .exponents
                    .iter()
                    .zip(&self.variables)
                    .filter(|(&e, _)| e > 0)
                    .map(|(_, v)| v.label.clone())
                    .collect();
                let name = gate_name(vars.len(), t.num as i64, t.den)
                    .ok_or_else(|| Error::Precondition(format!("denominator {} is not a power of two", t.den)))?;
                Ok(NamedLogicalGate { name, variables: vars })
            })
            .collect()
    }

    /// Named gates as text, e.g. `CZ(a0[0],a1[1]) CZ(a0[1],a1[0])`.
    pub fn describe(&self) -> String {
        match self.named_gates() {
            Ok(g) if g.is_empty() => "identity".into(),
            Ok(g) => g
                .iter()
                .map(|g| format!("{}({})", g.name, g.variables.join(",")))
                .collect::<Vec<_>>()
                .join(" "),
            Err(_) => self
                .terms
                .iter()
                .map(|t| {
                    // Newton basis: exponent e stands for binom(x, e)
                    let factors: Vec<String> = t
                        .exponents
                        .iter()
                        .zip(&self.variables)
                        .filter(|(&e, _)| e > 0)
                        .map(|(&e, v)| if e == 1 { v.label.clone() } else { format!("binom({},{e})", v.label) })
                        .collect();
                    format!("{}/{}*{}", t.num, t.den, factors.join("*"))
                })
                .collect::<Vec<_>>()
                .join(" + "),
        }
    }
}

/// Generators from the cohomology bases of every copy of a closed code,
/// labelled `a<copy>[<index>]`.
pub fn cohomology_generators(code: &CssCode) -> Result<Vec<LogicalGenerator>> {
    if code.is_open() || code.condensed().is_some() {
        return precondition("cohomology generators need a plain closed code");
    }
    let mut out = Vec::new();
    for k in 0..code.num_copies() {
        let b = code.logical_basis(k)?;
        for (i, (r, &o)) in b.reps.iter().zip(&b.orders).enumerate() {
            out.push(LogicalGenerator {
                label: format!("a{k}[{i}]"),
                config: code.embed(k, r),
                order: o,
            });
        }
    }
    Ok(out)
}

/// Logical phase polynomial of a diagonal circuit on a closed code.
pub fn extract_logical_action(circ: &DiagonalCircuit, code: &CssCode, seed: u64) -> Result<PhasePolynomial> {
    let gens = cohomology_generators(code)?;
    extract_with_generators(circ, code, &gens, seed)
}

/// Newton degree bound of the phase in the class coordinates.
fn degree_bound(circ: &DiagonalCircuit) -> usize {
    circ.gates
        .iter()
        .map(|g| {
            let v = g.den.trailing_zeros() as usize;
            if circ.modulus == 2 && g.den.is_power_of_two() {
                g.qudits.len() + v.saturating_sub(1)
            } else {
                g.qudits.len() * circ.modulus as usize
            }
        })
        .max()
        .unwrap_or(0)
}

/// Phase polynomial over the coordinates of `gens`, evaluated twice: once on
/// the given representatives and once after shifting each by a random
/// combination of X-checks. Disagreement means the circuit is not a
/// logical gate.
pub fn extract_with_generators(
    circ: &DiagonalCircuit,
    code: &CssCode,
    gens: &[LogicalGenerator],
    seed: u64,
) -> Result<PhasePolynomial> {
    if circ.num_qudits != code.num_qudits() {
        return input("circuit and code disagree on the number of qudits");
    }
    let first = newton_form(circ, gens)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = code.modulus();
    let shifted: Vec<LogicalGenerator> = gens
        .iter()
        .map(|g| {
            let mut config = g.config.clone();
            for x in code.x_checks() {
                let c = rng.gen_range(0..n);
                for &(q, e) in x {
                    config[q] = (config[q] + c * e) % n;
                }
            }
            LogicalGenerator {
                config,
                ..g.clone()
            }
        })
        .collect();
    let second = newton_form(circ, &shifted)?;
    if first != second {
        return precondition(
            "logical phase depends on the choice of representatives, so the circuit is not a logical gate",
        );
    }
    Ok(first)
}

fn newton_form(circ: &DiagonalCircuit, gens: &[LogicalGenerator]) -> Result<PhasePolynomial> {
    let n = circ.modulus;
    let den = circ.denominator();
    let orders: Vec<u64> = gens.iter().map(|g| g.order).collect();
    let grid: u128 = orders.iter().map(|&o| o as u128).product();
    let full_grid = grid <= GRID_CAP;
    let bound = degree_bound(circ);
    // evaluation points: the whole grid, or those with coordinate sum ≤ bound
    let points: Vec<Vec<u64>> = if full_grid {
        grid_points(&orders)
    } else {
        let mut pts = Vec::new();
        bounded_points(&orders, bound as u64, 0, &mut vec![0; orders.len()], &mut pts);
        pts
    };
    if points.len() as u128 > GRID_CAP * 16 {
        return Err(Error::Budget(format!("logical extraction needs {} evaluations", points.len())));
    }
    let values: Vec<u64> = points
        .par_iter()
        .map(|m| {
            let mut z = vec![0u64; circ.num_qudits];
            for (g, &c) in gens.iter().zip(m) {
                if c != 0 {
                    for (zi, &v) in z.iter_mut().zip(&g.config) {
                        *zi = (*zi + c * v) % n;
                    }
                }
            }
            circ.phase(&z, den)
        })
        .collect();
    let variables = gens
        .iter()
        .map(|g| LogicalVariable {
            label: g.label.clone(),
            order: g.order,
        })
        .collect();
    Ok(newton_polynomial(n, den, variables, &orders, points, &values, full_grid))
}

/// Every point of the grid `Π [0, orders_i)`, last coordinate fastest.
pub(crate) fn grid_points(orders: &[u64]) -> Vec<Vec<u64>> {
    let total: usize = orders.iter().map(|&o| o as usize).product();
    let mut pts = Vec::with_capacity(total);
    let mut idx = vec![0u64; orders.len()];
    loop {
        pts.push(idx.clone());
        let mut t = orders.len();
        loop {
            if t == 0 {
                return pts;
            }
            t -= 1;
            idx[t] += 1;
            if idx[t] < orders[t] {
                break;
            }
            idx[t] = 0;
        }
    }
}

/// Newton coefficients of phase values at `points`: either the full grid in
/// [`grid_points`] order or a down-closed set of points.
pub(crate) fn newton_polynomial(
    modulus: u64,
    den: u64,
    variables: Vec<LogicalVariable>,
    orders: &[u64],
    points: Vec<Vec<u64>>,
    values: &[u64],
    full_grid: bool,
) -> PhasePolynomial {
    let base = values.first().copied().unwrap_or(0);
    let coeffs: Vec<(Vec<u64>, u64)> = if full_grid {
        // forward differences along each axis turn values into Newton coefficients
        let mut c: Vec<i128> = values.iter().map(|&v| (v as i128 - base as i128).rem_euclid(den as i128)).collect();
        let mut stride = 1usize;
        for &o in orders.iter().rev() {
            let o = o as usize;
            let block = stride * o;
            for start in (0..c.len()).step_by(block) {
                for inner in 0..stride {
                    for step in 1..o {
                        for k in (step..o).rev() {
                            let hi = start + inner + k * stride;
                            let lo = hi - stride;
                            c[hi] = (c[hi] - c[lo]).rem_euclid(den as i128);
                        }
                    }
                }
            }
            stride = block;
        }
        points.into_iter().zip(c).map(|(p, v)| (p, v as u64)).collect()
    } else {
        let lookup: std::collections::HashMap<&[u64], u64> =
            points.iter().map(|p| p.as_slice()).zip(values.iter().copied()).collect();
        points
            .iter()
            .map(|a| {
                let mut acc: i128 = 0;
                let mut b = vec![0u64; a.len()];
                loop {
                    let sign = if a.iter().zip(&b).map(|(x, y)| x - y).sum::<u64>() % 2 == 0 { 1 } else { -1 };
                    let w: i128 = a.iter().zip(&b).map(|(&x, &y)| binomial(x, y) as i128).product();
                    acc += sign * w * (lookup[b.as_slice()] as i128 - base as i128);
                    let mut t = a.len();
                    loop {
                        if t == 0 {
                            return (a.clone(), acc.rem_euclid(den as i128) as u64);
                        }
                        t -= 1;
                        b[t] += 1;
                        if b[t] <= a[t] {
                            break;
                        }
                        b[t] = 0;
                    }
                }
            })
            .collect()
    };
    let mut terms: Vec<Monomial> = coeffs
        .into_iter()
        .filter(|(e, v)| *v != 0 && e.iter().any(|&x| x != 0))
        .map(|(e, v)| {
            let g = num_integer::gcd(v, den);
            Monomial {
                exponents: e.iter().map(|&x| x as u32).collect(),
                num: v / g,
                den: den / g,
            }
        })
        .collect();
    terms.sort_by(|a, b| {
        let wa: u32 = a.exponents.iter().sum();
        let wb: u32 = b.exponents.iter().sum();
        wa.cmp(&wb).then_with(|| b.exponents.cmp(&a.exponents))
    });
    PhasePolynomial {
        modulus,
        denominator: den,
        variables,
        terms,
        full_grid,
    }
}

fn bounded_points(orders: &[u64], left: u64, from: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    out.push(cur.clone());
    for i in from..orders.len() {
        for c in 1..orders[i].min(left + 1) {
            cur[i] = c;
            bounded_points(orders, left - c, i + 1, cur, out);
        }
        cur[i] = 0;
    }
}

/// Logical action of a CX layer on the X-type logicals.
#[derive(Clone, Debug, Serialize)]
pub struct CliffordAction {
    pub preserves_stabilizers: bool,
    pub preserves_symplectic_form: bool,
    pub variables: Vec<String>,
    /// Row `i` holds the coordinates of the image of generator `i`.
    pub matrix: Vec<Vec<u64>>,
}

impl CliffordAction {
    /// Whether the map is `a_t[i] → a_t[i] + a_c[i]` for every paired
    /// generator of control copy `c` and target copy `t`, i.e. a transversal
    /// logical CNOT with the X-part flowing from control to target.
    pub fn is_logical_cnot(&self, control: usize, target: usize) -> bool {
        let pc = format!("a{control}[");
        let pt = format!("a{target}[");
        let index = |label: &str| self.variables.iter().position(|v| v == label);
        self.variables.iter().enumerate().all(|(i, v)| {
            let mut expected = vec![0u64; self.variables.len()];
            expected[i] = 1;
            if let Some(rest) = v.strip_prefix(&pc) {
                match index(&format!("{pt}{rest}")) {
                    Some(j) => expected[j] = 1,
                    None => return false,
                }
            }
            self.matrix[i] == expected
        })
    }

    pub fn describe(&self) -> String {
        let mut parts = Vec::new();
        for (i, row) in self.matrix.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                if j != i && c != 0 {
                    parts.push(format!("CNOT({}→{})", self.variables[i], self.variables[j]));
                }
            }
        }
        if parts.is_empty() {
            "identity".into()
        } else {
            parts.join(" ")
        }
    }
}

/// Conjugates every stabilizer generator and every X-type logical by the CX
/// layer and expresses the logical images in class coordinates.
pub fn clifford_logical_action(map: &CliffordMap, code: &CssCode) -> Result<CliffordAction> {
    if map.num_qudits != code.num_qudits() || map.modulus != code.modulus() {
        return input("map and code disagree on qudits or modulus");
    }
    let n = code.modulus();
    let dense = |s: &crate::code::SparseVec| {
        let mut v = vec![0u64; code.num_qudits()];
        for &(q, e) in s {
            v[q] = e;
        }
        v
    };
    let preserves_stabilizers = code.x_checks().par_iter().all(|x| code.in_x_span(&map.conjugate_x(&dense(x))))
        && code.z_checks().par_iter().all(|z| code.in_z_span(&map.conjugate_z(&dense(z))));
    let gens = cohomology_generators(code)?;
    let cols = gens.len() + code.x_checks().len();
    let mut a = vec![vec![0u64; cols]; code.num_qudits()];
    for (j, g) in gens.iter().enumerate() {
        for (q, &v) in g.config.iter().enumerate() {
            a[q][j] = v;
        }
    }
    for (j, x) in code.x_checks().iter().enumerate() {
        for &(q, e) in x {
            a[q][gens.len() + j] = e;
        }
    }
    let mut matrix = Vec::with_capacity(gens.len());
    for g in &gens {
        let image = map.conjugate_x(&g.config);
        let x = solve_mod_n(&a, cols, &image, n)
            .ok_or_else(|| Error::Precondition(format!("image of {} is not a logical operator", g.label)))?;
        matrix.push(gens.iter().zip(&x).map(|(h, &c)| c % h.order).collect());
    }
    Ok(CliffordAction {
        preserves_stabilizers,
        preserves_symplectic_form: map.preserves_symplectic_form(),
        variables: gens.iter().map(|g| g.label.clone()).collect(),
        matrix,
    })
}
