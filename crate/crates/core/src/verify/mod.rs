//! Exact checks that a synthesized circuit is a logical gate, and extraction
//! of the logical action it implements.
//!
//! A diagonal circuit `exp(2πi F(z)/M)` commutes with the X-check shifting
//! `z → z + s` on the flux-free configurations iff `Δ_s(z) = F(z+s) - F(z)`
//! vanishes mod M on all of them. `Δ_s` only reads the qudits of gates that
//! touch `s`, and it has bounded Newton degree in each copy's coordinates,
//! so it suffices to evaluate it on the low-degree points of the projected
//! flat space.

pub mod boundary;
pub mod logical;
pub mod oracle;
pub mod suite;

use std::collections::{BTreeMap, BTreeSet, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::code::{CssCode, SparseVec};
use crate::error::{Error, Result};
use crate::homology::modular::{factorize, Echelon};
use crate::synth::{synthesize_diagonal, Constants, DiagonalCircuit, Gate, GateExpression};

pub use boundary::{cube_gate_action, simplex_gate_action, simplex_gate_circuit, BoundaryAction};
pub use logical::{
    clifford_logical_action, extract_logical_action, extract_with_generators, CliffordAction, LogicalGenerator,
    LogicalVariable, Monomial, NamedLogicalGate, PhasePolynomial,
};
pub use oracle::{brute_force_oracle, LogicalMatrix, OracleOp};
pub use suite::{cartan_suite, pontryagin_property_suite, steenrod_suite, SuiteCheck, SuiteReport};

/// How much a passing commutation check proves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Guarantee {
    /// Vanishing on the evaluation set implies vanishing on every flat configuration.
    Exact,
    /// The evaluation set is the low-degree set, which is conclusive only for
    /// a prime modulus; no violation was found.
    PrimeModulusOnly,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    /// Index into the code's X-checks.
    pub check: usize,
    /// Flat configuration, as nonzero `(qudit, value)` pairs.
    pub z: SparseVec,
    /// `Δ_s(z)` as a numerator over `denominator`.
    pub delta: u64,
    pub denominator: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CommutationReport {
    pub passed: bool,
    pub checks: usize,
    /// Configurations evaluated by the exhaustive part.
    pub points: u64,
    pub spot_checks: usize,
    pub guarantee: Guarantee,
    pub witness: Option<Witness>,
}

#[derive(Clone, Copy, Debug)]
pub struct CheckOptions {
    pub seed: u64,
    pub spot_checks: usize,
    /// Upper bound on evaluated configurations over all checks.
    pub budget: u64,
    /// Largest projected group enumerated in full for composite moduli.
    pub grid_cap: u64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            seed: 0,
            spot_checks: 100,
            budget: 200_000_000,
            grid_cap: 1 << 20,
        }
    }
}

/// Synthesizes `expr` and checks it against every X-check of `code`.
pub fn check_stabilizer_commutation(
    expr: &GateExpression,
    code: &CssCode,
    consts: &Constants,
    opts: &CheckOptions,
) -> Result<CommutationReport> {
    let circ = synthesize_diagonal(expr, code, consts)?;
    check_circuit_commutation(&circ, code, opts)
}

/// Points of one block of coordinates at which `Δ_s` is evaluated.
struct BlockPoints {
    qudits: Vec<usize>,
    points: Vec<Vec<u64>>,
    exact: bool,
}

/// Checks `Δ_s ≡ 0 mod M` on all flat configurations for every X-check `s`.
pub fn check_circuit_commutation(
    circ: &DiagonalCircuit,
    code: &CssCode,
    opts: &CheckOptions,
) -> Result<CommutationReport> {
    if circ.num_qudits != code.num_qudits() || circ.modulus != code.modulus() {
        return Err(Error::Input("circuit and code disagree on qudits or modulus".into()));
    }
    let n = code.modulus();
    let m = circ.denominator();
    let spanning = code.flat_spanning_set()?;
    let block_of = flat_blocks(code, &spanning);
    let by_qudit = circ.gates_by_qudit();
    let checks = code.x_checks();

    // plan every check before evaluating, so the budget is enforced up front
    let plans: Vec<Option<Plan>> = checks
        .par_iter()
        .map(|s| plan_check(circ, s, &by_qudit, &spanning, &block_of, n, opts.grid_cap))
        .collect();
    let mut points: u64 = 0;
    let mut exact = true;
    for (blocks, _, _) in plans.iter().flatten() {
        let count = blocks.iter().fold(1u64, |a, b| a.saturating_mul(b.points.len() as u64));
        points = points.saturating_add(count);
        exact &= blocks.iter().all(|b| b.exact);
    }
    if points > opts.budget {
        return Err(Error::Budget(format!(
            "commutation check needs {points} evaluations, budget is {}",
            opts.budget
        )));
    }

    let failures: Vec<Option<Witness>> = plans
        .par_iter()
        .enumerate()
        .map(|(ci, plan)| {
            let (blocks, gates, shift) = plan.as_ref()?;
            first_violation(blocks, gates, shift, n, m).map(|(z, delta)| {
                let qudits: Vec<usize> = blocks.iter().flat_map(|b| b.qudits.iter().copied()).collect();
                let mut sparse: SparseVec = qudits.into_iter().zip(z).filter(|&(_, v)| v != 0).collect();
                sparse.sort_unstable();
                Witness {
                    check: ci,
                    z: sparse,
                    delta,
                    denominator: m,
                }
            })
        })
        .collect();
    let mut witness = failures.into_iter().flatten().next();

    // random spot checks on whole configurations with the full circuit
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let spot = if checks.is_empty() || spanning.is_empty() { 0 } else { opts.spot_checks };
    for _ in 0..spot {
        if witness.is_some() {
            break;
        }
        let mut z = vec![0u64; code.num_qudits()];
        for v in &spanning {
            let c = rng.gen_range(0..n);
            if c != 0 {
                for (zi, &vi) in z.iter_mut().zip(v) {
                    *zi = (*zi + c * vi) % n;
                }
            }
        }
        let ci = rng.gen_range(0..checks.len());
        let mut shifted = z.clone();
        for &(q, e) in &checks[ci] {
            shifted[q] = (shifted[q] + e) % n;
        }
        let delta = (circ.phase(&shifted, m) + m - circ.phase(&z, m)) % m;
        if delta != 0 {
            witness = Some(Witness {
                check: ci,
                z: z.iter().enumerate().filter(|&(_, &v)| v != 0).map(|(q, &v)| (q, v)).collect(),
                delta,
                denominator: m,
            });
        }
    }

    Ok(CommutationReport {
        passed: witness.is_none(),
        checks: checks.len(),
        points,
        spot_checks: spot,
        guarantee: if exact { Guarantee::Exact } else { Guarantee::PrimeModulusOnly },
        witness,
    })
}

/// Block id per qudit: the copy when every spanning vector stays inside one
/// copy, else a single block.
fn flat_blocks(code: &CssCode, spanning: &[Vec<u64>]) -> Vec<usize> {
    let per_copy: Vec<usize> = (0..code.num_qudits()).map(|q| code.locate(q).0).collect();
    let split = spanning.iter().all(|v| {
        let copies: BTreeSet<usize> = v.iter().enumerate().filter(|(_, &x)| x != 0).map(|(q, _)| per_copy[q]).collect();
        copies.len() <= 1
    });
    if split {
        per_copy
    } else {
        vec![0; code.num_qudits()]
    }
}

/// Newton degree of one gate's phase in the coordinates of one block, or
/// `None` if no bound is known for this modulus and denominator.
fn block_degree(count: usize, den: u64, n: u64) -> Option<usize> {
    if count == 0 {
        return Some(0);
    }
    let f = factorize(n);
    if f.len() != 1 || f[0].1 != 1 {
        return None;
    }
    let p = n;
    let mut v = 0;
    let mut rest = den;
    while rest.is_multiple_of(p) {
        rest /= p;
        v += 1;
    }
    if rest != 1 {
        return None;
    }
    // lifting a sum of bits to Z_{2^v} adds one degree per extra power of two
    match (p, v) {
        (_, 0 | 1) => Some(count),
        (2, _) => Some(count + v - 1),
        _ => None,
    }
}

type Plan = (Vec<BlockPoints>, Vec<Gate>, Vec<u64>);

fn plan_check(
    circ: &DiagonalCircuit,
    s: &SparseVec,
    by_qudit: &[Vec<usize>],
    spanning: &[Vec<u64>],
    block_of: &[usize],
    n: u64,
    grid_cap: u64,
) -> Option<Plan> {
    let gate_ids: BTreeSet<usize> = s.iter().flat_map(|&(q, _)| by_qudit[q].iter().copied()).collect();
    if gate_ids.is_empty() {
        return None;
    }
    // local qudits grouped by block
    let mut groups: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for &g in &gate_ids {
        for &q in &circ.gates[g].qudits {
            groups.entry(block_of[q]).or_default().insert(q);
        }
    }
    let mut local_index = std::collections::HashMap::new();
    let mut order = Vec::new();
    for qs in groups.values() {
        for &q in qs {
            local_index.insert(q, order.len());
            order.push(q);
        }
    }
    let gates: Vec<Gate> = gate_ids
        .iter()
        .map(|&g| {
            let gate = &circ.gates[g];
            Gate {
                qudits: gate.qudits.iter().map(|q| local_index[q]).collect(),
                num: gate.num,
                den: gate.den,
            }
        })
        .collect();
    let mut shift = vec![0u64; order.len()];
    for &(q, e) in s {
        if let Some(&i) = local_index.get(&q) {
            shift[i] = e % n;
        }
    }

    let mut blocks = Vec::new();
    for (&b, qs) in &groups {
        let qudits: Vec<usize> = qs.iter().copied().collect();
        let mut degree = Some(0);
        for &g in &gate_ids {
            let gate = &circ.gates[g];
            let count = gate.qudits.iter().filter(|&&q| block_of[q] == b).count();
            degree = match (degree, block_degree(count, gate.den, n)) {
                (Some(a), Some(d)) => Some(a.max(d)),
                _ => None,
            };
        }
        let projected: Vec<Vec<u64>> = spanning
            .iter()
            .map(|v| qudits.iter().map(|&q| v[q] % n).collect::<Vec<u64>>())
            .filter(|v| v.iter().any(|&x| x != 0))
            .collect();
        let block = match degree {
            Some(d) => {
                let mut ech = Echelon::new(n);
                for v in &projected {
                    ech.insert(v);
                }
                let rows: Vec<Vec<u64>> = ech.rows().map(|r| r.to_vec()).collect();
                BlockPoints {
                    points: low_degree_points(&rows, qudits.len(), d, n),
                    qudits,
                    exact: true,
                }
            }
            None => match group_closure(&projected, qudits.len(), n, grid_cap) {
                Some(points) => BlockPoints {
                    points,
                    qudits,
                    exact: true,
                },
                None => {
                    let mut gens: Vec<Vec<u64>> = projected;
                    gens.sort();
                    gens.dedup();
                    let d = gate_ids.iter().map(|&g| circ.gates[g].qudits.len()).max().unwrap_or(0) + 1;
                    BlockPoints {
                        points: low_degree_points(&gens, qudits.len(), d, n),
                        qudits,
                        exact: false,
                    }
                }
            },
        };
        blocks.push(block);
    }
    Some((blocks, gates, shift))
}

/// All `Σ c_j rows_j` with coefficients in `0..n` summing to at most `d`.
fn low_degree_points(rows: &[Vec<u64>], len: usize, d: usize, n: u64) -> Vec<Vec<u64>> {
    fn rec(rows: &[Vec<u64>], from: usize, left: usize, n: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        out.push(cur.clone());
        if left == 0 {
            return;
        }
        for j in from..rows.len() {
            for c in 1..n.min(left as u64 + 1) {
                for (x, &r) in cur.iter_mut().zip(&rows[j]) {
                    *x = (*x + c * r) % n;
                }
                rec(rows, j + 1, left - c as usize, n, cur, out);
                for (x, &r) in cur.iter_mut().zip(&rows[j]) {
                    *x = (*x + n * n - c * r % n) % n;
                }
            }
        }
    }
    let mut out = Vec::new();
    rec(rows, 0, d, n, &mut vec![0; len], &mut out);
    out
}

/// Every element of the subgroup generated by `gens`, if it has at most `cap`.
fn group_closure(gens: &[Vec<u64>], len: usize, n: u64, cap: u64) -> Option<Vec<Vec<u64>>> {
    let mut seen: HashSet<Vec<u64>> = HashSet::from([vec![0; len]]);
    let mut frontier = vec![vec![0u64; len]];
    while let Some(v) = frontier.pop() {
        for g in gens {
            let w: Vec<u64> = v.iter().zip(g).map(|(a, b)| (a + b) % n).collect();
            if seen.insert(w.clone()) {
                if seen.len() as u64 > cap {
                    return None;
                }
                frontier.push(w);
            }
        }
    }
    let mut out: Vec<Vec<u64>> = seen.into_iter().collect();
    out.sort();
    Some(out)
}

/// First point of the block product where `Δ` is nonzero, in enumeration order.
fn first_violation(blocks: &[BlockPoints], gates: &[Gate], shift: &[u64], n: u64, m: u64) -> Option<(Vec<u64>, u64)> {
    if blocks.iter().any(|b| b.points.is_empty()) {
        return None;
    }
    let offsets: Vec<usize> = blocks
        .iter()
        .scan(0, |acc, b| {
            let o = *acc;
            *acc += b.qudits.len();
            Some(o)
        })
        .collect();
    let mut z = vec![0u64; shift.len()];
    let mut shifted = vec![0u64; shift.len()];
    let mut idx = vec![0usize; blocks.len()];
    loop {
        for (bi, b) in blocks.iter().enumerate() {
            let p = &b.points[idx[bi]];
            z[offsets[bi]..offsets[bi] + p.len()].copy_from_slice(p);
        }
        for ((t, &a), &s) in shifted.iter_mut().zip(&z).zip(shift) {
            *t = (a + s) % n;
        }
        let delta = gates
            .iter()
            .fold(0u64, |acc, g| (acc + g.phase(&shifted, m) + m - g.phase(&z, m)) % m);
        if delta != 0 {
            return Some((z, delta));
        }
        let mut t = blocks.len();
        loop {
            if t == 0 {
                return None;
            }
            t -= 1;
            idx[t] += 1;
            if idx[t] < blocks[t].points.len() {
                break;
            }
            idx[t] = 0;
        }
    }
}
