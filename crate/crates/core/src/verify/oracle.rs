//! Brute-force logical matrices on small qubit codes, built from the
//! explicit code-space basis: uniform superpositions over X-stabilizer
//! orbits of flat configurations.

use std::collections::HashMap;

use serde::Serialize;

use crate::code::CssCode;
use crate::error::{precondition, Result};
use crate::synth::{CliffordMap, DiagonalCircuit};

use super::LogicalGenerator;

const MAX_QUBITS: usize = 20;

pub enum OracleOp<'a> {
    Diagonal(&'a DiagonalCircuit),
    Clifford(&'a CliffordMap),
}

/// Logical matrix with entries that are zero or a root of unity:
/// `Some(k)` stands for `exp(2πi k / denominator)`. Basis states are indexed
/// by the class coordinates in little-endian binary order of the generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LogicalMatrix {
    pub dim: usize,
    pub denominator: u64,
    pub entries: Vec<Vec<Option<u64>>>,
}

impl LogicalMatrix {
    pub fn is_identity(&self) -> bool {
        (0..self.dim).all(|i| (0..self.dim).all(|j| self.entries[i][j] == if i == j { Some(0) } else { None }))
    }
}

/// Reduces `v` by a GF(2) basis kept sorted with distinct leading bits,
/// giving the smallest element of the coset.
fn reduce(basis: &[u32], mut v: u32) -> u32 {
    for &b in basis {
        v = v.min(v ^ b);
    }
    v
}

fn span_basis(gens: impl Iterator<Item = u32>) -> Vec<u32> {
    let mut basis: Vec<u32> = Vec::new();
    for g in gens {
        let v = reduce(&basis, g);
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis
}

/// Logical matrix of `op` on `code` in the basis given by `gens`.
pub fn brute_force_oracle(op: OracleOp, code: &CssCode, gens: &[LogicalGenerator]) -> Result<LogicalMatrix> {
    let n = code.num_qudits();
    if code.modulus() != 2 || n > MAX_QUBITS {
        return precondition(format!("the oracle handles qubit codes with at most {MAX_QUBITS} qubits"));
    }
    if gens.len() > 10 {
        return precondition("the oracle handles at most 10 logical qubits");
    }
    let mask = |v: &[u64]| v.iter().enumerate().fold(0u32, |m, (q, &x)| m | (((x & 1) as u32) << q));
    let sparse_mask = |s: &crate::code::SparseVec| s.iter().fold(0u32, |m, &(q, e)| m | (((e & 1) as u32) << q));
    let x_basis = span_basis(code.x_checks().iter().map(sparse_mask));
    let z_masks: Vec<u32> = code.z_checks().iter().map(sparse_mask).collect();

    // orbits of flat configurations under X-stabilizers
    let mut orbits: HashMap<u32, usize> = HashMap::new();
    for z in 0u32..(1u32 << n) {
        if z_masks.iter().all(|&c| (c & z).count_ones() % 2 == 0) {
            let key = reduce(&x_basis, z);
            let next = orbits.len();
            orbits.entry(key).or_insert(next);
        }
    }
    let k = gens.len();
    let dim = 1usize << k;
    if orbits.len() != dim {
        return precondition(format!(
            "{} X-orbits of flat configurations but {k} generators",
            orbits.len()
        ));
    }
    let gen_masks: Vec<u32> = gens.iter().map(|g| mask(&g.config)).collect();
    let rep = |m: usize| (0..k).filter(|&i| m >> i & 1 == 1).fold(0u32, |z, i| z ^ gen_masks[i]);
    let mut index_of: HashMap<u32, usize> = HashMap::new();
    for m in 0..dim {
        if index_of.insert(reduce(&x_basis, rep(m)), m).is_some() {
            return precondition("generators do not give distinct logical classes");
        }
    }
    // all elements of the X-stabilizer group
    let mut group = vec![0u32];
    for &b in &x_basis {
        let extra: Vec<u32> = group.iter().map(|&g| g ^ b).collect();
        group.extend(extra);
    }
    let bits = |z: u32| -> Vec<u64> { (0..n).map(|q| u64::from(z >> q & 1)).collect() };

    let mut entries = vec![vec![None; dim]; dim];
    let denominator = match op {
        OracleOp::Diagonal(circ) => {
            let den = circ.denominator();
            for m in 0..dim {
                let base = rep(m);
                let phase = circ.phase(&bits(base), den);
                for &g in &group {
                    if circ.phase(&bits(base ^ g), den) != phase {
                        return precondition(format!(
                            "phase varies over the orbit of logical state {m}, so the circuit is not a logical gate"
                        ));
                    }
                }
                entries[m][m] = Some(phase);
            }
            den
        }
        OracleOp::Clifford(map) => {
            for m in 0..dim {
                let base = rep(m);
                let mut target = None;
                for &g in &group {
                    let image = mask(&map.apply_basis(&bits(base ^ g)));
                    let key = reduce(&x_basis, image);
                    let Some(&t) = index_of.get(&key) else {
                        return precondition("the map leaves the code space");
                    };
                    if target.is_some_and(|t0| t0 != t) {
                        return precondition("the map splits an X-orbit");
                    }
                    target = Some(t);
                }
                entries[target.expect("nonempty orbit")][m] = Some(0);
            }
            1
        }
    };
    Ok(LogicalMatrix {
        dim,
        denominator,
        entries,
    })
}
