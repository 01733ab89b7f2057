//! CSS qudit codes built from cell complexes.
//!
//! Physical qudits are laid out copy-major: the qudit of `q`-cell `c` in copy
//! `k` has global index `offset(k) + c`.

pub mod boundary;

use std::sync::{Arc, OnceLock};

use rayon::prelude::*;
use serde::Serialize;

use crate::cochain::Cochain;
use crate::complex::CellComplex;
use crate::error::{input, precondition, Result};
use crate::homology::modular::{image_size_mod_n, nullspace_mod_p, is_prime, solve_mod_n};
use crate::homology::{cohomology_basis, CohomologyBasis};

/// Sparse exponent vector over global qudit indices, sorted by index,
/// exponents in `1..N`.
pub type SparseVec = Vec<(usize, u64)>;

#[derive(Clone, Debug)]
pub struct CodeCopy {
    pub complex: Arc<CellComplex>,
    pub degree: usize,
}

#[derive(Clone, Debug)]
pub struct CssCode {
    modulus: u64,
    copies: Vec<CodeCopy>,
    offsets: Vec<usize>,
    num_qudits: usize,
    x_checks: Vec<SparseVec>,
    z_checks: Vec<SparseVec>,
    /// Charge condensed so far; `None` for the plain homological code.
    condensed: Option<u64>,
    /// Set for codes with boundary truncations; their logical space is not
    /// given by closed-manifold cohomology.
    open: bool,
    bases: Arc<Vec<OnceLock<CohomologyBasis>>>,
}

/// Size of a finite abelian group as a prime factorization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupOrder {
    pub factors: Vec<(u64, u32)>,
}

impl GroupOrder {
    pub fn value(&self) -> Option<u128> {
        let mut v: u128 = 1;
        for &(p, e) in &self.factors {
            v = v.checked_mul((p as u128).checked_pow(e)?)?;
        }
        Some(v)
    }

    /// Exponent of `p` in the order.
    pub fn log(&self, p: u64) -> u32 {
        self.factors.iter().find(|f| f.0 == p).map_or(0, |f| f.1)
    }
}

#[derive(Serialize)]
struct CodeJson<'a> {
    modulus: u64,
    copies: Vec<CopyJson<'a>>,
    num_qudits: usize,
    condensed: Option<u64>,
    x_checks: &'a [SparseVec],
    z_checks: &'a [SparseVec],
}

#[derive(Serialize)]
struct CopyJson<'a> {
    complex: &'a str,
    degree: usize,
    offset: usize,
}

fn normalize(mut v: Vec<(usize, i64)>, n: u64) -> SparseVec {
    v.sort_unstable_by_key(|e| e.0);
    let mut out: SparseVec = Vec::with_capacity(v.len());
    for (i, e) in v {
        match out.last_mut() {
            Some(last) if last.0 == i => last.1 = (last.1 as i64 + e).rem_euclid(n as i64) as u64,
            _ => out.push((i, e.rem_euclid(n as i64) as u64)),
        }
    }
    out.retain(|e| e.1 != 0);
    out
}

impl CssCode {
    /// `copies` identical copies of the `q`-form Z_N homological code on `c`.
    pub fn from_chain_complex(c: &Arc<CellComplex>, q: usize, n: u64, copies: usize) -> Result<CssCode> {
        if q < 1 || q + 1 > c.dim() {
            return input(format!("form degree {q} must lie in 1..={}", c.dim().saturating_sub(1)));
        }
        if n < 2 {
            return input("qudit dimension must be at least 2");
        }
        if copies == 0 {
            return input("at least one copy is needed");
        }
        let list = vec![
            CodeCopy {
                complex: c.clone(),
                degree: q,
            };
            copies
        ];
        Ok(Self::homological(list, n))
    }

    /// Homological code with one copy per entry; copies may live on
    /// different complexes and degrees.
    pub fn from_copies(copies: Vec<CodeCopy>, n: u64) -> Result<CssCode> {
        for cp in &copies {
            if cp.degree < 1 || cp.degree + 1 > cp.complex.dim() {
                return input(format!("form degree {} out of range", cp.degree));
            }
        }
        if copies.is_empty() || n < 2 {
            return input("need at least one copy and N ≥ 2");
        }
        Ok(Self::homological(copies, n))
    }

    fn homological(copies: Vec<CodeCopy>, n: u64) -> CssCode {
        let mut offsets = Vec::with_capacity(copies.len());
        let mut total = 0;
        for cp in &copies {
            offsets.push(total);
            total += cp.complex.num_cells(cp.degree);
        }
        let mut x_checks = Vec::new();
        let mut z_checks = Vec::new();
        for (cp, &off) in copies.iter().zip(&offsets) {
            let q = cp.degree;
            let cx = &cp.complex;
            for cof in cx.cofaces(q - 1) {
                x_checks.push(normalize(cof.iter().map(|&(c, s)| (off + c, s)).collect(), n));
            }
            for p in 0..cx.num_cells(q + 1) {
                z_checks.push(normalize(cx.faces(q + 1, p).iter().map(|&(c, s)| (off + c, s)).collect(), n));
            }
        }
        let bases = Arc::new((0..copies.len()).map(|_| OnceLock::new()).collect());
        CssCode {
            modulus: n,
            copies,
            offsets,
            num_qudits: total,
            x_checks,
            z_checks,
            condensed: None,
            open: false,
            bases,
        }
    }

    /// Code with explicitly given checks, used for boundary codes.
    pub(crate) fn from_checks(
        copies: Vec<CodeCopy>,
        n: u64,
        x_checks: Vec<SparseVec>,
        z_checks: Vec<SparseVec>,
    ) -> CssCode {
        let mut offsets = Vec::with_capacity(copies.len());
        let mut total = 0;
        for cp in &copies {
            offsets.push(total);
            total += cp.complex.num_cells(cp.degree);
        }
        let bases = Arc::new((0..copies.len()).map(|_| OnceLock::new()).collect());
        CssCode {
            modulus: n,
            copies,
            offsets,
            num_qudits: total,
            x_checks,
            z_checks,
            condensed: None,
            open: true,
            bases,
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn copies(&self) -> &[CodeCopy] {
        &self.copies
    }

    pub fn num_copies(&self) -> usize {
        self.copies.len()
    }

    pub fn offset(&self, copy: usize) -> usize {
        self.offsets[copy]
    }

    pub fn num_qudits(&self) -> usize {
        self.num_qudits
    }

    /// Global qudit index of `cell` in `copy`.
    pub fn qudit(&self, copy: usize, cell: usize) -> usize {
        self.offsets[copy] + cell
    }

    /// Inverse of [`CssCode::qudit`].
    pub fn locate(&self, qudit: usize) -> (usize, usize) {
        let k = self.offsets.partition_point(|&o| o <= qudit) - 1;
        (k, qudit - self.offsets[k])
    }

    pub fn x_checks(&self) -> &[SparseVec] {
        &self.x_checks
    }

    pub fn z_checks(&self) -> &[SparseVec] {
        &self.z_checks
    }

    pub fn condensed(&self) -> Option<u64> {
        self.condensed
    }

    pub fn is_open(&self) -> bool {
        self.open
    }

    /// Pairs `(x, z)` of checks whose weighted overlap is nonzero mod N.
    pub fn commutation_violations(&self) -> Vec<(usize, usize)> {
        let n = self.modulus;
        let mut z_on: Vec<Vec<(usize, u64)>> = vec![Vec::new(); self.num_qudits];
        for (j, z) in self.z_checks.iter().enumerate() {
            for &(q, e) in z {
                z_on[q].push((j, e));
            }
        }
        let mut bad: Vec<(usize, usize)> = self
            .x_checks
            .par_iter()
            .enumerate()
            .flat_map_iter(|(i, x)| {
                let mut acc: std::collections::HashMap<usize, u64> = std::collections::HashMap::new();
                for &(q, e) in x {
                    for &(j, f) in &z_on[q] {
                        *acc.entry(j).or_default() += e * f % n;
                    }
                }
                let mut v: Vec<(usize, usize)> =
                    acc.into_iter().filter(|&(_, s)| s % n != 0).map(|(j, _)| (i, j)).collect();
                v.sort_unstable();
                v
            })
            .collect();
        bad.sort_unstable();
        bad
    }

    fn dense_columns(&self, checks: &[SparseVec]) -> Vec<Vec<u64>> {
        // rows: qudits, columns: checks, so the image is the span of the checks
        let mut m = vec![vec![0u64; checks.len()]; self.num_qudits];
        for (j, c) in checks.iter().enumerate() {
            for &(q, e) in c {
                m[q][j] = e;
            }
        }
        m
    }

    fn dense_rows(&self, checks: &[SparseVec]) -> Vec<Vec<u64>> {
        checks
            .iter()
            .map(|c| {
                let mut r = vec![0u64; self.num_qudits];
                for &(q, e) in c {
                    r[q] = e;
                }
                r
            })
            .collect()
    }

    /// Number of elements of the X-type stabilizer group.
    pub fn x_group_order(&self) -> GroupOrder {
        GroupOrder {
            factors: image_size_mod_n(&self.dense_columns(&self.x_checks), self.x_checks.len(), self.modulus),
        }
    }

    pub fn z_group_order(&self) -> GroupOrder {
        GroupOrder {
            factors: image_size_mod_n(&self.dense_columns(&self.z_checks), self.z_checks.len(), self.modulus),
        }
    }

    /// Code space dimension `N^n / (|S_X| |S_Z|)` by stabilizer counting.
    pub fn logical_dimension(&self) -> GroupOrder {
        let sx = self.x_group_order();
        let sz = self.z_group_order();
        let n = self.num_qudits as u32;
        let factors = crate::homology::modular::factorize(self.modulus)
            .into_iter()
            .map(|(p, k)| (p, k * n - sx.log(p) - sz.log(p)))
            .collect();
        GroupOrder { factors }
    }

    /// Logical dimension predicted by cohomology: product over copies of
    /// `|H^q(C; Z_N)|`. Only meaningful for closed, uncondensed codes.
    pub fn cohomology_dimension(&self) -> Result<GroupOrder> {
        if self.open || self.condensed.is_some() {
            return precondition("cohomology count applies to plain closed codes");
        }
        let mut acc: Vec<(u64, u32)> = crate::homology::modular::factorize(self.modulus)
            .into_iter()
            .map(|(p, _)| (p, 0))
            .collect();
        for k in 0..self.copies.len() {
            let b = self.logical_basis(k)?;
            for &o in &b.orders {
                for (p, e) in crate::homology::modular::factorize(o) {
                    if let Some(slot) = acc.iter_mut().find(|s| s.0 == p) {
                        slot.1 += e;
                    }
                }
            }
        }
        Ok(GroupOrder { factors: acc })
    }

    /// Cohomology basis of copy `k` at its form degree, mod N.
    pub fn logical_basis(&self, k: usize) -> Result<&CohomologyBasis> {
        if let Some(b) = self.bases[k].get() {
            return Ok(b);
        }
        let cp = &self.copies[k];
        let b = cohomology_basis(&cp.complex, cp.degree, self.modulus)?;
        Ok(self.bases[k].get_or_init(|| b))
    }

    /// Global exponent vector of a cochain placed on copy `k`.
    pub fn embed(&self, k: usize, f: &Cochain) -> Vec<u64> {
        let mut z = vec![0u64; self.num_qudits];
        self.embed_into(k, f, &mut z);
        z
    }

    pub fn embed_into(&self, k: usize, f: &Cochain, z: &mut [u64]) {
        let n = self.modulus as i64;
        for (c, &v) in f.values().iter().enumerate() {
            z[self.offsets[k] + c] = v.rem_euclid(n) as u64;
        }
    }

    /// Condenses the electric charge `ell`: X-checks are raised to the power
    /// `N/ell` and `Z^ell` is added on every qudit. Condensing twice
    /// composes to the gcd of the two charges.
    pub fn condense(&self, ell: u64) -> Result<CssCode> {
        let n = self.modulus;
        if ell == 0 || !n.is_multiple_of(ell) {
            return input(format!("charge {ell} does not divide N = {n}"));
        }
        if self.open {
            return precondition("condensation applies to closed homological codes");
        }
        let eff = match self.condensed {
            Some(prev) => num_integer::gcd(prev, ell),
            None => ell,
        };
        let base = Self::homological(self.copies.clone(), n);
        let pow = n / eff;
        let mut x_checks: Vec<SparseVec> = base
            .x_checks
            .iter()
            .map(|x| {
                let mut v: SparseVec = x.iter().map(|&(q, e)| (q, e * pow % n)).collect();
                v.retain(|e| e.1 != 0);
                v
            })
            .collect();
        x_checks.retain(|x| !x.is_empty());
        let mut z_checks = base.z_checks;
        if eff % n != 0 {
            z_checks.extend((0..base.num_qudits).map(|q| vec![(q, eff)]));
        }
        Ok(CssCode {
            x_checks,
            z_checks,
            condensed: Some(eff),
            ..base
        })
    }

    /// The Z_ell homological code the condensed code is equivalent to.
    pub fn effective_code(&self) -> Result<CssCode> {
        let Some(ell) = self.condensed else {
            return Ok(self.clone());
        };
        if ell == 1 {
            return precondition("condensing charge 1 leaves no logical space");
        }
        Ok(Self::homological(self.copies.clone(), ell))
    }

    /// Whether the two codes have the same X- and Z-type stabilizer groups.
    pub fn same_stabilizer_group(&self, other: &CssCode) -> bool {
        if self.modulus != other.modulus || self.num_qudits != other.num_qudits {
            return false;
        }
        let within = |a: &[SparseVec], b: &[SparseVec]| {
            let m = self.dense_columns(b);
            a.iter().all(|v| {
                let mut rhs = vec![0u64; self.num_qudits];
                for &(q, e) in v {
                    rhs[q] = e;
                }
                solve_mod_n(&m, b.len(), &rhs, self.modulus).is_some()
            })
        };
        within(&self.x_checks, &other.x_checks)
            && within(&other.x_checks, &self.x_checks)
            && within(&self.z_checks, &other.z_checks)
            && within(&other.z_checks, &self.z_checks)
    }

    /// Vectors spanning `{z : every Z-check has zero overlap with z}` mod N,
    /// the configurations with no flux.
    pub fn flat_spanning_set(&self) -> Result<Vec<Vec<u64>>> {
        let n = self.modulus;
        if is_prime(n) {
            return Ok(nullspace_mod_p(&self.dense_rows(&self.z_checks), self.num_qudits, n));
        }
        if self.open || self.condensed.is_some() {
            return precondition("flat configurations for composite N need a plain closed code");
        }
        // cocycles are coboundaries plus cohomology representatives
        let mut out: Vec<Vec<u64>> = Vec::new();
        for x in &self.x_checks {
            let mut v = vec![0u64; self.num_qudits];
            for &(q, e) in x {
                v[q] = e;
            }
            out.push(v);
        }
        for k in 0..self.copies.len() {
            for r in &self.logical_basis(k)?.reps {
                out.push(self.embed(k, r));
            }
        }
        Ok(out)
    }

    /// Whether `v` lies in the span of the X-checks.
    pub fn in_x_span(&self, v: &[u64]) -> bool {
        let m = self.dense_columns(&self.x_checks);
        solve_mod_n(&m, self.x_checks.len(), v, self.modulus).is_some()
    }

    /// Whether `v` lies in the span of the Z-checks.
    pub fn in_z_span(&self, v: &[u64]) -> bool {
        let m = self.dense_columns(&self.z_checks);
        solve_mod_n(&m, self.z_checks.len(), v, self.modulus).is_some()
    }

    /// Minimum weight of a nontrivial logical operator of either type, by
    /// exhaustive search. Qubit codes with at most 20 qubits only.
    pub fn brute_force_distance(&self) -> Result<usize> {
        if self.modulus != 2 || self.num_qudits > 20 {
            return precondition("brute-force distance needs a qubit code with at most 20 qubits");
        }
        let n = self.num_qudits;
        let to_mask = |c: &SparseVec| c.iter().fold(0u32, |m, &(q, _)| m | (1 << q));
        let xs: Vec<u32> = self.x_checks.iter().map(to_mask).collect();
        let zs: Vec<u32> = self.z_checks.iter().map(to_mask).collect();
        let span = |gens: &[u32]| {
            let mut basis: Vec<u32> = Vec::new();
            for &g in gens {
                let mut v = g;
                for &b in &basis {
                    v = v.min(v ^ b);
                }
                if v != 0 {
                    basis.push(v);
                    basis.sort_unstable_by(|a, b| b.cmp(a));
                }
            }
            basis
        };
        let reduce = |basis: &[u32], mut v: u32| {
            for &b in basis {
                v = v.min(v ^ b);
            }
            v
        };
        let bx = span(&xs);
        let bz = span(&zs);
        let mut best = usize::MAX;
        for v in 1u32..(1u32 << n) {
            let w = v.count_ones() as usize;
            if w >= best {
                continue;
            }
            // X-type logical: commutes with all Z-checks, not an X-stabilizer
            if zs.iter().all(|&z| (z & v).count_ones() % 2 == 0) && reduce(&bx, v) != 0 {
                best = w;
                continue;
            }
            if xs.iter().all(|&x| (x & v).count_ones() % 2 == 0) && reduce(&bz, v) != 0 {
                best = w;
            }
        }
        if best == usize::MAX {
            return precondition("code has no logical operators");
        }
        Ok(best)
    }

    pub fn to_json(&self) -> String {
        let doc = CodeJson {
            modulus: self.modulus,
            copies: self
                .copies
                .iter()
                .zip(&self.offsets)
                .map(|(c, &offset)| CopyJson {
                    complex: c.complex.name(),
                    degree: c.degree,
                    offset,
                })
                .collect(),
            num_qudits: self.num_qudits,
            condensed: self.condensed,
            x_checks: &self.x_checks,
            z_checks: &self.z_checks,
        };
        serde_json::to_string_pretty(&doc).expect("serializable")
    }
}
