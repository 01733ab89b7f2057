//! Homology and cohomology: invariant factors, cocycle bases, coboundary
//! membership, and cup-product pairings.

pub mod modular;
pub mod smith;

use std::sync::Arc;

use serde::Serialize;

use crate::cochain::{reduce, Cochain};
use crate::complex::CellComplex;
use crate::error::{input, Error, Result};
use modular::{is_prime, nullspace_mod_p, solve_mod_n, Echelon};
pub use smith::{smith_normal_form, smith_with_transforms, SmithDecomposition};

/// Largest dense matrix (entries) the direct algorithms will build.
const DENSE_CAP: usize = 40_000_000;

/// Integral homology in one degree: free rank and torsion coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomologyGroup {
    pub rank: usize,
    pub torsion: Vec<i64>,
}

impl std::fmt::Display for HomologyGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for t in &self.torsion {
            parts.push(format!("Z_{t}"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

fn check_dense(rows: usize, cols: usize) -> Result<()> {
    if rows.saturating_mul(cols) > DENSE_CAP {
        return Err(Error::Budget(format!(
            "dense {rows}x{cols} matrix exceeds the {DENSE_CAP}-entry cap"
        )));
    }
    Ok(())
}

/// Integral homology `H_k(C; Z)` for every degree.
pub fn integral_homology(c: &CellComplex) -> Result<Vec<HomologyGroup>> {
    let d = c.dim();
    let mut snf: Vec<Option<SmithDecomposition>> = Vec::with_capacity(d + 2);
    snf.push(None);
    for k in 1..=d {
        check_dense(c.num_cells(k - 1), c.num_cells(k))?;
        snf.push(Some(smith_normal_form(&c.boundary_matrix(k))?));
    }
    snf.push(None);
    Ok((0..=d)
        .map(|k| {
            let rk = snf[k].as_ref().map_or(0, |s| s.rank());
            let rk1 = snf[k + 1].as_ref().map_or(0, |s| s.rank());
            HomologyGroup {
                rank: c.num_cells(k) - rk - rk1,
                torsion: snf[k + 1].as_ref().map_or(Vec::new(), |s| s.torsion()),
            }
        })
        .collect())
}

/// True when every integral homology group is free. Products of torsion-free
/// factors are torsion-free.
pub fn is_torsion_free(c: &CellComplex) -> Result<bool> {
    if let Some(p) = c.product_info() {
        return Ok(is_torsion_free(&p.left)? && is_torsion_free(&p.right)?);
    }
    Ok(integral_homology(c)?.iter().all(|h| h.torsion.is_empty()))
}

/// Coboundary matrix `δ_k : C^k → C^{k+1}` as rows over `(k+1)`-cells, reduced mod `n`.
fn coboundary_rows(c: &CellComplex, k: usize, n: u64) -> Vec<Vec<u64>> {
    let cols = c.num_cells(k);
    (0..c.num_cells(k + 1))
        .map(|i| {
            let mut row = vec![0u64; cols];
            for &(f, s) in c.faces(k + 1, i) {
                row[f] = reduce(row[f] as i64 + s, n) as u64;
            }
            row
        })
        .collect()
}

/// Mod-p Betti numbers for every degree.
pub fn betti_numbers(c: &CellComplex, p: u64) -> Result<Vec<usize>> {
    if !is_prime(p) {
        return input(format!("Betti numbers need a prime modulus, got {p}"));
    }
    let d = c.dim();
    let mut ranks = vec![0usize; d + 2];
    for k in 1..=d {
        check_dense(c.num_cells(k), c.num_cells(k - 1))?;
        let mut m = coboundary_rows(c, k - 1, p);
        ranks[k] = modular::rref_mod_p(&mut m, p).len();
    }
    Ok((0..=d).map(|k| c.num_cells(k) - ranks[k] - ranks[k + 1]).collect())
}

/// Representative cocycles of `H^q(C; Z_N)`.
#[derive(Clone, Debug)]
pub struct CohomologyBasis {
    pub degree: usize,
    pub modulus: u64,
    pub reps: Vec<Cochain>,
    /// Additive order of each representative's class.
    pub orders: Vec<u64>,
}

impl CohomologyBasis {
    pub fn rank(&self) -> usize {
        self.reps.len()
    }

    /// `|H^q(C; Z_N)|`.
    pub fn order(&self) -> u128 {
        self.orders.iter().map(|&o| o as u128).product()
    }
}

/// Cohomology basis of degree `q` with coefficients in Z_N.
///
/// Prime N uses elimination mod N, taking kernel vectors in free-column order
/// and keeping those independent of the coboundaries and earlier picks.
/// Composite N uses Smith normal forms with transforms. Product complexes
/// with a prime modulus or torsion-free factors use cross products of the
/// factor bases pulled back along the projections.
pub fn cohomology_basis(c: &Arc<CellComplex>, q: usize, n: u64) -> Result<CohomologyBasis> {
    if n < 2 {
        return input("cohomology modulus must be at least 2");
    }
    if q > c.dim() {
        return Ok(CohomologyBasis {
            degree: q,
            modulus: n,
            reps: Vec::new(),
            orders: Vec::new(),
        });
    }
    if let Some(p) = c.product_info() {
        if is_prime(n) || (is_torsion_free(&p.left)? && is_torsion_free(&p.right)?) {
            return kunneth_basis(c, q, n);
        }
    }
    if is_prime(n) {
        prime_basis(c, q, n)
    } else {
        composite_basis(c, q, n)
    }
}

fn prime_basis(c: &Arc<CellComplex>, q: usize, p: u64) -> Result<CohomologyBasis> {
    let nq = c.num_cells(q);
    check_dense(c.num_cells(q + 1), nq)?;
    let kernel = if q < c.dim() {
        nullspace_mod_p(&coboundary_rows(c, q, p), nq, p)
    } else {
        (0..nq)
            .map(|i| {
                let mut v = vec![0u64; nq];
                v[i] = 1;
                v
            })
            .collect()
    };
    let mut ech = Echelon::new(p);
    if q > 0 {
        check_dense(c.num_cells(q - 1), nq)?;
        for cof in c.cofaces(q - 1) {
            let mut v = vec![0u64; nq];
            for (t, s) in cof {
                v[t] = reduce(v[t] as i64 + s, p) as u64;
            }
            ech.insert(&v);
        }
    }
    let target = kernel.len() - ech.rank();
    let mut reps = Vec::new();
    for v in kernel {
        if reps.len() == target {
            break;
        }
        if ech.insert(&v) {
            reps.push(Cochain::from_values(
                c,
                q,
                p,
                v.iter().map(|&x| x as i64).collect(),
            )?);
        }
    }
    Ok(CohomologyBasis {
        degree: q,
        modulus: p,
        orders: vec![p; reps.len()],
        reps,
    })
}

/// Integer coboundary matrix δ_k as i64 rows.
fn coboundary_matrix(c: &CellComplex, k: usize) -> Vec<Vec<i64>> {
    let cols = c.num_cells(k);
    (0..c.num_cells(k + 1))
        .map(|i| {
            let mut row = vec![0i64; cols];
            for &(f, s) in c.faces(k + 1, i) {
                row[f] += s;
            }
            row
        })
        .collect()
}

fn gcd(a: i64, b: i64) -> i64 {
    num_integer::gcd(a, b)
}

fn composite_basis(c: &Arc<CellComplex>, q: usize, n: u64) -> Result<CohomologyBasis> {
    let nq = c.num_cells(q);
    let ni = n as i64;
    check_dense(nq, nq)?;
    // ker δ_q mod N in coordinates y = V^{-1} x, where U δ_q V = D.
    let (factors, v, v_inv) = if q < c.dim() {
        check_dense(c.num_cells(q + 1), nq)?;
        let s = smith_with_transforms(&coboundary_matrix(c, q))?;
        let t = s.transforms.expect("requested");
        (s.factors, t.right, t.right_inv)
    } else {
        let id: Vec<Vec<i64>> = (0..nq)
            .map(|i| (0..nq).map(|j| (i == j) as i64).collect())
            .collect();
        (Vec::new(), id.clone(), id)
    };
    let r = factors.len();
    let mut reps = Vec::new();
    let mut orders = Vec::new();
    let column = |j: usize, scale: i64| -> Vec<i64> { (0..nq).map(|i| v[i][j] * scale).collect() };
    // torsion part: d_i y_i ≡ 0 needs y_i a multiple of N / gcd(d_i, N)
    for (i, &d) in factors.iter().enumerate() {
        let g = gcd(d, ni);
        if g > 1 {
            reps.push(Cochain::from_values(c, q, n, column(i, ni / g))?);
            orders.push(g as u64);
        }
    }
    // free part modulo the image of δ_{q-1}, which lies in coordinates ≥ r
    let free = nq - r;
    if free > 0 {
        let image: Vec<Vec<i64>> = if q > 0 {
            let d_prev = coboundary_matrix(c, q - 1);
            // rows r.. of V^{-1} δ_{q-1}
            (r..nq)
                .map(|i| {
                    let cols = c.num_cells(q - 1);
                    let mut row = vec![0i64; cols];
                    for (k, &x) in v_inv[i].iter().enumerate() {
                        if x != 0 {
                            for (o, &y) in row.iter_mut().zip(&d_prev[k]) {
                                *o += x * y;
                            }
                        }
                    }
                    row
                })
                .collect()
        } else {
            vec![Vec::new(); free]
        };
        let cols = image.first().map_or(0, |r| r.len());
        let (e_factors, u_inv) = if cols > 0 {
            let s = smith_with_transforms(&image)?;
            let t = s.transforms.expect("requested");
            (s.factors, t.left_inv)
        } else {
            let id = (0..free)
                .map(|i| (0..free).map(|j| (i == j) as i64).collect())
                .collect();
            (Vec::new(), id)
        };
        for j in 0..free {
            let e = e_factors.get(j).copied().unwrap_or(0);
            let order = if e == 0 { ni } else { gcd(e, ni) };
            if order == 1 {
                continue;
            }
            // y = (0, …, 0, U'^{-1} e_j), x = V y
            let mut x = vec![0i64; nq];
            for t in 0..free {
                let coef = u_inv[t][j];
                if coef != 0 {
                    for (xi, vrow) in x.iter_mut().zip(&v) {
                        *xi += vrow[r + t] * coef;
                    }
                }
            }
            reps.push(Cochain::from_values(c, q, n, x)?);
            orders.push(order as u64);
        }
    }
    Ok(CohomologyBasis {
        degree: q,
        modulus: n,
        reps,
        orders,
    })
}

/// Pullback along the projection onto one factor of a product complex.
pub fn project_pullback(product: &Arc<CellComplex>, f: &Cochain, left: bool) -> Result<Cochain> {
    let info = product
        .product_info()
        .ok_or_else(|| Error::Input("complex is not a product".into()))?;
    let pairs = &info.pairs;
    if left {
        f.pullback(product, &|v| pairs[v as usize].0)
    } else {
        f.pullback(product, &|v| pairs[v as usize].1)
    }
}

/// Cross product `π₁*α ∪ π₂*β`.
pub fn cross_product(product: &Arc<CellComplex>, a: &Cochain, b: &Cochain) -> Result<Cochain> {
    let pa = project_pullback(product, a, true)?;
    let pb = project_pullback(product, b, false)?;
    pa.cup(&pb)
}

fn kunneth_basis(c: &Arc<CellComplex>, q: usize, n: u64) -> Result<CohomologyBasis> {
    let info = c.product_info().expect("product");
    let mut reps = Vec::new();
    let mut orders = Vec::new();
    for i in 0..=q {
        let ba = cohomology_basis(&info.left, i, n)?;
        if ba.rank() == 0 {
            continue;
        }
        let bb = cohomology_basis(&info.right, q - i, n)?;
        for (x, &ox) in ba.reps.iter().zip(&ba.orders) {
            for (y, &oy) in bb.reps.iter().zip(&bb.orders) {
                reps.push(cross_product(c, x, y)?);
                orders.push(num_integer::gcd(ox, oy));
            }
        }
    }
    Ok(CohomologyBasis {
        degree: q,
        modulus: n,
        reps,
        orders,
    })
}

/// Decides whether a cocycle is a coboundary; on success returns `g` with `dg = f`.
pub fn is_coboundary(f: &Cochain) -> Result<Option<Cochain>> {
    let n = f.modulus();
    if n < 2 {
        return input("is_coboundary needs a residue cochain");
    }
    if !f.is_cocycle() {
        return input("is_coboundary needs a cocycle");
    }
    let c = f.complex();
    let q = f.degree();
    if q == 0 {
        return Ok(if f.is_zero() {
            Some(Cochain::zero(c, 0, n))
        } else {
            None
        });
    }
    let cols = c.num_cells(q - 1);
    check_dense(c.num_cells(q), cols)?;
    let a = coboundary_rows(c, q - 1, n);
    let b: Vec<u64> = f.values().iter().map(|&v| v as u64).collect();
    Ok(match solve_mod_n(&a, cols, &b, n) {
        Some(x) => Some(Cochain::from_values(
            c,
            q - 1,
            n,
            x.into_iter().map(|v| v as i64).collect(),
        )?),
        None => None,
    })
}

/// Dense tensor of pairings, row-major over the basis indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairingTensor {
    pub dims: Vec<usize>,
    pub values: Vec<i64>,
}

impl PairingTensor {
    pub fn get(&self, idx: &[usize]) -> i64 {
        let mut flat = 0;
        for (&i, &d) in idx.iter().zip(&self.dims) {
            flat = flat * d + i;
        }
        self.values[flat]
    }
}

/// `∫ α_{i₁} ∪ … ∪ α_{i_k} ∪ extra` over all representative tuples.
pub fn pairing_matrix(bases: &[&CohomologyBasis], extra: Option<&Cochain>) -> Result<PairingTensor> {
    let Some(first) = bases.first().and_then(|b| b.reps.first()) else {
        return Ok(PairingTensor {
            dims: bases.iter().map(|b| b.rank()).collect(),
            values: Vec::new(),
        });
    };
    let c = first.complex().clone();
    let total: usize =
        bases.iter().map(|b| b.degree).sum::<usize>() + extra.map_or(0, |e| e.degree());
    if total != c.dim() {
        return input(format!(
            "pairing degrees sum to {total} but the complex has dimension {}",
            c.dim()
        ));
    }
    let dims: Vec<usize> = bases.iter().map(|b| b.rank()).collect();
    let count: usize = dims.iter().product();
    let mut values = Vec::with_capacity(count);
    let mut idx = vec![0usize; dims.len()];
    for _ in 0..count {
        let mut acc = bases[0].reps[idx[0]].clone();
        for (b, &i) in bases.iter().zip(&idx).skip(1) {
            acc = acc.cup(&b.reps[i])?;
        }
        if let Some(e) = extra {
            acc = acc.cup(e)?;
        }
        values.push(acc.integrate()?);
        for t in (0..idx.len()).rev() {
            idx[t] += 1;
            if idx[t] < dims[t] {
                break;
            }
            idx[t] = 0;
        }
    }
    Ok(PairingTensor { dims, values })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle() -> Arc<CellComplex> {
        Arc::new(CellComplex::from_facets("c", &[vec![0, 1], vec![0, 2], vec![1, 2]]).unwrap())
    }

    #[test]
    fn circle_homology() {
        let h = integral_homology(&circle()).unwrap();
        assert_eq!(h[0].rank, 1);
        assert_eq!(h[1].rank, 1);
    }

    #[test]
    fn torus_h1_composite() {
        let t = Arc::new(CellComplex::torus_lattice(2, 3).unwrap());
        let b = cohomology_basis(&t, 1, 4).unwrap();
        assert_eq!(b.orders, vec![4, 4]);
        for r in &b.reps {
            assert!(r.is_cocycle());
            assert!(is_coboundary(r).unwrap().is_none());
        }
    }

    #[test]
    fn kunneth_matches_direct() {
        let s = circle();
        let t = Arc::new(CellComplex::product(&s, &s).unwrap());
        let b = cohomology_basis(&t, 1, 2).unwrap();
        assert_eq!(b.rank(), 2);
        let direct = prime_basis(&t, 1, 2).unwrap();
        assert_eq!(direct.rank(), 2);
        let b2 = cohomology_basis(&t, 2, 2).unwrap();
        assert_eq!(b2.rank(), 1);
        assert_eq!(b2.reps[0].integrate().unwrap(), 1);
    }
}
