//! Inhomogeneous bar cochains with trivial coefficients in `Z_M`.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{input, precondition, Error, Result};

use super::group::{Subgroup, SubgroupDoc};

/// Largest value table we build.
pub const TABLE_CAP: usize = 1 << 20;

pub(crate) fn table_len(k: usize, n: usize) -> Result<usize> {
    let mut len = 1usize;
    for _ in 0..n {
        len = len.saturating_mul(k);
    }
    if len > TABLE_CAP {
        return Err(Error::Budget(format!(
            "a degree-{n} table on a group of order {k} has {len} entries, the cap is {TABLE_CAP}"
        )));
    }
    Ok(len)
}

/// Writes the base-`k` digits of `idx` into `out` (first argument most significant).
pub(crate) fn decode(mut idx: usize, k: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = idx % k;
        idx /= k;
    }
}

pub(crate) fn encode(t: impl IntoIterator<Item = usize>, k: usize) -> usize {
    t.into_iter().fold(0, |acc, x| acc * k + x)
}

/// Columns and signs of the coboundary row at the (n+1)-tuple `t`:
/// `(df)(g1..g_{n+1}) = f(g2..) + Σ (−1)^i f(.., g_i + g_{i+1}, ..) + (−1)^{n+1} f(g1..g_n)`.
pub(crate) fn coboundary_terms(dom: &Subgroup, t: &[usize]) -> Vec<(usize, i64)> {
    let k = dom.len();
    let m = t.len();
    let mut out = Vec::with_capacity(m + 1);
    out.push((encode(t[1..].iter().copied(), k), 1));
    for i in 1..m {
        let merged = dom.add_idx(t[i - 1], t[i]);
        let col = encode(
            t[..i - 1].iter().copied().chain(std::iter::once(merged)).chain(t[i + 1..].iter().copied()),
            k,
        );
        out.push((col, if i % 2 == 0 { 1 } else { -1 }));
    }
    out.push((encode(t[..m - 1].iter().copied(), k), if m.is_multiple_of(2) { 1 } else { -1 }));
    out
}

/// A `Z_modulus`-valued function on `domain^degree`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupCochain {
    domain: Arc<Subgroup>,
    degree: usize,
    modulus: u64,
    values: Vec<u64>,
}

impl GroupCochain {
    pub fn zero(domain: Arc<Subgroup>, degree: usize, modulus: u64) -> Result<GroupCochain> {
        if modulus < 2 {
            return input("cochain modulus must be at least 2");
        }
        let len = table_len(domain.len(), degree)?;
        Ok(GroupCochain {
            domain,
            degree,
            modulus,
            values: vec![0; len],
        })
    }

    pub fn from_values(domain: Arc<Subgroup>, degree: usize, modulus: u64, values: Vec<i64>) -> Result<GroupCochain> {
        let mut c = GroupCochain::zero(domain, degree, modulus)?;
        if values.len() != c.values.len() {
            return input(format!("expected {} table entries, got {}", c.values.len(), values.len()));
        }
        c.values = values.iter().map(|&v| v.rem_euclid(modulus as i64) as u64).collect();
        Ok(c)
    }

    /// Tabulates `f` on every tuple of elements.
    pub fn from_fn(
        domain: Arc<Subgroup>,
        degree: usize,
        modulus: u64,
        f: impl Fn(&[&[u64]]) -> i64 + Sync,
    ) -> Result<GroupCochain> {
        let mut c = GroupCochain::zero(domain, degree, modulus)?;
        let dom = c.domain.clone();
        let k = dom.len();
        c.values.par_iter_mut().enumerate().for_each(|(idx, v)| {
            let mut t = vec![0; degree];
            decode(idx, k, &mut t);
            let args: Vec<&[u64]> = t.iter().map(|&i| dom.elements()[i].as_slice()).collect();
            *v = f(&args).rem_euclid(modulus as i64) as u64;
        });
        Ok(c)
    }

    /// The 1-cochain `g ↦ g_i` with the residue of coordinate `i` taken in
    /// `0..N_i`. For `modulus = N_i` this is the coordinate cocycle `a_i`;
    /// for a larger modulus it is the lift `[a_i]`.
    pub fn coordinate(domain: Arc<Subgroup>, i: usize, modulus: u64) -> Result<GroupCochain> {
        if i >= domain.group().orders().len() {
            return input(format!("coordinate {i} out of range"));
        }
        GroupCochain::from_fn(domain, 1, modulus, |g| g[0][i] as i64)
    }

    /// Cup product of coordinate cochains `coeff · x_{c0} ∪ x_{c1} ∪ …`.
    pub fn coordinate_cup(domain: Arc<Subgroup>, coords: &[usize], coeff: i64, modulus: u64) -> Result<GroupCochain> {
        if let Some(&c) = coords.iter().find(|&&c| c >= domain.group().orders().len()) {
            return input(format!("coordinate {c} out of range"));
        }
        GroupCochain::from_fn(domain, coords.len(), modulus, |g| {
            coords.iter().zip(g).fold(coeff, |acc, (&c, x)| acc * x[c] as i64)
        })
    }

    /// `Σ coeff · Π_slot Π_{c in slot} x_c(g_slot)`: each term multiplies, per
    /// argument, the coordinate lifts listed for that slot. A slot with two
    /// coordinates is their `∪_1` product on 1-cochains.
    pub fn slot_polynomial(
        domain: Arc<Subgroup>,
        degree: usize,
        modulus: u64,
        terms: &[(i64, Vec<Vec<usize>>)],
    ) -> Result<GroupCochain> {
        let r = domain.group().orders().len();
        for (_, slots) in terms {
            if slots.len() != degree {
                return input(format!("term with {} slots in a degree-{degree} cochain", slots.len()));
            }
            if let Some(&c) = slots.iter().flatten().find(|&&c| c >= r) {
                return input(format!("coordinate {c} out of range"));
            }
        }
        GroupCochain::from_fn(domain, degree, modulus, |g| {
            let m = modulus as i128;
            let total = terms.iter().fold(0i128, |acc, (coeff, slots)| {
                let t = slots.iter().zip(g).fold(*coeff as i128, |t, (slot, x)| {
                    slot.iter().fold(t, |t, &c| t * x[c] as i128 % m)
                });
                (acc + t) % m
            });
            total as i64
        })
    }

    pub fn domain(&self) -> &Arc<Subgroup> {
        &self.domain
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    /// Value on a tuple of elements of the domain.
    pub fn eval(&self, args: &[Vec<u64>]) -> Result<u64> {
        if args.len() != self.degree {
            return input(format!("a degree-{} cochain takes {} arguments", self.degree, self.degree));
        }
        let mut idx = Vec::with_capacity(args.len());
        for g in args {
            idx.push(self.domain.index_of(g).ok_or_else(|| Error::Input(format!("{g:?} is not in the domain")))?);
        }
        Ok(self.values[encode(idx, self.domain.len())])
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    /// Smallest `D` with every value a multiple of `modulus / D`, i.e. the
    /// denominator of the cochain read as a `U(1)` phase `value / modulus`.
    pub fn denominator(&self) -> u64 {
        let g = self.values.iter().fold(self.modulus, |g, &v| num_integer::gcd(g, v));
        self.modulus / g
    }

    fn same_shape(&self, other: &GroupCochain) -> Result<()> {
        if self.domain != other.domain || self.degree != other.degree || self.modulus != other.modulus {
            return input("cochains live on different domains, degrees or moduli");
        }
        Ok(())
    }

    pub fn add(&self, other: &GroupCochain) -> Result<GroupCochain> {
        self.same_shape(other)?;
        let m = self.modulus;
        Ok(GroupCochain {
            values: self.values.iter().zip(&other.values).map(|(a, b)| (a + b) % m).collect(),
            ..self.clone()
        })
    }

    pub fn sub(&self, other: &GroupCochain) -> Result<GroupCochain> {
        self.same_shape(other)?;
        let m = self.modulus;
        Ok(GroupCochain {
            values: self.values.iter().zip(&other.values).map(|(a, b)| (a + m - b) % m).collect(),
            ..self.clone()
        })
    }

    pub fn scale(&self, c: i64) -> GroupCochain {
        let m = self.modulus as i128;
        GroupCochain {
            values: self.values.iter().map(|&v| (v as i128 * c as i128).rem_euclid(m) as u64).collect(),
            ..self.clone()
        }
    }

    /// Reads the values as phases `v / M` and re-expresses them over `Z_target`.
    pub fn rescale(&self, target: u64) -> Result<GroupCochain> {
        if target == 0 || !target.is_multiple_of(self.modulus) {
            return precondition(format!("{} does not divide the target modulus {target}", self.modulus));
        }
        let s = target / self.modulus;
        Ok(GroupCochain {
            modulus: target,
            values: self.values.iter().map(|&v| v * s).collect(),
            ..self.clone()
        })
    }

    /// Reduces the values mod a divisor of the modulus.
    pub fn reduce(&self, m: u64) -> Result<GroupCochain> {
        if m < 2 || !self.modulus.is_multiple_of(m) {
            return precondition(format!("{m} does not divide {}", self.modulus));
        }
        Ok(GroupCochain {
            modulus: m,
            values: self.values.iter().map(|&v| v % m).collect(),
            ..self.clone()
        })
    }

    /// Bar coboundary; the result has degree one higher.
    pub fn coboundary(&self) -> Result<GroupCochain> {
        let dom = self.domain.clone();
        let k = dom.len();
        let n1 = self.degree + 1;
        let mut out = GroupCochain::zero(dom.clone(), n1, self.modulus)?;
        let m = self.modulus as i128;
        out.values.par_iter_mut().enumerate().for_each(|(idx, v)| {
            let mut t = vec![0; n1];
            decode(idx, k, &mut t);
            let s: i128 = coboundary_terms(&dom, &t)
                .into_iter()
                .map(|(col, sign)| sign as i128 * self.values[col] as i128)
                .sum();
            *v = s.rem_euclid(m) as u64;
        });
        Ok(out)
    }

    pub fn is_cocycle(&self) -> Result<bool> {
        Ok(self.coboundary()?.is_zero())
    }

    /// Front/back-face cup product `(f ∪ g)(g1..g_{p+q}) = f(g1..gp) g(g_{p+1}..)`
    /// over the gcd of the two moduli.
    pub fn cup(&self, other: &GroupCochain) -> Result<GroupCochain> {
        if self.domain != other.domain {
            return input("cup product of cochains on different domains");
        }
        let m = num_integer::gcd(self.modulus, other.modulus);
        if m == 1 {
            return input(format!("moduli {} and {} are coprime", self.modulus, other.modulus));
        }
        let right = other.values.len();
        let mut out = GroupCochain::zero(self.domain.clone(), self.degree + other.degree, m)?;
        out.values.par_iter_mut().enumerate().for_each(|(idx, v)| {
            *v = (self.values[idx / right] % m) * (other.values[idx % right] % m) % m;
        });
        Ok(out)
    }

    /// Restriction to a subgroup of the domain.
    pub fn restrict(&self, sub: &Arc<Subgroup>) -> Result<GroupCochain> {
        if !sub.is_subgroup_of(&self.domain) {
            return precondition("restriction target is not a subgroup of the cochain's domain");
        }
        let map: Vec<usize> = sub.elements().iter().map(|g| self.domain.index_of(g).expect("subgroup")).collect();
        let big = self.domain.len();
        let k = sub.len();
        let n = self.degree;
        let mut out = GroupCochain::zero(sub.clone(), n, self.modulus)?;
        out.values.par_iter_mut().enumerate().for_each(|(idx, v)| {
            let mut t = vec![0; n];
            decode(idx, k, &mut t);
            *v = self.values[encode(t.iter().map(|&i| map[i]), big)];
        });
        Ok(out)
    }

    pub fn to_doc(&self) -> GroupCochainDoc {
        GroupCochainDoc {
            domain: self.domain.to_doc(),
            degree: self.degree,
            modulus: self.modulus,
            values: self.values.iter().map(|&v| v as i64).collect(),
        }
    }

    pub fn from_doc(doc: &GroupCochainDoc) -> Result<GroupCochain> {
        GroupCochain::from_values(Arc::new(doc.domain.build()?), doc.degree, doc.modulus, doc.values.clone())
    }
}

/// JSON form of a cochain table; tuples are ordered lexicographically with
/// elements sorted as residue tuples.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupCochainDoc {
    pub domain: SubgroupDoc,
    pub degree: usize,
    pub modulus: u64,
    pub values: Vec<i64>,
}
