//! Smith normal form over the integers.
//!
//! Runs on `i64` while every entry stays below 2^31 in magnitude, so that one
//! multiply-subtract cannot overflow, and reruns on `BigInt` otherwise.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

type Mat<T> = Vec<Vec<T>>;

/// `left · A · right = diag(factors, 0, …)` with unimodular `left`, `right`.
#[derive(Clone, Debug)]
pub struct SmithDecomposition {
    pub rows: usize,
    pub cols: usize,
    /// Nonzero invariant factors `d_1 | d_2 | …`, all positive.
    pub factors: Vec<i64>,
    pub transforms: Option<Transforms>,
}

#[derive(Clone, Debug)]
pub struct Transforms {
    pub left: Mat<i64>,
    pub left_inv: Mat<i64>,
    pub right: Mat<i64>,
    pub right_inv: Mat<i64>,
}

impl SmithDecomposition {
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// Factors greater than one.
    pub fn torsion(&self) -> Vec<i64> {
        self.factors.iter().copied().filter(|&d| d > 1).collect()
    }
}

/// Invariant factors only.
pub fn smith_normal_form(a: &[Vec<i64>]) -> Result<SmithDecomposition> {
    decompose(a, false)
}

/// Invariant factors together with the unimodular transforms and their inverses.
pub fn smith_with_transforms(a: &[Vec<i64>]) -> Result<SmithDecomposition> {
    decompose(a, true)
}

fn decompose(a: &[Vec<i64>], transforms: bool) -> Result<SmithDecomposition> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    if a.iter().any(|r| r.len() != cols) {
        return Err(Error::Input("ragged matrix".into()));
    }
    const BOUND: i64 = 1 << 31;
    if a.iter().flatten().all(|v| v.abs() < BOUND) {
        let m: Mat<i64> = a.to_vec();
        if let Some(out) = run(m, transforms, &|v: &i64| v.abs() < BOUND) {
            return Ok(finish(rows, cols, out, Some).expect("i64 path"));
        }
    }
    let m: Mat<BigInt> = a
        .iter()
        .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
        .collect();
    let out = run(m, transforms, &|_: &BigInt| true).expect("bigint path never aborts");
    finish(rows, cols, out, |v: BigInt| v.to_i64())
        .ok_or_else(|| Error::Overflow("invariant factor or transform entry exceeds i64".into()))
}

struct Raw<T> {
    diag: Vec<T>,
    tr: Option<[Mat<T>; 4]>,
}

fn finish<T>(
    rows: usize,
    cols: usize,
    raw: Raw<T>,
    conv: impl Fn(T) -> Option<i64>,
) -> Option<SmithDecomposition> {
    let factors = raw
        .diag
        .into_iter()
        .map(&conv)
        .collect::<Option<Vec<i64>>>()?;
    let transforms = match raw.tr {
        None => None,
        Some([l, li, r, ri]) => {
            let c = |m: Mat<T>| -> Option<Mat<i64>> {
                m.into_iter()
                    .map(|row| row.into_iter().map(&conv).collect())
                    .collect()
            };
            Some(Transforms {
                left: c(l)?,
                left_inv: c(li)?,
                right: c(r)?,
                right_inv: c(ri)?,
            })
        }
    };
    Some(SmithDecomposition {
        rows,
        cols,
        factors,
        transforms,
    })
}

fn identity<T: Zero + One + Clone>(n: usize) -> Mat<T> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect())
        .collect()
}

struct State<'g, T> {
    a: Mat<T>,
    tr: Option<[Mat<T>; 4]>,
    guard: &'g dyn Fn(&T) -> bool,
}

impl<T: Integer + Signed + Clone> State<'_, T> {
    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.a.swap(i, j);
        if let Some([l, li, _, _]) = &mut self.tr {
            l.swap(i, j);
            for row in li.iter_mut() {
                row.swap(i, j);
            }
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for row in self.a.iter_mut() {
            row.swap(i, j);
        }
        if let Some([_, _, r, ri]) = &mut self.tr {
            for row in r.iter_mut() {
                row.swap(i, j);
            }
            ri.swap(i, j);
        }
    }

    /// row_i -= q · row_j
    fn row_op(&mut self, i: usize, j: usize, q: &T) -> bool {
        let (ri, rj) = two_rows(&mut self.a, i, j);
        for (x, y) in ri.iter_mut().zip(rj.iter()) {
            if !y.is_zero() {
                *x = x.clone() - q.clone() * y.clone();
                if !(self.guard)(x) {
                    return false;
                }
            }
        }
        if let Some([l, li, _, _]) = &mut self.tr {
            let (li_, lj) = two_rows(l, i, j);
            for (x, y) in li_.iter_mut().zip(lj.iter()) {
                if !y.is_zero() {
                    *x = x.clone() - q.clone() * y.clone();
                    if !(self.guard)(x) {
                        return false;
                    }
                }
            }
            for row in li.iter_mut() {
                if !row[i].is_zero() {
                    let v = row[j].clone() + q.clone() * row[i].clone();
                    if !(self.guard)(&v) {
                        return false;
                    }
                    row[j] = v;
                }
            }
        }
        true
    }

    /// col_i -= q · col_j
    fn col_op(&mut self, i: usize, j: usize, q: &T) -> bool {
        for row in self.a.iter_mut() {
            if !row[j].is_zero() {
                let v = row[i].clone() - q.clone() * row[j].clone();
                if !(self.guard)(&v) {
                    return false;
                }
                row[i] = v;
            }
        }
        if let Some([_, _, r, ri]) = &mut self.tr {
            for row in r.iter_mut() {
                if !row[j].is_zero() {
                    let v = row[i].clone() - q.clone() * row[j].clone();
                    if !(self.guard)(&v) {
                        return false;
                    }
                    row[i] = v;
                }
            }
            let (rj, rii) = two_rows(ri, j, i);
            for (x, y) in rj.iter_mut().zip(rii.iter()) {
                if !y.is_zero() {
                    *x = x.clone() + q.clone() * y.clone();
                    if !(self.guard)(x) {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn negate_row(&mut self, i: usize) {
        for x in self.a[i].iter_mut() {
            *x = -x.clone();
        }
        if let Some([l, li, _, _]) = &mut self.tr {
            for x in l[i].iter_mut() {
                *x = -x.clone();
            }
            for row in li.iter_mut() {
                row[i] = -row[i].clone();
            }
        }
    }
}

fn two_rows<T>(m: &mut [Vec<T>], i: usize, j: usize) -> (&mut Vec<T>, &Vec<T>) {
    assert_ne!(i, j);
    if i < j {
        let (a, b) = m.split_at_mut(j);
        (&mut a[i], &b[0])
    } else {
        let (a, b) = m.split_at_mut(i);
        (&mut b[0], &a[j])
    }
}

fn run<T: Integer + Signed + Clone>(
    a: Mat<T>,
    transforms: bool,
    guard: &dyn Fn(&T) -> bool,
) -> Option<Raw<T>> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let tr = if transforms {
        Some([identity(rows), identity(rows), identity(cols), identity(cols)])
    } else {
        None
    };
    let mut s = State { a, tr, guard };
    let mut diag = Vec::new();
    for t in 0..rows.min(cols) {
        // smallest nonzero entry of the remaining block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                let v = &s.a[i][j];
                if !v.is_zero() && best.is_none_or(|(bi, bj)| v.abs() < s.a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        s.swap_rows(t, pi);
        s.swap_cols(t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if !s.a[i][t].is_zero() {
                    let q = s.a[i][t].div_floor(&s.a[t][t]);
                    if !s.row_op(i, t, &q) {
                        return None;
                    }
                    if !s.a[i][t].is_zero() {
                        dirty = true;
                    }
                }
            }
            for j in t + 1..cols {
                if !s.a[t][j].is_zero() {
                    let q = s.a[t][j].div_floor(&s.a[t][t]);
                    if !s.col_op(j, t, &q) {
                        return None;
                    }
                    if !s.a[t][j].is_zero() {
                        dirty = true;
                    }
                }
            }
            if dirty {
                // move the smallest remainder in row/column t to the pivot
                let mut best = (t, t);
                for i in t + 1..rows {
                    let v = &s.a[i][t];
                    if !v.is_zero() && v.abs() < s.a[best.0][best.1].abs() {
                        best = (i, t);
                    }
                }
                for j in t + 1..cols {
                    let v = &s.a[t][j];
                    if !v.is_zero() && v.abs() < s.a[best.0][best.1].abs() {
                        best = (t, j);
                    }
                }
                s.swap_rows(t, best.0);
                s.swap_cols(t, best.1);
                continue;
            }
            // divisibility: d_t must divide the whole remaining block
            let p = s.a[t][t].clone();
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !s.a[i][j].is_multiple_of(&p)));
            match bad {
                Some(i) => {
                    let minus_one = -T::one();
                    if !s.row_op(t, i, &minus_one) {
                        return None;
                    }
                }
                None => break,
            }
        }
        if s.a[t][t].is_negative() {
            s.negate_row(t);
        }
        diag.push(s.a[t][t].clone());
    }
    Some(Raw { diag, tr: s.tr })
}

/// Dense integer matrix product.
pub fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            let mut out = vec![0i64; n];
            for (k, &x) in row.iter().enumerate() {
                if x != 0 {
                    for (o, &y) in out.iter_mut().zip(&b[k]) {
                        *o += x * y;
                    }
                }
            }
            out
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_entry() {
        assert_eq!(smith_normal_form(&[vec![2]]).unwrap().factors, vec![2]);
    }

    #[test]
    fn divisibility_chain() {
        let a = vec![vec![2, 0], vec![0, 3]];
        assert_eq!(smith_normal_form(&a).unwrap().factors, vec![1, 6]);
    }

    #[test]
    fn transforms_reconstruct() {
        let a = vec![vec![4, 6, 2], vec![2, 8, 10], vec![6, 2, 0]];
        let s = smith_with_transforms(&a).unwrap();
        let t = s.transforms.as_ref().unwrap();
        let d = mat_mul(&mat_mul(&t.left, &a), &t.right);
        for (i, row) in d.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                let expect = if i == j && i < s.factors.len() { s.factors[i] } else { 0 };
                assert_eq!(v, expect);
            }
        }
        let id = mat_mul(&t.left, &t.left_inv);
        assert!(id.iter().enumerate().all(|(i, r)| r.iter().enumerate().all(|(j, &v)| v == (i == j) as i64)));
        let id = mat_mul(&t.right_inv, &t.right);
        assert!(id.iter().enumerate().all(|(i, r)| r.iter().enumerate().all(|(j, &v)| v == (i == j) as i64)));
    }

    #[test]
    fn big_entries_fall_back() {
        let a = vec![vec![1 << 40, 0], vec![0, 1 << 20]];
        let s = smith_normal_form(&a).unwrap();
        assert_eq!(s.factors, vec![1 << 20, 1 << 40]);
    }
}
