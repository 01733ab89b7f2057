//! Linear algebra over Z_p (row reduction, kernels) and over Z_n for
//! composite n (solving and image sizes via prime-power elimination).

use num_integer::Integer;

pub(crate) fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let e = (a as i128).extended_gcd(&(m as i128));
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m as i128) as u64)
}

pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut k = 0;
            while n.is_multiple_of(p) {
                n /= p;
                k += 1;
            }
            out.push((p, k));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n) == vec![(n, 1)]
}

/// Reduced row echelon form over Z_p, in place. Returns pivot columns.
pub fn rref_mod_p(m: &mut Vec<Vec<u64>>, p: u64) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !m[i][c].is_multiple_of(p)) else {
            continue;
        };
        m.swap(r, pr);
        let inv = inv_mod(m[r][c], p).expect("prime modulus");
        for x in m[r].iter_mut() {
            *x = *x * inv % p;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && row[c] != 0 {
                let f = row[c];
                for (x, &y) in row.iter_mut().zip(&pivot_row) {
                    if y != 0 {
                        *x = (*x + p * p - f * y % p) % p;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    pivots
}

/// Basis of `{x : M x = 0}` over Z_p, one vector per free column, in
/// increasing free-column order.
pub fn nullspace_mod_p(m: &[Vec<u64>], cols: usize, p: u64) -> Vec<Vec<u64>> {
    let mut r: Vec<Vec<u64>> = m.iter().map(|row| row.iter().map(|&v| v % p).collect()).collect();
    let pivots = rref_mod_p(&mut r, p);
    let mut is_pivot = vec![false; cols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let mut out = Vec::new();
    for f in (0..cols).filter(|&c| !is_pivot[c]) {
        let mut x = vec![0u64; cols];
        x[f] = 1;
        for (row, &pc) in r.iter().zip(&pivots) {
            x[pc] = (p - row[f]) % p;
        }
        out.push(x);
    }
    out
}

/// Incremental echelon basis over Z_p used for independence tests.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    p: u64,
    rows: Vec<(usize, Vec<u64>)>,
}

impl Echelon {
    pub fn new(p: u64) -> Echelon {
        Echelon { p, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Basis rows, in reduced echelon form.
    pub fn rows(&self) -> impl Iterator<Item = &[u64]> {
        self.rows.iter().map(|(_, r)| r.as_slice())
    }

    /// Reduces `v` against the basis; returns the remainder.
    pub fn reduce(&self, v: &[u64]) -> Vec<u64> {
        let p = self.p;
        let mut v: Vec<u64> = v.iter().map(|&x| x % p).collect();
        for (c, row) in &self.rows {
            let f = v[*c];
            if f != 0 {
                for (x, &y) in v.iter_mut().zip(row) {
                    if y != 0 {
                        *x = (*x + p * p - f * y % p) % p;
                    }
                }
            }
        }
        v
    }

    /// Adds `v` if independent; returns whether it was.
    pub fn insert(&mut self, v: &[u64]) -> bool {
        let p = self.p;
        let mut r = self.reduce(v);
        let Some(c) = r.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = inv_mod(r[c], p).expect("prime modulus");
        for x in r.iter_mut() {
            *x = *x * inv % p;
        }
        for (_, row) in self.rows.iter_mut() {
            let f = row[c];
            if f != 0 {
                for (x, &y) in row.iter_mut().zip(&r) {
                    if y != 0 {
                        *x = (*x + p * p - f * y % p) % p;
                    }
                }
            }
        }
        self.rows.push((c, r));
        true
    }

    /// Coordinates expressing `v` in terms of inserted rows, if in the span.
    pub fn contains(&self, v: &[u64]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }
}

fn valuation(mut x: u64, p: u64) -> u32 {
    if x == 0 {
        return u32::MAX;
    }
    let mut v = 0;
    while x.is_multiple_of(p) {
        x /= p;
        v += 1;
    }
    v
}

/// Forward elimination over Z_{p^k} with pivots of least valuation.
struct PrimePowerElim {
    q: u64,
    /// (row after elimination, pivot column, pivot valuation)
    pivots: Vec<(Vec<u64>, usize, u32)>,
    /// for each original right-hand side, its transformed value on
    /// pivot rows followed by the leftover rows
    rhs_pivot: Vec<Vec<u64>>,
    rhs_rest: Vec<Vec<u64>>,
}

fn eliminate_prime_power(a: &[Vec<u64>], cols: usize, rhs: &[Vec<u64>], p: u64, k: u32) -> PrimePowerElim {
    let q = p.pow(k);
    let mut m: Vec<Vec<u64>> = a.iter().map(|r| r.iter().map(|&v| v % q).collect()).collect();
    // right-hand sides become extra columns that never hold pivots
    let nr = rhs.len();
    for (i, row) in m.iter_mut().enumerate() {
        for b in rhs {
            row.push(b[i] % q);
        }
    }
    let mut active: Vec<usize> = (0..m.len()).collect();
    let mut free_cols: Vec<bool> = vec![true; cols];
    let mut pivots = Vec::new();
    let mut rhs_pivot = vec![Vec::new(); nr];
    loop {
        let mut best: Option<(usize, usize, u32)> = None;
        for (ai, &i) in active.iter().enumerate() {
            for c in 0..cols {
                if !free_cols[c] {
                    continue;
                }
                let v = valuation(m[i][c], p);
                if v < k && best.is_none_or(|(_, _, bv)| v < bv) {
                    best = Some((ai, c, v));
                    if v == 0 {
                        break;
                    }
                }
            }
            if matches!(best, Some((_, _, 0))) {
                break;
            }
        }
        let Some((ai, c, v)) = best else { break };
        let pr = active.swap_remove(ai);
        free_cols[c] = false;
        let pv = m[pr][c];
        let unit = pv / p.pow(v);
        let uinv = inv_mod(unit % q, q).expect("unit");
        let prow = m[pr].clone();
        for &i in &active {
            let x = m[i][c];
            if x == 0 {
                continue;
            }
            // x = p^v * f with valuation(x) >= v
            let f = (x / p.pow(v)) % q * uinv % q;
            for (t, &y) in m[i].iter_mut().zip(&prow) {
                if y != 0 {
                    *t = ((*t as u128 + q as u128 * q as u128 - (f as u128 * y as u128) % q as u128) % q as u128) as u64;
                }
            }
        }
        for (j, b) in rhs_pivot.iter_mut().enumerate() {
            b.push(prow[cols + j]);
        }
        pivots.push((prow[..cols].to_vec(), c, v));
    }
    let rhs_rest = (0..nr)
        .map(|j| active.iter().map(|&i| m[i][cols + j]).collect())
        .collect();
    PrimePowerElim {
        q,
        pivots,
        rhs_pivot,
        rhs_rest,
    }
}

impl PrimePowerElim {
    fn solve(&self, j: usize, cols: usize, p: u64) -> Option<Vec<u64>> {
        let q = self.q;
        if self.rhs_rest[j].iter().any(|&b| b % q != 0) {
            return None;
        }
        let mut x = vec![0u64; cols];
        for (t, (row, c, v)) in self.pivots.iter().enumerate().rev() {
            let mut b = self.rhs_pivot[j][t] as i128;
            for (col, &a) in row.iter().enumerate() {
                if col != *c && a != 0 && x[col] != 0 {
                    b -= a as i128 * x[col] as i128;
                }
            }
            let b = b.rem_euclid(q as i128) as u64;
            let pv = p.pow(*v);
            if !b.is_multiple_of(pv) {
                return None;
            }
            let unit = row[*c] / pv;
            let uinv = inv_mod(unit % q, q).expect("unit");
            // p^v u x = b  =>  x = (b / p^v) u^{-1} mod p^{k-v}
            x[*c] = ((b / pv) as u128 * uinv as u128 % q as u128) as u64;
        }
        Some(x)
    }

    fn image_log(&self, k: u32) -> u32 {
        self.pivots.iter().map(|&(_, _, v)| k - v).sum()
    }
}

/// Solves `A x = b` over Z_n (any n ≥ 2). `a` has `rows` rows of length `cols`.
pub fn solve_mod_n(a: &[Vec<u64>], cols: usize, b: &[u64], n: u64) -> Option<Vec<u64>> {
    let mut parts = Vec::new();
    for (p, k) in factorize(n) {
        let e = eliminate_prime_power(a, cols, &[b.to_vec()], p, k);
        parts.push((p.pow(k), e.solve(0, cols, p)?));
    }
    // Chinese remaindering
    let mut x = vec![0u64; cols];
    let mut m = 1u64;
    for (q, part) in parts {
        let inv = inv_mod(m % q, q).unwrap_or(0);
        for (xi, &pi) in x.iter_mut().zip(&part) {
            // xi ≡ current mod m, ≡ pi mod q
            let t = ((pi as i128 - *xi as i128).rem_euclid(q as i128) as u128 * inv as u128 % q as u128) as u64;
            *xi += m * t;
        }
        m *= q;
    }
    Some(x)
}

/// `log` of the image size of `A` over Z_n, as a list of (prime, exponent).
/// The image has `Π p^e` elements.
pub fn image_size_mod_n(a: &[Vec<u64>], cols: usize, n: u64) -> Vec<(u64, u32)> {
    factorize(n)
        .into_iter()
        .map(|(p, k)| {
            let e = eliminate_prime_power(a, cols, &[], p, k);
            (p, e.image_log(k))
        })
        .collect()
}
