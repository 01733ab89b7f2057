//! Cell-local evaluation of cochain expressions.
//!
//! A [`Local`] expression is evaluated on one cell by recursively splitting the
//! cell into the sub-cells its operators read. Leaves are resolved by a caller
//! supplied closure, which lets the same code serve numeric cochain operations
//! and symbolic circuit synthesis.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

/// Coefficient ring for local evaluation.
pub trait Coeff: Clone {
    fn zero() -> Self;
    fn from_i64(v: i64) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn scale(&self, s: i64) -> Self;
    fn is_zero(&self) -> bool;
}

impl Coeff for i64 {
    fn zero() -> Self {
        0
    }
    fn from_i64(v: i64) -> Self {
        v
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, s: i64) -> Self {
        self * s
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
}

/// Cell shape the keys refer to.
#[derive(Clone, Copy, Debug)]
pub enum Shape<'a> {
    /// Keys are increasing vertex tuples.
    Simplicial,
    /// Keys are base coordinates followed by an axis mask.
    Torus(&'a [u32]),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Local {
    Leaf { id: usize, degree: usize },
    /// The constant 0-cochain 1, used as the empty cup product.
    One,
    Cup(Box<Local>, Box<Local>),
    CupI(usize, Box<Local>, Box<Local>),
    D(Box<Local>),
    /// Integer linear combination of same-degree terms.
    Lin(Vec<(i64, Local)>),
}

impl Local {
    pub fn leaf(id: usize, degree: usize) -> Local {
        Local::Leaf { id, degree }
    }

    pub fn cup(a: Local, b: Local) -> Local {
        match (a, b) {
            (Local::One, b) => b,
            (a, Local::One) => a,
            (a, b) => Local::Cup(Box::new(a), Box::new(b)),
        }
    }

    pub fn cup_i(i: usize, a: Local, b: Local) -> Local {
        if i == 0 {
            Local::cup(a, b)
        } else {
            Local::CupI(i, Box::new(a), Box::new(b))
        }
    }

    pub fn d(a: Local) -> Local {
        Local::D(Box::new(a))
    }

    /// Left-associated cup product of the factors; empty gives [`Local::One`].
    pub fn cup_chain(factors: Vec<Local>) -> Local {
        factors.into_iter().fold(Local::One, Local::cup)
    }

    pub fn power(a: &Local, n: usize) -> Local {
        Local::cup_chain(vec![a.clone(); n])
    }

    pub fn degree(&self) -> usize {
        match self {
            Local::Leaf { degree, .. } => *degree,
            Local::One => 0,
            Local::Cup(a, b) => a.degree() + b.degree(),
            Local::CupI(i, a, b) => (a.degree() + b.degree()).saturating_sub(*i),
            Local::D(a) => a.degree() + 1,
            Local::Lin(t) => t.first().map_or(0, |(_, e)| e.degree()),
        }
    }

    /// True when some higher cup inside would have negative degree.
    fn vanishes(&self) -> bool {
        match self {
            Local::CupI(i, a, b) => {
                *i > a.degree() + b.degree() || a.vanishes() || b.vanishes()
            }
            Local::Cup(a, b) => a.vanishes() || b.vanishes(),
            Local::D(a) => a.vanishes(),
            _ => false,
        }
    }

    pub fn uses_higher_cup(&self) -> bool {
        match self {
            Local::CupI(..) => true,
            Local::Cup(a, b) => a.uses_higher_cup() || b.uses_higher_cup(),
            Local::D(a) => a.uses_higher_cup(),
            Local::Lin(t) => t.iter().any(|(_, e)| e.uses_higher_cup()),
            _ => false,
        }
    }
}

/// Higher Pontryagin power of a degree-`2r` expression, with cup powers
/// associated to the left:
/// `P(a;n) = a^n + (a ∪₁ da) a^{n-2} - Σ_{k=1}^{n-2} a (a^k ∪₁ da) a^{n-2-k}`.
pub fn pontryagin_local(a: &Local, n: usize) -> Local {
    if n == 0 {
        return Local::One;
    }
    if n == 1 {
        return a.clone();
    }
    let da = Local::d(a.clone());
    let mut terms = vec![(1, Local::power(a, n))];
    let head = Local::cup_i(1, a.clone(), da.clone());
    let mut f = vec![head];
    f.extend(std::iter::repeat_n(a.clone(), n - 2));
    terms.push((1, Local::cup_chain(f)));
    for k in 1..=n.saturating_sub(2) {
        let mid = Local::cup_i(1, Local::power(a, k), da.clone());
        let mut f = vec![a.clone(), mid];
        f.extend(std::iter::repeat_n(a.clone(), n - 2 - k));
        terms.push((-1, Local::cup_chain(f)));
    }
    Local::Lin(terms)
}

/// One summand of a simplicial `∪_i` formula: vertex positions read by the
/// left and right factors, with sign.
#[derive(Clone, Debug)]
pub struct SimplexTerm {
    pub f: Vec<usize>,
    pub g: Vec<usize>,
    pub sign: i64,
}

/// Terms of `f ∪_i g` on an `(p+q-i)`-simplex with vertices `0..=p+q-i`.
///
/// For `0 ≤ u_0 < … < u_i ≤ n` the vertex range is cut into the intervals
/// `[0,u_0], [u_0,u_1], …, [u_i,n]`; even intervals feed `f`, odd ones `g`.
/// The sign moves each `g`-interval past the `f`-vertices that follow it,
/// which reduces to `(-1)^{(p-j)(q+1)}` for `i = 1`.
pub fn cup_i_terms(p: usize, q: usize, i: usize) -> Rc<Vec<SimplexTerm>> {
    thread_local! {
        static CACHE: RefCell<HashMap<(usize, usize, usize), Rc<Vec<SimplexTerm>>>> =
            RefCell::new(HashMap::new());
    }
    CACHE.with(|c| {
        c.borrow_mut()
            .entry((p, q, i))
            .or_insert_with(|| Rc::new(compute_terms(p, q, i)))
            .clone()
    })
}

fn compute_terms(p: usize, q: usize, i: usize) -> Vec<SimplexTerm> {
    let mut out = Vec::new();
    if p + q < i {
        return out;
    }
    let n = p + q - i;
    let mut u: Vec<usize> = (0..=i).collect();
    if i > n {
        return out;
    }
    loop {
        let mut bounds = Vec::with_capacity(i + 3);
        bounds.push(0);
        bounds.extend(u.iter().copied());
        bounds.push(n);
        let lens: Vec<usize> = (0..=i + 1).map(|k| bounds[k + 1] - bounds[k] + 1).collect();
        let mut f = Vec::new();
        let mut g = Vec::new();
        for k in 0..=i + 1 {
            let target = if k % 2 == 0 { &mut f } else { &mut g };
            for v in bounds[k]..=bounds[k + 1] {
                if target.last() != Some(&v) {
                    target.push(v);
                }
            }
        }
        if f.len() == p + 1 && g.len() == q + 1 {
            let mut e = 0usize;
            for k in (1..=i + 1).step_by(2) {
                let after: usize = (k + 1..=i + 1).step_by(2).map(|m| lens[m]).sum();
                e += lens[k] * after;
            }
            out.push(SimplexTerm {
                f,
                g,
                sign: if e.is_multiple_of(2) { 1 } else { -1 },
            });
        }
        // next increasing tuple u in 0..=n
        let mut k = i as isize;
        while k >= 0 && u[k as usize] == n - (i - k as usize) {
            k -= 1;
        }
        if k < 0 {
            break;
        }
        let k = k as usize;
        u[k] += 1;
        for j in k + 1..=i {
            u[j] = u[j - 1] + 1;
        }
    }
    out
}

/// Sign of the shuffle putting the axes of `first` before those of `second`.
pub fn axis_shuffle_sign(first: u32, second: u32) -> i64 {
    let mut inv = 0u32;
    let mut m = first;
    while m != 0 {
        let a = m.trailing_zeros();
        inv += (second & ((1u32 << a) - 1)).count_ones();
        m &= m - 1;
    }
    if inv.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Evaluates `e` on the cell `key`.
pub fn eval<T, F>(e: &Local, key: &[u32], shape: Shape, leaf: &mut F) -> T
where
    T: Coeff,
    F: FnMut(usize, &[u32]) -> T,
{
    match e {
        Local::Leaf { id, .. } => leaf(*id, key),
        Local::One => T::from_i64(1),
        Local::Lin(terms) => {
            let mut acc = T::zero();
            for (c, t) in terms {
                if *c != 0 {
                    acc = acc.add(&eval::<T, F>(t, key, shape, leaf).scale(*c));
                }
            }
            acc
        }
        Local::D(a) => {
            let mut acc = T::zero();
            let mut buf = Vec::with_capacity(key.len());
            match shape {
                Shape::Simplicial => {
                    for j in 0..key.len() {
                        buf.clear();
                        buf.extend(key.iter().enumerate().filter(|&(t, _)| t != j).map(|(_, &v)| v));
                        let v: T = eval(a, &buf, shape, leaf);
                        acc = acc.add(&if j % 2 == 0 { v } else { v.scale(-1) });
                    }
                }
                Shape::Torus(dims) => {
                    let n = dims.len();
                    let mask = key[n];
                    let mut j = 0;
                    for ax in 0..n {
                        if mask & (1 << ax) == 0 {
                            continue;
                        }
                        let s = if j % 2 == 0 { 1 } else { -1 };
                        buf.clear();
                        buf.extend_from_slice(key);
                        buf[n] = mask & !(1 << ax);
                        let lower: T = eval(a, &buf, shape, leaf);
                        buf[ax] = (buf[ax] + 1) % dims[ax];
                        let upper: T = eval(a, &buf, shape, leaf);
                        acc = acc.add(&upper.scale(s)).add(&lower.scale(-s));
                        j += 1;
                    }
                }
            }
            acc
        }
        Local::Cup(a, b) => {
            let (p, q) = (a.degree(), b.degree());
            match shape {
                Shape::Simplicial => {
                    let x: T = eval(a, &key[..=p], shape, leaf);
                    if x.is_zero() {
                        return x;
                    }
                    let y: T = eval(b, &key[p..], shape, leaf);
                    x.mul(&y)
                }
                Shape::Torus(dims) => {
                    let n = dims.len();
                    let mask = key[n];
                    let mut acc = T::zero();
                    let mut fk = key.to_vec();
                    let mut gk = key.to_vec();
                    // enumerate subsets I of mask with |I| = p
                    let mut sub = mask;
                    loop {
                        if sub.count_ones() as usize == p {
                            let rest = mask & !sub;
                            debug_assert_eq!(rest.count_ones() as usize, q);
                            fk[n] = sub;
                            let x: T = eval(a, &fk, shape, leaf);
                            if !x.is_zero() {
                                gk.copy_from_slice(key);
                                for ax in 0..n {
                                    if sub & (1 << ax) != 0 {
                                        gk[ax] = (gk[ax] + 1) % dims[ax];
                                    }
                                }
                                gk[n] = rest;
                                let y: T = eval(b, &gk, shape, leaf);
                                let s = axis_shuffle_sign(sub, rest);
                                acc = acc.add(&x.mul(&y).scale(s));
                            }
                        }
                        if sub == 0 {
                            break;
                        }
                        sub = (sub - 1) & mask;
                    }
                    acc
                }
            }
        }
        Local::CupI(i, a, b) => {
            if e.vanishes() {
                return T::zero();
            }
            let (p, q) = (a.degree(), b.degree());
            let terms = cup_i_terms(p, q, *i);
            let mut acc = T::zero();
            let mut fb = Vec::with_capacity(p + 1);
            let mut gb = Vec::with_capacity(q + 1);
            for t in terms.iter() {
                fb.clear();
                fb.extend(t.f.iter().map(|&k| key[k]));
                let x: T = eval(a, &fb, shape, leaf);
                if x.is_zero() {
                    continue;
                }
                gb.clear();
                gb.extend(t.g.iter().map(|&k| key[k]));
                let y: T = eval(b, &gb, shape, leaf);
                acc = acc.add(&x.mul(&y).scale(t.sign));
            }
            acc
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cup1_terms_match_closed_form() {
        for p in 1..4 {
            for q in 1..4 {
                let t = cup_i_terms(p, q, 1);
                assert_eq!(t.len(), p);
                for (j, term) in t.iter().enumerate() {
                    let expect_g: Vec<usize> = (j..=j + q).collect();
                    assert_eq!(term.g, expect_g);
                    let e = (p - j) * (q + 1);
                    assert_eq!(term.sign, if e % 2 == 0 { 1 } else { -1 });
                }
            }
        }
    }

    #[test]
    fn cup0_is_front_back() {
        let t = cup_i_terms(2, 1, 0);
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].f, vec![0, 1, 2]);
        assert_eq!(t[0].g, vec![2, 3]);
    }

    #[test]
    fn shuffle_sign_of_axes() {
        assert_eq!(axis_shuffle_sign(0b01, 0b10), 1);
        assert_eq!(axis_shuffle_sign(0b10, 0b01), -1);
        assert_eq!(axis_shuffle_sign(0b100, 0b011), 1);
    }
}
