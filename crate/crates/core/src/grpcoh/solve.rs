//! Trivializations `dα = ω|_K`, their iteration and cohomology counts.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{input, precondition, Error, Result};
use crate::homology::modular::{factorize, image_size_mod_n, solve_mod_n};

use super::cochain::{coboundary_terms, decode, encode, table_len, GroupCochain};
use super::group::{FiniteAbelianGroup, Subgroup};

/// Dense linear systems are limited to this many matrix entries.
pub const SYSTEM_CAP: usize = 1 << 24;

fn check_system(rows: usize, cols: usize) -> Result<()> {
    if rows.saturating_mul(cols) > SYSTEM_CAP {
        return Err(Error::Budget(format!(
            "a {rows} x {cols} linear system exceeds the cap of {SYSTEM_CAP} entries"
        )));
    }
    Ok(())
}

/// Matrix of `d: C^n(K) → C^{n+1}(K)` over `Z_m`, rows indexed by (n+1)-tuples.
fn coboundary_matrix(dom: &Subgroup, n: usize, m: u64, scale: u64) -> Result<Vec<Vec<u64>>> {
    let k = dom.len();
    let rows = table_len(k, n + 1)?;
    let cols = table_len(k, n)?;
    check_system(rows, cols)?;
    let mut a = vec![vec![0u64; cols]; rows];
    let mut t = vec![0; n + 1];
    for (r, row) in a.iter_mut().enumerate() {
        decode(r, k, &mut t);
        for (col, sign) in coboundary_terms(dom, &t) {
            let s = (sign * scale as i64).rem_euclid(m as i64) as u64;
            row[col] = (row[col] + s) % m;
        }
    }
    Ok(a)
}

/// Group order from its prime-power exponents.
fn order_of(log: &[(u64, u64)]) -> Option<u128> {
    log.iter().try_fold(1u128, |acc, &(p, e)| {
        let e = u32::try_from(e).ok()?;
        acc.checked_mul((p as u128).checked_pow(e)?)
    })
}

/// Outcome of a trivialization attempt.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Trivialization {
    /// `alpha` solves the equation; every other solution is `alpha + c` for a
    /// cocycle `c`, and there are `Π p^e` of them over `ambiguity`.
    Solved { alpha: GroupCochain, ambiguity: Vec<(u64, u64)> },
    /// No cochain over the target modulus has the required coboundary.
    Obstructed,
}

impl Trivialization {
    pub fn alpha(&self) -> Option<&GroupCochain> {
        match self {
            Trivialization::Solved { alpha, .. } => Some(alpha),
            Trivialization::Obstructed => None,
        }
    }
}

/// Solves `dα = target` for a cochain `α` on the domain of `target`, over
/// the modulus of `target`. The right-hand side need not be a cocycle.
pub fn solve_coboundary(target: &GroupCochain) -> Result<Trivialization> {
    let n = target.degree();
    if n == 0 {
        return input("a degree-0 cochain is never a coboundary target");
    }
    let m = target.modulus();
    let dom = target.domain().clone();
    let a = coboundary_matrix(&dom, n - 1, m, 1)?;
    let cols = table_len(dom.len(), n - 1)?;
    let Some(x) = solve_mod_n(&a, cols, target.values(), m) else {
        return Ok(Trivialization::Obstructed);
    };
    let alpha = GroupCochain::from_values(dom, n - 1, m, x.into_iter().map(|v| v as i64).collect())?;
    let ambiguity = kernel_log(&a, cols, m);
    Ok(Trivialization::Solved { alpha, ambiguity })
}

fn kernel_log(a: &[Vec<u64>], cols: usize, m: u64) -> Vec<(u64, u64)> {
    let image = image_size_mod_n(a, cols, m);
    factorize(m)
        .into_iter()
        .zip(image)
        .map(|((p, k), (_, img))| (p, k as u64 * cols as u64 - img as u64))
        .collect()
}

/// The boundary operation: restricts the cocycle `omega` to `k`, reads it as
/// a phase over `Z_target`, and solves `dα = ω|_K`.
pub fn trivialization_solve(omega: &GroupCochain, k: &Arc<Subgroup>, target: u64) -> Result<Trivialization> {
    if omega.degree() == 0 {
        return input("the boundary operation needs a cocycle of degree at least 1");
    }
    if !omega.is_cocycle()? {
        return precondition("omega is not a cocycle");
    }
    solve_coboundary(&omega.restrict(k)?.rescale(target)?)
}

/// How a boundary step picks among the solutions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundaryChoice {
    /// Take the solver's output. If the next step is obstructed, shift this
    /// step's output by a cocycle that removes the obstruction when one exists.
    Auto,
    /// Add the given cocycle of the step's subgroup to the solver's output.
    Cocycle(GroupCochain),
    /// Use this cochain, which must differ from the solver's output by a
    /// cocycle. This is how an explicit formula fixes the choice.
    Prefer(GroupCochain),
}

#[derive(Clone, Debug)]
pub struct BoundaryStep {
    pub label: String,
    pub subgroup: Arc<Subgroup>,
    pub modulus: u64,
    pub choice: BoundaryChoice,
}

/// Cochains produced by [`iterate_boundary`]; `stages[0]` is the input.
#[derive(Clone, Debug)]
pub struct BoundaryChain {
    pub stages: Vec<GroupCochain>,
}

impl BoundaryChain {
    pub fn result(&self) -> &GroupCochain {
        self.stages.last().expect("input stage")
    }
}

/// Applies the boundary operation along nested subgroups. An empty chain
/// returns `omega` unchanged.
pub fn iterate_boundary(omega: &GroupCochain, steps: &[BoundaryStep]) -> Result<BoundaryChain> {
    if !steps.is_empty() && !omega.is_cocycle()? {
        return precondition("omega is not a cocycle");
    }
    let mut stages = vec![omega.clone()];
    for (i, step) in steps.iter().enumerate() {
        let prev = stages.last().expect("nonempty");
        if prev.degree() == 0 {
            return precondition(format!("step {} ({}): nothing left to trivialize", i + 1, step.label));
        }
        if !step.subgroup.is_subgroup_of(prev.domain()) {
            return precondition(format!("step {} ({}): subgroup is not nested in the previous one", i + 1, step.label));
        }
        let target = prev.restrict(&step.subgroup)?.rescale(step.modulus)?;
        let mut alpha = match solve_coboundary(&target)? {
            Trivialization::Solved { alpha, .. } => alpha,
            Trivialization::Obstructed => {
                let adjustable = i > 0 && steps[i - 1].choice == BoundaryChoice::Auto;
                let fixed = if adjustable {
                    solve_with_shift(prev, &step.subgroup, step.modulus)?
                } else {
                    None
                };
                let Some((alpha, shift)) = fixed else {
                    return precondition(format!(
                        "boundary step {} ({}) is obstructed: the restriction is not exact over Z_{}",
                        i + 1,
                        step.label,
                        step.modulus
                    ));
                };
                let n = stages.len();
                stages[n - 1] = stages[n - 1].add(&shift)?;
                alpha
            }
        };
        match &step.choice {
            BoundaryChoice::Auto => {}
            BoundaryChoice::Cocycle(c) => {
                if !c.is_cocycle()? {
                    return precondition(format!("step {} ({}): the chosen cochain is not a cocycle", i + 1, step.label));
                }
                alpha = alpha.add(c)?;
            }
            BoundaryChoice::Prefer(c) => {
                if !alpha.sub(c)?.is_cocycle()? {
                    return precondition(format!(
                        "step {} ({}): the preferred cochain does not trivialize the restriction",
                        i + 1,
                        step.label
                    ));
                }
                alpha = c.clone();
            }
        }
        stages.push(alpha);
    }
    Ok(BoundaryChain { stages })
}

/// Finds a cocycle `c` on the domain of `prev` and `β` on `sub` with
/// `dβ = (prev + c)|_sub` read over `Z_modulus`.
fn solve_with_shift(prev: &GroupCochain, sub: &Arc<Subgroup>, modulus: u64) -> Result<Option<(GroupCochain, GroupCochain)>> {
    let big = prev.domain().clone();
    let p = prev.degree();
    let m = modulus;
    let s = m / prev.modulus();
    let kb = big.len();
    let ks = sub.len();
    let beta_cols = table_len(ks, p - 1)?;
    let c_cols = table_len(kb, p)?;
    let cocycle_rows = table_len(kb, p + 1)?;
    let restrict_rows = table_len(ks, p)?;
    let cols = beta_cols + c_cols;
    check_system(cocycle_rows + restrict_rows, cols)?;
    let map: Vec<usize> = sub.elements().iter().map(|g| big.index_of(g).expect("nested")).collect();
    let mut a = Vec::with_capacity(cocycle_rows + restrict_rows);
    let mut b = Vec::with_capacity(cocycle_rows + restrict_rows);
    let mut t = vec![0; p + 1];
    for r in 0..cocycle_rows {
        decode(r, kb, &mut t);
        let mut row = vec![0u64; cols];
        for (col, sign) in coboundary_terms(&big, &t) {
            let v = &mut row[beta_cols + col];
            *v = (*v as i64 + sign * s as i64).rem_euclid(m as i64) as u64;
        }
        a.push(row);
        b.push(0);
    }
    let mut t = vec![0; p];
    for r in 0..restrict_rows {
        decode(r, ks, &mut t);
        let mut row = vec![0u64; cols];
        for (col, sign) in coboundary_terms(sub, &t) {
            row[col] = (row[col] as i64 + sign).rem_euclid(m as i64) as u64;
        }
        let lifted = encode(t.iter().map(|&i| map[i]), kb);
        row[beta_cols + lifted] = (row[beta_cols + lifted] + m - s % m) % m;
        a.push(row);
        b.push(prev.values()[lifted] * s % m);
    }
    let Some(x) = solve_mod_n(&a, cols, &b, m) else {
        return Ok(None);
    };
    let beta = GroupCochain::from_values(sub.clone(), p - 1, m, x[..beta_cols].iter().map(|&v| v as i64).collect())?;
    let shift = GroupCochain::from_values(big, p, prev.modulus(), x[beta_cols..].iter().map(|&v| v as i64).collect())?;
    Ok(Some((beta, shift)))
}

/// Order of `H^n(G; Z_M)` with its prime factorization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CohomologyCount {
    pub orders: Vec<u64>,
    pub degree: usize,
    pub modulus: u64,
    pub factors: Vec<(u64, u64)>,
    /// `None` when the order does not fit in 128 bits.
    pub order: Option<u128>,
}

/// `|ker d_n| / |im d_{n-1}|` on the bar complex of `G` over `Z_M`.
pub fn cohomology_counts(g: &FiniteAbelianGroup, n: usize, modulus: u64) -> Result<CohomologyCount> {
    if modulus < 2 {
        return input("modulus must be at least 2");
    }
    let dom = g.whole();
    let cols_n = table_len(dom.len(), n)?;
    let d_n = coboundary_matrix(&dom, n, modulus, 1)?;
    let kernel = kernel_log(&d_n, cols_n, modulus);
    let image: Vec<(u64, u32)> = if n == 0 {
        factorize(modulus).into_iter().map(|(p, _)| (p, 0)).collect()
    } else {
        let d_prev = coboundary_matrix(&dom, n - 1, modulus, 1)?;
        image_size_mod_n(&d_prev, table_len(dom.len(), n - 1)?, modulus)
    };
    let factors: Vec<(u64, u64)> = kernel
        .into_iter()
        .zip(image)
        .map(|((p, k), (_, i))| (p, k - i as u64))
        .filter(|&(_, e)| e > 0)
        .collect();
    Ok(CohomologyCount {
        orders: g.orders().to_vec(),
        degree: n,
        modulus,
        order: order_of(&factors),
        factors,
    })
}

/// Orders of `H^n(G; U(1))` for `n = 1..=max_degree`, derived from the
/// `Z_M` counts. When the exponent of `G` divides `M`, universal coefficients
/// give `|H^n(G;Z_M)| = |H^{n-1}(G;U(1))| · |H^n(G;U(1))|` for `n ≥ 2` and
/// `H^1(G;Z_M) = H^1(G;U(1))`, which unwinds recursively.
pub fn u1_cohomology_orders(g: &FiniteAbelianGroup, max_degree: usize, modulus: u64) -> Result<Vec<u128>> {
    if !modulus.is_multiple_of(g.exponent()) {
        return input(format!("the exponent {} of the group must divide {modulus}", g.exponent()));
    }
    let mut out: Vec<u128> = Vec::new();
    for n in 1..=max_degree {
        let c = cohomology_counts(g, n, modulus)?;
        let total = c.order.ok_or_else(|| Error::Overflow(format!("|H^{n}| does not fit in 128 bits")))?;
        let prev = out.last().copied().unwrap_or(1);
        if total % prev != 0 {
            return Err(Error::Precondition(format!("count {total} in degree {n} is not divisible by {prev}")));
        }
        out.push(total / prev);
    }
    Ok(out)
}
