//! Randomized property suites for the cohomology operations. Every check is
//! an exact congruence; the randomness only picks the cocycles.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cochain::Cochain;
use crate::complex::CellComplex;
use crate::error::{precondition, Result};
use crate::homology::{cohomology_basis, CohomologyBasis};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteCheck {
    pub name: String,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub complex: String,
    pub parameters: String,
    pub trials: usize,
    pub checks: Vec<SuiteCheck>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.failed == 0 && c.passed > 0)
    }

    fn record(&mut self, name: &str, ok: bool) {
        let slot = match self.checks.iter().position(|c| c.name == name) {
            Some(i) => &mut self.checks[i],
            None => {
                self.checks.push(SuiteCheck {
                    name: name.into(),
                    passed: 0,
                    failed: 0,
                });
                self.checks.last_mut().expect("just pushed")
            }
        };
        if ok {
            slot.passed += 1;
        } else {
            slot.failed += 1;
        }
    }
}

/// Random cocycle: a random combination of the basis plus a random coboundary.
fn random_cocycle(c: &Arc<CellComplex>, basis: &CohomologyBasis, rng: &mut ChaCha8Rng) -> Result<Cochain> {
    let m = basis.modulus;
    let k = basis.degree;
    let mut acc = if k == 0 {
        Cochain::zero(c, 0, m)
    } else {
        Cochain::random(c, k - 1, m, rng).coboundary()
    };
    for r in &basis.reps {
        acc = acc.add(&r.scale(rng.gen_range(0..m) as i64))?;
    }
    Ok(acc)
}

/// Integer coboundary of a random integer cochain with entries in `0..m`.
fn random_integer_coboundary(c: &Arc<CellComplex>, k: usize, m: u64, rng: &mut ChaCha8Rng) -> Cochain {
    let vals = (0..c.num_cells(k - 1)).map(|_| rng.gen_range(0..m as i64)).collect();
    Cochain::from_values(c, k - 1, 0, vals).expect("sized").coboundary()
}

/// `a` mod N carrying `lift` as its integer lift.
fn with_integer_lift(c: &Arc<CellComplex>, k: usize, n: u64, lift: Vec<i64>) -> Result<Cochain> {
    let vals = lift.iter().map(|v| v.rem_euclid(n as i64)).collect();
    Cochain::from_values(c, k, n, vals)?.with_lift(n, lift)
}

/// Checks the higher Pontryagin power `P(a;n)` of random mod-N 2-cocycles:
/// closedness mod nN, independence of the integer lift, gauge invariance
/// and the refinement of the n-th cup power. Integrals of cochains below top
/// degree are taken against cocycles of the complementary degree.
pub fn pontryagin_property_suite(
    c: &Arc<CellComplex>,
    big_n: u64,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<SuiteReport> {
    if n < 2 || !big_n.is_multiple_of(n as u64) {
        return precondition(format!("power {n} must divide N = {big_n}"));
    }
    if !c.is_simplicial() {
        return precondition("the Pontryagin suite needs a simplicial complex");
    }
    if c.orientation().is_none() {
        return precondition("the Pontryagin suite integrates mod nN and needs an orientation");
    }
    let d = c.dim();
    if 2 * n > d {
        return precondition(format!("P(a;{n}) of a 2-cocycle exceeds dimension {d}"));
    }
    let target = big_n * n as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let basis = cohomology_basis(c, 2, big_n)?;
    // cocycles mod nN to integrate against
    let partners: Vec<Cochain> = if 2 * n == d {
        vec![Cochain::from_values(c, 0, target, vec![1; c.num_cells(0)])?]
    } else {
        let pb = cohomology_basis(c, d - 2 * n, target)?;
        let mut v: Vec<Cochain> = pb.reps.iter().take(3).cloned().collect();
        v.push(random_cocycle(c, &pb, &mut rng)?);
        v
    };
    let pair = |f: &Cochain| -> Result<Vec<i64>> { partners.iter().map(|b| f.cup(b)?.integrate()).collect() };

    let mut report = SuiteReport {
        suite: "pontryagin".into(),
        complex: c.name().to_string(),
        parameters: format!("N={big_n} n={n}"),
        trials,
        checks: Vec::new(),
    };
    for _ in 0..trials {
        let a = random_cocycle(c, &basis, &mut rng)?;
        let p = a.pontryagin_power(n)?;
        report.record("closed mod nN", p.coboundary().is_zero());

        let lift = a.integer_lift();
        let x: Vec<i64> = (0..lift.values().len()).map(|_| rng.gen_range(-2..3)).collect();
        let relifted: Vec<i64> = lift.values().iter().zip(&x).map(|(v, x)| v + big_n as i64 * x).collect();
        let p_lift = with_integer_lift(c, 2, big_n, relifted)?.pontryagin_power(n)?;
        report.record("lift independence", pair(&p_lift.sub(&p)?)?.iter().all(|&v| v == 0));

        let dchi = random_integer_coboundary(c, 2, target, &mut rng);
        let gauged: Vec<i64> = lift.values().iter().zip(dchi.values()).map(|(a, b)| a + b).collect();
        let p_gauge = with_integer_lift(c, 2, big_n, gauged)?.pontryagin_power(n)?;
        report.record("gauge invariance", pair(&p_gauge.sub(&p)?)?.iter().all(|&v| v == 0));

        let b = random_cocycle(c, &basis, &mut rng)?;
        let sum = a.add(&b)?;
        let mixed = sum.pontryagin_power(n)?.sub(&p)?.sub(&b.pontryagin_power(n)?)?;
        let lhs: Vec<i64> = pair(&mixed)?.iter().map(|v| (v * big_n as i64).rem_euclid(target as i64)).collect();
        let la = a.integer_lift().with_modulus(target);
        let lb = b.integer_lift().with_modulus(target);
        let mut rhs = vec![0i64; partners.len()];
        for k in 1..n {
            let mut term = la.clone();
            for _ in 1..k {
                term = term.cup(&la)?;
            }
            for _ in 0..n - k {
                term = term.cup(&lb)?;
            }
            let coeff = big_n as i64 * binomial(n, k);
            for (r, v) in rhs.iter_mut().zip(pair(&term)?) {
                *r = (*r + coeff * v).rem_euclid(target as i64);
            }
        }
        report.record("cup power refinement", lhs == rhs);

        // an integrally closed cocycle: P reduces to the plain cup power
        let closed = random_integer_coboundary(c, 2, big_n, &mut rng);
        let a_closed = with_integer_lift(c, 2, big_n, closed.values().to_vec())?;
        let mut power = closed.with_modulus(target);
        for _ in 1..n {
            power = power.cup(&closed.with_modulus(target))?;
        }
        report.record("integral cocycle gives cup power", a_closed.pontryagin_power(n)? == power);
    }
    Ok(report)
}

fn binomial(n: usize, k: usize) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

/// Steenrod square properties on random mod-2 cocycles of every degree.
pub fn steenrod_suite(c: &Arc<CellComplex>, trials: usize, seed: u64) -> Result<SuiteReport> {
    if !c.is_simplicial() {
        return precondition("Steenrod squares need a simplicial complex");
    }
    let d = c.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SuiteReport {
        suite: "steenrod".into(),
        complex: c.name().to_string(),
        parameters: "mod 2".into(),
        trials,
        checks: Vec::new(),
    };
    let bases: Vec<CohomologyBasis> = (1..d).map(|p| cohomology_basis(c, p, 2)).collect::<Result<_>>()?;
    for _ in 0..trials {
        for basis in &bases {
            let p = basis.degree;
            let f = random_cocycle(c, basis, &mut rng)?;
            report.record("Sq^0 is the identity", f.steenrod_sq(0)? == f);
            report.record("top square is the cup square", f.steenrod_sq(p)? == f.cup(&f)?);
            report.record("Sq^i vanishes above the degree", f.steenrod_sq(p + 1)?.is_zero());
            if p < d {
                let sq1 = f.steenrod_sq(1)?;
                let dl = f.integer_lift().coboundary();
                let half: Vec<i64> = dl.values().iter().map(|v| (v / 2).rem_euclid(2)).collect();
                let even = dl.values().iter().all(|v| v % 2 == 0);
                report.record("Sq^1 is the Bockstein d/2", even && sq1.values() == half.as_slice());
                report.record("Sq^1 of a cocycle is closed", sq1.is_cocycle());
            }
        }
    }
    Ok(report)
}

/// Integral Cartan formula `∫Sq^i(f∪g) = Σ_m ∫Sq^m f ∪ Sq^{i-m} g` mod 2 for
/// random cocycles with `p + q + i` equal to the dimension.
pub fn cartan_suite(c: &Arc<CellComplex>, trials: usize, seed: u64) -> Result<SuiteReport> {
    if !c.is_simplicial() {
        return precondition("Steenrod squares need a simplicial complex");
    }
    let d = c.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SuiteReport {
        suite: "cartan".into(),
        complex: c.name().to_string(),
        parameters: "mod 2".into(),
        trials,
        checks: Vec::new(),
    };
    let bases: Vec<CohomologyBasis> = (0..d).map(|p| cohomology_basis(c, p, 2)).collect::<Result<_>>()?;
    for _ in 0..trials {
        for p in 1..d {
            for q in 1..d {
                if p + q >= d {
                    continue;
                }
                let i = d - p - q;
                let f = random_cocycle(c, &bases[p], &mut rng)?;
                let g = random_cocycle(c, &bases[q], &mut rng)?;
                let lhs = f.cup(&g)?.steenrod_sq(i)?.integrate()?;
                let mut rhs = 0;
                for m in 0..=i {
                    rhs += f.steenrod_sq(m)?.cup(&g.steenrod_sq(i - m)?)?.integrate()?;
                }
                report.record(&format!("Cartan p={p} q={q} i={i}"), lhs == rhs % 2);
            }
        }
    }
    Ok(report)
}
