//! Cochains with residues mod M, integer lifts, and cohomology operations.

pub mod formula;

use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::CellComplex;
use crate::error::{input, precondition, unsupported, Error, Result};
use formula::{eval, pontryagin_local, Local, Shape};

/// Degree-`k` cochain. `modulus == 0` means integer coefficients.
#[derive(Clone, Debug)]
pub struct Cochain {
    complex: Arc<CellComplex>,
    degree: usize,
    modulus: u64,
    values: Vec<i64>,
    lift: Option<Lift>,
}

/// Integer lift of a cochain's values, reducing to them mod `base`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lift {
    pub base: u64,
    pub values: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
struct CochainJson {
    degree: usize,
    modulus: u64,
    values: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lift: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lift_base: Option<u64>,
}

pub(crate) fn reduce(v: i64, m: u64) -> i64 {
    if m == 0 {
        v
    } else {
        v.rem_euclid(m as i64)
    }
}

impl PartialEq for Cochain {
    fn eq(&self, other: &Self) -> bool {
        self.complex.uid() == other.complex.uid()
            && self.degree == other.degree
            && self.modulus == other.modulus
            && self.values == other.values
    }
}

impl Cochain {
    pub fn zero(complex: &Arc<CellComplex>, degree: usize, modulus: u64) -> Cochain {
        Cochain {
            complex: complex.clone(),
            degree,
            modulus,
            values: vec![0; complex.num_cells(degree)],
            lift: None,
        }
    }

    /// Builds a cochain from per-cell values, reducing them mod `modulus`.
    pub fn from_values(
        complex: &Arc<CellComplex>,
        degree: usize,
        modulus: u64,
        values: Vec<i64>,
    ) -> Result<Cochain> {
        if modulus == 1 {
            return input("modulus must be 0 (integers) or at least 2");
        }
        if values.len() != complex.num_cells(degree) {
            return input(format!(
                "expected {} values for degree {}, got {}",
                complex.num_cells(degree),
                degree,
                values.len()
            ));
        }
        Ok(Cochain {
            complex: complex.clone(),
            degree,
            modulus,
            values: values.into_iter().map(|v| reduce(v, modulus)).collect(),
            lift: None,
        })
    }

    /// Indicator cochain of one cell.
    pub fn indicator(complex: &Arc<CellComplex>, degree: usize, cell: usize, modulus: u64) -> Result<Cochain> {
        if cell >= complex.num_cells(degree) {
            return input(format!("cell {cell} out of range in degree {degree}"));
        }
        let mut c = Cochain::zero(complex, degree, modulus);
        c.values[cell] = 1;
        Ok(c)
    }

    pub fn random<R: Rng>(complex: &Arc<CellComplex>, degree: usize, modulus: u64, rng: &mut R) -> Cochain {
        let span = if modulus == 0 { 7 } else { modulus as i64 };
        let values = (0..complex.num_cells(degree))
            .map(|_| {
                let v = rng.gen_range(0..span);
                if modulus == 0 {
                    v - 3
                } else {
                    v
                }
            })
            .collect();
        Cochain {
            complex: complex.clone(),
            degree,
            modulus,
            values,
            lift: None,
        }
    }

    /// Attaches an integer lift that must reduce to the values mod `base`,
    /// where `base` divides the modulus.
    pub fn with_lift(mut self, base: u64, lift: Vec<i64>) -> Result<Cochain> {
        if base < 2 || (self.modulus != 0 && !self.modulus.is_multiple_of(base)) {
            return input(format!("lift base {base} must divide modulus {}", self.modulus));
        }
        if lift.len() != self.values.len() {
            return input("lift length does not match the number of cells");
        }
        if lift
            .iter()
            .zip(&self.values)
            .any(|(&l, &v)| reduce(l, base) != reduce(v, base))
        {
            return input(format!("lift does not reduce to the values mod {base}"));
        }
        self.lift = Some(Lift { base, values: lift });
        Ok(self)
    }

    pub fn complex(&self) -> &Arc<CellComplex> {
        &self.complex
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn value(&self, cell: usize) -> i64 {
        self.values[cell]
    }

    pub fn lift(&self) -> Option<&Lift> {
        self.lift.as_ref()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    /// Integer cochain given by the lift if present, else by the least
    /// nonnegative residues.
    pub fn integer_lift(&self) -> Cochain {
        let values = match &self.lift {
            Some(l) => l.values.clone(),
            None => self.values.clone(),
        };
        Cochain {
            complex: self.complex.clone(),
            degree: self.degree,
            modulus: 0,
            values,
            lift: None,
        }
    }

    /// Reduces mod `m`. Reducing an integer cochain keeps it as the lift.
    pub fn reduce_mod(&self, m: u64) -> Result<Cochain> {
        if m == 1 || (self.modulus != 0 && m != 0 && !self.modulus.is_multiple_of(m)) {
            return input(format!("cannot reduce mod {} to mod {m}", self.modulus));
        }
        if self.modulus != 0 && m == 0 {
            return input("cannot reduce a residue cochain to integers; use integer_lift");
        }
        let mut c = Cochain::from_values(&self.complex, self.degree, m, self.values.clone())?;
        if self.modulus == 0 && m != 0 {
            c.lift = Some(Lift {
                base: m,
                values: self.values.clone(),
            });
        }
        Ok(c)
    }

    /// Same values read with a different modulus, e.g. to embed mod N as N·(mod nN).
    pub fn with_modulus(&self, m: u64) -> Cochain {
        Cochain {
            complex: self.complex.clone(),
            degree: self.degree,
            modulus: m,
            values: self.values.iter().map(|&v| reduce(v, m)).collect(),
            lift: None,
        }
    }

    fn check_compatible(&self, other: &Cochain) -> Result<()> {
        if self.complex.uid() != other.complex.uid() {
            return input("cochains live on different complexes");
        }
        if self.modulus != other.modulus {
            return input(format!(
                "modulus mismatch: {} vs {}",
                self.modulus, other.modulus
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &Cochain) -> Result<Cochain> {
        self.check_compatible(other)?;
        if self.degree != other.degree {
            return input("degree mismatch in addition");
        }
        Ok(self.map2(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Cochain) -> Result<Cochain> {
        self.check_compatible(other)?;
        if self.degree != other.degree {
            return input("degree mismatch in subtraction");
        }
        Ok(self.map2(other, |a, b| a - b))
    }

    pub fn scale(&self, s: i64) -> Cochain {
        Cochain {
            complex: self.complex.clone(),
            degree: self.degree,
            modulus: self.modulus,
            values: self.values.iter().map(|&v| reduce(v * s, self.modulus)).collect(),
            lift: None,
        }
    }

    fn map2(&self, other: &Cochain, f: impl Fn(i64, i64) -> i64) -> Cochain {
        Cochain {
            complex: self.complex.clone(),
            degree: self.degree,
            modulus: self.modulus,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| reduce(f(a, b), self.modulus))
                .collect(),
            lift: None,
        }
    }

    /// Evaluates a local expression whose leaves are the given cochains on
    /// every cell of the expression's degree.
    pub(crate) fn evaluate(
        complex: &Arc<CellComplex>,
        expr: &Local,
        leaves: &[&Cochain],
        modulus: u64,
    ) -> Cochain {
        let k = expr.degree();
        let shape = match complex.grid() {
            Some(d) => Shape::Torus(d),
            None => Shape::Simplicial,
        };
        let values: Vec<i64> = complex
            .cells(k)
            .par_iter()
            .map(|key| {
                let mut leaf = |id: usize, sub: &[u32]| -> i64 {
                    let c = leaves[id];
                    match complex.cell_index(c.degree, sub) {
                        Some(i) => c.values[i],
                        None => 0,
                    }
                };
                reduce(eval::<i64, _>(expr, key, shape, &mut leaf), modulus)
            })
            .collect();
        Cochain {
            complex: complex.clone(),
            degree: k,
            modulus,
            values,
            lift: None,
        }
    }

    /// `(df)(σ) = Σ` signed values of `f` on the faces of `σ`.
    pub fn coboundary(&self) -> Cochain {
        let k = self.degree + 1;
        let n = self.complex.num_cells(k);
        let values = (0..n)
            .map(|c| {
                let s: i64 = self
                    .complex
                    .faces(k, c)
                    .iter()
                    .map(|&(f, sign)| sign * self.values[f])
                    .sum();
                reduce(s, self.modulus)
            })
            .collect();
        Cochain {
            complex: self.complex.clone(),
            degree: k,
            modulus: self.modulus,
            values,
            lift: None,
        }
    }

    pub fn is_cocycle(&self) -> bool {
        self.coboundary().is_zero()
    }

    /// Cup product: front face/back face on simplices, the axis splitting
    /// rule on cubes.
    pub fn cup(&self, other: &Cochain) -> Result<Cochain> {
        self.check_compatible(other)?;
        if self.degree + other.degree > self.complex.dim() {
            return Ok(Cochain::zero(&self.complex, self.degree + other.degree, self.modulus));
        }
        let e = Local::cup(Local::leaf(0, self.degree), Local::leaf(1, other.degree));
        Ok(Cochain::evaluate(&self.complex, &e, &[self, other], self.modulus))
    }

    /// Higher cup product `f ∪_i g` of degree `p + q - i` (simplicial only).
    pub fn cup_i(&self, i: usize, other: &Cochain) -> Result<Cochain> {
        self.check_compatible(other)?;
        if !self.complex.is_simplicial() && i > 0 {
            return unsupported("higher cup on cubical lattice out of scope");
        }
        let (p, q) = (self.degree, other.degree);
        if p + q < i {
            return input(format!("∪_{i} of degrees {p} and {q} has negative degree"));
        }
        if p + q - i > self.complex.dim() {
            return Ok(Cochain::zero(&self.complex, p + q - i, self.modulus));
        }
        let e = Local::cup_i(i, Local::leaf(0, p), Local::leaf(1, q));
        Ok(Cochain::evaluate(&self.complex, &e, &[self, other], self.modulus))
    }

    /// `Sq^i f = f ∪_{p-i} f` for a mod-2 cochain; zero when `i > p`.
    pub fn steenrod_sq(&self, i: usize) -> Result<Cochain> {
        if self.modulus != 2 {
            return input("Steenrod squares act on mod-2 cochains");
        }
        let p = self.degree;
        if i > p {
            return Ok(Cochain::zero(&self.complex, p + i, 2));
        }
        self.cup_i(p - i, self)
    }

    /// Higher Pontryagin power `P(a;n)` of a mod-N cocycle of even degree,
    /// computed on its integer lift and reduced mod `nN`.
    pub fn pontryagin_power(&self, n: usize) -> Result<Cochain> {
        let big_n = self.modulus;
        if big_n == 0 {
            return input("Pontryagin power needs a residue cochain");
        }
        if n == 0 || !big_n.is_multiple_of(n as u64) {
            return precondition(format!("power {n} must divide the modulus {big_n}"));
        }
        if !self.degree.is_multiple_of(2) {
            return precondition("Pontryagin power needs an even-degree cochain");
        }
        if !self.complex.is_simplicial() && n > 1 {
            return unsupported("Pontryagin power needs higher cups, which are simplicial only");
        }
        if !self.is_cocycle() {
            return precondition("Pontryagin power needs a cocycle");
        }
        let target = big_n * n as u64;
        let lift = self.integer_lift();
        if self.degree * n > self.complex.dim() {
            return Ok(Cochain::zero(&self.complex, self.degree * n, target));
        }
        let e = pontryagin_local(&Local::leaf(0, self.degree), n);
        Ok(Cochain::evaluate(&self.complex, &e, &[&lift], target))
    }

    /// The 5-cochain `ζ(012345) = a1(023) a1(012) a2(345) a2(235)` mod 2.
    pub fn cartan_coboundary(a1: &Cochain, a2: &Cochain) -> Result<Cochain> {
        a1.check_compatible(a2)?;
        if a1.degree != 2 || a2.degree != 2 || a1.modulus != 2 {
            return input("cartan_coboundary needs two mod-2 2-cochains");
        }
        if !a1.complex.is_simplicial() {
            return unsupported("cartan_coboundary is defined on simplicial complexes");
        }
        let c = &a1.complex;
        let at = |f: &Cochain, key: &[u32], pos: [usize; 3]| -> i64 {
            let sub = [key[pos[0]], key[pos[1]], key[pos[2]]];
            f.values[c.cell_index(2, &sub).expect("face stored")]
        };
        let values = c
            .cells(5)
            .iter()
            .map(|k| {
                at(a1, k, [0, 2, 3]) * at(a1, k, [0, 1, 2]) * at(a2, k, [3, 4, 5]) * at(a2, k, [2, 3, 5]) % 2
            })
            .collect();
        Ok(Cochain {
            complex: c.clone(),
            degree: 5,
            modulus: 2,
            values,
            lift: None,
        })
    }

    /// `Σ` over top cells of orientation sign times value, reduced mod M.
    pub fn integrate(&self) -> Result<i64> {
        let d = self.complex.dim();
        if self.degree != d {
            return input(format!("integration needs a degree-{d} cochain, got degree {}", self.degree));
        }
        match (self.complex.orientation(), self.modulus) {
            (_, 2) if self.complex.orientation().is_none() => {
                Ok(self.values.iter().sum::<i64>().rem_euclid(2))
            }
            (Some(o), m) => {
                let s: i64 = o.iter().zip(&self.values).map(|(a, b)| a * b).sum();
                Ok(reduce(s, m))
            }
            (None, _) => Err(Error::Precondition(
                "orientation required for Z_M integration".into(),
            )),
        }
    }

    pub fn to_json(&self) -> String {
        let doc = CochainJson {
            degree: self.degree,
            modulus: self.modulus,
            values: self.values.clone(),
            lift: self.lift.as_ref().map(|l| l.values.clone()),
            lift_base: self.lift.as_ref().map(|l| l.base),
        };
        serde_json::to_string(&doc).expect("serializable")
    }

    pub fn from_json(complex: &Arc<CellComplex>, text: &str) -> Result<Cochain> {
        let doc: CochainJson = serde_json::from_str(text)?;
        let c = Cochain::from_values(complex, doc.degree, doc.modulus, doc.values)?;
        match doc.lift {
            Some(l) => {
                let base = doc.lift_base.unwrap_or(doc.modulus);
                c.with_lift(base, l)
            }
            None => Ok(c),
        }
    }

    /// Pullback along an order-preserving vertex map `phi` from this cochain's
    /// complex to `target`'s vertex set: `(φ*f)(σ) = f(φσ)` when `φσ` is a
    /// nondegenerate simplex, else 0.
    pub fn pullback(&self, target: &Arc<CellComplex>, phi: &dyn Fn(u32) -> u32) -> Result<Cochain> {
        if !self.complex.is_simplicial() || !target.is_simplicial() {
            return unsupported("pullback is defined for simplicial complexes");
        }
        let k = self.degree;
        let mut buf = Vec::with_capacity(k + 1);
        let values = target
            .cells(k)
            .iter()
            .map(|key| {
                buf.clear();
                buf.extend(key.iter().map(|&v| phi(v)));
                if buf.windows(2).any(|w| w[0] >= w[1]) {
                    return 0;
                }
                self.complex
                    .cell_index(k, &buf)
                    .map_or(0, |i| self.values[i])
            })
            .collect();
        let mut c = Cochain {
            complex: target.clone(),
            degree: k,
            modulus: self.modulus,
            values,
            lift: None,
        };
        if let Some(l) = &self.lift {
            let lifted = Cochain {
                complex: self.complex.clone(),
                degree: k,
                modulus: 0,
                values: l.values.clone(),
                lift: None,
            }
            .pullback(target, phi)?;
            c.lift = Some(Lift {
                base: l.base,
                values: lifted.values,
            });
        }
        Ok(c)
    }
}
