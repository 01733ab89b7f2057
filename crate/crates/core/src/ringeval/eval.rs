//! Gate expressions evaluated on flat connections in a presented ring.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{input, unsupported, Error, Result};
use crate::synth::{Expr, GateExpression};
use crate::verify::logical::{grid_points, newton_polynomial};
use crate::verify::{LogicalVariable, PhasePolynomial};

use super::ring::{CohomologyRing, NamedMonomial, RingElement};

const GRID_CAP: usize = 1 << 20;

/// `coeff · variable · monomial`; without a variable the term is a fixed
/// background value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectionTerm {
    #[serde(default)]
    pub variable: Option<String>,
    #[serde(default = "one")]
    pub coeff: i64,
    pub monomial: NamedMonomial,
}

fn one() -> i64 {
    1
}

/// One gauge field: a `Z_modulus` class spanned by ring monomials.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldAssignment {
    pub modulus: u64,
    pub terms: Vec<ConnectionTerm>,
}

/// Field `aK` is `fields[K]`. Every variable takes values in `Z_order` with
/// the order of the field it appears in, and enters through its least
/// nonnegative residue.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlatConnection {
    pub fields: Vec<FieldAssignment>,
    #[serde(default)]
    pub constants: BTreeMap<String, FieldAssignment>,
}

impl FlatConnection {
    /// Variables in first-appearance order with their orders.
    pub fn variables(&self) -> Result<Vec<LogicalVariable>> {
        let mut out: Vec<LogicalVariable> = Vec::new();
        for f in &self.fields {
            for t in &f.terms {
                let Some(v) = &t.variable else { continue };
                match out.iter().find(|x| &x.label == v) {
                    Some(x) if x.order != f.modulus => {
                        return input(format!("variable {v} appears in fields of different moduli"));
                    }
                    Some(_) => {}
                    None => out.push(LogicalVariable {
                        label: v.clone(),
                        order: f.modulus,
                    }),
                }
            }
        }
        for (name, c) in &self.constants {
            if c.terms.iter().any(|t| t.variable.is_some()) {
                return input(format!("constant {name} must not carry logical variables"));
            }
        }
        Ok(out)
    }

    /// Shorthand used by the shipped scenarios: field `k` is
    /// `Σ_i var_i · monomial_i` over `Z_modulus`.
    pub fn simple(fields: &[(u64, &[(&str, &str)])], ring: &CohomologyRing) -> Result<FlatConnection> {
        let mut out = FlatConnection {
            fields: Vec::new(),
            constants: BTreeMap::new(),
        };
        for (modulus, terms) in fields {
            let mut ts = Vec::new();
            for (var, mono) in terms.iter() {
                let e = ring.parse_element(mono)?;
                let (m, &c) = e
                    .terms
                    .iter()
                    .next()
                    .filter(|_| e.terms.len() == 1)
                    .ok_or_else(|| Error::Input(format!("\"{mono}\" is not a single nonzero monomial")))?;
                ts.push(ConnectionTerm {
                    variable: Some(var.to_string()),
                    coeff: c as i64,
                    monomial: ring.named(m),
                });
            }
            out.fields.push(FieldAssignment {
                modulus: *modulus,
                terms: ts,
            });
        }
        Ok(out)
    }
}

struct Prepared<'a> {
    ring: &'a CohomologyRing,
    /// Per field: (variable index or none, coefficient, exponents).
    fields: Vec<Vec<(Option<usize>, i128, Vec<u32>)>>,
    constants: BTreeMap<&'a str, RingElement>,
}

impl<'a> Prepared<'a> {
    fn new(ring: &'a CohomologyRing, conn: &'a FlatConnection, vars: &[LogicalVariable]) -> Result<Prepared<'a>> {
        let mut fields = Vec::new();
        for (k, f) in conn.fields.iter().enumerate() {
            if f.modulus < 2 {
                return input(format!("field a{k} needs a modulus of at least 2"));
            }
            let mut ts = Vec::new();
            let mut degree = None;
            for t in &f.terms {
                let e = ring.exponents(&t.monomial)?;
                let d = ring.monomial_degree(&e);
                if degree.is_some_and(|x| x != d) {
                    return input(format!("field a{k} mixes degrees {} and {d}", degree.unwrap_or(0)));
                }
                degree = Some(d);
                let v = t.variable.as_ref().map(|v| vars.iter().position(|x| &x.label == v).expect("collected"));
                ts.push((v, t.coeff as i128, e));
            }
            fields.push(ts);
        }
        let mut constants = BTreeMap::new();
        for (name, c) in &conn.constants {
            let mut acc = RingElement::zero();
            for t in &c.terms {
                acc = acc.add(&ring.monomial(ring.exponents(&t.monomial)?, t.coeff as i128))?;
            }
            constants.insert(name.as_str(), acc);
        }
        Ok(Prepared { ring, fields, constants })
    }

    fn field_degree(&self, conn: &FlatConnection, k: usize) -> Option<usize> {
        let f = conn.fields.get(k)?;
        Some(f.terms.first().map_or(0, |t| {
            self.ring.monomial_degree(&self.ring.exponents(&t.monomial).expect("checked"))
        }))
    }

    fn eval(&self, e: &Expr, point: &[u64]) -> Result<RingElement> {
        let r = self.ring;
        Ok(match e {
            Expr::Field(k) => {
                let mut acc = RingElement::zero();
                for (v, c, m) in &self.fields[*k] {
                    let x = v.map_or(1, |v| point[v] as i128);
                    acc = acc.add(&r.monomial(m.clone(), c * x))?;
                }
                acc
            }
            Expr::Const(name) => self.constants[name.as_str()].clone(),
            Expr::Cup(fs) => {
                let mut acc = r.one();
                for f in fs {
                    acc = r.mul(&acc, &self.eval(f, point)?)?;
                }
                acc
            }
            Expr::Sq(i, x) => r.sq(*i, &self.eval(x, point)?)?,
            Expr::CupI(i, x, y) => {
                if x != y {
                    return unsupported("ring mode evaluates CUPI(i,x,y) only for x = y, where it is a Steenrod square");
                }
                let v = self.eval(x, point)?;
                let p = degree_of(r, &v).unwrap_or(0);
                if *i > p {
                    RingElement::zero().reduce(2)
                } else {
                    r.sq(p - i, &v)?
                }
            }
            Expr::Pont(x, n) => {
                let v = self.eval(x, point)?;
                if v.precision.is_some() {
                    return unsupported(format!(
                        "PONT({x},{n}) in ring mode needs an integral lift, but its argument is only known mod {}",
                        v.precision.unwrap_or(0)
                    ));
                }
                if !r.lift_coboundary(&v)?.is_zero() {
                    return unsupported(format!(
                        "PONT({x},{n}) in ring mode needs an integrally closed lift (da = 0); twisted corrections are not implemented"
                    ));
                }
                r.pow(&v, *n)?
            }
        })
    }
}

fn degree_of(r: &CohomologyRing, x: &RingElement) -> Option<usize> {
    x.terms.keys().next().map(|e| r.monomial_degree(e))
}

/// Coefficient modulus of an expression: fields carry their own, a cup the
/// gcd of its factors, `PONT(x,n)` raises it n-fold and squares are mod 2.
fn expr_modulus(e: &Expr, conn: &FlatConnection) -> Result<u64> {
    Ok(match e {
        Expr::Field(k) => conn.fields[*k].modulus,
        Expr::Const(s) => conn.constants[s.as_str()].modulus,
        Expr::Cup(fs) => {
            let mut m = 0u64;
            for f in fs {
                m = num_integer::gcd(m, expr_modulus(f, conn)?);
            }
            m
        }
        Expr::CupI(_, x, _) | Expr::Sq(_, x) => {
            let m = expr_modulus(x, conn)?;
            if m % 2 != 0 {
                return input(format!("Steenrod squares need an even modulus, got {m}"));
            }
            2
        }
        Expr::Pont(x, n) => {
            let m = expr_modulus(x, conn)?;
            if *n < 1 || m % *n as u64 != 0 {
                return input(format!("PONT(..,{n}) needs {n} to divide the modulus {m}"));
            }
            m * *n as u64
        }
    })
}

/// Phase polynomial of `expr` on the flat connection, evaluated exactly on
/// every assignment of the logical variables.
pub fn ring_evaluate(expr: &GateExpression, ring: &CohomologyRing, conn: &FlatConnection) -> Result<PhasePolynomial> {
    let vars = conn.variables()?;
    let prepared = Prepared::new(ring, conn, &vars)?;
    for t in &expr.terms {
        for k in t.expr.fields() {
            if k >= conn.fields.len() {
                return input(format!("expression uses a{k} but the connection has {} fields", conn.fields.len()));
            }
        }
        for c in t.expr.constants() {
            if !conn.constants.contains_key(&c) {
                return input(format!("no constant \"{c}\" in the connection"));
            }
        }
        let d = t.expr.degree(&|k| prepared.field_degree(conn, k), &|s| {
            let c = conn.constants.get(s)?;
            match c.terms.first() {
                Some(t) => Some(ring.monomial_degree(&ring.exponents(&t.monomial).ok()?)),
                None => Some(0),
            }
        })?;
        if d != ring.top_degree() {
            return input(format!("term {} has degree {d}, the ring has top degree {}", t.expr, ring.top_degree()));
        }
        let m = expr_modulus(&t.expr, conn)?;
        let need = t.den / num_integer::gcd(t.num.unsigned_abs(), t.den);
        if m % need != 0 {
            return input(format!(
                "phase {}/{} of a mod-{m} expression is not well defined",
                t.num, t.den
            ));
        }
    }
    let den = expr.denominator();
    let orders: Vec<u64> = vars.iter().map(|v| v.order).collect();
    let total: u128 = orders.iter().map(|&o| o as u128).product();
    if total > GRID_CAP as u128 {
        return Err(Error::Budget(format!("{total} logical assignments exceed the cap of {GRID_CAP}")));
    }
    let points = grid_points(&orders);
    let values: Vec<u64> = points
        .par_iter()
        .map(|p| {
            let mut acc: i128 = 0;
            for t in &expr.terms {
                let v = prepared.eval(&t.expr, p)?;
                let (value, precision) = ring.integrate(&v);
                let need = t.den / num_integer::gcd(t.num.unsigned_abs(), t.den);
                if precision.is_some_and(|m| m % need != 0) {
                    return unsupported(format!(
                        "∫{} is only known mod {} but the phase needs it mod {need}",
                        t.expr,
                        precision.unwrap_or(0)
                    ));
                }
                let scaled = (t.num as i128).rem_euclid(den as i128) * (den / t.den) as i128 % den as i128;
                acc = (acc + scaled * value.rem_euclid(den as i128)) % den as i128;
            }
            Ok(acc as u64)
        })
        .collect::<Result<_>>()?;
    let modulus = orders.iter().fold(1u64, |m, &o| num_integer::lcm(m, o));
    Ok(newton_polynomial(modulus, den, vars, &orders, points, &values, true))
}

/// `Sq^i x` in a mod-2 ring, in normal form.
pub fn ring_sq(i: usize, x: &RingElement, ring: &CohomologyRing) -> Result<RingElement> {
    ring.sq(i, x)
}
