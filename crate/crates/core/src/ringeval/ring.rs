//! Presented graded-commutative cohomology rings and their elements.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};

/// A monomial written as a map from generator name to exponent.
pub type NamedMonomial = BTreeMap<String, u32>;

/// Integral lift rule `d(lift g) = coeff · monomial`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftRule {
    pub coeff: i64,
    pub monomial: NamedMonomial,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    pub degree: usize,
    /// 0 for an integral class, otherwise the order of the class.
    pub modulus: u64,
    /// `None` when the integral lift is closed.
    #[serde(default)]
    pub lift: Option<LiftRule>,
    /// `Sq^1` of the generator as a sum of monomials mod 2; `None` when
    /// unknown. Ignored for degree-1 generators, where it is the square.
    #[serde(default)]
    pub sq1: Option<Vec<NamedMonomial>>,
    /// Squares to zero. Defaults to odd-degree integral generators.
    #[serde(default)]
    pub exterior: Option<bool>,
}

impl Generator {
    fn is_exterior(&self) -> bool {
        self.exterior.unwrap_or(self.degree % 2 == 1 && self.modulus == 0)
    }
}

/// Ring JSON layout.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct RingDoc {
    #[serde(default)]
    name: String,
    generators: Vec<Generator>,
    #[serde(default)]
    relations: Vec<NamedMonomial>,
    top: NamedMonomial,
}

/// Generators, monomial relations and a top monomial with integral 1.
/// Monomials are exponent vectors in generator order, read as the ordered
/// product `g_0^{e_0} g_1^{e_1} ⋯`.
#[derive(Clone, Debug)]
pub struct CohomologyRing {
    name: String,
    generators: Vec<Generator>,
    exterior: Vec<bool>,
    relations: Vec<Vec<u32>>,
    top: Vec<u32>,
}

/// Sum of normal-form monomials with integer coefficients, known exactly
/// (`precision = None`) or modulo `precision`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RingElement {
    pub terms: BTreeMap<Vec<u32>, i128>,
    pub precision: Option<u64>,
}

fn checked(v: Option<i128>) -> Result<i128> {
    v.ok_or_else(|| Error::Overflow("ring coefficient exceeds 128 bits".into()))
}

fn combine_precision(a: Option<u64>, b: Option<u64>) -> Option<u64> {
    match (a, b) {
        (None, p) | (p, None) => p,
        (Some(x), Some(y)) => Some(num_integer::gcd(x, y)),
    }
}

impl RingElement {
    pub fn zero() -> RingElement {
        RingElement::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn normalize(mut self) -> RingElement {
        if let Some(m) = self.precision {
            for v in self.terms.values_mut() {
                *v = v.rem_euclid(m as i128);
            }
        }
        self.terms.retain(|_, v| *v != 0);
        self
    }

    pub fn add(&self, other: &RingElement) -> Result<RingElement> {
        let mut out = self.clone();
        out.precision = combine_precision(self.precision, other.precision);
        for (m, &c) in &other.terms {
            let slot = out.terms.entry(m.clone()).or_insert(0);
            *slot = checked(slot.checked_add(c))?;
        }
        Ok(out.normalize())
    }

    pub fn scale(&self, k: i128) -> Result<RingElement> {
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = checked(v.checked_mul(k))?;
        }
        Ok(out.normalize())
    }

    /// The element known only modulo `m`.
    pub fn reduce(&self, m: u64) -> RingElement {
        RingElement {
            terms: self.terms.clone(),
            precision: combine_precision(self.precision, Some(m)),
        }
        .normalize()
    }
}

impl CohomologyRing {
    pub fn new(
        name: &str,
        generators: Vec<Generator>,
        relations: Vec<NamedMonomial>,
        top: NamedMonomial,
    ) -> Result<CohomologyRing> {
        for (i, g) in generators.iter().enumerate() {
            if g.degree == 0 {
                return input(format!("generator {} has degree 0", g.name));
            }
            if generators[..i].iter().any(|h| h.name == g.name) {
                return input(format!("generator {} appears twice", g.name));
            }
        }
        let mut ring = CohomologyRing {
            name: name.to_string(),
            exterior: generators.iter().map(Generator::is_exterior).collect(),
            generators,
            relations: Vec::new(),
            top: Vec::new(),
        };
        ring.relations = relations.iter().map(|r| ring.exponents(r)).collect::<Result<_>>()?;
        ring.top = ring.exponents(&top)?;
        if ring.monomial_is_zero(&ring.top) {
            return input("the top monomial vanishes by the relations");
        }
        for g in &ring.generators {
            if let Some(l) = &g.lift {
                let d = ring.monomial_degree(&ring.exponents(&l.monomial)?);
                if d != g.degree + 1 {
                    return input(format!("lift rule of {} has degree {d}, expected {}", g.name, g.degree + 1));
                }
            }
            if let Some(s) = &g.sq1 {
                for m in s {
                    let d = ring.monomial_degree(&ring.exponents(m)?);
                    if d != g.degree + 1 {
                        return input(format!("Sq^1 rule of {} has degree {d}, expected {}", g.name, g.degree + 1));
                    }
                }
            }
        }
        Ok(ring)
    }

    pub fn from_json(text: &str) -> Result<CohomologyRing> {
        let doc: RingDoc = serde_json::from_str(text)?;
        CohomologyRing::new(&doc.name, doc.generators, doc.relations, doc.top)
    }

    pub fn to_json(&self) -> String {
        let doc = RingDoc {
            name: self.name.clone(),
            generators: self.generators.clone(),
            relations: self.relations.iter().map(|r| self.named(r)).collect(),
            top: self.named(&self.top),
        };
        serde_json::to_string_pretty(&doc).expect("serializable")
    }

    /// `CP^n`: a Kähler class `w` of degree 2 with `w^{n+1} = 0`.
    pub fn complex_projective(n: u32) -> Result<CohomologyRing> {
        Self::truncated("w", 2, 0, None, Some(vec![]), n, &format!("cp{n}"))
    }

    /// `RP^n` mod 2: `x` of degree 1 with integral lift `d x = 2x²`.
    pub fn real_projective(n: u32) -> Result<CohomologyRing> {
        let lift = LiftRule {
            coeff: 2,
            monomial: BTreeMap::from([("x".to_string(), 2)]),
        };
        Self::truncated("x", 1, 2, Some(lift), None, n, &format!("rp{n}"))
    }

    fn truncated(
        name: &str,
        degree: usize,
        modulus: u64,
        lift: Option<LiftRule>,
        sq1: Option<Vec<NamedMonomial>>,
        n: u32,
        ring_name: &str,
    ) -> Result<CohomologyRing> {
        if n == 0 {
            return input("projective space dimension must be positive");
        }
        let g = Generator {
            name: name.into(),
            degree,
            modulus,
            lift,
            sq1,
            exterior: Some(false),
        };
        let m = |e: u32| BTreeMap::from([(name.to_string(), e)]);
        CohomologyRing::new(ring_name, vec![g], vec![m(n + 1)], m(n))
    }

    /// `T^k`: exterior algebra on integral degree-1 classes `y1..yk`.
    pub fn torus(k: usize) -> Result<CohomologyRing> {
        if k == 0 {
            return input("torus dimension must be positive");
        }
        let gens = (1..=k)
            .map(|i| Generator {
                name: format!("y{i}"),
                degree: 1,
                modulus: 0,
                lift: None,
                sq1: None,
                exterior: Some(true),
            })
            .collect::<Vec<_>>();
        let top = gens.iter().map(|g| (g.name.clone(), 1)).collect();
        CohomologyRing::new(&format!("t{k}"), gens, vec![], top)
    }

    /// Künneth product. Generator names must be distinct.
    pub fn product(a: &CohomologyRing, b: &CohomologyRing) -> Result<CohomologyRing> {
        let mut gens = a.generators.clone();
        gens.extend(b.generators.iter().cloned());
        let mut rels: Vec<NamedMonomial> = a.relations.iter().map(|r| a.named(r)).collect();
        rels.extend(b.relations.iter().map(|r| b.named(r)));
        let mut top = a.named(&a.top);
        top.extend(b.named(&b.top));
        CohomologyRing::new(&format!("{}*{}", a.name, b.name), gens, rels, top)
    }

    /// Parses `cp2*cp2`, `cp4^4`, `t3*rp5` and the like. Repeated factors of
    /// one kind get their generators numbered (`w1`, `w2`, …); torus
    /// generators are numbered across all torus factors.
    pub fn from_spec(spec: &str) -> Result<CohomologyRing> {
        let mut factors: Vec<(String, u32)> = Vec::new();
        for part in spec.split('*') {
            let part = part.trim().trim_start_matches('(');
            let (base, pow) = match part.split_once('^') {
                Some((b, p)) => (
                    b.trim_end_matches(')'),
                    p.parse::<usize>().map_err(|_| Error::Input(format!("bad power in \"{part}\"")))?,
                ),
                None => (part, 1),
            };
            let split = base.find(|c: char| c.is_ascii_digit()).unwrap_or(base.len());
            let (kind, dim) = base.split_at(split);
            let dim: u32 = dim
                .parse()
                .map_err(|_| Error::Input(format!("expected a dimension in ring factor \"{base}\"")))?;
            if !matches!(kind, "cp" | "rp" | "t") {
                return input(format!("unknown ring factor \"{base}\" (use cpN, rpN or tN)"));
            }
            for _ in 0..pow {
                factors.push((kind.to_string(), dim));
            }
        }
        let count = |k: &str| factors.iter().filter(|(f, _)| f == k).count();
        let mut seen: BTreeMap<String, usize> = BTreeMap::new();
        let mut torus_gens = 0usize;
        let mut ring: Option<CohomologyRing> = None;
        for (kind, dim) in &factors {
            let idx = seen.entry(kind.clone()).or_insert(0);
            *idx += 1;
            let mut r = match kind.as_str() {
                "cp" => CohomologyRing::complex_projective(*dim)?,
                "rp" => CohomologyRing::real_projective(*dim)?,
                _ => CohomologyRing::torus(*dim as usize)?,
            };
            if kind == "t" {
                r = r.renamed(|i, _| format!("y{}", torus_gens + i + 1));
                torus_gens += *dim as usize;
            } else if count(kind) > 1 {
                let k = *idx;
                r = r.renamed(|_, n| format!("{n}{k}"));
            }
            ring = Some(match ring {
                None => r,
                Some(acc) => CohomologyRing::product(&acc, &r)?,
            });
        }
        let mut ring = ring.ok_or_else(|| Error::Input("empty ring spec".into()))?;
        ring.name = spec.to_string();
        Ok(ring)
    }

    fn renamed(&self, f: impl Fn(usize, &str) -> String) -> CohomologyRing {
        let names: Vec<String> = self.generators.iter().enumerate().map(|(i, g)| f(i, &g.name)).collect();
        let map = |m: &NamedMonomial| -> NamedMonomial {
            m.iter()
                .map(|(k, &e)| {
                    let i = self.generators.iter().position(|g| &g.name == k).expect("own generator");
                    (names[i].clone(), e)
                })
                .collect()
        };
        let mut out = self.clone();
        for (g, n) in out.generators.iter_mut().zip(&names) {
            g.name = n.clone();
            if let Some(l) = &mut g.lift {
                l.monomial = map(&l.monomial);
            }
            if let Some(s) = &mut g.sq1 {
                *s = s.iter().map(&map).collect();
            }
        }
        out
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn top(&self) -> &[u32] {
        &self.top
    }

    pub fn top_degree(&self) -> usize {
        self.monomial_degree(&self.top)
    }

    pub fn monomial_degree(&self, e: &[u32]) -> usize {
        e.iter().zip(&self.generators).map(|(&x, g)| x as usize * g.degree).sum()
    }

    /// Exponent vector of a named monomial.
    pub fn exponents(&self, m: &NamedMonomial) -> Result<Vec<u32>> {
        let mut e = vec![0u32; self.generators.len()];
        for (name, &x) in m {
            let i = self
                .generators
                .iter()
                .position(|g| &g.name == name)
                .ok_or_else(|| Error::Input(format!("ring {} has no generator {name}", self.name)))?;
            e[i] += x;
        }
        Ok(e)
    }

    pub fn named(&self, e: &[u32]) -> NamedMonomial {
        e.iter()
            .zip(&self.generators)
            .filter(|(&x, _)| x > 0)
            .map(|(&x, g)| (g.name.clone(), x))
            .collect()
    }

    fn monomial_is_zero(&self, e: &[u32]) -> bool {
        e.iter().zip(&self.exterior).any(|(&x, &ext)| ext && x >= 2)
            || self.relations.iter().any(|r| r.iter().zip(e).all(|(a, b)| a <= b))
    }

    /// The element `coeff · monomial`, zero if the relations kill it.
    pub fn monomial(&self, e: Vec<u32>, coeff: i128) -> RingElement {
        let mut out = RingElement::zero();
        if !self.monomial_is_zero(&e) && coeff != 0 {
            out.terms.insert(e, coeff);
        }
        out
    }

    pub fn one(&self) -> RingElement {
        self.monomial(vec![0; self.generators.len()], 1)
    }

    /// Product of normal-form monomials with the graded sign.
    fn mul_monomials(&self, a: &[u32], b: &[u32]) -> Option<(Vec<u32>, i128)> {
        let e: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
        if self.monomial_is_zero(&e) {
            return None;
        }
        // moving each generator of b left past the later generators of a
        let deg = |i: usize| self.generators[i].degree as u64;
        let mut parity = 0u64;
        let mut later = 0u64;
        for j in (0..a.len()).rev() {
            parity += (b[j] as u64 * deg(j)) * later;
            later += a[j] as u64 * deg(j);
        }
        Some((e, if parity.is_multiple_of(2) { 1 } else { -1 }))
    }

    pub fn mul(&self, x: &RingElement, y: &RingElement) -> Result<RingElement> {
        let mut out = RingElement {
            terms: BTreeMap::new(),
            precision: combine_precision(x.precision, y.precision),
        };
        for (a, &ca) in &x.terms {
            for (b, &cb) in &y.terms {
                if let Some((e, s)) = self.mul_monomials(a, b) {
                    let c = checked(checked(ca.checked_mul(cb))?.checked_mul(s))?;
                    let slot = out.terms.entry(e).or_insert(0);
                    *slot = checked(slot.checked_add(c))?;
                }
            }
        }
        Ok(out.normalize())
    }

    pub fn pow(&self, x: &RingElement, n: usize) -> Result<RingElement> {
        let mut acc = self.one();
        acc.precision = x.precision;
        for _ in 0..n {
            acc = self.mul(&acc, x)?;
        }
        Ok(acc)
    }

    /// The monomial as its ordered list of generator factors.
    fn factors(e: &[u32]) -> Vec<usize> {
        e.iter().enumerate().flat_map(|(i, &x)| std::iter::repeat_n(i, x as usize)).collect()
    }

    fn generator(&self, i: usize) -> RingElement {
        let mut e = vec![0u32; self.generators.len()];
        e[i] = 1;
        self.monomial(e, 1)
    }

    fn named_sum(&self, ms: &[NamedMonomial]) -> Result<RingElement> {
        let mut acc = RingElement::zero();
        for m in ms {
            acc = acc.add(&self.monomial(self.exponents(m)?, 1))?;
        }
        Ok(acc)
    }

    /// Coboundary of the integral lift, extended by the graded Leibniz rule.
    pub fn lift_coboundary(&self, x: &RingElement) -> Result<RingElement> {
        let mut out = RingElement {
            terms: BTreeMap::new(),
            precision: x.precision,
        };
        for (e, &c) in &x.terms {
            let f = Self::factors(e);
            for t in 0..f.len() {
                let g = &self.generators[f[t]];
                let Some(rule) = &g.lift else { continue };
                let dg = self.monomial(self.exponents(&rule.monomial)?, rule.coeff as i128);
                let mut left = self.one();
                let mut left_deg = 0;
                for &i in &f[..t] {
                    left = self.mul(&left, &self.generator(i))?;
                    left_deg += self.generators[i].degree;
                }
                let mut term = self.mul(&left, &dg)?;
                for &i in &f[t + 1..] {
                    term = self.mul(&term, &self.generator(i))?;
                }
                let sign = if left_deg % 2 == 0 { c } else { -c };
                out = out.add(&term.scale(sign)?)?;
            }
        }
        Ok(out)
    }

    /// `Sq^i` of one generator, mod 2.
    fn sq_generator(&self, i: usize, g: usize) -> Result<RingElement> {
        let gen = &self.generators[g];
        let p = gen.degree;
        let x = self.generator(g);
        Ok(match i {
            0 => x,
            _ if i == p => self.mul(&x, &x)?,
            _ if i > p => RingElement::zero(),
            1 => match &gen.sq1 {
                Some(rule) => self.named_sum(rule)?,
                None => return input(format!("no Sq^1 rule for generator {}", gen.name)),
            },
            _ => return input(format!("no Sq^{i} rule for generator {} of degree {p}", gen.name)),
        }
        .reduce(2))
    }

    /// `Sq^i x` mod 2 by the Cartan formula on each monomial.
    pub fn sq(&self, i: usize, x: &RingElement) -> Result<RingElement> {
        let x = x.reduce(2);
        let mut out = RingElement::zero().reduce(2);
        for (e, &c) in &x.terms {
            // acc[s] = Sq^s of the factors seen so far
            let mut acc: Vec<RingElement> = vec![RingElement::zero().reduce(2); i + 1];
            acc[0] = self.one().reduce(2);
            let factors = Self::factors(e);
            for (pos, &g) in factors.iter().enumerate() {
                // the last factor only feeds Sq^i itself
                let from = if pos + 1 == factors.len() { i } else { 0 };
                let mut sq_g: Vec<Option<RingElement>> = vec![None; i + 1];
                let mut next = vec![RingElement::zero().reduce(2); i + 1];
                for s in from..=i {
                    for k in 0..=s {
                        if acc[s - k].is_zero() {
                            continue;
                        }
                        if sq_g[k].is_none() {
                            sq_g[k] = Some(self.sq_generator(k, g)?);
                        }
                        let sk = sq_g[k].as_ref().expect("filled");
                        if !sk.is_zero() {
                            next[s] = next[s].add(&self.mul(&acc[s - k], sk)?)?;
                        }
                    }
                }
                acc = next;
            }
            out = out.add(&acc[i].scale(c)?)?;
        }
        Ok(out)
    }

    /// `∫x`: the top coefficient, with the modulus it is known to. Top
    /// monomials containing a torsion generator integrate only mod 2.
    pub fn integrate(&self, x: &RingElement) -> (i128, Option<u64>) {
        let torsion = self
            .top
            .iter()
            .zip(&self.generators)
            .any(|(&e, g)| e > 0 && g.modulus != 0);
        let precision = if torsion {
            combine_precision(x.precision, Some(2))
        } else {
            x.precision
        };
        let v = x.terms.get(&self.top).copied().unwrap_or(0);
        (precision.map_or(v, |m| v.rem_euclid(m as i128)), precision)
    }

    /// Parses `x^3 + 2*y1*y2 - w^2`.
    pub fn parse_element(&self, text: &str) -> Result<RingElement> {
        let mut acc = RingElement::zero();
        let cleaned = text.replace('-', "+-");
        for term in cleaned.split('+').map(str::trim).filter(|t| !t.is_empty()) {
            let (sign, term) = match term.strip_prefix('-') {
                Some(t) => (-1i128, t.trim()),
                None => (1, term),
            };
            let mut coeff = sign;
            let mut e = vec![0u32; self.generators.len()];
            for f in term.split('*').map(str::trim) {
                if let Ok(k) = f.parse::<i128>() {
                    coeff *= k;
                    continue;
                }
                let (name, pow) = match f.split_once('^') {
                    Some((n, p)) => (n, p.parse::<u32>().map_err(|_| Error::Input(format!("bad exponent in \"{f}\"")))?),
                    None => (f, 1),
                };
                let m = BTreeMap::from([(name.to_string(), pow)]);
                // multiply in order so the graded sign is applied
                match self.mul_monomials(&e, &self.exponents(&m)?) {
                    Some((next, s)) => {
                        e = next;
                        coeff *= s;
                    }
                    None => {
                        coeff = 0;
                        break;
                    }
                }
            }
            if coeff != 0 {
                acc = acc.add(&self.monomial(e, coeff))?;
            }
        }
        Ok(acc)
    }

    /// Human-readable form, e.g. `x^5 + y1*y2`.
    pub fn format(&self, x: &RingElement) -> String {
        if x.is_zero() {
            return "0".into();
        }
        let parts: Vec<String> = x
            .terms
            .iter()
            .rev()
            .map(|(e, &c)| {
                let mono: Vec<String> = e
                    .iter()
                    .zip(&self.generators)
                    .filter(|(&k, _)| k > 0)
                    .map(|(&k, g)| if k == 1 { g.name.clone() } else { format!("{}^{k}", g.name) })
                    .collect();
                let mono = if mono.is_empty() { "1".to_string() } else { mono.join("*") };
                match c {
                    1 => mono,
                    _ => format!("{c}*{mono}"),
                }
            })
            .collect();
        let body = parts.join(" + ");
        match x.precision {
            Some(m) => format!("{body} (mod {m})"),
            None => body,
        }
    }
}
