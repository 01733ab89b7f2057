//! Shipped ring-mode scenarios: a ring, a flat connection, an expression
//! and the expected logical gate.

use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::synth::GateExpression;
use crate::verify::logical::grid_points;
use crate::verify::PhasePolynomial;

use super::eval::{ring_evaluate, FlatConnection};
use super::ring::CohomologyRing;

const FILES: &[&str] = &[
    include_str!("../../data/scenarios/ring/cp2xcp2-CS.json"),
    include_str!("../../data/scenarios/ring/cp2xcp2-N2-l2.json"),
    include_str!("../../data/scenarios/ring/cp16-CR4.json"),
    include_str!("../../data/scenarios/ring/cp8-CT.json"),
    include_str!("../../data/scenarios/ring/cp4pow4-C3R2.json"),
    include_str!("../../data/scenarios/ring/rp8-Z.json"),
    include_str!("../../data/scenarios/ring/t3xrp5-CZ.json"),
    include_str!("../../data/scenarios/ring/t2xcp2-mixed.json"),
    include_str!("../../data/scenarios/ring/cp2-R2.json"),
    include_str!("../../data/scenarios/ring/cp4-R3.json"),
    include_str!("../../data/scenarios/ring/cp8-R4.json"),
];

/// `exp(2πi num/den · Π variables)`, variables as least residues.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedTerm {
    pub variables: Vec<String>,
    pub num: i64,
    pub den: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SimpleField {
    pub modulus: u64,
    /// `[variable, monomial]` pairs.
    pub terms: Vec<(String, String)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RingScenario {
    pub name: String,
    pub title: String,
    /// Quoted statement the expected gate is taken from.
    pub anchor: String,
    pub ring: String,
    pub fields: Vec<SimpleField>,
    pub expression: String,
    pub expected: Vec<ExpectedTerm>,
    /// `published` when the expected gate is quoted, `derived` when it was
    /// computed independently.
    pub source: String,
    #[serde(default)]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScenarioOutcome {
    pub name: String,
    pub passed: bool,
    pub computed: String,
    pub expected: String,
    pub note: Option<String>,
    /// First assignment where the phases differ.
    pub mismatch: Option<Vec<u64>>,
}

pub fn shipped_scenarios() -> Vec<RingScenario> {
    FILES
        .iter()
        .map(|t| serde_json::from_str(t).expect("shipped scenario parses"))
        .collect()
}

impl RingScenario {
    pub fn from_json(text: &str) -> Result<RingScenario> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn build(&self) -> Result<(CohomologyRing, FlatConnection, GateExpression)> {
        let ring = CohomologyRing::from_spec(&self.ring)?;
        let fields: Vec<(u64, Vec<(&str, &str)>)> = self
            .fields
            .iter()
            .map(|f| (f.modulus, f.terms.iter().map(|(v, m)| (v.as_str(), m.as_str())).collect()))
            .collect();
        let borrowed: Vec<(u64, &[(&str, &str)])> = fields.iter().map(|(m, t)| (*m, t.as_slice())).collect();
        let conn = FlatConnection::simple(&borrowed, &ring)?;
        let expr = GateExpression::parse(&self.expression)?;
        Ok((ring, conn, expr))
    }

    /// Evaluates the scenario and compares phases on every assignment.
    pub fn run(&self) -> Result<ScenarioOutcome> {
        let (ring, conn, expr) = self.build()?;
        let poly = ring_evaluate(&expr, &ring, &conn)?;
        let mismatch = compare(&poly, &self.expected)?;
        Ok(ScenarioOutcome {
            name: self.name.clone(),
            passed: mismatch.is_none(),
            computed: poly.describe(),
            expected: describe_expected(&self.expected),
            note: self.note.clone(),
            mismatch,
        })
    }
}

fn describe_expected(terms: &[ExpectedTerm]) -> String {
    terms
        .iter()
        .map(|t| format!("{}/{}*{}", t.num, t.den, t.variables.join("*")))
        .collect::<Vec<_>>()
        .join(" + ")
}

/// First grid point where `poly` and the expected terms disagree.
fn compare(poly: &PhasePolynomial, expected: &[ExpectedTerm]) -> Result<Option<Vec<u64>>> {
    let den = expected.iter().fold(poly.denominator, |m, t| num_integer::lcm(m, t.den));
    let index = |v: &str| poly.variables.iter().position(|x| x.label == v);
    for t in expected {
        if let Some(v) = t.variables.iter().find(|v| index(v).is_none()) {
            return input(format!("expected term names unknown variable {v}"));
        }
    }
    let orders: Vec<u64> = poly.variables.iter().map(|v| v.order).collect();
    for p in grid_points(&orders) {
        let got = poly.evaluate(&p) * (den / poly.denominator) % den;
        let want = expected.iter().fold(0i128, |acc, t| {
            let prod: i128 = t.variables.iter().map(|v| p[index(v).expect("checked")] as i128).product();
            acc + t.num as i128 * (den / t.den) as i128 * prod
        });
        if got as i128 != want.rem_euclid(den as i128) {
            return Ok(Some(p));
        }
    }
    Ok(None)
}
