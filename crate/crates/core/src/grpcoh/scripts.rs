//! Shipped boundary-chain scripts: a bulk cup-product cocycle, a chain of
//! nested subgroups and the expected images.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};

use super::cochain::GroupCochain;
use super::group::FiniteAbelianGroup;
use super::solve::{iterate_boundary, BoundaryChain, BoundaryChoice, BoundaryStep};

const SHIPPED: &[&str] = &[
    include_str!("../../data/scenarios/boundary/cz-to-s.json"),
    include_str!("../../data/scenarios/boundary/ccz-to-cs.json"),
    include_str!("../../data/scenarios/boundary/simplex-n2.json"),
    include_str!("../../data/scenarios/boundary/simplex-n3.json"),
    include_str!("../../data/scenarios/boundary/simplex-n4.json"),
];

/// `coeff · x_{c0} ∪ x_{c1} ∪ …` with coordinate lifts in `0..N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CupMonomial {
    pub coords: Vec<usize>,
    #[serde(default = "one")]
    pub coeff: i64,
    #[serde(default)]
    pub modulus: Option<u64>,
}

fn one() -> i64 {
    1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptStep {
    pub label: String,
    pub generators: Vec<Vec<i64>>,
    pub modulus: u64,
}

/// One product term of an expected stage; `slots[j]` lists the coordinate
/// lifts multiplied in argument `j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotTerm {
    #[serde(default = "one")]
    pub coeff: i64,
    pub slots: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedStage {
    pub stage: usize,
    pub terms: Vec<SlotTerm>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryScript {
    pub name: String,
    pub title: String,
    pub anchor: String,
    pub source: String,
    pub orders: Vec<u64>,
    pub omega: CupMonomial,
    pub steps: Vec<ScriptStep>,
    #[serde(default)]
    pub expected: Vec<ExpectedStage>,
    #[serde(default)]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScriptOutcome {
    pub name: String,
    pub passed: bool,
    /// Per stage after the input: label, modulus and denominator.
    pub stages: Vec<(String, u64, u64)>,
    /// Denominators of the pinned formulas, by stage label.
    pub expected: Vec<(String, u64)>,
    pub mismatch: Option<String>,
}

impl BoundaryScript {
    pub fn from_json(text: &str) -> Result<BoundaryScript> {
        Ok(serde_json::from_str(text)?)
    }

    fn expected_cochain(&self, e: &ExpectedStage, domain: Arc<super::group::Subgroup>, degree: usize, modulus: u64) -> Result<GroupCochain> {
        let terms: Vec<(i64, Vec<Vec<usize>>)> = e.terms.iter().map(|t| (t.coeff, t.slots.clone())).collect();
        GroupCochain::slot_polynomial(domain, degree, modulus, &terms)
    }

    /// Runs the chain. With `prefer`, every stage that has an expected
    /// formula is pinned to it, which fixes the cocycle choice the way an
    /// explicit formula does; other stages choose automatically.
    pub fn chain(&self, prefer: bool) -> Result<BoundaryChain> {
        let g = FiniteAbelianGroup::new(self.orders.clone())?;
        let whole = Arc::new(g.whole());
        let m = self.omega.modulus.unwrap_or_else(|| g.exponent());
        let omega = GroupCochain::coordinate_cup(whole, &self.omega.coords, self.omega.coeff, m)?;
        let mut steps = Vec::new();
        for (i, s) in self.steps.iter().enumerate() {
            let subgroup = Arc::new(g.subgroup(&s.generators)?);
            let choice = match self.expected.iter().find(|e| e.stage == i + 1) {
                Some(e) if prefer => {
                    let degree = omega.degree().checked_sub(i + 1).ok_or_else(|| {
                        Error::Input(format!("{}: more steps than the cocycle degree", self.name))
                    })?;
                    BoundaryChoice::Prefer(self.expected_cochain(e, subgroup.clone(), degree, s.modulus)?)
                }
                _ => BoundaryChoice::Auto,
            };
            steps.push(BoundaryStep {
                label: s.label.clone(),
                subgroup,
                modulus: s.modulus,
                choice,
            });
        }
        iterate_boundary(&omega, &steps)
    }

    /// Checks that each expected stage trivializes the previous one, i.e.
    /// agrees with the solver up to a cocycle, and reports denominators.
    pub fn run(&self) -> Result<ScriptOutcome> {
        for e in &self.expected {
            if e.stage == 0 || e.stage > self.steps.len() {
                return input(format!("{}: no stage {}", self.name, e.stage));
            }
        }
        let g = FiniteAbelianGroup::new(self.orders.clone())?;
        let mut expected = Vec::new();
        for e in &self.expected {
            let step = &self.steps[e.stage - 1];
            let dom = Arc::new(g.subgroup(&step.generators)?);
            let degree = self.omega.coords.len().checked_sub(e.stage).ok_or_else(|| {
                Error::Input(format!("{}: stage {} exceeds the cocycle degree", self.name, e.stage))
            })?;
            let c = self.expected_cochain(e, dom, degree, step.modulus)?;
            expected.push((step.label.clone(), c.denominator()));
        }
        let (chain, mismatch) = match self.chain(true) {
            Ok(c) => (Some(c), None),
            // report the stages the automatic choice reaches, if any
            Err(Error::Precondition(msg)) => (self.chain(false).ok(), Some(msg)),
            Err(e) => return Err(e),
        };
        let stages = chain.map_or_else(Vec::new, |c| {
            c.stages[1..]
                .iter()
                .zip(&self.steps)
                .map(|(c, s)| (s.label.clone(), c.modulus(), c.denominator()))
                .collect()
        });
        Ok(ScriptOutcome {
            name: self.name.clone(),
            passed: mismatch.is_none(),
            stages,
            expected,
            mismatch,
        })
    }
}

pub fn shipped_boundary_scripts() -> Vec<BoundaryScript> {
    SHIPPED
        .iter()
        .map(|t| BoundaryScript::from_json(t).expect("shipped boundary scripts parse"))
        .collect()
}
