//! Finite abelian groups `Z_N1 × … × Z_Nr` and their subgroups.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};

/// Largest subgroup we are willing to enumerate.
const ELEMENT_CAP: u64 = 1 << 12;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteAbelianGroup {
    orders: Vec<u64>,
}

impl FiniteAbelianGroup {
    pub fn new(orders: Vec<u64>) -> Result<FiniteAbelianGroup> {
        if orders.iter().any(|&n| n < 2) {
            return input("every cyclic factor needs order at least 2");
        }
        let total = orders.iter().try_fold(1u64, |acc, &n| acc.checked_mul(n));
        match total {
            Some(t) if t <= ELEMENT_CAP => Ok(FiniteAbelianGroup { orders }),
            _ => Err(Error::Budget(format!("group of orders {orders:?} has more than {ELEMENT_CAP} elements"))),
        }
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn order(&self) -> u64 {
        self.orders.iter().product()
    }

    /// Least common multiple of the factor orders.
    pub fn exponent(&self) -> u64 {
        self.orders.iter().fold(1, |m, &n| num_integer::lcm(m, n))
    }

    pub fn add(&self, g: &[u64], h: &[u64]) -> Vec<u64> {
        g.iter().zip(h).zip(&self.orders).map(|((a, b), n)| (a + b) % n).collect()
    }

    /// Reduces a tuple into canonical residues, checking its length.
    pub fn element(&self, g: &[i64]) -> Result<Vec<u64>> {
        if g.len() != self.orders.len() {
            return input(format!("element {g:?} has {} entries, the group has {} factors", g.len(), self.orders.len()));
        }
        Ok(g.iter().zip(&self.orders).map(|(&x, &n)| x.rem_euclid(n as i64) as u64).collect())
    }

    /// The group as a subgroup of itself.
    pub fn whole(&self) -> Subgroup {
        let gens: Vec<Vec<u64>> = (0..self.orders.len())
            .map(|i| (0..self.orders.len()).map(|j| u64::from(i == j)).collect())
            .collect();
        Subgroup::generated(self.clone(), gens)
    }

    /// Subgroup generated by the rows of `generators`.
    pub fn subgroup(&self, generators: &[Vec<i64>]) -> Result<Subgroup> {
        let gens = generators.iter().map(|g| self.element(g)).collect::<Result<Vec<_>>>()?;
        Ok(Subgroup::generated(self.clone(), gens))
    }
}

/// A subgroup with its elements enumerated in lexicographic order and an
/// addition table on their indices.
#[derive(Clone, Debug)]
pub struct Subgroup {
    group: FiniteAbelianGroup,
    generators: Vec<Vec<u64>>,
    elements: Vec<Vec<u64>>,
    index: HashMap<Vec<u64>, usize>,
    add: Vec<usize>,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group && self.elements == other.elements
    }
}

impl Eq for Subgroup {}

impl Subgroup {
    fn generated(group: FiniteAbelianGroup, generators: Vec<Vec<u64>>) -> Subgroup {
        let zero = vec![0u64; group.orders.len()];
        let mut elements = vec![zero];
        let mut frontier = 0;
        let mut seen: std::collections::HashSet<Vec<u64>> = elements.iter().cloned().collect();
        while frontier < elements.len() {
            let g = elements[frontier].clone();
            frontier += 1;
            for s in &generators {
                let h = group.add(&g, s);
                if seen.insert(h.clone()) {
                    elements.push(h);
                }
            }
        }
        elements.sort();
        let index: HashMap<Vec<u64>, usize> = elements.iter().cloned().enumerate().map(|(i, g)| (g, i)).collect();
        let n = elements.len();
        let mut add = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                add[i * n + j] = index[&group.add(&elements[i], &elements[j])];
            }
        }
        Subgroup {
            group,
            generators,
            elements,
            index,
            add,
        }
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn generators(&self) -> &[Vec<u64>] {
        &self.generators
    }

    pub fn elements(&self) -> &[Vec<u64>] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, g: &[u64]) -> bool {
        self.index.contains_key(g)
    }

    pub fn index_of(&self, g: &[u64]) -> Option<usize> {
        self.index.get(g).copied()
    }

    pub(crate) fn add_idx(&self, i: usize, j: usize) -> usize {
        self.add[i * self.elements.len() + j]
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.group == other.group && self.elements.iter().all(|g| other.contains(g))
    }

    pub fn to_doc(&self) -> SubgroupDoc {
        SubgroupDoc {
            orders: self.group.orders.clone(),
            generators: self.generators.iter().map(|g| g.iter().map(|&x| x as i64).collect()).collect(),
        }
    }
}

/// JSON form of a subgroup: the ambient factor orders and a generator matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupDoc {
    pub orders: Vec<u64>,
    pub generators: Vec<Vec<i64>>,
}

impl SubgroupDoc {
    pub fn build(&self) -> Result<Subgroup> {
        FiniteAbelianGroup::new(self.orders.clone())?.subgroup(&self.generators)
    }
}
