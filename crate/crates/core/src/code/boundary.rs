//! Boundary codes: copies of the Z₂ 1-form gauge theory on a complex with
//! gapped boundary regions. Each region keeps an unbroken subgroup `K` of
//! Z₂^Nc; a cell lying in several regions keeps the intersection.
//!
//! Stabilizers follow from the labels: at a vertex with label `K` there is
//! one truncated Gauss-law product per generator of `K`, and on an edge with
//! label `K` there is one Z product per generator of the annihilator of `K`.

use std::sync::Arc;

use serde::Serialize;

use super::{CodeCopy, CssCode, SparseVec};
use crate::complex::CellComplex;
use crate::error::{input, Result};
use crate::homology::modular::nullspace_mod_p;

/// Subgroup of Z₂^n stored as a reduced echelon basis of bitmasks
/// (bit `j` is copy `j`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Subgroup {
    n: usize,
    gens: Vec<u32>,
}

impl Subgroup {
    pub fn span(n: usize, gens: &[u32]) -> Subgroup {
        let mut basis: Vec<u32> = Vec::new();
        for &g in gens {
            let mut v = g & ((1 << n) - 1);
            for &b in &basis {
                v = v.min(v ^ b);
            }
            if v != 0 {
                basis.push(v);
                basis.sort_unstable_by(|a, b| b.cmp(a));
            }
        }
        // full reduction: clear each leading bit from the other rows
        for i in 0..basis.len() {
            let lead = 31 - basis[i].leading_zeros();
            for j in 0..basis.len() {
                if j != i && basis[j] & (1 << lead) != 0 {
                    basis[j] ^= basis[i];
                }
            }
        }
        basis.sort_unstable_by(|a, b| b.cmp(a));
        Subgroup { n, gens: basis }
    }

    pub fn full(n: usize) -> Subgroup {
        Subgroup::span(n, &(0..n).map(|j| 1 << j).collect::<Vec<_>>())
    }

    pub fn trivial(n: usize) -> Subgroup {
        Subgroup { n, gens: Vec::new() }
    }

    pub fn ambient_rank(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[u32] {
        &self.gens
    }

    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    pub fn contains(&self, v: u32) -> bool {
        let mut v = v;
        for &b in &self.gens {
            v = v.min(v ^ b);
        }
        v == 0
    }

    pub fn elements(&self) -> Vec<u32> {
        (0u32..(1 << self.n)).filter(|&v| self.contains(v)).collect()
    }

    /// Vectors with even overlap with every element.
    pub fn annihilator(&self) -> Subgroup {
        let ann: Vec<u32> = (0u32..(1 << self.n))
            .filter(|&v| self.gens.iter().all(|&g| (g & v).count_ones() % 2 == 0))
            .collect();
        Subgroup::span(self.n, &ann)
    }

    pub fn intersect(&self, other: &Subgroup) -> Subgroup {
        let both: Vec<u32> = self.elements().into_iter().filter(|&v| other.contains(v)).collect();
        Subgroup::span(self.n, &both)
    }

    /// Bit pattern of copies, 1-based as in `Z₂^(1,2)`.
    pub fn describe(&self) -> String {
        if self.gens.is_empty() {
            return "1".into();
        }
        self.gens
            .iter()
            .rev()
            .map(|&g| format!("Z2^({})", pattern_name(g)))
            .collect::<Vec<_>>()
            .join("x")
    }
}

/// `0b101` → `"1,3"`.
pub fn pattern_name(g: u32) -> String {
    (0..32)
        .filter(|j| g & (1 << j) != 0)
        .map(|j| (j + 1).to_string())
        .collect::<Vec<_>>()
        .join(",")
}

#[derive(Clone, Debug, Serialize)]
pub struct Region {
    pub name: String,
    pub subgroup: Subgroup,
    /// `members[k][c]`: whether `k`-cell `c` lies in the region.
    #[serde(skip)]
    pub members: Vec<Vec<bool>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Pauli {
    X,
    Z,
}

/// Provenance of one check of a boundary code.
#[derive(Clone, Debug, Serialize)]
pub struct CheckInfo {
    pub pauli: Pauli,
    /// Degree and index of the cell the check is attached to.
    pub degree: usize,
    pub cell: usize,
    /// Copies acted on, as a bitmask.
    pub pattern: u32,
    /// Names of the regions containing the cell, empty in the bulk.
    pub location: Vec<String>,
}

/// Placement of the six faces F1..F6 on a box: `F(j+1)` lies on axis
/// `axis[j]` at coordinate 0 when `at_zero[j]`, otherwise at L; `F(6-j)` is
/// the opposite face.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CubeGeometry {
    pub axis: [usize; 3],
    pub at_zero: [bool; 3],
}

impl CubeGeometry {
    /// F1 on `x = 0`, F2 on `y = L`, F3 on `z = 0`. With the cubical cup
    /// running from the lowest corner of each cube, this is a placement for
    /// which the cube gate commutes with the stabilizers.
    pub const DEFAULT: CubeGeometry = CubeGeometry {
        axis: [0, 1, 2],
        at_zero: [true, false, true],
    };

    /// All 48 placements.
    pub fn all() -> Vec<CubeGeometry> {
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let mut out = Vec::with_capacity(48);
        for axis in perms {
            for bits in 0..8u32 {
                out.push(CubeGeometry {
                    axis,
                    at_zero: [bits & 1 == 0, bits & 2 == 0, bits & 4 == 0],
                });
            }
        }
        out
    }

    /// Axis and coordinate (as "low" flag) of face `F(f)`, `f` in 1..=6.
    fn face(&self, f: usize) -> (usize, bool) {
        if f <= 3 {
            (self.axis[f - 1], self.at_zero[f - 1])
        } else {
            (self.axis[6 - f], !self.at_zero[6 - f])
        }
    }
}

#[derive(Clone, Debug)]
pub struct BoundaryCode {
    name: String,
    complex: Arc<CellComplex>,
    factors: usize,
    regions: Vec<Region>,
    labels: Vec<Vec<Subgroup>>,
    code: CssCode,
    info: Vec<CheckInfo>,
    reference: Vec<Vec<u64>>,
    geometry: Option<CubeGeometry>,
}

impl BoundaryCode {
    /// Builds the code from the complex, the number of Z₂ factors and the
    /// regions. `reference` holds logical configurations, if known.
    pub fn new(name: &str, complex: Arc<CellComplex>, factors: usize, regions: Vec<Region>) -> Result<BoundaryCode> {
        if factors == 0 || factors > 16 {
            return input("number of Z2 factors must be between 1 and 16");
        }
        if complex.dim() < 2 {
            return input("boundary codes need a complex of dimension at least 2");
        }
        let full = Subgroup::full(factors);
        let labels: Vec<Vec<Subgroup>> = (0..=complex.dim())
            .map(|k| {
                (0..complex.num_cells(k))
                    .map(|c| {
                        regions
                            .iter()
                            .filter(|r| r.members[k][c])
                            .fold(full.clone(), |acc, r| acc.intersect(&r.subgroup))
                    })
                    .collect()
            })
            .collect();
        let copies: Vec<CodeCopy> = (0..factors)
            .map(|_| CodeCopy {
                complex: complex.clone(),
                degree: 1,
            })
            .collect();
        let ne = complex.num_cells(1);
        let location = |k: usize, c: usize| -> Vec<String> {
            regions.iter().filter(|r| r.members[k][c]).map(|r| r.name.clone()).collect()
        };
        let mut x_checks = Vec::new();
        let mut z_checks = Vec::new();
        let mut info = Vec::new();
        let cof = complex.cofaces(0);
        for (v, edges) in cof.iter().enumerate() {
            for &g in labels[0][v].generators() {
                let mut s: SparseVec = Vec::new();
                for j in (0..factors).filter(|j| g & (1 << j) != 0) {
                    s.extend(edges.iter().map(|&(e, _)| (j * ne + e, 1)));
                }
                s.sort_unstable();
                x_checks.push(s);
                info.push(CheckInfo {
                    pauli: Pauli::X,
                    degree: 0,
                    cell: v,
                    pattern: g,
                    location: location(0, v),
                });
            }
        }
        for p in 0..complex.num_cells(2) {
            for j in 0..factors {
                let mut s: SparseVec = complex.faces(2, p).iter().map(|&(e, _)| (j * ne + e, 1)).collect();
                s.sort_unstable();
                z_checks.push(s);
                info.push(CheckInfo {
                    pauli: Pauli::Z,
                    degree: 2,
                    cell: p,
                    pattern: 1 << j,
                    location: location(2, p),
                });
            }
        }
        for e in 0..ne {
            if labels[1][e] == full {
                continue;
            }
            for &h in labels[1][e].annihilator().generators() {
                let s: SparseVec = (0..factors).filter(|j| h & (1 << j) != 0).map(|j| (j * ne + e, 1)).collect();
                z_checks.push(s);
                info.push(CheckInfo {
                    pauli: Pauli::Z,
                    degree: 1,
                    cell: e,
                    pattern: h,
                    location: location(1, e),
                });
            }
        }
        let code = CssCode::from_checks(copies, 2, x_checks, z_checks);
        Ok(BoundaryCode {
            name: name.to_string(),
            complex,
            factors,
            regions,
            labels,
            code,
            info,
            reference: Vec::new(),
            geometry: None,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn complex(&self) -> &Arc<CellComplex> {
        &self.complex
    }

    pub fn factors(&self) -> usize {
        self.factors
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn region(&self, name: &str) -> Option<&Region> {
        self.regions.iter().find(|r| r.name == name)
    }

    /// Unbroken subgroup carried by `k`-cell `c`.
    pub fn label(&self, k: usize, c: usize) -> &Subgroup {
        &self.labels[k][c]
    }

    pub fn code(&self) -> &CssCode {
        &self.code
    }

    /// Provenance of the checks: X-checks first, then Z-checks, in the
    /// order of [`CssCode::x_checks`] and [`CssCode::z_checks`].
    pub fn check_info(&self) -> &[CheckInfo] {
        &self.info
    }

    pub fn geometry(&self) -> Option<CubeGeometry> {
        self.geometry
    }

    /// Logical configurations: index 0 is the trivial one, index 1 the
    /// nontrivial flat configuration.
    pub fn reference_configurations(&self) -> &[Vec<u64>] {
        &self.reference
    }

    /// Names of the regions containing `k`-cell `c`.
    pub fn location(&self, k: usize, c: usize) -> Vec<&str> {
        self.regions.iter().filter(|r| r.members[k][c]).map(|r| r.name.as_str()).collect()
    }

    /// Logical dimension from the stabilizer rank deficit.
    pub fn logical_dimension(&self) -> u128 {
        self.code.logical_dimension().value().expect("small code")
    }

    /// Whether configuration `z` (one bit per copy and edge) satisfies every
    /// Z-check: flat in the bulk and inside the label on every edge.
    pub fn is_admissible(&self, z: &[u64]) -> bool {
        self.code
            .z_checks()
            .iter()
            .all(|c| c.iter().map(|&(q, e)| e * z[q]).sum::<u64>() % 2 == 0)
    }

    /// Every hinge check: a cell's label equals the intersection of the
    /// labels of the regions containing it. Returns offending cells.
    pub fn label_violations(&self) -> Vec<(usize, usize)> {
        let full = Subgroup::full(self.factors);
        let mut bad = Vec::new();
        for k in 0..=self.complex.dim() {
            for c in 0..self.complex.num_cells(k) {
                let expect = self
                    .regions
                    .iter()
                    .filter(|r| r.members[k][c])
                    .fold(full.clone(), |acc, r| acc.intersect(&r.subgroup));
                // labels only shrink towards lower-dimensional strata
                let cofaces_ok = k == self.complex.dim()
                    || self.complex.cofaces(k)[c]
                        .iter()
                        .all(|&(u, _)| self.labels[k + 1][u].intersect(&self.labels[k][c]) == self.labels[k][c]);
                if expect != self.labels[k][c] || !cofaces_ok {
                    bad.push((k, c));
                }
            }
        }
        bad
    }

    /// Finds a flat configuration outside the X-stabilizer span.
    fn nontrivial_configuration(&self) -> Option<Vec<u64>> {
        let rows: Vec<Vec<u64>> = self
            .code
            .z_checks()
            .iter()
            .map(|c| {
                let mut r = vec![0u64; self.code.num_qudits()];
                for &(q, e) in c {
                    r[q] = e;
                }
                r
            })
            .collect();
        nullspace_mod_p(&rows, self.code.num_qudits(), 2)
            .into_iter()
            .find(|v| !self.code.in_x_span(v))
    }
}

fn simplex_subsets(c: &CellComplex, vertices: &[u32]) -> Vec<Vec<bool>> {
    (0..=c.dim())
        .map(|k| c.cells(k).iter().map(|cell| cell.iter().all(|v| vertices.contains(v))).collect())
        .collect()
}

/// Code on a single `Nc`-simplex with `Nc` copies of the Z₂ gauge theory.
///
/// The face opposite vertex `j ≥ 1` breaks the `j`-th factor; the face
/// opposite vertex 0 keeps the diagonal pairs `Z₂^(j,j+1)`.
pub fn simplex_code(nc: usize) -> Result<BoundaryCode> {
    if !(2..=5).contains(&nc) {
        return input(format!("simplex codes are constructed for 2 to 5 factors, got {nc}"));
    }
    let top: Vec<u32> = (0..=nc as u32).collect();
    let complex = Arc::new(CellComplex::from_facets(&format!("simplex{nc}"), std::slice::from_ref(&top))?);
    let mut regions = Vec::new();
    for j in 0..=nc as u32 {
        let face: Vec<u32> = top.iter().copied().filter(|&v| v != j).collect();
        let subgroup = if j == 0 {
            Subgroup::span(nc, &(0..nc - 1).map(|i| 0b11 << i).collect::<Vec<_>>())
        } else {
            let keep: Vec<u32> = (0..nc).filter(|&i| i != j as usize - 1).map(|i| 1 << i).collect();
            Subgroup::span(nc, &keep)
        };
        regions.push(Region {
            name: format!("({})", face.iter().map(|v| v.to_string()).collect::<String>()),
            subgroup,
            members: simplex_subsets(&complex, &face),
        });
    }
    let mut code = BoundaryCode::new(&format!("simplex-{nc}"), complex.clone(), nc, regions)?;
    let ne = complex.num_cells(1);
    let mut one = vec![0u64; nc * ne];
    for (e, key) in complex.cells(1).iter().enumerate() {
        let (a, b) = (key[0] as usize, key[1] as usize);
        // holonomy e_b on (0b), e_a + e_b on (ab)
        one[(b - 1) * ne + e] = 1;
        if a > 0 {
            one[(a - 1) * ne + e] = 1;
        }
    }
    code.reference = vec![vec![0u64; nc * ne], one];
    Ok(code)
}

/// Three copies of the Z₂ gauge theory on an `L×L×L` box. F1, F2, F3
/// condense `(m2, m3, e1)` and its cyclic shifts; F4, F5, F6 keep
/// `Z₂^(1,2) × Z₂^(2,3)`.
pub fn cube_code(l: u32) -> Result<BoundaryCode> {
    cube_code_with(l, CubeGeometry::DEFAULT)
}

pub fn cube_code_with(l: u32, geometry: CubeGeometry) -> Result<BoundaryCode> {
    if l < 2 {
        return input("cube side length must be at least 2");
    }
    let complex = Arc::new(CellComplex::cubical_box(&[l, l, l])?);
    let mut regions = Vec::new();
    for f in 1..=6 {
        let (axis, low) = geometry.face(f);
        let at = if low { 0 } else { l };
        let members: Vec<Vec<bool>> = (0..=3)
            .map(|k| {
                complex
                    .cells(k)
                    .iter()
                    .map(|key| key[axis] == at && key[3] & (1 << axis) == 0)
                    .collect()
            })
            .collect();
        let subgroup = if f <= 3 {
            let keep: Vec<u32> = (0..3).filter(|&i| i != f - 1).map(|i| 1 << i).collect();
            Subgroup::span(3, &keep)
        } else {
            Subgroup::span(3, &[0b011, 0b110])
        };
        regions.push(Region {
            name: format!("F{f}"),
            subgroup,
            members,
        });
    }
    let mut code = BoundaryCode::new(&format!("cube-{l}"), complex.clone(), 3, regions)?;
    code.geometry = Some(geometry);
    let one = code.nontrivial_configuration().unwrap_or_default();
    let zero = vec![0u64; code.code.num_qudits()];
    code.reference = vec![zero, one];
    Ok(code)
}
