//! Cell complexes: ordered simplicial complexes, periodic cubical tori and
//! open cubical boxes.
//!
//! A simplicial cell is stored as its strictly increasing vertex tuple, so the
//! global vertex order is simply the numeric vertex id. A cubical cell of the
//! torus or box is stored as its base coordinates followed by a bitmask of the
//! axes it spans.

use std::collections::{HashMap, HashSet};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};

pub type CellKey = Box<[u32]>;

static NEXT_UID: AtomicU64 = AtomicU64::new(1);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ComplexKind {
    Simplicial,
    /// Periodic cubical torus with the given side length per axis.
    Torus { dims: Vec<u32> },
    /// Cubical box `[0, L_1] × … × [0, L_n]` with open boundary.
    Box { sides: Vec<u32> },
}

/// Records how a product complex was built, so cochains on the factors can be
/// pulled back along the two projections.
#[derive(Clone, Debug)]
pub struct ProductInfo {
    pub left: Arc<CellComplex>,
    pub right: Arc<CellComplex>,
    /// `pairs[v]` is the (left vertex id, right vertex id) of product vertex `v`.
    pub pairs: Vec<(u32, u32)>,
}

#[derive(Clone, Debug)]
pub struct CellComplex {
    name: String,
    kind: ComplexKind,
    dim: usize,
    cells: Vec<Vec<CellKey>>,
    index: Vec<HashMap<CellKey, usize>>,
    faces: Vec<Vec<Vec<(usize, i64)>>>,
    facets: Vec<CellKey>,
    orientation: Option<Vec<i64>>,
    pure: bool,
    uid: u64,
    product: Option<ProductInfo>,
    /// Coordinate ranges of a cubical complex (side length on a torus,
    /// `L + 1` vertices per axis on a box).
    grid: Option<Vec<u32>>,
}

/// One named check of [`CellComplex::validate`].
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failed(&self, name: &str) -> bool {
        self.checks.iter().any(|c| c.name == name && !c.pass)
    }
}

#[derive(Serialize, Deserialize)]
struct ComplexJson {
    name: String,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    facets: Option<Vec<Vec<u32>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dims: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    orientation: Option<Vec<i64>>,
}

fn next_uid() -> u64 {
    NEXT_UID.fetch_add(1, Ordering::Relaxed)
}

impl CellComplex {
    /// Builds a simplicial complex from its facets, generating every face.
    ///
    /// Facets of different dimensions are accepted; [`CellComplex::is_pure`]
    /// reports whether all facets share the top dimension.
    pub fn from_facets(name: &str, facets: &[Vec<u32>]) -> Result<CellComplex> {
        if facets.is_empty() {
            return input("no facets given");
        }
        let mut seen = HashSet::new();
        let mut sorted_facets: Vec<CellKey> = Vec::with_capacity(facets.len());
        for (i, f) in facets.iter().enumerate() {
            if f.is_empty() {
                return input(format!("facet {i} is empty"));
            }
            let mut s = f.clone();
            s.sort_unstable();
            if s.windows(2).any(|w| w[0] == w[1]) {
                return input(format!("facet {i} repeats a vertex"));
            }
            let key: CellKey = s.into_boxed_slice();
            if !seen.insert(key.clone()) {
                return input(format!("facet {i} is a duplicate"));
            }
            sorted_facets.push(key);
        }
        let dim = sorted_facets.iter().map(|f| f.len() - 1).max().unwrap();
        let pure = sorted_facets.iter().all(|f| f.len() - 1 == dim);
        let mut sets: Vec<HashSet<CellKey>> = vec![HashSet::new(); dim + 1];
        let mut buf = Vec::with_capacity(dim + 1);
        for f in &sorted_facets {
            let n = f.len();
            for mask in 1u32..(1u32 << n) {
                buf.clear();
                for (j, &v) in f.iter().enumerate() {
                    if mask & (1 << j) != 0 {
                        buf.push(v);
                    }
                }
                let k = buf.len() - 1;
                if !sets[k].contains(buf.as_slice()) {
                    sets[k].insert(buf.clone().into_boxed_slice());
                }
            }
        }
        let mut cells: Vec<Vec<CellKey>> = sets
            .into_iter()
            .map(|s| {
                let mut v: Vec<CellKey> = s.into_iter().collect();
                v.sort_unstable();
                v
            })
            .collect();
        for c in cells.iter_mut() {
            c.shrink_to_fit();
        }
        let index = build_index(&cells);
        let mut faces = Vec::with_capacity(dim + 1);
        faces.push(vec![Vec::new(); cells[0].len()]);
        for k in 1..=dim {
            let fk: Vec<Vec<(usize, i64)>> = cells[k]
                .iter()
                .map(|c| {
                    (0..c.len())
                        .map(|i| {
                            let face: Vec<u32> = c
                                .iter()
                                .enumerate()
                                .filter(|&(j, _)| j != i)
                                .map(|(_, &v)| v)
                                .collect();
                            let sign = if i % 2 == 0 { 1 } else { -1 };
                            (index[k - 1][face.as_slice()], sign)
                        })
                        .collect()
                })
                .collect();
            faces.push(fk);
        }
        let mut facets_sorted = sorted_facets;
        facets_sorted.sort_unstable();
        Ok(CellComplex {
            name: name.to_string(),
            kind: ComplexKind::Simplicial,
            dim,
            cells,
            index,
            faces,
            facets: facets_sorted,
            orientation: None,
            pure,
            uid: next_uid(),
            product: None,
            grid: None,
        })
    }

    /// Periodic cubical torus of dimension `n` and side length `l`.
    pub fn torus_lattice(n: usize, l: u32) -> Result<CellComplex> {
        if n == 0 {
            return input("torus dimension must be at least 1");
        }
        Self::torus(&vec![l; n])
    }

    /// Periodic cubical torus with per-axis side lengths.
    pub fn torus(dims: &[u32]) -> Result<CellComplex> {
        let n = dims.len();
        if n == 0 || n > 16 {
            return input("torus dimension must be between 1 and 16");
        }
        if let Some(&l) = dims.iter().find(|&&l| l < 2) {
            return input(format!("torus side length {l} < 2 gives degenerate identifications"));
        }
        let mut c = Self::cubical(dims.to_vec(), |_, _| true);
        c.name = format!("T{}({})", n, join_dims(dims));
        c.kind = ComplexKind::Torus { dims: dims.to_vec() };
        let top = c.cells[n].len();
        c.orientation = Some(vec![1; top]);
        Ok(c)
    }

    /// Open cubical box with the given number of unit intervals per axis.
    /// Top cubes carry no orientation since the box is not closed.
    pub fn cubical_box(sides: &[u32]) -> Result<CellComplex> {
        let n = sides.len();
        if n == 0 || n > 16 {
            return input("box dimension must be between 1 and 16");
        }
        if sides.contains(&0) {
            return input("box side length must be positive");
        }
        let grid: Vec<u32> = sides.iter().map(|&l| l + 1).collect();
        let mut c = Self::cubical(grid, |key, mask| {
            (0..n).all(|a| mask & (1 << a) == 0 || key[a] < sides[a])
        });
        c.name = format!("box({})", join_dims(sides));
        c.kind = ComplexKind::Box { sides: sides.to_vec() };
        Ok(c)
    }

    fn cubical(grid: Vec<u32>, keep: impl Fn(&[u32], u32) -> bool) -> CellComplex {
        let n = grid.len();
        let volume: usize = grid.iter().map(|&l| l as usize).product();
        let mut cells: Vec<Vec<CellKey>> = vec![Vec::new(); n + 1];
        for k in 0..=n {
            for mask in masks_with_popcount(n, k) {
                for lin in 0..volume {
                    let mut key = decode_base(lin, &grid);
                    if !keep(&key, mask) {
                        continue;
                    }
                    key.push(mask);
                    cells[k].push(key.into_boxed_slice());
                }
            }
        }
        let index = build_index(&cells);
        let mut faces = Vec::with_capacity(n + 1);
        faces.push(vec![Vec::new(); cells[0].len()]);
        for k in 1..=n {
            let fk = cells[k]
                .iter()
                .map(|c| {
                    let mask = c[n];
                    let axes: Vec<usize> = (0..n).filter(|&a| mask & (1 << a) != 0).collect();
                    let mut out = Vec::with_capacity(2 * axes.len());
                    for (j, &a) in axes.iter().enumerate() {
                        let sign = if j % 2 == 0 { 1 } else { -1 };
                        let mut lower: Vec<u32> = c.to_vec();
                        lower[n] = mask & !(1 << a);
                        let mut upper = lower.clone();
                        upper[a] = (upper[a] + 1) % grid[a];
                        out.push((index[k - 1][upper.as_slice()], sign));
                        out.push((index[k - 1][lower.as_slice()], -sign));
                    }
                    out
                })
                .collect();
            faces.push(fk);
        }
        CellComplex {
            name: String::new(),
            kind: ComplexKind::Simplicial,
            dim: n,
            facets: cells[n].clone(),
            cells,
            index,
            faces,
            orientation: None,
            pure: true,
            uid: next_uid(),
            product: None,
            grid: Some(grid),
        }
    }

    /// Staircase triangulation of `a × b`. Product vertices are ordered
    /// lexicographically by (left vertex, right vertex).
    pub fn product(a: &Arc<CellComplex>, b: &Arc<CellComplex>) -> Result<CellComplex> {
        if !a.is_simplicial() || !b.is_simplicial() {
            return input("products are defined for simplicial complexes only");
        }
        let va: Vec<u32> = a.cells[0].iter().map(|c| c[0]).collect();
        let vb: Vec<u32> = b.cells[0].iter().map(|c| c[0]).collect();
        let pos_a: HashMap<u32, usize> = va.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let pos_b: HashMap<u32, usize> = vb.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let nb = vb.len();
        let id = |x: u32, y: u32| (pos_a[&x] * nb + pos_b[&y]) as u32;
        let mut facets = Vec::new();
        let mut signs = Vec::new();
        let oriented = a.orientation.is_some() && b.orientation.is_some() && a.pure && b.pure;
        for (ia, fa) in a.facets.iter().enumerate() {
            for (ib, fb) in b.facets.iter().enumerate() {
                let (p, q) = (fa.len() - 1, fb.len() - 1);
                for path in staircase_paths(p, q) {
                    let (mut s, mut t) = (0usize, 0usize);
                    let mut simplex = vec![id(fa[0], fb[0])];
                    for &step in &path {
                        if step {
                            s += 1;
                        } else {
                            t += 1;
                        }
                        simplex.push(id(fa[s], fb[t]));
                    }
                    facets.push(simplex);
                    if oriented {
                        let oa = a.top_orientation_of(ia);
                        let ob = b.top_orientation_of(ib);
                        signs.push(oa * ob * shuffle_sign(&path));
                    }
                }
            }
        }
        let mut c = CellComplex::from_facets(&format!("{}x{}", a.name, b.name), &facets)?;
        if oriented {
            let mut o = vec![0i64; c.cells[c.dim].len()];
            for (f, s) in facets.iter().zip(signs) {
                o[c.index[c.dim][f.as_slice()]] = s;
            }
            c.orientation = Some(o);
        }
        let mut pairs = Vec::with_capacity(va.len() * nb);
        for &x in &va {
            for &y in &vb {
                pairs.push((x, y));
            }
        }
        c.product = Some(ProductInfo {
            left: a.clone(),
            right: b.clone(),
            pairs,
        });
        Ok(c)
    }

    fn top_orientation_of(&self, facet: usize) -> i64 {
        let key = &self.facets[facet];
        let o = self.orientation.as_ref().expect("oriented");
        o[self.index[self.dim][key]]
    }

    /// Parses the complex JSON format.
    pub fn from_json(text: &str) -> Result<CellComplex> {
        let doc: ComplexJson = serde_json::from_str(text)?;
        let mut c = match doc.kind.as_str() {
            "simplicial" => {
                let facets = doc
                    .facets
                    .as_ref()
                    .ok_or_else(|| Error::Input("simplicial complex needs \"facets\"".into()))?;
                CellComplex::from_facets(&doc.name, facets)?
            }
            "torus" => {
                let dims = doc
                    .dims
                    .ok_or_else(|| Error::Input("torus needs \"dims\"".into()))?;
                CellComplex::torus(&dims)?
            }
            "box" => {
                let sides = doc
                    .dims
                    .ok_or_else(|| Error::Input("box needs \"dims\"".into()))?;
                CellComplex::cubical_box(&sides)?
            }
            other => return input(format!("unknown complex kind \"{other}\"")),
        };
        c.name = doc.name;
        if let Some(o) = doc.orientation {
            if c.is_simplicial() {
                let facets = doc.facets.as_ref().unwrap();
                c.set_facet_orientation(facets, &o)?;
            } else if o.len() != c.cells[c.dim].len() {
                return input("orientation length does not match the number of top cells");
            } else {
                c.orientation = Some(o);
            }
        }
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        let doc = match &self.kind {
            ComplexKind::Simplicial => ComplexJson {
                name: self.name.clone(),
                kind: "simplicial".into(),
                facets: Some(self.facets.iter().map(|f| f.to_vec()).collect()),
                dims: None,
                orientation: self.orientation.as_ref().map(|o| {
                    self.facets
                        .iter()
                        .map(|f| o[self.index[self.dim][f]])
                        .collect()
                }),
            },
            ComplexKind::Torus { dims } => ComplexJson {
                name: self.name.clone(),
                kind: "torus".into(),
                facets: None,
                dims: Some(dims.clone()),
                orientation: None,
            },
            ComplexKind::Box { sides } => ComplexJson {
                name: self.name.clone(),
                kind: "box".into(),
                facets: None,
                dims: Some(sides.clone()),
                orientation: None,
            },
        };
        serde_json::to_string_pretty(&doc).expect("serializable")
    }

    /// Attaches orientation coefficients given in facet-list order. The
    /// coefficients are not checked here; [`CellComplex::validate`] does that.
    pub fn set_facet_orientation(&mut self, facets: &[Vec<u32>], coeffs: &[i64]) -> Result<()> {
        if !self.pure {
            return input("orientation requires a pure complex");
        }
        if facets.len() != coeffs.len() {
            return input(format!(
                "orientation has {} entries but there are {} facets",
                coeffs.len(),
                facets.len()
            ));
        }
        let mut o = vec![0i64; self.cells[self.dim].len()];
        for (f, &s) in facets.iter().zip(coeffs) {
            let mut key = f.clone();
            key.sort_unstable();
            let i = self.index[self.dim]
                .get(key.as_slice())
                .ok_or_else(|| Error::Input(format!("orientation refers to unknown facet {f:?}")))?;
            o[*i] = s;
        }
        self.orientation = Some(o);
        Ok(())
    }

    /// Replaces the orientation with per-top-cell coefficients (cell order).
    pub fn with_orientation(mut self, coeffs: Vec<i64>) -> Result<CellComplex> {
        if coeffs.len() != self.cells[self.dim].len() {
            return input("orientation length does not match the number of top cells");
        }
        self.orientation = Some(coeffs);
        Ok(self)
    }

    /// Copy of the complex with one boundary coefficient negated. Used to
    /// exercise [`CellComplex::validate`] on a broken complex.
    pub fn with_flipped_sign(&self, k: usize, cell: usize, entry: usize) -> CellComplex {
        let mut c = self.clone();
        c.faces[k][cell][entry].1 *= -1;
        c.uid = next_uid();
        c
    }

    pub fn validate(&self) -> ValidationReport {
        let mut checks = Vec::new();
        let mut bad = None;
        'outer: for k in 2..=self.dim {
            for (ci, f) in self.faces[k].iter().enumerate() {
                let mut acc: HashMap<usize, i64> = HashMap::new();
                for &(t, s) in f {
                    for &(u, r) in &self.faces[k - 1][t] {
                        *acc.entry(u).or_default() += s * r;
                    }
                }
                if acc.values().any(|&v| v != 0) {
                    bad = Some((k, ci));
                    break 'outer;
                }
            }
        }
        checks.push(Check {
            name: "boundary-squared".into(),
            pass: bad.is_none(),
            detail: match bad {
                None => "d∘d = 0 in every degree".into(),
                Some((k, c)) => format!("nonzero d∘d on {}-cell {}", k, c),
            },
        });
        let mut closure = true;
        if self.is_simplicial() {
            'cl: for k in 1..=self.dim {
                for c in &self.cells[k] {
                    for i in 0..c.len() {
                        let face: Vec<u32> = c
                            .iter()
                            .enumerate()
                            .filter(|&(j, _)| j != i)
                            .map(|(_, &v)| v)
                            .collect();
                        if !self.index[k - 1].contains_key(face.as_slice()) {
                            closure = false;
                            break 'cl;
                        }
                    }
                }
            }
        }
        checks.push(Check {
            name: "face-closure".into(),
            pass: closure,
            detail: if closure { "all faces stored".into() } else { "missing face".into() },
        });
        if let Some(o) = &self.orientation {
            let mut acc = vec![0i64; self.cells[self.dim.saturating_sub(1)].len()];
            if self.dim > 0 {
                for (c, &s) in o.iter().enumerate() {
                    for &(t, r) in &self.faces[self.dim][c] {
                        acc[t] += s * r;
                    }
                }
            }
            let ok = acc.iter().all(|&v| v == 0) && o.iter().any(|&v| v != 0);
            checks.push(Check {
                name: "orientation-cycle".into(),
                pass: ok,
                detail: if ok {
                    "orientation is a nonzero integer cycle".into()
                } else {
                    "boundary of the orientation chain is nonzero".into()
                },
            });
        }
        checks.push(Check {
            name: "pure".into(),
            pass: true,
            detail: if self.pure { "pure".into() } else { "facets of mixed dimension".into() },
        });
        ValidationReport { checks }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &ComplexKind {
        &self.kind
    }

    pub fn is_simplicial(&self) -> bool {
        matches!(self.kind, ComplexKind::Simplicial)
    }

    pub fn torus_dims(&self) -> Option<&[u32]> {
        match &self.kind {
            ComplexKind::Torus { dims } => Some(dims),
            _ => None,
        }
    }

    /// Vertex coordinate ranges of a cubical complex; `None` when simplicial.
    /// Cell keys of cubical complexes wrap modulo these values.
    pub fn grid(&self) -> Option<&[u32]> {
        self.grid.as_deref()
    }

    pub fn is_cubical(&self) -> bool {
        self.grid.is_some()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_pure(&self) -> bool {
        self.pure
    }

    /// Identifier shared by clones; used to detect cochains on different complexes.
    pub fn uid(&self) -> u64 {
        self.uid
    }

    pub fn num_cells(&self, k: usize) -> usize {
        self.cells.get(k).map_or(0, |c| c.len())
    }

    pub fn cells(&self, k: usize) -> &[CellKey] {
        self.cells.get(k).map_or(&[], |c| c.as_slice())
    }

    pub fn cell_index(&self, k: usize, key: &[u32]) -> Option<usize> {
        self.index.get(k).and_then(|m| m.get(key).copied())
    }

    /// Signed faces of the `i`-th `k`-cell: the `i`-th column of ∂_k.
    pub fn faces(&self, k: usize, i: usize) -> &[(usize, i64)] {
        &self.faces[k][i]
    }

    pub fn facets(&self) -> &[CellKey] {
        &self.facets
    }

    pub fn orientation(&self) -> Option<&[i64]> {
        self.orientation.as_deref()
    }

    pub fn product_info(&self) -> Option<&ProductInfo> {
        self.product.as_ref()
    }

    pub fn f_vector(&self) -> Vec<usize> {
        self.cells.iter().map(|c| c.len()).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.cells
            .iter()
            .enumerate()
            .map(|(k, c)| if k % 2 == 0 { c.len() as i64 } else { -(c.len() as i64) })
            .sum()
    }

    /// Dense integer matrix of ∂_k (rows: (k−1)-cells, columns: k-cells).
    pub fn boundary_matrix(&self, k: usize) -> Vec<Vec<i64>> {
        let rows = if k == 0 { 0 } else { self.num_cells(k - 1) };
        let cols = self.num_cells(k);
        let mut m = vec![vec![0i64; cols]; rows];
        if k > 0 && k <= self.dim {
            for (j, f) in self.faces[k].iter().enumerate() {
                for &(i, s) in f {
                    m[i][j] += s;
                }
            }
        }
        m
    }

    /// Cofaces of every `k`-cell: the `(k+1)`-cells having it as a face, with sign.
    pub fn cofaces(&self, k: usize) -> Vec<Vec<(usize, i64)>> {
        let mut out = vec![Vec::new(); self.num_cells(k)];
        if k < self.dim {
            for (c, f) in self.faces[k + 1].iter().enumerate() {
                for &(t, s) in f {
                    out[t].push((c, s));
                }
            }
        }
        out
    }

    /// For every `k`-cell, the top cells whose closure contains it.
    pub fn top_cells_containing(&self, k: usize) -> Vec<Vec<usize>> {
        let d = self.dim;
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); self.num_cells(k)];
        if k > d {
            return out;
        }
        for top in 0..self.num_cells(d) {
            let mut layer: Vec<usize> = vec![top];
            for j in (k..d).rev() {
                let mut next: Vec<usize> = layer
                    .iter()
                    .flat_map(|&c| self.faces[j + 1][c].iter().map(|&(f, _)| f))
                    .collect();
                next.sort_unstable();
                next.dedup();
                layer = next;
            }
            for c in layer {
                out[c].push(top);
            }
        }
        out
    }
}

fn build_index(cells: &[Vec<CellKey>]) -> Vec<HashMap<CellKey, usize>> {
    cells
        .iter()
        .map(|cs| cs.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect())
        .collect()
}

fn join_dims(dims: &[u32]) -> String {
    dims.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(",")
}

pub(crate) fn masks_with_popcount(n: usize, k: usize) -> Vec<u32> {
    (0u32..(1u32 << n)).filter(|m| m.count_ones() as usize == k).collect()
}

pub(crate) fn decode_base(mut lin: usize, dims: &[u32]) -> Vec<u32> {
    dims.iter()
        .map(|&l| {
            let x = (lin % l as usize) as u32;
            lin /= l as usize;
            x
        })
        .collect()
}

/// All step sequences with `p` left-steps (`true`) and `q` right-steps.
pub(crate) fn staircase_paths(p: usize, q: usize) -> Vec<Vec<bool>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(p + q);
    fn rec(p: usize, q: usize, cur: &mut Vec<bool>, out: &mut Vec<Vec<bool>>) {
        if p == 0 && q == 0 {
            out.push(cur.clone());
            return;
        }
        if p > 0 {
            cur.push(true);
            rec(p - 1, q, cur, out);
            cur.pop();
        }
        if q > 0 {
            cur.push(false);
            rec(p, q - 1, cur, out);
            cur.pop();
        }
    }
    rec(p, q, &mut cur, &mut out);
    out
}

/// Sign of the shuffle permutation placing left-steps before right-steps.
pub(crate) fn shuffle_sign(path: &[bool]) -> i64 {
    let mut rights = 0usize;
    let mut inv = 0usize;
    for &s in path {
        if s {
            inv += rights;
        } else {
            rights += 1;
        }
    }
    if inv.is_multiple_of(2) {
        1
    } else {
        -1
    }
}
