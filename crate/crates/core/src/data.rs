//! Triangulations shipped with the crate.

use std::sync::Arc;

use crate::complex::CellComplex;
use crate::error::{input, Result};

const COMPLEXES: &[(&str, &str)] = &[
    ("circle", include_str!("../data/complexes/circle.json")),
    ("rp2", include_str!("../data/complexes/rp2.json")),
    ("rp3", include_str!("../data/complexes/rp3.json")),
    ("klein", include_str!("../data/complexes/klein.json")),
    ("cp2", include_str!("../data/complexes/cp2.json")),
];

pub fn shipped_complex_names() -> Vec<&'static str> {
    COMPLEXES.iter().map(|(n, _)| *n).collect()
}

/// Loads a shipped triangulation by name.
pub fn shipped_complex(name: &str) -> Result<Arc<CellComplex>> {
    match COMPLEXES.iter().find(|(n, _)| *n == name) {
        Some((_, text)) => Ok(Arc::new(CellComplex::from_json(text)?)),
        None => input(format!(
            "no shipped complex \"{name}\" (available: {})",
            shipped_complex_names().join(", ")
        )),
    }
}

/// Iterated product of oriented 3-vertex circles, a triangulated `T^n`.
pub fn simplicial_torus(n: usize) -> Result<Arc<CellComplex>> {
    if n == 0 {
        return input("torus dimension must be at least 1");
    }
    let circle = shipped_complex("circle")?;
    let mut t = circle.clone();
    for _ in 1..n {
        t = Arc::new(CellComplex::product(&t, &circle)?);
    }
    Ok(t)
}

/// Resolves a complex argument: a shipped name, `t<n>` for a triangulated
/// torus, `torus:<n>x<L>` for a cubical torus, or a JSON file path.
pub fn resolve_complex(spec: &str) -> Result<Arc<CellComplex>> {
    if let Some(rest) = spec.strip_prefix("torus:") {
        let parts: Vec<&str> = rest.split('x').collect();
        if parts.len() == 2 {
            if let (Ok(n), Ok(l)) = (parts[0].parse::<usize>(), parts[1].parse::<u32>()) {
                return Ok(Arc::new(CellComplex::torus_lattice(n, l)?));
            }
        }
        return input(format!("bad torus spec \"{spec}\", expected torus:<n>x<L>"));
    }
    if let Some(n) = spec.strip_prefix('t').and_then(|s| s.parse::<usize>().ok()) {
        return simplicial_torus(n);
    }
    let name = spec.trim_end_matches(".json");
    if shipped_complex_names().contains(&name) && !std::path::Path::new(spec).exists() {
        return shipped_complex(name);
    }
    let text = std::fs::read_to_string(spec)
        .map_err(|e| crate::error::Error::Input(format!("cannot read {spec}: {e}")))?;
    Ok(Arc::new(CellComplex::from_json(&text)?))
}
