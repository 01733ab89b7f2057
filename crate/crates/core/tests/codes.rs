use std::sync::Arc;

use cupgates::code::boundary::{cube_code, simplex_code, Pauli, Subgroup};
use cupgates::code::CssCode;
use cupgates::data::{shipped_complex, simplicial_torus};
use cupgates::homology::betti_numbers;
use cupgates::CellComplex;

fn torus(n: usize, l: u32) -> Arc<CellComplex> {
    Arc::new(CellComplex::torus_lattice(n, l).unwrap())
}

#[test]
fn toric_code_parameters() {
    let code = CssCode::from_chain_complex(&torus(2, 3), 1, 2, 1).unwrap();
    assert_eq!(code.num_qudits(), 18);
    assert_eq!(code.logical_dimension().value(), Some(4));
    assert_eq!(code.cohomology_dimension().unwrap().value(), Some(4));
    assert!(code.commutation_violations().is_empty());
}

#[test]
fn four_torus_two_form_code() {
    let c = torus(4, 2);
    let code = CssCode::from_chain_complex(&c, 2, 2, 1).unwrap();
    assert_eq!(code.logical_dimension().log(2), 6);
    assert_eq!(betti_numbers(&c, 2).unwrap()[2], 6);
    assert!(code.commutation_violations().is_empty());
}

#[test]
fn counting_matches_cohomology_across_complexes() {
    for (c, q, n) in [
        (shipped_complex("rp2").unwrap(), 1, 2),
        (shipped_complex("rp2").unwrap(), 1, 3),
        (shipped_complex("rp3").unwrap(), 1, 4),
        (shipped_complex("klein").unwrap(), 1, 6),
        (shipped_complex("cp2").unwrap(), 2, 2),
        (simplicial_torus(3).unwrap(), 1, 3),
        (torus(3, 2), 2, 4),
    ] {
        let code = CssCode::from_chain_complex(&c, q, n, 1).unwrap();
        assert!(code.commutation_violations().is_empty(), "{}", c.name());
        assert_eq!(
            code.logical_dimension(),
            code.cohomology_dimension().unwrap(),
            "{} q={q} N={n}",
            c.name()
        );
    }
}

#[test]
fn degree_out_of_range_rejected() {
    assert!(CssCode::from_chain_complex(&torus(2, 3), 0, 2, 1).is_err());
    assert!(CssCode::from_chain_complex(&torus(2, 3), 2, 2, 1).is_err());
}

#[test]
fn condensation() {
    let code = CssCode::from_chain_complex(&torus(2, 3), 1, 4, 1).unwrap();
    assert_eq!(code.logical_dimension().value(), Some(16));
    let c2 = code.condense(2).unwrap();
    assert!(c2.commutation_violations().is_empty());
    assert_eq!(c2.logical_dimension().value(), Some(4));
    assert_eq!(c2.logical_dimension(), c2.effective_code().unwrap().logical_dimension());
    // condensing the unit charge kills the code, condensing N changes nothing
    assert_eq!(code.condense(1).unwrap().logical_dimension().value(), Some(1));
    assert!(code.condense(4).unwrap().same_stabilizer_group(&code));
    assert!(code.condense(3).is_err());
    // composition
    let a = code.condense(4).unwrap().condense(2).unwrap();
    assert!(a.same_stabilizer_group(&c2));
    assert!(!c2.same_stabilizer_group(&code));
}

#[test]
fn condensed_x_checks_are_doubled_z2_checks() {
    let c = torus(2, 2);
    let z4 = CssCode::from_chain_complex(&c, 1, 4, 1).unwrap().condense(2).unwrap();
    let z2 = CssCode::from_chain_complex(&c, 1, 2, 1).unwrap();
    for (a, b) in z4.x_checks().iter().zip(z2.x_checks()) {
        let doubled: Vec<(usize, u64)> = b.iter().map(|&(q, e)| (q, 2 * e)).collect();
        assert_eq!(a.iter().map(|&(q, e)| (q, e % 4)).collect::<Vec<_>>(), doubled);
    }
}

#[test]
fn small_toric_distance() {
    let code = CssCode::from_chain_complex(&torus(2, 2), 1, 2, 1).unwrap();
    assert_eq!(code.brute_force_distance().unwrap(), 2);
}

#[test]
fn simplex_codes() {
    for nc in 2..=5 {
        let b = simplex_code(nc).unwrap();
        assert!(b.code().commutation_violations().is_empty());
        assert_eq!(b.logical_dimension(), 2, "Nc = {nc}");
        assert!(b.label_violations().is_empty());
        let refs = b.reference_configurations();
        assert!(b.is_admissible(&refs[1]));
        assert!(!b.code().in_x_span(&refs[1]));
        // the holonomy lies in the label of every edge
        let ne = b.complex().num_cells(1);
        for e in 0..ne {
            let v: u32 = (0..nc).map(|j| (refs[1][j * ne + e] as u32) << j).sum();
            assert!(b.label(1, e).contains(v));
        }
    }
    assert!(simplex_code(1).is_err());
    assert!(simplex_code(6).is_err());
}

#[test]
fn simplex3_face_labels() {
    let b = simplex_code(3).unwrap();
    let c = b.complex();
    let f123 = c.cell_index(2, &[1, 2, 3]).unwrap();
    let f023 = c.cell_index(2, &[0, 2, 3]).unwrap();
    assert_eq!(b.label(2, f123), &Subgroup::span(3, &[0b011, 0b110]));
    assert_eq!(b.label(2, f023), &Subgroup::span(3, &[0b010, 0b100]));
}

#[test]
fn cube_code_structure() {
    for l in [2, 3] {
        let b = cube_code(l).unwrap();
        assert!(b.code().commutation_violations().is_empty());
        assert_eq!(b.logical_dimension(), 2, "L = {l}");
        assert!(b.label_violations().is_empty());
        assert!(b.is_admissible(&b.reference_configurations()[1]));
    }
}

#[test]
fn cube_face_f1_checks() {
    let b = cube_code(3).unwrap();
    let on_f1_only = |loc: &[String]| loc.len() == 1 && loc[0] == "F1";
    let mut x_patterns = std::collections::BTreeSet::new();
    let mut z_edge_patterns = std::collections::BTreeSet::new();
    for info in b.check_info().iter().filter(|i| on_f1_only(&i.location)) {
        match (info.pauli, info.degree) {
            (Pauli::X, _) => {
                x_patterns.insert(info.pattern);
            }
            (Pauli::Z, 1) => {
                z_edge_patterns.insert(info.pattern);
            }
            _ => {}
        }
    }
    assert_eq!(x_patterns.into_iter().collect::<Vec<_>>(), vec![0b010, 0b100]);
    assert_eq!(z_edge_patterns.into_iter().collect::<Vec<_>>(), vec![0b001]);
}

#[test]
fn cube_hinge_and_corner_labels() {
    let b = cube_code(2).unwrap();
    let c = b.complex();
    let x_patterns_at = |v: usize| -> Vec<u32> { b.label(0, v).generators().to_vec() };
    let vertex_on = |faces: &[&str]| -> usize {
        (0..c.num_cells(0))
            .find(|&v| {
                let mut loc = b.location(0, v);
                loc.sort_unstable();
                loc == faces
            })
            .unwrap()
    };
    let span = |g: &[u32]| Subgroup::span(3, g);
    // hinge E_jk, 4 ≤ j < k ≤ 6: A1A2 and A2A3
    assert_eq!(span(&x_patterns_at(vertex_on(&["F4", "F5"]))), span(&[0b011, 0b110]));
    // E14, E15, E16: A2A3; E24..E26: A3A1; E34..E36: A1A2
    for (f, g) in [("F1", 0b110), ("F2", 0b101), ("F3", 0b011)] {
        for h in ["F4", "F5", "F6"] {
            if (f, h) == ("F1", "F6") || (f, h) == ("F2", "F5") || (f, h) == ("F3", "F4") {
                continue;
            }
            let v = vertex_on(&[f, h]);
            assert_eq!(span(&x_patterns_at(v)), span(&[g]), "{f}{h}");
        }
    }
    // E12: A3; E23: A1; E31: A2
    assert_eq!(span(&x_patterns_at(vertex_on(&["F1", "F2"]))), span(&[0b100]));
    assert_eq!(span(&x_patterns_at(vertex_on(&["F2", "F3"]))), span(&[0b001]));
    assert_eq!(span(&x_patterns_at(vertex_on(&["F1", "F3"]))), span(&[0b010]));
    // corners
    assert_eq!(span(&x_patterns_at(vertex_on(&["F4", "F5", "F6"]))), span(&[0b011, 0b110]));
    assert_eq!(span(&x_patterns_at(vertex_on(&["F1", "F4", "F5"]))), span(&[0b110]));
    assert_eq!(span(&x_patterns_at(vertex_on(&["F2", "F4", "F6"]))), span(&[0b101]));
    assert_eq!(span(&x_patterns_at(vertex_on(&["F3", "F5", "F6"]))), span(&[0b011]));
    assert!(x_patterns_at(vertex_on(&["F1", "F2", "F3"])).is_empty());
}

#[test]
fn code_json_is_stable() {
    let code = CssCode::from_chain_complex(&torus(2, 2), 1, 2, 2).unwrap();
    let a = code.to_json();
    assert_eq!(a, code.to_json());
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["num_qudits"], 16);
}
