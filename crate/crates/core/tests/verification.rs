use std::sync::Arc;

use cupgates::code::boundary::{cube_code, simplex_code};
use cupgates::code::CssCode;
use cupgates::data::{shipped_complex, simplicial_torus};
use cupgates::homology::{cohomology_basis, pairing_matrix, CohomologyBasis};
use cupgates::synth::{synthesize_cnot_layer, synthesize_diagonal, Constants, GateExpression};
use cupgates::verify::logical::cohomology_generators;
use cupgates::verify::{
    brute_force_oracle, check_circuit_commutation, check_stabilizer_commutation, clifford_logical_action,
    cube_gate_action, extract_logical_action, extract_with_generators, pontryagin_property_suite,
    simplex_gate_action, simplex_gate_circuit, steenrod_suite, CheckOptions, Guarantee, LogicalGenerator,
    OracleOp, PhasePolynomial,
};
use cupgates::CellComplex;

fn torus(n: usize, l: u32) -> Arc<CellComplex> {
    Arc::new(CellComplex::torus_lattice(n, l).unwrap())
}

/// Expected qubit terms `{variables} → 1/2` where the pairing tensor is odd.
fn odd_pairings(code: &CssCode, extra: Option<&cupgates::Cochain>) -> Vec<Vec<String>> {
    let bases: Vec<&CohomologyBasis> = (0..code.num_copies()).map(|k| code.logical_basis(k).unwrap()).collect();
    let t = pairing_matrix(&bases, extra).unwrap();
    let mut out = Vec::new();
    let mut idx = vec![0usize; t.dims.len()];
    for &v in &t.values {
        if v.rem_euclid(2) == 1 {
            out.push(idx.iter().enumerate().map(|(k, i)| format!("a{k}[{i}]")).collect());
        }
        for s in (0..idx.len()).rev() {
            idx[s] += 1;
            if idx[s] < t.dims[s] {
                break;
            }
            idx[s] = 0;
        }
    }
    out.sort();
    out
}

fn extracted_terms(p: &PhasePolynomial, name: &str) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = p
        .named_gates()
        .unwrap()
        .into_iter()
        .map(|g| {
            assert_eq!(g.name, name, "{}", p.describe());
            g.variables
        })
        .collect();
    out.sort();
    out
}

fn commutes(expr: &str, code: &CssCode, consts: &Constants) -> PhasePolynomial {
    let e = GateExpression::parse(expr).unwrap();
    let report = check_stabilizer_commutation(&e, code, consts, &CheckOptions::default()).unwrap();
    assert!(report.passed, "{expr}: {:?}", report.witness);
    assert_eq!(report.guarantee, Guarantee::Exact);
    let circ = synthesize_diagonal(&e, code, consts).unwrap();
    extract_logical_action(&circ, code, 5).unwrap()
}

#[test]
fn cz_from_two_form_cup_on_tori() {
    for c in [torus(2, 2), torus(2, 3), simplicial_torus(2).unwrap()] {
        let code = CssCode::from_chain_complex(&c, 1, 2, 2).unwrap();
        let p = commutes("1/2*CUP(a0,a1)", &code, &Constants::new());
        let expected = odd_pairings(&code, None);
        assert_eq!(expected.len(), 2, "{}", c.name());
        assert_eq!(extracted_terms(&p, "CZ"), expected, "{}", c.name());
    }
}

#[test]
fn ccz_on_triangulated_three_torus() {
    let code = CssCode::from_chain_complex(&simplicial_torus(3).unwrap(), 1, 2, 3).unwrap();
    let p = commutes("1/2*CUP(a0,a1,a2)", &code, &Constants::new());
    let expected = odd_pairings(&code, None);
    assert_eq!(expected.len(), 6);
    assert_eq!(extracted_terms(&p, "CCZ"), expected);
}

#[test]
fn c3z_on_cubical_four_torus() {
    let code = CssCode::from_chain_complex(&torus(4, 2), 1, 2, 4).unwrap();
    let p = commutes("1/2*CUP(a0,a1,a2,a3)", &code, &Constants::new());
    let expected = odd_pairings(&code, None);
    assert_eq!(expected.len(), 24);
    assert_eq!(extracted_terms(&p, "C3Z"), expected);
}

#[test]
fn dropped_face_is_caught_with_witness() {
    let code = CssCode::from_chain_complex(&torus(2, 3), 1, 2, 2).unwrap();
    let e = GateExpression::parse("1/2*CUP(a0,a1)").unwrap();
    let mut circ = synthesize_diagonal(&e, &code, &Constants::new()).unwrap();
    let dropped = circ.gates.remove(0);
    let report = check_circuit_commutation(&circ, &code, &CheckOptions::default()).unwrap();
    assert!(!report.passed);
    let w = report.witness.unwrap();
    assert_eq!((w.delta, w.denominator), (1, 2));
    // the violated check overlaps the dropped gate
    let check = &code.x_checks()[w.check];
    assert!(check.iter().any(|(q, _)| dropped.qudits.contains(q)));
    let mut z = vec![0u64; code.num_qudits()];
    for &(q, v) in &w.z {
        z[q] = v;
    }
    let mut shifted = z.clone();
    for &(q, e) in check {
        shifted[q] = (shifted[q] + e) % 2;
    }
    assert_eq!((circ.phase(&shifted, 2) + 2 - circ.phase(&z, 2)) % 2, 1);
}

#[test]
fn addressable_cz_on_three_torus() {
    let c = simplicial_torus(3).unwrap();
    let code = CssCode::from_chain_complex(&c, 1, 2, 2).unwrap();
    let duals = cohomology_basis(&c, 1, 2).unwrap();
    assert_eq!(duals.rank(), 3);
    let mut seen = Vec::new();
    for s in &duals.reps {
        let consts = Constants::from([("s".to_string(), s.clone())]);
        let p = commutes("1/2*CUP(a0,a1,CONST(s))", &code, &consts);
        // one addressed gate: CZ on the two logical pairs living in the dual membrane
        let terms = extracted_terms(&p, "CZ");
        assert_eq!(terms.len(), 2);
        assert_eq!(terms, odd_pairings(&code, Some(s)));
        seen.push(terms);
    }
    seen.sort();
    seen.dedup();
    assert_eq!(seen.len(), 3);
}

#[test]
fn oracle_agrees_with_extraction_on_small_torus() {
    let code = CssCode::from_chain_complex(&torus(2, 2), 1, 2, 2).unwrap();
    let gens = cohomology_generators(&code).unwrap();
    let e = GateExpression::parse("1/2*CUP(a0,a1)").unwrap();
    let circ = synthesize_diagonal(&e, &code, &Constants::new()).unwrap();
    let p = extract_logical_action(&circ, &code, 1).unwrap();
    let m = brute_force_oracle(OracleOp::Diagonal(&circ), &code, &gens).unwrap();
    assert_eq!(m.dim, 16);
    for s in 0..m.dim {
        let coords: Vec<u64> = (0..gens.len()).map(|i| (s >> i & 1) as u64).collect();
        let expected = p.evaluate(&coords) * (m.denominator / p.denominator);
        assert_eq!(m.entries[s][s], Some(expected % m.denominator));
    }
    // identity expression
    let id = synthesize_diagonal(&GateExpression::parse("2/2*CUP(a0,a1)").unwrap(), &code, &Constants::new()).unwrap();
    assert!(brute_force_oracle(OracleOp::Diagonal(&id), &code, &gens).unwrap().is_identity());
}

#[test]
fn cnot_layer_is_logical_cnot() {
    for c in [torus(2, 2), torus(2, 3), torus(3, 2)] {
        let code = CssCode::from_chain_complex(&c, 1, 2, 2).unwrap();
        let map = synthesize_cnot_layer(&code, 0, 1).unwrap();
        let action = clifford_logical_action(&map, &code).unwrap();
        assert!(action.preserves_stabilizers && action.preserves_symplectic_form);
        assert!(action.is_logical_cnot(0, 1), "{}", action.describe());
        assert!(!action.is_logical_cnot(1, 0));
    }
    let code = CssCode::from_chain_complex(&torus(2, 2), 1, 2, 2).unwrap();
    let gens = cohomology_generators(&code).unwrap();
    let map = synthesize_cnot_layer(&code, 0, 1).unwrap();
    let m = brute_force_oracle(OracleOp::Clifford(&map), &code, &gens).unwrap();
    // generators 0,1 live on copy 0 and 2,3 on copy 1: target bits gain control bits
    for s in 0..16usize {
        let t = s ^ ((s & 0b11) << 2);
        assert_eq!(m.entries[t][s], Some(0));
    }
}

#[test]
fn extraction_is_independent_of_gate_order() {
    let code = CssCode::from_chain_complex(&simplicial_torus(3).unwrap(), 1, 2, 3).unwrap();
    let e = GateExpression::parse("1/2*CUP(a0,a1,a2)").unwrap();
    let mut circ = synthesize_diagonal(&e, &code, &Constants::new()).unwrap();
    let a = extract_logical_action(&circ, &code, 1).unwrap();
    circ.gates.reverse();
    assert_eq!(a, extract_logical_action(&circ, &code, 2).unwrap());
}

#[test]
fn non_logical_circuit_is_rejected_by_extraction() {
    let code = CssCode::from_chain_complex(&torus(2, 3), 1, 2, 2).unwrap();
    let e = GateExpression::parse("1/2*CUP(a0,a1)").unwrap();
    let mut circ = synthesize_diagonal(&e, &code, &Constants::new()).unwrap();
    circ.gates.truncate(5);
    assert!(extract_logical_action(&circ, &code, 3).is_err());
}

#[test]
fn pontryagin_square_on_cp2_is_s() {
    let c = shipped_complex("cp2").unwrap();
    let code = CssCode::from_chain_complex(&c, 2, 2, 1).unwrap();
    assert_eq!(code.logical_dimension().value(), Some(2));
    let p = commutes("1/4*PONT(a0,2)", &code, &Constants::new());
    assert_eq!(p.describe(), "S(a0[0])");
}

#[test]
fn two_copy_cup_with_composite_modulus() {
    let code = CssCode::from_chain_complex(&torus(2, 2), 1, 4, 2).unwrap();
    let e = GateExpression::parse("1/4*CUP(a0,a1)").unwrap();
    let report = check_stabilizer_commutation(&e, &code, &Constants::new(), &CheckOptions::default()).unwrap();
    assert!(report.passed);
    assert_eq!(report.guarantee, Guarantee::Exact);
    let circ = synthesize_diagonal(&e, &code, &Constants::new()).unwrap();
    let p = extract_logical_action(&circ, &code, 0).unwrap();
    // bilinear: exp(2πi m·m'/4) on the paired classes
    assert!(p.terms.iter().all(|t| t.exponents.iter().sum::<u32>() == 2 && t.den == 4));
    assert_eq!(p.terms.len(), 2);
}

#[test]
fn simplex_gate_phases() {
    let expected = [(2, 1, 4), (3, 7, 8), (4, 15, 16), (5, 1, 32)];
    for (nc, num, den) in expected {
        let a = simplex_gate_action(nc).unwrap();
        assert_eq!((a.num, a.den), (num, den), "Nc = {nc}: {}", a.describe());
    }
    assert!(simplex_gate_action(6).is_err());
}

#[test]
fn simplex_gate_circuits_are_logical() {
    for nc in 2..=5 {
        let b = simplex_code(nc).unwrap();
        let circ = simplex_gate_circuit(&b).unwrap();
        let report = check_circuit_commutation(&circ, b.code(), &CheckOptions::default()).unwrap();
        assert!(report.passed, "Nc = {nc}: {:?}", report.witness);
        let gens = vec![LogicalGenerator {
            label: "q".into(),
            config: b.reference_configurations()[1].clone(),
            order: 2,
        }];
        let p = extract_with_generators(&circ, b.code(), &gens, 4).unwrap();
        let a = simplex_gate_action(nc).unwrap();
        assert_eq!(p.evaluate(&[1]) * a.den, a.num * p.denominator, "Nc = {nc}");
    }
}

#[test]
fn cube_gate_is_logical_t() {
    for l in [2, 3] {
        let b = cube_code(l).unwrap();
        let circ = cupgates::synth::cube_gate_circuit(&b).unwrap();
        let report = check_circuit_commutation(&circ, b.code(), &CheckOptions::default()).unwrap();
        assert!(report.passed, "L = {l}: {:?}", report.witness);
        let a = cube_gate_action(&b).unwrap();
        assert_eq!((a.num, a.den), (1, 8));
        let gens = vec![LogicalGenerator {
            label: "q".into(),
            config: b.reference_configurations()[1].clone(),
            order: 2,
        }];
        let p = extract_with_generators(&circ, b.code(), &gens, 4).unwrap();
        assert_eq!(p.describe(), "T(q)");
    }
}

#[test]
fn pontryagin_suite_on_four_torus() {
    let c = simplicial_torus(4).unwrap();
    for (n_mod, n) in [(2, 2), (4, 2)] {
        let r = pontryagin_property_suite(&c, n_mod, n, 5, 11).unwrap();
        assert!(r.passed(), "{:?}", r.checks);
    }
    assert!(pontryagin_property_suite(&c, 3, 2, 1, 0).is_err());
}

#[test]
fn steenrod_suite_on_small_complexes() {
    for name in ["rp2", "rp3", "klein"] {
        let r = steenrod_suite(&shipped_complex(name).unwrap(), 10, 3).unwrap();
        assert!(r.passed(), "{name}: {:?}", r.checks);
    }
}
