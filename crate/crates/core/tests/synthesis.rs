use std::sync::Arc;

use cupgates::code::boundary::cube_code;
use cupgates::code::CssCode;
use cupgates::data::{shipped_complex, simplicial_torus};
use cupgates::synth::{
    cube_gate_circuit, expression_phase, gate_name, synthesize_cnot_layer, synthesize_diagonal, Constants,
    GateExpression,
};
use cupgates::{CellComplex, Cochain};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn torus(n: usize, l: u32) -> Arc<CellComplex> {
    Arc::new(CellComplex::torus_lattice(n, l).unwrap())
}

fn random_z(rng: &mut ChaCha8Rng, n: usize, modulus: u64) -> Vec<u64> {
    (0..n).map(|_| rng.gen_range(0..modulus)).collect()
}

fn assert_phase_matches(expr: &str, code: &CssCode, consts: &Constants, seed: u64) {
    let e = GateExpression::parse(expr).unwrap();
    let circ = synthesize_diagonal(&e, code, consts).unwrap();
    let m = e.denominator();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..200 {
        let z = random_z(&mut rng, code.num_qudits(), code.modulus());
        assert_eq!(circ.phase(&z, m), expression_phase(&e, code, consts, &z).unwrap(), "{expr}");
    }
}

#[test]
fn cubical_t2_cup_gives_eight_cz() {
    let code = CssCode::from_chain_complex(&torus(2, 2), 1, 2, 2).unwrap();
    let e = GateExpression::parse("1/2*CUP(a0,a1)").unwrap();
    let circ = synthesize_diagonal(&e, &code, &Constants::new()).unwrap();
    assert_eq!(circ.gates.len(), 8);
    for g in &circ.gates {
        assert_eq!((g.qudits.len(), g.num, g.den), (2, 1, 2));
        assert!(g.qudits[0] < 8 && g.qudits[1] >= 8);
    }
}

#[test]
fn simplicial_t3_triple_cup_gives_ccz_per_simplex() {
    let c = simplicial_torus(3).unwrap();
    let code = CssCode::from_chain_complex(&c, 1, 2, 3).unwrap();
    let e = GateExpression::parse("1/2*CUP(a0,a1,a2)").unwrap();
    let circ = synthesize_diagonal(&e, &code, &Constants::new()).unwrap();
    assert_eq!(circ.gates.len(), 162);
    assert!(circ.gates.iter().all(|g| g.qudits.len() == 3 && g.den == 2));
    // locality: gates per qudit bounded by the top simplices containing its edge
    let tops = c.top_cells_containing(1);
    let max_tops = tops.iter().map(|v| v.len()).max().unwrap();
    assert!(circ.max_gates_per_qudit() <= max_tops);
}

#[test]
fn zero_coefficient_gives_empty_circuit() {
    let code = CssCode::from_chain_complex(&torus(2, 2), 1, 2, 2).unwrap();
    let e = GateExpression::parse("0/2*CUP(a0,a1) + 2/2*CUP(a1,a0)").unwrap();
    assert!(synthesize_diagonal(&e, &code, &Constants::new()).unwrap().gates.is_empty());
}

#[test]
fn circuit_phase_equals_cochain_evaluation() {
    let t2 = CssCode::from_chain_complex(&torus(2, 3), 1, 2, 2).unwrap();
    assert_phase_matches("1/2*CUP(a0,a1)", &t2, &Constants::new(), 1);
    let t2s = CssCode::from_chain_complex(&simplicial_torus(2).unwrap(), 1, 4, 2).unwrap();
    assert_phase_matches("1/4*CUP(a0,a1) - 3/4*CUP(a1,a0)", &t2s, &Constants::new(), 2);
    let t4 = CssCode::from_chain_complex(&torus(4, 2), 1, 2, 4).unwrap();
    assert_phase_matches("1/2*CUP(a0,a1,a2,a3)", &t4, &Constants::new(), 3);
    let cp2 = CssCode::from_chain_complex(&shipped_complex("cp2").unwrap(), 2, 2, 1).unwrap();
    assert_phase_matches("1/4*PONT(a0,2)", &cp2, &Constants::new(), 4);
    let rp2 = CssCode::from_chain_complex(&shipped_complex("rp2").unwrap(), 1, 2, 1).unwrap();
    assert_phase_matches("1/2*SQ(1,a0)", &rp2, &Constants::new(), 5);
    let t3 = CssCode::from_chain_complex(&simplicial_torus(3).unwrap(), 1, 2, 2).unwrap();
    assert_phase_matches("1/2*CUP(CUPI(1,a0,a1),a1,a0)", &t3, &Constants::new(), 6);
}

#[test]
fn constants_enter_as_fixed_values() {
    let c = simplicial_torus(3).unwrap();
    let code = CssCode::from_chain_complex(&c, 1, 2, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut consts = Constants::new();
    consts.insert("s".into(), Cochain::random(&c, 1, 2, &mut rng));
    assert_phase_matches("1/2*CUP(a0,a1,CONST(s))", &code, &consts, 7);
}

#[test]
fn sum_is_concatenation() {
    let code = CssCode::from_chain_complex(&torus(2, 2), 1, 2, 2).unwrap();
    let k = Constants::new();
    let a = synthesize_diagonal(&GateExpression::parse("1/2*CUP(a0,a1)").unwrap(), &code, &k).unwrap();
    let b = synthesize_diagonal(&GateExpression::parse("1/2*CUP(a1,a0)").unwrap(), &code, &k).unwrap();
    let ab = synthesize_diagonal(&GateExpression::parse("1/2*CUP(a0,a1) + 1/2*CUP(a1,a0)").unwrap(), &code, &k).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let joined = a.concat(b);
    for _ in 0..50 {
        let z = random_z(&mut rng, code.num_qudits(), 2);
        assert_eq!(ab.phase(&z, 2), joined.phase(&z, 2));
    }
}

#[test]
fn synthesis_errors() {
    let k = Constants::new();
    let code = CssCode::from_chain_complex(&torus(3, 2), 1, 2, 2).unwrap();
    let bad_degree = GateExpression::parse("1/2*CUP(a0,a1)").unwrap();
    assert!(synthesize_diagonal(&bad_degree, &code, &k).is_err());
    let cubical_cupi = GateExpression::parse("1/2*CUP(CUPI(1,a0,a1),a0,a1)").unwrap();
    assert!(synthesize_diagonal(&cubical_cupi, &code, &k).is_err());
    let missing = GateExpression::parse("1/2*CUP(a0,a1,a5)").unwrap();
    assert!(synthesize_diagonal(&missing, &code, &k).is_err());
}

#[test]
fn cnot_layer() {
    let code = CssCode::from_chain_complex(&torus(2, 2), 1, 2, 2).unwrap();
    let map = synthesize_cnot_layer(&code, 1, 0).unwrap();
    assert_eq!(map.cx.len(), 8);
    assert!(map.preserves_symplectic_form());
    assert!(map.then(&map).is_identity());
    assert!(!map.is_identity());
    let simp = CssCode::from_chain_complex(&simplicial_torus(2).unwrap(), 1, 2, 2).unwrap();
    assert!(synthesize_cnot_layer(&simp, 1, 0).is_err());
}

#[test]
fn cube_gate_families() {
    let b = cube_code(2).unwrap();
    let circ = cube_gate_circuit(&b).unwrap();
    let count = |k: usize, den: u64| circ.gates.iter().filter(|g| g.qudits.len() == k && g.den == den).count();
    assert_eq!(count(3, 2), 6 * 8);
    assert_eq!(count(2, 4), 2 * 4 * 3);
    assert_eq!(count(1, 8), 4);
    assert_eq!(circ.gates.len(), 48 + 24 + 4);
    // T gates sit on copy 1
    let ne = b.complex().num_cells(1);
    assert!(circ.gates.iter().filter(|g| g.den == 8).all(|g| g.qudits[0] < ne && g.num == 1));
    assert!(circ.to_named_json().unwrap().contains("CCZ"));
}

#[test]
fn gate_names() {
    assert_eq!(gate_name(1, 1, 2).unwrap(), "Z");
    assert_eq!(gate_name(1, 3, 4).unwrap(), "S†");
    assert_eq!(gate_name(2, 1, 4).unwrap(), "CS");
    assert_eq!(gate_name(3, 1, 2).unwrap(), "CCZ");
    assert_eq!(gate_name(4, 1, 2).unwrap(), "C3Z");
    assert_eq!(gate_name(2, 3, 16).unwrap(), "CR4^3");
    assert_eq!(gate_name(1, 7, 8).unwrap(), "T†");
    assert!(gate_name(2, 1, 3).is_none());
}
