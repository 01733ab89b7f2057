use std::sync::Arc;

use cupgates::cochain::Cochain;
use cupgates::complex::CellComplex;
use cupgates::data::{shipped_complex, simplicial_torus};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sign(e: usize) -> i64 {
    if e.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn random_int(c: &Arc<CellComplex>, k: usize, rng: &mut ChaCha8Rng) -> Cochain {
    Cochain::random(c, k, 0, rng)
}

fn lin(terms: &[(i64, &Cochain)]) -> Cochain {
    let mut acc = terms[0].1.scale(terms[0].0);
    for (s, c) in &terms[1..] {
        acc = acc.add(&c.scale(*s)).unwrap();
    }
    acc
}

#[test]
fn leibniz_simplicial_and_cubical() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let complexes = vec![
        simplicial_torus(3).unwrap(),
        shipped_complex("cp2").unwrap(),
        Arc::new(CellComplex::torus_lattice(3, 2).unwrap()),
        Arc::new(CellComplex::torus_lattice(4, 2).unwrap()),
    ];
    for c in complexes {
        for p in 0..c.dim() {
            for q in 0..c.dim() - p {
                let f = random_int(&c, p, &mut rng);
                let g = random_int(&c, q, &mut rng);
                let lhs = f.cup(&g).unwrap().coboundary();
                let rhs = lin(&[
                    (1, &f.coboundary().cup(&g).unwrap()),
                    (sign(p), &f.cup(&g.coboundary()).unwrap()),
                ]);
                assert_eq!(lhs, rhs, "{} p={p} q={q}", c.name());
            }
        }
    }
}

#[test]
fn cup_one_coboundary_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let c = shipped_complex("cp2").unwrap();
    for p in 1..=3 {
        for q in 1..=3 {
            if p + q > 4 {
                continue;
            }
            let f = random_int(&c, p, &mut rng);
            let g = random_int(&c, q, &mut rng);
            let lhs = f.cup_i(1, &g).unwrap().coboundary();
            let rhs = lin(&[
                (1, &f.coboundary().cup_i(1, &g).unwrap()),
                (sign(p), &f.cup_i(1, &g.coboundary()).unwrap()),
                (sign(p + q + 1), &f.cup(&g).unwrap()),
                (sign(p * q + p + q), &g.cup(&f).unwrap()),
            ]);
            assert_eq!(lhs, rhs, "p={p} q={q}");
        }
    }
}

#[test]
fn hirsch_identity() {
    // (f∪g)∪₁h = f∪(g∪₁h) + (-1)^{q(r+1)} (f∪₁h)∪g
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let c = shipped_complex("cp2").unwrap();
    for (p, q, r) in [(1, 1, 1), (1, 1, 2), (2, 1, 1), (1, 2, 1), (1, 1, 3), (2, 1, 2)] {
        let f = random_int(&c, p, &mut rng);
        let g = random_int(&c, q, &mut rng);
        let h = random_int(&c, r, &mut rng);
        let lhs = f.cup(&g).unwrap().cup_i(1, &h).unwrap();
        let rhs = lin(&[
            (1, &f.cup(&g.cup_i(1, &h).unwrap()).unwrap()),
            (sign(q * (r + 1)), &f.cup_i(1, &h).unwrap().cup(&g).unwrap()),
        ]);
        assert_eq!(lhs, rhs, "p={p} q={q} r={r}");
    }
}

#[test]
fn hirsch_with_swapped_inner_factor_fails() {
    // f∪(h∪₁g) in place of f∪(g∪₁h) does not hold once q ≠ r
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let c = shipped_complex("cp2").unwrap();
    let (p, q, r) = (1, 1, 2);
    let f = random_int(&c, p, &mut rng);
    let g = random_int(&c, q, &mut rng);
    let h = random_int(&c, r, &mut rng);
    let lhs = f.cup(&g).unwrap().cup_i(1, &h).unwrap();
    let rhs = lin(&[
        (sign(p), &f.cup(&h.cup_i(1, &g).unwrap()).unwrap()),
        (sign(q * r), &f.cup_i(1, &h).unwrap().cup(&g).unwrap()),
    ]);
    assert_ne!(lhs, rhs);
}

#[test]
fn higher_cup_coboundary_formula() {
    // δ(f ∪_i g) = δf ∪_i g + (-1)^p f ∪_i δg + (-1)^{p+q-i} f ∪_{i-1} g + (-1)^{pq+p+q} g ∪_{i-1} f
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let c = simplicial_torus(3).unwrap();
    let c4 = shipped_complex("cp2").unwrap();
    for (cx, p, q, i) in [(&c, 1, 2, 2), (&c4, 2, 2, 2), (&c4, 2, 2, 1), (&c4, 1, 3, 2), (&c4, 3, 3, 3)] {
        let f = random_int(cx, p, &mut rng);
        let g = random_int(cx, q, &mut rng);
        let lhs = f.cup_i(i, &g).unwrap().coboundary();
        let rhs = lin(&[
            (1, &f.coboundary().cup_i(i, &g).unwrap()),
            (sign(p), &f.cup_i(i, &g.coboundary()).unwrap()),
            (sign(p + q - i), &f.cup_i(i - 1, &g).unwrap()),
            (sign(p * q + p + q), &g.cup_i(i - 1, &f).unwrap()),
        ]);
        assert_eq!(lhs, rhs, "p={p} q={q} i={i}");
    }
}

#[test]
fn cup_i_vanishes_above_degrees() {
    let c = shipped_complex("cp2").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let f = random_int(&c, 1, &mut rng);
    let g = random_int(&c, 1, &mut rng);
    assert!(f.cup_i(2, &g).unwrap().is_zero());
}

#[test]
fn cubical_higher_cup_rejected() {
    let t = Arc::new(CellComplex::torus_lattice(2, 2).unwrap());
    let f = Cochain::zero(&t, 1, 2);
    assert!(f.cup_i(1, &f).is_err());
}

#[test]
fn single_edge_cup_one() {
    let c = Arc::new(CellComplex::from_facets("e", &[vec![0, 1]]).unwrap());
    let f = Cochain::from_values(&c, 1, 0, vec![3]).unwrap();
    let g = Cochain::from_values(&c, 1, 0, vec![5]).unwrap();
    assert_eq!(f.cup_i(1, &g).unwrap().values(), &[15]);
}

#[test]
fn cartan_coboundary_on_simplex() {
    let c = Arc::new(CellComplex::from_facets("s5", &[vec![0, 1, 2, 3, 4, 5]]).unwrap());
    let ind = |tri: [u32; 3]| {
        let i = c.cell_index(2, &tri).unwrap();
        Cochain::indicator(&c, 2, i, 2).unwrap()
    };
    let a1 = ind([0, 2, 3]).add(&ind([0, 1, 2])).unwrap();
    let a2 = ind([3, 4, 5]).add(&ind([2, 3, 5])).unwrap();
    let z = Cochain::cartan_coboundary(&a1, &a2).unwrap();
    assert_eq!(z.values(), &[1]);
    let z0 = Cochain::cartan_coboundary(&Cochain::zero(&c, 2, 2), &a2).unwrap();
    assert!(z0.is_zero());
}
