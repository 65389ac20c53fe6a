mod common;

use std::collections::BTreeMap;

use common::{c, random_stencil};
use proptest::prelude::*;
use qwalk::lattice::{plane_wave, random_field, Grid, SeededRng};
use qwalk::stencil::{Offset, StencilOp};
use qwalk::tensoralg::CMat;
use qwalk::walks::{dirac2p1, WalkKind};

/// Composition by an explicit double sum over term pairs, written
/// independently of `StencilOp::compose`.
fn double_sum(a: &StencilOp, b: &StencilOp) -> BTreeMap<Offset, CMat> {
    let mut out: BTreeMap<Offset, CMat> = BTreeMap::new();
    for (oa, ma) in a.terms() {
        for (ob, mb) in b.terms() {
            let o = Offset([oa.0[0] + ob.0[0], oa.0[1] + ob.0[1], oa.0[2] + ob.0[2]]);
            let entry = out.entry(o).or_insert_with(|| CMat::zeros(a.dim()));
            *entry = *entry + *ma * *mb;
        }
    }
    out
}

fn map_distance(s: &StencilOp, m: &BTreeMap<Offset, CMat>) -> f64 {
    let mut worst = 0.0f64;
    for (o, mat) in m {
        worst = worst.max((s.coefficient(o) - *mat).max_norm());
    }
    for (o, mat) in s.terms() {
        if !m.contains_key(o) {
            worst = worst.max(mat.max_norm());
        }
    }
    worst
}

#[test]
fn composition_is_associative_and_matches_double_sum() {
    let mut rng = SeededRng::new(5);
    for _ in 0..10 {
        let a = random_stencil(&mut rng, 2, 2, 0.1, 5, 2);
        let b = random_stencil(&mut rng, 2, 2, 0.1, 5, 2);
        let cc = random_stencil(&mut rng, 2, 2, 0.1, 5, 2);
        let ab = a.compose(&b).unwrap();
        assert!(map_distance(&ab, &double_sum(&a, &b)) <= 1e-13);
        let left = ab.compose(&cc).unwrap();
        let right = a.compose(&b.compose(&cc).unwrap()).unwrap();
        assert!(left.distance(&right).unwrap() <= 1e-13);
    }
}

#[test]
fn compose_with_identity_is_neutral() {
    let mut rng = SeededRng::new(6);
    let s = random_stencil(&mut rng, 3, 4, 0.1, 6, 2);
    let id = StencilOp::identity(3, 4, 0.1);
    assert_eq!(s.compose(&id).unwrap(), s);
    assert_eq!(id.compose(&s).unwrap(), s);
    assert!(s.compose(&StencilOp::identity(3, 2, 0.1)).is_err());
}

#[test]
fn trace_is_cyclic() {
    let mut rng = SeededRng::new(8);
    for _ in 0..10 {
        let a = random_stencil(&mut rng, 3, 4, 0.1, 4, 1);
        let b = random_stencil(&mut rng, 3, 4, 0.1, 4, 1);
        // oracle: explicit sum of traces of the double-sum products
        let mut traces: BTreeMap<Offset, f64> = BTreeMap::new();
        let ab = double_sum(&a, &b);
        let ba = double_sum(&b, &a);
        for (o, m) in &ab {
            let t = (m.trace() - ba.get(o).map(|x| x.trace()).unwrap_or_default()).norm();
            traces.insert(*o, t);
        }
        assert!(traces.values().all(|&t| t <= 1e-13));
        let lhs = a.compose(&b).unwrap().trace_stencil();
        let rhs = b.compose(&a).unwrap().trace_stencil();
        assert!(lhs.distance(&rhs).unwrap() <= 1e-13);
    }
}

#[test]
fn dirac2_trace_is_four_term_formula() {
    let (m, eps) = (0.35f64, 0.1f64);
    let (s, cth) = (eps * m).sin_cos();
    let w = dirac2p1(m, eps).unwrap();
    let tr = w.stencil.trace_stencil();
    let want = StencilOp::from_terms(
        2,
        1,
        eps,
        [
            (Offset([1, 1, 0]), CMat::scalar(1, c((cth - s) / 2.0, 0.0))),
            (Offset([-1, -1, 0]), CMat::scalar(1, c((cth - s) / 2.0, 0.0))),
            (Offset([-1, 1, 0]), CMat::scalar(1, c((cth + s) / 2.0, 0.0))),
            (Offset([1, -1, 0]), CMat::scalar(1, c((cth + s) / 2.0, 0.0))),
        ],
    )
    .unwrap();
    assert_eq!(tr.num_terms(), 4);
    assert!(tr.distance(&want).unwrap() <= 1e-15);

    // its symbol, expanded with product-to-sum identities
    let mut rng = SeededRng::new(9);
    for _ in 0..50 {
        let k = rng.brillouin(2, eps);
        let closed = 2.0
            * ((m * eps).cos() * (k[0] * eps).cos() * (k[1] * eps).cos()
                + (m * eps).sin() * (k[0] * eps).sin() * (k[1] * eps).sin());
        assert!((tr.scalar_symbol(&k) - c(closed, 0.0)).norm() <= 1e-14);
    }
}

#[test]
fn symbol_is_a_homomorphism() {
    let mut rng = SeededRng::new(10);
    for _ in 0..5 {
        let a = random_stencil(&mut rng, 3, 2, 0.1, 6, 3);
        let b = random_stencil(&mut rng, 3, 2, 0.1, 6, 3);
        let ab = a.compose(&b).unwrap();
        for _ in 0..50 {
            let k = rng.brillouin(3, 0.1);
            let lhs = ab.symbol(&k);
            let rhs = a.symbol(&k) * b.symbol(&k);
            assert!((lhs - rhs).max_norm() <= 1e-12);
        }
    }
}

#[test]
fn walks_are_unitary_stencils() {
    for kind in WalkKind::ALL {
        let w = kind.build(0.35, 0.1).unwrap();
        let prod = w.stencil.compose(&w.stencil.adjoint()).unwrap();
        let id = StencilOp::identity(kind.ndim(), kind.components(), 0.1);
        assert!(prod.distance(&id).unwrap() <= 1e-13, "{kind}");
    }
}

#[test]
fn apply_on_plane_wave_is_symbol_action() {
    let grid = Grid::new(&[16, 8], 0.1).unwrap();
    let w = dirac2p1(0.35, 0.1).unwrap();
    let k = [grid.momentum_quantum(0) * 3.0, grid.momentum_quantum(1) * -2.0];
    let v = [c(0.6, 0.0), c(0.0, 0.8)];
    let f = plane_wave(&k, &v, &grid).unwrap();
    let out = w.stencil.apply(&f).unwrap();
    let want = plane_wave(&k, &w.stencil.symbol(&k).mul_vec(&v), &grid).unwrap();
    assert!(out.sub(&want).unwrap().max_abs() <= 1e-14);
}

#[test]
fn apply_preserves_norm() {
    let grid = Grid::new(&[32, 32], 0.1).unwrap();
    let w = dirac2p1(0.35, 0.1).unwrap();
    for seed in 0..5 {
        let f = random_field(seed, &grid, 2);
        let out = w.stencil.apply(&f).unwrap();
        assert!((out.norm() - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn apply_is_thread_count_independent() {
    let grid = Grid::new(&[16, 16, 16], 0.1).unwrap();
    let w = WalkKind::Dirac3.build(0.35, 0.1).unwrap();
    let f = random_field(3, &grid, 4);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let serial = pool.install(|| w.stencil.apply(&f).unwrap());
    let parallel = w.stencil.apply(&f).unwrap();
    assert_eq!(serial, parallel);
}

proptest! {
    #[test]
    fn dump_round_trips(seed in any::<u64>(), d in prop_oneof![Just(1usize), Just(2), Just(4)]) {
        let mut rng = SeededRng::new(seed);
        let s = random_stencil(&mut rng, 3, d, 0.1, 5, 4);
        let back = StencilOp::parse_dump(3, d, 0.1, &s.dump()).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn adjoint_is_an_involution_and_antihomomorphism(seed in any::<u64>()) {
        let mut rng = SeededRng::new(seed);
        let a = random_stencil(&mut rng, 2, 2, 0.1, 4, 2);
        let b = random_stencil(&mut rng, 2, 2, 0.1, 4, 2);
        prop_assert_eq!(a.adjoint().adjoint(), a.clone());
        let lhs = a.compose(&b).unwrap().adjoint();
        let rhs = b.adjoint().compose(&a.adjoint()).unwrap();
        prop_assert!(lhs.distance(&rhs).unwrap() <= 1e-13);
    }
}
