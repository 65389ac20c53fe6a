mod common;

use common::c;
use qwalk::decouple::multiplicity_pattern;
use qwalk::lattice::SeededRng;
use qwalk::stencil::Offset;
use qwalk::tensoralg::eigenphases;
use qwalk::walks::{weyl3p1, WalkKind};

#[test]
fn symbol_determinant_is_one() {
    let mut rng = SeededRng::new(21);
    for kind in WalkKind::ALL {
        let w = kind.build(kind.effective_mass(0.35), 0.1).unwrap();
        for _ in 0..100 {
            let k = rng.brillouin(kind.ndim(), 0.1);
            let s = w.stencil.symbol(&k);
            assert!((s.det() - 1.0).norm() <= 1e-12);
            assert!(s.unitarity_defect() <= 1e-13);
        }
    }
}

#[test]
fn dirac3_has_four_distinct_eigenphases_at_generic_momentum() {
    let w = WalkKind::Dirac3.build(0.35, 0.1).unwrap();
    let eigs = eigenphases(&w.stencil.symbol(&[0.5, 0.3, 0.2])).unwrap();
    assert_eq!(multiplicity_pattern(&eigs, 1e-8), vec![1, 1, 1, 1]);
}

#[test]
fn weyl_axis_eigenphases_are_exact() {
    let eps = 0.1;
    let w = weyl3p1(eps).unwrap();
    for axis in 0..3 {
        for kappa in [0.3, 1.7, 12.0] {
            let mut k = [0.0; 3];
            k[axis] = kappa;
            let eigs = eigenphases(&w.stencil.symbol(&k)).unwrap();
            let want = [-kappa * eps, kappa * eps];
            for (z, phase) in eigs.iter().zip(want) {
                assert!((z - c(phase.cos(), phase.sin())).norm() <= 1e-14);
            }
        }
    }
}

#[test]
fn weyl_trace_lives_on_cube_corners() {
    let w = weyl3p1(0.1).unwrap();
    let tr = w.stencil.trace_stencil();
    assert_eq!(tr.num_terms(), 8);
    for s1 in [-1, 1] {
        for s2 in [-1, 1] {
            for s3 in [-1, 1] {
                let want = c(0.25, 0.25 * (s1 * s2 * s3) as f64);
                let got = tr.coefficient(&Offset([s1, s2, s3]))[(0, 0)];
                assert!((got - want).norm() <= 1e-15, "{s1} {s2} {s3}: {got}");
            }
        }
    }
}

#[test]
fn parameters_are_validated() {
    assert!(WalkKind::Dirac2.build(0.35, 0.0).is_err());
    assert!(WalkKind::Dirac3.build(-1.0, 0.1).is_err());
    assert!("dirac5".parse::<WalkKind>().is_err());
    for kind in WalkKind::ALL {
        assert_eq!(kind.name().parse::<WalkKind>().unwrap(), kind);
    }
}
