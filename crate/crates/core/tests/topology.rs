use std::f64::consts::PI;
use std::time::Instant;

use monogen_core::grid::{laplacian, Boundary, ComplexField, Contour, Grid};
use monogen_core::topo::{
    betti_numbers, born_sommerfeld_integral, count_zeros, harmonic_fields, verify_dbs, winding_number, LoopRoute,
    ZeroOracle,
};
use monogen_core::{Complex64, Signature};
use proptest::prelude::*;

fn circle(r: f64, samples: usize) -> Contour {
    Contour::Circle { center: [0.0, 0.0], radius: r, samples }
}

fn roots(rs: &[(f64, f64)]) -> impl Fn(Complex64) -> Complex64 + '_ {
    move |z| rs.iter().fold(Complex64::new(1.0, 0.0), |acc, &(a, b)| acc * (z - Complex64::new(a, b)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn argument_principle_matches_oracle(rs in prop::collection::vec((-0.8f64..0.8, -0.8f64..0.8), 0..4)) {
        // keep roots off the contour and apart from one another
        prop_assume!(rs.iter().all(|(a, b)| (a * a + b * b).sqrt() < 0.85 || (a * a + b * b).sqrt() > 1.15));
        for (i, p) in rs.iter().enumerate() {
            for q in &rs[..i] {
                prop_assume!(((p.0 - q.0).powi(2) + (p.1 - q.1).powi(2)).sqrt() > 0.1);
            }
        }
        let f = roots(&rs);
        let inside = rs.iter().filter(|(a, b)| a * a + b * b < 1.0).count() as i64;
        let c = count_zeros(&f, &circle(1.0, 256), ZeroOracle::default()).unwrap();
        prop_assert_eq!(c.argument, inside);
        prop_assert_eq!(c.oracle_total, inside);
        prop_assert_eq!(winding_number(&f, &circle(1.0, 256)).unwrap(), inside);
    }

    #[test]
    fn winding_is_refinement_invariant(n in 0u32..6, samples in 16usize..64) {
        let f = move |z: Complex64| z.powu(n) + Complex64::new(0.05, 0.0);
        let w1 = winding_number(&f, &circle(1.0, samples)).unwrap();
        let w2 = winding_number(&f, &circle(1.0, 2 * samples)).unwrap();
        prop_assert_eq!(w1, w2);
        prop_assert_eq!(w1, n as i64);
    }

    #[test]
    fn winding_is_additive(a in 0u32..4, b in 0u32..4, lambda in 0.01f64..100.0) {
        let fa = move |z: Complex64| z.powu(a);
        let fb = move |z: Complex64| z.conj().powu(b) * Complex64::new(1.0, 2.0);
        let prod = move |z: Complex64| fa(z) * fb(z) * lambda;
        let c = circle(1.0, 64);
        prop_assert_eq!(
            winding_number(&prod, &c).unwrap(),
            winding_number(&fa, &c).unwrap() + winding_number(&fb, &c).unwrap()
        );
    }
}

#[test]
fn reports_are_scale_invariant() {
    let f = |z: Complex64| (z - 0.3) * (z + Complex64::new(0.0, 0.4));
    let base = verify_dbs(&f, &circle(1.0, 256), 1.0).unwrap();
    for lambda in [0.1, 10.0] {
        let g = move |z: Complex64| f(z) * lambda;
        let r = verify_dbs(&g, &circle(1.0, 256), 1.0).unwrap();
        assert_eq!((r.winding, r.zeros, r.oracle_zeros), (base.winding, base.zeros, base.oracle_zeros));
        assert!((r.loop_integral - base.loop_integral).abs() < 1e-12 * base.loop_integral.abs());
    }
}

#[test]
fn sampled_field_winding_via_interpolation() {
    let g = Grid::uniform(2, 101, -1.5, 1.5, Boundary::Clamped).unwrap();
    let f = ComplexField::from_fn(g, |z| z * z * z).unwrap();
    assert_eq!(winding_number(&f, &circle(1.0, 128)).unwrap(), 3);
    let v = born_sommerfeld_integral(&f, &circle(1.0, 128), 1.0, LoopRoute::Phase).unwrap();
    assert!((v - 6.0 * PI).abs() < 1e-9);
}

#[test]
fn torus_betti_numbers() {
    let g = Grid::uniform(2, 16, 0.0, 1.0, Boundary::Periodic).unwrap();
    let sig = Signature::euclidean(2).unwrap();
    let start = Instant::now();
    let r = betti_numbers(&g, sig, 2).unwrap();
    assert_eq!(r.iter().map(|b| b.kernel_dim).collect::<Vec<_>>(), [1, 2, 1]);
    assert!(r.iter().all(|b| b.gap_ok));
    assert!(start.elapsed().as_secs() < 60);
    for k in 0..=2 {
        for f in harmonic_fields(&g, sig, k).unwrap() {
            assert!(laplacian(&f).data().iter().all(|v| v.abs() < 1e-8));
        }
    }
}

#[test]
fn three_torus_betti_numbers() {
    let g = Grid::uniform(3, 6, 0.0, 1.0, Boundary::Periodic).unwrap();
    let r = betti_numbers(&g, Signature::euclidean(3).unwrap(), 4).unwrap();
    assert_eq!(r.iter().map(|b| b.kernel_dim).collect::<Vec<_>>(), [1, 3, 3, 1, 0]);
}
