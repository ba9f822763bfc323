use std::f64::consts::PI;

use monogen_core::grid::{
    dirac_op, dirac_squared, gauge_residual, laplacian, monogenic_residual, partial_derivative, Boundary, ComplexField,
    GaugePotential, Grid, GridField,
};
use monogen_core::{Blade, Complex64, Multivector, Signature};
use proptest::prelude::*;

fn torus(n: usize) -> Grid {
    Grid::uniform(2, n, 0.0, 2.0 * PI, Boundary::Periodic).unwrap()
}

fn sin_sin(n: usize) -> GridField {
    GridField::scalar_fn(torus(n), Signature::euclidean(2).unwrap(), |x| x[0].sin() * x[1].sin()).unwrap()
}

fn rel_error(f: &GridField, lap: &GridField) -> f64 {
    let mut worst: f64 = 0.0;
    let mut peak: f64 = 0.0;
    for n in 0..f.grid().node_count() {
        let want = -2.0 * f.component(n, Blade::SCALAR);
        worst = worst.max((lap.component(n, Blade::SCALAR) - want).abs());
        peak = peak.max(want.abs());
    }
    worst / peak
}

#[test]
fn three_point_laplacian_of_eigenfunction() {
    let e64 = rel_error(&sin_sin(64), &laplacian(&sin_sin(64)));
    let e128 = rel_error(&sin_sin(128), &laplacian(&sin_sin(128)));
    assert!(e64 < 5e-3, "{e64}");
    assert!(e64 / e128 > 3.6);
}

#[test]
fn composed_dirac_square_of_eigenfunction() {
    let f = sin_sin(64);
    let d2 = dirac_squared(&f);
    let e64 = rel_error(&f, &d2);
    let e128 = rel_error(&sin_sin(128), &dirac_squared(&sin_sin(128)));
    assert!(e64 < 5e-3, "{e64}");
    assert!(e64 / e128 > 3.6, "{}", e64 / e128);
    // only the scalar part survives: mixed differences commute on a torus
    assert!(d2.grade_project(2).data().iter().all(|c| c.abs() < 1e-10));
}

#[test]
fn composed_square_equals_sum_of_repeated_partials() {
    let f = sin_sin(32);
    let mut sum = GridField::zeros(f.grid().clone(), f.signature()).unwrap();
    for axis in 0..2 {
        sum = sum.try_add(&partial_derivative(&partial_derivative(&f, axis), axis)).unwrap();
    }
    assert!(dirac_squared(&f).max_abs_diff(&sum).unwrap() < 1e-10);
}

fn residual_l2<F: Fn(Complex64) -> Complex64>(n: usize, f: F) -> f64 {
    let g = Grid::uniform(2, n, -1.0, 1.0, Boundary::Clamped).unwrap();
    let z = ComplexField::from_fn(g, f).unwrap().to_grid_field().unwrap();
    monogenic_residual(&z).l2()
}

#[test]
fn holomorphic_residuals() {
    // quadratics are differentiated exactly by the stencils
    assert!(residual_l2(33, |z| z * z) < 1e-12);
    let coarse = residual_l2(33, |z| z.exp());
    let fine = residual_l2(65, |z| z.exp());
    assert!((coarse / fine).log2() >= 1.8, "{coarse} {fine}");
    let cubic = (residual_l2(33, |z| z * z * z) / residual_l2(65, |z| z * z * z)).log2();
    assert!(cubic >= 1.8);
}

#[test]
fn conjugate_residual_is_two() {
    let g = Grid::uniform(2, 33, -1.0, 1.0, Boundary::Clamped).unwrap();
    let z = ComplexField::from_fn(g, |z| z.conj()).unwrap().to_grid_field().unwrap();
    let r = monogenic_residual(&z);
    assert!(r.values.iter().all(|v| (v - 2.0).abs() < 1e-6));
}

fn gauge_error(n: usize, a1: f64, a3: f64) -> f64 {
    let sig = Signature::euclidean(3).unwrap();
    let grid = Grid::uniform(3, n, -0.5, 0.5, Boundary::Clamped).unwrap();
    let g = GridField::from_fn(grid.clone(), sig, |x| {
        Multivector::from_blade(sig, Blade::from_mask(0b011), (a1 * x[0] + a3 * x[2]).exp()).unwrap()
    })
    .unwrap();
    let a = GaugePotential::from_fn(grid.clone(), sig, |_| vec![a1, 0.0, a3]).unwrap();
    let r = gauge_residual(&g, &a).unwrap();
    // fixed physical window so the measured region does not move with h
    (0..grid.node_count())
        .filter(|&n| grid.coords(n).iter().all(|c| c.abs() <= 0.3 + 1e-12))
        .map(|n| r.values[n])
        .fold(0.0, f64::max)
}

#[test]
fn exponential_gauge_solution_converges() {
    let coarse = gauge_error(11, 0.8, -1.3);
    let fine = gauge_error(21, 0.8, -1.3);
    assert!(fine < 1e-2);
    assert!((coarse / fine).log2() >= 1.8, "{coarse} {fine}");
}

#[test]
fn linear_field_interior_is_exact() {
    let sig = Signature::euclidean(2).unwrap();
    let g = Grid::uniform(2, 7, 0.0, 1.0, Boundary::Clamped).unwrap();
    let f = GridField::from_fn(g, sig, |x| Multivector::vector(sig, &[x[0], 0.0]).unwrap()).unwrap();
    let d = dirac_op(&f);
    for n in 0..d.grid().node_count() {
        assert!((d.value(n).scalar_part() - 1.0).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn residual_scales_linearly(alpha in -20.0f64..20.0, c in -1.0f64..1.0) {
        let g = Grid::uniform(2, 9, -1.0, 1.0, Boundary::Clamped).unwrap();
        let f = ComplexField::from_fn(g, |z| (z * c).sin() + z.conj() * z).unwrap().to_grid_field().unwrap();
        let r = monogenic_residual(&f);
        let rs = monogenic_residual(&f.scale(alpha));
        for (a, b) in r.values.iter().zip(&rs.values) {
            prop_assert!((alpha.abs() * a - b).abs() <= 1e-12 * (1.0 + b.abs()));
        }
    }
}
