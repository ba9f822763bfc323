use std::collections::{BTreeMap, BTreeSet};

use monogen_core::grid::{dirac_op, Boundary, Grid, GridField};
use monogen_core::symbolic::{parse_field, Dependencies, ScalarExpr, SymField};
use monogen_core::{Blade, Multivector, Signature};
use proptest::prelude::*;

fn deps() -> Dependencies {
    let mut d = BTreeMap::new();
    d.insert("f".to_string(), BTreeSet::from([1u8, 2]));
    d.insert("g".to_string(), BTreeSet::from([1u8, 3]));
    d.insert("h".to_string(), BTreeSet::from([1u8, 2, 3]));
    d
}

fn cl3() -> Signature {
    Signature::euclidean(3).unwrap()
}

fn atom() -> impl Strategy<Value = String> {
    prop_oneof![
        Just("f".to_string()),
        Just("g".to_string()),
        Just("h".to_string()),
        Just("A1".to_string()),
        Just("x2".to_string()),
        Just("d_1(f)".to_string()),
        Just("d_3(g)".to_string()),
        Just("exp(A1 x1)".to_string()),
        Just("ln(f)".to_string()),
        Just("1/g".to_string()),
        Just("3/2".to_string()),
        Just("(f + g)".to_string()),
    ]
}

fn blade() -> impl Strategy<Value = String> {
    prop_oneof![
        Just(String::new()),
        Just("e1".to_string()),
        Just("e3".to_string()),
        Just("e2^e1".to_string()),
        Just("e1^e2^e3".to_string()),
    ]
}

fn field_text() -> impl Strategy<Value = String> {
    prop::collection::vec((prop::bool::ANY, prop::collection::vec(atom(), 1..4), blade()), 1..5).prop_map(|terms| {
        let mut s = String::new();
        for (i, (neg, factors, b)) in terms.into_iter().enumerate() {
            s.push_str(if neg { " - " } else if i > 0 { " + " } else { "" });
            s.push_str(&factors.join(" "));
            if !b.is_empty() {
                s.push(' ');
                s.push_str(&b);
            }
        }
        s
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn print_parse_round_trip(text in field_text()) {
        let f = parse_field(&text, cl3(), &deps()).unwrap();
        let back = parse_field(&f.to_string(), cl3(), &deps()).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn canonicalize_is_idempotent(text in field_text()) {
        let f = parse_field(&text, cl3(), &deps()).unwrap();
        let once = f.canonicalize();
        prop_assert_eq!(&once, &f);
        prop_assert_eq!(once.canonicalize(), once);
    }

    #[test]
    fn dirac_is_linear(a in field_text(), b in field_text()) {
        let fa = parse_field(&a, cl3(), &deps()).unwrap();
        let fb = parse_field(&b, cl3(), &deps()).unwrap();
        prop_assert_eq!(fa.add(&fb).unwrap().dirac(), fa.dirac().add(&fb.dirac()).unwrap());
    }

    #[test]
    fn split_recombines(a in field_text()) {
        let f = parse_field(&a, cl3(), &deps()).unwrap();
        prop_assert_eq!(f.interior().add(&f.exterior()).unwrap(), f.dirac());
    }
}

#[test]
fn dirac_squared_of_scalar_is_laplacian() {
    let h = parse_field("h", cl3(), &deps()).unwrap();
    let want = parse_field("d_1(d_1(h)) + d_2(d_2(h)) + d_3(d_3(h))", cl3(), &deps()).unwrap();
    assert_eq!(h.dirac().dirac(), want);
    let f = parse_field("f", cl3(), &deps()).unwrap();
    assert_eq!(f.dirac().dirac(), parse_field("d_1(d_1(f)) + d_2(d_2(f))", cl3(), &deps()).unwrap());
}

#[test]
fn symbolic_projection_e1_times_e12() {
    let e1 = parse_field("e1", cl3(), &Dependencies::new()).unwrap();
    let e12 = parse_field("e1^e2", cl3(), &Dependencies::new()).unwrap();
    assert_eq!(e1.geometric(&e12).unwrap(), parse_field("e2", cl3(), &Dependencies::new()).unwrap());
}

/// Symbolic ∇ with concrete functions plugged in against the grid stencil.
#[test]
fn symbolic_dirac_agrees_with_grid_dirac() {
    let field = parse_field("f e1^e2 + g e3 + f g", cl3(), &deps()).unwrap();
    let sym = field.dirac();
    // f = sin(x1) cos(x2), g = exp(x1/2) x3
    let value = |x: &[f64], name: &str, idx: &[u8]| -> f64 {
        let (x1, x2, x3) = (x[0], x[1], x[2]);
        let mut d = idx.to_vec();
        d.sort();
        match (name, d.as_slice()) {
            ("f", []) => x1.sin() * x2.cos(),
            ("f", [1]) => x1.cos() * x2.cos(),
            ("f", [2]) => -x1.sin() * x2.sin(),
            ("g", []) => (x1 / 2.0).exp() * x3,
            ("g", [1]) => 0.5 * (x1 / 2.0).exp() * x3,
            ("g", [3]) => (x1 / 2.0).exp(),
            _ => panic!("unexpected {name}{idx:?}"),
        }
    };
    let mut errs = Vec::new();
    for n in [11usize, 21] {
        let grid = Grid::uniform(3, n, 0.0, 1.0, Boundary::Clamped).unwrap();
        let sampled = GridField::from_fn(grid.clone(), cl3(), |x| field.eval(x, |s, i| value(x, s, i))).unwrap();
        let num = dirac_op(&sampled);
        let mut err: f64 = 0.0;
        for node in 0..grid.node_count() {
            let x = grid.coords(node);
            if x.iter().any(|c| !(0.19..=0.81).contains(c)) {
                continue;
            }
            let exact: Multivector = sym.eval(&x, |s, i| value(&x, s, i));
            err = err.max(num.value(node).max_abs_diff(&exact));
        }
        errs.push(err);
    }
    let order = (errs[0] / errs[1]).log2();
    assert!(errs[1] < 1e-3, "{errs:?}");
    assert!(order > 1.8, "order {order} from {errs:?}");
}

#[test]
fn undeclared_symbols_are_constants() {
    let f = parse_field("k e1 + exp(k) e2", cl3(), &deps()).unwrap();
    assert!(f.dirac().is_zero());
    let c = SymField::from_terms(cl3(), deps(), [(Blade::SCALAR, ScalarExpr::symbol("c"))]).unwrap();
    assert!(c.dirac().is_zero());
}
