use nalgebra::DMatrix;
use proptest::prelude::*;
use tangles::pairing::enumerate_basis;
use tangles::{Pairing, TLBasis, TLContext, TLElement, C64};

/// Matrix of a diagram on (C^d)^k: bottom points are inputs, top points
/// outputs, and an entry is 1 when every strand joins equal labels.
fn diagram_matrix(p: &Pairing, d: usize) -> DMatrix<C64> {
    let k = p.box_size();
    let dim = d.pow(k as u32);
    let digits = |mut v: usize| {
        let mut out = vec![0; k];
        for slot in out.iter_mut().rev() {
            *slot = v % d;
            v /= d;
        }
        out
    };
    DMatrix::from_fn(dim, dim, |row, col| {
        let (top, bottom) = (digits(row), digits(col));
        let label = |i: usize| if i < k { top[i] } else { bottom[2 * k - 1 - i] };
        let ok = (0..2 * k).all(|i| label(i) == label(p.partner(i)));
        C64::new(if ok { 1.0 } else { 0.0 }, 0.0)
    })
}

fn element_matrix(x: &TLElement, d: usize) -> DMatrix<C64> {
    let dim = d.pow(x.box_size() as u32);
    x.terms()
        .fold(DMatrix::zeros(dim, dim), |acc, (p, c)| acc + diagram_matrix(p, d) * *c)
}

fn close(a: &TLElement, b: &TLElement, tol: f64) -> bool {
    a.distance(b).unwrap() <= tol
}

fn element(k: usize) -> impl Strategy<Value = TLElement> {
    let n = enumerate_basis(k).unwrap().len();
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0, proptest::bool::weighted(0.6)), n).prop_map(move |cs| {
        let basis = enumerate_basis(k).unwrap();
        let terms = basis
            .into_iter()
            .zip(cs)
            .filter(|(_, (_, _, keep))| *keep)
            .map(|(p, (re, im, _))| (p, C64::new(re, im)));
        TLElement::from_terms(k, terms).unwrap()
    })
}

fn triple() -> impl Strategy<Value = (TLElement, TLElement, TLElement)> {
    (1usize..=4).prop_flat_map(|k| (element(k), element(k), element(k)))
}

fn loop_value() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.0), Just(2.0f64.sqrt()), Just(1.5), Just(2.0), 0.2f64..3.0]
}

#[test]
fn diagram_algebra_matches_matrix_representation() {
    for d in [2usize, 3] {
        let ctx = TLContext::new(d as f64).unwrap();
        for k in 1..=3 {
            let basis = enumerate_basis(k).unwrap();
            for a in &basis {
                let ma = diagram_matrix(a, d);
                let x = TLElement::from_diagram(a.clone(), C64::new(1.0, 0.0));
                assert!((ma.trace() - x.trace(&ctx)).norm() < 1e-12);
                assert_eq!(diagram_matrix(&a.reflect(), d), ma.transpose());
                for b in &basis {
                    let y = TLElement::from_diagram(b.clone(), C64::new(1.0, 0.0));
                    // y is stacked on top, so it acts second.
                    let prod = element_matrix(&x.mult(&y, &ctx).unwrap(), d);
                    assert!((prod - diagram_matrix(b, d) * &ma).norm() < 1e-12);
                    let kron = element_matrix(&x.tensor(&y), d);
                    assert!((kron - ma.kronecker(&diagram_matrix(b, d))).norm() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn identity_trace_is_a_power_of_q() {
    for q in [0.5, 1.0, 1.7, 2.0, 3.0] {
        let ctx = TLContext::new(q).unwrap();
        for k in 0..=6 {
            let one = TLElement::one(k);
            assert!((one.trace(&ctx).re - q.powi(k as i32)).abs() < 1e-12 * q.powi(k as i32).max(1.0));
        }
    }
}

#[test]
fn gram_matrix_is_positive_for_large_loop_values() {
    for q in [2.0, 2.5, 4.0] {
        let ctx = TLContext::new(q).unwrap();
        for k in 1..=5 {
            let basis = TLBasis::new(k).unwrap();
            let elems: Vec<TLElement> = basis
                .diagrams()
                .iter()
                .map(|p| TLElement::from_diagram(p.clone(), C64::new(1.0, 0.0)))
                .collect();
            let n = elems.len();
            let gram = DMatrix::from_fn(n, n, |i, j| elems[i].inner_product(&elems[j], &ctx).unwrap());
            assert!((&gram - gram.adjoint()).norm() < 1e-9);
            let eig = gram.map(|c| c.re).symmetric_eigen().eigenvalues;
            let scale = q.powi(k as i32);
            assert!(eig.iter().all(|&e| e > -1e-9 * scale), "q={q}, k={k}: {eig}");
        }
    }
}

#[test]
fn rotation_by_full_turn_is_trivial() {
    for k in 1..=5 {
        let basis = TLBasis::new(k).unwrap();
        for i in 0..basis.len() {
            let x = TLElement::from_diagram(basis.diagrams()[i].clone(), C64::new(0.3, -1.1));
            assert_eq!(x.rotate(2 * k as i64), x);
            assert_eq!(basis.rotate_index(basis.rotate_index(i)), basis.index_of(&basis.diagrams()[i].rotate(2)).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mult_is_associative_and_bilinear((x, y, z) in triple(), q in loop_value(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let ctx = TLContext::new(q).unwrap();
        let xy_z = x.mult(&y, &ctx).unwrap().mult(&z, &ctx).unwrap();
        let x_yz = x.mult(&y.mult(&z, &ctx).unwrap(), &ctx).unwrap();
        let scale = 1.0 + xy_z.max_norm();
        prop_assert!(close(&xy_z, &x_yz, 1e-10 * scale));

        let (ca, cb) = (C64::new(a, 0.5), C64::new(-0.25, b));
        let lhs = x.scale(ca).add(&y.scale(cb)).unwrap().mult(&z, &ctx).unwrap();
        let rhs = x.mult(&z, &ctx).unwrap().scale(ca).add(&y.mult(&z, &ctx).unwrap().scale(cb)).unwrap();
        prop_assert!(close(&lhs, &rhs, 1e-10 * (1.0 + lhs.max_norm())));
    }

    #[test]
    fn adjoint_reverses_products((x, y, _) in triple(), q in loop_value()) {
        let ctx = TLContext::new(q).unwrap();
        let lhs = x.mult(&y, &ctx).unwrap().adjoint();
        let rhs = y.adjoint().mult(&x.adjoint(), &ctx).unwrap();
        prop_assert!(close(&lhs, &rhs, 1e-10 * (1.0 + lhs.max_norm())));
        prop_assert_eq!(x.adjoint().adjoint(), x);
    }

    #[test]
    fn trace_is_cyclic_and_closes_both_ways((x, y, _) in triple(), q in loop_value()) {
        let ctx = TLContext::new(q).unwrap();
        let t1 = x.mult(&y, &ctx).unwrap().trace(&ctx);
        let t2 = y.mult(&x, &ctx).unwrap().trace(&ctx);
        prop_assert!((t1 - t2).norm() <= 1e-9 * (1.0 + t1.norm()));
        let (r, l) = (x.trace(&ctx), x.trace_left(&ctx));
        prop_assert!((r - l).norm() <= 1e-10 * (1.0 + r.norm()));
    }

    #[test]
    fn inner_product_is_positive_at_q2((x, _, _) in triple()) {
        let ctx = TLContext::new(2.0).unwrap();
        let ip = x.inner_product(&x, &ctx).unwrap();
        prop_assert!(ip.im.abs() <= 1e-9 * (1.0 + ip.norm()));
        prop_assert!(ip.re >= -1e-9);
    }

    #[test]
    fn rotation_and_reflection_laws((x, _, _) in triple(), s in -10i64..10) {
        let k = x.box_size() as i64;
        prop_assert_eq!(x.rotate(s).rotate(-s), x.clone());
        prop_assert_eq!(x.rotate(2 * k), x.clone());
        prop_assert_eq!(x.rotate(1).adjoint(), x.adjoint().rotate(-1));
    }

    #[test]
    fn dense_and_sparse_products_agree((x, y, _) in triple(), q in loop_value()) {
        let ctx = TLContext::new(q).unwrap();
        let basis = TLBasis::new(x.box_size()).unwrap();
        let pow = basis.loop_powers(&ctx);
        let dense = basis.mult_dense(&basis.to_dense(&x).unwrap(), &basis.to_dense(&y).unwrap(), &pow);
        let sparse = x.mult(&y, &ctx).unwrap();
        prop_assert!(close(&basis.from_dense(&dense), &sparse, 1e-10 * (1.0 + sparse.max_norm())));
        let rot = basis.rotate_dense(&basis.to_dense(&x).unwrap(), 1);
        prop_assert_eq!(basis.from_dense(&rot), x.rotate(1));
        let adj = basis.adjoint_dense(&basis.to_dense(&x).unwrap());
        prop_assert_eq!(basis.from_dense(&adj), x.adjoint());
    }

    #[test]
    fn conditional_expectation_of_inclusion((x, _, _) in triple(), q in loop_value()) {
        let ctx = TLContext::new(q).unwrap();
        let back = x.include().cond_expect(&ctx).unwrap();
        prop_assert!(close(&back, &x.scale(C64::new(q, 0.0)), 1e-12 * (1.0 + q * x.max_norm())));
        let t1 = x.include().trace(&ctx);
        let t2 = x.trace(&ctx) * q;
        prop_assert!((t1 - t2).norm() <= 1e-10 * (1.0 + t2.norm()));
    }

    #[test]
    fn json_round_trip_is_exact((x, _, _) in triple()) {
        let text = serde_json::to_string(&x).unwrap();
        let back: TLElement = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &x);
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }
}
