use std::ops::{Add, Mul, Neg, Sub};

use proptest::prelude::*;
use tangles::cubic::{
    adjoint_cubic, cubic_residual, g2_interval_family, g2_params, g2_r_family, g2_simple, haagerup_discrepancy,
    haagerup_printed, pairing_form, rotate_cubic, run_cubic_search, square_coeffs, square_coeffs_as_printed, Branch,
    CubicElement, CubicParams, ParamsSpec, Preset,
};
use tangles::perfect::Sign;
use tangles::solver::{SolveConfig, DEDUP_TOL};
use tangles::C64;

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Exact rational.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Q(i128, i128);

impl Q {
    fn new(n: i128, d: i128) -> Self {
        let g = gcd(n, d).max(1) * d.signum();
        Q(n / g, d / g)
    }
    fn int(n: i128) -> Self {
        Q(n, 1)
    }
    fn inv(self) -> Self {
        Q::new(self.1, self.0)
    }
    fn f(self) -> f64 {
        self.0 as f64 / self.1 as f64
    }
}

impl Add for Q {
    type Output = Q;
    fn add(self, o: Q) -> Q {
        Q::new(self.0 * o.1 + o.0 * self.1, self.1 * o.1)
    }
}

impl Mul for Q {
    type Output = Q;
    fn mul(self, o: Q) -> Q {
        Q::new(self.0 * o.0, self.1 * o.1)
    }
}

/// `a + b sqrt(13)`, exactly.
#[derive(Clone, Copy, Debug, PartialEq)]
struct S(Q, Q);

impl S {
    fn q(n: i128, d: i128) -> Self {
        S(Q::new(n, d), Q::int(0))
    }
    fn inv(self) -> Self {
        // 1 / (a + b r) = (a - b r) / (a^2 - 13 b^2)
        let norm = self.0 * self.0 + Q::int(-13) * self.1 * self.1;
        let k = norm.inv();
        S(self.0 * k, Q::int(-1) * self.1 * k)
    }
    fn f(self) -> f64 {
        self.0.f() + self.1.f() * 13f64.sqrt()
    }
    fn is_zero(self) -> bool {
        self.0 .0 == 0 && self.1 .0 == 0
    }
}

impl Add for S {
    type Output = S;
    fn add(self, o: S) -> S {
        S(self.0 + o.0, self.1 + o.1)
    }
}

impl Sub for S {
    type Output = S;
    fn sub(self, o: S) -> S {
        self + -o
    }
}

impl Neg for S {
    type Output = S;
    fn neg(self) -> S {
        S(Q::int(-1) * self.0, Q::int(-1) * self.1)
    }
}

impl Mul for S {
    type Output = S;
    fn mul(self, o: S) -> S {
        S(self.0 * o.0 + Q::int(13) * self.1 * o.1, self.0 * o.1 + self.1 * o.0)
    }
}

fn haagerup_exact() -> (S, S) {
    let d = S(Q::new(3, 2), Q::new(1, 2));
    let t = S(Q::new(2, 3), Q::new(-1, 3));
    (d, t)
}

/// Exact `(den, A_printed, B_printed)` from the two numerators.
fn square_exact(d: S, t: S) -> (S, S, S) {
    let one = S::q(1, 1);
    let den = d * t + d + t;
    let a = (d * t * t + t * t - one) * den.inv();
    let b = (-(t * t) + t + one) * den.inv();
    (den, a, b)
}

/// Six equation values of the printed Haagerup solutions, exactly. The
/// coefficients involve sqrt3, sqrt(5 - d) and sqrt(5d + 2), but every product
/// entering the equations lies in Q(sqrt13) since (5 - d)(5d + 2) = (2 + sqrt13)^2.
fn haagerup_equations_exact(a_sq: S, b_sq: S) -> [S; 6] {
    let (d, t) = haagerup_exact();
    let c = |n: i128| S::q(n, 1);
    let dp1 = d + c(1);
    let root = S(Q::int(2), Q::int(1));
    // Real parts: alpha = 4/sqrt3, beta = d/sqrt3, gamma = -2 sqrt3 (d + 1), delta = -3 sqrt3 d.
    let ra_rb = S::q(4, 3) * d;
    let ra_rg = c(-8) * dp1;
    let ra_rd = c(-12) * d;
    let rb_rg = c(-2) * d * dp1;
    let rb_rd = c(-3) * d * d;
    let rg_rd = c(18) * d * dp1;
    // Imaginary parts: beta = -s sqrt(5-d), gamma = 2s sqrt(5d+2), delta = s sqrt(5-d).
    let ib_ig = c(-2) * root;
    let ib_id = -(c(5) - d);
    let ig_id = c(2) * root;
    let na = S::q(16, 3);
    let nb = S::q(1, 3) * d * d + c(5) - d;
    let ng = c(12) * dp1 * dp1 + c(4) * (c(5) * d + c(2));
    let nd = c(27) * d * d + c(5) - d;
    let two = c(2);
    [
        d * nb + two * (ra_rb + rb_rg + ib_ig) + a_sq * ng,
        d * na + two * (ra_rb + ra_rd) + a_sq * nd,
        two * ra_rg + b_sq * ng,
        two * (rb_rd + ib_id) + b_sq * nd,
        nd + two * (ra_rd + t * (rg_rd + ig_id)) + b_sq * ng,
        ng + two * (rb_rg + ib_ig + t * (rg_rd + ig_id)) + b_sq * nd,
    ]
}

fn known_g2() -> Vec<CubicElement> {
    let mut out = vec![g2_simple(0).unwrap(), g2_simple(1).unwrap()];
    for r in [-3.0, -1.0, 0.0, 1.0, 5.0, 0.37] {
        out.push(g2_r_family(r));
    }
    for r in [-3.0, -2.0, -1.0, -0.5, -3.9, -0.01] {
        out.push(g2_interval_family(r, Sign::Plus).unwrap());
        out.push(g2_interval_family(r, Sign::Minus).unwrap());
    }
    out
}

#[test]
fn g2_square_coefficients_are_exact() {
    let p = CubicParams::g2_8th_root();
    assert_eq!((p.d, p.t, p.a, p.b), (3.0, -0.5, 0.25, 0.0));
    let (d, t) = g2_params(C64::from_polar(1.0, std::f64::consts::FRAC_PI_4));
    assert!((d - C64::new(3.0, 0.0)).norm() < 1e-13);
    assert!((t - C64::new(-0.5, 0.0)).norm() < 1e-14);
    assert_eq!(square_coeffs(1.0, 1.0).unwrap(), (1.0 / 3.0, 1.0 / 3.0));
    assert!(square_coeffs(1.0, -0.5).is_err());
}

#[test]
fn haagerup_square_coefficients_match_surd_oracle() {
    let (d, t) = haagerup_exact();
    let (den, a_lit, b_lit) = square_exact(d, t);
    assert_eq!(den, S::q(1, 1));
    assert_eq!(a_lit, S(Q::new(5, 6), Q::new(-1, 6)));
    assert_eq!(b_lit, S(Q::new(-2, 9), Q::new(1, 9)));
    // B (5d + 2) = d under the literal reading.
    assert_eq!(b_lit * (S::q(5, 1) * d + S::q(2, 1)), d);

    let p = CubicParams::haagerup();
    assert!((p.d - d.f()).abs() < 1e-14 && (p.t - t.f()).abs() < 1e-14);
    assert!((p.d * p.t + p.d + p.t - 1.0).abs() < 1e-14);
    let (al, bl) = square_coeffs_as_printed(p.d, p.t).unwrap();
    assert!((al - a_lit.f()).abs() < 1e-14 && (bl - b_lit.f()).abs() < 1e-14);
    assert!((p.a - b_lit.f()).abs() < 1e-14 && (p.b - a_lit.f()).abs() < 1e-14);
}

#[test]
fn printed_haagerup_solutions_under_both_readings() {
    let (d, t) = haagerup_exact();
    let (_, a_lit, b_lit) = square_exact(d, t);
    let literal = haagerup_equations_exact(a_lit, b_lit);
    let swapped = haagerup_equations_exact(b_lit, a_lit);
    assert_eq!(literal[2], S::q(-16, 1));
    assert!(literal.iter().all(|v| v.f().abs() > 1.0));
    assert!(swapped.iter().all(|v| v.is_zero()), "{swapped:?}");

    let report = haagerup_discrepancy();
    for check in &report.printed {
        for j in 0..6 {
            assert!((check.residual_as_printed.eq[j] - literal[j].f()).abs() < 1e-9);
            assert!((check.residual.eq[j] - swapped[j].f()).abs() < 1e-9);
        }
        assert!(check.residual.min_nondegen() > 1.0);
    }
    let p = CubicParams::haagerup();
    let r = cubic_residual(&haagerup_printed(Sign::Plus), &p);
    assert!(r.max_eq() < 1e-9);
}

#[test]
fn g2_families_solve_the_system() {
    let p = CubicParams::g2_8th_root();
    for e in known_g2() {
        let r = cubic_residual(&e, &p);
        assert!(r.max_eq() <= 1e-12, "{e:?}: {:?}", r.eq);
        assert!(r.min_nondegen() >= 1e-6);
        let rr = cubic_residual(&rotate_cubic(&e), &p);
        assert!(rr.max_eq() <= 1e-12);
    }
    assert_eq!(rotate_cubic(&g2_simple(0).unwrap()), g2_simple(1).unwrap());
    let r = cubic_residual(&g2_simple(0).unwrap(), &p);
    assert_eq!((r.eq, r.nondegen), ([0.0; 6], [1.0, 1.0]));
    assert!(g2_interval_family(0.0, Sign::Plus).is_err());
    assert!(g2_interval_family(-4.0, Sign::Plus).is_err());
}

#[test]
fn pairing_form_values() {
    assert_eq!(pairing_form(C64::new(1.0, 0.0), C64::new(0.0, 1.0)), 0.0);
    assert_eq!(pairing_form(C64::new(-2.0, 0.0), C64::new(1.0, 0.0)), -4.0);
    let z = C64::new(0.3, -1.7);
    assert!((pairing_form(z, z) - 2.0 * z.norm_sqr()).abs() < 1e-15);
    assert_eq!(
        adjoint_cubic(&g2_r_family(1.0)),
        CubicElement::new(1.0.into(), C64::new(0.0, -1.0), C64::new(0.0, 2.0), (-2.0).into())
    );
}

#[test]
fn g2_searches_recover_known_solutions() {
    let p = CubicParams::g2_8th_root();
    let cfg = SolveConfig { restarts: 60, seed: 1, ..SolveConfig::default() };
    let one = run_cubic_search(&p, Branch::AlphaOne, &cfg).unwrap();
    assert!(!one.solutions.is_empty());
    for s in &one.solutions {
        assert_eq!(s.element.alpha, C64::new(1.0, 0.0));
        assert!(cubic_residual(&s.element, &p).max_eq() <= 1e-10);
        assert!(cubic_residual(&s.element, &p).min_nondegen() >= 1e-6);
    }
    let zero = run_cubic_search(&p, Branch::AlphaZero, &cfg).unwrap();
    assert_eq!(zero.solutions.len(), 1);
    assert!(zero.solutions[0].element.distance(&g2_simple(1).unwrap()) < DEDUP_TOL);
}

#[test]
fn haagerup_search_outputs_reverify() {
    let p = CubicParams::haagerup();
    let cfg = SolveConfig { restarts: 40, seed: 0, ..SolveConfig::default() };
    for branch in [Branch::AlphaOne, Branch::AlphaZero] {
        let out = run_cubic_search(&p, branch, &cfg).unwrap();
        for s in &out.solutions {
            assert!(cubic_residual(&s.element, &p).max_eq() <= 1e-10);
        }
        assert!(out.min_residual.is_finite());
    }
}

#[test]
fn presets_and_params_files() {
    assert_eq!("g2-8th".parse::<Preset>().unwrap().params().unwrap(), CubicParams::g2_8th_root());
    assert_eq!("haagerup".parse::<Preset>().unwrap().params().unwrap(), CubicParams::haagerup());
    let fib = "fibonacci".parse::<Preset>().unwrap().params().unwrap_err().to_string();
    assert!(fib.contains("TL"));
    let spec: ParamsSpec = serde_json::from_str(r#"{"preset": "haagerup"}"#).unwrap();
    assert_eq!(spec.resolve().unwrap(), CubicParams::haagerup());
    let spec: ParamsSpec = serde_json::from_str(r#"{"d": 3.0, "t": -0.5}"#).unwrap();
    assert_eq!(spec.resolve().unwrap(), CubicParams::g2_8th_root());
    assert_eq!("alpha-zero".parse::<Branch>().unwrap(), Branch::AlphaZero);
}

fn cubic_element() -> impl Strategy<Value = CubicElement> {
    proptest::array::uniform8(-3.0f64..3.0).prop_map(|v| {
        CubicElement::new(C64::new(v[0], v[1]), C64::new(v[2], v[3]), C64::new(v[4], v[5]), C64::new(v[6], v[7]))
    })
}

proptest! {
    #[test]
    fn rotation_permutes_the_equations(e in cubic_element(), d in 0.5f64..4.0, t in -1.0f64..1.0) {
        let p = CubicParams::new(d, t).unwrap();
        let (r, rr) = (cubic_residual(&e, &p), cubic_residual(&rotate_cubic(&e), &p));
        for (a, b) in [(0, 1), (2, 3), (4, 5)] {
            prop_assert!((r.eq[a] - rr.eq[b]).abs() <= 1e-12 * (1.0 + r.eq[a].abs()));
            prop_assert!((r.eq[b] - rr.eq[a]).abs() <= 1e-12 * (1.0 + r.eq[b].abs()));
        }
        prop_assert_eq!(r.nondegen[0], rr.nondegen[1]);
        prop_assert_eq!(rotate_cubic(&rotate_cubic(&e)), e);
    }

    #[test]
    fn adjoint_leaves_the_system_invariant(e in cubic_element(), d in 0.5f64..4.0, t in -1.0f64..1.0) {
        let p = CubicParams::new(d, t).unwrap();
        let (r, ra) = (cubic_residual(&e, &p), cubic_residual(&adjoint_cubic(&e), &p));
        for j in 0..6 {
            prop_assert!((r.eq[j] - ra.eq[j]).abs() <= 1e-12 * (1.0 + r.eq[j].abs()));
        }
    }

    #[test]
    fn r_family_holds_for_every_real_r(r in -50.0f64..50.0) {
        let res = cubic_residual(&g2_r_family(r), &CubicParams::g2_8th_root());
        prop_assert!(res.max_eq() <= 1e-12 * (1.0 + r * r));
    }
}
