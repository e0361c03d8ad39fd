//! Perfect morphisms on the 4-point space of a cubic trivalent category.
//!
//! An element is `alpha` (parallel strands) + `beta` (cup-cap) + `gamma`
//! (H-shape) + `delta` (I-shape).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perfect::Sign;
use crate::solver::{self, dedup_sorted, Solution, SolveConfig, DEDUP_TOL};
use crate::tl::C64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubicElement {
    pub alpha: C64,
    pub beta: C64,
    pub gamma: C64,
    pub delta: C64,
}

impl CubicElement {
    pub fn new(alpha: C64, beta: C64, gamma: C64, delta: C64) -> Self {
        Self { alpha, beta, gamma, delta }
    }

    pub fn real(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Self {
        Self::new(alpha.into(), beta.into(), gamma.into(), delta.into())
    }

    pub fn coeffs(&self) -> [C64; 4] {
        [self.alpha, self.beta, self.gamma, self.delta]
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::new(self.alpha * c, self.beta * c, self.gamma * c, self.delta * c)
    }

    pub fn distance(&self, other: &CubicElement) -> f64 {
        self.coeffs()
            .iter()
            .zip(other.coeffs())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// One click: swaps `alpha` with `beta` and `gamma` with `delta`.
pub fn rotate_cubic(e: &CubicElement) -> CubicElement {
    CubicElement::new(e.beta, e.alpha, e.delta, e.gamma)
}

pub fn adjoint_cubic(e: &CubicElement) -> CubicElement {
    CubicElement::new(e.alpha.conj(), e.beta.conj(), e.gamma.conj(), e.delta.conj())
}

/// `(z, w) = z conj(w) + conj(z) w`.
pub fn pairing_form(z: C64, w: C64) -> f64 {
    2.0 * (z.re * w.re + z.im * w.im)
}

fn denominator(d: f64, t: f64) -> Result<f64> {
    let den = d * t + d + t;
    if den == 0.0 || !den.is_finite() {
        return Err(Error::DegenerateSquare);
    }
    Ok(den)
}

/// Square-relation coefficients `(A, B)`.
///
/// `A = (-t^2 + t + 1)/(dt + d + t)`, `B = (dt^2 + t^2 - 1)/(dt + d + t)`.
/// This is the assignment under which `(d, t) = (3, -1/2)` gives `A = 1/4`,
/// `B = 0` and the known G2 and Haagerup solutions satisfy the system.
pub fn square_coeffs(d: f64, t: f64) -> Result<(f64, f64)> {
    let (a, b) = square_coeffs_as_printed(d, t)?;
    Ok((b, a))
}

/// The literal reading `A = (dt^2 + t^2 - 1)/(dt + d + t)`,
/// `B = (-t^2 + t + 1)/(dt + d + t)`, kept for the discrepancy report.
pub fn square_coeffs_as_printed(d: f64, t: f64) -> Result<(f64, f64)> {
    let den = denominator(d, t)?;
    Ok(((d * t * t + t * t - 1.0) / den, (-t * t + t + 1.0) / den))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubicParams {
    pub d: f64,
    pub t: f64,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
}

impl CubicParams {
    pub fn new(d: f64, t: f64) -> Result<Self> {
        let (a, b) = square_coeffs(d, t)?;
        Ok(Self { d, t, a, b })
    }

    /// Explicit square coefficients, bypassing [`square_coeffs`].
    pub fn with_square_coeffs(d: f64, t: f64, a: f64, b: f64) -> Result<Self> {
        denominator(d, t)?;
        Ok(Self { d, t, a, b })
    }

    pub fn g2_8th_root() -> Self {
        Self::new(3.0, -0.5).expect("nondegenerate")
    }

    pub fn haagerup() -> Self {
        let s = 13f64.sqrt();
        Self::new((3.0 + s) / 2.0, (2.0 - s) / 3.0).expect("nondegenerate")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Preset {
    #[serde(rename = "g2-8th")]
    G2Eighth,
    #[serde(rename = "haagerup")]
    Haagerup,
    #[serde(rename = "fibonacci")]
    Fibonacci,
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "g2-8th" | "g2" => Ok(Self::G2Eighth),
            "haagerup" => Ok(Self::Haagerup),
            "fibonacci" => Ok(Self::Fibonacci),
            _ => Err(Error::Usage(format!("unknown preset {s:?}"))),
        }
    }
}

impl Preset {
    pub fn params(self) -> Result<CubicParams> {
        match self {
            Self::G2Eighth => Ok(CubicParams::g2_8th_root()),
            Self::Haagerup => Ok(CubicParams::haagerup()),
            Self::Fibonacci => Err(Error::Usage("dim C\u{2084} = 2; use TL\u{2082} module".into())),
        }
    }
}

/// Parameters as given on the command line or in a file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamsSpec {
    Preset { preset: Preset },
    Values { d: f64, t: f64 },
}

impl ParamsSpec {
    pub fn resolve(&self) -> Result<CubicParams> {
        match self {
            Self::Preset { preset } => preset.params(),
            Self::Values { d, t } => CubicParams::new(*d, *t),
        }
    }
}

/// `d` and `t` of `(G2)_q` for complex `q`.
pub fn g2_params(q: C64) -> (C64, C64) {
    let p = |n: i32| q.powi(n);
    let d = p(10) + p(8) + p(2) + 1.0 + p(-2) + p(-8) + p(-10);
    let t = -(p(2) - 1.0 + p(-2)) / (p(4) + p(-4));
    (d, t)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubicResidual {
    pub eq: [f64; 6],
    pub nondegen: [f64; 2],
}

impl CubicResidual {
    pub fn max_eq(&self) -> f64 {
        self.eq.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn min_nondegen(&self) -> f64 {
        self.nondegen.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min)
    }
}

pub fn cubic_residual(e: &CubicElement, p: &CubicParams) -> CubicResidual {
    let CubicElement { alpha, beta, gamma, delta } = *e;
    let n = |z: C64| z.norm_sqr();
    let f = pairing_form;
    let eq = [
        p.d * n(beta) + f(alpha + gamma, beta) + p.a * n(gamma),
        p.d * n(alpha) + f(beta + delta, alpha) + p.a * n(delta),
        f(alpha, gamma) + p.b * n(gamma),
        f(beta, delta) + p.b * n(delta),
        n(delta) + f(alpha + gamma * p.t, delta) + p.b * n(gamma),
        n(gamma) + f(beta + delta * p.t, gamma) + p.b * n(delta),
    ];
    let nondegen = [n(alpha) + p.a * n(gamma), n(beta) + p.a * n(delta)];
    CubicResidual { eq, nondegen }
}

fn i() -> C64 {
    C64::new(0.0, 1.0)
}

/// `(1, 0, 0, -2)` for `which = 0`, its rotation `(0, 1, -2, 0)` for `which = 1`.
pub fn g2_simple(which: usize) -> Result<CubicElement> {
    match which {
        0 => Ok(CubicElement::real(1.0, 0.0, 0.0, -2.0)),
        1 => Ok(CubicElement::real(0.0, 1.0, -2.0, 0.0)),
        _ => Err(Error::Domain(format!("simple solution index {which} not in 0..2"))),
    }
}

/// `(1, ir, -2ir, -2)`, any real `r`.
pub fn g2_r_family(r: f64) -> CubicElement {
    CubicElement::new(1.0.into(), i() * r, i() * (-2.0 * r), (-2.0).into())
}

/// Family on `r in (-4, 0)` with `f = sqrt(-r / (4 + r))`.
pub fn g2_interval_family(r: f64, sign: Sign) -> Result<CubicElement> {
    if !(r > -4.0 && r < 0.0) {
        return Err(Error::Domain(format!("r = {r} outside (-4, 0)")));
    }
    let s = sign.value();
    let f = (-r / (4.0 + r)).sqrt();
    let beta = C64::new(r, s * (r - 1.0) * f);
    let gamma = i() * (s * 10.0 * f);
    let delta = i() * (-s * 2.0) * beta / f;
    Ok(CubicElement::new(1.0.into(), beta, gamma, delta))
}

/// The two Haagerup solutions as printed (not normalized to `alpha = 1`).
pub fn haagerup_printed(sign: Sign) -> CubicElement {
    let s = sign.value();
    let r3 = 3f64.sqrt();
    let d = CubicParams::haagerup().d;
    CubicElement::new(
        (4.0 / r3).into(),
        C64::new(d / r3, -s * (5.0 - d).sqrt()),
        C64::new(-2.0 * r3 * (d + 1.0), s * 2.0 * (5.0 * d + 2.0).sqrt()),
        C64::new(-3.0 * r3 * d, s * (5.0 - d).sqrt()),
    )
}

/// Printed Haagerup solutions evaluated under both square-coefficient readings.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscrepancyReport {
    pub d: f64,
    pub t: f64,
    pub denominator: f64,
    pub square_coeffs: (f64, f64),
    pub square_coeffs_as_printed: (f64, f64),
    pub printed: Vec<PrintedCheck>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrintedCheck {
    pub sign: Sign,
    pub element: CubicElement,
    pub residual: CubicResidual,
    pub residual_as_printed: CubicResidual,
}

pub fn haagerup_discrepancy() -> DiscrepancyReport {
    let p = CubicParams::haagerup();
    let (ap, bp) = square_coeffs_as_printed(p.d, p.t).expect("nondegenerate");
    let literal = CubicParams::with_square_coeffs(p.d, p.t, ap, bp).expect("nondegenerate");
    let printed = [Sign::Plus, Sign::Minus]
        .into_iter()
        .map(|sign| {
            let e = haagerup_printed(sign);
            PrintedCheck {
                sign,
                element: e,
                residual: cubic_residual(&e, &p),
                residual_as_printed: cubic_residual(&e, &literal),
            }
        })
        .collect();
    DiscrepancyReport {
        d: p.d,
        t: p.t,
        denominator: p.d * p.t + p.d + p.t,
        square_coeffs: (p.a, p.b),
        square_coeffs_as_printed: (ap, bp),
        printed,
    }
}

/// Normalization used by the search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// `alpha = 1`; `beta`, `gamma`, `delta` free.
    AlphaOne,
    /// `alpha = delta = 0`, `beta = 1`; `gamma` free.
    AlphaZero,
}

impl FromStr for Branch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "alpha_one" | "alpha1" => Ok(Self::AlphaOne),
            "alpha_zero" | "alpha0" => Ok(Self::AlphaZero),
            _ => Err(Error::Usage(format!("unknown branch {s:?}"))),
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::AlphaOne => "alpha_one",
            Self::AlphaZero => "alpha_zero",
        })
    }
}

impl Branch {
    pub fn n_params(self) -> usize {
        match self {
            Self::AlphaOne => 6,
            Self::AlphaZero => 2,
        }
    }

    pub fn element(self, theta: &[f64]) -> CubicElement {
        let c = |j: usize| C64::new(theta[2 * j], theta[2 * j + 1]);
        match self {
            Self::AlphaOne => CubicElement::new(1.0.into(), c(0), c(1), c(2)),
            Self::AlphaZero => CubicElement::new(0.0.into(), 1.0.into(), c(0), 0.0.into()),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CubicSearchOutcome {
    pub solutions: Vec<Solution<CubicElement>>,
    pub min_residual: f64,
    pub best_candidate: CubicElement,
}

pub fn run_cubic_search(
    params: &CubicParams,
    branch: Branch,
    cfg: &SolveConfig,
) -> Result<CubicSearchOutcome> {
    let f = |theta: &[f64]| cubic_residual(&branch.element(theta), params).eq.to_vec();
    let outcomes = solver::run_restarts(&f, branch.n_params(), cfg)?;
    let best = outcomes
        .iter()
        .min_by(|a, b| a.residual_norm.total_cmp(&b.residual_norm))
        .expect("at least one restart");
    let mut cands = Vec::new();
    for (restart, o) in outcomes.iter().enumerate() {
        if o.residual_norm > cfg.tol_residual {
            continue;
        }
        let e = branch.element(&o.theta);
        let res = cubic_residual(&e, params);
        if res.min_nondegen() < cfg.tol_nondegen {
            continue;
        }
        let key: Vec<f64> = e.coeffs().iter().flat_map(|c| [c.re, c.im]).collect();
        let sol = Solution {
            element: e,
            residual_norm: o.residual_norm,
            lambdas: res.nondegen.iter().map(|&v| C64::from(v)).collect(),
            restart,
            iterations: o.iterations,
        };
        cands.push((sol, key));
    }
    Ok(CubicSearchOutcome {
        solutions: dedup_sorted(cands, DEDUP_TOL),
        min_residual: best.residual_norm,
        best_candidate: branch.element(&best.theta),
    })
}

pub fn cubic_search(
    params: &CubicParams,
    branch: Branch,
    cfg: &SolveConfig,
) -> Result<Vec<Solution<CubicElement>>> {
    Ok(run_cubic_search(params, branch, cfg)?.solutions)
}
