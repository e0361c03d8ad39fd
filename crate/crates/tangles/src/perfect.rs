//! The perfect-tangle condition and the known closed-form solutions.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pairing::Pairing;
use crate::tl::{TLContext, TLElement, C64};

pub const TOL_ZERO: f64 = 1e-10;
pub const TOL_NONDEGEN: f64 = 1e-6;

/// Which factor is rotated anticlockwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Order {
    /// `rot^n(T) . rot^-n(S)`
    Fwd,
    /// `rot^-n(T) . rot^n(S)`
    Rev,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub n: usize,
    pub order: Order,
    pub lambda: C64,
    pub off_identity_norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerfectnessReport {
    pub k: usize,
    pub verdict: bool,
    pub conditions: Vec<Condition>,
    pub tol_zero: f64,
    pub tol_nondegen: f64,
}

impl PerfectnessReport {
    pub fn max_off_identity(&self) -> f64 {
        self.conditions.iter().map(|c| c.off_identity_norm).fold(0.0, f64::max)
    }

    pub fn min_lambda(&self) -> f64 {
        self.conditions.iter().map(|c| c.lambda.norm()).fold(f64::INFINITY, f64::min)
    }
}

pub fn rotated_mult(
    t: &TLElement,
    s: &TLElement,
    n: i64,
    order: Order,
    ctx: &TLContext,
) -> Result<TLElement> {
    let n = match order {
        Order::Fwd => n,
        Order::Rev => -n,
    };
    t.rotate(n).mult(&s.rotate(-n), ctx)
}

/// Checks `rot^n(T) . rot^-n(T*)` and `rot^-n(T*) . rot^n(T)` for `0 <= n <= k`.
pub fn perfect_report(
    t: &TLElement,
    ctx: &TLContext,
    tol_zero: f64,
    tol_nondegen: f64,
) -> Result<PerfectnessReport> {
    if t.is_zero() {
        return Err(Error::ZeroElement);
    }
    let k = t.box_size();
    let adj = t.adjoint();
    let mut conditions = Vec::with_capacity(2 * (k + 1));
    for n in 0..=k {
        for order in [Order::Fwd, Order::Rev] {
            let prod = match order {
                Order::Fwd => rotated_mult(t, &adj, n as i64, order, ctx)?,
                Order::Rev => rotated_mult(&adj, t, n as i64, order, ctx)?,
            };
            conditions.push(Condition {
                n,
                order,
                lambda: prod.identity_coeff(),
                off_identity_norm: prod.off_identity_norm(),
            });
        }
    }
    let verdict = conditions
        .iter()
        .all(|c| c.off_identity_norm <= tol_zero && c.lambda.norm() >= tol_nondegen);
    Ok(PerfectnessReport { k, verdict, conditions, tol_zero, tol_nondegen })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

impl FromStr for Sign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+" | "plus" => Ok(Sign::Plus),
            "-" | "minus" => Ok(Sign::Minus),
            _ => Err(Error::Usage(format!("sign must be + or -, got {s:?}"))),
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// Cup-cap 2-box.
pub fn e2() -> Pairing {
    Pairing::generator(2, 1).expect("k = 2 has U_1")
}

/// 3-box whose top-left strand runs to the bottom-right, with a cap on the
/// right top pair and a cup on the left bottom pair.
pub fn tl3_mixed() -> Pairing {
    Pairing::new(6, &[(0, 3), (1, 2), (4, 5)]).expect("valid")
}

/// Mirror image of [`tl3_mixed`].
pub fn tl3_mixed_bar() -> Pairing {
    Pairing::new(6, &[(0, 1), (2, 5), (3, 4)]).expect("valid")
}

/// `1 + alpha E + conj(alpha) F + beta U_2 + gamma U_1`.
pub fn tl3_element(alpha: C64, beta: C64, gamma: C64) -> TLElement {
    let terms = [
        (Pairing::identity(3), C64::new(1.0, 0.0)),
        (tl3_mixed(), alpha),
        (tl3_mixed_bar(), alpha.conj()),
        (Pairing::generator(3, 2).expect("valid"), beta),
        (Pairing::generator(3, 1).expect("valid"), gamma),
    ];
    TLElement::from_terms(3, terms).expect("all 3-boxes")
}

fn require_q(q: f64, ok: bool, domain: &str) -> Result<TLContext> {
    if !ok {
        return Err(Error::Domain(format!("q = {q} outside {domain}")));
    }
    TLContext::new(q)
}

/// `beta = exp(+-i arccos(-q/2))` for `0 < q <= 2`.
pub fn tl2_beta(q: f64, sign: Sign) -> Result<C64> {
    require_q(q, q > 0.0 && q <= 2.0, "(0, 2]")?;
    Ok(C64::from_polar(1.0, sign.value() * (-q / 2.0).acos()))
}

/// `1 + beta E_2`.
pub fn tl2_perfect(q: f64, sign: Sign) -> Result<TLElement> {
    let beta = tl2_beta(q, sign)?;
    TLElement::from_terms(2, [(Pairing::identity(2), C64::new(1.0, 0.0)), (e2(), beta)])
}

pub fn tl3_selfadjoint_q2() -> TLElement {
    tl3_element(C64::new(1.0, 0.0), C64::new(-1.0, 0.0), C64::new(-1.0, 0.0))
}

/// `(+-sqrt(4 - q^2) - 2) / q`.
pub fn f_sa(q: f64, branch: Sign) -> f64 {
    (branch.value() * (4.0 - q * q).sqrt() - 2.0) / q
}

/// Self-adjoint family with `beta = f`, `gamma = 1/f`.
pub fn tl3_selfadjoint(q: f64, branch: Sign) -> Result<TLElement> {
    let ok = q > 0.0 && (q < 2.0 || (q == 2.0 && branch == Sign::Minus));
    require_q(q, ok, "(0, 2), or q = 2 on the minus branch")?;
    let f = f_sa(q, branch);
    Ok(tl3_element(C64::new(1.0, 0.0), C64::new(f, 0.0), C64::new(1.0 / f, 0.0)))
}

/// Extra solution at `q = sqrt(3)`: `beta = gamma = -q`.
pub fn tl3_selfadjoint_sqrt3() -> TLElement {
    let q = 3f64.sqrt();
    tl3_element(C64::new(1.0, 0.0), C64::new(-q, 0.0), C64::new(-q, 0.0))
}

/// Rotation-invariant coefficient of the two generators, `sqrt(3) <= q < 2`.
pub fn tl3_rotinv_beta(q: f64, sign: Sign) -> Result<C64> {
    let root3 = 3f64.sqrt();
    require_q(q, (root3..2.0).contains(&q), "[sqrt(3), 2)")?;
    let q2 = q * q;
    let den = q2 - 2.0;
    let disc = (-(q2 * q2 - 7.0 * q2 + 12.0) / (den * den)).max(0.0);
    Ok(C64::new(-q / den, sign.value() * disc.sqrt()))
}

pub fn tl3_rotinv(q: f64, sign: Sign) -> Result<TLElement> {
    let beta = tl3_rotinv_beta(q, sign)?;
    Ok(tl3_element(C64::new(1.0, 0.0), beta, beta))
}

/// `R_1 R_2 R_1 = R_2 R_1 R_2` with `R_1 = T (x) 1`, `R_2 = 1 (x) T`.
pub fn yang_baxter_check(t: &TLElement, ctx: &TLContext, tol: f64) -> Result<bool> {
    Ok(yang_baxter_defect(t, ctx)? <= tol)
}

pub fn yang_baxter_defect(t: &TLElement, ctx: &TLContext) -> Result<f64> {
    if t.box_size() != 2 {
        return Err(Error::SizeMismatch(2, t.box_size()));
    }
    let strand = TLElement::one(1);
    let r1 = t.tensor(&strand);
    let r2 = strand.tensor(t);
    let lhs = r1.mult(&r2, ctx)?.mult(&r1, ctx)?;
    let rhs = r2.mult(&r1, ctx)?.mult(&r2, ctx)?;
    lhs.distance(&rhs)
}
