//! Multi-start damped least squares for perfect tangles.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tl::{TLBasis, TLContext, TLElement, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnsatzKind {
    Full,
    SelfAdjoint,
    RotationInvariant,
}

impl FromStr for AnsatzKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "full" => Ok(Self::Full),
            "self_adjoint" => Ok(Self::SelfAdjoint),
            "rotation_invariant" => Ok(Self::RotationInvariant),
            _ => Err(Error::Usage(format!("unknown ansatz {s:?}"))),
        }
    }
}

impl fmt::Display for AnsatzKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Full => "full",
            Self::SelfAdjoint => "self_adjoint",
            Self::RotationInvariant => "rotation_invariant",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlotKind {
    /// Coefficient fixed to 1.
    Pinned,
    /// One real parameter.
    Real,
    /// Real and imaginary parameters.
    Complex,
}

/// Diagrams sharing one coefficient; `true` marks members that carry its conjugate.
#[derive(Clone, Debug, PartialEq)]
pub struct Slot {
    pub members: Vec<(usize, bool)>,
    pub kind: SlotKind,
}

#[derive(Clone, Debug)]
pub struct Ansatz {
    kind: AnsatzKind,
    basis: TLBasis,
    slots: Vec<Slot>,
    n_params: usize,
}

impl Ansatz {
    pub fn new(k: usize, kind: AnsatzKind) -> Result<Self> {
        let basis = TLBasis::new(k)?;
        let id = basis.identity_index();
        let n = basis.len();
        let mut assigned = vec![false; n];
        let mut slots = Vec::new();
        for d in 0..n {
            if assigned[d] {
                continue;
            }
            let members: Vec<(usize, bool)> = match kind {
                AnsatzKind::Full => vec![(d, false)],
                AnsatzKind::SelfAdjoint => {
                    let r = basis.reflect_index(d);
                    if r == d {
                        vec![(d, false)]
                    } else {
                        vec![(d, false), (r, true)]
                    }
                }
                AnsatzKind::RotationInvariant => {
                    let mut orbit = vec![(d, false)];
                    let mut cur = basis.rotate_index(d);
                    while cur != d {
                        orbit.push((cur, false));
                        cur = basis.rotate_index(cur);
                    }
                    orbit.sort();
                    orbit
                }
            };
            for &(m, _) in &members {
                assigned[m] = true;
            }
            let slot_kind = if members.iter().any(|&(m, _)| m == id) {
                SlotKind::Pinned
            } else if kind == AnsatzKind::SelfAdjoint && members.len() == 1 {
                SlotKind::Real
            } else {
                SlotKind::Complex
            };
            slots.push(Slot { members, kind: slot_kind });
        }
        let n_params = slots
            .iter()
            .map(|s| match s.kind {
                SlotKind::Pinned => 0,
                SlotKind::Real => 1,
                SlotKind::Complex => 2,
            })
            .sum();
        Ok(Self { kind, basis, slots, n_params })
    }

    pub fn kind(&self) -> AnsatzKind {
        self.kind
    }

    pub fn box_size(&self) -> usize {
        self.basis.box_size()
    }

    pub fn basis(&self) -> &TLBasis {
        &self.basis
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    /// Number of residual entries: real and imaginary parts of every
    /// off-identity coefficient of the `2(k+1)` products.
    pub fn residual_len(&self) -> usize {
        2 * (self.box_size() + 1) * (self.basis.len() - 1) * 2
    }

    pub fn dense(&self, theta: &[f64]) -> Result<Vec<C64>> {
        if theta.len() != self.n_params {
            return Err(Error::LayoutMismatch { expected: self.n_params, got: theta.len() });
        }
        let mut v = vec![C64::default(); self.basis.len()];
        let mut it = theta.iter();
        for slot in &self.slots {
            let c = match slot.kind {
                SlotKind::Pinned => C64::new(1.0, 0.0),
                SlotKind::Real => C64::new(*it.next().expect("length checked"), 0.0),
                SlotKind::Complex => {
                    let re = *it.next().expect("length checked");
                    let im = *it.next().expect("length checked");
                    C64::new(re, im)
                }
            };
            for &(m, conj) in &slot.members {
                v[m] = if conj { c.conj() } else { c };
            }
        }
        Ok(v)
    }

    pub fn materialize(&self, theta: &[f64]) -> Result<TLElement> {
        Ok(self.basis.from_dense(&self.dense(theta)?))
    }

    /// Inverse of [`Ansatz::materialize`] on elements that fit the ansatz.
    pub fn encode(&self, x: &TLElement) -> Result<Vec<f64>> {
        let v = self.basis.to_dense(x)?;
        let mut theta = Vec::with_capacity(self.n_params);
        for slot in &self.slots {
            let c = v[slot.members[0].0];
            match slot.kind {
                SlotKind::Pinned => {}
                SlotKind::Real => theta.push(c.re),
                SlotKind::Complex => {
                    theta.push(c.re);
                    theta.push(c.im);
                }
            }
        }
        Ok(theta)
    }

    /// The `2(k+1)` products `X X*` and `X* X` with `X = rot^n(T)`.
    fn products(&self, v: &[C64], ctx: &TLContext) -> Vec<Vec<C64>> {
        let q_pow = self.basis.loop_powers(ctx);
        let mut out = Vec::with_capacity(2 * (self.box_size() + 1));
        for n in 0..=self.box_size() {
            let x = self.basis.rotate_dense(v, n as i64);
            let xa = self.basis.adjoint_dense(&x);
            out.push(self.basis.mult_dense(&x, &xa, &q_pow));
            out.push(self.basis.mult_dense(&xa, &x, &q_pow));
        }
        out
    }

    pub fn residual(&self, theta: &[f64], ctx: &TLContext) -> Result<Vec<f64>> {
        let v = self.dense(theta)?;
        let id = self.basis.identity_index();
        let mut r = Vec::with_capacity(self.residual_len());
        for prod in self.products(&v, ctx) {
            for (i, c) in prod.iter().enumerate() {
                if i != id {
                    r.push(c.re);
                    r.push(c.im);
                }
            }
        }
        Ok(r)
    }

    /// Identity coefficients of the `2(k+1)` products.
    pub fn lambdas(&self, theta: &[f64], ctx: &TLContext) -> Result<Vec<C64>> {
        let v = self.dense(theta)?;
        let id = self.basis.identity_index();
        Ok(self.products(&v, ctx).iter().map(|p| p[id]).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveConfig {
    pub restarts: usize,
    pub seed: u64,
    pub max_iters: usize,
    pub lm_lambda0: f64,
    pub fd_step: f64,
    pub tol_converge: f64,
    pub tol_residual: f64,
    pub tol_nondegen: f64,
    pub init_radius: f64,
    /// Results do not depend on it, so it is left out of output files.
    #[serde(skip_serializing)]
    pub threads: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            restarts: 50,
            seed: 0,
            max_iters: 400,
            lm_lambda0: 1e-3,
            fd_step: 1e-7,
            tol_converge: 1e-15,
            tol_residual: 1e-9,
            tol_nondegen: 1e-6,
            init_radius: 2.0,
            threads: 1,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            self.lm_lambda0,
            self.fd_step,
            self.tol_converge,
            self.tol_residual,
            self.tol_nondegen,
            self.init_radius,
        ];
        if self.restarts == 0 || self.max_iters == 0 || self.threads == 0 {
            return Err(Error::Usage("restarts, max_iters and threads must be positive".into()));
        }
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Usage("solver tolerances and steps must be positive".into()));
        }
        Ok(())
    }

    fn rng(&self, restart: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(restart as u64);
        rng
    }

    /// Uniform draw from the ball of radius `init_radius`.
    pub fn initial_point(&self, restart: usize, dim: usize) -> Vec<f64> {
        let mut rng = self.rng(restart);
        if dim == 0 {
            return Vec::new();
        }
        let dir: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
        let u: f64 = rng.gen();
        let r = self.init_radius * u.powf(1.0 / dim as f64);
        dir.iter().map(|x| x / norm * r).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub restart: usize,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Solution<E> {
    #[serde(flatten)]
    pub element: E,
    pub residual_norm: f64,
    pub lambdas: Vec<C64>,
    pub restart: usize,
    pub iterations: usize,
}

impl<E> Solution<E> {
    pub fn provenance(&self) -> Provenance {
        Provenance { restart: self.restart, iterations: self.iterations }
    }
}

pub fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn jacobian_forward<F>(f: &F, theta: &[f64], r0: &[f64], h: f64) -> DMatrix<f64>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let mut j = DMatrix::zeros(r0.len(), theta.len());
    let mut x = theta.to_vec();
    for c in 0..theta.len() {
        let step = h * (1.0 + theta[c].abs());
        x[c] = theta[c] + step;
        let r = f(&x);
        x[c] = theta[c];
        for (i, (a, b)) in r.iter().zip(r0).enumerate() {
            j[(i, c)] = (a - b) / step;
        }
    }
    j
}

pub fn jacobian_central<F>(f: &F, theta: &[f64], h: f64) -> DMatrix<f64>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let m = f(theta).len();
    let mut j = DMatrix::zeros(m, theta.len());
    let mut x = theta.to_vec();
    for c in 0..theta.len() {
        let step = h * (1.0 + theta[c].abs());
        x[c] = theta[c] + step;
        let rp = f(&x);
        x[c] = theta[c] - step;
        let rm = f(&x);
        x[c] = theta[c];
        for i in 0..m {
            j[(i, c)] = (rp[i] - rm[i]) / (2.0 * step);
        }
    }
    j
}

#[derive(Clone, Debug)]
pub struct LmOutcome {
    pub theta: Vec<f64>,
    pub residual_norm: f64,
    pub iterations: usize,
}

/// Levenberg-Marquardt from `theta`, then undamped pseudo-inverse polishing.
pub fn levenberg_marquardt<F>(f: &F, theta: Vec<f64>, cfg: &SolveConfig) -> LmOutcome
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let mut theta = theta;
    let mut r = f(&theta);
    let mut cost = l2(&r);
    let mut lambda = cfg.lm_lambda0;
    let mut iterations = 0;
    let target = cfg.tol_residual * 1e-3;
    while iterations < cfg.max_iters && cost > target && !theta.is_empty() {
        iterations += 1;
        let j = jacobian_forward(f, &theta, &r, cfg.fd_step);
        let jt = j.transpose();
        let a = &jt * &j;
        let g = &jt * DVector::from_column_slice(&r);
        let mut accepted = false;
        let mut step_norm = 0.0;
        while lambda < 1e16 {
            let mut damped = a.clone();
            for i in 0..damped.nrows() {
                damped[(i, i)] += lambda * (a[(i, i)] + 1e-12);
            }
            let Some(delta) = damped.lu().solve(&(-&g)) else {
                lambda *= 4.0;
                continue;
            };
            let trial: Vec<f64> = theta.iter().zip(delta.iter()).map(|(t, d)| t + d).collect();
            let rt = f(&trial);
            let ct = l2(&rt);
            if ct.is_finite() && ct < cost {
                step_norm = delta.norm();
                theta = trial;
                r = rt;
                cost = ct;
                lambda = (lambda / 3.0).max(1e-15);
                accepted = true;
                break;
            }
            lambda *= 4.0;
        }
        let scale = l2(&theta) + cfg.tol_converge;
        if !accepted || step_norm <= cfg.tol_converge * scale {
            break;
        }
    }
    for _ in 0..20 {
        if theta.is_empty() || cost == 0.0 {
            break;
        }
        iterations += 1;
        let j = jacobian_forward(f, &theta, &r, cfg.fd_step);
        let rhs = -DVector::from_column_slice(&r);
        let Ok(delta) = j.svd(true, true).solve(&rhs, 1e-13) else {
            break;
        };
        let trial: Vec<f64> = theta.iter().zip(delta.iter()).map(|(t, d)| t + d).collect();
        let rt = f(&trial);
        let ct = l2(&rt);
        // Also stops on NaN.
        if ct.partial_cmp(&cost) != Some(std::cmp::Ordering::Less) {
            break;
        }
        theta = trial;
        r = rt;
        cost = ct;
    }
    LmOutcome { theta, residual_norm: cost, iterations }
}

/// Runs every restart; results are indexed by restart, independent of scheduling.
pub fn run_restarts<F>(f: &F, dim: usize, cfg: &SolveConfig) -> Result<Vec<LmOutcome>>
where
    F: Fn(&[f64]) -> Vec<f64> + Sync,
{
    cfg.validate()?;
    let one = |i: usize| levenberg_marquardt(f, cfg.initial_point(i, dim), cfg);
    if cfg.threads <= 1 {
        return Ok((0..cfg.restarts).map(one).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::Usage(e.to_string()))?;
    Ok(pool.install(|| (0..cfg.restarts).into_par_iter().map(one).collect()))
}

/// Sort by residual then coefficients, and drop near-duplicates.
pub fn dedup_sorted<E>(
    mut cands: Vec<(Solution<E>, Vec<f64>)>,
    tol: f64,
) -> Vec<Solution<E>> {
    cands.sort_by(|a, b| {
        a.0.residual_norm
            .total_cmp(&b.0.residual_norm)
            .then_with(|| lex(&a.1, &b.1))
    });
    let mut kept: Vec<(Solution<E>, Vec<f64>)> = Vec::new();
    for (s, key) in cands {
        let dup = kept.iter().any(|(_, k)| {
            k.iter().zip(&key).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) <= tol
        });
        if !dup {
            kept.push((s, key));
        }
    }
    kept.into_iter().map(|(s, _)| s).collect()
}

fn lex(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

pub const DEDUP_TOL: f64 = 1e-6;

#[derive(Clone, Debug, Serialize)]
pub struct SearchOutcome {
    pub solutions: Vec<Solution<TLElement>>,
    pub min_residual: f64,
    pub best_candidate: TLElement,
    pub best_restart: usize,
}

pub fn run_search(
    k: usize,
    ctx: &TLContext,
    kind: AnsatzKind,
    cfg: &SolveConfig,
) -> Result<SearchOutcome> {
    if k == 0 {
        return Err(Error::Usage("box size must be at least 1".into()));
    }
    let ansatz = Ansatz::new(k, kind)?;
    let f = |theta: &[f64]| ansatz.residual(theta, ctx).expect("layout fixed");
    let outcomes = run_restarts(&f, ansatz.n_params(), cfg)?;
    let (best_restart, best) = outcomes
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.residual_norm.total_cmp(&b.1.residual_norm))
        .expect("at least one restart");
    let min_residual = best.residual_norm;
    let best_candidate = ansatz.materialize(&best.theta)?;
    let mut cands = Vec::new();
    for (restart, o) in outcomes.iter().enumerate() {
        if o.residual_norm > cfg.tol_residual {
            continue;
        }
        let lambdas = ansatz.lambdas(&o.theta, ctx)?;
        if lambdas.iter().any(|l| l.norm() < cfg.tol_nondegen) {
            continue;
        }
        let key: Vec<f64> = ansatz.dense(&o.theta)?.iter().flat_map(|c| [c.re, c.im]).collect();
        let sol = Solution {
            element: ansatz.materialize(&o.theta)?,
            residual_norm: o.residual_norm,
            lambdas,
            restart,
            iterations: o.iterations,
        };
        cands.push((sol, key));
    }
    Ok(SearchOutcome {
        solutions: dedup_sorted(cands, DEDUP_TOL),
        min_residual,
        best_candidate,
        best_restart,
    })
}

pub fn search(
    k: usize,
    ctx: &TLContext,
    kind: AnsatzKind,
    cfg: &SolveConfig,
) -> Result<Vec<Solution<TLElement>>> {
    Ok(run_search(k, ctx, kind, cfg)?.solutions)
}

#[derive(Clone, Debug, Serialize)]
pub struct Probe {
    pub min_residual: f64,
    pub best_candidate: TLElement,
    pub best_restart: usize,
    pub solutions_found: usize,
}

pub fn nonexistence_probe(
    k: usize,
    ctx: &TLContext,
    kind: AnsatzKind,
    cfg: &SolveConfig,
) -> Result<Probe> {
    let out = run_search(k, ctx, kind, cfg)?;
    Ok(Probe {
        min_residual: out.min_residual,
        best_candidate: out.best_candidate,
        best_restart: out.best_restart,
        solutions_found: out.solutions.len(),
    })
}
