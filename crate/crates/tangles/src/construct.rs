//! Inductive tangles T̃ₙ, T̂ₙ, Aₙ, their identities, and the horizontal composition.
//!
//! Every recipe is written once against [`Planar`] and runs either eagerly on
//! TL elements or symbolically on a [`Network`] evaluated in a single pass.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::Network;
use crate::perfect::{perfect_report, PerfectnessReport, TOL_NONDEGEN, TOL_ZERO};
use crate::tl::{TLContext, TLElement, C64};

/// Composition primitives shared by the two evaluation routes.
pub trait Planar {
    type E: Clone;

    fn identity(&self, k: usize) -> Self::E;
    fn size(&self, x: &Self::E) -> usize;
    fn tensor(&self, x: &Self::E, y: &Self::E) -> Self::E;
    /// Same conventions as [`crate::pairing::glue`].
    fn glue(&self, x: &Self::E, x_start: usize, y: &Self::E, y_start: usize, s: usize) -> Result<Self::E>;
    fn rotate(&self, x: &Self::E, s: i64) -> Self::E;

    /// `y` on top of `x`.
    fn mult(&self, x: &Self::E, y: &Self::E) -> Result<Self::E> {
        let (kx, ky) = (self.size(x), self.size(y));
        if kx != ky {
            return Err(Error::SizeMismatch(kx, ky));
        }
        self.glue(y, ky, x, 0, ky)
    }
}

/// Eager contraction in the free TL space.
pub struct TLPlanar<'a>(pub &'a TLContext);

impl Planar for TLPlanar<'_> {
    type E = TLElement;

    fn identity(&self, k: usize) -> TLElement {
        TLElement::one(k)
    }
    fn size(&self, x: &TLElement) -> usize {
        x.box_size()
    }
    fn tensor(&self, x: &TLElement, y: &TLElement) -> TLElement {
        x.tensor(y)
    }
    fn glue(&self, x: &TLElement, xs: usize, y: &TLElement, ys: usize, s: usize) -> Result<TLElement> {
        x.glue(xs, y, ys, s, self.0)
    }
    fn rotate(&self, x: &TLElement, s: i64) -> TLElement {
        x.rotate(s)
    }
}

/// Symbolic wiring; evaluate afterwards with [`Network::evaluate`].
pub struct NetworkPlanar;

impl Planar for NetworkPlanar {
    type E = Network;

    fn identity(&self, k: usize) -> Network {
        Network::identity(k)
    }
    fn size(&self, x: &Network) -> usize {
        x.box_size()
    }
    fn tensor(&self, x: &Network, y: &Network) -> Network {
        x.tensor(y)
    }
    fn glue(&self, x: &Network, xs: usize, y: &Network, ys: usize, s: usize) -> Result<Network> {
        x.glue(xs, y, ys, s)
    }
    fn rotate(&self, x: &Network, s: i64) -> Network {
        x.rotate(s)
    }
}

/// Contraction order used to assemble T̃ₙ out of copies of T.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Fold {
    Left,
    Right,
    Balanced,
}

/// `y` to the right of `x`, sharing one strand: top-right of `x` into bottom-left of `y`.
/// Sizes `n` and `m` give size `n + m - 1`.
pub fn concat<P: Planar>(p: &P, x: &P::E, y: &P::E) -> Result<P::E> {
    let (n, m) = (p.size(x), p.size(y));
    if n == 0 || m == 0 {
        return Err(Error::Domain("concatenation needs nonempty boxes".into()));
    }
    Ok(p.rotate(&p.glue(x, n - 1, y, 2 * m - 1, 1)?, n as i64))
}

fn check_base(t_size: usize, n: usize) -> Result<()> {
    if t_size != 2 {
        return Err(Error::SizeMismatch(2, t_size));
    }
    if n < 2 {
        return Err(Error::Domain(format!("inductive tangles start at n = 2, got {n}")));
    }
    Ok(())
}

pub fn ttilde_with<P: Planar>(p: &P, t: &P::E, n: usize, fold: Fold) -> Result<P::E> {
    check_base(p.size(t), n)?;
    match fold {
        Fold::Left => (3..=n).try_fold(t.clone(), |x, _| concat(p, &x, t)),
        Fold::Right => (3..=n).try_fold(t.clone(), |x, _| concat(p, t, &x)),
        Fold::Balanced => {
            if n == 2 {
                return Ok(t.clone());
            }
            let a = n.div_ceil(2);
            let left = ttilde_with(p, t, a, fold)?;
            let right = ttilde_with(p, t, n + 1 - a, fold)?;
            concat(p, &left, &right)
        }
    }
}

/// T̂ₙ: each new copy of T hangs below and to the right of the previous ones.
pub fn that_with<P: Planar>(p: &P, t: &P::E, n: usize) -> Result<P::E> {
    check_base(p.size(t), n)?;
    (3..=n).try_fold(t.clone(), |x, j| {
        Ok(p.rotate(&p.glue(&x, j - 1, t, 0, 1)?, j as i64 - 2))
    })
}

/// Aₙ: T̃ₙ stacked on `1 ⊗ Aₙ₋₁`.
pub fn a_with<P: Planar>(p: &P, t: &P::E, n: usize) -> Result<P::E> {
    check_base(p.size(t), n)?;
    let mut a = t.clone();
    for j in 3..=n {
        let tt = ttilde_with(p, t, j, Fold::Left)?;
        a = p.mult(&p.tensor(&p.identity(1), &a), &tt)?;
    }
    Ok(a)
}

/// Aₙ with T̂ₙ at the bottom and `1 ⊗ Aₙ₋₁` on top.
pub fn a_commuting_with<P: Planar>(p: &P, t: &P::E, n: usize) -> Result<P::E> {
    check_base(p.size(t), n)?;
    if n == 2 {
        return Ok(t.clone());
    }
    let prev = a_with(p, t, n - 1)?;
    let th = that_with(p, t, n)?;
    p.mult(&th, &p.tensor(&p.identity(1), &prev))
}

/// `x` below `x_adj`, the left `l` top legs of `x` and bottom legs of `x_adj`
/// bent outward, the remaining `n - l` strands joined.
fn half_rotation_side<P: Planar>(p: &P, x: &P::E, x_adj: &P::E, l: usize) -> Result<P::E> {
    let n = p.size(x);
    Ok(p.rotate(&p.glue(x, l, x_adj, n, n - l)?, (n + l) as i64))
}

pub fn build_ttilde(t: &TLElement, n: usize, ctx: &TLContext) -> Result<TLElement> {
    ttilde_with(&TLPlanar(ctx), t, n, Fold::Left)
}

pub fn build_that(t: &TLElement, n: usize, ctx: &TLContext) -> Result<TLElement> {
    that_with(&TLPlanar(ctx), t, n)
}

pub fn build_a(t: &TLElement, n: usize, ctx: &TLContext) -> Result<TLElement> {
    a_with(&TLPlanar(ctx), t, n)
}

pub fn build_a_commuting(t: &TLElement, n: usize, ctx: &TLContext) -> Result<TLElement> {
    a_commuting_with(&TLPlanar(ctx), t, n)
}

/// T̃ₙ wired with box content 0 in every slot.
pub fn ttilde_network(n: usize, fold: Fold) -> Result<Network> {
    ttilde_with(&NetworkPlanar, &Network::boxed(0, 2), n, fold)
}

pub fn a_network(n: usize) -> Result<Network> {
    a_with(&NetworkPlanar, &Network::boxed(0, 2), n)
}

/// Terms of T̃ₙ before collection (one per choice of term in every copy of T)
/// and after.
pub fn ttilde_term_counts(t: &TLElement, n: usize, ctx: &TLContext) -> Result<(usize, usize)> {
    let (x, raw) = ttilde_network(n, Fold::Left)?.evaluate(&[t], ctx)?;
    Ok((raw, x.n_terms()))
}

/// Where each top leg of Aₙ lands on the bottom (0-based, left to right) when
/// every T is replaced by a plain crossing.
pub fn braid_permutation(n: usize) -> Result<Vec<usize>> {
    let (matching, loops) = a_network(n)?.evaluate_raw(&[vec![2, 3, 0, 1]])?;
    debug_assert_eq!(loops, 0);
    Ok((0..n).map(|i| 2 * n - 1 - matching[i]).collect())
}

/// Least-squares `c` with `x ≈ c y`, and the coefficientwise residual.
pub fn proportionality(x: &TLElement, y: &TLElement) -> Result<(C64, f64)> {
    if x.box_size() != y.box_size() {
        return Err(Error::SizeMismatch(x.box_size(), y.box_size()));
    }
    let yy: f64 = y.terms().map(|(_, c)| c.norm_sqr()).sum();
    if yy == 0.0 {
        return Ok((C64::default(), x.max_norm()));
    }
    let xy: C64 = y.terms().map(|(d, c)| c.conj() * x.coeff(d)).sum();
    let c = xy / yy;
    Ok((c, x.sub(&y.scale(c))?.max_norm()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Lemma {
    /// T̃ₙ · T̃ₙ* ∝ 1.
    TtildeUnitary,
    /// T̂ₙ · T̂ₙ* ∝ 1.
    ThatUnitary,
    /// T̃ₙ(T)* = T̂ₙ(T*).
    AdjointRelation,
    /// T̃ₙ ∘ T̃ₘ = T̃ₙ₊ₘ₋₁.
    Concatenation,
    /// Aₙ built from T̃ₙ on top equals the T̂ₙ-at-the-bottom form.
    CommutingForm,
    /// Bending `l` legs of T̃ₙ against T̃ₙ* reduces to the `n = l + 1` picture.
    HalfRotation,
    /// rot^{n-1} T̃ₙ times its adjoint ∝ 1.
    RotatedProduct,
    /// Left, right and balanced folds of T̃ₙ and the one-pass network agree.
    Reassociation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaEntry {
    pub lemma: Lemma,
    pub n: usize,
    /// `l` for the half rotation, `m` for concatenation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aux: Option<usize>,
    pub deviation: f64,
    #[serde(skip_serializing_if = "Option::is_none", with = "opt_c64")]
    pub scalar: Option<C64>,
}

mod opt_c64 {
    use super::C64;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<C64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(c) => s.serialize_some(&[c.re, c.im]),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<C64>, D::Error> {
        Ok(Option::<[f64; 2]>::deserialize(d)?.map(|[re, im]| C64::new(re, im)))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub n_max: usize,
    pub entries: Vec<LemmaEntry>,
}

impl LemmaReport {
    pub fn max_deviation(&self, lemma: Lemma) -> f64 {
        self.entries
            .iter()
            .filter(|e| e.lemma == lemma)
            .map(|e| e.deviation)
            .fold(0.0, f64::max)
    }

    pub fn of(&self, lemma: Lemma) -> impl Iterator<Item = &LemmaEntry> {
        self.entries.iter().filter(move |e| e.lemma == lemma)
    }
}

fn unit_entry(lemma: Lemma, n: usize, x: &TLElement, ctx: &TLContext) -> Result<LemmaEntry> {
    let prod = x.mult(&x.adjoint(), ctx)?;
    Ok(LemmaEntry {
        lemma,
        n,
        aux: None,
        deviation: prod.off_identity_norm(),
        scalar: Some(prod.identity_coeff()),
    })
}

/// Evaluate every supporting identity of the construction as a coefficient comparison for `2 <= n <= n_max`.
pub fn lemma_checks(t: &TLElement, n_max: usize, ctx: &TLContext) -> Result<LemmaReport> {
    check_base(t.box_size(), n_max)?;
    let p = TLPlanar(ctx);
    let t_adj = t.adjoint();
    let tt: Vec<TLElement> = (2..=n_max).map(|n| build_ttilde(t, n, ctx)).collect::<Result<_>>()?;
    let tt_of = |n: usize| &tt[n - 2];
    let mut entries = Vec::new();

    for n in 2..=n_max {
        let x = tt_of(n);
        entries.push(unit_entry(Lemma::TtildeUnitary, n, x, ctx)?);
        entries.push(unit_entry(Lemma::ThatUnitary, n, &build_that(t, n, ctx)?, ctx)?);
        entries.push(LemmaEntry {
            lemma: Lemma::AdjointRelation,
            n,
            aux: None,
            deviation: x.adjoint().distance(&build_that(&t_adj, n, ctx)?)?,
            scalar: None,
        });
        let rot = x.rotate(n as i64 - 1);
        entries.push(unit_entry(Lemma::RotatedProduct, n, &rot, ctx)?);

        let mut dev: f64 = 0.0;
        for fold in [Fold::Right, Fold::Balanced] {
            dev = dev.max(x.distance(&ttilde_with(&p, t, n, fold)?)?);
        }
        let (net, _) = ttilde_network(n, Fold::Balanced)?.evaluate(&[t], ctx)?;
        dev = dev.max(x.distance(&net)?);
        entries.push(LemmaEntry { lemma: Lemma::Reassociation, n, aux: None, deviation: dev, scalar: None });

        if n >= 3 {
            entries.push(LemmaEntry {
                lemma: Lemma::CommutingForm,
                n,
                aux: None,
                deviation: build_a(t, n, ctx)?.distance(&build_a_commuting(t, n, ctx)?)?,
                scalar: None,
            });
        }
        for l in 1..n.saturating_sub(1) {
            let lhs = half_rotation_side(&p, x, &x.adjoint(), l)?;
            let small = tt_of(l + 1);
            let rhs = half_rotation_side(&p, small, &small.adjoint(), l)?.tensor(&TLElement::one(n - l - 1));
            let (c, deviation) = proportionality(&lhs, &rhs)?;
            entries.push(LemmaEntry { lemma: Lemma::HalfRotation, n, aux: Some(l), deviation, scalar: Some(c) });
        }
    }
    for a in 2..=n_max {
        for b in a..=n_max {
            if a + b - 1 > n_max {
                continue;
            }
            let joined = concat(&p, tt_of(a), tt_of(b))?;
            entries.push(LemmaEntry {
                lemma: Lemma::Concatenation,
                n: a,
                aux: Some(b),
                deviation: joined.distance(tt_of(a + b - 1))?,
                scalar: None,
            });
        }
    }
    Ok(LemmaReport { n_max, entries })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct BraidingSpec {
    perm: Vec<usize>,
    blocks: (usize, usize),
}

/// Block-respecting rearrangement of the bottom legs of `T ⊗ S`.
///
/// `permutation[p]` is the original leg (A block `0..n`, B block `n..n+m`)
/// that ends at bottom position `p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "BraidingSpec", into = "BraidingSpec")]
pub struct Braiding {
    blocks: (usize, usize),
    permutation: Vec<usize>,
    crossing_list: Vec<usize>,
}

impl TryFrom<BraidingSpec> for Braiding {
    type Error = Error;

    fn try_from(s: BraidingSpec) -> Result<Self> {
        Braiding::new(s.blocks, s.perm)
    }
}

impl From<Braiding> for BraidingSpec {
    fn from(b: Braiding) -> Self {
        BraidingSpec { perm: b.permutation, blocks: b.blocks }
    }
}

/// Adjacent swaps, in order, turning `0..len` into `target` by insertion sort.
fn insertion_schedule(target: &[usize]) -> Vec<usize> {
    let mut cur: Vec<usize> = (0..target.len()).collect();
    let mut out = Vec::new();
    for (p, &want) in target.iter().enumerate() {
        let mut j = cur.iter().position(|&x| x == want).expect("target is a permutation");
        while j > p {
            cur.swap(j - 1, j);
            out.push(j - 1);
            j -= 1;
        }
    }
    out
}

/// Legs in word order: `true` picks the next A leg, `false` the next B leg.
fn word_to_perm(n: usize, word: &[bool]) -> Vec<usize> {
    let (mut a, mut b) = (0, n);
    word.iter()
        .map(|&is_a| {
            let leg = if is_a { &mut a } else { &mut b };
            *leg += 1;
            *leg - 1
        })
        .collect()
}

impl Braiding {
    pub fn new(blocks: (usize, usize), permutation: Vec<usize>) -> Result<Self> {
        let (n, m) = blocks;
        let len = n + m;
        let bad = |why: &str| Error::InvalidBraiding(why.to_string());
        if permutation.len() != len {
            return Err(bad("permutation length differs from n + m"));
        }
        let mut seen = vec![false; len];
        for &x in &permutation {
            if x >= len || std::mem::replace(&mut seen[x], true) {
                return Err(bad("not a bijection"));
            }
        }
        let a: Vec<usize> = permutation.iter().copied().filter(|&x| x < n).collect();
        let b: Vec<usize> = permutation.iter().copied().filter(|&x| x >= n).collect();
        if a.windows(2).any(|w| w[0] > w[1]) || b.windows(2).any(|w| w[0] > w[1]) {
            return Err(bad("legs of one block cross each other"));
        }
        let crossing_list = insertion_schedule(&permutation);
        Ok(Self { blocks, permutation, crossing_list })
    }

    pub fn identity(n: usize, m: usize) -> Self {
        Self::new((n, m), (0..n + m).collect()).expect("identity is block-respecting")
    }

    /// A and B legs alternate starting with A, leftovers at the end.
    pub fn interleave(n: usize, m: usize) -> Self {
        let mut word = Vec::with_capacity(n + m);
        for i in 0..n.max(m) {
            if i < n {
                word.push(true);
            }
            if i < m {
                word.push(false);
            }
        }
        Self::new((n, m), word_to_perm(n, &word)).expect("interleave is block-respecting")
    }

    pub fn blocks(&self) -> (usize, usize) {
        self.blocks
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    /// Swap positions, from the box outward; entry `p` crosses strands `p` and `p + 1`.
    pub fn crossing_list(&self) -> &[usize] {
        &self.crossing_list
    }

    fn word(&self) -> Vec<bool> {
        self.permutation.iter().map(|&x| x < self.blocks.0).collect()
    }

    /// Crossings on the top legs, from the box outward.
    pub fn top_crossings(&self, rule: TopRule) -> Vec<usize> {
        let mut word = self.word();
        if rule == TopRule::Reversed {
            word.reverse();
        }
        insertion_schedule(&word_to_perm(self.blocks.0, &word))
    }
}

/// How the bottom braiding is mirrored onto the top legs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum TopRule {
    /// Top A/B word is the bottom word read backwards.
    #[default]
    Reversed,
    /// Top A/B word equals the bottom word.
    Same,
}

impl std::str::FromStr for TopRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reversed" => Ok(Self::Reversed),
            "same" => Ok(Self::Same),
            _ => Err(Error::Usage(format!("unknown top rule {s:?}"))),
        }
    }
}

/// `T ⊗ S` with every crossing of the braid replaced by `R`.
pub fn horizontal_with<P: Planar>(
    p: &P,
    t: &P::E,
    s: &P::E,
    r: &P::E,
    bottom: &[usize],
    top: &[usize],
) -> Result<P::E> {
    if p.size(r) != 2 {
        return Err(Error::SizeMismatch(2, p.size(r)));
    }
    let total = p.size(t) + p.size(s);
    let layer = |c: usize| -> Result<P::E> {
        if c + 2 > total {
            return Err(Error::InvalidBraiding(format!("crossing at {c} outside {total} legs")));
        }
        Ok(p.tensor(&p.tensor(&p.identity(c), r), &p.identity(total - c - 2)))
    };
    let mut x = p.tensor(t, s);
    for &c in bottom {
        x = p.mult(&layer(c)?, &x)?;
    }
    for &c in top {
        x = p.mult(&x, &layer(c)?)?;
    }
    Ok(x)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
/// `report` uses the default tolerances; its raw norms allow any other cut.
pub struct HorizontalOutput {
    pub element: TLElement,
    pub rule: TopRule,
    pub bottom_crossings: Vec<usize>,
    pub top_crossings: Vec<usize>,
    pub report: PerfectnessReport,
}

pub fn horizontal(
    t: &TLElement,
    s: &TLElement,
    braiding: &Braiding,
    r: &TLElement,
    rule: TopRule,
    ctx: &TLContext,
) -> Result<HorizontalOutput> {
    if braiding.blocks != (t.box_size(), s.box_size()) {
        return Err(Error::InvalidBraiding(format!(
            "blocks {:?} do not match box sizes ({}, {})",
            braiding.blocks,
            t.box_size(),
            s.box_size()
        )));
    }
    let bottom = braiding.crossing_list.clone();
    let top = braiding.top_crossings(rule);
    let element = horizontal_with(&TLPlanar(ctx), t, s, r, &bottom, &top)?;
    let report = perfect_report(&element, ctx, TOL_ZERO, TOL_NONDEGEN)?;
    Ok(HorizontalOutput { element, rule, bottom_crossings: bottom, top_crossings: top, report })
}
