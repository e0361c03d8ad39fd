//! The free Temperley-Lieb vector space over boxes of a fixed size.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::pairing::{self, Pairing};

pub type C64 = Complex64;

/// Loop value of the algebra.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TLContext {
    q: f64,
}

impl TLContext {
    pub fn new(q: f64) -> Result<Self> {
        if !(q.is_finite() && q > 0.0) {
            return Err(Error::Domain(format!("loop value must be positive, got {q}")));
        }
        Ok(Self { q })
    }

    /// `q = 2 cos(pi / n)`, `n >= 3`.
    pub fn root_of_unity(n: u32) -> Result<Self> {
        if n < 3 {
            return Err(Error::Domain(format!("2cos(pi/n) needs n >= 3, got {n}")));
        }
        Self::new(2.0 * (PI / n as f64).cos())
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn loop_factor(&self, loops: usize) -> f64 {
        self.q.powi(loops as i32)
    }
}

/// A complex combination of pairings of one box size.
#[derive(Clone, Debug, PartialEq)]
pub struct TLElement {
    k: usize,
    terms: BTreeMap<Pairing, C64>,
}

impl TLElement {
    pub fn zero(k: usize) -> Self {
        Self { k, terms: BTreeMap::new() }
    }

    pub fn one(k: usize) -> Self {
        Self::from_diagram(Pairing::identity(k), C64::new(1.0, 0.0))
    }

    pub fn from_diagram(p: Pairing, c: C64) -> Self {
        let mut x = Self::zero(p.box_size());
        x.add_term(p, c);
        x
    }

    pub fn from_terms<I>(k: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Pairing, C64)>,
    {
        let mut x = Self::zero(k);
        for (p, c) in terms {
            if p.box_size() != k {
                return Err(Error::SizeMismatch(k, p.box_size()));
            }
            x.add_term(p, c);
        }
        Ok(x)
    }

    pub fn box_size(&self) -> usize {
        self.k
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Pairing, &C64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, p: &Pairing) -> C64 {
        self.terms.get(p).copied().unwrap_or_default()
    }

    pub fn identity_coeff(&self) -> C64 {
        self.coeff(&Pairing::identity(self.k))
    }

    /// Largest coefficient magnitude away from the identity diagram.
    pub fn off_identity_norm(&self) -> f64 {
        let id = Pairing::identity(self.k);
        self.terms
            .iter()
            .filter(|(p, _)| **p != id)
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max)
    }

    pub fn max_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn add_term(&mut self, p: Pairing, c: C64) {
        debug_assert_eq!(p.box_size(), self.k);
        match self.terms.entry(p) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if *e.get() == C64::default() {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                if c != C64::default() {
                    e.insert(c);
                }
            }
        }
    }

    pub fn add(&self, y: &TLElement) -> Result<TLElement> {
        self.check_size(y)?;
        let mut out = self.clone();
        for (p, c) in &y.terms {
            out.add_term(p.clone(), *c);
        }
        Ok(out)
    }

    pub fn sub(&self, y: &TLElement) -> Result<TLElement> {
        self.add(&y.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: C64) -> TLElement {
        let mut out = Self::zero(self.k);
        for (p, v) in &self.terms {
            out.add_term(p.clone(), v * c);
        }
        out
    }

    /// `y` stacked on top of `self`.
    pub fn mult(&self, y: &TLElement, ctx: &TLContext) -> Result<TLElement> {
        self.check_size(y)?;
        let mut out = Self::zero(self.k);
        for (dx, cx) in &self.terms {
            for (dy, cy) in &y.terms {
                let (d, loops) = pairing::contract(dy, dx, self.k)?;
                out.add_term(d, cx * cy * ctx.loop_factor(loops));
            }
        }
        Ok(out)
    }

    /// Bilinear extension of [`pairing::glue`].
    pub fn glue(&self, a_start: usize, y: &TLElement, b_start: usize, s: usize, ctx: &TLContext) -> Result<TLElement> {
        let (na, nb) = (2 * self.k, 2 * y.k);
        if s > na || s > nb {
            return Err(Error::InvalidGlue { m: s, a: na, b: nb });
        }
        let mut out = Self::zero((na + nb - 2 * s) / 2);
        for (dx, cx) in &self.terms {
            for (dy, cy) in &y.terms {
                let (d, loops) = pairing::glue(dx, a_start, dy, b_start, s)?;
                out.add_term(d, cx * cy * ctx.loop_factor(loops));
            }
        }
        Ok(out)
    }

    pub fn rotate(&self, s: i64) -> TLElement {
        let mut out = Self::zero(self.k);
        for (p, c) in &self.terms {
            out.add_term(p.rotate(s), *c);
        }
        out
    }

    pub fn adjoint(&self) -> TLElement {
        let mut out = Self::zero(self.k);
        for (p, c) in &self.terms {
            out.add_term(p.reflect(), c.conj());
        }
        out
    }

    pub fn tensor(&self, y: &TLElement) -> TLElement {
        let mut out = Self::zero(self.k + y.k);
        for (dx, cx) in &self.terms {
            for (dy, cy) in &y.terms {
                out.add_term(dx.tensor(dy), cx * cy);
            }
        }
        out
    }

    /// Closure around the right side.
    pub fn trace(&self, ctx: &TLContext) -> C64 {
        self.terms
            .iter()
            .map(|(p, c)| c * ctx.loop_factor(p.closure_loops()))
            .sum()
    }

    /// Closure around the left side, one strand at a time.
    pub fn trace_left(&self, ctx: &TLContext) -> C64 {
        let cap = Pairing::identity(1);
        self.terms
            .iter()
            .map(|(p, c)| {
                let mut d = p.clone();
                let mut loops = 0;
                while d.n_points() > 0 {
                    let n = d.n_points();
                    let (next, l) = pairing::glue(&d, n - 1, &cap, 0, 2).expect("cap fits");
                    loops += l;
                    d = next;
                }
                c * ctx.loop_factor(loops)
            })
            .sum()
    }

    /// `tr(y^* x)` realized as `tr(x . y^*)`.
    pub fn inner_product(&self, y: &TLElement, ctx: &TLContext) -> Result<C64> {
        Ok(self.mult(&y.adjoint(), ctx)?.trace(ctx))
    }

    /// Append a straight strand on the right.
    pub fn include(&self) -> TLElement {
        self.tensor(&Self::one(1))
    }

    /// Close the rightmost strand around the right side.
    pub fn cond_expect(&self, ctx: &TLContext) -> Result<TLElement> {
        if self.k == 0 {
            return Err(Error::Domain("conditional expectation of a 0-box".into()));
        }
        let k = self.k - 1;
        let cap = Pairing::identity(1);
        let mut out = Self::zero(k);
        for (p, c) in &self.terms {
            let (d, loops) = pairing::glue(p, k, &cap, 0, 2)?;
            out.add_term(d.rotate(k as i64), c * ctx.loop_factor(loops));
        }
        Ok(out)
    }

    /// Coefficientwise sup-distance.
    pub fn distance(&self, y: &TLElement) -> Result<f64> {
        Ok(self.sub(y)?.max_norm())
    }

    fn check_size(&self, y: &TLElement) -> Result<()> {
        if self.k != y.k {
            return Err(Error::SizeMismatch(self.k, y.k));
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    pairing: Vec<(usize, usize)>,
    coeff: C64,
}

#[derive(Serialize, Deserialize)]
struct ElementRepr {
    box_size: usize,
    terms: Vec<TermRepr>,
}

impl Serialize for TLElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let terms = self
            .terms
            .iter()
            .map(|(p, c)| TermRepr { pairing: p.pairs(), coeff: *c })
            .collect();
        ElementRepr { box_size: self.k, terms }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TLElement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = ElementRepr::deserialize(deserializer)?;
        let mut x = TLElement::zero(repr.box_size);
        for t in repr.terms {
            let p = Pairing::new(2 * repr.box_size, &t.pairing).map_err(D::Error::custom)?;
            if x.terms.contains_key(&p) {
                return Err(D::Error::custom(format!("duplicate diagram {p:?}")));
            }
            x.add_term(p, t.coeff);
        }
        Ok(x)
    }
}

/// Structure constants of a fixed box size, for dense coefficient vectors.
#[derive(Clone, Debug)]
pub struct TLBasis {
    k: usize,
    diagrams: Vec<Pairing>,
    index: HashMap<Pairing, usize>,
    identity: usize,
    product: Vec<(usize, usize)>,
    rotate: Vec<usize>,
    reflect: Vec<usize>,
}

impl TLBasis {
    pub fn new(k: usize) -> Result<Self> {
        let diagrams = pairing::enumerate_basis(k)?;
        let index: HashMap<Pairing, usize> =
            diagrams.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let identity = index[&Pairing::identity(k)];
        let n = diagrams.len();
        let mut product = Vec::with_capacity(n * n);
        for a in &diagrams {
            for b in &diagrams {
                let (d, loops) = pairing::contract(b, a, k)?;
                product.push((index[&d], loops));
            }
        }
        let rotate = diagrams.iter().map(|p| index[&p.rotate(1)]).collect();
        let reflect = diagrams.iter().map(|p| index[&p.reflect()]).collect();
        Ok(Self { k, diagrams, index, identity, product, rotate, reflect })
    }

    pub fn box_size(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.diagrams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diagrams.is_empty()
    }

    pub fn diagrams(&self) -> &[Pairing] {
        &self.diagrams
    }

    pub fn index_of(&self, p: &Pairing) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn identity_index(&self) -> usize {
        self.identity
    }

    /// Index of `rotate(D_i, 1)`.
    pub fn rotate_index(&self, i: usize) -> usize {
        self.rotate[i]
    }

    pub fn reflect_index(&self, i: usize) -> usize {
        self.reflect[i]
    }

    pub fn to_dense(&self, x: &TLElement) -> Result<Vec<C64>> {
        if x.k != self.k {
            return Err(Error::SizeMismatch(self.k, x.k));
        }
        let mut v = vec![C64::default(); self.len()];
        for (p, c) in &x.terms {
            v[self.index[p]] = *c;
        }
        Ok(v)
    }

    pub fn from_dense(&self, v: &[C64]) -> TLElement {
        let mut x = TLElement::zero(self.k);
        for (p, c) in self.diagrams.iter().zip(v) {
            if *c != C64::default() {
                x.add_term(p.clone(), *c);
            }
        }
        x
    }

    /// Dense `x . y` (`y` on top); `q_pow[l]` must hold `q^l` for every loop count.
    pub fn mult_dense(&self, x: &[C64], y: &[C64], q_pow: &[f64]) -> Vec<C64> {
        let n = self.len();
        let mut out = vec![C64::default(); n];
        for (a, xa) in x.iter().enumerate() {
            if *xa == C64::default() {
                continue;
            }
            for (b, yb) in y.iter().enumerate() {
                let (d, loops) = self.product[a * n + b];
                out[d] += xa * yb * q_pow[loops];
            }
        }
        out
    }

    pub fn rotate_dense(&self, x: &[C64], s: i64) -> Vec<C64> {
        let s = s.rem_euclid(2 * self.k.max(1) as i64);
        let mut cur = x.to_vec();
        for _ in 0..s {
            let mut next = vec![C64::default(); cur.len()];
            for (i, c) in cur.iter().enumerate() {
                next[self.rotate[i]] = *c;
            }
            cur = next;
        }
        cur
    }

    pub fn adjoint_dense(&self, x: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::default(); x.len()];
        for (i, c) in x.iter().enumerate() {
            out[self.reflect[i]] = c.conj();
        }
        out
    }

    /// `q^l` for all loop counts a product in this basis can produce.
    pub fn loop_powers(&self, ctx: &TLContext) -> Vec<f64> {
        (0..=self.k).map(|l| ctx.loop_factor(l)).collect()
    }
}
