//! Noncrossing perfect matchings of the 2k boundary points of a box.
//!
//! Points are numbered clockwise from the marked point at the top-left corner:
//! `0..k` run left to right along the top, `k..2k` run right to left along the
//! bottom.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest box size accepted by [`enumerate_basis`].
pub const MAX_BASIS_K: usize = 12;

const FREE: usize = usize::MAX;

/// A noncrossing perfect matching, stored as a partner table.
///
/// The derived ordering is lexicographic on the partner table, which coincides
/// with the lexicographic order of the canonical pair list.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pairing {
    partner: Vec<usize>,
}

impl Pairing {
    pub fn new(n_points: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        if !n_points.is_multiple_of(2) {
            return Err(Error::InvalidPairing(format!("odd point count {n_points}")));
        }
        let mut partner = vec![FREE; n_points];
        for &(a, b) in pairs {
            if a >= n_points || b >= n_points || a == b {
                return Err(Error::InvalidPairing(format!("bad pair ({a},{b})")));
            }
            if partner[a] != FREE || partner[b] != FREE {
                return Err(Error::InvalidPairing(format!("index reused in ({a},{b})")));
            }
            partner[a] = b;
            partner[b] = a;
        }
        Self::from_partners(partner)
    }

    pub fn from_partners(partner: Vec<usize>) -> Result<Self> {
        let n = partner.len();
        for (i, &p) in partner.iter().enumerate() {
            if p >= n || p == i || partner[p] != i {
                return Err(Error::InvalidPairing(format!("index {i} is not matched")));
            }
        }
        if !is_noncrossing(&partner) {
            return Err(Error::InvalidPairing("pairs cross".into()));
        }
        Ok(Self { partner })
    }

    fn from_partners_unchecked(partner: Vec<usize>) -> Self {
        debug_assert!(Self::from_partners(partner.clone()).is_ok());
        Self { partner }
    }

    pub fn empty() -> Self {
        Self { partner: Vec::new() }
    }

    pub fn n_points(&self) -> usize {
        self.partner.len()
    }

    pub fn box_size(&self) -> usize {
        self.partner.len() / 2
    }

    pub fn partner(&self, i: usize) -> usize {
        self.partner[i]
    }

    pub fn partners(&self) -> &[usize] {
        &self.partner
    }

    /// Canonical pair list: `(min, max)` sorted by first element.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.partner
            .iter()
            .enumerate()
            .filter(|&(i, &p)| i < p)
            .map(|(i, &p)| (i, p))
            .collect()
    }

    pub fn identity(k: usize) -> Self {
        Self::from_partners_unchecked((0..2 * k).map(|j| 2 * k - 1 - j).collect())
    }

    /// `U_i` for `1 <= i <= k-1`: cap on top points `i-1, i`, cup below.
    pub fn generator(k: usize, i: usize) -> Result<Self> {
        if i == 0 || i >= k {
            return Err(Error::GeneratorIndex { k, i });
        }
        let mut partner: Vec<usize> = (0..2 * k).map(|j| 2 * k - 1 - j).collect();
        let (a, b) = (i - 1, i);
        let (c, d) = (2 * k - 1 - b, 2 * k - 1 - a);
        partner[a] = b;
        partner[b] = a;
        partner[c] = d;
        partner[d] = c;
        Ok(Self::from_partners_unchecked(partner))
    }

    /// Anticlockwise by `s` clicks: new index `i` carries old index `i + s`.
    pub fn rotate(&self, s: i64) -> Self {
        let n = self.n_points();
        if n == 0 {
            return self.clone();
        }
        let s = s.rem_euclid(n as i64) as usize;
        let partner = (0..n)
            .map(|i| (self.partner[(i + s) % n] + n - s) % n)
            .collect();
        Self::from_partners_unchecked(partner)
    }

    /// Flip along the horizontal axis: `i -> 2k-1-i`.
    pub fn reflect(&self) -> Self {
        let n = self.n_points();
        let partner = (0..n).map(|i| n - 1 - self.partner[n - 1 - i]).collect();
        Self::from_partners_unchecked(partner)
    }

    /// Juxtaposition with `b` placed to the right of `self`.
    pub fn tensor(&self, b: &Pairing) -> Self {
        let (ka, kb) = (self.box_size(), b.box_size());
        let big = ka + kb;
        let map_a = |i: usize| if i < ka { i } else { big + kb + (i - ka) };
        let map_b = |i: usize| if i < kb { ka + i } else { big + (i - kb) };
        let mut partner = vec![FREE; 2 * big];
        for i in 0..2 * ka {
            partner[map_a(i)] = map_a(self.partner[i]);
        }
        for i in 0..2 * kb {
            partner[map_b(i)] = map_b(b.partner[i]);
        }
        Self::from_partners_unchecked(partner)
    }

    /// Number of loops of the closure pairing `i` with `2k-1-i`.
    pub fn closure_loops(&self) -> usize {
        let n = self.n_points();
        let inner = self.partner.clone();
        let outer: Vec<Option<usize>> = (0..n).map(|i| Some(n - 1 - i)).collect();
        trace(&inner, &outer).1
    }
}

/// Glue `s` consecutive points of `a` to `s` consecutive points of `b`.
///
/// `a(a_start + t)` meets `b(b_start + s - 1 - t)`. The output lists the free
/// points of `a` cyclically from `a(a_start + s)`, then those of `b` from
/// `b(b_start + s)`. Returns the pairing and the number of closed loops.
pub fn glue(
    a: &Pairing,
    a_start: usize,
    b: &Pairing,
    b_start: usize,
    s: usize,
) -> Result<(Pairing, usize)> {
    let (na, nb) = (a.n_points(), b.n_points());
    if s > na || s > nb {
        return Err(Error::InvalidGlue { m: s, a: na, b: nb });
    }
    let mut inner = Vec::with_capacity(na + nb);
    inner.extend_from_slice(&a.partner);
    inner.extend(b.partner.iter().map(|&p| p + na));
    let mut outer = vec![None; na + nb];
    for t in 0..s {
        let x = (a_start + t) % na;
        let y = na + (b_start + s - 1 - t) % nb;
        outer[x] = Some(y);
        outer[y] = Some(x);
    }
    let (ends, loops) = trace(&inner, &outer);
    let order: Vec<usize> = (0..na - s)
        .map(|j| (a_start + s + j) % na)
        .chain((0..nb - s).map(|j| na + (b_start + s + j) % nb))
        .collect();
    let mut position = vec![FREE; na + nb];
    for (pos, &node) in order.iter().enumerate() {
        position[node] = pos;
    }
    let partner = order.iter().map(|&node| position[ends[node]]).collect();
    Ok((Pairing::from_partners_unchecked(partner), loops))
}

/// Glue the last `m` points of `a` to the first `m` points of `b` in reverse
/// order. Stacking `s` on top of `t` for k-boxes is `contract(s, t, k)`.
pub fn contract(a: &Pairing, b: &Pairing, m: usize) -> Result<(Pairing, usize)> {
    if m > a.n_points() || m > b.n_points() {
        return Err(Error::InvalidGlue { m, a: a.n_points(), b: b.n_points() });
    }
    glue(a, a.n_points() - m, b, 0, m)
}

/// Follow strands through a set of nodes.
///
/// `inner` is a fixed-point-free involution; `outer` a partial involution.
/// Nodes with no outer partner are free ends. Returns, for every free end, the
/// free end at the other side of its strand (other entries are unspecified),
/// and the number of closed loops.
pub fn trace(inner: &[usize], outer: &[Option<usize>]) -> (Vec<usize>, usize) {
    let n = inner.len();
    let mut ends = vec![FREE; n];
    let mut seen = vec![false; n];
    for start in 0..n {
        if outer[start].is_some() || seen[start] {
            continue;
        }
        let mut cur = start;
        loop {
            seen[cur] = true;
            let p = inner[cur];
            seen[p] = true;
            match outer[p] {
                None => {
                    ends[start] = p;
                    ends[p] = start;
                    break;
                }
                Some(o) => cur = o,
            }
        }
    }
    let mut loops = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        loops += 1;
        let mut cur = start;
        while !seen[cur] {
            seen[cur] = true;
            let p = inner[cur];
            seen[p] = true;
            cur = outer[p].expect("closed strand has only glued nodes");
        }
    }
    (ends, loops)
}

pub fn is_noncrossing(partner: &[usize]) -> bool {
    let mut stack = Vec::new();
    for (i, &p) in partner.iter().enumerate() {
        if p > i {
            stack.push(i);
        } else if stack.pop() != Some(p) {
            return false;
        }
    }
    stack.is_empty()
}

pub fn catalan(k: usize) -> u64 {
    let mut c: u64 = 1;
    for i in 0..k as u64 {
        c = c * 2 * (2 * i + 1) / (i + 2);
    }
    c
}

/// All noncrossing pairings of `2k` points in lexicographic order.
pub fn enumerate_basis(k: usize) -> Result<Vec<Pairing>> {
    if k > MAX_BASIS_K {
        return Err(Error::BasisLimit { k, limit: MAX_BASIS_K });
    }
    let mut out = Vec::with_capacity(catalan(k) as usize);
    let mut partner = vec![FREE; 2 * k];
    fill(&mut partner, &mut vec![(0, 2 * k)], &mut out);
    out.sort();
    Ok(out)
}

fn fill(partner: &mut Vec<usize>, pending: &mut Vec<(usize, usize)>, out: &mut Vec<Pairing>) {
    let Some((lo, hi)) = pending.pop() else {
        out.push(Pairing { partner: partner.clone() });
        return;
    };
    if lo == hi {
        fill(partner, pending, out);
    } else {
        for j in (lo + 1..hi).step_by(2) {
            partner[lo] = j;
            partner[j] = lo;
            pending.push((j + 1, hi));
            pending.push((lo + 1, j));
            fill(partner, pending, out);
            pending.pop();
            pending.pop();
        }
    }
    pending.push((lo, hi));
}

impl fmt::Debug for Pairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, (a, b)) in self.pairs().into_iter().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "({a},{b})")?;
        }
        write!(f, "}}")
    }
}

#[derive(Serialize, Deserialize)]
struct PairingRepr {
    n_points: usize,
    pairs: Vec<(usize, usize)>,
}

impl Serialize for Pairing {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PairingRepr { n_points: self.n_points(), pairs: self.pairs() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Pairing {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = PairingRepr::deserialize(deserializer)?;
        Pairing::new(repr.n_points, &repr.pairs).map_err(serde::de::Error::custom)
    }
}
