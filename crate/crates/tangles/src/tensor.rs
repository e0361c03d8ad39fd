//! Perfect and planar-perfect checks for dense tensors with uniform leg dimension.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tl::C64;

pub const TOL: f64 = 1e-10;
pub const TOL_ABS: f64 = 1e-12;

/// Entries stored row-major, leg 0 most significant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TensorFile")]
pub struct DenseTensor {
    n_legs: usize,
    dim: usize,
    #[serde(with = "pairs")]
    entries: Vec<C64>,
}

mod pairs {
    use super::C64;
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[C64], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for c in v {
            seq.serialize_element(&[c.re, c.im])?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<C64>, D::Error> {
        Ok(Vec::<[f64; 2]>::deserialize(d)?.into_iter().map(|[re, im]| C64::new(re, im)).collect())
    }
}

#[derive(Deserialize)]
struct Nonzero {
    index: Vec<usize>,
    coeff: [f64; 2],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TensorFile {
    n_legs: usize,
    dim: usize,
    #[serde(default, deserialize_with = "opt_pairs::deserialize")]
    entries: Option<Vec<C64>>,
    #[serde(default)]
    nonzeros: Option<Vec<Nonzero>>,
}

mod opt_pairs {
    use super::C64;
    use serde::Deserializer;

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<C64>>, D::Error> {
        super::pairs::deserialize(d).map(Some)
    }
}

impl TryFrom<TensorFile> for DenseTensor {
    type Error = Error;

    fn try_from(f: TensorFile) -> Result<Self> {
        match (f.entries, f.nonzeros) {
            (Some(entries), None) => DenseTensor::new(f.n_legs, f.dim, entries),
            (None, Some(nz)) => {
                let mut t = DenseTensor::zeros(f.n_legs, f.dim)?;
                for z in nz {
                    let flat = t.flat_index(&z.index)?;
                    t.entries[flat] += C64::new(z.coeff[0], z.coeff[1]);
                }
                t.check_finite()?;
                Ok(t)
            }
            _ => Err(Error::InvalidTensor("give exactly one of `entries` or `nonzeros`".into())),
        }
    }
}

impl DenseTensor {
    pub fn new(n_legs: usize, dim: usize, entries: Vec<C64>) -> Result<Self> {
        let size = Self::size_of(n_legs, dim)?;
        if entries.len() != size {
            return Err(Error::InvalidTensor(format!("expected {size} entries, got {}", entries.len())));
        }
        let t = Self { n_legs, dim, entries };
        t.check_finite()?;
        Ok(t)
    }

    pub fn zeros(n_legs: usize, dim: usize) -> Result<Self> {
        let size = Self::size_of(n_legs, dim)?;
        Ok(Self { n_legs, dim, entries: vec![C64::default(); size] })
    }

    fn size_of(n_legs: usize, dim: usize) -> Result<usize> {
        if dim == 0 {
            return Err(Error::InvalidTensor("leg dimension must be positive".into()));
        }
        u32::try_from(n_legs)
            .ok()
            .and_then(|n| dim.checked_pow(n))
            .filter(|&s| s <= 1 << 26)
            .ok_or_else(|| Error::InvalidTensor(format!("{dim}^{n_legs} entries is too large")))
    }

    fn check_finite(&self) -> Result<()> {
        if self.entries.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidTensor("non-finite entry".into()))
        }
    }

    pub fn n_legs(&self) -> usize {
        self.n_legs
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn flat_index(&self, index: &[usize]) -> Result<usize> {
        if index.len() != self.n_legs || index.iter().any(|&i| i >= self.dim) {
            return Err(Error::InvalidTensor(format!("bad index {index:?}")));
        }
        Ok(index.iter().fold(0, |acc, &i| acc * self.dim + i))
    }

    pub fn get(&self, index: &[usize]) -> Result<C64> {
        Ok(self.entries[self.flat_index(index)?])
    }

    fn digits(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.n_legs];
        for slot in out.iter_mut().rev() {
            *slot = flat % self.dim;
            flat /= self.dim;
        }
        out
    }

    /// Leg `p` of the result is leg `order[p]` of `self`.
    pub fn permute_legs(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.n_legs];
        if order.len() != self.n_legs || order.iter().any(|&l| l >= self.n_legs || std::mem::replace(&mut seen[l], true)) {
            return Err(Error::InvalidTensor(format!("{order:?} is not a leg permutation")));
        }
        let mut out = Self::zeros(self.n_legs, self.dim)?;
        for (flat, c) in self.entries.iter().enumerate() {
            let idx = self.digits(flat);
            let new: Vec<usize> = order.iter().map(|&l| idx[l]).collect();
            let f = out.flat_index(&new)?;
            out.entries[f] = *c;
        }
        Ok(out)
    }

    /// Contract leg `leg` with `u` (new index first).
    pub fn apply_on_leg(&self, leg: usize, u: &DMatrix<C64>) -> Result<Self> {
        if leg >= self.n_legs || u.shape() != (self.dim, self.dim) {
            return Err(Error::InvalidTensor("operator does not fit the leg".into()));
        }
        let mut out = Self::zeros(self.n_legs, self.dim)?;
        let stride = self.dim.pow((self.n_legs - 1 - leg) as u32);
        for (flat, c) in self.entries.iter().enumerate() {
            let i = (flat / stride) % self.dim;
            let base = flat - i * stride;
            for j in 0..self.dim {
                out.entries[base + j * stride] += u[(j, i)] * c;
            }
        }
        Ok(out)
    }
}

/// Cyclic intervals `A` with `1 <= |A| <= n/2`, by size then starting leg.
pub fn connected_bipartitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for size in 1..=n / 2 {
        for start in 0..n {
            let mut a: Vec<usize> = (0..size).map(|j| (start + j) % n).collect();
            a.sort_unstable();
            if !out.contains(&a) {
                out.push(a);
            }
        }
    }
    out
}

/// One side of every bipartition with `|A| <= |A^c|`; at `|A| = n/2` the side
/// holding leg 0. Ordered by size, then lexicographically.
pub fn all_bipartitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for size in 1..=n / 2 {
        let mut subsets: Vec<Vec<usize>> = (0u64..1 << n)
            .filter(|m| m.count_ones() as usize == size)
            .filter(|m| 2 * size < n || m & 1 == 1)
            .map(|m| (0..n).filter(|&i| m >> i & 1 == 1).collect())
            .collect();
        subsets.sort();
        out.extend(subsets);
    }
    out
}

/// Matrix from legs `A` (columns) to the complement (rows), both ascending.
pub fn bipartition_map(t: &DenseTensor, a: &[usize]) -> Result<DMatrix<C64>> {
    let n = t.n_legs;
    let mut in_a = vec![false; n];
    for &l in a {
        if l >= n || std::mem::replace(&mut in_a[l], true) {
            return Err(Error::InvalidTensor(format!("bad leg subset {a:?}")));
        }
    }
    if a.is_empty() || 2 * a.len() > n {
        return Err(Error::InvalidTensor(format!("need 1 <= |A| <= n/2, got {a:?}")));
    }
    let d = t.dim;
    let cols = d.pow(a.len() as u32);
    let rows = d.pow((n - a.len()) as u32);
    let mut m = DMatrix::zeros(rows, cols);
    for (flat, c) in t.entries.iter().enumerate() {
        let idx = t.digits(flat);
        let (mut r, mut col) = (0, 0);
        for (leg, &i) in idx.iter().enumerate() {
            if in_a[leg] {
                col = col * d + i;
            } else {
                r = r * d + i;
            }
        }
        m[(r, col)] = *c;
    }
    Ok(m)
}

/// `M^† M = λ 1` up to `tol` relative to `|λ|`, with `|λ| > tol_abs`.
/// Returns the verdict, `λ = tr(M^† M) / cols`, and `max |M^† M - λ 1|`.
pub fn isometry_check(m: &DMatrix<C64>, tol: f64, tol_abs: f64) -> (bool, f64, f64) {
    let g = m.adjoint() * m;
    let cols = g.nrows().max(1);
    let lambda = g.trace().re / cols as f64;
    let mut dev: f64 = 0.0;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let target = if i == j { lambda } else { 0.0 };
            dev = dev.max((g[(i, j)] - target).norm());
        }
    }
    (dev <= tol * lambda.abs() && lambda.abs() > tol_abs, lambda, dev)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BipartitionVerdict {
    pub subset: Vec<usize>,
    pub isometry: bool,
    pub lambda: f64,
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorReport {
    pub verdict: bool,
    pub conditions: Vec<BipartitionVerdict>,
}

fn run_checks(t: &DenseTensor, subsets: Vec<Vec<usize>>, tol: f64, tol_abs: f64) -> Result<TensorReport> {
    if t.n_legs < 2 {
        return Err(Error::InvalidTensor("need at least two legs".into()));
    }
    let conditions = subsets
        .into_par_iter()
        .map(|a| {
            let m = bipartition_map(t, &a)?;
            let (isometry, lambda, deviation) = isometry_check(&m, tol, tol_abs);
            Ok(BipartitionVerdict { subset: a, isometry, lambda, deviation })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TensorReport { verdict: conditions.iter().all(|c| c.isometry), conditions })
}

pub fn is_perfect_tensor(t: &DenseTensor, tol: f64, tol_abs: f64) -> Result<TensorReport> {
    run_checks(t, all_bipartitions(t.n_legs), tol, tol_abs)
}

pub fn is_planar_perfect(t: &DenseTensor, tol: f64, tol_abs: f64) -> Result<TensorReport> {
    run_checks(t, connected_bipartitions(t.n_legs), tol, tol_abs)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorCheck {
    pub perfect: TensorReport,
    pub planar_perfect: TensorReport,
}

/// Both checks. Panics if a perfect tensor fails the planar check, which would
/// mean the two condition sets disagree on a shared bipartition.
pub fn check_tensor(t: &DenseTensor, tol: f64, tol_abs: f64) -> Result<TensorCheck> {
    let perfect = is_perfect_tensor(t, tol, tol_abs)?;
    let planar_perfect = is_planar_perfect(t, tol, tol_abs)?;
    assert!(!perfect.verdict || planar_perfect.verdict, "perfect tensor failed the planar check");
    Ok(TensorCheck { perfect, planar_perfect })
}

pub fn ghz(n: usize, d: usize) -> Result<DenseTensor> {
    let mut t = DenseTensor::zeros(n, d)?;
    let amp = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    for i in 0..d {
        let f = t.flat_index(&vec![i; n])?;
        t.entries[f] = amp;
    }
    Ok(t)
}

/// `sum_{i,j} |i, j, i+j, i+2j> / 3`, indices mod 3.
pub fn ame43() -> DenseTensor {
    let mut t = DenseTensor::zeros(4, 3).expect("fixed size");
    for i in 0..3 {
        for j in 0..3 {
            let f = t.flat_index(&[i, j, (i + j) % 3, (i + 2 * j) % 3]).expect("in range");
            t.entries[f] = C64::new(1.0 / 3.0, 0.0);
        }
    }
    t
}

/// X-type stabilizer generators of the Steane code, qubit 0 first.
pub const STEANE_GENERATORS: [[u8; 7]; 3] = [
    [0, 0, 0, 1, 1, 1, 1],
    [0, 1, 1, 0, 0, 1, 1],
    [1, 0, 1, 0, 1, 0, 1],
];

/// Encoding map of the Steane code as an 8-leg tensor: legs 0..7 canonically
/// are the physical qubits and leg 7 the logical one; entry
/// `(x_0..x_6, b) = 8^{-1/2}` when `x` is in codeword `b`. `ordering[p]` names
/// the canonical leg placed at position `p`.
pub fn steane_tensor(ordering: &[usize]) -> Result<DenseTensor> {
    let mut t = DenseTensor::zeros(8, 2)?;
    let amp = C64::new(1.0 / 8f64.sqrt(), 0.0);
    for logical in 0..2u8 {
        for mask in 0..8u8 {
            let mut idx = vec![0usize; 8];
            for (q, slot) in idx.iter_mut().take(7).enumerate() {
                let bit = STEANE_GENERATORS
                    .iter()
                    .enumerate()
                    .fold(logical, |acc, (g, row)| acc ^ ((mask >> g & 1) * row[q]));
                *slot = bit as usize;
            }
            idx[7] = logical as usize;
            let f = t.flat_index(&idx)?;
            t.entries[f] = amp;
        }
    }
    t.permute_legs(ordering)
}

/// Cyclic orders of the Steane legs up to rotation and reflection: the logical
/// leg at position 0 and the physical legs in an order whose first entry is
/// below its last. Lexicographic.
pub fn steane_orderings() -> Vec<Vec<usize>> {
    fn perms(rest: &mut Vec<usize>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            if cur[0] < cur[cur.len() - 1] {
                let mut o = vec![7];
                o.extend_from_slice(cur);
                out.push(o);
            }
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            cur.push(x);
            perms(rest, cur, out);
            cur.pop();
            rest.insert(i, x);
        }
    }
    let mut out = Vec::new();
    perms(&mut (0..7).collect(), &mut Vec::new(), &mut out);
    out
}

/// First ordering (in [`steane_orderings`] order) giving a planar-perfect tensor.
pub fn find_steane_ordering(tol: f64, tol_abs: f64) -> Result<Option<Vec<usize>>> {
    for ordering in steane_orderings() {
        if is_planar_perfect(&steane_tensor(&ordering)?, tol, tol_abs)?.verdict {
            return Ok(Some(ordering));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bell() -> DenseTensor {
        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        DenseTensor::new(2, 2, vec![h, C64::default(), C64::default(), h]).unwrap()
    }

    #[test]
    fn bipartition_lists() {
        assert_eq!(connected_bipartitions(2), vec![vec![0], vec![1]]);
        assert_eq!(connected_bipartitions(3).len(), 3);
        let four = connected_bipartitions(4);
        assert_eq!(four.len(), 8);
        assert!(!four.contains(&vec![0, 2]));
        assert_eq!(all_bipartitions(4).len(), 7);
        assert_eq!(all_bipartitions(3).len(), 3);
    }

    #[test]
    fn bell_and_product() {
        let (ok, lambda, _) = isometry_check(&bipartition_map(&bell(), &[0]).unwrap(), TOL, TOL_ABS);
        assert!(ok);
        assert!((lambda - 0.5).abs() < 1e-15);
        let one = C64::new(1.0, 0.0);
        let z = C64::default();
        let prod = DenseTensor::new(2, 2, vec![one, z, z, z]).unwrap();
        assert!(!isometry_check(&bipartition_map(&prod, &[0]).unwrap(), TOL, TOL_ABS).0);
    }

    #[test]
    fn ghz_and_ame() {
        let g = ghz(3, 2).unwrap();
        assert_eq!(g.entries().iter().filter(|c| c.norm() > 0.0).count(), 2);
        let (ok, lambda, _) = isometry_check(&bipartition_map(&g, &[1]).unwrap(), TOL, TOL_ABS);
        assert!(ok && (lambda - 0.5).abs() < 1e-15);
        assert!(check_tensor(&g, TOL, TOL_ABS).unwrap().perfect.verdict);
        let a = ame43();
        assert_eq!(a.entries().iter().filter(|c| c.norm() > 0.0).count(), 9);
        assert!(is_perfect_tensor(&a, TOL, TOL_ABS).unwrap().verdict);
    }

    #[test]
    fn map_shape_and_errors() {
        let a = ame43();
        let m = bipartition_map(&a, &[1, 2]).unwrap();
        assert_eq!(m.shape(), (9, 9));
        assert!(bipartition_map(&a, &[]).is_err());
        assert!(bipartition_map(&a, &[0, 1, 2]).is_err());
        assert!(bipartition_map(&a, &[4]).is_err());
        assert!(DenseTensor::new(2, 2, vec![C64::default(); 3]).is_err());
    }

    #[test]
    fn json_forms() {
        let dense = serde_json::to_string(&bell()).unwrap();
        let back: DenseTensor = serde_json::from_str(&dense).unwrap();
        assert_eq!(back, bell());
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let sparse = format!(
            r#"{{"n_legs":2,"dim":2,"nonzeros":[{{"index":[0,0],"coeff":[{h},0]}},{{"index":[1,1],"coeff":[{h},0]}}]}}"#
        );
        let t: DenseTensor = serde_json::from_str(&sparse).unwrap();
        assert_eq!(t, bell());
        assert!(serde_json::from_str::<DenseTensor>(r#"{"n_legs":2,"dim":2,"entries":[[1,0]]}"#).is_err());
        assert!(serde_json::from_str::<DenseTensor>(r#"{"n_legs":2,"dim":2}"#).is_err());
    }

    #[test]
    fn steane_columns_orthonormal() {
        let t = steane_tensor(&(0..8).collect::<Vec<_>>()).unwrap();
        let m = bipartition_map(&t, &[7]).unwrap();
        let g = m.adjoint() * &m;
        assert!((g - DMatrix::<C64>::identity(2, 2)).norm() < 1e-14);
        assert_eq!(steane_orderings().len(), 2520);
    }

    #[test]
    fn leg_operations() {
        let g = ghz(3, 2).unwrap();
        let p = g.permute_legs(&[2, 0, 1]).unwrap();
        assert_eq!(p, g);
        assert!(g.permute_legs(&[0, 0, 1]).is_err());
        let x = DMatrix::from_row_slice(2, 2, &[C64::default(), C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::default()]);
        let flipped = g.apply_on_leg(0, &x).unwrap();
        assert!(flipped.get(&[1, 0, 0]).unwrap().norm() > 0.7);
    }
}
