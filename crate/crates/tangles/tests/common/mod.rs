#![allow(dead_code)]

use nalgebra::DMatrix;
use tangles::{TLElement, C64};

/// The 2k-leg tensor of a TL element at loop value d, legs in boundary order.
pub fn boundary_tensor(x: &TLElement, d: usize) -> Vec<C64> {
    let n = 2 * x.box_size();
    let size = d.pow(n as u32);
    let mut out = vec![C64::new(0.0, 0.0); size];
    for (idx, slot) in out.iter_mut().enumerate() {
        let mut labels = vec![0; n];
        let mut v = idx;
        for l in labels.iter_mut().rev() {
            *l = v % d;
            v /= d;
        }
        for (p, c) in x.terms() {
            if (0..n).all(|i| labels[i] == labels[p.partner(i)]) {
                *slot += c;
            }
        }
    }
    out
}

/// Whether every cyclic half of the legs maps isometrically (up to scale)
/// onto the other half.
pub fn halves_are_unitary(x: &TLElement, d: usize, tol: f64) -> bool {
    let k = x.box_size();
    let n = 2 * k;
    let t = boundary_tensor(x, d);
    let dk = d.pow(k as u32);
    (0..n).all(|start| {
        let legs: Vec<usize> = (0..n).map(|j| (start + j) % n).collect();
        let m = DMatrix::from_fn(dk, dk, |r, c| {
            let mut labels = vec![0; n];
            let (mut r, mut c) = (r, c);
            for j in (0..k).rev() {
                labels[legs[j]] = r % d;
                labels[legs[k + j]] = c % d;
                r /= d;
                c /= d;
            }
            t[labels.iter().fold(0, |acc, &l| acc * d + l)]
        });
        let g = &m * m.adjoint();
        let lambda = g.trace() / dk as f64;
        lambda.norm() > 1e-6 && (g - DMatrix::identity(dk, dk) * lambda).norm() <= tol
    })
}
