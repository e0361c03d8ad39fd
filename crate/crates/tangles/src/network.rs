//! Planar wiring skeletons with labelled boxes, evaluated in one pass.

use crate::error::{Error, Result};
use crate::pairing::{self, Pairing};
use crate::tl::{TLContext, TLElement, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Inner {
    /// Port `idx` of box `b`.
    Port { b: usize, idx: usize },
    /// End of a bare strand.
    Strand(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Node {
    inner: Inner,
    outer: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct BoxSlot {
    content: usize,
    ports: Vec<usize>,
}

/// Boxes, bare strands and the gluing between them; boundary listed clockwise
/// from the marked point.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Network {
    nodes: Vec<Node>,
    boxes: Vec<BoxSlot>,
    boundary: Vec<usize>,
}

impl Network {
    pub fn identity(k: usize) -> Self {
        let n = 2 * k;
        let nodes = (0..n)
            .map(|j| Node { inner: Inner::Strand(n - 1 - j), outer: None })
            .collect();
        Self { nodes, boxes: Vec::new(), boundary: (0..n).collect() }
    }

    /// A single `k`-box filled later with content `content`.
    pub fn boxed(content: usize, k: usize) -> Self {
        let nodes = (0..2 * k)
            .map(|idx| Node { inner: Inner::Port { b: 0, idx }, outer: None })
            .collect();
        Self {
            nodes,
            boxes: vec![BoxSlot { content, ports: (0..2 * k).collect() }],
            boundary: (0..2 * k).collect(),
        }
    }

    pub fn box_size(&self) -> usize {
        self.boundary.len() / 2
    }

    pub fn n_boxes(&self) -> usize {
        self.boxes.len()
    }

    /// Disjoint union; returns the node offset of `other`.
    fn absorb(&mut self, other: &Network) -> usize {
        let off = self.nodes.len();
        let box_off = self.boxes.len();
        for node in &other.nodes {
            let inner = match node.inner {
                Inner::Port { b, idx } => Inner::Port { b: b + box_off, idx },
                Inner::Strand(o) => Inner::Strand(o + off),
            };
            self.nodes.push(Node { inner, outer: node.outer.map(|o| o + off) });
        }
        for bx in &other.boxes {
            self.boxes.push(BoxSlot {
                content: bx.content,
                ports: bx.ports.iter().map(|p| p + off).collect(),
            });
        }
        off
    }

    pub fn tensor(&self, other: &Network) -> Network {
        let (ka, kb) = (self.box_size(), other.box_size());
        let mut out = self.clone();
        let off = out.absorb(other);
        let b: Vec<usize> = other.boundary.iter().map(|n| n + off).collect();
        let a = &self.boundary;
        let mut boundary = Vec::with_capacity(a.len() + b.len());
        boundary.extend_from_slice(&a[..ka]);
        boundary.extend_from_slice(&b[..kb]);
        boundary.extend_from_slice(&b[kb..]);
        boundary.extend_from_slice(&a[ka..]);
        out.boundary = boundary;
        out
    }

    /// Same conventions as [`pairing::glue`].
    pub fn glue(&self, a_start: usize, other: &Network, b_start: usize, s: usize) -> Result<Network> {
        let (na, nb) = (self.boundary.len(), other.boundary.len());
        if s > na || s > nb {
            return Err(Error::InvalidGlue { m: s, a: na, b: nb });
        }
        let mut out = self.clone();
        let off = out.absorb(other);
        let b: Vec<usize> = other.boundary.iter().map(|n| n + off).collect();
        let a = &self.boundary;
        for t in 0..s {
            let x = a[(a_start + t) % na];
            let y = b[(b_start + s - 1 - t) % nb];
            out.nodes[x].outer = Some(y);
            out.nodes[y].outer = Some(x);
        }
        out.boundary = (0..na - s)
            .map(|j| a[(a_start + s + j) % na])
            .chain((0..nb - s).map(|j| b[(b_start + s + j) % nb]))
            .collect();
        Ok(out)
    }

    pub fn rotate(&self, s: i64) -> Network {
        let n = self.boundary.len();
        let mut out = self.clone();
        if n > 0 {
            let s = s.rem_euclid(n as i64) as usize;
            out.boundary = (0..n).map(|i| self.boundary[(i + s) % n]).collect();
        }
        out
    }

    /// Trace with every box `b` filled by the matching `fill[b]` on its ports.
    /// Box fillings need not be planar.
    fn trace_fill(&self, fill: &[&[usize]]) -> (Vec<usize>, usize) {
        let inner: Vec<usize> = self
            .nodes
            .iter()
            .map(|node| match node.inner {
                Inner::Port { b, idx } => self.boxes[b].ports[fill[b][idx]],
                Inner::Strand(o) => o,
            })
            .collect();
        let outer: Vec<Option<usize>> = self.nodes.iter().map(|n| n.outer).collect();
        let (ends, loops) = pairing::trace(&inner, &outer);
        let mut position = vec![usize::MAX; self.nodes.len()];
        for (pos, &node) in self.boundary.iter().enumerate() {
            position[node] = pos;
        }
        let matching = self.boundary.iter().map(|&node| position[ends[node]]).collect();
        (matching, loops)
    }

    /// Boundary matching when every box of content `c` is filled with the
    /// (possibly crossing) matching `fills[c]`.
    pub fn evaluate_raw(&self, fills: &[Vec<usize>]) -> Result<(Vec<usize>, usize)> {
        let mut per_box = Vec::with_capacity(self.boxes.len());
        for bx in &self.boxes {
            let f = fills
                .get(bx.content)
                .ok_or_else(|| Error::Usage(format!("no filling for content {}", bx.content)))?;
            if f.len() != bx.ports.len() {
                return Err(Error::SizeMismatch(bx.ports.len() / 2, f.len() / 2));
            }
            per_box.push(f.as_slice());
        }
        Ok(self.trace_fill(&per_box))
    }

    /// Full multilinear expansion over all term combinations. Returns the
    /// collected element and the number of combinations expanded.
    pub fn evaluate(&self, contents: &[&TLElement], ctx: &TLContext) -> Result<(TLElement, usize)> {
        let mut terms: Vec<Vec<(&Pairing, C64)>> = Vec::with_capacity(self.boxes.len());
        for bx in &self.boxes {
            let x = contents
                .get(bx.content)
                .ok_or_else(|| Error::Usage(format!("no element for content {}", bx.content)))?;
            if 2 * x.box_size() != bx.ports.len() {
                return Err(Error::SizeMismatch(bx.ports.len() / 2, x.box_size()));
            }
            terms.push(x.terms().map(|(p, c)| (p, *c)).collect());
        }
        let mut out = TLElement::zero(self.box_size());
        if terms.iter().any(|t| t.is_empty()) {
            return Ok((out, 0));
        }
        let mut choice = vec![0usize; terms.len()];
        let mut combos = 0;
        loop {
            combos += 1;
            let fill: Vec<&[usize]> = choice
                .iter()
                .zip(&terms)
                .map(|(&c, t)| t[c].0.partners())
                .collect();
            let coeff: C64 = choice.iter().zip(&terms).map(|(&c, t)| t[c].1).product();
            let (matching, loops) = self.trace_fill(&fill);
            let p = Pairing::from_partners(matching)?;
            out.add_term(p, coeff * ctx.loop_factor(loops));
            let mut pos = 0;
            loop {
                if pos == choice.len() {
                    return Ok((out, combos));
                }
                choice[pos] += 1;
                if choice[pos] < terms[pos].len() {
                    break;
                }
                choice[pos] = 0;
                pos += 1;
            }
        }
    }
}
