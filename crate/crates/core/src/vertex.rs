//! Vertex-based search points: the bit string names the root's children and
//! the rest of the tree is filled in greedily.

use std::fmt;

use fixedbitset::FixedBitSet;
use rand::Rng;

use crate::bits;
use crate::edge::split_tagged;
use crate::error::{Error, Result};
use crate::graph::{Instance, Vertex, ROOT};
use crate::tree::HopTree;

/// Bit `i` set means vertex `i + 1` is a child of the root.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSolution {
    bits: FixedBitSet,
}

impl VertexSolution {
    pub fn from_bits(inst: &Instance, bits: FixedBitSet) -> Result<Self> {
        if bits.len() != inst.n() {
            return Err(Error::LengthMismatch { expected: inst.n(), got: bits.len() });
        }
        Ok(Self { bits })
    }

    /// Solution whose root children are exactly `children` (vertex labels, 1-based).
    pub fn from_children(inst: &Instance, children: &[Vertex]) -> Result<Self> {
        let mut bits = FixedBitSet::with_capacity(inst.n());
        for &v in children {
            if v == ROOT || v > inst.n() {
                return Err(Error::VertexOutOfRange { vertex: v, n: inst.n() });
            }
            bits.insert(v - 1);
        }
        Ok(Self { bits })
    }

    pub fn random<R: Rng + ?Sized>(inst: &Instance, rng: &mut R) -> Self {
        Self { bits: bits::random_bits(inst.n(), rng) }
    }

    pub fn bits(&self) -> &FixedBitSet {
        &self.bits
    }

    pub fn flip(&mut self, i: usize) {
        self.bits.toggle(i);
    }

    pub fn apply_mask(&mut self, mask: &FixedBitSet) {
        self.bits.symmetric_difference_with(mask);
    }

    /// `V(x)`, ascending.
    pub fn children(&self) -> Vec<Vertex> {
        self.bits.ones().map(|i| i + 1).collect()
    }

    pub fn to_text(&self) -> String {
        format!("vertex:{}:{}", self.bits.len(), bits::to_hex(&self.bits))
    }

    pub fn parse_text(inst: &Instance, text: &str) -> Result<Self> {
        let (len, hex) = split_tagged(text, "vertex")?;
        Self::from_bits(inst, bits::from_hex(len, hex)?)
    }
}

impl fmt::Debug for VertexSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VertexSolution({})", self.to_text())
    }
}

/// Builds `G(x)`: every chosen vertex under the root, every other vertex
/// under its lowest-index chosen weight-1 neighbour, or under the
/// lowest-index chosen vertex if it has none. `None` when `V(x)` is empty.
pub fn build_tree(inst: &Instance, x: &VertexSolution) -> Option<HopTree> {
    let chosen = x.children();
    let first = *chosen.first()?;
    let n = inst.n();
    let mut parent = vec![ROOT; n + 1];
    for v in 1..=n {
        if x.bits.contains(v - 1) {
            continue;
        }
        parent[v] = chosen.iter().copied().find(|&c| inst.w(v, c) == 1).unwrap_or(first);
    }
    Some(HopTree::from_parents(parent).expect("construction has depth 2"))
}

/// Cost of `G(x)`; the empty child set is charged `2n + 1`, worse than
/// every real tree.
pub fn cost(inst: &Instance, x: &VertexSolution) -> u64 {
    match build_tree(inst, x) {
        Some(t) => t.cost(inst),
        None => empty_penalty(inst),
    }
}

pub fn empty_penalty(inst: &Instance) -> u64 {
    2 * inst.n() as u64 + 1
}

/// Standard bit mutation with rate `1/n`.
pub fn mutate_vertex<R: Rng + ?Sized>(x: &VertexSolution, rng: &mut R) -> VertexSolution {
    let mut y = x.clone();
    bits::standard_bit_mutation(&mut y.bits, rng);
    y
}
