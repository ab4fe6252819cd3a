//! Feasible 2-hop spanning trees as parent arrays.

use crate::edge::{metrics, EdgeSolution};
use crate::error::{Error, Result};
use crate::graph::{Instance, Vertex, ROOT};

/// A spanning tree of depth at most 2 rooted at `r`. `parent[v]` for
/// `v in 1..=n`; `parent[0]` is unused and kept at 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HopTree {
    parent: Vec<Vertex>,
    children: Vec<usize>,
}

impl HopTree {
    pub fn from_parents(parent: Vec<Vertex>) -> Result<Self> {
        let n = parent.len().saturating_sub(1);
        if n == 0 || parent[ROOT] != ROOT {
            return Err(Error::Precondition("parent array must be indexed 0..=n with parent[0] = 0".into()));
        }
        let mut children = vec![0; n + 1];
        for v in 1..=n {
            let p = parent[v];
            if p > n || p == v {
                return Err(Error::Precondition(format!("vertex {v} has invalid parent {p}")));
            }
            if p != ROOT && parent[p] != ROOT {
                return Err(Error::Precondition(format!("vertex {v} lies deeper than two hops")));
            }
            children[p] += 1;
        }
        Ok(Self { parent, children })
    }

    /// Reads the tree structure off a feasible edge solution.
    pub fn from_edge_solution(inst: &Instance, x: &EdgeSolution) -> Result<Self> {
        let m = metrics(inst, x)?;
        if !m.is_feasible() {
            return Err(Error::Precondition("edge solution is not a feasible 2-hop tree".into()));
        }
        let n = inst.n();
        let mut parent = vec![ROOT; n + 1];
        for (u, v) in x.edge_list(inst) {
            let (p, c) = if m.dist[u] < m.dist[v] { (u, v) } else { (v, u) };
            parent[c] = p;
        }
        Self::from_parents(parent)
    }

    pub fn star(n: usize) -> Self {
        Self::from_parents(vec![ROOT; n + 1]).unwrap()
    }

    pub fn n(&self) -> usize {
        self.parent.len() - 1
    }

    pub fn parents(&self) -> &[Vertex] {
        &self.parent
    }

    #[inline]
    pub fn parent(&self, v: Vertex) -> Vertex {
        self.parent[v]
    }

    /// `v` hangs directly off the root.
    #[inline]
    pub fn is_child(&self, v: Vertex) -> bool {
        v != ROOT && self.parent[v] == ROOT
    }

    #[inline]
    pub fn is_grandchild(&self, v: Vertex) -> bool {
        v != ROOT && self.parent[v] != ROOT
    }

    #[inline]
    pub fn child_count(&self, v: Vertex) -> usize {
        self.children[v]
    }

    /// A child of the root without children of its own.
    #[inline]
    pub fn is_leaf_child(&self, v: Vertex) -> bool {
        self.is_child(v) && self.children[v] == 0
    }

    pub fn children_of(&self, p: Vertex) -> Vec<Vertex> {
        (1..=self.n()).filter(|&v| self.parent[v] == p).collect()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        (1..=self.n()).map(|v| (self.parent[v], v))
    }

    pub fn cost(&self, inst: &Instance) -> u64 {
        self.edges().map(|(p, v)| inst.w(p, v) as u64).sum()
    }

    pub fn to_edge_solution(&self, inst: &Instance) -> EdgeSolution {
        let edges: Vec<_> = self.edges().collect();
        EdgeSolution::from_edges(inst, &edges).expect("tree edges are valid pairs")
    }
}
