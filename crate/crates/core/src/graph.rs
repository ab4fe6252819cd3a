//! The complete (1,2)-weighted graph on `n + 1` vertices, vertex 0 being the root.

use std::fmt::Write as _;

use crate::error::{Error, Result};

pub type Vertex = usize;

pub const ROOT: Vertex = 0;

/// Edge weight; always 1 or 2.
pub type Weight = u8;

/// Canonical edge numbering: lexicographic on `(min, max)`, i.e.
/// `(0,1), (0,2), …, (0,n), (1,2), …, (n-1,n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeIndex {
    n: usize,
    pairs: Vec<(Vertex, Vertex)>,
    row_start: Vec<usize>,
}

impl EdgeIndex {
    pub fn new(n: usize) -> Self {
        let mut pairs = Vec::with_capacity(n * (n + 1) / 2);
        let mut row_start = Vec::with_capacity(n + 1);
        for u in 0..=n {
            row_start.push(pairs.len());
            for v in u + 1..=n {
                pairs.push((u, v));
            }
        }
        Self { n, pairs, row_start }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    #[inline]
    pub fn pair(&self, i: usize) -> (Vertex, Vertex) {
        self.pairs[i]
    }

    /// Index of the unordered pair `{u, v}`. Panics on `u == v`.
    #[inline]
    pub fn index(&self, u: Vertex, v: Vertex) -> usize {
        debug_assert!(u != v && u <= self.n && v <= self.n);
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        self.row_start[a] + (b - a - 1)
    }

    pub fn pairs(&self) -> &[(Vertex, Vertex)] {
        &self.pairs
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    n: usize,
    weights: Vec<Weight>,
    edges: EdgeIndex,
}

impl Instance {
    /// Builds an instance from a weight function evaluated on every pair `u < v`.
    pub fn from_fn(n: usize, mut w: impl FnMut(Vertex, Vertex) -> Weight) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition("an instance needs n >= 1".into()));
        }
        let edges = EdgeIndex::new(n);
        let mut weights = Vec::with_capacity(edges.len());
        for &(u, v) in edges.pairs() {
            let x = w(u, v);
            if x != 1 && x != 2 {
                return Err(Error::Precondition(format!("weight {x} on ({u},{v}) not in {{1,2}}")));
            }
            weights.push(x);
        }
        Ok(Self { n, weights, edges })
    }

    /// Weights listed in canonical edge order.
    pub fn from_weights(n: usize, weights: Vec<Weight>) -> Result<Self> {
        let edges = EdgeIndex::new(n);
        if weights.len() != edges.len() {
            return Err(Error::LengthMismatch { expected: edges.len(), got: weights.len() });
        }
        let mut it = weights.into_iter();
        Self::from_fn(n, |_, _| it.next().unwrap())
    }

    pub fn uniform(n: usize, w: Weight) -> Result<Self> {
        Self::from_fn(n, |_, _| w)
    }

    /// Number of non-root vertices.
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of edges, `n(n+1)/2`.
    #[inline]
    pub fn m(&self) -> usize {
        self.weights.len()
    }

    pub fn edges(&self) -> &EdgeIndex {
        &self.edges
    }

    /// Weights in canonical edge order.
    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    #[inline]
    pub fn edge_weight(&self, i: usize) -> Weight {
        self.weights[i]
    }

    /// Unchecked lookup for internal hot paths.
    #[inline]
    pub(crate) fn w(&self, u: Vertex, v: Vertex) -> Weight {
        self.weights[self.edges.index(u, v)]
    }

    pub fn weight(&self, u: Vertex, v: Vertex) -> Result<Weight> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        Ok(self.w(u, v))
    }

    pub fn check_vertex(&self, v: Vertex) -> Result<()> {
        if v > self.n {
            Err(Error::VertexOutOfRange { vertex: v, n: self.n })
        } else {
            Ok(())
        }
    }

    /// `N_1(v)`: vertices joined to `v` by a weight-1 edge, ascending.
    pub fn n1_neighbors(&self, v: Vertex) -> Result<Vec<Vertex>> {
        self.neighbors_with(v, 1)
    }

    /// `N_2(v)`: vertices joined to `v` by a weight-2 edge, ascending.
    pub fn n2_neighbors(&self, v: Vertex) -> Result<Vec<Vertex>> {
        self.neighbors_with(v, 2)
    }

    fn neighbors_with(&self, v: Vertex, w: Weight) -> Result<Vec<Vertex>> {
        self.check_vertex(v)?;
        Ok((0..=self.n).filter(|&u| u != v && self.w(u, v) == w).collect())
    }

    /// Number of weight-2 edges, i.e. the sum of `weight - 1` over all edges.
    pub fn heavy_edges(&self) -> usize {
        self.weights.iter().filter(|&&w| w == 2).count()
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        writeln!(out, "n {}", self.n).unwrap();
        for u in 0..self.n {
            let row: Vec<String> = (u + 1..=self.n).map(|v| self.w(u, v).to_string()).collect();
            writeln!(out, "{}", row.join(" ")).unwrap();
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap().trim()))
            .filter(|(_, l)| !l.is_empty());
        let (line, header) = lines.next().ok_or(Error::Parse { line: 1, message: "empty input".into() })?;
        let mut parts = header.split_whitespace();
        let n = match (parts.next(), parts.next(), parts.next()) {
            (Some("n"), Some(v), None) => {
                v.parse::<usize>().map_err(|e| Error::Parse { line, message: format!("bad vertex count: {e}") })?
            }
            _ => return Err(Error::Parse { line, message: "expected header `n <int>`".into() }),
        };
        if n == 0 {
            return Err(Error::Parse { line, message: "n must be positive".into() });
        }
        let mut weights = Vec::with_capacity(n * (n + 1) / 2);
        for row in 0..n {
            let (line, text) = lines
                .next()
                .ok_or(Error::Parse { line: line + 1, message: format!("missing row {} of {n}", row + 1) })?;
            let before = weights.len();
            for tok in text.split_whitespace() {
                match tok {
                    "1" => weights.push(1),
                    "2" => weights.push(2),
                    _ => return Err(Error::Parse { line, message: format!("weight {tok:?} not in {{1,2}}") }),
                }
            }
            let got = weights.len() - before;
            if got != n - row {
                return Err(Error::Parse {
                    line,
                    message: format!("row {} has {got} weights, expected {}", row + 1, n - row),
                });
            }
        }
        if let Some((line, _)) = lines.next() {
            return Err(Error::Parse { line, message: "trailing data after last row".into() });
        }
        Self::from_weights(n, weights)
    }
}

/// Reference instance used across the test-suite: `n = 3` with weight-1
/// edges `(0,1)`, `(1,2)`, `(2,3)` and weight 2 elsewhere.
pub fn reference_i3() -> Instance {
    Instance::from_weights(3, vec![1, 2, 2, 1, 2, 1]).unwrap()
}
