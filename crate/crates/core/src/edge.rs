//! Edge-based search points and the graph metrics computed on `G(x)`.

use std::fmt;

use fixedbitset::FixedBitSet;
use rand::Rng;

use crate::bits;
use crate::error::{Error, Result};
use crate::graph::{Instance, Vertex, ROOT};

/// Bit `i` selects edge `i` of the canonical edge order. Any bit pattern is
/// a valid search point, feasible or not.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EdgeSolution {
    bits: FixedBitSet,
}

impl EdgeSolution {
    pub fn empty(inst: &Instance) -> Self {
        Self { bits: FixedBitSet::with_capacity(inst.m()) }
    }

    pub fn from_bits(inst: &Instance, bits: FixedBitSet) -> Result<Self> {
        if bits.len() != inst.m() {
            return Err(Error::LengthMismatch { expected: inst.m(), got: bits.len() });
        }
        Ok(Self { bits })
    }

    pub fn from_edges(inst: &Instance, edges: &[(Vertex, Vertex)]) -> Result<Self> {
        let mut x = Self::empty(inst);
        for &(u, v) in edges {
            inst.weight(u, v)?;
            x.bits.insert(inst.edges().index(u, v));
        }
        Ok(x)
    }

    /// The star rooted at `r`: every vertex a child of the root.
    pub fn star(inst: &Instance) -> Self {
        let edges: Vec<_> = (1..=inst.n()).map(|v| (ROOT, v)).collect();
        Self::from_edges(inst, &edges).unwrap()
    }

    pub fn random<R: Rng + ?Sized>(inst: &Instance, rng: &mut R) -> Self {
        Self { bits: bits::random_bits(inst.m(), rng) }
    }

    pub fn bits(&self) -> &FixedBitSet {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// `|x|_1`.
    pub fn hamming(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn contains(&self, inst: &Instance, u: Vertex, v: Vertex) -> bool {
        self.bits.contains(inst.edges().index(u, v))
    }

    pub fn set_edge(&mut self, inst: &Instance, u: Vertex, v: Vertex, on: bool) {
        self.bits.set(inst.edges().index(u, v), on);
    }

    pub fn flip(&mut self, i: usize) {
        self.bits.toggle(i);
    }

    /// Flips every position set in `mask`.
    pub fn apply_mask(&mut self, mask: &FixedBitSet) {
        self.bits.symmetric_difference_with(mask);
    }

    /// Chosen edges as `(u, v)` pairs with `u < v`, in canonical order.
    pub fn edge_list(&self, inst: &Instance) -> Vec<(Vertex, Vertex)> {
        self.bits.ones().map(|i| inst.edges().pair(i)).collect()
    }

    /// `c(x)`.
    pub fn cost(&self, inst: &Instance) -> u64 {
        self.bits.ones().map(|i| inst.edge_weight(i) as u64).sum()
    }

    pub fn to_text(&self) -> String {
        format!("edge:{}:{}", self.bits.len(), bits::to_hex(&self.bits))
    }

    pub fn parse_text(inst: &Instance, text: &str) -> Result<Self> {
        let (len, hex) = split_tagged(text, "edge")?;
        Self::from_bits(inst, bits::from_hex(len, hex)?)
    }
}

impl fmt::Debug for EdgeSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EdgeSolution({})", self.to_text())
    }
}

pub(crate) fn split_tagged<'a>(text: &'a str, tag: &str) -> Result<(usize, &'a str)> {
    let mut parts = text.trim().splitn(3, ':');
    match (parts.next(), parts.next(), parts.next()) {
        (Some(t), Some(len), Some(hex)) if t == tag => {
            let len = len.parse().map_err(|_| Error::Solution(format!("bad length {len:?}")))?;
            Ok((len, hex))
        }
        (Some(t), Some(_), Some(_)) => Err(Error::Solution(format!("expected `{tag}` solution, got `{t}`"))),
        _ => Err(Error::Solution(format!("expected `{tag}:<len>:<hex>`"))),
    }
}

/// Standard bit mutation with rate `1/m`.
pub fn mutate_edge<R: Rng + ?Sized>(x: &EdgeSolution, rng: &mut R) -> EdgeSolution {
    let mut y = x.clone();
    bits::standard_bit_mutation(&mut y.bits, rng);
    y
}

/// Metrics of `G(x)`. `dist[v]` is the hop distance from the root, `n + 1`
/// for vertices outside the root's component; `dist[0] = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeMetrics {
    pub hamming: usize,
    pub cost: u64,
    pub n_cc: usize,
    pub dist: Vec<usize>,
}

impl EdgeMetrics {
    pub fn n(&self) -> usize {
        self.dist.len() - 1
    }

    /// `N_{d>i}(x)`: non-root vertices farther than `i` hops from the root.
    pub fn n_d_gt(&self, i: usize) -> usize {
        self.dist[1..].iter().filter(|&&d| d > i).count()
    }

    /// `N_{n>=d>2}(x)`: vertices of the root's component beyond distance 2.
    pub fn n_mid(&self) -> usize {
        let n = self.n();
        self.dist[1..].iter().filter(|&&d| d > 2 && d <= n).count()
    }

    pub fn is_feasible(&self) -> bool {
        self.hamming == self.n() && self.n_d_gt(2) == 0
    }
}

/// Compressed adjacency of `G(x)` plus BFS buffers, reusable across
/// evaluations to avoid reallocating in the search loops.
#[derive(Clone, Debug, Default)]
pub struct GraphScratch {
    offsets: Vec<usize>,
    targets: Vec<Vertex>,
    pub(crate) dist: Vec<usize>,
    queue: Vec<Vertex>,
    seen: Vec<bool>,
    n: usize,
}

/// Summary of one BFS pass, without the per-vertex distances.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Summary {
    pub hamming: usize,
    pub cost: u64,
    pub n_cc: usize,
    /// `N_{d>2}`.
    pub n_far: usize,
    /// `N_{d>n}`, vertices outside the root component.
    pub n_unreached: usize,
}

impl Summary {
    pub fn n_mid(&self) -> usize {
        self.n_far - self.n_unreached
    }
}

impl GraphScratch {
    pub fn new() -> Self {
        Self::default()
    }

    /// Rebuilds the adjacency for `x` and runs BFS from the root.
    pub fn load(&mut self, inst: &Instance, x: &EdgeSolution) -> Result<Summary> {
        if x.len() != inst.m() {
            return Err(Error::LengthMismatch { expected: inst.m(), got: x.len() });
        }
        Ok(self.load_bits(inst, &x.bits))
    }

    pub(crate) fn load_bits(&mut self, inst: &Instance, bits: &FixedBitSet) -> Summary {
        let n = inst.n();
        self.n = n;
        self.offsets.clear();
        self.offsets.resize(n + 2, 0);
        let mut hamming = 0;
        let mut cost = 0u64;
        for i in bits.ones() {
            let (u, v) = inst.edges().pair(i);
            self.offsets[u + 1] += 1;
            self.offsets[v + 1] += 1;
            hamming += 1;
            cost += inst.edge_weight(i) as u64;
        }
        for v in 0..=n {
            self.offsets[v + 1] += self.offsets[v];
        }
        self.targets.clear();
        self.targets.resize(2 * hamming, 0);
        // reuse `queue` as a fill cursor
        self.queue.clear();
        self.queue.extend_from_slice(&self.offsets[..=n]);
        for i in bits.ones() {
            let (u, v) = inst.edges().pair(i);
            self.targets[self.queue[u]] = v;
            self.queue[u] += 1;
            self.targets[self.queue[v]] = u;
            self.queue[v] += 1;
        }

        self.dist.clear();
        self.dist.resize(n + 1, n + 1);
        self.seen.clear();
        self.seen.resize(n + 1, false);
        self.dist[ROOT] = 0;
        self.bfs_from(ROOT, true);
        let reached = self.queue.len();
        let mut n_cc = 1;
        for s in 1..=n {
            if !self.seen[s] {
                n_cc += 1;
                self.bfs_from(s, false);
            }
        }
        let n_far = self.dist[1..].iter().filter(|&&d| d > 2).count();
        Summary { hamming, cost, n_cc, n_far, n_unreached: n + 1 - reached }
    }

    fn bfs_from(&mut self, s: Vertex, record: bool) {
        self.queue.clear();
        self.queue.push(s);
        self.seen[s] = true;
        let mut head = 0;
        while head < self.queue.len() {
            let u = self.queue[head];
            head += 1;
            for k in self.offsets[u]..self.offsets[u + 1] {
                let w = self.targets[k];
                if !self.seen[w] {
                    self.seen[w] = true;
                    if record {
                        self.dist[w] = self.dist[u] + 1;
                    }
                    self.queue.push(w);
                }
            }
        }
    }

    #[inline]
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn dist(&self) -> &[usize] {
        &self.dist
    }

    pub fn metrics(&mut self, inst: &Instance, x: &EdgeSolution) -> Result<EdgeMetrics> {
        let s = self.load(inst, x)?;
        Ok(EdgeMetrics { hamming: s.hamming, cost: s.cost, n_cc: s.n_cc, dist: self.dist.clone() })
    }

    /// Exact `|V_d(x)|` on the currently loaded graph.
    pub(crate) fn min_cover_loaded(&self, budget: u64) -> Result<usize> {
        let n = self.n;
        let far: Vec<Vertex> = (1..=n).filter(|&v| self.dist[v] > 2 && self.dist[v] <= n).collect();
        crate::cover::min_cover(&far, |v| self.neighbors(v), budget)
    }
}

pub fn metrics(inst: &Instance, x: &EdgeSolution) -> Result<EdgeMetrics> {
    GraphScratch::new().metrics(inst, x)
}

/// `|x|_1 = n` and every vertex within two hops of the root.
pub fn is_feasible(inst: &Instance, x: &EdgeSolution) -> Result<bool> {
    let s = GraphScratch::new().load(inst, x)?;
    Ok(s.hamming == inst.n() && s.n_far == 0)
}

/// Search-node budget for the exact covering search behind `|V_d(x)|`.
pub const DEFAULT_COVER_BUDGET: u64 = 5_000_000;

/// Exact `|V_d(x)|`: the fewest root attachments that bring every vertex of
/// the root component within two hops.
pub fn deficiency_set_size(inst: &Instance, x: &EdgeSolution) -> Result<usize> {
    deficiency_set_size_with_budget(inst, x, DEFAULT_COVER_BUDGET)
}

pub fn deficiency_set_size_with_budget(inst: &Instance, x: &EdgeSolution, budget: u64) -> Result<usize> {
    let mut g = GraphScratch::new();
    g.load(inst, x)?;
    g.min_cover_loaded(budget)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DeficiencyClass {
    Zero,
    One,
    Many,
}

/// Decides `f^1_{M2}` membership in {0}, {1} or beyond by trying every single
/// root attachment, the way the GSEMO-2 analysis describes it.
pub fn deficiency_class(inst: &Instance, x: &EdgeSolution) -> Result<DeficiencyClass> {
    Ok(match single_attachment(inst, x)? {
        Attachment::None => DeficiencyClass::Zero,
        Attachment::Fix(_) => DeficiencyClass::One,
        Attachment::Impossible => DeficiencyClass::Many,
    })
}

pub(crate) enum Attachment {
    None,
    Fix(Vertex),
    Impossible,
}

/// Lowest-index vertex `v`, not adjacent to the root, whose attachment
/// `r-v` clears every in-component vertex beyond distance 2.
pub(crate) fn single_attachment(inst: &Instance, x: &EdgeSolution) -> Result<Attachment> {
    let mut g = GraphScratch::new();
    let s = g.load(inst, x)?;
    if s.n_cc == 1 && s.n_mid() == 0 {
        return Ok(Attachment::None);
    }
    let mut trial = x.bits.clone();
    for v in 1..=inst.n() {
        let i = inst.edges().index(ROOT, v);
        if x.bits.contains(i) {
            continue;
        }
        trial.insert(i);
        let t = g.load_bits(inst, &trial);
        trial.set(i, false);
        if t.n_mid() == 0 {
            return Ok(Attachment::Fix(v));
        }
    }
    Ok(Attachment::Impossible)
}

/// Edges that can each be removed alone from a graph with cycles while
/// keeping the component count and `N_{d>2}` and strictly lowering the cost.
/// Returns exactly `N_cc + |x|_1 - n - 1` edge indices, ascending.
pub fn removable_cycle_edges(inst: &Instance, x: &EdgeSolution) -> Result<Vec<usize>> {
    let n = inst.n();
    let mut g = GraphScratch::new();
    let s = g.load(inst, x)?;
    if s.n_cc + s.hamming <= n + 1 {
        return Err(Error::Precondition(format!("G(x) is acyclic (N_cc {} + |x|_1 {} <= n + 1)", s.n_cc, s.hamming)));
    }
    let dist = g.dist.clone();
    // lowest-index predecessor on a shortest path to the root
    let parent: Vec<Option<Vertex>> = (0..=n)
        .map(|v| {
            if v == ROOT || dist[v] > n {
                None
            } else {
                g.neighbors(v).iter().copied().filter(|&w| dist[w] + 1 == dist[v]).min()
            }
        })
        .collect();

    let target = s.n_cc + s.hamming - n - 1;
    let mut chosen = FixedBitSet::with_capacity(inst.m());
    while chosen.count_ones(..) < target {
        let cycle = find_cycle(inst, &x.bits, &chosen, n).expect("edges remain beyond a spanning forest");
        let e = pick_cycle_edge(inst, &cycle, &dist, &parent);
        chosen.insert(e);
    }
    Ok(chosen.ones().collect())
}

/// First cycle closed when adding the edges of `bits \ skip` in index order
/// to a growing forest, as a cyclic vertex sequence.
fn find_cycle(inst: &Instance, bits: &FixedBitSet, skip: &FixedBitSet, n: usize) -> Option<Vec<Vertex>> {
    let mut forest: Vec<Vec<Vertex>> = vec![Vec::new(); n + 1];
    let mut root: Vec<Vertex> = (0..=n).collect();
    fn find(root: &mut [Vertex], mut v: Vertex) -> Vertex {
        while root[v] != v {
            root[v] = root[root[v]];
            v = root[v];
        }
        v
    }
    for i in bits.ones().filter(|&i| !skip.contains(i)) {
        let (a, b) = inst.edges().pair(i);
        let (ra, rb) = (find(&mut root, a), find(&mut root, b));
        if ra != rb {
            root[ra] = rb;
            forest[a].push(b);
            forest[b].push(a);
            continue;
        }
        // path a -> b in the forest, then the closing edge (b, a)
        let mut prev = vec![usize::MAX; n + 1];
        prev[a] = a;
        let mut queue = std::collections::VecDeque::from([a]);
        while let Some(u) = queue.pop_front() {
            if u == b {
                break;
            }
            for &w in &forest[u] {
                if prev[w] == usize::MAX {
                    prev[w] = u;
                    queue.push_back(w);
                }
            }
        }
        let mut path = vec![b];
        let mut cur = b;
        while cur != a {
            cur = prev[cur];
            path.push(cur);
        }
        return Some(path);
    }
    None
}

fn pick_cycle_edge(inst: &Instance, cycle: &[Vertex], dist: &[usize], parent: &[Option<Vertex>]) -> usize {
    let n = inst.n();
    let k = cycle.len();
    let edge_at = |j: usize| inst.edges().index(cycle[j], cycle[(j + 1) % k]);
    if cycle.iter().all(|&v| dist[v] > n) {
        return (0..k).map(edge_at).min().unwrap();
    }
    if cycle.iter().all(|&v| dist[v] <= 1) {
        return (0..k)
            .filter(|&j| cycle[j] != ROOT && cycle[(j + 1) % k] != ROOT)
            .map(edge_at)
            .min()
            .expect("a cycle has an edge avoiding the root");
    }
    let (j, v) = cycle.iter().copied().enumerate().filter(|&(_, v)| dist[v] >= 2).min_by_key(|&(_, v)| v).unwrap();
    let mut on_path = vec![false; n + 1];
    let mut cur = Some(v);
    while let Some(u) = cur {
        on_path[u] = true;
        cur = parent[u];
    }
    let v1 = [cycle[(j + k - 1) % k], cycle[(j + 1) % k]]
        .into_iter()
        .filter(|&w| !on_path[w])
        .min()
        .expect("a cycle vertex has a cycle neighbour off its shortest path");
    inst.edges().index(v, v1)
}
