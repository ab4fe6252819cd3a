//! Exact ground truth for small instances. Every routine here refuses
//! inputs above its enumeration bound instead of approximating.

use rayon::prelude::*;

use crate::edge::{EdgeMetrics, EdgeSolution};
use crate::error::{Error, Result};
use crate::graph::{Instance, Vertex, ROOT};

pub const DEFAULT_ENUMERATION_BOUND: usize = 24;

/// Bound for [`brute_vd`].
pub const VD_BOUND: usize = 14;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Optimum {
    pub cost: u64,
    /// Lexicographically least optimal child set of the root.
    pub children: Vec<Vertex>,
}

pub fn optimum(inst: &Instance) -> Result<Optimum> {
    optimum_with_bound(inst, DEFAULT_ENUMERATION_BOUND)
}

/// Minimum over nonempty child sets `S` of
/// `sum_{v in S} W(r,v) + sum_{u not in S} min_{v in S} W(u,v)`.
pub fn optimum_with_bound(inst: &Instance, bound: usize) -> Result<Optimum> {
    let n = inst.n();
    if n > bound || n > 63 {
        return Err(Error::OracleBound { n, bound: bound.min(63) });
    }
    // bit v-1 stands for vertex v
    let heavy_root: u64 = (1..=n).filter(|&v| inst.w(ROOT, v) == 2).fold(0, |acc, v| acc | 1 << (v - 1));
    let light: Vec<u64> = (1..=n)
        .map(|u| (1..=n).filter(|&v| v != u && inst.w(u, v) == 1).fold(0, |acc, v| acc | 1 << (v - 1)))
        .collect();
    let full = (1u64 << n) - 1;
    let cost_of = |s: u64| -> u64 {
        let mut c = n as u64 + (s & heavy_root).count_ones() as u64;
        let mut rest = full & !s;
        while rest != 0 {
            let u = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if light[u] & s == 0 {
                c += 1;
            }
        }
        c
    };

    let chunk_bits = n.min(10);
    let chunks = 1u64 << (n - chunk_bits);
    let span = 1u64 << chunk_bits;
    let (cost, set) = (0..chunks)
        .into_par_iter()
        .map(|hi| {
            let mut best: Option<(u64, u64)> = None;
            for lo in 0..span {
                let s = hi * span + lo;
                if s == 0 {
                    continue;
                }
                let c = cost_of(s);
                best = Some(match best {
                    Some(b) if !better(c, s, b) => b,
                    _ => (c, s),
                });
            }
            best
        })
        .reduce(
            || None,
            |a, b| match (a, b) {
                (Some(a), Some(b)) => Some(if better(b.0, b.1, a) { b } else { a }),
                (a, None) => a,
                (None, b) => b,
            },
        )
        .expect("n >= 1 gives a nonempty child set");
    let children = (1..=n).filter(|&v| set >> (v - 1) & 1 == 1).collect();
    Ok(Optimum { cost, children })
}

fn better(c: u64, s: u64, (bc, bs): (u64, u64)) -> bool {
    c < bc || (c == bc && lex_less(s, bs))
}

/// Compares the ascending vertex lists of two sets lexicographically.
fn lex_less(a: u64, b: u64) -> bool {
    let diff = a ^ b;
    if diff == 0 {
        return false;
    }
    let d = diff.trailing_zeros();
    if a >> d & 1 == 1 {
        // a holds the smaller element at the first difference unless b ran out
        b >> d != 0
    } else {
        a >> d == 0
    }
}

/// Recomputes every metric with boolean reachability iteration over an
/// adjacency matrix, independent of the BFS path.
pub fn brute_metrics(inst: &Instance, x: &EdgeSolution) -> Result<EdgeMetrics> {
    if x.len() != inst.m() {
        return Err(Error::LengthMismatch { expected: inst.m(), got: x.len() });
    }
    let size = inst.n() + 1;
    let n = inst.n();
    let mut adj = vec![vec![false; size]; size];
    let mut hamming = 0;
    let mut cost = 0u64;
    for i in 0..inst.m() {
        if x.bits().contains(i) {
            let (u, v) = inst.edges().pair(i);
            adj[u][v] = true;
            adj[v][u] = true;
            hamming += 1;
            cost += inst.edge_weight(i) as u64;
        }
    }

    // R_{k+1} = R_k ∪ A R_k, starting from R_0 = {r}
    let mut dist = vec![n + 1; size];
    let mut reach = vec![false; size];
    reach[ROOT] = true;
    dist[ROOT] = 0;
    for k in 1..=n {
        let next: Vec<bool> = (0..size).map(|v| reach[v] || (0..size).any(|u| reach[u] && adj[u][v])).collect();
        for v in 0..size {
            if next[v] && !reach[v] {
                dist[v] = k;
            }
        }
        reach = next;
    }

    // Warshall closure; a component is counted at its lowest vertex
    let mut closure = adj.clone();
    for (v, row) in closure.iter_mut().enumerate() {
        row[v] = true;
    }
    for k in 0..size {
        for i in 0..size {
            if closure[i][k] {
                for j in 0..size {
                    if closure[k][j] {
                        closure[i][j] = true;
                    }
                }
            }
        }
    }
    let n_cc = (0..size).filter(|&v| (0..v).all(|u| !closure[u][v])).count();
    Ok(EdgeMetrics { hamming, cost, n_cc, dist })
}

/// `|V_d(x)|` by trying root-attachment sets `D` in order of size, each
/// checked by a plain BFS on the augmented graph.
pub fn brute_vd(inst: &Instance, x: &EdgeSolution) -> Result<usize> {
    let n = inst.n();
    if n > VD_BOUND {
        return Err(Error::OracleBound { n, bound: VD_BOUND });
    }
    if x.len() != inst.m() {
        return Err(Error::LengthMismatch { expected: inst.m(), got: x.len() });
    }
    let size = n + 1;
    let mut base = vec![vec![false; size]; size];
    for (u, v) in x.edge_list(inst) {
        base[u][v] = true;
        base[v][u] = true;
    }
    let clean = |d: u32| -> bool {
        let mut adj = base.clone();
        for v in 1..=n {
            if d >> (v - 1) & 1 == 1 {
                adj[ROOT][v] = true;
                adj[v][ROOT] = true;
            }
        }
        let mut dist = vec![usize::MAX; size];
        dist[ROOT] = 0;
        let mut frontier = vec![ROOT];
        while let Some(u) = frontier.pop() {
            for v in 0..size {
                if adj[u][v] && dist[u] + 1 < dist[v] {
                    dist[v] = dist[u] + 1;
                    frontier.push(v);
                }
            }
        }
        (1..=n).all(|v| dist[v] == usize::MAX || dist[v] <= 2)
    };
    for k in 0..=n as u32 {
        if (0u32..1 << n).filter(|d| d.count_ones() == k).any(&clean) {
            return Ok(k as usize);
        }
    }
    unreachable!("attaching every vertex clears all distances")
}
