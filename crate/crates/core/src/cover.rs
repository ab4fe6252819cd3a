//! Exact minimum covering behind `|V_d(x)|`: choose the fewest vertices `D`
//! with every far vertex in `D` or adjacent to `D`. Branch and bound with a
//! greedy incumbent and a `remaining / best-coverage` lower bound.

use crate::error::{Error, Result};
use crate::graph::{Vertex, ROOT};

type Mask = Vec<u64>;

fn words(k: usize) -> usize {
    k.div_ceil(64)
}

fn count(mask: &[u64]) -> usize {
    mask.iter().map(|w| w.count_ones() as usize).sum()
}

fn overlap(a: &[u64], b: &[u64]) -> usize {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as usize).sum()
}

fn subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

struct Search<'a> {
    masks: &'a [Mask],
    covering: &'a [Vec<usize>],
    best: usize,
    nodes: u64,
    budget: u64,
}

impl Search<'_> {
    fn run(&mut self, uncovered: &Mask, depth: usize) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::CoverBudgetExceeded(self.budget));
        }
        let left = count(uncovered);
        if left == 0 {
            self.best = self.best.min(depth);
            return Ok(());
        }
        let widest = self.masks.iter().map(|m| overlap(m, uncovered)).max().unwrap_or(0);
        if widest == 0 || depth + left.div_ceil(widest) >= self.best {
            return Ok(());
        }
        // branch on the uncovered vertex with the fewest candidates
        let target = (0..self.covering.len())
            .filter(|&u| uncovered[u / 64] >> (u % 64) & 1 == 1)
            .min_by_key(|&u| self.covering[u].len())
            .unwrap();
        let mut options: Vec<(usize, usize)> =
            self.covering[target].iter().map(|&c| (overlap(&self.masks[c], uncovered), c)).collect();
        options.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        for (_, c) in options {
            let next: Mask = uncovered.iter().zip(&self.masks[c]).map(|(u, m)| u & !m).collect();
            self.run(&next, depth + 1)?;
        }
        Ok(())
    }
}

/// Size of a minimum `D` with `far ⊆ D ∪ N(D)`. Candidates are the far
/// vertices and their neighbours other than the root.
pub(crate) fn min_cover<'g>(far: &[Vertex], neighbors: impl Fn(Vertex) -> &'g [Vertex], budget: u64) -> Result<usize> {
    let k = far.len();
    if k == 0 {
        return Ok(0);
    }
    let slot = |v: Vertex| far.iter().position(|&u| u == v);

    let mut candidates: Vec<Vertex> = far
        .iter()
        .flat_map(|&u| std::iter::once(u).chain(neighbors(u).iter().copied()))
        .filter(|&v| v != ROOT)
        .collect();
    candidates.sort_unstable();
    candidates.dedup();

    let mut masks: Vec<Mask> = candidates
        .iter()
        .map(|&c| {
            let mut m = vec![0u64; words(k)];
            for v in std::iter::once(c).chain(neighbors(c).iter().copied()) {
                if let Some(s) = slot(v) {
                    m[s / 64] |= 1 << (s % 64);
                }
            }
            m
        })
        .collect();

    // drop candidates whose coverage is contained in another's
    let mut keep = vec![true; masks.len()];
    for i in 0..masks.len() {
        for j in 0..masks.len() {
            if i != j && keep[j] && subset(&masks[i], &masks[j]) && (masks[i] != masks[j] || j < i) {
                keep[i] = false;
                break;
            }
        }
    }
    let mut idx = 0;
    masks.retain(|_| {
        idx += 1;
        keep[idx - 1]
    });

    let covering: Vec<Vec<usize>> =
        (0..k).map(|s| (0..masks.len()).filter(|&c| masks[c][s / 64] >> (s % 64) & 1 == 1).collect()).collect();

    let full: Mask = (0..words(k)).map(|w| if (w + 1) * 64 <= k { u64::MAX } else { (1u64 << (k % 64)) - 1 }).collect();

    let mut greedy = 0;
    let mut open = full.clone();
    while count(&open) > 0 {
        let best = masks.iter().max_by_key(|m| overlap(m, &open)).unwrap();
        open = open.iter().zip(best).map(|(u, m)| u & !m).collect();
        greedy += 1;
    }

    let mut search = Search { masks: &masks, covering: &covering, best: greedy, nodes: 0, budget };
    search.run(&full, 0)?;
    Ok(search.best)
}
