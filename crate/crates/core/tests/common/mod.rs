#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use twohop::edge::EdgeSolution;
use twohop::{HopTree, Instance, Vertex, ROOT};

/// Random child set, every other vertex under a random child.
pub fn random_hop_tree<R: Rng>(n: usize, rng: &mut R) -> HopTree {
    let mut verts: Vec<Vertex> = (1..=n).collect();
    verts.shuffle(rng);
    let k = rng.random_range(1..=n);
    let children = &verts[..k];
    let mut parent = vec![ROOT; n + 1];
    for &v in &verts[k..] {
        parent[v] = children[rng.random_range(0..k)];
    }
    HopTree::from_parents(parent).unwrap()
}

/// Random recursive tree on `0..=n` plus each other edge with probability `extra`.
pub fn random_connected<R: Rng>(inst: &Instance, extra: f64, rng: &mut R) -> EdgeSolution {
    let n = inst.n();
    let mut order: Vec<Vertex> = (1..=n).collect();
    order.shuffle(rng);
    let mut placed = vec![ROOT];
    let mut x = EdgeSolution::empty(inst);
    for v in order {
        let p = placed[rng.random_range(0..placed.len())];
        x.set_edge(inst, p, v, true);
        placed.push(v);
    }
    for i in 0..inst.m() {
        if !x.bits().contains(i) && rng.random_bool(extra) {
            x.flip(i);
        }
    }
    x
}

pub fn random_edges<R: Rng>(inst: &Instance, density: f64, rng: &mut R) -> EdgeSolution {
    let mut x = EdgeSolution::empty(inst);
    for i in 0..inst.m() {
        if rng.random_bool(density) {
            x.flip(i);
        }
    }
    x
}
