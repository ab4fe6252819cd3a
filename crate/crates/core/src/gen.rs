//! Seeded instance families: i.i.d. random weights and planted gadgets for
//! the certifier.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::certifier::{self, Move};
use crate::edge::EdgeSolution;
use crate::error::{Error, Result};
use crate::graph::{Instance, Vertex, Weight, ROOT};
use crate::oracle;
use crate::tree::HopTree;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Every edge, root edges included, gets weight 1 with probability `p1`.
pub fn random_instance(n: usize, p1: f64, seed: u64) -> Result<Instance> {
    if !(0.0..=1.0).contains(&p1) {
        return Err(Error::Config(format!("p1 must lie in [0, 1], got {p1}")));
    }
    let mut rng = rng_from_seed(seed);
    Instance::from_fn(n, |_, _| if rng.random_bool(p1) { 1 } else { 2 })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PlantKind {
    /// Operation 1 to 7.
    Op(u8),
    /// `hubs` weight-1 stars; everything else, root edges included, weighs 2.
    Cluster { hubs: usize },
}

impl PlantKind {
    /// Smallest `n` the gadget fits in.
    pub fn min_n(self) -> usize {
        match self {
            PlantKind::Op(1) | PlantKind::Op(3) => 2,
            PlantKind::Op(2) => 3,
            PlantKind::Op(4) => 4,
            PlantKind::Op(_) => 6,
            PlantKind::Cluster { hubs } => 2 * hubs.max(1),
        }
    }
}

impl fmt::Display for PlantKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlantKind::Op(k) => write!(f, "op{k}"),
            PlantKind::Cluster { hubs } => write!(f, "cluster{hubs}"),
        }
    }
}

impl FromStr for PlantKind {
    type Err = Error;

    /// `op1` … `op7`, or `cluster<h>` (`cluster` alone means two hubs).
    fn from_str(s: &str) -> Result<Self> {
        if let Some(k) = s.strip_prefix("op") {
            return match k.parse::<u8>() {
                Ok(k @ 1..=7) => Ok(PlantKind::Op(k)),
                _ => Err(Error::Config(format!("unknown operation `{s}`"))),
            };
        }
        if let Some(h) = s.strip_prefix("cluster") {
            let hubs =
                if h.is_empty() { 2 } else { h.parse().map_err(|_| Error::Config(format!("bad hub count `{h}`")))? };
            return Ok(PlantKind::Cluster { hubs });
        }
        Err(Error::Config(format!("unknown plant kind `{s}`")))
    }
}

#[derive(Clone, Debug)]
pub struct Plant {
    pub instance: Instance,
    /// Feasible tree the gadget sits in; for `cluster`, the hub tree.
    pub tree: HopTree,
    /// The move the detector must report. For Operation 7 it applies to `x3`.
    pub witness: Option<Move>,
    /// Operation 7 only: the depth-3 solution and its feasible partner.
    pub x3: Option<EdgeSolution>,
    pub partner: Option<EdgeSolution>,
}

/// Builds the weights and tree in unpermuted labels, then relabels.
struct Builder {
    n: usize,
    w: Vec<Vec<Weight>>,
    parent: Vec<Vertex>,
    next: Vertex,
}

impl Builder {
    fn new(n: usize) -> Self {
        Self { n, w: vec![vec![2; n + 1]; n + 1], parent: vec![ROOT; n + 1], next: 1 }
    }

    fn set(&mut self, u: Vertex, v: Vertex, w: Weight) {
        self.w[u][v] = w;
        self.w[v][u] = w;
    }

    fn fresh(&mut self) -> Vertex {
        let v = self.next;
        self.next += 1;
        v
    }

    fn left(&self) -> usize {
        self.n + 1 - self.next
    }

    fn child(&mut self, root_w: Weight) -> Vertex {
        let v = self.fresh();
        self.set(v, ROOT, root_w);
        v
    }

    fn grandchild(&mut self, p: Vertex, parent_w: Weight, root_w: Weight) -> Vertex {
        let v = self.fresh();
        self.parent[v] = p;
        self.set(v, p, parent_w);
        self.set(v, ROOT, root_w);
        v
    }

    /// Leaf children with a random root weight, or a child with one grandchild
    /// hanging off a weight-1 edge. None of them matches any operation.
    fn fill<R: Rng>(&mut self, rng: &mut R) {
        while self.left() > 0 {
            if self.left() >= 2 && rng.random_bool(0.3) {
                let c = self.child(rng.random_range(1..=2));
                self.grandchild(c, 1, 2);
            } else {
                self.child(rng.random_range(1..=2));
            }
        }
    }

    fn finish<R: Rng>(self, rng: &mut R) -> Result<(Instance, HopTree, Vec<Vertex>)> {
        let mut label: Vec<Vertex> = (1..=self.n).collect();
        label.shuffle(rng);
        label.insert(0, ROOT);
        let mut inverse = vec![0; self.n + 1];
        for (old, &new) in label.iter().enumerate() {
            inverse[new] = old;
        }
        let w = &self.w;
        let inst = Instance::from_fn(self.n, |u, v| w[inverse[u]][inverse[v]])?;
        let mut parent = vec![ROOT; self.n + 1];
        for old in 1..=self.n {
            parent[label[old]] = label[self.parent[old]];
        }
        Ok((inst, HopTree::from_parents(parent)?, label))
    }
}

fn plant_error(kind: PlantKind, what: impl fmt::Display) -> Error {
    Error::Plant(format!("{kind}: {what}"))
}

/// An instance with a feasible tree on which the requested operation applies
/// at a single known tuple. Vertex labels are shuffled by `seed`. The result
/// is checked against the detectors and an error is returned if it does not
/// hold up.
///
/// Operations 6 and 7 reuse the Operation 5 gadget: any tree matching the
/// Operation 6 pattern also matches one of Operations 1, 4 or 5.
pub fn planted_instance(kind: PlantKind, n: usize, seed: u64) -> Result<Plant> {
    if let PlantKind::Op(k) = kind {
        if !(1..=7).contains(&k) {
            return Err(Error::Config(format!("no operation {k}")));
        }
    }
    if let PlantKind::Cluster { hubs: 0 } = kind {
        return Err(Error::Config("cluster needs at least one hub".into()));
    }
    if n < kind.min_n() {
        return Err(Error::Config(format!("{kind} needs n >= {}, got {n}", kind.min_n())));
    }
    let mut rng = rng_from_seed(seed);
    let mut b = Builder::new(n);
    let rng = &mut rng;
    // gadget roles in unpermuted labels: (op, witness, removed, added)
    let mut roles: (Vec<Vertex>, Vec<(Vertex, Vertex)>, Vec<(Vertex, Vertex)>) = Default::default();
    match kind {
        PlantKind::Op(1) => {
            let p = b.child(1);
            let v = b.grandchild(p, 2, 1);
            roles = (vec![v], vec![(v, p)], vec![(v, ROOT)]);
        }
        PlantKind::Op(2) => {
            let a = b.child(1);
            let c = b.child(1);
            let v = b.grandchild(c, 2, 2);
            b.set(v, a, 1);
            roles = (vec![a, v], vec![(v, c)], vec![(v, a)]);
        }
        PlantKind::Op(3) => {
            let a = b.child(2);
            let c = b.child(1);
            b.set(a, c, 1);
            roles = (vec![a, c], vec![(a, ROOT)], vec![(a, c)]);
        }
        PlantKind::Op(4) => {
            let p1 = b.child(rng.random_range(1..=2));
            let v1 = b.grandchild(p1, 1, 1);
            let v2 = if rng.random_bool(0.5) {
                b.child(2)
            } else {
                let p2 = b.child(rng.random_range(1..=2));
                b.grandchild(p2, 2, 2)
            };
            b.set(v1, v2, 1);
            let p2 = b.parent[v2];
            roles = (vec![v1, v2], vec![(v1, p1), (v2, p2)], vec![(v1, ROOT), (v2, v1)]);
        }
        PlantKind::Op(_) => {
            let p1 = b.child(rng.random_range(1..=2));
            let v1 = b.grandchild(p1, 1, 2);
            let mut pair = Vec::new();
            for _ in 0..2 {
                let v = if rng.random_bool(0.5) {
                    b.child(2)
                } else {
                    let p = b.child(rng.random_range(1..=2));
                    b.grandchild(p, 2, 2)
                };
                b.set(v1, v, 1);
                pair.push(v);
            }
            let (v2, v3) = (pair[0], pair[1]);
            let (p2, p3) = (b.parent[v2], b.parent[v3]);
            roles = (vec![v1, v2, v3], vec![(v1, p1), (v2, p2), (v3, p3)], vec![(v1, ROOT), (v2, v1), (v3, v1)]);
        }
        PlantKind::Cluster { hubs } => {
            let hub_ids: Vec<Vertex> = (0..hubs).map(|_| b.child(2)).collect();
            for i in 0..n - hubs {
                // every hub gets at least one spoke
                let h = if i < hubs { hub_ids[i] } else { hub_ids[rng.random_range(0..hubs)] };
                b.grandchild(h, 1, 2);
            }
        }
    }
    b.fill(rng);
    let (instance, tree, label) = b.finish(rng)?;
    let relabel = |edges: &[(Vertex, Vertex)]| edges.iter().map(|&(a, c)| (label[a], label[c])).collect::<Vec<_>>();

    let mut plant = Plant { instance, tree, witness: None, x3: None, partner: None };
    match kind {
        PlantKind::Cluster { hubs } => {
            let opt = oracle::optimum(&plant.instance).map(|o| o.cost).ok();
            let hub_cost = plant.tree.cost(&plant.instance);
            if hub_cost != (n + hubs) as u64 || opt.is_some_and(|o| o != hub_cost) {
                return Err(plant_error(kind, format!("hub tree costs {hub_cost}, oracle says {opt:?}")));
            }
        }
        PlantKind::Op(k) => {
            let (witness, removed, added) = roles;
            let witness: Vec<Vertex> = witness.iter().map(|&v| label[v]).collect();
            let (removed, added) = (relabel(&removed), relabel(&added));
            let inst = &plant.instance;
            let t = &plant.tree;
            let mut expected = match k {
                // Operation 6 leaves v1 in place and moves only v2, v3
                6 | 7 => sorted_pair(expected_move(inst, 6, witness, removed[1..].to_vec(), added[1..].to_vec())),
                5 => sorted_pair(expected_move(inst, 5, witness, removed, added)),
                _ => expected_move(inst, k, witness, removed, added),
            };
            let found = match k {
                1..=5 => {
                    for j in (1..=5u8).filter(|&j| j != k) {
                        if let Some(other) = detect(inst, t, j)? {
                            return Err(plant_error(kind, format!("operation {j} also applies: {other}")));
                        }
                    }
                    detect(inst, t, k)?
                }
                _ => {
                    for j in 1..=4 {
                        if let Some(other) = detect(inst, t, j)? {
                            return Err(plant_error(kind, format!("operation {j} also applies: {other}")));
                        }
                    }
                    certifier::find_op6(inst, t, None)?
                }
            };
            if found.as_ref() != Some(&expected) {
                return Err(plant_error(kind, format!("expected {expected}, detector found {found:?}")));
            }
            if k == 7 {
                let x0 = t.to_edge_solution(inst);
                let x3 = expected.apply_to_edges(inst, &x0);
                let v1 = expected.witness[0];
                let p1 = t.parent(v1);
                let op7 = Move {
                    op: 7,
                    witness: vec![v1],
                    removed: vec![(v1, p1)],
                    added: vec![(v1, ROOT)],
                    cost_delta: inst.w(v1, ROOT) as i64 - inst.w(v1, p1) as i64,
                };
                let found = certifier::find_op7(inst, &x3, &x0)?;
                if found.as_ref() != Some(&op7) {
                    return Err(plant_error(kind, format!("expected {op7}, detector found {found:?}")));
                }
                plant.x3 = Some(x3);
                plant.partner = Some(x0);
                expected = op7;
            }
            plant.witness = Some(expected);
        }
    }
    Ok(plant)
}

fn detect(inst: &Instance, t: &HopTree, op: u8) -> Result<Option<Move>> {
    match op {
        1 => certifier::find_op1(inst, t),
        2 => certifier::find_op2(inst, t),
        3 => certifier::find_op3(inst, t),
        4 => certifier::find_op4(inst, t),
        _ => certifier::find_op5(inst, t),
    }
}

fn expected_move(
    inst: &Instance,
    op: u8,
    witness: Vec<Vertex>,
    removed: Vec<(Vertex, Vertex)>,
    added: Vec<(Vertex, Vertex)>,
) -> Move {
    let sum = |e: &[(Vertex, Vertex)]| e.iter().map(|&(a, b)| inst.w(a, b) as i64).sum::<i64>();
    let cost_delta = sum(&added) - sum(&removed);
    Move { op, witness, removed, added, cost_delta }
}

/// Detectors report `v2 < v3`; reorder the planted pair to match.
fn sorted_pair(mut mv: Move) -> Move {
    if mv.witness[1] > mv.witness[2] {
        mv.witness.swap(1, 2);
        let k = mv.removed.len();
        mv.removed.swap(k - 2, k - 1);
        mv.added.swap(k - 2, k - 1);
    }
    mv
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edge;

    #[test]
    fn extreme_p1_and_determinism() {
        assert!(random_instance(6, 1.0, 3).unwrap().weights().iter().all(|&w| w == 1));
        assert!(random_instance(6, 0.0, 3).unwrap().weights().iter().all(|&w| w == 2));
        assert_eq!(random_instance(8, 0.5, 7).unwrap(), random_instance(8, 0.5, 7).unwrap());
        assert_ne!(random_instance(8, 0.5, 7).unwrap(), random_instance(8, 0.5, 8).unwrap());
        assert!(random_instance(4, 1.5, 0).is_err());
        assert!(random_instance(4, f64::NAN, 0).is_err());
    }

    #[test]
    fn p1_is_respected_on_average() {
        let inst = random_instance(60, 0.3, 11).unwrap();
        let ones = inst.weights().iter().filter(|&&w| w == 1).count() as f64;
        let frac = ones / inst.m() as f64;
        assert!((frac - 0.3).abs() < 0.03, "{frac}");
    }

    #[test]
    fn every_plant_builds() {
        for k in 1..=7 {
            for seed in 0..40 {
                let kind = PlantKind::Op(k);
                for n in [kind.min_n(), 9, 13] {
                    let p = planted_instance(kind, n, seed).unwrap_or_else(|e| panic!("{kind} n={n} seed={seed}: {e}"));
                    assert_eq!(p.witness.as_ref().unwrap().op, k);
                    assert!(edge::is_feasible(&p.instance, &p.tree.to_edge_solution(&p.instance)).unwrap());
                }
            }
        }
    }

    #[test]
    fn cluster_optimum() {
        let p = planted_instance(PlantKind::Cluster { hubs: 2 }, 12, 5).unwrap();
        assert_eq!(oracle::optimum(&p.instance).unwrap().cost, 14);
        assert_eq!(p.tree.cost(&p.instance), 14);
        assert_eq!(HopTree::star(12).cost(&p.instance), 24);
    }

    #[test]
    fn bad_params() {
        assert!(planted_instance(PlantKind::Op(5), 5, 0).is_err());
        assert!(planted_instance(PlantKind::Op(8), 9, 0).is_err());
        assert!(planted_instance(PlantKind::Cluster { hubs: 0 }, 9, 0).is_err());
        assert!(planted_instance(PlantKind::Cluster { hubs: 3 }, 5, 0).is_err());
        assert_eq!("op4".parse::<PlantKind>().unwrap(), PlantKind::Op(4));
        assert_eq!("cluster3".parse::<PlantKind>().unwrap(), PlantKind::Cluster { hubs: 3 });
        assert!("op0".parse::<PlantKind>().is_err());
    }
}
