//! Local-search moves on feasible 2-hop trees. If none of Operations 1 to 5
//! applies, the tree costs at most 3/2 of the optimum.
//!
//! Roles used below, always relative to the current tree: a *child* hangs
//! off the root, a *grandchild* hangs off a child, and a *leaf child* is a
//! child without children of its own.

use std::fmt;

use crate::edge::{self, Attachment, EdgeSolution};
use crate::error::{Error, Result};
use crate::fitness;
use crate::graph::{Instance, Vertex, ROOT};
use crate::tree::HopTree;

/// A rewiring: each `(v, p)` in `removed` is the old parent edge of `v`, each
/// `(v, q)` in `added` the new one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Move {
    pub op: u8,
    /// Vertex tuple the operation was matched on, `v1, v2, …`.
    pub witness: Vec<Vertex>,
    pub removed: Vec<(Vertex, Vertex)>,
    pub added: Vec<(Vertex, Vertex)>,
    pub cost_delta: i64,
}

impl Move {
    fn new(
        inst: &Instance,
        op: u8,
        witness: Vec<Vertex>,
        removed: Vec<(Vertex, Vertex)>,
        added: Vec<(Vertex, Vertex)>,
    ) -> Self {
        let sum = |edges: &[(Vertex, Vertex)]| edges.iter().map(|&(a, b)| inst.w(a, b) as i64).sum::<i64>();
        let cost_delta = sum(&added) - sum(&removed);
        Self { op, witness, removed, added, cost_delta }
    }

    pub fn apply_to_edges(&self, inst: &Instance, x: &EdgeSolution) -> EdgeSolution {
        let mut y = x.clone();
        for &(a, b) in &self.removed {
            y.set_edge(inst, a, b, false);
        }
        for &(a, b) in &self.added {
            y.set_edge(inst, a, b, true);
        }
        y
    }

    /// Applies the move to a tree; fails for moves whose result has depth 3.
    pub fn apply_to_tree(&self, t: &HopTree) -> Result<HopTree> {
        let mut parent = t.parents().to_vec();
        for &(v, q) in &self.added {
            parent[v] = q;
        }
        HopTree::from_parents(parent)
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |e: &[(Vertex, Vertex)]| e.iter().map(|(a, b)| format!("{a}-{b}")).collect::<Vec<_>>().join(",");
        let witness: Vec<String> = self.witness.iter().map(|v| v.to_string()).collect();
        write!(
            f,
            "op={} witness={} remove={} add={} delta={}",
            self.op,
            witness.join(","),
            list(&self.removed),
            list(&self.added),
            self.cost_delta
        )
    }
}

/// Grandchild or leaf child: the roles allowed for `v2`, `v3` in Operations 4 to 6.
fn movable(t: &HopTree, v: Vertex) -> bool {
    t.is_grandchild(v) || t.is_leaf_child(v)
}

fn check_tree(inst: &Instance, t: &HopTree) -> Result<()> {
    if t.n() != inst.n() {
        return Err(Error::LengthMismatch { expected: inst.n(), got: t.n() });
    }
    Ok(())
}

/// Grandchild `v1` with `W(v1,p1) = 2` and `W(v1,r) = 1`: move it under the root.
pub fn find_op1(inst: &Instance, t: &HopTree) -> Result<Option<Move>> {
    check_tree(inst, t)?;
    Ok((1..=inst.n())
        .find(|&v| t.is_grandchild(v) && inst.w(v, t.parent(v)) == 2 && inst.w(v, ROOT) == 1)
        .map(|v| Move::new(inst, 1, vec![v], vec![(v, t.parent(v))], vec![(v, ROOT)])))
}

/// Child `v1` and grandchild `v2` (parent `p2 != v1`) with `W(v2,p2) = 2`,
/// `W(v1,v2) = 1`: move `v2` under `v1`.
pub fn find_op2(inst: &Instance, t: &HopTree) -> Result<Option<Move>> {
    check_tree(inst, t)?;
    let n = inst.n();
    for v1 in (1..=n).filter(|&v| t.is_child(v)) {
        for v2 in (1..=n).filter(|&v| t.is_grandchild(v)) {
            let p2 = t.parent(v2);
            if p2 != v1 && inst.w(v2, p2) == 2 && inst.w(v1, v2) == 1 {
                return Ok(Some(Move::new(inst, 2, vec![v1, v2], vec![(v2, p2)], vec![(v2, v1)])));
            }
        }
    }
    Ok(None)
}

/// Leaf child `v1` and another child `v2` with `W(v1,r) = 2 > W(v1,v2) = 1`:
/// move `v1` under `v2`.
pub fn find_op3(inst: &Instance, t: &HopTree) -> Result<Option<Move>> {
    check_tree(inst, t)?;
    let n = inst.n();
    for v1 in (1..=n).filter(|&v| t.is_leaf_child(v) && inst.w(v, ROOT) == 2) {
        for v2 in (1..=n).filter(|&v| v != v1 && t.is_child(v)) {
            if inst.w(v1, v2) == 1 {
                return Ok(Some(Move::new(inst, 3, vec![v1, v2], vec![(v1, ROOT)], vec![(v1, v2)])));
            }
        }
    }
    Ok(None)
}

/// Grandchild `v1` with `W(v1,p1) = W(v1,r)`, and `v2` (grandchild or leaf
/// child) with `W(v2,p2) > W(v1,v2)`: lift `v1` to the root, hang `v2` on it.
pub fn find_op4(inst: &Instance, t: &HopTree) -> Result<Option<Move>> {
    check_tree(inst, t)?;
    let n = inst.n();
    for v1 in (1..=n).filter(|&v| t.is_grandchild(v)) {
        let p1 = t.parent(v1);
        if inst.w(v1, p1) != inst.w(v1, ROOT) {
            continue;
        }
        for v2 in (1..=n).filter(|&v| v != v1 && movable(t, v)) {
            let p2 = t.parent(v2);
            if inst.w(v2, p2) > inst.w(v1, v2) {
                return Ok(Some(Move::new(
                    inst,
                    4,
                    vec![v1, v2],
                    vec![(v1, p1), (v2, p2)],
                    vec![(v1, ROOT), (v2, v1)],
                )));
            }
        }
    }
    Ok(None)
}

/// Grandchild `v1` with `W(v1,p1) = 1 < W(v1,r)` and two vertices `v2 < v3`
/// (each a grandchild or leaf child) with weight-1 edges to `v1` and weight-2
/// parent edges: lift `v1` to the root and hang both on it.
pub fn find_op5(inst: &Instance, t: &HopTree) -> Result<Option<Move>> {
    check_tree(inst, t)?;
    for v1 in (1..=inst.n()).filter(|&v| t.is_grandchild(v)) {
        let p1 = t.parent(v1);
        if inst.w(v1, p1) != 1 || inst.w(v1, ROOT) != 2 {
            continue;
        }
        if let Some((v2, v3)) = pair_for(inst, t, v1) {
            let (p2, p3) = (t.parent(v2), t.parent(v3));
            return Ok(Some(Move::new(
                inst,
                5,
                vec![v1, v2, v3],
                vec![(v1, p1), (v2, p2), (v3, p3)],
                vec![(v1, ROOT), (v2, v1), (v3, v1)],
            )));
        }
    }
    Ok(None)
}

/// Lowest `v2 < v3`, both grandchildren or leaf children other than `v1`,
/// with `W(v1,v2) = W(v1,v3) = 1` and `W(v2,p2) = W(v3,p3) = 2`.
fn pair_for(inst: &Instance, t: &HopTree, v1: Vertex) -> Option<(Vertex, Vertex)> {
    let ok: Vec<Vertex> = (1..=inst.n())
        .filter(|&v| v != v1 && movable(t, v) && inst.w(v1, v) == 1 && inst.w(v, t.parent(v)) == 2)
        .take(2)
        .collect();
    (ok.len() == 2).then(|| (ok[0], ok[1]))
}

/// Operation 6 on a feasible tree: grandchild `v1`, and `v2 < v3` as in
/// Operation 5 but with no condition on `v1`'s own edges. The result hangs
/// `v2`, `v3` under `v1`, has depth 3 and `|V_d| = 1`.
///
/// `partner_f2` is the second objective of the population's other member
/// (the one with first objective 1), if any. The move is withheld when that
/// member already sits at `f^2(t) - 2` or below.
pub fn find_op6(inst: &Instance, t: &HopTree, partner_f2: Option<u64>) -> Result<Option<Move>> {
    check_tree(inst, t)?;
    if let Some(f2) = partner_f2 {
        if f2 + 1 < t.cost(inst) {
            return Ok(None);
        }
    }
    for v1 in (1..=inst.n()).filter(|&v| t.is_grandchild(v)) {
        if let Some((v2, v3)) = pair_for(inst, t, v1) {
            let (p2, p3) = (t.parent(v2), t.parent(v3));
            return Ok(Some(Move::new(inst, 6, vec![v1, v2, v3], vec![(v2, p2), (v3, p3)], vec![(v2, v1), (v3, v1)])));
        }
    }
    Ok(None)
}

/// Operation 7: `x3` is connected and fixable by one root attachment,
/// `partner` is the feasible member of the population. If
/// `f^2(x3) <= f^2(partner) - 2`, swap `v`'s parent edge `[v,p]` for `[v,r]`
/// where `v` is the lowest attachment vertex whose swap yields a feasible tree.
pub fn find_op7(inst: &Instance, x3: &EdgeSolution, partner: &EdgeSolution) -> Result<Option<Move>> {
    if edge::metrics(inst, x3)?.n_cc != 1 {
        return Err(Error::Precondition("x3 must be connected".into()));
    }
    if !edge::is_feasible(inst, partner)? {
        return Err(Error::Precondition("partner must be feasible".into()));
    }
    let Attachment::Fix(first) = edge::single_attachment(inst, x3)? else {
        return Err(Error::Precondition("x3 must have deficiency class One".into()));
    };
    let f2_x3 = fitness::f_m2(inst, x3)?.f2;
    let f2_partner = fitness::f_m2(inst, partner)?.f2;
    if f2_x3 + 2 > f2_partner {
        return Ok(None);
    }
    // the gate forces |x3| = n, so x3 is a spanning tree from here on
    let mut scratch = edge::GraphScratch::new();
    scratch.load(inst, x3)?;
    let dist = scratch.dist().to_vec();
    let parent_of = |scratch: &edge::GraphScratch, v: Vertex| {
        scratch.neighbors(v).iter().copied().find(|&w| dist[w] + 1 == dist[v])
    };
    let parents: Vec<Option<Vertex>> = (0..=inst.n()).map(|v| parent_of(&scratch, v)).collect();
    for v in first..=inst.n() {
        if x3.contains(inst, ROOT, v) {
            continue;
        }
        let mut fixed = x3.clone();
        fixed.set_edge(inst, ROOT, v, true);
        if scratch.load(inst, &fixed)?.n_mid() != 0 {
            continue;
        }
        let p = parents[v].expect("connected vertex off the root has a parent");
        let mv = Move::new(inst, 7, vec![v], vec![(v, p)], vec![(v, ROOT)]);
        if edge::is_feasible(inst, &mv.apply_to_edges(inst, x3))? {
            return Ok(Some(mv));
        }
    }
    Err(Error::Precondition("no single attachment of x3 swaps into a feasible tree".into()))
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VertexPartition {
    /// Children of `r` with `W(v,r) = 1`.
    pub v11: Vec<Vertex>,
    /// Children of `r` with `W(v,r) = 2`.
    pub v12: Vec<Vertex>,
    /// Grandchildren with a weight-1 parent edge.
    pub v21: Vec<Vertex>,
    /// Grandchildren with a weight-2 parent edge.
    pub v22: Vec<Vertex>,
    /// Members of `v12` without children.
    pub v12_0: Vec<Vertex>,
    /// Members of `v12` with at least one child.
    pub v12_ge1: Vec<Vertex>,
}

impl VertexPartition {
    /// `n + |V12| + |V22|`, which equals the tree cost.
    pub fn cost_identity(&self, n: usize) -> u64 {
        (n + self.v12.len() + self.v22.len()) as u64
    }
}

pub fn partition(inst: &Instance, t: &HopTree) -> Result<VertexPartition> {
    check_tree(inst, t)?;
    let mut p = VertexPartition::default();
    for v in 1..=inst.n() {
        let heavy = inst.w(v, t.parent(v)) == 2;
        match (t.is_child(v), heavy) {
            (true, false) => p.v11.push(v),
            (true, true) => {
                p.v12.push(v);
                if t.child_count(v) == 0 {
                    p.v12_0.push(v);
                } else {
                    p.v12_ge1.push(v);
                }
            }
            (false, false) => p.v21.push(v),
            (false, true) => p.v22.push(v),
        }
    }
    Ok(p)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// None of Operations 1 to 5 applies, so the tree is 3/2-approximate.
    Certified,
    Refuted(Move),
}

/// Scans Operations 1 to 5 in order and reports the first applicable move.
pub fn certify_three_halves(inst: &Instance, t: &HopTree) -> Result<Certificate> {
    for find in [find_op1, find_op2, find_op3, find_op4, find_op5] {
        if let Some(mv) = find(inst, t)? {
            return Ok(Certificate::Refuted(mv));
        }
    }
    Ok(Certificate::Certified)
}

/// Applies refuting moves until the tree is certified. Returns the final
/// tree and the number of moves applied (at most `n`, since each lowers the
/// cost by one within `[n, 2n]`).
pub fn improve_until_certified(inst: &Instance, t: &HopTree) -> Result<(HopTree, usize)> {
    let mut t = t.clone();
    let mut moves = 0;
    while let Certificate::Refuted(mv) = certify_three_halves(inst, &t)? {
        t = mv.apply_to_tree(&t)?;
        moves += 1;
    }
    Ok((t, moves))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::reference_i3;
    use crate::oracle;

    #[test]
    fn i3_tree_has_no_moves() {
        let i3 = reference_i3();
        let t = HopTree::from_parents(vec![0, 2, 0, 2]).unwrap();
        for find in [find_op1, find_op2, find_op3, find_op4, find_op5] {
            assert_eq!(find(&i3, &t).unwrap(), None);
        }
        assert_eq!(find_op6(&i3, &t, None).unwrap(), None);
        assert_eq!(certify_three_halves(&i3, &t).unwrap(), Certificate::Certified);
        assert_eq!(t.cost(&i3), oracle::optimum(&i3).unwrap().cost);
    }

    #[test]
    fn op1_requires_strictly_lighter_root_edge() {
        // n = 3: 1 -> r, 3 -> 1, 2 -> r with W(3,1) = W(3,r) = 2
        let inst = Instance::from_fn(3, |u, v| if (u, v) == (0, 1) { 1 } else { 2 }).unwrap();
        let t = HopTree::from_parents(vec![0, 0, 0, 1]).unwrap();
        assert_eq!(find_op1(&inst, &t).unwrap(), None);

        let planted = Instance::from_fn(3, |u, v| if (u, v) == (0, 1) || (u, v) == (0, 3) { 1 } else { 2 }).unwrap();
        let mv = find_op1(&planted, &t).unwrap().unwrap();
        assert_eq!((mv.removed.clone(), mv.added.clone(), mv.cost_delta), (vec![(3, 1)], vec![(3, 0)], -1));
        let after = mv.apply_to_tree(&t).unwrap();
        assert_eq!(after.cost(&planted), t.cost(&planted) - 1);
        assert_eq!(certify_three_halves(&planted, &t).unwrap(), Certificate::Refuted(mv));
    }

    #[test]
    fn op3_planted() {
        // children 1 (leaf, W(1,r) = 2) and 2, with W(1,2) = 1
        let inst = Instance::from_fn(2, |u, v| if (u, v) == (1, 2) || (u, v) == (0, 2) { 1 } else { 2 }).unwrap();
        let t = HopTree::star(2);
        let mv = find_op3(&inst, &t).unwrap().unwrap();
        assert_eq!(mv.witness, vec![1, 2]);
        assert_eq!(mv.cost_delta, -1);
    }

    #[test]
    fn no_weight_two_edges_means_no_op4() {
        let ones = Instance::uniform(6, 1).unwrap();
        let t = HopTree::from_parents(vec![0, 0, 1, 1, 0, 4, 0]).unwrap();
        assert_eq!(find_op4(&ones, &t).unwrap(), None);
        assert_eq!(certify_three_halves(&ones, &t).unwrap(), Certificate::Certified);
    }

    #[test]
    fn op5_and_op6_on_the_same_pattern() {
        // 1 -> r, 2 -> 1 (v1 = 2), 3 -> r leaf, 4 -> r leaf
        // W(1,r) = 1, W(2,1) = 1, W(2,3) = W(2,4) = 1, all else 2
        let light = [(0, 1), (1, 2), (2, 3), (2, 4)];
        let inst = Instance::from_fn(4, |u, v| if light.contains(&(u, v)) { 1 } else { 2 }).unwrap();
        let t = HopTree::from_parents(vec![0, 0, 1, 0, 0]).unwrap();
        for find in [find_op1, find_op2, find_op3, find_op4] {
            assert_eq!(find(&inst, &t).unwrap(), None);
        }
        let mv5 = find_op5(&inst, &t).unwrap().unwrap();
        assert_eq!(mv5.witness, vec![2, 3, 4]);
        assert_eq!(mv5.cost_delta, -1);
        let after = mv5.apply_to_tree(&t).unwrap();
        assert_eq!(after.cost(&inst), t.cost(&inst) - 1);

        let x0 = t.to_edge_solution(&inst);
        let mv6 = find_op6(&inst, &t, None).unwrap().unwrap();
        assert_eq!(find_op6(&inst, &t, Some(t.cost(&inst) - 2)).unwrap(), None);
        assert!(find_op6(&inst, &t, Some(t.cost(&inst) - 1)).unwrap().is_some());
        assert_eq!(mv6.cost_delta, -2);
        let x2 = mv6.apply_to_edges(&inst, &x0);
        assert_eq!(edge::deficiency_class(&inst, &x2).unwrap(), edge::DeficiencyClass::One);
        assert_eq!(edge::deficiency_set_size(&inst, &x2).unwrap(), 1);
        assert_eq!(x2.hamming(), 4);
        assert!(mv6.apply_to_tree(&t).is_err());

        let mv7 = find_op7(&inst, &x2, &x0).unwrap().unwrap();
        assert_eq!(mv7.witness, vec![2]);
        let x5 = mv7.apply_to_edges(&inst, &x2);
        assert!(edge::is_feasible(&inst, &x5).unwrap());
        assert!(x5.cost(&inst) < x0.cost(&inst));
    }

    #[test]
    fn op7_gate_and_contracts() {
        let light = [(0, 1), (1, 2), (2, 3), (2, 4)];
        let inst = Instance::from_fn(4, |u, v| if light.contains(&(u, v)) { 1 } else { 2 }).unwrap();
        let t = HopTree::from_parents(vec![0, 0, 1, 0, 0]).unwrap();
        let x0 = t.to_edge_solution(&inst);
        let x2 = find_op6(&inst, &t, None).unwrap().unwrap().apply_to_edges(&inst, &x0);
        // the Op 5 result is only one cheaper than x0, which closes the gate
        let partner = find_op5(&inst, &t).unwrap().unwrap().apply_to_tree(&t).unwrap();
        assert_eq!(partner.cost(&inst) + 1, x0.cost(&inst));
        let pe = partner.to_edge_solution(&inst);
        assert_eq!(fitness::f_m2(&inst, &x2).unwrap().f2 + 1, fitness::f_m2(&inst, &pe).unwrap().f2);
        assert_eq!(find_op7(&inst, &x2, &pe).unwrap(), None);
        assert!(matches!(find_op7(&inst, &x0, &x0), Err(Error::Precondition(_))));
        assert!(matches!(find_op7(&inst, &x2, &x2), Err(Error::Precondition(_))));
    }

    #[test]
    fn partition_examples() {
        let i3 = reference_i3();
        let t = HopTree::from_parents(vec![0, 2, 0, 2]).unwrap();
        let p = partition(&i3, &t).unwrap();
        assert_eq!(p.v12, vec![2]);
        assert_eq!(p.v21, vec![1, 3]);
        assert!(p.v11.is_empty() && p.v22.is_empty());
        assert_eq!(p.v12_ge1, vec![2]);
        assert_eq!(p.cost_identity(3), 4);

        let star = partition(&i3, &HopTree::star(3)).unwrap();
        assert!(star.v21.is_empty() && star.v22.is_empty());
        assert_eq!(star.cost_identity(3), 5);

        let ones = Instance::uniform(5, 1).unwrap();
        let p = partition(&ones, &HopTree::from_parents(vec![0, 0, 1, 1, 0, 4]).unwrap()).unwrap();
        assert!(p.v12.is_empty() && p.v22.is_empty());
    }

    #[test]
    fn move_display() {
        let planted = Instance::from_fn(3, |u, v| if (u, v) == (0, 1) || (u, v) == (0, 3) { 1 } else { 2 }).unwrap();
        let t = HopTree::from_parents(vec![0, 0, 0, 1]).unwrap();
        let mv = find_op1(&planted, &t).unwrap().unwrap();
        assert_eq!(mv.to_string(), "op=1 witness=3 remove=3-1 add=3-0 delta=-1");
    }
}
