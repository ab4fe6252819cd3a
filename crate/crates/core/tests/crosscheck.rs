mod common;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{random_connected, random_edges, random_hop_tree};
use twohop::certifier::{self, Certificate, Move};
use twohop::edge::{self, DeficiencyClass};
use twohop::gen::random_instance;
use twohop::{oracle, vertex, HopTree, Instance, Vertex, VertexSolution, ROOT};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[test]
fn fast_metrics_match_brute_force() {
    let mut r = rng(1);
    for k in 0..600 {
        let n = 1 + k % 8;
        let inst = random_instance(n, r.random(), r.random()).unwrap();
        let x = random_edges(&inst, r.random_range(0.0..0.7), &mut r);
        assert_eq!(edge::metrics(&inst, &x).unwrap(), oracle::brute_metrics(&inst, &x).unwrap());
    }
}

#[test]
fn deficiency_size_matches_exhaustive_search() {
    let mut r = rng(2);
    let mut seen = [0usize; 4];
    for k in 0..600 {
        let n = 2 + k % 10;
        let inst = random_instance(n, 0.5, r.random()).unwrap();
        let x = if k % 3 == 0 {
            random_edges(&inst, r.random_range(0.0..0.4), &mut r)
        } else {
            random_connected(&inst, r.random_range(0.0..0.1), &mut r)
        };
        let vd = edge::deficiency_set_size(&inst, &x).unwrap();
        assert_eq!(vd, oracle::brute_vd(&inst, &x).unwrap(), "n={n} x={}", x.to_text());
        seen[vd.min(3)] += 1;
    }
    assert!(seen.iter().all(|&c| c > 10), "too little variety: {seen:?}");
}

#[test]
fn oracle_matches_tree_enumeration() {
    let mut r = rng(3);
    for k in 0..60 {
        let n = 1 + k % 5;
        let inst = random_instance(n, r.random(), r.random()).unwrap();
        // every assignment of a parent to each vertex that yields a 2-hop tree
        let best = (1..=n)
            .map(|v| (0..=n).filter(move |&p| p != v))
            .multi_cartesian_product()
            .filter_map(|ps| {
                let mut parent = vec![ROOT];
                parent.extend(ps);
                HopTree::from_parents(parent).ok()
            })
            .map(|t| t.cost(&inst))
            .min()
            .unwrap();
        assert_eq!(oracle::optimum(&inst).unwrap().cost, best);
    }
}

#[test]
fn optimum_brackets_every_tree() {
    let mut r = rng(4);
    for k in 0..300 {
        let n = 2 + k % 11;
        let inst = random_instance(n, r.random(), r.random()).unwrap();
        let opt = oracle::optimum(&inst).unwrap();
        assert!(n as u64 <= opt.cost && opt.cost <= 2 * n as u64);
        let s = VertexSolution::from_children(&inst, &opt.children).unwrap();
        assert_eq!(vertex::cost(&inst, &s), opt.cost);
        for _ in 0..10 {
            let t = random_hop_tree(n, &mut r);
            let c = t.cost(&inst);
            assert!(opt.cost <= c && c <= 2 * opt.cost);
        }
    }
}

// Independent scanner: every ordered tuple of distinct vertices, with the
// roles read straight off the parent array.
struct Roles<'a> {
    inst: &'a Instance,
    parent: &'a [Vertex],
}

impl Roles<'_> {
    fn w(&self, u: Vertex, v: Vertex) -> u8 {
        self.inst.weight(u, v).unwrap()
    }
    fn depth(&self, v: Vertex) -> usize {
        if self.parent[v] == ROOT {
            1
        } else {
            2
        }
    }
    fn has_child(&self, v: Vertex) -> bool {
        self.parent.iter().skip(1).any(|&p| p == v)
    }
    fn pw(&self, v: Vertex) -> u8 {
        self.w(v, self.parent[v])
    }
    fn leafy(&self, v: Vertex) -> bool {
        self.depth(v) == 2 || !self.has_child(v)
    }

    fn applicable(&self, op: u8) -> bool {
        let n = self.inst.n();
        let vs = || 1..=n;
        match op {
            1 => vs().any(|a| self.depth(a) == 2 && self.pw(a) == 2 && self.w(a, ROOT) == 1),
            2 => vs().cartesian_product(vs()).any(|(a, b)| {
                a != b
                    && self.depth(a) == 1
                    && self.depth(b) == 2
                    && self.parent[b] != a
                    && self.pw(b) == 2
                    && self.w(a, b) == 1
            }),
            3 => vs().cartesian_product(vs()).any(|(a, b)| {
                a != b
                    && self.depth(a) == 1
                    && !self.has_child(a)
                    && self.depth(b) == 1
                    && self.w(a, ROOT) == 2
                    && self.w(a, b) == 1
            }),
            4 => vs().cartesian_product(vs()).any(|(a, b)| {
                a != b
                    && self.depth(a) == 2
                    && self.pw(a) == self.w(a, ROOT)
                    && self.leafy(b)
                    && self.pw(b) > self.w(a, b)
            }),
            5 | 6 => vs().permutations(3).any(|t| {
                let (a, b, c) = (t[0], t[1], t[2]);
                self.depth(a) == 2
                    && (op == 6 || (self.pw(a) == 1 && self.w(a, ROOT) == 2))
                    && self.leafy(b)
                    && self.leafy(c)
                    && self.w(a, b) == 1
                    && self.w(a, c) == 1
                    && self.pw(b) == 2
                    && self.pw(c) == 2
            }),
            _ => unreachable!(),
        }
    }
}

fn find(inst: &Instance, t: &HopTree, op: u8) -> Option<Move> {
    match op {
        1 => certifier::find_op1(inst, t),
        2 => certifier::find_op2(inst, t),
        3 => certifier::find_op3(inst, t),
        4 => certifier::find_op4(inst, t),
        5 => certifier::find_op5(inst, t),
        _ => certifier::find_op6(inst, t, None),
    }
    .unwrap()
}

#[test]
fn detectors_are_complete_and_sound() {
    let mut r = rng(5);
    let mut fired = [0usize; 7];
    for k in 0..3000 {
        let n = 2 + k % 9;
        let inst = random_instance(n, [0.2, 0.5, 0.8][k % 3], r.random()).unwrap();
        let t = random_hop_tree(n, &mut r);
        let roles = Roles { inst: &inst, parent: t.parents() };
        let cost = t.cost(&inst);
        for op in 1..=6u8 {
            let mv = find(&inst, &t, op);
            assert_eq!(mv.is_some(), roles.applicable(op), "op {op} on {:?}", t.parents());
            let Some(mv) = mv else { continue };
            fired[op as usize] += 1;
            let x = t.to_edge_solution(&inst);
            let y = mv.apply_to_edges(&inst, &x);
            let brute = oracle::brute_metrics(&inst, &y).unwrap();
            assert_eq!(y.cost(&inst) as i64, cost as i64 + mv.cost_delta);
            assert_eq!(brute.hamming, n);
            assert_eq!(brute.n_cc, 1);
            if op <= 5 {
                assert_eq!(mv.cost_delta, -1);
                assert!(brute.is_feasible());
                assert_eq!(mv.apply_to_tree(&t).unwrap().to_edge_solution(&inst), y);
            } else {
                assert_eq!(mv.cost_delta, -2);
                assert_eq!(oracle::brute_vd(&inst, &y).unwrap(), 1);
                assert_eq!(edge::deficiency_class(&inst, &y).unwrap(), DeficiencyClass::One);
            }
        }
        let cert = certifier::certify_three_halves(&inst, &t).unwrap();
        assert_eq!(cert == Certificate::Certified, (1..=5).all(|op| !roles.applicable(op)));
    }
    assert!(fired[1..].iter().all(|&c| c > 20), "{fired:?}");
}

#[test]
fn partition_identity() {
    let mut r = rng(6);
    for k in 0..500 {
        let n = 1 + k % 14;
        let inst = random_instance(n, r.random(), r.random()).unwrap();
        let t = random_hop_tree(n, &mut r);
        let p = certifier::partition(&inst, &t).unwrap();
        assert_eq!(p.cost_identity(n), t.cost(&inst));
        let mut all: Vec<Vertex> = [&p.v11, &p.v12, &p.v21, &p.v22].into_iter().flatten().copied().collect();
        all.sort_unstable();
        assert_eq!(all, (1..=n).collect::<Vec<_>>());
        let mut v12: Vec<Vertex> = p.v12_0.iter().chain(&p.v12_ge1).copied().collect();
        v12.sort_unstable();
        assert_eq!(v12, p.v12);
    }
}

#[test]
fn optimal_trees_certify() {
    let mut r = rng(7);
    for k in 0..200 {
        let n = 2 + k % 10;
        let inst = random_instance(n, r.random(), r.random()).unwrap();
        let opt = oracle::optimum(&inst).unwrap();
        let s = VertexSolution::from_children(&inst, &opt.children).unwrap();
        let t = vertex::build_tree(&inst, &s).unwrap();
        assert_eq!(certifier::certify_three_halves(&inst, &t).unwrap(), Certificate::Certified);
    }
}
