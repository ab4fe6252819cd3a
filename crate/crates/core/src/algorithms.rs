//! The five search procedures and a milestone-recording driver.
//!
//! Every run starts from a uniform random bit string and counts one fitness
//! evaluation for it, then one per offspring.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::edge::{self, EdgeSolution, Summary, DEFAULT_COVER_BUDGET};
use crate::error::{Error, Result};
use crate::fitness::{
    Dominance, Evaluator, Gsemo1Order, Gsemo2Order, GsemoOrder, ScalarFitness, VectorFitnessM, VectorFitnessM2,
};
use crate::gen::rng_from_seed;
use crate::graph::Instance;
use crate::vertex::{self, VertexSolution};

/// Identifier of the pseudo-random generator behind every run.
pub const RNG_ID: &str = "chacha8";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "ea-edge")]
    EaEdge,
    #[serde(rename = "gsemo")]
    Gsemo,
    #[serde(rename = "gsemo1")]
    Gsemo1,
    #[serde(rename = "gsemo2")]
    Gsemo2,
    #[serde(rename = "ea-vertex")]
    EaVertex,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] =
        [Algorithm::EaEdge, Algorithm::Gsemo, Algorithm::Gsemo1, Algorithm::Gsemo2, Algorithm::EaVertex];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::EaEdge => "ea-edge",
            Algorithm::Gsemo => "gsemo",
            Algorithm::Gsemo1 => "gsemo1",
            Algorithm::Gsemo2 => "gsemo2",
            Algorithm::EaVertex => "ea-vertex",
        }
    }

    pub fn representation(self) -> Representation {
        match self {
            Algorithm::EaVertex => Representation::Vertex,
            _ => Representation::Edge,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown algorithm `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Edge,
    Vertex,
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Representation::Edge => "edge",
            Representation::Vertex => "vertex",
        })
    }
}

impl FromStr for Representation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "edge" => Ok(Representation::Edge),
            "vertex" => Ok(Representation::Vertex),
            _ => Err(Error::Config(format!("unknown representation `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Targets {
    pub feasible: bool,
    pub ratio32: bool,
    pub optimal: bool,
}

impl Targets {
    pub const FEASIBLE: Targets = Targets { feasible: true, ratio32: false, optimal: false };
    pub const RATIO32: Targets = Targets { feasible: false, ratio32: true, optimal: false };
    pub const ALL: Targets = Targets { feasible: true, ratio32: true, optimal: true };

    pub fn needs_oracle(&self) -> bool {
        self.ratio32 || self.optimal
    }

    pub fn is_empty(&self) -> bool {
        !(self.feasible || self.ratio32 || self.optimal)
    }

    fn all_hit(&self, m: &Milestones) -> bool {
        !self.is_empty()
            && (!self.feasible || m.feasible.is_some())
            && (!self.ratio32 || m.ratio32.is_some())
            && (!self.optimal || m.optimal.is_some())
    }
}

impl fmt::Display for Targets {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = [(self.feasible, "feasible"), (self.ratio32, "ratio32"), (self.optimal, "optimal")]
            .into_iter()
            .filter_map(|(on, s)| on.then_some(s))
            .collect();
        f.write_str(&names.join(","))
    }
}

impl FromStr for Targets {
    type Err = Error;

    /// Comma-separated subset of `feasible`, `ratio32` (or `ratio_3_2`), `optimal`.
    fn from_str(s: &str) -> Result<Self> {
        let mut t = Targets::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "feasible" => t.feasible = true,
                "ratio32" | "ratio_3_2" => t.ratio32 = true,
                "optimal" | "opt" => t.optimal = true,
                _ => return Err(Error::Config(format!("unknown target `{part}`"))),
            }
        }
        Ok(t)
    }
}

/// Evaluation index at which each target was first met.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Milestones {
    pub feasible: Option<u64>,
    pub ratio32: Option<u64>,
    pub optimal: Option<u64>,
}

impl Milestones {
    fn record(&mut self, evaluations: u64, cost: u64, opt: Option<u64>) {
        self.feasible.get_or_insert(evaluations);
        if let Some(opt) = opt {
            if 2 * cost <= 3 * opt {
                self.ratio32.get_or_insert(evaluations);
            }
            if cost == opt {
                self.optimal.get_or_insert(evaluations);
            }
        }
    }
}

/// An edge-based population member with everything its evaluation produced.
#[derive(Clone, Debug)]
pub struct Member<F> {
    pub x: EdgeSolution,
    pub fit: F,
    pub summary: Summary,
    /// `|V_d(x)|`, computed only under `f_M2`.
    pub vd: Option<usize>,
}

impl<F> Member<F> {
    pub fn feasible_cost(&self, n: usize) -> Option<u64> {
        (self.summary.hamming == n && self.summary.n_far == 0).then_some(self.summary.cost)
    }
}

/// A population under a dominance relation.
#[derive(Clone, Debug)]
pub struct Semo<D: Dominance> {
    order: D,
    members: Vec<Member<D::Fitness>>,
}

impl<D: Dominance> Semo<D> {
    pub fn new(order: D, first: Member<D::Fitness>) -> Self {
        Self { order, members: vec![first] }
    }

    pub fn members(&self) -> &[Member<D::Fitness>] {
        &self.members
    }

    pub fn order(&self) -> &D {
        &self.order
    }

    /// Rejects `y` if some member strongly dominates it; otherwise drops every
    /// member `y` weakly dominates and inserts `y`.
    pub fn offer(&mut self, y: Member<D::Fitness>) -> bool {
        if self.members.iter().any(|z| self.order.strictly(&z.fit, &y.fit)) {
            return false;
        }
        let order = &self.order;
        self.members.retain(|z| !order.weakly(&y.fit, &z.fit));
        self.members.push(y);
        true
    }

    fn pick<R: Rng>(&self, rng: &mut R) -> &Member<D::Fitness> {
        &self.members[rng.random_range(0..self.members.len())]
    }
}

#[derive(Clone, Debug)]
pub struct VertexMember {
    pub x: VertexSolution,
    pub cost: u64,
}

#[derive(Clone, Debug)]
pub enum Population {
    EaEdge(Member<ScalarFitness>),
    Gsemo(Semo<GsemoOrder>),
    Gsemo1(Semo<Gsemo1Order>),
    Gsemo2(Semo<Gsemo2Order>),
    EaVertex(VertexMember),
}

impl Population {
    pub fn len(&self) -> usize {
        match self {
            Population::EaEdge(_) | Population::EaVertex(_) => 1,
            Population::Gsemo(s) => s.members.len(),
            Population::Gsemo1(s) => s.members.len(),
            Population::Gsemo2(s) => s.members.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Summaries of the edge-based members; empty for the vertex EA.
    pub fn summaries(&self) -> Vec<Summary> {
        match self {
            Population::EaEdge(m) => vec![m.summary],
            Population::Gsemo(s) => s.members.iter().map(|m| m.summary).collect(),
            Population::Gsemo1(s) => s.members.iter().map(|m| m.summary).collect(),
            Population::Gsemo2(s) => s.members.iter().map(|m| m.summary).collect(),
            Population::EaVertex(_) => Vec::new(),
        }
    }

    /// Cheapest feasible member.
    pub fn best_feasible_cost(&self, n: usize) -> Option<u64> {
        match self {
            Population::EaVertex(v) => (v.cost <= 2 * n as u64).then_some(v.cost),
            _ => self.summaries().iter().filter(|s| s.hamming == n && s.n_far == 0).map(|s| s.cost).min(),
        }
    }

    /// Checks the size and slot structure each algorithm maintains.
    pub fn check_invariant(&self, n: usize) -> std::result::Result<(), String> {
        let mut weights: Vec<usize> = self.summaries().iter().map(|s| s.hamming).collect();
        weights.sort_unstable();
        match self {
            Population::EaEdge(_) | Population::EaVertex(_) => Ok(()),
            Population::Gsemo(_) => {
                if weights.len() > n + 1 {
                    return Err(format!("{} members exceed n + 1", weights.len()));
                }
                if weights.windows(2).any(|w| w[0] == w[1]) {
                    return Err(format!("repeated Hamming weight in {weights:?}"));
                }
                if weights.len() > 1 && weights.iter().any(|&h| h > n) {
                    return Err(format!("weight above n in a population of {}: {weights:?}", weights.len()));
                }
                Ok(())
            }
            Population::Gsemo1(_) => match weights.as_slice() {
                [_] => Ok(()),
                [a, b] if *a == n && *b == n + 1 => Ok(()),
                _ => Err(format!("bad weight slots {weights:?}")),
            },
            Population::Gsemo2(s) => {
                let mut f1: Vec<u64> = s.members.iter().map(|m| m.fit.f1).collect();
                f1.sort_unstable();
                match f1.as_slice() {
                    [_] | [0, 1] => Ok(()),
                    _ => Err(format!("bad f1 slots {f1:?}")),
                }
            }
        }
    }

    /// `min P(x)`, `P_1 = min |x|_1` and `P_2 = n - max{|x|_1 : |x|_1 + N_{d>2}(x) = n}`.
    pub fn potentials(&self, n: usize) -> Potentials {
        let s = self.summaries();
        if s.is_empty() {
            return Potentials::default();
        }
        Potentials {
            p: s.iter().map(|s| (2 * s.n_far + s.hamming.saturating_sub(n)) as u64).min(),
            p1: s.iter().map(|s| s.hamming).min(),
            p2: s.iter().filter(|s| s.hamming + s.n_far == n).map(|s| n - s.hamming).min(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Potentials {
    pub p: Option<u64>,
    pub p1: Option<usize>,
    pub p2: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TracePoint {
    pub evaluations: u64,
    pub best_cost: Option<u64>,
    #[serde(flatten)]
    pub potentials: Potentials,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StepReport {
    pub accepted: bool,
    /// Cost of the offspring if it is a feasible solution.
    pub offspring_feasible_cost: Option<u64>,
}

/// One run in progress.
pub struct RunState<'a> {
    inst: &'a Instance,
    algo: Algorithm,
    rng: ChaCha8Rng,
    evaluations: u64,
    evaluator: Evaluator,
    pop: Population,
}

impl<'a> RunState<'a> {
    /// Draws and evaluates the initial solution.
    pub fn new(algo: Algorithm, inst: &'a Instance, seed: u64) -> Result<Self> {
        Self::with_cover_budget(algo, inst, seed, DEFAULT_COVER_BUDGET)
    }

    pub fn with_cover_budget(algo: Algorithm, inst: &'a Instance, seed: u64, cover_budget: u64) -> Result<Self> {
        let mut rng = rng_from_seed(seed);
        let mut evaluator = Evaluator::with_cover_budget(cover_budget);
        let pop = match algo {
            Algorithm::EaVertex => {
                let x = VertexSolution::random(inst, &mut rng);
                let cost = vertex::cost(inst, &x);
                Population::EaVertex(VertexMember { x, cost })
            }
            _ => {
                let x = EdgeSolution::random(inst, &mut rng);
                Self::seed_population(algo, inst, &mut evaluator, x)?
            }
        };
        Ok(Self { inst, algo, rng, evaluations: 1, evaluator, pop })
    }

    /// Starts from a given edge solution instead of a random one.
    pub fn from_edge_solution(algo: Algorithm, inst: &'a Instance, seed: u64, x: EdgeSolution) -> Result<Self> {
        if algo.representation() != Representation::Edge {
            return Err(Error::Config(format!("{algo} does not use the edge representation")));
        }
        let mut evaluator = Evaluator::new();
        let pop = Self::seed_population(algo, inst, &mut evaluator, x)?;
        Ok(Self { inst, algo, rng: rng_from_seed(seed), evaluations: 1, evaluator, pop })
    }

    pub fn from_vertex_solution(inst: &'a Instance, seed: u64, x: VertexSolution) -> Result<Self> {
        let cost = vertex::cost(inst, &x);
        Ok(Self {
            inst,
            algo: Algorithm::EaVertex,
            rng: rng_from_seed(seed),
            evaluations: 1,
            evaluator: Evaluator::new(),
            pop: Population::EaVertex(VertexMember { x, cost }),
        })
    }

    fn seed_population(algo: Algorithm, inst: &Instance, ev: &mut Evaluator, x: EdgeSolution) -> Result<Population> {
        let n = inst.n();
        Ok(match algo {
            Algorithm::EaEdge => Population::EaEdge(Self::eval_scalar(inst, ev, x)?),
            Algorithm::Gsemo => Population::Gsemo(Semo::new(GsemoOrder { n }, Self::eval_m(inst, ev, x)?)),
            Algorithm::Gsemo1 => Population::Gsemo1(Semo::new(Gsemo1Order { n }, Self::eval_m(inst, ev, x)?)),
            Algorithm::Gsemo2 => Population::Gsemo2(Semo::new(Gsemo2Order, Self::eval_m2(inst, ev, x)?)),
            Algorithm::EaVertex => unreachable!("vertex runs are seeded separately"),
        })
    }

    fn eval_scalar(inst: &Instance, ev: &mut Evaluator, x: EdgeSolution) -> Result<Member<ScalarFitness>> {
        let (fit, summary) = ev.scalar(inst, &x)?;
        Ok(Member { x, fit, summary, vd: None })
    }

    fn eval_m(inst: &Instance, ev: &mut Evaluator, x: EdgeSolution) -> Result<Member<VectorFitnessM>> {
        let (fit, summary) = ev.vector_m(inst, &x)?;
        Ok(Member { x, fit, summary, vd: None })
    }

    fn eval_m2(inst: &Instance, ev: &mut Evaluator, x: EdgeSolution) -> Result<Member<VectorFitnessM2>> {
        let (fit, summary, vd) = ev.vector_m2(inst, &x)?;
        Ok(Member { x, fit, summary, vd: Some(vd) })
    }

    pub fn algorithm(&self) -> Algorithm {
        self.algo
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    pub fn population(&self) -> &Population {
        &self.pop
    }

    pub fn best_feasible_cost(&self) -> Option<u64> {
        self.pop.best_feasible_cost(self.inst.n())
    }

    /// Mutates a uniformly chosen member and offers the offspring.
    pub fn step(&mut self) -> Result<StepReport> {
        match &self.pop {
            Population::EaVertex(v) => {
                let y = vertex::mutate_vertex(&v.x, &mut self.rng);
                self.consider_vertex(y)
            }
            _ => {
                let parent = match &self.pop {
                    Population::EaEdge(m) => &m.x,
                    Population::Gsemo(s) => &s.pick(&mut self.rng).x,
                    Population::Gsemo1(s) => &s.pick(&mut self.rng).x,
                    Population::Gsemo2(s) => &s.pick(&mut self.rng).x,
                    Population::EaVertex(_) => unreachable!(),
                };
                let y = edge::mutate_edge(parent, &mut self.rng);
                self.consider_edge(y)
            }
        }
    }

    /// Evaluates `y` and applies the algorithm's acceptance rule.
    pub fn consider_edge(&mut self, y: EdgeSolution) -> Result<StepReport> {
        let (inst, ev) = (self.inst, &mut self.evaluator);
        let n = inst.n();
        let (accepted, feasible) = match &mut self.pop {
            Population::EaEdge(cur) => {
                let y = Self::eval_scalar(inst, ev, y)?;
                let feasible = y.feasible_cost(n);
                let accepted = y.fit <= cur.fit;
                if accepted {
                    *cur = y;
                }
                (accepted, feasible)
            }
            Population::Gsemo(s) => {
                let y = Self::eval_m(inst, ev, y)?;
                let feasible = y.feasible_cost(n);
                (s.offer(y), feasible)
            }
            Population::Gsemo1(s) => {
                let y = Self::eval_m(inst, ev, y)?;
                let feasible = y.feasible_cost(n);
                (s.offer(y), feasible)
            }
            Population::Gsemo2(s) => {
                let y = Self::eval_m2(inst, ev, y)?;
                let feasible = y.feasible_cost(n);
                (s.offer(y), feasible)
            }
            Population::EaVertex(_) => {
                return Err(Error::Config("vertex-based run given an edge solution".into()));
            }
        };
        self.evaluations += 1;
        Ok(StepReport { accepted, offspring_feasible_cost: feasible })
    }

    pub fn consider_vertex(&mut self, y: VertexSolution) -> Result<StepReport> {
        let n = self.inst.n() as u64;
        let Population::EaVertex(cur) = &mut self.pop else {
            return Err(Error::Config("edge-based run given a vertex solution".into()));
        };
        let cost = vertex::cost(self.inst, &y);
        let accepted = cost <= cur.cost;
        if accepted {
            *cur = VertexMember { x: y, cost };
        }
        self.evaluations += 1;
        Ok(StepReport { accepted, offspring_feasible_cost: (cost <= 2 * n).then_some(cost) })
    }
}

/// What to run, independent of instance and seed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunSpec {
    pub algo: Algorithm,
    pub representation: Representation,
    pub budget: u64,
    pub targets: Targets,
    /// Sample potentials every this many evaluations.
    pub trace_every: Option<u64>,
    /// Check the population invariant after every step.
    pub check_invariants: bool,
    pub cover_budget: u64,
}

impl RunSpec {
    pub fn new(algo: Algorithm, budget: u64, targets: Targets) -> Self {
        Self {
            algo,
            representation: algo.representation(),
            budget,
            targets,
            trace_every: None,
            check_invariants: false,
            cover_budget: DEFAULT_COVER_BUDGET,
        }
    }

    pub fn validate(&self, opt: Option<u64>) -> Result<()> {
        if self.representation != self.algo.representation() {
            return Err(Error::Config(format!(
                "{} runs on the {} representation, not {}",
                self.algo,
                self.algo.representation(),
                self.representation
            )));
        }
        if self.budget == 0 {
            return Err(Error::Config("budget must be at least 1".into()));
        }
        if self.trace_every == Some(0) {
            return Err(Error::Config("trace interval must be positive".into()));
        }
        if self.targets.needs_oracle() && opt.is_none() {
            return Err(Error::Config("ratio and optimality targets need the optimum".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOutcome {
    pub milestones: Milestones,
    pub evaluations: u64,
    /// Cheapest feasible solution in the final population.
    pub final_cost: Option<u64>,
    pub trace: Vec<TracePoint>,
}

/// Runs until the budget is spent or every requested target is met.
/// Targets are checked whenever a feasible offspring is accepted.
pub fn run(spec: &RunSpec, inst: &Instance, seed: u64, opt: Option<u64>) -> Result<RunOutcome> {
    spec.validate(opt)?;
    let n = inst.n();
    let mut state = RunState::with_cover_budget(spec.algo, inst, seed, spec.cover_budget)?;
    let mut milestones = Milestones::default();
    if let Some(c) = state.best_feasible_cost() {
        milestones.record(1, c, opt);
    }
    let mut trace = Vec::new();
    let sample = |state: &RunState, trace: &mut Vec<TracePoint>| {
        trace.push(TracePoint {
            evaluations: state.evaluations,
            best_cost: state.best_feasible_cost(),
            potentials: state.pop.potentials(n),
        })
    };
    if spec.trace_every.is_some() {
        sample(&state, &mut trace);
    }
    while state.evaluations < spec.budget && !spec.targets.all_hit(&milestones) {
        let report = state.step()?;
        if spec.check_invariants {
            state.pop.check_invariant(n).map_err(|e| {
                Error::Precondition(format!(
                    "{} invariant broken after {} evaluations: {e}",
                    spec.algo, state.evaluations
                ))
            })?;
        }
        if report.accepted {
            if let Some(c) = report.offspring_feasible_cost {
                milestones.record(state.evaluations, c, opt);
            }
        }
        if spec.trace_every.is_some_and(|k| state.evaluations % k == 0) {
            sample(&state, &mut trace);
        }
    }
    Ok(RunOutcome { milestones, evaluations: state.evaluations, final_cost: state.best_feasible_cost(), trace })
}
