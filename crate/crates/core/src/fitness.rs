//! Fitness functions of the five algorithms and the three piecewise
//! dominance relations used by the GSEMO family. All arithmetic is exact.

use std::fmt::Debug;

use crate::edge::{EdgeSolution, GraphScratch, Summary, DEFAULT_COVER_BUDGET};
use crate::error::Result;
use crate::graph::Instance;
use crate::vertex::{self, VertexSolution};

/// `m^2`, the penalty unit.
#[inline]
pub fn penalty_unit(inst: &Instance) -> u64 {
    let m = inst.m() as u64;
    m * m
}

/// `f_{1+1}(x) = c(x) + m^2 (2 N_{d>2}(x) + max{|x|_1 - n, 0})`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ScalarFitness(pub u64);

/// `f_M(x) = [|x|_1, c(x) + m^2 N_{d>2}(x)]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct VectorFitnessM {
    pub h: usize,
    pub f: u64,
}

/// `f_{M2}(x) = [|V_d(x)| + m^2 (N_cc(x) - 1), c(x) + m^2 max{|x|_1 - n, 0}]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct VectorFitnessM2 {
    pub f1: u64,
    pub f2: u64,
}

fn excess(inst: &Instance, s: &Summary) -> u64 {
    s.hamming.saturating_sub(inst.n()) as u64
}

pub fn scalar_from(inst: &Instance, s: &Summary) -> ScalarFitness {
    ScalarFitness(s.cost + penalty_unit(inst) * (2 * s.n_far as u64 + excess(inst, s)))
}

pub fn vector_m_from(inst: &Instance, s: &Summary) -> VectorFitnessM {
    VectorFitnessM { h: s.hamming, f: s.cost + penalty_unit(inst) * s.n_far as u64 }
}

pub fn vector_m2_from(inst: &Instance, s: &Summary, deficiency: usize) -> VectorFitnessM2 {
    let unit = penalty_unit(inst);
    VectorFitnessM2 { f1: deficiency as u64 + unit * (s.n_cc as u64 - 1), f2: s.cost + unit * excess(inst, s) }
}

/// Evaluates edge solutions with a reusable graph buffer.
#[derive(Debug)]
pub struct Evaluator {
    scratch: GraphScratch,
    cover_budget: u64,
}

impl Default for Evaluator {
    fn default() -> Self {
        Self { scratch: GraphScratch::new(), cover_budget: DEFAULT_COVER_BUDGET }
    }
}

impl Evaluator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_cover_budget(cover_budget: u64) -> Self {
        Self { scratch: GraphScratch::new(), cover_budget }
    }

    pub fn summary(&mut self, inst: &Instance, x: &EdgeSolution) -> Result<Summary> {
        self.scratch.load(inst, x)
    }

    pub fn scalar(&mut self, inst: &Instance, x: &EdgeSolution) -> Result<(ScalarFitness, Summary)> {
        let s = self.scratch.load(inst, x)?;
        Ok((scalar_from(inst, &s), s))
    }

    pub fn vector_m(&mut self, inst: &Instance, x: &EdgeSolution) -> Result<(VectorFitnessM, Summary)> {
        let s = self.scratch.load(inst, x)?;
        Ok((vector_m_from(inst, &s), s))
    }

    /// Also returns `|V_d(x)|`.
    pub fn vector_m2(&mut self, inst: &Instance, x: &EdgeSolution) -> Result<(VectorFitnessM2, Summary, usize)> {
        let s = self.scratch.load(inst, x)?;
        let vd = self.scratch.min_cover_loaded(self.cover_budget)?;
        Ok((vector_m2_from(inst, &s, vd), s, vd))
    }
}

pub fn f_one_plus_one(inst: &Instance, x: &EdgeSolution) -> Result<ScalarFitness> {
    Ok(Evaluator::new().scalar(inst, x)?.0)
}

pub fn f_m(inst: &Instance, x: &EdgeSolution) -> Result<VectorFitnessM> {
    Ok(Evaluator::new().vector_m(inst, x)?.0)
}

pub fn f_m2(inst: &Instance, x: &EdgeSolution) -> Result<VectorFitnessM2> {
    Ok(Evaluator::new().vector_m2(inst, x)?.0)
}

/// `f_vr(x) = c(x)`, with the empty-set penalty of [`vertex::cost`].
pub fn fitness_vr(inst: &Instance, x: &VertexSolution) -> u64 {
    vertex::cost(inst, x)
}

/// Outcome of comparing `y` against `z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    /// `y ≻ z`.
    StrictlyDominates,
    /// `z ≻ y`.
    StrictlyDominatedBy,
    /// Equal fitness vectors; each weakly dominates the other.
    Equivalent,
    Incomparable,
}

impl Verdict {
    /// `y ≽ z`.
    pub fn weakly_dominates(self) -> bool {
        matches!(self, Verdict::StrictlyDominates | Verdict::Equivalent)
    }
}

pub trait Dominance {
    type Fitness: Copy + Eq + Debug;

    /// `y ≽ z`.
    fn weakly(&self, y: &Self::Fitness, z: &Self::Fitness) -> bool;

    fn compare(&self, y: &Self::Fitness, z: &Self::Fitness) -> Verdict {
        match (self.weakly(y, z), self.weakly(z, y)) {
            (true, true) => {
                debug_assert_eq!(y, z, "mutual dominance between distinct vectors");
                Verdict::Equivalent
            }
            (true, false) => Verdict::StrictlyDominates,
            (false, true) => Verdict::StrictlyDominatedBy,
            (false, false) => Verdict::Incomparable,
        }
    }

    /// `y ≻ z`: weak dominance with distinct fitness vectors.
    fn strictly(&self, y: &Self::Fitness, z: &Self::Fitness) -> bool {
        y != z && self.weakly(y, z)
    }
}

/// `≽_GSEMO`: Hamming weights in `[0, n]` occupy separate slots; anything
/// heavier loses to anything lighter.
#[derive(Clone, Copy, Debug)]
pub struct GsemoOrder {
    pub n: usize,
}

impl Dominance for GsemoOrder {
    type Fitness = VectorFitnessM;

    fn weakly(&self, y: &VectorFitnessM, z: &VectorFitnessM) -> bool {
        let both_low = y.h <= self.n && z.h <= self.n;
        if both_low {
            y.h == z.h && y.f <= z.f
        } else {
            y.h < z.h || (y.h == z.h && y.f <= z.f)
        }
    }
}

/// `≽_GSEMO-1`: weights `n` and `n + 1` occupy separate slots; elsewhere the
/// weight closer to `n` wins, and between `n - k` and `n + k` the heavier one.
#[derive(Clone, Copy, Debug)]
pub struct Gsemo1Order {
    pub n: usize,
}

impl Dominance for Gsemo1Order {
    type Fitness = VectorFitnessM;

    fn weakly(&self, y: &VectorFitnessM, z: &VectorFitnessM) -> bool {
        let slot = |h: usize| h == self.n || h == self.n + 1;
        let same_and_better = y.h == z.h && y.f <= z.f;
        if slot(y.h) && slot(z.h) {
            return same_and_better;
        }
        let (dy, dz) = (y.h.abs_diff(self.n), z.h.abs_diff(self.n));
        dy < dz || (dy == dz && y.h > z.h) || same_and_better
    }
}

/// `≽_GSEMO-2`: `f^1 = 0` and `f^1 = 1` occupy separate slots; otherwise
/// lexicographic on `(f^1, f^2)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Gsemo2Order;

impl Dominance for Gsemo2Order {
    type Fitness = VectorFitnessM2;

    fn weakly(&self, y: &VectorFitnessM2, z: &VectorFitnessM2) -> bool {
        let same_and_better = y.f1 == z.f1 && y.f2 <= z.f2;
        if y.f1 <= 1 && z.f1 <= 1 {
            same_and_better
        } else {
            y.f1 < z.f1 || same_and_better
        }
    }
}
