//! Evolutionary algorithms for the minimum-cost 2-hop spanning tree problem
//! with edge weights in {1, 2}, together with exact oracles, an
//! approximation certifier and an experiment harness.
//!
//! Vertex 0 is the root. Edge-based solutions are bit strings over the
//! `m = n(n+1)/2` edges in lexicographic pair order; vertex-based solutions
//! are bit strings over the `n` non-root vertices.

pub mod algorithms;
pub mod bits;
pub mod certifier;
mod cover;
pub mod edge;
pub mod error;
pub mod fitness;
pub mod gen;
pub mod graph;
pub mod harness;
pub mod oracle;
pub mod tree;
pub mod vertex;

pub use algorithms::{Algorithm, Milestones, Representation, RunOutcome, RunSpec, Targets};
pub use certifier::{certify_three_halves, Certificate, Move, VertexPartition};
pub use edge::{DeficiencyClass, EdgeMetrics, EdgeSolution};
pub use error::{Error, Result};
pub use graph::{Instance, Vertex, Weight, ROOT};
pub use harness::{ExperimentConfig, InstanceSource, RunRecord};
pub use oracle::Optimum;
pub use tree::HopTree;
pub use vertex::VertexSolution;
