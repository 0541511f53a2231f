//! Simulation toolkit for conditionally Poissonian random graphs with
//! power-law capacities of tail exponent `τ - 1`, `τ ∈ (2, 3)`.
//!
//! The crate generates graphs, computes their core and tier structure,
//! evaluates the limit predictions for giant size and distances, and runs
//! the experiment families that compare the two.

pub mod alias;
pub mod branching;
pub mod capacity;
pub mod engine;
pub mod error;
pub mod experiment;
pub mod generator;
pub mod graph;
pub mod rng;
pub mod stats;
pub mod structure;
pub mod theory;

pub use capacity::{sample_capacities, CapacitySequence, SelectionDistribution};
pub use engine::{connected_components, ComponentLabeling, InducedSubgraph};
pub use error::{Error, Result};
pub use graph::{GraphHeader, MultiGraph};
pub use structure::{CoreParameters, Ell};
