//! N-star preferential-attachment network simulator.
//!
//! Each step activates one N-star (a center with `N - 1` peripherals) in one
//! of four ways: attach a new peripheral to a preferentially chosen
//! (N-1)-star, let a new vertex lead a uniform team of old vertices,
//! reactivate a preferentially chosen N-star, or activate a uniform team of
//! old vertices under a uniform center. The crate provides the simulator,
//! occupancy statistics, the limiting tables of the degree/weight
//! distribution and oracles that check them against each other.

pub mod cli;
pub mod error;
pub mod model;
pub mod rng;
pub mod special;
pub mod stats;
pub mod theory;
pub mod verify;

pub use error::{Error, Result};
pub use model::{simulate, Branch, GraphState, ModelParams, StarKey, StepOutcome};
pub use stats::{ensemble_mean, tally, EnsembleMean, Snapshot};
pub use theory::{derive_params, DerivedParams, TailConstants, TheoryCaps, TheoryTables};
