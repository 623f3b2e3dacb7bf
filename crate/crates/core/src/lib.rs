//! Exact finite-scale computations for James-type norms built from families of sets.
//!
//! The crate covers set families and trees, the countably-intersected axioms, exact
//! norm evaluation, Talagrand's admissible-set construction and the Reznichenko tree system.

pub mod ci;
pub mod error;
pub mod family;
pub mod io;
pub mod norm;
pub mod rational;
pub mod reznichenko;
pub mod talagrand;

pub use error::{Error, Result};
pub use family::{AtomSet, FinVector, Ground, GroundSet, Provenance, SetFamily, WeightedSet};
pub use rational::Rational;
