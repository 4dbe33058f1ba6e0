//! Information structures for second-price auctions with uniform tie-breaking.
//!
//! The crate builds discrete information structures (private-private and
//! general) from a symmetric prior over value profiles, and verifies their
//! payoffs and Bayes-Nash equilibrium properties exactly by enumeration.

pub mod constructors;
pub mod coupling;
pub mod equilibrium;
pub mod error;
pub mod fixtures;
pub mod prior;
pub mod structure;
pub mod util;

pub use equilibrium::{evaluate, verify_bne, verify_strict, EquilibriumReport, PayoffPoint, StrategyProfile};
pub use error::{Error, Result};
pub use prior::{classify_prior, compute_stats, tie_count, PriorClass, PriorStats, SymmetricPrior};
pub use structure::{Alphabet, InfoStructure, JointBuilder, PredicateReport};
pub mod cli;
