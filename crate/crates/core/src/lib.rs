//! Density profiles of sets of natural numbers and of their sumsets.
//!
//! A set `A ⊆ ℕ` has four asymptotic densities: the lower and upper density
//! of `A` and of `2A = A + A`. This crate builds sets with prescribed
//! profiles, estimates their profiles at finite depth, decides exactly which
//! profiles known constructions reach, and runs the seeded experiments that
//! check the probabilistic and diophantine estimates behind them.

pub mod constructors;
pub mod dioph;
pub mod error;
pub mod experiment;
pub mod montecarlo;
pub mod rational;
pub mod regions;
pub mod rng;
pub mod sets;
pub mod sumset;

pub use error::{Error, Result};
