//! Exact probabilistic finite automata and the finite-state channels built
//! from them.

pub mod capacity;
pub mod error;
pub mod fsmc;
pub mod gadgets;
pub mod pfa;
pub mod rational;
pub mod witness;

pub use error::{Error, Result};
pub use pfa::{Pfa, ProbVector, StochMatrix, Word};
pub use rational::Rational;
