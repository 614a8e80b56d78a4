//! Stochastic two-player parity games with a combined objective: sure
//! satisfaction of a first parity condition and almost-sure satisfaction of a
//! second one.
//!
//! The crate provides the game-graph data model with exact rational transition
//! probabilities, attractor and trap computations, the register construction
//! turning two parity conditions into one, qualitative solvers (Zielonka,
//! almost-sure parity, MDP end components), the recursive sure-almost-sure
//! solver with a full derivation trace, strategy synthesis (memoryless, Mealy
//! and counter-switching machines), certificate generation and checking, a
//! seeded simulator, and brute-force oracles for desk-scale validation.

pub mod attractor;
pub mod automata;
pub mod certificate;
pub mod conjunction;
pub mod counter;
pub mod dot;
pub mod game;
pub mod generate;
pub mod mdp;
pub mod oracle;
pub mod qualitative;
pub mod registers;
mod scc;
pub mod set;
pub mod simulate;
pub mod solver;
pub mod spg;
pub mod spoiling;
pub mod strategy;
pub mod synthesis;
pub mod zielonka;

pub use game::{Owner, Player, Prob, StochasticGame, VertexId, VertexRecord};
pub use set::VertexSet;
