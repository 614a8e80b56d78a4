//! Executable strategy representations: memoryless maps and finite-memory
//! Mealy machines.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{StochasticGame, VertexId};
use crate::set::VertexSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StrategyError {
    #[error("move {mv} at vertex {vertex} is not an edge")]
    IllegalMove { vertex: VertexId, mv: VertexId },
    #[error("strategy undefined at vertex {vertex} (memory {memory})")]
    Undefined { vertex: VertexId, memory: usize },
}

/// A positional strategy: one chosen successor per covered vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemorylessStrategy {
    pub moves: Vec<Option<VertexId>>,
}

impl MemorylessStrategy {
    pub fn empty(n: usize) -> Self {
        MemorylessStrategy { moves: vec![None; n] }
    }

    pub fn from_moves(moves: Vec<Option<VertexId>>) -> Self {
        MemorylessStrategy { moves }
    }

    pub fn mv(&self, v: VertexId) -> Option<VertexId> {
        self.moves.get(v).copied().flatten()
    }

    /// Every chosen successor must be a legal edge.
    pub fn validate(&self, g: &StochasticGame) -> Result<(), StrategyError> {
        for (v, mv) in self.moves.iter().enumerate() {
            if let Some(m) = mv {
                if !g.succ(v).contains(m) {
                    return Err(StrategyError::IllegalMove { vertex: v, mv: *m });
                }
            }
        }
        Ok(())
    }

    pub fn to_mealy(&self) -> MealyStrategy {
        MealyStrategy {
            memory: 1,
            initial: 0,
            update: vec![vec![0; self.moves.len()]],
            moves: vec![self.moves.clone()],
        }
    }
}

/// A finite-memory strategy: `moves[m][v]` is played on arrival at `v` with
/// memory `m`, then the memory advances to `update[m][v]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MealyStrategy {
    pub memory: usize,
    pub initial: usize,
    pub update: Vec<Vec<usize>>,
    pub moves: Vec<Vec<Option<VertexId>>>,
}

impl MealyStrategy {
    pub fn memory_count(&self) -> usize {
        self.memory
    }

    pub fn mv(&self, memory: usize, v: VertexId) -> Option<VertexId> {
        self.moves[memory][v]
    }

    pub fn next_memory(&self, memory: usize, v: VertexId) -> usize {
        self.update[memory][v]
    }

    pub fn validate(&self, g: &StochasticGame) -> Result<(), StrategyError> {
        for m in 0..self.memory {
            for v in g.vertices() {
                if let Some(target) = self.moves[m][v] {
                    if !g.succ(v).contains(&target) {
                        return Err(StrategyError::IllegalMove { vertex: v, mv: target });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Either finite-strategy form, for checkers that accept both.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum FiniteStrategy {
    Memoryless(MemorylessStrategy),
    Mealy(MealyStrategy),
}

impl FiniteStrategy {
    pub fn as_mealy(&self) -> MealyStrategy {
        match self {
            FiniteStrategy::Memoryless(m) => m.to_mealy(),
            FiniteStrategy::Mealy(m) => m.clone(),
        }
    }

    pub fn memory_count(&self) -> usize {
        match self {
            FiniteStrategy::Memoryless(_) => 1,
            FiniteStrategy::Mealy(m) => m.memory,
        }
    }
}

/// Live stepping interface shared by finite and infinite-memory machines: the
/// machine consumes the play vertex by vertex and emits a move whenever the
/// vertex is owned by its player.
pub trait StrategyMachine {
    fn reset(&mut self);
    fn step(&mut self, v: VertexId) -> Option<VertexId>;
}

/// Runs a Mealy strategy as a live machine.
#[derive(Debug, Clone)]
pub struct MealyRunner {
    pub table: MealyStrategy,
    pub state: usize,
}

impl MealyRunner {
    pub fn new(table: MealyStrategy) -> Self {
        let state = table.initial;
        MealyRunner { table, state }
    }
}

impl StrategyMachine for MealyRunner {
    fn reset(&mut self) {
        self.state = self.table.initial;
    }

    fn step(&mut self, v: VertexId) -> Option<VertexId> {
        let mv = self.table.mv(self.state, v);
        self.state = self.table.next_memory(self.state, v);
        mv
    }
}

/// Total-on-region check used by synthesizers and checkers.
pub fn covers_region(
    g: &StochasticGame,
    strategy: &MemorylessStrategy,
    region: &VertexSet,
    owner: crate::game::Player,
) -> bool {
    region
        .iter()
        .filter(|&v| g.owner(v).is_player(owner))
        .all(|v| strategy.mv(v).is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{infinite_memory_mdp, Player};

    #[test]
    fn memoryless_validation() {
        let g = infinite_memory_mdp();
        let ok = MemorylessStrategy::from_moves(vec![Some(1), None, Some(0), Some(0)]);
        assert!(ok.validate(&g).is_ok());
        let bad = MemorylessStrategy::from_moves(vec![Some(2), None, None, None]);
        assert_eq!(bad.validate(&g).unwrap_err(), StrategyError::IllegalMove { vertex: 0, mv: 2 });
        assert!(covers_region(&g, &ok, &VertexSet::full(4), Player::P1));
    }

    #[test]
    fn mealy_runner_steps() {
        // Two memory states alternating the choice at vertex 0.
        let g = infinite_memory_mdp();
        let table = MealyStrategy {
            memory: 2,
            initial: 0,
            update: vec![vec![1; 4], vec![0; 4]],
            moves: vec![
                vec![Some(1), None, Some(0), Some(0)],
                vec![Some(3), None, Some(0), Some(0)],
            ],
        };
        assert!(table.validate(&g).is_ok());
        let mut runner = MealyRunner::new(table);
        assert_eq!(runner.step(0), Some(1));
        assert_eq!(runner.step(0), Some(3));
        runner.reset();
        assert_eq!(runner.step(0), Some(1));
    }
}
