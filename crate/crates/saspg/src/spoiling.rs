//! Spoiling strategies for Player 2 on the losing region: a history-dependent
//! machine composed of positive-attractor moves and recursive spoiling per
//! the derivation's case split, plus a memoryless spoiler found by
//! enumeration on small games.

use serde::Serialize;
use thiserror::Error;

use crate::attractor::{pos_attractor, sure_attractor};
use crate::counter::mealy_from_product;
use crate::game::{Owner, Player, StochasticGame, VertexId};
use crate::oracle::{fix_strategy, memoryless_strategies, OracleBounds, OracleError};
use crate::qualitative::extract_as_spoiler;
use crate::set::VertexSet;
use crate::solver::{conjunction_analysis, solve_sas, DerivationTrace};
use crate::strategy::{MealyStrategy, MemorylessStrategy, StrategyMachine};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpoilError {
    #[error("trace does not match the game")]
    TraceMismatch,
}

#[derive(Debug, Clone, Serialize)]
pub enum SpoilNode {
    /// Nothing to spoil.
    Leaf,
    Even(Box<EvenSpoil>),
    Odd(Box<OddSpoil>),
}

/// Even top layer: outside the almost-sure conjunction region the product
/// spoiler plays; inside, the closure losers and their positive attractor
/// are handled, and the rest recurses.
#[derive(Debug, Clone, Serialize)]
pub struct EvenSpoil {
    owner_p2: Vec<bool>,
    /// Complement of the almost-sure conjunction region.
    losing0: VertexSet,
    product_spoiler: MealyStrategy,
    #[serde(skip)]
    mealy_state: usize,
    /// Closure losers mapped into node ids.
    lost: VertexSet,
    /// Positive attractor to the losers (within the conjunction region).
    b: VertexSet,
    attr_moves: Vec<Option<VertexId>>,
    lost_machine: SpoilNode,
    lost_map: Vec<Option<VertexId>>,
    rest_machine: SpoilNode,
    rest_map: Vec<Option<VertexId>>,
    #[serde(skip)]
    region: u8,
    fallback: Vec<Option<VertexId>>,
}

/// Odd top layer. When nothing survives below, the composition plays the
/// positive attractor to the top class and recurses in the remainder; when
/// part of the game is winning, spoiling lives entirely in the closed
/// remainder.
#[derive(Debug, Clone, Serialize)]
pub struct OddSpoil {
    owner_p2: Vec<bool>,
    z: VertexSet,
    a: VertexSet,
    attr_moves: Vec<Option<VertexId>>,
    sub_machine: SpoilNode,
    sub_map: Vec<Option<VertexId>>,
    #[serde(skip)]
    region: u8,
    fallback: Vec<Option<VertexId>>,
}

/// Executable Player-2 machine achieving positive violation of the combined
/// objective from every losing vertex.
#[derive(Debug, Clone, Serialize)]
pub struct SpoilingStrategy {
    pub root: SpoilNode,
}

pub fn synth_spoiling(g: &StochasticGame, trace: &DerivationTrace) -> Result<SpoilingStrategy, SpoilError> {
    if trace.root.game != *g {
        return Err(SpoilError::TraceMismatch);
    }
    Ok(SpoilingStrategy { root: build(g) })
}

fn first_moves(g: &StochasticGame) -> Vec<Option<VertexId>> {
    g.vertices()
        .map(|v| if g.owner(v) == Owner::P2 { g.succ(v).first().copied() } else { None })
        .collect()
}

fn build(g: &StochasticGame) -> SpoilNode {
    let n = g.n();
    let real = g.real_vertices();
    if real.is_empty() {
        return SpoilNode::Leaf;
    }
    let d = g.vertices().map(|v| g.prio1(v)).max().expect("nonempty");
    let owner_p2: Vec<bool> = g.vertices().map(|v| g.owner(v) == Owner::P2).collect();
    if d % 2 == 0 {
        let analysis = conjunction_analysis(g);
        let spoiler_moves = extract_as_spoiler(
            &analysis.product.game,
            Player::P1,
            &analysis.product.omega12,
            &analysis.as_region,
        );
        let product_spoiler = mealy_from_product(g, &analysis.product, &spoiler_moves);
        let losing0 = analysis.w_as.complement();
        // Mirror the solver inside the conjunction region.
        let restricted = g.restrict(&analysis.w_as).expect("trap");
        let rn = restricted.game.n();
        let z = restricted.game.vertices_with(restricted.game.omega1(), d);
        let a = sure_attractor(&restricted.game, Player::P1, &z);
        let closure = restricted.game.subgame_closure(&a.region.complement()).expect("closure");
        let sub_res = solve_sas(&closure.game);
        let lost_closure = sub_res.w2;
        let lost_restricted = VertexSet::from_iter(
            rn,
            lost_closure.iter().map(|v| closure.to_parent[v].expect("losers are real")),
        );
        let b_restricted = pos_attractor(&restricted.game, Player::P2, &lost_restricted);
        // Map everything into node ids.
        let mut lost = VertexSet::empty(n);
        let mut b = VertexSet::empty(n);
        let mut attr_moves = vec![None; n];
        for v in lost_restricted.iter() {
            lost.insert(restricted.to_parent[v]);
        }
        for v in b_restricted.region.iter() {
            b.insert(restricted.to_parent[v]);
            if let Some(m) = b_restricted.strategy[v] {
                attr_moves[restricted.to_parent[v]] = Some(restricted.to_parent[m]);
            }
        }
        let mut lost_map = vec![None; n];
        for (c, p) in closure.to_parent.iter().enumerate() {
            if let Some(r) = p {
                lost_map[restricted.to_parent[*r]] = Some(c);
            }
        }
        let lost_machine = build(&closure.game);
        let rest_set = b_restricted.region.complement();
        let (rest_machine, rest_map) = if rest_set.is_empty() {
            (SpoilNode::Leaf, vec![None; n])
        } else {
            let tail = restricted.game.restrict(&rest_set).expect("trap");
            let mut map = vec![None; n];
            for (i, &r) in tail.to_parent.iter().enumerate() {
                map[restricted.to_parent[r]] = Some(i);
            }
            (build(&tail.game), map)
        };
        SpoilNode::Even(Box::new(EvenSpoil {
            owner_p2,
            losing0,
            product_spoiler,
            mealy_state: 0,
            lost,
            b,
            attr_moves,
            lost_machine,
            lost_map,
            rest_machine,
            rest_map,
            region: 0,
            fallback: first_moves(g),
        }))
    } else {
        let z = g.vertices_with(g.omega1(), d);
        let a = pos_attractor(g, Player::P2, &z);
        let rest = a.region.complement();
        let sub = g.restrict(&rest).expect("trap");
        let sub_res = solve_sas(&sub.game);
        let mut target = VertexSet::empty(n);
        for v in sub_res.w1.iter() {
            target.insert(sub.to_parent[v]);
        }
        for (i, &p) in sub.to_parent.iter().enumerate() {
            if sub.game.is_sink(i) {
                target.insert(p);
            }
        }
        let b = sure_attractor(g, Player::P1, &target);
        if b.region.is_disjoint_from(&real) {
            // Nothing winning below: attract to the top class, spoil the
            // remainder recursively.
            let mut sub_map = vec![None; n];
            for (i, &p) in sub.to_parent.iter().enumerate() {
                sub_map[p] = Some(i);
            }
            SpoilNode::Odd(Box::new(OddSpoil {
                owner_p2,
                attr_moves: a.strategy.clone(),
                z,
                a: a.region,
                sub_machine: build(&sub.game),
                sub_map,
                region: 0,
                fallback: first_moves(g),
            }))
        } else {
            // Winners exist: every loser sits inside the closed remainder.
            let closure = g.subgame_closure(&b.region.complement()).expect("closure");
            let mut sub_map = vec![None; n];
            for (i, p) in closure.to_parent.iter().enumerate() {
                if let Some(v) = p {
                    sub_map[*v] = Some(i);
                }
            }
            SpoilNode::Odd(Box::new(OddSpoil {
                owner_p2,
                attr_moves: vec![None; n],
                z: VertexSet::empty(n),
                a: VertexSet::empty(n),
                sub_machine: build(&closure.game),
                sub_map,
                region: 0,
                fallback: first_moves(g),
            }))
        }
    }
}

impl SpoilNode {
    fn reset(&mut self) {
        match self {
            SpoilNode::Leaf => {}
            SpoilNode::Even(m) => {
                m.mealy_state = m.product_spoiler.initial;
                m.region = 0;
                m.lost_machine.reset();
                m.rest_machine.reset();
            }
            SpoilNode::Odd(m) => {
                m.region = 0;
                m.sub_machine.reset();
            }
        }
    }

    fn step(&mut self, v: VertexId) -> Option<VertexId> {
        match self {
            SpoilNode::Leaf => None,
            SpoilNode::Even(m) => m.step(v),
            SpoilNode::Odd(m) => m.step(v),
        }
    }
}

impl EvenSpoil {
    fn step(&mut self, v: VertexId) -> Option<VertexId> {
        let spoiler_move = self.product_spoiler.mv(self.mealy_state, v);
        self.mealy_state = self.product_spoiler.next_memory(self.mealy_state, v);
        let mv = if self.losing0.contains(v) {
            self.region = 0;
            spoiler_move
        } else if self.lost.contains(v) {
            if self.region != 1 {
                self.lost_machine.reset();
            }
            self.region = 1;
            self.lost_machine.step(self.lost_map[v].expect("loser maps into the closure"))
        } else if self.b.contains(v) {
            self.region = 2;
            self.attr_moves[v]
        } else if let Some(t) = self.rest_map[v] {
            if self.region != 3 {
                self.rest_machine.reset();
            }
            self.region = 3;
            self.rest_machine.step(t)
        } else {
            self.fallback[v]
        };
        if self.owner_p2[v] {
            mv.or(self.fallback[v])
        } else {
            None
        }
    }
}

impl OddSpoil {
    fn step(&mut self, v: VertexId) -> Option<VertexId> {
        let mv = if self.z.contains(v) {
            self.region = 0;
            self.fallback[v]
        } else if self.a.contains(v) {
            self.region = 0;
            self.attr_moves[v]
        } else if let Some(t) = self.sub_map[v] {
            if self.region != 1 {
                self.sub_machine.reset();
            }
            self.region = 1;
            self.sub_machine.step(t)
        } else {
            self.fallback[v]
        };
        if self.owner_p2[v] {
            mv.or(self.fallback[v])
        } else {
            None
        }
    }
}

impl StrategyMachine for SpoilingStrategy {
    fn reset(&mut self) {
        self.root.reset();
    }

    fn step(&mut self, v: VertexId) -> Option<VertexId> {
        self.root.step(v)
    }
}

/// Searches the environment's memoryless strategies for one that keeps every
/// losing vertex losing (memoryless spoiling suffices, so one exists).
pub fn find_memoryless_spoiler(
    g: &StochasticGame,
    bounds: &OracleBounds,
) -> Result<Option<MemorylessStrategy>, OracleError> {
    let w1 = solve_sas(g).w1;
    for tau in memoryless_strategies(g, Player::P2, bounds.max_strategies)? {
        let fixed = fix_strategy(g, Player::P2, &tau)?;
        if solve_sas(&fixed).w1 == w1 {
            return Ok(Some(tau));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::game_from_parts;

    #[test]
    fn all_odd_sure_objective_spoils_arbitrarily() {
        // Ω1 constant 1: any strategy spoils; the machine still produces
        // legal moves for Player 2 everywhere.
        let g = game_from_parts(
            &[Owner::P2, Owner::P2],
            &[1, 1],
            &[0, 0],
            &[(0, 1), (1, 0), (1, 1)],
            &[],
        )
        .unwrap();
        let res = solve_sas(&g);
        assert!(res.w1.is_empty());
        let mut m = synth_spoiling(&g, &res.trace).unwrap();
        for v in [0, 1, 1, 0, 1] {
            let mv = m.step(v).expect("P2 move");
            assert!(g.succ(v).contains(&mv));
        }
    }

    #[test]
    fn attractor_moves_inside_positive_attractor() {
        // d odd with the whole losing region equal to the adversary's
        // positive attractor: the machine plays attractor moves inside it.
        let g = game_from_parts(
            &[Owner::P2, Owner::P1],
            &[0, 1],
            &[0, 0],
            &[(0, 1), (1, 1)],
            &[],
        )
        .unwrap();
        let res = solve_sas(&g);
        assert!(res.w1.is_empty());
        let mut m = synth_spoiling(&g, &res.trace).unwrap();
        let mv = m.step(0).expect("attractor move at the P2 vertex");
        assert_eq!(mv, 1, "positive attractor directs toward the odd class");
    }

    #[test]
    fn memoryless_spoiler_exists_on_losing_games() {
        let g = game_from_parts(
            &[Owner::P2, Owner::P1],
            &[0, 1],
            &[0, 0],
            &[(0, 0), (0, 1), (1, 1)],
            &[],
        )
        .unwrap();
        let tau = find_memoryless_spoiler(&g, &OracleBounds::default()).unwrap().unwrap();
        // The spoiler must steer vertex 0 into the odd loop.
        assert_eq!(tau.mv(0), Some(1));
    }
}
