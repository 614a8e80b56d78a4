//! Special-case synthesis: memoryless strategies when the sure condition is
//! coBüchi, and linear finite-memory Mealy strategies when the almost-sure
//! condition is Büchi.

use thiserror::Error;

use crate::attractor::{pos_attractor, sure_attractor};
use crate::game::{Owner, Player, StochasticGame, VertexId};
use crate::qualitative::{as_winning_region, extract_as_strategy};
use crate::set::VertexSet;
use crate::solver::{solve_sas, DerivationTrace};
use crate::strategy::{MealyStrategy, MemorylessStrategy};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpecialSynthError {
    #[error("first priority function is not coBüchi (vertex {vertex} has priority {prio})")]
    NotCoBuchi { vertex: VertexId, prio: u32 },
    #[error("second priority function is not Büchi (vertex {vertex} has priority {prio})")]
    NotBuchi { vertex: VertexId, prio: u32 },
    #[error("winning region is empty")]
    EmptyWinningRegion,
    #[error("trace does not match the game")]
    TraceMismatch,
}

/// Memoryless sure-coBüchi almost-sure-parity strategy on the winning
/// region: inside the subgame winners an almost-sure strategy for the second
/// objective alone suffices (the sure condition is trivial there), the sure
/// attractor funnels the middle region, and the closed remainder recurses.
pub fn synth_memoryless_cobuchi(
    g: &StochasticGame,
    trace: &DerivationTrace,
) -> Result<MemorylessStrategy, SpecialSynthError> {
    if trace.root.game != *g {
        return Err(SpecialSynthError::TraceMismatch);
    }
    if let Some(v) = g.vertices().find(|&v| g.prio1(v) > 1) {
        return Err(SpecialSynthError::NotCoBuchi { vertex: v, prio: g.prio1(v) });
    }
    let w1 = &trace.root.w1;
    if w1.is_empty() {
        return Err(SpecialSynthError::EmptyWinningRegion);
    }
    let r = g.restrict(w1).expect("winning region is a trap for Player 2");
    let inner = cobuchi_moves(&r.game);
    let mut moves = vec![None; g.n()];
    for (v, mv) in inner.iter().enumerate() {
        if let Some(m) = mv {
            moves[r.to_parent[v]] = Some(r.to_parent[*m]);
        }
    }
    Ok(MemorylessStrategy::from_moves(moves))
}

/// Memoryless moves on an all-winning game with first priorities in {0,1}.
fn cobuchi_moves(g: &StochasticGame) -> Vec<Option<VertexId>> {
    let n = g.n();
    let real = g.real_vertices();
    if real.is_empty() {
        return vec![None; n];
    }
    let d = g.vertices().map(|v| g.prio1(v)).max().expect("nonempty");
    if d == 0 {
        // The sure objective is trivially satisfied: any memoryless
        // almost-sure strategy for the second parity objective works.
        let region = as_winning_region(g, Player::P1, g.omega2());
        debug_assert_eq!(region, g.all_vertices(), "winning games are almost-sure winning");
        return extract_as_strategy(g, Player::P1, g.omega2(), &region);
    }
    let z = g.vertices_with(g.omega1(), d);
    let a = pos_attractor(g, Player::P2, &z);
    let sub = g.restrict(&a.region.complement()).expect("trap");
    let sub_res = solve_sas(&sub.game);
    let mut target = VertexSet::empty(n);
    let mut w1p = VertexSet::empty(n);
    for v in sub_res.w1.iter() {
        target.insert(sub.to_parent[v]);
        w1p.insert(sub.to_parent[v]);
    }
    for (i, &p) in sub.to_parent.iter().enumerate() {
        if sub.game.is_sink(i) {
            target.insert(p);
        }
    }
    let b = sure_attractor(g, Player::P1, &target);
    let mut moves = vec![None; n];
    // Winners of the subgame: almost-sure moves for the second objective
    // within their own restriction (no odd first priorities remain there).
    if !w1p.is_empty() {
        let rw = g.restrict(&w1p).expect("subgame winners form a trap");
        let region = as_winning_region(&rw.game, Player::P1, rw.game.omega2());
        debug_assert_eq!(region, rw.game.all_vertices());
        let inner = extract_as_strategy(&rw.game, Player::P1, rw.game.omega2(), &region);
        for (v, mv) in inner.iter().enumerate() {
            if let Some(m) = mv {
                moves[rw.to_parent[v]] = Some(rw.to_parent[*m]);
            }
        }
    }
    // Middle region: sure attractor toward the winners (or absorption).
    for v in b.region.difference(&target).iter() {
        if g.owner(v) == Owner::P1 {
            moves[v] = b.strategy[v];
        }
    }
    // Closed remainder.
    let rest = b.region.complement();
    if !rest.is_empty() {
        let closure = g.subgame_closure(&rest).expect("closure precondition");
        let inner = cobuchi_moves(&closure.game);
        for (v, mv) in inner.iter().enumerate() {
            if let (Some(m), Some(pv)) = (mv, closure.to_parent[v]) {
                moves[pv] = closure.to_parent[*m];
            }
        }
    }
    moves
}

/// Finite-memory strategy for sure parity combined with an almost-sure
/// Büchi condition, with memory linear in `|V| * d1`.
pub fn synth_finite_buchi(
    g: &StochasticGame,
    trace: &DerivationTrace,
) -> Result<MealyStrategy, SpecialSynthError> {
    if trace.root.game != *g {
        return Err(SpecialSynthError::TraceMismatch);
    }
    if let Some(v) = g.vertices().find(|&v| !(1..=2).contains(&g.prio2(v))) {
        return Err(SpecialSynthError::NotBuchi { vertex: v, prio: g.prio2(v) });
    }
    let w1 = &trace.root.w1;
    if w1.is_empty() {
        return Err(SpecialSynthError::EmptyWinningRegion);
    }
    let r = g.restrict(w1).expect("winning region is a trap for Player 2");
    let inner = buchi_mealy(&r.game);
    // Remap the table to original vertex ids.
    let n = g.n();
    let mut update = vec![vec![0usize; n]; inner.memory];
    let mut moves = vec![vec![None; n]; inner.memory];
    for m in 0..inner.memory {
        for (v, &pv) in r.to_parent.iter().enumerate() {
            update[m][pv] = inner.update[m][v];
            moves[m][pv] = inner.moves[m][v].map(|t| r.to_parent[t]);
        }
    }
    Ok(MealyStrategy { memory: inner.memory, initial: inner.initial, update, moves })
}

/// Mealy construction on an all-winning game with a Büchi second condition.
fn buchi_mealy(g: &StochasticGame) -> MealyStrategy {
    let n = g.n();
    let real = g.real_vertices();
    let d1 = g.vertices().map(|v| g.prio1(v)).max().unwrap_or(0);
    if real.is_empty() || d1 <= 1 {
        // Memoryless suffices: trivial sure condition or coBüchi.
        return MemorylessStrategy::from_moves(cobuchi_moves(g)).to_mealy();
    }
    if d1 % 2 == 0 {
        // Play the closed remainder's machine in B; on the attractor, walk
        // to the top class; after each top-class visit, boost the memoryless
        // almost-sure Büchi strategy for `n` rounds.
        let z = g.vertices_with(g.omega1(), d1);
        let a = sure_attractor(g, Player::P1, &z);
        let rest = a.region.complement();
        let (sub, sub_map) = closure_machine(g, &rest, buchi_mealy);
        let boost_region = as_winning_region(g, Player::P1, g.omega2());
        debug_assert_eq!(boost_region, g.all_vertices());
        let sigma_b = extract_as_strategy(g, Player::P1, g.omega2(), &boost_region);
        let rounds = n.max(1);
        // Memory: one state per sub-machine state, then boost countdowns.
        let sub_m = sub.memory;
        let memory = sub_m + rounds.saturating_sub(1);
        let boost_id = |i: usize| sub_m + i - 1; // boost with i rounds left, i in 1..rounds
        let mut update = vec![vec![0usize; n]; memory];
        let mut moves = vec![vec![None; n]; memory];
        for mem in 0..memory {
            for v in 0..n {
                let in_boost = mem >= sub_m;
                if z.contains(v) {
                    moves[mem][v] = sigma_b[v];
                    update[mem][v] = if rounds > 1 { boost_id(rounds - 1) } else { sub.initial };
                } else if in_boost {
                    moves[mem][v] = sigma_b[v];
                    let left = mem - sub_m + 1;
                    update[mem][v] = if left > 1 { boost_id(left - 1) } else { sub.initial };
                } else if a.region.contains(v) {
                    moves[mem][v] = a.strategy[v];
                    update[mem][v] = sub.initial;
                } else {
                    let sv = sub_map[v].expect("non-attractor vertex maps into the closure");
                    moves[mem][v] = sub.moves[mem][sv].and_then(|t| sub_map.iter().position(|&x| x == Some(t)));
                    update[mem][v] = sub.update[mem][sv];
                }
            }
        }
        MealyStrategy { memory, initial: sub.initial, update, moves }
    } else {
        // Odd top layer: three regions with two nested machines.
        let z = g.vertices_with(g.omega1(), d1);
        let a = pos_attractor(g, Player::P2, &z);
        let subr = g.restrict(&a.region.complement()).expect("trap");
        let sub_res = solve_sas(&subr.game);
        let mut target = VertexSet::empty(n);
        let mut w1p = VertexSet::empty(n);
        for v in sub_res.w1.iter() {
            target.insert(subr.to_parent[v]);
            w1p.insert(subr.to_parent[v]);
        }
        for (i, &p) in subr.to_parent.iter().enumerate() {
            if subr.game.is_sink(i) {
                target.insert(p);
            }
        }
        let b = sure_attractor(g, Player::P1, &target);
        let m1 = if w1p.is_empty() {
            MealyStrategy { memory: 1, initial: 0, update: vec![vec![0; n]], moves: vec![vec![None; n]] }
        } else {
            let rw = g.restrict(&w1p).expect("trap");
            let mut inner = buchi_mealy(&rw.game);
            remap_mealy(&mut inner, &rw.to_parent, n);
            inner
        };
        let rest = b.region.complement();
        let (m3, m3_map) = closure_machine(g, &rest, buchi_mealy);
        // Memory = disjoint sum of the two nested memories; region routing
        // resets the inactive machine to its initial state.
        let memory = (m1.memory + m3.memory).max(1);
        let off3 = m1.memory;
        let mut update = vec![vec![0usize; n]; memory];
        let mut moves = vec![vec![None; n]; memory];
        for mem in 0..memory {
            for v in 0..n {
                if w1p.contains(v) {
                    let state = if mem < m1.memory { mem } else { m1.initial };
                    moves[mem][v] = m1.moves[state][v];
                    update[mem][v] = m1.update[state][v];
                } else if b.region.contains(v) {
                    moves[mem][v] = b.strategy[v];
                    update[mem][v] = if m1.memory > 0 { m1.initial } else { 0 };
                } else if let Some(sv) = m3_map[v] {
                    let state = if mem >= off3 { mem - off3 } else { m3.initial };
                    moves[mem][v] = m3.moves[state][sv].and_then(|t| m3_map.iter().position(|&x| x == Some(t)));
                    update[mem][v] = off3 + m3.update[state][sv];
                }
            }
        }
        let initial = if m1.memory > 0 { m1.initial } else { 0 };
        MealyStrategy { memory, initial, update, moves }
    }
}

/// Builds the nested machine for the subgame closure of `rest` and the map
/// from parent vertices into it.
fn closure_machine<F>(g: &StochasticGame, rest: &VertexSet, inner: F) -> (MealyStrategy, Vec<Option<VertexId>>)
where
    F: Fn(&StochasticGame) -> MealyStrategy,
{
    let n = g.n();
    if rest.is_empty() {
        return (MealyStrategy { memory: 1, initial: 0, update: vec![vec![]], moves: vec![vec![]] }, vec![None; n]);
    }
    let closure = g.subgame_closure(rest).expect("closure precondition");
    let mut map = vec![None; n];
    for (i, p) in closure.to_parent.iter().enumerate() {
        if let Some(v) = p {
            map[*v] = Some(i);
        }
    }
    (inner(&closure.game), map)
}

fn remap_mealy(m: &mut MealyStrategy, to_parent: &[VertexId], n_parent: usize) {
    let mut update = vec![vec![0usize; n_parent]; m.memory];
    let mut moves = vec![vec![None; n_parent]; m.memory];
    for mem in 0..m.memory {
        for (v, &pv) in to_parent.iter().enumerate() {
            update[mem][pv] = m.update[mem][v];
            moves[mem][pv] = m.moves[mem][v].map(|t| to_parent[t]);
        }
    }
    m.update = update;
    m.moves = moves;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::game_from_parts;
    use crate::oracle::check_fixed_strategy_sas;
    use crate::strategy::FiniteStrategy;

    #[test]
    fn trivial_cobuchi_is_the_as_strategy() {
        let g = game_from_parts(
            &[Owner::P1, Owner::P1],
            &[0, 0],
            &[1, 2],
            &[(0, 1), (1, 0), (1, 1)],
            &[],
        )
        .unwrap();
        let res = solve_sas(&g);
        let sigma = synth_memoryless_cobuchi(&g, &res.trace).unwrap();
        assert!(sigma.validate(&g).is_ok());
        let ok = check_fixed_strategy_sas(&g, &FiniteStrategy::Memoryless(sigma), &res.w1).unwrap();
        assert!(ok);
    }

    #[test]
    fn two_vertex_example_picks_the_safe_loop() {
        // v0 (P1, (1,0)) with edges to itself and to v1 (P1, (0,2))
        // self-loop: the only sure-coBüchi choice is moving to v1.
        let g = game_from_parts(
            &[Owner::P1, Owner::P1],
            &[1, 0],
            &[0, 2],
            &[(0, 0), (0, 1), (1, 1)],
            &[],
        )
        .unwrap();
        let res = solve_sas(&g);
        assert_eq!(res.w1.count(), 2);
        let sigma = synth_memoryless_cobuchi(&g, &res.trace).unwrap();
        assert_eq!(sigma.mv(0), Some(1));
    }

    #[test]
    fn rejects_non_cobuchi_priorities() {
        let g = game_from_parts(&[Owner::P1], &[2], &[1], &[(0, 0)], &[]).unwrap();
        let res = solve_sas(&g);
        assert!(matches!(
            synth_memoryless_cobuchi(&g, &res.trace),
            Err(SpecialSynthError::NotCoBuchi { vertex: 0, prio: 2 })
        ));
    }

    #[test]
    fn buchi_low_index_is_memoryless() {
        let g = game_from_parts(
            &[Owner::P1, Owner::P1],
            &[1, 0],
            &[1, 2],
            &[(0, 0), (0, 1), (1, 1)],
            &[],
        )
        .unwrap();
        let res = solve_sas(&g);
        let mealy = synth_finite_buchi(&g, &res.trace).unwrap();
        assert_eq!(mealy.memory, 1);
        let ok = check_fixed_strategy_sas(&g, &FiniteStrategy::Mealy(mealy), &res.w1).unwrap();
        assert!(ok);
    }

    #[test]
    fn buchi_even_top_uses_bounded_memory() {
        // d1 = 2 forces the boost construction.
        let g = game_from_parts(
            &[Owner::P1, Owner::P1, Owner::Random],
            &[1, 2, 1],
            &[1, 2, 1],
            &[(0, 1), (0, 2), (1, 0), (2, 0), (2, 1)],
            &[(2, 0, 1, 2), (2, 1, 1, 2)],
        )
        .unwrap();
        let res = solve_sas(&g);
        if res.w1.is_empty() {
            return;
        }
        let mealy = synth_finite_buchi(&g, &res.trace).unwrap();
        let n = res.w1.count();
        let d1 = 2;
        assert!(mealy.memory <= 4 * n * d1, "memory {} exceeds 4*n*d1", mealy.memory);
        let ok = check_fixed_strategy_sas(&g, &FiniteStrategy::Mealy(mealy), &res.w1).unwrap();
        assert!(ok);
    }

    #[test]
    fn rejects_non_buchi_second_condition() {
        let g = game_from_parts(&[Owner::P1], &[0], &[0], &[(0, 0)], &[]).unwrap();
        let res = solve_sas(&g);
        assert!(matches!(
            synth_finite_buchi(&g, &res.trace),
            Err(SpecialSynthError::NotBuchi { vertex: 0, prio: 0 })
        ));
    }
}
