//! Recursive solver for two-player (non-stochastic) parity games with
//! memoryless strategy extraction for both players.

use thiserror::Error;

use crate::attractor::sure_attractor;
use crate::game::{Owner, Player, StochasticGame, VertexId};
use crate::set::VertexSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ZielonkaError {
    #[error("game has probabilistic vertices (vertex {0})")]
    Probabilistic(VertexId),
    #[error("priority function length {omega} does not match vertex count {n}")]
    BadOmega { omega: usize, n: usize },
}

/// Winning partition with memoryless strategies, each defined on the owner's
/// vertices inside the respective winning region.
#[derive(Debug, Clone)]
pub struct ZielonkaResult {
    pub w1: VertexSet,
    pub w2: VertexSet,
    pub strategy1: Vec<Option<VertexId>>,
    pub strategy2: Vec<Option<VertexId>>,
}

pub fn solve_parity_zielonka(g: &StochasticGame, omega: &[u32]) -> Result<ZielonkaResult, ZielonkaError> {
    if omega.len() != g.n() {
        return Err(ZielonkaError::BadOmega { omega: omega.len(), n: g.n() });
    }
    if let Some(v) = g.vertices().find(|&v| g.owner(v) == Owner::Random) {
        return Err(ZielonkaError::Probabilistic(v));
    }
    Ok(zielonka(g, omega))
}

fn map_set(set: &VertexSet, to_parent: &[VertexId], n_parent: usize) -> VertexSet {
    VertexSet::from_iter(n_parent, set.iter().map(|v| to_parent[v]))
}

fn map_strategy(into: &mut [Option<VertexId>], from: &[Option<VertexId>], to_parent: &[VertexId]) {
    for (v, mv) in from.iter().enumerate() {
        if let Some(m) = mv {
            into[to_parent[v]] = Some(to_parent[*m]);
        }
    }
}

fn winner_for(d: u32) -> Player {
    if d % 2 == 0 {
        Player::P1
    } else {
        Player::P2
    }
}

fn zielonka(g: &StochasticGame, omega: &[u32]) -> ZielonkaResult {
    let n = g.n();
    let empty = ZielonkaResult {
        w1: VertexSet::empty(n),
        w2: VertexSet::empty(n),
        strategy1: vec![None; n],
        strategy2: vec![None; n],
    };
    if n == 0 {
        return empty;
    }
    let d = *omega.iter().max().expect("nonempty");
    let me = winner_for(d);
    let opp = me.opponent();

    let z = VertexSet::from_iter(n, g.vertices().filter(|&v| omega[v] == d));
    let attr = sure_attractor(g, me, &z);
    let rest = attr.region.complement();
    let sub = g.restrict(&rest).expect("complement of a sure attractor induces a subgame");
    let sub_omega: Vec<u32> = sub.to_parent.iter().map(|&v| omega[v]).collect();
    let inner = zielonka(&sub.game, &sub_omega);
    let (_inner_mine, inner_theirs, inner_my_strat, inner_their_strat) = match me {
        Player::P1 => (&inner.w1, &inner.w2, &inner.strategy1, &inner.strategy2),
        Player::P2 => (&inner.w2, &inner.w1, &inner.strategy2, &inner.strategy1),
    };

    if inner_theirs.is_empty() {
        // The whole game is won by the player matching d: attractor moves in
        // the attractor, any successor on the top-priority vertices, the
        // subgame strategy elsewhere.
        let mut my_strategy = vec![None; n];
        map_strategy(&mut my_strategy, inner_my_strat, &sub.to_parent);
        for v in attr.region.iter() {
            if g.owner(v).is_player(me) && my_strategy[v].is_none() {
                my_strategy[v] = if z.contains(v) {
                    g.succ(v).iter().copied().min()
                } else {
                    attr.strategy[v]
                };
            }
        }
        let (w1, w2, strategy1, strategy2) = match me {
            Player::P1 => (VertexSet::full(n), VertexSet::empty(n), my_strategy, vec![None; n]),
            Player::P2 => (VertexSet::empty(n), VertexSet::full(n), vec![None; n], my_strategy),
        };
        return ZielonkaResult { w1, w2, strategy1, strategy2 };
    }

    let theirs_here = map_set(inner_theirs, &sub.to_parent, n);
    let b = sure_attractor(g, opp, &theirs_here);
    let rest2 = b.region.complement();
    let tail = g.restrict(&rest2).expect("complement of a sure attractor induces a subgame");
    let tail_omega: Vec<u32> = tail.to_parent.iter().map(|&v| omega[v]).collect();
    let outer = zielonka(&tail.game, &tail_omega);

    let mut strategy1 = vec![None; n];
    let mut strategy2 = vec![None; n];
    map_strategy(&mut strategy1, &outer.strategy1, &tail.to_parent);
    map_strategy(&mut strategy2, &outer.strategy2, &tail.to_parent);
    let their_strategy = match opp {
        Player::P1 => &mut strategy1,
        Player::P2 => &mut strategy2,
    };
    map_strategy(their_strategy, inner_their_strat, &sub.to_parent);
    for v in b.region.iter() {
        if g.owner(v).is_player(opp) && their_strategy[v].is_none() {
            their_strategy[v] = b.strategy[v];
        }
    }

    let their_total = map_set(match opp {
        Player::P1 => &outer.w1,
        Player::P2 => &outer.w2,
    }, &tail.to_parent, n)
    .union(&b.region);
    let my_total = their_total.complement();
    let (w1, w2) = match me {
        Player::P1 => (my_total, their_total),
        Player::P2 => (their_total, my_total),
    };
    debug_assert!(w1.is_disjoint_from(&w2));
    ZielonkaResult { w1, w2, strategy1, strategy2 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::game_from_parts;

    #[test]
    fn self_loop_even_wins_for_p1() {
        let g = game_from_parts(&[Owner::P1], &[0], &[0], &[(0, 0)], &[]).unwrap();
        let r = solve_parity_zielonka(&g, &[0]).unwrap();
        assert_eq!(r.w1.to_vec(), vec![0]);
        assert!(r.w2.is_empty());
    }

    #[test]
    fn self_loop_odd_wins_for_p2() {
        let g = game_from_parts(&[Owner::P1], &[1], &[0], &[(0, 0)], &[]).unwrap();
        let r = solve_parity_zielonka(&g, &[1]).unwrap();
        assert_eq!(r.w2.to_vec(), vec![0]);
    }

    #[test]
    fn rejects_probabilistic_vertices() {
        let g = game_from_parts(&[Owner::Random], &[0], &[0], &[(0, 0)], &[(0, 0, 1, 1)]).unwrap();
        assert_eq!(solve_parity_zielonka(&g, &[0]).unwrap_err(), ZielonkaError::Probabilistic(0));
    }

    #[test]
    fn alternating_choice_game() {
        // 0 (P1, prio 1) -> {1, 2}; 1 (P2, prio 2) -> {0}; 2 (P2, prio 1) -> {2}.
        // P1 escapes the odd sink by looping through 1.
        let g = game_from_parts(
            &[Owner::P1, Owner::P2, Owner::P2],
            &[1, 2, 1],
            &[0, 0, 0],
            &[(0, 1), (0, 2), (1, 0), (2, 2)],
            &[],
        )
        .unwrap();
        let r = solve_parity_zielonka(&g, &[1, 2, 1]).unwrap();
        assert_eq!(r.w1.to_vec(), vec![0, 1]);
        assert_eq!(r.w2.to_vec(), vec![2]);
        assert_eq!(r.strategy1[0], Some(1));
    }
}
