//! Predecessor operators, sure and positive attractors with extracted
//! attractor strategies, and trap checks.

use serde::{Deserialize, Serialize};

use crate::game::{Owner, Player, StochasticGame, VertexId};
use crate::set::VertexSet;

/// An attractor region with the memoryless strategy that realizes it and the
/// fixpoint round in which each vertex entered.
///
/// Following the strategy from any region vertex strictly decreases the rank
/// until the target is hit (surely for the sure attractor, with positive
/// probability for the positive one).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AttractorResult {
    pub region: VertexSet,
    /// Chosen successor on player-owned region vertices outside the target.
    pub strategy: Vec<Option<VertexId>>,
    /// Fixpoint round of entry; target vertices have rank 0.
    pub ranks: Vec<Option<u32>>,
}

/// `SurePre_i(U)`: player-`i` vertices with a successor in `U`, plus opponent
/// and probabilistic vertices with all successors in `U`.
pub fn sure_pre(g: &StochasticGame, player: Player, u: &VertexSet) -> VertexSet {
    let mut out = VertexSet::empty(g.n());
    for v in g.vertices() {
        let inside = if g.owner(v).is_player(player) {
            g.succ(v).iter().any(|&s| u.contains(s))
        } else {
            g.succ(v).iter().all(|&s| u.contains(s))
        };
        if inside {
            out.insert(v);
        }
    }
    out
}

/// `PosPre_i(U)`: player-`i` and probabilistic vertices with a successor in
/// `U`, plus opponent vertices with all successors in `U`.
pub fn pos_pre(g: &StochasticGame, player: Player, u: &VertexSet) -> VertexSet {
    let mut out = VertexSet::empty(g.n());
    for v in g.vertices() {
        let favorable = g.owner(v).is_player(player) || g.owner(v) == Owner::Random;
        let inside = if favorable {
            g.succ(v).iter().any(|&s| u.contains(s))
        } else {
            g.succ(v).iter().all(|&s| u.contains(s))
        };
        if inside {
            out.insert(v);
        }
    }
    out
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Sure,
    Positive,
}

/// Worklist attractor: per-vertex counters of successors not yet attracted,
/// so the fixpoint is linear in the edge count rather than quadratic.
fn attractor(g: &StochasticGame, player: Player, target: &VertexSet, mode: Mode) -> AttractorResult {
    let n = g.n();
    let mut region = target.clone();
    let mut strategy: Vec<Option<VertexId>> = vec![None; n];
    let mut ranks: Vec<Option<u32>> = vec![None; n];
    // Number of successors outside the current region; a vertex whose counter
    // hits zero is attracted unconditionally. Every region member is popped
    // exactly once and decrements its predecessors then, so the counters
    // start at the full out-degree.
    let mut outside: Vec<usize> = (0..n).map(|v| g.succ(v).len()).collect();
    let mut queue: Vec<(VertexId, u32)> = target.iter().map(|v| (v, 0)).collect();
    for &(v, _) in &queue {
        ranks[v] = Some(0);
    }
    let mut head = 0;
    while head < queue.len() {
        let (v, rank) = queue[head];
        head += 1;
        for &p in g.pred(v) {
            if region.contains(p) {
                continue;
            }
            outside[p] = outside[p].saturating_sub(1);
            let single_choice_enough = match mode {
                Mode::Sure => g.owner(p).is_player(player),
                Mode::Positive => g.owner(p).is_player(player) || g.owner(p) == Owner::Random,
            };
            if single_choice_enough || outside[p] == 0 {
                region.insert(p);
                ranks[p] = Some(rank + 1);
                if g.owner(p).is_player(player) {
                    // Deterministic tie-break: lowest-id successor among those
                    // already attracted with a strictly smaller rank.
                    let pick = g
                        .succ(p)
                        .iter()
                        .copied()
                        .filter(|&s| ranks[s].is_some_and(|r| r <= rank))
                        .min();
                    strategy[p] = pick;
                }
                queue.push((p, rank + 1));
            }
        }
    }
    AttractorResult { region, strategy, ranks }
}

/// Least fixpoint of `X -> SurePre_i(X) ∪ T`: the player forces reaching `T`
/// within at most `|V|` rounds against the opponent and every probabilistic
/// outcome.
pub fn sure_attractor(g: &StochasticGame, player: Player, target: &VertexSet) -> AttractorResult {
    attractor(g, player, target, Mode::Sure)
}

/// Least fixpoint of `X -> PosPre_i(X) ∪ T`; the complement is always a trap
/// for the player.
pub fn pos_attractor(g: &StochasticGame, player: Player, target: &VertexSet) -> AttractorResult {
    attractor(g, player, target, Mode::Positive)
}

/// A trap for `player`: the set induces a subgame and the player cannot leave.
pub fn is_trap(g: &StochasticGame, player: Player, u: &VertexSet) -> bool {
    if g.induces_subgame(u).is_err() {
        return false;
    }
    u.iter()
        .filter(|&v| g.owner(v).is_player(player))
        .all(|v| g.succ(v).iter().all(|&s| u.contains(s)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::infinite_memory_mdp;

    #[test]
    fn sure_pre_on_fig1() {
        let g = infinite_memory_mdp();
        // Target {v_c, v_d}: v_a can choose v_d; v_b has successor v_a outside.
        let u = VertexSet::from_iter(4, [2, 3]);
        assert_eq!(sure_pre(&g, Player::P1, &u).to_vec(), vec![0]);
        assert!(sure_pre(&g, Player::P1, &VertexSet::empty(4)).is_empty());
        assert_eq!(sure_pre(&g, Player::P1, &VertexSet::full(4)).count(), 4);
    }

    #[test]
    fn pos_pre_on_fig1() {
        let g = infinite_memory_mdp();
        // For player 2: v_a ∈ V1 needs all successors in {v_d}; it also has v_b.
        let u = VertexSet::from_iter(4, [3]);
        assert!(pos_pre(&g, Player::P2, &u).is_empty());
        assert!(pos_pre(&g, Player::P2, &VertexSet::empty(4)).is_empty());
        assert_eq!(pos_pre(&g, Player::P2, &VertexSet::full(4)).count(), 4);
    }

    #[test]
    fn sure_attractor_on_fig1_covers_everything() {
        let g = infinite_memory_mdp();
        let t = VertexSet::from_iter(4, [2, 3]);
        let res = sure_attractor(&g, Player::P1, &t);
        assert_eq!(res.region.count(), 4);
        // Rounds: {c,d} then +{a} then +{b}.
        assert_eq!(res.ranks[2], Some(0));
        assert_eq!(res.ranks[3], Some(0));
        assert_eq!(res.ranks[0], Some(1));
        assert_eq!(res.ranks[1], Some(2));
        assert_eq!(res.strategy[0], Some(3));
    }

    #[test]
    fn attractor_trivia() {
        let g = infinite_memory_mdp();
        assert!(sure_attractor(&g, Player::P1, &VertexSet::empty(4)).region.is_empty());
        let t = VertexSet::from_iter(4, [1]);
        assert!(t.is_subset_of(&sure_attractor(&g, Player::P2, &t).region));
        assert_eq!(pos_attractor(&g, Player::P1, &VertexSet::full(4)).region.count(), 4);
    }

    #[test]
    fn pos_attractor_on_fig1_vd() {
        let g = infinite_memory_mdp();
        let t = VertexSet::from_iter(4, [3]);
        let res = pos_attractor(&g, Player::P2, &t);
        assert_eq!(res.region.to_vec(), vec![3]);
    }

    #[test]
    fn traps_on_fig1() {
        let g = infinite_memory_mdp();
        // No Player-2 vertices at all, so the full set is a trap for P2.
        assert!(is_trap(&g, Player::P2, &g.all_vertices()));
        // {v_a, v_b} is not even a subgame: v_b leaks to v_c.
        assert!(!is_trap(&g, Player::P1, &VertexSet::from_iter(4, [0, 1])));
        assert!(is_trap(&g, Player::P1, &VertexSet::empty(4)));
    }
}
