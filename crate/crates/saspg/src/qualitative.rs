//! Qualitative analysis of stochastic games: almost-sure reachability and
//! almost-sure parity, with memoryless strategies for the protagonist on the
//! winning region and for the adversary on its complement.

use crate::attractor::pos_attractor;
use crate::game::{GameBuilder, Owner, Player, StochasticGame, VertexId};
use crate::set::VertexSet;

/// Almost-sure reachability region with a memoryless witness strategy.
#[derive(Debug, Clone)]
pub struct AsReachResult {
    pub region: VertexSet,
    /// Defined on protagonist-owned region vertices outside the target.
    pub strategy: Vec<Option<VertexId>>,
}

/// Almost-sure parity partition: `region` is the protagonist's almost-sure
/// winning set, `strategy` a memoryless witness on it, and `spoiler` a
/// memoryless adversary strategy achieving positive violation probability
/// from every vertex of the complement.
#[derive(Debug, Clone)]
pub struct AsParityResult {
    pub region: VertexSet,
    pub strategy: Vec<Option<VertexId>>,
    pub spoiler: Vec<Option<VertexId>>,
}

/// Positive attractor restricted to `allowed`; `frozen` vertices are never
/// attracted and their outgoing edges are ignored (used to make targets
/// absorbing). Returns the region and the chosen moves for `player`.
fn masked_pos_attractor(
    g: &StochasticGame,
    player: Player,
    seeds: &VertexSet,
    allowed: &VertexSet,
    frozen: &VertexSet,
) -> (VertexSet, Vec<Option<VertexId>>) {
    let n = g.n();
    let mut region = seeds.intersection(allowed);
    let mut strategy = vec![None; n];
    // Counters start at the masked out-degree; every region member is popped
    // exactly once and decrements its predecessors then.
    let mut outside = vec![0usize; n];
    for v in allowed.iter() {
        outside[v] = g.succ(v).iter().filter(|&&s| allowed.contains(s)).count();
    }
    let mut queue: Vec<VertexId> = region.iter().collect();
    let mut head = 0;
    while head < queue.len() {
        let v = queue[head];
        head += 1;
        for &p in g.pred(v) {
            if !allowed.contains(p) || region.contains(p) || frozen.contains(p) {
                continue;
            }
            outside[p] = outside[p].saturating_sub(1);
            let favorable = g.owner(p).is_player(player) || g.owner(p) == Owner::Random;
            if favorable || outside[p] == 0 {
                region.insert(p);
                if g.owner(p).is_player(player) {
                    strategy[p] = Some(v);
                }
                queue.push(p);
            }
        }
    }
    (region, strategy)
}

/// The set from which `player` has a strategy reaching `target` with
/// probability 1 against every adversary strategy. Iteratively peels the
/// adversary's positive escape attractor until every remaining vertex can
/// positively reach the target inside the remaining arena.
pub fn as_reach(g: &StochasticGame, player: Player, target: &VertexSet) -> AsReachResult {
    as_reach_within(g, player, target, &g.all_vertices())
}

fn as_reach_within(
    g: &StochasticGame,
    player: Player,
    target: &VertexSet,
    arena: &VertexSet,
) -> AsReachResult {
    let adversary = player.opponent();
    let mut allowed = arena.clone();
    loop {
        let (reach, strategy) = masked_pos_attractor(g, player, target, &allowed, target);
        let stuck = allowed.difference(&reach);
        if stuck.is_empty() {
            return AsReachResult { region: allowed, strategy };
        }
        let (escape, _) = masked_pos_attractor(g, adversary, &stuck, &allowed, target);
        allowed.difference_with(&escape);
        if allowed.is_empty() {
            return AsReachResult { region: allowed, strategy: vec![None; g.n()] };
        }
    }
}

/// Almost-sure Büchi: the region from which `player` can visit `target`
/// infinitely often with probability 1. Repeatedly removes the vertices that
/// cannot almost-surely reach the target inside the surviving arena,
/// together with the adversary's positive attractor to them.
pub fn as_buchi(g: &StochasticGame, player: Player, target: &VertexSet) -> VertexSet {
    let adversary = player.opponent();
    let mut arena = g.all_vertices();
    let none = VertexSet::empty(g.n());
    loop {
        if arena.is_empty() {
            return arena;
        }
        let seeds = target.intersection(&arena);
        let reach = as_reach_within(g, player, &seeds, &arena);
        let stuck = arena.difference(&reach.region);
        if stuck.is_empty() {
            return arena;
        }
        let (escape, _) = masked_pos_attractor(g, adversary, &stuck, &arena, &none);
        arena.difference_with(&escape);
    }
}

/// The almost-sure winning region for the parity objective `limsup` even.
pub fn as_winning_region(g: &StochasticGame, player: Player, omega: &[u32]) -> VertexSet {
    assert_eq!(omega.len(), g.n());
    as_region_rec(g, player, omega, 0)
}

/// Core recursion, parameterized by the parity the protagonist needs
/// (`want` is 0 for even, 1 for odd).
///
/// On the protagonist's layer (top priority of the wanted parity) the top
/// class is almost-surely attracted and the closed remainder is solved
/// recursively; absorption into the fresh sink counts for the protagonist,
/// so the sink priority carries the wanted parity. On the adversary's layer
/// the roles flip: by qualitative determinacy and the positive-region
/// characterization, the protagonist wins almost-surely exactly outside the
/// adversary's positive attractor to the adversary's almost-sure region for
/// the complementary parity.
fn as_region_rec(g: &StochasticGame, player: Player, omega: &[u32], want: u32) -> VertexSet {
    let n = g.n();
    if n == 0 {
        return VertexSet::empty(0);
    }
    let adversary = player.opponent();
    let d = *omega.iter().max().expect("nonempty");

    if d % 2 != want {
        let opp = as_region_rec(g, adversary, omega, 1 - want);
        return pos_attractor(g, adversary, &opp).region.complement();
    }

    let z = VertexSet::from_iter(n, g.vertices().filter(|&v| omega[v] == d));
    if d <= 1 {
        // Two priority classes with the top one wanted: exactly almost-sure
        // Büchi on the top class.
        return as_buchi(g, player, &z);
    }
    let reach = as_reach(g, player, &z);
    let rest = reach.region.complement();
    if rest.is_empty() {
        return VertexSet::full(n);
    }
    let closure = g.subgame_closure(&rest).expect("closure precondition");
    // The fresh sink is absorbing and carries the wanted parity (absorption
    // into the removed attractor is fine for the protagonist); its priority
    // stays below the removed class, which keeps the recursion decreasing.
    let mut sub_omega: Vec<u32> =
        closure.to_parent.iter().map(|p| p.map_or(want, |v| omega[v])).collect();
    sub_omega[closure.sink] = want;
    let sub = as_region_rec(&closure.game, player, &sub_omega, want);
    let lost_sub = sub.complement();
    debug_assert!(!lost_sub.contains(closure.sink), "the fresh sink wins for the protagonist");
    if lost_sub.is_empty() {
        return VertexSet::full(n);
    }
    let lost_here = VertexSet::from_iter(
        n,
        lost_sub.iter().map(|i| closure.to_parent[i].expect("fresh sink always wins")),
    );
    let b = pos_attractor(g, adversary, &lost_here).region;
    let tail_r = g.restrict(&b.complement()).expect("complement of a positive attractor is a trap");
    let tail_omega: Vec<u32> = tail_r.to_parent.iter().map(|&v| omega[v]).collect();
    let tail = as_region_rec(&tail_r.game, player, &tail_omega, want);
    VertexSet::from_iter(n, tail.iter().map(|i| tail_r.to_parent[i]))
}

/// Rebuilds the game with a single successor at `v` (owner unchanged).
fn fix_single_edge(g: &StochasticGame, v: VertexId, target: VertexId) -> StochasticGame {
    let mut b = GameBuilder::new();
    for u in g.vertices() {
        let id = b.add_vertex(g.owner(u), g.prio1(u), g.prio2(u));
        b.set_label(id, g.label(u).map(str::to_owned));
        b.set_sink(id, g.is_sink(u));
    }
    for u in g.vertices() {
        if u == v {
            b.add_edge(u, target);
        } else if g.owner(u) == Owner::Random {
            for (k, &s) in g.succ(u).iter().enumerate() {
                b.add_prob_edge(u, s, g.delta(u)[k].clone());
            }
        } else {
            for &s in g.succ(u) {
                b.add_edge(u, s);
            }
        }
    }
    b.build().expect("edge fixing preserves validity")
}

/// Memoryless protagonist witness on the almost-sure region, by greedy edge
/// fixing: the region is restricted (a trap for the adversary), then each
/// protagonist vertex is pinned to some successor that keeps the restricted
/// game fully winning. A memoryless witness exists, so some choice always
/// survives the recheck.
pub fn extract_as_strategy(
    g: &StochasticGame,
    player: Player,
    omega: &[u32],
    region: &VertexSet,
) -> Vec<Option<VertexId>> {
    let mut moves = vec![None; g.n()];
    if region.is_empty() {
        return moves;
    }
    let r = g.restrict(region).expect("almost-sure regions induce subgames");
    let sub_omega: Vec<u32> = r.to_parent.iter().map(|&v| omega[v]).collect();
    let full = VertexSet::full(r.game.n());
    debug_assert_eq!(as_winning_region(&r.game, player, &sub_omega), full);
    let mut work = r.game.clone();
    for v in work.vertices().collect::<Vec<_>>() {
        if !work.owner(v).is_player(player) {
            continue;
        }
        let candidates = work.succ(v).to_vec();
        let mut chosen = None;
        for u in candidates {
            let fixed = fix_single_edge(&work, v, u);
            if as_winning_region(&fixed, player, &sub_omega) == full {
                chosen = Some(u);
                work = fixed;
                break;
            }
        }
        let u = chosen.expect("a memoryless almost-sure witness exists");
        moves[r.to_parent[v]] = Some(r.to_parent[u]);
    }
    moves
}

/// Memoryless adversary spoiler achieving positive violation from every
/// vertex outside the almost-sure region, by greedy edge fixing that keeps
/// the protagonist's region unchanged.
pub fn extract_as_spoiler(
    g: &StochasticGame,
    player: Player,
    omega: &[u32],
    region: &VertexSet,
) -> Vec<Option<VertexId>> {
    let adversary = player.opponent();
    let mut moves = vec![None; g.n()];
    if region.complement().is_empty() {
        return moves;
    }
    let mut work = g.clone();
    for v in g.vertices() {
        if !g.owner(v).is_player(adversary) {
            continue;
        }
        let candidates = work.succ(v).to_vec();
        let mut chosen = None;
        for u in candidates {
            let fixed = fix_single_edge(&work, v, u);
            if as_winning_region(&fixed, player, omega) == *region {
                chosen = Some(u);
                work = fixed;
                break;
            }
        }
        moves[v] = Some(chosen.expect("a memoryless spoiler exists"));
    }
    moves
}

/// Almost-sure parity with both memoryless witnesses.
pub fn solve_as_parity(g: &StochasticGame, player: Player, omega: &[u32]) -> AsParityResult {
    let region = as_winning_region(g, player, omega);
    let strategy = extract_as_strategy(g, player, omega, &region);
    let spoiler = extract_as_spoiler(g, player, omega, &region);
    AsParityResult { region, strategy, spoiler }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{game_from_parts, infinite_memory_mdp};
    use crate::oracle::{fix_strategy, OracleBounds};
    use crate::strategy::MemorylessStrategy;

    #[test]
    fn as_reach_trivia() {
        let g = infinite_memory_mdp();
        assert_eq!(as_reach(&g, Player::P1, &g.all_vertices()).region.count(), 4);
        assert!(as_reach(&g, Player::P1, &VertexSet::empty(4)).region.is_empty());
    }

    #[test]
    fn as_reach_through_coin() {
        // v_c is reached almost surely from everywhere: choose v_b at v_a and
        // the coin eventually lands on v_c.
        let g = infinite_memory_mdp();
        let t = VertexSet::from_iter(4, [2]);
        let r = as_reach(&g, Player::P1, &t);
        assert_eq!(r.region.count(), 4);
        assert_eq!(r.strategy[0], Some(1));
    }

    #[test]
    fn as_parity_all_even() {
        let g = infinite_memory_mdp();
        let r = solve_as_parity(&g, Player::P1, &[0, 2, 0, 0]);
        assert_eq!(r.region.count(), 4);
    }

    #[test]
    fn as_parity_fig1_cobuchi() {
        // Almost-sure coBüchi on v_d (priority function Ω2): always choosing
        // v_b wins from everywhere.
        let g = infinite_memory_mdp();
        let r = solve_as_parity(&g, Player::P1, &[0, 0, 0, 1]);
        assert_eq!(r.region.count(), 4);
        assert_eq!(r.strategy[0], Some(1));
    }

    #[test]
    fn as_parity_odd_sink() {
        // A single odd self-loop loses almost-surely.
        let g = game_from_parts(&[Owner::P1], &[1], &[0], &[(0, 0)], &[]).unwrap();
        let r = solve_as_parity(&g, Player::P1, &[1]);
        assert!(r.region.is_empty());
    }

    #[test]
    fn as_parity_coin_between_good_and_bad() {
        // Random vertex mixing an even and an odd absorbing loop: the even
        // loop is a.s.-winning only from itself.
        let g = game_from_parts(
            &[Owner::Random, Owner::P1, Owner::P1],
            &[1, 2, 1],
            &[0, 0, 0],
            &[(0, 1), (0, 2), (1, 1), (2, 2)],
            &[(0, 1, 1, 2), (0, 2, 1, 2)],
        )
        .unwrap();
        let r = solve_as_parity(&g, Player::P1, &[1, 2, 1]);
        assert_eq!(r.region.to_vec(), vec![1]);
    }

    #[test]
    fn absorption_through_adversary_loop() {
        // P2 may loop at an even vertex forever (winning) or venture through
        // the coin that leaks to an absorbing winning state: everything is
        // almost-sure winning for P1 without any P1 vertex.
        let g = game_from_parts(
            &[Owner::P2, Owner::P2, Owner::Random],
            &[2, 0, 1],
            &[0, 0, 0],
            &[(0, 0), (0, 2), (1, 0), (2, 0), (2, 1)],
            &[(2, 0, 1, 2), (2, 1, 1, 2)],
        )
        .unwrap();
        let r = solve_as_parity(&g, Player::P1, &[0, 2, 1]);
        assert_eq!(r.region.count(), 3);
    }

    #[test]
    fn extracted_witnesses_check_out() {
        // On a handful of fixed games, fixing the extracted strategy leaves
        // the adversary without positive complement probability, and fixing
        // the spoiler denies the protagonist everywhere outside the region.
        use crate::mdp::{mdp_as_parity, mdp_pos_parity};
        let games = [
            infinite_memory_mdp(),
            game_from_parts(
                &[Owner::P1, Owner::P2, Owner::Random],
                &[1, 2, 1],
                &[0, 0, 0],
                &[(0, 1), (0, 2), (1, 0), (2, 0), (2, 1)],
                &[(2, 0, 1, 2), (2, 1, 1, 2)],
            )
            .unwrap(),
        ];
        for g in games {
            let omega: Vec<u32> = g.omega1().to_vec();
            let res = solve_as_parity(&g, Player::P1, &omega);
            if !res.region.is_empty() {
                let sigma = MemorylessStrategy::from_moves(res.strategy.clone());
                let fixed = fix_strategy(&g, Player::P1, &sigma_totalized(&g, sigma)).unwrap();
                let up: Vec<u32> = omega.iter().map(|p| p + 1).collect();
                let spoil = mdp_pos_parity(&fixed, Player::P2, &up).unwrap();
                assert!(spoil.is_disjoint_from(&res.region));
            }
            if !res.region.complement().is_empty() {
                let tau = MemorylessStrategy::from_moves(res.spoiler.clone());
                let fixed = fix_strategy(&g, Player::P2, &sigma_totalized_p2(&g, tau)).unwrap();
                let good = mdp_as_parity(&fixed, Player::P1, &omega).unwrap();
                assert_eq!(good, res.region, "spoiler must pin the region");
            }
            let _ = OracleBounds::default();
        }
    }

    fn sigma_totalized(g: &StochasticGame, mut s: MemorylessStrategy) -> MemorylessStrategy {
        for v in g.vertices() {
            if g.owner(v) == Owner::P1 && s.moves[v].is_none() {
                s.moves[v] = Some(g.succ(v)[0]);
            }
        }
        s
    }

    fn sigma_totalized_p2(g: &StochasticGame, mut s: MemorylessStrategy) -> MemorylessStrategy {
        for v in g.vertices() {
            if g.owner(v) == Owner::P2 && s.moves[v].is_none() {
                s.moves[v] = Some(g.succ(v)[0]);
            }
        }
        s
    }
}
