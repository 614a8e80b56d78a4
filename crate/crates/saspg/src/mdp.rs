//! Single-controller analyses: maximal end component decomposition and
//! qualitative (almost-sure / positive) MDP parity via winning-EC recursion.

use thiserror::Error;

use crate::game::{Owner, Player, StochasticGame, VertexId};
use crate::qualitative::as_reach;
use crate::scc::sccs_masked;
use crate::set::VertexSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MdpError {
    #[error("two controllers present: vertex {0} is owned by the opponent")]
    TwoControllers(VertexId),
}

/// Maximal end components of the sub-MDP induced by `allowed`.
///
/// Each returned set is closed under probabilistic successors, strongly
/// connected, and lets the controller stay inside.
pub fn mec_decomposition_masked(g: &StochasticGame, allowed: &VertexSet) -> Vec<VertexSet> {
    let n = g.n();
    let mut out = Vec::new();
    let mut work = vec![allowed.clone()];
    while let Some(mut s) = work.pop() {
        // Remove vertices that cannot belong to any end component inside `s`:
        // probabilistic vertices that leak out and vertices with no successor
        // left. Removals cascade.
        loop {
            let mut removed = false;
            for v in s.iter().collect::<Vec<_>>() {
                let keep = match g.owner(v) {
                    Owner::Random => g.succ(v).iter().all(|&x| s.contains(x)),
                    _ => g.succ(v).iter().any(|&x| s.contains(x)),
                };
                if !keep {
                    s.remove(v);
                    removed = true;
                }
            }
            if !removed {
                break;
            }
        }
        if s.is_empty() {
            continue;
        }
        let comps = sccs_masked(n, &s, |v| g.succ(v).to_vec());
        if comps.len() == 1 && comps[0].len() == s.count() {
            let single = comps[0].len() == 1;
            if !single || g.succ(comps[0][0]).contains(&comps[0][0]) {
                out.push(s);
            }
            continue;
        }
        for c in comps {
            work.push(VertexSet::from_iter(n, c));
        }
    }
    out
}

fn require_single_controller(g: &StochasticGame, controller: Player) -> Result<(), MdpError> {
    let opponent = Owner::from(controller.opponent());
    if let Some(v) = g.vertices().find(|&v| g.owner(v) == opponent) {
        return Err(MdpError::TwoControllers(v));
    }
    Ok(())
}

/// The unique maximal end component decomposition of an MDP.
pub fn mec_decomposition(g: &StochasticGame, controller: Player) -> Result<Vec<VertexSet>, MdpError> {
    require_single_controller(g, controller)?;
    Ok(mec_decomposition_masked(g, &g.all_vertices()))
}

/// Union of all states lying in some end component whose maximal priority is
/// even, found by peeling the maximal odd priority and re-decomposing.
pub fn winning_ec_states(g: &StochasticGame, omega: &[u32]) -> VertexSet {
    let n = g.n();
    let mut good = VertexSet::empty(n);
    let mut work = mec_decomposition_masked(g, &g.all_vertices());
    while let Some(s) = work.pop() {
        let p = s.iter().map(|v| omega[v]).max().expect("nonempty EC");
        if p % 2 == 0 {
            good.union_with(&s);
        } else {
            let mut peeled = s.clone();
            for v in s.iter() {
                if omega[v] == p {
                    peeled.remove(v);
                }
            }
            work.extend(mec_decomposition_masked(g, &peeled));
        }
    }
    good
}

/// States from which the controller reaches winning end components with
/// probability 1.
pub fn mdp_as_parity(g: &StochasticGame, controller: Player, omega: &[u32]) -> Result<VertexSet, MdpError> {
    require_single_controller(g, controller)?;
    let good = winning_ec_states(g, omega);
    Ok(as_reach(g, controller, &good).region)
}

/// States from which some controller strategy yields positive probability of
/// the parity objective: plain reachability of a winning end component.
pub fn mdp_pos_parity(g: &StochasticGame, controller: Player, omega: &[u32]) -> Result<VertexSet, MdpError> {
    require_single_controller(g, controller)?;
    let good = winning_ec_states(g, omega);
    // Backward reachability over all edges: the controller picks the path,
    // probabilistic vertices reach every successor with positive probability.
    let mut reach = good;
    let mut queue: Vec<VertexId> = reach.iter().collect();
    let mut head = 0;
    while head < queue.len() {
        let v = queue[head];
        head += 1;
        for &p in g.pred(v) {
            if !reach.contains(p) {
                reach.insert(p);
                queue.push(p);
            }
        }
    }
    Ok(reach)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{game_from_parts, infinite_memory_mdp};

    #[test]
    fn strongly_connected_mdp_is_one_mec() {
        let g = infinite_memory_mdp();
        let mecs = mec_decomposition(&g, Player::P1).unwrap();
        assert_eq!(mecs.len(), 1);
        assert_eq!(mecs[0].count(), 4);
    }

    #[test]
    fn dag_with_terminal_loops() {
        // 0 -> {1, 2}, 1 -> 1, 2 -> 2: the terminal loops are the MECs.
        let g = game_from_parts(
            &[Owner::P1, Owner::P1, Owner::P1],
            &[0, 0, 0],
            &[0, 0, 0],
            &[(0, 1), (0, 2), (1, 1), (2, 2)],
            &[],
        )
        .unwrap();
        let mut mecs = mec_decomposition(&g, Player::P1).unwrap();
        mecs.sort_by_key(|s| s.to_vec());
        assert_eq!(mecs.len(), 2);
        assert_eq!(mecs[0].to_vec(), vec![1]);
        assert_eq!(mecs[1].to_vec(), vec![2]);
    }

    #[test]
    fn rejects_two_controllers() {
        let g = game_from_parts(&[Owner::P1, Owner::P2], &[0, 0], &[0, 0], &[(0, 1), (1, 0)], &[]).unwrap();
        assert!(mec_decomposition(&g, Player::P1).is_err());
    }

    #[test]
    fn leaking_random_vertex_is_excluded() {
        // Random vertex 0 leaks to the absorbing vertex 1; only {1} and {2}
        // are MECs.
        let g = game_from_parts(
            &[Owner::Random, Owner::P1, Owner::P1],
            &[0, 0, 0],
            &[0, 0, 0],
            &[(0, 1), (0, 2), (1, 1), (2, 2)],
            &[(0, 1, 1, 2), (0, 2, 1, 2)],
        )
        .unwrap();
        let mecs = mec_decomposition(&g, Player::P1).unwrap();
        assert_eq!(mecs.len(), 2);
        assert!(mecs.iter().all(|m| m.count() == 1));
    }

    #[test]
    fn parity_all_even_wins_everywhere() {
        let g = infinite_memory_mdp();
        let omega = vec![0, 2, 0, 2];
        assert_eq!(mdp_as_parity(&g, Player::P1, &omega).unwrap().count(), 4);
        assert_eq!(mdp_pos_parity(&g, Player::P1, &omega).unwrap().count(), 4);
    }

    #[test]
    fn odd_self_loop_sink_loses() {
        let g = game_from_parts(&[Owner::P1], &[1], &[0], &[(0, 0)], &[]).unwrap();
        assert!(mdp_as_parity(&g, Player::P1, &[1]).unwrap().is_empty());
        assert!(mdp_pos_parity(&g, Player::P1, &[1]).unwrap().is_empty());
    }

    #[test]
    fn positive_but_not_almost_sure() {
        // Coin between an even loop and an odd loop: positive from the coin,
        // almost-sure only inside the even loop.
        let g = game_from_parts(
            &[Owner::Random, Owner::P1, Owner::P1],
            &[1, 2, 1],
            &[0, 0, 0],
            &[(0, 1), (0, 2), (1, 1), (2, 2)],
            &[(0, 1, 1, 2), (0, 2, 1, 2)],
        )
        .unwrap();
        assert_eq!(mdp_as_parity(&g, Player::P1, &[1, 2, 1]).unwrap().to_vec(), vec![1]);
        assert_eq!(mdp_pos_parity(&g, Player::P1, &[1, 2, 1]).unwrap().to_vec(), vec![0, 1]);
    }

    #[test]
    fn winning_ec_needs_inner_even_component() {
        // Cycle 0 <-> 1 with priorities (2, 3): the odd 3 dominates, but
        // peeling 1 leaves no EC; adding a self-loop on 0 restores one.
        let g = game_from_parts(
            &[Owner::P1, Owner::P1],
            &[2, 3],
            &[0, 0],
            &[(0, 1), (1, 0)],
            &[],
        )
        .unwrap();
        assert!(winning_ec_states(&g, &[2, 3]).is_empty());
        let g2 = game_from_parts(
            &[Owner::P1, Owner::P1],
            &[2, 3],
            &[0, 0],
            &[(0, 0), (0, 1), (1, 0)],
            &[],
        )
        .unwrap();
        assert_eq!(winning_ec_states(&g2, &[2, 3]).to_vec(), vec![0]);
    }
}
