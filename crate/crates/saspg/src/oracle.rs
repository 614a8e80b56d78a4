//! Independent brute-force ground truth at desk scale: language equivalence
//! of the automaton construction, strategy-enumeration region oracles,
//! Markov-chain analyses of fixed strategies, and the fixed-strategy
//! sure-almost-sure checker.

use std::collections::VecDeque;

use num_traits::One;
use thiserror::Error;

use crate::automata::{D2pw, Dpw, LetterId};
use crate::game::{GameBuilder, Owner, Player, Prob, StochasticGame, VertexId};
use crate::mdp::mdp_pos_parity;
use crate::qualitative::as_reach;
use crate::scc::sccs_masked;
use crate::set::VertexSet;
use crate::solver::solve_sas;
use crate::strategy::{FiniteStrategy, MemorylessStrategy};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("enumeration needs {needed} items, bound is {bound}")]
    BoundExceeded { needed: u128, bound: u128 },
    #[error("automata have different alphabets")]
    AlphabetMismatch,
    #[error("strategy undefined at vertex {0}")]
    PartialStrategy(VertexId),
    #[error("strategy move {mv} at vertex {vertex} is not an edge")]
    IllegalMove { vertex: VertexId, mv: VertexId },
}

/// Enumeration and product-size limits; exceeding them is an error, never a
/// silent truncation.
#[derive(Debug, Clone, Copy)]
pub struct OracleBounds {
    pub max_product_states: usize,
    pub max_scc: usize,
    pub max_strategies: u64,
}

impl Default for OracleBounds {
    fn default() -> Self {
        OracleBounds { max_product_states: 4096, max_scc: 12, max_strategies: 1 << 20 }
    }
}

/// Verdict of the language-equivalence oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DpwEquiv {
    Equal,
    /// An ultimately periodic word accepted by exactly one side.
    Counterexample { stem: Vec<LetterId>, cycle: Vec<LetterId> },
}

/// Compares `L(a)` (conjunction of both conditions) with `L(b)` on the
/// synchronized product: for every reachable SCC, each strongly connected
/// closed vertex subset is evaluated under both acceptance conditions; the
/// first disagreement yields a stem+cycle witness word.
pub fn dpw_equiv_oracle(a: &D2pw, b: &Dpw, bounds: &OracleBounds) -> Result<DpwEquiv, OracleError> {
    if a.alphabet != b.alphabet {
        return Err(OracleError::AlphabetMismatch);
    }
    let letters = a.alphabet.len();
    // Joint reachable product.
    let mut index = std::collections::HashMap::new();
    let mut states: Vec<(usize, usize)> = vec![(a.initial, b.initial)];
    index.insert((a.initial, b.initial), 0usize);
    let mut delta: Vec<Vec<usize>> = Vec::new();
    let mut head = 0;
    while head < states.len() {
        let (qa, qb) = states[head];
        let mut row = Vec::with_capacity(letters);
        for l in 0..letters {
            let key = (a.delta[qa][l], b.delta[qb][l]);
            let id = *index.entry(key).or_insert_with(|| {
                states.push(key);
                states.len() - 1
            });
            row.push(id);
        }
        delta.push(row);
        head += 1;
        if states.len() > bounds.max_product_states {
            return Err(OracleError::BoundExceeded {
                needed: states.len() as u128,
                bound: bounds.max_product_states as u128,
            });
        }
    }
    let n = states.len();
    let all = VertexSet::full(n);
    let succ_of = |v: usize| delta[v].clone();
    for scc in sccs_masked(n, &all, succ_of) {
        if scc.len() > bounds.max_scc {
            return Err(OracleError::BoundExceeded { needed: scc.len() as u128, bound: bounds.max_scc as u128 });
        }
        for mask in 1u32..(1u32 << scc.len()) {
            let subset: Vec<usize> = (0..scc.len()).filter(|i| mask & (1 << i) != 0).map(|i| scc[i]).collect();
            if !is_cycle_support(&subset, &delta) {
                continue;
            }
            let m1 = subset.iter().map(|&s| a.omega1[states[s].0]).max().unwrap();
            let m2 = subset.iter().map(|&s| a.omega2[states[s].0]).max().unwrap();
            let mb = subset.iter().map(|&s| b.omega[states[s].1]).max().unwrap();
            let conj = m1 % 2 == 0 && m2 % 2 == 0;
            let single = mb % 2 == 0;
            if conj != single {
                let (stem, cycle) = witness_word(&delta, &subset);
                return Ok(DpwEquiv::Counterexample { stem, cycle });
            }
        }
    }
    Ok(DpwEquiv::Equal)
}

/// A set is the support of some cycle when its induced subgraph is strongly
/// connected and every member keeps an outgoing edge inside (singletons need
/// a self-loop).
fn is_cycle_support(subset: &[usize], delta: &[Vec<usize>]) -> bool {
    let inside = |v: usize| subset.contains(&v);
    if subset.len() == 1 {
        return delta[subset[0]].iter().any(|&t| t == subset[0]);
    }
    // Forward and backward reachability from the first member within the set.
    let fwd = closure(subset[0], subset, |v| delta[v].iter().copied().filter(|&t| inside(t)).collect());
    if fwd.len() != subset.len() {
        return false;
    }
    let bwd = closure(subset[0], subset, |v| {
        subset.iter().copied().filter(|&u| delta[u].contains(&v)).collect()
    });
    bwd.len() == subset.len()
}

fn closure<F>(start: usize, subset: &[usize], succ: F) -> Vec<usize>
where
    F: Fn(usize) -> Vec<usize>,
{
    let mut seen = vec![start];
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for t in succ(v) {
            if subset.contains(&t) && !seen.contains(&t) {
                seen.push(t);
                queue.push_back(t);
            }
        }
    }
    seen
}

/// Letters of a path from the initial product state to the subset, then a
/// closed walk whose support is exactly the subset.
fn witness_word(delta: &[Vec<usize>], subset: &[usize]) -> (Vec<LetterId>, Vec<LetterId>) {
    let n = delta.len();
    let entry = subset[0];
    let stem = letters_path(delta, 0, entry, &(0..n).collect::<Vec<_>>());
    let mut cycle = Vec::new();
    let mut at = entry;
    for &target in subset.iter().skip(1).chain([entry].iter()) {
        if at == target && subset.len() == 1 {
            break;
        }
        let leg = letters_path(delta, at, target, subset);
        cycle.extend(leg);
        at = target;
    }
    if cycle.is_empty() {
        // Singleton with self-loop.
        let l = delta[entry].iter().position(|&t| t == entry).expect("self-loop");
        cycle.push(l);
    }
    (stem, cycle)
}

/// Shortest letter path between product states within an allowed set.
fn letters_path(delta: &[Vec<usize>], from: usize, to: usize, allowed: &[usize]) -> Vec<LetterId> {
    if from == to {
        return Vec::new();
    }
    let mut parent: Vec<Option<(usize, LetterId)>> = vec![None; delta.len()];
    let mut queue = VecDeque::from([from]);
    let mut seen = vec![false; delta.len()];
    seen[from] = true;
    while let Some(v) = queue.pop_front() {
        for (l, &t) in delta[v].iter().enumerate() {
            if !allowed.contains(&t) || seen[t] {
                continue;
            }
            seen[t] = true;
            parent[t] = Some((v, l));
            if t == to {
                let mut letters = Vec::new();
                let mut cur = to;
                while cur != from {
                    let (p, letter) = parent[cur].expect("path recorded");
                    letters.push(letter);
                    cur = p;
                }
                letters.reverse();
                return letters;
            }
            queue.push_back(t);
        }
    }
    panic!("no path between strongly connected states");
}

/// Iterator over all memoryless strategies of a player (successor choice per
/// owned vertex), bounded up front.
pub fn memoryless_strategies(
    g: &StochasticGame,
    player: Player,
    max: u64,
) -> Result<Vec<MemorylessStrategy>, OracleError> {
    let owned: Vec<VertexId> = g.vertices().filter(|&v| g.owner(v).is_player(player)).collect();
    let mut count: u128 = 1;
    for &v in &owned {
        count = count.saturating_mul(g.succ(v).len() as u128);
        if count > max as u128 {
            return Err(OracleError::BoundExceeded { needed: count, bound: max as u128 });
        }
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut choice = vec![0usize; owned.len()];
    loop {
        let mut moves = vec![None; g.n()];
        for (k, &v) in owned.iter().enumerate() {
            moves[v] = Some(g.succ(v)[choice[k]]);
        }
        out.push(MemorylessStrategy::from_moves(moves));
        let mut k = 0;
        loop {
            if k == owned.len() {
                return Ok(out);
            }
            choice[k] += 1;
            if choice[k] < g.succ(owned[k]).len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

/// Fixes a player's memoryless strategy by turning each of their vertices
/// into a probabilistic vertex with the Dirac distribution on the chosen
/// successor. The result is single-controller for the opponent.
pub fn fix_strategy(
    g: &StochasticGame,
    player: Player,
    strategy: &MemorylessStrategy,
) -> Result<StochasticGame, OracleError> {
    let mut b = GameBuilder::new();
    for v in g.vertices() {
        let owner = if g.owner(v).is_player(player) { Owner::Random } else { g.owner(v) };
        let id = b.add_vertex(owner, g.prio1(v), g.prio2(v));
        b.set_label(id, g.label(v).map(str::to_owned));
        b.set_sink(id, g.is_sink(v));
    }
    for v in g.vertices() {
        if g.owner(v).is_player(player) {
            let mv = strategy.mv(v).ok_or(OracleError::PartialStrategy(v))?;
            if !g.succ(v).contains(&mv) {
                return Err(OracleError::IllegalMove { vertex: v, mv });
            }
            b.add_prob_edge(v, mv, Prob::one());
        } else if g.owner(v) == Owner::Random {
            for (k, &s) in g.succ(v).iter().enumerate() {
                b.add_prob_edge(v, s, g.delta(v)[k].clone());
            }
        } else {
            for &s in g.succ(v) {
                b.add_edge(v, s);
            }
        }
    }
    Ok(b.build().expect("fixing a strategy preserves validity"))
}

fn shift_up(omega: &[u32]) -> Vec<u32> {
    omega.iter().map(|p| p + 1).collect()
}

/// Almost-sure parity region by enumeration of Player-1 memoryless
/// strategies: a vertex qualifies when some strategy leaves the adversary
/// without positive probability for the complement objective.
pub fn oracle_as_parity_region(
    g: &StochasticGame,
    omega: &[u32],
    bounds: &OracleBounds,
) -> Result<VertexSet, OracleError> {
    let mut region = VertexSet::empty(g.n());
    for sigma in memoryless_strategies(g, Player::P1, bounds.max_strategies)? {
        let fixed = fix_strategy(g, Player::P1, &sigma)?;
        let spoil = mdp_pos_parity(&fixed, Player::P2, &shift_up(omega)).expect("single controller");
        region.union_with(&spoil.complement());
    }
    Ok(region)
}

/// Sure-almost-sure region by enumeration of the environment's memoryless
/// strategies (memoryless spoiling suffices): a vertex qualifies when the
/// solver puts it winning in every induced single-controller game.
pub fn oracle_sas_region(g: &StochasticGame, bounds: &OracleBounds) -> Result<VertexSet, OracleError> {
    let mut region = VertexSet::full(g.n());
    for sigma in memoryless_strategies(g, Player::P2, bounds.max_strategies)? {
        let fixed = fix_strategy(g, Player::P2, &sigma)?;
        region.intersect_with(&solve_sas(&fixed).w1);
    }
    Ok(region)
}

/// Sure parity region of a two-player game by lasso brute force over the
/// memoryless strategies of both players.
pub fn oracle_sure_parity_region(
    g: &StochasticGame,
    omega: &[u32],
    bounds: &OracleBounds,
) -> Result<VertexSet, OracleError> {
    let mut region = VertexSet::empty(g.n());
    for sigma in memoryless_strategies(g, Player::P1, bounds.max_strategies)? {
        let succ_of = |v: VertexId| -> Vec<VertexId> {
            if g.owner(v).is_player(Player::P1) {
                vec![sigma.mv(v).expect("total")]
            } else {
                g.succ(v).to_vec()
            }
        };
        let danger = odd_cycle_reachers(g.n(), omega, succ_of);
        region.union_with(&danger.complement());
    }
    Ok(region)
}

/// Vertices from which, under the given successor relation, some reachable
/// cycle has an odd maximal priority.
fn odd_cycle_reachers<F>(n: usize, omega: &[u32], succ_of: F) -> VertexSet
where
    F: Fn(VertexId) -> Vec<VertexId>,
{
    let mut marked = VertexSet::empty(n);
    let mut odd_values: Vec<u32> = omega.iter().copied().filter(|p| p % 2 == 1).collect();
    odd_values.sort_unstable();
    odd_values.dedup();
    for p in odd_values {
        let allowed = VertexSet::from_iter(n, (0..n).filter(|&v| omega[v] <= p));
        for scc in sccs_masked(n, &allowed, &succ_of) {
            let cyclic = scc.len() > 1 || succ_of(scc[0]).contains(&scc[0]);
            if cyclic && scc.iter().any(|&v| omega[v] == p) {
                for &v in &scc {
                    marked.insert(v);
                }
            }
        }
    }
    // Backward closure: anything that can reach a marked vertex.
    let mut preds: Vec<Vec<VertexId>> = vec![Vec::new(); n];
    for v in 0..n {
        for t in succ_of(v) {
            preds[t].push(v);
        }
    }
    let mut queue: Vec<VertexId> = marked.iter().collect();
    let mut head = 0;
    while head < queue.len() {
        let v = queue[head];
        head += 1;
        for &p in &preds[v] {
            if !marked.contains(p) {
                marked.insert(p);
                queue.push(p);
            }
        }
    }
    marked
}

/// Qualitative MDP parity ground truth: enumerate the controller's
/// memoryless strategies, classify each induced Markov chain by the bottom
/// SCCs reachable from the vertex.
pub fn oracle_mdp_as_parity(
    g: &StochasticGame,
    controller: Player,
    omega: &[u32],
    bounds: &OracleBounds,
) -> Result<VertexSet, OracleError> {
    chain_oracle(g, controller, omega, bounds, true)
}

pub fn oracle_mdp_pos_parity(
    g: &StochasticGame,
    controller: Player,
    omega: &[u32],
    bounds: &OracleBounds,
) -> Result<VertexSet, OracleError> {
    chain_oracle(g, controller, omega, bounds, false)
}

fn chain_oracle(
    g: &StochasticGame,
    controller: Player,
    omega: &[u32],
    bounds: &OracleBounds,
    almost_sure: bool,
) -> Result<VertexSet, OracleError> {
    let n = g.n();
    let mut region = VertexSet::empty(n);
    for sigma in memoryless_strategies(g, controller, bounds.max_strategies)? {
        let succ_of = |v: VertexId| -> Vec<VertexId> {
            if g.owner(v).is_player(controller) {
                vec![sigma.mv(v).expect("total")]
            } else {
                g.succ(v).to_vec()
            }
        };
        // Bottom SCCs of the chain and their parities.
        let mut even_bottom = VertexSet::empty(n);
        let mut odd_bottom = VertexSet::empty(n);
        for scc in sccs_masked(n, &VertexSet::full(n), &succ_of) {
            let closed = scc.iter().all(|&v| succ_of(v).iter().all(|t| scc.contains(t)));
            if !closed {
                continue;
            }
            let top = scc.iter().map(|&v| omega[v]).max().unwrap();
            for &v in &scc {
                if top % 2 == 0 {
                    even_bottom.insert(v);
                } else {
                    odd_bottom.insert(v);
                }
            }
        }
        let reach_even = backward_closure(n, &even_bottom, &succ_of);
        let reach_odd = backward_closure(n, &odd_bottom, &succ_of);
        let good = if almost_sure {
            // Almost-sure: no odd bottom SCC reachable.
            reach_odd.complement()
        } else {
            // Positive: some even bottom SCC reachable.
            reach_even
        };
        region.union_with(&good);
    }
    Ok(region)
}

fn backward_closure<F>(n: usize, seeds: &VertexSet, succ_of: F) -> VertexSet
where
    F: Fn(VertexId) -> Vec<VertexId>,
{
    let mut preds: Vec<Vec<VertexId>> = vec![Vec::new(); n];
    for v in 0..n {
        for t in succ_of(v) {
            preds[t].push(v);
        }
    }
    let mut out = seeds.clone();
    let mut queue: Vec<VertexId> = out.iter().collect();
    let mut head = 0;
    while head < queue.len() {
        let v = queue[head];
        head += 1;
        for &p in &preds[v] {
            if !out.contains(p) {
                out.insert(p);
                queue.push(p);
            }
        }
    }
    out
}

/// Almost-sure region for the conjunction of both parity objectives of an
/// MDP, via explicit end-component subset enumeration: the controller wins
/// almost-surely exactly from where it almost-surely reaches an end component
/// whose maxima are even under both priority functions.
pub fn oracle_mdp_as_conjunction(
    g: &StochasticGame,
    controller: Player,
    bounds: &OracleBounds,
) -> Result<VertexSet, OracleError> {
    let n = g.n();
    if n > 24 {
        return Err(OracleError::BoundExceeded { needed: 1u128 << n, bound: 1 << 24 });
    }
    let _ = bounds;
    let mut good = VertexSet::empty(n);
    for mask in 1u64..(1 << n) {
        let subset: Vec<VertexId> = (0..n).filter(|v| mask & (1 << v) != 0).collect();
        if !is_end_component(g, controller, &subset) {
            continue;
        }
        let m1 = subset.iter().map(|&v| g.prio1(v)).max().unwrap();
        let m2 = subset.iter().map(|&v| g.prio2(v)).max().unwrap();
        if m1 % 2 == 0 && m2 % 2 == 0 {
            for &v in &subset {
                good.insert(v);
            }
        }
    }
    Ok(as_reach(g, controller, &good).region)
}

/// End-component test: closed under probabilistic moves, the controller can
/// stay, and the slice is strongly connected under staying moves.
pub fn is_end_component(g: &StochasticGame, controller: Player, subset: &[VertexId]) -> bool {
    let inside = |v: VertexId| subset.contains(&v);
    for &v in subset {
        match g.owner(v) {
            Owner::Random => {
                if !g.succ(v).iter().all(|&t| inside(t)) {
                    return false;
                }
            }
            o if o.is_player(controller) => {
                if !g.succ(v).iter().any(|&t| inside(t)) {
                    return false;
                }
            }
            _ => return false,
        }
    }
    if subset.len() == 1 {
        return g.succ(subset[0]).contains(&subset[0]);
    }
    let fwd = closure(subset[0], subset, |v| {
        g.succ(v).iter().copied().filter(|&t| inside(t)).collect()
    });
    if fwd.len() != subset.len() {
        return false;
    }
    let bwd = closure(subset[0], subset, |v| {
        subset.iter().copied().filter(|&u| g.succ(u).contains(&v)).collect()
    });
    bwd.len() == subset.len()
}

/// Almost-sure conjunction region of a game by enumerating the environment's
/// memoryless strategies over the end-component oracle.
pub fn oracle_as_conjunction_region(
    g: &StochasticGame,
    bounds: &OracleBounds,
) -> Result<VertexSet, OracleError> {
    let mut region = VertexSet::full(g.n());
    for sigma in memoryless_strategies(g, Player::P2, bounds.max_strategies)? {
        let fixed = fix_strategy(g, Player::P2, &sigma)?;
        region.intersect_with(&oracle_mdp_as_conjunction(&fixed, Player::P1, bounds)?);
    }
    Ok(region)
}

/// Decides whether a fixed finite-memory Player-1 strategy is sure winning
/// for the first parity objective and almost-sure winning for the second,
/// from every vertex of `claimed`.
///
/// The strategy's memory is folded into a product; the sure part treats
/// probabilistic vertices adversarially and searches odd-dominated reachable
/// cycles, the almost-sure part hands the product to the adversary as a
/// single-controller game and asks for positive complement probability.
pub fn check_fixed_strategy_sas(
    g: &StochasticGame,
    sigma: &FiniteStrategy,
    claimed: &VertexSet,
) -> Result<bool, OracleError> {
    let mealy = sigma.as_mealy();
    // Reachable (memory, vertex) product from the claimed region at initial
    // memory.
    let mut index = std::collections::HashMap::new();
    let mut states: Vec<(usize, VertexId)> = Vec::new();
    let mut starts = Vec::new();
    for v in claimed.iter() {
        let key = (mealy.initial, v);
        if !index.contains_key(&key) {
            index.insert(key, states.len());
            states.push(key);
        }
        starts.push(index[&key]);
    }
    let mut succ: Vec<Vec<usize>> = Vec::new();
    let mut head = 0;
    while head < states.len() {
        let (m, v) = states[head];
        let next_m = mealy.next_memory(m, v);
        let targets: Vec<VertexId> = if g.owner(v) == Owner::P1 {
            let mv = mealy.mv(m, v).ok_or(OracleError::PartialStrategy(v))?;
            if !g.succ(v).contains(&mv) {
                return Err(OracleError::IllegalMove { vertex: v, mv });
            }
            vec![mv]
        } else {
            g.succ(v).to_vec()
        };
        let mut row = Vec::with_capacity(targets.len());
        for t in targets {
            let key = (next_m, t);
            let id = *index.entry(key).or_insert_with(|| {
                states.push(key);
                states.len() - 1
            });
            row.push(id);
        }
        succ.push(row);
        head += 1;
    }
    let pn = states.len();
    let omega1: Vec<u32> = states.iter().map(|&(_, v)| g.prio1(v)).collect();

    // Sure part: an odd-dominated cycle reachable from a start state refutes
    // the claim; random resolution is adversarial here.
    let succ_clone = succ.clone();
    let danger = odd_cycle_reachers(pn, &omega1, |s| succ_clone[s].clone());
    if starts.iter().any(|&s| danger.contains(s)) {
        return Ok(false);
    }

    // Almost-sure part: the product as a single-controller game for the
    // adversary, probabilistic vertices keeping their distributions.
    let mut b = GameBuilder::new();
    for &(_, v) in &states {
        let owner = match g.owner(v) {
            Owner::P1 => Owner::Random,
            o => o,
        };
        b.add_vertex(owner, g.prio1(v), g.prio2(v));
    }
    for (s, row) in succ.iter().enumerate() {
        let (_, v) = states[s];
        match g.owner(v) {
            Owner::P1 => b.add_prob_edge(s, row[0], Prob::one()),
            Owner::Random => {
                for (k, &t) in row.iter().enumerate() {
                    b.add_prob_edge(s, t, g.delta(v)[k].clone());
                }
            }
            Owner::P2 => {
                for &t in row {
                    b.add_edge(s, t);
                }
            }
        }
    }
    let product = b.build().expect("product of a valid game is valid");
    let omega2_up: Vec<u32> = states.iter().map(|&(_, v)| g.prio2(v) + 1).collect();
    let spoil = mdp_pos_parity(&product, Player::P2, &omega2_up).expect("single controller");
    Ok(starts.iter().all(|&s| !spoil.contains(s)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::worked_example_d2pw;
    use crate::conjunction::build_conjunction_dpw;
    use crate::game::{game_from_parts, infinite_memory_mdp};

    #[test]
    fn worked_example_pair_is_equal() {
        let a = worked_example_d2pw();
        let b = build_conjunction_dpw(&a);
        assert_eq!(dpw_equiv_oracle(&a, &b, &OracleBounds::default()).unwrap(), DpwEquiv::Equal);
    }

    #[test]
    fn mutated_priority_yields_counterexample() {
        let a = worked_example_d2pw();
        let mut b = build_conjunction_dpw(&a);
        // Flip one state's priority parity.
        b.omega[2] += 1;
        match dpw_equiv_oracle(&a, &b, &OracleBounds::default()).unwrap() {
            DpwEquiv::Counterexample { stem, cycle } => {
                assert!(!cycle.is_empty());
                let wa = crate::automata::word_accepted_d2pw(&a, &stem, &cycle);
                let wb = crate::automata::word_accepted_dpw(&b, &stem, &cycle);
                assert_ne!(wa, wb);
            }
            DpwEquiv::Equal => panic!("mutation must be caught"),
        }
    }

    #[test]
    fn empty_vs_universal_has_counterexample() {
        let a = D2pw {
            alphabet: vec!["a".into()],
            initial: 0,
            delta: vec![vec![0]],
            omega1: vec![1],
            omega2: vec![1],
        };
        let b = Dpw { alphabet: vec!["a".into()], initial: 0, delta: vec![vec![0]], omega: vec![0] };
        match dpw_equiv_oracle(&a, &b, &OracleBounds::default()).unwrap() {
            DpwEquiv::Counterexample { cycle, .. } => assert_eq!(cycle, vec![0]),
            DpwEquiv::Equal => panic!("languages differ"),
        }
    }

    #[test]
    fn as_parity_oracle_on_fig1() {
        let g = infinite_memory_mdp();
        // All priorities even under Ω = [0,0,0,0].
        let all = oracle_as_parity_region(&g, &[0, 0, 0, 0], &OracleBounds::default()).unwrap();
        assert_eq!(all.count(), 4);
        // Ω2 (coBüchi on v_d): choosing v_b works from everywhere.
        let o2 = oracle_as_parity_region(&g, &[0, 0, 0, 1], &OracleBounds::default()).unwrap();
        assert_eq!(o2.count(), 4);
    }

    #[test]
    fn sas_oracle_trivial_cases() {
        // Ω1 constant 1: empty under any strategy.
        let g = game_from_parts(&[Owner::P1, Owner::P2], &[1, 1], &[0, 0], &[(0, 1), (1, 0)], &[]).unwrap();
        assert!(oracle_sas_region(&g, &OracleBounds::default()).unwrap().is_empty());
        // No P2 vertices: the oracle is a single solver call.
        let g = infinite_memory_mdp();
        assert_eq!(oracle_sas_region(&g, &OracleBounds::default()).unwrap().count(), 4);
    }

    #[test]
    fn fixed_strategy_checker_on_fig1() {
        let g = infinite_memory_mdp();
        let claimed = VertexSet::from_iter(4, [0]);
        // Always v_b: the adversarial coin loops a-b forever, Ω1 limsup 1.
        let always_b = FiniteStrategy::Memoryless(MemorylessStrategy::from_moves(vec![
            Some(1),
            None,
            Some(0),
            Some(0),
        ]));
        assert!(!check_fixed_strategy_sas(&g, &always_b, &claimed).unwrap());
        // Always v_d: sure Büchi holds but v_d recurs with probability 1.
        let always_d = FiniteStrategy::Memoryless(MemorylessStrategy::from_moves(vec![
            Some(3),
            None,
            Some(0),
            Some(0),
        ]));
        assert!(!check_fixed_strategy_sas(&g, &always_d, &claimed).unwrap());
        // Trivial objectives accept anything.
        let easy = game_from_parts(&[Owner::P1], &[0], &[0], &[(0, 0)], &[]).unwrap();
        let stay = FiniteStrategy::Memoryless(MemorylessStrategy::from_moves(vec![Some(0)]));
        assert!(check_fixed_strategy_sas(&easy, &stay, &VertexSet::full(1)).unwrap());
    }

    #[test]
    fn bound_exceeded_is_an_error() {
        let g = infinite_memory_mdp();
        let bounds = OracleBounds { max_strategies: 1, ..Default::default() };
        assert!(matches!(
            oracle_as_parity_region(&g, &[0; 4], &bounds),
            Err(OracleError::BoundExceeded { .. })
        ));
    }

    #[test]
    fn conjunction_oracle_on_fig1() {
        // Fig 1 is almost-sure winnable for the conjunction from everywhere
        // (always choose v_b).
        let g = infinite_memory_mdp();
        let r = oracle_mdp_as_conjunction(&g, Player::P1, &OracleBounds::default()).unwrap();
        assert_eq!(r.count(), 4);
    }
}
