//! Recursive computation of the sure-almost-sure winning partition, with a
//! full derivation trace for synthesis and certification.
//!
//! The recursion follows the parity of the largest first-condition priority:
//! an even top layer first restricts to the almost-sure region of the
//! conjunction (computed on the register product), removes the sure attractor
//! to the top class and recurses on the subgame closure of the remainder; an
//! odd top layer removes the adversary's positive attractor to the top class
//! and recurses on the induced subgame, re-attaching the survivors through a
//! sure attractor.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::Serialize;

use crate::attractor::{pos_attractor, sure_attractor, AttractorResult};
use crate::conjunction::{lift_conjunction_game, LiftedProduct};
use crate::game::{Player, StochasticGame, VertexId};
use crate::qualitative::{as_winning_region, extract_as_strategy};
use crate::set::VertexSet;

static SOLVE_CALLS: AtomicU64 = AtomicU64::new(0);

/// Number of `solve_sas` invocations in this process. Certificate
/// verification is required never to solve games; tests pin that by reading
/// this counter around a verification run.
pub fn solve_invocations() -> u64 {
    SOLVE_CALLS.load(Ordering::Relaxed)
}

/// Almost-sure analysis of the conjunction of the game's two parity
/// objectives through the register product.
#[derive(Debug, Clone, Serialize)]
pub struct ConjunctionAnalysis {
    pub product: LiftedProduct,
    /// Almost-sure region of the product under the combined priority.
    pub as_region: VertexSet,
    /// Base vertices whose zero-register product vertex is almost-sure
    /// winning; equals the almost-sure region for the conjunction.
    pub w_as: VertexSet,
}

impl ConjunctionAnalysis {
    /// Memoryless product strategy witnessing the almost-sure region;
    /// certificates and synthesis derive Mealy machines from it.
    pub fn product_strategy(&self) -> Vec<Option<VertexId>> {
        extract_as_strategy(&self.product.game, Player::P1, &self.product.omega12, &self.as_region)
    }
}

/// One node of the derivation tree. Regions are in the node game's ids and
/// never contain sink vertices; `to_original` maps node ids back to the
/// original game (closure sinks map to nothing).
#[derive(Debug, Clone, Serialize)]
pub struct TraceNode {
    pub game: StochasticGame,
    pub to_original: Vec<Option<VertexId>>,
    /// Largest first-condition priority in the node game, when nonempty.
    pub d: Option<u32>,
    pub w1: VertexSet,
    pub w2: VertexSet,
    pub step: TraceStep,
}

#[derive(Debug, Clone, Serialize)]
pub enum TraceStep {
    /// Empty or sink-only game: everything (trivially) winning.
    Base,
    Even(Box<EvenStep>),
    Odd(Box<OddStep>),
}

#[derive(Debug, Clone, Serialize)]
pub struct EvenStep {
    pub conjunction: ConjunctionAnalysis,
    /// Restriction of the node game to `conjunction.w_as`; the fields below
    /// are in restricted-game ids.
    pub restricted_to_parent: Vec<VertexId>,
    pub z: VertexSet,
    /// Sure attractor for Player 1 to `z` in the restricted game.
    pub a: AttractorResult,
    pub closure_to_parent: Vec<Option<VertexId>>,
    pub closure_sink: VertexId,
    pub closure_child: TraceNode,
    pub else_branch: Option<EvenElse>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvenElse {
    /// Positive attractor for Player 2 to the closure losing region, in
    /// restricted-game ids.
    pub b: AttractorResult,
    pub rest_to_parent: Vec<VertexId>,
    pub rest_child: TraceNode,
}

#[derive(Debug, Clone, Serialize)]
pub struct OddStep {
    pub z: VertexSet,
    /// Positive attractor for Player 2 to `z` in the node game.
    pub a: AttractorResult,
    pub sub_to_parent: Vec<VertexId>,
    pub sub_child: TraceNode,
    pub else_branch: Option<OddElse>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OddElse {
    /// Sure attractor for Player 1 to the subgame winning region (winning
    /// sinks included: forced absorption wins), node ids.
    pub b: AttractorResult,
    pub closure_to_parent: Vec<Option<VertexId>>,
    pub closure_sink: VertexId,
    pub closure_child: TraceNode,
}

#[derive(Debug, Clone, Serialize)]
pub struct DerivationTrace {
    pub root: TraceNode,
}

#[derive(Debug, Clone, Serialize)]
pub struct SasResult {
    pub w1: VertexSet,
    pub w2: VertexSet,
    pub trace: DerivationTrace,
}

#[derive(Default)]
struct Ctx {
    /// Conjunction analyses memoized per node game.
    memo: HashMap<StochasticGame, ConjunctionAnalysis>,
}

impl Ctx {
    fn conjunction(&mut self, g: &StochasticGame) -> ConjunctionAnalysis {
        if let Some(hit) = self.memo.get(g) {
            return hit.clone();
        }
        let analysis = conjunction_analysis(g);
        self.memo.insert(g.clone(), analysis.clone());
        analysis
    }
}

/// Almost-sure region for the conjunction of the game's two parity
/// objectives, by solving almost-sure parity on the register product and
/// projecting at zero registers.
pub fn conjunction_analysis(g: &StochasticGame) -> ConjunctionAnalysis {
    let product = lift_conjunction_game(g);
    let as_region = as_winning_region(&product.game, Player::P1, &product.omega12);
    let w_as = VertexSet::from_iter(
        g.n(),
        g.vertices().filter(|&v| as_region.contains(product.zero_state[v])),
    );
    ConjunctionAnalysis { product, as_region, w_as }
}

fn compose_total(outer: &[Option<VertexId>], inner: &[VertexId]) -> Vec<Option<VertexId>> {
    inner.iter().map(|&p| outer[p]).collect()
}

fn compose_partial(outer: &[Option<VertexId>], inner: &[Option<VertexId>]) -> Vec<Option<VertexId>> {
    inner.iter().map(|p| p.and_then(|p| outer[p])).collect()
}

fn map_set(set: &VertexSet, to_parent: &[VertexId], n_parent: usize) -> VertexSet {
    VertexSet::from_iter(n_parent, set.iter().map(|v| to_parent[v]))
}

fn max_prio1(g: &StochasticGame) -> Option<u32> {
    g.vertices().map(|v| g.prio1(v)).max()
}

/// Lexicographic termination measure: (largest Ω1 priority, non-sink vertex
/// count) must strictly decrease into every recursive call.
fn assert_measure_decreases(parent_d: u32, parent_real: usize, child: &StochasticGame) {
    let child_real = child.real_vertices().count();
    let child_d = max_prio1(child).unwrap_or(0);
    assert!(
        child_d < parent_d || (child_d == parent_d && child_real < parent_real),
        "recursion measure did not decrease: ({parent_d},{parent_real}) -> ({child_d},{child_real})"
    );
}

/// Computes the sure-almost-sure winning partition of the game under its two
/// priority functions. `w1` holds exactly the vertices from which Player 1
/// has a strategy that wins `Parity(omega1)` surely and `Parity(omega2)`
/// almost-surely; `w2` is the complement.
pub fn solve_sas(g: &StochasticGame) -> SasResult {
    SOLVE_CALLS.fetch_add(1, Ordering::Relaxed);
    let mut ctx = Ctx::default();
    let to_original = (0..g.n()).map(Some).collect();
    let root = solve_node(&mut ctx, g.clone(), to_original);
    SasResult { w1: root.w1.clone(), w2: root.w2.clone(), trace: DerivationTrace { root } }
}

fn solve_node(ctx: &mut Ctx, game: StochasticGame, to_original: Vec<Option<VertexId>>) -> TraceNode {
    let n = game.n();
    let real = game.real_vertices();
    if real.is_empty() {
        let (w1, w2) = (VertexSet::empty(n), VertexSet::empty(n));
        return TraceNode { game, to_original, d: None, w1, w2, step: TraceStep::Base };
    }
    let d = max_prio1(&game).expect("nonempty game");
    let parent_real = real.count();

    let node = if d % 2 == 0 {
        let analysis = ctx.conjunction(&game);
        let restricted = game
            .restrict(&analysis.w_as)
            .expect("the almost-sure conjunction region is a trap for Player 2");
        let rn = restricted.game.n();
        let z = restricted.game.vertices_with(restricted.game.omega1(), d);
        let a = sure_attractor(&restricted.game, Player::P1, &z);
        let rest = a.region.complement();
        let closure = restricted
            .game
            .subgame_closure(&rest)
            .expect("complement of a sure attractor admits a closure");
        assert_measure_decreases(d, parent_real, &closure.game);
        let child_map = compose_partial(
            &compose_total(&to_original, &restricted.to_parent),
            &closure.to_parent,
        );
        let closure_child = solve_node(ctx, closure.game.clone(), child_map);

        let (w1, w2, else_branch) = if closure_child.w2.is_empty() {
            let w1 = analysis.w_as.intersection(&real);
            let w2 = real.difference(&w1);
            (w1, w2, None)
        } else {
            let lost_restricted = VertexSet::from_iter(
                rn,
                closure_child
                    .w2
                    .iter()
                    .map(|v| closure.to_parent[v].expect("losing region excludes sinks")),
            );
            let b = pos_attractor(&restricted.game, Player::P2, &lost_restricted);
            let rest2 = b.region.complement();
            let tail = restricted
                .game
                .restrict(&rest2)
                .expect("complement of a positive attractor is a trap");
            assert_measure_decreases(d, parent_real, &tail.game);
            let tail_map = compose_total(
                &compose_total(&to_original, &restricted.to_parent),
                &tail.to_parent,
            );
            let rest_child = solve_node(ctx, tail.game.clone(), tail_map);
            let w1_restricted = map_set(&rest_child.w1, &tail.to_parent, rn);
            let w1 = map_set(&w1_restricted, &restricted.to_parent, n).intersection(&real);
            let w2 = real.difference(&w1);
            (w1, w2, Some(EvenElse { b, rest_to_parent: tail.to_parent, rest_child }))
        };
        TraceNode {
            d: Some(d),
            w1,
            w2,
            step: TraceStep::Even(Box::new(EvenStep {
                conjunction: analysis,
                restricted_to_parent: restricted.to_parent,
                z,
                a,
                closure_to_parent: closure.to_parent,
                closure_sink: closure.sink,
                closure_child,
                else_branch,
            })),
            game,
            to_original,
        }
    } else {
        let z = game.vertices_with(game.omega1(), d);
        let a = pos_attractor(&game, Player::P2, &z);
        let rest = a.region.complement();
        let sub = game.restrict(&rest).expect("complement of a positive attractor is a trap");
        assert_measure_decreases(d, parent_real, &sub.game);
        let sub_map = compose_total(&to_original, &sub.to_parent);
        let sub_child = solve_node(ctx, sub.game.clone(), sub_map);
        // The attractor target is the subgame winning region including its
        // sinks: Player 1 also wins by forcing absorption.
        let mut target = map_set(&sub_child.w1, &sub.to_parent, n);
        for (i, &p) in sub.to_parent.iter().enumerate() {
            if sub.game.is_sink(i) {
                target.insert(p);
            }
        }
        let b = sure_attractor(&game, Player::P1, &target);
        let b_real = b.region.intersection(&real);

        let (w1, w2, else_branch) = if b_real.is_empty() {
            (VertexSet::empty(n), real.clone(), None)
        } else {
            let rest2 = b.region.complement();
            let closure = game
                .subgame_closure(&rest2)
                .expect("complement of a sure attractor admits a closure");
            assert_measure_decreases(d, parent_real, &closure.game);
            let child_map = compose_partial(&to_original, &closure.to_parent);
            let closure_child = solve_node(ctx, closure.game.clone(), child_map);
            let mut w1 = b_real.clone();
            for v in closure_child.w1.iter() {
                if let Some(p) = closure.to_parent[v] {
                    w1.insert(p);
                }
            }
            let w2 = real.difference(&w1);
            (
                w1,
                w2,
                Some(OddElse {
                    b,
                    closure_to_parent: closure.to_parent,
                    closure_sink: closure.sink,
                    closure_child,
                }),
            )
        };
        TraceNode {
            d: Some(d),
            w1,
            w2,
            step: TraceStep::Odd(Box::new(OddStep {
                z,
                a,
                sub_to_parent: sub.to_parent,
                sub_child,
                else_branch,
            })),
            game,
            to_original,
        }
    };
    debug_assert!(node.w1.is_disjoint_from(&node.w2));
    debug_assert_eq!(node.w1.union(&node.w2), node.game.real_vertices());
    node
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{game_from_parts, infinite_memory_mdp, Owner};

    #[test]
    fn fig1_wins_everywhere() {
        let g = infinite_memory_mdp();
        let res = solve_sas(&g);
        assert_eq!(res.w1.count(), 4);
        assert!(res.w2.is_empty());
    }

    #[test]
    fn both_objectives_trivial() {
        let g = game_from_parts(
            &[Owner::P1, Owner::P2],
            &[0, 0],
            &[0, 0],
            &[(0, 1), (1, 0)],
            &[],
        )
        .unwrap();
        let res = solve_sas(&g);
        assert_eq!(res.w1.count(), 2);
    }

    #[test]
    fn sure_objective_empty() {
        // Ω1 constant 1: every play has limsup 1.
        let g = game_from_parts(&[Owner::P1, Owner::P1], &[1, 1], &[0, 2], &[(0, 1), (1, 0)], &[]).unwrap();
        let res = solve_sas(&g);
        assert!(res.w1.is_empty());
        assert_eq!(res.w2.count(), 2);
    }

    #[test]
    fn sure_buechi_almost_sure_cobuechi_conflict() {
        // One vertex must be visited infinitely often surely (Ω1 = 2 there)
        // but carries odd Ω2, while the only alternative violates Ω1: the
        // combination is losing when the priorities force both.
        // 0 (P1, (1,0)) -> {1}; 1 (P1, (2,1)) -> {0}: every play alternates,
        // sure Büchi holds, but Ω2 limsup = 1: lose.
        let g = game_from_parts(&[Owner::P1, Owner::P1], &[1, 2], &[0, 1], &[(0, 1), (1, 0)], &[]).unwrap();
        let res = solve_sas(&g);
        assert!(res.w1.is_empty());
    }

    #[test]
    fn partition_invariant_on_small_games() {
        let g = infinite_memory_mdp();
        let res = solve_sas(&g);
        assert!(res.w1.is_disjoint_from(&res.w2));
        assert_eq!(res.w1.union(&res.w2).count(), 4);
    }

    #[test]
    fn invocation_counter_moves() {
        let before = solve_invocations();
        let g = infinite_memory_mdp();
        let _ = solve_sas(&g);
        assert!(solve_invocations() > before);
    }
}
