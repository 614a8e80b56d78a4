//! NP-style certificates for claimed winning regions: a recursive witness
//! tree generated from the derivation and an independent polynomial-time
//! verifier that never solves games.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::attractor::{is_trap, pos_attractor, sure_attractor};
use crate::conjunction::lift_conjunction_game;
use crate::game::{GameBuilder, Owner, Player, Prob, StochasticGame, VertexId};
use crate::mdp::mdp_pos_parity;
use crate::set::VertexSet;
use crate::solver::{conjunction_analysis, solve_sas, DerivationTrace};
use num_traits::One;

/// A product state named by its base vertex (local to the stage game) and
/// register vector.
pub type ProductKey = (VertexId, Vec<u32>);

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum CertNode {
    /// Empty or sink-only stage game.
    Trivial,
    Even(EvenCert),
    Odd(OddCert),
}

/// Even stage: a memoryless almost-sure witness for the conjunction on the
/// register product, and a child certificate for the closure of the
/// complement of the sure attractor to the top class.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvenCert {
    pub product_region: Vec<ProductKey>,
    /// Product strategy rows `(state, base successor)` on Player-1 states.
    pub product_strategy: Vec<(ProductKey, VertexId)>,
    pub child: Box<CertNode>,
}

/// Odd stage: a cascade of blocks, each naming a trap `r` free of the top
/// priority, its sure attractor `u`, and a child certificate for the trap.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OddCert {
    pub blocks: Vec<CertBlock>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertBlock {
    pub u: Vec<VertexId>,
    pub r: Vec<VertexId>,
    pub child: CertNode,
}

/// A certificate for a claimed winning region of one game. Inner sets use
/// the vertex ids of deterministically reconstructed stage games, so the
/// verifier rebuilds the same games and compares exactly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Certificate {
    pub schema: u32,
    pub region: Vec<VertexId>,
    pub digest: String,
    pub root: CertNode,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertReject {
    #[error("claimed region contains unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("claimed region is not a trap for Player 2")]
    RegionNotTrap,
    #[error("node shape does not match the stage game (expected {expected})")]
    ShapeMismatch { expected: &'static str },
    #[error("product witness misses the zero state of vertex {0}")]
    MissingZeroState(VertexId),
    #[error("product witness names unknown state")]
    UnknownProductState,
    #[error("product strategy missing on a Player-1 state")]
    PartialProductStrategy,
    #[error("product strategy leaves the claimed region")]
    StrategyLeavesRegion,
    #[error("claimed product region is not closed under adversary moves")]
    RegionNotClosed,
    #[error("adversary has positive complement probability inside the witness region")]
    WitnessNotAlmostSure,
    #[error("block trap condition fails")]
    BlockNotTrap,
    #[error("block contains a top-priority vertex")]
    BlockHasTopPriority,
    #[error("block attractor mismatch: u is not the sure attractor of r")]
    BlockAttractorMismatch,
    #[error("blocks leave real vertices uncovered")]
    IncompleteBlocks,
    #[error("block sets are malformed")]
    MalformedBlock,
    #[error("content digest mismatch")]
    DigestMismatch,
}

fn digest_of(region: &[VertexId], root: &CertNode) -> String {
    let body = serde_json::to_vec(&(region, root)).expect("serializable");
    let mut hasher = Sha256::new();
    hasher.update(&body);
    hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Builds the certificate for the winning region recorded in the trace by
/// re-deriving the stage games on the restriction to the claimed region.
pub fn build_certificate(g: &StochasticGame, trace: &DerivationTrace) -> Certificate {
    let region = trace.root.w1.to_vec();
    let root = if region.is_empty() {
        CertNode::Trivial
    } else {
        let restricted = g
            .restrict(&trace.root.w1)
            .expect("winning region is a trap for Player 2");
        build_node(&restricted.game)
    };
    let digest = digest_of(&region, &root);
    Certificate { schema: 1, region, digest, root }
}

fn build_node(g: &StochasticGame) -> CertNode {
    if g.real_vertices().is_empty() {
        return CertNode::Trivial;
    }
    let d = g.vertices().map(|v| g.prio1(v)).max().expect("nonempty");
    if d % 2 == 0 {
        let analysis = conjunction_analysis(g);
        debug_assert_eq!(analysis.w_as, g.all_vertices());
        let strategy = analysis.product_strategy();
        let product_region = analysis
            .as_region
            .iter()
            .map(|pid| (analysis.product.to_base[pid], analysis.product.registers[pid].clone()))
            .collect();
        let product_strategy = analysis
            .as_region
            .iter()
            .filter_map(|pid| {
                strategy[pid].map(|succ| {
                    (
                        (analysis.product.to_base[pid], analysis.product.registers[pid].clone()),
                        analysis.product.to_base[succ],
                    )
                })
            })
            .collect();
        let z = g.vertices_with(g.omega1(), d);
        let a = sure_attractor(g, Player::P1, &z);
        let closure = g.subgame_closure(&a.region.complement()).expect("closure precondition");
        CertNode::Even(EvenCert {
            product_region,
            product_strategy,
            child: Box::new(build_node(&closure.game)),
        })
    } else {
        let mut blocks = Vec::new();
        let mut stage = g.clone();
        while !stage.real_vertices().is_empty() {
            let n = stage.n();
            let top = stage.vertices().map(|v| stage.prio1(v)).max().expect("nonempty");
            let z = if top == d { stage.vertices_with(stage.omega1(), d) } else { VertexSet::empty(n) };
            let a = pos_attractor(&stage, Player::P2, &z);
            let sub = stage.restrict(&a.region.complement()).expect("trap");
            let sub_res = solve_sas(&sub.game);
            let mut r = VertexSet::empty(n);
            for v in sub_res.w1.iter() {
                r.insert(sub.to_parent[v]);
            }
            for (i, &p) in sub.to_parent.iter().enumerate() {
                if sub.game.is_sink(i) {
                    r.insert(p);
                }
            }
            let u = sure_attractor(&stage, Player::P1, &r);
            let child_game = stage.restrict(&r).expect("winners plus sinks form a trap");
            let child = build_node(&child_game.game);
            blocks.push(CertBlock { u: u.region.to_vec(), r: r.to_vec(), child });
            let rest = u.region.complement();
            let closure = stage.subgame_closure(&rest).expect("closure precondition");
            stage = closure.game;
        }
        CertNode::Odd(OddCert { blocks })
    }
}

/// Checks every local condition of the certificate against deterministically
/// rebuilt stage games; never invokes the solver.
pub fn verify_certificate(g: &StochasticGame, cert: &Certificate) -> Result<(), CertReject> {
    if cert.digest != digest_of(&cert.region, &cert.root) {
        return Err(CertReject::DigestMismatch);
    }
    let mut region = VertexSet::empty(g.n());
    for &v in &cert.region {
        if v >= g.n() {
            return Err(CertReject::UnknownVertex(v));
        }
        region.insert(v);
    }
    if region.is_empty() {
        return match cert.root {
            CertNode::Trivial => Ok(()),
            _ => Err(CertReject::ShapeMismatch { expected: "trivial node for an empty claim" }),
        };
    }
    if !is_trap(g, Player::P2, &region) {
        return Err(CertReject::RegionNotTrap);
    }
    let restricted = g.restrict(&region).expect("traps induce subgames");
    verify_node(&restricted.game, &cert.root)
}

fn verify_node(g: &StochasticGame, node: &CertNode) -> Result<(), CertReject> {
    if g.real_vertices().is_empty() {
        return match node {
            CertNode::Trivial => Ok(()),
            _ => Err(CertReject::ShapeMismatch { expected: "trivial node" }),
        };
    }
    let d = g.vertices().map(|v| g.prio1(v)).max().expect("nonempty");
    match (d % 2 == 0, node) {
        (true, CertNode::Even(even)) => verify_even(g, d, even),
        (false, CertNode::Odd(odd)) => verify_odd(g, d, odd),
        (true, _) => Err(CertReject::ShapeMismatch { expected: "even node" }),
        (false, _) => Err(CertReject::ShapeMismatch { expected: "odd node" }),
    }
}

fn verify_even(g: &StochasticGame, d: u32, cert: &EvenCert) -> Result<(), CertReject> {
    let product = lift_conjunction_game(g);
    let mut key_of = std::collections::HashMap::new();
    for pid in 0..product.game.n() {
        key_of.insert((product.to_base[pid], product.registers[pid].clone()), pid);
    }
    let mut claimed = VertexSet::empty(product.game.n());
    for key in &cert.product_region {
        let pid = key_of.get(key).ok_or(CertReject::UnknownProductState)?;
        claimed.insert(*pid);
    }
    for v in g.vertices() {
        if !claimed.contains(product.zero_state[v]) {
            return Err(CertReject::MissingZeroState(v));
        }
    }
    let mut moves: Vec<Option<VertexId>> = vec![None; product.game.n()];
    for (key, base_succ) in &cert.product_strategy {
        let pid = *key_of.get(key).ok_or(CertReject::UnknownProductState)?;
        let succ = product
            .game
            .succ(pid)
            .iter()
            .copied()
            .find(|&s| product.to_base[s] == *base_succ)
            .ok_or(CertReject::StrategyLeavesRegion)?;
        moves[pid] = Some(succ);
    }
    // Closure of the claimed region under the strategy and adversary moves.
    for pid in claimed.iter() {
        match g.owner(product.to_base[pid]) {
            Owner::P1 => {
                let succ = moves[pid].ok_or(CertReject::PartialProductStrategy)?;
                if !claimed.contains(succ) {
                    return Err(CertReject::StrategyLeavesRegion);
                }
            }
            _ => {
                for &s in product.game.succ(pid) {
                    if !claimed.contains(s) {
                        return Err(CertReject::RegionNotClosed);
                    }
                }
            }
        }
    }
    // Fix the strategy and hand the claimed region to the adversary as a
    // single-controller game; positive complement probability refutes.
    let claimed_list: Vec<VertexId> = claimed.iter().collect();
    let mut dense = vec![usize::MAX; product.game.n()];
    for (i, &pid) in claimed_list.iter().enumerate() {
        dense[pid] = i;
    }
    let mut b = GameBuilder::new();
    for &pid in &claimed_list {
        let owner = match g.owner(product.to_base[pid]) {
            Owner::P1 => Owner::Random,
            o => o,
        };
        b.add_vertex(owner, product.omega12[pid], 0);
    }
    for (i, &pid) in claimed_list.iter().enumerate() {
        let base = product.to_base[pid];
        match g.owner(base) {
            Owner::P1 => b.add_prob_edge(i, dense[moves[pid].expect("checked")], Prob::one()),
            Owner::Random => {
                for (k, &s) in product.game.succ(pid).iter().enumerate() {
                    b.add_prob_edge(i, dense[s], product.game.delta(pid)[k].clone());
                }
            }
            Owner::P2 => {
                for &s in product.game.succ(pid) {
                    b.add_edge(i, dense[s]);
                }
            }
        }
    }
    let fixed = b.build().expect("closed region forms a game");
    let up: Vec<u32> = claimed_list.iter().map(|&pid| product.omega12[pid] + 1).collect();
    let spoil = mdp_pos_parity(&fixed, Player::P2, &up).expect("single controller");
    if !spoil.is_empty() {
        return Err(CertReject::WitnessNotAlmostSure);
    }
    // Recurse into the closure of the complement of the sure attractor.
    let z = g.vertices_with(g.omega1(), d);
    let a = sure_attractor(g, Player::P1, &z);
    let closure = g.subgame_closure(&a.region.complement()).expect("closure precondition");
    verify_node(&closure.game, &cert.child)
}

fn verify_odd(g: &StochasticGame, d: u32, cert: &OddCert) -> Result<(), CertReject> {
    let mut stage = g.clone();
    for block in &cert.blocks {
        let n = stage.n();
        let mut r = VertexSet::empty(n);
        let mut u = VertexSet::empty(n);
        for &v in &block.r {
            if v >= n {
                return Err(CertReject::MalformedBlock);
            }
            r.insert(v);
        }
        for &v in &block.u {
            if v >= n {
                return Err(CertReject::MalformedBlock);
            }
            u.insert(v);
        }
        if r.is_empty() || !r.is_subset_of(&u) {
            return Err(CertReject::MalformedBlock);
        }
        if r.iter().any(|v| stage.prio1(v) == d) {
            return Err(CertReject::BlockHasTopPriority);
        }
        if !is_trap(&stage, Player::P2, &r) {
            return Err(CertReject::BlockNotTrap);
        }
        let attr = sure_attractor(&stage, Player::P1, &r);
        if attr.region != u {
            return Err(CertReject::BlockAttractorMismatch);
        }
        let child_game = stage.restrict(&r).expect("traps induce subgames");
        verify_node(&child_game.game, &block.child)?;
        let rest = u.complement();
        let closure = stage.subgame_closure(&rest).expect("closure precondition");
        stage = closure.game;
    }
    if stage.real_vertices().is_empty() {
        Ok(())
    } else {
        Err(CertReject::IncompleteBlocks)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{game_from_parts, infinite_memory_mdp};
    use crate::solver::solve_invocations;

    #[test]
    fn fig1_certificate_round_trips() {
        let g = infinite_memory_mdp();
        let res = solve_sas(&g);
        let cert = build_certificate(&g, &res.trace);
        assert_eq!(cert.region, vec![0, 1, 2, 3]);
        // The top node is even (d = 2) with the whole game in the attractor,
        // so the child is the trivial lone-sink stage.
        match &cert.root {
            CertNode::Even(e) => assert!(matches!(*e.child, CertNode::Trivial)),
            other => panic!("expected even root, got {other:?}"),
        }
        verify_certificate(&g, &cert).unwrap();
    }

    #[test]
    fn trivial_objective_gives_single_even_node() {
        let g = game_from_parts(
            &[Owner::P1, Owner::P2],
            &[0, 0],
            &[0, 0],
            &[(0, 1), (1, 0)],
            &[],
        )
        .unwrap();
        let res = solve_sas(&g);
        let cert = build_certificate(&g, &res.trace);
        assert!(matches!(cert.root, CertNode::Even(_)));
        verify_certificate(&g, &cert).unwrap();
    }

    #[test]
    fn verification_never_solves() {
        let g = infinite_memory_mdp();
        let res = solve_sas(&g);
        let cert = build_certificate(&g, &res.trace);
        let before = solve_invocations();
        verify_certificate(&g, &cert).unwrap();
        assert_eq!(solve_invocations(), before, "the verifier must not invoke the solver");
    }

    #[test]
    fn unsatisfiable_claim_is_rejected() {
        // Ω1 constant 1: claiming everything winning cannot verify.
        let g = game_from_parts(&[Owner::P1, Owner::P1], &[1, 1], &[0, 0], &[(0, 1), (1, 0)], &[]).unwrap();
        let res = solve_sas(&g);
        let honest = build_certificate(&g, &res.trace);
        assert!(honest.region.is_empty());
        verify_certificate(&g, &honest).unwrap();
        let mut lying = honest.clone();
        lying.region = vec![0, 1];
        lying.root = CertNode::Odd(OddCert { blocks: vec![] });
        lying.digest = digest_of(&lying.region, &lying.root);
        assert!(verify_certificate(&g, &lying).is_err());
    }

    #[test]
    fn tampered_digest_is_malformed() {
        let g = infinite_memory_mdp();
        let res = solve_sas(&g);
        let mut cert = build_certificate(&g, &res.trace);
        cert.digest = "00".repeat(32);
        assert_eq!(verify_certificate(&g, &cert), Err(CertReject::DigestMismatch));
    }

    #[test]
    fn moved_block_vertex_is_rejected() {
        // A game with an odd top layer and a nonempty winning region.
        let g = game_from_parts(
            &[Owner::P1, Owner::P1],
            &[1, 0],
            &[0, 0],
            &[(0, 0), (0, 1), (1, 1)],
            &[],
        )
        .unwrap();
        let res = solve_sas(&g);
        assert!(!res.w1.is_empty());
        let cert = build_certificate(&g, &res.trace);
        verify_certificate(&g, &cert).unwrap();
        let mut mutated = cert.clone();
        if let CertNode::Odd(odd) = &mut mutated.root {
            // Move a vertex from r into u only.
            let v = odd.blocks[0].r.pop().expect("nonempty block");
            if !odd.blocks[0].u.contains(&v) {
                odd.blocks[0].u.push(v);
            }
            mutated.digest = digest_of(&mutated.region, &mutated.root);
            assert!(verify_certificate(&g, &mutated).is_err());
        } else {
            panic!("expected odd root");
        }
    }
}
