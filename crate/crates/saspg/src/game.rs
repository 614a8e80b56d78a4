//! Game-graph data model: vertex-partitioned graphs with exact rational
//! transition distributions and two priority functions, plus subgame
//! restriction, subgame closure and derandomization.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::set::VertexSet;

pub type VertexId = usize;

/// Exact transition probability.
pub type Prob = BigRational;

pub fn prob(num: i64, den: i64) -> Prob {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Player {
    P1,
    P2,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::P1 => Player::P2,
            Player::P2 => Player::P1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Owner {
    P1,
    P2,
    Random,
}

impl Owner {
    pub fn is_player(self, p: Player) -> bool {
        matches!((self, p), (Owner::P1, Player::P1) | (Owner::P2, Player::P2))
    }
}

impl From<Player> for Owner {
    fn from(p: Player) -> Owner {
        match p {
            Player::P1 => Owner::P1,
            Player::P2 => Owner::P2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VertexRecord {
    pub id: VertexId,
    pub owner: Owner,
    pub label: Option<String>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("vertex {0} has no successor")]
    NoSuccessor(VertexId),
    #[error("dangling successor {succ} at vertex {vertex}")]
    DanglingSuccessor { vertex: VertexId, succ: VertexId },
    #[error("duplicate successor {succ} at vertex {vertex}")]
    DuplicateSuccessor { vertex: VertexId, succ: VertexId },
    #[error("probabilities at probabilistic vertex {vertex} sum to {sum}, expected 1")]
    BadProbabilitySum { vertex: VertexId, sum: String },
    #[error("probability on edge {vertex} -> {succ} is not positive")]
    NonPositiveProbability { vertex: VertexId, succ: VertexId },
    #[error("player-owned vertex {0} carries probability annotations")]
    UnexpectedProbabilities(VertexId),
    #[error("probabilistic vertex {0} lacks probability annotations")]
    MissingProbabilities(VertexId),
    #[error("set does not induce a subgame: probabilistic vertex {vertex} has successor {succ} outside the set")]
    LeakingRandomVertex { vertex: VertexId, succ: VertexId },
    #[error("player-owned vertex {vertex} has no successor inside the set")]
    NoSuccessorInside { vertex: VertexId },
    #[error("vertex {0} outside the game")]
    UnknownVertex(VertexId),
}

/// A turn-based stochastic game with two priority functions.
///
/// Vertices are dense `0..n`. Immutable after construction; all derivation
/// operations return fresh games together with an id remapping.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StochasticGame {
    records: Vec<VertexRecord>,
    succ: Vec<Vec<VertexId>>,
    pred: Vec<Vec<VertexId>>,
    /// Parallel to `succ` on probabilistic vertices, empty otherwise.
    delta: Vec<Vec<Prob>>,
    omega1: Vec<u32>,
    omega2: Vec<u32>,
    /// Marks absorbing sink vertices introduced by [`StochasticGame::subgame_closure`].
    sink: Vec<bool>,
}

/// A subgame restriction together with the map from new ids to parent ids.
#[derive(Debug, Clone)]
pub struct Restriction {
    pub game: StochasticGame,
    pub to_parent: Vec<VertexId>,
}

/// A subgame closure; the fresh sink has no parent id.
#[derive(Debug, Clone)]
pub struct ClosedSubgame {
    pub game: StochasticGame,
    pub to_parent: Vec<Option<VertexId>>,
    pub sink: VertexId,
}

impl StochasticGame {
    pub fn n(&self) -> usize {
        self.records.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        0..self.n()
    }

    pub fn owner(&self, v: VertexId) -> Owner {
        self.records[v].owner
    }

    pub fn record(&self, v: VertexId) -> &VertexRecord {
        &self.records[v]
    }

    pub fn label(&self, v: VertexId) -> Option<&str> {
        self.records[v].label.as_deref()
    }

    pub fn succ(&self, v: VertexId) -> &[VertexId] {
        &self.succ[v]
    }

    pub fn pred(&self, v: VertexId) -> &[VertexId] {
        &self.pred[v]
    }

    /// Probability row of a probabilistic vertex, parallel to `succ(v)`.
    pub fn delta(&self, v: VertexId) -> &[Prob] {
        &self.delta[v]
    }

    pub fn prio1(&self, v: VertexId) -> u32 {
        self.omega1[v]
    }

    pub fn prio2(&self, v: VertexId) -> u32 {
        self.omega2[v]
    }

    pub fn omega1(&self) -> &[u32] {
        &self.omega1
    }

    pub fn omega2(&self) -> &[u32] {
        &self.omega2
    }

    pub fn is_sink(&self, v: VertexId) -> bool {
        self.sink[v]
    }

    /// All non-sink vertices.
    pub fn real_vertices(&self) -> VertexSet {
        VertexSet::from_iter(self.n(), self.vertices().filter(|&v| !self.sink[v]))
    }

    pub fn all_vertices(&self) -> VertexSet {
        VertexSet::full(self.n())
    }

    pub fn vertices_with(&self, omega: &[u32], p: u32) -> VertexSet {
        VertexSet::from_iter(self.n(), self.vertices().filter(|&v| omega[v] == p))
    }

    pub fn max_priority(&self, omega: &[u32]) -> Option<u32> {
        omega.iter().copied().max()
    }

    fn check_invariants(&self) -> Result<(), GameError> {
        let n = self.n();
        for v in 0..n {
            if self.succ[v].is_empty() {
                return Err(GameError::NoSuccessor(v));
            }
            let mut seen = VertexSet::empty(n);
            for &s in &self.succ[v] {
                if s >= n {
                    return Err(GameError::DanglingSuccessor { vertex: v, succ: s });
                }
                if seen.contains(s) {
                    return Err(GameError::DuplicateSuccessor { vertex: v, succ: s });
                }
                seen.insert(s);
            }
            match self.owner(v) {
                Owner::Random => {
                    if self.delta[v].len() != self.succ[v].len() {
                        return Err(GameError::MissingProbabilities(v));
                    }
                    let mut sum = Prob::zero();
                    for (i, p) in self.delta[v].iter().enumerate() {
                        if *p <= Prob::zero() {
                            return Err(GameError::NonPositiveProbability {
                                vertex: v,
                                succ: self.succ[v][i],
                            });
                        }
                        sum += p;
                    }
                    if !sum.is_one() {
                        return Err(GameError::BadProbabilitySum { vertex: v, sum: sum.to_string() });
                    }
                }
                _ => {
                    if !self.delta[v].is_empty() {
                        return Err(GameError::UnexpectedProbabilities(v));
                    }
                }
            }
        }
        Ok(())
    }

    /// Re-checks all structural invariants; builders run this on `build`.
    pub fn validate(&self) -> Result<(), GameError> {
        self.check_invariants()
    }

    /// Checks that `u` induces a subgame: players keep a successor, random
    /// vertices keep all of them.
    pub fn induces_subgame(&self, u: &VertexSet) -> Result<(), GameError> {
        for v in u.iter() {
            if v >= self.n() {
                return Err(GameError::UnknownVertex(v));
            }
            match self.owner(v) {
                Owner::Random => {
                    for &s in self.succ(v) {
                        if !u.contains(s) {
                            return Err(GameError::LeakingRandomVertex { vertex: v, succ: s });
                        }
                    }
                }
                _ => {
                    if !self.succ(v).iter().any(|&s| u.contains(s)) {
                        return Err(GameError::NoSuccessorInside { vertex: v });
                    }
                }
            }
        }
        Ok(())
    }

    /// The induced subgame on `u`, with priorities and distributions
    /// inherited and ids compacted in increasing order.
    pub fn restrict(&self, u: &VertexSet) -> Result<Restriction, GameError> {
        self.induces_subgame(u)?;
        let to_parent: Vec<VertexId> = u.iter().collect();
        let mut new_id = vec![usize::MAX; self.n()];
        for (i, &old) in to_parent.iter().enumerate() {
            new_id[old] = i;
        }
        let mut builder = GameBuilder::new();
        for &old in &to_parent {
            let rec = &self.records[old];
            let id = builder.add_vertex(rec.owner, self.omega1[old], self.omega2[old]);
            builder.set_label(id, rec.label.clone());
            builder.set_sink(id, self.sink[old]);
        }
        for (i, &old) in to_parent.iter().enumerate() {
            for (k, &s) in self.succ[old].iter().enumerate() {
                if u.contains(s) {
                    match self.owner(old) {
                        Owner::Random => builder.add_prob_edge(i, new_id[s], self.delta[old][k].clone()),
                        _ => builder.add_edge(i, new_id[s]),
                    }
                }
            }
        }
        let game = builder.build()?;
        Ok(Restriction { game, to_parent })
    }

    /// The subgame closure over `u`: a fresh absorbing sink of priority
    /// `(0,0)` receives the probability mass that leaves `u` from boundary
    /// probabilistic vertices. Player-owned vertices must keep a successor
    /// inside `u`.
    pub fn subgame_closure(&self, u: &VertexSet) -> Result<ClosedSubgame, GameError> {
        for v in u.iter() {
            if v >= self.n() {
                return Err(GameError::UnknownVertex(v));
            }
            if self.owner(v) != Owner::Random && !self.succ(v).iter().any(|&s| u.contains(s)) {
                return Err(GameError::NoSuccessorInside { vertex: v });
            }
        }
        let kept: Vec<VertexId> = u.iter().collect();
        let mut new_id = vec![usize::MAX; self.n()];
        for (i, &old) in kept.iter().enumerate() {
            new_id[old] = i;
        }
        let mut builder = GameBuilder::new();
        for &old in &kept {
            let rec = &self.records[old];
            let id = builder.add_vertex(rec.owner, self.omega1[old], self.omega2[old]);
            builder.set_label(id, rec.label.clone());
            builder.set_sink(id, self.sink[old]);
        }
        let sink = builder.add_vertex(Owner::Random, 0, 0);
        builder.set_sink(sink, true);
        builder.add_prob_edge(sink, sink, Prob::one());
        for (i, &old) in kept.iter().enumerate() {
            match self.owner(old) {
                Owner::Random => {
                    let mut leaked = Prob::zero();
                    for (k, &s) in self.succ[old].iter().enumerate() {
                        if u.contains(s) {
                            builder.add_prob_edge(i, new_id[s], self.delta[old][k].clone());
                        } else {
                            leaked += &self.delta[old][k];
                        }
                    }
                    if !leaked.is_zero() {
                        builder.add_prob_edge(i, sink, leaked);
                    }
                }
                _ => {
                    for &s in &self.succ[old] {
                        if u.contains(s) {
                            builder.add_edge(i, new_id[s]);
                        }
                    }
                }
            }
        }
        let game = builder.build()?;
        let mut to_parent: Vec<Option<VertexId>> = kept.into_iter().map(Some).collect();
        to_parent.push(None);
        Ok(ClosedSubgame { game, to_parent, sink })
    }

    /// Turns every probabilistic vertex into a Player-2 vertex, dropping the
    /// distributions. Sure winning in the original game equals winning in the
    /// derandomized one.
    pub fn derandomize(&self) -> StochasticGame {
        let mut g = self.clone();
        for v in 0..g.n() {
            if g.records[v].owner == Owner::Random {
                g.records[v].owner = Owner::P2;
                g.delta[v].clear();
            }
        }
        g
    }
}

/// Single-owner construction of a [`StochasticGame`]; `build` validates.
#[derive(Debug, Default, Clone)]
pub struct GameBuilder {
    owners: Vec<Owner>,
    labels: Vec<Option<String>>,
    succ: Vec<Vec<VertexId>>,
    delta: Vec<Vec<Prob>>,
    omega1: Vec<u32>,
    omega2: Vec<u32>,
    sink: Vec<bool>,
}

impl GameBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, owner: Owner, prio1: u32, prio2: u32) -> VertexId {
        self.owners.push(owner);
        self.labels.push(None);
        self.succ.push(Vec::new());
        self.delta.push(Vec::new());
        self.omega1.push(prio1);
        self.omega2.push(prio2);
        self.sink.push(false);
        self.owners.len() - 1
    }

    pub fn set_label(&mut self, v: VertexId, label: Option<String>) {
        self.labels[v] = label;
    }

    pub fn set_sink(&mut self, v: VertexId, sink: bool) {
        self.sink[v] = sink;
    }

    pub fn add_edge(&mut self, from: VertexId, to: VertexId) {
        self.succ[from].push(to);
    }

    pub fn add_prob_edge(&mut self, from: VertexId, to: VertexId, p: Prob) {
        self.succ[from].push(to);
        self.delta[from].push(p);
    }

    pub fn build(self) -> Result<StochasticGame, GameError> {
        let n = self.owners.len();
        let mut pred = vec![Vec::new(); n];
        for (v, ss) in self.succ.iter().enumerate() {
            for &s in ss {
                if s < n {
                    pred[s].push(v);
                }
            }
        }
        let records = self
            .owners
            .into_iter()
            .zip(self.labels)
            .enumerate()
            .map(|(id, (owner, label))| VertexRecord { id, owner, label })
            .collect();
        let game = StochasticGame {
            records,
            succ: self.succ,
            pred,
            delta: self.delta,
            omega1: self.omega1,
            omega2: self.omega2,
            sink: self.sink,
        };
        game.check_invariants()?;
        Ok(game)
    }
}

/// Compact constructor used throughout the test suites.
///
/// `probs` lists `(vertex, successor, num, den)` rows for probabilistic
/// vertices; edge order follows the `edges` slice.
pub fn game_from_parts(
    owners: &[Owner],
    prio1: &[u32],
    prio2: &[u32],
    edges: &[(VertexId, VertexId)],
    probs: &[(VertexId, VertexId, i64, i64)],
) -> Result<StochasticGame, GameError> {
    let mut b = GameBuilder::new();
    for i in 0..owners.len() {
        b.add_vertex(owners[i], prio1[i], prio2[i]);
    }
    for &(u, v) in edges {
        match owners.get(u) {
            Some(Owner::Random) => {
                let p = probs
                    .iter()
                    .find(|&&(pu, pv, _, _)| pu == u && pv == v)
                    .map(|&(_, _, num, den)| prob(num, den))
                    .unwrap_or_else(Prob::zero);
                b.add_prob_edge(u, v, p);
            }
            _ => b.add_edge(u, v),
        }
    }
    b.build()
}

/// The four-vertex MDP where combined sure Büchi and almost-sure coBüchi
/// winning needs unbounded memory: `a -> {b, d}`, `b` probabilistic to
/// `{a, c}` with probability 1/2 each, `c -> a`, `d -> a`.
///
/// Vertices are `a=0, b=1, c=2, d=3` with priorities
/// `(1,0), (1,0), (2,0), (2,1)`.
pub fn infinite_memory_mdp() -> StochasticGame {
    let mut b = GameBuilder::new();
    let va = b.add_vertex(Owner::P1, 1, 0);
    let vb = b.add_vertex(Owner::Random, 1, 0);
    let vc = b.add_vertex(Owner::P1, 2, 0);
    let vd = b.add_vertex(Owner::P1, 2, 1);
    b.set_label(va, Some("v_a".into()));
    b.set_label(vb, Some("v_b".into()));
    b.set_label(vc, Some("v_c".into()));
    b.set_label(vd, Some("v_d".into()));
    b.add_edge(va, vb);
    b.add_edge(va, vd);
    b.add_prob_edge(vb, va, prob(1, 2));
    b.add_prob_edge(vb, vc, prob(1, 2));
    b.add_edge(vc, va);
    b.add_edge(vd, va);
    b.build().expect("valid game")
}
