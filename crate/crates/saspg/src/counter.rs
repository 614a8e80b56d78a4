//! The counter-switching strategy machine: plays an almost-sure strategy for
//! the conjunction, watches for streaks of odd first-condition priorities
//! (the unlucky events), and on an unlucky event switches to the sure
//! attractor toward the top even class (or to the nested machine of the
//! closed remainder) until the top class is seen again. Phase horizons grow
//! between events, making switching almost-surely finite.

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use crate::attractor::{pos_attractor, sure_attractor};
use crate::conjunction::LiftedProduct;
use crate::game::{Owner, Player, StochasticGame, VertexId};
use crate::set::VertexSet;
use crate::solver::{conjunction_analysis, solve_sas, DerivationTrace};
use crate::strategy::{MealyStrategy, StrategyMachine};

/// Horizon schedule `i -> N_i`. Sure winning for the first condition holds
/// for every schedule; the almost-sure guarantee for the second needs the
/// horizons to grow fast enough (the default doubles them).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Schedule {
    Geometric { n0: u64, base: u64 },
    /// Explicit table; the last entry repeats beyond the end.
    Table(Vec<u64>),
}

impl Schedule {
    pub fn default_for(n_vertices: usize) -> Schedule {
        Schedule::Geometric { n0: 4 * n_vertices.max(1) as u64, base: 2 }
    }

    /// `N_i`; `None` means the horizon exceeds `u128` and is unreachable by
    /// any simulation (counters simply never saturate).
    pub fn value(&self, phase: &BigUint) -> Option<u128> {
        match self {
            Schedule::Geometric { n0, base } => {
                let exp = u32::try_from(phase.clone()).ok()?;
                (*base as u128).checked_pow(exp)?.checked_mul(*n0 as u128)
            }
            Schedule::Table(entries) => {
                let idx = usize::try_from(phase.clone()).unwrap_or(entries.len());
                Some(entries.get(idx).or(entries.last()).copied().unwrap_or(1).max(1) as u128)
            }
        }
    }
}

/// Streaming replacement for the history pointer of one odd priority: the
/// count of priorities `>= p` seen in the current window (saturating at the
/// horizon) and whether the first `N_i` of them were all exactly `p`.
#[derive(Debug, Clone, Serialize)]
pub struct OddCounter {
    pub priority: u32,
    #[serde(skip)]
    pub phase: BigUint,
    #[serde(skip)]
    pub count: u128,
    #[serde(skip)]
    pub pure: bool,
    #[serde(skip)]
    pub horizon: Option<u128>,
}

impl OddCounter {
    fn new(priority: u32, schedule: &Schedule) -> Self {
        OddCounter {
            priority,
            phase: BigUint::default(),
            count: 0,
            pure: true,
            horizon: schedule.value(&BigUint::default()),
        }
    }

    fn saturated(&self) -> bool {
        self.horizon.is_some_and(|h| self.count >= h)
    }

    fn consume(&mut self, prio: u32) {
        if prio >= self.priority && !self.saturated() {
            self.count += 1;
            self.pure &= prio == self.priority;
        }
    }

    fn advance(&mut self, schedule: &Schedule) {
        self.phase += BigUint::one();
        self.count = 0;
        self.pure = true;
        self.horizon = schedule.value(&self.phase);
    }
}

#[derive(Debug, Clone, Serialize)]
pub enum MachineNode {
    /// Empty or sink-only component: no moves ever required.
    Leaf,
    Even(Box<EvenMachine>),
    Odd(Box<OddMachine>),
}

/// Machine for an all-winning game whose largest first priority `d` is even:
/// follows the almost-sure conjunction strategy, switches to the sure
/// attractor (or the nested machine) while unlucky.
#[derive(Debug, Clone, Serialize)]
pub struct EvenMachine {
    pub d: u32,
    omega1: Vec<u32>,
    owner_p1: Vec<bool>,
    /// Sure attractor (for Player 1) to the `d`-class.
    pub a: VertexSet,
    pub z: VertexSet,
    attr_moves: Vec<Option<VertexId>>,
    attr_ranks: Vec<Option<u32>>,
    /// Almost-sure conjunction strategy as a Mealy machine over register
    /// vectors.
    sigma_as: MealyStrategy,
    /// Machine for the subgame closure of the complement of the attractor.
    sub: MachineNode,
    sub_map: Vec<Option<VertexId>>,
    schedule: Schedule,
    pub counters: Vec<OddCounter>,
    // Runtime state.
    #[serde(skip)]
    mealy_state: usize,
    #[serde(skip)]
    pub unlucky: bool,
    #[serde(skip)]
    in_b: bool,
    #[serde(skip)]
    pub switches: u64,
}

/// Three-region composition for an all-winning game whose largest first
/// priority is odd: the winning subgame region, the sure attractor toward it
/// (absorption included), and the closed remainder.
#[derive(Debug, Clone, Serialize)]
pub struct OddMachine {
    owner_p1: Vec<bool>,
    /// Winning region of the subgame below the adversary's positive
    /// attractor to the top class.
    pub w1p: VertexSet,
    /// Sure attractor for Player 1 to `w1p` plus the winning sinks.
    pub b: VertexSet,
    attr_moves: Vec<Option<VertexId>>,
    sub_w1p: MachineNode,
    w1p_map: Vec<Option<VertexId>>,
    tail: MachineNode,
    tail_map: Vec<Option<VertexId>>,
    #[serde(skip)]
    region: u8,
}

/// The executable counter-switching strategy for Player 1 on an all-winning
/// game. Feed the play vertex by vertex through [`StrategyMachine::step`].
#[derive(Debug, Clone, Serialize)]
pub struct CounterStrategy {
    pub schedule: Schedule,
    pub root: MachineNode,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum SynthError {
    #[error("game is not everywhere winning (vertex {0} loses); restrict to the winning region first")]
    NotAllWinning(VertexId),
    #[error("trace does not match the game")]
    TraceMismatch,
}

/// Builds the counter-switching machine for a game certified all-winning by
/// `trace`; substructures are re-derived with fresh solver calls mirroring
/// the derivation.
pub fn synth_counter_strategy(
    g: &StochasticGame,
    trace: &DerivationTrace,
    schedule: Schedule,
) -> Result<CounterStrategy, SynthError> {
    if trace.root.game != *g {
        return Err(SynthError::TraceMismatch);
    }
    if let Some(v) = trace.root.w2.iter().next() {
        return Err(SynthError::NotAllWinning(v));
    }
    let root = build_node(g, &schedule);
    Ok(CounterStrategy { schedule, root })
}

/// Turns a memoryless product strategy into a Mealy machine on the base
/// game: memory states are the reachable register vectors, updates follow
/// the register rule on the source vertex's priorities.
pub fn mealy_from_product(
    g: &StochasticGame,
    product: &LiftedProduct,
    strategy: &[Option<VertexId>],
) -> MealyStrategy {
    let n = g.n();
    let mut memories: Vec<Vec<u32>> = vec![product.layout.initial()];
    let mut index = std::collections::HashMap::new();
    index.insert(memories[0].clone(), 0usize);
    for regs in &product.registers {
        if !index.contains_key(regs) {
            index.insert(regs.clone(), memories.len());
            memories.push(regs.clone());
        }
    }
    let mut state_of = std::collections::HashMap::new();
    for (pid, (&base, regs)) in product.to_base.iter().zip(&product.registers).enumerate() {
        state_of.insert((base, index[regs]), pid);
    }
    let mut update = vec![vec![0usize; n]; memories.len()];
    let mut moves = vec![vec![None; n]; memories.len()];
    for (m, regs) in memories.iter().enumerate() {
        for v in 0..n {
            let (ip, rp) = product.layout.oriented(g.prio1(v), g.prio2(v));
            let next = product.layout.update(regs, ip, rp);
            update[m][v] = *index.get(&next).unwrap_or(&m);
            if let Some(&pid) = state_of.get(&(v, m)) {
                if let Some(succ_pid) = strategy[pid] {
                    moves[m][v] = Some(product.to_base[succ_pid]);
                }
            }
        }
    }
    MealyStrategy { memory: memories.len(), initial: 0, update, moves }
}

fn build_node(g: &StochasticGame, schedule: &Schedule) -> MachineNode {
    let n = g.n();
    let real = g.real_vertices();
    if real.is_empty() {
        return MachineNode::Leaf;
    }
    let d = g.vertices().map(|v| g.prio1(v)).max().expect("nonempty");
    let owner_p1: Vec<bool> = g.vertices().map(|v| g.owner(v) == Owner::P1).collect();
    if d % 2 == 0 {
        let analysis = conjunction_analysis(g);
        debug_assert_eq!(analysis.w_as, g.all_vertices(), "all-winning games are AS-winning");
        let sigma_as = mealy_from_product(g, &analysis.product, &analysis.product_strategy());
        let z = g.vertices_with(g.omega1(), d);
        let a = sure_attractor(g, Player::P1, &z);
        let rest = a.region.complement();
        let (sub, sub_map) = if rest.is_empty() {
            (MachineNode::Leaf, vec![None; n])
        } else {
            let closure = g.subgame_closure(&rest).expect("closure precondition");
            let mut map = vec![None; n];
            for (i, p) in closure.to_parent.iter().enumerate() {
                if let Some(v) = p {
                    map[*v] = Some(i);
                }
            }
            (build_node(&closure.game, schedule), map)
        };
        let mut odd_priorities: Vec<u32> =
            g.vertices().map(|v| g.prio1(v)).filter(|p| p % 2 == 1).collect();
        odd_priorities.sort_unstable();
        odd_priorities.dedup();
        MachineNode::Even(Box::new(EvenMachine {
            d,
            omega1: g.omega1().to_vec(),
            owner_p1,
            attr_moves: a.strategy.clone(),
            attr_ranks: a.ranks.clone(),
            a: a.region,
            z,
            sigma_as,
            sub,
            sub_map,
            schedule: schedule.clone(),
            counters: odd_priorities.iter().map(|&p| OddCounter::new(p, schedule)).collect(),
            mealy_state: 0,
            unlucky: false,
            in_b: false,
            switches: 0,
        }))
    } else {
        let z = g.vertices_with(g.omega1(), d);
        let a = pos_attractor(g, Player::P2, &z);
        let rest = a.region.complement();
        let sub = g.restrict(&rest).expect("complement of a positive attractor is a trap");
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
        let w1p = VertexSet::from_iter(n, sub_res.w1.iter().map(|v| sub.to_parent[v]));
        let b = sure_attractor(g, Player::P1, &target);
        let (sub_w1p, w1p_map) = if w1p.is_empty() {
            (MachineNode::Leaf, vec![None; n])
        } else {
            let r = g.restrict(&w1p).expect("subgame winners form a trap for Player 2");
            let mut map = vec![None; n];
            for (i, &p) in r.to_parent.iter().enumerate() {
                map[p] = Some(i);
            }
            (build_node(&r.game, schedule), map)
        };
        let rest2 = b.region.complement();
        let (tail, tail_map) = if rest2.is_empty() {
            (MachineNode::Leaf, vec![None; n])
        } else {
            let closure = g.subgame_closure(&rest2).expect("closure precondition");
            let mut map = vec![None; n];
            for (i, p) in closure.to_parent.iter().enumerate() {
                if let Some(v) = p {
                    map[*v] = Some(i);
                }
            }
            (build_node(&closure.game, schedule), map)
        };
        MachineNode::Odd(Box::new(OddMachine {
            owner_p1,
            w1p,
            b: b.region,
            attr_moves: b.strategy,
            sub_w1p,
            w1p_map,
            tail,
            tail_map,
            region: 0,
        }))
    }
}

impl MachineNode {
    fn reset(&mut self) {
        match self {
            MachineNode::Leaf => {}
            MachineNode::Even(m) => {
                m.mealy_state = m.sigma_as.initial;
                m.unlucky = false;
                m.in_b = false;
                let schedule = m.schedule.clone();
                for c in &mut m.counters {
                    *c = OddCounter::new(c.priority, &schedule);
                }
                m.sub.reset();
            }
            MachineNode::Odd(m) => {
                m.region = 0;
                m.sub_w1p.reset();
                m.tail.reset();
            }
        }
    }

    fn step(&mut self, v: VertexId) -> Option<VertexId> {
        match self {
            MachineNode::Leaf => None,
            MachineNode::Even(m) => m.step(v),
            MachineNode::Odd(m) => m.step(v),
        }
    }
}

impl EvenMachine {
    fn step(&mut self, v: VertexId) -> Option<VertexId> {
        let prio = self.omega1[v];
        for c in &mut self.counters {
            c.consume(prio);
        }
        let as_move = self.sigma_as.mv(self.mealy_state, v);
        self.mealy_state = self.sigma_as.next_memory(self.mealy_state, v);
        // The nested machine consumes the longest suffix inside B: fed while
        // the play stays outside the attractor, restarted on entry.
        let mut sub_move = None;
        if !self.a.contains(v) {
            if !self.in_b {
                self.sub.reset();
            }
            self.in_b = true;
            sub_move =
                self.sub.step(self.sub_map[v].expect("vertex outside the attractor maps into the closure"));
        } else {
            self.in_b = false;
        }

        let mv = if prio == self.d {
            self.unlucky = false;
            as_move
        } else {
            if !self.unlucky {
                let mut fired = false;
                for c in &mut self.counters {
                    if c.saturated() {
                        fired |= c.pure;
                        c.advance(&self.schedule);
                    }
                }
                if fired {
                    self.unlucky = true;
                    self.switches += 1;
                }
            }
            if !self.unlucky {
                as_move
            } else if self.a.contains(v) {
                self.attr_moves[v]
            } else {
                sub_move
            }
        };
        if self.owner_p1[v] {
            mv
        } else {
            None
        }
    }

    pub fn attractor_rank(&self, v: VertexId) -> Option<u32> {
        self.attr_ranks.get(v).copied().flatten()
    }
}

impl OddMachine {
    fn step(&mut self, v: VertexId) -> Option<VertexId> {
        let mv = if self.w1p.contains(v) {
            if self.region != 1 {
                self.sub_w1p.reset();
            }
            self.region = 1;
            self.sub_w1p.step(self.w1p_map[v].expect("winning-region vertex maps into its subgame"))
        } else if self.b.contains(v) {
            self.region = 2;
            self.attr_moves[v]
        } else {
            if self.region != 3 {
                self.tail.reset();
            }
            self.region = 3;
            self.tail.step(self.tail_map[v].expect("remainder vertex maps into the closure"))
        };
        if self.owner_p1[v] {
            mv
        } else {
            None
        }
    }
}

impl StrategyMachine for CounterStrategy {
    fn reset(&mut self) {
        self.root.reset();
    }

    fn step(&mut self, v: VertexId) -> Option<VertexId> {
        self.root.step(v)
    }
}

impl CounterStrategy {
    /// Root-level unlucky flag, when the top layer is even.
    pub fn root_unlucky(&self) -> Option<bool> {
        match &self.root {
            MachineNode::Even(m) => Some(m.unlucky),
            _ => None,
        }
    }

    /// Total unlucky events observed by the root machine.
    pub fn root_switches(&self) -> u64 {
        match &self.root {
            MachineNode::Even(m) => m.switches,
            _ => 0,
        }
    }

    pub fn root_even(&self) -> Option<&EvenMachine> {
        match &self.root {
            MachineNode::Even(m) => Some(m),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{game_from_parts, infinite_memory_mdp};

    fn fig1_machine(schedule: Schedule) -> CounterStrategy {
        let g = infinite_memory_mdp();
        let res = solve_sas(&g);
        assert!(res.w2.is_empty());
        synth_counter_strategy(&g, &res.trace, schedule).unwrap()
    }

    #[test]
    fn fig1_machine_shape() {
        let m = fig1_machine(Schedule::Geometric { n0: 4, base: 2 });
        let even = m.root_even().expect("top layer of Fig 1 is even");
        assert_eq!(even.d, 2);
        // The sure attractor to {v_c, v_d} covers the whole game.
        assert_eq!(even.a.count(), 4);
        assert_eq!(even.counters.len(), 1);
        assert_eq!(even.counters[0].priority, 1);
    }

    #[test]
    fn unlucky_fires_on_pure_streak() {
        // N_0 = 3: the third consecutive priority-1 vertex saturates the
        // window, the flag fires, and the machine plays the attractor move.
        let mut m = fig1_machine(Schedule::Table(vec![3, 100]));
        assert_eq!(m.step(0), Some(1)); // sigma_AS: a -> b
        assert_eq!(m.root_unlucky(), Some(false));
        let _ = m.step(1);
        assert_eq!(m.root_unlucky(), Some(false));
        let mv = m.step(0);
        assert_eq!(m.root_unlucky(), Some(true));
        assert_eq!(mv, Some(3), "attractor move after the unlucky event");
        // Visiting priority 2 clears the flag.
        let _ = m.step(3);
        assert_eq!(m.root_unlucky(), Some(false));
        assert_eq!(m.root_switches(), 1);
    }

    #[test]
    fn trivial_sure_objective_never_switches() {
        // Ω1 constant 0: no odd priorities, the machine degenerates to the
        // almost-sure strategy alone.
        let g = game_from_parts(
            &[Owner::P1, Owner::P1],
            &[0, 0],
            &[0, 2],
            &[(0, 1), (1, 0), (1, 1)],
            &[],
        )
        .unwrap();
        let res = solve_sas(&g);
        let mut m = synth_counter_strategy(&g, &res.trace, Schedule::default_for(2)).unwrap();
        assert!(m.root_even().unwrap().counters.is_empty());
        for v in [0, 1, 0, 1, 1, 1, 0] {
            assert!(m.step(v).is_some());
        }
        assert_eq!(m.root_switches(), 0);
    }

    #[test]
    fn rejects_losing_games() {
        let g = game_from_parts(&[Owner::P1], &[1], &[0], &[(0, 0)], &[]).unwrap();
        let res = solve_sas(&g);
        assert!(matches!(
            synth_counter_strategy(&g, &res.trace, Schedule::default_for(1)),
            Err(SynthError::NotAllWinning(0))
        ));
    }
}
