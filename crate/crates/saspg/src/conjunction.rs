//! Turning a conjunction of two parity conditions into a single one: the
//! register construction on automata (D2PW to DPW), its disjunction variant
//! via complements, and the lifting of a two-priority game to a
//! single-priority product game.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::automata::{D2pw, Dpw, StateId};
use crate::game::{GameBuilder, Owner, StochasticGame, VertexId};
use crate::registers::RegisterLayout;

/// Builds an equivalent DPW from a D2PW. Only register vectors reachable from
/// the all-zero initial vector are materialized; the orientation (which
/// condition indexes the registers) is chosen to minimize the state bound.
pub fn build_conjunction_dpw(a: &D2pw) -> Dpw {
    let layout = RegisterLayout::choose(&a.omega1, &a.omega2);
    build_conjunction_dpw_with(a, &layout)
}

pub fn build_conjunction_dpw_with(a: &D2pw, layout: &RegisterLayout) -> Dpw {
    let letters = a.alphabet.len();
    let mut index: HashMap<(StateId, Vec<u32>), StateId> = HashMap::new();
    let mut states: Vec<(StateId, Vec<u32>)> = Vec::new();
    let mut delta: Vec<Vec<StateId>> = Vec::new();
    let initial_key = (a.initial, layout.initial());
    index.insert(initial_key.clone(), 0);
    states.push(initial_key);
    let mut head = 0;
    while head < states.len() {
        let (q, regs) = states[head].clone();
        let (idx_prio, reg_prio) = layout.oriented(a.omega1[q], a.omega2[q]);
        let next_regs = layout.update(&regs, idx_prio, reg_prio);
        let mut row = Vec::with_capacity(letters);
        for l in 0..letters {
            let key = (a.delta[q][l], next_regs.clone());
            let id = *index.entry(key.clone()).or_insert_with(|| {
                states.push(key);
                states.len() - 1
            });
            row.push(id);
        }
        delta.push(row);
        head += 1;
    }
    let omega = states
        .iter()
        .map(|(q, regs)| {
            let (idx_prio, _) = layout.oriented(a.omega1[*q], a.omega2[*q]);
            layout.priority(regs, idx_prio)
        })
        .collect();
    Dpw { alphabet: a.alphabet.clone(), initial: 0, delta, omega }
}

/// DPW for the disjunction of the two conditions, as the complement of the
/// conjunction of the two complements.
pub fn build_disjunction_dpw(a: &D2pw) -> Dpw {
    build_conjunction_dpw(&a.complement_both()).complement()
}

/// Product of a game with the register automaton of its own two priority
/// functions: vertices are `(v, registers)` reachable from the zero vector,
/// owners and distributions inherited, and the single priority function
/// `omega12` follows the register priority map.
///
/// A vertex is almost-sure winning for the conjunction of the two parity
/// objectives exactly when its zero-register product vertex is almost-sure
/// winning for `Parity(omega12)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LiftedProduct {
    pub game: StochasticGame,
    pub omega12: Vec<u32>,
    /// Product vertex -> base vertex.
    pub to_base: Vec<VertexId>,
    /// Product vertex -> register vector.
    pub registers: Vec<Vec<u32>>,
    /// Base vertex -> its zero-register product vertex.
    pub zero_state: Vec<VertexId>,
    pub layout: RegisterLayout,
}

pub fn lift_conjunction_game(g: &StochasticGame) -> LiftedProduct {
    let layout = RegisterLayout::choose(g.omega1(), g.omega2());
    lift_conjunction_game_with(g, layout)
}

pub fn lift_conjunction_game_with(g: &StochasticGame, layout: RegisterLayout) -> LiftedProduct {
    let mut index: HashMap<(VertexId, Vec<u32>), VertexId> = HashMap::new();
    let mut states: Vec<(VertexId, Vec<u32>)> = Vec::new();
    // Roots: every base vertex paired with the zero vector.
    let mut zero_state = Vec::with_capacity(g.n());
    for v in g.vertices() {
        let key = (v, layout.initial());
        zero_state.push(states.len());
        index.insert(key.clone(), states.len());
        states.push(key);
    }
    let mut succ: Vec<Vec<VertexId>> = Vec::new();
    let mut head = 0;
    while head < states.len() {
        let (v, regs) = states[head].clone();
        let (idx_prio, reg_prio) = layout.oriented(g.prio1(v), g.prio2(v));
        let next_regs = layout.update(&regs, idx_prio, reg_prio);
        let mut row = Vec::with_capacity(g.succ(v).len());
        for &s in g.succ(v) {
            let key = (s, next_regs.clone());
            let id = *index.entry(key.clone()).or_insert_with(|| {
                states.push(key);
                states.len() - 1
            });
            row.push(id);
        }
        succ.push(row);
        head += 1;
    }
    let mut builder = GameBuilder::new();
    for (v, regs) in &states {
        let (idx_prio, _) = layout.oriented(g.prio1(*v), g.prio2(*v));
        let p12 = layout.priority(regs, idx_prio);
        let id = builder.add_vertex(g.owner(*v), p12, 0);
        builder.set_sink(id, g.is_sink(*v));
    }
    for (i, row) in succ.iter().enumerate() {
        let (v, _) = &states[i];
        match g.owner(*v) {
            Owner::Random => {
                for (k, &t) in row.iter().enumerate() {
                    builder.add_prob_edge(i, t, g.delta(*v)[k].clone());
                }
            }
            _ => {
                for &t in row {
                    builder.add_edge(i, t);
                }
            }
        }
    }
    let game = builder.build().expect("product of a valid game is valid");
    let omega12 = (0..game.n()).map(|i| game.prio1(i)).collect();
    let (to_base, registers) = states.into_iter().unzip();
    LiftedProduct { game, omega12, to_base, registers, zero_state, layout }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::worked_example_d2pw;
    use crate::game::infinite_memory_mdp;

    /// The eight reachable states of the worked example and their priorities.
    #[test]
    fn worked_example_exact_values() {
        let a = worked_example_d2pw();
        let dpw = build_conjunction_dpw(&a);
        assert_eq!(dpw.n(), 8);
        // (base state, registers) -> expected priority.
        let layout = RegisterLayout::choose(&a.omega1, &a.omega2);
        assert!(!layout.swapped);
        let expected: Vec<((StateId, Vec<u32>), u32)> = vec![
            ((0, vec![0, 0]), 0),
            ((1, vec![5, 5]), 5),
            ((2, vec![3, 5]), 13),
            ((0, vec![3, 1]), 3),
            ((3, vec![3, 1]), 7),
            ((2, vec![6, 6]), 14),
            ((3, vec![6, 1]), 7),
            ((0, vec![6, 1]), 6),
        ];
        // Re-run the reachable construction to locate each state id.
        let mut found = 0;
        let rebuilt = build_conjunction_dpw_with(&a, &layout);
        assert_eq!(rebuilt, dpw);
        let mut states: HashMap<(StateId, Vec<u32>), StateId> = HashMap::new();
        // Reconstruct the state table exactly as the builder enumerates it.
        let mut list = vec![(a.initial, layout.initial())];
        states.insert(list[0].clone(), 0);
        let mut head = 0;
        while head < list.len() {
            let (q, regs) = list[head].clone();
            let next = layout.update(&regs, a.omega1[q], a.omega2[q]);
            for l in 0..a.alphabet.len() {
                let key = (a.delta[q][l], next.clone());
                if !states.contains_key(&key) {
                    states.insert(key.clone(), list.len());
                    list.push(key);
                }
            }
            head += 1;
        }
        for (key, prio) in &expected {
            let id = states[key];
            assert_eq!(dpw.omega[id], *prio, "state {key:?}");
            found += 1;
        }
        assert_eq!(found, 8);
    }

    #[test]
    fn degenerate_second_condition_reproduces_first() {
        // Ω2 constant 0: the single register stays 0 and priorities reproduce
        // Ω1 through the offset map: even d -> d, odd d -> d.
        let a = D2pw {
            alphabet: vec!["a".into()],
            initial: 0,
            delta: vec![vec![1], vec![2], vec![0]],
            omega1: vec![0, 1, 2],
            omega2: vec![0, 0, 0],
        };
        let dpw = build_conjunction_dpw(&a);
        assert_eq!(dpw.n(), 3);
        // d_reg = 0: offset(d) = d and odd values (d*2+0)/2 = d, so the
        // output priorities equal Ω1 state for state.
        for (i, &p) in dpw.omega.iter().enumerate() {
            assert_eq!(p, a.omega1[i], "state {i}");
        }
    }

    #[test]
    fn disjunction_universal_and_empty() {
        // Condition 1 accepts everything (all priorities 0): the disjunction
        // is universal no matter the second condition.
        let a = D2pw {
            alphabet: vec!["a".into(), "b".into()],
            initial: 0,
            delta: vec![vec![0, 1], vec![1, 0]],
            omega1: vec![0, 0],
            omega2: vec![1, 1],
        };
        let d = build_disjunction_dpw(&a);
        let words: &[(&[usize], &[usize])] =
            &[(&[], &[0]), (&[], &[1]), (&[0], &[1, 0]), (&[1, 1], &[0, 0, 1])];
        for (stem, cycle) in words {
            assert!(crate::automata::word_accepted_dpw(&d, stem, cycle));
        }
        // Both conditions reject everything: empty language.
        let b = D2pw { omega1: vec![1, 1], omega2: vec![1, 1], ..a };
        let d = build_disjunction_dpw(&b);
        for (stem, cycle) in words {
            assert!(!crate::automata::word_accepted_dpw(&d, stem, cycle));
        }
    }

    #[test]
    fn fig1_lift_is_small() {
        // d1 = 2, d2 = 1: a single register over Ω1-priority 2 with two
        // reachable values, so at most 8 product vertices.
        let g = infinite_memory_mdp();
        let lifted = lift_conjunction_game(&g);
        assert!(lifted.game.n() <= 8, "product has {} vertices", lifted.game.n());
        assert_eq!(lifted.layout.indexed, vec![2]);
        for v in g.vertices() {
            assert_eq!(lifted.to_base[lifted.zero_state[v]], v);
            assert_eq!(lifted.registers[lifted.zero_state[v]], vec![0]);
        }
        assert!(lifted.game.validate().is_ok());
    }
}
