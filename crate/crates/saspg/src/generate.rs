//! Seeded random instance generation and exhaustive enumeration of small
//! games up to structural equivalence.
//!
//! Structural equivalence combines vertex permutation with monotone,
//! parity-preserving compression of each priority function; both leave
//! winning regions unchanged, so enumerating canonical representatives is
//! exhaustive for region-level properties.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::automata::D2pw;
use crate::game::{GameBuilder, Owner, StochasticGame, VertexId};

#[derive(Debug, Clone)]
pub struct GameGenConfig {
    pub n: usize,
    /// Maximum out-degree (at least 1).
    pub branching: usize,
    /// Probability that a vertex is probabilistic.
    pub random_fraction: f64,
    pub d1: u32,
    pub d2: u32,
}

impl Default for GameGenConfig {
    fn default() -> Self {
        GameGenConfig { n: 6, branching: 2, random_fraction: 0.3, d1: 3, d2: 3 }
    }
}

/// Reproducible random game: distinct successors, exact small-denominator
/// distributions on probabilistic vertices, uniform priorities.
pub fn random_game(cfg: &GameGenConfig, rng: &mut ChaCha8Rng) -> StochasticGame {
    assert!(cfg.n > 0 && cfg.branching > 0);
    let mut b = GameBuilder::new();
    let owners: Vec<Owner> = (0..cfg.n)
        .map(|_| {
            if rng.gen_bool(cfg.random_fraction) {
                Owner::Random
            } else if rng.gen_bool(0.5) {
                Owner::P1
            } else {
                Owner::P2
            }
        })
        .collect();
    for &owner in &owners {
        b.add_vertex(owner, rng.gen_range(0..=cfg.d1), rng.gen_range(0..=cfg.d2));
    }
    for (v, &owner) in owners.iter().enumerate() {
        let degree = rng.gen_range(1..=cfg.branching.min(cfg.n));
        let mut targets: Vec<VertexId> = (0..cfg.n).collect();
        targets.shuffle(rng);
        targets.truncate(degree);
        targets.sort_unstable();
        if owner == Owner::Random {
            let weights: Vec<u32> = (0..degree).map(|_| rng.gen_range(1..=3)).collect();
            let total: u32 = weights.iter().sum();
            for (k, &t) in targets.iter().enumerate() {
                b.add_prob_edge(v, t, BigRational::new(BigInt::from(weights[k]), BigInt::from(total)));
            }
        } else {
            for &t in &targets {
                b.add_edge(v, t);
            }
        }
    }
    b.build().expect("generator emits valid games")
}

pub fn random_game_seeded(cfg: &GameGenConfig, seed: u64) -> StochasticGame {
    random_game(cfg, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[derive(Debug, Clone)]
pub struct D2pwGenConfig {
    pub n: usize,
    pub letters: usize,
    pub d1: u32,
    pub d2: u32,
}

impl Default for D2pwGenConfig {
    fn default() -> Self {
        D2pwGenConfig { n: 6, letters: 2, d1: 4, d2: 4 }
    }
}

/// Reproducible random complete deterministic automaton with two priority
/// functions; every state is reachable from 0 along a random spanning path.
pub fn random_d2pw(cfg: &D2pwGenConfig, rng: &mut ChaCha8Rng) -> D2pw {
    assert!(cfg.n > 0 && cfg.letters > 0);
    let alphabet: Vec<String> = (0..cfg.letters)
        .map(|i| char::from(b'a' + (i % 26) as u8).to_string())
        .collect();
    let mut delta = vec![vec![0; cfg.letters]; cfg.n];
    for row in delta.iter_mut() {
        for slot in row.iter_mut() {
            *slot = rng.gen_range(0..cfg.n);
        }
    }
    // Wire a reachability spine so the whole state space matters.
    for q in 1..cfg.n {
        let from = rng.gen_range(0..q);
        let letter = rng.gen_range(0..cfg.letters);
        delta[from][letter] = q;
    }
    D2pw {
        alphabet,
        initial: 0,
        delta,
        omega1: (0..cfg.n).map(|_| rng.gen_range(0..=cfg.d1)).collect(),
        omega2: (0..cfg.n).map(|_| rng.gen_range(0..=cfg.d2)).collect(),
    }
}

pub fn random_d2pw_seeded(cfg: &D2pwGenConfig, seed: u64) -> D2pw {
    random_d2pw(cfg, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Graph-plus-owner skeleton of a game; priority functions are attached
/// separately.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Structure {
    pub owners: Vec<Owner>,
    pub succ: Vec<Vec<VertexId>>,
}

impl Structure {
    fn permuted(&self, perm: &[usize]) -> Structure {
        let n = self.owners.len();
        let mut owners = vec![Owner::P1; n];
        let mut succ = vec![Vec::new(); n];
        for v in 0..n {
            owners[perm[v]] = self.owners[v];
            let mut row: Vec<VertexId> = self.succ[v].iter().map(|&s| perm[s]).collect();
            row.sort_unstable();
            succ[perm[v]] = row;
        }
        Structure { owners, succ }
    }

    fn is_canonical(&self) -> bool {
        let n = self.owners.len();
        let mut perm: Vec<usize> = (0..n).collect();
        loop {
            if self.permuted(&perm) < *self {
                return false;
            }
            if !next_permutation(&mut perm) {
                return true;
            }
        }
    }

    /// A game from the skeleton: probabilistic vertices get the uniform
    /// distribution over their successors.
    pub fn game(&self, omega1: &[u32], omega2: &[u32]) -> StochasticGame {
        let mut b = GameBuilder::new();
        for (v, &owner) in self.owners.iter().enumerate() {
            b.add_vertex(owner, omega1[v], omega2[v]);
        }
        for (v, row) in self.succ.iter().enumerate() {
            if self.owners[v] == Owner::Random {
                let deg = row.len() as i64;
                for &t in row {
                    b.add_prob_edge(v, t, BigRational::new(BigInt::from(1), BigInt::from(deg)));
                }
            } else {
                for &t in row {
                    b.add_edge(v, t);
                }
            }
        }
        b.build().expect("structures are valid by construction")
    }
}

fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

/// All nonempty successor sets over `n` vertices with at most `max_deg`
/// members, ascending.
pub fn successor_sets(n: usize, max_deg: usize) -> Vec<Vec<VertexId>> {
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) {
        if (mask.count_ones() as usize) <= max_deg {
            out.push((0..n).filter(|v| mask & (1 << v) != 0).collect());
        }
    }
    out
}

/// All structures over `n` vertices with out-degree at most `max_deg`, owner
/// patterns over P1/P2 plus (when `with_random`) every placement of exactly
/// one probabilistic vertex, reduced to canonical representatives under
/// vertex permutation.
pub fn canonical_structures(n: usize, max_deg: usize, with_random: bool) -> Vec<Structure> {
    let sets = successor_sets(n, max_deg);
    let mut owner_patterns: Vec<Vec<Owner>> = Vec::new();
    for mask in 0u32..(1 << n) {
        let base: Vec<Owner> =
            (0..n).map(|v| if mask & (1 << v) != 0 { Owner::P2 } else { Owner::P1 }).collect();
        owner_patterns.push(base);
    }
    if with_random {
        for mask in 0u32..(1 << (n - 1)) {
            for pos in 0..n {
                let mut owners = Vec::with_capacity(n);
                let mut bit = 0;
                for v in 0..n {
                    if v == pos {
                        owners.push(Owner::Random);
                    } else {
                        owners.push(if mask & (1 << bit) != 0 { Owner::P2 } else { Owner::P1 });
                        bit += 1;
                    }
                }
                owner_patterns.push(owners);
            }
        }
    }
    let mut out = Vec::new();
    let mut succ_choice = vec![0usize; n];
    loop {
        let succ: Vec<Vec<VertexId>> = succ_choice.iter().map(|&i| sets[i].clone()).collect();
        for owners in &owner_patterns {
            let s = Structure { owners: owners.clone(), succ: succ.clone() };
            if s.is_canonical() {
                out.push(s);
            }
        }
        // Advance the per-vertex successor-set odometer.
        let mut k = 0;
        loop {
            if k == n {
                return out;
            }
            succ_choice[k] += 1;
            if succ_choice[k] < sets.len() {
                break;
            }
            succ_choice[k] = 0;
            k += 1;
        }
    }
}

/// Monotone parity-preserving compression of a priority function; the
/// canonical form of the equivalence that leaves parity objectives unchanged.
pub fn compress_priorities(omega: &[u32]) -> Vec<u32> {
    let mut used: Vec<u32> = omega.to_vec();
    used.sort_unstable();
    used.dedup();
    let mut target: Vec<u32> = Vec::with_capacity(used.len());
    for (i, &u) in used.iter().enumerate() {
        let lo = if i == 0 { 0 } else { target[i - 1] + 1 };
        let c = if lo % 2 == u % 2 { lo } else { lo + 1 };
        target.push(c);
    }
    omega
        .iter()
        .map(|p| {
            let i = used.binary_search(p).expect("value present");
            target[i]
        })
        .collect()
}

/// All canonical (compressed) priority functions on `n` vertices with values
/// up to `max_prio`.
pub fn canonical_priority_maps(n: usize, max_prio: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut omega = vec![0u32; n];
    loop {
        if compress_priorities(&omega) == omega {
            out.push(omega.clone());
        }
        let mut k = 0;
        loop {
            if k == n {
                return out;
            }
            omega[k] += 1;
            if omega[k] <= max_prio {
                break;
            }
            omega[k] = 0;
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_games_validate_and_reproduce() {
        let cfg = GameGenConfig::default();
        for seed in 0..50 {
            let g = random_game_seeded(&cfg, seed);
            assert!(g.validate().is_ok());
            assert_eq!(g, random_game_seeded(&cfg, seed));
        }
    }

    #[test]
    fn derandomized_random_games_have_no_random_vertices() {
        let cfg = GameGenConfig { random_fraction: 1.0, ..Default::default() };
        let g = random_game_seeded(&cfg, 7);
        let d = g.derandomize();
        assert!(d.vertices().all(|v| d.owner(v) != Owner::Random));
        assert!(d.validate().is_ok());
    }

    #[test]
    fn compression_is_idempotent_and_parity_preserving() {
        assert_eq!(compress_priorities(&[3, 1, 3, 2]), vec![3, 1, 3, 2]);
        assert_eq!(compress_priorities(&[2, 2, 2]), vec![0, 0, 0]);
        assert_eq!(compress_priorities(&[3, 3, 0]), vec![1, 1, 0]);
        for raw in [vec![0, 3, 2], vec![1, 0, 2], vec![3, 2, 1]] {
            let c = compress_priorities(&raw);
            assert_eq!(compress_priorities(&c), c);
            for (a, b) in raw.iter().zip(&c) {
                assert_eq!(a % 2, b % 2);
            }
        }
    }

    #[test]
    fn structure_enumeration_counts() {
        // One vertex: the self-loop, with P1/P2/random ownership variants.
        assert_eq!(canonical_structures(1, 2, true).len(), 3);
        assert_eq!(canonical_structures(1, 2, false).len(), 2);
        let s3 = canonical_structures(3, 2, true);
        for s in &s3 {
            assert!(s.is_canonical());
            assert!(s.game(&[0; 3], &[0; 3]).validate().is_ok());
        }
    }

    #[test]
    fn random_d2pw_is_valid() {
        let cfg = D2pwGenConfig::default();
        for seed in 0..20 {
            let a = random_d2pw_seeded(&cfg, seed);
            assert!(a.validate().is_ok());
            assert_eq!(a, random_d2pw_seeded(&cfg, seed));
        }
    }
}
