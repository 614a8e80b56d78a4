//! Fast cross-checks of the solvers against the brute-force oracles on an
//! exhaustive two-vertex corpus, a slice of the three-vertex corpus, and a
//! batch of seeded random games. The full gates live in the acceptance suite.

use saspg::game::Player;
use saspg::generate::{
    canonical_priority_maps, canonical_structures, random_game_seeded, GameGenConfig,
};
use saspg::oracle::{
    oracle_as_parity_region, oracle_sas_region, oracle_sure_parity_region, OracleBounds,
};
use saspg::qualitative::solve_as_parity;
use saspg::solver::solve_sas;
use saspg::zielonka::solve_parity_zielonka;

#[test]
fn exhaustive_two_vertex_gate() {
    let bounds = OracleBounds::default();
    let structures = canonical_structures(2, 2, true);
    let omegas = canonical_priority_maps(2, 3);
    let mut checked = 0u64;
    for s in &structures {
        for o1 in &omegas {
            for o2 in &omegas {
                let g = s.game(o1, o2);
                let sas = solve_sas(&g);
                let oracle = oracle_sas_region(&g, &bounds).unwrap();
                assert_eq!(sas.w1, oracle, "sas mismatch on {g:?}");
                let asp = solve_as_parity(&g, Player::P1, o1);
                let oracle = oracle_as_parity_region(&g, o1, &bounds).unwrap();
                assert_eq!(asp.region, oracle, "as mismatch on {g:?} omega {o1:?}");
                checked += 1;
            }
        }
    }
    assert!(checked > 500, "corpus too small: {checked}");
}

#[test]
fn three_vertex_slice_gate() {
    let bounds = OracleBounds::default();
    let structures = canonical_structures(3, 2, true);
    let omegas = canonical_priority_maps(3, 3);
    let mut checked = 0u64;
    // Deterministic slice: stride through the priority grid.
    for (si, s) in structures.iter().enumerate() {
        for (i, o1) in omegas.iter().enumerate() {
            if (i + si) % 7 != 0 {
                continue;
            }
            for (j, o2) in omegas.iter().enumerate() {
                if (j + si) % 5 != 0 {
                    continue;
                }
                let g = s.game(o1, o2);
                let sas = solve_sas(&g);
                let oracle = oracle_sas_region(&g, &bounds).unwrap();
                assert_eq!(sas.w1, oracle, "sas mismatch on {g:?}");
                checked += 1;
            }
        }
    }
    assert!(checked > 1000, "corpus too small: {checked}");
}

#[test]
fn random_games_gate() {
    let bounds = OracleBounds::default();
    let cfg = GameGenConfig { n: 5, branching: 2, random_fraction: 0.3, d1: 3, d2: 3 };
    for seed in 0..300 {
        let g = random_game_seeded(&cfg, seed);
        let sas = solve_sas(&g);
        let oracle = oracle_sas_region(&g, &bounds).unwrap();
        assert_eq!(sas.w1, oracle, "sas mismatch seed {seed} on {g:?}");
        let asp = solve_as_parity(&g, Player::P1, g.omega1());
        let oracle = oracle_as_parity_region(&g, g.omega1(), &bounds).unwrap();
        assert_eq!(asp.region, oracle, "as mismatch seed {seed}");
    }
}

#[test]
fn zielonka_vs_lasso_brute_force() {
    let bounds = OracleBounds::default();
    let structures = canonical_structures(3, 2, false);
    let omegas = canonical_priority_maps(3, 3);
    for s in &structures {
        for (i, o) in omegas.iter().enumerate() {
            if i % 3 != 0 {
                continue;
            }
            let g = s.game(o, &vec![0; 3]);
            let z = solve_parity_zielonka(&g, o).unwrap();
            let oracle = oracle_sure_parity_region(&g, o, &bounds).unwrap();
            assert_eq!(z.w1, oracle, "zielonka mismatch on {g:?} omega {o:?}");
        }
    }
}
