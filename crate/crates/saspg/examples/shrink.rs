use std::time::Instant;
use saspg::game::Player;
use saspg::generate::{canonical_priority_maps, canonical_structures};
use saspg::oracle::{oracle_as_parity_region, oracle_sas_region, OracleBounds};
use saspg::qualitative::as_winning_region;
use saspg::solver::solve_sas;

fn main() {
    let bounds = OracleBounds::default();
    let t0 = Instant::now();
    let structures = canonical_structures(4, 2, true);
    let omegas = canonical_priority_maps(4, 3);
    println!("n=4: {} structures, {} omegas (built in {:.1}s)", structures.len(), omegas.len(), t0.elapsed().as_secs_f64());
    let t0 = Instant::now();
    let mut count = 0u64;
    'outer: for (si, s) in structures.iter().enumerate() {
        for (i, o1) in omegas.iter().enumerate() {
            if (i + si) % 97 != 0 { continue; }
            for (j, o2) in omegas.iter().enumerate() {
                if (j + si * 31) % 89 != 0 { continue; }
                let g = s.game(o1, o2);
                let sas = solve_sas(&g);
                assert_eq!(sas.w1, oracle_sas_region(&g, &bounds).unwrap());
                let asp = as_winning_region(&g, Player::P1, o1);
                assert_eq!(asp, oracle_as_parity_region(&g, o1, &bounds).unwrap());
                count += 1;
                if count >= 30000 { break 'outer; }
            }
        }
    }
    let dt = t0.elapsed().as_secs_f64();
    println!("n=4 sampled {count} in {dt:.1}s -> {:.1} us/game", dt * 1e6 / count as f64);
}
