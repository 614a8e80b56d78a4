//! Register machinery shared by the automaton construction and the game
//! lifting: one register per occurring even priority of the indexing
//! condition, each storing the largest priority of the other condition since
//! the last visit to its index class.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

/// Layout and priority map of the register construction.
///
/// With `swapped = false` the registers are indexed by even priorities of the
/// first condition and store priorities of the second (this is the
/// presentation orientation); `swapped = true` exchanges the roles.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterLayout {
    /// Occurring even priorities of the indexing condition, ascending.
    pub indexed: Vec<u32>,
    /// Maximal priority of the stored condition, normalized to even.
    pub d_reg: u32,
    /// Maximal priority of the indexing condition (raw).
    pub d_idx: u32,
    pub swapped: bool,
}

fn even_up(d: u32) -> u32 {
    if d % 2 == 0 {
        d
    } else {
        d + 1
    }
}

fn odd_up(d: u32) -> u32 {
    if d % 2 == 1 {
        d
    } else {
        d + 1
    }
}

/// Squared blowup factor `d_other ^ d_this` of an orientation, compared
/// exactly in integers; the realized factor is its square root.
fn orientation_factor(d_this: u32, d_other: u32) -> BigUint {
    BigUint::from(d_other.max(1)).pow(d_this)
}

impl RegisterLayout {
    /// Layout for a fixed orientation over the two priority vectors.
    pub fn for_orientation(omega1: &[u32], omega2: &[u32], swapped: bool) -> RegisterLayout {
        let (idx, reg) = if swapped { (omega2, omega1) } else { (omega1, omega2) };
        let d_idx = idx.iter().copied().max().unwrap_or(0);
        let d_reg = even_up(reg.iter().copied().max().unwrap_or(0));
        let mut indexed: Vec<u32> = idx.iter().copied().filter(|p| p % 2 == 0).collect();
        indexed.sort_unstable();
        indexed.dedup();
        RegisterLayout { indexed, d_reg, d_idx, swapped }
    }

    /// Picks the orientation realizing the `sqrt(min(d1^d2, d2^d1))` blowup
    /// bound; ties go to registering the second condition.
    pub fn choose(omega1: &[u32], omega2: &[u32]) -> RegisterLayout {
        let d1 = omega1.iter().copied().max().unwrap_or(0);
        let d2 = omega2.iter().copied().max().unwrap_or(0);
        let keep = orientation_factor(d1, d2) <= orientation_factor(d2, d1);
        Self::for_orientation(omega1, omega2, !keep)
    }

    /// The `(idx, reg)` priority pair of a vertex under this orientation.
    pub fn oriented(&self, prio1: u32, prio2: u32) -> (u32, u32) {
        if self.swapped {
            (prio2, prio1)
        } else {
            (prio1, prio2)
        }
    }

    pub fn register_count(&self) -> usize {
        self.indexed.len()
    }

    pub fn initial(&self) -> Vec<u32> {
        vec![0; self.indexed.len()]
    }

    /// Register update on leaving a state with oriented priorities
    /// `(idx_prio, reg_prio)`: the register of the index class is reset to
    /// the stored priority, every other register takes the max.
    pub fn update(&self, regs: &[u32], idx_prio: u32, reg_prio: u32) -> Vec<u32> {
        self.indexed
            .iter()
            .zip(regs)
            .map(|(&d, &r)| if idx_prio == d { reg_prio } else { r.max(reg_prio) })
            .collect()
    }

    /// Offset of an even index priority: `d * (d_reg + 2) / 2`.
    pub fn offset(&self, d: u32) -> u32 {
        d * (self.d_reg + 2) / 2
    }

    /// The combined priority of a state with oriented index priority
    /// `idx_prio` and registers `regs`.
    pub fn priority(&self, regs: &[u32], idx_prio: u32) -> u32 {
        if idx_prio % 2 == 1 {
            (idx_prio * (self.d_reg + 2) + self.d_reg) / 2
        } else {
            let slot = self
                .indexed
                .binary_search(&idx_prio)
                .expect("every occurring even index priority has a register");
            self.offset(idx_prio) + regs[slot]
        }
    }

    /// Upper bound on produced priorities: the top odd segment value with the
    /// index maximum rounded up to odd.
    pub fn priority_bound(&self) -> u32 {
        (odd_up(self.d_idx) * (self.d_reg + 2) + self.d_reg) / 2
    }

    /// State-count bound factor `(d_reg_raw + 1) ^ ceil((d_idx + 1) / 2)`;
    /// registers only ever hold occurring priorities, so the raw maximum of
    /// the stored condition bounds each register's range.
    pub fn state_factor(&self, d_reg_raw: u32) -> BigUint {
        BigUint::from(d_reg_raw + 1u32).pow((self.d_idx + 1).div_ceil(2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orientation_prefers_smaller_factor() {
        // d1 = 2, d2 = 6: registering condition 2 gives 7^2 = 49, swapping
        // gives 3^4 = 81.
        let omega1 = vec![0, 0, 2, 1];
        let omega2 = vec![5, 3, 1, 6];
        let layout = RegisterLayout::choose(&omega1, &omega2);
        assert!(!layout.swapped);
        assert_eq!(layout.indexed, vec![0, 2]);
        assert_eq!(layout.d_reg, 6);
    }

    #[test]
    fn orientation_tie_registers_condition_two() {
        let omega1 = vec![0, 1, 2];
        let omega2 = vec![2, 1, 0];
        let layout = RegisterLayout::choose(&omega1, &omega2);
        assert!(!layout.swapped);
    }

    #[test]
    fn update_and_priority_follow_the_worked_example() {
        // Extended example: Ω1 = (0,0,2,1), Ω2 = (5,3,1,6), d2 = 6.
        let layout = RegisterLayout::for_orientation(&[0, 0, 2, 1], &[5, 3, 1, 6], false);
        let r0 = layout.initial();
        assert_eq!(layout.priority(&r0, 0), 0);
        // Leaving q0 (0,5): register 0 resets to 5, register 2 maxes to 5.
        let r1 = layout.update(&r0, 0, 5);
        assert_eq!(r1, vec![5, 5]);
        assert_eq!(layout.priority(&r1, 0), 5);
        // Leaving q1 (0,3): (3,5).
        let r2 = layout.update(&r1, 0, 3);
        assert_eq!(r2, vec![3, 5]);
        assert_eq!(layout.priority(&r2, 2), 13);
        // Leaving q2 (2,1): (3,1).
        let r3 = layout.update(&r2, 2, 1);
        assert_eq!(r3, vec![3, 1]);
        assert_eq!(layout.priority(&r3, 0), 3);
        assert_eq!(layout.priority(&r3, 1), 7);
        // Leaving q3 (1,6): (6,6).
        let r4 = layout.update(&r3, 1, 6);
        assert_eq!(r4, vec![6, 6]);
        assert_eq!(layout.priority(&r4, 2), 14);
        // Leaving q2 (2,1) once more: (6,1).
        let r5 = layout.update(&r4, 2, 1);
        assert_eq!(r5, vec![6, 1]);
        assert_eq!(layout.priority(&r5, 0), 6);
        assert_eq!(layout.priority(&r5, 1), 7);
    }

    #[test]
    fn odd_d2_is_normalized_by_increment() {
        let layout = RegisterLayout::for_orientation(&[2, 1], &[1, 0], false);
        assert_eq!(layout.d_reg, 2);
        // Offsets use the normalized range: ν(2) = 2 * 4 / 2 = 4.
        assert_eq!(layout.offset(2), 4);
        assert_eq!(layout.priority(&[1, 0], 1), 3);
    }
}
