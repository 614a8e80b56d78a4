//! Regions of vertices as fixed-universe bitsets.

use std::fmt;

use serde::{Deserialize, Serialize, Serializer};

use crate::game::VertexId;

const BITS: usize = 64;

/// A set of vertex ids over a fixed universe `0..len`.
///
/// Region results of attractors, winning sets and traps are all `VertexSet`s;
/// the set algebra is word-parallel.
#[derive(Clone, PartialEq, Eq, Hash, Deserialize)]
#[serde(from = "SetWire")]
pub struct VertexSet {
    blocks: Vec<u64>,
    len: usize,
}

impl VertexSet {
    pub fn empty(len: usize) -> Self {
        VertexSet { blocks: vec![0; len.div_ceil(BITS)], len }
    }

    pub fn full(len: usize) -> Self {
        let mut s = Self::empty(len);
        for b in &mut s.blocks {
            *b = u64::MAX;
        }
        s.clear_tail();
        s
    }

    pub fn from_iter<I: IntoIterator<Item = VertexId>>(len: usize, iter: I) -> Self {
        let mut s = Self::empty(len);
        for v in iter {
            s.insert(v);
        }
        s
    }

    pub fn singleton(len: usize, v: VertexId) -> Self {
        Self::from_iter(len, [v])
    }

    /// Size of the universe, not the cardinality.
    pub fn universe(&self) -> usize {
        self.len
    }

    pub fn insert(&mut self, v: VertexId) {
        debug_assert!(v < self.len);
        self.blocks[v / BITS] |= 1 << (v % BITS);
    }

    pub fn remove(&mut self, v: VertexId) {
        debug_assert!(v < self.len);
        self.blocks[v / BITS] &= !(1 << (v % BITS));
    }

    pub fn contains(&self, v: VertexId) -> bool {
        v < self.len && self.blocks[v / BITS] & (1 << (v % BITS)) != 0
    }

    pub fn count(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.iter().all(|&b| b == 0)
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &VertexSet) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a &= b;
        }
    }

    pub fn difference_with(&mut self, other: &VertexSet) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a &= !b;
        }
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        let mut s = self.clone();
        s.union_with(other);
        s
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        let mut s = self.clone();
        s.intersect_with(other);
        s
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        let mut s = self.clone();
        s.difference_with(other);
        s
    }

    pub fn complement(&self) -> VertexSet {
        let mut s = VertexSet { blocks: self.blocks.iter().map(|b| !b).collect(), len: self.len };
        s.clear_tail();
        s
    }

    pub fn is_subset_of(&self, other: &VertexSet) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.blocks.iter().zip(&other.blocks).all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint_from(&self, other: &VertexSet) -> bool {
        self.blocks.iter().zip(&other.blocks).all(|(a, b)| a & b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.blocks.iter().enumerate().flat_map(|(i, &block)| {
            let mut b = block;
            std::iter::from_fn(move || {
                if b == 0 {
                    None
                } else {
                    let tz = b.trailing_zeros() as usize;
                    b &= b - 1;
                    Some(i * BITS + tz)
                }
            })
        })
    }

    /// Sorted vector of members, the canonical external form of a region.
    pub fn to_vec(&self) -> Vec<VertexId> {
        self.iter().collect()
    }

    fn clear_tail(&mut self) {
        let used = self.len % BITS;
        if used != 0 {
            if let Some(last) = self.blocks.last_mut() {
                *last &= (1u64 << used) - 1;
            }
        }
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Serialize for VertexSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        SetWire { universe: self.len, members: self.to_vec() }.serialize(serializer)
    }
}

#[derive(Serialize, Deserialize)]
struct SetWire {
    universe: usize,
    members: Vec<VertexId>,
}

impl From<SetWire> for VertexSet {
    fn from(w: SetWire) -> Self {
        VertexSet::from_iter(w.universe, w.members)
    }
}
