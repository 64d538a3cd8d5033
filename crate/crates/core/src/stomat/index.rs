//! Index sets and index partitions over the state space `{0, .., dim-1}`.
//!
//! Internally every index is 0-based. The human-facing forms (`Display`,
//! JSON, [`IndexSet::from_one_based`]) are 1-based, matching the usual way
//! states are labelled in matrix notation.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Strictly increasing, duplicate-free list of state indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    /// Builds a set from arbitrary 0-based indices (sorted and deduplicated).
    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        let set: BTreeSet<usize> = indices.into_iter().collect();
        Self(set.into_iter().collect())
    }

    /// Builds a set from 1-based labels; rejects 0.
    pub fn from_one_based(labels: &[usize]) -> Result<Self> {
        if labels.contains(&0) {
            return Err(Error::InvalidIndexSet("labels are 1-based".into()));
        }
        Ok(Self::from_indices(labels.iter().map(|&l| l - 1)))
    }

    pub fn range(start: usize, end: usize) -> Self {
        Self((start..end).collect())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.0.binary_search(&idx).is_ok()
    }

    /// Position of `idx` inside the set.
    pub fn position(&self, idx: usize) -> Option<usize> {
        self.0.binary_search(&idx).ok()
    }

    pub fn min(&self) -> Option<usize> {
        self.0.first().copied()
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|i| i + 1).collect()
    }

    pub fn intersection(&self, other: &Self) -> Self {
        Self(self.iter().filter(|&i| other.contains(i)).collect())
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::from_indices(self.iter().chain(other.iter()))
    }

    pub fn difference(&self, other: &Self) -> Self {
        Self(self.iter().filter(|&i| !other.contains(i)).collect())
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.intersection(other).is_empty()
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.iter().all(|i| other.contains(i))
    }

    /// Checks every member is below `dim`.
    pub fn check_within(&self, dim: usize) -> Result<()> {
        match self.0.last() {
            Some(&max) if max >= dim => Err(Error::InvalidIndexSet(format!(
                "index {} exceeds dimension {dim}",
                max + 1
            ))),
            _ => Ok(()),
        }
    }
}

impl FromIterator<usize> for IndexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Self::from_indices(iter)
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        write!(f, "}}")
    }
}

impl Serialize for IndexSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.one_based().serialize(s)
    }
}

impl<'de> Deserialize<'de> for IndexSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let labels = Vec::<usize>::deserialize(d)?;
        Self::from_one_based(&labels).map_err(serde::de::Error::custom)
    }
}

/// Split of `{0, .., dim-1}` into a permutation block and a list of
/// non-permutation (irreducible) blocks.
///
/// Blocks are kept sorted by their smallest member, so two partitions with the
/// same blocks compare equal regardless of construction order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPartition")]
pub struct Partition {
    dim: usize,
    block0: IndexSet,
    blocks: Vec<IndexSet>,
}

impl Partition {
    pub fn new(dim: usize, block0: IndexSet, mut blocks: Vec<IndexSet>) -> Result<Self> {
        block0
            .check_within(dim)
            .map_err(|e| Error::InvalidPartition(e.to_string()))?;
        let mut seen = vec![false; dim];
        for i in block0.iter() {
            seen[i] = true;
        }
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            b.check_within(dim)
                .map_err(|e| Error::InvalidPartition(e.to_string()))?;
            for i in b.iter() {
                if seen[i] {
                    return Err(Error::InvalidPartition(format!(
                        "index {} appears twice",
                        i + 1
                    )));
                }
                seen[i] = true;
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidPartition(format!(
                "index {} not covered",
                missing + 1
            )));
        }
        blocks.sort_by_key(|b| b.min());
        Ok(Self {
            dim,
            block0,
            blocks,
        })
    }

    /// Everything in the permutation block.
    pub fn trivial(dim: usize) -> Self {
        Self {
            dim,
            block0: IndexSet::range(0, dim),
            blocks: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn block0(&self) -> &IndexSet {
        &self.block0
    }

    pub fn blocks(&self) -> &[IndexSet] {
        &self.blocks
    }

    /// Size of the largest non-permutation block (0 if there is none).
    pub fn largest_block(&self) -> usize {
        self.blocks.iter().map(IndexSet::len).max().unwrap_or(0)
    }

    /// Relabeling that lists block0 first, then each block in order.
    pub fn relabeling(&self) -> Vec<usize> {
        self.block0
            .iter()
            .chain(self.blocks.iter().flat_map(|b| b.iter()))
            .collect()
    }
}

#[derive(Deserialize)]
struct RawPartition {
    dim: usize,
    block0: IndexSet,
    blocks: Vec<IndexSet>,
}

impl TryFrom<RawPartition> for Partition {
    type Error = Error;

    fn try_from(raw: RawPartition) -> Result<Self> {
        Partition::new(raw.dim, raw.block0, raw.blocks)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[0: {}", self.block0)?;
        for (k, b) in self.blocks.iter().enumerate() {
            write!(f, ", {}: {}", k + 1, b)?;
        }
        write!(f, "]")
    }
}
