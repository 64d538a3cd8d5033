use num_integer::Integer;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::stomat::{
    canonical_form, maximal_permutation_index, period, restricted_permutation, IndexSet, Matrix,
    Partition,
};

/// Index partition induced by a cycle matrix, or the transient classes that
/// prevent one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CyclePartition {
    Induced(Partition),
    /// The matrix has transient classes, so the cycle has order zero.
    Transient(Vec<IndexSet>),
}

impl CyclePartition {
    pub fn partition(&self) -> Option<&Partition> {
        match self {
            Self::Induced(p) => Some(p),
            Self::Transient(_) => None,
        }
    }

    pub fn diagnostic(&self) -> Option<String> {
        match self {
            Self::Induced(_) => None,
            Self::Transient(classes) => {
                let list: Vec<String> = classes.iter().map(ToString::to_string).collect();
                Some(format!("order is zero: transient classes {}", list.join(", ")))
            }
        }
    }
}

/// Splits the indices of a stochastic matrix into its closed permutation
/// block and the remaining ergodic classes.
pub fn induced_partition<T: Scalar>(p: &Matrix<T>) -> CyclePartition {
    let form = canonical_form(p);
    if form.has_transient() {
        return CyclePartition::Transient(form.transient().map(|c| c.members.clone()).collect());
    }
    let block0 = maximal_permutation_index(p);
    let blocks = form
        .ergodic()
        .map(|c| c.members.clone())
        .filter(|c| c.is_disjoint(&block0))
        .collect();
    CyclePartition::Induced(
        Partition::new(p.dim(), block0, blocks).expect("ergodic classes partition the indices"),
    )
}

/// `lcm` of the permutation order on block 0 and the periods of all other
/// blocks; every finite w-order divides it.
pub fn structural_order<T: Scalar>(p: &Matrix<T>, partition: &Partition) -> Result<u64> {
    let perm = restricted_permutation(p, partition.block0()).ok_or_else(|| {
        Error::InvalidPartition(format!(
            "block 0 {} is not a closed permutation block",
            partition.block0()
        ))
    })?;
    let mut bound = perm.order();
    for block in partition.blocks() {
        bound = bound.lcm(&(period(&p.principal(block))? as u64));
    }
    Ok(bound)
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        self.0[ra.max(rb)] = ra.min(rb);
    }
}

/// Partition induced by a product of matrices with partitions `a` and `b`:
/// block 0 is the intersection of the two permutation blocks, and every
/// other block is a connected component of the overlap relation between the
/// non-permutation blocks of either side.
pub fn merge_partitions(a: &Partition, b: &Partition) -> Result<Partition> {
    if a.dim() != b.dim() {
        return Err(Error::InvalidPartition(format!(
            "ground sets differ: {} vs {} indices",
            a.dim(),
            b.dim()
        )));
    }
    let dim = a.dim();
    let block0 = a.block0().intersection(b.block0());
    let mut uf = UnionFind((0..dim).collect());
    for block in a.blocks().iter().chain(b.blocks()) {
        let mut members = block.iter();
        if let Some(first) = members.next() {
            for x in members {
                uf.union(first, x);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); dim];
    for i in (0..dim).filter(|&i| !block0.contains(i)) {
        let root = uf.find(i);
        groups[root].push(i);
    }
    let blocks = groups
        .into_iter()
        .filter(|g| !g.is_empty())
        .map(IndexSet::from_indices)
        .collect();
    Partition::new(dim, block0, blocks)
}
