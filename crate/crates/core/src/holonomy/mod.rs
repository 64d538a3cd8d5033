//! Per-cycle holonomy: how a weight vector moves when the gossip process runs
//! once around a cycle, and the index structure of the cycle matrix.

mod partition;
mod weight;

pub use partition::{induced_partition, merge_partitions, structural_order, CyclePartition};
pub use weight::WeightVector;

use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::{restrict_matrix, restrict_vector, EdgeSequence, GossipGraph, PointedCycle};
use crate::scalar::{Rational, Scalar};
use crate::stomat::{restricted_permutation, IndexSet, Matrix, StochasticMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Holonomy {
    /// w-order 0.
    NonHolonomic,
    /// w-order 1.
    Holonomic,
    /// w-order above 1.
    FinitelyNonHolonomic,
}

impl Holonomy {
    pub fn from_order(order: u64) -> Self {
        match order {
            0 => Self::NonHolonomic,
            1 => Self::Holonomic,
            _ => Self::FinitelyNonHolonomic,
        }
    }
}

impl fmt::Display for Holonomy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::NonHolonomic => "non-holonomic",
            Self::Holonomic => "holonomic",
            Self::FinitelyNonHolonomic => "finitely-non-holonomic",
        })
    }
}

/// Everything known about one pointed cycle for a given weight vector.
#[derive(Clone, Debug, PartialEq)]
pub struct CycleAnalysis<T = Rational> {
    pub cycle: PointedCycle,
    pub edges: EdgeSequence,
    /// `P_C`, the product of the cycle's local matrices, first edge rightmost.
    pub matrix: StochasticMatrix<T>,
    pub partition: CyclePartition,
    /// `None` when the matrix has transient classes.
    pub structural_order: Option<u64>,
    /// Largest order that was searched.
    pub cap: u64,
    /// The search stopped below the structural bound without finding an
    /// order.
    pub cap_limited: bool,
    pub order_w: u64,
    /// `[w, w P_C, …]`, one entry per orbit point; empty when `order_w = 0`.
    pub orbit: Vec<Vec<T>>,
}

impl<T: Scalar> CycleAnalysis<T> {
    pub fn holonomy(&self) -> Holonomy {
        Holonomy::from_order(self.order_w)
    }

    pub fn is_holonomic(&self) -> bool {
        self.order_w > 0
    }

    pub fn induced(&self) -> Option<&crate::stomat::Partition> {
        self.partition.partition()
    }

    /// Why the cycle has order zero, if it does.
    pub fn witness(&self) -> Option<String> {
        if self.order_w > 0 {
            return None;
        }
        self.partition.diagnostic().or_else(|| {
            Some(if self.cap_limited {
                format!("no return within cap {}", self.cap)
            } else {
                format!("orbit of w never returns (order divides {} if finite)", self.cap)
            })
        })
    }

    /// Indices of block 0 fixed by `P_C^{order_w}`. All of block 0 unless `w`
    /// has equal entries there that a smaller power already returns.
    pub fn orbit_fixed_indices(&self) -> IndexSet {
        let Some(part) = self.induced() else {
            return IndexSet::empty();
        };
        let Some(perm) = restricted_permutation(&self.matrix, part.block0()) else {
            return IndexSet::empty();
        };
        let power = perm.pow(self.order_w.max(1));
        IndexSet::from_indices(
            part.block0()
                .iter()
                .enumerate()
                .filter(|&(k, _)| power.image(k) == k)
                .map(|(_, i)| i),
        )
    }

    pub fn to_json(&self) -> Value {
        let partition = match &self.partition {
            CyclePartition::Induced(p) => json!({
                "block0": p.block0(),
                "blocks": p.blocks(),
            }),
            CyclePartition::Transient(classes) => json!({ "transient": classes }),
        };
        let orbit: Vec<Value> = self
            .orbit
            .iter()
            .map(|v| Value::Array(v.iter().map(Scalar::to_json).collect()))
            .collect();
        json!({
            "cycle": self.cycle.to_string(),
            "order_w": self.order_w,
            "classification": self.holonomy().to_string(),
            "structural_order": self.structural_order,
            "cap": self.cap,
            "cap_limited": self.cap_limited,
            "partition": partition,
            "orbit": orbit,
        })
    }
}

fn require_exact<T: Scalar>() -> Result<()> {
    if T::EXACT {
        Ok(())
    } else {
        Err(Error::RequiresExact)
    }
}

/// Smallest `k ≤ cap` with `v Pᵏ = v`, or 0.
fn return_time<T: Scalar>(p: &Matrix<T>, v: &[T], cap: u64) -> Result<u64> {
    let mut x = v.to_vec();
    for k in 1..=cap {
        x = p.left_mul(&x)?;
        if x == v {
            return Ok(k);
        }
    }
    Ok(0)
}

/// Analyzes one pointed cycle. The default search cap is the structural
/// bound, which is exact: a finite w-order always divides it.
pub fn analyze_cycle<T: Scalar>(
    graph: &GossipGraph<T>,
    cycle: &PointedCycle,
    w: &WeightVector<T>,
    cap: Option<u64>,
) -> Result<CycleAnalysis<T>> {
    require_exact::<T>()?;
    w.check_dim(graph.dim())?;
    let edges = graph.cycle_edges(cycle)?;
    let matrix = graph.product(&edges)?;
    let partition = induced_partition(matrix.matrix());
    let structural = partition
        .partition()
        .map(|p| structural_order(matrix.matrix(), p))
        .transpose()?;
    let (order_w, cap, cap_limited) = match structural {
        // Transient classes force every stationary vector of a power of P_C
        // to vanish somewhere, and w is positive.
        None => (0, cap.unwrap_or(0), false),
        Some(bound) => {
            let cap = cap.unwrap_or(bound);
            let covered = graph.covered_indices(cycle);
            let p_bar = restrict_matrix(matrix.matrix(), &covered);
            let w_bar = restrict_vector(w.entries(), &covered);
            let order = return_time(&p_bar, &w_bar, cap.min(bound))?;
            (order, cap, order == 0 && cap < bound)
        }
    };
    let mut orbit = Vec::with_capacity(order_w as usize);
    if order_w > 0 {
        let mut v = w.entries().to_vec();
        for _ in 0..order_w {
            let next = matrix.left_mul(&v)?;
            orbit.push(v);
            v = next;
        }
    }
    Ok(CycleAnalysis {
        cycle: cycle.clone(),
        edges,
        matrix,
        partition,
        structural_order: structural,
        cap,
        cap_limited,
        order_w,
        orbit,
    })
}

/// `min{k ≤ cap : w̄ = w̄ P̄_Cᵏ}`, 0 if there is none.
pub fn w_order<T: Scalar>(
    graph: &GossipGraph<T>,
    cycle: &PointedCycle,
    w: &WeightVector<T>,
    cap: u64,
) -> Result<u64> {
    Ok(analyze_cycle(graph, cycle, w, Some(cap))?.order_w)
}

/// `[w, w P_C, …, w P_C^{k−1}]` for the w-order `k`.
pub fn orbit_set<T: Scalar>(
    graph: &GossipGraph<T>,
    cycle: &PointedCycle,
    w: &WeightVector<T>,
) -> Result<Vec<WeightVector<T>>> {
    let analysis = analyze_cycle(graph, cycle, w, None)?;
    if analysis.order_w == 0 {
        return Err(Error::NotHolonomic(cycle.to_string()));
    }
    analysis.orbit.into_iter().map(WeightVector::new).collect()
}

/// Induced partition of the cycle matrix `P_C`.
pub fn cycle_partition<T: Scalar>(graph: &GossipGraph<T>, cycle: &PointedCycle) -> Result<CyclePartition> {
    Ok(induced_partition(graph.cycle_matrix(cycle)?.matrix()))
}

/// Structural bound on the w-order; `None` when the cycle matrix has
/// transient classes.
pub fn structural_order_bound<T: Scalar>(graph: &GossipGraph<T>, cycle: &PointedCycle) -> Result<Option<u64>> {
    let p = graph.cycle_matrix(cycle)?;
    induced_partition(p.matrix())
        .partition()
        .map(|part| structural_order(p.matrix(), part))
        .transpose()
}

pub fn classify<T: Scalar>(graph: &GossipGraph<T>, cycle: &PointedCycle, w: &WeightVector<T>) -> Result<Holonomy> {
    Ok(analyze_cycle(graph, cycle, w, None)?.holonomy())
}

/// Moves `w` from the basepoint of `cycle` to `new_basepoint` (a node of the
/// cycle): the result is `w R`, where `R` is the product of the cycle's edges
/// from the new basepoint back to the old one. It is fixed by the rebased
/// cycle matrix raised to the same order.
pub fn transport_basepoint<T: Scalar>(
    graph: &GossipGraph<T>,
    cycle: &PointedCycle,
    w: &WeightVector<T>,
    new_basepoint: usize,
) -> Result<Vec<T>> {
    let analysis = analyze_cycle(graph, cycle, w, None)?;
    if analysis.order_w == 0 {
        return Err(Error::NotHolonomic(cycle.to_string()));
    }
    let p = cycle
        .nodes()
        .iter()
        .position(|&v| v == new_basepoint)
        .ok_or_else(|| {
            Error::InvalidGraph(format!("v{} is not on cycle {cycle}", new_basepoint + 1))
        })?;
    let back = if p == 0 { &[][..] } else { &analysis.edges[p..] };
    let suffix = graph.product(back)?;
    suffix.left_mul(w.entries())
}

/// Per-cycle holonomy of a whole graph.
#[derive(Clone, Debug, PartialEq)]
pub struct HolonomyReport<T = Rational> {
    pub cycles: Vec<CycleAnalysis<T>>,
}

impl<T: Scalar> HolonomyReport<T> {
    /// Every cycle has a finite nonzero w-order (vacuously true without
    /// cycles).
    pub fn is_holonomic(&self) -> bool {
        self.cycles.iter().all(CycleAnalysis::is_holonomic)
    }

    pub fn has_no_cycles(&self) -> bool {
        self.cycles.is_empty()
    }

    pub fn offending(&self) -> impl Iterator<Item = &CycleAnalysis<T>> {
        self.cycles.iter().filter(|c| !c.is_holonomic())
    }

    pub fn require_holonomic(&self) -> Result<()> {
        let bad: Vec<String> = self.offending().map(|c| c.cycle.to_string()).collect();
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::NotHolonomic(bad.join(", ")))
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "holonomic": self.is_holonomic(),
            "no_cycles": self.has_no_cycles(),
            "cycles": self.cycles.iter().map(CycleAnalysis::to_json).collect::<Vec<_>>(),
        })
    }
}

/// Analyzes every pointed cycle of the graph (both orientations).
pub fn is_w_holonomic_for_graph<T: Scalar>(
    graph: &GossipGraph<T>,
    w: &WeightVector<T>,
    cap: Option<u64>,
) -> Result<HolonomyReport<T>> {
    require_exact::<T>()?;
    let cycles = graph
        .cycles()?
        .iter()
        .map(|c| analyze_cycle(graph, c, w, cap))
        .collect::<Result<Vec<_>>>()?;
    Ok(HolonomyReport { cycles })
}
