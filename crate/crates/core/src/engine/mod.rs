//! Simulation of the gossip process and the limit structure of exhaustive
//! products: global partition, contraction constant, permutation group and
//! rank-one blocks.

mod fixture;
mod group;
mod run;
mod verify;

pub use fixture::{gen_fixture, Fixture, FixtureKind, GroundTruth, Role};
pub use group::{PermutationGroup, GROUP_CAP};
pub use run::{run_to_convergence, LimitReport, RunOptions, TraceRow};
pub use verify::{verify_theorem, Clause, Verdict, WalkSpec, WalkVerdict};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::{EdgeSequence, GossipGraph};
use crate::holonomy::{merge_partitions, HolonomyReport, WeightVector};
use crate::scalar::{Rational, Scalar};
use crate::stomat::{restricted_permutation, Partition};

/// States of `x(t+1) = A_{e_t} x(t)` along a schedule.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<T> {
    pub initial: Vec<T>,
    pub schedule: EdgeSequence,
    /// `states[t]` is `x(t)`; `states[0]` is the initial state.
    pub states: Vec<Vec<T>>,
}

impl<T: Scalar> Trajectory<T> {
    pub fn last(&self) -> &[T] {
        self.states.last().expect("trajectory holds the initial state")
    }

    pub fn steps(&self) -> usize {
        self.states.len() - 1
    }
}

/// Runs `steps` gossip steps, cycling through `schedule`. An empty schedule
/// leaves the state unchanged.
pub fn simulate<T: Scalar>(
    graph: &GossipGraph<T>,
    schedule: &[usize],
    x0: &[T],
    steps: usize,
) -> Result<Trajectory<T>> {
    if x0.len() != graph.dim() {
        return Err(Error::DimensionMismatch {
            expected: graph.dim(),
            found: x0.len(),
        });
    }
    if let Some(&bad) = schedule.iter().find(|&&e| e >= graph.edges().len()) {
        return Err(Error::OutOfRange(format!(
            "edge id {bad} with {} edges",
            graph.edges().len()
        )));
    }
    let steps = if schedule.is_empty() { 0 } else { steps };
    let mut states = Vec::with_capacity(steps + 1);
    let mut x = x0.to_vec();
    states.push(x.clone());
    for t in 0..steps {
        graph.apply_edge_to_state(schedule[t % schedule.len()], &mut x)?;
        states.push(x.clone());
    }
    Ok(Trajectory {
        initial: x0.to_vec(),
        schedule: schedule.to_vec(),
        states,
    })
}

/// Merge of all cycle partitions; the trivial partition when there are no
/// cycles.
pub fn global_partition<T: Scalar>(dim: usize, report: &HolonomyReport<T>) -> Result<Partition> {
    report.require_holonomic()?;
    let mut acc = Partition::trivial(dim);
    for analysis in &report.cycles {
        let p = analysis
            .induced()
            .ok_or_else(|| Error::NotHolonomic(analysis.cycle.to_string()))?;
        acc = merge_partitions(&acc, p)?;
    }
    Ok(acc)
}

/// Smallest nonzero entry over the non-permutation blocks of every cycle
/// matrix; `None` when every cycle acts as a pure permutation.
pub fn epsilon_bound<T: Scalar>(report: &HolonomyReport<T>) -> Option<T> {
    report
        .cycles
        .iter()
        .filter_map(|a| a.induced().map(|p| (a, p)))
        .flat_map(|(a, p)| p.blocks().iter().map(move |b| a.matrix.principal(b)))
        .filter_map(|block| block.min_entry().ok())
        .reduce(Scalar::min_of)
}

/// `w` restricted to each non-permutation block, normalized.
pub fn predicted_limit_blocks<T: Scalar>(w: &WeightVector<T>, partition: &Partition) -> Result<Vec<Vec<T>>> {
    w.check_dim(partition.dim())?;
    Ok(partition
        .blocks()
        .iter()
        .map(|block| {
            let part: Vec<T> = block.iter().map(|i| w.entries()[i].clone()).collect();
            let alpha = part.iter().cloned().fold(T::zero(), |a, b| a + b);
            part.into_iter().map(|x| x / alpha.clone()).collect()
        })
        .collect())
}

/// Group generated by the cycle matrices restricted to block 0 of the
/// global partition.
pub fn limit_group<T: Scalar>(
    report: &HolonomyReport<T>,
    partition: &Partition,
    cap: usize,
) -> Result<PermutationGroup> {
    let support = partition.block0().clone();
    let mut generators = Vec::new();
    for analysis in &report.cycles {
        let g = restricted_permutation(analysis.matrix.matrix(), &support).ok_or_else(|| {
            Error::InvalidPartition(format!(
                "{} does not permute block 0 {support}",
                analysis.cycle
            ))
        })?;
        if !g.is_identity() && !generators.contains(&g) {
            generators.push(g);
        }
    }
    PermutationGroup::generate(support, generators, cap)
}

/// Everything the limit theorem predicts for a holonomic pair `(G, w)`.
#[derive(Clone, Debug)]
pub struct LimitStructure {
    pub partition: Partition,
    pub group: PermutationGroup,
    pub predicted: Vec<Vec<Rational>>,
    pub epsilon: Option<Rational>,
    /// Largest non-permutation block size.
    pub l_g: usize,
    /// Default number of exhaustive repetitions between checkpoints.
    pub spacing: usize,
}

impl LimitStructure {
    pub fn new(graph: &GossipGraph<Rational>, w: &WeightVector, report: &HolonomyReport) -> Result<Self> {
        let partition = global_partition(graph.dim(), report)?;
        let group = limit_group(report, &partition, GROUP_CAP)?;
        let predicted = predicted_limit_blocks(w, &partition)?;
        let l_g = partition.largest_block();
        Ok(Self {
            group,
            predicted,
            epsilon: epsilon_bound(report),
            l_g,
            spacing: l_g.div_ceil(2).max(1),
            partition,
        })
    }

    pub fn to_json(&self) -> Value {
        let generators: Vec<Value> = self
            .group
            .generators
            .iter()
            .map(|g| Value::Array(g.images().iter().map(|&i| json!(self.group.support.as_slice()[i] + 1)).collect()))
            .collect();
        json!({
            "global_partition": {
                "block0": self.partition.block0(),
                "blocks": self.partition.blocks(),
            },
            "epsilon": self.epsilon.as_ref().map_or(json!("no contraction blocks"), Scalar::to_json),
            "group": {
                "support": self.group.support,
                "generators": generators,
                "order": self.group.order(),
            },
            "predicted_blocks": self
                .predicted
                .iter()
                .map(|p| Value::Array(p.iter().map(Scalar::to_json).collect()))
                .collect::<Vec<_>>(),
            "l_g": self.l_g,
            "spacing": self.spacing,
        })
    }
}
