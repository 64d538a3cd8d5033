use std::collections::HashSet;
use std::fmt::Write as _;

use serde_json::{json, Value};

use super::LimitStructure;
use crate::derived::{DerivedGraph, DerivedWalk};
use crate::error::{Error, Result};
use crate::graph::GossipGraph;
use crate::scalar::{Rational, Scalar};
use crate::stomat::{restricted_permutation, IndexSet, Matrix, Partition, Permutation, StochasticMatrix};

const RELATIVE_SLACK: f64 = 1e-12;
const ABSOLUTE_SLACK: f64 = 1e-15;
const ROUNDING_THRESHOLD: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct RunOptions {
    /// Target for every block semi-norm.
    pub tol: f64,
    pub max_reps: usize,
    /// Repetitions between checkpoints; defaults to `⌈l_G / 2⌉`.
    pub spacing: Option<usize>,
    /// Keep multiplying up to `max_reps` after convergence.
    pub run_all: bool,
    /// Allowed deviation of measured limit rows from the prediction.
    pub row_tol: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_reps: 10_000,
            spacing: None,
            run_all: false,
            row_tol: 1e-9,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceRow {
    pub checkpoint: usize,
    pub repetitions: usize,
    /// Index into the non-permutation blocks, starting at 1.
    pub block: usize,
    pub seminorm: f64,
    /// `(1 − ε)^k` times the semi-norm at checkpoint 0.
    pub bound: f64,
}

#[derive(Clone, Debug)]
pub struct LimitReport {
    pub partition: Partition,
    pub group_order: usize,
    pub generators: Vec<Permutation>,
    pub predicted: Vec<Vec<Rational>>,
    /// First row of each converged block.
    pub measured: Vec<Vec<f64>>,
    /// Worst deviation of any limit row from its prediction, over every
    /// derived-edge boundary of the walk.
    pub max_row_error: f64,
    pub max_block_seminorm: f64,
    pub epsilon: Option<Rational>,
    pub spacing: usize,
    pub trace: Vec<TraceRow>,
    /// Checkpoints where the semi-norm failed to shrink by `1 − ε`.
    pub violations: usize,
    pub reps: usize,
    pub converged: bool,
    pub walk_length: usize,
    pub schedule_length: usize,
    /// `w P_ψ(γ) = w`, exactly.
    pub weight_conserved: bool,
    /// Every boundary product is block diagonal with a permutation on block 0.
    pub block_diagonal: bool,
    /// Permutation part of the walk product.
    pub permutation: Option<Permutation>,
    pub observed_limit_size: usize,
    pub limit_in_group: bool,
    pub float_permutation_agrees: bool,
    pub max_drift: f64,
}

impl LimitReport {
    pub fn has_blocks(&self) -> bool {
        !self.partition.blocks().is_empty()
    }

    pub fn predicted_positive(&self) -> bool {
        self.predicted.iter().flatten().all(|x| *x > Rational::from_integer(0.into()))
    }

    pub fn limit_size_divides_group(&self) -> bool {
        self.observed_limit_size > 0 && self.group_order.is_multiple_of(self.observed_limit_size)
    }

    pub fn trace_csv(&self) -> String {
        let mut out = String::from("checkpoint,repetitions,block,seminorm,bound\n");
        for r in &self.trace {
            writeln!(
                out,
                "{},{},{},{:e},{:e}",
                r.checkpoint, r.repetitions, r.block, r.seminorm, r.bound
            )
            .unwrap();
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let rational_rows = |rows: &[Vec<Rational>]| -> Vec<Value> {
            rows.iter()
                .map(|p| Value::Array(p.iter().map(Scalar::to_json).collect()))
                .collect()
        };
        json!({
            "global_partition": {
                "block0": self.partition.block0(),
                "blocks": self.partition.blocks(),
            },
            "group": {
                "order": self.group_order,
                "generators": self.generators.iter().map(ToString::to_string).collect::<Vec<_>>(),
            },
            "predicted_blocks": rational_rows(&self.predicted),
            "measured_blocks": self.measured,
            "max_row_error": self.max_row_error,
            "max_block_seminorm": self.max_block_seminorm,
            "epsilon": self.epsilon.as_ref().map_or(json!("no contraction blocks"), Scalar::to_json),
            "spacing": self.spacing,
            "violations": self.violations,
            "repetitions": self.reps,
            "converged": self.converged,
            "walk_length": self.walk_length,
            "schedule_length": self.schedule_length,
            "weight_conserved": self.weight_conserved,
            "block_diagonal": self.block_diagonal,
            "permutation": self.permutation.as_ref().map(ToString::to_string),
            "observed_limit_size": self.observed_limit_size,
            "limit_in_group": self.limit_in_group,
            "float_permutation_agrees": self.float_permutation_agrees,
            "max_drift": self.max_drift,
            "trace": self.trace.iter().map(|r| json!({
                "checkpoint": r.checkpoint,
                "repetitions": r.repetitions,
                "block": r.block,
                "seminorm": r.seminorm,
                "bound": r.bound,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Part of `i` in the partition: 0 for block 0, `b + 1` for block `b`.
fn part_of(partition: &Partition) -> Vec<usize> {
    let mut part = vec![0; partition.dim()];
    for (b, block) in partition.blocks().iter().enumerate() {
        for i in block.iter() {
            part[i] = b + 1;
        }
    }
    part
}

fn is_block_diagonal<T: Scalar>(a: &Matrix<T>, part: &[usize]) -> bool {
    (0..a.rows()).all(|i| (0..a.cols()).all(|j| part[i] == part[j] || a.get(i, j).is_zero()))
}

/// Rounds a float matrix to a permutation, if every entry is within the
/// rounding threshold of 0 or 1.
fn rounded_permutation(a: &Matrix<f64>) -> Option<Permutation> {
    let mut images = Vec::with_capacity(a.rows());
    for i in 0..a.rows() {
        let mut target = None;
        for (j, &x) in a.row(i).iter().enumerate() {
            if (x - 1.0).abs() <= ROUNDING_THRESHOLD {
                if target.is_some() {
                    return None;
                }
                target = Some(j);
            } else if x.abs() > ROUNDING_THRESHOLD {
                return None;
            }
        }
        images.push(target?);
    }
    Permutation::from_images(images)
}

fn normalized_restriction(v: &[Rational], block: &IndexSet) -> Vec<f64> {
    let part: Vec<f64> = block.iter().map(|i| v[i].to_f64()).collect();
    let alpha: f64 = part.iter().sum();
    part.into_iter().map(|x| x / alpha).collect()
}

fn row_error(block: &Matrix<f64>, target: &[f64]) -> f64 {
    (0..block.rows())
        .flat_map(|i| block.row(i).iter().zip(target).map(|(a, b)| (a - b).abs()))
        .fold(0.0, f64::max)
}

/// Iterates the product of an exhaustive closed walk at `w` and checks it
/// against the predicted limit structure.
///
/// Structure (permutation parts, block shape, weight conservation) is
/// checked on exact products of a single pass; the long-horizon powers run
/// in `f64` with rows renormalized at every checkpoint.
pub fn run_to_convergence(
    graph: &GossipGraph<Rational>,
    derived: &DerivedGraph,
    structure: &LimitStructure,
    walk: &DerivedWalk,
    opts: &RunOptions,
) -> Result<LimitReport> {
    if !derived.is_exhaustive_closed(walk) || derived.start(walk) != Some(derived.basepoint()) {
        return Err(Error::NotExhaustive(format!(
            "walk of {} edges does not use every derived edge in a closed walk at w",
            walk.len()
        )));
    }
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(Error::InvalidWeight(format!("tolerance must be positive, got {}", opts.tol)));
    }
    let partition = &structure.partition;
    let part = part_of(partition);
    let block0 = partition.block0();
    let blocks = partition.blocks();
    let w = &derived.nodes()[derived.basepoint()];

    // Exact single pass: the schedule product and every derived-edge
    // boundary product.
    let schedule = derived.psi(walk);
    let q = graph.product(&schedule)?;
    let mut boundary: Vec<StochasticMatrix<Rational>> = Vec::with_capacity(walk.len());
    let mut acc = StochasticMatrix::identity(graph.dim());
    for &e in &walk.edges {
        acc = &acc * derived.weight(e);
        boundary.push(acc.clone());
    }
    let weight_conserved = q.left_mul(w)? == *w;
    let permutation = restricted_permutation(q.matrix(), block0);
    let boundary_perms: Vec<Option<Permutation>> = boundary
        .iter()
        .map(|s| restricted_permutation(s.matrix(), block0))
        .collect();
    let block_diagonal = permutation.is_some()
        && boundary_perms.iter().all(Option::is_some)
        && is_block_diagonal(q.matrix(), &part)
        && boundary.iter().all(|s| is_block_diagonal(s.matrix(), &part));

    // Limit set at the boundaries: permutation part of Q^r S_j together with
    // the node reached, for r over one period of Q's permutation part.
    let mut limit: HashSet<(Permutation, usize)> = HashSet::new();
    let mut limit_in_group = block_diagonal;
    if let (true, Some(pq)) = (block_diagonal, &permutation) {
        let mut power = Permutation::identity(block0.len());
        for _ in 0..pq.order() {
            for (j, &e) in walk.edges.iter().enumerate() {
                let sj = boundary_perms[j].as_ref().expect("checked above");
                let element = power.then(sj);
                limit_in_group &= structure.group.contains(&element);
                limit.insert((element, derived.edges()[e].target));
            }
            power = power.then(pq);
        }
    }

    // Float phase.
    let spacing = opts.spacing.unwrap_or(structure.spacing).max(1);
    let eps = structure.epsilon.as_ref().map_or(0.0, Scalar::to_f64);
    let qf = q.to_f64();
    let mut product = StochasticMatrix::<f64>::identity(graph.dim());
    let seminorms = |p: &StochasticMatrix<f64>| -> Vec<f64> {
        blocks.iter().map(|b| p.principal(b).seminorm()).collect()
    };
    let initial = seminorms(&product);
    let mut last = initial.clone();
    let mut at_checkpoint = initial.clone();
    let mut trace: Vec<TraceRow> = initial
        .iter()
        .enumerate()
        .map(|(b, &s)| TraceRow {
            checkpoint: 0,
            repetitions: 0,
            block: b + 1,
            seminorm: s,
            bound: s,
        })
        .collect();
    let below = |s: &[f64]| s.iter().all(|&x| x < opts.tol);
    let mut converged = below(&last);
    let mut violations = 0;
    let mut max_drift: f64 = 0.0;
    let mut float_permutation_agrees = true;
    let mut perm_power = permutation.clone();
    let mut reps = 0;
    while reps < opts.max_reps && (!converged || opts.run_all || reps == 0) {
        product = &product * &qf;
        reps += 1;
        if let (Some(exact), Some(pq)) = (&perm_power, &permutation) {
            float_permutation_agrees &= rounded_permutation(&product.principal(block0)).as_ref() == Some(exact);
            perm_power = Some(exact.then(pq));
        }
        if converged {
            if reps % spacing == 0 {
                max_drift = max_drift.max(product.renormalize());
            }
            continue;
        }
        let current = seminorms(&product);
        for (b, (&now, &before)) in current.iter().zip(&last).enumerate() {
            if now > before * (1.0 + RELATIVE_SLACK) + ABSOLUTE_SLACK {
                return Err(Error::ContractionViolated(format!(
                    "block {} semi-norm rose from {before:e} to {now:e} at repetition {reps}",
                    b + 1
                )));
            }
        }
        if reps % spacing == 0 {
            let k = reps / spacing;
            max_drift = max_drift.max(product.renormalize());
            for (b, (&now, &before)) in current.iter().zip(&at_checkpoint).enumerate() {
                if now > (1.0 - eps) * before * (1.0 + RELATIVE_SLACK) + ABSOLUTE_SLACK {
                    violations += 1;
                }
                trace.push(TraceRow {
                    checkpoint: k,
                    repetitions: reps,
                    block: b + 1,
                    seminorm: now,
                    bound: (1.0 - eps).powi(k as i32) * initial[b],
                });
            }
            at_checkpoint = current.clone();
        }
        converged = below(&current);
        last = current;
    }

    // Measured rank-one blocks at every boundary of one more pass.
    let mut max_row_error: f64 = 0.0;
    let measured: Vec<Vec<f64>> = blocks.iter().map(|b| product.principal(b).row(0).to_vec()).collect();
    if !blocks.is_empty() {
        for (j, &e) in walk.edges.iter().enumerate() {
            let node = &derived.nodes()[derived.edges()[e].target];
            let at = &product * &boundary[j].to_f64();
            for b in blocks {
                max_row_error = max_row_error.max(row_error(&at.principal(b), &normalized_restriction(node, b)));
            }
        }
    }
    let max_block_seminorm = seminorms(&product).into_iter().fold(0.0, f64::max);

    Ok(LimitReport {
        partition: partition.clone(),
        group_order: structure.group.order(),
        generators: structure.group.generators.clone(),
        predicted: structure.predicted.clone(),
        measured,
        max_row_error,
        max_block_seminorm,
        epsilon: structure.epsilon.clone(),
        spacing,
        trace,
        violations,
        reps,
        converged,
        walk_length: walk.len(),
        schedule_length: schedule.len(),
        weight_conserved,
        block_diagonal,
        permutation,
        observed_limit_size: limit.len(),
        limit_in_group,
        float_permutation_agrees,
        max_drift,
    })
}
