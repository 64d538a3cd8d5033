use std::fmt;
use std::thread;

use serde_json::{json, Value};

use super::{run_to_convergence, LimitReport, LimitStructure, RunOptions};
use crate::derived::{DerivedGraph, DerivedWalk};
use crate::graph::GossipGraph;
use crate::holonomy::{is_w_holonomic_for_graph, WeightVector};
use crate::scalar::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WalkSpec {
    /// Every orbit loop once, in cycle order.
    Canonical,
    Seeded(u64),
    Explicit(DerivedWalk),
}

impl fmt::Display for WalkSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Canonical => f.write_str("canonical"),
            Self::Seeded(seed) => write!(f, "seed {seed}"),
            Self::Explicit(w) => write!(f, "explicit ({} edges)", w.len()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Clause {
    Pass,
    Fail,
    /// Nothing to check.
    Vacuous,
}

impl Clause {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Self::Pass
        } else {
            Self::Fail
        }
    }

    pub fn ok(self) -> bool {
        self != Self::Fail
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pass => "pass",
            Self::Fail => "fail",
            Self::Vacuous => "vacuous",
        })
    }
}

#[derive(Clone, Debug)]
pub struct WalkVerdict {
    pub walk: WalkSpec,
    /// Limit set finite and inside the group.
    pub finite: Clause,
    /// Products block diagonal with a permutation on block 0.
    pub block_diagonal: Clause,
    /// Converged blocks rank one with the predicted rows.
    pub rank_one: Clause,
    pub observed_limit_size: usize,
    pub report: Option<LimitReport>,
    pub error: Option<String>,
}

impl WalkVerdict {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.finite.ok() && self.block_diagonal.ok() && self.rank_one.ok()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "walk": self.walk.to_string(),
            "finite_limit_set": self.finite.to_string(),
            "block_diagonal": self.block_diagonal.to_string(),
            "rank_one_blocks": self.rank_one.to_string(),
            "observed_limit_size": self.observed_limit_size,
            "error": self.error,
        })
    }
}

#[derive(Clone, Debug)]
pub struct Verdict {
    /// Unmet preconditions; walks are only checked when this is empty.
    pub preconditions: Vec<String>,
    pub group_order: Option<usize>,
    pub walks: Vec<WalkVerdict>,
}

impl Verdict {
    pub fn preconditions_met(&self) -> bool {
        self.preconditions.is_empty()
    }

    pub fn passed(&self) -> bool {
        self.preconditions_met() && self.walks.iter().all(WalkVerdict::passed)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "preconditions": if self.preconditions_met() { json!("met") } else { json!(self.preconditions) },
            "group_order": self.group_order,
            "walks": self.walks.iter().map(WalkVerdict::to_json).collect::<Vec<_>>(),
            "passed": self.passed(),
        })
    }
}

fn precondition_failure(preconditions: Vec<String>) -> Verdict {
    Verdict {
        preconditions: preconditions
            .into_iter()
            .map(|p| format!("precondition failed: {p}"))
            .collect(),
        group_order: None,
        walks: Vec::new(),
    }
}

fn check_walk(
    graph: &GossipGraph<Rational>,
    derived: &DerivedGraph,
    structure: &LimitStructure,
    spec: WalkSpec,
    opts: &RunOptions,
) -> WalkVerdict {
    let walk = match &spec {
        WalkSpec::Canonical => derived.exhaustive_closed_walk(),
        WalkSpec::Seeded(seed) => derived.seeded_exhaustive_walk(*seed),
        WalkSpec::Explicit(w) => w.clone(),
    };
    match run_to_convergence(graph, derived, structure, &walk, opts) {
        Ok(report) => {
            let finite = report.block_diagonal && report.limit_in_group && report.observed_limit_size > 0;
            let rank_one = if report.has_blocks() {
                Clause::from_bool(
                    report.converged
                        && report.violations == 0
                        && report.predicted_positive()
                        && report.max_row_error <= opts.row_tol,
                )
            } else {
                Clause::Vacuous
            };
            WalkVerdict {
                walk: spec,
                finite: Clause::from_bool(finite),
                block_diagonal: Clause::from_bool(report.block_diagonal && report.weight_conserved),
                rank_one,
                observed_limit_size: report.observed_limit_size,
                report: Some(report),
                error: None,
            }
        }
        Err(e) => WalkVerdict {
            walk: spec,
            finite: Clause::Fail,
            block_diagonal: Clause::Fail,
            rank_one: Clause::Fail,
            observed_limit_size: 0,
            report: None,
            error: Some(e.to_string()),
        },
    }
}

/// Checks the limit theorem on each walk. Unmet preconditions (topology or
/// holonomy) are reported in the verdict rather than returned as errors.
pub fn verify_theorem(
    graph: &GossipGraph<Rational>,
    w: &WeightVector,
    walks: &[WalkSpec],
    opts: &RunOptions,
) -> Verdict {
    let validation = graph.validate();
    if !validation.preconditions_met() {
        return precondition_failure(validation.diagnostics());
    }
    let report = match is_w_holonomic_for_graph(graph, w, None) {
        Ok(r) => r,
        Err(e) => return precondition_failure(vec![e.to_string()]),
    };
    if !report.is_holonomic() {
        let cycles: Vec<String> = report.offending().map(|c| c.cycle.to_string()).collect();
        return precondition_failure(vec![format!("not w-holonomic: {}", cycles.join(", "))]);
    }
    let setup = DerivedGraph::build(w, &report)
        .and_then(|d| LimitStructure::new(graph, w, &report).map(|s| (d, s)));
    let (derived, structure) = match setup {
        Ok(x) => x,
        Err(e) => return precondition_failure(vec![e.to_string()]),
    };
    let verdicts = thread::scope(|scope| {
        let handles: Vec<_> = walks
            .iter()
            .cloned()
            .map(|spec| {
                let (derived, structure) = (&derived, &structure);
                scope.spawn(move || check_walk(graph, derived, structure, spec, opts))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("walk verification panicked"))
            .collect()
    });
    Verdict {
        preconditions: Vec::new(),
        group_order: Some(structure.group.order()),
        walks: verdicts,
    }
}
