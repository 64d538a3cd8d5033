use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::graph::GossipGraph;
use crate::scalar::Scalar;
use crate::stomat::{Matrix, StochasticMatrix};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Exact,
    Float,
}

/// One edge of a scenario file; `u`, `v` are 1-based and `pre_local` lists
/// agent `u`'s block first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioEdge {
    pub u: usize,
    pub v: usize,
    pub pre_local: Vec<Vec<Value>>,
}

/// Serialized gossip graph plus weight vector.
///
/// Matrix and weight entries are kept as raw JSON values (`"p/q"` strings or
/// numbers) until a scalar type is chosen, so exact inputs never pass through
/// a float.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub n: usize,
    pub m: usize,
    pub edges: Vec<ScenarioEdge>,
    pub weight: Vec<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    /// Semi-norm tolerance, as a rational string or a number.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub walks: Option<usize>,
}

impl Scenario {
    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// Exports a graph and weight vector; entries use [`Scalar::to_json`].
    pub fn from_graph<T: Scalar>(graph: &GossipGraph<T>, weight: &[T], mode: Option<Mode>) -> Self {
        let edges = graph
            .edges()
            .iter()
            .enumerate()
            .map(|(id, e)| ScenarioEdge {
                u: e.u + 1,
                v: e.v + 1,
                pre_local: graph
                    .pre_local(id)
                    .to_rows()
                    .iter()
                    .map(|r| r.iter().map(Scalar::to_json).collect())
                    .collect(),
            })
            .collect();
        Self {
            n: graph.n(),
            m: graph.m(),
            edges,
            weight: weight.iter().map(Scalar::to_json).collect(),
            mode,
            tol: None,
            seed: None,
            reps: None,
            cap: None,
            walks: None,
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode.unwrap_or_default()
    }

    pub fn graph<T: Scalar>(&self) -> Result<GossipGraph<T>> {
        let mut edges = Vec::with_capacity(self.edges.len());
        for (k, e) in self.edges.iter().enumerate() {
            if e.u == 0 || e.v == 0 || e.u > self.n || e.v > self.n {
                return Err(Error::InvalidGraph(format!(
                    "edges[{k}]: endpoints ({},{}) outside 1..{}",
                    e.u, e.v, self.n
                )));
            }
            let mut rows = Vec::with_capacity(e.pre_local.len());
            for (r, row) in e.pre_local.iter().enumerate() {
                let parsed = row
                    .iter()
                    .enumerate()
                    .map(|(c, x)| {
                        T::from_json(x).map_err(|err| {
                            Error::Parse(format!("edges[{k}].pre_local[{r}][{c}]: {err}"))
                        })
                    })
                    .collect::<Result<Vec<T>>>()?;
                rows.push(parsed);
            }
            let label = format!("edge ({},{})", e.u, e.v);
            let matrix = Matrix::from_rows(rows).map_err(|err| Error::Parse(format!("{label}: {err}")))?;
            let pre = StochasticMatrix::new(matrix).map_err(|err| match err {
                Error::NotStochastic(msg) => Error::NotStochastic(format!("{label} {msg}")),
                other => Error::InvalidGraph(format!("{label}: {other}")),
            })?;
            edges.push((e.u - 1, e.v - 1, pre));
        }
        GossipGraph::new(self.n, self.m, edges)
    }

    pub fn weight<T: Scalar>(&self) -> Result<Vec<T>> {
        self.weight
            .iter()
            .enumerate()
            .map(|(i, x)| T::from_json(x).map_err(|err| Error::Parse(format!("weight[{i}]: {err}"))))
            .collect()
    }
}
