//! Gossip graphs: agents on the nodes of a simple undirected graph, each edge
//! carrying a `2m × 2m` pre-local stochastic matrix.

mod scenario;
mod topology;

pub use scenario::{Mode, Scenario, ScenarioEdge};
pub use topology::{Edge, PointedCycle, SimpleGraph, MAX_CYCLES};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::stomat::{IndexSet, Matrix, StochasticMatrix};

/// Ordered list of edge ids of a [`GossipGraph`].
pub type EdgeSequence = Vec<usize>;

/// State indices of agent `a` followed by those of agent `b`.
fn pair_indices(a: usize, b: usize, m: usize) -> Vec<usize> {
    (a * m..(a + 1) * m).chain(b * m..(b + 1) * m).collect()
}

/// Embeds the pair update `pre` for agents `i` and `j` (agent `i`'s block
/// first) into an `nm × nm` matrix that is the identity on all other agents.
pub fn assemble_local<T: Scalar>(
    pre: &StochasticMatrix<T>,
    i: usize,
    j: usize,
    n: usize,
    m: usize,
) -> Result<StochasticMatrix<T>> {
    if i == j {
        return Err(Error::InvalidGraph(format!("self-loop at v{}", i + 1)));
    }
    if i >= n || j >= n {
        return Err(Error::OutOfRange(format!("agent outside 1..{n}")));
    }
    if pre.dim() != 2 * m {
        return Err(Error::DimensionMismatch {
            expected: 2 * m,
            found: pre.dim(),
        });
    }
    let idx = pair_indices(i, j, m);
    let mut a = Matrix::identity(n * m);
    for (r, &gr) in idx.iter().enumerate() {
        for (c, &gc) in idx.iter().enumerate() {
            a.set(gr, gc, pre.get(r, c).clone());
        }
    }
    StochasticMatrix::new(a)
}

/// Matrix-weighted gossip graph.
#[derive(Clone, Debug, PartialEq)]
pub struct GossipGraph<T> {
    m: usize,
    topology: SimpleGraph,
    // Agent `edge.u`'s block first.
    pre_local: Vec<StochasticMatrix<T>>,
    local: Vec<StochasticMatrix<T>>,
}

impl<T: Scalar> GossipGraph<T> {
    /// Builds from `(a, b, pre)` triples where `pre` lists agent `a`'s block
    /// first; nodes are 0-based.
    pub fn new(n: usize, m: usize, edges: Vec<(usize, usize, StochasticMatrix<T>)>) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::InvalidGraph("n and m must be positive".into()));
        }
        let pairs: Vec<_> = edges.iter().map(|(a, b, _)| (*a, *b)).collect();
        let topology = SimpleGraph::new(n, &pairs)?;
        let mut pre_local = Vec::with_capacity(edges.len());
        let mut local = Vec::with_capacity(edges.len());
        for (a, b, pre) in edges {
            let e = Edge::new(a, b);
            if pre.dim() != 2 * m {
                return Err(Error::InvalidGraph(format!(
                    "edge {e}: pre-local matrix is {0}×{0}, expected {1}×{1}",
                    pre.dim(),
                    2 * m
                )));
            }
            local.push(assemble_local(&pre, a, b, n, m)?);
            pre_local.push(if a < b { pre } else { swap_blocks(&pre, m) });
        }
        Ok(Self {
            m,
            topology,
            pre_local,
            local,
        })
    }

    pub fn n(&self) -> usize {
        self.topology.node_count()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// State dimension `nm`.
    pub fn dim(&self) -> usize {
        self.n() * self.m
    }

    pub fn topology(&self) -> &SimpleGraph {
        &self.topology
    }

    pub fn edges(&self) -> &[Edge] {
        self.topology.edges()
    }

    pub fn edge_id(&self, a: usize, b: usize) -> Option<usize> {
        self.topology.edge_id(a, b)
    }

    /// Pre-local matrix of edge `id`, lower-numbered agent's block first.
    pub fn pre_local(&self, id: usize) -> &StochasticMatrix<T> {
        &self.pre_local[id]
    }

    pub fn local(&self, id: usize) -> &StochasticMatrix<T> {
        &self.local[id]
    }

    pub fn cycles(&self) -> Result<Vec<PointedCycle>> {
        self.topology.cycles()
    }

    /// Edge ids of `cycle` in traversal order.
    pub fn cycle_edges(&self, cycle: &PointedCycle) -> Result<EdgeSequence> {
        cycle
            .edges()
            .iter()
            .map(|e| {
                self.edge_id(e.u, e.v)
                    .ok_or_else(|| Error::InvalidGraph(format!("cycle {cycle} uses missing edge {e}")))
            })
            .collect()
    }

    /// State indices of the agents covered by `cycle`, in increasing order.
    pub fn covered_indices(&self, cycle: &PointedCycle) -> IndexSet {
        IndexSet::from_indices(
            cycle
                .covered()
                .into_iter()
                .flat_map(|a| a * self.m..(a + 1) * self.m),
        )
    }

    fn check_edge(&self, id: usize) -> Result<()> {
        if id >= self.edges().len() {
            return Err(Error::OutOfRange(format!("edge id {id}")));
        }
        Ok(())
    }

    /// `rows ← A_e · rows` on a matrix with `nm` rows; only the `2m` rows of
    /// the two agents change.
    pub fn apply_edge(&self, id: usize, target: &mut Matrix<T>) -> Result<()> {
        self.check_edge(id)?;
        if target.rows() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: target.rows(),
            });
        }
        let e = self.edges()[id];
        let idx = pair_indices(e.u, e.v, self.m);
        let pre = &self.pre_local[id];
        let old: Vec<Vec<T>> = idx.iter().map(|&r| target.row(r).to_vec()).collect();
        for (r, &gr) in idx.iter().enumerate() {
            let mut row = vec![T::zero(); target.cols()];
            for (k, source) in old.iter().enumerate() {
                let w = pre.get(r, k);
                if w.is_zero() {
                    continue;
                }
                for (acc, x) in row.iter_mut().zip(source) {
                    *acc = acc.clone() + w.clone() * x.clone();
                }
            }
            target.row_mut(gr).clone_from_slice(&row);
        }
        Ok(())
    }

    /// `x ← A_e x` on a state vector.
    pub fn apply_edge_to_state(&self, id: usize, x: &mut [T]) -> Result<()> {
        self.check_edge(id)?;
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        let e = self.edges()[id];
        let idx = pair_indices(e.u, e.v, self.m);
        let pre = &self.pre_local[id];
        let old: Vec<T> = idx.iter().map(|&r| x[r].clone()).collect();
        for (r, &gr) in idx.iter().enumerate() {
            x[gr] = old
                .iter()
                .enumerate()
                .fold(T::zero(), |acc, (k, v)| acc + pre.get(r, k).clone() * v.clone());
        }
        Ok(())
    }

    /// `P(t:s) = A_{e_t} ⋯ A_{e_{s+1}}`, the identity when `t ≤ s`.
    pub fn transition_matrix(&self, seq: &[usize], s: usize, t: usize) -> Result<StochasticMatrix<T>> {
        if s > seq.len() || t > seq.len() {
            return Err(Error::OutOfRange(format!(
                "s={s}, t={t} for a sequence of length {}",
                seq.len()
            )));
        }
        let mut p = Matrix::identity(self.dim());
        for &id in seq.iter().take(t).skip(s) {
            self.apply_edge(id, &mut p)?;
        }
        Ok(StochasticMatrix::from_trusted(p))
    }

    /// Full product `P(|seq|:0)`.
    pub fn product(&self, seq: &[usize]) -> Result<StochasticMatrix<T>> {
        self.transition_matrix(seq, 0, seq.len())
    }

    /// Transition matrix `P_C` of a pointed cycle.
    pub fn cycle_matrix(&self, cycle: &PointedCycle) -> Result<StochasticMatrix<T>> {
        self.product(&self.cycle_edges(cycle)?)
    }

    /// Concatenation of edge lists of the given cycles, first cycle first.
    pub fn sequence_of_cycles<'a>(
        &self,
        cycles: impl IntoIterator<Item = &'a PointedCycle>,
    ) -> Result<EdgeSequence> {
        let mut seq = Vec::new();
        for c in cycles {
            seq.extend(self.cycle_edges(c)?);
        }
        Ok(seq)
    }

    pub fn to_f64(&self) -> GossipGraph<f64> {
        GossipGraph {
            m: self.m,
            topology: self.topology.clone(),
            pre_local: self.pre_local.iter().map(StochasticMatrix::to_f64).collect(),
            local: self.local.iter().map(StochasticMatrix::to_f64).collect(),
        }
    }

    pub fn validate(&self) -> Validation {
        let cycles = self.cycles();
        Validation {
            connected: self.topology.is_connected(),
            bridges: self
                .topology
                .bridges()
                .into_iter()
                .map(|i| self.edges()[i])
                .collect(),
            cycle_count: cycles.as_ref().map_or(None, |c| Some(c.len())),
        }
    }
}

/// Conjugates a `2m × 2m` matrix by swapping its two agent blocks.
fn swap_blocks<T: Scalar>(pre: &StochasticMatrix<T>, m: usize) -> StochasticMatrix<T> {
    let order: Vec<usize> = (m..2 * m).chain(0..m).collect();
    pre.relabel(&order)
}

/// Reduced (bar) matrix: principal submatrix on the covered agents' indices.
pub fn restrict_matrix<T: Scalar>(a: &Matrix<T>, covered: &IndexSet) -> Matrix<T> {
    a.principal(covered)
}

/// Reduced (bar) vector.
pub fn restrict_vector<T: Clone>(w: &[T], covered: &IndexSet) -> Vec<T> {
    covered.iter().map(|i| w[i].clone()).collect()
}

/// Topology verdicts for the convergence theorem's preconditions.
///
/// Simplicity and per-edge stochasticity are enforced when the graph is
/// built, so they hold for every constructed [`GossipGraph`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Validation {
    pub connected: bool,
    pub bridges: Vec<Edge>,
    /// `None` when enumeration exceeded [`MAX_CYCLES`].
    pub cycle_count: Option<usize>,
}

impl Validation {
    pub fn is_bridgeless(&self) -> bool {
        self.bridges.is_empty()
    }

    pub fn has_cycles(&self) -> bool {
        self.cycle_count != Some(0)
    }

    pub fn preconditions_met(&self) -> bool {
        self.connected && self.is_bridgeless() && self.cycle_count.is_some_and(|c| c > 0)
    }

    pub fn diagnostics(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.connected {
            out.push("not connected".to_string());
        }
        for b in &self.bridges {
            out.push(format!("bridge: {b}"));
        }
        match self.cycle_count {
            Some(0) => out.push("no cycles: holonomy undefined".to_string()),
            None => out.push(format!("more than {MAX_CYCLES} cycles")),
            Some(_) => {}
        }
        out
    }
}
