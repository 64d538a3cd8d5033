//! The derived graph `D_G(w)`: orbit points of `w` as nodes, one edge per
//! step of each cycle's orbit, and the walks in it that define allowable
//! gossip schedules.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::{EdgeSequence, GossipGraph};
use crate::holonomy::{CycleAnalysis, HolonomyReport, WeightVector};
use crate::scalar::{Rational, Scalar};
use crate::stomat::StochasticMatrix;

/// Edge `source → target` with `source · P_C = target`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DerivedEdge {
    pub source: usize,
    pub target: usize,
    /// Index into [`DerivedGraph::cycles`].
    pub cycle: usize,
    /// Orbit position of `source`.
    pub position: u64,
}

/// Walk in a derived graph, as a list of derived edge ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DerivedWalk {
    pub edges: Vec<usize>,
}

impl DerivedWalk {
    pub fn new(edges: Vec<usize>) -> Self {
        Self { edges }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Self) -> Self {
        Self::new(self.edges.iter().chain(&other.edges).copied().collect())
    }

    pub fn repeated(&self, times: usize) -> Self {
        Self::new(self.edges.repeat(times))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DerivedGraph<T = Rational> {
    nodes: Vec<Vec<T>>,
    edges: Vec<DerivedEdge>,
    cycles: Vec<CycleAnalysis<T>>,
    // First edge id of each cycle's orbit loop.
    loop_start: Vec<usize>,
}

impl<T: Scalar> DerivedGraph<T> {
    /// Builds `D_G(w)` from the holonomy report of `w`. Node 0 is `w`.
    pub fn build(w: &WeightVector<T>, report: &HolonomyReport<T>) -> Result<Self> {
        if !T::EXACT {
            return Err(Error::RequiresExact);
        }
        report.require_holonomic()?;
        let mut graph = Self {
            nodes: vec![w.entries().to_vec()],
            edges: Vec::new(),
            cycles: report.cycles.clone(),
            loop_start: Vec::new(),
        };
        for (c, analysis) in report.cycles.iter().enumerate() {
            graph.loop_start.push(graph.edges.len());
            let ids: Vec<usize> = analysis.orbit.iter().map(|v| graph.node_id(v)).collect();
            let k = ids.len();
            for a in 0..k {
                graph.edges.push(DerivedEdge {
                    source: ids[a],
                    target: ids[(a + 1) % k],
                    cycle: c,
                    position: a as u64,
                });
            }
        }
        Ok(graph)
    }

    fn node_id(&mut self, v: &[T]) -> usize {
        match self.nodes.iter().position(|x| x == v) {
            Some(i) => i,
            None => {
                self.nodes.push(v.to_vec());
                self.nodes.len() - 1
            }
        }
    }

    pub fn nodes(&self) -> &[Vec<T>] {
        &self.nodes
    }

    pub fn edges(&self) -> &[DerivedEdge] {
        &self.edges
    }

    pub fn cycles(&self) -> &[CycleAnalysis<T>] {
        &self.cycles
    }

    pub fn basepoint(&self) -> usize {
        0
    }

    /// Weight `P_C` of a derived edge.
    pub fn weight(&self, edge: usize) -> &StochasticMatrix<T> {
        &self.cycles[self.edges[edge].cycle].matrix
    }

    /// Edge ids of the full orbit loop of cycle `c`, starting at `w`.
    pub fn orbit_loop(&self, c: usize) -> DerivedWalk {
        let k = self.cycles[c].order_w as usize;
        DerivedWalk::new((self.loop_start[c]..self.loop_start[c] + k).collect())
    }

    /// Consecutive edges chain head to tail and all ids exist.
    pub fn is_valid(&self, walk: &DerivedWalk) -> bool {
        walk.edges.iter().all(|&e| e < self.edges.len())
            && walk
                .edges
                .windows(2)
                .all(|p| self.edges[p[0]].target == self.edges[p[1]].source)
    }

    pub fn start(&self, walk: &DerivedWalk) -> Option<usize> {
        walk.edges.first().map(|&e| self.edges[e].source)
    }

    pub fn end(&self, walk: &DerivedWalk) -> Option<usize> {
        walk.edges.last().map(|&e| self.edges[e].target)
    }

    pub fn is_closed(&self, walk: &DerivedWalk) -> bool {
        self.is_valid(walk) && !walk.is_empty() && self.start(walk) == self.end(walk)
    }

    /// Closed, and uses every edge at least once.
    pub fn is_exhaustive_closed(&self, walk: &DerivedWalk) -> bool {
        if !self.is_closed(walk) {
            return false;
        }
        let mut used = vec![false; self.edges.len()];
        for &e in &walk.edges {
            used[e] = true;
        }
        used.into_iter().all(|u| u)
    }

    /// Gossip edge sequence of a walk: cycle edge lists in reverse walk
    /// order, so `P_ψ(walk)` is the walk's edge weights multiplied in walk
    /// order.
    pub fn psi(&self, walk: &DerivedWalk) -> EdgeSequence {
        walk.edges
            .iter()
            .rev()
            .flat_map(|&e| self.cycles[self.edges[e].cycle].edges.iter().copied())
            .collect()
    }

    /// Every cycle's orbit loop once, in cycle order, all based at `w`.
    pub fn exhaustive_closed_walk(&self) -> DerivedWalk {
        DerivedWalk::new(
            (0..self.cycles.len())
                .flat_map(|c| self.orbit_loop(c).edges)
                .collect(),
        )
    }

    /// Exhaustive closed walk with the cycle order shuffled and each orbit
    /// loop taken one to three times.
    pub fn seeded_exhaustive_walk(&self, seed: u64) -> DerivedWalk {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut order: Vec<usize> = (0..self.cycles.len()).collect();
        order.shuffle(&mut rng);
        let mut edges = Vec::new();
        for c in order {
            let times = rng.gen_range(1..=3);
            for _ in 0..times {
                edges.extend(self.orbit_loop(c).edges);
            }
        }
        DerivedWalk::new(edges)
    }

    /// `ψ(walk)` repeated `r` times.
    pub fn periodic_schedule(&self, walk: &DerivedWalk, r: usize) -> EdgeSequence {
        self.psi(walk).repeat(r)
    }

    /// `v · (product of edge weights in walk order)`.
    pub fn transport(&self, v: &[T], walk: &DerivedWalk) -> Result<Vec<T>> {
        let mut x = v.to_vec();
        for &e in &walk.edges {
            x = self.weight(e).left_mul(&x)?;
        }
        Ok(x)
    }

    pub fn to_json(&self) -> Value {
        let nodes: Vec<Value> = self
            .nodes
            .iter()
            .map(|v| Value::Array(v.iter().map(Scalar::to_json).collect()))
            .collect();
        let edges: Vec<Value> = self
            .edges
            .iter()
            .enumerate()
            .map(|(id, e)| {
                json!({
                    "id": id,
                    "source": e.source,
                    "target": e.target,
                    "cycle": self.cycles[e.cycle].cycle.to_string(),
                    "position": e.position,
                })
            })
            .collect();
        json!({ "basepoint": self.basepoint(), "nodes": nodes, "edges": edges })
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph derived {\n");
        for (i, v) in self.nodes.iter().enumerate() {
            let coords: Vec<String> = v.iter().map(ToString::to_string).collect();
            let shape = if i == self.basepoint() { "doublecircle" } else { "circle" };
            writeln!(out, "  n{i} [shape={shape}, label=\"({})\"];", coords.join(", ")).unwrap();
        }
        for (id, e) in self.edges.iter().enumerate() {
            writeln!(
                out,
                "  n{} -> n{} [label=\"e{id}: {}\"];",
                e.source, e.target, self.cycles[e.cycle].cycle
            )
            .unwrap();
        }
        out.push_str("}\n");
        out
    }
}

/// Edge ids in `seq` connect every node of the graph.
pub fn is_spanning<T: Scalar>(graph: &GossipGraph<T>, seq: &[usize]) -> bool {
    let n = graph.n();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut components = n;
    for &id in seq {
        let Some(e) = graph.edges().get(id) else {
            return false;
        };
        let (a, b) = (find(&mut parent, e.u), find(&mut parent, e.v));
        if a != b {
            parent[a] = b;
            components -= 1;
        }
    }
    components == 1
}

/// Every edge of the graph occurs in `seq`.
pub fn covers_all_edges<T: Scalar>(graph: &GossipGraph<T>, seq: &[usize]) -> bool {
    let mut seen = vec![false; graph.edges().len()];
    for &id in seq {
        if let Some(s) = seen.get_mut(id) {
            *s = true;
        }
    }
    seen.into_iter().all(|s| s)
}
