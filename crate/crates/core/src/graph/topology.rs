//! Undirected simple-graph topology: connectivity, bridges, simple cycles.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard limit on the number of pointed cycles [`SimpleGraph::cycles`] will
/// emit.
pub const MAX_CYCLES: usize = 10_000;

/// Unordered node pair, stored with `u < v` (0-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
}

impl Edge {
    pub fn new(a: usize, b: usize) -> Self {
        Self {
            u: a.min(b),
            v: a.max(b),
        }
    }

    pub fn touches(&self, node: usize) -> bool {
        self.u == node || self.v == node
    }

    pub fn other(&self, node: usize) -> usize {
        if self.u == node {
            self.v
        } else {
            self.u
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(v{},v{})", self.u + 1, self.v + 1)
    }
}

/// Closed walk `v_{i1} v_{i2} … v_{ik} v_{i1}` through `k ≥ 3` distinct nodes;
/// the first node is the basepoint.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PointedCycle {
    nodes: Vec<usize>,
}

impl PointedCycle {
    pub fn new(nodes: Vec<usize>) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(Error::InvalidGraph(format!(
                "cycle needs at least 3 nodes, got {}",
                nodes.len()
            )));
        }
        let distinct: BTreeSet<_> = nodes.iter().collect();
        if distinct.len() != nodes.len() {
            return Err(Error::InvalidGraph("cycle repeats a node".into()));
        }
        Ok(Self { nodes })
    }

    /// Parses 1-based labels.
    pub fn from_one_based(labels: &[usize]) -> Result<Self> {
        if labels.contains(&0) {
            return Err(Error::InvalidGraph("node labels start at 1".into()));
        }
        Self::new(labels.iter().map(|l| l - 1).collect())
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn basepoint(&self) -> usize {
        self.nodes[0]
    }

    /// Edges in traversal order, the closing edge last.
    pub fn edges(&self) -> Vec<Edge> {
        let k = self.nodes.len();
        (0..k)
            .map(|i| Edge::new(self.nodes[i], self.nodes[(i + 1) % k]))
            .collect()
    }

    /// Same cycle with basepoint `nodes[p]`.
    pub fn rotated(&self, p: usize) -> Self {
        let mut nodes = self.nodes.clone();
        nodes.rotate_left(p % self.nodes.len());
        Self { nodes }
    }

    /// All `k` pointed versions of this cycle, starting with itself.
    pub fn rotations(&self) -> Vec<Self> {
        (0..self.len()).map(|p| self.rotated(p)).collect()
    }

    /// Opposite orientation, same basepoint.
    pub fn reversed(&self) -> Self {
        let mut nodes = self.nodes.clone();
        nodes[1..].reverse();
        Self { nodes }
    }

    /// Covered agents in increasing order.
    pub fn covered(&self) -> Vec<usize> {
        let mut out = self.nodes.clone();
        out.sort_unstable();
        out
    }

    /// Key shared by all rotations and both orientations.
    pub fn undirected_key(&self) -> Vec<usize> {
        let k = self.len();
        let start = (0..k).min_by_key(|&i| self.nodes[i]).unwrap();
        let a = self.rotated(start);
        let b = a.reversed();
        a.nodes.min(b.nodes)
    }

    pub fn contains(&self, node: usize) -> bool {
        self.nodes.contains(&node)
    }
}

impl fmt::Display for PointedCycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in self.nodes.iter().chain(self.nodes.first()) {
            write!(f, "v{}", v + 1)?;
        }
        Ok(())
    }
}

/// Undirected simple graph on nodes `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleGraph {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
}

impl SimpleGraph {
    /// Rejects self-loops, duplicate edges and out-of-range endpoints.
    pub fn new(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        let mut seen = BTreeSet::new();
        let mut edges = Vec::with_capacity(pairs.len());
        for &(a, b) in pairs {
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({},{}) outside nodes 1..{n}",
                    a + 1,
                    b + 1
                )));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at v{}", a + 1)));
            }
            let e = Edge::new(a, b);
            if !seen.insert(e) {
                return Err(Error::InvalidGraph(format!("duplicate edge {e}")));
            }
            adj[a].push(b);
            adj[b].push(a);
            edges.push(e);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Self { n, edges, adj })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn edge_id(&self, a: usize, b: usize) -> Option<usize> {
        let e = Edge::new(a, b);
        self.edges.iter().position(|&x| x == e)
    }

    /// Component label per node, labels in order of first appearance.
    pub fn components(&self) -> Vec<usize> {
        self.components_without(None)
    }

    fn components_without(&self, skip: Option<Edge>) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.n];
        let mut next = 0;
        for s in 0..self.n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = next;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for &u in &self.adj[v] {
                    if Some(Edge::new(u, v)) == skip || label[u] != usize::MAX {
                        continue;
                    }
                    label[u] = next;
                    stack.push(u);
                }
            }
            next += 1;
        }
        label
    }

    pub fn is_connected(&self) -> bool {
        self.components().iter().all(|&c| c == 0)
    }

    /// Bridges by Tarjan's low-link method, as edge ids in increasing order.
    pub fn bridges(&self) -> Vec<usize> {
        struct State {
            disc: Vec<usize>,
            low: Vec<usize>,
            time: usize,
            found: Vec<Edge>,
        }
        fn dfs(g: &SimpleGraph, v: usize, parent: Option<usize>, st: &mut State) {
            st.time += 1;
            st.disc[v] = st.time;
            st.low[v] = st.time;
            for &u in &g.adj[v] {
                if Some(u) == parent {
                    continue;
                }
                if st.disc[u] == 0 {
                    dfs(g, u, Some(v), st);
                    st.low[v] = st.low[v].min(st.low[u]);
                    if st.low[u] > st.disc[v] {
                        st.found.push(Edge::new(u, v));
                    }
                } else {
                    st.low[v] = st.low[v].min(st.disc[u]);
                }
            }
        }
        let mut st = State {
            disc: vec![0; self.n],
            low: vec![0; self.n],
            time: 0,
            found: Vec::new(),
        };
        for v in 0..self.n {
            if st.disc[v] == 0 {
                dfs(self, v, None, &mut st);
            }
        }
        self.ids_of(&st.found)
    }

    /// Bridges straight from the definition: removing the edge strictly
    /// shrinks the set of connected node pairs.
    pub fn bridges_by_connectivity(&self) -> Vec<usize> {
        let pairs = |labels: &[usize]| {
            let mut sizes = vec![0usize; self.n];
            for &l in labels {
                sizes[l] += 1;
            }
            sizes.iter().map(|s| s * s.saturating_sub(1) / 2).sum::<usize>()
        };
        let full = pairs(&self.components());
        (0..self.edges.len())
            .filter(|&i| pairs(&self.components_without(Some(self.edges[i]))) < full)
            .collect()
    }

    /// Bridges by the cycle criterion: an edge of a connected component is a
    /// bridge iff no cycle contains both of its endpoints.
    pub fn bridges_by_cycles(&self) -> Result<Vec<usize>> {
        let cycles = self.cycles()?;
        Ok((0..self.edges.len())
            .filter(|&i| {
                let e = self.edges[i];
                !cycles.iter().any(|c| c.contains(e.u) && c.contains(e.v))
            })
            .collect())
    }

    fn ids_of(&self, found: &[Edge]) -> Vec<usize> {
        let mut ids: Vec<usize> = found
            .iter()
            .map(|e| self.edge_id(e.u, e.v).expect("bridge is an edge"))
            .collect();
        ids.sort_unstable();
        ids
    }

    /// Every simple cycle of length ≥ 3, once per orientation, pointed at its
    /// smallest node and sorted lexicographically.
    pub fn cycles(&self) -> Result<Vec<PointedCycle>> {
        fn extend(
            g: &SimpleGraph,
            start: usize,
            path: &mut Vec<usize>,
            on_path: &mut [bool],
            out: &mut Vec<PointedCycle>,
        ) -> Result<()> {
            let last = *path.last().unwrap();
            for &u in &g.adj[last] {
                if u == start && path.len() >= 3 {
                    if out.len() == MAX_CYCLES {
                        return Err(Error::TooManyCycles(MAX_CYCLES));
                    }
                    out.push(PointedCycle {
                        nodes: path.clone(),
                    });
                } else if u > start && !on_path[u] {
                    on_path[u] = true;
                    path.push(u);
                    extend(g, start, path, on_path, out)?;
                    path.pop();
                    on_path[u] = false;
                }
            }
            Ok(())
        }
        let mut out = Vec::new();
        let mut on_path = vec![false; self.n];
        for start in 0..self.n {
            let mut path = vec![start];
            on_path[start] = true;
            extend(self, start, &mut path, &mut on_path, &mut out)?;
            on_path[start] = false;
        }
        out.sort();
        Ok(out)
    }
}
