use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_traits::{One, Zero};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::{GossipGraph, PointedCycle};
use crate::holonomy::WeightVector;
use crate::scalar::{ratio, Rational, Scalar};
use crate::stomat::{IndexSet, Matrix, Partition, StochasticMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FixtureKind {
    /// Triangle of swaps and one identity edge.
    F1,
    /// Four-node diamond: swaps on one component, averaging on another.
    F2,
    /// Seven-node butterfly with three components.
    F3,
}

impl FixtureKind {
    /// Node count and minimal component count.
    pub fn shape(self) -> (usize, usize) {
        match self {
            Self::F1 => (3, 1),
            Self::F2 => (4, 2),
            Self::F3 => (7, 3),
        }
    }

    fn edges(self) -> &'static [(usize, usize)] {
        match self {
            Self::F1 => &[(1, 2), (2, 3), (3, 1)],
            Self::F2 => &[(1, 2), (2, 3), (1, 3), (3, 4), (1, 4)],
            Self::F3 => &[(1, 2), (2, 3), (3, 1), (1, 4), (4, 5), (1, 5), (5, 6), (6, 7), (7, 5)],
        }
    }

    /// Per component: swap edges, then averaging edges.
    fn roles(self) -> &'static [(&'static [(usize, usize)], &'static [(usize, usize)])] {
        match self {
            Self::F1 => &[(&[(1, 2), (2, 3)], &[])],
            Self::F2 => &[(&[(1, 2), (2, 3)], &[]), (&[], &[(1, 3), (3, 4), (1, 4)])],
            Self::F3 => &[
                (&[(1, 2), (2, 3), (5, 6)], &[]),
                (&[], &[(1, 2), (1, 3), (1, 4), (4, 5)]),
                (&[], &[(4, 5), (5, 6), (6, 7)]),
            ],
        }
    }

    /// Order of the permutation group generated on block 0.
    fn group_order(self) -> usize {
        match self {
            Self::F1 | Self::F2 => 3,
            Self::F3 => 6,
        }
    }
}

impl FromStr for FixtureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "f1" => Ok(Self::F1),
            "f2" => Ok(Self::F2),
            "f3" => Ok(Self::F3),
            other => Err(Error::InfeasibleFixture(format!("unknown kind {other:?}"))),
        }
    }
}

impl fmt::Display for FixtureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::F1 => "F1",
            Self::F2 => "F2",
            Self::F3 => "F3",
        };
        f.write_str(s)
    }
}

/// Action of an edge on one component of the two agents it joins.
#[derive(Clone, Debug, PartialEq)]
pub enum Role {
    Identity,
    Swap,
    /// `(1 − s) I + s 𝟙 qᵀ` where `q` is the pair's weight, normalized.
    Average(Rational),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeclaredCycle {
    pub cycle: PointedCycle,
    pub order: u64,
    pub partition: Partition,
    /// Smallest entry over this cycle's averaging blocks.
    pub epsilon: Option<Rational>,
}

/// Values known by construction, without going through the analysis code.
#[derive(Clone, Debug, PartialEq)]
pub struct GroundTruth {
    pub cycles: Vec<DeclaredCycle>,
    pub global: Partition,
    pub epsilon: Option<Rational>,
    pub group_order: usize,
    pub predicted: Vec<Vec<Rational>>,
}

impl GroundTruth {
    pub fn cycle(&self, cycle: &PointedCycle) -> Option<&DeclaredCycle> {
        self.cycles.iter().find(|c| &c.cycle == cycle)
    }

    pub fn to_json(&self) -> Value {
        let part = |p: &Partition| json!({ "block0": p.block0(), "blocks": p.blocks() });
        let eps = |e: &Option<Rational>| e.as_ref().map_or(json!("no contraction blocks"), Scalar::to_json);
        json!({
            "cycles": self.cycles.iter().map(|c| json!({
                "cycle": c.cycle.to_string(),
                "order": c.order,
                "partition": part(&c.partition),
                "epsilon": eps(&c.epsilon),
            })).collect::<Vec<_>>(),
            "global_partition": part(&self.global),
            "epsilon": eps(&self.epsilon),
            "group_order": self.group_order,
            "predicted_blocks": self
                .predicted
                .iter()
                .map(|p| Value::Array(p.iter().map(Scalar::to_json).collect()))
                .collect::<Vec<_>>(),
        })
    }
}

#[derive(Clone, Debug)]
pub struct Fixture {
    pub kind: FixtureKind,
    pub seed: u64,
    pub graph: GossipGraph<Rational>,
    pub weight: WeightVector,
    /// `roles[e][c]`: action of edge `e` on component `c`.
    pub roles: Vec<Vec<Role>>,
    pub truth: GroundTruth,
}

fn role_matrix(role: &Role, wa: &Rational, wb: &Rational) -> [[Rational; 2]; 2] {
    let (z, o) = (Rational::zero(), Rational::one());
    match role {
        Role::Identity => [[o.clone(), z.clone()], [z, o]],
        Role::Swap => [[z.clone(), o.clone()], [o, z]],
        Role::Average(s) => {
            let sum = wa + wb;
            let (qa, qb) = (wa / &sum, wb / &sum);
            let keep = Rational::one() - s;
            [
                [&keep + s * &qa, s * &qb],
                [s * &qa, &keep + s * &qb],
            ]
        }
    }
}

/// Pointed cycle edges as agent pairs, in traversal order.
fn cycle_pairs(cycle: &PointedCycle) -> Vec<(usize, usize)> {
    let nodes = cycle.nodes();
    (0..nodes.len()).map(|i| (nodes[i], nodes[(i + 1) % nodes.len()])).collect()
}

fn find_role<'a>(pairs: &[(usize, usize)], roles: &'a [Vec<Role>], a: usize, b: usize) -> &'a [Role] {
    let id = pairs
        .iter()
        .position(|&(x, y)| (x, y) == (a, b) || (x, y) == (b, a))
        .expect("cycle edges are graph edges");
    &roles[id]
}

/// Connected components, of size at least two, of `links` on `n` agents.
fn agent_components(n: usize, links: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut label: Vec<usize> = (0..n).collect();
    let mut changed = true;
    while changed {
        changed = false;
        for &(a, b) in links {
            let l = label[a].min(label[b]);
            if label[a] != l || label[b] != l {
                label[a] = l;
                label[b] = l;
                changed = true;
            }
        }
    }
    (0..n)
        .map(|root| (0..n).filter(|&i| label[i] == root).collect::<Vec<_>>())
        .filter(|c| c.len() > 1)
        .collect()
}

struct Declared {
    order: u64,
    block0: Vec<usize>,
    blocks: Vec<Vec<usize>>,
    epsilon: Option<Rational>,
}

/// Per-component analysis of one pointed cycle: components driven only by
/// swaps contribute a permutation of agents, components driven only by
/// averages contribute the connected pieces of their averaging edges.
fn declare_cycle(
    n: usize,
    m: usize,
    pairs: &[(usize, usize)],
    roles: &[Vec<Role>],
    w: &[Rational],
    cycle: &PointedCycle,
) -> Result<Declared> {
    let steps = cycle_pairs(cycle);
    let mut declared = Declared {
        order: 1,
        block0: Vec::new(),
        blocks: Vec::new(),
        epsilon: None,
    };
    for c in 0..m {
        let acts: Vec<(usize, usize, &Role)> = steps
            .iter()
            .map(|&(a, b)| (a, b, &find_role(pairs, roles, a, b)[c]))
            .collect();
        let swaps = acts.iter().any(|(_, _, r)| matches!(r, Role::Swap));
        let averages: Vec<(usize, usize)> = acts
            .iter()
            .filter(|(_, _, r)| matches!(r, Role::Average(_)))
            .map(|&(a, b, _)| (a, b))
            .collect();
        if swaps && !averages.is_empty() {
            return Err(Error::InfeasibleFixture(format!(
                "component {} of {cycle} mixes swaps and averages",
                c + 1
            )));
        }
        let idx = |agent: usize| agent * m + c;
        if swaps {
            // x ↦ A_k ⋯ A_1 x reads x at σ(i) = τ_1(τ_2(⋯τ_k(i))).
            let sigma: Vec<usize> = (0..n)
                .map(|i| {
                    acts.iter().rev().fold(i, |j, &(a, b, r)| match r {
                        Role::Swap if j == a => b,
                        Role::Swap if j == b => a,
                        _ => j,
                    })
                })
                .collect();
            let mut seen = vec![false; n];
            for start in 0..n {
                let mut len = 0u64;
                let mut j = start;
                while !seen[j] {
                    seen[j] = true;
                    j = sigma[j];
                    len += 1;
                }
                if len > 0 {
                    declared.order = declared.order.lcm(&len);
                }
            }
            declared.block0.extend((0..n).map(idx));
            continue;
        }
        let pieces = agent_components(n, &averages);
        let product = component_product(n, &acts, w, m, c);
        for piece in &pieces {
            for &a in piece {
                for &b in piece {
                    let x = product[a][b].clone();
                    if !x.is_zero() && declared.epsilon.as_ref().is_none_or(|e| x < *e) {
                        declared.epsilon = Some(x);
                    }
                }
            }
            declared.blocks.push(piece.iter().map(|&a| idx(a)).collect());
        }
        declared
            .block0
            .extend((0..n).filter(|a| !pieces.iter().any(|p| p.contains(a))).map(idx));
    }
    Ok(declared)
}

/// `A_k ⋯ A_1` on one component, as an `n × n` matrix over agents.
fn component_product(
    n: usize,
    acts: &[(usize, usize, &Role)],
    w: &[Rational],
    m: usize,
    c: usize,
) -> Vec<Vec<Rational>> {
    let mut p: Vec<Vec<Rational>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
        .collect();
    for &(a, b, role) in acts {
        let r = role_matrix(role, &w[a * m + c], &w[b * m + c]);
        let (row_a, row_b) = (p[a].clone(), p[b].clone());
        for j in 0..n {
            p[a][j] = &r[0][0] * &row_a[j] + &r[0][1] * &row_b[j];
            p[b][j] = &r[1][0] * &row_a[j] + &r[1][1] * &row_b[j];
        }
    }
    p
}

/// Position of the 1-based pair `{a, b}` in `pairs`.
fn edge_of(pairs: &[(usize, usize)], a: usize, b: usize) -> usize {
    let (a, b) = (a - 1, b - 1);
    pairs
        .iter()
        .position(|&p| p == (a, b) || p == (b, a))
        .expect("declared edge")
}

fn partition(dim: usize, block0: Vec<usize>, blocks: Vec<Vec<usize>>) -> Result<Partition> {
    Partition::new(
        dim,
        IndexSet::from_indices(block0),
        blocks.into_iter().map(IndexSet::from_indices).collect(),
    )
}

/// Builds fixture `kind` with `n` agents and `m` components, drawing a
/// generic weight vector and averaging strengths from `seed`. Components
/// beyond the kind's minimum act as the identity.
pub fn gen_fixture(kind: FixtureKind, seed: u64, n: usize, m: usize) -> Result<Fixture> {
    let (kn, km) = kind.shape();
    if n != kn || m < km {
        return Err(Error::InfeasibleFixture(format!(
            "{kind} needs n = {kn} and m ≥ {km}, got n = {n}, m = {m}"
        )));
    }
    let dim = n * m;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<i64> = sample(&mut rng, 1000, dim).into_iter().map(|x| x as i64 + 1).collect();
    let total: i64 = draws.iter().sum();
    let w: Vec<Rational> = draws.iter().map(|&x| ratio(x, total)).collect();
    let strengths = [ratio(1, 4), ratio(1, 3), ratio(1, 2), ratio(2, 3), ratio(3, 4)];

    let pairs: Vec<(usize, usize)> = kind.edges().iter().map(|&(a, b)| (a - 1, b - 1)).collect();
    let mut roles = vec![vec![Role::Identity; m]; pairs.len()];
    for (c, (swaps, averages)) in kind.roles().iter().enumerate() {
        for &(a, b) in *swaps {
            roles[edge_of(&pairs, a, b)][c] = Role::Swap;
        }
        for &(a, b) in *averages {
            roles[edge_of(&pairs, a, b)][c] = Role::Average(strengths[rng.gen_range(0..strengths.len())].clone());
        }
    }

    let mut edges = Vec::with_capacity(pairs.len());
    for (e, &(a, b)) in pairs.iter().enumerate() {
        let mut pre = Matrix::identity(2 * m);
        for (c, role) in roles[e].iter().enumerate() {
            let r = role_matrix(role, &w[a * m + c], &w[b * m + c]);
            let at = [c, m + c];
            for (i, &gi) in at.iter().enumerate() {
                for (j, &gj) in at.iter().enumerate() {
                    pre.set(gi, gj, r[i][j].clone());
                }
            }
        }
        edges.push((a, b, StochasticMatrix::new(pre)?));
    }
    let graph = GossipGraph::new(n, m, edges)?;
    let weight = WeightVector::new(w.clone())?;

    let mut cycles = Vec::new();
    for cycle in graph.topology().cycles()? {
        let d = declare_cycle(n, m, &pairs, &roles, &w, &cycle)?;
        cycles.push(DeclaredCycle {
            cycle,
            order: d.order,
            partition: partition(dim, d.block0, d.blocks)?,
            epsilon: d.epsilon,
        });
    }
    let epsilon = cycles
        .iter()
        .filter_map(|c| c.epsilon.clone())
        .reduce(|a, b| if b < a { b } else { a });

    let mut global_block0 = Vec::new();
    let mut global_blocks = Vec::new();
    for c in 0..m {
        let averages: Vec<(usize, usize)> = pairs
            .iter()
            .zip(&roles)
            .filter(|(_, r)| matches!(r[c], Role::Average(_)))
            .map(|(&p, _)| p)
            .collect();
        let pieces = agent_components(n, &averages);
        global_block0.extend((0..n).filter(|a| !pieces.iter().any(|p| p.contains(a))).map(|a| a * m + c));
        global_blocks.extend(pieces.into_iter().map(|p| p.into_iter().map(|a| a * m + c).collect::<Vec<_>>()));
    }
    let global = partition(dim, global_block0, global_blocks)?;
    let predicted = global
        .blocks()
        .iter()
        .map(|b| {
            let alpha = b.iter().fold(Rational::zero(), |acc, i| acc + &w[i]);
            b.iter().map(|i| &w[i] / &alpha).collect()
        })
        .collect();

    Ok(Fixture {
        kind,
        seed,
        graph,
        weight,
        roles,
        truth: GroundTruth {
            cycles,
            global,
            epsilon,
            group_order: kind.group_order(),
            predicted,
        },
    })
}
