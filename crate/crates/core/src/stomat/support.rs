//! Support structure of nonnegative matrices: the graph of a matrix, its
//! strongly connected classes, periods and cyclic (Frobenius) classes.

use std::collections::VecDeque;

use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::stomat::index::IndexSet;
use crate::stomat::matrix::Matrix;

/// The graph of a matrix: arc `i → j` iff `a_{ji} != 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportDigraph {
    dim: usize,
    adj: Vec<Vec<bool>>,
}

impl SupportDigraph {
    pub fn of<T: Scalar>(a: &Matrix<T>) -> Self {
        let dim = a.dim();
        let adj = (0..dim)
            .map(|i| (0..dim).map(|j| !a.get(j, i).is_zero()).collect())
            .collect();
        Self { dim, adj }
    }

    pub fn from_arcs(dim: usize, arcs: &[(usize, usize)]) -> Self {
        let mut adj = vec![vec![false; dim]; dim];
        for &(i, j) in arcs {
            adj[i][j] = true;
        }
        Self { dim, adj }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn has_arc(&self, from: usize, to: usize) -> bool {
        self.adj[from][to]
    }

    pub fn arcs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.dim {
            for j in 0..self.dim {
                if self.adj[i][j] {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn has_self_arcs_everywhere(&self) -> bool {
        (0..self.dim).all(|i| self.adj[i][i])
    }

    /// `self ∘ first`: arc `i → j` whenever `i → k` in `first` and `k → j` in
    /// `self`. Equals the graph of `B·A` when `self` is the graph of `B` and
    /// `first` the graph of `A`.
    pub fn compose_after(&self, first: &SupportDigraph) -> Result<SupportDigraph> {
        if self.dim != first.dim {
            return Err(Error::DimensionMismatch {
                expected: first.dim,
                found: self.dim,
            });
        }
        let dim = self.dim;
        let mut adj = vec![vec![false; dim]; dim];
        for i in 0..dim {
            for k in 0..dim {
                if first.adj[i][k] {
                    for j in 0..dim {
                        if self.adj[k][j] {
                            adj[i][j] = true;
                        }
                    }
                }
            }
        }
        Ok(SupportDigraph { dim, adj })
    }
}

/// Composition `G_B ∘ G_A` of the graphs of `A` and `B`.
pub fn compose_support_graphs(ga: &SupportDigraph, gb: &SupportDigraph) -> Result<SupportDigraph> {
    gb.compose_after(ga)
}

/// Out-neighbours under the chain relation `i → j` iff `a_ij != 0`.
fn successors<T: Scalar>(a: &Matrix<T>) -> Vec<Vec<usize>> {
    (0..a.dim())
        .map(|i| {
            a.row(i)
                .iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(j, _)| j)
                .collect()
        })
        .collect()
}

struct Tarjan<'a> {
    succ: &'a [Vec<usize>],
    index: Vec<Option<usize>>,
    low: Vec<usize>,
    on_stack: Vec<bool>,
    stack: Vec<usize>,
    next: usize,
    components: Vec<Vec<usize>>,
}

impl Tarjan<'_> {
    fn visit(&mut self, v: usize) {
        self.index[v] = Some(self.next);
        self.low[v] = self.next;
        self.next += 1;
        self.stack.push(v);
        self.on_stack[v] = true;
        for k in 0..self.succ[v].len() {
            let w = self.succ[v][k];
            match self.index[w] {
                None => {
                    self.visit(w);
                    self.low[v] = self.low[v].min(self.low[w]);
                }
                Some(iw) if self.on_stack[w] => self.low[v] = self.low[v].min(iw),
                _ => {}
            }
        }
        if Some(self.low[v]) == self.index[v] {
            let mut comp = Vec::new();
            while let Some(w) = self.stack.pop() {
                self.on_stack[w] = false;
                comp.push(w);
                if w == v {
                    break;
                }
            }
            comp.sort_unstable();
            self.components.push(comp);
        }
    }
}

/// Strongly connected components in reverse topological order (sinks first).
fn strongly_connected(succ: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = succ.len();
    let mut t = Tarjan {
        succ,
        index: vec![None; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        next: 0,
        components: Vec::new(),
    };
    for v in 0..n {
        if t.index[v].is_none() {
            t.visit(v);
        }
    }
    t.components
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassKind {
    /// Has a transition leaving the class.
    Transient,
    /// Closed class.
    Ergodic,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StateClass {
    pub members: IndexSet,
    pub kind: ClassKind,
}

/// Canonical form for reducible matrices: transient classes first (in an order
/// where transitions only move forward), then the closed ergodic classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CanonicalForm {
    pub classes: Vec<StateClass>,
    /// `relabeling[k]` is the original index placed at position `k`.
    pub relabeling: Vec<usize>,
}

impl CanonicalForm {
    pub fn transient(&self) -> impl Iterator<Item = &StateClass> {
        self.classes.iter().filter(|c| c.kind == ClassKind::Transient)
    }

    pub fn ergodic(&self) -> impl Iterator<Item = &StateClass> {
        self.classes.iter().filter(|c| c.kind == ClassKind::Ergodic)
    }

    pub fn has_transient(&self) -> bool {
        self.transient().next().is_some()
    }
}

pub fn canonical_form<T: Scalar>(a: &Matrix<T>) -> CanonicalForm {
    let succ = successors(a);
    let comps = strongly_connected(&succ);
    let mut class_of = vec![0; a.dim()];
    for (c, members) in comps.iter().enumerate() {
        for &v in members {
            class_of[v] = c;
        }
    }
    let leaves = |c: usize| {
        comps[c]
            .iter()
            .any(|&v| succ[v].iter().any(|&w| class_of[w] != c))
    };
    let mut transient = Vec::new();
    let mut ergodic = Vec::new();
    // Tarjan emits sinks first; reversing gives a topological order.
    for c in (0..comps.len()).rev() {
        let class = StateClass {
            members: IndexSet::from_indices(comps[c].iter().copied()),
            kind: if leaves(c) {
                ClassKind::Transient
            } else {
                ClassKind::Ergodic
            },
        };
        match class.kind {
            ClassKind::Transient => transient.push(class),
            ClassKind::Ergodic => ergodic.push(class),
        }
    }
    ergodic.sort_by_key(|c| IndexSet::min(&c.members));
    let classes: Vec<StateClass> = transient.into_iter().chain(ergodic).collect();
    let relabeling = classes.iter().flat_map(|c| c.members.iter()).collect();
    CanonicalForm {
        classes,
        relabeling,
    }
}

pub fn is_irreducible<T: Scalar>(a: &Matrix<T>) -> bool {
    a.dim() > 0 && strongly_connected(&successors(a)).len() == 1
}

/// BFS levels from state 0 and the gcd of level defects over all arcs.
fn levels_and_period(succ: &[Vec<usize>]) -> (Vec<usize>, usize) {
    let n = succ.len();
    let mut level = vec![usize::MAX; n];
    level[0] = 0;
    let mut queue = VecDeque::from([0]);
    while let Some(u) = queue.pop_front() {
        for &v in &succ[u] {
            if level[v] == usize::MAX {
                level[v] = level[u] + 1;
                queue.push_back(v);
            }
        }
    }
    let mut g = 0usize;
    for u in 0..n {
        for &v in &succ[u] {
            let defect = (level[u] + 1).abs_diff(level[v]);
            g = g.gcd(&defect);
        }
    }
    (level, g)
}

/// Period (index of imprimitivity) of an irreducible matrix.
pub fn period<T: Scalar>(a: &Matrix<T>) -> Result<usize> {
    if !is_irreducible(a) {
        return Err(Error::NotIrreducible);
    }
    Ok(levels_and_period(&successors(a)).1)
}

pub fn is_primitive<T: Scalar>(a: &Matrix<T>) -> bool {
    matches!(period(a), Ok(1))
}

/// Cyclic classes of an irreducible imprimitive matrix.
///
/// Class `c` contains state 0 when `c == 0`, and every row in class `c` has
/// its support inside class `(c + 1) mod h`, so relabeling by the classes in
/// order gives the superdiagonal Frobenius block form.
pub fn frobenius_form<T: Scalar>(a: &Matrix<T>) -> Result<Vec<IndexSet>> {
    if !is_irreducible(a) {
        return Err(Error::NotIrreducible);
    }
    let succ = successors(a);
    let (level, h) = levels_and_period(&succ);
    if h == 1 {
        return Err(Error::Primitive);
    }
    Ok((0..h)
        .map(|c| IndexSet::from_indices((0..a.dim()).filter(|&v| level[v] % h == c)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Rational};
    use num_traits::Zero;

    fn m(rows: &[&[(i64, i64)]]) -> Matrix<Rational> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&(p, d)| ratio(p, d)).collect())
                .collect(),
        )
        .unwrap()
    }

    fn cycle_perm(k: usize) -> Matrix<Rational> {
        Matrix::from_fn(k, k, |i, j| {
            if j == (i + 1) % k {
                ratio(1, 1)
            } else {
                ratio(0, 1)
            }
        })
    }

    /// gcd of all closed-walk lengths at state 0 up to `max_len`.
    fn brute_force_period(a: &Matrix<Rational>, max_len: u64) -> usize {
        let mut g = 0usize;
        for len in 1..=max_len {
            if !a.pow(len).get(0, 0).is_zero() {
                g = g.gcd(&(len as usize));
            }
        }
        g
    }

    #[test]
    fn canonical_form_identity() {
        let cf = canonical_form(&Matrix::<Rational>::identity(3));
        assert_eq!(cf.classes.len(), 3);
        assert!(cf.classes.iter().all(|c| c.kind == ClassKind::Ergodic));
        let members: Vec<_> = cf.classes.iter().map(|c| c.members.clone()).collect();
        assert_eq!(
            members,
            vec![
                IndexSet::from_indices([0]),
                IndexSet::from_indices([1]),
                IndexSet::from_indices([2])
            ]
        );
    }

    #[test]
    fn canonical_form_upper_triangular_chain() {
        let cf = canonical_form(&m(&[&[(1, 2), (1, 2)], &[(0, 1), (1, 1)]]));
        assert_eq!(cf.classes.len(), 2);
        assert_eq!(cf.classes[0].kind, ClassKind::Transient);
        assert_eq!(cf.classes[0].members, IndexSet::from_indices([0]));
        assert_eq!(cf.classes[1].kind, ClassKind::Ergodic);
        assert_eq!(cf.classes[1].members, IndexSet::from_indices([1]));
        assert_eq!(cf.relabeling, vec![0, 1]);
    }

    #[test]
    fn canonical_form_orders_transient_topologically() {
        // 0 -> 1 -> 2 (closed), 3 closed on its own
        let a = m(&[
            &[(1, 2), (1, 2), (0, 1), (0, 1)],
            &[(0, 1), (1, 2), (1, 2), (0, 1)],
            &[(0, 1), (0, 1), (1, 1), (0, 1)],
            &[(0, 1), (0, 1), (0, 1), (1, 1)],
        ]);
        let cf = canonical_form(&a);
        assert_eq!(cf.relabeling, vec![0, 1, 2, 3]);
        let relabeled = a.relabel(&cf.relabeling);
        // upper block triangular: nothing below the diagonal
        for i in 0..4 {
            for j in 0..i {
                assert!(relabeled.get(i, j).is_zero());
            }
        }
    }

    #[test]
    fn period_examples() {
        for k in 1..6 {
            assert_eq!(period(&cycle_perm(k)).unwrap(), k);
        }
        assert_eq!(period(&m(&[&[(1, 2), (1, 2)], &[(1, 3), (2, 3)]])).unwrap(), 1);
        let a = m(&[
            &[(0, 1), (1, 1), (0, 1)],
            &[(0, 1), (0, 1), (1, 1)],
            &[(1, 2), (1, 2), (0, 1)],
        ]);
        // closed walks at 1 have lengths 2 and 3
        assert_eq!(brute_force_period(&a, 12), 1);
        assert_eq!(period(&a).unwrap(), brute_force_period(&a, 12));
        assert_eq!(
            period(&m(&[&[(1, 2), (1, 2)], &[(0, 1), (1, 1)]])),
            Err(Error::NotIrreducible)
        );
    }

    #[test]
    fn frobenius_examples() {
        let classes = frobenius_form(&cycle_perm(3)).unwrap();
        assert_eq!(classes.len(), 3);
        assert!(classes.iter().all(|c| c.len() == 1));

        let a = m(&[
            &[(0, 1), (0, 1), (1, 2), (1, 2)],
            &[(0, 1), (0, 1), (1, 2), (1, 2)],
            &[(1, 1), (0, 1), (0, 1), (0, 1)],
            &[(0, 1), (1, 1), (0, 1), (0, 1)],
        ]);
        let classes = frobenius_form(&a).unwrap();
        assert_eq!(
            classes,
            vec![IndexSet::from_indices([0, 1]), IndexSet::from_indices([2, 3])]
        );
        let sq = a.pow(2);
        for (c, cls) in classes.iter().enumerate() {
            for (d, other) in classes.iter().enumerate() {
                if c != d {
                    assert!(sq.submatrix(cls, other).support().iter().flatten().all(|x| !x));
                }
            }
            assert!(is_primitive(&sq.principal(cls)));
        }
        assert_eq!(
            frobenius_form(&m(&[&[(1, 2), (1, 2)], &[(1, 2), (1, 2)]])),
            Err(Error::Primitive)
        );
    }

    #[test]
    fn composition_matches_product_support() {
        let a = m(&[&[(1, 2), (1, 2), (0, 1)], &[(0, 1), (0, 1), (1, 1)], &[(1, 1), (0, 1), (0, 1)]]);
        let b = m(&[&[(0, 1), (1, 1), (0, 1)], &[(0, 1), (1, 3), (2, 3)], &[(1, 1), (0, 1), (0, 1)]]);
        let ga = SupportDigraph::of(&a);
        let gb = SupportDigraph::of(&b);
        assert_eq!(
            compose_support_graphs(&ga, &gb).unwrap(),
            SupportDigraph::of(&(&b * &a))
        );
        let id = SupportDigraph::of(&Matrix::<Rational>::identity(3));
        assert_eq!(compose_support_graphs(&id, &id).unwrap(), id);
        assert!(compose_support_graphs(&id, &SupportDigraph::from_arcs(2, &[])).is_err());
    }
}
