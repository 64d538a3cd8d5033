//! Permutation structure inside stochastic matrices.

use std::collections::HashSet;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;
use crate::stomat::index::IndexSet;
use crate::stomat::matrix::Matrix;

/// Permutation of `{0, .., n-1}`; as a matrix, row `i` has its 1 in column
/// `image[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    /// `None` unless `image` is a bijection of `0..image.len()`.
    pub fn from_images(image: Vec<usize>) -> Option<Self> {
        let mut seen = vec![false; image.len()];
        for &j in &image {
            if j >= image.len() || seen[j] {
                return None;
            }
            seen[j] = true;
        }
        Some(Self(image))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn image(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Matrix product `self · other`.
    pub fn then(&self, other: &Self) -> Self {
        Self(self.0.iter().map(|&j| other.0[j]).collect())
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Self(inv)
    }

    pub fn pow(&self, k: u64) -> Self {
        let mut out = Self::identity(self.len());
        for _ in 0..k % self.order().max(1) {
            out = out.then(self);
        }
        out
    }

    pub fn cycle_lengths(&self) -> Vec<usize> {
        let mut seen = vec![false; self.0.len()];
        let mut out = Vec::new();
        for start in 0..self.0.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.0[i];
                len += 1;
            }
            out.push(len);
        }
        out
    }

    /// Order as a group element (lcm of cycle lengths).
    pub fn order(&self) -> u64 {
        self.cycle_lengths()
            .into_iter()
            .fold(1u64, |acc, l| acc.lcm(&(l as u64)))
    }

    pub fn to_matrix<T: Scalar>(&self) -> Matrix<T> {
        Matrix::from_fn(self.len(), self.len(), |i, j| {
            if self.0[i] == j {
                T::one()
            } else {
                T::zero()
            }
        })
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let images: Vec<String> = self.0.iter().map(|j| (j + 1).to_string()).collect();
        write!(f, "[{}]", images.join(" "))
    }
}

/// Column of the single unit entry of row `i`, if the row is a standard unit
/// vector (exactly in exact mode, by 0/1 rounding in float mode).
fn unit_target<T: Scalar>(a: &Matrix<T>, i: usize) -> Option<usize> {
    let mut target = None;
    for (j, x) in a.row(i).iter().enumerate() {
        if x.is_negligible() {
            continue;
        }
        if target.is_some() || !x.is_unit() {
            return None;
        }
        target = Some(j);
    }
    target
}

/// The permutation represented by `a`, if it is a 0/1 matrix with exactly one
/// 1 in each row and each column.
pub fn as_permutation<T: Scalar>(a: &Matrix<T>) -> Option<Permutation> {
    if !a.is_square() {
        return None;
    }
    let images = (0..a.rows())
        .map(|i| unit_target(a, i))
        .collect::<Option<Vec<_>>>()?;
    Permutation::from_images(images)
}

pub fn is_permutation<T: Scalar>(a: &Matrix<T>) -> bool {
    as_permutation(a).is_some()
}

/// Largest index set `π` such that `A[π, π]` is a permutation matrix and the
/// rows indexed by `π` vanish outside `π`.
pub fn maximal_permutation_index<T: Scalar>(a: &Matrix<T>) -> IndexSet {
    let n = a.dim();
    let target: Vec<Option<usize>> = (0..n).map(|i| unit_target(a, i)).collect();
    // Nodes of the functional graph i -> target(i) whose orbit stays in unit
    // rows; then peel nodes with no incoming arc until only cycles remain.
    let mut alive: Vec<bool> = target.iter().map(Option::is_some).collect();
    let mut changed = true;
    while changed {
        changed = false;
        for i in 0..n {
            if alive[i] && !target[i].is_some_and(|j| alive[j]) {
                alive[i] = false;
                changed = true;
            }
        }
    }
    loop {
        let mut indegree = vec![0usize; n];
        for i in 0..n {
            if alive[i] {
                indegree[target[i].unwrap()] += 1;
            }
        }
        let mut removed = false;
        for i in 0..n {
            if alive[i] && indegree[i] == 0 {
                alive[i] = false;
                removed = true;
            }
        }
        if !removed {
            break;
        }
    }
    IndexSet::from_indices((0..n).filter(|&i| alive[i]))
}

/// The permutation `A[π, π]` in positions of `π`, if `π` is closed under `A`
/// and `A` acts on it as a permutation.
pub fn restricted_permutation<T: Scalar>(a: &Matrix<T>, idx: &IndexSet) -> Option<Permutation> {
    let mut images = Vec::with_capacity(idx.len());
    for i in idx.iter() {
        let j = unit_target(a, i)?;
        images.push(idx.position(j)?);
    }
    Permutation::from_images(images)
}

/// Smallest `k` in `1..=cap` with `A^k = I`.
///
/// For a stochastic `A`, `A^k` is the identity exactly when its support is
/// the diagonal, so the search runs on boolean support powers and stops as
/// soon as the support sequence starts repeating.
pub fn finite_order<T: Scalar>(a: &Matrix<T>, cap: u64) -> Option<u64> {
    let n = a.dim();
    let base = a.support();
    let diagonal: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| i == j).collect()).collect();
    let mut power = base.clone();
    let mut seen = HashSet::new();
    for k in 1..=cap {
        if power == diagonal {
            return Some(k);
        }
        if !seen.insert(power.clone()) {
            return None;
        }
        let mut next = vec![vec![false; n]; n];
        for i in 0..n {
            for m in 0..n {
                if power[i][m] {
                    for j in 0..n {
                        if base[m][j] {
                            next[i][j] = true;
                        }
                    }
                }
            }
        }
        power = next;
    }
    None
}
