use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::stomat::matrix::Matrix;
use crate::stomat::support::is_irreducible;

/// Solves `M x = b` by Gaussian elimination with partial pivoting.
///
/// Returns `None` when `M` is singular (exactly singular in exact mode).
pub fn solve<T: Scalar>(m: &Matrix<T>, b: &[T]) -> Option<Vec<T>> {
    let n = m.rows();
    let mut a: Vec<Vec<T>> = (0..n)
        .map(|i| {
            let mut row = m.row(i).to_vec();
            row.push(b[i].clone());
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .filter(|&r| !a[r][col].is_zero())
            .max_by(|&r, &s| {
                a[r][col]
                    .abs()
                    .partial_cmp(&a[s][col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })?;
        a.swap(col, pivot);
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone() / a[col][col].clone();
            for c in col..=n {
                let v = a[col][c].clone() * factor.clone();
                a[r][c] = a[r][c].clone() - v;
            }
        }
    }
    Some((0..n).map(|i| a[i][n].clone() / a[i][i].clone()).collect())
}

/// Row Perron vector of an irreducible stochastic matrix: the unique `q` with
/// `q A = q`, `q > 0`, `Σ q = 1`.
pub fn perron_row_vector<T: Scalar>(a: &Matrix<T>) -> Result<Vec<T>> {
    if !is_irreducible(a) {
        return Err(Error::NotIrreducible);
    }
    let n = a.dim();
    // (Aᵀ − I) qᵀ = 0 with the last equation replaced by Σ q = 1.
    let mut system = Matrix::from_fn(n, n, |i, j| {
        let v = a.get(j, i).clone();
        if i == j {
            v - T::one()
        } else {
            v
        }
    });
    for j in 0..n {
        system.set(n - 1, j, T::one());
    }
    let mut rhs = vec![T::zero(); n];
    rhs[n - 1] = T::one();
    solve(&system, &rhs).ok_or(Error::NotIrreducible)
}
