use std::fmt;
use std::ops::{Deref, Mul};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::stomat::index::IndexSet;

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.data[i * dim + i] = T::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(nrows * ncols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != ncols {
                return Err(Error::Parse(format!(
                    "row {} has {} entries, expected {ncols}",
                    i + 1,
                    row.len()
                )));
            }
            data.extend(row);
        }
        Ok(Self {
            rows: nrows,
            cols: ncols,
            data,
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Side length of a square matrix.
    pub fn dim(&self) -> usize {
        debug_assert!(self.is_square());
        self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: rhs.rows,
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.data[idx] = out.data[idx].clone() + a.clone() * b.clone();
                }
            }
        }
        Ok(out)
    }

    /// `k`-th power by repeated squaring.
    pub fn pow(&self, mut k: u64) -> Self {
        let mut result = Self::identity(self.dim());
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Row vector times matrix: `v · A`.
    pub fn left_mul(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: v.len(),
            });
        }
        let mut out = vec![T::zero(); self.cols];
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for (j, a) in self.row(i).iter().enumerate() {
                if !a.is_zero() {
                    out[j] = out[j].clone() + vi.clone() * a.clone();
                }
            }
        }
        Ok(out)
    }

    /// Matrix times column vector: `A · x`.
    pub fn right_mul(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: x.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect())
    }

    pub fn submatrix(&self, rows: &IndexSet, cols: &IndexSet) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| {
            self.get(rows.as_slice()[i], cols.as_slice()[j]).clone()
        })
    }

    pub fn principal(&self, idx: &IndexSet) -> Self {
        self.submatrix(idx, idx)
    }

    /// `P^T A P` for the relabeling that puts old index `order[k]` at position `k`.
    pub fn relabel(&self, order: &[usize]) -> Self {
        Self::from_fn(order.len(), order.len(), |i, j| {
            self.get(order[i], order[j]).clone()
        })
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn row_sum(&self, i: usize) -> T {
        self.row(i).iter().cloned().fold(T::zero(), |a, b| a + b)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|x| *x >= T::zero())
    }

    /// Boolean support pattern, `support[i][j] == (a_ij != 0)`.
    pub fn support(&self) -> Vec<Vec<bool>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| !x.is_zero()).collect())
            .collect()
    }

    /// `max_j max_{i1,i2} |a_{i1 j} - a_{i2 j}|`; zero iff all rows are equal.
    pub fn seminorm(&self) -> T {
        let mut best = T::zero();
        for j in 0..self.cols {
            if self.rows == 0 {
                break;
            }
            let mut lo = self.get(0, j).clone();
            let mut hi = lo.clone();
            for i in 1..self.rows {
                let x = self.get(i, j);
                if *x < lo {
                    lo = x.clone();
                }
                if *x > hi {
                    hi = x.clone();
                }
            }
            best = best.max_of(hi - lo);
        }
        best
    }

    /// Coefficient of ergodicity `½ max_{i,j} Σ_k |a_ik − a_jk|`.
    pub fn ergodicity_coefficient(&self) -> T {
        let half = T::one() / (T::one() + T::one());
        let mut best = T::zero();
        for i in 0..self.rows {
            for j in i + 1..self.rows {
                let d = self
                    .row(i)
                    .iter()
                    .zip(self.row(j))
                    .fold(T::zero(), |acc, (a, b)| acc + (a.clone() - b.clone()).abs());
                best = best.max_of(d);
            }
        }
        best * half
    }

    /// Every pair of rows shares a column where both are positive.
    pub fn is_scrambling(&self) -> bool {
        let support = self.support();
        (0..self.rows).all(|i| {
            (i + 1..self.rows).all(|j| (0..self.cols).any(|k| support[i][k] && support[j][k]))
        })
    }

    /// Smallest nonzero entry.
    pub fn min_entry(&self) -> Result<T> {
        self.data
            .iter()
            .filter(|x| !x.is_zero())
            .cloned()
            .reduce(Scalar::min_of)
            .ok_or(Error::EmptySupport)
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(Scalar::to_f64).collect(),
        }
    }

    /// Max absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |acc, (a, b)| acc.max_of((a.clone() - b.clone()).abs()))
    }
}

impl<T: Scalar> Mul for &Matrix<T> {
    type Output = Matrix<T>;

    fn mul(self, rhs: Self) -> Matrix<T> {
        self.try_mul(rhs).expect("matrix dimensions must agree")
    }
}

impl<T: Scalar> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let cells: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// Square, nonnegative, row-stochastic matrix.
///
/// Row sums are exactly one in exact mode and within
/// [`Scalar::row_sum_tolerance`] in float mode.
#[derive(Clone, Debug, PartialEq)]
pub struct StochasticMatrix<T>(Matrix<T>);

impl<T: Scalar> StochasticMatrix<T> {
    pub fn new(m: Matrix<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.rows(),
                found: m.cols(),
            });
        }
        if m.rows() == 0 {
            return Err(Error::NotStochastic("empty matrix".into()));
        }
        for i in 0..m.rows() {
            if let Some(j) = m.row(i).iter().position(|x| *x < T::zero()) {
                return Err(Error::NotStochastic(format!(
                    "row {} has negative entry {} in column {}",
                    i + 1,
                    m.get(i, j),
                    j + 1
                )));
            }
            let sum = m.row_sum(i);
            if !sum.near(&T::one(), &T::row_sum_tolerance()) {
                return Err(Error::NotStochastic(format!("row {} sums to {sum}", i + 1)));
            }
        }
        Ok(Self(m))
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        Self::new(Matrix::from_rows(rows)?)
    }

    /// Wraps a matrix already known to be stochastic (e.g. a product of
    /// stochastic matrices).
    pub(crate) fn from_trusted(m: Matrix<T>) -> Self {
        Self(m)
    }

    pub fn identity(dim: usize) -> Self {
        Self(Matrix::identity(dim))
    }

    /// `1 pᵀ`: every row equal to `p`.
    pub fn rank_one(p: &[T]) -> Result<Self> {
        Self::from_rows(vec![p.to_vec(); p.len()])
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.0
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        self.0.try_mul(&rhs.0).map(Self)
    }

    pub fn pow(&self, k: u64) -> Self {
        Self(self.0.pow(k))
    }

    pub fn relabel(&self, order: &[usize]) -> Self {
        Self(self.0.relabel(order))
    }

    pub fn to_f64(&self) -> StochasticMatrix<f64> {
        StochasticMatrix(self.0.to_f64())
    }

    /// Rescales every row to sum to one; returns the largest drift corrected.
    pub fn renormalize(&mut self) -> T {
        let mut drift = T::zero();
        for i in 0..self.0.rows() {
            let sum = self.0.row_sum(i);
            drift = drift.max_of((sum.clone() - T::one()).abs());
            if !sum.is_zero() {
                for x in self.0.row_mut(i) {
                    *x = x.clone() / sum.clone();
                }
            }
        }
        drift
    }
}

impl<T> Deref for StochasticMatrix<T> {
    type Target = Matrix<T>;

    fn deref(&self) -> &Matrix<T> {
        &self.0
    }
}

impl<T: Scalar> Mul for &StochasticMatrix<T> {
    type Output = StochasticMatrix<T>;

    fn mul(self, rhs: Self) -> StochasticMatrix<T> {
        StochasticMatrix(&self.0 * &rhs.0)
    }
}

impl<T: Scalar> fmt::Display for StochasticMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Rational};

    fn q(rows: &[&[(i64, i64)]]) -> StochasticMatrix<Rational> {
        StochasticMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&(p, d)| ratio(p, d)).collect())
                .collect(),
        )
        .unwrap()
    }

    fn example() -> StochasticMatrix<Rational> {
        q(&[&[(1, 2), (1, 2)], &[(1, 4), (3, 4)]])
    }

    #[test]
    fn seminorm_examples() {
        let p = [ratio(1, 3), ratio(2, 3)];
        assert_eq!(StochasticMatrix::rank_one(&p).unwrap().seminorm(), ratio(0, 1));
        assert_eq!(
            StochasticMatrix::<Rational>::identity(2).seminorm(),
            ratio(1, 1)
        );
        assert_eq!(example().seminorm(), ratio(1, 4));
    }

    #[test]
    fn ergodicity_examples() {
        let p = [ratio(1, 5), ratio(4, 5)];
        assert_eq!(
            StochasticMatrix::rank_one(&p).unwrap().ergodicity_coefficient(),
            ratio(0, 1)
        );
        let swap = q(&[&[(0, 1), (1, 1)], &[(1, 1), (0, 1)]]);
        assert_eq!(swap.ergodicity_coefficient(), ratio(1, 1));
        assert_eq!(example().ergodicity_coefficient(), ratio(1, 4));
    }

    #[test]
    fn scrambling_and_min_entry() {
        assert!(!StochasticMatrix::<Rational>::identity(2).is_scrambling());
        let p = [ratio(1, 6), ratio(1, 3), ratio(1, 2)];
        let r = StochasticMatrix::rank_one(&p).unwrap();
        assert!(r.is_scrambling());
        assert_eq!(r.min_entry().unwrap(), ratio(1, 6));
        let a = q(&[
            &[(1, 2), (1, 2), (0, 1)],
            &[(0, 1), (1, 2), (1, 2)],
            &[(1, 2), (0, 1), (1, 2)],
        ]);
        assert!(a.is_scrambling());
        assert_eq!(a.min_entry().unwrap(), ratio(1, 2));
        assert_eq!(
            Matrix::<Rational>::zeros(2, 2).min_entry(),
            Err(Error::EmptySupport)
        );
    }

    #[test]
    fn rejects_bad_rows() {
        let err = StochasticMatrix::from_rows(vec![
            vec![ratio(1, 2), ratio(1, 2)],
            vec![ratio(5, 8), ratio(1, 2)],
        ])
        .unwrap_err();
        assert_eq!(err.to_string(), "row 2 sums to 9/8");
        assert!(StochasticMatrix::from_rows(vec![vec![2.0, -1.0], vec![0.0, 1.0]]).is_err());
        assert!(StochasticMatrix::from_rows(vec![vec![0.5 + 1e-14, 0.5], vec![0.0, 1.0]]).is_ok());
    }

    #[test]
    fn pow_matches_repeated_product() {
        let a = example();
        let mut acc = StochasticMatrix::identity(2);
        for k in 0..6 {
            assert_eq!(a.pow(k), acc);
            acc = &acc * &a;
        }
    }

    #[test]
    fn renormalize_reports_drift() {
        let mut m: StochasticMatrix<f64> = StochasticMatrix::from_trusted(
            Matrix::from_rows(vec![vec![0.5, 0.5 + 1e-10], vec![0.0, 1.0]]).unwrap(),
        );
        let drift = m.renormalize();
        assert!((drift - 1e-10).abs() < 1e-15);
        assert!((m.row_sum(0) - 1.0).abs() < 1e-15);
    }
}
