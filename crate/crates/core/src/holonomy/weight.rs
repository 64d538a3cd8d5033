use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};
use crate::stomat::Matrix;

/// Interior point of the probability simplex, used as a left row vector.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightVector<T = Rational>(Vec<T>);

impl<T: Scalar> WeightVector<T> {
    /// Entries must be strictly positive and sum to one (exactly in exact
    /// mode).
    pub fn new(entries: Vec<T>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidWeight("empty weight vector".into()));
        }
        if let Some(i) = entries.iter().position(|x| *x <= T::zero()) {
            return Err(Error::InvalidWeight(format!(
                "entry {} is {}, must be positive",
                i + 1,
                entries[i]
            )));
        }
        let sum = entries.iter().cloned().fold(T::zero(), |a, b| a + b);
        if !sum.near(&T::one(), &T::row_sum_tolerance()) {
            return Err(Error::InvalidWeight(format!("entries sum to {sum}")));
        }
        Ok(Self(entries))
    }

    pub fn uniform(dim: usize) -> Self {
        let x = T::one() / T::from_usize(dim).expect("dimension fits the scalar");
        Self(vec![x; dim])
    }

    pub fn entries(&self) -> &[T] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<T> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: self.dim(),
            });
        }
        Ok(())
    }

    /// `w A`.
    pub fn times(&self, a: &Matrix<T>) -> Result<Vec<T>> {
        a.left_mul(&self.0)
    }

    pub fn to_f64(&self) -> WeightVector<f64> {
        WeightVector(self.0.iter().map(Scalar::to_f64).collect())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(self.0.iter().map(Scalar::to_json).collect())
    }
}

impl WeightVector<Rational> {
    /// No two entries equal.
    pub fn is_generic(&self) -> bool {
        self.0.iter().collect::<BTreeSet<_>>().len() == self.0.len()
    }
}

impl<T: Scalar> fmt::Display for WeightVector<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}
