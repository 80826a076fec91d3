//! Dense real linear algebra: vectors, matrices, weighted p-norms, Kronecker
//! products, a cyclic Jacobi symmetric eigensolver and induced operator norms.
//!
//! Everything here is small and dense. Constructors reject NaN and infinities
//! so that downstream contraction verdicts are never computed from garbage.

mod eigen;
mod matrix;
mod norms;
pub(crate) mod sphere;

pub use eigen::{symmetric_eigen, symmetric_eigenvalues, SymmetricEigen};
pub use matrix::{kronecker, DenseMatrix};
pub use norms::{
    componentwise_grid_norm, grid_norm, normalized_p_mean, operator_p_norm, operator_p_norm_with,
    p_norm, weighted_p_norm, AscentOptions, Lp, OperatorNorm, WeightedNorm,
};
pub(crate) use norms::{grid_norm_unchecked, p_norm_finite};

use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A real vector with finite entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct DenseVector(Vec<f64>);

impl DenseVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("vector"));
        }
        Ok(Self(entries))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for DenseVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for DenseVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<DenseVector> for Vec<f64> {
    fn from(v: DenseVector) -> Self {
        v.0
    }
}

pub(crate) fn check_finite(xs: &[f64], what: &'static str) -> Result<()> {
    if xs.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

pub(crate) fn check_len(xs: &[f64], expected: usize) -> Result<()> {
    if xs.len() == expected {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected,
            found: xs.len(),
        })
    }
}
