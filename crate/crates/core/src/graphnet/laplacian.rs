use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigenvalues, DenseMatrix};

/// Weighted graph Laplacian `L = Deg − W` of an undirected graph.
///
/// The diagonal is stored as the negated sum of the row's off-diagonal
/// entries, accumulated in column order, so row and column sums cancel
/// exactly in floating point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphLaplacian {
    label: String,
    matrix: DenseMatrix,
}

impl GraphLaplacian {
    /// Builds the Laplacian of `n_nodes` nodes joined by weighted edges
    /// `(i, j, w)`. Repeated edges add up.
    pub fn from_edges(n_nodes: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        if n_nodes < 2 {
            return Err(Error::InvalidGraph(format!(
                "need at least 2 nodes, got {n_nodes}"
            )));
        }
        let mut m = DenseMatrix::zeros(n_nodes, n_nodes);
        for &(i, j, w) in edges {
            if i >= n_nodes || j >= n_nodes {
                return Err(Error::InvalidGraph(format!(
                    "edge ({i}, {j}) references a node outside 0..{n_nodes}"
                )));
            }
            if i == j {
                return Err(Error::InvalidGraph(format!("self-loop at node {i}")));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidGraph(format!(
                    "edge ({i}, {j}) has weight {w}; weights must be finite and > 0"
                )));
            }
            m[(i, j)] -= w;
            m[(j, i)] -= w;
        }
        Ok(Self::with_balanced_diagonal(m, "edges".into()))
    }

    /// Accepts a symmetric matrix with zero row sums and non-positive
    /// off-diagonal entries (all within `1e-12` relative).
    pub fn from_matrix(m: DenseMatrix) -> Result<Self> {
        let n = m.ensure_square()?;
        if n < 2 {
            return Err(Error::InvalidGraph(format!(
                "need at least 2 nodes, got {n}"
            )));
        }
        let tol = 1e-12 * m.max_abs().max(1.0);
        if !m.is_symmetric(tol) {
            return Err(Error::InvalidGraph("Laplacian must be symmetric".into()));
        }
        for i in 0..n {
            let row_sum: f64 = m.row(i).iter().sum();
            if row_sum.abs() > tol {
                return Err(Error::InvalidGraph(format!(
                    "row {i} sums to {row_sum}, expected 0"
                )));
            }
            if let Some(j) = (0..n).find(|&j| j != i && m[(i, j)] > tol) {
                return Err(Error::InvalidGraph(format!(
                    "off-diagonal entry ({i}, {j}) = {} is positive",
                    m[(i, j)]
                )));
            }
        }
        let mut sym = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    sym[(i, j)] = (0.5 * (m[(i, j)] + m[(j, i)])).min(0.0);
                }
            }
        }
        Ok(Self::with_balanced_diagonal(sym, "matrix".into()))
    }

    /// Path `0 − 1 − … − (n−1)` with unit weights.
    pub fn path(n: usize) -> Result<Self> {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i, 1.0)).collect();
        Ok(Self::from_edges(n, &edges)?.labelled(format!("path:{n}")))
    }

    /// Complete graph with unit weights.
    pub fn complete(n: usize) -> Result<Self> {
        let edges: Vec<_> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j, 1.0)))
            .collect();
        Ok(Self::from_edges(n, &edges)?.labelled(format!("complete:{n}")))
    }

    /// All edge weights multiplied by `alpha > 0`.
    pub fn scaled(&self, alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidParameter {
                name: "alpha".into(),
                reason: format!("must be finite and > 0, got {alpha}"),
            });
        }
        let n = self.n_nodes();
        let mut m = DenseMatrix::zeros(n, n);
        for (i, j, w) in self.edges() {
            m[(i, j)] = -alpha * w;
            m[(j, i)] = -alpha * w;
        }
        Ok(Self::with_balanced_diagonal(m, self.label.clone()))
    }

    pub fn labelled(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn n_nodes(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    /// Edges `(i, j, w)` with `i < j` and `w > 0`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.n_nodes();
        (0..n).flat_map(move |i| {
            (i + 1..n).filter_map(move |j| {
                let w = -self.matrix[(i, j)];
                (w > 0.0).then_some((i, j, w))
            })
        })
    }

    /// Neighbour lists `(j, w_ij)` in increasing `j`.
    pub fn neighbors(&self) -> Vec<Vec<(usize, f64)>> {
        let n = self.n_nodes();
        (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| j != i && self.matrix[(i, j)] < 0.0)
                    .map(|j| (j, -self.matrix[(i, j)]))
                    .collect()
            })
            .collect()
    }

    /// Largest absolute row sum, a bound on the spectral radius.
    pub fn gershgorin_bound(&self) -> f64 {
        (0..self.n_nodes())
            .map(|i| self.matrix.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    fn with_balanced_diagonal(mut m: DenseMatrix, label: String) -> Self {
        let n = m.rows();
        for i in 0..n {
            let off: f64 = (0..n).filter(|&j| j != i).map(|j| m[(i, j)]).sum();
            m[(i, i)] = -off;
        }
        Self { label, matrix: m }
    }
}

/// Standard weighted Laplacian from an edge list.
pub fn laplacian_from_edges(
    n_nodes: usize,
    edges: &[(usize, usize, f64)],
) -> Result<GraphLaplacian> {
    GraphLaplacian::from_edges(n_nodes, edges)
}

/// Algebraic connectivity: the second-smallest eigenvalue of `L`.
///
/// Eigenvalues within `1e-10 · max(1, λ_max)` of zero count as zero; more
/// than one such eigenvalue means the graph is disconnected.
pub fn lambda2(l: &GraphLaplacian) -> Result<f64> {
    let values = symmetric_eigenvalues(l.matrix())?;
    let top = values.last().copied().unwrap_or(0.0);
    let tol = 1e-10 * top.max(1.0);
    let zeros = values.iter().filter(|v| v.abs() <= tol).count();
    if zeros > 1 {
        return Err(Error::Disconnected {
            zero_multiplicity: zeros,
        });
    }
    Ok(values[1])
}
