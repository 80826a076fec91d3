use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::GraphLaplacian;
use crate::error::{Error, Result};
use crate::linalg::{grid_norm_unchecked, DenseMatrix, WeightedNorm};
use crate::models::{BoxDomain, VectorField};

/// Explicit step safety factor relative to the coupling's stability limit.
const STEP_SAFETY: f64 = 0.9;

/// Positive diagonal diffusion matrix `D = diag(d)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct DiffusionMatrix {
    d: Vec<f64>,
}

impl DiffusionMatrix {
    pub fn new(d: Vec<f64>) -> Result<Self> {
        if d.is_empty() {
            return Err(Error::InvalidParameter {
                name: "diffusion".into(),
                reason: "needs at least one entry".into(),
            });
        }
        if let Some(bad) = d.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::InvalidParameter {
                name: "diffusion".into(),
                reason: format!("entries must be finite and > 0, got {bad}"),
            });
        }
        Ok(Self { d })
    }

    pub fn uniform(n: usize, d: f64) -> Result<Self> {
        Self::new(vec![d; n])
    }

    pub fn entries(&self) -> &[f64] {
        &self.d
    }

    pub fn dim(&self) -> usize {
        self.d.len()
    }

    pub fn max(&self) -> f64 {
        self.d.iter().copied().fold(0.0, f64::max)
    }

    pub fn as_matrix(&self) -> DenseMatrix {
        DenseMatrix::diag(&self.d)
    }
}

impl TryFrom<Vec<f64>> for DiffusionMatrix {
    type Error = Error;

    fn try_from(d: Vec<f64>) -> Result<Self> {
        Self::new(d)
    }
}

impl From<DiffusionMatrix> for Vec<f64> {
    fn from(d: DiffusionMatrix) -> Self {
        d.d
    }
}

/// Uniform 1-D grid of `cells` cells on an interval of the given length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpatialGrid {
    pub length: f64,
    pub cells: usize,
}

impl SpatialGrid {
    pub fn new(length: f64, cells: usize) -> Result<Self> {
        if cells < 2 {
            return Err(Error::InvalidParameter {
                name: "cells".into(),
                reason: format!("need at least 2 cells, got {cells}"),
            });
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidParameter {
                name: "length".into(),
                reason: format!("must be finite and > 0, got {length}"),
            });
        }
        Ok(Self { length, cells })
    }

    /// Cell width `h = length / cells`.
    pub fn h(&self) -> f64 {
        self.length / self.cells as f64
    }

    /// Cell centres.
    pub fn centers(&self) -> Vec<f64> {
        let h = self.h();
        (0..self.cells).map(|k| (k as f64 + 0.5) * h).collect()
    }
}

/// `N` copies of a cell field coupled by `−(L ⊗ D)`.
///
/// States are cell-major: entry `k·n + i` is species `i` in compartment `k`.
#[derive(Clone)]
pub struct NetworkSystem {
    cell_field: Arc<dyn VectorField>,
    laplacian: GraphLaplacian,
    diffusion: DiffusionMatrix,
    neighbors: Vec<Vec<(usize, f64)>>,
    /// Scalar coupling terms `(row, col, w · d_i)`, grouped by row.
    terms: Vec<(usize, usize, f64)>,
    cell_weight: f64,
    domain: BoxDomain,
    name: String,
}

impl NetworkSystem {
    fn build(
        f: Arc<dyn VectorField>,
        l: GraphLaplacian,
        d: DiffusionMatrix,
        cell_weight: f64,
        name: String,
    ) -> Result<Self> {
        if d.dim() != f.dim() {
            return Err(Error::DimensionMismatch {
                expected: f.dim(),
                found: d.dim(),
            });
        }
        let n_nodes = l.n_nodes();
        let cell = f.domain();
        let domain = BoxDomain {
            lower: cell.lower.repeat(n_nodes),
            upper: cell.upper.repeat(n_nodes),
        };
        let neighbors = l.neighbors();
        let n = d.dim();
        let mut terms = Vec::new();
        for (k, nbrs) in neighbors.iter().enumerate() {
            for &(l, w) in nbrs {
                for (i, di) in d.entries().iter().enumerate() {
                    terms.push((k * n + i, l * n + i, w * di));
                }
            }
        }
        Ok(Self {
            neighbors,
            terms,
            cell_field: f,
            laplacian: l,
            diffusion: d,
            cell_weight,
            domain,
            name,
        })
    }

    pub fn cell_field(&self) -> &Arc<dyn VectorField> {
        &self.cell_field
    }

    pub fn laplacian(&self) -> &GraphLaplacian {
        &self.laplacian
    }

    pub fn diffusion(&self) -> &DiffusionMatrix {
        &self.diffusion
    }

    /// Number of compartments `N`.
    pub fn n_nodes(&self) -> usize {
        self.laplacian.n_nodes()
    }

    /// Species per compartment `n`.
    pub fn cell_dim(&self) -> usize {
        self.cell_field.dim()
    }

    /// Quadrature weight per compartment: `h` for a discretized PDE, else 1.
    pub fn cell_weight(&self) -> f64 {
        self.cell_weight
    }

    /// `−(L ⊗ D)`, with each diagonal entry equal to the negated sum of its
    /// row's off-diagonal entries so row and column sums vanish exactly.
    pub fn coupling(&self) -> DenseMatrix {
        let (big_n, n) = (self.n_nodes(), self.cell_dim());
        let d = self.diffusion.entries();
        let mut c = DenseMatrix::zeros(big_n * n, big_n * n);
        for (k, nbrs) in self.neighbors.iter().enumerate() {
            for &(l, w) in nbrs {
                for i in 0..n {
                    c[(k * n + i, l * n + i)] = w * d[i];
                }
            }
        }
        for r in 0..big_n * n {
            let off: f64 = (0..big_n * n).filter(|&s| s != r).map(|s| c[(r, s)]).sum();
            c[(r, r)] = -off;
        }
        c
    }

    /// The state with every compartment equal to `x`.
    pub fn uniform_state(&self, x: &[f64]) -> Vec<f64> {
        x.repeat(self.n_nodes())
    }

    /// Compartment `k` of a stacked state.
    pub fn compartment<'a>(&self, u: &'a [f64], k: usize) -> &'a [f64] {
        let n = self.cell_dim();
        &u[k * n..(k + 1) * n]
    }
}

/// Stacks `N` copies of `f` coupled through `L` and `D`.
pub fn assemble_network(
    f: Arc<dyn VectorField>,
    l: &GraphLaplacian,
    d: &DiffusionMatrix,
) -> Result<NetworkSystem> {
    let name = format!("{}@{}", f.name(), l.label());
    NetworkSystem::build(f, l.clone(), d.clone(), 1.0, name)
}

/// Method of lines for `u_t = F(u) + D u_ξξ` with no-flux boundary: the
/// path-graph Laplacian scaled by `1/h²`, with cell weight `h`.
pub fn discretize_pde(
    f: Arc<dyn VectorField>,
    d: &DiffusionMatrix,
    grid: &SpatialGrid,
) -> Result<NetworkSystem> {
    let grid = SpatialGrid::new(grid.length, grid.cells)?;
    let h = grid.h();
    let l = GraphLaplacian::path(grid.cells)?
        .scaled(1.0 / (h * h))?
        .labelled(format!("neumann:{}", grid.cells));
    let name = format!("{}@pde:{}", f.name(), grid.cells);
    NetworkSystem::build(f, l, d.clone(), h, name)
}

impl VectorField for NetworkSystem {
    fn name(&self) -> &str {
        &self.name
    }

    fn dim(&self) -> usize {
        self.n_nodes() * self.cell_dim()
    }

    fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    fn eval_into(&self, u: &[f64], t: f64, out: &mut [f64]) {
        let n = self.cell_dim();
        for (ok, uk) in out.chunks_exact_mut(n).zip(u.chunks_exact(n)) {
            self.cell_field.eval_into(uk, t, ok);
        }
        for &(r, s, c) in &self.terms {
            out[r] += c * (u[s] - u[r]);
        }
    }

    fn jacobian(&self, u: &[f64], t: f64) -> DenseMatrix {
        let n = self.cell_dim();
        let mut j = self.coupling();
        for k in 0..self.n_nodes() {
            let jk = self.cell_field.jacobian(&u[k * n..(k + 1) * n], t);
            for r in 0..n {
                for c in 0..n {
                    j[(k * n + r, k * n + c)] += jk[(r, c)];
                }
            }
        }
        j
    }

    fn is_time_varying(&self) -> bool {
        self.cell_field.is_time_varying()
    }

    fn jacobian_kind(&self) -> crate::models::JacobianKind {
        self.cell_field.jacobian_kind()
    }

    fn parameters(&self) -> serde_json::Value {
        serde_json::json!({
            "cell": self.cell_field.parameters(),
            "graph": self.laplacian.label(),
            "diffusion": self.diffusion.entries(),
            "cell_weight": self.cell_weight,
        })
    }

    /// `0.9 · 2 / (ρ̂(L) · max d)` with `ρ̂` the Gershgorin bound; for the
    /// PDE this is `0.9 · h² / (2 max d)`.
    fn max_stable_dt(&self) -> Option<f64> {
        let rho = self.laplacian.gershgorin_bound() * self.diffusion.max();
        let coupling_limit = (rho > 0.0).then(|| STEP_SAFETY * 2.0 / rho);
        match (coupling_limit, self.cell_field.max_stable_dt()) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    fn accepts_norm(&self, w: &WeightedNorm) -> bool {
        w.dim() == self.cell_dim() || w.dim() == self.dim()
    }

    /// A cell-sized norm is applied per compartment and combined with the
    /// compartment weight; a full-sized norm applies directly.
    fn state_distance(&self, diff: &[f64], w: &WeightedNorm) -> f64 {
        if w.dim() == self.cell_dim() && self.n_nodes() > 1 {
            grid_norm_unchecked(diff, w, self.cell_weight)
        } else {
            w.norm_unchecked(diff)
        }
    }
}

/// `|α|^p + |β|^p − (|α|^{p−2} + |β|^{p−2}) αβ`, non-negative for `p ≥ 1`.
/// Written as `|α|^p + |β|^p − (dual(α) β + dual(β) α)` so it stays finite
/// when `α` or `β` vanishes.
pub fn power_product_gap(alpha: f64, beta: f64, p: f64) -> f64 {
    let dual = |v: f64| {
        if v == 0.0 {
            0.0
        } else {
            v.signum() * v.abs().powf(p - 1.0)
        }
    };
    alpha.abs().powf(p) + beta.abs().powf(p) - (dual(alpha) * beta + dual(beta) * alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{kronecker, Lp};
    use crate::lognorm::mu_closed_form;
    use crate::models::{EnzymeParams, EnzymeReduced, FnField, LinearField};

    fn lin() -> Arc<dyn VectorField> {
        Arc::new(
            LinearField::new(DenseMatrix::from_rows(&[[-2.0, 1.0], [1.0, -2.0]]).unwrap()).unwrap(),
        )
    }

    #[test]
    fn coupling_is_negated_kronecker() {
        let l = GraphLaplacian::complete(3).unwrap();
        let d = DiffusionMatrix::new(vec![0.3, 2.0]).unwrap();
        let net = assemble_network(lin(), &l, &d).unwrap();
        let expected = kronecker(l.matrix(), &d.as_matrix()).scale(-1.0);
        assert_eq!(net.coupling(), expected);
        assert!(net.coupling().is_symmetric(0.0));
    }

    #[test]
    fn two_node_linear_network_matrix() {
        let (d1, d2) = (0.4, 1.7);
        let l = GraphLaplacian::complete(2).unwrap();
        let d = DiffusionMatrix::new(vec![d1, d2]).unwrap();
        let net = assemble_network(lin(), &l, &d).unwrap();
        let j = net.jacobian(&[0.0; 4], 0.0);
        assert_eq!(
            j.to_rows(),
            vec![
                vec![-2.0 - d1, 1.0, d1, 0.0],
                vec![1.0, -2.0 - d2, 0.0, d2],
                vec![d1, 0.0, -2.0 - d1, 1.0],
                vec![0.0, d2, 1.0, -2.0 - d2],
            ]
        );
    }

    #[test]
    fn two_node_right_hand_side() {
        let f = EnzymeReduced::new(EnzymeParams::default()).unwrap();
        let d = DiffusionMatrix::new(vec![0.5, 0.25]).unwrap();
        let net = assemble_network(
            Arc::new(f.clone()),
            &GraphLaplacian::complete(2).unwrap(),
            &d,
        )
        .unwrap();
        let (x, y) = ([1.0, 0.5], [3.0, 1.5]);
        let out = net.eval(&[x[0], x[1], y[0], y[1]], 0.0);
        let fx = f.eval(&x, 0.0);
        let fy = f.eval(&y, 0.0);
        for i in 0..2 {
            let di = d.entries()[i];
            assert!((out[i] - (fx[i] + di * (y[i] - x[i]))).abs() < 1e-15);
            assert!((out[2 + i] - (fy[i] + di * (x[i] - y[i]))).abs() < 1e-15);
        }
    }

    #[test]
    fn uniform_equilibrium_is_stationary() {
        let f = EnzymeReduced::new(EnzymeParams::default()).unwrap();
        // equilibrium: y = S_Y x / (1 + x) with k1=k2=1, x = z/δ = 1
        let eq = [1.0, 1.0];
        assert_eq!(f.eval(&eq, 0.0), vec![0.0, 0.0]);
        let grid = SpatialGrid::new(1.0, 16).unwrap();
        let net = discretize_pde(
            Arc::new(f),
            &DiffusionMatrix::uniform(2, 3.0).unwrap(),
            &grid,
        )
        .unwrap();
        assert!(net
            .eval(&net.uniform_state(&eq), 0.0)
            .iter()
            .all(|v| *v == 0.0));
    }

    #[test]
    fn pde_with_two_cells_is_a_two_node_network() {
        let grid = SpatialGrid::new(0.5, 2).unwrap();
        let d = DiffusionMatrix::new(vec![1.0, 2.0]).unwrap();
        let pde = discretize_pde(lin(), &d, &grid).unwrap();
        let l = laplacian_two(1.0 / (0.25 * 0.25));
        let net = assemble_network(lin(), &l, &d).unwrap();
        assert_eq!(pde.coupling(), net.coupling());
        assert_eq!(pde.cell_weight(), 0.25);
        // two nodes: Gershgorin bound 2/h², so 0.9 h² / max d
        let expected = 0.9 * 0.0625 / 2.0;
        assert!((pde.max_stable_dt().unwrap() - expected).abs() < 1e-15);
    }

    fn laplacian_two(w: f64) -> GraphLaplacian {
        super::super::laplacian_from_edges(2, &[(0, 1, w)]).unwrap()
    }

    #[test]
    fn coupling_measures_vanish() {
        let l = super::super::laplacian_from_edges(
            4,
            &[(0, 1, 0.3), (1, 2, 1.1), (2, 3, 0.7), (0, 2, 2.9)],
        )
        .unwrap();
        let d = DiffusionMatrix::new(vec![0.37, 5.1]).unwrap();
        let c = assemble_network(lin(), &l, &d).unwrap().coupling();
        assert_eq!(mu_closed_form(&c, Lp::ONE).unwrap(), 0.0);
        assert_eq!(mu_closed_form(&c, Lp::INF).unwrap(), 0.0);
        assert!(mu_closed_form(&c, Lp::TWO).unwrap().abs() < 1e-10);
    }

    #[test]
    fn grid_distance_uses_cell_weight() {
        let grid = SpatialGrid::new(2.0, 4).unwrap();
        let dom = BoxDomain::whole_space(1);
        let f = FnField::new("zero", dom, |_x, _t, out| out[0] = 0.0)
            .with_jacobian(|_x, _t| DenseMatrix::zeros(1, 1));
        let pde = discretize_pde(
            Arc::new(f),
            &DiffusionMatrix::uniform(1, 1.0).unwrap(),
            &grid,
        )
        .unwrap();
        let w = WeightedNorm::unweighted(Lp::ONE, 1);
        assert_eq!(pde.state_distance(&[1.0, 1.0, 1.0, 1.0], &w), 2.0);
    }

    #[test]
    fn power_product_gap_is_nonnegative() {
        for &(a, b) in &[
            (1.0, 1.0),
            (2.0, -3.0),
            (0.0, 5.0),
            (-0.5, -0.25),
            (7.0, 0.1),
        ] {
            for p in [1.0, 1.5, 2.0, 3.0, 8.0] {
                let g = power_product_gap(a, b, p);
                assert!(
                    g >= -1e-12 * (a.abs().powf(p) + b.abs().powf(p)),
                    "{a} {b} {p}: {g}"
                );
            }
        }
        assert_eq!(power_product_gap(1.0, 1.0, 3.0), 0.0);
        assert_eq!(power_product_gap(0.0, 2.0, 1.5), 2f64.powf(1.5));
    }
}
