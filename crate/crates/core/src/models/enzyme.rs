//! Enzyme `X` produced at rate `z`, degraded at rate `δ`, and reversibly bound
//! to a substrate `S` into a complex `Y`:
//!
//! ```text
//! 0 --z--> X --δ--> 0,      X + S <==k2/k1==> Y
//! ```
//!
//! The full state is `(x, y, s)`. Since `y + s` is conserved (and equals the
//! total substrate `S_Y`), the reduced model works in `(x, y)` on
//! `V = [0, ∞) × [0, S_Y]`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{BoxDomain, VectorField};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// Rate constants of the binding model. All must be strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnzymeParams {
    /// Production rate of the enzyme (external signal).
    pub z: f64,
    /// Degradation/dilution rate.
    pub delta: f64,
    /// Unbinding rate of the complex.
    pub k1: f64,
    /// Binding rate.
    pub k2: f64,
    /// Total substrate, free plus bound.
    pub s_y: f64,
}

impl EnzymeParams {
    pub fn new(z: f64, delta: f64, k1: f64, k2: f64, s_y: f64) -> Result<Self> {
        let p = Self {
            z,
            delta,
            k1,
            k2,
            s_y,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("z", self.z),
            ("delta", self.delta),
            ("k1", self.k1),
            ("k2", self.k2),
            ("s_y", self.s_y),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter {
                    name: name.into(),
                    reason: format!("must be finite and > 0, got {v}"),
                });
            }
        }
        Ok(())
    }

    /// `a = k2 (S_Y − y)`, the entry coupling `y` into `x`'s column.
    pub fn a(&self, y: f64) -> f64 {
        self.k2 * (self.s_y - y)
    }

    /// `b = k1 + k2 x`.
    pub fn b(&self, x: f64) -> f64 {
        self.k1 + self.k2 * x
    }

    /// `x` at which `b(x) = b`.
    pub fn x_for_b(&self, b: f64) -> f64 {
        (b - self.k1) / self.k2
    }
}

impl Default for EnzymeParams {
    fn default() -> Self {
        Self {
            z: 1.0,
            delta: 1.0,
            k1: 1.0,
            k2: 1.0,
            s_y: 2.0,
        }
    }
}

type Signal = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Reduced two-species model
/// `F(x, y) = (z − δx + k1 y − k2 (S_Y − y) x,  −k1 y + k2 (S_Y − y) x)`.
#[derive(Clone)]
pub struct EnzymeReduced {
    params: EnzymeParams,
    signal: Option<Signal>,
    domain: BoxDomain,
}

impl EnzymeReduced {
    pub fn new(params: EnzymeParams) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            params,
            signal: None,
            domain: BoxDomain::new(vec![0.0, 0.0], vec![f64::INFINITY, params.s_y])?,
        })
    }

    /// Replaces the constant production rate with a time-dependent `z(t) ≥ 0`.
    /// The Jacobian does not depend on `z`, so certificates are unaffected.
    pub fn with_signal(mut self, z: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.signal = Some(Arc::new(z));
        self
    }

    pub fn params(&self) -> &EnzymeParams {
        &self.params
    }

    fn z(&self, t: f64) -> f64 {
        self.signal.as_ref().map_or(self.params.z, |s| s(t))
    }
}

/// The reduced enzyme field for `params`.
pub fn enzyme_reduced(params: EnzymeParams) -> Result<EnzymeReduced> {
    EnzymeReduced::new(params)
}

impl VectorField for EnzymeReduced {
    fn name(&self) -> &str {
        "enzyme"
    }

    fn dim(&self) -> usize {
        2
    }

    fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    fn eval_into(&self, u: &[f64], t: f64, out: &mut [f64]) {
        let EnzymeParams {
            delta, k1, k2, s_y, ..
        } = self.params;
        let (x, y) = (u[0], u[1]);
        let binding = k2 * (s_y - y) * x;
        out[0] = self.z(t) - delta * x + k1 * y - binding;
        out[1] = -k1 * y + binding;
    }

    fn jacobian(&self, u: &[f64], _t: f64) -> DenseMatrix {
        let p = &self.params;
        let a = p.a(u[1]);
        let b = p.b(u[0]);
        DenseMatrix::new(2, 2, vec![-p.delta - a, b, a, -b]).expect("finite parameters")
    }

    fn is_time_varying(&self) -> bool {
        self.signal.is_some()
    }

    fn parameters(&self) -> serde_json::Value {
        serde_json::to_value(self.params).unwrap_or_default()
    }
}

/// Unreduced three-species model in `(x, y, s)` on `[0, ∞)³`.
#[derive(Debug, Clone)]
pub struct EnzymeFull {
    params: EnzymeParams,
    domain: BoxDomain,
}

impl EnzymeFull {
    pub fn new(params: EnzymeParams) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            params,
            domain: BoxDomain::new(vec![0.0; 3], vec![f64::INFINITY; 3])?,
        })
    }

    /// Full state `(x, y, S_Y − y)` matching a reduced state.
    pub fn lift(&self, reduced: &[f64]) -> Vec<f64> {
        vec![reduced[0], reduced[1], self.params.s_y - reduced[1]]
    }
}

impl VectorField for EnzymeFull {
    fn name(&self) -> &str {
        "enzyme-full"
    }

    fn dim(&self) -> usize {
        3
    }

    fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    fn eval_into(&self, u: &[f64], _t: f64, out: &mut [f64]) {
        let EnzymeParams {
            z, delta, k1, k2, ..
        } = self.params;
        let (x, y, s) = (u[0], u[1], u[2]);
        let binding = k2 * s * x;
        out[0] = z - delta * x + k1 * y - binding;
        out[1] = -k1 * y + binding;
        out[2] = k1 * y - binding;
    }

    fn jacobian(&self, u: &[f64], _t: f64) -> DenseMatrix {
        let EnzymeParams { delta, k1, k2, .. } = self.params;
        let (x, s) = (u[0], u[2]);
        DenseMatrix::new(
            3,
            3,
            vec![
                -delta - k2 * s,
                k1,
                -k2 * x,
                k2 * s,
                -k1,
                k2 * x,
                -k2 * s,
                k1,
                -k2 * x,
            ],
        )
        .expect("finite parameters")
    }

    fn parameters(&self) -> serde_json::Value {
        serde_json::to_value(self.params).unwrap_or_default()
    }
}

/// `max_t |y(t) + s(t) − S_Y|` along full-model states `(x, y, s)`, with
/// `S_Y` taken from the first state.
pub fn conservation_deviation(states: &[Vec<f64>]) -> f64 {
    let Some(first) = states.first() else {
        return 0.0;
    };
    let total = first[1] + first[2];
    states
        .iter()
        .map(|u| (u[1] + u[2] - total).abs())
        .fold(0.0, f64::max)
}

/// Conservation check on a simulated full-model trajectory.
pub fn enzyme_conservation_check(traj: &crate::sim::Trajectory) -> f64 {
    let states: Vec<Vec<f64>> = traj.states.iter().map(|s| s.to_vec()).collect();
    conservation_deviation(&states)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::check_jacobian;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params() -> EnzymeParams {
        EnzymeParams::new(0.7, 1.0, 1.0, 1.0, 2.0).unwrap()
    }

    #[test]
    fn binding_term_vanishes_when_saturated() {
        let f = EnzymeReduced::new(params()).unwrap();
        let v = f.eval(&[3.0, 2.0], 0.0);
        // (z − δx + k1 S_Y, −k1 S_Y)
        assert_eq!(v, vec![0.7 - 3.0 + 2.0, -2.0]);
    }

    #[test]
    fn jacobian_entries_and_column_sums() {
        let p = params();
        let f = EnzymeReduced::new(p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let x = rng.random_range(0.0..50.0);
            let y = rng.random_range(0.0..p.s_y);
            let j = f.jacobian(&[x, y], 0.0);
            let a = p.k2 * (p.s_y - y);
            let b = p.k1 + p.k2 * x;
            assert_eq!(j.to_rows(), vec![vec![-p.delta - a, b], vec![a, -b]]);
            assert!((j[(0, 0)] + j[(1, 0)] + p.delta).abs() < 1e-12);
            assert_eq!(j[(0, 1)] + j[(1, 1)], 0.0);
        }
    }

    #[test]
    fn jacobians_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let reduced = EnzymeReduced::new(params()).unwrap();
        assert!(check_jacobian(&reduced, 1000, 20.0, &mut rng).passes(1e-5));
        let full = EnzymeFull::new(params()).unwrap();
        assert!(check_jacobian(&full, 1000, 20.0, &mut rng).passes(1e-5));
    }

    #[test]
    fn conserved_quantity_has_zero_derivative() {
        let full = EnzymeFull::new(params()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let u: Vec<f64> = (0..3).map(|_| rng.random_range(0.0..10.0)).collect();
            let du = full.eval(&u, 0.0);
            assert!((du[1] + du[2]).abs() < 1e-12);
        }
        assert_eq!(conservation_deviation(&[vec![1.0, 0.5, 1.5]]), 0.0);
    }

    #[test]
    fn field_points_into_the_domain_on_its_faces() {
        let p = params();
        let f = EnzymeReduced::new(p).unwrap();
        for k in 0..=40 {
            let s = k as f64 / 40.0;
            // x = 0 face
            assert!(f.eval(&[0.0, s * p.s_y], 0.0)[0] >= 0.0);
            // y = 0 face
            assert!(f.eval(&[20.0 * s, 0.0], 0.0)[1] >= 0.0);
            // y = S_Y face
            assert!(f.eval(&[20.0 * s, p.s_y], 0.0)[1] < 0.0);
        }
    }

    #[test]
    fn rejects_nonpositive_parameters() {
        assert!(EnzymeParams::new(1.0, 0.0, 1.0, 1.0, 1.0).is_err());
        assert!(EnzymeParams::new(1.0, 1.0, 1.0, 1.0, f64::NAN).is_err());
    }
}
