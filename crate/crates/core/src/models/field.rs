use std::sync::Arc;

use rand::Rng;

use super::BoxDomain;
use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, WeightedNorm};

/// Where a field's Jacobian comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JacobianKind {
    Analytic,
    FiniteDifference,
}

/// A (possibly time-dependent) reaction field `F(x, t)` on a convex box.
pub trait VectorField: Send + Sync {
    fn name(&self) -> &str;

    fn dim(&self) -> usize;

    fn domain(&self) -> &BoxDomain;

    /// Writes `F(x, t)` into `out`. Sizes are the caller's responsibility.
    fn eval_into(&self, x: &[f64], t: f64, out: &mut [f64]);

    fn jacobian(&self, x: &[f64], t: f64) -> DenseMatrix;

    fn is_time_varying(&self) -> bool {
        false
    }

    fn jacobian_kind(&self) -> JacobianKind {
        JacobianKind::Analytic
    }

    /// Model parameters for provenance records.
    fn parameters(&self) -> serde_json::Value {
        serde_json::Value::Null
    }

    /// Largest explicit step the field tolerates, if it imposes one.
    fn max_stable_dt(&self) -> Option<f64> {
        None
    }

    /// Distance between two states in the norm a contraction bound is stated in.
    fn state_distance(&self, diff: &[f64], w: &WeightedNorm) -> f64 {
        w.norm_unchecked(diff)
    }

    /// Whether [`VectorField::state_distance`] is defined for `w`.
    fn accepts_norm(&self, w: &WeightedNorm) -> bool {
        w.dim() == self.dim()
    }

    fn eval(&self, x: &[f64], t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.eval_into(x, t, &mut out);
        out
    }
}

/// `F(x) = A x` on the whole space (or a given box).
#[derive(Debug, Clone)]
pub struct LinearField {
    a: DenseMatrix,
    domain: BoxDomain,
}

impl LinearField {
    pub fn new(a: DenseMatrix) -> Result<Self> {
        let n = a.ensure_square()?;
        Ok(Self {
            a,
            domain: BoxDomain::whole_space(n),
        })
    }

    pub fn with_domain(a: DenseMatrix, domain: BoxDomain) -> Result<Self> {
        let n = a.ensure_square()?;
        if domain.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: domain.dim(),
            });
        }
        Ok(Self { a, domain })
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.a
    }
}

impl VectorField for LinearField {
    fn name(&self) -> &str {
        "linear"
    }

    fn dim(&self) -> usize {
        self.a.rows()
    }

    fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    fn eval_into(&self, x: &[f64], _t: f64, out: &mut [f64]) {
        self.a.matvec_into(x, out);
    }

    fn jacobian(&self, _x: &[f64], _t: f64) -> DenseMatrix {
        self.a.clone()
    }

    fn parameters(&self) -> serde_json::Value {
        serde_json::json!({ "a": self.a.to_rows() })
    }
}

/// `F(x, t) + S x` for a constant matrix `S`; used for shifted Jacobians
/// such as `J_F − λD`.
#[derive(Clone)]
pub struct ShiftedField {
    inner: Arc<dyn VectorField>,
    shift: DenseMatrix,
    name: String,
}

impl ShiftedField {
    pub fn new(inner: Arc<dyn VectorField>, shift: DenseMatrix) -> Result<Self> {
        let n = shift.ensure_square()?;
        if n != inner.dim() {
            return Err(Error::DimensionMismatch {
                expected: inner.dim(),
                found: n,
            });
        }
        let name = format!("{}+shift", inner.name());
        Ok(Self { inner, shift, name })
    }
}

impl VectorField for ShiftedField {
    fn name(&self) -> &str {
        &self.name
    }

    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn domain(&self) -> &BoxDomain {
        self.inner.domain()
    }

    fn eval_into(&self, x: &[f64], t: f64, out: &mut [f64]) {
        self.inner.eval_into(x, t, out);
        for (i, o) in out.iter_mut().enumerate() {
            *o += self
                .shift
                .row(i)
                .iter()
                .zip(x)
                .map(|(a, b)| a * b)
                .sum::<f64>();
        }
    }

    fn jacobian(&self, x: &[f64], t: f64) -> DenseMatrix {
        self.inner
            .jacobian(x, t)
            .add(&self.shift)
            .expect("shift dimension checked at construction")
    }

    fn is_time_varying(&self) -> bool {
        self.inner.is_time_varying()
    }

    fn jacobian_kind(&self) -> JacobianKind {
        self.inner.jacobian_kind()
    }

    fn parameters(&self) -> serde_json::Value {
        serde_json::json!({ "inner": self.inner.parameters(), "shift": self.shift.to_rows() })
    }
}

type EvalFn = dyn Fn(&[f64], f64, &mut [f64]) + Send + Sync;
type JacFn = dyn Fn(&[f64], f64) -> DenseMatrix + Send + Sync;

/// A field built from closures. Without a Jacobian closure the Jacobian is
/// taken by central differences and the field reports
/// [`JacobianKind::FiniteDifference`].
#[derive(Clone)]
pub struct FnField {
    name: String,
    domain: BoxDomain,
    eval: Arc<EvalFn>,
    jacobian: Option<Arc<JacFn>>,
    time_varying: bool,
}

impl FnField {
    pub fn new(
        name: impl Into<String>,
        domain: BoxDomain,
        eval: impl Fn(&[f64], f64, &mut [f64]) + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            domain,
            eval: Arc::new(eval),
            jacobian: None,
            time_varying: false,
        }
    }

    pub fn with_jacobian(
        mut self,
        jacobian: impl Fn(&[f64], f64) -> DenseMatrix + Send + Sync + 'static,
    ) -> Self {
        self.jacobian = Some(Arc::new(jacobian));
        self
    }

    pub fn time_varying(mut self) -> Self {
        self.time_varying = true;
        self
    }
}

impl VectorField for FnField {
    fn name(&self) -> &str {
        &self.name
    }

    fn dim(&self) -> usize {
        self.domain.dim()
    }

    fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    fn eval_into(&self, x: &[f64], t: f64, out: &mut [f64]) {
        (self.eval)(x, t, out)
    }

    fn jacobian(&self, x: &[f64], t: f64) -> DenseMatrix {
        match &self.jacobian {
            Some(j) => j(x, t),
            None => finite_difference_jacobian_impl(self, x, t, FdStencil::Central),
        }
    }

    fn is_time_varying(&self) -> bool {
        self.time_varying
    }

    fn jacobian_kind(&self) -> JacobianKind {
        if self.jacobian.is_some() {
            JacobianKind::Analytic
        } else {
            JacobianKind::FiniteDifference
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum FdStencil {
    Central,
    FivePoint,
}

/// Central-difference Jacobian with per-axis step `1e-6 · max(1, |x_j|)`.
pub fn finite_difference_jacobian(
    f: &(impl VectorField + ?Sized),
    x: &[f64],
    t: f64,
) -> DenseMatrix {
    finite_difference_jacobian_impl(f, x, t, FdStencil::Central)
}

pub(crate) fn finite_difference_jacobian_impl(
    f: &(impl VectorField + ?Sized),
    x: &[f64],
    t: f64,
    stencil: FdStencil,
) -> DenseMatrix {
    let n = f.dim();
    let mut jac = DenseMatrix::zeros(n, n);
    let mut xp = x.to_vec();
    let mut buf = vec![vec![0.0; n]; 4];
    for j in 0..n {
        let h = match stencil {
            FdStencil::Central => 1e-6,
            FdStencil::FivePoint => 1e-3,
        } * x[j].abs().max(1.0);
        let mut at = |offset: f64, out: &mut Vec<f64>| {
            xp[j] = x[j] + offset;
            f.eval_into(&xp, t, out);
        };
        match stencil {
            FdStencil::Central => {
                let (a, rest) = buf.split_at_mut(1);
                at(h, &mut a[0]);
                at(-h, &mut rest[0]);
                for i in 0..n {
                    jac[(i, j)] = (a[0][i] - rest[0][i]) / (2.0 * h);
                }
            }
            FdStencil::FivePoint => {
                let [b0, b1, b2, b3] = &mut buf[..] else {
                    unreachable!()
                };
                at(2.0 * h, b0);
                at(h, b1);
                at(-h, b2);
                at(-2.0 * h, b3);
                for i in 0..n {
                    jac[(i, j)] = (-b0[i] + 8.0 * b1[i] - 8.0 * b2[i] + b3[i]) / (12.0 * h);
                }
            }
        }
        xp[j] = x[j];
    }
    jac
}

/// Outcome of comparing a field's Jacobian against a difference reference.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobianCheck {
    /// Largest `‖J − J_ref‖_max / max(1, ‖J_ref‖_max)` over the sample.
    pub max_error: f64,
    pub worst_point: Vec<f64>,
    pub points: usize,
}

impl JacobianCheck {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_error <= tol
    }
}

/// Compares `f.jacobian` with a difference reference at random interior
/// points. Analytic Jacobians are checked against central differences;
/// finite-difference Jacobians against a five-point stencil.
pub fn check_jacobian<R: Rng>(
    f: &dyn VectorField,
    samples: usize,
    cap: f64,
    rng: &mut R,
) -> JacobianCheck {
    let stencil = match f.jacobian_kind() {
        JacobianKind::Analytic => FdStencil::Central,
        JacobianKind::FiniteDifference => FdStencil::FivePoint,
    };
    let mut worst = JacobianCheck {
        max_error: 0.0,
        worst_point: Vec::new(),
        points: samples,
    };
    for _ in 0..samples {
        let x = f.domain().sample_interior(rng, cap);
        let t = if f.is_time_varying() {
            rng.random_range(0.0..cap)
        } else {
            0.0
        };
        let j = f.jacobian(&x, t);
        let reference = finite_difference_jacobian_impl(f, &x, t, stencil);
        let scale = reference.max_abs().max(1.0);
        let err = j
            .sub(&reference)
            .map(|d| d.max_abs())
            .unwrap_or(f64::INFINITY)
            / scale;
        if err > worst.max_error || worst.worst_point.is_empty() {
            worst.max_error = err.max(worst.max_error);
            worst.worst_point = x;
        }
    }
    worst
}
