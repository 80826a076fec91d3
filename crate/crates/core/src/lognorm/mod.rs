//! Logarithmic norms `μ_{p,Q}(A) = lim_{h→0⁺} (‖I + hA‖_{p,Q} − 1)/h`,
//! semi inner products, and logarithmic Lipschitz constants of vector fields.
//!
//! `p ∈ {1, 2, ∞}` have closed forms. Other exponents go through one of two
//! estimators, both of which approach the true value from below.

mod closed;
mod estimate;
mod lipschitz;
mod semi_inner;

pub use closed::mu_closed_form;
pub use estimate::{difference_quotient, mu_difference_quotient, mu_estimate, mu_estimate_with};
pub use lipschitz::{
    lipschitz_constant, lipschitz_constant_with, GridSpec, LipschitzEstimate, TimeSampling,
};
pub use semi_inner::semi_inner_plus;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::{check_len, AscentOptions, DenseMatrix, Lp, WeightedNorm};

/// Which general-p estimator to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureMethod {
    /// Maximize `(‖x + hAx‖/‖x‖ − 1)/h` on a dyadic sequence of `h`.
    HQuotient,
    /// Maximize `Σ |x_i|^{p−2} x_i (Ax)_i / ‖x‖_p^p` on the unit sphere.
    #[default]
    SemiInner,
}

/// Estimator settings for exponents without a closed form.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct MeasureOptions {
    pub method: MeasureMethod,
    pub ascent: AscentOptions,
}

/// A logarithmic norm value with its provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureResult {
    pub value: f64,
    pub p: Lp,
    /// `true` for closed forms, `false` for estimates.
    pub exact: bool,
    /// `(h, quotient)` pairs, largest `h` first. Empty unless the
    /// h-quotient estimator produced the value.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub h_trace: Vec<(f64, f64)>,
}

/// `μ_{p,Q}(A) = μ_p(QAQ⁻¹)` with default estimator settings.
pub fn mu_weighted(a: &DenseMatrix, w: &WeightedNorm) -> Result<MeasureResult> {
    mu_weighted_with(a, w, &MeasureOptions::default())
}

pub fn mu_weighted_with(
    a: &DenseMatrix,
    w: &WeightedNorm,
    opts: &MeasureOptions,
) -> Result<MeasureResult> {
    let n = a.ensure_square()?;
    check_len(&w.q, n)?;
    let similar = if w.q.iter().all(|&q| q == 1.0) {
        a.clone()
    } else {
        a.diag_similarity(&w.q)?
    };
    if w.p.has_closed_form() {
        Ok(MeasureResult {
            value: mu_closed_form(&similar, w.p)?,
            p: w.p,
            exact: true,
            h_trace: Vec::new(),
        })
    } else {
        mu_estimate_with(&similar, w.p.value(), opts)
    }
}
