use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, Lp, WeightedNorm};
use crate::lognorm::mu_weighted;
use crate::models::EnzymeParams;

/// Largest `b = k1 + k2 x` the witness scan will try.
///
/// Thresholds grow like `q^{p/(p−1)}`, so `p` close to one with large `q`
/// needs values well beyond `1e6` (for `p = 1.5`, `q = 100` the threshold
/// is about `6.75e6`).
pub const DEFAULT_B_CAP: f64 = 1e9;

/// A point of the enzyme domain where `μ_{p,Q}(J) > 0` for `Q = diag(1, q)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpossibilityWitness {
    pub p: Lp,
    pub q: f64,
    /// `(x, y)` with `y = S_Y`, so that `a = 0`.
    pub point: [f64; 2],
    pub a: f64,
    pub b: f64,
    /// Unweighted direction `v` whose flow grows in the weighted norm.
    pub direction: [f64; 2],
    /// `d/dt ‖v(t)‖^p` at `t = 0` for `v' = QJQ⁻¹ v`, finite `p` only.
    pub derivative_at_zero: Option<f64>,
    /// Proven lower bound on `μ_{p,Q}(J)` at the witness point.
    pub lower_bound: f64,
    /// Numerical `μ_{p,Q}(J)` at the witness point.
    pub estimated_measure: f64,
    pub b_cap: f64,
}

/// Finds a point of the enzyme domain where the weighted logarithmic norm is
/// positive, showing that `diag(1, q)` cannot certify contraction in `L^p`.
///
/// With `a = 0` the weighted Jacobian is `[[−δ, b/q], [0, −b]]`. For finite
/// `p > 1` the direction `(1, λ)` with `λ = (pq)^{−1/(p−1)}` gives
/// `d/dt ‖v‖^p = p(bλ/q − bλ^p − δ)`, positive once `b` is large enough.
/// For `p = ∞` the first row sum `−δ + b/q` decides. `b` doubles from `k1`
/// until positive or past `b_cap`.
pub fn impossibility_search(
    params: &EnzymeParams,
    p: Lp,
    q: f64,
    b_cap: f64,
) -> Result<ImpossibilityWitness> {
    params.validate()?;
    if !(q.is_finite() && q > 0.0) {
        return Err(Error::InvalidWeight(format!(
            "q must be finite and > 0, got {q}"
        )));
    }
    if !(b_cap.is_finite() && b_cap > 0.0) {
        return Err(Error::InvalidParameter {
            name: "b_cap".into(),
            reason: format!("must be finite and > 0, got {b_cap}"),
        });
    }
    if p == Lp::ONE {
        return Err(Error::UnsupportedExponent {
            p: "1".into(),
            required: "p > 1",
        });
    }
    let delta = params.delta;
    let a = 0.0;

    let (direction, lambda) = match p {
        Lp::Infinity => ([1.0, 1.0], 1.0),
        Lp::Finite(pv) => {
            let l = (pv * q).powf(-1.0 / (pv - 1.0));
            ([1.0, l], l)
        }
    };
    // bound(b) is the semi inner product quotient at `direction`
    let bound = |b: f64| -> (Option<f64>, f64) {
        match p {
            Lp::Infinity => (None, (-delta - a + b / q).max(-b + a * q)),
            Lp::Finite(pv) => {
                let lp = lambda.powf(pv);
                let deriv =
                    pv * (b * lambda / q - a) * (1.0 - lambda.powf(pv - 1.0) * q) - pv * delta;
                (Some(deriv), deriv / (pv * (1.0 + lp)))
            }
        }
    };

    let mut b = params.k1;
    loop {
        if b > b_cap {
            return Err(Error::CapExceeded { b_cap });
        }
        let (deriv, lower) = bound(b);
        if lower > 0.0 {
            let x = params.x_for_b(b);
            let y = params.s_y;
            let j = DenseMatrix::new(2, 2, vec![-delta - a, b, a, -b])?;
            let w = WeightedNorm::new(p, vec![1.0, q])?;
            let estimated = mu_weighted(&j, &w)?.value;
            return Ok(ImpossibilityWitness {
                p,
                q,
                point: [x, y],
                a,
                b,
                direction,
                derivative_at_zero: deriv,
                lower_bound: lower,
                estimated_measure: estimated,
                b_cap,
            });
        }
        b *= 2.0;
    }
}
