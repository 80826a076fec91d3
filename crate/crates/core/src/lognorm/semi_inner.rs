use crate::error::{Error, Result};
use crate::linalg::sphere::dual_power;
use crate::linalg::{check_finite, check_len, p_norm, Lp, WeightedNorm};

const QUOTIENT_STEP: f64 = 1e-8;
const MAX_HALVINGS: usize = 30;

/// Right semi inner product `(x, y)_+ = ‖x‖ lim_{h→0⁺} (‖x + hy‖ − ‖x‖)/h`
/// in the norm `‖·‖_{p,Q}`.
///
/// For `1 < p < ∞` the limit has the closed form
/// `‖x̃‖^{2−p} Σ |x̃_i|^{p−2} x̃_i ỹ_i` with `x̃ = Qx`, `ỹ = Qy`. For `p = 1`
/// and `p = ∞` it is a one-sided difference quotient at `h = 1e-8` (relative
/// to `‖x‖/‖y‖`), halved until two successive quotients agree.
pub fn semi_inner_plus(x: &[f64], y: &[f64], w: &WeightedNorm) -> Result<f64> {
    check_len(x, w.dim())?;
    check_len(y, w.dim())?;
    check_finite(x, "x")?;
    check_finite(y, "y")?;
    let xt = w.apply(x);
    let yt = w.apply(y);
    let nx = p_norm(&xt, w.p);
    if nx == 0.0 {
        return Err(Error::InvalidParameter {
            name: "x".into(),
            reason: "semi inner product needs x != 0".into(),
        });
    }
    let ny = p_norm(&yt, w.p);
    if ny == 0.0 {
        return Ok(0.0);
    }
    match w.p {
        Lp::Finite(p) if p > 1.0 => {
            let s: f64 = xt
                .iter()
                .zip(&yt)
                .map(|(a, b)| dual_power(a / nx, p) * b)
                .sum();
            Ok(nx * s)
        }
        _ => {
            let quotient = |h: f64| one_sided_quotient(&xt, &yt, nx, w.p, h);
            let mut h = QUOTIENT_STEP * nx / ny;
            let mut q = quotient(h);
            for _ in 0..MAX_HALVINGS {
                let half = quotient(h / 2.0);
                let agreed = (half - q).abs() <= 1e-9 * ny;
                q = half;
                h /= 2.0;
                if agreed {
                    break;
                }
            }
            Ok(nx * q)
        }
    }
}

/// `(‖x + hy‖ − ‖x‖)/h` for `p ∈ {1, ∞}`, using
/// `|x_i + hy_i| − |x_i| = hy_i (2x_i + hy_i) / (|x_i + hy_i| + |x_i|)`.
fn one_sided_quotient(x: &[f64], y: &[f64], nx: f64, p: Lp, h: f64) -> f64 {
    let diff = |xi: f64, yi: f64| {
        let moved = xi + h * yi;
        let den = moved.abs() + xi.abs();
        if den == 0.0 {
            0.0
        } else {
            h * yi * (2.0 * xi + h * yi) / den
        }
    };
    match p {
        Lp::Infinity => {
            let top = x
                .iter()
                .zip(y)
                .map(|(&xi, &yi)| diff(xi, yi) + (xi.abs() - nx))
                .fold(f64::NEG_INFINITY, f64::max);
            top / h
        }
        _ => x.iter().zip(y).map(|(&xi, &yi)| diff(xi, yi)).sum::<f64>() / h,
    }
}
