use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigenvalues, DenseMatrix, Lp};

/// Closed-form logarithmic norm for `p ∈ {1, 2, ∞}`:
///
/// * `μ₁(A) = max_j (a_jj + Σ_{i≠j} |a_ij|)`
/// * `μ₂(A) = λ_max((A + Aᵀ)/2)`
/// * `μ∞(A) = max_i (a_ii + Σ_{j≠i} |a_ij|)`
///
/// Off-diagonal magnitudes are summed before the diagonal is added, in index
/// order, so a matrix whose diagonal is the negated off-diagonal row sum has
/// measure exactly zero.
pub fn mu_closed_form(a: &DenseMatrix, p: Lp) -> Result<f64> {
    let n = a.ensure_square()?;
    if n == 0 {
        return Ok(0.0);
    }
    match p {
        Lp::Infinity => Ok(max_over(n, |i| {
            let off: f64 = (0..n).filter(|&j| j != i).map(|j| a[(i, j)].abs()).sum();
            a[(i, i)] + off
        })),
        Lp::Finite(1.0) => Ok(max_over(n, |j| {
            let off: f64 = (0..n).filter(|&i| i != j).map(|i| a[(i, j)].abs()).sum();
            a[(j, j)] + off
        })),
        Lp::Finite(2.0) => {
            let values = symmetric_eigenvalues(&a.symmetric_part()?)?;
            Ok(*values.last().expect("n > 0"))
        }
        other => Err(Error::UnsupportedExponent {
            p: other.to_string(),
            required: "p in {1, 2, inf} (use mu_estimate otherwise)",
        }),
    }
}

fn max_over(n: usize, f: impl Fn(usize) -> f64) -> f64 {
    (0..n).map(f).fold(f64::NEG_INFINITY, f64::max)
}
