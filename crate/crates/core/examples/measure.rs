//! Logarithmic norms of one matrix in several weighted norms.
//!
//!     cargo run --example measure

use diffcon::lognorm::{mu_closed_form, mu_estimate, mu_weighted, MeasureMethod};
use diffcon::{DenseMatrix, Lp, WeightedNorm};

fn main() -> diffcon::Result<()> {
    let a = DenseMatrix::from_rows(&[[-3.0, 2.0, 0.0], [0.5, -1.0, 1.0], [0.0, 4.0, -6.0]])?;

    for p in [Lp::ONE, Lp::TWO, Lp::INF] {
        println!("mu_{p}(A) = {:+.6}", mu_closed_form(&a, p)?);
    }

    // no closed form at p = 3; both estimators give lower bounds
    for method in [MeasureMethod::SemiInner, MeasureMethod::HQuotient] {
        let r = mu_estimate(&a, 3.0, method)?;
        println!("mu_3(A) ~ {:+.6} ({method:?})", r.value);
    }

    let w = WeightedNorm::new(Lp::ONE, vec![1.0, 2.0, 1.0])?;
    println!("mu_1,diag(1,2,1)(A) = {:+.6}", mu_weighted(&a, &w)?.value);
    Ok(())
}
