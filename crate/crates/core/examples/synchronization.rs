//! Synchronization of identical compartments: the stacked pairwise distance
//! W(t) decays at sup mu(J - lambda_2 D).
//!
//!     cargo run --example synchronization

use std::sync::Arc;

use diffcon::graphnet::{lambda2, DiffusionMatrix, GraphLaplacian};
use diffcon::lognorm::GridSpec;
use diffcon::models::{LinearField, VectorField};
use diffcon::sim::{verify_sync, Settings};
use diffcon::{DenseMatrix, Lp, WeightedNorm};

fn main() -> diffcon::Result<()> {
    let a = DenseMatrix::from_rows(&[[-2.0, 1.0], [1.0, -2.0]])?;
    let f: Arc<dyn VectorField> = Arc::new(LinearField::new(a)?);
    let d = DiffusionMatrix::new(vec![0.5, 1.5])?;
    let w = WeightedNorm::unweighted(Lp::TWO, 2);

    for l in [
        GraphLaplacian::path(2)?,
        GraphLaplacian::complete(3)?,
        GraphLaplacian::path(3)?,
    ] {
        let u0: Vec<f64> = (0..l.n_nodes())
            .flat_map(|i| [i as f64, 2.0 - i as f64])
            .collect();
        let r = verify_sync(
            f.clone(),
            &l,
            &d,
            &w,
            &u0,
            &Settings::new(5.0, 0.01),
            &GridSpec::default(),
        )?;
        println!(
            "{:<11} lambda_2 = {:.3}  c = {:+.3}  W(0) = {:.3}  W(5) = {:.3e}  bound ok: {}",
            l.label(),
            lambda2(&l)?,
            r.rate_c,
            r.series[0].value,
            r.series.last().map_or(0.0, |s| s.value),
            r.bound_ok
        );
    }
    Ok(())
}
