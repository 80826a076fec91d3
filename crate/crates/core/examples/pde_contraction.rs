//! Two solutions of the enzyme reaction-diffusion equation on [0, 1] with
//! no-flux boundaries approach each other at the certified rate, whatever
//! the diffusion coefficients.
//!
//!     cargo run --release --example pde_contraction

use std::sync::Arc;

use diffcon::graphnet::{discretize_pde, DiffusionMatrix, SpatialGrid};
use diffcon::lognorm::{lipschitz_constant, GridSpec};
use diffcon::models::{EnzymeParams, EnzymeReduced, VectorField};
use diffcon::sim::{verify_contraction, Settings};
use diffcon::{Lp, WeightedNorm};

fn main() -> diffcon::Result<()> {
    let f: Arc<dyn VectorField> = Arc::new(EnzymeReduced::new(EnzymeParams::default())?);
    let w = WeightedNorm::new(Lp::ONE, vec![1.0, 1.25])?;
    let c = lipschitz_constant(f.as_ref(), &w, &GridSpec::default())?.value;
    let grid = SpatialGrid::new(1.0, 32)?;

    // a smooth and a rough profile
    let u0: Vec<f64> = grid
        .centers()
        .iter()
        .flat_map(|&s| [1.0 + s, 0.5])
        .collect();
    let v0: Vec<f64> = (0..grid.cells)
        .flat_map(|k| [if k % 2 == 0 { 4.0 } else { 0.2 }, 1.9 - 0.05 * k as f64])
        .collect();

    for d in [0.01, 0.1, 1.0] {
        let sys = discretize_pde(f.clone(), &DiffusionMatrix::uniform(2, d)?, &grid)?;
        let dt = sys.max_stable_dt().map_or(0.01, |m| m.min(0.01));
        let r = verify_contraction(&sys, &u0, &v0, &w, c, &Settings::new(10.0, dt))?;
        let last = r.series.last().expect("non-empty series");
        println!(
            "d = {d:<5} dt = {dt:.2e}  |u-v|(10) = {:.3e}  envelope {:.3e}  bound ok: {}",
            last.value, last.envelope, r.bound_ok
        );
    }
    Ok(())
}
