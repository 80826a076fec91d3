//! Enzyme compartments coupled along a path and a triangle.
//!
//!     cargo run --example network_contraction

use std::sync::Arc;

use diffcon::graphnet::{assemble_network, DiffusionMatrix, GraphLaplacian};
use diffcon::models::{EnzymeParams, EnzymeReduced, VectorField};
use diffcon::sim::{verify_contraction, Settings};
use diffcon::{Lp, WeightedNorm};

fn main() -> diffcon::Result<()> {
    let f: Arc<dyn VectorField> = Arc::new(EnzymeReduced::new(EnzymeParams::default())?);
    let w = WeightedNorm::new(Lp::ONE, vec![1.0, 1.25])?;
    let d = DiffusionMatrix::new(vec![0.3, 2.0])?;
    let u0 = [0.1, 1.9, 3.0, 0.2, 1.0, 1.0];
    let v0 = [2.0, 0.1, 0.5, 1.5, 4.0, 0.7];

    for l in [GraphLaplacian::path(3)?, GraphLaplacian::complete(3)?] {
        let net = assemble_network(f.clone(), &l, &d)?;
        let r = verify_contraction(&net, &u0, &v0, &w, -0.2, &Settings::new(20.0, 0.01))?;
        println!(
            "{}: worst ratio {:.4} at t = {:.2}, Dini ok: {}",
            l.label(),
            r.worst.ratio,
            r.worst.t,
            r.dini_ok
        );
        for s in r.series.iter().step_by(400) {
            println!(
                "  t = {:5.2}  distance {:.4e}  envelope {:.4e}",
                s.t, s.value, s.envelope
            );
        }
    }
    Ok(())
}
