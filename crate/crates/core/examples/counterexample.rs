//! A field contracting in the weighted 2-norm whose diffusive coupling is not
//! contracting in the weighted 1-norm: the exponent must match.
//!
//!     cargo run --example counterexample

use std::sync::Arc;

use diffcon::graphnet::{assemble_network, DiffusionMatrix, GraphLaplacian};
use diffcon::lognorm::mu_weighted;
use diffcon::models::{LinearField, VectorField};
use diffcon::{DenseMatrix, Lp, WeightedNorm};

fn main() -> diffcon::Result<()> {
    let a = DenseMatrix::from_rows(&[[-2.0, 1.0], [1.0, -2.0]])?;
    let q = vec![3.0, 1.0];
    let mu2 = mu_weighted(&a, &WeightedNorm::new(Lp::TWO, q.clone())?)?.value;
    println!("mu_2,Q(A) = {mu2:.6}");

    let f: Arc<dyn VectorField> = Arc::new(LinearField::new(a)?);
    let l = GraphLaplacian::path(2)?;
    let w = WeightedNorm::new(Lp::ONE, q.repeat(2))?;
    for d in [[0.1, 0.1], [1.0, 5.0], [10.0, 0.2]] {
        let net = assemble_network(f.clone(), &l, &DiffusionMatrix::new(d.to_vec())?)?;
        let j = net.jacobian(&[0.0; 4], 0.0);
        println!(
            "d = {d:?}: mu_1,Q(F - L x D) = {}",
            mu_weighted(&j, &w)?.value
        );
    }
    Ok(())
}
