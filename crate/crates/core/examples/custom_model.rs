//! Registering a user model and certifying it. Without an analytic Jacobian
//! the certificate first checks finite differences.
//!
//!     cargo run --example custom_model

use std::sync::Arc;

use diffcon::certify::issue_certificate;
use diffcon::lognorm::GridSpec;
use diffcon::models::{BoxDomain, FnField, ModelRegistry, ModelSpec, VectorField};
use diffcon::{DenseMatrix, Lp, WeightedNorm};

fn main() -> diffcon::Result<()> {
    let mut registry = ModelRegistry::default();
    registry.register("damped", |p| {
        let k = p.get("k").and_then(|v| v.as_f64()).unwrap_or(1.0);
        let domain = BoxDomain::new(vec![-5.0, -5.0], vec![5.0, 5.0])?;
        // x' = -k x + sin y, y' = -2y
        let field = FnField::new("damped", domain, move |u, _t, out| {
            out[0] = -k * u[0] + u[1].sin();
            out[1] = -2.0 * u[1];
        })
        .with_jacobian(move |u, _t| {
            DenseMatrix::from_rows(&[[-k, u[1].cos()], [0.0, -2.0]]).expect("finite")
        });
        Ok(Arc::new(field) as Arc<dyn VectorField>)
    });

    let f = registry.build(&ModelSpec::new("damped").with("k", 3.0))?;
    let w = WeightedNorm::new(Lp::INF, vec![1.0, 2.0])?;
    let cert = issue_certificate(f.as_ref(), &w, &GridSpec::default())?;
    println!("rate {:+.4} in {:?}", cert.rate, cert.norm.q);
    println!("{}", cert.caveat);
    Ok(())
}
