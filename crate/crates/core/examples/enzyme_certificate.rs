//! Weighted L¹ contraction certificate for the reduced enzyme model, and the
//! refusal with identity weights.
//!
//!     cargo run --example enzyme_certificate

use diffcon::certify::issue_certificate;
use diffcon::lognorm::GridSpec;
use diffcon::models::{EnzymeParams, EnzymeReduced};
use diffcon::{Lp, WeightedNorm};

fn main() -> diffcon::Result<()> {
    let f = EnzymeReduced::new(EnzymeParams::default())?;
    let grid = GridSpec::default().with_points(65);

    let w = WeightedNorm::new(Lp::ONE, vec![1.0, 1.25])?;
    let cert = issue_certificate(&f, &w, &grid)?;
    println!("{}: rate {:+.6} ({})", cert.model, cert.rate, cert.verdict);
    println!("worst point {:?}", cert.evidence.argmax_point.as_slice());
    println!("{}", cert.diffusion_note);

    let identity = WeightedNorm::unweighted(Lp::ONE, 2);
    match issue_certificate(&f, &identity, &grid) {
        Ok(c) => println!("unexpected certificate with rate {}", c.rate),
        Err(e) => println!("Q = I: {e}"),
    }
    Ok(())
}
