//! Searches diagonal weights for the enzyme model at p = 1 and p = 2.
//!
//!     cargo run --example weight_search

use diffcon::certify::{search_weights, WeightSpace};
use diffcon::lognorm::GridSpec;
use diffcon::models::{EnzymeParams, EnzymeReduced};
use diffcon::Lp;

fn main() -> diffcon::Result<()> {
    let f = EnzymeReduced::new(EnzymeParams::default())?;
    let grid = GridSpec::default();
    let space = WeightSpace::log_spaced(1e-2, 1e2, 41)?;

    for p in [Lp::ONE, Lp::TWO] {
        let s = search_weights(&f, p, &grid, &space)?;
        println!(
            "p = {p}: best q = {:?}, rate {:+.4} after {} evaluations ({}){}",
            s.norm.q,
            s.rate,
            s.evaluated,
            s.strategy,
            if s.certificate.is_some() {
                ", certified"
            } else {
                ""
            }
        );
    }
    Ok(())
}
