//! For p > 1 no weight diag(1, q) certifies the enzyme model: print a point
//! where the weighted measure is positive for a spread of q.
//!
//!     cargo run --example impossibility

use diffcon::certify::{impossibility_search, DEFAULT_B_CAP};
use diffcon::models::EnzymeParams;
use diffcon::Lp;

fn main() -> diffcon::Result<()> {
    let params = EnzymeParams::default();
    println!(
        "{:>5} {:>8} {:>12} {:>12} {:>12}",
        "p", "q", "b", "lower", "mu"
    );
    for p in [Lp::Finite(1.5), Lp::TWO, Lp::Finite(4.0), Lp::INF] {
        for q in [0.01, 1.0, 100.0] {
            let w = impossibility_search(&params, p, q, DEFAULT_B_CAP)?;
            println!(
                "{:>5} {:>8} {:>12.4e} {:>12.4e} {:>12.4e}",
                p.to_string(),
                q,
                w.b,
                w.lower_bound,
                w.estimated_measure
            );
        }
    }
    Ok(())
}
