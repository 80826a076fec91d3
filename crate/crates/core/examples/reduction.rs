//! The three-species enzyme model conserves total substrate, and on that
//! manifold it is the reduced two-species model.
//!
//!     cargo run --example reduction

use diffcon::models::{enzyme_conservation_check, EnzymeFull, EnzymeParams, EnzymeReduced};
use diffcon::sim::integrate;

fn main() -> diffcon::Result<()> {
    let params = EnzymeParams::default();
    let full = EnzymeFull::new(params)?;
    let reduced = EnzymeReduced::new(params)?;

    let u0 = [3.0, 0.4];
    let a = integrate(&full, &full.lift(&u0), 10.0, 0.01)?;
    let b = integrate(&reduced, &u0, 10.0, 0.01)?;

    let gap = a
        .states
        .iter()
        .zip(&b.states)
        .map(|(x, y)| (x[0] - y[0]).abs().max((x[1] - y[1]).abs()))
        .fold(0.0, f64::max);
    println!("final full state {:?}", a.final_state());
    println!("max |y + s - S_Y| = {:.2e}", enzyme_conservation_check(&a));
    println!("max projection gap = {gap:.2e}");
    Ok(())
}
