//! Driving the command-line layer from code: a JSON config in, result JSON
//! and series CSV out.
//!
//!     cargo run --example cli_config
//!
//! The same run from the shell:
//!
//!     diffcon simulate-network --graph complete:3 --q 1,1.25 --diffusion 0.3,2 --t-end 5

use diffcon::cli::{run, write_artifacts, RunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg: RunConfig = serde_json::from_str(
        r#"{
            "command": "simulate-network",
            "graph": "complete:3",
            "norm": {"p": 1, "q": [1.0, 1.25]},
            "diffusion": [0.3, 2.0],
            "integration": {"t_end": 5.0},
            "seed": 7
        }"#,
    )?;
    let outcome = run(&cfg)?;
    print!("{}", outcome.summary);
    let dir = std::env::temp_dir().join("diffcon-example");
    for path in write_artifacts(&outcome, &dir)? {
        println!("wrote {}", path.display());
    }
    std::process::exit(outcome.exit_code());
}
