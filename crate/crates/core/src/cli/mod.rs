//! Command-line front end: JSON configs and flags in; a result JSON, an
//! optional CSV time series and a text summary out.
//!
//! Exit codes: `0` success, `1` input error (the message names the config
//! key), `2` envelope violation, refused certificate or missing witness.

mod config;
mod run;

pub use config::{
    parse_graph, parse_matrix, parse_param, CliError, Command, GridConfig, IntegrationConfig,
    NormConfig, RunConfig, SamplingConfig, WeightsConfig,
};
pub use run::{run, Outcome, Status};

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Parser;

use crate::linalg::Lp;
use crate::models::ModelSpec;

/// Directory used when neither `--out`, `DIFFCON_OUT` nor the config sets one.
pub const DEFAULT_OUT: &str = "diffcon-out";

/// Contraction certificates and diffusion-robustness checks.
#[derive(Debug, Parser)]
#[command(name = "diffcon", version, allow_negative_numbers = true)]
pub struct Cli {
    /// Command to run; optional when the config file names one.
    #[arg(value_enum)]
    pub command: Option<Command>,
    /// JSON config file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub model: Option<String>,
    /// Model parameter as key=value; repeatable.
    #[arg(long = "param", value_parser = parse_param)]
    pub params: Vec<(String, serde_json::Value)>,
    /// Norm exponent: a number >= 1 or `inf`.
    #[arg(long)]
    pub p: Option<Lp>,
    /// Diagonal weights, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub q: Option<Vec<f64>>,
    /// Matrix rows for `measure`: `a,b;c,d`.
    #[arg(long, allow_hyphen_values = true)]
    pub matrix: Option<String>,
    /// `path:N`, `complete:N` or `edges:N:i-j;i-j=w`.
    #[arg(long)]
    pub graph: Option<String>,
    #[arg(long)]
    pub cells: Option<usize>,
    #[arg(long)]
    pub length: Option<f64>,
    /// Diagonal diffusion coefficients, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub diffusion: Option<Vec<f64>>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Relative envelope slack.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Envelope rate `c` for simulations.
    #[arg(long)]
    pub rate: Option<f64>,
    /// Grid points per axis for sampled rates.
    #[arg(long)]
    pub points: Option<usize>,
    /// Cut-off for unbounded domain edges.
    #[arg(long)]
    pub cap: Option<f64>,
    #[arg(long)]
    pub b_cap: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, env = "DIFFCON_OUT")]
    pub out: Option<PathBuf>,
}

impl Cli {
    /// Loads the config file, if any, and applies flag overrides.
    pub fn into_config(self) -> Result<RunConfig, CliError> {
        let mut c = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::new("config", format!("{}: {e}", path.display())))?;
                serde_json::from_str::<RunConfig>(&text).map_err(|e| CliError::new("config", e))?
            }
            None => RunConfig::default(),
        };
        if self.command.is_some() {
            c.command = self.command;
        }
        if let Some(name) = self.model {
            c.model = Some(ModelSpec::new(name));
        }
        if !self.params.is_empty() {
            let spec = c.model.get_or_insert_with(|| ModelSpec::new("enzyme"));
            spec.params.extend(self.params);
        }
        set(&mut c.norm.p, self.p);
        set(&mut c.norm.q, self.q);
        if let Some(m) = &self.matrix {
            c.matrix = Some(parse_matrix(m).map_err(|e| CliError::new("matrix", e))?);
        }
        set(&mut c.graph, self.graph);
        set(&mut c.grid.cells, self.cells);
        set(&mut c.grid.length, self.length);
        set(&mut c.diffusion, self.diffusion);
        set(&mut c.integration.t_end, self.t_end);
        set(&mut c.integration.dt, self.dt);
        set(&mut c.integration.tolerance, self.tolerance);
        set(&mut c.rate, self.rate);
        set(&mut c.sampling.points, self.points);
        set(&mut c.sampling.cap, self.cap);
        set(&mut c.b_cap, self.b_cap);
        set(&mut c.seed, self.seed);
        set(&mut c.output, self.out);
        Ok(c)
    }
}

fn set<T>(slot: &mut Option<T>, v: Option<T>) {
    if v.is_some() {
        *slot = v;
    }
}

/// Writes `result.json` and, for simulations, `series.csv` into `dir`.
pub fn write_artifacts(outcome: &Outcome, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let result = dir.join("result.json");
    let mut text = serde_json::to_string_pretty(&outcome.result).map_err(std::io::Error::other)?;
    text.push('\n');
    std::fs::write(&result, text)?;
    written.push(result);
    if let Some(csv) = &outcome.csv {
        let path = dir.join("series.csv");
        std::fs::write(&path, csv)?;
        written.push(path);
    }
    Ok(written)
}

/// Parses `args`, runs, writes artifacts and returns the exit code.
pub fn main_from<I, T>(args: I, stdout: &mut impl Write, stderr: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let benign = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = if benign {
                write!(stdout, "{e}")
            } else {
                write!(stderr, "{e}")
            };
            return if benign { 0 } else { 1 };
        }
    };
    let outcome = cli.into_config().and_then(|cfg| {
        let dir = cfg
            .output
            .clone()
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
        run(&cfg).map(|o| (o, dir))
    });
    match outcome {
        Ok((outcome, dir)) => {
            let _ = write!(stdout, "{}", outcome.summary);
            match write_artifacts(&outcome, &dir) {
                Ok(files) => {
                    for f in files {
                        let _ = writeln!(stdout, "wrote {}", f.display());
                    }
                    outcome.exit_code()
                }
                Err(e) => {
                    let _ = writeln!(stderr, "error: output: {}: {e}", dir.display());
                    1
                }
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}

/// Entry point for the binary.
pub fn main() -> i32 {
    main_from(
        std::env::args_os(),
        &mut std::io::stdout(),
        &mut std::io::stderr(),
    )
}
