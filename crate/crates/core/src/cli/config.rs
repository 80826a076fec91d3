use std::fmt;
use std::path::PathBuf;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::graphnet::GraphLaplacian;
use crate::linalg::Lp;
use crate::models::ModelSpec;

/// What a run does.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Logarithmic norm of a matrix, or sampled Lipschitz constant of a model.
    Measure,
    /// Certificate for a model in a given weighted norm (searches weights if
    /// none are given).
    Certify,
    /// Best diagonal weight over a log-spaced candidate grid.
    SearchWeights,
    /// Witness that `diag(1, q)` fails for the enzyme model at `p > 1`.
    Impossibility,
    /// Two trajectories of a diffusively coupled network.
    SimulateNetwork,
    /// Two trajectories of the discretized reaction-diffusion equation.
    SimulatePde,
    /// Synchronization envelope of a network.
    Sync,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Measure => "measure",
            Command::Certify => "certify",
            Command::SearchWeights => "search-weights",
            Command::Impossibility => "impossibility",
            Command::SimulateNetwork => "simulate-network",
            Command::SimulatePde => "simulate-pde",
            Command::Sync => "sync",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormConfig {
    pub p: Option<Lp>,
    pub q: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub length: Option<f64>,
    pub cells: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrationConfig {
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingConfig {
    pub points: Option<usize>,
    pub cap: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsConfig {
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub points: Option<usize>,
}

/// A run as read from a JSON config file and/or command-line flags. Every
/// field is optional; defaults are filled in per command and written back
/// into the result.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub model: Option<ModelSpec>,
    /// Matrix rows for `measure`; without it the model is measured.
    pub matrix: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub norm: NormConfig,
    /// `path:N`, `complete:N` or `edges:N:i-j;i-j=w;…`.
    pub graph: Option<String>,
    #[serde(default)]
    pub grid: GridConfig,
    pub diffusion: Option<Vec<f64>>,
    #[serde(default)]
    pub integration: IntegrationConfig,
    /// Envelope rate `c`; defaults to the model's sampled rate.
    pub rate: Option<f64>,
    #[serde(default)]
    pub sampling: SamplingConfig,
    #[serde(default)]
    pub weights: WeightsConfig,
    pub b_cap: Option<f64>,
    /// Initial states: two rows for simulations, one for `sync`.
    pub initial: Option<Vec<Vec<f64>>>,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
}

/// An input error tied to the config key that caused it.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub field: String,
    pub message: String,
}

impl CliError {
    pub fn new(field: impl Into<String>, message: impl fmt::Display) -> Self {
        Self {
            field: field.into(),
            message: message.to_string(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

impl std::error::Error for CliError {}

pub(crate) trait Field<T> {
    fn field(self, name: &str) -> Result<T, CliError>;
}

impl<T, E: fmt::Display> Field<T> for Result<T, E> {
    fn field(self, name: &str) -> Result<T, CliError> {
        self.map_err(|e| CliError::new(name, e))
    }
}

/// Parses `path:N`, `complete:N` or `edges:N:i-j;i-j=w`.
pub fn parse_graph(spec: &str) -> Result<GraphLaplacian, CliError> {
    let bad = |msg: String| CliError::new("graph", msg);
    let mut parts = spec.trim().splitn(3, ':');
    let kind = parts.next().unwrap_or_default();
    let n: usize = parts
        .next()
        .ok_or_else(|| bad(format!("expected kind:N, got '{spec}'")))?
        .trim()
        .parse()
        .map_err(|_| bad(format!("node count in '{spec}' is not an integer")))?;
    let l = match kind {
        "path" => GraphLaplacian::path(n),
        "complete" => GraphLaplacian::complete(n),
        "edges" => {
            let list = parts
                .next()
                .ok_or_else(|| bad("edges:N needs an edge list".into()))?;
            let mut edges = Vec::new();
            for item in list.split(';').map(str::trim).filter(|s| !s.is_empty()) {
                let (pair, w) = match item.split_once('=') {
                    Some((pair, w)) => (
                        pair,
                        w.trim()
                            .parse::<f64>()
                            .map_err(|_| bad(format!("edge weight in '{item}'")))?,
                    ),
                    None => (item, 1.0),
                };
                let (i, j) = pair
                    .split_once('-')
                    .ok_or_else(|| bad(format!("edge '{item}' is not i-j")))?;
                let parse = |s: &str| {
                    s.trim()
                        .parse::<usize>()
                        .map_err(|_| bad(format!("edge endpoint in '{item}'")))
                };
                edges.push((parse(i)?, parse(j)?, w));
            }
            GraphLaplacian::from_edges(n, &edges).map(|l| l.labelled(format!("edges:{n}")))
        }
        other => return Err(bad(format!("unknown graph kind '{other}'"))),
    };
    l.field("graph")
}

/// Parses `a,b;c,d` into matrix rows.
pub fn parse_matrix(s: &str) -> Result<Vec<Vec<f64>>, String> {
    s.split(';')
        .map(|row| {
            row.split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| format!("'{v}' is not a number"))
                })
                .collect()
        })
        .collect()
}

/// Parses `key=value` with a JSON value (bare numbers work).
pub fn parse_param(s: &str) -> Result<(String, serde_json::Value), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected key=value, got '{s}'"))?;
    let value = serde_json::from_str(v.trim())
        .unwrap_or_else(|_| serde_json::Value::String(v.trim().to_string()));
    Ok((k.trim().to_string(), value))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graphs() {
        assert_eq!(parse_graph("path:3").unwrap().n_nodes(), 3);
        assert_eq!(parse_graph("complete:4").unwrap().label(), "complete:4");
        let g = parse_graph("edges:3:0-1;1-2=2.5").unwrap();
        assert_eq!(g.matrix().row(2), &[0.0, -2.5, 2.5]);
        for bad in ["star:3", "path", "path:x", "edges:3:0-5", "edges:3:0+1"] {
            let e = parse_graph(bad).unwrap_err();
            assert_eq!(e.field, "graph", "{bad}");
        }
    }

    #[test]
    fn matrices_and_params() {
        assert_eq!(
            parse_matrix("-2,1;1,-2").unwrap(),
            vec![vec![-2.0, 1.0], vec![1.0, -2.0]]
        );
        assert!(parse_matrix("1,a").is_err());
        assert_eq!(
            parse_param("delta=2").unwrap(),
            ("delta".into(), serde_json::json!(2))
        );
    }

    #[test]
    fn config_rejects_unknown_keys() {
        let e = serde_json::from_str::<RunConfig>(r#"{"command":"measure","nrom":{}}"#);
        assert!(e.unwrap_err().to_string().contains("nrom"));
        let c: RunConfig =
            serde_json::from_str(r#"{"command":"simulate-pde","norm":{"p":"inf"}}"#).unwrap();
        assert_eq!(c.command, Some(Command::SimulatePde));
        assert_eq!(c.norm.p, Some(Lp::INF));
    }
}
