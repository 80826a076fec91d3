use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use super::config::{parse_graph, CliError, Command, Field, RunConfig};
use crate::certify::{
    impossibility_search, issue_certificate, search_weights, ContractionCertificate, WeightSpace,
    DEFAULT_B_CAP,
};
use crate::error::Error;
use crate::graphnet::{
    assemble_network, discretize_pde, DiffusionMatrix, NetworkSystem, SpatialGrid,
};
use crate::linalg::{DenseMatrix, Lp, WeightedNorm};
use crate::lognorm::{lipschitz_constant_with, mu_weighted_with, GridSpec, MeasureOptions};
use crate::models::{EnzymeParams, ModelRegistry, ModelSpec, VectorField};
use crate::sim::{verify_contraction, verify_sync, ContractionReport, SeriesPoint, Settings};

const DEFAULT_T_END: f64 = 20.0;
const DEFAULT_DT: f64 = 0.01;

/// How a run ended, independent of input errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    /// A simulated quantity left its envelope.
    Violation,
    /// No certificate could be issued.
    Refused,
    /// No impossibility witness below the cap.
    NoWitness,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            _ => 2,
        }
    }
}

/// Everything a run produces before it is written to disk.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub status: Status,
    /// Result document; `generated_at` is the only time-dependent field
    /// besides certificate issue times.
    pub result: Value,
    /// Time series for simulation commands.
    pub csv: Option<String>,
    pub summary: String,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        self.status.exit_code()
    }
}

/// The configuration with every default that the command used filled in.
#[derive(Debug, Default, Serialize)]
struct Resolved {
    command: Option<Command>,
    #[serde(skip_serializing_if = "Option::is_none")]
    model: Option<ModelSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    norm: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sampling: Option<GridSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    weights: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    graph: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid: Option<SpatialGrid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    diffusion: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    integration: Option<Settings>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    b_cap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    initial: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    estimator: Option<MeasureOptions>,
    seed: u64,
}

struct Body {
    status: Status,
    result: Value,
    csv: Option<String>,
    lines: Vec<String>,
}

/// Runs one command. Input problems come back as [`CliError`] naming the
/// offending config key; verdicts (violations, refusals) are an [`Outcome`].
pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let command = cfg.command.ok_or_else(|| {
        CliError::new(
            "command",
            "missing; expected measure, certify, search-weights, impossibility, \
             simulate-network, simulate-pde or sync",
        )
    })?;
    let mut r = Resolved {
        command: Some(command),
        seed: cfg.seed.unwrap_or(0),
        ..Resolved::default()
    };
    let body = match command {
        Command::Measure => measure(cfg, &mut r)?,
        Command::Certify => certify(cfg, &mut r)?,
        Command::SearchWeights => search(cfg, &mut r)?,
        Command::Impossibility => impossibility(cfg, &mut r)?,
        Command::SimulateNetwork | Command::SimulatePde => simulate(cfg, &mut r, command)?,
        Command::Sync => sync(cfg, &mut r)?,
    };

    let mut summary = format!("command: {command}\n");
    for line in &body.lines {
        summary.push_str(line);
        summary.push('\n');
    }
    summary.push_str(&format!("status: {}\n", status_word(body.status)));
    let result = json!({
        "tool": "diffcon",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "status": body.status,
        "exit_code": body.status.exit_code(),
        "config": r,
        "result": body.result,
        "series_file": body.csv.as_ref().map(|_| "series.csv"),
        "generated_at": chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
    });
    Ok(Outcome {
        status: body.status,
        result,
        csv: body.csv,
        summary,
    })
}

fn status_word(s: Status) -> &'static str {
    match s {
        Status::Ok => "ok",
        Status::Violation => "envelope violated",
        Status::Refused => "refused",
        Status::NoWitness => "no witness below cap",
    }
}

fn model(cfg: &RunConfig, r: &mut Resolved) -> Result<Arc<dyn VectorField>, CliError> {
    let spec = cfg
        .model
        .clone()
        .unwrap_or_else(|| ModelSpec::new("enzyme"));
    let f = ModelRegistry::default()
        .build(&spec)
        .map_err(|e| match &e {
            Error::UnknownModel(_) => CliError::new("model.name", e),
            Error::InvalidParameter { name, .. } => {
                CliError::new(format!("model.params.{name}"), &e)
            }
            _ => CliError::new("model.params", e),
        })?;
    let params = match f.parameters() {
        Value::Object(m) => m.into_iter().collect(),
        _ => Default::default(),
    };
    r.model = Some(ModelSpec {
        name: spec.name,
        params,
    });
    Ok(f)
}

/// `(p, q)`; `q` stays `None` when not given and `allow_missing` is set.
fn norm_parts(
    cfg: &RunConfig,
    r: &mut Resolved,
    dim: usize,
    default_p: Lp,
    allow_missing: bool,
) -> Result<(Lp, Option<Vec<f64>>), CliError> {
    let p = cfg.norm.p.unwrap_or(default_p);
    let q = match &cfg.norm.q {
        Some(q) => {
            if q.len() != dim {
                return Err(CliError::new(
                    "norm.q",
                    format!("expected {dim} weights, got {}", q.len()),
                ));
            }
            WeightedNorm::new(p, q.clone()).field("norm.q")?;
            Some(q.clone())
        }
        None if allow_missing => None,
        None => Some(vec![1.0; dim]),
    };
    r.norm = Some(json!({ "p": p, "q": q }));
    Ok((p, q))
}

fn norm(
    cfg: &RunConfig,
    r: &mut Resolved,
    dim: usize,
    default_p: Lp,
) -> Result<WeightedNorm, CliError> {
    let (p, q) = norm_parts(cfg, r, dim, default_p, false)?;
    WeightedNorm::new(p, q.unwrap_or_default()).field("norm")
}

fn sampling(cfg: &RunConfig, r: &mut Resolved) -> Result<GridSpec, CliError> {
    let mut g = GridSpec::default();
    if let Some(points) = cfg.sampling.points {
        if points == 0 {
            return Err(CliError::new("sampling.points", "must be at least 1"));
        }
        g = g.with_points(points);
    }
    if let Some(cap) = cfg.sampling.cap {
        if !(cap.is_finite() && cap > 0.0) {
            return Err(CliError::new(
                "sampling.cap",
                format!("must be finite and > 0, got {cap}"),
            ));
        }
        g = g.with_cap(cap);
    }
    r.sampling = Some(g.clone());
    Ok(g)
}

fn estimator(r: &mut Resolved) -> MeasureOptions {
    let mut opts = MeasureOptions::default();
    opts.ascent.seed = r.seed;
    r.estimator = Some(opts.clone());
    opts
}

fn measure(cfg: &RunConfig, r: &mut Resolved) -> Result<Body, CliError> {
    let opts = estimator(r);
    if let Some(rows) = &cfg.matrix {
        let a = DenseMatrix::from_rows(rows).field("matrix")?;
        let n = a.ensure_square().field("matrix")?;
        r.matrix = Some(rows.clone());
        let w = norm(cfg, r, n, Lp::ONE)?;
        let m = mu_weighted_with(&a, &w, &opts).field("matrix")?;
        let lines = vec![
            format!("norm: p={}, q={:?}", w.p, w.q),
            format!("mu = {}", m.value),
            format!("exact: {}", m.exact),
        ];
        return Ok(Body {
            status: Status::Ok,
            result: serde_json::to_value(&m).unwrap_or_default(),
            csv: None,
            lines,
        });
    }
    let f = model(cfg, r)?;
    let w = norm(cfg, r, f.dim(), Lp::ONE)?;
    let grid = sampling(cfg, r)?;
    let est = lipschitz_constant_with(f.as_ref(), &w, &grid, &opts).field("sampling")?;
    let lines = vec![
        format!("model: {}", f.name()),
        format!("norm: p={}, q={:?}", w.p, w.q),
        format!(
            "sup mu over {} grid points = {}",
            est.evaluations, est.value
        ),
        format!("attained at {:?}", est.argmax_point.as_slice()),
    ];
    Ok(Body {
        status: Status::Ok,
        result: serde_json::to_value(&est).unwrap_or_default(),
        csv: None,
        lines,
    })
}

fn weight_space(cfg: &RunConfig, r: &mut Resolved) -> Result<WeightSpace, CliError> {
    let min = cfg.weights.min.unwrap_or(1e-3);
    let max = cfg.weights.max.unwrap_or(1e3);
    let points = cfg.weights.points.unwrap_or(41);
    if points == 0 {
        return Err(CliError::new("weights.points", "must be at least 1"));
    }
    let space = WeightSpace::log_spaced(min, max, points).field("weights")?;
    r.weights = Some(json!({ "min": min, "max": max, "points": points, "refine": space.refine }));
    Ok(space)
}

fn certificate_lines(cert: &ContractionCertificate) -> Vec<String> {
    vec![
        format!("model: {}", cert.model),
        format!("norm: p={}, q={:?}", cert.norm.p, cert.norm.q),
        format!("rate c = {}", cert.rate),
        format!("verdict: {}", cert.verdict),
        format!("attained at {:?}", cert.evidence.argmax_point.as_slice()),
        cert.diffusion_note.clone(),
        cert.caveat.clone(),
    ]
}

fn refusal(f: &dyn VectorField, w: &WeightedNorm, e: Error) -> Result<Body, CliError> {
    let (result, mut lines) = match &e {
        Error::Refused { rate, argmax } => (
            json!({ "verdict": "refused", "rate": rate, "argmax": argmax, "norm": w }),
            vec![
                format!("norm: p={}, q={:?}", w.p, w.q),
                format!("rate c = {rate} (not negative)"),
                format!("worst point {argmax:?}"),
            ],
        ),
        Error::JacobianCheckFailed { max_error } => (
            json!({ "verdict": "refused", "jacobian_check_error": max_error, "norm": w }),
            vec![format!(
                "finite-difference Jacobian check failed: max error {max_error:e}"
            )],
        ),
        _ => return Err(CliError::new("norm", e)),
    };
    lines.insert(0, format!("model: {}", f.name()));
    lines.push("verdict: refused".into());
    Ok(Body {
        status: Status::Refused,
        result,
        csv: None,
        lines,
    })
}

fn certify(cfg: &RunConfig, r: &mut Resolved) -> Result<Body, CliError> {
    let f = model(cfg, r)?;
    let (p, q) = norm_parts(cfg, r, f.dim(), Lp::ONE, true)?;
    let grid = sampling(cfg, r)?;
    match q {
        Some(q) => {
            let w = WeightedNorm::new(p, q).field("norm")?;
            match issue_certificate(f.as_ref(), &w, &grid) {
                Ok(cert) => Ok(Body {
                    status: Status::Ok,
                    lines: certificate_lines(&cert),
                    result: json!({ "certificate": cert }),
                    csv: None,
                }),
                Err(e) => refusal(f.as_ref(), &w, e),
            }
        }
        None => {
            let space = weight_space(cfg, r)?;
            let s = search_weights(f.as_ref(), p, &grid, &space).field("weights")?;
            match &s.certificate {
                Some(cert) => Ok(Body {
                    status: Status::Ok,
                    lines: certificate_lines(cert),
                    result: json!({ "certificate": cert, "search": { "evaluated": s.evaluated, "strategy": s.strategy } }),
                    csv: None,
                }),
                None => refusal(
                    f.as_ref(),
                    &s.norm,
                    Error::Refused {
                        rate: s.rate,
                        argmax: s.evidence.argmax_point.to_vec(),
                    },
                ),
            }
        }
    }
}

fn search(cfg: &RunConfig, r: &mut Resolved) -> Result<Body, CliError> {
    let f = model(cfg, r)?;
    let p = cfg.norm.p.unwrap_or(Lp::ONE);
    r.norm = Some(json!({ "p": p }));
    let grid = sampling(cfg, r)?;
    let space = weight_space(cfg, r)?;
    let s = search_weights(f.as_ref(), p, &grid, &space).field("weights")?;
    let mut lines = vec![
        format!("model: {}", f.name()),
        format!(
            "best q = {:?} ({} evaluations, {})",
            s.norm.q, s.evaluated, s.strategy
        ),
        format!("rate c = {}", s.rate),
    ];
    let status = match &s.certificate {
        Some(cert) => {
            lines.push("verdict: contractive".into());
            lines.push(cert.caveat.clone());
            Status::Ok
        }
        None => {
            lines.push("verdict: no negative rate on this candidate grid".into());
            Status::Refused
        }
    };
    Ok(Body {
        status,
        result: serde_json::to_value(&s).unwrap_or_default(),
        csv: None,
        lines,
    })
}

fn impossibility(cfg: &RunConfig, r: &mut Resolved) -> Result<Body, CliError> {
    let f = model(cfg, r)?;
    if !f.name().starts_with("enzyme") {
        return Err(CliError::new(
            "model.name",
            "impossibility applies to the enzyme model",
        ));
    }
    let params: EnzymeParams = serde_json::from_value(f.parameters()).field("model.params")?;
    let p = cfg.norm.p.unwrap_or(Lp::TWO);
    if p == Lp::ONE {
        return Err(CliError::new("norm.p", "impossibility needs p > 1"));
    }
    let q = match &cfg.norm.q {
        None => 1.0,
        Some(q) if q.len() == 2 && q.iter().all(|v| v.is_finite() && *v > 0.0) => q[1] / q[0],
        Some(q) => {
            return Err(CliError::new(
                "norm.q",
                format!("expected two positive weights, got {q:?}"),
            ))
        }
    };
    r.norm = Some(json!({ "p": p, "q": [1.0, q] }));
    let b_cap = cfg.b_cap.unwrap_or(DEFAULT_B_CAP);
    r.b_cap = Some(b_cap);
    match impossibility_search(&params, p, q, b_cap) {
        Ok(w) => Ok(Body {
            status: Status::Ok,
            lines: vec![
                format!("norm: p={p}, Q=diag(1, {q})"),
                format!(
                    "witness (x, y) = ({}, {}) with b = {}",
                    w.point[0], w.point[1], w.b
                ),
                format!("lower bound on mu = {}", w.lower_bound),
                format!("estimated mu = {}", w.estimated_measure),
                "verdict: no certificate exists for this weight".into(),
            ],
            result: serde_json::to_value(&w).unwrap_or_default(),
            csv: None,
        }),
        Err(Error::CapExceeded { b_cap }) => Ok(Body {
            status: Status::NoWitness,
            lines: vec![format!("no witness with b <= {b_cap}")],
            result: json!({ "b_cap": b_cap, "witness": null }),
            csv: None,
        }),
        Err(e @ Error::InvalidParameter { .. }) => Err(CliError::new("b_cap", e)),
        Err(e @ Error::InvalidWeight(_)) => Err(CliError::new("norm.q", e)),
        Err(e) => Err(CliError::new("model.params", e)),
    }
}

fn diffusion(cfg: &RunConfig, r: &mut Resolved, dim: usize) -> Result<DiffusionMatrix, CliError> {
    let d = cfg.diffusion.clone().unwrap_or_else(|| vec![1.0; dim]);
    if d.len() != dim {
        return Err(CliError::new(
            "diffusion",
            format!("expected {dim} entries, got {}", d.len()),
        ));
    }
    let d = DiffusionMatrix::new(d).field("diffusion")?;
    r.diffusion = Some(d.entries().to_vec());
    Ok(d)
}

fn settings(cfg: &RunConfig, r: &mut Resolved, system: &dyn VectorField) -> Settings {
    let dt = cfg.integration.dt.unwrap_or_else(|| {
        system
            .max_stable_dt()
            .map_or(DEFAULT_DT, |m| m.min(DEFAULT_DT))
    });
    let mut s = Settings::new(cfg.integration.t_end.unwrap_or(DEFAULT_T_END), dt);
    if let Some(tol) = cfg.integration.tolerance {
        s = s.with_tolerance(tol);
    }
    r.integration = Some(s);
    s
}

/// `rows` initial states for a system of `nodes` copies of `cell`, either
/// from the config or sampled with the seed.
fn initial_states(
    cfg: &RunConfig,
    r: &mut Resolved,
    cell: &dyn VectorField,
    nodes: usize,
    rows: usize,
    cap: f64,
) -> Result<Vec<Vec<f64>>, CliError> {
    let n = cell.dim() * nodes;
    let states = match &cfg.initial {
        Some(given) => {
            if given.len() != rows || given.iter().any(|u| u.len() != n) {
                return Err(CliError::new(
                    "initial",
                    format!("expected {rows} rows of {n} values"),
                ));
            }
            given.clone()
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(r.seed);
            (0..rows)
                .map(|_| {
                    (0..nodes)
                        .flat_map(|_| cell.domain().sample_interior(&mut rng, cap))
                        .collect()
                })
                .collect()
        }
    };
    r.initial = Some(states.clone());
    Ok(states)
}

fn sim_error(e: Error) -> CliError {
    let field = match &e {
        Error::StepTooLarge { .. } | Error::DomainEscape { .. } => "integration.dt",
        Error::InvalidIntegration(_) | Error::NonFinite(_) => "integration",
        Error::InvalidParameter { .. } => "initial",
        Error::DimensionMismatch { .. } | Error::UnsupportedExponent { .. } => "norm",
        Error::Disconnected { .. } | Error::InvalidGraph(_) => "graph",
        _ => "run",
    };
    CliError::new(field, e)
}

fn series_csv(series: &[SeriesPoint], value_column: &str) -> String {
    let mut out = format!("t,{value_column},envelope,margin\n");
    for s in series {
        out.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e}\n",
            s.t,
            s.value,
            s.envelope,
            s.envelope - s.value
        ));
    }
    out
}

fn contraction_result(rep: &ContractionReport) -> Value {
    json!({
        "system": rep.system,
        "rate_c": rep.rate_c,
        "norm": rep.norm,
        "steps": rep.steps,
        "initial_distance": rep.initial_distance,
        "final_distance": rep.series.last().map(|s| s.value),
        "bound_ok": rep.bound_ok,
        "max_violation": rep.max_violation,
        "worst": rep.worst,
        "dini_ok": rep.dini_ok,
        "max_dini_excess": rep.max_dini_excess,
        "resolution_limited_steps": rep.resolution_limited_steps,
        "series_points": rep.series.len(),
    })
}

fn simulate(cfg: &RunConfig, r: &mut Resolved, command: Command) -> Result<Body, CliError> {
    let f = model(cfg, r)?;
    let w = norm(cfg, r, f.dim(), Lp::ONE)?;
    let grid = sampling(cfg, r)?;
    let d = diffusion(cfg, r, f.dim())?;
    let net: NetworkSystem = if command == Command::SimulatePde {
        let g = SpatialGrid::new(cfg.grid.length.unwrap_or(1.0), cfg.grid.cells.unwrap_or(64))
            .field("grid")?;
        r.grid = Some(g);
        discretize_pde(f.clone(), &d, &g).field("grid")?
    } else {
        let l = parse_graph(cfg.graph.as_deref().unwrap_or("path:3"))?;
        r.graph = Some(l.label().to_string());
        assemble_network(f.clone(), &l, &d).field("graph")?
    };
    let rate = match cfg.rate {
        Some(c) => c,
        None => {
            let opts = estimator(r);
            lipschitz_constant_with(f.as_ref(), &w, &grid, &opts)
                .field("sampling")?
                .value
        }
    };
    r.rate = Some(rate);
    let s = settings(cfg, r, &net);
    let init = initial_states(cfg, r, f.as_ref(), net.n_nodes(), 2, grid.cap)?;
    let rep = verify_contraction(&net, &init[0], &init[1], &w, rate, &s).map_err(sim_error)?;
    let lines = vec![
        format!("system: {} ({} compartments)", net.name(), net.n_nodes()),
        format!("norm: p={}, q={:?}", w.p, w.q),
        format!("rate c = {rate}"),
        format!("steps: {} of dt = {}", rep.steps, s.dt),
        format!(
            "distance: {} -> {}",
            rep.initial_distance,
            rep.series.last().map_or(0.0, |p| p.value)
        ),
        format!(
            "worst ratio distance/envelope = {} at t = {} (tolerance {})",
            rep.worst.ratio, rep.worst.t, s.tolerance
        ),
        format!(
            "Dini check: {}",
            if rep.dini_ok { "ok" } else { "exceeded" }
        ),
    ];
    Ok(Body {
        status: if rep.bound_ok {
            Status::Ok
        } else {
            Status::Violation
        },
        csv: Some(series_csv(&rep.series, "distance")),
        result: contraction_result(&rep),
        lines,
    })
}

fn sync(cfg: &RunConfig, r: &mut Resolved) -> Result<Body, CliError> {
    let f = model(cfg, r)?;
    let w = norm(cfg, r, f.dim(), Lp::TWO)?;
    if !w.p.is_interior() {
        return Err(CliError::new("norm.p", "synchronization needs 1 < p < inf"));
    }
    let grid = sampling(cfg, r)?;
    let d = diffusion(cfg, r, f.dim())?;
    let l = parse_graph(cfg.graph.as_deref().unwrap_or("path:3"))?;
    r.graph = Some(l.label().to_string());
    let net = assemble_network(f.clone(), &l, &d).field("graph")?;
    let s = settings(cfg, r, &net);
    let init = initial_states(cfg, r, f.as_ref(), l.n_nodes(), 1, grid.cap)?;
    let rep = verify_sync(f, &l, &d, &w, &init[0], &s, &grid).map_err(sim_error)?;
    r.rate = Some(rep.rate_c);
    let mut lines = vec![
        format!("graph: {} (lambda_2 = {})", rep.topology, rep.lambda),
        format!("norm: p={}, q={:?}", w.p, w.q),
        format!("rate c = sup mu(J - lambda_2 D) = {}", rep.rate_c),
        format!(
            "worst ratio W/envelope = {} at t = {} (tolerance {})",
            rep.worst.ratio, rep.worst.t, s.tolerance
        ),
    ];
    if !rep.guarantee {
        lines.push("note: more than three nodes; the envelope is simulated, not guaranteed".into());
    }
    Ok(Body {
        status: if rep.bound_ok {
            Status::Ok
        } else {
            Status::Violation
        },
        csv: Some(series_csv(&rep.series, "W")),
        result: json!({
            "topology": rep.topology,
            "n_nodes": rep.n_nodes,
            "lambda": rep.lambda,
            "rate_c": rep.rate_c,
            "evidence": rep.evidence,
            "norm": rep.norm,
            "steps": rep.steps,
            "bound_ok": rep.bound_ok,
            "max_violation": rep.max_violation,
            "worst": rep.worst,
            "guarantee": rep.guarantee,
            "resolution_limited_steps": rep.resolution_limited_steps,
            "series_points": rep.series.len(),
        }),
        lines,
    })
}
