use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::integrate::{check_domain, check_initial, check_step, step_count, Rk4};
use crate::error::{Error, Result};
use crate::graphnet::{assemble_network, lambda2, DiffusionMatrix, GraphLaplacian};
use crate::linalg::{p_norm, DenseMatrix, WeightedNorm};
use crate::lognorm::{lipschitz_constant, GridSpec, LipschitzEstimate};
use crate::models::{ShiftedField, VectorField};

/// Multiple of machine epsilon times the state norm below which a distance
/// is treated as rounding noise.
const RESOLUTION_ULPS: f64 = 1e3;

/// Time horizon, step and envelope tolerance of a verification run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub t_end: f64,
    pub dt: f64,
    /// Multiplicative slack on the envelope, `0.01` for 1%.
    #[serde(default = "Settings::default_tolerance")]
    pub tolerance: f64,
    /// Upper bound on stored series points; every step is still checked.
    #[serde(default = "Settings::default_max_points")]
    pub max_points: usize,
}

impl Settings {
    pub fn new(t_end: f64, dt: f64) -> Self {
        Self {
            t_end,
            dt,
            tolerance: Self::default_tolerance(),
            max_points: Self::default_max_points(),
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    fn default_tolerance() -> f64 {
        0.01
    }

    fn default_max_points() -> usize {
        2001
    }

    fn validate(&self) -> Result<usize> {
        if !(self.tolerance.is_finite() && self.tolerance >= 0.0) {
            return Err(Error::InvalidIntegration(format!(
                "tolerance must be finite and >= 0, got {}",
                self.tolerance
            )));
        }
        step_count(self.t_end, self.dt)
    }
}

/// One stored sample of a monitored quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub t: f64,
    /// Distance `‖u − v‖` or synchronization measure `W`.
    pub value: f64,
    /// `e^{ct}` times the initial value.
    pub envelope: f64,
    /// Forward quotient `(value(t+dt) − value(t))/dt − c·value(t)`; absent at
    /// the final time.
    pub margin: Option<f64>,
}

/// Where the envelope was tightest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorstPoint {
    pub t: f64,
    /// `value / envelope`; the bound requires `ratio ≤ 1 + tolerance`.
    pub ratio: f64,
}

/// Outcome of integrating two solutions and comparing their distance with
/// `e^{ct}‖u(0) − v(0)‖`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionReport {
    pub system: String,
    pub rate_c: f64,
    pub norm: WeightedNorm,
    pub settings: Settings,
    pub steps: usize,
    pub initial_distance: f64,
    pub series: Vec<SeriesPoint>,
    pub bound_ok: bool,
    /// `max_t value/envelope − 1`; positive values beyond `tolerance` fail.
    pub max_violation: f64,
    pub worst: WorstPoint,
    /// Every forward quotient margin stayed below
    /// `max(1e-6, 0.01·|c|·‖u − v‖)`.
    pub dini_ok: bool,
    /// Largest margin minus its allowed slack.
    pub max_dini_excess: f64,
    /// Steps whose distance exceeded the envelope but sat below the
    /// rounding resolution of the states; these do not count as violations.
    pub resolution_limited_steps: usize,
}

impl ContractionReport {
    pub fn distances(&self) -> Vec<(f64, f64)> {
        self.series.iter().map(|s| (s.t, s.value)).collect()
    }

    pub fn dini_margins(&self) -> Vec<(f64, f64)> {
        self.series
            .iter()
            .filter_map(|s| s.margin.map(|m| (s.t, m)))
            .collect()
    }
}

/// Outcome of a synchronization run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyncReport {
    pub topology: String,
    pub n_nodes: usize,
    /// Algebraic connectivity of the graph.
    pub lambda: f64,
    /// `sup μ_{p,Q}(J_F − λD)` over the sampling grid.
    pub rate_c: f64,
    pub evidence: LipschitzEstimate,
    pub norm: WeightedNorm,
    pub settings: Settings,
    pub steps: usize,
    /// `W(t) = ‖(‖u_i − u_j‖_{p,Q})_{i<j}‖_p`.
    pub series: Vec<SeriesPoint>,
    pub bound_ok: bool,
    pub max_violation: f64,
    pub worst: WorstPoint,
    /// `true` only for the graph sizes where the envelope is proven
    /// (`N ≤ 3`); larger graphs are simulated without that claim.
    pub guarantee: bool,
    pub resolution_limited_steps: usize,
}

/// Streams the envelope check and keeps a decimated series.
struct Monitor {
    c: f64,
    dt: f64,
    tolerance: f64,
    initial: f64,
    stride: usize,
    steps: usize,
    series: Vec<SeriesPoint>,
    worst: WorstPoint,
    max_ratio: f64,
    max_dini_excess: f64,
    prev: f64,
    floored: usize,
}

impl Monitor {
    fn new(c: f64, settings: &Settings, steps: usize, initial: f64) -> Self {
        let slots = settings.max_points.max(2) - 1;
        Self {
            c,
            dt: settings.dt,
            tolerance: settings.tolerance,
            initial,
            stride: steps.div_ceil(slots).max(1),
            steps,
            series: Vec::new(),
            worst: WorstPoint {
                t: 0.0,
                ratio: ratio(initial, initial),
            },
            max_ratio: ratio(initial, initial),
            max_dini_excess: f64::NEG_INFINITY,
            prev: initial,
            floored: 0,
        }
    }

    fn envelope(&self, t: f64) -> f64 {
        (self.c * t).exp() * self.initial
    }

    /// Records the value after step `k + 1` (time `t`). Values at or below
    /// `resolution` cannot be told apart from zero and never violate.
    fn observe(&mut self, k: usize, t: f64, value: f64, resolution: impl FnOnce() -> f64) {
        let margin = (value - self.prev) / self.dt - self.c * self.prev;
        let slack = f64::max(1e-6, 0.01 * self.c.abs() * self.prev);
        self.max_dini_excess = self.max_dini_excess.max(margin - slack);
        if k.is_multiple_of(self.stride) {
            let t_prev = k as f64 * self.dt;
            self.series.push(SeriesPoint {
                t: t_prev,
                value: self.prev,
                envelope: self.envelope(t_prev),
                margin: Some(margin),
            });
        }
        let env = self.envelope(t);
        let mut r = ratio(value, env);
        if r > 1.0 && value <= resolution() {
            self.floored += 1;
            r = 1.0;
        }
        if r > self.max_ratio {
            self.max_ratio = r;
            self.worst = WorstPoint { t, ratio: r };
        }
        if k + 1 == self.steps {
            self.series.push(SeriesPoint {
                t,
                value,
                envelope: env,
                margin: None,
            });
        }
        self.prev = value;
    }

    fn finish_empty(&mut self) {
        if self.series.is_empty() {
            self.series.push(SeriesPoint {
                t: 0.0,
                value: self.initial,
                envelope: self.initial,
                margin: None,
            });
        }
    }

    fn bound_ok(&self) -> bool {
        self.max_ratio <= 1.0 + self.tolerance
    }
}

fn ratio(value: f64, envelope: f64) -> f64 {
    if envelope > 0.0 {
        value / envelope
    } else if value == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Integrates `u` and `v` with identical steps and checks
/// `‖u(t) − v(t)‖ ≤ e^{ct}‖u(0) − v(0)‖ (1 + tolerance)` at every step,
/// together with the forward-quotient form of `D⁺‖u − v‖ ≤ c‖u − v‖`.
///
/// Distances are measured with [`VectorField::state_distance`], so a
/// discretized PDE reports the cell-weighted grid norm.
pub fn verify_contraction(
    system: &(impl VectorField + ?Sized),
    u0: &[f64],
    v0: &[f64],
    w: &WeightedNorm,
    rate_c: f64,
    settings: &Settings,
) -> Result<ContractionReport> {
    let steps = settings.validate()?;
    if !rate_c.is_finite() {
        return Err(Error::NonFinite("rate_c"));
    }
    if !system.accepts_norm(w) {
        return Err(Error::DimensionMismatch {
            expected: system.dim(),
            found: w.dim(),
        });
    }
    check_step(system, settings.dt)?;
    check_initial(system, u0, "u0")?;
    check_initial(system, v0, "v0")?;

    let n = system.dim();
    let (mut u, mut v) = (u0.to_vec(), v0.to_vec());
    let mut diff = vec![0.0; n];
    let mut distance = |u: &[f64], v: &[f64]| {
        diff.iter_mut()
            .zip(u.iter().zip(v))
            .for_each(|(d, (a, b))| *d = a - b);
        system.state_distance(&diff, w)
    };
    let d0 = distance(&u, &v);
    let mut monitor = Monitor::new(rate_c, settings, steps, d0);
    let (mut ru, mut rv) = (Rk4::new(n), Rk4::new(n));
    for k in 0..steps {
        let t = k as f64 * settings.dt;
        ru.step(system, t, &mut u, settings.dt);
        rv.step(system, t, &mut v, settings.dt);
        let t_next = (k + 1) as f64 * settings.dt;
        check_domain(system, &u, t_next)?;
        check_domain(system, &v, t_next)?;
        let d = distance(&u, &v);
        if !d.is_finite() {
            return Err(Error::NonFinite("trajectory distance"));
        }
        let resolution = || {
            RESOLUTION_ULPS
                * f64::EPSILON
                * (system.state_distance(&u, w) + system.state_distance(&v, w))
        };
        monitor.observe(k, t_next, d, resolution);
    }
    monitor.finish_empty();
    Ok(ContractionReport {
        system: system.name().to_string(),
        rate_c,
        norm: w.clone(),
        settings: *settings,
        steps,
        initial_distance: d0,
        bound_ok: monitor.bound_ok(),
        max_violation: monitor.max_ratio - 1.0,
        worst: monitor.worst,
        dini_ok: monitor.max_dini_excess <= 0.0,
        max_dini_excess: monitor.max_dini_excess.max(f64::MIN),
        resolution_limited_steps: monitor.floored,
        series: monitor.series,
    })
}

/// Pairwise `‖u_i − u_j‖_{p,Q}` for `i < j`, ordered
/// `(1,2), …, (1,N), (2,3), …, (N−1,N)`.
pub fn pairwise_distances(u: &[f64], n_nodes: usize, w: &WeightedNorm) -> Vec<f64> {
    let n = w.dim();
    let mut diff = vec![0.0; n];
    let mut out = Vec::with_capacity(n_nodes * (n_nodes - 1) / 2);
    for i in 0..n_nodes {
        for j in i + 1..n_nodes {
            for s in 0..n {
                diff[s] = u[i * n + s] - u[j * n + s];
            }
            out.push(w.norm_unchecked(&diff));
        }
    }
    out
}

/// Simulates `N` diffusively coupled copies of `f` and checks
/// `W(t) ≤ e^{ct} W(0) (1 + tolerance)` with `c = sup μ_{p,Q}(J_F − λ₂D)`.
///
/// Needs `1 < p < ∞`.
pub fn verify_sync(
    f: Arc<dyn VectorField>,
    topology: &GraphLaplacian,
    d: &DiffusionMatrix,
    w: &WeightedNorm,
    u0: &[f64],
    settings: &Settings,
    grid: &GridSpec,
) -> Result<SyncReport> {
    if !w.p.is_interior() {
        return Err(Error::UnsupportedExponent {
            p: w.p.to_string(),
            required: "1 < p < inf for the synchronization bound",
        });
    }
    let steps = settings.validate()?;
    if w.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: w.dim(),
        });
    }
    let lambda = lambda2(topology)?;
    let shift = DenseMatrix::diag(
        &d.entries()
            .iter()
            .map(|di| -lambda * di)
            .collect::<Vec<_>>(),
    );
    let shifted = ShiftedField::new(f.clone(), shift)?;
    let evidence = lipschitz_constant(&shifted, w, grid)?;
    let c = evidence.value;

    let net = assemble_network(f, topology, d)?;
    check_step(&net, settings.dt)?;
    check_initial(&net, u0, "u0")?;
    let n_nodes = topology.n_nodes();
    let measure = |u: &[f64]| p_norm(&pairwise_distances(u, n_nodes, w), w.p);

    let mut u = u0.to_vec();
    let mut monitor = Monitor::new(c, settings, steps, measure(&u));
    let mut rk = Rk4::new(net.dim());
    for k in 0..steps {
        rk.step(&net, k as f64 * settings.dt, &mut u, settings.dt);
        let t_next = (k + 1) as f64 * settings.dt;
        check_domain(&net, &u, t_next)?;
        let resolution = || {
            let scale: f64 = (0..n_nodes)
                .map(|i| w.norm_unchecked(&u[i * w.dim()..(i + 1) * w.dim()]))
                .sum();
            RESOLUTION_ULPS * f64::EPSILON * n_nodes as f64 * scale
        };
        monitor.observe(k, t_next, measure(&u), resolution);
    }
    monitor.finish_empty();
    Ok(SyncReport {
        topology: topology.label().to_string(),
        n_nodes,
        lambda,
        rate_c: c,
        evidence,
        norm: w.clone(),
        settings: *settings,
        steps,
        bound_ok: monitor.bound_ok(),
        max_violation: monitor.max_ratio - 1.0,
        worst: monitor.worst,
        guarantee: n_nodes <= 3,
        resolution_limited_steps: monitor.floored,
        series: monitor.series,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphnet::{discretize_pde, SpatialGrid};
    use crate::linalg::Lp;
    use crate::models::{EnzymeParams, EnzymeReduced, LinearField};

    fn decay() -> LinearField {
        LinearField::new(DenseMatrix::diag(&[-1.0])).unwrap()
    }

    #[test]
    fn identical_starts_have_zero_distance() {
        let w = WeightedNorm::unweighted(Lp::ONE, 1);
        let r = verify_contraction(
            &decay(),
            &[1.0],
            &[1.0],
            &w,
            -1.0,
            &Settings::new(1.0, 0.01),
        )
        .unwrap();
        assert!(r.bound_ok && r.dini_ok);
        assert!(r.series.iter().all(|s| s.value == 0.0));
    }

    #[test]
    fn scalar_decay_is_tight() {
        let w = WeightedNorm::unweighted(Lp::TWO, 1);
        let r = verify_contraction(
            &decay(),
            &[2.0],
            &[1.0],
            &w,
            -1.0,
            &Settings::new(3.0, 1e-3),
        )
        .unwrap();
        assert!(r.bound_ok && r.dini_ok);
        for s in &r.series {
            assert!((s.value - (-s.t).exp()).abs() < 1e-7);
        }
        assert_eq!(r.series.last().unwrap().margin, None);
        assert!(r.series.len() <= 2001);
    }

    #[test]
    fn too_fast_rate_is_caught() {
        let w = WeightedNorm::unweighted(Lp::TWO, 1);
        let r = verify_contraction(
            &decay(),
            &[2.0],
            &[1.0],
            &w,
            -2.0,
            &Settings::new(3.0, 1e-2),
        )
        .unwrap();
        assert!(!r.bound_ok && !r.dini_ok);
        assert!(r.worst.ratio > 10.0);
    }

    #[test]
    fn pde_pair_respects_the_certified_rate() {
        let f = Arc::new(EnzymeReduced::new(EnzymeParams::default()).unwrap());
        let grid = SpatialGrid::new(1.0, 16).unwrap();
        let pde = discretize_pde(f, &DiffusionMatrix::uniform(2, 0.1).unwrap(), &grid).unwrap();
        let u0: Vec<f64> = (0..16).flat_map(|k| [0.1 * k as f64, 0.1]).collect();
        let v0: Vec<f64> = (0..16).flat_map(|k| [3.0 - 0.1 * k as f64, 1.9]).collect();
        let w = WeightedNorm::new(Lp::ONE, vec![1.0, 1.25]).unwrap();
        let r = verify_contraction(&pde, &u0, &v0, &w, -0.2, &Settings::new(5.0, 1e-3)).unwrap();
        assert!(r.bound_ok, "{:?}", r.worst);
        assert!(r.dini_ok, "{}", r.max_dini_excess);
    }

    #[test]
    fn step_limit_is_enforced() {
        let f = Arc::new(decay());
        let grid = SpatialGrid::new(1.0, 10).unwrap();
        let pde = discretize_pde(f, &DiffusionMatrix::uniform(1, 1.0).unwrap(), &grid).unwrap();
        let w = WeightedNorm::unweighted(Lp::ONE, 1);
        let u0 = vec![1.0; 10];
        let err =
            verify_contraction(&pde, &u0, &u0, &w, -1.0, &Settings::new(1.0, 0.01)).unwrap_err();
        assert!(matches!(err, Error::StepTooLarge { .. }));
    }

    #[test]
    fn sync_rejects_non_interior_p() {
        let f: Arc<dyn VectorField> = Arc::new(decay());
        let l = GraphLaplacian::complete(2).unwrap();
        let d = DiffusionMatrix::uniform(1, 1.0).unwrap();
        let w = WeightedNorm::unweighted(Lp::ONE, 1);
        let res = verify_sync(
            f,
            &l,
            &d,
            &w,
            &[1.0, 0.0],
            &Settings::new(1.0, 0.01),
            &GridSpec::default(),
        );
        assert!(matches!(res, Err(Error::UnsupportedExponent { .. })));
    }

    #[test]
    fn sync_identical_compartments_stay_synchronized() {
        let a = DenseMatrix::from_rows(&[[-2.0, 1.0], [1.0, -2.0]]).unwrap();
        let f: Arc<dyn VectorField> = Arc::new(LinearField::new(a).unwrap());
        let l = GraphLaplacian::path(3).unwrap();
        let d = DiffusionMatrix::new(vec![0.5, 1.5]).unwrap();
        let w = WeightedNorm::unweighted(Lp::TWO, 2);
        let u0 = [1.0, 2.0, 1.0, 2.0, 1.0, 2.0];
        let r = verify_sync(
            f,
            &l,
            &d,
            &w,
            &u0,
            &Settings::new(1.0, 0.01),
            &GridSpec::default(),
        )
        .unwrap();
        assert!(r.bound_ok && r.guarantee);
        assert!((r.lambda - 1.0).abs() < 1e-12);
        assert!(r.series.iter().all(|s| s.value == 0.0));
    }
}
