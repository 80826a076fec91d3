use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{mu_weighted_with, MeasureOptions};
use crate::error::{Error, Result};
use crate::linalg::{check_len, DenseVector, WeightedNorm};
use crate::models::{BoxDomain, VectorField};

/// Refuse grids larger than this many Jacobian evaluations.
const MAX_EVALUATIONS: usize = 50_000_000;

/// Uniform time samples `t0, …, t1` for time-varying fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSampling {
    pub t0: f64,
    pub t1: f64,
    pub points: usize,
}

/// Tensor grid over a box. Unbounded edges of the field's domain are cut at
/// `cap` unless an explicit `region` is given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    #[serde(default = "GridSpec::default_points")]
    pub points: usize,
    #[serde(default = "GridSpec::default_cap")]
    pub cap: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<BoxDomain>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<TimeSampling>,
}

impl GridSpec {
    fn default_points() -> usize {
        33
    }

    fn default_cap() -> f64 {
        10.0
    }

    pub fn with_points(mut self, points: usize) -> Self {
        self.points = points;
        self
    }

    pub fn with_cap(mut self, cap: f64) -> Self {
        self.cap = cap;
        self
    }

    pub fn with_region(mut self, region: BoxDomain) -> Self {
        self.region = Some(region);
        self
    }

    pub fn with_times(mut self, times: TimeSampling) -> Self {
        self.times = Some(times);
        self
    }

    /// The bounded box actually sampled for `f`.
    pub fn resolve(&self, f: &dyn VectorField) -> Result<BoxDomain> {
        let domain = f.domain();
        match &self.region {
            Some(r) => {
                if !domain.encloses(r) {
                    return Err(Error::InvalidDomain(
                        "sampling region must lie inside the field's domain".into(),
                    ));
                }
                if r.lower.iter().chain(&r.upper).any(|v| !v.is_finite()) {
                    return Err(Error::InvalidDomain(
                        "sampling region must be bounded".into(),
                    ));
                }
                Ok(r.clone())
            }
            None => {
                if !(self.cap.is_finite() && self.cap > 0.0) {
                    return Err(Error::InvalidParameter {
                        name: "cap".into(),
                        reason: format!("must be finite and > 0, got {}", self.cap),
                    });
                }
                Ok(domain.truncated(self.cap))
            }
        }
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            points: Self::default_points(),
            cap: Self::default_cap(),
            region: None,
            times: None,
        }
    }
}

/// Supremum of `μ_{p,Q}(J_F)` over a sampling grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzEstimate {
    pub value: f64,
    pub argmax_point: DenseVector,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub argmax_time: Option<f64>,
    /// The grid with its region resolved to the box that was sampled.
    pub grid: GridSpec,
    pub evaluations: usize,
}

/// `sup_{x ∈ grid} μ_{p,Q}(J_F(x))`, the logarithmic Lipschitz constant of a
/// continuously differentiable field on a convex box, up to sampling.
///
/// Points are ordered lexicographically with axis 0 slowest (time, when
/// sampled, is the fastest axis); ties go to the first point in that order.
pub fn lipschitz_constant(
    f: &dyn VectorField,
    w: &WeightedNorm,
    grid: &GridSpec,
) -> Result<LipschitzEstimate> {
    lipschitz_constant_with(f, w, grid, &MeasureOptions::default())
}

pub fn lipschitz_constant_with(
    f: &dyn VectorField,
    w: &WeightedNorm,
    grid: &GridSpec,
    opts: &MeasureOptions,
) -> Result<LipschitzEstimate> {
    let n = f.dim();
    check_len(&w.q, n)?;
    if grid.points == 0 || n == 0 {
        return Err(Error::EmptyGrid);
    }
    let region = grid.resolve(f)?;
    let axes: Vec<Vec<f64>> = region
        .lower
        .iter()
        .zip(&region.upper)
        .map(|(&l, &u)| linspace(l, u, grid.points))
        .collect();
    let mut resolved = grid.clone();
    if resolved.times.is_none() && f.is_time_varying() {
        resolved.times = Some(TimeSampling {
            t0: 0.0,
            t1: grid.cap,
            points: grid.points,
        });
    }
    let times = match &resolved.times {
        Some(ts) if ts.points == 0 => return Err(Error::EmptyGrid),
        Some(ts) => linspace(ts.t0, ts.t1, ts.points),
        None => vec![0.0],
    };
    let total = axes
        .iter()
        .try_fold(times.len(), |acc, a| acc.checked_mul(a.len()))
        .filter(|&t| t <= MAX_EVALUATIONS)
        .ok_or_else(|| Error::InvalidParameter {
            name: "points".into(),
            reason: format!("grid exceeds {MAX_EVALUATIONS} evaluations"),
        })?;

    let point_at = |mut idx: usize| -> (Vec<f64>, f64) {
        let t = times[idx % times.len()];
        idx /= times.len();
        let mut x = vec![0.0; n];
        for (k, axis) in axes.iter().enumerate().rev() {
            x[k] = axis[idx % axis.len()];
            idx /= axis.len();
        }
        (x, t)
    };

    let values: Vec<f64> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let (x, t) = point_at(idx);
            mu_weighted_with(&f.jacobian(&x, t), w, opts).map(|r| r.value)
        })
        .collect::<Result<_>>()?;

    let (best, value) =
        values
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| {
                if v > bv {
                    (i, v)
                } else {
                    (bi, bv)
                }
            });
    let (x, t) = point_at(best);
    let argmax_time = resolved.times.as_ref().map(|_| t);
    resolved.region = Some(region);
    Ok(LipschitzEstimate {
        value,
        argmax_point: DenseVector::new(x)?,
        argmax_time,
        grid: resolved,
        evaluations: total,
    })
}

fn linspace(a: f64, b: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![0.5 * (a + b)];
    }
    let step = (b - a) / (points - 1) as f64;
    (0..points)
        .map(|i| {
            if i == points - 1 {
                b
            } else {
                a + step * i as f64
            }
        })
        .collect()
}
