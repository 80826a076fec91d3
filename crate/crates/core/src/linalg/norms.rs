use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::sphere::{self, dual_power, SphereObjective};
use super::{check_finite, check_len, symmetric_eigenvalues, DenseMatrix};
use crate::error::{Error, Result};

/// Exponent of an `L^p` norm, `1 <= p <= ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Lp {
    Finite(f64),
    Infinity,
}

impl Lp {
    pub const ONE: Lp = Lp::Finite(1.0);
    pub const TWO: Lp = Lp::Finite(2.0);
    pub const INF: Lp = Lp::Infinity;

    pub fn new(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidExponent(p));
        }
        if p == f64::INFINITY {
            Ok(Lp::Infinity)
        } else {
            Ok(Lp::Finite(p))
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Lp::Finite(p) => p,
            Lp::Infinity => f64::INFINITY,
        }
    }

    /// `p ∈ {1, 2, ∞}`: logarithmic norm and induced norm have closed forms.
    pub fn has_closed_form(self) -> bool {
        matches!(self, Lp::Infinity) || self == Lp::ONE || self == Lp::TWO
    }

    /// `1 < p < ∞`.
    pub fn is_interior(self) -> bool {
        matches!(self, Lp::Finite(p) if p > 1.0)
    }
}

impl fmt::Display for Lp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lp::Finite(p) => write!(f, "{p}"),
            Lp::Infinity => write!(f, "inf"),
        }
    }
}

impl std::str::FromStr for Lp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Lp::Infinity),
            other => other
                .parse::<f64>()
                .map_err(|_| Error::InvalidExponent(f64::NAN))
                .and_then(Lp::new),
        }
    }
}

impl Serialize for Lp {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Lp::Finite(p) => s.serialize_f64(*p),
            Lp::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Lp {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        let parsed = match Raw::deserialize(d)? {
            Raw::Num(p) => Lp::new(p),
            Raw::Str(s) => s.parse(),
        };
        parsed.map_err(serde::de::Error::custom)
    }
}

/// The norm `‖x‖_{p,Q} = ‖Qx‖_p` for a positive diagonal `Q = diag(q)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWeightedNorm")]
pub struct WeightedNorm {
    pub p: Lp,
    pub q: Vec<f64>,
}

#[derive(Deserialize)]
struct RawWeightedNorm {
    p: Lp,
    q: Vec<f64>,
}

impl TryFrom<RawWeightedNorm> for WeightedNorm {
    type Error = Error;

    fn try_from(r: RawWeightedNorm) -> Result<Self> {
        WeightedNorm::new(r.p, r.q)
    }
}

impl WeightedNorm {
    pub fn new(p: Lp, q: Vec<f64>) -> Result<Self> {
        if let Lp::Finite(v) = p {
            Lp::new(v)?;
        }
        if q.is_empty() {
            return Err(Error::InvalidWeight("weight list is empty".into()));
        }
        if let Some(bad) = q.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::InvalidWeight(format!(
                "weights must be finite and > 0, got {bad}"
            )));
        }
        Ok(Self { p, q })
    }

    /// `Q = I` in dimension `n`.
    pub fn unweighted(p: Lp, n: usize) -> Self {
        Self { p, q: vec![1.0; n] }
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    pub fn norm(&self, x: &[f64]) -> Result<f64> {
        weighted_p_norm(x, self)
    }

    /// `Qx`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.q).map(|(a, b)| a * b).collect()
    }

    pub(crate) fn norm_unchecked(&self, x: &[f64]) -> f64 {
        match self.p {
            Lp::Infinity => x
                .iter()
                .zip(&self.q)
                .fold(0.0, |m, (a, b)| m.max((a * b).abs())),
            Lp::Finite(_) => grid_norm_unchecked(x, self, 1.0),
        }
    }
}

pub fn p_norm(x: &[f64], p: Lp) -> f64 {
    match p {
        Lp::Infinity => x.iter().fold(0.0, |m, v| m.max(v.abs())),
        Lp::Finite(p) => p_norm_finite(x, p),
    }
}

/// Finite-p norm, rescaled by the largest entry so large p cannot overflow.
pub(crate) fn p_norm_finite(x: &[f64], p: f64) -> f64 {
    if p == 1.0 {
        return x.iter().map(|v| v.abs()).sum();
    }
    if p == 2.0 {
        let m = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if m == 0.0 || !m.is_finite() {
            return m;
        }
        return m * x.iter().map(|v| (v / m) * (v / m)).sum::<f64>().sqrt();
    }
    let m = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if m == 0.0 || !m.is_finite() {
        return m;
    }
    m * x
        .iter()
        .map(|v| (v.abs() / m).powf(p))
        .sum::<f64>()
        .powf(1.0 / p)
}

/// `‖Qx‖_p`.
pub fn weighted_p_norm(x: &[f64], w: &WeightedNorm) -> Result<f64> {
    check_len(x, w.dim())?;
    check_finite(x, "vector")?;
    Ok(w.norm_unchecked(x))
}

/// Norm of a grid function sampled on `m` cells of width `cell_weight`.
///
/// `values` is cell-major: `values[k * n + i]` is component `i` at cell `k`,
/// `n = w.dim()`. Returns `(Σ_k h Σ_i q_iᵖ |v_i(ω_k)|ᵖ)^{1/p}`, or
/// `max_{k,i} q_i |v_i(ω_k)|` for `p = ∞`.
pub fn grid_norm(values: &[f64], w: &WeightedNorm, cell_weight: f64) -> Result<f64> {
    let n = w.dim();
    if !values.len().is_multiple_of(n) {
        return Err(Error::DimensionMismatch {
            expected: n * (values.len() / n + 1),
            found: values.len(),
        });
    }
    Ok(grid_norm_unchecked(values, w, cell_weight))
}

pub(crate) fn grid_norm_unchecked(values: &[f64], w: &WeightedNorm, cell_weight: f64) -> f64 {
    let n = w.dim();
    let scaled = || {
        values
            .chunks(n)
            .flat_map(|cell| cell.iter().zip(&w.q).map(|(v, q)| (v * q).abs()))
    };
    let m = scaled().fold(0.0, f64::max);
    let p = match w.p {
        Lp::Infinity => return m,
        Lp::Finite(p) => p,
    };
    let raw = if p == 1.0 {
        scaled().sum()
    } else if m == 0.0 || !m.is_finite() {
        m
    } else if p == 2.0 {
        m * scaled().map(|v| (v / m) * (v / m)).sum::<f64>().sqrt()
    } else {
        m * scaled().map(|v| (v / m).powf(p)).sum::<f64>().powf(1.0 / p)
    };
    if cell_weight == 1.0 {
        raw
    } else {
        cell_weight.powf(1.0 / p) * raw
    }
}

/// `‖Q(‖v_1‖_{p,h}, …, ‖v_n‖_{p,h})ᵀ‖_p`: per-component grid norms first,
/// then the weighted norm of the resulting vector.
pub fn componentwise_grid_norm(values: &[f64], w: &WeightedNorm, cell_weight: f64) -> Result<f64> {
    let n = w.dim();
    if !values.len().is_multiple_of(n) {
        return Err(Error::DimensionMismatch {
            expected: n * (values.len() / n + 1),
            found: values.len(),
        });
    }
    let per_component: Vec<f64> = (0..n)
        .map(|i| {
            let comp: Vec<f64> = values.iter().skip(i).step_by(n).copied().collect();
            match w.p {
                Lp::Infinity => p_norm(&comp, Lp::Infinity),
                Lp::Finite(p) => cell_weight.powf(1.0 / p) * p_norm_finite(&comp, p),
            }
        })
        .collect();
    weighted_p_norm(&per_component, w)
}

/// `(h Σ|f|ᵖ / |Ω|)^{1/p}` for a grid function on cells of width `h`.
pub fn normalized_p_mean(f: &[f64], p: Lp, cell_weight: f64) -> f64 {
    match p {
        Lp::Infinity => p_norm(f, Lp::Infinity),
        Lp::Finite(p) => {
            let total = cell_weight * f.len() as f64;
            (cell_weight / total).powf(1.0 / p) * p_norm_finite(f, p)
        }
    }
}

/// Settings for the multi-start ascent used where no closed form exists.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AscentOptions {
    /// Number of starts (basis vectors plus seeded random unit vectors).
    pub starts: usize,
    pub seed: u64,
    /// Relative gain below which an accepted step counts as converged.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub min_step: f64,
}

impl Default for AscentOptions {
    fn default() -> Self {
        Self {
            starts: 16,
            seed: 0x5eed,
            tolerance: 1e-10,
            max_iterations: 20_000,
            min_step: 1e-15,
        }
    }
}

impl AscentOptions {
    pub(crate) fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

/// Induced operator norm together with whether it is exact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorNorm {
    pub value: f64,
    /// `false` for the general-p lower-bound estimate.
    pub exact: bool,
}

/// `‖A‖_{p→p}` with default ascent settings.
pub fn operator_p_norm(a: &DenseMatrix, p: Lp) -> Result<OperatorNorm> {
    operator_p_norm_with(a, p, &AscentOptions::default())
}

/// Exact for `p ∈ {1, 2, ∞}`; otherwise a multi-start lower-bound estimate.
pub fn operator_p_norm_with(a: &DenseMatrix, p: Lp, opts: &AscentOptions) -> Result<OperatorNorm> {
    let n = a.ensure_square()?;
    if n == 0 {
        return Ok(OperatorNorm {
            value: 0.0,
            exact: true,
        });
    }
    let exact = |value| Ok(OperatorNorm { value, exact: true });
    match p {
        Lp::Infinity => exact(
            (0..n)
                .map(|i| a.row(i).iter().map(|v| v.abs()).sum::<f64>())
                .fold(0.0, f64::max),
        ),
        Lp::Finite(1.0) => exact(
            (0..n)
                .map(|j| (0..n).map(|i| a[(i, j)].abs()).sum::<f64>())
                .fold(0.0, f64::max),
        ),
        Lp::Finite(2.0) => {
            let ata = a.transpose().matmul(a)?;
            let top = symmetric_eigenvalues(&ata)?.last().copied().unwrap_or(0.0);
            exact(top.max(0.0).sqrt())
        }
        Lp::Finite(p) => {
            let obj = NormRatio::new(a, p);
            let mut rng = opts.rng();
            let starts = sphere::starts(n, opts.starts, p, &mut rng);
            let best = sphere::ascend_multistart(&obj, p, &starts, opts);
            Ok(OperatorNorm {
                value: best.value,
                exact: false,
            })
        }
    }
}

/// `‖Ax‖_p / ‖x‖_p`.
struct NormRatio<'a> {
    a: &'a DenseMatrix,
    p: f64,
}

impl<'a> NormRatio<'a> {
    fn new(a: &'a DenseMatrix, p: f64) -> Self {
        Self { a, p }
    }
}

impl SphereObjective for NormRatio<'_> {
    fn dim(&self) -> usize {
        self.a.rows()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let mut y = vec![0.0; x.len()];
        self.a.matvec_into(x, &mut y);
        p_norm_finite(&y, self.p) / p_norm_finite(x, self.p)
    }

    fn gradient(&self, x: &[f64], g: &mut [f64]) {
        let p = self.p;
        let mut y = vec![0.0; x.len()];
        self.a.matvec_into(x, &mut y);
        let ny = p_norm_finite(&y, p);
        let nx = p_norm_finite(x, p);
        if ny == 0.0 {
            g.iter_mut().for_each(|v| *v = 0.0);
            return;
        }
        let dy: Vec<f64> = y.iter().map(|&v| dual_power(v / ny, p)).collect();
        self.a.matvec_transpose_into(&dy, g);
        let r = ny / nx;
        for (gi, &xi) in g.iter_mut().zip(x) {
            *gi = (*gi - r * dual_power(xi / nx, p)) / nx;
        }
    }
}
