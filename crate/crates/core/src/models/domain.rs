use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-aligned box `Π [lower_i, upper_i]`; edges may be infinite.
///
/// Boxes are convex, which is what lets a sampled Jacobian supremum stand in
/// for the logarithmic Lipschitz constant of a field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain {
    #[serde(with = "extended_reals")]
    pub lower: Vec<f64>,
    #[serde(with = "extended_reals")]
    pub upper: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                found: upper.len(),
            });
        }
        for (i, (l, u)) in lower.iter().zip(&upper).enumerate() {
            if l.is_nan() || u.is_nan() || l >= u || *l == f64::INFINITY || *u == f64::NEG_INFINITY
            {
                return Err(Error::InvalidDomain(format!(
                    "axis {i}: need lower < upper, got [{l}, {u}]"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    pub fn whole_space(n: usize) -> Self {
        Self {
            lower: vec![f64::NEG_INFINITY; n],
            upper: vec![f64::INFINITY; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    /// Membership with an absolute-relative slack `tol · (1 + |bound|)`.
    /// Returns the first offending axis.
    pub fn violation(&self, x: &[f64], tol: f64) -> Option<usize> {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .position(|(v, (l, u))| {
                (l.is_finite() && *v < l - tol * (1.0 + l.abs()))
                    || (u.is_finite() && *v > u + tol * (1.0 + u.abs()))
                    || v.is_nan()
            })
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && self.violation(x, 0.0).is_none()
    }

    /// Replaces infinite edges so every axis is bounded; a half-line keeps its
    /// finite end and extends `cap` beyond it (or to `±cap` when that is wider).
    pub fn truncated(&self, cap: f64) -> BoxDomain {
        let (lower, upper) = self
            .lower
            .iter()
            .zip(&self.upper)
            .map(|(&l, &u)| match (l.is_finite(), u.is_finite()) {
                (true, true) => (l, u),
                (true, false) => (l, cap.max(l + cap)),
                (false, true) => ((-cap).min(u - cap), u),
                (false, false) => (-cap, cap),
            })
            .unzip();
        BoxDomain { lower, upper }
    }

    /// `true` when `other` lies inside the closure of `self`.
    pub fn encloses(&self, other: &BoxDomain) -> bool {
        self.dim() == other.dim()
            && self.lower.iter().zip(&other.lower).all(|(a, b)| a <= b)
            && self.upper.iter().zip(&other.upper).all(|(a, b)| a >= b)
    }

    /// Uniform sample from the interior of `self.truncated(cap)`.
    pub fn sample_interior<R: Rng>(&self, rng: &mut R, cap: f64) -> Vec<f64> {
        let b = self.truncated(cap);
        b.lower
            .iter()
            .zip(&b.upper)
            .map(|(&l, &u)| {
                let margin = 1e-3 * (u - l);
                rng.random_range((l + margin)..(u - margin))
            })
            .collect()
    }
}

/// JSON has no infinities; edges are written as numbers or `"inf"`/`"-inf"`.
mod extended_reals {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Edge {
        Num(f64),
        Str(String),
    }

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let edges: Vec<Edge> = v
            .iter()
            .map(|&x| {
                if x == f64::INFINITY {
                    Edge::Str("inf".into())
                } else if x == f64::NEG_INFINITY {
                    Edge::Str("-inf".into())
                } else {
                    Edge::Num(x)
                }
            })
            .collect();
        edges.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        let edges = Vec::<Edge>::deserialize(d)?;
        edges
            .into_iter()
            .map(|e| match e {
                Edge::Num(x) => Ok(x),
                Edge::Str(s) => match s.as_str() {
                    "inf" | "+inf" => Ok(f64::INFINITY),
                    "-inf" => Ok(f64::NEG_INFINITY),
                    other => Err(serde::de::Error::custom(format!("bad edge `{other}`"))),
                },
            })
            .collect()
    }
}
