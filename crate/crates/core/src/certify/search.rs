use serde::{Deserialize, Serialize};

use super::certificate::{from_evidence, ContractionCertificate};
use crate::error::{Error, Result};
use crate::linalg::{Lp, WeightedNorm};
use crate::lognorm::{lipschitz_constant, GridSpec, LipschitzEstimate};
use crate::models::VectorField;

/// Above this many weight combinations the search switches from exhaustive
/// enumeration to coordinate descent.
const EXHAUSTIVE_LIMIT: usize = 2000;
/// Points tried between a winner's neighbours during refinement.
const REFINE_POINTS: usize = 11;
const MAX_SWEEPS: usize = 20;

/// Candidate values for each free weight `q_2, …, q_n` (`q_1 = 1`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSpace {
    pub candidates: Vec<f64>,
    /// Search between the winning candidate's neighbours afterwards.
    #[serde(default = "default_refine")]
    pub refine: bool,
}

fn default_refine() -> bool {
    true
}

impl WeightSpace {
    /// `points` logarithmically spaced values over `[min, max]`.
    pub fn log_spaced(min: f64, max: f64, points: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && min > 0.0 && max >= min) {
            return Err(Error::InvalidWeight(format!(
                "log-spaced range needs 0 < min <= max, got [{min}, {max}]"
            )));
        }
        let candidates = match points {
            0 => Vec::new(),
            1 => vec![min],
            _ => {
                let (a, b) = (min.ln(), max.ln());
                (0..points)
                    .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
                    .collect()
            }
        };
        Ok(Self {
            candidates,
            refine: true,
        })
    }

    pub fn from_values(candidates: Vec<f64>) -> Self {
        Self {
            candidates,
            refine: true,
        }
    }

    pub fn without_refinement(mut self) -> Self {
        self.refine = false;
        self
    }

    fn validate(&self) -> Result<Vec<f64>> {
        if self.candidates.is_empty() {
            return Err(Error::EmptyCandidates);
        }
        if let Some(bad) = self
            .candidates
            .iter()
            .find(|v| !(v.is_finite() && **v > 0.0))
        {
            return Err(Error::InvalidWeight(format!(
                "candidate weights must be finite and > 0, got {bad}"
            )));
        }
        let mut sorted = self.candidates.clone();
        sorted.sort_by(f64::total_cmp);
        sorted.dedup();
        Ok(sorted)
    }
}

impl Default for WeightSpace {
    /// 41 points over `[1e-3, 1e3]`.
    fn default() -> Self {
        Self::log_spaced(1e-3, 1e3, 41).expect("valid range")
    }
}

/// Best diagonal weight found and, when its rate is negative, a certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSearch {
    pub norm: WeightedNorm,
    pub rate: f64,
    pub evidence: LipschitzEstimate,
    /// `"exhaustive"` or `"coordinate-descent"`.
    pub strategy: String,
    pub evaluated: usize,
    pub certificate: Option<ContractionCertificate>,
}

struct Searcher<'a> {
    f: &'a dyn VectorField,
    p: Lp,
    grid: &'a GridSpec,
    evaluated: usize,
}

impl Searcher<'_> {
    fn rate(&mut self, free: &[f64]) -> Result<(WeightedNorm, LipschitzEstimate)> {
        let mut q = Vec::with_capacity(free.len() + 1);
        q.push(1.0);
        q.extend_from_slice(free);
        let w = WeightedNorm::new(self.p, q)?;
        self.evaluated += 1;
        let est = lipschitz_constant(self.f, &w, self.grid)?;
        Ok((w, est))
    }
}

/// Minimizes the sampled logarithmic Lipschitz constant over diagonal
/// weights `Q = diag(1, q_2, …, q_n)`.
///
/// Weights are scale invariant, so `q_1` is pinned. The candidate grid is
/// enumerated when small and otherwise searched by coordinate descent; an
/// optional refinement then tries log-spaced points between the winner's
/// neighbouring candidates, one axis at a time. Ties keep the earlier
/// candidate. The result is the best point of this search; it is not
/// claimed to be optimal.
pub fn search_weights(
    f: &dyn VectorField,
    p: Lp,
    grid: &GridSpec,
    space: &WeightSpace,
) -> Result<WeightSearch> {
    let candidates = space.validate()?;
    let free_axes = f.dim().saturating_sub(1);
    let mut s = Searcher {
        f,
        p,
        grid,
        evaluated: 0,
    };

    let combos = candidates.len().checked_pow(free_axes as u32);
    let exhaustive = combos.is_some_and(|c| c <= EXHAUSTIVE_LIMIT);
    let mut best_idx = vec![nearest_to_one(&candidates); free_axes];
    let mut best_free: Vec<f64> = best_idx.iter().map(|&i| candidates[i]).collect();
    let mut best = s.rate(&best_free)?;

    if exhaustive {
        let total = combos.unwrap_or(1);
        for code in 0..total {
            let idx = decode(code, candidates.len(), free_axes);
            let free: Vec<f64> = idx.iter().map(|&i| candidates[i]).collect();
            let r = s.rate(&free)?;
            if r.1.value < best.1.value || (r.1.value == best.1.value && idx < best_idx) {
                best = r;
                best_idx = idx;
                best_free = free;
            }
        }
    } else {
        for _ in 0..MAX_SWEEPS {
            let mut improved = false;
            for axis in 0..free_axes {
                for (i, &c) in candidates.iter().enumerate() {
                    if i == best_idx[axis] {
                        continue;
                    }
                    let mut free = best_free.clone();
                    free[axis] = c;
                    let r = s.rate(&free)?;
                    if r.1.value < best.1.value {
                        best = r;
                        best_idx[axis] = i;
                        best_free = free;
                        improved = true;
                    }
                }
            }
            if !improved {
                break;
            }
        }
    }

    if space.refine && candidates.len() > 1 {
        for axis in 0..free_axes {
            let i = best_idx[axis];
            let lo = candidates[i.saturating_sub(1)];
            let hi = candidates[(i + 1).min(candidates.len() - 1)];
            let (a, b) = (lo.ln(), hi.ln());
            for k in 0..REFINE_POINTS {
                let c = (a + (b - a) * (k as f64 + 0.5) / REFINE_POINTS as f64).exp();
                let mut free = best_free.clone();
                free[axis] = c;
                let r = s.rate(&free)?;
                if r.1.value < best.1.value {
                    best = r;
                    best_free = free;
                }
            }
        }
    }

    let (norm, evidence) = best;
    let certificate = if evidence.value < 0.0 {
        Some(from_evidence(f, &norm, evidence.clone())?)
    } else {
        None
    };
    Ok(WeightSearch {
        rate: evidence.value,
        norm,
        evidence,
        strategy: if exhaustive {
            "exhaustive"
        } else {
            "coordinate-descent"
        }
        .into(),
        evaluated: s.evaluated,
        certificate,
    })
}

fn nearest_to_one(candidates: &[f64]) -> usize {
    candidates
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.ln().abs().total_cmp(&b.1.ln().abs()))
        .map_or(0, |(i, _)| i)
}

/// Mixed-radix digits of `code`, most significant first.
fn decode(mut code: usize, radix: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = code % radix;
        code /= radix;
    }
    out
}
