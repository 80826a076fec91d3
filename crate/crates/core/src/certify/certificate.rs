use chrono::{SecondsFormat, Utc};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::WeightedNorm;
use crate::lognorm::{lipschitz_constant, GridSpec, LipschitzEstimate};
use crate::models::{check_jacobian, JacobianKind, VectorField};

/// Agreement required of a finite-difference Jacobian before certifying.
const FD_AGREEMENT: f64 = 1e-7;
const FD_SAMPLES: usize = 1000;

const DIFFUSION_NOTE: &str = "The rate bounds every pair of solutions of u_t = F(u) + D u_xx \
with no-flux boundary, and of every network u' = F(u) - (L x D) u with symmetric Laplacian L, \
for any positive diagonal D, in the same weighted norm.";

const CAVEAT: &str = "Evidence-grade: the rate is a supremum over a finite sampling grid, not an \
interval-arithmetic bound; maxima between grid points can be missed.";

/// A sampled proof that `μ_{p,Q}(J_F) ≤ rate < 0` on the field's domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionCertificate {
    pub model: String,
    pub params: serde_json::Value,
    pub norm: WeightedNorm,
    pub rate: f64,
    pub verdict: String,
    pub evidence: LipschitzEstimate,
    pub diffusion_note: String,
    pub caveat: String,
    pub issued_at: String,
}

impl ContractionCertificate {
    pub fn is_contractive(&self) -> bool {
        self.rate < 0.0
    }
}

/// Certifies `f` in the norm `w` when the sampled logarithmic Lipschitz
/// constant is negative; otherwise refuses with the worst grid point.
///
/// Fields with finite-difference Jacobians must first agree with a
/// higher-order difference reference to `1e-7`.
pub fn issue_certificate(
    f: &dyn VectorField,
    w: &WeightedNorm,
    grid: &GridSpec,
) -> Result<ContractionCertificate> {
    if f.jacobian_kind() == JacobianKind::FiniteDifference {
        let mut rng = ChaCha8Rng::seed_from_u64(0xfd);
        let check = check_jacobian(f, FD_SAMPLES, grid.cap, &mut rng);
        if !check.passes(FD_AGREEMENT) {
            return Err(Error::JacobianCheckFailed {
                max_error: check.max_error,
            });
        }
    }
    let evidence = lipschitz_constant(f, w, grid)?;
    from_evidence(f, w, evidence)
}

pub(crate) fn from_evidence(
    f: &dyn VectorField,
    w: &WeightedNorm,
    evidence: LipschitzEstimate,
) -> Result<ContractionCertificate> {
    if evidence.value >= 0.0 {
        return Err(Error::Refused {
            rate: evidence.value,
            argmax: evidence.argmax_point.to_vec(),
        });
    }
    Ok(ContractionCertificate {
        model: f.name().to_string(),
        params: f.parameters(),
        norm: w.clone(),
        rate: evidence.value,
        verdict: "contractive".into(),
        evidence,
        diffusion_note: DIFFUSION_NOTE.into(),
        caveat: CAVEAT.into(),
        issued_at: Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true),
    })
}
