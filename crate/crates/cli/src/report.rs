//! JSON report schemas. Each report serializes to one object and parses back.

use gauss_teleport::mc::{McEstimate, StandardErrors, ZScores};
use gauss_teleport::{ExactLimit, GaussianState, PhasePoint, ProtocolVariant, RealizabilityReport, Verdict};
use serde::{Deserialize, Serialize};

/// Mean and covariance of a one-mode state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSummary {
    pub mean: [f64; 2],
    pub cov: [[f64; 2]; 2],
}

impl StateSummary {
    pub fn of(state: &GaussianState) -> Self {
        let m = state.mean();
        let c = state.cov();
        StateSummary { mean: [m[0], m[1]], cov: [[c[(0, 0)], c[(0, 1)]], [c[(1, 0)], c[(1, 1)]]] }
    }
}

/// Exact limits have no covariance, so they report only their verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitRealizability {
    pub limit: ExactLimit,
    pub verdict: Verdict,
    pub mirror_entangled: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Realizability {
    Finite(RealizabilityReport),
    Limit(LimitRealizability),
}

impl Realizability {
    pub fn verdict(&self) -> Verdict {
        match self {
            Realizability::Finite(r) => r.verdict,
            Realizability::Limit(l) => l.verdict,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalSummary {
    pub beta: PhasePoint,
    pub mean: [f64; 2],
    pub cov: [[f64; 2]; 2],
    /// False for the variant whose `β` no physical measurement can produce.
    pub physically_measurable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TeleportReport {
    pub resource: String,
    pub variant: ProtocolVariant,
    pub realizability: Realizability,
    pub noise_q: f64,
    pub noise_p: f64,
    pub averaged_output: StateSummary,
    pub fidelity: f64,
    pub perfect: bool,
    pub ensemble_perfect: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conditional_output: Option<ConditionalSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub resource: String,
    #[serde(flatten)]
    pub realizability: Realizability,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Empirical {
    pub mean: [f64; 2],
    pub cov: [[f64; 2]; 2],
    pub fidelity_estimate: f64,
}

impl Empirical {
    pub fn of(est: &McEstimate) -> Self {
        Empirical { mean: est.mean, cov: est.cov, fidelity_estimate: est.fidelity_estimate }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analytic {
    pub mean: [f64; 2],
    pub cov: [[f64; 2]; 2],
    pub fidelity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conditioning {
    pub beta: PhasePoint,
    pub tol: f64,
    pub accepted: u64,
    pub acceptance_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub resource: String,
    pub variant: ProtocolVariant,
    pub seed: u64,
    pub samples: u64,
    pub streams: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conditioning: Option<Conditioning>,
    pub empirical: Empirical,
    pub standard_errors: StandardErrors,
    pub analytic: Analytic,
    pub z_scores: ZScores,
    pub max_abs_z: f64,
    /// Each single shot's output is a point, not a distribution.
    pub single_shot_delta: bool,
}
