//! Seeded Monte Carlo simulation of the protocol as a sampling process.
//!
//! Each shot draws `α1 ~ W_in` and `(α2, α3) ~ W_23` independently, forms the
//! measured `β`, translates `α3` and records the output point. Moments of the
//! output ensemble are compared against the analytic engine.
//!
//! The sample index space is split contiguously across `streams`; stream `k`
//! owns a ChaCha8 generator seeded with the `(k+1)`-th splitmix64 output
//! starting from `seed`. Streams run in parallel and are merged in stream
//! order, so results do not depend on the number of worker threads.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{GaussianState, PhasePoint};
use crate::realizability::{ExactLimit, Resource};
use crate::teleport::{fidelity, ProtocolVariant};

/// Variance of the auxiliary proposal for the free ridge coordinates `(q2, p2)`
/// of the EPR and mirror limits. The output point does not depend on it.
pub const PROPOSAL_VARIANCE: f64 = 100.0;

/// Minimum number of accepted shots for a conditioned run.
pub const MIN_ACCEPTED: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub seed: u64,
    pub samples: u64,
    pub streams: u32,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig { seed: 42, samples: 1_000_000, streams: 16 }
    }
}

impl McConfig {
    pub fn new(seed: u64, samples: u64, streams: u32) -> Result<Self> {
        let cfg = McConfig { seed, samples, streams };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::NonPositiveSamples);
        }
        if self.streams == 0 {
            return Err(Error::InvalidConfig("stream count must be positive".into()));
        }
        Ok(())
    }

    /// Half-open sample range owned by `stream`.
    fn stream_range(&self, stream: u32) -> (u64, u64) {
        let streams = u64::from(self.streams);
        let k = u64::from(stream);
        let base = self.samples / streams;
        let extra = self.samples % streams;
        let start = k * base + k.min(extra);
        let len = base + u64::from(k < extra);
        (start, start + len)
    }
}

fn splitmix64(state: u64) -> u64 {
    let mut z = state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of stream `k`: the `(k+1)`-th splitmix64 output from state `seed`.
pub fn stream_seed(seed: u64, stream: u32) -> u64 {
    const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
    splitmix64(seed.wrapping_add(GOLDEN_GAMMA.wrapping_mul(u64::from(stream) + 1)))
}

/// One simulated run of the protocol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shot {
    pub input: PhasePoint,
    pub sender: PhasePoint,
    pub receiver: PhasePoint,
    pub beta: PhasePoint,
    pub output: PhasePoint,
}

/// Draws `mean + L z` with a rank-revealing factor `L`.
#[derive(Debug, Clone)]
struct FactorSampler<const N: usize> {
    mean: [f64; N],
    factor: [[f64; N]; N],
}

impl<const N: usize> FactorSampler<N> {
    fn new(state: &GaussianState) -> Self {
        debug_assert_eq!(state.dim(), N);
        let l: DMatrix<f64> = state.sampling_factor();
        let mut factor = [[0.0; N]; N];
        for (i, row) in factor.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = l[(i, j)];
            }
        }
        let mut mean = [0.0; N];
        mean.copy_from_slice(state.mean().as_slice());
        FactorSampler { mean, factor }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> [f64; N] {
        let z: [f64; N] = std::array::from_fn(|_| StandardNormal.sample(rng));
        std::array::from_fn(|i| {
            self.mean[i] + self.factor[i].iter().zip(&z).map(|(l, z)| l * z).sum::<f64>()
        })
    }
}

#[derive(Debug, Clone)]
enum ResourceSampler {
    Gaussian(FactorSampler<4>),
    /// `q3 = q2`, `p3 = sign·p2`, with `(q2, p2)` from the wide proposal.
    Ridge { momentum_sign: f64 },
}

impl ResourceSampler {
    fn new(resource: &Resource, variant: ProtocolVariant) -> Result<Self> {
        let improper = |limit: ExactLimit| Error::ImproperLimitCombination {
            resource: limit.name().into(),
            variant: variant.name().into(),
        };
        match resource {
            Resource::Finite(params) => Ok(ResourceSampler::Gaussian(FactorSampler::new(&params.to_state()?))),
            Resource::Limit(ExactLimit::ClassicalPoint) => Ok(ResourceSampler::Gaussian(FactorSampler {
                mean: [0.0; 4],
                factor: [[0.0; 4]; 4],
            })),
            // In the mismatched variant the output depends on the proposal.
            Resource::Limit(ExactLimit::Epr) => match variant {
                ProtocolVariant::Standard => Ok(ResourceSampler::Ridge { momentum_sign: -1.0 }),
                ProtocolVariant::ClassicalVariant => Err(improper(ExactLimit::Epr)),
            },
            Resource::Limit(ExactLimit::Mirror) => match variant {
                ProtocolVariant::ClassicalVariant => Ok(ResourceSampler::Ridge { momentum_sign: 1.0 }),
                ProtocolVariant::Standard => Err(improper(ExactLimit::Mirror)),
            },
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> (PhasePoint, PhasePoint) {
        match self {
            ResourceSampler::Gaussian(s) => {
                let [q2, p2, q3, p3] = s.sample(rng);
                (PhasePoint { q: q2, p: p2 }, PhasePoint { q: q3, p: p3 })
            }
            ResourceSampler::Ridge { momentum_sign } => {
                let sigma = PROPOSAL_VARIANCE.sqrt();
                let z: [f64; 2] = std::array::from_fn(|_| StandardNormal.sample(rng));
                let (q2, p2) = (sigma * z[0], sigma * z[1]);
                (PhasePoint { q: q2, p: p2 }, PhasePoint { q: q2, p: momentum_sign * p2 })
            }
        }
    }
}

struct Simulator {
    input: FactorSampler<2>,
    resource: ResourceSampler,
    variant: ProtocolVariant,
    cfg: McConfig,
}

impl Simulator {
    fn new(input: &GaussianState, resource: &Resource, variant: ProtocolVariant, cfg: McConfig) -> Result<Self> {
        cfg.validate()?;
        if input.dim() != 2 {
            return Err(Error::DegenerateInput(format!("expected one mode, got dimension {}", input.dim())));
        }
        Ok(Simulator {
            input: FactorSampler::new(input),
            resource: ResourceSampler::new(resource, variant)?,
            variant,
            cfg,
        })
    }

    fn shot(&self, rng: &mut ChaCha8Rng) -> Shot {
        let [q1, p1] = self.input.sample(rng);
        let input = PhasePoint { q: q1, p: p1 };
        let (sender, receiver) = self.resource.sample(rng);
        let beta = self.variant.measure(input, sender);
        let output = self.variant.displace(receiver, beta);
        Shot { input, sender, receiver, beta, output }
    }

    /// Runs every stream and returns the kept values in sample order.
    fn run<T: Send>(&self, keep: impl Fn(&Shot) -> Option<T> + Sync) -> Vec<T> {
        let per_stream: Vec<Vec<T>> = (0..self.cfg.streams)
            .into_par_iter()
            .map(|stream| {
                let (start, end) = self.cfg.stream_range(stream);
                let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(self.cfg.seed, stream));
                (start..end).filter_map(|_| keep(&self.shot(&mut rng))).collect()
            })
            .collect();
        per_stream.into_iter().flatten().collect()
    }
}

/// Every shot of a run, in sample order. Memory grows with `cfg.samples`.
pub fn sample_shots(
    input: &GaussianState,
    resource: &Resource,
    variant: ProtocolVariant,
    cfg: McConfig,
) -> Result<Vec<Shot>> {
    Ok(Simulator::new(input, resource, variant, cfg)?.run(|shot| Some(*shot)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StandardErrors {
    pub mean: [f64; 2],
    pub cov_qq: f64,
    pub cov_qp: f64,
    pub cov_pp: f64,
    pub fidelity: f64,
}

impl StandardErrors {
    pub fn to_vec(&self) -> Vec<f64> {
        vec![self.mean[0], self.mean[1], self.cov_qq, self.cov_qp, self.cov_pp, self.fidelity]
    }
}

/// Empirical moments of an output ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    /// Shots contributing to the moments.
    pub samples: u64,
    /// Shots drawn (equal to `samples` unless conditioned).
    pub draws: u64,
    pub mean: [f64; 2],
    pub cov: [[f64; 2]; 2],
    /// `2π ∫ W_in N(mean, cov)`: the overlap with a Gaussian fitted to the ensemble.
    pub fidelity_estimate: f64,
    pub standard_errors: StandardErrors,
}

impl McEstimate {
    pub fn acceptance_rate(&self) -> f64 {
        self.samples as f64 / self.draws as f64
    }

    pub fn fitted_state(&self) -> Result<GaussianState> {
        GaussianState::single_mode(self.mean, self.cov)
    }

    /// `(estimate - reference) / standard error` for every compared quantity.
    pub fn z_scores(&self, reference: &GaussianState, reference_fidelity: f64) -> Result<ZScores> {
        let (m, c) = match (reference.mean_2(), reference.cov_2()) {
            (Some(m), Some(c)) => (m, c),
            _ => return Err(Error::DimensionMismatch { expected: 2, found: reference.dim() }),
        };
        let se = &self.standard_errors;
        Ok(ZScores {
            mean_q: z_score(self.mean[0], m[0], se.mean[0]),
            mean_p: z_score(self.mean[1], m[1], se.mean[1]),
            cov_qq: z_score(self.cov[0][0], c[0][0], se.cov_qq),
            cov_qp: z_score(self.cov[0][1], c[0][1], se.cov_qp),
            cov_pp: z_score(self.cov[1][1], c[1][1], se.cov_pp),
            fidelity: z_score(self.fidelity_estimate, reference_fidelity, se.fidelity),
        })
    }
}

fn z_score(estimate: f64, reference: f64, se: f64) -> f64 {
    let diff = estimate - reference;
    if diff == 0.0 {
        0.0
    } else {
        diff / se
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZScores {
    pub mean_q: f64,
    pub mean_p: f64,
    pub cov_qq: f64,
    pub cov_qp: f64,
    pub cov_pp: f64,
    pub fidelity: f64,
}

impl ZScores {
    pub fn to_vec(&self) -> Vec<f64> {
        vec![self.mean_q, self.mean_p, self.cov_qq, self.cov_qp, self.cov_pp, self.fidelity]
    }

    /// Largest magnitude; infinite if a quantity differs with zero standard error.
    pub fn max_abs(&self) -> f64 {
        self.to_vec().into_iter().map(f64::abs).fold(0.0, f64::max)
    }
}

/// Fidelity of `N(m, C)` against the input, parameterized by
/// `θ = (m_q, m_p, C_qq, C_qp, C_pp)`.
fn fidelity_of(input_mean: [f64; 2], input_cov: [[f64; 2]; 2], theta: &[f64; 5]) -> f64 {
    let s00 = input_cov[0][0] + theta[2];
    let s01 = input_cov[0][1] + theta[3];
    let s11 = input_cov[1][1] + theta[4];
    let det = s00 * s11 - s01 * s01;
    let dq = theta[0] - input_mean[0];
    let dp = theta[1] - input_mean[1];
    let quad = (s11 * dq * dq - 2.0 * s01 * dq * dp + s00 * dp * dp) / det;
    (-0.5 * quad).exp() / det.sqrt()
}

fn estimate(points: &[[f64; 2]], draws: u64, input: &GaussianState) -> Result<McEstimate> {
    let n = points.len();
    if n < 2 {
        return Err(Error::NonPositiveSamples);
    }
    let nf = n as f64;
    let mut mean = [0.0; 2];
    for p in points {
        mean[0] += p[0];
        mean[1] += p[1];
    }
    mean = mean.map(|s| s / nf);

    let mut sums = [0.0; 3];
    for p in points {
        let (dq, dp) = (p[0] - mean[0], p[1] - mean[1]);
        sums[0] += dq * dq;
        sums[1] += dq * dp;
        sums[2] += dp * dp;
    }
    let biased = sums.map(|s| s / nf);
    let unbiased = sums.map(|s| s / (nf - 1.0));
    let cov = [[unbiased[0], unbiased[1]], [unbiased[1], unbiased[2]]];

    // Covariance of the estimators from their influence functions.
    let mut influence = [[0.0; 5]; 5];
    for p in points {
        let (dq, dp) = (p[0] - mean[0], p[1] - mean[1]);
        let u = [dq, dp, dq * dq - biased[0], dq * dp - biased[1], dp * dp - biased[2]];
        for i in 0..5 {
            for j in 0..=i {
                influence[i][j] += u[i] * u[j];
            }
        }
    }
    #[allow(clippy::needless_range_loop)]
    for i in 0..5 {
        for j in 0..=i {
            influence[i][j] /= nf * nf;
            influence[j][i] = influence[i][j];
        }
    }

    let input_mean = input.mean_2().expect("single-mode input");
    let input_cov = input.cov_2().expect("single-mode input");
    let fitted = GaussianState::single_mode(mean, cov)?;
    let fidelity_estimate = fidelity(input, &fitted)?;

    // delta method with a central-difference gradient
    let theta = [mean[0], mean[1], cov[0][0], cov[0][1], cov[1][1]];
    let grad: [f64; 5] = std::array::from_fn(|i| {
        let h = 1e-6 * theta[i].abs().max(1.0);
        let (mut up, mut down) = (theta, theta);
        up[i] += h;
        down[i] -= h;
        (fidelity_of(input_mean, input_cov, &up) - fidelity_of(input_mean, input_cov, &down)) / (2.0 * h)
    });
    let fidelity_var: f64 = (0..5)
        .flat_map(|i| (0..5).map(move |j| (i, j)))
        .map(|(i, j)| grad[i] * influence[i][j] * grad[j])
        .sum();

    Ok(McEstimate {
        samples: n as u64,
        draws,
        mean,
        cov,
        fidelity_estimate,
        standard_errors: StandardErrors {
            mean: [influence[0][0].sqrt(), influence[1][1].sqrt()],
            cov_qq: influence[2][2].sqrt(),
            cov_qp: influence[3][3].sqrt(),
            cov_pp: influence[4][4].sqrt(),
            fidelity: fidelity_var.max(0.0).sqrt(),
        },
    })
}

/// Simulates the protocol and summarizes the output ensemble.
pub fn run_protocol(
    input: &GaussianState,
    resource: &Resource,
    variant: ProtocolVariant,
    cfg: McConfig,
) -> Result<McEstimate> {
    let sim = Simulator::new(input, resource, variant, cfg)?;
    let outputs = sim.run(|shot| Some(shot.output.to_array()));
    estimate(&outputs, cfg.samples, input)
}

/// Square acceptance window `|qβ - q₀| ≤ tol`, `|pβ - p₀| ≤ tol`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaWindow {
    pub center: PhasePoint,
    pub tolerance: f64,
}

impl BetaWindow {
    pub fn contains(&self, beta: PhasePoint) -> bool {
        (beta.q - self.center.q).abs() <= self.tolerance && (beta.p - self.center.p).abs() <= self.tolerance
    }
}

/// Rejection-sampling realization of conditioning on the measured `β`:
/// keeps only shots whose `β` falls inside `window`.
pub fn conditioned_run(
    input: &GaussianState,
    resource: &Resource,
    variant: ProtocolVariant,
    window: BetaWindow,
    cfg: McConfig,
) -> Result<McEstimate> {
    if !(window.tolerance.is_finite() && window.tolerance > 0.0) || !window.center.is_finite() {
        return Err(Error::InvalidConfig(format!("invalid β window tolerance {}", window.tolerance)));
    }
    if let Resource::Limit(limit @ (ExactLimit::Epr | ExactLimit::Mirror)) = resource {
        return Err(Error::ExactLimitUnsupported(limit.name().into()));
    }
    let sim = Simulator::new(input, resource, variant, cfg)?;
    let outputs = sim.run(|shot| window.contains(shot.beta).then(|| shot.output.to_array()));
    let accepted = outputs.len() as u64;
    if accepted < MIN_ACCEPTED {
        return Err(Error::WindowTooNarrow { accepted, required: MIN_ACCEPTED });
    }
    estimate(&outputs, cfg.samples, input)
}
