//! The generalized teleportation protocol over Gaussian phase-space distributions.
//!
//! Subsystem 1 carries the input `W_in(α1)`, subsystems 2 and 3 the resource.
//! The sender measures `β = (q2 - q1, p2 ± p1)` and the receiver translates
//! subsystem 3 by `β`. Everything here is exact linear-Gaussian propagation
//! over `x = (q1, p1, q2, p2, q3, p3)`; the ridge limits `Epr` and `Mirror`
//! have improper densities and are handled by dedicated analytic branches.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{overlap, GaussianState, PhasePoint, ResourceParams};
use crate::realizability::{ExactLimit, Resource};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolVariant {
    /// Measures `(q2 - q1, p2 + p1)`, displaces `(q3 - qβ, p3 + pβ)`.
    Standard,
    /// Measures `(q2 - q1, p2 - p1)`, displaces `(q3 - qβ, p3 - pβ)`.
    ///
    /// This pair of conjugate combinations has no physical measurement.
    #[serde(rename = "classical")]
    ClassicalVariant,
}

impl ProtocolVariant {
    /// Sign `s` in `pβ = p2 + s·p1`; the receiver's momentum shift is `p3 + s·pβ`.
    fn momentum_sign(self) -> f64 {
        match self {
            ProtocolVariant::Standard => 1.0,
            ProtocolVariant::ClassicalVariant => -1.0,
        }
    }

    /// Rows of the map `x ↦ (q_out, p_out, qβ, pβ)`.
    pub(crate) fn protocol_map(self) -> DMatrix<f64> {
        let s = self.momentum_sign();
        #[rustfmt::skip]
        let rows = [
            // q1   p1   q2    p2   q3   p3
            1.0,  0.0, -1.0,  0.0, 1.0, 0.0, // q_out = q3 - qβ
            0.0,  1.0,  0.0,  s,   0.0, 1.0, // p_out = p3 + s·pβ
           -1.0,  0.0,  1.0,  0.0, 0.0, 0.0, // qβ
            0.0,  s,    0.0,  1.0, 0.0, 0.0, // pβ
        ];
        DMatrix::from_row_slice(4, 6, &rows)
    }

    /// Measured pair for a single shot.
    pub fn measure(self, input: PhasePoint, sender: PhasePoint) -> PhasePoint {
        PhasePoint {
            q: sender.q - input.q,
            p: sender.p + self.momentum_sign() * input.p,
        }
    }

    /// Receiver's translation of subsystem 3 by the measured `β`.
    pub fn displace(self, receiver: PhasePoint, beta: PhasePoint) -> PhasePoint {
        PhasePoint {
            q: receiver.q - beta.q,
            p: receiver.p + self.momentum_sign() * beta.p,
        }
    }

    /// Whether the measured pair can be measured in a laboratory.
    pub fn physically_measurable(self) -> bool {
        self == ProtocolVariant::Standard
    }

    pub fn name(self) -> &'static str {
        match self {
            ProtocolVariant::Standard => "standard",
            ProtocolVariant::ClassicalVariant => "classical",
        }
    }
}

impl fmt::Display for ProtocolVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Variances of the noise the resource adds to each output quadrature:
/// `Var(q3 - q2)` and `Var(p3 + s·p2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AddedNoise {
    pub q: f64,
    pub p: f64,
}

impl AddedNoise {
    pub fn is_zero(&self) -> bool {
        self.q == 0.0 && self.p == 0.0
    }
}

fn finite_noise(params: &ResourceParams, variant: ProtocolVariant) -> (f64, f64) {
    let ResourceParams { a, b, c1, c2 } = *params;
    let s = variant.momentum_sign();
    (a + b - 2.0 * c1, a + b + 2.0 * s * c2)
}

fn improper(limit: ExactLimit, variant: ProtocolVariant) -> Error {
    Error::ImproperLimitCombination { resource: limit.name().into(), variant: variant.name().into() }
}

/// Ridge limits only teleport under the variant whose measurement matches
/// their correlations; in the other variant the added noise diverges.
fn ridge_matches(limit: ExactLimit, variant: ProtocolVariant) -> Option<bool> {
    match limit {
        ExactLimit::Epr => Some(variant == ProtocolVariant::Standard),
        ExactLimit::Mirror => Some(variant == ProtocolVariant::ClassicalVariant),
        ExactLimit::ClassicalPoint => None,
    }
}

/// Added noise of a resource under a protocol variant.
///
/// Negative values (only possible for parameters that are not a density) are
/// reported as [`Error::NegativeNoise`].
pub fn added_noise(resource: &Resource, variant: ProtocolVariant) -> Result<AddedNoise> {
    let params = match resource {
        Resource::Finite(params) => *params,
        Resource::Limit(limit) => match ridge_matches(*limit, variant) {
            Some(true) => return Ok(AddedNoise { q: 0.0, p: 0.0 }),
            Some(false) => return Err(improper(*limit, variant)),
            None => ResourceParams::zero(),
        },
    };
    let (q, p) = finite_noise(&params, variant);
    if q < 0.0 {
        return Err(Error::NegativeNoise { quadrature: "q", value: q });
    }
    if p < 0.0 {
        return Err(Error::NegativeNoise { quadrature: "p", value: p });
    }
    Ok(AddedNoise { q, p })
}

fn check_input(input: &GaussianState) -> Result<()> {
    if input.dim() != 2 {
        return Err(Error::DegenerateInput(format!("expected one mode, got dimension {}", input.dim())));
    }
    Ok(())
}

fn check_proper_input(input: &GaussianState) -> Result<()> {
    check_input(input)?;
    let min = input.min_eigenvalue();
    if min < crate::gaussian::DEGENERATE_EIGENVALUE {
        return Err(Error::DegenerateInput(format!("smallest covariance eigenvalue {min:e}")));
    }
    Ok(())
}

/// Finite resources, including the point limit's null covariance.
fn finite_params(resource: &Resource) -> Option<ResourceParams> {
    match resource {
        Resource::Finite(params) => Some(*params),
        Resource::Limit(limit) => limit.finite_params(),
    }
}

/// Joint Gaussian of `(q_out, p_out, qβ, pβ)`.
fn protocol_joint(input: &GaussianState, params: &ResourceParams, variant: ProtocolVariant) -> Result<GaussianState> {
    let initial = input.product(&params.to_state()?);
    initial.linear_map(&variant.protocol_map(), None)
}

/// Distribution `P(β)` of the measured pair.
pub fn measurement_distribution(
    input: &GaussianState,
    resource: &Resource,
    variant: ProtocolVariant,
) -> Result<GaussianState> {
    check_proper_input(input)?;
    let params = finite_params(resource)
        .ok_or_else(|| Error::ExactLimitUnsupported(resource.describe()))?;
    protocol_joint(input, &params, variant)?.marginal(&[2, 3])
}

/// Output state `W_out(α|β)` after a single run that measured `beta`.
pub fn conditional_output(
    input: &GaussianState,
    resource: &Resource,
    beta: PhasePoint,
    variant: ProtocolVariant,
) -> Result<GaussianState> {
    check_proper_input(input)?;
    if !beta.is_finite() {
        return Err(Error::InvalidState("non-finite measurement result".into()));
    }
    match resource {
        Resource::Limit(limit @ (ExactLimit::Epr | ExactLimit::Mirror)) => {
            if ridge_matches(*limit, variant) == Some(true) {
                Ok(input.clone())
            } else {
                Err(improper(*limit, variant))
            }
        }
        // A single shot reproduces the measured input point exactly.
        Resource::Limit(ExactLimit::ClassicalPoint) => {
            let output = PhasePoint { q: -beta.q, p: variant.momentum_sign() * beta.p };
            Ok(GaussianState::from_parts(
                DVector::from_row_slice(&output.to_array()),
                DMatrix::zeros(2, 2),
            ))
        }
        Resource::Finite(params) => {
            protocol_joint(input, params, variant)?.condition(&[2, 3], &beta.to_array())
        }
    }
}

/// Output state averaged over all measurement results:
/// the input convolved with `diag(noise_q, noise_p)`.
pub fn averaged_output(input: &GaussianState, resource: &Resource, variant: ProtocolVariant) -> Result<GaussianState> {
    check_input(input)?;
    let noise = added_noise(resource, variant)?;
    if noise.is_zero() {
        return Ok(input.clone());
    }
    input.convolve(&DMatrix::from_diagonal(&DVector::from_row_slice(&[noise.q, noise.p])))
}

/// Density of the sender's input subsystem after the measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformDensity {
    pub value: f64,
}

/// State of subsystem 1 after the measurement: the sender port holds the
/// ridge `δ(q2 - q1 - qβ) δ(p2 ± p1 - pβ) / 2π`, and integrating out
/// subsystem 2 leaves `1 / (2π |det J|)` with `J = ∂β / ∂(q2, p2)`.
///
/// Neither the resource nor `beta` enters: the measurement consumes the
/// sender's share of the resource and the input is erased at its port.
pub fn sender_marginal(beta: PhasePoint, variant: ProtocolVariant) -> UniformDensity {
    debug_assert!(beta.is_finite());
    let map = variant.protocol_map();
    let jacobian = map.view((2, 2), (2, 2)).determinant();
    UniformDensity { value: 1.0 / (2.0 * PI * jacobian.abs()) }
}

/// Single-shot perfect teleportation: `W_out(α|β) = W_in(α)` for every `β`.
///
/// Only the ridge limit matching the variant does this. Finite resources with
/// zero added noise (including the point limit) reproduce the input only as an
/// ensemble; see [`ensemble_perfect`].
pub fn is_perfect(resource: &Resource, variant: ProtocolVariant) -> bool {
    match resource {
        Resource::Limit(limit) => ridge_matches(*limit, variant) == Some(true),
        Resource::Finite(_) => false,
    }
}

/// Averaged output equals the input: zero added noise in both quadratures.
pub fn ensemble_perfect(resource: &Resource, variant: ProtocolVariant) -> bool {
    added_noise(resource, variant).is_ok_and(|noise| noise.is_zero())
}

/// Overlap fidelity `F = 2π ∫ W_in W_out`.
///
/// This is the phase-space overlap, not the Uhlmann fidelity; it lies in
/// `[0, 1]` when the input is pure.
pub fn fidelity(input: &GaussianState, output: &GaussianState) -> Result<f64> {
    check_input(input)?;
    check_input(output)?;
    Ok(2.0 * PI * overlap(input, output)?)
}

/// Fidelity for the coherent input `e^{-q²-p²}/π` under the standard protocol:
/// `1 / √((a+b-2c1+1)(a+b+2c2+1))`.
pub fn fidelity_coherent_closed_form(params: &ResourceParams) -> Result<f64> {
    let ResourceParams { a, b, c1, c2 } = *params;
    let fq = a + b - 2.0 * c1 + 1.0;
    let fp = a + b + 2.0 * c2 + 1.0;
    if fq <= 0.0 || fp <= 0.0 {
        return Err(Error::UndefinedFidelity(fq, fp));
    }
    Ok(1.0 / (fq * fp).sqrt())
}

/// Everything one run of the protocol produces for a given measurement result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TeleportOutcome {
    pub beta: PhasePoint,
    pub conditional_output: GaussianState,
    pub averaged_output: GaussianState,
    pub noise_q: f64,
    pub noise_p: f64,
    pub fidelity: f64,
    pub variant: ProtocolVariant,
}

pub fn teleport(
    input: &GaussianState,
    resource: &Resource,
    beta: PhasePoint,
    variant: ProtocolVariant,
) -> Result<TeleportOutcome> {
    let noise = added_noise(resource, variant)?;
    let conditional_output = conditional_output(input, resource, beta, variant)?;
    let averaged_output = averaged_output(input, resource, variant)?;
    let fidelity = fidelity(input, &averaged_output)?;
    Ok(TeleportOutcome {
        beta,
        conditional_output,
        averaged_output,
        noise_q: noise.q,
        noise_p: noise.p,
        fidelity,
        variant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realizability::{make, mirror, tmss_params, ResourceKind};
    use ProtocolVariant::{ClassicalVariant, Standard};

    fn coherent() -> GaussianState {
        GaussianState::coherent(0.0, 0.0).unwrap()
    }

    fn tmss(r: f64) -> Resource {
        Resource::Finite(tmss_params(r).unwrap())
    }

    fn mirror_tmss(r: f64) -> Resource {
        Resource::Finite(mirror(&tmss_params(r).unwrap()))
    }

    const EPR: Resource = Resource::Limit(ExactLimit::Epr);
    const MIRROR: Resource = Resource::Limit(ExactLimit::Mirror);
    const POINT: Resource = Resource::Limit(ExactLimit::ClassicalPoint);

    #[test]
    fn single_shot_map_matches_protocol_rows() {
        let input = PhasePoint { q: 0.3, p: -1.1 };
        let sender = PhasePoint { q: 2.0, p: 0.5 };
        let receiver = PhasePoint { q: -0.7, p: 0.25 };
        for variant in [Standard, ClassicalVariant] {
            let beta = variant.measure(input, sender);
            let out = variant.displace(receiver, beta);
            let x = DVector::from_row_slice(&[input.q, input.p, sender.q, sender.p, receiver.q, receiver.p]);
            let y = variant.protocol_map() * x;
            assert!((y[0] - out.q).abs() < 1e-15 && (y[1] - out.p).abs() < 1e-15);
            assert!((y[2] - beta.q).abs() < 1e-15 && (y[3] - beta.p).abs() < 1e-15);
        }
    }

    #[test]
    fn measurement_distribution_examples() {
        let p = measurement_distribution(&coherent(), &tmss(0.0), Standard).unwrap();
        assert_eq!(p.mean().as_slice(), &[0.0, 0.0]);
        assert!((p.cov() - DMatrix::identity(2, 2)).norm() < 1e-15);

        let shifted = GaussianState::coherent(3.0, -2.0).unwrap();
        let p = measurement_distribution(&shifted, &tmss(1.3), Standard).unwrap();
        assert_eq!(p.mean().as_slice(), &[-3.0, -2.0]);
        let p = measurement_distribution(&shifted, &tmss(1.3), ClassicalVariant).unwrap();
        assert_eq!(p.mean().as_slice(), &[-3.0, 2.0]);

        assert!(matches!(
            measurement_distribution(&coherent(), &EPR, Standard),
            Err(Error::ExactLimitUnsupported(_))
        ));
        let flat = GaussianState::single_mode([0.0, 0.0], [[0.5, 0.0], [0.0, 0.0]]).unwrap();
        assert!(matches!(
            measurement_distribution(&flat, &tmss(1.0), Standard),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn measurement_distribution_with_correlated_input() {
        // Var(q2 - q1) = a + Vqq, Var(p2 + p1) = a + Vpp, Cov = -Vqp
        let input = GaussianState::single_mode([0.0, 0.0], [[0.9, 0.2], [0.2, 0.6]]).unwrap();
        let params = ResourceParams::new(1.2, 0.8, 0.3, -0.1).unwrap();
        let p = measurement_distribution(&input, &params.into(), Standard).unwrap();
        let v = p.cov();
        assert!((v[(0, 0)] - 2.1).abs() < 1e-15);
        assert!((v[(1, 1)] - 1.8).abs() < 1e-15);
        assert!((v[(0, 1)] + 0.2).abs() < 1e-15);
    }

    #[test]
    fn ridge_limits_reproduce_the_input_for_every_beta() {
        let input = GaussianState::single_mode([0.4, -1.0], [[0.9, 0.2], [0.2, 0.6]]).unwrap();
        for beta in [PhasePoint::ORIGIN, PhasePoint { q: 5.0, p: -7.0 }] {
            assert_eq!(conditional_output(&input, &EPR, beta, Standard).unwrap(), input);
            assert_eq!(conditional_output(&input, &MIRROR, beta, ClassicalVariant).unwrap(), input);
            assert!(matches!(
                conditional_output(&input, &EPR, beta, ClassicalVariant),
                Err(Error::ImproperLimitCombination { .. })
            ));
            assert!(matches!(
                conditional_output(&input, &MIRROR, beta, Standard),
                Err(Error::ImproperLimitCombination { .. })
            ));
        }
    }

    #[test]
    fn point_limit_outputs_the_measured_input_point() {
        let input = coherent();
        let beta = PhasePoint { q: 0.8, p: -0.3 };
        let out = conditional_output(&input, &POINT, beta, Standard).unwrap();
        assert_eq!(out.mean().as_slice(), &[-0.8, -0.3]);
        assert_eq!(out.cov(), &DMatrix::zeros(2, 2));
        let out = conditional_output(&input, &POINT, beta, ClassicalVariant).unwrap();
        assert_eq!(out.mean().as_slice(), &[-0.8, 0.3]);

        // the generic conditioning path reaches the same delta
        let generic = conditional_output(&input, &ResourceParams::zero().into(), beta, Standard).unwrap();
        assert!((generic.mean() - DVector::from_row_slice(&[-0.8, -0.3])).norm() < 1e-14);
        assert!(generic.cov().norm() < 1e-14);
    }

    #[test]
    fn conditional_covariance_is_independent_of_beta() {
        let input = GaussianState::single_mode([0.1, 0.2], [[0.9, 0.2], [0.2, 0.6]]).unwrap();
        let resource = tmss(0.8);
        let a = conditional_output(&input, &resource, PhasePoint::ORIGIN, Standard).unwrap();
        let b = conditional_output(&input, &resource, PhasePoint { q: -3.0, p: 4.5 }, Standard).unwrap();
        assert_eq!(a.cov(), b.cov());
        assert_ne!(a.mean(), b.mean());
    }

    #[test]
    fn finite_zero_noise_resource_is_only_ensemble_perfect() {
        // q3 = q2, p3 = -p2 exactly, but with finite spread
        let resource: Resource = ResourceParams::new(1.0, 1.0, 1.0, -1.0).unwrap().into();
        assert!(ensemble_perfect(&resource, Standard));
        assert!(!is_perfect(&resource, Standard));
        let input = coherent();
        let a = conditional_output(&input, &resource, PhasePoint::ORIGIN, Standard).unwrap();
        let b = conditional_output(&input, &resource, PhasePoint { q: 1.0, p: 0.0 }, Standard).unwrap();
        assert_ne!(a.mean(), b.mean());
        assert_eq!(averaged_output(&input, &resource, Standard).unwrap(), input);
    }

    #[test]
    fn averaged_output_examples() {
        let input = coherent();
        assert_eq!(averaged_output(&input, &EPR, Standard).unwrap(), input);
        let out = averaged_output(&input, &tmss(0.0), Standard).unwrap();
        assert!((out.cov() - DMatrix::from_diagonal_element(2, 2, 1.5)).norm() < 1e-15);
        let mut previous = f64::INFINITY;
        for r in [1.0, 2.0, 4.0, 8.0] {
            let out = averaged_output(&input, &tmss(r), Standard).unwrap();
            let excess = out.cov()[(0, 0)] - 0.5;
            assert!((excess - (-2.0 * r).exp()).abs() < 1e-12 * (2.0 * r).cosh());
            assert!(excess < previous);
            previous = excess;
        }
    }

    #[test]
    fn negative_noise_is_reported() {
        let wild: Resource = ResourceParams::new(0.1, 0.1, 1.0, 0.0).unwrap().into();
        assert!(matches!(
            averaged_output(&coherent(), &wild, Standard),
            Err(Error::NegativeNoise { quadrature: "q", .. })
        ));
        let wild: Resource = ResourceParams::new(0.1, 0.1, 0.0, -1.0).unwrap().into();
        assert!(matches!(
            averaged_output(&coherent(), &wild, Standard),
            Err(Error::NegativeNoise { quadrature: "p", .. })
        ));
        // the classical variant flips the sign of c2
        assert!(averaged_output(&coherent(), &wild, ClassicalVariant).is_ok());
    }

    #[test]
    fn mirror_limit_noise_grows_with_squeezing() {
        assert!(!is_perfect(&MIRROR, Standard));
        assert!(is_perfect(&MIRROR, ClassicalVariant));
        assert!(matches!(added_noise(&MIRROR, Standard), Err(Error::ImproperLimitCombination { .. })));
        for r in [1.0, 2.0, 3.0] {
            let noise = added_noise(&mirror_tmss(r), Standard).unwrap();
            assert!((noise.p - (2.0 * r).exp()).abs() < 1e-12 * (2.0 * r).exp());
        }
    }

    #[test]
    fn sender_marginal_is_uniform() {
        for variant in [Standard, ClassicalVariant] {
            for beta in [PhasePoint::ORIGIN, PhasePoint { q: 5.0, p: -7.0 }] {
                assert_eq!(sender_marginal(beta, variant).value, 1.0 / (2.0 * PI));
            }
        }
    }

    #[test]
    fn perfection_flags() {
        assert!(is_perfect(&EPR, Standard));
        assert!(!is_perfect(&EPR, ClassicalVariant));
        assert!(!is_perfect(&POINT, Standard));
        assert!(ensemble_perfect(&POINT, Standard));
        assert!(ensemble_perfect(&POINT, ClassicalVariant));
        assert!(!ensemble_perfect(&tmss(2.0), Standard));
    }

    #[test]
    fn fidelity_examples() {
        let c = coherent();
        assert!((fidelity(&c, &c).unwrap() - 1.0).abs() < 1e-15);
        for r in [0.0, 0.5, 1.0, 2.0] {
            let out = averaged_output(&c, &tmss(r), Standard).unwrap();
            let f = fidelity(&c, &out).unwrap();
            assert!((f - 1.0 / (1.0 + (-2.0 * r).exp())).abs() < 1e-14);
            let out = averaged_output(&c, &mirror_tmss(r), Standard).unwrap();
            let f = fidelity(&c, &out).unwrap();
            let expected = 1.0 / ((1.0 + (-2.0 * r).exp()) * (1.0 + (2.0 * r).exp())).sqrt();
            assert!((f - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn closed_form_examples() {
        let f = fidelity_coherent_closed_form(&tmss_params(0.0).unwrap()).unwrap();
        assert!((f - 0.5).abs() < 1e-15);
        let f = fidelity_coherent_closed_form(&tmss_params(1.0).unwrap()).unwrap();
        assert!((f - 0.880_797_077_977_882_3).abs() < 1e-14);
        let f = fidelity_coherent_closed_form(&mirror(&tmss_params(1.0).unwrap())).unwrap();
        assert!((f - 0.324_027_136_831_942_7).abs() < 1e-14);
        let bad = ResourceParams::new(0.0, 0.0, 1.0, 0.0).unwrap();
        assert!(matches!(fidelity_coherent_closed_form(&bad), Err(Error::UndefinedFidelity(..))));
    }

    #[test]
    fn teleport_bundles_every_result() {
        let named = make(ResourceKind::Tmss { r: 1.0 }).unwrap();
        let outcome = teleport(&coherent(), &named.resource, PhasePoint { q: 0.2, p: 0.1 }, Standard).unwrap();
        assert!((outcome.fidelity - 0.880_797_077_977_882_3).abs() < 1e-14);
        assert!((outcome.noise_q - (-2.0f64).exp()).abs() < 1e-14);
        assert_eq!(outcome.averaged_output.mean(), coherent().mean());
    }
}
