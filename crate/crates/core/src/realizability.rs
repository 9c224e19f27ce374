//! Which standard-form Gaussians are Wigner functions, and the named resources.
//!
//! A standard-form resource `(a, b, c1, c2)` is physically realizable exactly
//! when the four position-momentum uncertainty products satisfy
//!
//! ```text
//! a² ≥ 1/4,   b² ≥ 1/4,
//! (a+b+2c1)(a+b+2c2) ≥ 1,   (a+b-2c1)(a+b-2c2) ≥ 1.
//! ```
//!
//! The momentum mirror `p2 → -p2` flips the sign of `c2`; a realizable
//! resource whose mirror image is not realizable is entangled.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::ResourceParams;

/// Absolute tolerance on the uncertainty bounds for products of order one.
pub const BOUND_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Physical,
    Nonphysical,
}

/// The four uncertainty bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    /// `Δ²q2 Δ²p2 = a² ≥ 1/4`
    SenderMode,
    /// `Δ²q3 Δ²p3 = b² ≥ 1/4`
    ReceiverMode,
    /// `Δ²(q3+q2) Δ²(p3+p2) ≥ 1`
    SumQuadratures,
    /// `Δ²(q3-q2) Δ²(p3-p2) ≥ 1`
    DiffQuadratures,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizabilityReport {
    /// `a²`
    pub single_mode_2: f64,
    /// `b²`
    pub single_mode_3: f64,
    /// `(a+b+2c1)(a+b+2c2)`
    pub sum_product: f64,
    /// `(a+b-2c1)(a+b-2c2)`
    pub diff_product: f64,
    pub verdict: Verdict,
    /// Bounds that hold with equality (within tolerance).
    pub saturated: Vec<Bound>,
    pub mirror_entangled: bool,
}

struct Products {
    single_mode_2: f64,
    single_mode_3: f64,
    sum_product: f64,
    diff_product: f64,
    pair_tolerance: f64,
}

impl Products {
    fn of(params: &ResourceParams) -> Self {
        let ResourceParams { a, b, c1, c2 } = *params;
        let s = a + b;
        // Rounding in a+b-2c grows with the size of the factors, not of their
        // product; TMSS at r = 3 already has factors near 400.
        let magnitude = (s + 2.0 * c1.abs()) * (s + 2.0 * c2.abs());
        Products {
            single_mode_2: a * a,
            single_mode_3: b * b,
            sum_product: (s + 2.0 * c1) * (s + 2.0 * c2),
            diff_product: (s - 2.0 * c1) * (s - 2.0 * c2),
            pair_tolerance: BOUND_TOLERANCE * magnitude.max(1.0),
        }
    }

    fn single_tolerance(value: f64) -> f64 {
        BOUND_TOLERANCE * value.max(1.0)
    }

    fn bounds(&self) -> [(Bound, f64, f64, f64); 4] {
        [
            (Bound::SenderMode, self.single_mode_2, 0.25, Self::single_tolerance(self.single_mode_2)),
            (Bound::ReceiverMode, self.single_mode_3, 0.25, Self::single_tolerance(self.single_mode_3)),
            (Bound::SumQuadratures, self.sum_product, 1.0, self.pair_tolerance),
            (Bound::DiffQuadratures, self.diff_product, 1.0, self.pair_tolerance),
        ]
    }

    fn verdict(&self) -> Verdict {
        if self.bounds().iter().all(|&(_, value, bound, tol)| value >= bound - tol) {
            Verdict::Physical
        } else {
            Verdict::Nonphysical
        }
    }
}

fn verdict(params: &ResourceParams) -> Verdict {
    Products::of(params).verdict()
}

/// Evaluates the uncertainty products and classifies the resource.
pub fn check(params: &ResourceParams) -> RealizabilityReport {
    let products = Products::of(params);
    let saturated = products
        .bounds()
        .iter()
        .filter(|&&(_, value, bound, tol)| (value - bound).abs() <= tol)
        .map(|&(which, ..)| which)
        .collect();
    RealizabilityReport {
        single_mode_2: products.single_mode_2,
        single_mode_3: products.single_mode_3,
        sum_product: products.sum_product,
        diff_product: products.diff_product,
        verdict: products.verdict(),
        saturated,
        mirror_entangled: mirror_entangled(params),
    }
}

/// Momentum mirror `p2 → -p2`: `(a, b, c1, c2) ↦ (a, b, c1, -c2)`.
pub fn mirror(params: &ResourceParams) -> ResourceParams {
    ResourceParams { c2: -params.c2, ..*params }
}

/// Physical resource whose mirror image is not physical (Peres–Simon test in standard form).
pub fn mirror_entangled(params: &ResourceParams) -> bool {
    verdict(params) == Verdict::Physical && verdict(&mirror(params)) == Verdict::Nonphysical
}

/// Resources with no finite standard-form parameters, handled analytically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExactLimit {
    /// `δ(q3 - q2) δ(p3 + p2) / 2π`, the `r → ∞` limit of the TMSS.
    Epr,
    /// `δ(q3 - q2) δ(p3 - p2) / 2π`, the momentum mirror of the EPR limit.
    Mirror,
    /// `δ(q2) δ(p2) δ(q3) δ(p3)`: null covariance matrix.
    ClassicalPoint,
}

impl ExactLimit {
    pub fn verdict(self) -> Verdict {
        match self {
            ExactLimit::Epr => Verdict::Physical,
            ExactLimit::Mirror | ExactLimit::ClassicalPoint => Verdict::Nonphysical,
        }
    }

    pub fn mirror(self) -> ExactLimit {
        match self {
            ExactLimit::Epr => ExactLimit::Mirror,
            ExactLimit::Mirror => ExactLimit::Epr,
            ExactLimit::ClassicalPoint => ExactLimit::ClassicalPoint,
        }
    }

    pub fn mirror_entangled(self) -> bool {
        self.verdict() == Verdict::Physical && self.mirror().verdict() == Verdict::Nonphysical
    }

    /// The point limit has a (zero) covariance; the ridge limits have infinite
    /// variance along the ridge and none.
    pub fn finite_params(self) -> Option<ResourceParams> {
        match self {
            ExactLimit::ClassicalPoint => Some(ResourceParams::zero()),
            ExactLimit::Epr | ExactLimit::Mirror => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ExactLimit::Epr => "epr",
            ExactLimit::Mirror => "mirror",
            ExactLimit::ClassicalPoint => "point",
        }
    }
}

/// A resource shared between the sending and receiving ports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Resource {
    Finite(ResourceParams),
    Limit(ExactLimit),
}

impl Resource {
    pub fn verdict(&self) -> Verdict {
        match self {
            Resource::Finite(params) => verdict(params),
            Resource::Limit(limit) => limit.verdict(),
        }
    }

    pub fn mirror(&self) -> Resource {
        match self {
            Resource::Finite(params) => Resource::Finite(mirror(params)),
            Resource::Limit(limit) => Resource::Limit(limit.mirror()),
        }
    }

    pub fn mirror_entangled(&self) -> bool {
        match self {
            Resource::Finite(params) => mirror_entangled(params),
            Resource::Limit(limit) => limit.mirror_entangled(),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Resource::Finite(ResourceParams { a, b, c1, c2 }) => format!("({a}, {b}, {c1}, {c2})"),
            Resource::Limit(limit) => limit.name().to_string(),
        }
    }
}

impl From<ResourceParams> for Resource {
    fn from(params: ResourceParams) -> Self {
        Resource::Finite(params)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ResourceKind {
    Tmss { r: f64 },
    EprLimit,
    MirrorTmss { r: f64 },
    MirrorLimit,
    ClassicalPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NamedResource {
    pub kind: ResourceKind,
    pub resource: Resource,
}

/// Standard-form parameters of the two-mode squeezed state,
/// `(cosh 2r / 2, cosh 2r / 2, sinh 2r / 2, -sinh 2r / 2)`.
pub fn tmss_params(r: f64) -> Result<ResourceParams> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::NegativeSqueezing(r));
    }
    let a = (2.0 * r).cosh() / 2.0;
    let c = (2.0 * r).sinh() / 2.0;
    Ok(ResourceParams { a, b: a, c1: c, c2: -c })
}

pub fn make(kind: ResourceKind) -> Result<NamedResource> {
    let resource = match kind {
        ResourceKind::Tmss { r } => Resource::Finite(tmss_params(r)?),
        ResourceKind::MirrorTmss { r } => Resource::Finite(mirror(&tmss_params(r)?)),
        ResourceKind::EprLimit => Resource::Limit(ExactLimit::Epr),
        ResourceKind::MirrorLimit => Resource::Limit(ExactLimit::Mirror),
        ResourceKind::ClassicalPoint => Resource::Limit(ExactLimit::ClassicalPoint),
    };
    Ok(NamedResource { kind, resource })
}
