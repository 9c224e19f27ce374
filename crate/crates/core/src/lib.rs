//! Teleportation of Gaussian phase-space distributions.
//!
//! - [`gaussian`]: Gaussian states, densities, marginals, overlaps, smearing and conditioning.
//! - [`realizability`]: uncertainty-relation classification of standard-form resources.
//! - [`teleport`]: the analytic protocol (measurement statistics, outputs, fidelity).
//! - [`mc`]: a seeded Monte Carlo simulation of the same protocol, used as an independent oracle.

pub mod error;
pub mod gaussian;
pub mod mc;
pub mod realizability;
pub mod teleport;

pub use error::{Error, Result};
pub use gaussian::{overlap, GaussianState, PhasePoint, ResourceParams};
pub use realizability::{
    check, make, mirror, mirror_entangled, Bound, ExactLimit, NamedResource, RealizabilityReport, Resource,
    ResourceKind, Verdict,
};
pub use teleport::{ProtocolVariant, TeleportOutcome};
