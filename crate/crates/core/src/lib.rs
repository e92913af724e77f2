//! Numerical toolkit for viscous flow in the thin gap between a rigid body
//! and a wall near contact.
//!
//! What lives where:
//! - [`geometry`]: the contact chart, cap/wall profiles, cylinder-family
//!   integration domains and their boundary patches;
//! - [`fields`]: rigid velocity fields and the divergence-free squeeze/spin
//!   example built from a cut-off stream potential, with exact first
//!   derivatives and finite-difference second derivatives;
//! - [`quadrature`]: deterministic tensor Gauss–Legendre integration over
//!   gap domains and patches, with gap-adapted vertical scaling;
//! - [`identities`]: closed-form boundary flux formulas and the planar
//!   moment integrals, cross-checked against quadrature;
//! - [`estimates`]: right-hand sides of the velocity-component bounds,
//!   exponent tables, the fluid-only norm comparison, scaling fits;
//! - [`dynamics`]: the gap ODE layer: envelopes, the contact blow-up
//!   functional, and the collision family with its admissibility checks.
//!
//! Everything numeric is generic over [`scalar::Real`]; the `*64` aliases
//! below fix the common `f64` instantiation.

// validation deliberately writes `!(x > lo)` so NaN fails closed
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod estimates;
pub mod fields;
pub mod geometry;
pub mod identities;
pub mod linalg;
pub mod quadrature;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{cst, Real};

pub type Vec3x64 = linalg::Vec3<f64>;
pub type Mat3x64 = linalg::Mat3<f64>;
pub type GapGeometry64 = geometry::GapGeometry<f64>;
pub type GapState64 = geometry::GapState<f64>;
pub type DomainSpec64 = geometry::DomainSpec<f64>;
pub type SurfacePatch64 = geometry::SurfacePatch<f64>;
pub type QuadratureConfig64 = quadrature::QuadratureConfig<f64>;
pub type IntegralResult64 = quadrature::IntegralResult<f64>;
pub type RigidMotion64 = fields::RigidMotion<f64>;
pub type CutoffSpec64 = fields::CutoffSpec<f64>;
pub type VelocityField64 = fields::VelocityField<f64>;
pub type FluxCheck64 = identities::FluxCheck<f64>;
pub type TaylorMoments64 = identities::TaylorMoments<f64>;
pub type ExponentTable64 = estimates::ExponentTable<f64>;
pub type ConstantsLedger64 = estimates::ConstantsLedger<f64>;
pub type LemmaCheck64 = estimates::LemmaCheck<f64>;
pub type ScalingFit64 = estimates::ScalingFit<f64>;
pub type CollisionFamily64 = dynamics::CollisionFamily<f64>;
pub type Envelope64 = dynamics::Envelope<f64>;
pub type EnergyClassReport64 = dynamics::EnergyClassReport<f64>;
pub type TrajectoryReport64 = dynamics::TrajectoryReport<f64>;
