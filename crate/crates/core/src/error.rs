//! Error taxonomy shared by all modules. Payloads are `f64` regardless of
//! the working scalar so that error values survive generic call sites.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Planar radius of an evaluation point or domain left the contact chart.
    #[error("point at planar radius {radius} is outside the chart of radius {sigma0}")]
    ChartExceeded { radius: f64, sigma0: f64 },

    /// σ must lie in (0, σ₀/2].
    #[error("sigma {sigma} outside the admissible range (0, {limit}]")]
    SigmaOutOfRange { sigma: f64, limit: f64 },

    /// Surface patch with no area (e.g. ρ = 0).
    #[error("surface patch has zero area")]
    DegeneratePatch,

    /// An integrand or derivative produced NaN/inf.
    #[error("non-finite value encountered in {what}")]
    NonFinite { what: &'static str },

    /// Excluded-volume fraction exceeded the configured budget.
    #[error("quadrature defect {defect} exceeds budget {budget}")]
    DefectExceeded { defect: f64, budget: f64 },

    /// Finite-difference step shrunk below the resolvable floor.
    #[error("finite-difference step {step} below floor {floor}")]
    StepUnderflow { step: f64, floor: f64 },

    /// Second-derivative stencil could not be fitted inside the fluid.
    #[error("finite-difference stencil leaves the fluid region")]
    StencilClipped,

    /// The phi-plane flux identity requires the rotated frame with ω₁ = 0.
    #[error("frame violation: omega1 = {omega1} must be 0 for the phi-plane identity")]
    FrameViolation { omega1: f64 },

    /// Gap distance exceeds the body diameter bound H.
    #[error("gap {h} exceeds the diameter bound {big_h}")]
    GapExceedsDiameter { h: f64, big_h: f64 },

    /// σ outside the comparison lemma's admissible window.
    #[error("sigma {sigma} outside the admissible window [{lower}, {upper}]")]
    WindowViolation { sigma: f64, lower: f64, upper: f64 },

    /// α outside the range a formula is stated for.
    #[error("alpha {alpha} outside the admissible range ({lower}, {upper}]")]
    AlphaOutOfRange { alpha: f64, lower: f64, upper: f64 },

    /// Log-log fit input with a nonpositive coordinate.
    #[error("nonpositive value at index {index} in a log-log fit")]
    NonPositiveValue { index: usize },

    /// Too few points or too narrow a span for a valid scaling fit.
    #[error("scaling fit needs >= 4 points over >= 2 decades; got {points} points over {decades} decades")]
    InsufficientPoints { points: usize, decades: f64 },

    /// Paired lists of different lengths.
    #[error("length mismatch: lhs {lhs} vs rhs {rhs}")]
    LengthMismatch { lhs: usize, rhs: usize },

    /// Construction-time parameter violation.
    #[error("invalid parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn messages_carry_payloads() {
        let e = Error::ChartExceeded {
            radius: 2.0,
            sigma0: 1.6,
        };
        let s = e.to_string();
        assert!(s.contains("2"));
        assert!(s.contains("1.6"));
    }
}
