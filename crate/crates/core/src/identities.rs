//! Closed-form boundary fluxes of rigid fields over the cylinder-family top
//! patches, the planar Taylor moment integrals, and the harness that checks
//! every closed form against an independent surface quadrature.
//!
//! The closed forms are deliberately plain scalar arithmetic with no shared
//! helpers beyond the rigid-motion decomposition, so agreement with
//! [`crate::quadrature::surface_integral`] is a genuine two-implementation
//! cross-check.

use crate::error::{Error, Result};
use crate::fields::RigidMotion;
use crate::geometry::{CapProfile, DomainSpec, GapGeometry, GapState, PatchKind, SurfacePatch};
use crate::quadrature::{planar_disc_integral, surface_integral, QuadratureConfig};
use crate::scalar::{cst, Real};

fn require_positive<R: Real>(name: &'static str, v: R) -> Result<()> {
    if !(v > R::zero()) {
        return Err(Error::InvalidParameter {
            name,
            value: v.as_f64(),
        });
    }
    Ok(())
}

/// Flux of a rigid field through the flat top disc (or half-annulus) over
/// the half footprint θ ∈ [γ, γ+π).
///
/// Full half-disc:   ½πρ²·u_{P3} + (2/3)ρ³(ω₁cos γ + ω₂sin γ).
/// Half-annulus:   (3/8)πρ²·u_{P3} + (7/12)ρ³(ω₁cos γ + ω₂sin γ).
///
/// Independent of the patch height and of the contact height: u_{P3} does
/// not change along the axis and the ω moment involves only x₁, x₂.
pub fn flux_top_flat<R: Real>(rho: R, gamma: R, m: &RigidMotion<R>, annulus: bool) -> Result<R> {
    require_positive("rho", rho)?;
    let pi = R::PI();
    let up3 = m.u_p3(R::zero());
    let om = m.omega;
    let angular = om.x * gamma.cos() + om.y * gamma.sin();
    let (disc_c, moment_c) = if annulus {
        (cst::<R>(3.0 / 8.0) * pi, cst::<R>(7.0 / 12.0))
    } else {
        (cst::<R>(0.5) * pi, cst::<R>(2.0 / 3.0))
    };
    Ok(disc_c * rho * rho * up3 + moment_c * rho * rho * rho * angular)
}

/// Flux of a rigid field through the cup top z = h + k·r^{1+α} over the
/// half footprint θ ∈ [γ, γ+π).
///
///   ½πρ²·u_{P3}
/// + (2k(1+α)/(2+α))·ρ^{2+α}·(u_{P1}sin γ − u_{P2}cos γ)
/// + (2/3 + 2k²(1+α)/(2α+3)·ρ^{2α})·ρ³·(ω₁cos γ + ω₂sin γ).
///
/// `h` locates the contact point P = (0,0,h) the cup passes through; the
/// tangential components u_{P1}, u_{P2} are taken there.
pub fn flux_top_cup<R: Real>(
    rho: R,
    gamma: R,
    k: R,
    alpha: R,
    m: &RigidMotion<R>,
    h: R,
) -> Result<R> {
    require_positive("rho", rho)?;
    require_positive("k", k)?;
    if !(alpha > R::zero() && alpha <= R::one()) {
        return Err(Error::InvalidParameter {
            name: "alpha",
            value: alpha.as_f64(),
        });
    }
    let one = R::one();
    let two = cst::<R>(2.0);
    let three = cst::<R>(3.0);
    let pi = R::PI();
    let up = m.contact_velocity(h);
    let om = m.omega;
    let t1 = cst::<R>(0.5) * pi * rho * rho * up.z;
    let t2 = two * k * (one + alpha) / (two + alpha)
        * rho.powf(two + alpha)
        * (up.x * gamma.sin() - up.y * gamma.cos());
    let t3 = (two / three + two * k * k * (one + alpha) / (two * alpha + three) * rho.powf(two * alpha))
        * rho
        * rho
        * rho
        * (om.x * gamma.cos() + om.y * gamma.sin());
    Ok(t1 + t2 + t3)
}

/// Flux of a rigid field through the ascending plane cap (unit normal
/// (0, −sin φ, cos φ)) over the half footprint θ ∈ [γ, γ+π).
///
///   (πρ²/(2cos φ))·(−u_{P2}sin φ + u_{P3}cos φ)
/// + (2/3)ρ³·(ω₂ + ω₃tan φ)·sin γ.
///
/// Requires the rotated frame with ω₁ = 0; in that frame both u_{P2} and
/// u_{P3} are independent of the contact height, so no h enters.
pub fn flux_top_phi<R: Real>(rho: R, gamma: R, tan_phi: R, m: &RigidMotion<R>) -> Result<R> {
    require_positive("rho", rho)?;
    if !tan_phi.is_finite() {
        return Err(Error::InvalidParameter {
            name: "tanPhi",
            value: tan_phi.as_f64(),
        });
    }
    // exact-zero frame requirement, with slack for rotation roundoff dust
    let omega_scale = m.omega.norm().max(R::one());
    if m.omega.x.abs() > cst::<R>(1e-12) * omega_scale {
        return Err(Error::FrameViolation {
            omega1: m.omega.x.as_f64(),
        });
    }
    let sec = (R::one() + tan_phi * tan_phi).sqrt();
    let (sin_phi, cos_phi) = (tan_phi / sec, R::one() / sec);
    let up = m.contact_velocity(R::zero());
    let om = m.omega;
    let t1 = R::PI() * rho * rho / (cst::<R>(2.0) * cos_phi)
        * (-up.y * sin_phi + up.z * cos_phi);
    let t2 = cst::<R>(2.0 / 3.0) * rho * rho * rho * (om.y + om.z * tan_phi) * gamma.sin();
    Ok(t1 + t2)
}

/// The three planar moment integrals of a cap profile over |x′| < ρ:
/// I₁ = ∫(g_{x₁}, g_{x₂}), I₂ = ∫(g·g_{x₂}, −g·g_{x₁}, x₂g_{x₁} − x₁g_{x₂}),
/// I₃ ≡ 0 (closed form). The third component of I₂ vanishes analytically
/// but is returned by quadrature as a consistency probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaylorMoments<R> {
    pub i1: [R; 2],
    pub i2: [R; 3],
    pub i3: [R; 3],
}

pub fn taylor_moment_integrals<R: Real>(
    geom: &GapGeometry<R>,
    rho: R,
    cfg: &QuadratureConfig<R>,
) -> Result<TaylorMoments<R>> {
    require_positive("rho", rho)?;
    geom.check_chart(rho, R::zero())?;
    let cap = &geom.cap;
    let i1_0 = planar_disc_integral(rho, |x1, x2| cap.gradient(x1, x2).0, cfg)?.value;
    let i1_1 = planar_disc_integral(rho, |x1, x2| cap.gradient(x1, x2).1, cfg)?.value;
    let i2_0 = planar_disc_integral(
        rho,
        |x1, x2| cap.height(x1, x2) * cap.gradient(x1, x2).1,
        cfg,
    )?
    .value;
    let i2_1 = planar_disc_integral(
        rho,
        |x1, x2| -cap.height(x1, x2) * cap.gradient(x1, x2).0,
        cfg,
    )?
    .value;
    let i2_2 = planar_disc_integral(
        rho,
        |x1, x2| {
            let (gx1, gx2) = cap.gradient(x1, x2);
            x2 * gx1 - x1 * gx2
        },
        cfg,
    )?
    .value;
    Ok(TaylorMoments {
        i1: [i1_0, i1_1],
        i2: [i2_0, i2_1, i2_2],
        i3: [R::zero(); 3],
    })
}

/// Which flux family a verification run targets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FluxFamily<R> {
    Flat { annulus: bool },
    Cup,
    Phi { tan_phi: R },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxCheck<R> {
    pub closed_form: R,
    pub quadrature: R,
    pub rel_error: R,
}

/// Binds a closed form to the independent surface quadrature of the same
/// rigid flux and reports the relative disagreement:
/// relError = |closed − quad| / max(|closed|, 1e−14·scale).
pub fn verify_flux_identity<R: Real>(
    family: FluxFamily<R>,
    geom: &GapGeometry<R>,
    state: &GapState<R>,
    rho: R,
    gamma: R,
    m: &RigidMotion<R>,
    cfg: &QuadratureConfig<R>,
) -> Result<FluxCheck<R>> {
    let (dom, patch_kind) = match family {
        FluxFamily::Flat { annulus: false } => (
            DomainSpec::half_cylinder(*geom, *state, rho, gamma)?,
            PatchKind::TopFlat,
        ),
        FluxFamily::Flat { annulus: true } => (
            DomainSpec::shell_half(*geom, *state, rho, gamma)?,
            PatchKind::TopFlatAnnulus,
        ),
        FluxFamily::Cup => (
            DomainSpec::cup_top(*geom, *state, rho, gamma)?,
            PatchKind::TopCup,
        ),
        FluxFamily::Phi { tan_phi } => (
            DomainSpec::phi_top(*geom, *state, rho, gamma, tan_phi)?,
            PatchKind::TopPhi,
        ),
    };
    let closed_form = match family {
        FluxFamily::Flat { annulus } => flux_top_flat(rho, gamma, m, annulus)?,
        FluxFamily::Cup => {
            let (k, alpha) = match geom.cap {
                CapProfile::PowerLaw { k, alpha } => (k, alpha),
                CapProfile::PolynomialC3 { .. } => {
                    return Err(Error::InvalidParameter {
                        name: "capKind",
                        value: f64::NAN,
                    })
                }
            };
            flux_top_cup(rho, gamma, k, alpha, m, state.h)?
        }
        FluxFamily::Phi { tan_phi } => flux_top_phi(rho, gamma, tan_phi, m)?,
    };
    let patch = SurfacePatch::new(patch_kind, dom)?;
    let quad = surface_integral(&patch, |x, n| Some(m.eval(x).dot(n)), cfg)?;
    let scale = closed_form.abs().max(quad.value.abs()).max(R::one());
    let floor = cst::<R>(1e-14) * scale;
    let rel_error = (closed_form - quad.value).abs() / closed_form.abs().max(floor);
    Ok(FluxCheck {
        closed_form,
        quadrature: quad.value,
        rel_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Vec3;
    use std::f64::consts::PI;

    fn motion(u: [f64; 3], om: [f64; 3]) -> RigidMotion<f64> {
        RigidMotion::new(
            Vec3::new(u[0], u[1], u[2]),
            Vec3::new(om[0], om[1], om[2]),
            Vec3::zero(),
        )
    }

    #[test]
    fn flat_flux_reproduces_worked_values() {
        let m = motion([0.0, 0.0, 2.0], [0.0; 3]);
        let v = flux_top_flat(1.0, 0.0, &m, true).unwrap();
        assert!((v - 0.75 * PI).abs() < 1e-15);

        let m = motion([0.0; 3], [1.0, 0.0, 0.0]);
        let v = flux_top_flat(1.0, 0.0, &m, true).unwrap();
        assert!((v - 7.0 / 12.0).abs() < 1e-15);

        let v = flux_top_flat(1.0, PI / 2.0, &m, true).unwrap();
        assert!(v.abs() < 1e-15);
    }

    #[test]
    fn cup_flux_reproduces_worked_values() {
        let m = motion([0.0, 1.0, 0.0], [0.0; 3]);
        let v = flux_top_cup(1.0, 0.0, 1.0, 1.0, &m, 0.0).unwrap();
        assert!((v + 4.0 / 3.0).abs() < 1e-15);

        let m = motion([0.0; 3], [1.0, 0.0, 0.0]);
        let v = flux_top_cup(1.0, 0.0, 1.0, 1.0, &m, 0.0).unwrap();
        assert!((v - 22.0 / 15.0).abs() < 1e-15);
    }

    #[test]
    fn cup_flux_degenerates_to_flat_as_k_vanishes() {
        let m = motion([0.3, -0.4, 0.9], [0.7, -0.1, 0.5]);
        for gamma in [0.0, 1.1, 4.0] {
            let cup = flux_top_cup(0.8, gamma, 1e-13, 1.0, &m, 0.0).unwrap();
            let flat = flux_top_flat(0.8, gamma, &m, false).unwrap();
            assert!((cup - flat).abs() < 1e-12);
        }
    }

    #[test]
    fn phi_flux_at_zero_slope_reduces_to_flat_disc_form() {
        let m = motion([0.2, -0.3, 0.8], [0.0, 0.6, -0.4]);
        for gamma in [0.0, 0.9, 2.5] {
            let v = flux_top_phi(1.0, gamma, 0.0, &m).unwrap();
            let expect = 0.5 * PI * m.u_p3(0.0) + 2.0 / 3.0 * 0.6 * gamma.sin();
            assert!((v - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn phi_flux_spin_term_follows_plane_orientation() {
        // ascending plane, outward normal (0, −sinφ, cosφ): the ω₃ moment
        // enters with +tanφ·sinγ
        let m = motion([0.0; 3], [0.0, 0.0, 1.0]);
        let v = flux_top_phi(1.0, PI / 2.0, 0.05, &m).unwrap();
        assert!((v - 1.0 / 30.0).abs() < 1e-15, "{v}");
    }

    #[test]
    fn phi_flux_with_zero_gamma_kills_the_moment_term() {
        let m = motion([0.0; 3], [0.0, 1.0, 0.0]);
        let v = flux_top_phi(1.0, 0.0, 0.3, &m).unwrap();
        assert!(v.abs() < 1e-15);
    }

    #[test]
    fn phi_flux_rejects_unrotated_frames() {
        let m = motion([0.0; 3], [0.5, 1.0, 0.0]);
        assert!(matches!(
            flux_top_phi(1.0, 0.0, 0.1, &m),
            Err(Error::FrameViolation { .. })
        ));
    }

    #[test]
    fn closed_forms_are_linear_in_the_motion() {
        let m1 = motion([0.3, -0.2, 0.7], [0.1, 0.9, -0.5]);
        let m2 = motion([-0.8, 0.4, 0.1], [0.6, -0.3, 0.2]);
        let sum = motion([-0.5, 0.2, 0.8], [0.7, 0.6, -0.3]);
        let (rho, gamma) = (0.7, 1.3);
        for annulus in [false, true] {
            let a = flux_top_flat(rho, gamma, &m1, annulus).unwrap();
            let b = flux_top_flat(rho, gamma, &m2, annulus).unwrap();
            let c = flux_top_flat(rho, gamma, &sum, annulus).unwrap();
            assert!((a + b - c).abs() < 1e-14);
        }
        let a = flux_top_cup(rho, gamma, 1.3, 0.6, &m1, 0.02).unwrap();
        let b = flux_top_cup(rho, gamma, 1.3, 0.6, &m2, 0.02).unwrap();
        let c = flux_top_cup(rho, gamma, 1.3, 0.6, &sum, 0.02).unwrap();
        assert!((a + b - c).abs() < 1e-14);
    }

    #[test]
    fn annulus_equals_difference_of_full_caps() {
        let m = motion([0.4, 0.2, -0.9], [0.3, -0.7, 0.25]);
        for (rho, gamma) in [(1.0, 0.0), (0.6, 2.1), (0.25, 5.0)] {
            let ann = flux_top_flat(rho, gamma, &m, true).unwrap();
            let big = flux_top_flat(rho, gamma, &m, false).unwrap();
            let small = flux_top_flat(rho / 2.0, gamma, &m, false).unwrap();
            assert!((ann - (big - small)).abs() < 1e-14);
        }
    }

    #[test]
    fn quadrature_confirms_each_family() {
        let cfg = QuadratureConfig::default();
        let state = GapState::new(0.01, 1.0).unwrap();
        let m = RigidMotion::new(
            Vec3::new(0.37, -0.81, 0.44),
            Vec3::new(0.29, -0.53, 0.61),
            Vec3::new(0.02, -0.03, 0.05),
        );

        let geom = GapGeometry::power_law(1.0, 1.0, 1.6).unwrap();
        for family in [
            FluxFamily::Flat { annulus: false },
            FluxFamily::Flat { annulus: true },
            FluxFamily::Cup,
        ] {
            let chk =
                verify_flux_identity(family, &geom, &state, 0.5, 0.8, &m, &cfg).unwrap();
            assert!(chk.rel_error < 1e-10, "{family:?}: {}", chk.rel_error);
        }

        // fractional α exercises the kinked radial integrand
        let geom_frac = GapGeometry::power_law(1.4, 0.5, 1.6).unwrap();
        let chk = verify_flux_identity(FluxFamily::Cup, &geom_frac, &state, 0.5, 0.8, &m, &cfg)
            .unwrap();
        assert!(chk.rel_error < 1e-6, "cup alpha=0.5: {}", chk.rel_error);

        let m_rot = RigidMotion::new(
            Vec3::new(0.37, -0.81, 0.44),
            Vec3::new(0.0, -0.53, 0.61),
            Vec3::new(0.02, -0.03, 0.05),
        );
        let chk = verify_flux_identity(
            FluxFamily::Phi { tan_phi: 0.05 },
            &geom,
            &state,
            0.5,
            0.8,
            &m_rot,
            &cfg,
        )
        .unwrap();
        assert!(chk.rel_error < 1e-10, "phi: {}", chk.rel_error);
    }

    #[test]
    fn moment_integrals_match_parity_and_quartic_scaling() {
        let cfg = QuadratureConfig::default();
        // pure quadratic cap: odd integrands, everything vanishes
        let quad_cap: GapGeometry<f64> = GapGeometry::polynomial_c3(
            [0.4, 0.1, 0.7],
            [0.0; 4],
            1.0,
            1.0,
            2.0,
            1.6,
            crate::geometry::WallProfile::Flat,
        )
        .unwrap();
        let mm = taylor_moment_integrals(&quad_cap, 0.3, &cfg).unwrap();
        assert!(mm.i1[0].abs() < 1e-12 && mm.i1[1].abs() < 1e-12);
        assert!(mm.i2[2].abs() < 1e-10);
        assert_eq!(mm.i3, [0.0; 3]);

        // cubic cap x₁³: I₁ first component is (3π/4)ρ⁴
        let cubic_cap = GapGeometry::polynomial_c3(
            [0.0; 3],
            [1.0, 0.0, 0.0, 0.0],
            1.0,
            1.0,
            2.0,
            1.6,
            crate::geometry::WallProfile::Flat,
        )
        .unwrap();
        let mm = taylor_moment_integrals(&cubic_cap, 0.1, &cfg).unwrap();
        let expect = 3.0 * PI / 4.0 * 0.1f64.powi(4);
        // angular rule is spectral, not exact, on trig integrands: ~1e-11 rel
        assert!(
            (mm.i1[0] - expect).abs() < 1e-12,
            "{:.17e} vs {expect:.17e}",
            mm.i1[0]
        );
        assert!((mm.i1[0] - 2.3561944901923454e-4).abs() < 1e-12);

        // |I₁|/ρ⁴ is scale-stable for a polynomial cap
        let r1 = taylor_moment_integrals(&cubic_cap, 0.1, &cfg).unwrap().i1[0] / 0.1f64.powi(4);
        let r2 = taylor_moment_integrals(&cubic_cap, 0.05, &cfg).unwrap().i1[0] / 0.05f64.powi(4);
        let r3 =
            taylor_moment_integrals(&cubic_cap, 0.025, &cfg).unwrap().i1[0] / 0.025f64.powi(4);
        assert!((r1 - r2).abs() < 0.2 * r1.abs());
        assert!((r1 - r3).abs() < 0.2 * r1.abs());
    }

    #[test]
    fn moment_integrals_enforce_the_chart() {
        let cfg = QuadratureConfig::default();
        let geom = GapGeometry::power_law(1.0, 1.0, 1.6).unwrap();
        assert!(matches!(
            taylor_moment_integrals(&geom, 2.0, &cfg),
            Err(Error::ChartExceeded { .. })
        ));
    }
}
