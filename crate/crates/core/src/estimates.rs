//! Right-hand sides of the velocity-component estimates (weak σ-form,
//! strong σ-form, gap-only form), the closed-form exponent tables, the
//! fluid-only gradient-norm comparison over the full cylinder, scaling-law
//! fits, and empirical-constant capture.
//!
//! All analytic prefactors are taken as 1; the toolkit *measures* constants
//! by ratio sweeps instead of asserting inequalities with unknown constants.

use crate::error::{Error, Result};
use crate::fields::{RigidMotion, VelocityField};
use crate::geometry::{DomainSpec, GapGeometry, GapState};
use crate::linalg::Vec3;
use crate::quadrature::{lp_gradient_norm, planar_disc_integral, QuadratureConfig};
use crate::scalar::{cst, Real};

/// Spatial dimension of the estimate (the 2D variants are the strip
/// analogues of the 3D gap estimates).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dim {
    Two,
    Three,
}

/// Which velocity component a weak-estimate bound targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeakComponent {
    /// Normal contact velocity u_{P3}.
    U3,
    /// Tangential contact velocity |u_{Pτ}|.
    UTau,
    /// Tangential angular velocity |ω_τ|.
    OmTau,
    /// Axial angular velocity ω₃ (3D only).
    Om3,
}

/// Which σ_h pivot the h ↦ σ map uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigmaRegime {
    /// σ_h = (σ₀/2)(h/H)^{1/(1+α)} (gradient-based bounds).
    Weak,
    /// σ_h = (σ₀/2)(h/H)^{1/2} (hessian-based bounds).
    Strong,
}

fn check_alpha<R: Real>(alpha: R) -> Result<()> {
    if !(alpha > R::zero() && alpha <= R::one()) {
        return Err(Error::AlphaOutOfRange {
            alpha: alpha.as_f64(),
            lower: 0.0,
            upper: 1.0,
        });
    }
    Ok(())
}

fn check_p<R: Real>(p: R) -> Result<()> {
    if !(p >= R::one()) {
        return Err(Error::InvalidParameter {
            name: "p",
            value: p.as_f64(),
        });
    }
    Ok(())
}

/// The h-scaling exponents of the four weak component bounds evaluated at
/// σ = σ_h(weak). e_om3 is absent in 2D (no axial spin component).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentTable<R> {
    pub dim: Dim,
    pub e_u3: R,
    pub e_utau: R,
    pub e_omtau: R,
    pub e_om3: Option<R>,
}

/// Closed-form exponent table. With d = 3+α (3D) or 2+α (2D):
///   e_u3   = (1+2α)/(p(1+α)) · (p − d/(1+2α))
///   e_utau = (p − d/(1+α))/p
///   e_omtau = 2α/(p(1+α)) · (p − d/(2α))
///   e_om3  = α/(p(1+α)) · (p − d/α)          (3D only)
pub fn weak_exponents<R: Real>(alpha: R, p: R, dim: Dim) -> Result<ExponentTable<R>> {
    check_alpha(alpha)?;
    check_p(p)?;
    let one = R::one();
    let two = cst::<R>(2.0);
    let d = match dim {
        Dim::Three => cst::<R>(3.0) + alpha,
        Dim::Two => two + alpha,
    };
    let denom = p * (one + alpha);
    let e_u3 = (one + two * alpha) / denom * (p - d / (one + two * alpha));
    let e_utau = (p - d / (one + alpha)) / p;
    let e_omtau = two * alpha / denom * (p - d / (two * alpha));
    let e_om3 = match dim {
        Dim::Three => Some(alpha / denom * (p - d / alpha)),
        Dim::Two => None,
    };
    Ok(ExponentTable {
        dim,
        e_u3,
        e_utau,
        e_omtau,
        e_om3,
    })
}

/// σ-power a in the weak RHS for a given component. 3D uses 2/p for the
/// footprint measure, 2D uses 1/p.
fn weak_sigma_power<R: Real>(component: WeakComponent, dim: Dim, alpha: R, p: R) -> Result<R> {
    let one = R::one();
    let two = cst::<R>(2.0);
    let s = match dim {
        Dim::Three => two / p,
        Dim::Two => one / p,
    };
    Ok(match component {
        WeakComponent::U3 => one + s,
        WeakComponent::UTau => one + alpha + s,
        WeakComponent::OmTau => two + s,
        WeakComponent::Om3 => {
            if dim == Dim::Two {
                return Err(Error::InvalidParameter {
                    name: "component (om3 undefined in 2D)",
                    value: f64::NAN,
                });
            }
            two + alpha + s
        }
    })
}

/// Weak component bound at scale σ with unit prefactor:
/// σ^{−a} (h + 3kσ^{1+α})^{2−1/p} · gradNorm,
/// a ∈ {1+2/p, 1+α+2/p, 2+2/p, 2+α+2/p} per component (3D).
#[allow(clippy::too_many_arguments)]
pub fn weak_rhs_sigma<R: Real>(
    component: WeakComponent,
    dim: Dim,
    sigma: R,
    h: R,
    k: R,
    alpha: R,
    p: R,
    grad_norm: R,
) -> Result<R> {
    check_alpha(alpha)?;
    check_p(p)?;
    if !(sigma > R::zero()) {
        return Err(Error::SigmaOutOfRange {
            sigma: sigma.as_f64(),
            limit: f64::INFINITY,
        });
    }
    if !(h >= R::zero()) {
        return Err(Error::InvalidParameter {
            name: "h",
            value: h.as_f64(),
        });
    }
    if !(k > R::zero()) {
        return Err(Error::InvalidParameter {
            name: "k",
            value: k.as_f64(),
        });
    }
    let a = weak_sigma_power(component, dim, alpha, p)?;
    let gap = h + cst::<R>(3.0) * k * sigma.powf(R::one() + alpha);
    Ok(sigma.powf(-a) * gap.powf(cst::<R>(2.0) - R::one() / p) * grad_norm)
}

/// The pivot scale σ_h: (σ₀/2)(h/H)^{1/(1+α)} (weak) or (σ₀/2)(h/H)^{1/2}
/// (strong). The two coincide at α = 1.
pub fn sigma_h<R: Real>(h: R, alpha: R, sigma0: R, big_h: R, regime: SigmaRegime) -> Result<R> {
    check_alpha(alpha)?;
    if !(sigma0 > R::zero()) {
        return Err(Error::InvalidParameter {
            name: "sigma0",
            value: sigma0.as_f64(),
        });
    }
    if !(h > R::zero()) {
        return Err(Error::InvalidParameter {
            name: "h",
            value: h.as_f64(),
        });
    }
    if !(h <= big_h) {
        return Err(Error::GapExceedsDiameter {
            h: h.as_f64(),
            big_h: big_h.as_f64(),
        });
    }
    let expo = match regime {
        SigmaRegime::Weak => R::one() / (R::one() + alpha),
        SigmaRegime::Strong => R::one() / cst::<R>(2.0),
    };
    Ok(sigma0 / cst::<R>(2.0) * (h / big_h).powf(expo))
}

/// The comparison-lemma constants: B, the largest admissible scale σ*, and
/// the largest gap H* for which the window [σ_h, σ*] is nonempty.
///
///   B  = 2^{p/2} · 3kπ · C_w^p · [H(2/σ₀)^{1+α} + 3k]^{2p−1}
///   σ* = min{ σ₀/2, (2B)^{−1/(αp)} }
///   H* = min{ H, H(2/σ₀)^{1+α}(2B)^{−(1+α)/(αp)} }
///
/// H* is exactly the gap at which σ_h(weak) = σ*.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantsLedger<R> {
    pub p: R,
    pub c_w: R,
    pub big_b: R,
    pub sigma_star: R,
    pub h_star: R,
}

/// Conservative fallback when no measured constant is supplied.
pub const DEFAULT_C_W: f64 = 10.0;

impl<R: Real> ConstantsLedger<R> {
    pub fn new(
        geom: &GapGeometry<R>,
        state: &GapState<R>,
        p: R,
        c_w: Option<R>,
    ) -> Result<Self> {
        check_p(p)?;
        let c_w = c_w.unwrap_or_else(|| cst::<R>(DEFAULT_C_W));
        if !(c_w > R::zero()) {
            return Err(Error::InvalidParameter {
                name: "cW",
                value: c_w.as_f64(),
            });
        }
        let one = R::one();
        let two = cst::<R>(2.0);
        let three = cst::<R>(3.0);
        let (k, alpha, sigma0) = (geom.k, geom.alpha, geom.sigma0);
        let big_h = state.big_h;
        let opening = big_h * (two / sigma0).powf(one + alpha);
        let bracket = opening + three * k;
        let big_b = two.powf(p / two)
            * three
            * k
            * R::PI()
            * c_w.powf(p)
            * bracket.powf(two * p - one);
        let two_b = two * big_b;
        let sigma_star = (sigma0 / two).min(two_b.powf(-one / (alpha * p)));
        let h_star = big_h.min(
            big_h * (two / sigma0).powf(one + alpha) * two_b.powf(-(one + alpha) / (alpha * p)),
        );
        Ok(Self {
            p,
            c_w,
            big_b,
            sigma_star,
            h_star,
        })
    }
}

/// Pass tolerance on the factor-2 comparison: lhs ≤ 2·fluid·(1 + tol).
pub const LEMMA_FACTOR_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaCheck<R> {
    pub sigma: R,
    /// ∫_{C_σ} |∇u|^p with u extended rigidly into the body and by zero
    /// into the wall.
    pub lhs: R,
    /// ∫_{C_σ ∩ fluid} |∇u|^p.
    pub fluid: R,
    pub rhs_times_2: R,
    /// lhs / fluid (1 when both vanish).
    pub factor: R,
    pub window: (R, R),
    pub pass: bool,
}

/// Checks ∫_{C_σ}|∇u|^p ≤ 2∫_{C_σ∩F}|∇u|^p at one scale σ inside the
/// window [σ_h(weak), σ*]. The solid-side contribution is exact: the rigid
/// extension has constant |∇u|² = 2|ω|², and the wall extension vanishes.
pub fn lemma_cyl_check<R: Real>(
    field: &VelocityField<R>,
    geom: &GapGeometry<R>,
    state: &GapState<R>,
    sigma: R,
    p: R,
    ledger: &ConstantsLedger<R>,
    cfg: &QuadratureConfig<R>,
) -> Result<LemmaCheck<R>> {
    check_p(p)?;
    let lower = sigma_h(state.h, geom.alpha, geom.sigma0, state.big_h, SigmaRegime::Weak)?;
    let upper = ledger.sigma_star;
    let slack = R::one() + cst::<R>(1e-12);
    if !(sigma * slack >= lower && sigma <= upper * slack) {
        return Err(Error::WindowViolation {
            sigma: sigma.as_f64(),
            lower: lower.as_f64(),
            upper: upper.as_f64(),
        });
    }
    let dom = DomainSpec::full_cylinder(*geom, *state, sigma)?;
    let fluid_norm = lp_gradient_norm(field, &dom, true, p, cfg)?;
    let fluid = fluid_norm.value.powf(p);

    let m = field.body_motion();
    let om_sq = m.omega.norm_sq();
    let body = if om_sq > R::zero() {
        let top = dom.flat_top_z();
        let h = state.h;
        let cap = geom.cap;
        let vol = planar_disc_integral(
            sigma,
            |x1, x2| (top - h - cap.height(x1, x2)).max(R::zero()),
            cfg,
        )?
        .value;
        (cst::<R>(2.0) * om_sq).powf(p / cst::<R>(2.0)) * vol
    } else {
        R::zero()
    };

    let lhs = fluid + body;
    let rhs_times_2 = cst::<R>(2.0) * fluid;
    let factor = if fluid > R::zero() {
        lhs / fluid
    } else if lhs == R::zero() {
        R::one()
    } else {
        R::infinity()
    };
    let pass = lhs <= rhs_times_2 * (R::one() + cst::<R>(LEMMA_FACTOR_TOL));
    Ok(LemmaCheck {
        sigma,
        lhs,
        fluid,
        rhs_times_2,
        factor,
        window: (lower, upper),
        pass,
    })
}

/// Strong (hessian-based) bound at scale σ with unit constants:
/// 3π^{−1/2} σ^{−2}(h+2Kσ²)^{5/2}·hessNorm + σ²|u_{Pτ}| + σ(h+2Kσ²)|ω_τ|.
/// With a radially symmetric cap and wall the two motion terms are absent.
pub fn strong_rhs_sigma<R: Real>(
    sigma: R,
    h: R,
    big_k: R,
    hess_norm: R,
    u_p_tau: R,
    om_tau: R,
    radial_symmetric: bool,
) -> Result<R> {
    if !(sigma > R::zero()) {
        return Err(Error::SigmaOutOfRange {
            sigma: sigma.as_f64(),
            limit: f64::INFINITY,
        });
    }
    if !(h >= R::zero()) {
        return Err(Error::InvalidParameter {
            name: "h",
            value: h.as_f64(),
        });
    }
    let two = cst::<R>(2.0);
    let gap = h + two * big_k * sigma * sigma;
    let lead = cst::<R>(3.0) / R::PI().sqrt() * sigma.powf(-two) * gap.powf(cst::<R>(2.5))
        * hess_norm;
    if radial_symmetric {
        return Ok(lead);
    }
    Ok(lead + sigma * sigma * u_p_tau.abs() + sigma * gap * om_tau.abs())
}

/// Gap-only form of the strong bound:
/// 3D: h^{3/2}·hessNorm + h·gradNorm; 2D: h^{7/4}·hessNorm + h^{5/4}·gradNorm.
pub fn strong_rhs_h<R: Real>(h: R, hess_norm: R, grad_norm: R, dim: Dim) -> Result<R> {
    if !(h > R::zero()) {
        return Err(Error::InvalidParameter {
            name: "h",
            value: h.as_f64(),
        });
    }
    let (eh, eg) = match dim {
        Dim::Three => (cst::<R>(1.5), R::one()),
        Dim::Two => (cst::<R>(1.75), cst::<R>(1.25)),
    };
    Ok(h.powf(eh) * hess_norm + h.powf(eg) * grad_norm)
}

/// Least-squares power-law fit log v = slope·log h + intercept.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit<R> {
    pub points: Vec<(R, R)>,
    pub slope: R,
    pub intercept: R,
    pub r_squared: R,
    pub expected_slope: R,
    pub slope_tol: R,
    pub pass: bool,
}

/// Fits (h, value) pairs in log-log coordinates. Requires ≥ 4 strictly
/// positive points spanning ≥ 2 decades in h.
pub fn fit_scaling<R: Real>(
    points: &[(R, R)],
    expected_slope: R,
    slope_tol: R,
) -> Result<ScalingFit<R>> {
    if points.len() < 4 {
        return Err(Error::InsufficientPoints {
            points: points.len(),
            decades: 0.0,
        });
    }
    for (i, &(h, v)) in points.iter().enumerate() {
        if !(h > R::zero()) || !(v > R::zero()) {
            return Err(Error::NonPositiveValue { index: i });
        }
    }
    let mut h_min = points[0].0;
    let mut h_max = points[0].0;
    for &(h, _) in points.iter() {
        h_min = h_min.min(h);
        h_max = h_max.max(h);
    }
    let decades = (h_max / h_min).log10();
    if !(decades >= cst::<R>(2.0 - 1e-9)) {
        return Err(Error::InsufficientPoints {
            points: points.len(),
            decades: decades.as_f64(),
        });
    }
    let n = crate::scalar::cst_usize::<R>(points.len());
    let (mut sx, mut sy) = (R::zero(), R::zero());
    for &(h, v) in points.iter() {
        sx = sx + h.ln();
        sy = sy + v.ln();
    }
    let (xbar, ybar) = (sx / n, sy / n);
    let (mut sxx, mut sxy, mut syy) = (R::zero(), R::zero(), R::zero());
    for &(h, v) in points.iter() {
        let dx = h.ln() - xbar;
        let dy = v.ln() - ybar;
        sxx = sxx + dx * dx;
        sxy = sxy + dx * dy;
        syy = syy + dy * dy;
    }
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let r_squared = if syy > R::zero() {
        (sxy * sxy) / (sxx * syy)
    } else {
        R::one()
    };
    let pass = (slope - expected_slope).abs() <= slope_tol;
    Ok(ScalingFit {
        points: points.to_vec(),
        slope,
        intercept,
        r_squared,
        expected_slope,
        slope_tol,
        pass,
    })
}

/// Two-sided ratio capture over paired positive samples:
/// (sup lhs/rhs, inf lhs/rhs).
pub fn empirical_constant<R: Real>(lhs: &[R], rhs: &[R]) -> Result<(R, R)> {
    if lhs.len() != rhs.len() {
        return Err(Error::LengthMismatch {
            lhs: lhs.len(),
            rhs: rhs.len(),
        });
    }
    if lhs.is_empty() {
        return Err(Error::InsufficientPoints {
            points: 0,
            decades: 0.0,
        });
    }
    let mut sup = R::neg_infinity();
    let mut inf = R::infinity();
    for i in 0..lhs.len() {
        if !(lhs[i] > R::zero()) {
            return Err(Error::NonPositiveValue { index: i });
        }
        if !(rhs[i] > R::zero()) {
            return Err(Error::NonPositiveValue { index: i });
        }
        let ratio = lhs[i] / rhs[i];
        sup = sup.max(ratio);
        inf = inf.min(ratio);
    }
    Ok((sup, inf))
}

/// The motion expressed in the frame rotated by β about the x₃ axis
/// (components transform passively; the axis point is preserved).
pub fn rotate_about_z<R: Real>(m: &RigidMotion<R>, beta: R) -> RigidMotion<R> {
    let (s, c) = (beta.sin(), beta.cos());
    let rot = |v: Vec3<R>| Vec3::new(v.x * c + v.y * s, -v.x * s + v.y * c, v.z);
    RigidMotion::new(rot(m.u_star), rot(m.omega), rot(m.x_star))
}

/// Rotation angle that sends ω to (0, |ω_τ|, ω₃).
pub fn omega_alignment_angle<R: Real>(m: &RigidMotion<R>) -> R {
    (-m.omega.x).atan2(m.omega.y)
}

/// Rotates the motion so ω₁ = 0 exactly (the analytic rotation zeroes it;
/// the roundoff dust is dropped) and returns the angle used.
pub fn align_omega_frame<R: Real>(m: &RigidMotion<R>) -> (RigidMotion<R>, R) {
    let beta = omega_alignment_angle(m);
    let mut r = rotate_about_z(m, beta);
    r.omega.x = R::zero();
    (r, beta)
}
