//! The model near-contact chart: a rigid body cap above a wall, touching
//! distance h along the x₃ axis. Houses the cap/wall profiles, the cylinder
//! family of integration domains, and parametrized boundary patches.
//!
//! Chart conventions, used everywhere downstream:
//!   - wall surface x₃ = g_Ω(x′) with g_Ω(0) = 0, ∇g_Ω(0) = 0;
//!   - body surface x₃ = h + g(x′) with g(0) = 0, ∇g(0) = 0;
//!   - fluid points satisfy g_Ω(x′) < x₃ < h + g(x′) for |x′| < σ₀.

use crate::error::{Error, Result};
use crate::linalg::Vec3;
use crate::scalar::{cst, Real};

/// Body cap profile g(x′).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CapProfile<R> {
    /// g = k·|x′|^{1+α}. Radially symmetric, kinked at the axis for α < 1.
    PowerLaw { k: R, alpha: R },
    /// g = a·x₁² + b·x₁x₂ + c·x₂² + cubic remainder; `cubic` holds the
    /// coefficients of (x₁³, x₁²x₂, x₁x₂², x₂³).
    PolynomialC3 { quad: [R; 3], cubic: [R; 4] },
}

impl<R: Real> CapProfile<R> {
    pub fn height(&self, x1: R, x2: R) -> R {
        match *self {
            CapProfile::PowerLaw { k, alpha } => {
                let r = (x1 * x1 + x2 * x2).sqrt();
                k * r.powf(R::one() + alpha)
            }
            CapProfile::PolynomialC3 { quad, cubic } => {
                let [a, b, c] = quad;
                let [d0, d1, d2, d3] = cubic;
                a * x1 * x1
                    + b * x1 * x2
                    + c * x2 * x2
                    + d0 * x1 * x1 * x1
                    + d1 * x1 * x1 * x2
                    + d2 * x1 * x2 * x2
                    + d3 * x2 * x2 * x2
            }
        }
    }

    pub fn gradient(&self, x1: R, x2: R) -> (R, R) {
        match *self {
            CapProfile::PowerLaw { k, alpha } => {
                let r = (x1 * x1 + x2 * x2).sqrt();
                if r == R::zero() {
                    // α > 0 makes the gradient vanish at the axis.
                    return (R::zero(), R::zero());
                }
                // ∇g = k(1+α) r^{α−1} x′
                let f = k * (R::one() + alpha) * r.powf(alpha - R::one());
                (f * x1, f * x2)
            }
            CapProfile::PolynomialC3 { quad, cubic } => {
                let [a, b, c] = quad;
                let [d0, d1, d2, d3] = cubic;
                let two = cst::<R>(2.0);
                let three = cst::<R>(3.0);
                let gx = two * a * x1
                    + b * x2
                    + three * d0 * x1 * x1
                    + two * d1 * x1 * x2
                    + d2 * x2 * x2;
                let gy = b * x1
                    + two * c * x2
                    + d1 * x1 * x1
                    + two * d2 * x1 * x2
                    + three * d3 * x2 * x2;
                (gx, gy)
            }
        }
    }

    /// Frobenius norm of the planar Hessian; only defined for the
    /// polynomial family (the power law is not C² at the axis).
    pub fn hessian_norm(&self, x1: R, x2: R) -> Option<R> {
        match *self {
            CapProfile::PowerLaw { .. } => None,
            CapProfile::PolynomialC3 { quad, cubic } => {
                let [a, b, c] = quad;
                let [d0, d1, d2, d3] = cubic;
                let two = cst::<R>(2.0);
                let six = cst::<R>(6.0);
                let gxx = two * a + six * d0 * x1 + two * d1 * x2;
                let gxy = b + two * d1 * x1 + two * d2 * x2;
                let gyy = two * c + two * d2 * x1 + six * d3 * x2;
                Some((gxx * gxx + two * gxy * gxy + gyy * gyy).sqrt())
            }
        }
    }

    /// Norm of the constant third-derivative tensor (polynomial family).
    pub fn third_derivative_norm(&self) -> Option<R> {
        match *self {
            CapProfile::PowerLaw { .. } => None,
            CapProfile::PolynomialC3 { cubic, .. } => {
                let [d0, d1, d2, d3] = cubic;
                let three = cst::<R>(3.0);
                let six = cst::<R>(6.0);
                let two = cst::<R>(2.0);
                let (gxxx, gxxy, gxyy, gyyy) = (six * d0, two * d1, two * d2, six * d3);
                Some(
                    (gxxx * gxxx + three * gxxy * gxxy + three * gxyy * gxyy + gyyy * gyyy)
                        .sqrt(),
                )
            }
        }
    }
}

/// Wall profile g_Ω(x′). Flat is the default throughout; polynomial walls
/// exercise the Taylor-moment machinery.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WallProfile<R> {
    Flat,
    PolynomialC3 { quad: [R; 3], cubic: [R; 4] },
}

impl<R: Real> WallProfile<R> {
    pub fn height(&self, x1: R, x2: R) -> R {
        match *self {
            WallProfile::Flat => R::zero(),
            WallProfile::PolynomialC3 { quad, cubic } => {
                CapProfile::PolynomialC3 { quad, cubic }.height(x1, x2)
            }
        }
    }

    pub fn gradient(&self, x1: R, x2: R) -> (R, R) {
        match *self {
            WallProfile::Flat => (R::zero(), R::zero()),
            WallProfile::PolynomialC3 { quad, cubic } => {
                CapProfile::PolynomialC3 { quad, cubic }.gradient(x1, x2)
            }
        }
    }
}

/// The contact chart: profiles plus the envelope constants that bound them.
///
/// One shared k bounds both body and wall caps; whether distinct constants
/// per surface would sharpen any estimate is an open asymmetry we do not
/// resolve here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapGeometry<R> {
    /// Hölder exponent α ∈ (0, 1] of the cap envelope.
    pub alpha: R,
    /// Cap-opening constant k > 0: |g|, |g_Ω| ≤ k|x′|^{1+α}.
    pub k: R,
    /// C³ bound K ≥ max(1, k) for the polynomial family.
    pub big_k: R,
    /// Chart radius σ₀ > 0.
    pub sigma0: R,
    pub cap: CapProfile<R>,
    pub wall: WallProfile<R>,
}

impl<R: Real> GapGeometry<R> {
    pub fn new(
        alpha: R,
        k: R,
        big_k: R,
        sigma0: R,
        cap: CapProfile<R>,
        wall: WallProfile<R>,
    ) -> Result<Self> {
        if !(alpha > R::zero() && alpha <= R::one()) {
            return Err(Error::AlphaOutOfRange {
                alpha: alpha.as_f64(),
                lower: 0.0,
                upper: 1.0,
            });
        }
        if !(k > R::zero()) {
            return Err(Error::InvalidParameter {
                name: "k",
                value: k.as_f64(),
            });
        }
        if !(big_k >= R::one().max(k)) {
            return Err(Error::InvalidParameter {
                name: "bigK",
                value: big_k.as_f64(),
            });
        }
        if !(sigma0 > R::zero()) {
            return Err(Error::InvalidParameter {
                name: "sigma0",
                value: sigma0.as_f64(),
            });
        }
        Ok(Self {
            alpha,
            k,
            big_k,
            sigma0,
            cap,
            wall,
        })
    }

    /// Power-law cap over a flat wall; K defaults to max(1, k).
    pub fn power_law(k: R, alpha: R, sigma0: R) -> Result<Self> {
        Self::new(
            alpha,
            k,
            R::one().max(k),
            sigma0,
            CapProfile::PowerLaw { k, alpha },
            WallProfile::Flat,
        )
    }

    /// Polynomial cap with explicit envelope constants.
    pub fn polynomial_c3(
        quad: [R; 3],
        cubic: [R; 4],
        alpha: R,
        k: R,
        big_k: R,
        sigma0: R,
        wall: WallProfile<R>,
    ) -> Result<Self> {
        Self::new(
            alpha,
            k,
            big_k,
            sigma0,
            CapProfile::PolynomialC3 { quad, cubic },
            wall,
        )
    }

    pub fn check_chart(&self, x1: R, x2: R) -> Result<()> {
        let r = (x1 * x1 + x2 * x2).sqrt();
        if r >= self.sigma0 {
            return Err(Error::ChartExceeded {
                radius: r.as_f64(),
                sigma0: self.sigma0.as_f64(),
            });
        }
        Ok(())
    }

    /// Vertical gap h + g(x′) − g_Ω(x′) at a planar point.
    pub fn gap_height(&self, state: &GapState<R>, x1: R, x2: R) -> Result<R> {
        self.check_chart(x1, x2)?;
        Ok(state.h + self.cap.height(x1, x2) - self.wall.height(x1, x2))
    }

    /// True iff x lies strictly between wall and body.
    pub fn contains_fluid(&self, state: &GapState<R>, x: Vec3<R>) -> Result<bool> {
        self.check_chart(x.x, x.y)?;
        let wall = self.wall.height(x.x, x.y);
        let body = state.h + self.cap.height(x.x, x.y);
        Ok(x.z > wall && x.z < body)
    }

    /// Samples the envelope invariants |g| ≤ k|x′|^{1+α}, |g_Ω| ≤ k|x′|^{1+α}
    /// on a deterministic polar grid; returns the worst ratio (≤ 1 passes).
    pub fn envelope_ratio(&self, samples: usize) -> R {
        let mut worst = R::zero();
        for i in 1..=samples {
            let r = self.sigma0 * cst::<R>(0.999) * cst_frac::<R>(i, samples);
            for j in 0..samples {
                let th = cst::<R>(2.0) * R::PI() * cst_frac::<R>(j, samples);
                let (x1, x2) = (r * th.cos(), r * th.sin());
                let bound = self.k * r.powf(R::one() + self.alpha);
                let g = self.cap.height(x1, x2).abs();
                let gw = self.wall.height(x1, x2).abs();
                let ratio = g.max(gw) / bound;
                worst = worst.max(ratio);
            }
        }
        worst
    }

    /// Samples |∇ⁱg| ≤ K|x′|^{2−i} (i = 0, 1, 2) and |∇³g| ≤ K for the
    /// polynomial family; returns the worst ratio. `None` for power-law caps.
    pub fn c3_bound_ratio(&self, samples: usize) -> Option<R> {
        match self.cap {
            CapProfile::PowerLaw { .. } => None,
            CapProfile::PolynomialC3 { .. } => {
                let mut worst = self.cap.third_derivative_norm()? / self.big_k;
                for i in 1..=samples {
                    let r = self.sigma0 * cst::<R>(0.999) * cst_frac::<R>(i, samples);
                    for j in 0..samples {
                        let th = cst::<R>(2.0) * R::PI() * cst_frac::<R>(j, samples);
                        let (x1, x2) = (r * th.cos(), r * th.sin());
                        let g = self.cap.height(x1, x2).abs();
                        let (gx, gy) = self.cap.gradient(x1, x2);
                        let g1 = (gx * gx + gy * gy).sqrt();
                        let g2 = self.cap.hessian_norm(x1, x2)?;
                        let r2 = r * r;
                        worst = worst
                            .max(g / (self.big_k * r2))
                            .max(g1 / (self.big_k * r))
                            .max(g2 / self.big_k);
                    }
                }
                Some(worst)
            }
        }
    }
}

fn cst_frac<R: Real>(num: usize, den: usize) -> R {
    crate::scalar::cst_usize::<R>(num) / crate::scalar::cst_usize::<R>(den)
}

/// Gap distance and body diameter bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapState<R> {
    pub h: R,
    pub big_h: R,
}

impl<R: Real> GapState<R> {
    /// h = 0 (touching) is permitted so profile probes at contact work;
    /// h ≥ H is rejected.
    pub fn new(h: R, big_h: R) -> Result<Self> {
        if !(h >= R::zero()) {
            return Err(Error::InvalidParameter {
                name: "h",
                value: h.as_f64(),
            });
        }
        if !(h < big_h) {
            return Err(Error::GapExceedsDiameter {
                h: h.as_f64(),
                big_h: big_h.as_f64(),
            });
        }
        Ok(Self { h, big_h })
    }
}

/// Domain shapes over the chart. All share the lower plane z = −kσ^{1+α};
/// the upper boundary varies by kind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainKind<R> {
    /// C_ρ: full disc footprint, flat top z = h + 2kσ^{1+α}.
    FullCylinder { rho: R },
    /// C_{ρ,γ}: half-disc footprint θ ∈ [γ, γ+π), flat top.
    HalfCylinder { rho: R, gamma: R },
    /// C_{ρ,γ} ∖ C_{ρ/2,γ}: annular half footprint, flat top.
    ShellHalf { rho: R, gamma: R },
    /// Half-disc footprint capped by the body surface z = h + g(x′).
    CupTop { rho: R, gamma: R },
    /// Half-disc footprint cut by the ascending plane
    /// z = (r sinθ − σ)·tanφ + h + 2kσ^{1+α}.
    PhiTop { rho: R, gamma: R, tan_phi: R },
}

/// Planar footprint in polar coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Footprint<R> {
    pub r_lo: R,
    pub r_hi: R,
    pub theta0: R,
    pub theta_width: R,
}

/// A concrete integration domain: shape, reference radius σ (which sets the
/// vertical extents), and the chart it lives in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainSpec<R> {
    pub kind: DomainKind<R>,
    pub sigma: R,
    pub geom: GapGeometry<R>,
    pub state: GapState<R>,
}

impl<R: Real> DomainSpec<R> {
    pub fn new(
        kind: DomainKind<R>,
        sigma: R,
        geom: GapGeometry<R>,
        state: GapState<R>,
    ) -> Result<Self> {
        let rho = match kind {
            DomainKind::FullCylinder { rho }
            | DomainKind::HalfCylinder { rho, .. }
            | DomainKind::ShellHalf { rho, .. }
            | DomainKind::CupTop { rho, .. }
            | DomainKind::PhiTop { rho, .. } => rho,
        };
        if !(rho > R::zero()) {
            return Err(Error::InvalidParameter {
                name: "rho",
                value: rho.as_f64(),
            });
        }
        if !(rho <= sigma) {
            return Err(Error::InvalidParameter {
                name: "rho (must be <= sigma)",
                value: rho.as_f64(),
            });
        }
        let half_chart = geom.sigma0 / cst::<R>(2.0);
        if !(sigma > R::zero() && sigma <= half_chart) {
            return Err(Error::SigmaOutOfRange {
                sigma: sigma.as_f64(),
                limit: half_chart.as_f64(),
            });
        }
        let dom = Self {
            kind,
            sigma,
            geom,
            state,
        };
        if let DomainKind::PhiTop { rho, tan_phi, .. } = kind {
            if !(tan_phi >= R::zero()) {
                return Err(Error::InvalidParameter {
                    name: "tanPhi",
                    value: tan_phi.as_f64(),
                });
            }
            // The cutting plane must stay above the lower face everywhere.
            let z_min = dom.flat_top_z() - (rho + sigma) * tan_phi;
            if !(z_min > dom.z_lower()) {
                return Err(Error::InvalidParameter {
                    name: "tanPhi (plane dips below the lower face)",
                    value: tan_phi.as_f64(),
                });
            }
        }
        Ok(dom)
    }

    pub fn full_cylinder(geom: GapGeometry<R>, state: GapState<R>, rho: R) -> Result<Self> {
        Self::new(DomainKind::FullCylinder { rho }, rho, geom, state)
    }

    pub fn half_cylinder(
        geom: GapGeometry<R>,
        state: GapState<R>,
        rho: R,
        gamma: R,
    ) -> Result<Self> {
        let gamma = normalize_angle(gamma);
        Self::new(DomainKind::HalfCylinder { rho, gamma }, rho, geom, state)
    }

    pub fn shell_half(
        geom: GapGeometry<R>,
        state: GapState<R>,
        rho: R,
        gamma: R,
    ) -> Result<Self> {
        let gamma = normalize_angle(gamma);
        Self::new(DomainKind::ShellHalf { rho, gamma }, rho, geom, state)
    }

    pub fn cup_top(geom: GapGeometry<R>, state: GapState<R>, rho: R, gamma: R) -> Result<Self> {
        let gamma = normalize_angle(gamma);
        Self::new(DomainKind::CupTop { rho, gamma }, rho, geom, state)
    }

    /// φ-plane domain with the canonical slope tanφ = kσ^α/2 that wedges the
    /// plane between cup and flat tops.
    pub fn phi_top_canonical(
        geom: GapGeometry<R>,
        state: GapState<R>,
        rho: R,
        gamma: R,
    ) -> Result<Self> {
        let tan_phi = geom.k * rho.powf(geom.alpha) / cst::<R>(2.0);
        Self::phi_top(geom, state, rho, gamma, tan_phi)
    }

    pub fn phi_top(
        geom: GapGeometry<R>,
        state: GapState<R>,
        rho: R,
        gamma: R,
        tan_phi: R,
    ) -> Result<Self> {
        let gamma = normalize_angle(gamma);
        Self::new(
            DomainKind::PhiTop {
                rho,
                gamma,
                tan_phi,
            },
            rho,
            geom,
            state,
        )
    }

    pub fn rho(&self) -> R {
        match self.kind {
            DomainKind::FullCylinder { rho }
            | DomainKind::HalfCylinder { rho, .. }
            | DomainKind::ShellHalf { rho, .. }
            | DomainKind::CupTop { rho, .. }
            | DomainKind::PhiTop { rho, .. } => rho,
        }
    }

    pub fn gamma(&self) -> Option<R> {
        match self.kind {
            DomainKind::FullCylinder { .. } => None,
            DomainKind::HalfCylinder { gamma, .. }
            | DomainKind::ShellHalf { gamma, .. }
            | DomainKind::CupTop { gamma, .. }
            | DomainKind::PhiTop { gamma, .. } => Some(gamma),
        }
    }

    /// kσ^{1+α}: the vertical envelope margin used by all extents.
    fn sigma_margin(&self) -> R {
        self.geom.k * self.sigma.powf(R::one() + self.geom.alpha)
    }

    pub fn z_lower(&self) -> R {
        -self.sigma_margin()
    }

    /// Height of the flat top z = h + 2kσ^{1+α}.
    pub fn flat_top_z(&self) -> R {
        self.state.h + cst::<R>(2.0) * self.sigma_margin()
    }

    /// Upper boundary height over the planar point (r, θ).
    pub fn z_upper_at(&self, r: R, theta: R) -> R {
        match self.kind {
            DomainKind::FullCylinder { .. }
            | DomainKind::HalfCylinder { .. }
            | DomainKind::ShellHalf { .. } => self.flat_top_z(),
            DomainKind::CupTop { .. } => {
                let (x1, x2) = (r * theta.cos(), r * theta.sin());
                self.state.h + self.geom.cap.height(x1, x2)
            }
            DomainKind::PhiTop { tan_phi, .. } => {
                (r * theta.sin() - self.sigma) * tan_phi + self.flat_top_z()
            }
        }
    }

    pub fn footprint(&self) -> Footprint<R> {
        let two_pi = cst::<R>(2.0) * R::PI();
        match self.kind {
            DomainKind::FullCylinder { rho } => Footprint {
                r_lo: R::zero(),
                r_hi: rho,
                theta0: R::zero(),
                theta_width: two_pi,
            },
            DomainKind::HalfCylinder { rho, gamma }
            | DomainKind::CupTop { rho, gamma }
            | DomainKind::PhiTop { rho, gamma, .. } => Footprint {
                r_lo: R::zero(),
                r_hi: rho,
                theta0: gamma,
                theta_width: R::PI(),
            },
            DomainKind::ShellHalf { rho, gamma } => Footprint {
                r_lo: rho / cst::<R>(2.0),
                r_hi: rho,
                theta0: gamma,
                theta_width: R::PI(),
            },
        }
    }

    /// Pointwise membership (closed footprint, closed vertical window).
    pub fn contains(&self, x: Vec3<R>) -> bool {
        let fp = self.footprint();
        let r = x.radius();
        if r < fp.r_lo || r > fp.r_hi {
            return false;
        }
        if fp.theta_width < cst::<R>(2.0) * R::PI() && r > R::zero() {
            let theta = x.y.atan2(x.x);
            let rel = normalize_angle(theta - fp.theta0);
            if rel > fp.theta_width {
                return false;
            }
        }
        let theta = if r > R::zero() {
            x.y.atan2(x.x)
        } else {
            fp.theta0
        };
        x.z >= self.z_lower() && x.z <= self.z_upper_at(r, theta)
    }

    /// The boundary decomposed into parametrized patches; together they
    /// close the domain up to measure zero.
    pub fn boundary_patches(&self) -> Vec<SurfacePatch<R>> {
        let rho = self.rho();
        let mk = |kind| SurfacePatch {
            kind,
            parent: *self,
        };
        match self.kind {
            DomainKind::FullCylinder { .. } => vec![
                mk(PatchKind::TopFlat),
                mk(PatchKind::LateralCurved {
                    radius: rho,
                    outward: true,
                }),
                mk(PatchKind::Bottom),
            ],
            DomainKind::HalfCylinder { gamma, .. }
            | DomainKind::CupTop { gamma, .. }
            | DomainKind::PhiTop { gamma, .. } => {
                let top = match self.kind {
                    DomainKind::HalfCylinder { .. } => PatchKind::TopFlat,
                    DomainKind::CupTop { .. } => PatchKind::TopCup,
                    DomainKind::PhiTop { .. } => PatchKind::TopPhi,
                    _ => unreachable!(),
                };
                vec![
                    mk(top),
                    mk(PatchKind::LateralCurved {
                        radius: rho,
                        outward: true,
                    }),
                    mk(PatchKind::LateralFlat {
                        angle: gamma,
                        flip: false,
                    }),
                    mk(PatchKind::LateralFlat {
                        angle: gamma + R::PI(),
                        flip: true,
                    }),
                    mk(PatchKind::Bottom),
                ]
            }
            DomainKind::ShellHalf { gamma, .. } => vec![
                mk(PatchKind::TopFlatAnnulus),
                mk(PatchKind::LateralCurved {
                    radius: rho,
                    outward: true,
                }),
                mk(PatchKind::LateralCurved {
                    radius: rho / cst::<R>(2.0),
                    outward: false,
                }),
                mk(PatchKind::LateralFlat {
                    angle: gamma,
                    flip: false,
                }),
                mk(PatchKind::LateralFlat {
                    angle: gamma + R::PI(),
                    flip: true,
                }),
                mk(PatchKind::Bottom),
            ],
        }
    }
}

/// Wraps an angle into [0, 2π).
pub fn normalize_angle<R: Real>(gamma: R) -> R {
    let two_pi = cst::<R>(2.0) * R::PI();
    let mut g = gamma % two_pi;
    if g < R::zero() {
        g = g + two_pi;
    }
    if g >= two_pi {
        g = g - two_pi;
    }
    g
}

/// Boundary pieces. Orientation: normals point out of the parent domain
/// (for `BodySurface`/`WallSurface`, out of the fluid).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PatchKind<R> {
    /// Flat cap over the parent's footprint at z = h + 2kσ^{1+α}.
    TopFlat,
    /// Flat annular cap r ∈ [ρ/2, ρ] (shell parent).
    TopFlatAnnulus,
    /// Body-shaped cap z = h + g(x′) over the half-disc.
    TopCup,
    /// Planar ascending cap of the φ-domain.
    TopPhi,
    /// Cylindrical side at the given radius; `outward: false` flips the
    /// normal toward the axis (inner shell wall).
    LateralCurved { radius: R, outward: bool },
    /// Vertical half-plane face along the ray θ = angle; `flip` marks the
    /// face at γ+π (parametrization bookkeeping; the outward normal of both
    /// faces is the same vector).
    LateralFlat { angle: R, flip: bool },
    /// Lower face z = −kσ^{1+α} over the parent's footprint.
    Bottom,
    /// Body surface z = h + g(x′) over the full disc |x′| < ρ.
    BodySurface { rho: R },
    /// Wall surface z = g_Ω(x′) over the full disc |x′| < ρ.
    WallSurface { rho: R },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePatch<R> {
    pub kind: PatchKind<R>,
    pub parent: DomainSpec<R>,
}

/// Point, unit outward normal, and area element of a patch parametrization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceSample<R> {
    pub point: Vec3<R>,
    pub normal: Vec3<R>,
    /// Jacobian of the [0,1]² map: ∫∫ f·area_element ds dt = ∫ f dS.
    pub area_element: R,
}

impl<R: Real> SurfacePatch<R> {
    pub fn new(kind: PatchKind<R>, parent: DomainSpec<R>) -> Result<Self> {
        let degenerate = match kind {
            PatchKind::LateralCurved { radius, .. } => !(radius > R::zero()),
            PatchKind::BodySurface { rho } | PatchKind::WallSurface { rho } => {
                !(rho > R::zero())
            }
            _ => false, // parent construction already rejects rho = 0
        };
        if degenerate {
            return Err(Error::DegeneratePatch);
        }
        Ok(Self { kind, parent })
    }

    /// Radial range of the `s` direction, when `s` parametrizes radius.
    /// Quadrature uses this to decide on kink-resolving cell splits.
    pub fn radial_range(&self) -> Option<(R, R)> {
        let fp = self.parent.footprint();
        match self.kind {
            PatchKind::TopFlat | PatchKind::Bottom => Some((fp.r_lo, fp.r_hi)),
            PatchKind::TopFlatAnnulus => {
                Some((self.parent.rho() / cst::<R>(2.0), self.parent.rho()))
            }
            PatchKind::TopCup | PatchKind::TopPhi => Some((R::zero(), self.parent.rho())),
            PatchKind::LateralFlat { .. } => Some((fp.r_lo, fp.r_hi)),
            PatchKind::BodySurface { rho } | PatchKind::WallSurface { rho } => {
                Some((R::zero(), rho))
            }
            PatchKind::LateralCurved { .. } => None,
        }
    }

    /// Maps (s, t) ∈ [0,1]² onto the patch.
    pub fn surface_param(&self, s: R, t: R) -> SurfaceSample<R> {
        let dom = &self.parent;
        let fp = dom.footprint();
        let geom = &dom.geom;
        match self.kind {
            PatchKind::TopFlat | PatchKind::TopFlatAnnulus | PatchKind::Bottom => {
                let (r_lo, r_hi) = self.radial_range().expect("radial patch");
                let dr = r_hi - r_lo;
                let r = r_lo + dr * s;
                let theta = fp.theta0 + fp.theta_width * t;
                let z = if matches!(self.kind, PatchKind::Bottom) {
                    dom.z_lower()
                } else {
                    dom.flat_top_z()
                };
                let up = !matches!(self.kind, PatchKind::Bottom);
                SurfaceSample {
                    point: Vec3::new(r * theta.cos(), r * theta.sin(), z),
                    normal: Vec3::new(
                        R::zero(),
                        R::zero(),
                        if up { R::one() } else { -R::one() },
                    ),
                    area_element: r * dr * fp.theta_width,
                }
            }
            PatchKind::TopCup => {
                let rho = dom.rho();
                let r = rho * s;
                let theta = fp.theta0 + fp.theta_width * t;
                let (x1, x2) = (r * theta.cos(), r * theta.sin());
                let z = dom.state.h + geom.cap.height(x1, x2);
                let (gx, gy) = geom.cap.gradient(x1, x2);
                let w = (R::one() + gx * gx + gy * gy).sqrt();
                SurfaceSample {
                    point: Vec3::new(x1, x2, z),
                    normal: Vec3::new(-gx / w, -gy / w, R::one() / w),
                    area_element: w * r * rho * fp.theta_width,
                }
            }
            PatchKind::TopPhi => {
                let tan_phi = match dom.kind {
                    DomainKind::PhiTop { tan_phi, .. } => tan_phi,
                    _ => panic!("TopPhi patch requires a PhiTop parent"),
                };
                let rho = dom.rho();
                let r = rho * s;
                let theta = fp.theta0 + fp.theta_width * t;
                let z = dom.z_upper_at(r, theta);
                let sec = (R::one() + tan_phi * tan_phi).sqrt();
                let (sin_phi, cos_phi) = (tan_phi / sec, R::one() / sec);
                SurfaceSample {
                    point: Vec3::new(r * theta.cos(), r * theta.sin(), z),
                    normal: Vec3::new(R::zero(), -sin_phi, cos_phi),
                    area_element: sec * r * rho * fp.theta_width,
                }
            }
            PatchKind::LateralCurved { radius, outward } => {
                let theta = fp.theta0 + fp.theta_width * t;
                let z_lo = dom.z_lower();
                let dz = dom.z_upper_at(radius, theta) - z_lo;
                let z = z_lo + dz * s;
                let sign = if outward { R::one() } else { -R::one() };
                SurfaceSample {
                    point: Vec3::new(radius * theta.cos(), radius * theta.sin(), z),
                    normal: Vec3::new(sign * theta.cos(), sign * theta.sin(), R::zero()),
                    area_element: dz * radius * fp.theta_width,
                }
            }
            PatchKind::LateralFlat { angle, flip } => {
                let (r_lo, r_hi) = self.radial_range().expect("radial patch");
                let dr = r_hi - r_lo;
                let r = r_lo + dr * s;
                let z_lo = dom.z_lower();
                let dz = dom.z_upper_at(r, angle) - z_lo;
                let z = z_lo + dz * t;
                // Both faces lie in the dividing plane and share its outward
                // normal (sin γ, −cos γ, 0); the face on the γ+π ray must
                // flip the sign its own angle would give.
                let sign = if flip { -R::one() } else { R::one() };
                SurfaceSample {
                    point: Vec3::new(r * angle.cos(), r * angle.sin(), z),
                    normal: Vec3::new(sign * angle.sin(), -sign * angle.cos(), R::zero()),
                    area_element: dr * dz,
                }
            }
            PatchKind::BodySurface { rho } => {
                let r = rho * s;
                let two_pi = cst::<R>(2.0) * R::PI();
                let theta = two_pi * t;
                let (x1, x2) = (r * theta.cos(), r * theta.sin());
                let z = dom.state.h + geom.cap.height(x1, x2);
                let (gx, gy) = geom.cap.gradient(x1, x2);
                let w = (R::one() + gx * gx + gy * gy).sqrt();
                SurfaceSample {
                    point: Vec3::new(x1, x2, z),
                    normal: Vec3::new(-gx / w, -gy / w, R::one() / w),
                    area_element: w * r * rho * two_pi,
                }
            }
            PatchKind::WallSurface { rho } => {
                let r = rho * s;
                let two_pi = cst::<R>(2.0) * R::PI();
                let theta = two_pi * t;
                let (x1, x2) = (r * theta.cos(), r * theta.sin());
                let z = geom.wall.height(x1, x2);
                let (gx, gy) = geom.wall.gradient(x1, x2);
                let w = (R::one() + gx * gx + gy * gy).sqrt();
                SurfaceSample {
                    point: Vec3::new(x1, x2, z),
                    normal: Vec3::new(gx / w, gy / w, -R::one() / w),
                    area_element: w * r * rho * two_pi,
                }
            }
        }
    }

    /// True for the LateralFlat face on the γ+π ray, whose outward normal
    /// is the negative of the one its own angle parameterizes.
    pub fn is_flipped_flat(&self) -> bool {
        matches!(self.kind, PatchKind::LateralFlat { flip: true, .. })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom_k1() -> GapGeometry<f64> {
        GapGeometry::power_law(1.0, 1.0, 1.6).unwrap()
    }

    #[test]
    fn gap_height_matches_axis_and_offset_values() {
        let geom = geom_k1();
        let state = GapState::new(0.01, 1.0).unwrap();
        assert_eq!(geom.gap_height(&state, 0.0, 0.0).unwrap(), 0.01);
        let v = geom.gap_height(&state, 0.1, 0.0).unwrap();
        assert!((v - 0.02).abs() < 1e-15);
    }

    #[test]
    fn gap_height_fractional_alpha_touching_state() {
        // k = 2, α = 0.5, h = 0, |x′| = 0.05: value pinned by an
        // independent scalar computation of k·|x′|^{1.5}.
        let geom: GapGeometry<f64> = GapGeometry::power_law(2.0, 0.5, 1.0).unwrap();
        let state = GapState::new(0.0, 1.0).unwrap();
        let v = geom.gap_height(&state, 0.04, 0.03).unwrap();
        assert!((v - 0.022360679774997897).abs() < 1e-16);
    }

    #[test]
    fn gap_height_rejects_points_outside_chart() {
        let geom = geom_k1();
        let state = GapState::new(0.01, 1.0).unwrap();
        match geom.gap_height(&state, 1.7, 0.0) {
            Err(Error::ChartExceeded { .. }) => {}
            other => panic!("expected ChartExceeded, got {other:?}"),
        }
    }

    #[test]
    fn contains_fluid_classifies_axis_points() {
        let geom = geom_k1();
        let state = GapState::new(0.01, 1.0).unwrap();
        assert!(geom
            .contains_fluid(&state, Vec3::new(0.0, 0.0, 0.005))
            .unwrap());
        assert!(!geom
            .contains_fluid(&state, Vec3::new(0.0, 0.0, 0.02))
            .unwrap());
        assert!(!geom
            .contains_fluid(&state, Vec3::new(0.0, 0.0, -0.001))
            .unwrap());
    }

    #[test]
    fn gap_state_accepts_touching_rejects_oversized() {
        assert!(GapState::new(0.0, 1.0).is_ok());
        assert!(matches!(
            GapState::new(1.5, 1.0),
            Err(Error::GapExceedsDiameter { .. })
        ));
        assert!(matches!(
            GapState::new(-0.1, 1.0),
            Err(Error::InvalidParameter { .. })
        ));
    }

    #[test]
    fn envelope_ratio_is_tight_for_power_law() {
        let geom = geom_k1();
        let r = geom.envelope_ratio(16);
        assert!(r <= 1.0 + 1e-12, "ratio {r}");
        assert!(r > 0.99, "power-law cap should saturate its own envelope");
    }

    #[test]
    fn polynomial_bounds_hold_for_modest_coefficients() {
        let geom = GapGeometry::polynomial_c3(
            [0.3, 0.1, 0.2],
            [0.05, -0.02, 0.01, 0.04],
            1.0,
            1.0,
            2.0,
            0.5,
            WallProfile::Flat,
        )
        .unwrap();
        let r = geom.c3_bound_ratio(16).unwrap();
        assert!(r <= 1.0, "C3 ratio {r}");
    }

    #[test]
    fn domain_construction_enforces_sigma_window() {
        let geom = geom_k1();
        let state = GapState::new(0.01, 1.0).unwrap();
        assert!(DomainSpec::full_cylinder(geom, state, 0.8).is_ok());
        assert!(matches!(
            DomainSpec::full_cylinder(geom, state, 0.9),
            Err(Error::SigmaOutOfRange { .. })
        ));
        assert!(matches!(
            DomainSpec::full_cylinder(geom, state, 0.0),
            Err(Error::InvalidParameter { .. })
        ));
    }

    #[test]
    fn flat_top_and_lower_face_heights() {
        let geom = geom_k1();
        let state = GapState::new(0.01, 1.0).unwrap();
        let dom = DomainSpec::full_cylinder(geom, state, 0.1).unwrap();
        assert!((dom.z_lower() + 0.01).abs() < 1e-15); // −k σ²
        assert!((dom.flat_top_z() - 0.03).abs() < 1e-15); // h + 2kσ²
    }

    #[test]
    fn phi_top_canonical_slope_and_extents() {
        let geom = geom_k1();
        let state = GapState::new(0.01, 1.0).unwrap();
        let dom = DomainSpec::phi_top_canonical(geom, state, 0.1, 0.0).unwrap();
        match dom.kind {
            DomainKind::PhiTop { tan_phi, .. } => assert!((tan_phi - 0.05).abs() < 1e-15),
            _ => panic!(),
        }
        // Plane minimum sits exactly at the cup-top rim height h + kσ^{1+α}.
        let z_min = dom.z_upper_at(0.1, -std::f64::consts::FRAC_PI_2);
        assert!((z_min - (0.01 + 0.01)).abs() < 1e-15);
    }

    #[test]
    fn inclusion_chain_cup_phi_flat_on_samples() {
        let geom = geom_k1();
        let state = GapState::new(0.01, 1.0).unwrap();
        let rho = 0.1;
        let gamma = 0.7;
        let cup = DomainSpec::cup_top(geom, state, rho, gamma).unwrap();
        let phi = DomainSpec::phi_top_canonical(geom, state, rho, gamma).unwrap();
        let flat = DomainSpec::half_cylinder(geom, state, rho, gamma).unwrap();
        for i in 0..40 {
            let r = rho * (i as f64 + 0.5) / 40.0;
            for j in 0..40 {
                let th = gamma + std::f64::consts::PI * (j as f64 + 0.5) / 40.0;
                let zc = cup.z_upper_at(r, th);
                let zp = phi.z_upper_at(r, th);
                let zf = flat.z_upper_at(r, th);
                assert!(
                    zc <= zp + 1e-15 && zp <= zf + 1e-15,
                    "ordering violated at r={r} th={th}: {zc} {zp} {zf}"
                );
            }
        }
    }

    #[test]
    fn contains_respects_angular_window() {
        let geom = geom_k1();
        let state = GapState::new(0.01, 1.0).unwrap();
        let dom = DomainSpec::half_cylinder(geom, state, 0.1, 0.0).unwrap();
        assert!(dom.contains(Vec3::new(0.0, 0.05, 0.01)));
        assert!(!dom.contains(Vec3::new(0.0, -0.05, 0.01)));
        assert!(!dom.contains(Vec3::new(0.0, 0.05, 0.2)));
    }

    #[test]
    fn surface_param_top_flat_normal_and_rim_point() {
        let geom = geom_k1();
        let state = GapState::new(0.01, 1.0).unwrap();
        let dom = DomainSpec::half_cylinder(geom, state, 0.5, 0.0).unwrap();
        let top = SurfacePatch::new(PatchKind::TopFlat, dom).unwrap();
        let smp = top.surface_param(1.0, 0.5);
        // rim point at angle γ + π/2
        assert!((smp.point.x - 0.0).abs() < 1e-15);
        assert!((smp.point.y - 0.5).abs() < 1e-15);
        assert_eq!(smp.normal, Vec3::new(0.0, 0.0, 1.0));
        let bottom = SurfacePatch::new(PatchKind::Bottom, dom).unwrap();
        assert_eq!(bottom.surface_param(0.3, 0.3).normal, Vec3::new(0.0, 0.0, -1.0));
    }

    #[test]
    fn phi_patch_with_zero_slope_degenerates_to_flat() {
        let geom = geom_k1();
        let state = GapState::new(0.01, 1.0).unwrap();
        let phi = DomainSpec::phi_top(geom, state, 0.1, 0.3, 0.0).unwrap();
        let flat = DomainSpec::half_cylinder(geom, state, 0.1, 0.3).unwrap();
        let pp = SurfacePatch::new(PatchKind::TopPhi, phi).unwrap();
        let pf = SurfacePatch::new(PatchKind::TopFlat, flat).unwrap();
        for (s, t) in [(0.2, 0.8), (0.9, 0.1), (0.5, 0.5)] {
            let a = pp.surface_param(s, t);
            let b = pf.surface_param(s, t);
            assert!((a.point - b.point).norm() < 1e-15);
            assert!((a.normal - b.normal).norm() < 1e-15);
            assert!((a.area_element - b.area_element).abs() < 1e-15);
        }
    }

    #[test]
    fn degenerate_patches_are_rejected() {
        let geom = geom_k1();
        let state = GapState::new(0.01, 1.0).unwrap();
        let dom = DomainSpec::full_cylinder(geom, state, 0.1).unwrap();
        assert!(matches!(
            SurfacePatch::new(
                PatchKind::LateralCurved {
                    radius: 0.0,
                    outward: true
                },
                dom
            ),
            Err(Error::DegeneratePatch)
        ));
        assert!(matches!(
            SurfacePatch::new(PatchKind::BodySurface { rho: 0.0 }, dom),
            Err(Error::DegeneratePatch)
        ));
    }

    #[test]
    fn boundary_patch_counts_per_kind() {
        let geom = geom_k1();
        let state = GapState::new(0.01, 1.0).unwrap();
        let full = DomainSpec::full_cylinder(geom, state, 0.1).unwrap();
        let half = DomainSpec::half_cylinder(geom, state, 0.1, 1.0).unwrap();
        let shell = DomainSpec::shell_half(geom, state, 0.1, 1.0).unwrap();
        assert_eq!(full.boundary_patches().len(), 3);
        assert_eq!(half.boundary_patches().len(), 5);
        assert_eq!(shell.boundary_patches().len(), 6);
    }

    #[test]
    fn normalize_angle_wraps_into_period() {
        assert!((normalize_angle(-0.5f64) - (2.0 * std::f64::consts::PI - 0.5)).abs() < 1e-12);
        assert!(normalize_angle(7.0f64) < 2.0 * std::f64::consts::PI);
        assert_eq!(normalize_angle(0.0f64), 0.0);
    }
}
