//! Velocity fields: rigid motions and the two divergence-free squeeze /
//! slide families built by taking the curl of a cut-off stream potential.
//!
//! Both stream families multiply their potential by
//! Ψ(x) = φ(x₃/(h + k r^{1+α})) ψ₁(r) ψ₂(x₃) before the curl, so the field
//! matches the rigid body motion on the body, vanishes on and below the
//! wall, and is compactly supported. First derivatives are analytic (the
//! chain-rule blocks below); second derivatives are central differences
//! whose stencils never straddle the fluid boundary.

use crate::error::{Error, Result};
use crate::geometry::{CapProfile, GapGeometry, GapState, WallProfile};
use crate::linalg::{Mat3, Vec3};
use crate::scalar::{cst, cst_usize, Real};

/// Exact binomial coefficient, small arguments only.
fn binom(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Polynomial smoothstep cutoffs of continuity order `q`.
///
/// S_q(t) = t^{q+1} Σ_{k=0}^{q} c_k t^k interpolates 0 → 1 on [0,1] with
/// its first q derivatives vanishing at both ends; q = 4 is the familiar
/// 9th-degree smoothstep 126t⁵ − 420t⁶ + 540t⁷ − 315t⁸ + 70t⁹.
#[derive(Debug, Clone, PartialEq)]
pub struct CutoffSpec<R> {
    pub q: usize,
    /// Radial cutoff start ρ_c: ψ₁ ≡ 1 for r ≤ ρ_c, ≡ 0 for r ≥ 2ρ_c.
    pub rho: R,
    /// Vertical cutoff start: ψ₂ ≡ 1 for x₃ ≤ bigH, ≡ 0 for x₃ ≥ 2·bigH.
    pub big_h: R,
    coeffs: Vec<R>,
}

impl<R: Real> CutoffSpec<R> {
    pub fn new(q: usize, rho: R, big_h: R) -> Result<Self> {
        if !(1..=10).contains(&q) {
            return Err(Error::InvalidParameter {
                name: "cutoff.q",
                value: q as f64,
            });
        }
        if !(rho > R::zero()) {
            return Err(Error::InvalidParameter {
                name: "cutoff.rho",
                value: rho.as_f64(),
            });
        }
        if !(big_h > R::zero()) {
            return Err(Error::InvalidParameter {
                name: "cutoff.H",
                value: big_h.as_f64(),
            });
        }
        let qq = q as u64;
        let coeffs = (0..=qq)
            .map(|k| {
                let c = binom(qq + k, k) * binom(2 * qq + 1, qq - k);
                let signed = if k % 2 == 0 { c as f64 } else { -(c as f64) };
                cst::<R>(signed)
            })
            .collect();
        Ok(Self {
            q,
            rho,
            big_h,
            coeffs,
        })
    }

    /// Default continuity order q = 4.
    pub fn with_default_order(rho: R, big_h: R) -> Result<Self> {
        Self::new(4, rho, big_h)
    }

    /// (S, S′, S″) of the smoothstep, clamped outside [0,1].
    pub fn smoothstep(&self, t: R) -> (R, R, R) {
        let zero = R::zero();
        if t <= zero {
            return (zero, zero, zero);
        }
        if t >= R::one() {
            return (R::one(), zero, zero);
        }
        let q = self.q;
        let (mut p0, mut p1, mut p2) = (zero, zero, zero);
        for k in (0..=q).rev() {
            let c = self.coeffs[k];
            let e = cst_usize::<R>(q + 1 + k);
            p0 = p0 * t + c;
            p1 = p1 * t + c * e;
            p2 = p2 * t + c * e * cst_usize::<R>(q + k);
        }
        let tq1 = t.powi((q + 1) as i32);
        let tq = t.powi(q as i32);
        let tqm = t.powi(q as i32 - 1);
        (tq1 * p0, tq * p1, tqm * p2)
    }

    /// φ(τ): ramps 0 → 1 across the gap; ≡1 on the body side.
    pub fn phi(&self, tau: R) -> (R, R, R) {
        self.smoothstep(tau)
    }

    /// ψ₁(r) = 1 − S((r − ρ_c)/ρ_c), with first and second derivatives.
    pub fn psi1(&self, r: R) -> (R, R, R) {
        let t = (r - self.rho) / self.rho;
        let (s, s1, s2) = self.smoothstep(t);
        (
            R::one() - s,
            -s1 / self.rho,
            -s2 / (self.rho * self.rho),
        )
    }

    /// ψ₂(x₃) = 1 − S((x₃ − H)/H), with first and second derivatives.
    pub fn psi2(&self, z: R) -> (R, R, R) {
        let t = (z - self.big_h) / self.big_h;
        let (s, s1, s2) = self.smoothstep(t);
        (
            R::one() - s,
            -s1 / self.big_h,
            -s2 / (self.big_h * self.big_h),
        )
    }
}

/// u(x) = u_* + ω × (x − x_*): the general rigid velocity field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidMotion<R> {
    pub u_star: Vec3<R>,
    pub omega: Vec3<R>,
    pub x_star: Vec3<R>,
}

impl<R: Real> RigidMotion<R> {
    pub fn new(u_star: Vec3<R>, omega: Vec3<R>, x_star: Vec3<R>) -> Self {
        Self {
            u_star,
            omega,
            x_star,
        }
    }

    pub fn eval(&self, x: Vec3<R>) -> Vec3<R> {
        self.u_star + self.omega.cross(x - self.x_star)
    }

    /// Constant gradient: the antisymmetric matrix of ω.
    pub fn gradient(&self) -> Mat3<R> {
        Mat3::antisymmetric_from_omega(self.omega)
    }

    /// Velocity of the contact point P = (0, 0, h); the decomposition
    /// below splits it into tangential and vertical parts.
    pub fn contact_velocity(&self, h: R) -> Vec3<R> {
        self.eval(Vec3::new(R::zero(), R::zero(), h))
    }

    /// |(u_{P1}, u_{P2})|, the tangential contact speed.
    pub fn u_p_tau(&self, h: R) -> R {
        self.contact_velocity(h).radius()
    }

    /// u_{P3}; independent of h because (ω × e₃)·e₃ = 0.
    pub fn u_p3(&self, h: R) -> R {
        self.contact_velocity(h).z
    }

    /// |(ω₁, ω₂)|, the tangential angular speed.
    pub fn omega_tau(&self) -> R {
        self.omega.radius()
    }

    pub fn omega3(&self) -> R {
        self.omega.z
    }
}

/// Shared machinery of the two stream families: the cut-off potential
/// Ψ = φ(x₃ w(r)) ψ₁(r) ψ₂(x₃) with w = 1/(h + k r^{1+α}), and its
/// derivatives up to second order in (r, x₃).
#[derive(Debug, Clone, PartialEq)]
struct StreamCore<R> {
    geom: GapGeometry<R>,
    state: GapState<R>,
    cutoff: CutoffSpec<R>,
    k: R,
    alpha: R,
}

impl<R: Real> StreamCore<R> {
    fn new(geom: GapGeometry<R>, state: GapState<R>, cutoff: CutoffSpec<R>) -> Result<Self> {
        let (k, alpha) = match geom.cap {
            CapProfile::PowerLaw { k, alpha } => (k, alpha),
            // w(r) below is the reciprocal gap of a power-law cap; other
            // profiles have no such closed form here.
            CapProfile::PolynomialC3 { .. } => {
                return Err(Error::InvalidParameter {
                    name: "capKind",
                    value: f64::NAN,
                })
            }
        };
        if !matches!(geom.wall, WallProfile::Flat) {
            return Err(Error::InvalidParameter {
                name: "wallKind",
                value: f64::NAN,
            });
        }
        if !(state.h > R::zero()) {
            // τ = x₃/(h + k r^{1+α}) degenerates on the axis at contact.
            return Err(Error::InvalidParameter {
                name: "h",
                value: state.h.as_f64(),
            });
        }
        Ok(Self {
            geom,
            state,
            cutoff,
            k,
            alpha,
        })
    }

    /// [Ψ, Ψ_r, Ψ_z, Ψ_rr, Ψ_rz, Ψ_zz] at (r, z).
    fn psi_block(&self, r: R, z: R) -> [R; 6] {
        let (h, k, a) = (self.state.h, self.k, self.alpha);
        let one = R::one();
        let two = cst::<R>(2.0);
        let denom = h + k * r.powf(one + a);
        let w = one / denom;
        let wr = -(one + a) * k * r.powf(a) * w * w;
        // at the axis r^{α−1} is singular for α < 1; the value is never
        // consumed there (see the axis conventions in the eval paths)
        let wrr = if r > R::zero() {
            -(one + a) * k * (a * r.powf(a - one) * w * w + r.powf(a) * two * w * wr)
        } else {
            R::zero()
        };
        let tau = z * w;
        let (tr, tz) = (z * wr, w);
        let (trr, trz) = (z * wrr, wr);
        let (f, f1, f2) = self.cutoff.phi(tau);
        let (p1, p1r, p1rr) = self.cutoff.psi1(r);
        let (p2, p2z, p2zz) = self.cutoff.psi2(z);
        let psi = f * p1 * p2;
        let pr = f1 * tr * p1 * p2 + f * p1r * p2;
        let pz = f1 * tz * p1 * p2 + f * p1 * p2z;
        let prr = f2 * tr * tr * p1 * p2
            + f1 * trr * p1 * p2
            + two * f1 * tr * p1r * p2
            + f * p1rr * p2;
        let prz = f2 * tr * tz * p1 * p2
            + f1 * trz * p1 * p2
            + f1 * tr * p1 * p2z
            + f1 * tz * p1r * p2
            + f * p1r * p2z;
        let pzz = f2 * tz * tz * p1 * p2 + two * f1 * tz * p1 * p2z + f * p1 * p2zz;
        [psi, pr, pz, prr, prz, pzz]
    }
}

/// First stream family: vertical squeeze ḣ plus spin ω₃ about the axis.
///
/// u = ½(−ω₃x₂G − ḣx₁Ψ_z, ω₃x₁G − ḣx₂Ψ_z, ḣG) with G = 2Ψ + rΨ_r.
/// On the body (Ψ ≡ 1) this is the rigid motion (−ω₃x₂, ω₃x₁, ḣ).
#[derive(Debug, Clone, PartialEq)]
pub struct SqueezeSpin<R> {
    pub hdot: R,
    pub omega3: R,
    core: StreamCore<R>,
}

impl<R: Real> SqueezeSpin<R> {
    pub fn new(
        hdot: R,
        omega3: R,
        geom: GapGeometry<R>,
        state: GapState<R>,
        cutoff: CutoffSpec<R>,
    ) -> Result<Self> {
        Ok(Self {
            hdot,
            omega3,
            core: StreamCore::new(geom, state, cutoff)?,
        })
    }

    pub fn geometry(&self) -> (&GapGeometry<R>, &GapState<R>) {
        (&self.core.geom, &self.core.state)
    }

    /// The rigid motion this field matches on the body.
    pub fn body_motion(&self) -> RigidMotion<R> {
        RigidMotion::new(
            Vec3::new(R::zero(), R::zero(), self.hdot),
            Vec3::new(R::zero(), R::zero(), self.omega3),
            Vec3::zero(),
        )
    }

    pub fn eval(&self, x: Vec3<R>) -> Result<Vec3<R>> {
        self.core.geom.check_chart(x.x, x.y)?;
        let r = x.radius();
        let [psi, pr, pz, ..] = self.core.psi_block(r, x.z);
        let two = cst::<R>(2.0);
        let half = cst::<R>(0.5);
        let g = two * psi + r * pr;
        Ok(Vec3::new(
            half * (-self.omega3 * x.y * g - self.hdot * x.x * pz),
            half * (self.omega3 * x.x * g - self.hdot * x.y * pz),
            half * self.hdot * g,
        ))
    }

    pub fn gradient(&self, x: Vec3<R>) -> Result<Mat3<R>> {
        self.core.geom.check_chart(x.x, x.y)?;
        let r = x.radius();
        let [psi, pr, pz, prr, prz, pzz] = self.core.psi_block(r, x.z);
        let two = cst::<R>(2.0);
        let three = cst::<R>(3.0);
        let half = cst::<R>(0.5);
        let g = two * psi + r * pr;
        let gr = three * pr + r * prr;
        let gz = two * pz + r * prz;
        let (c1, c2) = if r > R::zero() {
            (x.x / r, x.y / r)
        } else {
            (R::zero(), R::zero())
        };
        let (hd, om) = (self.hdot, self.omega3);
        Ok(Mat3::from_rows(
            [
                half * (-om * x.y * c1 * gr - hd * pz - hd * x.x * c1 * prz),
                half * (-om * g - om * x.y * c2 * gr - hd * x.x * c2 * prz),
                half * (-om * x.y * gz - hd * x.x * pzz),
            ],
            [
                half * (om * g + om * x.x * c1 * gr - hd * x.y * c1 * prz),
                half * (om * x.x * c2 * gr - hd * pz - hd * x.y * c2 * prz),
                half * (om * x.x * gz - hd * x.y * pzz),
            ],
            [
                half * hd * c1 * gr,
                half * hd * c2 * gr,
                half * hd * gz,
            ],
        ))
    }
}

/// Second stream family: lateral slide v₁ along x₁ plus roll ω₂ about x₂,
/// from the potential F = (0, −½ω₂(x₁² + (x₃−h)²), x₂v₁) multiplied by Ψ.
///
/// With ζ = x₃ − h, Q = x₁² + ζ², A = Ψ_r/r:
/// u = (Ψ(v₁+ω₂ζ) + v₁x₂²A + ½ω₂QΨ_z, −v₁x₁x₂A, −ω₂x₁Ψ − ½ω₂x₁QA).
/// On the body this is the rigid motion v₁e₁ + ω₂e₂ × (x − (0,0,h)).
#[derive(Debug, Clone, PartialEq)]
pub struct SlideRoll<R> {
    pub v1: R,
    pub omega2: R,
    core: StreamCore<R>,
}

impl<R: Real> SlideRoll<R> {
    pub fn new(
        v1: R,
        omega2: R,
        geom: GapGeometry<R>,
        state: GapState<R>,
        cutoff: CutoffSpec<R>,
    ) -> Result<Self> {
        Ok(Self {
            v1,
            omega2,
            core: StreamCore::new(geom, state, cutoff)?,
        })
    }

    pub fn geometry(&self) -> (&GapGeometry<R>, &GapState<R>) {
        (&self.core.geom, &self.core.state)
    }

    pub fn body_motion(&self) -> RigidMotion<R> {
        RigidMotion::new(
            Vec3::new(self.v1, R::zero(), R::zero()),
            Vec3::new(R::zero(), self.omega2, R::zero()),
            Vec3::new(R::zero(), R::zero(), self.core.state.h),
        )
    }

    /// A = Ψ_r/r and its derivatives; the axis value uses the removable
    /// convention A(0) = Ψ_rr(0). For α < 1 the true limit is unbounded
    /// (still square-integrable), and every A term in u and ∇u carries a
    /// vanishing coordinate factor there, so the convention never leaks
    /// into values; quadrature nodes do not sample r = 0.
    fn radial_ratio(&self, r: R, pr: R, prr: R, prz: R) -> (R, R, R) {
        if r > R::zero() {
            let a = pr / r;
            ((a), (prr - a) / r, prz / r)
        } else {
            (prr, R::zero(), prz)
        }
    }

    pub fn eval(&self, x: Vec3<R>) -> Result<Vec3<R>> {
        self.core.geom.check_chart(x.x, x.y)?;
        let r = x.radius();
        let [psi, pr, pz, prr, prz, _] = self.core.psi_block(r, x.z);
        let (a, _, _) = self.radial_ratio(r, pr, prr, prz);
        let half = cst::<R>(0.5);
        let zeta = x.z - self.core.state.h;
        let q = x.x * x.x + zeta * zeta;
        let (v1, om2) = (self.v1, self.omega2);
        Ok(Vec3::new(
            psi * (v1 + om2 * zeta) + v1 * x.y * x.y * a + half * om2 * q * pz,
            -v1 * x.x * x.y * a,
            -om2 * x.x * psi - half * om2 * x.x * q * a,
        ))
    }

    pub fn gradient(&self, x: Vec3<R>) -> Result<Mat3<R>> {
        self.core.geom.check_chart(x.x, x.y)?;
        let r = x.radius();
        let [psi, pr, pz, prr, prz, pzz] = self.core.psi_block(r, x.z);
        let (a, a_r, a_z) = self.radial_ratio(r, pr, prr, prz);
        let (c1, c2) = if r > R::zero() {
            (x.x / r, x.y / r)
        } else {
            (R::zero(), R::zero())
        };
        let two = cst::<R>(2.0);
        let half = cst::<R>(0.5);
        let zeta = x.z - self.core.state.h;
        let q = x.x * x.x + zeta * zeta;
        let (v1, om2) = (self.v1, self.omega2);
        let (x1, x2) = (x.x, x.y);
        Ok(Mat3::from_rows(
            [
                c1 * pr * (v1 + om2 * zeta)
                    + v1 * x2 * x2 * c1 * a_r
                    + half * om2 * (two * x1 * pz + q * c1 * prz),
                c2 * pr * (v1 + om2 * zeta)
                    + v1 * (two * x2 * a + x2 * x2 * c2 * a_r)
                    + half * om2 * q * c2 * prz,
                pz * (v1 + om2 * zeta)
                    + om2 * psi
                    + v1 * x2 * x2 * a_z
                    + half * om2 * (two * zeta * pz + q * pzz),
            ],
            [
                -v1 * x2 * (a + x1 * c1 * a_r),
                -v1 * x1 * (a + x2 * c2 * a_r),
                -v1 * x1 * x2 * a_z,
            ],
            [
                -om2 * (psi + x1 * c1 * pr)
                    - half * om2 * (q * a + x1 * (two * x1 * a + q * c1 * a_r)),
                -om2 * x1 * c2 * pr - half * om2 * x1 * q * c2 * a_r,
                -om2 * x1 * pz - half * om2 * x1 * (two * zeta * a + q * a_z),
            ],
        ))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FieldKind<R> {
    Rigid(RigidMotion<R>),
    SqueezeSpin(SqueezeSpin<R>),
    SlideRoll(SlideRoll<R>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GradMode<R> {
    Analytic,
    FiniteDifference { step: R },
}

/// A velocity field together with its gradient evaluation policy.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityField<R> {
    pub kind: FieldKind<R>,
    pub grad_mode: GradMode<R>,
}

impl<R: Real> VelocityField<R> {
    pub fn rigid(m: RigidMotion<R>) -> Self {
        Self {
            kind: FieldKind::Rigid(m),
            grad_mode: GradMode::Analytic,
        }
    }

    pub fn squeeze_spin(f: SqueezeSpin<R>) -> Self {
        Self {
            kind: FieldKind::SqueezeSpin(f),
            grad_mode: GradMode::Analytic,
        }
    }

    pub fn slide_roll(f: SlideRoll<R>) -> Self {
        Self {
            kind: FieldKind::SlideRoll(f),
            grad_mode: GradMode::Analytic,
        }
    }

    pub fn with_grad_mode(mut self, mode: GradMode<R>) -> Self {
        self.grad_mode = mode;
        self
    }

    /// Geometry the field is attached to, if any (stream families only).
    pub fn geometry(&self) -> Option<(&GapGeometry<R>, &GapState<R>)> {
        match &self.kind {
            FieldKind::Rigid(_) => None,
            FieldKind::SqueezeSpin(f) => Some(f.geometry()),
            FieldKind::SlideRoll(f) => Some(f.geometry()),
        }
    }

    /// The rigid motion the field equals on the body (the field itself for
    /// a rigid field).
    pub fn body_motion(&self) -> RigidMotion<R> {
        match &self.kind {
            FieldKind::Rigid(m) => *m,
            FieldKind::SqueezeSpin(f) => f.body_motion(),
            FieldKind::SlideRoll(f) => f.body_motion(),
        }
    }

    pub fn eval(&self, x: Vec3<R>) -> Result<Vec3<R>> {
        match &self.kind {
            FieldKind::Rigid(m) => Ok(m.eval(x)),
            FieldKind::SqueezeSpin(f) => f.eval(x),
            FieldKind::SlideRoll(f) => f.eval(x),
        }
    }

    fn analytic_gradient(&self, x: Vec3<R>) -> Result<Mat3<R>> {
        match &self.kind {
            FieldKind::Rigid(m) => Ok(m.gradient()),
            FieldKind::SqueezeSpin(f) => f.gradient(x),
            FieldKind::SlideRoll(f) => f.gradient(x),
        }
    }

    fn step_floor(x: Vec3<R>) -> R {
        cst::<R>(64.0) * R::epsilon() * x.norm().max(R::one())
    }

    /// ∇u; entries J[i][j] = ∂u_i/∂x_j. Analytic mode is exact for rigid
    /// fields; finite-difference mode is second-order central.
    pub fn gradient(&self, x: Vec3<R>) -> Result<Mat3<R>> {
        match self.grad_mode {
            GradMode::Analytic => self.analytic_gradient(x),
            GradMode::FiniteDifference { step } => {
                let floor = Self::step_floor(x);
                if step < floor {
                    return Err(Error::StepUnderflow {
                        step: step.as_f64(),
                        floor: floor.as_f64(),
                    });
                }
                let mut m = Mat3::zero();
                let two = cst::<R>(2.0);
                for j in 0..3 {
                    let mut xp = x;
                    let mut xm = x;
                    xp.set(j, x.get(j) + step);
                    xm.set(j, x.get(j) - step);
                    let up = self.eval(xp)?;
                    let um = self.eval(xm)?;
                    for i in 0..3 {
                        m.set(i, j, (up.get(i) - um.get(i)) / (two * step));
                    }
                }
                Ok(m)
            }
        }
    }

    /// Central-difference divergence at `x` with the given step; O(step²)
    /// for the stream families, exact cancellation for rigid fields.
    pub fn divergence_residual(&self, x: Vec3<R>, step: R) -> Result<R> {
        let floor = Self::step_floor(x);
        if step < floor {
            return Err(Error::StepUnderflow {
                step: step.as_f64(),
                floor: floor.as_f64(),
            });
        }
        let two = cst::<R>(2.0);
        let mut div = R::zero();
        for j in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp.set(j, x.get(j) + step);
            xm.set(j, x.get(j) - step);
            div = div + (self.eval(xp)?.get(j) - self.eval(xm)?.get(j)) / (two * step);
        }
        Ok(div)
    }

    /// |∇²u|(x): Frobenius norm over all 27 second partials, by a 19-point
    /// second-order stencil. The stencil must lie strictly inside the fluid
    /// gap; it shrinks (halving) to fit and reports [`Error::StencilClipped`]
    /// once the step falls below the resolvable floor. Rigid fields return
    /// an exact zero.
    pub fn hessian_norm(&self, x: Vec3<R>) -> Result<R> {
        let base = R::epsilon().powf(cst::<R>(0.25)) * x.norm().max(R::one());
        self.hessian_norm_with_step(x, base)
    }

    pub fn hessian_norm_with_step(&self, x: Vec3<R>, base_step: R) -> Result<R> {
        let (geom, state) = match &self.kind {
            FieldKind::Rigid(_) => return Ok(R::zero()),
            FieldKind::SqueezeSpin(f) => f.geometry(),
            FieldKind::SlideRoll(f) => f.geometry(),
        };
        let in_fluid = |p: Vec3<R>| -> bool {
            matches!(geom.contains_fluid(state, p), Ok(true))
        };
        let floor = Self::step_floor(x);
        let mut s = base_step;
        let fits = |s: R| -> bool {
            for j in 0..3 {
                for sign in [R::one(), -R::one()] {
                    let mut p = x;
                    p.set(j, x.get(j) + sign * s);
                    if !in_fluid(p) {
                        return false;
                    }
                }
            }
            for j in 0..3 {
                for k in (j + 1)..3 {
                    for sj in [R::one(), -R::one()] {
                        for sk in [R::one(), -R::one()] {
                            let mut p = x;
                            p.set(j, x.get(j) + sj * s);
                            p.set(k, x.get(k) + sk * s);
                            if !in_fluid(p) {
                                return false;
                            }
                        }
                    }
                }
            }
            in_fluid(x)
        };
        while !fits(s) {
            s = s * cst::<R>(0.5);
            if s < floor {
                return Err(Error::StencilClipped);
            }
        }
        let u0 = self.eval(x)?;
        let two = cst::<R>(2.0);
        let four = cst::<R>(4.0);
        let s2 = s * s;
        let mut up = [Vec3::zero(); 3];
        let mut um = [Vec3::zero(); 3];
        for j in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp.set(j, x.get(j) + s);
            xm.set(j, x.get(j) - s);
            up[j] = self.eval(xp)?;
            um[j] = self.eval(xm)?;
        }
        let mut acc = R::zero();
        for j in 0..3 {
            let djj = (up[j] - u0 * two + um[j]) * (R::one() / s2);
            acc = acc + djj.norm_sq();
        }
        for j in 0..3 {
            for k in (j + 1)..3 {
                let mut xpp = x;
                let mut xpm = x;
                let mut xmp = x;
                let mut xmm = x;
                xpp.set(j, x.get(j) + s);
                xpp.set(k, x.get(k) + s);
                xpm.set(j, x.get(j) + s);
                xpm.set(k, x.get(k) - s);
                xmp.set(j, x.get(j) - s);
                xmp.set(k, x.get(k) + s);
                xmm.set(j, x.get(j) - s);
                xmm.set(k, x.get(k) - s);
                let djk = (self.eval(xpp)? - self.eval(xpm)? - self.eval(xmp)?
                    + self.eval(xmm)?)
                    * (R::one() / (four * s2));
                // mixed partials appear twice in the 27-entry norm
                acc = acc + two * djk.norm_sq();
            }
        }
        Ok(acc.sqrt())
    }
}
