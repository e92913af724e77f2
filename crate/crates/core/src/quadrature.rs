//! Deterministic quadrature over gap domains and boundary patches.
//!
//! Design notes, load-bearing:
//! - The vertical variable is always the scaled coordinate ξ ∈ [0,1] over
//!   the (possibly fluid-clamped) local window, which removes the thin-gap
//!   aspect-ratio penalty: smooth integrands see a tensor-product box.
//! - A radial interval touching r = 0 is split geometrically (ratio 1/2,
//!   fixed depth) so the |x′|^{1+α} kink at the axis cannot poison the
//!   Gauss order for fractional α.
//! - Summation is compensated and runs in a fixed loop order; identical
//!   inputs give bit-identical results regardless of caller threading.
//! - Error estimates come from one coarse companion pass (orders reduced),
//!   not from adaptivity: value = fine, errorEstimate = |fine − coarse|.

use crate::error::{Error, Result};
use crate::fields::VelocityField;
use crate::geometry::{DomainSpec, SurfacePatch};
use crate::linalg::Vec3;
use crate::scalar::{cst, cst_usize, Real};

/// Depth of the geometric split of a radial cell touching the axis.
/// 2^{-30} ≈ 9e-10 relative leaves the unresolved tail far below any
/// tolerance used in this crate.
const GEOM_SPLIT_LEVELS: usize = 30;

/// How much the coarse companion pass reduces each Gauss order.
const COARSE_ORDER_DROP: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig<R> {
    /// Gauss–Legendre nodes per radial cell.
    pub radial_order: usize,
    /// Nodes over each angular span (single cell).
    pub angular_order: usize,
    /// Nodes per vertical cell in the scaled ξ coordinate.
    pub vertical_order: usize,
    /// Uniform radial cells (before the kink split).
    pub radial_cells: usize,
    /// Uniform vertical cells.
    pub vertical_cells: usize,
    /// Target relative two-level agreement; advisory, checked via
    /// [`IntegralResult::within_tol`].
    pub refine_tol: R,
    /// Maximum admissible excluded-volume fraction.
    pub defect_budget: R,
}

impl<R: Real> Default for QuadratureConfig<R> {
    fn default() -> Self {
        Self {
            radial_order: 10,
            angular_order: 12,
            vertical_order: 10,
            radial_cells: 4,
            vertical_cells: 2,
            refine_tol: cst(1e-8),
            defect_budget: cst(0.05),
        }
    }
}

impl<R: Real> QuadratureConfig<R> {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("radialOrder", self.radial_order),
            ("angularOrder", self.angular_order),
            ("verticalOrder", self.vertical_order),
        ] {
            if v < 2 {
                return Err(Error::InvalidParameter {
                    name,
                    value: v as f64,
                });
            }
        }
        for (name, v) in [
            ("radialCells", self.radial_cells),
            ("verticalCells", self.vertical_cells),
        ] {
            if v < 1 {
                return Err(Error::InvalidParameter {
                    name,
                    value: v as f64,
                });
            }
        }
        if !(self.refine_tol > R::zero()) {
            return Err(Error::InvalidParameter {
                name: "refineTol",
                value: self.refine_tol.as_f64(),
            });
        }
        if !(self.defect_budget >= R::zero()) {
            return Err(Error::InvalidParameter {
                name: "defectBudget",
                value: self.defect_budget.as_f64(),
            });
        }
        Ok(())
    }

    fn coarse(&self) -> Self {
        let drop = |n: usize| n.saturating_sub(COARSE_ORDER_DROP).max(2);
        Self {
            radial_order: drop(self.radial_order),
            angular_order: drop(self.angular_order),
            vertical_order: drop(self.vertical_order),
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralResult<R> {
    pub value: R,
    /// |fine − coarse| of the two-level pass; absolute.
    pub error_estimate: R,
    /// Excluded fraction of the integration measure (stencil-clipped
    /// integrand points reported as `None`).
    pub defect: R,
}

impl<R: Real> IntegralResult<R> {
    /// True when the two levels agree to the configured relative tolerance.
    pub fn within_tol(&self, cfg: &QuadratureConfig<R>) -> bool {
        let scale = self.value.abs().max(R::one());
        self.error_estimate <= cfg.refine_tol * scale
    }
}

/// Compensated accumulator; fixed insertion order makes results
/// reproducible bit-for-bit.
#[derive(Debug, Clone, Copy)]
struct KahanSum<R> {
    s: R,
    c: R,
}

impl<R: Real> KahanSum<R> {
    fn new() -> Self {
        Self {
            s: R::zero(),
            c: R::zero(),
        }
    }

    #[inline]
    fn add(&mut self, x: R) {
        let y = x - self.c;
        let t = self.s + y;
        self.c = (t - self.s) - y;
        self.s = t;
    }

    fn value(&self) -> R {
        self.s
    }
}

/// Gauss–Legendre nodes and weights on [−1, 1], by Newton iteration on the
/// Legendre recurrence. Deterministic for fixed n.
pub fn gauss_legendre<R: Real>(n: usize) -> (Vec<R>, Vec<R>) {
    assert!(n >= 1, "Gauss rule needs at least one node");
    let mut nodes = vec![R::zero(); n];
    let mut weights = vec![R::zero(); n];
    let nf = cst_usize::<R>(n);
    for i in 0..n {
        // Tricomi-style initial guess, accurate enough for Newton.
        let theta =
            R::PI() * (cst_usize::<R>(i) + cst::<R>(0.75)) / (nf + cst::<R>(0.5));
        let mut x = theta.cos();
        let mut dp = R::zero();
        for _ in 0..100 {
            // p0, p1 recurrence up to degree n; dp = P_n'(x).
            let mut p0 = R::one();
            let mut p1 = x;
            for j in 2..=n {
                let jf = cst_usize::<R>(j);
                let p2 = ((cst::<R>(2.0) * jf - R::one()) * x * p1 - (jf - R::one()) * p0)
                    / jf;
                p0 = p1;
                p1 = p2;
            }
            // derivative from the stable identity (1−x²)P' = n(P_{n−1} − xP_n)
            dp = nf * (p0 - x * p1) / (R::one() - x * x);
            let dx = p1 / dp;
            x = x - dx;
            if dx.abs() <= R::epsilon() * (x.abs() + R::one()) {
                break;
            }
        }
        nodes[i] = -x; // ascending order
        weights[i] = cst::<R>(2.0) / ((R::one() - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Nodes/weights mapped onto [lo, hi].
fn mapped_rule<R: Real>(nodes: &[R], weights: &[R], lo: R, hi: R) -> Vec<(R, R)> {
    let half = cst::<R>(0.5);
    let mid = (lo + hi) * half;
    let rad = (hi - lo) * half;
    nodes
        .iter()
        .zip(weights)
        .map(|(&x, &w)| (mid + rad * x, w * rad))
        .collect()
}

/// Uniform cells over [lo, hi]; if `kink_at_lo`, the first cell is replaced
/// by a geometric cascade toward `lo` with ratio 1/2.
fn split_cells<R: Real>(lo: R, hi: R, n_cells: usize, kink_at_lo: bool) -> Vec<(R, R)> {
    let nf = cst_usize::<R>(n_cells);
    let delta = (hi - lo) / nf;
    let mut cells = Vec::new();
    if kink_at_lo {
        let mut upper = lo + delta;
        let mut bounds = vec![upper];
        for _ in 0..GEOM_SPLIT_LEVELS {
            upper = lo + (upper - lo) * cst::<R>(0.5);
            bounds.push(upper);
        }
        bounds.push(lo);
        bounds.reverse();
        for w in bounds.windows(2) {
            if w[1] > w[0] {
                cells.push((w[0], w[1]));
            }
        }
    } else {
        cells.push((lo, lo + delta));
    }
    for i in 1..n_cells {
        let a = lo + delta * cst_usize::<R>(i);
        let b = if i + 1 == n_cells {
            hi
        } else {
            lo + delta * cst_usize::<R>(i + 1)
        };
        cells.push((a, b));
    }
    cells
}

struct LevelOutcome<R> {
    sum: R,
    defect_weight: R,
    total_weight: R,
}

/// Integrates over the parent domain, optionally clamped to the fluid gap.
///
/// The integrand may return `None` to exclude a point (recorded as defect);
/// non-finite returns abort with [`Error::NonFinite`].
pub fn volume_integral<R: Real, F>(
    dom: &DomainSpec<R>,
    restrict_to_fluid: bool,
    integrand: F,
    cfg: &QuadratureConfig<R>,
) -> Result<IntegralResult<R>>
where
    F: Fn(Vec3<R>) -> Option<R>,
{
    cfg.validate()?;
    let fine = volume_level(dom, restrict_to_fluid, &integrand, cfg)?;
    let coarse = volume_level(dom, restrict_to_fluid, &integrand, &cfg.coarse())?;
    let defect = if fine.total_weight > R::zero() {
        fine.defect_weight / fine.total_weight
    } else {
        R::zero()
    };
    if defect > cfg.defect_budget {
        return Err(Error::DefectExceeded {
            defect: defect.as_f64(),
            budget: cfg.defect_budget.as_f64(),
        });
    }
    Ok(IntegralResult {
        value: fine.sum,
        error_estimate: (fine.sum - coarse.sum).abs(),
        defect,
    })
}

fn volume_level<R: Real, F>(
    dom: &DomainSpec<R>,
    restrict_to_fluid: bool,
    integrand: &F,
    cfg: &QuadratureConfig<R>,
) -> Result<LevelOutcome<R>>
where
    F: Fn(Vec3<R>) -> Option<R>,
{
    let fp = dom.footprint();
    let (rn, rw) = gauss_legendre::<R>(cfg.radial_order);
    let (an, aw) = gauss_legendre::<R>(cfg.angular_order);
    let (zn, zw) = gauss_legendre::<R>(cfg.vertical_order);
    let r_cells = split_cells(fp.r_lo, fp.r_hi, cfg.radial_cells, fp.r_lo == R::zero());
    let theta_rule = mapped_rule(&an, &aw, fp.theta0, fp.theta0 + fp.theta_width);
    // ξ cells on [0,1]; the affine z map is applied per planar point.
    let xi_cells = split_cells(R::zero(), R::one(), cfg.vertical_cells, false);

    let mut sum = KahanSum::new();
    let mut defect_w = KahanSum::new();
    let mut total_w = KahanSum::new();

    for &(ra, rb) in &r_cells {
        for (r, wr) in mapped_rule(&rn, &rw, ra, rb) {
            for &(theta, wt) in &theta_rule {
                let (x1, x2) = (r * theta.cos(), r * theta.sin());
                let mut z_lo = dom.z_lower();
                let mut z_hi = dom.z_upper_at(r, theta);
                if restrict_to_fluid {
                    z_lo = z_lo.max(dom.geom.wall.height(x1, x2));
                    z_hi = z_hi.min(dom.state.h + dom.geom.cap.height(x1, x2));
                }
                if !(z_hi > z_lo) {
                    continue;
                }
                let dz = z_hi - z_lo;
                let base_w = r * wr * wt * dz;
                for &(xa, xb) in &xi_cells {
                    for (xi, wxi) in mapped_rule(&zn, &zw, xa, xb) {
                        let z = z_lo + dz * xi;
                        let w = base_w * wxi;
                        total_w.add(w);
                        match integrand(Vec3::new(x1, x2, z)) {
                            Some(v) => {
                                if !v.is_finite() {
                                    return Err(Error::NonFinite {
                                        what: "volume integrand",
                                    });
                                }
                                sum.add(w * v);
                            }
                            None => defect_w.add(w),
                        }
                    }
                }
            }
        }
    }
    Ok(LevelOutcome {
        sum: sum.value(),
        defect_weight: defect_w.value(),
        total_weight: total_w.value(),
    })
}

/// Integrates `integrand(point, unit outward normal)` over a patch.
pub fn surface_integral<R: Real, F>(
    patch: &SurfacePatch<R>,
    integrand: F,
    cfg: &QuadratureConfig<R>,
) -> Result<IntegralResult<R>>
where
    F: Fn(Vec3<R>, Vec3<R>) -> Option<R>,
{
    cfg.validate()?;
    let fine = surface_level(patch, &integrand, cfg)?;
    let coarse = surface_level(patch, &integrand, &cfg.coarse())?;
    let defect = if fine.total_weight > R::zero() {
        fine.defect_weight / fine.total_weight
    } else {
        R::zero()
    };
    if defect > cfg.defect_budget {
        return Err(Error::DefectExceeded {
            defect: defect.as_f64(),
            budget: cfg.defect_budget.as_f64(),
        });
    }
    Ok(IntegralResult {
        value: fine.sum,
        error_estimate: (fine.sum - coarse.sum).abs(),
        defect,
    })
}

fn surface_level<R: Real, F>(
    patch: &SurfacePatch<R>,
    integrand: &F,
    cfg: &QuadratureConfig<R>,
) -> Result<LevelOutcome<R>>
where
    F: Fn(Vec3<R>, Vec3<R>) -> Option<R>,
{
    use crate::geometry::PatchKind;
    // s-direction: radial for every patch except the curved side, where it
    // is the (already scaled) vertical coordinate.
    let (s_order, s_cells, s_kink) = match patch.kind {
        PatchKind::LateralCurved { .. } => (cfg.vertical_order, cfg.vertical_cells, false),
        _ => {
            let kink = patch
                .radial_range()
                .map(|(lo, _)| lo == R::zero())
                .unwrap_or(false);
            (cfg.radial_order, cfg.radial_cells, kink)
        }
    };
    let (t_order, t_cells) = match patch.kind {
        PatchKind::LateralFlat { .. } => (cfg.vertical_order, cfg.vertical_cells),
        _ => (cfg.angular_order, 1),
    };
    let (sn, sw) = gauss_legendre::<R>(s_order);
    let (tn, tw) = gauss_legendre::<R>(t_order);
    let s_cells = split_cells(R::zero(), R::one(), s_cells, s_kink);
    let t_cells = split_cells(R::zero(), R::one(), t_cells, false);

    let mut sum = KahanSum::new();
    let mut defect_w = KahanSum::new();
    let mut total_w = KahanSum::new();
    for &(sa, sb) in &s_cells {
        for (s, ws) in mapped_rule(&sn, &sw, sa, sb) {
            for &(ta, tb) in &t_cells {
                for (t, wt) in mapped_rule(&tn, &tw, ta, tb) {
                    let smp = patch.surface_param(s, t);
                    if !smp.area_element.is_finite() {
                        return Err(Error::NonFinite {
                            what: "surface area element",
                        });
                    }
                    let w = ws * wt * smp.area_element;
                    total_w.add(w);
                    match integrand(smp.point, smp.normal) {
                        Some(v) => {
                            if !v.is_finite() {
                                return Err(Error::NonFinite {
                                    what: "surface integrand",
                                });
                            }
                            sum.add(w * v);
                        }
                        None => defect_w.add(w),
                    }
                }
            }
        }
    }
    Ok(LevelOutcome {
        sum: sum.value(),
        defect_weight: defect_w.value(),
        total_weight: total_w.value(),
    })
}

/// ‖∇u‖_{L^p} over the domain, optionally fluid-restricted. `value` is the
/// norm itself; `error_estimate` is the two-level integral difference mapped
/// through the p-th root (one-sided).
///
/// Gradient failures at a node (possible only for finite-difference modes
/// pressed against the chart edge) are excluded and recorded as defect.
pub fn lp_gradient_norm<R: Real>(
    field: &VelocityField<R>,
    dom: &DomainSpec<R>,
    restrict_to_fluid: bool,
    p: R,
    cfg: &QuadratureConfig<R>,
) -> Result<IntegralResult<R>> {
    if !(p >= R::one()) {
        return Err(Error::InvalidParameter {
            name: "p",
            value: p.as_f64(),
        });
    }
    let two = cst::<R>(2.0);
    let half_p = p * cst::<R>(0.5);
    let integrand = |x: Vec3<R>| -> Option<R> {
        let j = field.gradient(x).ok()?;
        let s = j.frobenius_sq();
        Some(if p == two { s } else { s.powf(half_p) })
    };
    let integral = volume_integral(dom, restrict_to_fluid, integrand, cfg)?;
    root_result(integral, R::one() / p)
}

/// ‖∇²u‖_{L²} over the fluid part of the domain. The Hessian is only
/// defined where its stencil fits inside the fluid, so the integral is
/// always fluid-restricted; clipped stencils are excluded and show up in
/// `defect`.
pub fn l2_hessian_norm<R: Real>(
    field: &VelocityField<R>,
    dom: &DomainSpec<R>,
    cfg: &QuadratureConfig<R>,
) -> Result<IntegralResult<R>> {
    let integrand = |x: Vec3<R>| -> Option<R> {
        let h = field.hessian_norm(x).ok()?;
        Some(h * h)
    };
    let integral = volume_integral(dom, true, integrand, cfg)?;
    root_result(integral, cst::<R>(0.5))
}

fn root_result<R: Real>(integral: IntegralResult<R>, exponent: R) -> Result<IntegralResult<R>> {
    let base = integral.value.max(R::zero());
    let value = base.powf(exponent);
    let bumped = (base + integral.error_estimate).powf(exponent);
    Ok(IntegralResult {
        value,
        error_estimate: bumped - value,
        defect: integral.defect,
    })
}

/// Planar integral over the full disc |x′| < ρ; used by the moment
/// integrals. Same two-level and kink-splitting machinery.
pub fn planar_disc_integral<R: Real, F>(
    rho: R,
    integrand: F,
    cfg: &QuadratureConfig<R>,
) -> Result<IntegralResult<R>>
where
    F: Fn(R, R) -> R,
{
    cfg.validate()?;
    if !(rho > R::zero()) {
        return Err(Error::InvalidParameter {
            name: "rho",
            value: rho.as_f64(),
        });
    }
    let level = |c: &QuadratureConfig<R>| -> Result<R> {
        let (rn, rw) = gauss_legendre::<R>(c.radial_order);
        let (an, aw) = gauss_legendre::<R>(c.angular_order);
        let r_cells = split_cells(R::zero(), rho, c.radial_cells, true);
        let two_pi = cst::<R>(2.0) * R::PI();
        let theta_rule = mapped_rule(&an, &aw, R::zero(), two_pi);
        let mut sum = KahanSum::new();
        for &(ra, rb) in &r_cells {
            for (r, wr) in mapped_rule(&rn, &rw, ra, rb) {
                for &(theta, wt) in &theta_rule {
                    let v = integrand(r * theta.cos(), r * theta.sin());
                    if !v.is_finite() {
                        return Err(Error::NonFinite {
                            what: "planar integrand",
                        });
                    }
                    sum.add(r * wr * wt * v);
                }
            }
        }
        Ok(sum.value())
    };
    let fine = level(cfg)?;
    let coarse = level(&cfg.coarse())?;
    Ok(IntegralResult {
        value: fine,
        error_estimate: (fine - coarse).abs(),
        defect: R::zero(),
    })
}
