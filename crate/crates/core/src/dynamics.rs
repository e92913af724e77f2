//! Time-dependent layer: the gap-derivative identity, differential-inequality
//! envelopes for the gap distance, the blow-up functional partial integrals,
//! and the power-law collision family with its energy-class admissibility.

use crate::error::{Error, Result};
use crate::fields::RigidMotion;
use crate::scalar::{cst, Real};

/// Axial spin history: constant, or tabulated samples with linear
/// interpolation (clamped outside the table).
#[derive(Debug, Clone, PartialEq)]
pub enum Omega3Spec<R> {
    Constant(R),
    Tabulated { times: Vec<R>, values: Vec<R> },
}

impl<R: Real> Omega3Spec<R> {
    pub fn tabulated(times: Vec<R>, values: Vec<R>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::LengthMismatch {
                lhs: times.len(),
                rhs: values.len(),
            });
        }
        if times.len() < 2 {
            return Err(Error::InsufficientPoints {
                points: times.len(),
                decades: 0.0,
            });
        }
        for w in times.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidParameter {
                    name: "times (must be strictly increasing)",
                    value: w[1].as_f64(),
                });
            }
        }
        Ok(Self::Tabulated { times, values })
    }

    pub fn eval(&self, t: R) -> R {
        match self {
            Self::Constant(v) => *v,
            Self::Tabulated { times, values } => {
                if t <= times[0] {
                    return values[0];
                }
                let last = times.len() - 1;
                if t >= times[last] {
                    return values[last];
                }
                let mut i = 0;
                while times[i + 1] < t {
                    i += 1;
                }
                let w = (t - times[i]) / (times[i + 1] - times[i]);
                values[i] * (R::one() - w) + values[i + 1] * w
            }
        }
    }

    /// sup |ω₃| over the history.
    pub fn bound(&self) -> R {
        match self {
            Self::Constant(v) => v.abs(),
            Self::Tabulated { values, .. } => values
                .iter()
                .fold(R::zero(), |acc, v| acc.max(v.abs())),
        }
    }
}

/// Power-law closing gap h(t) = (T−t)^θ with θ ≥ 1, spinning with ω₃(t).
#[derive(Debug, Clone, PartialEq)]
pub struct CollisionFamily<R> {
    pub theta: R,
    pub big_t: R,
    pub alpha: R,
    pub omega3: Omega3Spec<R>,
}

impl<R: Real> CollisionFamily<R> {
    pub fn new(theta: R, big_t: R, alpha: R, omega3: Omega3Spec<R>) -> Result<Self> {
        if !(theta >= R::one()) {
            return Err(Error::InvalidParameter {
                name: "theta",
                value: theta.as_f64(),
            });
        }
        if !(big_t > R::zero()) {
            return Err(Error::InvalidParameter {
                name: "T",
                value: big_t.as_f64(),
            });
        }
        if !(alpha > R::zero() && alpha <= R::one()) {
            return Err(Error::AlphaOutOfRange {
                alpha: alpha.as_f64(),
                lower: 0.0,
                upper: 1.0,
            });
        }
        Ok(Self {
            theta,
            big_t,
            alpha,
            omega3,
        })
    }

    /// (T−t)^θ, clamped to 0 at and past the collision time.
    pub fn h(&self, t: R) -> R {
        let rem = (self.big_t - t).max(R::zero());
        rem.powf(self.theta)
    }

    /// ḣ = −θ(T−t)^{θ−1} on [0, T).
    pub fn hdot(&self, t: R) -> R {
        let rem = (self.big_t - t).max(R::zero());
        -self.theta * rem.powf(self.theta - R::one())
    }

    /// |ḣ(T⁻)|: θ = 1 collides with unit speed, θ > 1 with zero speed.
    pub fn collision_speed(&self) -> R {
        if self.theta == R::one() {
            R::one()
        } else {
            R::zero()
        }
    }

    /// The rigid motion realizing the family's gap rate at time t.
    pub fn motion(&self, t: R) -> RigidMotion<R> {
        RigidMotion::new(
            crate::linalg::Vec3::new(R::zero(), R::zero(), self.hdot(t)),
            crate::linalg::Vec3::new(R::zero(), R::zero(), self.omega3.eval(t)),
            crate::linalg::Vec3::zero(),
        )
    }
}

/// |dh/dt| = |u_P · e₃| = |u_{P3}|: the gap changes only through the normal
/// contact velocity. Independent of the motion's reference point.
pub fn gap_derivative_identity<R: Real>(m: &RigidMotion<R>) -> R {
    m.u_p3(R::zero()).abs()
}

/// Adaptive step control for the envelope integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl<R> {
    pub rel_tol: R,
    pub abs_tol: R,
    pub init_step: Option<R>,
    pub max_steps: usize,
}

impl<R: Real> Default for StepControl<R> {
    fn default() -> Self {
        Self {
            rel_tol: cst::<R>(1e-10),
            abs_tol: R::zero(),
            init_step: None,
            max_steps: 1_000_000,
        }
    }
}

/// Positivity floor for the lower envelope, as a fraction of h₀.
pub const ENVELOPE_FLOOR_FACTOR: f64 = 1e-14;

/// Monotone gap envelopes: lower solves ḣ = −bound(t,h), upper ḣ = +bound(t,h).
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope<R> {
    pub times: Vec<R>,
    pub lower: Vec<R>,
    pub upper: Vec<R>,
    /// Bracket (t_before, t_at) around the lower envelope crossing the
    /// positivity floor; integration stops there.
    pub floor_event: Option<(R, R)>,
}

// Cash-Karp embedded 4(5) tableau.
const CK_C: [f64; 6] = [0.0, 0.2, 0.3, 0.6, 1.0, 0.875];
const CK_A: [[f64; 5]; 5] = [
    [0.2, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0],
    [0.3, -0.9, 1.2, 0.0, 0.0],
    [-11.0 / 54.0, 2.5, -70.0 / 27.0, 35.0 / 27.0, 0.0],
    [
        1631.0 / 55296.0,
        175.0 / 512.0,
        575.0 / 13824.0,
        44275.0 / 110592.0,
        253.0 / 4096.0,
    ],
];
const CK_B5: [f64; 6] = [
    37.0 / 378.0,
    0.0,
    250.0 / 621.0,
    125.0 / 594.0,
    0.0,
    512.0 / 1771.0,
];
const CK_B4: [f64; 6] = [
    2825.0 / 27648.0,
    0.0,
    18575.0 / 48384.0,
    13525.0 / 55296.0,
    277.0 / 14336.0,
    0.25,
];

/// One embedded 4(5) step for the two-component envelope state; returns
/// (5th-order, 4th-order) results, NaN-filled if a stage derivative fails.
fn rk_ck_step<R: Real>(
    deriv: &impl Fn(R, [R; 2]) -> [R; 2],
    t: R,
    y: [R; 2],
    dt: R,
) -> ([R; 2], [R; 2]) {
    let mut k = [[R::zero(); 2]; 6];
    k[0] = deriv(t, y);
    for s in 1..6 {
        let mut ys = y;
        for (j, kj) in k.iter().enumerate().take(s) {
            let a = cst::<R>(CK_A[s - 1][j]);
            ys[0] = ys[0] + dt * a * kj[0];
            ys[1] = ys[1] + dt * a * kj[1];
        }
        // keep stage states physical; the lower envelope may otherwise
        // probe negative gaps mid-step
        ys[0] = ys[0].max(R::zero());
        k[s] = deriv(t + cst::<R>(CK_C[s]) * dt, ys);
        if !(k[s][0].is_finite() && k[s][1].is_finite()) {
            return ([R::nan(); 2], [R::nan(); 2]);
        }
    }
    let mut y5 = y;
    let mut y4 = y;
    for (j, kj) in k.iter().enumerate() {
        let b5 = cst::<R>(CK_B5[j]);
        let b4 = cst::<R>(CK_B4[j]);
        y5[0] = y5[0] + dt * b5 * kj[0];
        y5[1] = y5[1] + dt * b5 * kj[1];
        y4[0] = y4[0] + dt * b4 * kj[0];
        y4[1] = y4[1] + dt * b4 * kj[1];
    }
    (y5, y4)
}

/// Integrates the two-sided gap envelope from h₀ over [0, tEnd] with an
/// embedded 4(5) pair. `bound` is treated as a magnitude: the upper envelope
/// grows at +|bound|, the lower shrinks at −|bound|. Stops early (recording
/// `floor_event`) if the lower envelope reaches the positivity floor.
pub fn envelope_integrate<R: Real, F>(
    h0: R,
    t_end: R,
    bound: F,
    ctl: &StepControl<R>,
) -> Result<Envelope<R>>
where
    F: Fn(R, R) -> R,
{
    if !(h0 > R::zero()) {
        return Err(Error::InvalidParameter {
            name: "h0",
            value: h0.as_f64(),
        });
    }
    if !(t_end > R::zero()) {
        return Err(Error::InvalidParameter {
            name: "tEnd",
            value: t_end.as_f64(),
        });
    }
    let floor = cst::<R>(ENVELOPE_FLOOR_FACTOR) * h0;
    let min_step = cst::<R>(1e-14) * t_end.max(R::one());

    let deriv = |t: R, y: [R; 2]| -> [R; 2] {
        [-bound(t, y[0]).abs(), bound(t, y[1]).abs()]
    };

    let mut t = R::zero();
    let mut y = [h0, h0];
    let mut dt = ctl.init_step.unwrap_or(t_end / cst::<R>(100.0));
    let mut out = Envelope {
        times: vec![t],
        lower: vec![y[0]],
        upper: vec![y[1]],
        floor_event: None,
    };

    let mut steps = 0usize;
    while t < t_end {
        if steps >= ctl.max_steps {
            return Err(Error::InvalidParameter {
                name: "maxSteps exhausted",
                value: ctl.max_steps as f64,
            });
        }
        steps += 1;
        dt = dt.min(t_end - t);

        let (y5, y4) = rk_ck_step(&deriv, t, y, dt);

        let err = if y5[0].is_finite() && y5[1].is_finite() {
            let mut e = R::zero();
            for i in 0..2 {
                let scale = ctl.abs_tol + ctl.rel_tol * y[i].abs().max(y5[i].abs());
                let d = (y5[i] - y4[i]).abs();
                if scale > R::zero() {
                    e = e.max(d / scale);
                } else if d > R::zero() {
                    e = R::infinity();
                }
            }
            e
        } else {
            R::infinity()
        };

        if err <= R::one() && y5[0].is_finite() && y5[1].is_finite() {
            if y5[0] <= floor {
                // localize the floor crossing inside this step by bisection
                let mut lo_dt = R::zero();
                let mut hi_dt = dt;
                let mut y_lo = y;
                let mut y_hit = y5;
                let tight = cst::<R>(1e-12) * t_end.max(R::one());
                for _ in 0..200 {
                    if hi_dt - lo_dt <= tight {
                        break;
                    }
                    let mid = (lo_dt + hi_dt) / cst::<R>(2.0);
                    let (ym, _) = rk_ck_step(&deriv, t + lo_dt, y_lo, mid - lo_dt);
                    if !(ym[0].is_finite() && ym[1].is_finite()) {
                        break;
                    }
                    if ym[0] <= floor {
                        hi_dt = mid;
                        y_hit = ym;
                    } else {
                        lo_dt = mid;
                        y_lo = ym;
                    }
                }
                out.times.push(t + hi_dt);
                out.lower.push(y_hit[0].max(R::zero()));
                out.upper.push(y_hit[1]);
                out.floor_event = Some((t + lo_dt, t + hi_dt));
                break;
            }
            t = t + dt;
            y = y5;
            y[0] = y[0].max(R::zero());
            out.times.push(t);
            out.lower.push(y[0]);
            out.upper.push(y[1]);
            let grow = if err > R::zero() {
                (cst::<R>(0.9) * err.powf(cst::<R>(-0.2))).min(cst::<R>(5.0))
            } else {
                cst::<R>(5.0)
            };
            dt = dt * grow.max(cst::<R>(0.2));
        } else {
            let shrink = if err.is_finite() {
                (cst::<R>(0.9) * err.powf(cst::<R>(-0.25))).max(cst::<R>(0.1))
            } else {
                cst::<R>(0.5)
            };
            dt = dt * shrink;
            if dt < min_step {
                return Err(Error::StepUnderflow {
                    step: dt.as_f64(),
                    floor: min_step.as_f64(),
                });
            }
        }
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_simpson_rec<R: Real>(
    f: &dyn Fn(R) -> Result<R>,
    a: R,
    m: R,
    b: R,
    fa: R,
    fm: R,
    fb: R,
    whole: R,
    eps: R,
    depth: usize,
) -> Result<R> {
    let six = cst::<R>(6.0);
    let lm = (a + m) / cst::<R>(2.0);
    let rm = (m + b) / cst::<R>(2.0);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = (m - a) / six * (fa + cst::<R>(4.0) * flm + fm);
    let right = (b - m) / six * (fm + cst::<R>(4.0) * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= cst::<R>(15.0) * eps {
        return Ok(left + right + delta / cst::<R>(15.0));
    }
    let half_eps = eps / cst::<R>(2.0);
    let l = adaptive_simpson_rec(f, a, lm, m, fa, flm, fm, left, half_eps, depth - 1)?;
    let r = adaptive_simpson_rec(f, m, rm, b, fm, frm, fb, right, half_eps, depth - 1)?;
    Ok(l + r)
}

/// Adaptive-Simpson integral of `f` over [a, b]; `f` may refuse a point by
/// returning an error.
pub fn adaptive_quadrature<R: Real, F>(f: F, a: R, b: R, rel_tol: R) -> Result<R>
where
    F: Fn(R) -> Result<R>,
{
    if !(b >= a) {
        return Err(Error::InvalidParameter {
            name: "interval (b < a)",
            value: b.as_f64(),
        });
    }
    if a == b {
        return Ok(R::zero());
    }
    let g = |x: R| -> Result<R> {
        let v = f(x)?;
        if !v.is_finite() {
            return Err(Error::NonFinite {
                what: "time integrand",
            });
        }
        Ok(v)
    };
    let m = (a + b) / cst::<R>(2.0);
    let (fa, fm, fb) = (g(a)?, g(m)?, g(b)?);
    let whole = (b - a) / cst::<R>(6.0) * (fa + cst::<R>(4.0) * fm + fb);
    let scale = whole.abs().max(R::one());
    adaptive_simpson_rec(&g, a, m, b, fa, fm, fb, whole, rel_tol * scale, 60)
}

/// Partial blow-up integral ∫₀^{upTo} h(τ)^{1/2}·hessNorm(τ) dτ.
pub fn blowup_functional<R: Real, Fh, Fm>(h_of: Fh, hess_of: Fm, up_to: R) -> Result<R>
where
    Fh: Fn(R) -> R,
    Fm: Fn(R) -> R,
{
    if !(up_to >= R::zero()) {
        return Err(Error::InvalidParameter {
            name: "upTo",
            value: up_to.as_f64(),
        });
    }
    if up_to == R::zero() {
        return Ok(R::zero());
    }
    let f = |tau: R| -> Result<R> {
        let h = h_of(tau);
        if !(h >= R::zero()) {
            return Err(Error::NonFinite {
                what: "gap history (negative h)",
            });
        }
        Ok(h.sqrt() * hess_of(tau))
    };
    adaptive_quadrature(f, R::zero(), up_to, cst::<R>(1e-11))
}

/// θ threshold (1+α)/(3−α) above which the power family satisfies the
/// finite-dissipation condition.
pub fn admissible_theta<R: Real>(alpha: R) -> Result<R> {
    if !(alpha > R::zero() && alpha <= R::one()) {
        return Err(Error::AlphaOutOfRange {
            alpha: alpha.as_f64(),
            lower: 0.0,
            upper: 1.0,
        });
    }
    Ok((R::one() + alpha) / (cst::<R>(3.0) - alpha))
}

/// Energy-class verdict for the power family.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityRecord<R> {
    pub energy_bounded: bool,
    pub grad_square_integrable: bool,
    pub threshold_theta: R,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyClassReport<R> {
    /// Closed-form exponent E of the dissipation integrand
    /// ḣ²h^{(1−3α)/(1+α)} = θ²(T−t)^E.
    pub exponent: R,
    /// Integral converges iff E > −1 (equivalently θ > thresholdTheta).
    pub convergent: bool,
    pub admissibility: AdmissibilityRecord<R>,
    pub collision_speed: R,
    pub omega3_bound: R,
    /// Relative cutoffs ε: partial integrals over [0, T(1−ε)].
    pub cutoffs: Vec<R>,
    pub partials: Vec<R>,
    /// Divergence is decided by the exponent; this flag records whether the
    /// numeric partials behave consistently (Cauchy differences shrinking
    /// when convergent, non-shrinking when divergent).
    pub numeric_consistent: bool,
}

/// Default relative cutoffs for the partial-integral illustration.
pub const ENERGY_CUTOFFS: [f64; 3] = [1e-2, 1e-3, 1e-4];

/// Evaluates the finite-dissipation condition for the power family: the
/// closed-form exponent decides convergence; numeric partial integrals with
/// shrinking cutoff illustrate it. Stated for α ∈ (1/3, 1].
pub fn energy_class_check<R: Real>(
    fam: &CollisionFamily<R>,
    rel_cutoffs: &[R],
) -> Result<EnergyClassReport<R>> {
    let alpha = fam.alpha;
    let third = R::one() / cst::<R>(3.0);
    if !(alpha > third && alpha <= R::one()) {
        return Err(Error::AlphaOutOfRange {
            alpha: alpha.as_f64(),
            lower: 1.0 / 3.0,
            upper: 1.0,
        });
    }
    if rel_cutoffs.len() < 2 {
        return Err(Error::InsufficientPoints {
            points: rel_cutoffs.len(),
            decades: 0.0,
        });
    }
    for w in rel_cutoffs.windows(2) {
        if !(w[1] < w[0]) {
            return Err(Error::InvalidParameter {
                name: "cutoffs (must be strictly decreasing)",
                value: w[1].as_f64(),
            });
        }
    }
    for &c in rel_cutoffs {
        if !(c > R::zero() && c < R::one()) {
            return Err(Error::InvalidParameter {
                name: "cutoff",
                value: c.as_f64(),
            });
        }
    }
    let one = R::one();
    let two = cst::<R>(2.0);
    let three = cst::<R>(3.0);
    let theta = fam.theta;
    let big_t = fam.big_t;
    let exponent = two * (theta - one) + theta * (one - three * alpha) / (one + alpha);
    let convergent = exponent > -one;
    let threshold_theta = admissible_theta(alpha)?;

    let integrand = |t: R| -> Result<R> {
        let rem = big_t - t;
        Ok(theta * theta * rem.powf(exponent))
    };
    let mut partials = Vec::with_capacity(rel_cutoffs.len());
    for &eps in rel_cutoffs {
        let upper = big_t * (one - eps);
        partials.push(adaptive_quadrature(integrand, R::zero(), upper, cst::<R>(1e-11))?);
    }
    let mut deltas = Vec::new();
    for i in 1..partials.len() {
        deltas.push(partials[i] - partials[i - 1]);
    }
    let numeric_consistent = if deltas.len() < 2 {
        true
    } else if convergent {
        deltas.windows(2).all(|w| w[1] < w[0])
    } else {
        deltas
            .windows(2)
            .all(|w| w[1] >= w[0] * cst::<R>(0.99))
    };

    Ok(EnergyClassReport {
        exponent,
        convergent,
        admissibility: AdmissibilityRecord {
            energy_bounded: convergent,
            grad_square_integrable: convergent,
            threshold_theta,
        },
        collision_speed: fam.collision_speed(),
        omega3_bound: fam.omega3.bound(),
        cutoffs: rel_cutoffs.to_vec(),
        partials,
        numeric_consistent,
    })
}

/// Assembled time series for one collision trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryReport<R> {
    pub times: Vec<R>,
    pub gaps: Vec<R>,
    /// |ḣ(t)| realized by the family motion at each grid time.
    pub bounds: Vec<R>,
    /// Blow-up partial integrals at each grid time, with the synthetic
    /// strong-norm history hessNorm = h^{−3/2}.
    pub blowup_partials: Vec<R>,
    pub admissibility: AdmissibilityRecord<R>,
}

/// Samples the family on a uniform grid of `n` points over [0, T(1−ε_min)]
/// and assembles the trajectory report. The blow-up partials use the
/// saturating history hessNorm = h^{−3/2}, for which the integrand is h^{−1}.
pub fn trajectory_report<R: Real>(
    fam: &CollisionFamily<R>,
    n: usize,
    rel_cutoffs: &[R],
) -> Result<TrajectoryReport<R>> {
    if n < 2 {
        return Err(Error::InsufficientPoints {
            points: n,
            decades: 0.0,
        });
    }
    let energy = energy_class_check(fam, rel_cutoffs)?;
    let eps_min = rel_cutoffs
        .iter()
        .fold(rel_cutoffs[0], |acc, &c| acc.min(c));
    let t_max = fam.big_t * (R::one() - eps_min);
    let nm1 = crate::scalar::cst_usize::<R>(n - 1);
    let mut times = Vec::with_capacity(n);
    let mut gaps = Vec::with_capacity(n);
    let mut bounds = Vec::with_capacity(n);
    let mut partials = Vec::with_capacity(n);
    let h_of = |t: R| fam.h(t);
    let hess_of = |t: R| fam.h(t).powf(cst::<R>(-1.5));
    for i in 0..n {
        let t = t_max * crate::scalar::cst_usize::<R>(i) / nm1;
        times.push(t);
        gaps.push(fam.h(t));
        bounds.push(gap_derivative_identity(&fam.motion(t)));
        partials.push(blowup_functional(h_of, hess_of, t)?);
    }
    Ok(TrajectoryReport {
        times,
        gaps,
        bounds,
        blowup_partials: partials,
        admissibility: energy.admissibility,
    })
}
