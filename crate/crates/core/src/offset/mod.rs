//! Bertrand offsets: ruled surfaces whose dual Darboux frames share the
//! central tangent `t̃` with a base surface.
//!
//! The offset of a base surface by the constant dual angle `θ̄ = θ + εθ*` has
//! director `e₁ = cos θ e − sin θ g` and base curve `c₁ = c + θ* t`. It is
//! built as an ordinary [`RuledSurface`] over the base's construction
//! parameter, so a base ruling and its partner always carry the same `u`.
//! Everything the offset surface reports about itself (frame, invariants,
//! arc length) is recomputed from those rulings; the closed forms in
//! [`invariant_relations`] are predictions checked against it.

pub mod report;

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use crate::dual::DualScalar;
use crate::dual_vector::{DualAngle, DualVector3};
use crate::error::{Error, Result};
use crate::jet::JetVec3;
use crate::surface::{dual_curvature, DarbouxState, RuledSurface, RulingSource};

pub use report::{full_report, OffsetReport, Relation, ReportRow};

/// Threshold on `|θ|` and `|θ − π/2|` for classifying an offset.
pub const KIND_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OffsetKind {
    /// `θ = 0`
    Oriented,
    /// `θ = π/2`
    Right,
    General,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffsetSpec {
    theta: f64,
    theta_star: f64,
    kind: OffsetKind,
}

impl OffsetSpec {
    /// `θ` in radians, restricted to `[0, π]`; `θ*` is a signed length.
    pub fn new(theta: f64, theta_star: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) || !theta_star.is_finite() {
            return Err(Error::InvalidOffsetAngle { theta });
        }
        let kind = if theta.abs() <= KIND_TOLERANCE {
            OffsetKind::Oriented
        } else if (theta - FRAC_PI_2).abs() <= KIND_TOLERANCE {
            OffsetKind::Right
        } else {
            OffsetKind::General
        };
        Ok(Self {
            theta,
            theta_star,
            kind,
        })
    }

    pub fn from_degrees(theta_deg: f64, theta_star: f64) -> Result<Self> {
        Self::new(theta_deg.to_radians(), theta_star)
            .map_err(|_| Error::InvalidOffsetAngle { theta: theta_deg })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn theta_star(&self) -> f64 {
        self.theta_star
    }

    pub fn kind(&self) -> OffsetKind {
        self.kind
    }

    pub fn dual_angle(&self) -> DualScalar {
        DualScalar::new(self.theta, self.theta_star)
    }
}

/// Rulings of the offset, generated from the base in its construction parameter.
#[derive(Debug, Clone)]
pub struct OffsetRuling {
    base: RuledSurface,
    theta: f64,
    theta_star: f64,
}

impl OffsetRuling {
    pub fn new(base: RuledSurface, theta: f64, theta_star: f64) -> Self {
        Self {
            base,
            theta,
            theta_star,
        }
    }

    pub fn base(&self) -> &RuledSurface {
        &self.base
    }
}

impl RulingSource for OffsetRuling {
    fn domain(&self) -> (f64, f64) {
        self.base.u_range()
    }

    fn ruling_jets(&self, u: f64, order: usize) -> Result<(JetVec3, JetVec3)> {
        let (c, e) = self.base.native_jets(u, order + 1)?;
        let e_u = e.differentiate();
        let t = e_u.scale_jet(&e_u.norm()?.recip()?);
        let e = e.truncate(order);
        let g = e.cross(&t);
        let (sin, cos) = self.theta.sin_cos();
        let e1 = e.scale(cos).sub(&g.scale(sin));
        let c1 = c.truncate(order).add(&t.scale(self.theta_star));
        Ok((c1, e1))
    }
}

/// Offset by an arbitrary dual angle, without range or monotonicity checks.
pub fn offset_by_dual_angle(
    base: &RuledSurface,
    theta: f64,
    theta_star: f64,
) -> Result<RuledSurface> {
    let source = OffsetRuling::new(base.clone(), theta, theta_star);
    RuledSurface::from_source(Arc::new(source), *base.tolerances())
}

/// Smallest `cos θ + γ sin θ` over a uniform grid, with its arc length.
pub fn min_arc_ratio(base: &RuledSurface, theta: f64) -> Result<(f64, f64)> {
    let (a, b) = base.u_range();
    let n = 2 * base.tolerances().arc_panels.max(1);
    let (sin, cos) = theta.sin_cos();
    let mut worst = (f64::INFINITY, 0.0);
    for i in 0..=n {
        let u = a + (b - a) * i as f64 / n as f64;
        let st = base.frame_at_u(u)?;
        let ratio = cos + st.gamma * sin;
        if ratio < worst.0 {
            worst = (ratio, st.s);
        }
    }
    Ok(worst)
}

/// Builds the Bertrand offset of `base` described by `spec`.
///
/// Fails with `DegenerateOffset` where `cos θ + γ sin θ` drops to the
/// monotonicity tolerance, since the offset indicatrix would stall or turn
/// back there.
pub fn make_offset(base: &RuledSurface, spec: &OffsetSpec) -> Result<RuledSurface> {
    let (ratio, s) = min_arc_ratio(base, spec.theta)?;
    if ratio <= base.tolerances().monotone {
        return Err(Error::DegenerateOffset { s, value: ratio });
    }
    offset_by_dual_angle(base, spec.theta, spec.theta_star)
}

/// Worst mismatch of the central tangents of a base/offset pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerpendicularResidual {
    /// `max ‖t − t₁‖`
    pub tangent: f64,
    /// `max ‖c × t − c₁ × t₁‖`
    pub moment: f64,
}

impl PerpendicularResidual {
    pub const TOLERANCE: f64 = 1e-7;

    pub fn holds(&self) -> bool {
        self.tangent < Self::TOLERANCE && self.moment < Self::TOLERANCE
    }
}

/// Compares `t̃(s)` with `t̃₁(align(s))` on `samples` base rulings.
pub fn verify_common_perpendicular_with<F>(
    base: &RuledSurface,
    offset: &RuledSurface,
    samples: usize,
    align: F,
) -> Result<PerpendicularResidual>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut out = PerpendicularResidual {
        tangent: 0.0,
        moment: 0.0,
    };
    for s in base.sample_parameters(samples) {
        let st = base.frame_at(s)?;
        let s1 = align(s)?.clamp(0.0, offset.length());
        let st1 = offset.frame_at(s1)?;
        let (t, t1) = (st.dual_t(), st1.dual_t());
        out.tangent = out.tangent.max((t.real - t1.real).norm());
        out.moment = out.moment.max((t.dual - t1.dual).norm());
    }
    Ok(out)
}

/// Pairs rulings by their shared construction parameter.
pub fn verify_common_perpendicular(
    base: &RuledSurface,
    offset: &RuledSurface,
    samples: usize,
) -> Result<PerpendicularResidual> {
    verify_common_perpendicular_with(base, offset, samples, |s| offset.s_of_u(base.u_of_s(s)?))
}

/// Dual angle from each sampled base ruling to its offset partner.
pub fn dual_angle_profile(
    base: &RuledSurface,
    offset: &RuledSurface,
    samples: usize,
) -> Result<Vec<DualAngle>> {
    base.sample_parameters(samples)
        .into_iter()
        .map(|s| {
            let u = base.u_of_s(s)?;
            let a = line_at_u(base, u)?;
            let b = line_at_u(offset, u)?;
            a.angle_to(&b)
        })
        .collect()
}

fn line_at_u(surface: &RuledSurface, u: f64) -> Result<DualVector3> {
    let (c, e) = surface.native_jets(u, 0)?;
    let (c, e) = (c.value(), e.value());
    Ok(DualVector3::new(e, c.cross(&e)))
}

/// `max ‖c_off(u) − (c(u) + θ* t(u))‖`: distance of the offset's own
/// striction curve from the shifted base striction curve.
pub fn striction_deviation(
    base: &RuledSurface,
    offset: &RuledSurface,
    theta_star: f64,
    samples: usize,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for s in base.sample_parameters(samples) {
        let u = base.u_of_s(s)?;
        let st = base.frame_at_u(u)?;
        let (c1, _) = offset.native_jets(u, 0)?;
        worst = worst.max((c1.value() - (st.c + st.t * theta_star)).norm());
    }
    Ok(worst)
}

/// `ds̄₁/ds̄ = cos θ̄ + γ̄ sin θ̄`; the real part is `ds₁/ds`.
pub fn arc_length_ratio(state: &DarbouxState, spec: &OffsetSpec) -> DualScalar {
    let angle = spec.dual_angle();
    angle.cos() + state.gamma_dual * angle.sin()
}

/// Both sides of the arc-length identities at one base ruling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcLengthCheck {
    pub s: f64,
    /// Offset arc length `s₁` measured on the offset surface.
    pub s1: f64,
    /// `s cos θ + (∫γ ds) sin θ`.
    pub s1_predicted: f64,
    /// `∫Δ₁ ds₁` measured on the offset surface.
    pub dual_length: f64,
    /// `(∫(γΔ + γ*) ds) sin θ + (∫Δ ds) cos θ + θ*((∫γ ds) cos θ − s sin θ)`.
    pub dual_length_predicted: f64,
    /// `(∫γ* ds) sin θ + θ*((∫γ ds) cos θ − s sin θ)`, which must vanish
    /// along a developable offset of a developable base.
    pub developable_criterion: f64,
}

/// Running integrals of the base invariants entering the arc-length identities.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct BaseIntegrals {
    pub gamma: f64,
    pub gamma_delta_plus_dual: f64,
    pub dist_param: f64,
    pub gamma_dual: f64,
}

impl BaseIntegrals {
    pub(crate) fn over(base: &RuledSurface, u_a: f64, u_b: f64) -> Result<Self> {
        Ok(Self {
            gamma: base.integrate_over_u(u_a, u_b, |st| st.gamma)?,
            gamma_delta_plus_dual: base
                .integrate_over_u(u_a, u_b, |st| st.gamma * st.dist_param + st.gamma_dual.dual)?,
            dist_param: base.integrate_over_u(u_a, u_b, |st| st.dist_param)?,
            gamma_dual: base.integrate_over_u(u_a, u_b, |st| st.gamma_dual.dual)?,
        })
    }

    pub(crate) fn add(&self, rhs: &Self) -> Self {
        Self {
            gamma: self.gamma + rhs.gamma,
            gamma_delta_plus_dual: self.gamma_delta_plus_dual + rhs.gamma_delta_plus_dual,
            dist_param: self.dist_param + rhs.dist_param,
            gamma_dual: self.gamma_dual + rhs.gamma_dual,
        }
    }

    pub(crate) fn check(
        &self,
        s: f64,
        s1: f64,
        dual_length: f64,
        spec: &OffsetSpec,
    ) -> ArcLengthCheck {
        let (sin, cos) = spec.theta.sin_cos();
        let shift = spec.theta_star * (self.gamma * cos - s * sin);
        ArcLengthCheck {
            s,
            s1,
            s1_predicted: s * cos + self.gamma * sin,
            dual_length,
            dual_length_predicted: self.gamma_delta_plus_dual * sin + self.dist_param * cos + shift,
            developable_criterion: self.gamma_dual * sin + shift,
        }
    }
}

/// Checks the arc-length identities between `base` and its offset up to base arc length `s`.
pub fn verify_arc_length_relation(
    base: &RuledSurface,
    offset: &RuledSurface,
    spec: &OffsetSpec,
    s: f64,
) -> Result<ArcLengthCheck> {
    let (a, _) = base.u_range();
    let u = base.u_of_s(s)?;
    let integrals = BaseIntegrals::over(base, a, u)?;
    let s1 = offset.s_of_u(u)?;
    let dual_length = offset.integrate_over_u(a, u, |st| st.dist_param)?;
    Ok(integrals.check(s, s1, dual_length, spec))
}

/// Closed-form offset invariants predicted from one base state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictedInvariants {
    /// `ds₁/ds = cos θ + γ sin θ`.
    pub arc_ratio: f64,
    pub gamma1: f64,
    pub delta1: f64,
    pub dist_param1: f64,
    /// `γ₁ + ε(δ₁ − γ₁Δ₁)` from the predicted real invariants.
    pub gamma_dual1: DualScalar,
    /// The expanded closed form of `γ̄₁` in base invariants, kept as a cross-check.
    pub gamma_dual1_expanded: DualScalar,
    /// `A = (ds/ds₁)(γ cos θ − sin θ)`.
    pub a: f64,
    /// `B = A · (dual part of γ̄₁)`.
    pub b: f64,
    /// `R̄₁ = (1 + A²)^{-1/2} − εB(1 + A²)^{-3/2}`.
    pub r_bar1: DualScalar,
    /// `cos ρ̄₁ = A(1 + A²)^{-1/2} + ε(B/A)(1 + A²)^{-3/2}`, with `B/A` taken
    /// from the bracket so it stays finite at `A = 0`.
    pub cos_rho_bar1: DualScalar,
    /// `cot ρ₁ = (γ cos θ − sin θ)/(cos θ + γ sin θ)`.
    pub cot_rho1: f64,
}

/// Predicts the offset invariants at the partner of `state`.
pub fn invariant_relations(state: &DarbouxState, spec: &OffsetSpec) -> Result<PredictedInvariants> {
    let (sin, cos) = spec.theta.sin_cos();
    let th = spec.theta_star;
    let (gamma, delta, dp) = (state.gamma, state.delta, state.dist_param);
    let ratio = cos + gamma * sin;
    if ratio.abs() < f64::EPSILON {
        return Err(Error::DegenerateOffset {
            s: state.s,
            value: ratio,
        });
    }
    let d = 1.0 / ratio;
    let turn = gamma * cos - sin;
    let gamma1 = turn * d;
    let delta1 = (delta * cos - dp * sin) * d - th;
    let dist_param1 = (dp * cos + delta * sin + th * turn) * d;
    let gamma_dual1 = DualScalar::new(gamma1, delta1 - gamma1 * dist_param1);

    let expanded_dual = d
        * ((d * cos * (sin - gamma * cos) - sin) * dp + (cos - d * sin * turn) * delta
            - (d * turn * turn + ratio) * th);
    let gamma_dual1_expanded = DualScalar::new(d * turn, expanded_dual);

    let a = d * turn;
    let bracket = d * (-(sin + a * cos) * dp + (cos - a * sin) * delta) - (1.0 + a * a) * th;
    let b = a * bracket;
    let q = 1.0 + a * a;
    let r_bar1 = DualScalar::new(q.powf(-0.5), -b * q.powf(-1.5));
    let cos_rho_bar1 = DualScalar::new(a * q.powf(-0.5), bracket * q.powf(-1.5));

    Ok(PredictedInvariants {
        arc_ratio: ratio,
        gamma1,
        delta1,
        dist_param1,
        gamma_dual1,
        gamma_dual1_expanded,
        a,
        b,
        r_bar1,
        cos_rho_bar1,
        cot_rho1: turn / ratio,
    })
}

/// `θ*` recovered from the base state and a measured `δ₁`.
pub fn offset_distance(state: &DarbouxState, theta: f64, delta1: f64) -> f64 {
    let (sin, cos) = theta.sin_cos();
    (state.delta * cos - state.dist_param * sin) / (cos + state.gamma * sin) - delta1
}

/// `R̄₁` from a measured `γ̄₁`, for comparison with the `A`, `B` form.
pub fn dual_curvature_of(gamma_dual: DualScalar) -> Result<DualScalar> {
    dual_curvature(gamma_dual)
}

/// Offset angle from the conical curvatures of a pair, in `[0, π)`.
///
/// `θ = arctan((γ − γ₁)/(1 + γγ₁))`, continued to `π/2` where `1 + γγ₁ = 0`.
pub fn offset_angle_from_curvatures(gamma: f64, gamma1: f64) -> f64 {
    let den = 1.0 + gamma * gamma1;
    if den == 0.0 {
        return FRAC_PI_2;
    }
    let theta = ((gamma - gamma1) / den).atan();
    if theta < 0.0 {
        theta + PI
    } else {
        theta
    }
}

/// The `θ*` that makes the offset of a developable base developable at `state`:
/// `θ* = δ sin θ/(sin θ − γ cos θ)`.
pub fn developable_offset_angle(state: &DarbouxState, theta: f64, tolerance: f64) -> Result<f64> {
    if state.dist_param.abs() > tolerance {
        return Err(Error::NotDevelopableBase {
            delta: state.dist_param,
        });
    }
    let (sin, cos) = theta.sin_cos();
    let den = sin - state.gamma * cos;
    if den.abs() <= 1e-12 {
        return Err(Error::NoSolution { value: den });
    }
    Ok(state.delta * sin / den)
}
