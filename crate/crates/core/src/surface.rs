//! Ruled surfaces `φ(s, v) = c(s) + v e(s)` as curves on the dual unit sphere.
//!
//! A surface is built from any [`RulingSource`], a family of lines given by a
//! base curve `p(u)` and a director `e(u)` in an arbitrary regular parameter.
//! Construction normalises the director, replaces the base curve by the
//! striction curve and tabulates the indicatrix arc length `s`. All
//! invariants are then evaluated lazily at query points from exact jets
//! re-expanded in `s`, so no finite differences enter the geometry.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::curve::{director_speed, striction_jets, ArcLengthMap, ParametricCurve};
use crate::dual::DualScalar;
use crate::dual_vector::{DualVector3, Vec3};
use crate::error::{Error, Result};
use crate::jet::JetVec3;
use crate::quadrature::adaptive_simpson;
use crate::tolerance::Tolerances;

/// A one-parameter family of oriented lines.
pub trait RulingSource: Send + Sync + fmt::Debug {
    fn domain(&self) -> (f64, f64);

    /// Jets of a point `p(u)` on the line and of a (not necessarily unit)
    /// direction `e(u)`, both of the requested order.
    fn ruling_jets(&self, u: f64, order: usize) -> Result<(JetVec3, JetVec3)>;
}

/// Rulings given by two expression-defined curves.
#[derive(Debug, Clone)]
pub struct ExprRuling {
    pub base: ParametricCurve,
    pub director: ParametricCurve,
}

impl RulingSource for ExprRuling {
    fn domain(&self) -> (f64, f64) {
        self.base.domain()
    }

    fn ruling_jets(&self, u: f64, order: usize) -> Result<(JetVec3, JetVec3)> {
        Ok((
            self.base.eval_jet(u, order)?,
            self.director.eval_jet(u, order)?,
        ))
    }
}

/// Snapshot of the (dual) Darboux frame and invariants at one ruling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DarbouxState {
    /// Indicatrix arc length (NaN when evaluated without it).
    pub s: f64,
    /// Construction parameter of the same ruling.
    pub u: f64,
    /// Point of the striction curve.
    pub c: Vec3,
    /// `dc/ds`.
    pub c_prime: Vec3,
    pub e: Vec3,
    /// `t = e'`.
    pub t: Vec3,
    /// `g = e × t`.
    pub g: Vec3,
    /// `t' = e''`.
    pub t_prime: Vec3,
    /// Conical curvature `γ = det(e, e', e'')`.
    pub gamma: f64,
    /// `δ = ⟨c', e⟩`.
    pub delta: f64,
    /// Distribution parameter `Δ = det(c', e, t)`.
    pub dist_param: f64,
    /// `γ̄ = γ + ε(δ − γΔ)`.
    pub gamma_dual: DualScalar,
    /// Dual curvature `R̄ = 1/√(1 + γ̄²)`.
    pub r_bar: DualScalar,
    /// Dual spherical radius of curvature with `sin ρ̄ = R̄`, `cos ρ̄ = γ̄R̄`.
    pub rho_bar: DualScalar,
}

fn det(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    a.dot(&b.cross(c))
}

/// `R̄ = 1/√(1 + γ̄²)`.
pub fn dual_curvature(gamma_dual: DualScalar) -> Result<DualScalar> {
    (DualScalar::ONE + gamma_dual * gamma_dual).sqrt()?.recip()
}

/// `ρ̄` from `sin ρ̄ = R̄`, `cos ρ̄ = γ̄R̄`; the real part lies in `(0, π)`.
pub fn spherical_radius(gamma_dual: DualScalar) -> Result<DualScalar> {
    let r = dual_curvature(gamma_dual)?;
    DualScalar::atan2(r, gamma_dual * r)
}

impl DarbouxState {
    fn from_arc_jets(s: f64, u: f64, c: &JetVec3, e: &JetVec3) -> Result<Self> {
        let e0 = e.value();
        let t = e.derivative(1);
        let t_prime = e.derivative(2);
        let c0 = c.value();
        let c_prime = c.derivative(1);
        let g = e0.cross(&t);
        let gamma = det(&e0, &t, &t_prime);
        let delta = c_prime.dot(&e0);
        let dist_param = det(&c_prime, &e0, &t);
        let gamma_dual = DualScalar::new(gamma, delta - gamma * dist_param);
        Ok(Self {
            s,
            u,
            c: c0,
            c_prime,
            e: e0,
            t,
            g,
            t_prime,
            gamma,
            delta,
            dist_param,
            gamma_dual,
            r_bar: dual_curvature(gamma_dual)?,
            rho_bar: spherical_radius(gamma_dual)?,
        })
    }

    /// `ẽ = e + ε c × e`.
    pub fn dual_e(&self) -> DualVector3 {
        DualVector3::new(self.e, self.c.cross(&self.e))
    }

    pub fn dual_t(&self) -> DualVector3 {
        DualVector3::new(self.t, self.c.cross(&self.t))
    }

    pub fn dual_g(&self) -> DualVector3 {
        DualVector3::new(self.g, self.c.cross(&self.g))
    }

    pub fn dual_curvature(&self) -> DualScalar {
        self.r_bar
    }

    pub fn spherical_radius(&self) -> DualScalar {
        self.rho_bar
    }

    /// Dual Darboux vector `d̃ = γ̄ẽ + g̃`.
    pub fn darboux_vector(&self) -> DualVector3 {
        self.dual_e().scale(self.gamma_dual) + self.dual_g()
    }

    /// `d̃₀ = R̄(γ̄ẽ + g̃)`, the unit vector along the Darboux vector.
    pub fn unit_darboux_vector(&self) -> DualVector3 {
        self.darboux_vector().scale(self.r_bar)
    }

    /// Largest deviation of `{e, t, g}` from an orthonormal frame.
    pub fn orthonormality_residual(&self) -> f64 {
        [
            self.e.dot(&self.t).abs(),
            self.e.dot(&self.g).abs(),
            self.t.dot(&self.g).abs(),
            (self.e.norm() - 1.0).abs(),
            (self.t.norm() - 1.0).abs(),
            (self.g.norm() - 1.0).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    /// `|c' − δe − Δg|`, zero exactly when `c` is the striction curve.
    pub fn decomposition_residual(&self) -> f64 {
        (self.c_prime - self.e * self.delta - self.g * self.dist_param).norm()
    }
}

/// Arc-length jets of the striction curve and unit director at one ruling.
#[derive(Debug, Clone)]
pub struct ArcJets {
    pub c: JetVec3,
    pub e: JetVec3,
}

/// Result of a developability scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Developability {
    pub developable: bool,
    pub max_dist_param: f64,
    pub tolerance: f64,
}

#[derive(Clone)]
pub struct RuledSurface {
    source: Arc<dyn RulingSource>,
    arc: ArcLengthMap,
    tolerances: Tolerances,
}

impl fmt::Debug for RuledSurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RuledSurface")
            .field("source", &self.source)
            .field("arc", &self.arc)
            .finish()
    }
}

/// Native-parameter jets: unit director and striction curve.
fn native_jets(
    source: &dyn RulingSource,
    u: f64,
    order: usize,
    tolerances: &Tolerances,
) -> Result<(JetVec3, JetVec3)> {
    let (p, e) = source.ruling_jets(u, order + 1)?;
    let e = e.normalize()?;
    let c = striction_jets(&p, &e, tolerances.cylindrical).map_err(|err| match err {
        Error::CylindricalDirector { speed, .. } => Error::CylindricalDirector { u, speed },
        other => other,
    })?;
    Ok((c, e.truncate(order)))
}

/// Re-expands native jets in the indicatrix arc length around the same point.
fn reparameterize(c: &JetVec3, e: &JetVec3) -> Result<ArcJets> {
    let order = c.order().min(e.order());
    let speed = e.differentiate().norm()?;
    let s_of_u = speed.integrate();
    let u_of_s = s_of_u.truncate(order).revert()?;
    Ok(ArcJets {
        c: c.compose(&u_of_s),
        e: e.compose(&u_of_s),
    })
}

impl RuledSurface {
    pub fn from_source(source: Arc<dyn RulingSource>, tolerances: Tolerances) -> Result<Self> {
        let speed_source = Arc::clone(&source);
        let speed = move |u: f64| {
            let (_, e) = speed_source.ruling_jets(u, 1)?;
            director_speed(&e)
        };
        let arc = ArcLengthMap::build(speed, source.domain(), &tolerances)?;
        let surface = Self {
            source,
            arc,
            tolerances,
        };
        // The striction construction must succeed everywhere the table does.
        let (a, b) = surface.u_range();
        for i in 0..=8 {
            surface.native_jets(a + (b - a) * i as f64 / 8.0, 1)?;
        }
        Ok(surface)
    }

    /// Surface spanned by the rulings through `p(u)` with direction `e(u)`.
    pub fn from_curves(
        p: ParametricCurve,
        e: ParametricCurve,
        tolerances: Tolerances,
    ) -> Result<Self> {
        if p.domain() != e.domain() {
            return Err(Error::InvalidCurve(format!(
                "base domain {:?} differs from director domain {:?}",
                p.domain(),
                e.domain()
            )));
        }
        Self::from_source(
            Arc::new(ExprRuling {
                base: p,
                director: e,
            }),
            tolerances,
        )
    }

    /// Parses `"[..]"` curve expressions over `[u_min, u_max]`.
    pub fn from_expressions(p: &str, e: &str, u_range: (f64, f64)) -> Result<Self> {
        Self::from_curves(
            ParametricCurve::parse(p, u_range)?,
            ParametricCurve::parse(e, u_range)?,
            Tolerances::default(),
        )
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tolerances
    }

    pub fn arc_map(&self) -> &ArcLengthMap {
        &self.arc
    }

    pub fn u_range(&self) -> (f64, f64) {
        self.arc.u_range()
    }

    /// Total indicatrix arc length `S`; the surface lives on `s ∈ [0, S]`.
    pub fn length(&self) -> f64 {
        self.arc.total()
    }

    pub fn s_of_u(&self, u: f64) -> Result<f64> {
        self.arc.s_of_u(u)
    }

    pub fn u_of_s(&self, s: f64) -> Result<f64> {
        self.arc.u_of_s(s)
    }

    /// `ds/du`.
    pub fn speed(&self, u: f64) -> Result<f64> {
        self.arc.speed(u)
    }

    /// Striction curve and unit director as jets in the construction parameter.
    pub fn native_jets(&self, u: f64, order: usize) -> Result<(JetVec3, JetVec3)> {
        native_jets(&*self.source, u, order, &self.tolerances)
    }

    /// Striction curve and unit director as jets in arc length at parameter `u`.
    pub fn arc_jets_at_u(&self, u: f64, order: usize) -> Result<ArcJets> {
        let (c, e) = self.native_jets(u, order)?;
        reparameterize(&c, &e)
    }

    pub fn arc_jets(&self, s: f64, order: usize) -> Result<ArcJets> {
        self.arc_jets_at_u(self.u_of_s(s)?, order)
    }

    pub fn frame_at(&self, s: f64) -> Result<DarbouxState> {
        let u = self.u_of_s(s)?;
        self.frame_with(s, u)
    }

    pub fn frame_at_u(&self, u: f64) -> Result<DarbouxState> {
        let s = self.s_of_u(u)?;
        self.frame_with(s, u)
    }

    /// Frame at `u` with a caller-supplied arc length label; skips the
    /// arc-length lookup and accepts `u` slightly outside the domain.
    pub fn frame_with(&self, s: f64, u: f64) -> Result<DarbouxState> {
        let jets = self.arc_jets_at_u(u, 2)?;
        DarbouxState::from_arc_jets(s, u, &jets.c, &jets.e)
    }

    /// Striction point and unit director at arc length `s`.
    pub fn point_and_director(&self, s: f64) -> Result<(Vec3, Vec3)> {
        let (c, e) = self.native_jets(self.u_of_s(s)?, 0)?;
        Ok((c.value(), e.value()))
    }

    /// The ruling as a dual unit vector `ẽ = e + ε c × e`.
    pub fn dual_curve_at(&self, s: f64) -> Result<DualVector3> {
        let (c, e) = self.point_and_director(s)?;
        Ok(DualVector3::new(e, c.cross(&e)))
    }

    /// `|dẽ/ds|` as a dual number, from differentiated jets of both parts of `ẽ`.
    pub fn dual_tangent_norm(&self, s: f64) -> Result<DualScalar> {
        let jets = self.arc_jets(s, 1)?;
        let moment = jets.c.cross(&jets.e);
        let derivative = DualVector3::new(jets.e.derivative(1), moment.derivative(1));
        derivative.norm()
    }

    /// `∫ f(state) ds` over the rulings with parameters in `[u_a, u_b]`.
    pub fn integrate_over_u<F>(&self, u_a: f64, u_b: f64, f: F) -> Result<f64>
    where
        F: Fn(&DarbouxState) -> f64,
    {
        let tol = self.tolerances.arc_length;
        adaptive_simpson(
            |u| {
                let state = self.frame_with(f64::NAN, u)?;
                Ok(f(&state) * self.speed(u)?)
            },
            u_a,
            u_b,
            tol,
            self.tolerances.max_depth,
        )
    }

    /// `∫₀ˢ f(state) ds`.
    pub fn integrate<F>(&self, s: f64, f: F) -> Result<f64>
    where
        F: Fn(&DarbouxState) -> f64,
    {
        let (a, _) = self.u_range();
        self.integrate_over_u(a, self.u_of_s(s)?, f)
    }

    /// Dual arc length `s̄ = s + ε∫₀ˢ Δ ds`.
    pub fn dual_arc_length(&self, s: f64) -> Result<DualScalar> {
        Ok(DualScalar::new(s, self.integrate(s, |st| st.dist_param)?))
    }

    /// Arc-length parameters of `count` equally spaced samples covering `[0, S]`.
    pub fn sample_parameters(&self, count: usize) -> Vec<f64> {
        let total = self.length();
        let n = count.max(2) - 1;
        (0..=n)
            .map(|i| {
                if i == n {
                    total
                } else {
                    total * i as f64 / n as f64
                }
            })
            .collect()
    }

    /// Default developability threshold, `1e-8 · (1 + max |c|)` on a grid.
    pub fn developability_tolerance(&self) -> Result<f64> {
        if let Some(t) = self.tolerances.developable {
            return Ok(t);
        }
        let (a, b) = self.u_range();
        let mut scale: f64 = 0.0;
        for i in 0..=64 {
            let (c, _) = self.native_jets(a + (b - a) * i as f64 / 64.0, 0)?;
            scale = scale.max(c.value().norm());
        }
        Ok(1e-8 * (1.0 + scale))
    }

    /// Scans `|Δ|` on a uniform grid of `samples` rulings.
    pub fn is_developable(&self, tolerance: f64, samples: usize) -> Result<Developability> {
        let (a, b) = self.u_range();
        let n = samples.max(2) - 1;
        let max_dist_param = (0..=n)
            .into_par_iter()
            .map(|i| {
                let u = a + (b - a) * i as f64 / n as f64;
                self.frame_with(f64::NAN, u).map(|st| st.dist_param.abs())
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        Ok(Developability {
            developable: max_dist_param < tolerance,
            max_dist_param,
            tolerance,
        })
    }

    /// Grid `points[i][j] = c(sᵢ) + vⱼ e(sᵢ)` with `s_count` rows spanning `[0, S]`
    /// and `v_count` columns spanning `v_range`.
    pub fn sample_mesh(
        &self,
        s_count: usize,
        v_range: (f64, f64),
        v_count: usize,
    ) -> Result<Vec<Vec<Vec3>>> {
        let vs: Vec<f64> = {
            let n = v_count.max(2) - 1;
            (0..=n)
                .map(|j| v_range.0 + (v_range.1 - v_range.0) * j as f64 / n as f64)
                .collect()
        };
        self.sample_parameters(s_count)
            .into_par_iter()
            .map(|s| {
                let (c, e) = self.point_and_director(s)?;
                Ok(vs.iter().map(|v| c + e * *v).collect())
            })
            .collect()
    }
}
