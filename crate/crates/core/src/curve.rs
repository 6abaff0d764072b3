//! Expression-defined space curves, the striction construction and the
//! arc-length map of a director indicatrix.

use std::fmt;
use std::sync::Arc;

use crate::dual_vector::Vec3;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::jet::JetVec3;
use crate::quadrature::adaptive_simpson;
use crate::tolerance::Tolerances;

/// Three component expressions in the parameter `u` over a closed domain.
///
/// Evaluation is not clamped to the domain; the expressions are analytic and
/// callers (finite-difference oracles in particular) may step slightly outside.
#[derive(Debug, Clone, PartialEq)]
pub struct ParametricCurve {
    components: [Expr; 3],
    domain: (f64, f64),
}

impl ParametricCurve {
    pub fn new(components: [Expr; 3], domain: (f64, f64)) -> Result<Self> {
        let (a, b) = domain;
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidCurve(format!("degenerate domain [{a}, {b}]")));
        }
        Ok(Self { components, domain })
    }

    /// Parses `"[x(u), y(u), z(u)]"`. Syntax error offsets refer to `text`.
    pub fn parse(text: &str, domain: (f64, f64)) -> Result<Self> {
        let open = text
            .find(|c: char| !c.is_whitespace())
            .filter(|&i| text[i..].starts_with('['))
            .ok_or_else(|| Error::Syntax {
                offset: 0,
                message: "expected `[`".into(),
            })?;
        let close = text
            .rfind(']')
            .filter(|&i| i > open)
            .ok_or_else(|| Error::Syntax {
                offset: text.len(),
                message: "expected `]`".into(),
            })?;
        if let Some(extra) = text[close + 1..].find(|c: char| !c.is_whitespace()) {
            return Err(Error::Syntax {
                offset: close + 1 + extra,
                message: "unexpected input after `]`".into(),
            });
        }
        let body_start = open + 1;
        let body = &text[body_start..close];
        let mut parts = Vec::with_capacity(3);
        let mut depth = 0i32;
        let mut start = 0;
        for (i, ch) in body.char_indices() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                ',' if depth == 0 => {
                    parts.push((start, &body[start..i]));
                    start = i + 1;
                }
                _ => {}
            }
        }
        parts.push((start, &body[start..]));
        if parts.len() != 3 {
            return Err(Error::Syntax {
                offset: open,
                message: format!("expected 3 components, found {}", parts.len()),
            });
        }
        let mut exprs = Vec::with_capacity(3);
        for (offset, src) in parts {
            let shift = |e: Error| match e {
                Error::Syntax { offset: o, message } => Error::Syntax {
                    offset: o + body_start + offset,
                    message,
                },
                Error::UnknownIdentifier { name, offset: o } => Error::UnknownIdentifier {
                    name,
                    offset: o + body_start + offset,
                },
                other => other,
            };
            exprs.push(Expr::parse(src).map_err(shift)?);
        }
        let [x, y, z]: [Expr; 3] = exprs.try_into().expect("three components");
        Self::new([x, y, z], domain)
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn components(&self) -> &[Expr; 3] {
        &self.components
    }

    pub fn eval(&self, u: f64) -> Result<Vec3> {
        let [x, y, z] = &self.components;
        Ok(Vec3::new(x.eval_f64(u)?, y.eval_f64(u)?, z.eval_f64(u)?))
    }

    /// Exact Taylor coefficients of each component up to `order`.
    pub fn eval_jet(&self, u: f64, order: usize) -> Result<JetVec3> {
        let [x, y, z] = &self.components;
        Ok(JetVec3::new(
            x.eval_jet(u, order)?,
            y.eval_jet(u, order)?,
            z.eval_jet(u, order)?,
        ))
    }
}

impl fmt::Display for ParametricCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [x, y, z] = &self.components;
        write!(f, "[{x}, {y}, {z}]")
    }
}

/// Striction curve of the ruling family `(p, e)` expanded around one parameter.
///
/// `e_unit` must already be normalised. With `λ = −⟨p', e'⟩ / ⟨e', e'⟩` the
/// curve `c = p + λe` satisfies `⟨c', e'⟩ = 0` for any regular parameter;
/// in indicatrix arc length this reduces to `λ = −⟨p', e'⟩`. The result has
/// one order less than the inputs.
pub fn striction_jets(p: &JetVec3, e_unit: &JetVec3, cylindrical_tol: f64) -> Result<JetVec3> {
    let order = p.order().min(e_unit.order());
    if order == 0 {
        return Err(Error::OrderMismatch { left: 0, right: 1 });
    }
    let dp = p.differentiate();
    let de = e_unit.differentiate();
    let speed2 = de.dot(&de);
    let speed = speed2.value().sqrt();
    if !(speed > cylindrical_tol) {
        return Err(Error::CylindricalDirector { u: f64::NAN, speed });
    }
    let lambda = -dp.dot(&de).div(&speed2)?;
    let target = order - 1;
    Ok(p.truncate(target)
        .add(&e_unit.truncate(target).scale_jet(&lambda)))
}

/// Striction-curve evaluator for an expression-defined ruling family.
#[derive(Debug, Clone)]
pub struct StrictionCurve {
    base: ParametricCurve,
    director: ParametricCurve,
    cylindrical_tol: f64,
}

/// Builds the striction curve of `(p, e)`, rejecting directors that are
/// stationary anywhere on a uniform sample grid.
pub fn striction_curve(
    p: &ParametricCurve,
    e: &ParametricCurve,
    tolerances: &Tolerances,
) -> Result<StrictionCurve> {
    let curve = StrictionCurve {
        base: p.clone(),
        director: e.clone(),
        cylindrical_tol: tolerances.cylindrical,
    };
    let (a, b) = e.domain();
    let n = 2 * tolerances.arc_panels.max(1);
    for i in 0..=n {
        let u = a + (b - a) * i as f64 / n as f64;
        let speed = director_speed(&e.eval_jet(u, 1)?)?;
        if !(speed > tolerances.cylindrical) {
            return Err(Error::CylindricalDirector { u, speed });
        }
    }
    Ok(curve)
}

impl StrictionCurve {
    pub fn eval_jet(&self, u: f64, order: usize) -> Result<JetVec3> {
        let p = self.base.eval_jet(u, order + 1)?;
        let e = self.director.eval_jet(u, order + 1)?.normalize()?;
        striction_jets(&p, &e, self.cylindrical_tol).map_err(|err| match err {
            Error::CylindricalDirector { speed, .. } => Error::CylindricalDirector { u, speed },
            other => other,
        })
    }

    pub fn eval(&self, u: f64) -> Result<Vec3> {
        Ok(self.eval_jet(u, 0)?.value())
    }
}

/// `|d(e/|e|)/du|` from a first-order jet of a (possibly unnormalised) director.
pub fn director_speed(e: &JetVec3) -> Result<f64> {
    let unit = e.truncate(1).normalize()?;
    Ok(unit.coeff(1).norm())
}

type SpeedFn = dyn Fn(f64) -> Result<f64> + Send + Sync;

/// Monotone map between a curve parameter `u` and the arc length `s` of the
/// director indicatrix, `s(u) = ∫_{u_min}^{u} |e'(w)| dw`.
///
/// Cumulative lengths are tabulated at uniform nodes; queries between nodes
/// add one adaptive-Simpson partial integral. Inversion brackets the panel by
/// binary search and runs a safeguarded Newton iteration.
#[derive(Clone)]
pub struct ArcLengthMap {
    speed: Arc<SpeedFn>,
    nodes_u: Vec<f64>,
    nodes_s: Vec<f64>,
    tol: f64,
    max_depth: u32,
}

impl fmt::Debug for ArcLengthMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ArcLengthMap")
            .field("u_range", &self.u_range())
            .field("total", &self.total())
            .field("panels", &(self.nodes_u.len() - 1))
            .finish()
    }
}

impl ArcLengthMap {
    /// Tabulates the map; `speed` must stay above `tolerances.cylindrical`.
    pub fn build<F>(speed: F, domain: (f64, f64), tolerances: &Tolerances) -> Result<Self>
    where
        F: Fn(f64) -> Result<f64> + Send + Sync + 'static,
    {
        let floor = tolerances.cylindrical;
        let checked = move |u: f64| {
            let v = speed(u)?;
            if !(v > floor) {
                return Err(Error::CylindricalDirector { u, speed: v });
            }
            Ok(v)
        };
        let (a, b) = domain;
        let panels = tolerances.arc_panels.max(1);
        let nodes_u: Vec<f64> = (0..=panels)
            .map(|i| {
                if i == panels {
                    b
                } else {
                    a + (b - a) * i as f64 / panels as f64
                }
            })
            .collect();
        let panel_tol = tolerances.arc_length / panels as f64;
        let mut nodes_s = Vec::with_capacity(panels + 1);
        nodes_s.push(0.0);
        let mut acc = 0.0;
        for w in nodes_u.windows(2) {
            acc += adaptive_simpson(&checked, w[0], w[1], panel_tol, tolerances.max_depth)?;
            nodes_s.push(acc);
        }
        Ok(Self {
            speed: Arc::new(checked),
            nodes_u,
            nodes_s,
            tol: tolerances.arc_length,
            max_depth: tolerances.max_depth,
        })
    }

    pub fn u_range(&self) -> (f64, f64) {
        (self.nodes_u[0], *self.nodes_u.last().unwrap())
    }

    /// Total arc length `S`.
    pub fn total(&self) -> f64 {
        *self.nodes_s.last().unwrap()
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    /// `ds/du` at `u`.
    pub fn speed(&self, u: f64) -> Result<f64> {
        (self.speed)(u)
    }

    fn partial(&self, panel: usize, u: f64) -> Result<f64> {
        let from = self.nodes_u[panel];
        let tail = adaptive_simpson(&*self.speed, from, u, 0.1 * self.tol, self.max_depth)?;
        Ok(self.nodes_s[panel] + tail)
    }

    fn panel_of_u(&self, u: f64) -> usize {
        let (a, b) = self.u_range();
        let n = self.nodes_u.len() - 1;
        let i = ((u - a) / (b - a) * n as f64).floor();
        (i.max(0.0) as usize).min(n - 1)
    }

    pub fn s_of_u(&self, u: f64) -> Result<f64> {
        let (a, b) = self.u_range();
        let slack = 1e-9 * (b - a);
        if !(u >= a - slack && u <= b + slack) {
            return Err(Error::OutOfDomain {
                value: u,
                min: a,
                max: b,
            });
        }
        let u = u.clamp(a, b);
        self.partial(self.panel_of_u(u), u)
    }

    pub fn u_of_s(&self, s: f64) -> Result<f64> {
        let total = self.total();
        let slack = self.tol.max(1e-12 * total);
        if !(s >= -slack && s <= total + slack) {
            return Err(Error::OutOfDomain {
                value: s,
                min: 0.0,
                max: total,
            });
        }
        let s = s.clamp(0.0, total);
        let n = self.nodes_s.len() - 1;
        let panel = self
            .nodes_s
            .partition_point(|&x| x <= s)
            .saturating_sub(1)
            .min(n - 1);
        let (mut lo, mut hi) = (self.nodes_u[panel], self.nodes_u[panel + 1]);
        let (s_lo, s_hi) = (self.nodes_s[panel], self.nodes_s[panel + 1]);
        if s <= s_lo {
            return Ok(lo);
        }
        if s >= s_hi {
            return Ok(hi);
        }
        let mut u = lo + (hi - lo) * (s - s_lo) / (s_hi - s_lo);
        let target = 1e-2 * self.tol;
        for _ in 0..60 {
            let residual = self.partial(panel, u)? - s;
            if residual.abs() <= target {
                break;
            }
            if residual > 0.0 {
                hi = u;
            } else {
                lo = u;
            }
            let mut next = u - residual / self.speed(u)?;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - u).abs() <= 4.0 * f64::EPSILON * u.abs().max(1.0) {
                u = next;
                break;
            }
            u = next;
        }
        Ok(u)
    }
}

/// Builds the arc-length map of an expression-defined director.
pub fn arc_length_reparam(e: &ParametricCurve, tolerances: &Tolerances) -> Result<ArcLengthMap> {
    let director = e.clone();
    ArcLengthMap::build(
        move |u| director_speed(&director.eval_jet(u, 1)?),
        e.domain(),
        tolerances,
    )
}
