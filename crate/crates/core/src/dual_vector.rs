//! Vectors over the dual numbers and the dual angle between dual unit vectors.
//!
//! Orientation convention for the dual angle `θ + εθ*` between unit vectors
//! `ã` and `b̃`: `θ*` is the signed distance from line `a` to line `b` measured
//! along `n = (a × b)/|a × b|`. With moments `a* = p × a`, `b* = q × b` this is
//! `θ* = ⟨q − p, n⟩`, which is exactly what `cos θ̄ = cos θ − εθ* sin θ`
//! produces when solved for `θ*`. For (anti)parallel lines `n` is undefined and
//! the unsigned distance is reported instead.

use std::ops::{Add, Neg, Sub};

use nalgebra::Vector3;

use crate::dual::DualScalar;
use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;

/// Below this `|real part|` a dual vector cannot be normalised.
pub const PURE_DUAL_VECTOR_TOLERANCE: f64 = 1e-12;
/// `sin θ` below this is treated as parallel lines.
pub const PARALLEL_TOLERANCE: f64 = 1e-9;
/// Accepted deviation from `⟨ã, ã⟩ = 1 + ε0`.
pub const UNIT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualVector3 {
    pub real: Vec3,
    pub dual: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualAngle {
    /// Angle between the directions, in `[0, π]`.
    pub theta: f64,
    /// Signed shortest distance (see module docs); unsigned when `parallel`.
    pub theta_star: f64,
    /// The directions were (anti)parallel and the distance came from the
    /// moment-difference fallback.
    pub parallel: bool,
}

impl DualAngle {
    pub fn as_dual(&self) -> DualScalar {
        DualScalar::new(self.theta, self.theta_star)
    }

    /// `cos θ̄ = cos θ − εθ* sin θ`.
    pub fn cos(&self) -> DualScalar {
        self.as_dual().cos()
    }
}

impl DualVector3 {
    pub const ZERO: DualVector3 = DualVector3 {
        real: Vec3::new(0.0, 0.0, 0.0),
        dual: Vec3::new(0.0, 0.0, 0.0),
    };

    pub fn new(real: Vec3, dual: Vec3) -> Self {
        Self { real, dual }
    }

    pub fn component(&self, i: usize) -> DualScalar {
        DualScalar::new(self.real[i], self.dual[i])
    }

    pub fn from_components(c: [DualScalar; 3]) -> Self {
        Self::new(
            Vec3::new(c[0].real, c[1].real, c[2].real),
            Vec3::new(c[0].dual, c[1].dual, c[2].dual),
        )
    }

    /// `⟨a, b⟩ + ε(⟨a, b*⟩ + ⟨a*, b⟩)`
    pub fn dot(&self, rhs: &Self) -> DualScalar {
        DualScalar::new(
            self.real.dot(&rhs.real),
            self.real.dot(&rhs.dual) + self.dual.dot(&rhs.real),
        )
    }

    /// `a × b + ε(a × b* + a* × b)`
    pub fn cross(&self, rhs: &Self) -> Self {
        Self::new(
            self.real.cross(&rhs.real),
            self.real.cross(&rhs.dual) + self.dual.cross(&rhs.real),
        )
    }

    /// Scaling by a dual scalar, `(k + εk*)(v + εv*) = kv + ε(kv* + k*v)`.
    pub fn scale(&self, k: DualScalar) -> Self {
        Self::new(self.real * k.real, self.dual * k.real + self.real * k.dual)
    }

    /// `|a| + ε⟨a, a*⟩/|a|`; requires a non-vanishing real part.
    pub fn norm(&self) -> Result<DualScalar> {
        let n = self.real.norm();
        if !(n >= PURE_DUAL_VECTOR_TOLERANCE) {
            return Err(Error::PureDualVector { norm: n });
        }
        Ok(DualScalar::new(n, self.real.dot(&self.dual) / n))
    }

    /// Projection onto the dual unit sphere by dividing through the dual norm.
    ///
    /// This rescales the direction and removes the moment component parallel
    /// to it.
    pub fn normalize(&self) -> Result<Self> {
        let inv = self.norm()?.recip()?;
        Ok(self.scale(inv))
    }

    pub fn is_unit(&self, tolerance: f64) -> bool {
        let d = self.dot(self);
        (d.real - 1.0).abs() <= tolerance && d.dual.abs() <= tolerance
    }

    /// Dual angle between two dual unit vectors.
    pub fn angle_to(&self, rhs: &Self) -> Result<DualAngle> {
        dual_angle_between(self, rhs)
    }
}

impl Add for DualVector3 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.real + rhs.real, self.dual + rhs.dual)
    }
}

impl Sub for DualVector3 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.real - rhs.real, self.dual - rhs.dual)
    }
}

impl Neg for DualVector3 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.real, -self.dual)
    }
}

pub fn dual_dot(a: &DualVector3, b: &DualVector3) -> DualScalar {
    a.dot(b)
}

pub fn dual_cross(a: &DualVector3, b: &DualVector3) -> DualVector3 {
    a.cross(b)
}

pub fn dual_norm(a: &DualVector3) -> Result<DualScalar> {
    a.norm()
}

fn require_unit(v: &DualVector3, which: &str) -> Result<()> {
    if v.is_unit(UNIT_TOLERANCE) {
        Ok(())
    } else {
        let d = v.dot(v);
        Err(Error::NotAUnitLine {
            reason: format!("{which}: <a,a> = {d}"),
        })
    }
}

pub fn dual_angle_between(a: &DualVector3, b: &DualVector3) -> Result<DualAngle> {
    require_unit(a, "first vector")?;
    require_unit(b, "second vector")?;
    let d = a.dot(b);
    let cos = d.real;
    let sin = a.real.cross(&b.real).norm();
    let theta = sin.atan2(cos);
    if sin >= PARALLEL_TOLERANCE {
        return Ok(DualAngle {
            theta,
            theta_star: -d.dual / sin,
            parallel: false,
        });
    }
    // b = ±a: the moment difference b* ∓ a* = ±(q − p) × a has the distance as norm.
    let sign = if cos >= 0.0 { 1.0 } else { -1.0 };
    let moment_gap = b.dual - a.dual * sign;
    let distance = a.real.cross(&moment_gap).norm() / a.real.norm();
    Ok(DualAngle {
        theta,
        theta_star: distance,
        parallel: true,
    })
}
