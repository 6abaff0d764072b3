//! Oriented lines in normalised Plücker coordinates and their correspondence
//! with dual unit vectors.

use std::fmt;
use std::str::FromStr;

use crate::dual_vector::{DualVector3, Vec3};
use crate::error::{Error, Result};

/// Tolerance applied to the Plücker conditions when accepting external input.
pub const LINE_TOLERANCE: f64 = 1e-9;

/// An oriented line: unit `direction` and `moment = p × direction` for any
/// point `p` on the line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlueckerLine {
    direction: Vec3,
    moment: Vec3,
}

impl PlueckerLine {
    pub fn from_point_direction(point: Vec3, direction: Vec3) -> Result<Self> {
        let n = direction.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::ZeroDirection);
        }
        let direction = direction / n;
        Ok(Self {
            direction,
            moment: point.cross(&direction),
        })
    }

    /// Accepts raw coordinates after checking `|a| = 1` and `⟨a, a*⟩ = 0`.
    pub fn from_coordinates(direction: Vec3, moment: Vec3) -> Result<Self> {
        let unit = (direction.norm_squared() - 1.0).abs();
        if unit > LINE_TOLERANCE {
            return Err(Error::NotAUnitLine {
                reason: format!("|direction|^2 - 1 = {unit:e}"),
            });
        }
        let ortho = direction.dot(&moment);
        if ortho.abs() > LINE_TOLERANCE {
            return Err(Error::NotAUnitLine {
                reason: format!("<direction, moment> = {ortho:e}"),
            });
        }
        Ok(Self { direction, moment })
    }

    pub fn direction(&self) -> Vec3 {
        self.direction
    }

    pub fn moment(&self) -> Vec3 {
        self.moment
    }

    /// Foot of the perpendicular from the origin, `a × a*`.
    pub fn closest_point_to_origin(&self) -> Vec3 {
        self.direction.cross(&self.moment)
    }

    pub fn point_at(&self, lambda: f64) -> Vec3 {
        self.closest_point_to_origin() + self.direction * lambda
    }

    pub fn reversed(&self) -> Self {
        Self {
            direction: -self.direction,
            moment: -self.moment,
        }
    }

    pub fn to_dual(&self) -> DualVector3 {
        DualVector3::new(self.direction, self.moment)
    }

    pub fn from_dual(v: &DualVector3) -> Result<Self> {
        Self::from_coordinates(v.real, v.dual)
    }
}

impl fmt::Display for PlueckerLine {
    /// Writes the `px py pz / dx dy dz` form using the closest point.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.closest_point_to_origin();
        let d = self.direction;
        write!(f, "{} {} {} / {} {} {}", p.x, p.y, p.z, d.x, d.y, d.z)
    }
}

/// Parses `"px py pz / dx dy dz"`.
impl FromStr for PlueckerLine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let syntax = |offset: usize, message: &str| Error::Syntax {
            offset,
            message: message.to_string(),
        };
        let slash = s
            .find('/')
            .ok_or_else(|| syntax(s.len(), "expected `px py pz / dx dy dz`"))?;
        let triple = |part: &str, base: usize| -> Result<Vec3> {
            let values: Vec<f64> = part
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<f64>().map_err(|_| {
                        let at = part.find(tok).unwrap_or(0) + base;
                        syntax(at, &format!("not a number: `{tok}`"))
                    })
                })
                .collect::<Result<_>>()?;
            if values.len() != 3 {
                return Err(syntax(base, "expected three coordinates"));
            }
            Ok(Vec3::new(values[0], values[1], values[2]))
        };
        let point = triple(&s[..slash], 0)?;
        let direction = triple(&s[slash + 1..], slash + 1)?;
        Self::from_point_direction(point, direction)
    }
}
