//! Dual numbers `a + εa*` with `ε² = 0`.
//!
//! Besides carrying first derivatives, dual numbers are the scalar field of
//! line geometry: the real part of a dual angle is an angle between two line
//! directions and the dual part is the distance between the lines.
//!
//! Division is only defined when the divisor has a non-vanishing real part.
//! Pure dual numbers `0 + εb` are zero divisors, so [`DualScalar::checked_div`]
//! rejects them instead of returning infinities.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use crate::error::{Error, Result};

/// Absolute threshold on the real part of a divisor below which division is refused.
pub const PURE_DUAL_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DualScalar {
    pub real: f64,
    pub dual: f64,
}

impl DualScalar {
    pub const ZERO: DualScalar = DualScalar::new(0.0, 0.0);
    pub const ONE: DualScalar = DualScalar::new(1.0, 0.0);
    /// The dual unit `ε`.
    pub const EPSILON: DualScalar = DualScalar::new(0.0, 1.0);

    pub const fn new(real: f64, dual: f64) -> Self {
        Self { real, dual }
    }

    pub const fn real(value: f64) -> Self {
        Self::new(value, 0.0)
    }

    /// `x + ε`: seeds forward differentiation with respect to `x`.
    pub const fn variable(x: f64) -> Self {
        Self::new(x, 1.0)
    }

    pub fn scale(self, k: f64) -> Self {
        Self::new(self.real * k, self.dual * k)
    }

    pub fn checked_div(self, rhs: Self) -> Result<Self> {
        self.checked_div_with_tolerance(rhs, PURE_DUAL_TOLERANCE)
    }

    /// Division with an explicit pure-dual threshold.
    ///
    /// The dual part is formed as `(x* − r·y*) / y` with `r = x / y`, which is
    /// the same recurrence truncated Taylor division uses; order-1 jets and dual
    /// numbers therefore agree bitwise.
    pub fn checked_div_with_tolerance(self, rhs: Self, tolerance: f64) -> Result<Self> {
        if !(rhs.real.abs() >= tolerance) {
            return Err(Error::PureDualDivision { real: rhs.real });
        }
        let real = self.real / rhs.real;
        let dual = (self.dual - real * rhs.dual) / rhs.real;
        Ok(Self::new(real, dual))
    }

    pub fn recip(self) -> Result<Self> {
        Self::ONE.checked_div(self)
    }

    /// Lifts a real function with known derivative: `f(x) + εx*f'(x)`.
    pub fn apply_analytic(self, f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64) -> Self {
        Self::new(f(self.real), self.dual * df(self.real))
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.real.sin_cos();
        Self::new(s, self.dual * c)
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.real.sin_cos();
        Self::new(c, -(self.dual * s))
    }

    /// Square root; only defined for a strictly positive real part.
    pub fn sqrt(self) -> Result<Self> {
        if !(self.real > 0.0) {
            return Err(Error::Domain {
                function: "sqrt",
                argument: self.real,
            });
        }
        let r = self.real.sqrt();
        Ok(Self::new(r, self.dual / (2.0 * r)))
    }

    pub fn exp(self) -> Self {
        let e = self.real.exp();
        Self::new(e, self.dual * e)
    }

    /// Dual `atan2(y, x)`, the dual angle whose sine and cosine are proportional
    /// to `y` and `x`.
    pub fn atan2(y: Self, x: Self) -> Result<Self> {
        let r2 = x.real * x.real + y.real * y.real;
        if !(r2 > 0.0) {
            return Err(Error::Domain {
                function: "atan2",
                argument: 0.0,
            });
        }
        let angle = y.real.atan2(x.real);
        Ok(Self::new(angle, (x.real * y.dual - y.real * x.dual) / r2))
    }

    /// Integer power by repeated multiplication.
    pub fn powi(self, n: u32) -> Self {
        let mut acc = Self::ONE;
        for _ in 0..n {
            acc = acc * self;
        }
        acc
    }
}

impl fmt::Display for DualScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + ε{}", self.real, self.dual)
    }
}

impl From<f64> for DualScalar {
    fn from(v: f64) -> Self {
        Self::real(v)
    }
}

impl Add for DualScalar {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.real + rhs.real, self.dual + rhs.dual)
    }
}

impl Sub for DualScalar {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.real - rhs.real, self.dual - rhs.dual)
    }
}

impl Mul for DualScalar {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::new(
            self.real * rhs.real,
            self.real * rhs.dual + self.dual * rhs.real,
        )
    }
}

impl Mul<f64> for DualScalar {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self.scale(rhs)
    }
}

impl Neg for DualScalar {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.real, -self.dual)
    }
}

impl AddAssign for DualScalar {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl SubAssign for DualScalar {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}
