//! Truncated Taylor series ("jets").
//!
//! Convention: `coeffs[i] = f⁽ⁱ⁾(u₀) / i!`. A jet of order `k` carries `k + 1`
//! coefficients. Arithmetic operators between jets of different order truncate
//! to the smaller order, which is the only mathematically meaningful result;
//! the `checked_*` methods refuse mixed orders instead.
//!
//! Order-1 jets are arithmetic-isomorphic to [`DualScalar`](crate::dual::DualScalar),
//! and every first-order recurrence here is written with the same operation
//! sequence as the dual-number code so the two agree bitwise.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::Vector3;
use smallvec::SmallVec;

use crate::dual::PURE_DUAL_TOLERANCE;
use crate::error::{Error, Result};

/// Order used when nothing else is requested: two derivatives for the
/// conical curvature plus one of headroom.
pub const DEFAULT_ORDER: usize = 3;

type Coeffs = SmallVec<[f64; 8]>;

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    coeffs: Coeffs,
}

impl Jet {
    pub fn constant(value: f64, order: usize) -> Self {
        let mut coeffs: Coeffs = SmallVec::from_elem(0.0, order + 1);
        coeffs[0] = value;
        Self { coeffs }
    }

    /// The identity `u ↦ u` expanded at `u₀`.
    pub fn variable(u0: f64, order: usize) -> Self {
        let mut jet = Self::constant(u0, order);
        if order >= 1 {
            jet.coeffs[1] = 1.0;
        }
        jet
    }

    pub fn from_coeffs(coeffs: &[f64]) -> Self {
        assert!(!coeffs.is_empty(), "a jet needs at least one coefficient");
        Self {
            coeffs: SmallVec::from_slice(coeffs),
        }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// Normalised coefficient `f⁽ⁱ⁾/i!`, zero beyond the order.
    pub fn coeff(&self, i: usize) -> f64 {
        self.coeffs.get(i).copied().unwrap_or(0.0)
    }

    /// The raw derivative `f⁽ⁱ⁾(u₀)`.
    pub fn derivative(&self, i: usize) -> f64 {
        let factorial: f64 = (1..=i).map(|k| k as f64).product();
        self.coeff(i) * factorial
    }

    pub fn truncate(&self, order: usize) -> Self {
        let n = (order + 1).min(self.coeffs.len());
        Self {
            coeffs: SmallVec::from_slice(&self.coeffs[..n]),
        }
    }

    /// Jet of the derivative function; loses one order.
    pub fn differentiate(&self) -> Self {
        if self.order() == 0 {
            return Self::constant(0.0, 0);
        }
        let coeffs = (1..self.coeffs.len())
            .map(|i| self.coeffs[i] * i as f64)
            .collect();
        Self { coeffs }
    }

    /// Jet of the antiderivative vanishing at the expansion point; gains one order.
    pub fn integrate(&self) -> Self {
        let mut coeffs: Coeffs = SmallVec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(0.0);
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c / (i + 1) as f64);
        }
        Self { coeffs }
    }

    pub fn scale(&self, k: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    fn check_order(&self, rhs: &Self) -> Result<()> {
        if self.order() != rhs.order() {
            return Err(Error::OrderMismatch {
                left: self.order(),
                right: rhs.order(),
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self> {
        self.check_order(rhs)?;
        Ok(self + rhs)
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self> {
        self.check_order(rhs)?;
        Ok(self - rhs)
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        self.check_order(rhs)?;
        Ok(self * rhs)
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        self.check_order(rhs)?;
        self.div(rhs)
    }

    /// Recursive Taylor division, `c[k] = (a[k] − Σ_{j≥1} b[j]·c[k−j]) / b[0]`.
    pub fn div(&self, rhs: &Self) -> Result<Self> {
        let b0 = rhs.coeffs[0];
        if !(b0.abs() >= PURE_DUAL_TOLERANCE) {
            return Err(Error::PureDualDivision { real: b0 });
        }
        let n = self.coeffs.len().min(rhs.coeffs.len());
        let mut c: Coeffs = SmallVec::with_capacity(n);
        for k in 0..n {
            let mut sum = self.coeffs[k];
            for j in 1..=k {
                sum -= c[k - j] * rhs.coeffs[j];
            }
            c.push(sum / b0);
        }
        Ok(Self { coeffs: c })
    }

    pub fn recip(&self) -> Result<Self> {
        Self::constant(1.0, self.order()).div(self)
    }

    /// `sin` and `cos` together via the coupled recurrences
    /// `s[k] = (1/k) Σ j·a[j]·c[k−j]`, `c[k] = −(1/k) Σ j·a[j]·s[k−j]`.
    pub fn sin_cos(&self) -> (Self, Self) {
        let n = self.coeffs.len();
        let a = &self.coeffs;
        let (s0, c0) = a[0].sin_cos();
        let mut s: Coeffs = SmallVec::with_capacity(n);
        let mut c: Coeffs = SmallVec::with_capacity(n);
        s.push(s0);
        c.push(c0);
        for k in 1..n {
            let mut ss = a[1] * c[k - 1];
            let mut cc = a[1] * s[k - 1];
            for j in 2..=k {
                let ja = j as f64 * a[j];
                ss += ja * c[k - j];
                cc += ja * s[k - j];
            }
            let kf = k as f64;
            s.push(ss / kf);
            c.push(-(cc / kf));
        }
        (Self { coeffs: s }, Self { coeffs: c })
    }

    pub fn sin(&self) -> Self {
        self.sin_cos().0
    }

    pub fn cos(&self) -> Self {
        self.sin_cos().1
    }

    /// `r[k] = (a[k] − Σ_{j=1}^{k−1} r[j]·r[k−j]) / (2 r[0])`; needs `a[0] > 0`.
    pub fn sqrt(&self) -> Result<Self> {
        let a = &self.coeffs;
        if !(a[0] > 0.0) {
            return Err(Error::Domain {
                function: "sqrt",
                argument: a[0],
            });
        }
        let n = a.len();
        let mut r: Coeffs = SmallVec::with_capacity(n);
        r.push(a[0].sqrt());
        for k in 1..n {
            let mut sum = a[k];
            for j in 1..k {
                sum -= r[j] * r[k - j];
            }
            r.push(sum / (2.0 * r[0]));
        }
        Ok(Self { coeffs: r })
    }

    /// `e[k] = (1/k) Σ j·a[j]·e[k−j]`.
    pub fn exp(&self) -> Self {
        let a = &self.coeffs;
        let n = a.len();
        let mut e: Coeffs = SmallVec::with_capacity(n);
        e.push(a[0].exp());
        for k in 1..n {
            let mut sum = a[1] * e[k - 1];
            for j in 2..=k {
                sum += j as f64 * a[j] * e[k - j];
            }
            e.push(sum / k as f64);
        }
        Self { coeffs: e }
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut acc = Self::constant(1.0, self.order());
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// `self ∘ (x₀ + inner)` where `inner` has a zero constant term, i.e. the
    /// expansion of `f(g(t))` around `t₀` given `f` around `g(t₀)`.
    pub fn compose(&self, inner: &Jet) -> Self {
        debug_assert!(inner.value() == 0.0, "inner jet must vanish at t0");
        let order = self.order().min(inner.order());
        let inner = inner.truncate(order);
        let mut acc = Self::constant(self.coeff(order), order);
        for i in (0..order).rev() {
            acc = &acc * &inner;
            acc.coeffs[0] += self.coeffs[i];
        }
        acc
    }

    /// Series reversion: for `h(t) = a₁t + a₂t² + …` with `a₁ ≠ 0` returns
    /// `g` with `h(g(y)) = y` to the jet's order.
    pub fn revert(&self) -> Result<Self> {
        let order = self.order();
        let a1 = self.coeff(1);
        if !(a1.abs() >= PURE_DUAL_TOLERANCE) {
            return Err(Error::PureDualDivision { real: a1 });
        }
        let y = Self::variable(0.0, order);
        let mut g = y.scale(1.0 / a1);
        // Each fixed-point sweep fixes one more coefficient.
        for _ in 1..order {
            let residual = &self.compose(&g) - &y;
            g = &g - &residual.scale(1.0 / a1);
        }
        Ok(g)
    }
}

fn zip_with(a: &Jet, b: &Jet, f: impl Fn(f64, f64) -> f64) -> Jet {
    let n = a.coeffs.len().min(b.coeffs.len());
    Jet {
        coeffs: (0..n).map(|i| f(a.coeffs[i], b.coeffs[i])).collect(),
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        zip_with(self, rhs, |x, y| x + y)
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        zip_with(self, rhs, |x, y| x - y)
    }
}

/// Cauchy product `c[k] = Σ_{j≤k} a[j]·b[k−j]`.
impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        let n = self.coeffs.len().min(rhs.coeffs.len());
        let (a, b) = (&self.coeffs, &rhs.coeffs);
        let coeffs = (0..n)
            .map(|k| {
                let mut sum = a[0] * b[k];
                for j in 1..=k {
                    sum += a[j] * b[k - j];
                }
                sum
            })
            .collect();
        Jet { coeffs }
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet { (&self).$m(&rhs) }
        }
        impl $tr<&Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: &Jet) -> Jet { (&self).$m(rhs) }
        }
        impl $tr<Jet> for &Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet { self.$m(&rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        -&self
    }
}

/// Three jets sharing an expansion point: a space curve near one parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct JetVec3 {
    pub x: Jet,
    pub y: Jet,
    pub z: Jet,
}

impl JetVec3 {
    pub fn new(x: Jet, y: Jet, z: Jet) -> Self {
        Self { x, y, z }
    }

    pub fn constant(v: &Vector3<f64>, order: usize) -> Self {
        Self::new(
            Jet::constant(v.x, order),
            Jet::constant(v.y, order),
            Jet::constant(v.z, order),
        )
    }

    pub fn order(&self) -> usize {
        self.x.order().min(self.y.order()).min(self.z.order())
    }

    pub fn value(&self) -> Vector3<f64> {
        self.coeff(0)
    }

    pub fn coeff(&self, i: usize) -> Vector3<f64> {
        Vector3::new(self.x.coeff(i), self.y.coeff(i), self.z.coeff(i))
    }

    pub fn derivative(&self, i: usize) -> Vector3<f64> {
        Vector3::new(
            self.x.derivative(i),
            self.y.derivative(i),
            self.z.derivative(i),
        )
    }

    fn map(&self, f: impl Fn(&Jet) -> Jet) -> Self {
        Self::new(f(&self.x), f(&self.y), f(&self.z))
    }

    pub fn truncate(&self, order: usize) -> Self {
        self.map(|j| j.truncate(order))
    }

    pub fn differentiate(&self) -> Self {
        self.map(Jet::differentiate)
    }

    pub fn compose(&self, inner: &Jet) -> Self {
        self.map(|j| j.compose(inner))
    }

    pub fn dot(&self, rhs: &Self) -> Jet {
        &(&self.x * &rhs.x + &self.y * &rhs.y) + &(&self.z * &rhs.z)
    }

    pub fn cross(&self, rhs: &Self) -> Self {
        Self::new(
            &self.y * &rhs.z - &self.z * &rhs.y,
            &self.z * &rhs.x - &self.x * &rhs.z,
            &self.x * &rhs.y - &self.y * &rhs.x,
        )
    }

    pub fn scale_jet(&self, k: &Jet) -> Self {
        self.map(|j| j * k)
    }

    pub fn scale(&self, k: f64) -> Self {
        self.map(|j| j.scale(k))
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self::new(&self.x + &rhs.x, &self.y + &rhs.y, &self.z + &rhs.z)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self::new(&self.x - &rhs.x, &self.y - &rhs.y, &self.z - &rhs.z)
    }

    pub fn norm(&self) -> Result<Jet> {
        self.dot(self).sqrt()
    }

    /// `v / |v|` in jet arithmetic.
    pub fn normalize(&self) -> Result<Self> {
        let inv = self.norm()?.recip()?;
        Ok(self.scale_jet(&inv))
    }
}
