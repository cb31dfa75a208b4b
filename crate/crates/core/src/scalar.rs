//! Scalar abstraction shared by the evaluators.
//!
//! Every closed form in this crate (profile function, H-coefficients,
//! λ-table, extra integrals) is written once over [`Real`]. Evaluating it on
//! `f64` gives values; evaluating it on [`Dual`] gives values together with an
//! exact directional derivative (forward-mode differentiation), which is what
//! the analytic Poisson-bracket scheme uses.

use std::ops::{Add, Div, Mul, Neg, Sub};

pub trait Real:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn cst(x: f64) -> Self;
    /// The primal part.
    fn value(self) -> f64;
    fn sinh(self) -> Self;
    fn cosh(self) -> Self;
    fn sqrt(self) -> Self;

    fn tanh(self) -> Self {
        self.sinh() / self.cosh()
    }

    fn powi(self, k: u32) -> Self {
        let mut acc = Self::cst(1.0);
        for _ in 0..k {
            acc = acc * self;
        }
        acc
    }

    fn scale(self, c: f64) -> Self {
        self * Self::cst(c)
    }
}

impl Real for f64 {
    #[inline]
    fn cst(x: f64) -> Self {
        x
    }
    #[inline]
    fn value(self) -> f64 {
        self
    }
    #[inline]
    fn sinh(self) -> Self {
        f64::sinh(self)
    }
    #[inline]
    fn cosh(self) -> Self {
        f64::cosh(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn tanh(self) -> Self {
        f64::tanh(self)
    }
    #[inline]
    fn powi(self, k: u32) -> Self {
        f64::powi(self, k as i32)
    }
}

/// First-order dual number `v + d·ε` with `ε² = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual {
    pub v: f64,
    pub d: f64,
}

impl Dual {
    pub fn new(v: f64, d: f64) -> Self {
        Self { v, d }
    }

    /// A seeded variable: derivative 1 along itself.
    pub fn var(v: f64) -> Self {
        Self { v, d: 1.0 }
    }
}

impl Add for Dual {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Dual::new(self.v + o.v, self.d + o.d)
    }
}

impl Sub for Dual {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Dual::new(self.v - o.v, self.d - o.d)
    }
}

impl Mul for Dual {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Dual::new(self.v * o.v, self.d * o.v + self.v * o.d)
    }
}

impl Div for Dual {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let q = self.v / o.v;
        Dual::new(q, (self.d - q * o.d) / o.v)
    }
}

impl Neg for Dual {
    type Output = Self;
    fn neg(self) -> Self {
        Dual::new(-self.v, -self.d)
    }
}

impl Real for Dual {
    fn cst(x: f64) -> Self {
        Dual::new(x, 0.0)
    }
    fn value(self) -> f64 {
        self.v
    }
    fn sinh(self) -> Self {
        Dual::new(self.v.sinh(), self.d * self.v.cosh())
    }
    fn cosh(self) -> Self {
        Dual::new(self.v.cosh(), self.d * self.v.sinh())
    }
    fn sqrt(self) -> Self {
        let r = self.v.sqrt();
        Dual::new(r, self.d / (2.0 * r))
    }
    fn tanh(self) -> Self {
        let th = self.v.tanh();
        Dual::new(th, self.d * (1.0 - th * th))
    }
}
