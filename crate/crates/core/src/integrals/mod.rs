//! Extra integrals of the geodesic flow of `H = Π² + P_y²/cosh²t`, `Π = P_t/A(t)`.
//!
//! The integrals are built from the homogeneous sums
//!
//! ```text
//! even:  S = Σ_{k=0}^{n}   λ_{2k−1} H^{n−k} P_y^{2k}
//!        T = Π Σ_{k=0}^{n−1} λ_{2k} H^{n−k−1} P_y^{2k+1}
//! odd:   S = Π Σ_{k=0}^{n} λ_{2k−1} H^{n−k} P_y^{2k}
//!        T = Σ_{k=0}^{n}   λ_{2k} H^{n−k} P_y^{2k+1}
//! ```
//!
//! the conserved pair is `S₁ = cosh y S + sinh y T`, `S₂ = ∂_y S₁ = sinh y S + cosh y T`,
//! or equivalently `S± = S₁ ± S₂ = e^{±y}(S ± T)`.

mod generating;
mod lambda;
mod moments;

pub use generating::{gen_context, gen_pde_residuals, GenEvalContext, TAU_SINGULARITY_EPS};
pub use lambda::{LambdaTable, LambdaValues, LambdaVariant, OdeResiduals};
pub use moments::{moment_polynomial, moments, verify_product_identity, MomentVector};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::family::{clamp, FamilyError, MetricFamily, Parity, DEGENERACY_EPS};
use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntegralError {
    #[error("SingularTau: xi = {xi} coincides with cosh^2 t at t = {t}")]
    SingularTau { t: f64, xi: f64 },
    #[error(transparent)]
    Family(#[from] FamilyError),
}

/// Canonical coordinates `(t, y, P_t, P_y)` on the cotangent bundle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub t: f64,
    pub y: f64,
    pub pt: f64,
    pub py: f64,
}

impl PhasePoint {
    pub fn new(t: f64, y: f64, pt: f64, py: f64) -> Self {
        Self {
            t: clamp(t),
            y,
            pt,
            py,
        }
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.t, self.y, self.pt, self.py]
    }

    /// `Π = P_t / A(t)`.
    pub fn pi(&self, family: &MetricFamily) -> f64 {
        self.pt / family.eval_a(self.t)
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralValues {
    pub h: f64,
    pub py: f64,
    pub s: f64,
    pub t: f64,
    pub s1: f64,
    pub s2: f64,
    pub splus: f64,
    pub sminus: f64,
}

/// Generic integral values, used for exact derivatives on dual numbers.
#[derive(Debug, Clone, Copy)]
pub(crate) struct RawIntegrals<T> {
    pub h: T,
    pub s1: T,
    pub s2: T,
    pub splus: T,
    pub sminus: T,
}

/// `Σ_k c_k H^{d−k} q^k` by Horner in `H` with `q` powers carried along.
fn homogeneous<T: Real>(coeffs: impl Iterator<Item = T>, h: T, q: T) -> T {
    let mut it = coeffs;
    let mut acc = match it.next() {
        Some(c) => c,
        None => return T::cst(0.0),
    };
    let mut qpow = T::cst(1.0);
    for c in it {
        qpow = qpow * q;
        acc = acc * h + c * qpow;
    }
    acc
}

/// A family together with the λ closed form used to build its integrals.
///
/// The optional perturbation adds a constant to one λ entry; it exists for
/// sensitivity controls (a corrupted table must visibly break conservation).
#[derive(Debug, Clone, Copy)]
pub struct IntegralSystem<'a> {
    family: &'a MetricFamily,
    variant: LambdaVariant,
    perturbation: Option<(i64, f64)>,
}

impl<'a> IntegralSystem<'a> {
    pub fn new(family: &'a MetricFamily) -> Self {
        Self {
            family,
            variant: LambdaVariant::default(),
            perturbation: None,
        }
    }

    pub fn with_variant(mut self, variant: LambdaVariant) -> Self {
        self.variant = variant;
        self
    }

    /// Adds `delta` to `λ_index` everywhere.
    pub fn with_perturbation(mut self, index: i64, delta: f64) -> Self {
        self.perturbation = Some((index, delta));
        self
    }

    pub fn family(&self) -> &'a MetricFamily {
        self.family
    }

    pub(crate) fn lambda_at<T: Real>(&self, t: T) -> LambdaValues<T> {
        let mut lam = lambda::lambda_values(self.family, t, self.variant);
        if let Some((j, delta)) = self.perturbation {
            lam.shift(j, delta);
        }
        lam
    }

    pub fn lambda_table(&self, t: f64) -> LambdaTable {
        let t = clamp(t);
        LambdaTable {
            t,
            parity: self.family.parity(),
            n: self.family.n(),
            values: self.lambda_at(t),
        }
    }

    pub fn ode_residuals(&self, t: f64) -> OdeResiduals {
        lambda::ode_residuals_from(self.family, t, |x| self.lambda_at(x))
    }

    pub(crate) fn raw<T: Real>(&self, t: T, y: T, pt: T, py: T) -> RawIntegrals<T> {
        let n = self.family.n() as i64;
        let a = self.family.profile(t);
        let c = t.cosh();
        let pi = pt / a;
        let q = py * py;
        let h = pi * pi + q / (c * c);
        let lam = self.lambda_at(t);
        let odd_entries = (0..=n).map(|k| lam.get(2 * k - 1));
        let (s, tt) = match self.family.parity() {
            Parity::EvenDegree => (
                homogeneous(odd_entries, h, q),
                pi * py * homogeneous((0..n).map(|k| lam.get(2 * k)), h, q),
            ),
            Parity::OddDegree => (
                pi * homogeneous(odd_entries, h, q),
                py * homogeneous((0..=n).map(|k| lam.get(2 * k)), h, q),
            ),
        };
        let (ch, sh) = (y.cosh(), y.sinh());
        RawIntegrals {
            h,
            s1: ch * s + sh * tt,
            s2: sh * s + ch * tt,
            splus: (ch + sh) * (s + tt),
            sminus: (ch - sh) * (s - tt),
        }
    }

    pub fn evaluate(&self, p: &PhasePoint) -> Result<IntegralValues, FamilyError> {
        let a = self.family.eval_a(p.t);
        if a.abs() < DEGENERACY_EPS {
            return Err(FamilyError::DegenerateMetric { t: p.t, a });
        }
        let n = self.family.n() as i64;
        let lam = self.lambda_at(p.t);
        let pi = p.pt / a;
        let c = p.t.cosh();
        let q = p.py * p.py;
        let h = pi * pi + q / (c * c);
        let odd_entries = (0..=n).map(|k| lam.get(2 * k - 1));
        let (s, tt) = match self.family.parity() {
            Parity::EvenDegree => (
                homogeneous(odd_entries, h, q),
                pi * p.py * homogeneous((0..n).map(|k| lam.get(2 * k)), h, q),
            ),
            Parity::OddDegree => (
                pi * homogeneous(odd_entries, h, q),
                p.py * homogeneous((0..=n).map(|k| lam.get(2 * k)), h, q),
            ),
        };
        let (ch, sh) = (p.y.cosh(), p.y.sinh());
        Ok(IntegralValues {
            h,
            py: p.py,
            s,
            t: tt,
            s1: ch * s + sh * tt,
            s2: sh * s + ch * tt,
            splus: p.y.exp() * (s + tt),
            sminus: (-p.y).exp() * (s - tt),
        })
    }
}

/// λ-table of `family` at `t` with the default closed form.
pub fn lambda_table(family: &MetricFamily, t: f64) -> LambdaTable {
    IntegralSystem::new(family).lambda_table(t)
}

/// ODE residuals of the default λ-table at `t`.
pub fn ode_residuals(family: &MetricFamily, t: f64) -> OdeResiduals {
    IntegralSystem::new(family).ode_residuals(t)
}

/// `H, P_y, S, T, S₁, S₂, S₊, S₋` at a phase point.
pub fn eval_integrals(family: &MetricFamily, p: &PhasePoint) -> Result<IntegralValues, FamilyError> {
    IntegralSystem::new(family).evaluate(p)
}
