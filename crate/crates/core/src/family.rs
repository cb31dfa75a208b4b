//! Metric families `g = A(t)² dt² + cosh²t dy²` and the functions built on them.
//!
//! A family is fixed by a parity (even or odd degree of the extra integrals),
//! the half-degree `n`, and `ν` masses `m_k > 1` with signs `e_k = ±1`, where
//! `ν = 2n − 1` in the even case and `ν = 2n` in the odd case. Everything else
//! derives from the auxiliary functions
//!
//! ```text
//! h_k(t) = e_k √(m_k cosh²t − 1)
//! A(t)   = 1 + Σ_k sinh t / h_k(t)
//! ∏_k (1 + ξ h_k(t)) = Σ_k H_k(t) ξ^k
//! ```

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{central_diff, FD_STEP};
use crate::scalar::Real;

/// Evaluators clamp `|t|` to this bound so that `cosh`/`sinh` stay finite.
pub const T_CLAMP: f64 = 700.0;

/// `|A(t)|` below this is treated as a degenerate metric.
pub const DEGENERACY_EPS: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FamilyError {
    #[error("MassOutOfRange: m_{index} = {mass} must be strictly greater than 1")]
    MassOutOfRange { index: usize, mass: f64 },
    #[error("LengthMismatch: expected {expected} masses and signs, got {masses} masses and {signs} signs")]
    LengthMismatch {
        expected: usize,
        masses: usize,
        signs: usize,
    },
    #[error("BadSign: e_{index} = {sign} is not ±1")]
    BadSign { index: usize, sign: i64 },
    #[error("BadDegree: n must be at least 1")]
    BadDegree,
    #[error("IndexOutOfRange: index {index} outside {lo}..={hi}")]
    IndexOutOfRange { index: i64, lo: i64, hi: i64 },
    #[error("DegenerateMetric: A({t}) = {a} vanishes")]
    DegenerateMetric { t: f64, a: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    /// Extra integrals of degree `2n`, `ν = 2n − 1` masses.
    EvenDegree,
    /// Extra integrals of degree `2n + 1`, `ν = 2n` masses.
    OddDegree,
}

impl Parity {
    pub fn mass_count(self, n: usize) -> usize {
        match self {
            Parity::EvenDegree => 2 * n - 1,
            Parity::OddDegree => 2 * n,
        }
    }
}

/// Immutable, validated metric family.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricFamily {
    parity: Parity,
    n: usize,
    masses: Vec<f64>,
    signs: Vec<f64>,
}

impl MetricFamily {
    pub fn new(
        parity: Parity,
        n: usize,
        masses: Vec<f64>,
        signs: Vec<i64>,
    ) -> Result<Self, FamilyError> {
        if n == 0 {
            return Err(FamilyError::BadDegree);
        }
        let nu = parity.mass_count(n);
        if masses.len() != nu || signs.len() != nu {
            return Err(FamilyError::LengthMismatch {
                expected: nu,
                masses: masses.len(),
                signs: signs.len(),
            });
        }
        if let Some((i, &s)) = signs.iter().enumerate().find(|(_, &s)| s != 1 && s != -1) {
            return Err(FamilyError::BadSign {
                index: i + 1,
                sign: s,
            });
        }
        if let Some((i, &m)) = masses
            .iter()
            .enumerate()
            .find(|(_, &m)| !(m > 1.0) || !m.is_finite())
        {
            return Err(FamilyError::MassOutOfRange {
                index: i + 1,
                mass: m,
            });
        }
        Ok(Self {
            parity,
            n,
            masses,
            signs: signs.into_iter().map(|s| s as f64).collect(),
        })
    }

    /// Even-degree family with `n = 1`: the classical Koenigs metric.
    pub fn koenigs(mass: f64, sign: i64) -> Result<Self, FamilyError> {
        Self::new(Parity::EvenDegree, 1, vec![mass], vec![sign])
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of masses `ν`.
    pub fn nu(&self) -> usize {
        self.masses.len()
    }

    /// Degree of the extra integrals in the momenta.
    pub fn degree(&self) -> usize {
        match self.parity {
            Parity::EvenDegree => 2 * self.n,
            Parity::OddDegree => 2 * self.n + 1,
        }
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn signs(&self) -> Vec<i64> {
        self.signs.iter().map(|&s| s as i64).collect()
    }

    /// `h_k(t)` for a zero-based index, written as `e cosh t √(m − sech²t)` so
    /// that it never forms `cosh²t`.
    pub(crate) fn h_at<T: Real>(&self, k: usize, t: T) -> T {
        let c = t.cosh();
        let sech2 = T::cst(1.0) / (c * c);
        (c * (T::cst(self.masses[k]) - sech2).sqrt()).scale(self.signs[k])
    }

    /// All `h_k(t)`, in order.
    pub(crate) fn h_all<T: Real>(&self, t: T) -> Vec<T> {
        (0..self.nu()).map(|k| self.h_at(k, t)).collect()
    }

    /// `A(t) = 1 + Σ e_k tanh t / √(m_k − sech²t)`.
    pub(crate) fn profile<T: Real>(&self, t: T) -> T {
        let th = t.tanh();
        let c = t.cosh();
        let sech2 = T::cst(1.0) / (c * c);
        self.masses
            .iter()
            .zip(&self.signs)
            .fold(T::cst(1.0), |acc, (&m, &e)| {
                acc + (th / (T::cst(m) - sech2).sqrt()).scale(e)
            })
    }

    /// `h_k(t)` with a one-based index.
    pub fn eval_h(&self, k: usize, t: f64) -> Result<f64, FamilyError> {
        if k == 0 || k > self.nu() {
            return Err(FamilyError::IndexOutOfRange {
                index: k as i64,
                lo: 1,
                hi: self.nu() as i64,
            });
        }
        Ok(self.h_at(k - 1, clamp(t)))
    }

    pub fn eval_a(&self, t: f64) -> f64 {
        self.profile(clamp(t))
    }

    /// `A(−∞)` and `A(+∞)`, i.e. `1 ∓ Σ e_k/√m_k`.
    pub fn a_limits(&self) -> (f64, f64) {
        let s: f64 = self
            .masses
            .iter()
            .zip(&self.signs)
            .map(|(m, e)| e / m.sqrt())
            .sum();
        (1.0 - s, 1.0 + s)
    }

    /// `A'(t) = Σ_k (m_k − 1) cosh t / h_k³`.
    pub fn eval_a_prime(&self, t: f64) -> f64 {
        let t = clamp(t);
        let c = t.cosh();
        let sech2 = 1.0 / (c * c);
        self.masses
            .iter()
            .zip(&self.signs)
            .map(|(&m, &e)| e * (m - 1.0) * sech2 / (m - sech2).powf(1.5))
            .sum()
    }

    pub(crate) fn h_coeffs_at<T: Real>(&self, t: T) -> Vec<T> {
        expand_linear_factors(&self.h_all(t))
    }

    pub fn eval_h_coeffs(&self, t: f64) -> HCoefficients {
        let t = clamp(t);
        HCoefficients {
            t,
            values: self.h_coeffs_at(t),
        }
    }

    /// Residual of the derivative identity for `H_k`:
    /// `|D_t H_k − tanh t (k H_k + (k − ν − 2) H_{k−2}) − (A − 1)/cosh t · H_{k−1}|`
    /// with `D_t` a central difference of step [`FD_STEP`], divided by
    /// `max(1, Σ |right-hand terms|)` since `H_k` grows like `cosh^k t`.
    pub fn h_coeff_derivative_residual(&self, t: f64, k: usize) -> Result<f64, FamilyError> {
        let nu = self.nu();
        if k > nu {
            return Err(FamilyError::IndexOutOfRange {
                index: k as i64,
                lo: 0,
                hi: nu as i64,
            });
        }
        let dh = central_diff(|x| self.eval_h_coeffs(x).get(k as i64), t, FD_STEP);
        let hc = self.eval_h_coeffs(t);
        let ki = k as i64;
        let terms = [
            t.tanh() * ki as f64 * hc.get(ki),
            t.tanh() * (ki - nu as i64 - 2) as f64 * hc.get(ki - 2),
            (self.eval_a(t) - 1.0) / t.cosh() * hc.get(ki - 1),
        ];
        let scale = terms.iter().map(|x| x.abs()).sum::<f64>().max(1.0);
        Ok((dh - terms.iter().sum::<f64>()).abs() / scale)
    }

    /// Relative residual of `sinh t H_{ν−1} = (A − 1) H_ν`.
    pub fn top_identity_residual(&self, t: f64) -> f64 {
        let t = clamp(t);
        let hc = self.eval_h_coeffs(t);
        let nu = self.nu() as i64;
        let lhs = t.sinh() * hc.get(nu - 1);
        let rhs = (self.eval_a(t) - 1.0) * hc.get(nu);
        (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0)
    }

    /// Gaussian curvature `K = (sinh t A' − cosh t A) / (A³ cosh t)`.
    pub fn gaussian_curvature(&self, t: f64) -> Result<f64, FamilyError> {
        let t = clamp(t);
        Ok(self.curvature_r(t)? / t.cosh())
    }

    /// `R = (sinh t A' − cosh t A) / A³`, i.e. `K cosh t`.
    pub fn curvature_r(&self, t: f64) -> Result<f64, FamilyError> {
        let t = clamp(t);
        let a = self.nondegenerate_a(t)?;
        let ap = self.eval_a_prime(t);
        Ok((t.sinh() * ap - t.cosh() * a) / (a * a * a))
    }

    pub(crate) fn nondegenerate_a(&self, t: f64) -> Result<f64, FamilyError> {
        let a = self.eval_a(t);
        if a.abs() < DEGENERACY_EPS {
            Err(FamilyError::DegenerateMetric { t, a })
        } else {
            Ok(a)
        }
    }
}

pub(crate) fn clamp(t: f64) -> f64 {
    t.clamp(-T_CLAMP, T_CLAMP)
}

/// Coefficients of `∏ (1 + ξ r_k)` in increasing powers of `ξ`, by iterated
/// convolution.
pub fn expand_linear_factors<T: Real>(roots: &[T]) -> Vec<T> {
    let mut coeffs = Vec::with_capacity(roots.len() + 1);
    coeffs.push(T::cst(1.0));
    for &r in roots {
        coeffs.push(T::cst(0.0));
        for j in (1..coeffs.len()).rev() {
            coeffs[j] = coeffs[j] + r * coeffs[j - 1];
        }
    }
    coeffs
}

/// `H_0(t) … H_ν(t)` with zero padding outside `0..=ν`.
#[derive(Debug, Clone, PartialEq)]
pub struct HCoefficients {
    pub t: f64,
    pub values: Vec<f64>,
}

impl HCoefficients {
    pub fn get(&self, k: i64) -> f64 {
        if k < 0 {
            0.0
        } else {
            self.values.get(k as usize).copied().unwrap_or(0.0)
        }
    }

    pub fn nu(&self) -> usize {
        self.values.len() - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn koenigs() -> MetricFamily {
        MetricFamily::koenigs(2.0, 1).unwrap()
    }

    fn nu3() -> MetricFamily {
        MetricFamily::new(Parity::EvenDegree, 2, vec![2.0, 3.0, 5.0], vec![1, 1, -1]).unwrap()
    }

    #[test]
    fn construction_errors() {
        assert!(MetricFamily::new(Parity::OddDegree, 1, vec![3.0, 5.0], vec![1, -1]).is_ok());
        assert!(matches!(
            MetricFamily::koenigs(0.5, 1),
            Err(FamilyError::MassOutOfRange { index: 1, .. })
        ));
        assert!(matches!(
            MetricFamily::koenigs(1.0, 1),
            Err(FamilyError::MassOutOfRange { .. })
        ));
        assert!(matches!(
            MetricFamily::new(Parity::EvenDegree, 1, vec![2.0], vec![1, 1]),
            Err(FamilyError::LengthMismatch { expected: 1, .. })
        ));
        assert!(matches!(
            MetricFamily::koenigs(2.0, 0),
            Err(FamilyError::BadSign { .. })
        ));
        assert!(matches!(
            MetricFamily::new(Parity::EvenDegree, 0, vec![], vec![]),
            Err(FamilyError::BadDegree)
        ));
    }

    #[test]
    fn h_values() {
        assert!((koenigs().eval_h(1, 0.0).unwrap() - 1.0).abs() < 1e-15);
        let f = MetricFamily::koenigs(5.0, -1).unwrap();
        assert!((f.eval_h(1, 0.0).unwrap() + 2.0).abs() < 1e-15);
        assert!(f.eval_h(2, 0.0).is_err());
        assert!(f.eval_h(0, 0.0).is_err());
    }

    #[test]
    fn h_derivative_matches_closed_form() {
        let f = koenigs();
        let t = 0.7;
        let h = f.eval_h(1, t).unwrap();
        let fd = central_diff(|x| f.eval_h(1, x).unwrap(), t, 1e-5);
        assert!((fd - t.tanh() * (h + 1.0 / h)).abs() < 1e-8);
    }

    #[test]
    fn profile_values_and_limits() {
        let f = koenigs();
        assert_eq!(f.eval_a(0.0), 1.0);
        let (lo, hi) = f.a_limits();
        assert!((hi - (1.0 + 0.5f64.sqrt())).abs() < 1e-15);
        assert!((lo - (1.0 - 0.5f64.sqrt())).abs() < 1e-15);
        assert!((f.eval_a(40.0) - hi).abs() < 1e-12);
        let paired = MetricFamily::new(Parity::OddDegree, 1, vec![3.0, 3.0], vec![1, -1]).unwrap();
        for t in [-3.0, 0.2, 9.0] {
            assert!((paired.eval_a(t) - 1.0).abs() < 1e-15);
            assert!(paired.eval_a_prime(t).abs() < 1e-15);
        }
    }

    #[test]
    fn a_prime_against_finite_differences() {
        let f = koenigs();
        assert!((f.eval_a_prime(0.0) - 1.0).abs() < 1e-14);
        for t in [-2.5, -0.3, 0.0, 0.8, 4.0] {
            let fd = central_diff(|x| nu3().eval_a(x), t, 1e-5);
            assert!((fd - nu3().eval_a_prime(t)).abs() < 1e-7);
        }
    }

    #[test]
    fn h_coeffs_small_cases() {
        let f = koenigs();
        let hc = f.eval_h_coeffs(0.4);
        assert_eq!(hc.values.len(), 2);
        assert_eq!(hc.get(0), 1.0);
        assert_eq!(hc.get(1), f.eval_h(1, 0.4).unwrap());
        assert_eq!(hc.get(-1), 0.0);
        assert_eq!(hc.get(2), 0.0);
        let g = MetricFamily::new(Parity::OddDegree, 1, vec![3.0, 5.0], vec![1, -1]).unwrap();
        let hc = g.eval_h_coeffs(1.1);
        let prod = g.eval_h(1, 1.1).unwrap() * g.eval_h(2, 1.1).unwrap();
        assert!((hc.get(2) - prod).abs() < 1e-14 * prod.abs());
    }

    #[test]
    fn top_coefficient_identity() {
        let f = nu3();
        for t in [-1.7, 0.3, 2.2] {
            let hc = f.eval_h_coeffs(t);
            let lhs = t.sinh() * hc.get(2);
            let rhs = (f.eval_a(t) - 1.0) * hc.get(3);
            assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1.0));
            assert!(f.top_identity_residual(t) < 1e-12);
        }
    }

    #[test]
    fn derivative_identity_examples() {
        assert!(koenigs().h_coeff_derivative_residual(0.5, 1).unwrap() < 1e-7);
        assert!(koenigs().h_coeff_derivative_residual(0.5, 0).unwrap() < 1e-12);
        assert!(nu3().h_coeff_derivative_residual(-1.2, 2).unwrap() < 1e-7);
        assert!(nu3().h_coeff_derivative_residual(0.0, 4).is_err());
    }

    #[test]
    fn curvature_values() {
        let paired = MetricFamily::new(Parity::OddDegree, 1, vec![3.0, 3.0], vec![1, -1]).unwrap();
        for t in [-2.0, 0.0, 1.3] {
            assert!((paired.gaussian_curvature(t).unwrap() + 1.0).abs() < 1e-14);
        }
        assert!((koenigs().gaussian_curvature(0.0).unwrap() + 1.0).abs() < 1e-14);
        let f = nu3();
        let t = 0.9;
        let ratio = f.curvature_r(t).unwrap() / f.gaussian_curvature(t).unwrap();
        assert!((ratio - t.cosh()).abs() < 1e-12);
    }

    #[test]
    fn degenerate_profile_is_reported() {
        // A(0) = 1 and A(+∞) = 1 − 2/√2 < 0, so A has a root on (0, ∞).
        let f = MetricFamily::new(Parity::OddDegree, 1, vec![2.0, 2.0], vec![-1, -1]).unwrap();
        let (mut lo, mut hi) = (0.0, 10.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f.eval_a(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!(matches!(
            f.gaussian_curvature(lo),
            Err(FamilyError::DegenerateMetric { .. })
        ));
    }

    #[test]
    fn extreme_t_is_finite() {
        let f = nu3();
        for t in [-1e4, -700.0, 700.0, 1e4] {
            assert!(f.eval_a(t).is_finite());
            assert!(f.eval_h(1, t).unwrap().is_finite());
            assert!(f.eval_a_prime(t).is_finite());
        }
    }
}
