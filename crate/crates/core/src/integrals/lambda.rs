//! The λ-table: the coefficient functions that build `S` and `T`.
//!
//! Even degree (`ν = 2n − 1`): entries `λ_{−2} = 0, λ_{−1} = 1, λ_0 … λ_{2n−1},
//! λ_{2n} = 0`. Odd degree (`ν = 2n`): `λ_{−1} = 1, λ_0 … λ_{2n}, λ_{2n+1} = 0`.

use crate::family::{MetricFamily, Parity};
use crate::numerics::FD_STEP;
use crate::scalar::Real;

/// Which closed form to use for the odd-index entries.
///
/// `Consistent` is the form obtained by expanding the generating functions
/// `L` and `M`; it solves the ODE system for every family. `AsPrinted`
/// reproduces the literal index ranges of the published definitions (no
/// alternating sign in the even-case inner sum, inner sum starting at `l = 1`
/// and a truncated first sum for `λ_{2n−1}` in the odd case). It coincides
/// with `Consistent` for even `n ≤ 2` and fails the ODE system otherwise; it
/// is kept so the discrepancy stays testable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LambdaVariant {
    #[default]
    Consistent,
    AsPrinted,
}

/// λ values at one `t`, stored with an index offset.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaValues<T> {
    lo: i64,
    values: Vec<T>,
}

impl<T: Real> LambdaValues<T> {
    fn zeroed(lo: i64, hi: i64) -> Self {
        Self {
            lo,
            values: vec![T::cst(0.0); (hi - lo + 1) as usize],
        }
    }

    /// `λ_j`, zero outside the stored range.
    pub fn get(&self, j: i64) -> T {
        let i = j - self.lo;
        if i < 0 {
            T::cst(0.0)
        } else {
            self.values.get(i as usize).copied().unwrap_or(T::cst(0.0))
        }
    }

    fn set(&mut self, j: i64, v: T) {
        let i = (j - self.lo) as usize;
        self.values[i] = v;
    }

    pub(crate) fn shift(&mut self, j: i64, delta: f64) {
        let i = j - self.lo;
        if i >= 0 && (i as usize) < self.values.len() {
            let v = self.values[i as usize];
            self.values[i as usize] = v + T::cst(delta);
        }
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.values.len() as i64 - 1
    }

    pub fn map<U>(&self, f: impl Fn(T) -> U) -> LambdaValues<U> {
        LambdaValues {
            lo: self.lo,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }
}

/// The λ-table at a given `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaTable {
    pub t: f64,
    pub parity: Parity,
    pub n: usize,
    pub values: LambdaValues<f64>,
}

impl LambdaTable {
    pub fn get(&self, j: i64) -> f64 {
        self.values.get(j)
    }

    /// Index range `(lo, hi)` including the padding entries.
    pub fn range(&self) -> (i64, i64) {
        (self.values.lo(), self.values.hi())
    }
}

pub(crate) fn binomial(n: i64, k: i64) -> f64 {
    if k < 0 || n < 0 || k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn alt(l: i64) -> f64 {
    if l % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Closed-form λ values, generic over the scalar so that the same code gives
/// exact `t`-derivatives on dual numbers.
pub(crate) fn lambda_values<T: Real>(
    family: &MetricFamily,
    t: T,
    variant: LambdaVariant,
) -> LambdaValues<T> {
    let n = family.n() as i64;
    let hc = family.h_coeffs_at(t);
    let h = |i: i64| -> T {
        if i < 0 {
            T::cst(0.0)
        } else {
            hc.get(i as usize).copied().unwrap_or(T::cst(0.0))
        }
    };
    let c = t.cosh();
    let s = t.sinh();
    let printed = variant == LambdaVariant::AsPrinted;

    match family.parity() {
        Parity::EvenDegree => {
            let mut lam = LambdaValues::zeroed(-2, 2 * n);
            lam.set(-1, T::cst(1.0));
            for k in 0..n {
                let mut acc = T::cst(0.0);
                for l in 0..=k {
                    let w = alt(l) * binomial(n - 1 - l, n - 1 - k);
                    acc = acc + (h(2 * l + 1) + s * h(2 * l)).scale(w);
                }
                lam.set(2 * k, acc.scale(alt(k + 1)) / c.powi((2 * k + 1) as u32));
            }
            for k in 1..=n {
                let mut first = T::cst(0.0);
                for l in 0..=k {
                    first = first + h(2 * l).scale(alt(l) * binomial(n - l, n - k));
                }
                let mut second = T::cst(0.0);
                for l in 0..k {
                    let sign = if printed && k < n { 1.0 } else { alt(l) };
                    second = second + h(2 * l + 1).scale(sign * binomial(n - 1 - l, n - k));
                }
                lam.set(
                    2 * k - 1,
                    (first - s * second).scale(alt(k)) / c.powi((2 * k) as u32),
                );
            }
            lam
        }
        Parity::OddDegree => {
            let mut lam = LambdaValues::zeroed(-1, 2 * n + 1);
            lam.set(-1, T::cst(1.0));
            for k in 0..=n {
                let mut acc = T::cst(0.0);
                for l in 0..=k {
                    let w = alt(l) * binomial(n - l, n - k);
                    acc = acc + (h(2 * l + 1) + s * h(2 * l)).scale(w);
                }
                lam.set(2 * k, acc.scale(alt(k + 1)) / c.powi((2 * k + 1) as u32));
            }
            for k in 1..=n {
                let first_top = if printed && k == n { n - 1 } else { k };
                let mut first = T::cst(0.0);
                for l in 0..=first_top {
                    first = first + h(2 * l).scale(alt(l) * binomial(n - l, n - k));
                }
                let second_start = if printed { 1 } else { 0 };
                let mut second = T::cst(0.0);
                for l in second_start..k {
                    second = second + h(2 * l + 1).scale(alt(l) * binomial(n - 1 - l, n - k));
                }
                lam.set(
                    2 * k - 1,
                    (first - s * second).scale(alt(k)) / c.powi((2 * k) as u32),
                );
            }
            lam
        }
    }
}

/// Absolute residuals of the two λ-ODE families, one entry per `k ∈ 0..=n`.
///
/// Even degree:
/// ```text
/// (a) cosh²t λ'_{2k−1} = −A λ_{2k−2}
/// (b) cosh²t λ'_{2k}   = λ'_{2k−2} − tanh t λ_{2k−2} − A λ_{2k−1}
/// ```
/// Odd degree:
/// ```text
/// (a) cosh²t λ'_{2k}   = −A λ_{2k−1}
/// (b) cosh²t λ'_{2k+1} = λ'_{2k−1} − tanh t λ_{2k−1} − A λ_{2k}
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct OdeResiduals {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl OdeResiduals {
    pub fn max(&self) -> f64 {
        self.a.iter().chain(&self.b).fold(0.0, |m, &r| m.max(r))
    }

    /// Flattened `[a_0, b_0, a_1, b_1, …]`.
    pub fn to_vec(&self) -> Vec<f64> {
        self.a
            .iter()
            .zip(&self.b)
            .flat_map(|(&a, &b)| [a, b])
            .collect()
    }
}

pub(crate) fn ode_residuals_from(
    family: &MetricFamily,
    t: f64,
    table: impl Fn(f64) -> LambdaValues<f64>,
) -> OdeResiduals {
    let n = family.n() as i64;
    let lam = table(t);
    let plus = table(t + FD_STEP);
    let minus = table(t - FD_STEP);
    let d = |j: i64| (plus.get(j) - minus.get(j)) / (2.0 * FD_STEP);
    let c2 = t.cosh() * t.cosh();
    let a = family.eval_a(t);
    let th = t.tanh();

    let mut res = OdeResiduals {
        a: Vec::with_capacity(n as usize + 1),
        b: Vec::with_capacity(n as usize + 1),
    };
    for k in 0..=n {
        let (ra, rb) = match family.parity() {
            Parity::EvenDegree => (
                c2 * d(2 * k - 1) + a * lam.get(2 * k - 2),
                c2 * d(2 * k) - d(2 * k - 2) + th * lam.get(2 * k - 2) + a * lam.get(2 * k - 1),
            ),
            Parity::OddDegree => (
                c2 * d(2 * k) + a * lam.get(2 * k - 1),
                c2 * d(2 * k + 1) - d(2 * k - 1) + th * lam.get(2 * k - 1) + a * lam.get(2 * k),
            ),
        };
        res.a.push(ra.abs());
        res.b.push(rb.abs());
    }
    res
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(0, 0), 1.0);
        assert_eq!(binomial(3, 4), 0.0);
        assert_eq!(binomial(3, -1), 0.0);
    }

    #[test]
    fn koenigs_entries_at_zero() {
        let f = MetricFamily::koenigs(2.0, 1).unwrap();
        let lam = lambda_values(&f, 0.0, LambdaVariant::Consistent);
        assert!((lam.get(0) + 1.0).abs() < 1e-15);
        assert!((lam.get(1) + 1.0).abs() < 1e-15);
        assert_eq!(lam.get(-1), 1.0);
        assert_eq!(lam.get(-2), 0.0);
        assert_eq!(lam.get(2), 0.0);
        assert_eq!((lam.lo(), lam.hi()), (-2, 2));
    }

    #[test]
    fn koenigs_closed_forms() {
        for &(m, e) in &[(2.0, 1), (7.5, -1), (1.01, 1)] {
            let f = MetricFamily::koenigs(m, e).unwrap();
            for &t in &[-2.3, -0.1, 0.0, 0.9, 3.1] {
                let lam = lambda_values(&f, t, LambdaVariant::Consistent);
                let h = f.eval_h(1, t).unwrap();
                let (c, s) = (f64::cosh(t), f64::sinh(t));
                let l0 = -(h + s) / c;
                let l1 = (s * h - 1.0) / (c * c);
                assert!((lam.get(0) - l0).abs() <= 1e-14 * l0.abs().max(1.0));
                assert!((lam.get(1) - l1).abs() <= 1e-14 * l1.abs().max(1.0));
            }
        }
    }

    #[test]
    fn odd_padding() {
        let f = MetricFamily::new(Parity::OddDegree, 2, vec![4.0, 3.0, 2.0, 6.0], vec![1, 1, -1, -1])
            .unwrap();
        let lam = lambda_values(&f, 0.3, LambdaVariant::Consistent);
        assert_eq!((lam.lo(), lam.hi()), (-1, 5));
        assert_eq!(lam.get(-1), 1.0);
        assert_eq!(lam.get(5), 0.0);
    }
}
