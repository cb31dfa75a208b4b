//! Canonical Poisson brackets on `(t, y, P_t, P_y)`.
//!
//! Convention: `{f, g} = Σ_q (∂_q f ∂_p g − ∂_p f ∂_q g)`, so `{t, P_t} = 1`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::family::{FamilyError, MetricFamily, DEGENERACY_EPS};
use crate::integrals::{moments, IntegralSystem, PhasePoint};
use crate::numerics::{Exclusion, SamplerSpec, BRACKET_FD_STEP};
use crate::scalar::{Dual, Real};

/// Sign relating the finite-difference `{S₊, S₋}` to the closed moment form
/// `−2 Σ (k+1) σ_{k+1} H^{N−1−k} P_y^{2k+1}` under the convention above.
/// Fixed once on the Koenigs metric, see [`koenigs_algebra_sign`].
pub const ALGEBRA_SIGN: f64 = -1.0;

/// `|P_y|` below which phase points are rejected in the algebra check.
pub const ALGEBRA_MIN_PY: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Observable {
    H,
    Py,
    S1,
    S2,
    Splus,
    Sminus,
}

impl Observable {
    pub const ALL: [Observable; 6] = [
        Observable::H,
        Observable::Py,
        Observable::S1,
        Observable::S2,
        Observable::Splus,
        Observable::Sminus,
    ];

    pub fn eval(self, system: &IntegralSystem<'_>, p: &PhasePoint) -> Result<f64, FamilyError> {
        let v = system.evaluate(p)?;
        Ok(match self {
            Observable::H => v.h,
            Observable::Py => v.py,
            Observable::S1 => v.s1,
            Observable::S2 => v.s2,
            Observable::Splus => v.splus,
            Observable::Sminus => v.sminus,
        })
    }

    /// Value and the four partials `(∂_t, ∂_y, ∂_{P_t}, ∂_{P_y})`, exact up to
    /// round-off.
    pub fn gradient(
        self,
        system: &IntegralSystem<'_>,
        p: &PhasePoint,
    ) -> Result<(f64, [f64; 4]), FamilyError> {
        let a = system.family().eval_a(p.t);
        if a.abs() < DEGENERACY_EPS {
            return Err(FamilyError::DegenerateMetric { t: p.t, a });
        }
        let x = p.to_array();
        let mut grad = [0.0; 4];
        let mut value = 0.0;
        for (i, g) in grad.iter_mut().enumerate() {
            let c: [Dual; 4] =
                std::array::from_fn(|j| Dual::new(x[j], if i == j { 1.0 } else { 0.0 }));
            let r = system.raw(c[0], c[1], c[2], c[3]);
            let d = match self {
                Observable::H => r.h,
                Observable::Py => c[3],
                Observable::S1 => r.s1,
                Observable::S2 => r.s2,
                Observable::Splus => r.splus,
                Observable::Sminus => r.sminus,
            };
            value = d.value();
            *g = d.d;
        }
        Ok((value, grad))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Scheme {
    FiniteDifference(f64),
    Analytic,
}

impl Default for Scheme {
    fn default() -> Self {
        Scheme::FiniteDifference(BRACKET_FD_STEP)
    }
}

fn bracket_from_grads(df: &[f64; 4], dg: &[f64; 4]) -> f64 {
    (df[0] * dg[2] - df[2] * dg[0]) + (df[1] * dg[3] - df[3] * dg[1])
}

/// Central-difference gradient of an arbitrary phase-space function.
pub fn fd_gradient<E>(
    f: impl Fn(&PhasePoint) -> Result<f64, E>,
    p: &PhasePoint,
    h: f64,
) -> Result<[f64; 4], E> {
    let x = p.to_array();
    let mut grad = [0.0; 4];
    for (i, g) in grad.iter_mut().enumerate() {
        let mut up = x;
        let mut down = x;
        up[i] += h;
        down[i] -= h;
        let fu = f(&PhasePoint::from_array(up))?;
        let fd = f(&PhasePoint::from_array(down))?;
        *g = (fu - fd) / (2.0 * h);
    }
    Ok(grad)
}

/// `{f, g}` for arbitrary closures, by central differences with step `h`.
pub fn poisson_bracket_fd<E>(
    f: impl Fn(&PhasePoint) -> Result<f64, E>,
    g: impl Fn(&PhasePoint) -> Result<f64, E>,
    p: &PhasePoint,
    h: f64,
) -> Result<f64, E> {
    let df = fd_gradient(f, p, h)?;
    let dg = fd_gradient(g, p, h)?;
    Ok(bracket_from_grads(&df, &dg))
}

/// `{f, g}` at `p` for the integrals of `system`.
pub fn poisson_bracket(
    system: &IntegralSystem<'_>,
    f: Observable,
    g: Observable,
    p: &PhasePoint,
    scheme: Scheme,
) -> Result<f64, FamilyError> {
    match scheme {
        Scheme::FiniteDifference(h) => {
            poisson_bracket_fd(|q| f.eval(system, q), |q| g.eval(system, q), p, h)
        }
        Scheme::Analytic => {
            let (_, df) = f.gradient(system, p)?;
            let (_, dg) = g.gradient(system, p)?;
            Ok(bracket_from_grads(&df, &dg))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct BracketReport {
    pub max_abs_HS1: f64,
    pub max_abs_HS2: f64,
    pub max_rel_algebra: f64,
    pub samples: usize,
    pub seed: u64,
}

impl BracketReport {
    pub fn max_commutation(&self) -> f64 {
        self.max_abs_HS1.max(self.max_abs_HS2)
    }
}

fn par_max(samples: usize, f: impl Fn(u64) -> f64 + Sync + Send) -> f64 {
    (0..samples as u64)
        .into_par_iter()
        .map(f)
        .reduce(|| 0.0, |a, b| if a.is_nan() || b.is_nan() { f64::NAN } else { a.max(b) })
}

/// Normalized `|{H, S₁}|` and `|{H, S₂}|` at one point.
fn commutation_at(system: &IntegralSystem<'_>, p: &PhasePoint, scheme: Scheme) -> (f64, f64) {
    let eval = || -> Result<(f64, f64), FamilyError> {
        let v = system.evaluate(p)?;
        let norm = v.s1.abs() + v.s2.abs() + 1.0;
        let b1 = poisson_bracket(system, Observable::H, Observable::S1, p, scheme)?;
        let b2 = poisson_bracket(system, Observable::H, Observable::S2, p, scheme)?;
        Ok((b1.abs() / norm, b2.abs() / norm))
    };
    eval().unwrap_or((f64::INFINITY, f64::INFINITY))
}

/// Commutation check of an arbitrary integral system (e.g. one with a
/// corrupted λ entry) over `samples` seeded points of the verification box.
pub fn verify_commutation_with(
    system: &IntegralSystem<'_>,
    samples: usize,
    seed: u64,
    scheme: Scheme,
) -> BracketReport {
    let spec = SamplerSpec::verification(seed);
    let pairs: Vec<(f64, f64)> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let p = spec.sample_phase(i).expect("verification box has no exclusion");
            commutation_at(system, &p, scheme)
        })
        .collect();
    let fold = |sel: fn(&(f64, f64)) -> f64| pairs.iter().map(sel).fold(0.0, f64::max);
    BracketReport {
        max_abs_HS1: fold(|p| p.0),
        max_abs_HS2: fold(|p| p.1),
        max_rel_algebra: algebra_error(system, samples, seed),
        samples,
        seed,
    }
}

/// Finite-difference commutation report for the family's own integrals.
pub fn verify_commutation(family: &MetricFamily, samples: usize, seed: u64) -> BracketReport {
    verify_commutation_with(&IntegralSystem::new(family), samples, seed, Scheme::default())
}

/// `{S₊, S₋}` and its closed moment form (sign included) at one point.
pub fn algebra_pair(system: &IntegralSystem<'_>, p: &PhasePoint) -> Result<(f64, f64, f64), FamilyError> {
    let mv = moments(system.family());
    let v = system.evaluate(p)?;
    let fd = poisson_bracket(system, Observable::Splus, Observable::Sminus, p, Scheme::default())?;
    let closed = ALGEBRA_SIGN * mv.algebra_form(v.h, p.py);
    Ok((fd, closed, mv.algebra_scale(v.h, p.py)))
}

fn algebra_error(system: &IntegralSystem<'_>, samples: usize, seed: u64) -> f64 {
    let spec = SamplerSpec::verification(seed).with_exclusion(Exclusion::MinAbsPy(ALGEBRA_MIN_PY));
    par_max(samples, |i| match spec.sample_phase(i) {
        Ok(p) => match algebra_pair(system, &p) {
            Ok((fd, closed, scale)) => (fd - closed).abs() / scale.max(f64::MIN_POSITIVE),
            Err(_) => f64::INFINITY,
        },
        Err(_) => f64::INFINITY,
    })
}

/// Worst relative error between the finite-difference `{S₊, S₋}` and the
/// closed moment form, over points with `|P_y| > 0.2`.
pub fn verify_poisson_algebra(family: &MetricFamily, samples: usize, seed: u64) -> f64 {
    algebra_error(&IntegralSystem::new(family), samples, seed)
}

/// Largest `|{S₊, S₋}|` along `rays` random rays as `P_y` shrinks through
/// `1e−2, 1e−3, 1e−4`. A formal `P_y^{−1}` term would make this blow up.
pub fn algebra_near_zero_py(family: &MetricFamily, rays: usize, seed: u64) -> f64 {
    let system = IntegralSystem::new(family);
    let spec = SamplerSpec::verification(seed);
    par_max(rays, |i| {
        let p = spec.sample_phase(i).expect("verification box has no exclusion");
        [1e-2, 1e-3, 1e-4]
            .iter()
            .map(|&py| {
                let q = PhasePoint::new(p.t, p.y, p.pt, py);
                poisson_bracket(&system, Observable::Splus, Observable::Sminus, &q, Scheme::default())
                    .map(f64::abs)
                    .unwrap_or(f64::INFINITY)
            })
            .fold(0.0, f64::max)
    })
}

/// Ratio `{S₊, S₋} / (closed form)` on the Koenigs metric `m = 2` at a fixed
/// point; it is the global sign used by the algebra check.
pub fn koenigs_algebra_sign() -> f64 {
    let f = MetricFamily::koenigs(2.0, 1).expect("valid Koenigs mass");
    let system = IntegralSystem::new(&f);
    let p = PhasePoint::new(0.3, 0.2, 0.5, 0.7);
    let mv = moments(&f);
    let v = system.evaluate(&p).expect("A > 0 on the Koenigs metric");
    let fd = poisson_bracket(&system, Observable::Splus, Observable::Sminus, &p, Scheme::default())
        .expect("A > 0 on the Koenigs metric");
    (fd / mv.algebra_form(v.h, p.py)).signum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::Parity;

    fn koenigs() -> MetricFamily {
        MetricFamily::koenigs(2.0, 1).unwrap()
    }

    #[test]
    fn canonical_pairs() {
        let f = koenigs();
        let sys = IntegralSystem::new(&f);
        let p = PhasePoint::new(0.1, 0.2, 0.3, 0.4);
        let t = |q: &PhasePoint| Ok::<_, FamilyError>(q.t);
        let pt = |q: &PhasePoint| Ok::<_, FamilyError>(q.pt);
        assert!((poisson_bracket_fd(t, pt, &p, 1e-6).unwrap() - 1.0).abs() < 1e-9);
        let hh = poisson_bracket(&sys, Observable::H, Observable::H, &p, Scheme::Analytic).unwrap();
        assert_eq!(hh, 0.0);
    }

    #[test]
    fn py_commutes_with_h() {
        let f = koenigs();
        let sys = IntegralSystem::new(&f);
        let p = PhasePoint::new(-0.7, 1.2, 0.3, 0.9);
        for scheme in [Scheme::Analytic, Scheme::default()] {
            let b = poisson_bracket(&sys, Observable::Py, Observable::H, &p, scheme).unwrap();
            assert!(b.abs() < 1e-10);
        }
    }

    #[test]
    fn analytic_gradient_of_h() {
        let f = koenigs();
        let sys = IntegralSystem::new(&f);
        let p = PhasePoint::new(0.4, 0.0, 0.6, -0.5);
        let (v, g) = Observable::H.gradient(&sys, &p).unwrap();
        let a = f.eval_a(p.t);
        let c = p.t.cosh();
        assert!((v - (p.pt * p.pt / (a * a) + p.py * p.py / (c * c))).abs() < 1e-15);
        assert!((g[2] - 2.0 * p.pt / (a * a)).abs() < 1e-14);
        assert!((g[3] - 2.0 * p.py / (c * c)).abs() < 1e-14);
        assert_eq!(g[1], 0.0);
    }

    #[test]
    fn sign_is_frozen_on_koenigs() {
        assert_eq!(koenigs_algebra_sign(), ALGEBRA_SIGN);
    }

    #[test]
    fn commutation_examples() {
        assert!(verify_commutation(&koenigs(), 50, 1).max_commutation() < 1e-6);
        let odd = MetricFamily::new(Parity::OddDegree, 1, vec![3.0, 5.0], vec![1, -1]).unwrap();
        assert!(verify_commutation(&odd, 50, 2).max_commutation() < 1e-6);
    }

    #[test]
    fn corrupted_table_is_detected() {
        let f = koenigs();
        let bad = IntegralSystem::new(&f).with_perturbation(1, 1e-3);
        let r = verify_commutation_with(&bad, 50, 3, Scheme::default());
        assert!(r.max_commutation() > 1e-4, "{r:?}");
    }

    #[test]
    fn degenerate_metric_propagates() {
        let f = MetricFamily::new(Parity::OddDegree, 1, vec![2.0, 2.0], vec![-1, -1]).unwrap();
        let sys = IntegralSystem::new(&f);
        // find the root of A on (0, ∞) by bisection
        let (mut lo, mut hi) = (0.0, 10.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f.eval_a(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let p = PhasePoint::new(lo, 0.0, 0.3, 0.2);
        assert!(matches!(
            poisson_bracket(&sys, Observable::H, Observable::S1, &p, Scheme::Analytic),
            Err(FamilyError::DegenerateMetric { .. })
        ));
    }
}
