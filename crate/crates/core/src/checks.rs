//! The identity suite run by `check`: every closed form of the crate checked
//! on seeded samples against its defining relation.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::brackets::{verify_commutation, verify_poisson_algebra};
use crate::family::MetricFamily;
use crate::geometry::{sigma_factor, sigma_via_coeffs};
use crate::integrals::{gen_context, gen_pde_residuals, moment_polynomial, ode_residuals, verify_product_identity};
use crate::numerics::{stream, uniform, Tolerances};

/// `t` interval of the pointwise identity samples.
pub const T_SAMPLE_RANGE: (f64, f64) = (-3.0, 3.0);
/// `ξ` interval of the generating-function samples; it stays below
/// `cosh²t ≥ 1`, so `1 + τ` never vanishes.
pub const XI_SAMPLE_RANGE: (f64, f64) = (-2.0, 0.9);
/// `t` interval of the conformal-factor comparison.
pub const SIGMA_CHECK_RANGE: (f64, f64) = (-10.0, 10.0);

/// Stream offsets so the suites draw from disjoint index ranges.
const T_STREAM: u64 = 1 << 40;
const XI_STREAM: u64 = 2 << 40;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CheckResult {
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckResult {
    pub fn new(max_residual: f64, tolerance: f64) -> Self {
        Self {
            max_residual,
            tolerance,
            pass: max_residual <= tolerance,
        }
    }
}

pub type CheckReport = BTreeMap<String, CheckResult>;

pub fn all_pass(report: &CheckReport) -> bool {
    report.values().all(|r| r.pass)
}

/// `samples` seeded draws of `t`.
pub fn sample_t(seed: u64, samples: usize, range: (f64, f64)) -> Vec<f64> {
    (0..samples as u64)
        .map(|i| uniform(&mut stream(seed, T_STREAM + i), range))
        .collect()
}

/// `samples` seeded `(t, ξ)` pairs.
pub fn sample_t_xi(seed: u64, samples: usize) -> Vec<(f64, f64)> {
    (0..samples as u64)
        .map(|i| {
            let mut rng = stream(seed, XI_STREAM + i);
            let t = uniform(&mut rng, T_SAMPLE_RANGE);
            (t, uniform(&mut rng, XI_SAMPLE_RANGE))
        })
        .collect()
}

fn max_of(v: impl ParallelIterator<Item = f64>) -> f64 {
    v.map(|x| if x.is_nan() { f64::INFINITY } else { x })
        .reduce(|| 0.0, f64::max)
}

pub fn max_ode_residual(family: &MetricFamily, seed: u64, samples: usize) -> f64 {
    max_of(
        sample_t(seed, samples, T_SAMPLE_RANGE)
            .into_par_iter()
            .map(|t| ode_residuals(family, t).max()),
    )
}

pub fn max_gen_pde_residual(family: &MetricFamily, seed: u64, samples: usize) -> f64 {
    max_of(sample_t_xi(seed, samples).into_par_iter().map(|(t, xi)| {
        gen_pde_residuals(family, t, xi).map_or(f64::INFINITY, |(a, b)| a.max(b))
    }))
}

/// Worst of the relative `Σ_gf` error against `(1 − ξ)∏(1 − m_k ξ)` over
/// seeded `(t, ξ)` and the absolute values `|Σ(1)|`, `|Σ(1/m_k)|`.
pub fn max_moment_gf_error(family: &MetricFamily, seed: u64, samples: usize) -> f64 {
    let sampled = max_of(sample_t_xi(seed, samples).into_par_iter().map(|(t, xi)| {
        let exact = moment_polynomial(family.masses(), xi);
        gen_context(family, t, xi).map_or(f64::INFINITY, |c| {
            (c.sigma - exact).abs() / exact.abs().max(1.0)
        })
    }));
    let roots = sample_t(seed, samples.min(8).max(1), T_SAMPLE_RANGE);
    let at_roots = std::iter::once(1.0)
        .chain(family.masses().iter().map(|m| 1.0 / m))
        .flat_map(|xi| roots.iter().map(move |&t| (t, xi)))
        .map(|(t, xi)| gen_context(family, t, xi).map_or(f64::INFINITY, |c| c.sigma.abs()))
        .fold(0.0, f64::max);
    sampled.max(at_roots)
}

pub fn max_h_derivative_residual(family: &MetricFamily, seed: u64, samples: usize) -> f64 {
    max_of(sample_t(seed, samples, T_SAMPLE_RANGE).into_par_iter().map(|t| {
        (0..=family.nu())
            .map(|k| family.h_coeff_derivative_residual(t, k).unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max)
    }))
}

pub fn max_top_identity_residual(family: &MetricFamily, seed: u64, samples: usize) -> f64 {
    max_of(
        sample_t(seed, samples, T_SAMPLE_RANGE)
            .into_par_iter()
            .map(|t| family.top_identity_residual(t)),
    )
}

pub fn max_sigma_form_error(family: &MetricFamily, seed: u64, samples: usize) -> f64 {
    max_of(
        sample_t(seed, samples, SIGMA_CHECK_RANGE)
            .into_par_iter()
            .map(|t| {
                let (a, b) = (sigma_factor(family, t), sigma_via_coeffs(family, t));
                (a - b).abs() / a.abs().max(1.0)
            }),
    )
}

/// Runs the whole suite with `samples` draws per check.
pub fn run_checks(family: &MetricFamily, seed: u64, samples: usize, tol: &Tolerances) -> CheckReport {
    let entries: [(&str, f64); 9] = [
        ("ode", max_ode_residual(family, seed, samples)),
        ("gen_pde", max_gen_pde_residual(family, seed, samples)),
        ("moment_gf", max_moment_gf_error(family, seed, samples)),
        ("product", verify_product_identity(family, samples, seed)),
        ("commutation", verify_commutation(family, samples, seed).max_commutation()),
        ("poisson_algebra", verify_poisson_algebra(family, samples, seed)),
        ("h_coeff_derivative", max_h_derivative_residual(family, seed, samples)),
        ("h_coeff_top", max_top_identity_residual(family, seed, samples)),
        ("sigma_forms", max_sigma_form_error(family, seed, samples)),
    ];
    entries
        .into_iter()
        .map(|(name, r)| (name.to_string(), CheckResult::new(r, tol.get(name))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn koenigs_suite_passes() {
        let f = MetricFamily::koenigs(2.0, 1).unwrap();
        let report = run_checks(&f, 3, 30, &Tolerances::default());
        assert_eq!(report.len(), 9);
        assert!(all_pass(&report), "{report:#?}");
    }

    #[test]
    fn tight_tolerance_fails() {
        let f = MetricFamily::koenigs(2.0, 1).unwrap();
        let mut tol = Tolerances::default();
        tol.set("ode", 0.0);
        assert!(!all_pass(&run_checks(&f, 3, 10, &tol)));
    }

    #[test]
    fn samples_are_reproducible() {
        assert_eq!(sample_t(5, 10, T_SAMPLE_RANGE), sample_t(5, 10, T_SAMPLE_RANGE));
        assert!(sample_t_xi(5, 100)
            .iter()
            .all(|&(t, xi)| (-3.0..=3.0).contains(&t) && xi < 0.9 + 1e-15));
    }
}
