//! Moments `σ_k`: the constant coefficients of `S₊S₋` in powers of `H` and
//! `P_y²`, generated by `Σ(ξ) = (1 − ξ) ∏ (1 − m_k ξ)`.

use rayon::prelude::*;

use crate::family::{expand_linear_factors, MetricFamily, Parity};
use crate::numerics::SamplerSpec;

use super::IntegralSystem;

#[derive(Debug, Clone, PartialEq)]
pub struct MomentVector {
    /// `σ_0 … σ_N` with `N = 2n` (even) or `2n + 1` (odd).
    pub sigma: Vec<f64>,
    /// Elementary symmetric functions `(M)_0 … (M)_ν` of the masses.
    pub m_sym: Vec<f64>,
}

impl MomentVector {
    /// `Σ_k σ_k H^{N−k} q^k` with `q = P_y²`, by homogeneous Horner.
    pub fn product_form(&self, h: f64, py: f64) -> f64 {
        let q = py * py;
        let mut acc = self.sigma[0];
        let mut qpow = 1.0;
        for &s in &self.sigma[1..] {
            qpow *= q;
            acc = acc * h + s * qpow;
        }
        acc
    }

    /// `Σ_k |σ_k H^{N−k} P_y^{2k}|`, the natural magnitude of `product_form`.
    pub fn product_scale(&self, h: f64, py: f64) -> f64 {
        let n = self.sigma.len() - 1;
        self.sigma
            .iter()
            .enumerate()
            .map(|(k, s)| (s * h.powi((n - k) as i32) * py.powi(2 * k as i32)).abs())
            .sum()
    }

    /// `−2 Σ_{k=0}^{N−1} (k+1) σ_{k+1} H^{N−1−k} P_y^{2k+1}`: the bracket
    /// `{S₊, S₋}` in the convention where `{q, p} = −1`.
    pub fn algebra_form(&self, h: f64, py: f64) -> f64 {
        let n = self.sigma.len() - 1;
        -2.0 * (0..n)
            .map(|k| {
                (k + 1) as f64
                    * self.sigma[k + 1]
                    * h.powi((n - 1 - k) as i32)
                    * py.powi(2 * k as i32 + 1)
            })
            .sum::<f64>()
    }

    pub fn algebra_scale(&self, h: f64, py: f64) -> f64 {
        let n = self.sigma.len() - 1;
        2.0 * (0..n)
            .map(|k| {
                ((k + 1) as f64
                    * self.sigma[k + 1]
                    * h.powi((n - 1 - k) as i32)
                    * py.powi(2 * k as i32 + 1))
                .abs()
            })
            .sum::<f64>()
    }
}

/// `σ_0 = 1`, `σ_k = (−1)^k [(M)_k + (M)_{k−1}]` for `1 ≤ k ≤ ν`, and
/// `σ_{ν+1} = (−1)^{ν+1} ∏ m_k`.
pub fn moments(family: &MetricFamily) -> MomentVector {
    let m_sym = expand_linear_factors(family.masses());
    let nu = family.nu();
    let mut sigma = Vec::with_capacity(nu + 2);
    sigma.push(1.0);
    for k in 1..=nu {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sigma.push(sign * (m_sym[k] + m_sym[k - 1]));
    }
    let top_sign = if (nu + 1) % 2 == 0 { 1.0 } else { -1.0 };
    sigma.push(top_sign * m_sym[nu]);
    debug_assert_eq!(
        sigma.len() - 1,
        match family.parity() {
            Parity::EvenDegree => 2 * family.n(),
            Parity::OddDegree => 2 * family.n() + 1,
        }
    );
    MomentVector { sigma, m_sym }
}

/// `(1 − ξ) ∏ (1 − m_k ξ)` evaluated as a product.
pub fn moment_polynomial(masses: &[f64], xi: f64) -> f64 {
    masses.iter().fold(1.0 - xi, |acc, m| acc * (1.0 - m * xi))
}

/// Worst relative error of `S₊S₋ = Σ σ_k H^{N−k} P_y^{2k}` over seeded phase
/// points drawn from the verification box.
pub fn verify_product_identity(family: &MetricFamily, samples: usize, seed: u64) -> f64 {
    let system = IntegralSystem::new(family);
    let mom = moments(family);
    let spec = SamplerSpec::verification(seed);
    (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let p = spec.sample_phase(i).expect("verification box has no exclusion");
            match system.evaluate(&p) {
                Ok(v) => {
                    let rhs = mom.product_form(v.h, p.py);
                    (v.splus * v.sminus - rhs).abs() / mom.product_scale(v.h, p.py).max(f64::MIN_POSITIVE)
                }
                Err(_) => f64::INFINITY,
            }
        })
        .reduce(|| 0.0, f64::max)
}
