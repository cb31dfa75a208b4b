//! Finite differences, seeded phase-space sampling and the tolerance table.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::integrals::PhasePoint;

/// Default central-difference step for first derivatives in `t`.
pub const FD_STEP: f64 = 1e-5;
/// Default central-difference step for phase-space partials in brackets.
pub const BRACKET_FD_STEP: f64 = 1e-6;

/// Named tolerances. Every verification in the crate reads its threshold
/// from here so that the acceptance suite and the CLI share one source.
pub mod tol {
    /// First derivatives checked against central differences.
    pub const DERIV1: f64 = 1e-7;
    /// Algebraic identities evaluated directly.
    pub const IDENTITY: f64 = 1e-10;
    /// Normalized `{H, S}` brackets.
    pub const BRACKET: f64 = 1e-6;
    /// Closed-form Poisson algebra against finite-difference brackets.
    pub const ALGEBRA: f64 = 1e-5;
    /// ODE / PDE residuals with finite-difference derivatives.
    pub const RESIDUAL: f64 = 1e-6;
    /// Normalized drift of conserved quantities along a trajectory.
    pub const DRIFT: f64 = 1e-6;
    /// Product identity `S₊S₋ = Σ σ_k H^{N−k} P_y^{2k}`.
    pub const PRODUCT: f64 = 1e-9;
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SamplerError {
    #[error("ExhaustedRejection: {0} consecutive rejections at index {1}")]
    ExhaustedRejection(usize, u64),
    #[error("EmptyRange: interval [{0}, {1}] is empty")]
    EmptyRange(f64, f64),
}

/// Central difference `(f(x+h) − f(x−h)) / 2h`.
pub fn central_diff<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Central difference for fallible evaluators.
pub fn try_central_diff<F, E>(f: F, x: f64, h: f64) -> Result<f64, E>
where
    F: Fn(f64) -> Result<f64, E>,
{
    Ok((f(x + h)? - f(x - h)?) / (2.0 * h))
}

/// Error measure used for "relative" comparisons: relative when the reference
/// is large, absolute once it drops below `scale`.
pub fn scaled_err(got: f64, reference: f64, scale: f64) -> f64 {
    (got - reference).abs() / reference.abs().max(scale)
}

/// Deterministic, indexable random stream. Each index owns its own ChaCha
/// stream, so any subset of indices can be drawn in any order (or by
/// different workers) with identical results.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform draw from `[lo, hi)`.
pub fn uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exclusion {
    /// Reject points with `|P_y| ≤ bound`.
    MinAbsPy(f64),
}

impl Exclusion {
    fn accepts(&self, p: &PhasePoint) -> bool {
        match *self {
            Exclusion::MinAbsPy(b) => p.py.abs() > b,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerSpec {
    pub seed: u64,
    pub t_range: (f64, f64),
    pub y_range: (f64, f64),
    pub momentum_range: (f64, f64),
    pub exclusion: Option<Exclusion>,
}

impl SamplerSpec {
    const MAX_REJECTIONS: usize = 1000;

    /// The verification box: `t, y ∈ [−2, 2]`, momenta in `[−1, 1]`.
    pub fn verification(seed: u64) -> Self {
        Self {
            seed,
            t_range: (-2.0, 2.0),
            y_range: (-2.0, 2.0),
            momentum_range: (-1.0, 1.0),
            exclusion: None,
        }
    }

    /// Starting points for trajectories: `t, y ∈ [−1, 1]`, momenta in
    /// `[−0.5, 0.5]`.
    pub fn flow_box(seed: u64) -> Self {
        Self {
            seed,
            t_range: (-1.0, 1.0),
            y_range: (-1.0, 1.0),
            momentum_range: (-0.5, 0.5),
            exclusion: None,
        }
    }

    pub fn with_exclusion(mut self, ex: Exclusion) -> Self {
        self.exclusion = Some(ex);
        self
    }

    fn validate(&self) -> Result<(), SamplerError> {
        for &(lo, hi) in [self.t_range, self.y_range, self.momentum_range].iter() {
            if !(lo < hi) {
                return Err(SamplerError::EmptyRange(lo, hi));
            }
        }
        Ok(())
    }

    /// Point number `index` of the stream. Same `(seed, index)` always yields
    /// the same point.
    pub fn sample_phase(&self, index: u64) -> Result<PhasePoint, SamplerError> {
        self.validate()?;
        let mut rng = stream(self.seed, index);
        for _ in 0..Self::MAX_REJECTIONS {
            let p = PhasePoint::new(
                uniform(&mut rng, self.t_range),
                uniform(&mut rng, self.y_range),
                uniform(&mut rng, self.momentum_range),
                uniform(&mut rng, self.momentum_range),
            );
            if self.exclusion.map_or(true, |ex| ex.accepts(&p)) {
                return Ok(p);
            }
        }
        Err(SamplerError::ExhaustedRejection(Self::MAX_REJECTIONS, index))
    }
}

/// Mutable tolerance table keyed by check name; defaults come from [`tol`].
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    table: BTreeMap<String, f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        let entries = [
            ("deriv1", tol::DERIV1),
            ("identity", tol::IDENTITY),
            ("bracket", tol::BRACKET),
            ("algebra", tol::ALGEBRA),
            ("residual", tol::RESIDUAL),
            ("drift", tol::DRIFT),
            ("product", tol::PRODUCT),
            ("ode", tol::RESIDUAL),
            ("gen_pde", tol::RESIDUAL),
            ("moment_gf", tol::IDENTITY),
            ("commutation", tol::BRACKET),
            ("poisson_algebra", tol::ALGEBRA),
            ("h_coeff_derivative", tol::DERIV1),
            ("h_coeff_top", tol::IDENTITY),
            ("sigma_forms", tol::IDENTITY),
            ("koenigs", 1e-9),
            ("conformal", tol::IDENTITY),
            ("conformal_derivative", tol::RESIDUAL),
        ];
        Self {
            table: entries
                .iter()
                .map(|(k, v)| (k.to_string(), *v))
                .collect(),
        }
    }
}

impl Tolerances {
    /// Looks up `name`, falling back to the `identity` tolerance.
    pub fn get(&self, name: &str) -> f64 {
        self.table
            .get(name)
            .copied()
            .unwrap_or(tol::IDENTITY)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.table.contains_key(name)
    }

    pub fn set(&mut self, name: &str, value: f64) {
        self.table.insert(name.to_string(), value);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.table.iter().map(|(k, v)| (k.as_str(), *v))
    }
}
