//! Geodesic flow: Hamilton's equations for `H = P_t²/A² + P_y²/cosh²t`,
//! integrated by the classical fixed-step Runge–Kutta scheme.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::family::{FamilyError, MetricFamily, DEGENERACY_EPS, T_CLAMP};
use crate::integrals::{IntegralSystem, PhasePoint};

/// Largest normalized H drift accepted before a run is rejected.
pub const MAX_H_DRIFT: f64 = 1e-3;

pub const CSV_HEADER: &str = "s,t,y,P_t,P_y,H,Py,S1,S2";

#[derive(Debug, Error)]
pub enum FlowError {
    #[error("StepTooSmall: step must be positive and finite, got {0}")]
    StepTooSmall(f64),
    #[error("InvalidSpan: span must be positive and finite, got {0}")]
    InvalidSpan(f64),
    #[error("StepTooLarge: H drift {drift:e} exceeds {MAX_H_DRIFT:e}")]
    StepTooLarge { drift: f64, partial: Box<Trajectory> },
    #[error("{source} (trajectory stopped at s = {})", partial.last_s())]
    Aborted {
        source: FamilyError,
        partial: Box<Trajectory>,
    },
}

impl FlowError {
    /// The samples computed before the run stopped, if any.
    pub fn partial(&self) -> Option<&Trajectory> {
        match self {
            FlowError::StepTooLarge { partial, .. } | FlowError::Aborted { partial, .. } => {
                Some(partial)
            }
            _ => None,
        }
    }
}

/// `(dt/ds, dy/ds, dP_t/ds, dP_y/ds)`.
pub fn hamilton_rhs(family: &MetricFamily, p: &PhasePoint) -> Result<[f64; 4], FamilyError> {
    if !(p.t.abs() <= T_CLAMP) {
        return Err(FamilyError::DegenerateMetric {
            t: p.t,
            a: f64::NAN,
        });
    }
    let a = family.eval_a(p.t);
    if a.abs() < DEGENERACY_EPS {
        return Err(FamilyError::DegenerateMetric { t: p.t, a });
    }
    let ap = family.eval_a_prime(p.t);
    let c = p.t.cosh();
    let (sech, th) = (1.0 / c, p.t.tanh());
    Ok([
        2.0 * p.pt / (a * a),
        2.0 * p.py * sech * sech,
        2.0 * p.pt * p.pt * ap / (a * a * a) + 2.0 * p.py * p.py * th * sech * sech,
        0.0,
    ])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub samples: Vec<(f64, PhasePoint)>,
    #[serde(skip)]
    pub family: MetricFamily,
    pub step: f64,
    pub integrator: &'static str,
}

impl Trajectory {
    pub fn first(&self) -> &PhasePoint {
        &self.samples[0].1
    }

    pub fn last(&self) -> &PhasePoint {
        &self.samples[self.samples.len() - 1].1
    }

    pub fn last_s(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.0)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// CSV with header `s,t,y,P_t,P_y,H,Py,S1,S2`, one row per sample.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let system = IntegralSystem::new(&self.family);
        writeln!(w, "{CSV_HEADER}")?;
        for (s, p) in &self.samples {
            let (h, py, s1, s2) = match system.evaluate(p) {
                Ok(v) => (v.h, v.py, v.s1, v.s2),
                Err(_) => (f64::NAN, p.py, f64::NAN, f64::NAN),
            };
            writeln!(
                w,
                "{s},{},{},{},{},{h},{py},{s1},{s2}",
                p.t, p.y, p.pt, p.py
            )?;
        }
        Ok(())
    }
}

fn axpy(x: &[f64; 4], a: f64, k: &[f64; 4]) -> PhasePoint {
    PhasePoint {
        t: x[0] + a * k[0],
        y: x[1] + a * k[1],
        pt: x[2] + a * k[2],
        py: x[3] + a * k[3],
    }
}

fn rk4_step(family: &MetricFamily, p: &PhasePoint, h: f64) -> Result<PhasePoint, FamilyError> {
    let x = p.to_array();
    let k1 = hamilton_rhs(family, p)?;
    let k2 = hamilton_rhs(family, &axpy(&x, 0.5 * h, &k1))?;
    let k3 = hamilton_rhs(family, &axpy(&x, 0.5 * h, &k2))?;
    let k4 = hamilton_rhs(family, &axpy(&x, h, &k3))?;
    let out: [f64; 4] =
        std::array::from_fn(|i| x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
    Ok(PhasePoint {
        t: out[0],
        y: out[1],
        pt: out[2],
        py: out[3],
    })
}

fn hamiltonian(family: &MetricFamily, p: &PhasePoint) -> f64 {
    let a = family.eval_a(p.t);
    let c = p.t.cosh();
    p.pt * p.pt / (a * a) + p.py * p.py / (c * c)
}

/// Whether `A` changes sign between `t0` and `t1`.
fn crosses_zero(family: &MetricFamily, t0: f64, t1: f64) -> bool {
    family.eval_a(t0).signum() != family.eval_a(t1).signum()
}

/// Integrates from `s = 0` to `s = span` with `round(span / step)` steps.
pub fn integrate(
    family: &MetricFamily,
    p0: PhasePoint,
    span: f64,
    step: f64,
) -> Result<Trajectory, FlowError> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(FlowError::StepTooSmall(step));
    }
    if !(span > 0.0) || !span.is_finite() {
        return Err(FlowError::InvalidSpan(span));
    }
    let steps = (span / step).round().max(1.0) as usize;
    let mut traj = Trajectory {
        samples: Vec::with_capacity(steps + 1),
        family: family.clone(),
        step,
        integrator: "rk4",
    };
    traj.samples.push((0.0, p0));
    if let Err(source) = hamilton_rhs(family, &p0) {
        return Err(FlowError::Aborted {
            source,
            partial: Box::new(traj),
        });
    }
    let h0 = hamiltonian(family, &p0);
    let mut drift: f64 = 0.0;
    let mut p = p0;
    for i in 1..=steps {
        match rk4_step(family, &p, step) {
            Ok(q) if q.t.abs() <= T_CLAMP && crosses_zero(family, p.t, q.t) => {
                return Err(FlowError::Aborted {
                    source: FamilyError::DegenerateMetric {
                        t: q.t,
                        a: family.eval_a(q.t),
                    },
                    partial: Box::new(traj),
                })
            }
            Ok(q) if q.t.abs() <= T_CLAMP => p = q,
            Ok(q) => {
                return Err(FlowError::Aborted {
                    source: FamilyError::DegenerateMetric { t: q.t, a: f64::NAN },
                    partial: Box::new(traj),
                })
            }
            Err(source) => {
                return Err(FlowError::Aborted {
                    source,
                    partial: Box::new(traj),
                })
            }
        }
        traj.samples.push((i as f64 * step, p));
        drift = drift.max((hamiltonian(family, &p) - h0).abs() / (h0.abs() + 1.0));
    }
    if !(drift <= MAX_H_DRIFT) {
        return Err(FlowError::StepTooLarge {
            drift,
            partial: Box::new(traj),
        });
    }
    Ok(traj)
}

/// Normalized drifts `max_s |Q(s) − Q(0)| / (|Q(0)| + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct ConservationReport {
    pub drift_H: f64,
    pub drift_Py: f64,
    pub drift_S1: f64,
    pub drift_S2: f64,
}

impl ConservationReport {
    pub fn max(&self) -> f64 {
        self.drift_H
            .max(self.drift_Py)
            .max(self.drift_S1)
            .max(self.drift_S2)
    }
}

pub fn conservation_report(traj: &Trajectory) -> ConservationReport {
    conservation_report_with(&IntegralSystem::new(&traj.family), traj)
}

/// Drifts of the integrals built by `system`, e.g. a corrupted one.
pub fn conservation_report_with(system: &IntegralSystem<'_>, traj: &Trajectory) -> ConservationReport {
    let vals: Vec<[f64; 4]> = traj
        .samples
        .iter()
        .map(|(_, p)| match system.evaluate(p) {
            Ok(v) => [v.h, v.py, v.s1, v.s2],
            Err(_) => [f64::NAN; 4],
        })
        .collect();
    let drift = |i: usize| {
        let q0 = vals[0][i];
        vals.iter()
            .map(|v| {
                let d = (v[i] - q0).abs() / (q0.abs() + 1.0);
                if d.is_nan() {
                    f64::INFINITY
                } else {
                    d
                }
            })
            .fold(0.0, f64::max)
    };
    ConservationReport {
        drift_H: drift(0),
        drift_Py: drift(1),
        drift_S1: drift(2),
        drift_S2: drift(3),
    }
}

/// `drift_H(step) / drift_H(step / 2)`; close to 16 for a 4th-order scheme
/// while truncation dominates round-off.
pub fn convergence_ratio(
    family: &MetricFamily,
    p0: PhasePoint,
    span: f64,
    step: f64,
) -> Result<f64, FlowError> {
    let coarse = conservation_report(&integrate(family, p0, span, step)?).drift_H;
    let fine = conservation_report(&integrate(family, p0, span, 0.5 * step)?).drift_H;
    Ok(coarse / fine)
}

/// Integrates forward, flips momenta, integrates back and flips again;
/// returns the largest coordinate difference from `p0`.
pub fn time_reversal_error(
    family: &MetricFamily,
    p0: PhasePoint,
    span: f64,
    step: f64,
) -> Result<f64, FlowError> {
    let fwd = integrate(family, p0, span, step)?;
    let end = fwd.last();
    let back = integrate(
        family,
        PhasePoint::new(end.t, end.y, -end.pt, -end.py),
        span,
        step,
    )?;
    let r = back.last();
    let ret = [r.t, r.y, -r.pt, -r.py];
    Ok(ret
        .iter()
        .zip(p0.to_array())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}
