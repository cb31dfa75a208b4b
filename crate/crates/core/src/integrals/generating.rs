//! Generating functions `L(t, ξ)`, `M(t, ξ)` and the moment generating value
//! `Σ(ξ)`, evaluated from their closed forms in `ψ_{n,l} = τ^l (1 + τ)^{n−l}`
//! with `τ = −ξ / cosh²t`.

use crate::family::{MetricFamily, Parity};
use crate::numerics::FD_STEP;

use super::IntegralError;

/// `|ξ − cosh²t|` below which `1 + τ` is treated as zero.
pub const TAU_SINGULARITY_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct GenEvalContext {
    pub t: f64,
    pub xi: f64,
    pub tau: f64,
    /// `√(τ / (1 + τ))` when the radicand is non-negative.
    pub eta: Option<f64>,
    /// `ψ_{n,0} … ψ_{n,n}`.
    pub psi: Vec<f64>,
    pub l: f64,
    pub m: f64,
    pub sigma: f64,
}

fn alt(l: usize) -> f64 {
    if l % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn psi_row(n: usize, tau: f64) -> Vec<f64> {
    (0..=n)
        .map(|l| tau.powi(l as i32) * (1.0 + tau).powi((n - l) as i32))
        .collect()
}

/// `(L, M)` at `(t, ξ)` from the closed forms.
pub(crate) fn l_and_m(family: &MetricFamily, t: f64, xi: f64) -> (f64, f64) {
    let n = family.n();
    let hc = family.eval_h_coeffs(t);
    let h = |i: usize| hc.get(i as i64);
    let (c, s) = (t.cosh(), t.sinh());
    let tau = -xi / (c * c);
    let psi_n = psi_row(n, tau);

    match family.parity() {
        Parity::EvenDegree => {
            let psi_nm1 = psi_row(n - 1, tau);
            let l = -(0..n)
                .map(|l| alt(l) * psi_nm1[l] * (h(2 * l + 1) + s * h(2 * l)))
                .sum::<f64>()
                / c;
            let m = (0..n).map(|l| alt(l) * psi_n[l] * h(2 * l)).sum::<f64>()
                - s * (0..n)
                    .map(|l| alt(l) * psi_n[l + 1] * h(2 * l + 1))
                    .sum::<f64>();
            (l, m)
        }
        Parity::OddDegree => {
            let l = -((0..n).map(|l| alt(l) * psi_n[l] * h(2 * l + 1)).sum::<f64>()
                + s * (0..=n).map(|l| alt(l) * psi_n[l] * h(2 * l)).sum::<f64>())
                / c;
            let m = (0..=n).map(|l| alt(l) * psi_n[l] * h(2 * l)).sum::<f64>()
                - s * (0..n)
                    .map(|l| alt(l) * psi_n[l + 1] * h(2 * l + 1))
                    .sum::<f64>();
            (l, m)
        }
    }
}

fn check_tau(t: f64, xi: f64) -> Result<(), IntegralError> {
    let c2 = t.cosh() * t.cosh();
    if (xi - c2).abs() <= TAU_SINGULARITY_EPS * c2 {
        Err(IntegralError::SingularTau { t, xi })
    } else {
        Ok(())
    }
}

/// Evaluates the generating functions and `Σ(ξ)` at `(t, ξ)`.
///
/// `Σ = M² − ξ(1 + τ)L²` for even degree and `Σ = (1 + τ)M² − ξL²` for odd
/// degree; both reduce to the constant polynomial `(1 − ξ)∏(1 − m_k ξ)`.
pub fn gen_context(family: &MetricFamily, t: f64, xi: f64) -> Result<GenEvalContext, IntegralError> {
    check_tau(t, xi)?;
    let c2 = t.cosh() * t.cosh();
    let tau = -xi / c2;
    let ratio = tau / (1.0 + tau);
    let (l, m) = l_and_m(family, t, xi);
    let sigma = match family.parity() {
        Parity::EvenDegree => m * m - xi * (1.0 + tau) * l * l,
        Parity::OddDegree => (1.0 + tau) * m * m - xi * l * l,
    };
    Ok(GenEvalContext {
        t,
        xi,
        tau,
        eta: (ratio >= 0.0).then(|| ratio.sqrt()),
        psi: psi_row(family.n(), tau),
        l,
        m,
        sigma,
    })
}

/// Absolute residuals of the two generating-function PDEs at `(t, ξ)`, with
/// `∂_t` taken by central differences at fixed `ξ`.
///
/// Even: `cosh²t(1+τ)∂_tL + ξ tanh t L + A M` and `∂_tM − τ A L`.
/// Odd: `cosh²t ∂_tL + A M` and `cosh²t(1+τ)∂_tM + ξ tanh t M + ξ A L`.
pub fn gen_pde_residuals(
    family: &MetricFamily,
    t: f64,
    xi: f64,
) -> Result<(f64, f64), IntegralError> {
    check_tau(t, xi)?;
    let (l, m) = l_and_m(family, t, xi);
    let (lp, mp) = l_and_m(family, t + FD_STEP, xi);
    let (lm, mm) = l_and_m(family, t - FD_STEP, xi);
    let dl = (lp - lm) / (2.0 * FD_STEP);
    let dm = (mp - mm) / (2.0 * FD_STEP);
    let c2 = t.cosh() * t.cosh();
    let tau = -xi / c2;
    let a = family.eval_a(t);
    let th = t.tanh();
    let (r1, r2) = match family.parity() {
        Parity::EvenDegree => (
            c2 * (1.0 + tau) * dl + xi * th * l + a * m,
            dm - tau * a * l,
        ),
        Parity::OddDegree => (
            c2 * dl + a * m,
            c2 * (1.0 + tau) * dm + xi * th * m + xi * a * l,
        ),
    };
    Ok((r1.abs(), r2.abs()))
}
