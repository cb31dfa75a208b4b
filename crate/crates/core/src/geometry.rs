//! Global geometry: the angle `ψ(t) = Σ arctan h_k(t)`, the conformal factor
//! `Σ(t) = cos ψ − sin ψ sinh t`, the conformal map to the hyperbolic plane,
//! the manifold classifier and the Koenigs change of variables.
//!
//! With `gd` the Gudermannian, the map is `gd χ = gd t + ψ(t)`. Then
//! `cos(gd t + ψ) = Σ / cosh t`, so it is defined exactly where `Σ > 0`, and
//! there `ρ cosh χ = cosh t`, `ρ χ' = A` with `ρ = Σ`.

use std::f64::consts::FRAC_PI_2;
use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::family::{clamp, expand_linear_factors, FamilyError, MetricFamily, Parity};
use crate::integrals::{IntegralSystem, PhasePoint};
use crate::numerics::{central_diff, FD_STEP};

pub const DEFAULT_T_RANGE: (f64, f64) = (-15.0, 15.0);
pub const DEFAULT_GRID_POINTS: usize = 2001;
pub const MIN_GRID_POINTS: usize = 16;
/// Width to which a sign change of `Σ` is bracketed before it is reported.
pub const ROOT_TOL: f64 = 1e-10;
/// `cosh(20) A(20)` must exceed this for the area to count as divergent.
pub const AREA_THRESHOLD: f64 = 1e6;

pub const GRID_CSV_HEADER: &str = "t,psi,sigma,chi,rho,K";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("BadParity: operation needs an odd-degree family")]
    BadParity,
    #[error("BadSignPattern: signs must satisfy e_(n+k) = -e_k")]
    BadSignPattern,
    #[error("MapUndefined: sigma({t}) = {sigma} is not positive")]
    MapUndefined { t: f64, sigma: f64 },
    #[error(transparent)]
    Family(#[from] FamilyError),
}

/// `ψ(t) = Σ_k arctan h_k(t)`, principal branch per term.
pub fn psi(family: &MetricFamily, t: f64) -> f64 {
    let (q, r) = psi_parts(family, t);
    q as f64 * FRAC_PI_2 + r
}

/// `ψ = q π/2 + r` with each `arctan h` for `|h| > 1` written as
/// `±π/2 − arctan(1/h)`, so `r` keeps full relative precision when the terms
/// nearly cancel.
pub fn psi_parts(family: &MetricFamily, t: f64) -> (i64, f64) {
    let t = clamp(t);
    split_atan_sum((0..family.nu()).map(|k| family.h_at(k, t)))
}

fn split_atan_sum(hs: impl Iterator<Item = f64>) -> (i64, f64) {
    hs.fold((0, 0.0), |(q, r), h| {
        if h > 1.0 {
            (q + 1, r - (1.0 / h).atan())
        } else if h < -1.0 {
            (q - 1, r - (1.0 / h).atan())
        } else {
            (q, r + h.atan())
        }
    })
}

/// `(cos ψ, sin ψ)` from the split form of [`psi_parts`].
pub fn psi_cos_sin(family: &MetricFamily, t: f64) -> (f64, f64) {
    let (q, r) = psi_parts(family, t);
    quarter_turns(q, r)
}

/// `(cos, sin)` of `qπ/2 + r`.
fn quarter_turns(q: i64, r: f64) -> (f64, f64) {
    let (c, s) = (r.cos(), r.sin());
    match q.rem_euclid(4) {
        0 => (c, s),
        1 => (-s, c),
        2 => (-c, -s),
        _ => (s, -c),
    }
}

/// `Σ(t) = cos ψ(t) − sin ψ(t) sinh t`.
pub fn sigma_factor(family: &MetricFamily, t: f64) -> f64 {
    let t = clamp(t);
    let (c, s) = psi_cos_sin(family, t);
    c - s * t.sinh()
}

/// `(Σ(−∞), Σ(+∞))`.
///
/// Both `h_k(±∞)` are `e_k ∞`, so `ψ → Eπ/2` with `E = Σ e_k`. For odd `E`
/// the `sinh t` term wins and the limits are infinite with opposite signs;
/// for even `E` they are `±A(±∞)` with sign `(−1)^{E/2}`.
pub fn sigma_limits(family: &MetricFamily) -> (f64, f64) {
    let e: i64 = family.signs().iter().sum();
    let (lo, hi) = family.a_limits();
    match e.rem_euclid(4) {
        0 => (lo, hi),
        2 => (-lo, -hi),
        1 => (f64::INFINITY, f64::NEG_INFINITY),
        _ => (f64::NEG_INFINITY, f64::INFINITY),
    }
}

/// `Σ` from the `H`-coefficients:
/// `(Σ_l (−1)^l H_{2l} − sinh t Σ_l (−1)^l H_{2l+1}) / (∏ √m_k cosh^ν t)`.
///
/// Each `H_k` is carried as `H_k / cosh^k t` so nothing overflows.
pub fn sigma_via_coeffs(family: &MetricFamily, t: f64) -> f64 {
    let t = clamp(t);
    let nu = family.nu() as i32;
    let c = t.cosh();
    let th = t.tanh();
    let scaled: Vec<f64> = (0..family.nu()).map(|k| family.h_at(k, t) / c).collect();
    let hc = expand_linear_factors(&scaled);
    let norm: f64 = family.masses().iter().map(|m| m.sqrt()).product();
    let mut acc = 0.0;
    for (k, &h) in hc.iter().enumerate() {
        let k = k as i32;
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            acc += sign * h * c.powi(k - nu);
        } else {
            acc -= sign * h * th * c.powi(k + 1 - nu);
        }
    }
    acc / norm
}

/// `D_t ψ` and `(A − 1)/cosh t`; they agree identically.
pub fn psi_derivative_pair(family: &MetricFamily, t: f64) -> (f64, f64) {
    (
        central_diff(|x| psi(family, x), t, FD_STEP),
        (family.eval_a(t) - 1.0) / t.cosh(),
    )
}

fn require_paired(family: &MetricFamily) -> Result<(), GeometryError> {
    if family.parity() != Parity::OddDegree {
        return Err(GeometryError::BadParity);
    }
    let n = family.n();
    let s = family.signs();
    if (0..n).any(|k| s[n + k] != -s[k]) {
        return Err(GeometryError::BadSignPattern);
    }
    Ok(())
}

/// `(m_k, m̃_k)` pairs of an odd paired family, in order.
pub fn mass_pairs(family: &MetricFamily) -> Result<Vec<(f64, f64)>, GeometryError> {
    require_paired(family)?;
    let n = family.n();
    let m = family.masses();
    Ok((0..n).map(|k| (m[k], m[n + k])).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hypotheses {
    /// `e_k = +1` for `k ≤ n`.
    pub h1: bool,
    /// `m_k > m̃_k > 1` for `k < n` and `1 < m_n < m̃_n`.
    pub h2: bool,
    /// `Σ_k |1/√μ_k − 1/√μ̃_k| < 1` with `μ = m − 1`.
    pub h3: bool,
    pub h3_sum: f64,
}

impl Hypotheses {
    pub fn all(&self) -> bool {
        self.h1 && self.h2 && self.h3
    }

    pub fn flags(&self) -> [bool; 3] {
        [self.h1, self.h2, self.h3]
    }
}

pub fn check_hypotheses(family: &MetricFamily) -> Result<Hypotheses, GeometryError> {
    let pairs = mass_pairs(family)?;
    let n = pairs.len();
    let h1 = family.signs()[..n].iter().all(|&e| e == 1);
    let h2 = pairs.iter().enumerate().all(|(k, &(m, mt))| {
        if k + 1 < n {
            m > mt && mt > 1.0
        } else {
            1.0 < m && m < mt
        }
    });
    let h3_sum: f64 = pairs
        .iter()
        .map(|&(m, mt)| (1.0 / (m - 1.0).sqrt() - 1.0 / (mt - 1.0).sqrt()).abs())
        .sum();
    Ok(Hypotheses {
        h1,
        h2,
        h3: h3_sum < 1.0,
        h3_sum,
    })
}

/// `ψ` at level `2n − 2`: the first `n − 1` pairs only.
pub fn psi_lower(family: &MetricFamily, t: f64) -> Result<f64, GeometryError> {
    require_paired(family)?;
    let n = family.n();
    let t = clamp(t);
    let (q, r) = split_atan_sum((0..n - 1).flat_map(|k| [family.h_at(k, t), family.h_at(n + k, t)]));
    Ok(q as f64 * FRAC_PI_2 + r)
}

/// `B_n = Σ_{k<n} (arctan √μ_k − arctan √μ̃_k)`, the value of the level
/// `2n − 2` angle at `t = 0` and its maximum under h1–h2.
pub fn psi_bound(family: &MetricFamily) -> Result<f64, GeometryError> {
    let pairs = mass_pairs(family)?;
    let n = pairs.len();
    Ok(pairs[..n - 1]
        .iter()
        .map(|&(m, mt)| (m - 1.0).sqrt().atan() - (mt - 1.0).sqrt().atan())
        .sum())
}

/// Relative residuals of the two-level recurrences of an odd paired family,
/// each quantity computed directly and from level `2n − 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceResiduals {
    pub h_coeffs: f64,
    pub cos_psi: f64,
    pub sin_psi: f64,
    pub sigma: f64,
    /// Closed form of `Σ^(2)`, only for `n = 1`.
    pub single_pair: Option<f64>,
    /// `H_0` at both levels.
    pub h0: (f64, f64),
}

impl RecurrenceResiduals {
    pub fn max(&self) -> f64 {
        [self.h_coeffs, self.cos_psi, self.sin_psi, self.sigma, self.single_pair.unwrap_or(0.0)]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

pub fn recurrence_checks(family: &MetricFamily, t: f64) -> Result<RecurrenceResiduals, GeometryError> {
    require_paired(family)?;
    let n = family.n();
    let t = clamp(t);
    let (c, s) = (t.cosh(), t.sinh());
    let lower_idx: Vec<usize> = (0..n - 1).chain(n..2 * n - 1).collect();
    let lower_h: Vec<f64> = lower_idx.iter().map(|&k| family.h_at(k, t)).collect();
    let lower_coeffs = expand_linear_factors(&lower_h);
    let (q_l, r_l) = split_atan_sum(lower_h.iter().copied());
    let (cos_l, sin_l) = quarter_turns(q_l, r_l);
    let sigma_l = cos_l - sin_l * s;

    let (m, mt) = (family.masses()[n - 1], family.masses()[2 * n - 1]);
    let h = family.h_at(n - 1, t);
    let ht = -family.h_at(2 * n - 1, t);

    // H^{2n} = H^{2n−2} * (1 + ξ h_n)(1 − ξ h̃_n)
    let factor = [1.0, h - ht, -h * ht];
    let mut rec = vec![0.0; lower_coeffs.len() + 2];
    for (i, &a) in lower_coeffs.iter().enumerate() {
        for (j, &b) in factor.iter().enumerate() {
            rec[i + j] += a * b;
        }
    }
    let direct = family.eval_h_coeffs(t);
    let h_coeffs = rec
        .iter()
        .enumerate()
        .map(|(k, &r)| rel(direct.get(k as i64), r))
        .fold(0.0, f64::max);

    let d = (m * mt).sqrt() * c * c;
    let (cos_b, sin_b) = ((1.0 + h * ht) / d, (h - ht) / d);
    let (cos_p, sin_p) = psi_cos_sin(family, t);
    let cos_psi = rel(cos_p, cos_l * cos_b - sin_l * sin_b);
    let sin_psi = rel(sin_p, sin_l * cos_b + cos_l * sin_b);

    let sigma_rec = ((1.0 + (h + s) * (ht - s) / (c * c)) * sigma_l + (ht - h) * sin_l)
        / (m * mt).sqrt();
    let sigma_direct = sigma_factor(family, t);
    let single_pair = (n == 1).then(|| {
        let closed = ((h + s) * (ht - s) + c * c) / ((m * mt).sqrt() * c * c);
        rel(sigma_direct, closed)
    });
    Ok(RecurrenceResiduals {
        h_coeffs,
        cos_psi,
        sin_psi,
        sigma: rel(sigma_direct, sigma_rec),
        single_pair,
        h0: (direct.get(0), lower_coeffs[0]),
    })
}

/// `(χ, ρ)` with `gd χ = gd t + ψ(t)` and `ρ = Σ(t)`.
pub fn conformal_map(family: &MetricFamily, t: f64) -> Result<(f64, f64), GeometryError> {
    let t = clamp(t);
    let (cos_psi, sin_psi) = psi_cos_sin(family, t);
    let sigma = cos_psi - sin_psi * t.sinh();
    if !(sigma > 0.0) {
        return Err(GeometryError::MapUndefined { t, sigma });
    }
    let sinh_chi = (t.sinh() * cos_psi + sin_psi) / sigma;
    Ok((sinh_chi.asinh(), sigma))
}

/// Residuals of `ρ cosh χ = cosh t` (relative) and `ρ D_tχ = A` (absolute,
/// central difference).
pub fn conformal_residuals(family: &MetricFamily, t: f64) -> Result<(f64, f64), GeometryError> {
    let (chi, rho) = conformal_map(family, t)?;
    let cosh_res = (rho * chi.cosh() - t.cosh()).abs() / t.cosh();
    let up = conformal_map(family, t + FD_STEP)?.0;
    let down = conformal_map(family, t - FD_STEP)?.0;
    let dchi = (up - down) / (2.0 * FD_STEP);
    Ok((cosh_res, (rho * dchi - family.eval_a(t)).abs()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    HyperbolicPlane,
    NoManifold,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlobalReport {
    pub grid: Vec<f64>,
    pub psi: Vec<f64>,
    pub sigma: Vec<f64>,
    pub chi: Vec<Option<f64>>,
    pub rho: Vec<Option<f64>>,
    pub curvature: Vec<Option<f64>>,
    #[serde(serialize_with = "crate::json::extended_pair")]
    pub sigma_limits: (f64, f64),
    pub verdict: Verdict,
    /// `(h1, h2, h3)` for odd paired families.
    pub hypothesis_flags: Option<[bool; 3]>,
    pub h3_sum: Option<f64>,
    /// Zero of `Σ`, bracketed to [`ROOT_TOL`].
    pub sign_change_at: Option<f64>,
    /// For `ν = 1`: the explicit Koenigs change of variables is a
    /// diffeomorphism onto the hyperbolic plane whatever the `C = 0` verdict.
    pub koenigs_verdict: Option<Verdict>,
    pub a_min: f64,
    pub area_probe: f64,
    pub area_diverges: bool,
    /// `None` means `y ∈ ℝ`.
    pub y_period: Option<f64>,
}

impl GlobalReport {
    /// Grid CSV with columns `t,psi,sigma,chi,rho,K`; undefined cells are empty.
    pub fn write_grid_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        writeln!(w, "{GRID_CSV_HEADER}")?;
        for i in 0..self.grid.len() {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                self.grid[i],
                self.psi[i],
                self.sigma[i],
                opt(self.chi[i]),
                opt(self.rho[i]),
                opt(self.curvature[i])
            )?;
        }
        Ok(())
    }
}

fn bisect_root(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> Option<f64> {
    let (flo, fhi) = (f(lo), f(hi));
    if !(flo * fhi < 0.0) {
        return None;
    }
    let lo_positive = flo > 0.0;
    while hi - lo > ROOT_TOL {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if (fm > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Looks for a sign change of `Σ` beyond the grid end `from`, moving away
/// from the origin in direction `dir`.
fn search_outward(family: &MetricFamily, from: f64, dir: f64) -> Option<f64> {
    let mut inner = from;
    let mut outer = (from.abs() * 2.0).max(1.0).min(crate::family::T_CLAMP) * dir;
    loop {
        if sigma_factor(family, outer) <= 0.0 {
            return bisect_root(|t| sigma_factor(family, t), inner.min(outer), inner.max(outer));
        }
        if outer.abs() >= crate::family::T_CLAMP {
            return None;
        }
        inner = outer;
        outer = (outer.abs() * 2.0).min(crate::family::T_CLAMP) * dir;
    }
}

/// Samples `Σ` on a uniform grid and decides whether the metric lives on
/// the hyperbolic plane under the `C = 0` conformal normalization.
pub fn classify_manifold(
    family: &MetricFamily,
    t_range: (f64, f64),
    grid_points: usize,
) -> GlobalReport {
    let points = grid_points.max(MIN_GRID_POINTS);
    let (t0, t1) = t_range;
    let grid: Vec<f64> = (0..points)
        .map(|i| t0 + (t1 - t0) * i as f64 / (points - 1) as f64)
        .collect();
    let rows: Vec<(f64, f64, Option<(f64, f64)>, Option<f64>, f64)> = grid
        .par_iter()
        .map(|&t| {
            (
                psi(family, t),
                sigma_factor(family, t),
                conformal_map(family, t).ok(),
                family.gaussian_curvature(t).ok(),
                family.eval_a(t),
            )
        })
        .collect();
    let sigma: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let limits = sigma_limits(family);
    let a_min = rows.iter().map(|r| r.4).fold(f64::INFINITY, f64::min);

    let sig = |t: f64| sigma_factor(family, t);
    let mut sign_change_at = sigma
        .windows(2)
        .zip(grid.windows(2))
        .find(|(s, _)| s[0] * s[1] <= 0.0)
        .and_then(|(_, g)| {
            if sig(g[0]) == 0.0 {
                Some(g[0])
            } else if sig(g[1]) == 0.0 {
                Some(g[1])
            } else {
                bisect_root(sig, g[0], g[1])
            }
        });
    let all_positive = sigma.iter().all(|&s| s > 0.0);
    if sign_change_at.is_none() && all_positive {
        if limits.0 <= 0.0 {
            sign_change_at = search_outward(family, t0, -1.0);
        }
        if sign_change_at.is_none() && limits.1 <= 0.0 {
            sign_change_at = search_outward(family, t1, 1.0);
        }
    }

    let verdict = if sign_change_at.is_some() {
        Verdict::NoManifold
    } else if all_positive && limits.0 > 0.0 && limits.1 > 0.0 && a_min > 0.0 {
        Verdict::HyperbolicPlane
    } else {
        Verdict::Inconclusive
    };
    let hyp = check_hypotheses(family).ok();
    let area_probe = 20f64.cosh() * family.eval_a(20.0);

    GlobalReport {
        psi: rows.iter().map(|r| r.0).collect(),
        chi: rows.iter().map(|r| r.2.map(|x| x.0)).collect(),
        rho: rows.iter().map(|r| r.2.map(|x| x.1)).collect(),
        curvature: rows.iter().map(|r| r.3).collect(),
        grid,
        sigma,
        sigma_limits: limits,
        verdict,
        hypothesis_flags: hyp.map(|h| h.flags()),
        h3_sum: hyp.map(|h| h.h3_sum),
        sign_change_at,
        koenigs_verdict: (family.nu() == 1).then_some(Verdict::HyperbolicPlane),
        a_min,
        area_probe,
        area_diverges: area_probe > AREA_THRESHOLD,
        y_period: None,
    }
}

/// The Koenigs form `H_K = (P_χ² + P_y²/cosh²χ)/(1 + ρ_K tanh χ)` and the
/// change of variables `e^χ = (√m sinh t + √(m cosh²t − 1))/(√m + 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KoenigsMap {
    pub m: f64,
    pub rho_k: f64,
    pub mu: f64,
    pub t_grid: Vec<f64>,
    pub chi_of_t: Vec<f64>,
}

fn check_mass(m: f64) -> Result<(), GeometryError> {
    if m > 1.0 && m.is_finite() {
        Ok(())
    } else {
        Err(FamilyError::MassOutOfRange { index: 1, mass: m }.into())
    }
}

pub fn koenigs_rho(m: f64) -> f64 {
    2.0 * m.sqrt() / (m + 1.0)
}

pub fn koenigs_mu(m: f64) -> f64 {
    (m / (m + 1.0)).sqrt()
}

/// `S₁ᴷ / S₁` on corresponding points: the leading `H` coefficients are
/// `ρ_K / (2μ²)` and `1`.
pub fn koenigs_s1_scale(m: f64) -> f64 {
    1.0 / m.sqrt()
}

/// `1 + ρ_K tanh χ`, written as `((1 + ρ_K) e^{2χ} + 1 − ρ_K) / (e^{2χ} + 1)`
/// with `1 − ρ_K = (√m − 1)² / (m + 1)` so that it stays accurate as `m → 1`.
fn koenigs_weight(m: f64, chi: f64) -> f64 {
    let rho = koenigs_rho(m);
    let e2 = (2.0 * chi).exp();
    let one_minus = (m.sqrt() - 1.0).powi(2) / (m + 1.0);
    ((1.0 + rho) * e2 + one_minus) / (e2 + 1.0)
}

fn koenigs_root(m: f64, t: f64) -> f64 {
    let c = t.cosh();
    c * (m - 1.0 / (c * c)).sqrt()
}

/// `χ(t)`; for `t < 0` the numerator is rationalized to avoid cancellation.
pub fn koenigs_chi(m: f64, t: f64) -> Result<f64, GeometryError> {
    check_mass(m)?;
    let t = clamp(t);
    let sm = m.sqrt();
    let r = koenigs_root(m, t);
    let num = if t >= 0.0 {
        sm * t.sinh() + r
    } else {
        (m - 1.0) / (r - sm * t.sinh())
    };
    Ok((num / (sm + 1.0)).ln())
}

/// `dχ/dt = √m cosh t / √(m cosh²t − 1)`.
pub fn koenigs_dchi(m: f64, t: f64) -> f64 {
    let t = clamp(t);
    m.sqrt() / (m - 1.0 / t.cosh().powi(2)).sqrt()
}

pub fn koenigs_map(m: f64, t_grid: &[f64]) -> Result<KoenigsMap, GeometryError> {
    check_mass(m)?;
    Ok(KoenigsMap {
        m,
        rho_k: koenigs_rho(m),
        mu: koenigs_mu(m),
        t_grid: t_grid.to_vec(),
        chi_of_t: t_grid
            .iter()
            .map(|&t| koenigs_chi(m, t))
            .collect::<Result<_, _>>()?,
    })
}

/// `χ(t)` with the relative residuals of
/// `(a) √(1 + ρ_K tanh χ) cosh χ = μ cosh t` and
/// `(b) √(1 + ρ_K tanh χ) dχ/dt = μ A`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KoenigsPoint {
    pub t: f64,
    pub chi: f64,
    pub res_a: f64,
    pub res_b: f64,
}

pub fn koenigs_correspondence(m: f64, t: f64) -> Result<KoenigsPoint, GeometryError> {
    let chi = koenigs_chi(m, t)?;
    let t = clamp(t);
    let mu = koenigs_mu(m);
    let w = koenigs_weight(m, chi).sqrt();
    let a = 1.0 + t.sinh() / koenigs_root(m, t);
    let lhs_a = w * chi.cosh();
    let rhs_a = mu * t.cosh();
    let lhs_b = w * koenigs_dchi(m, t);
    let rhs_b = mu * a;
    Ok(KoenigsPoint {
        t,
        chi,
        res_a: (lhs_a - rhs_a).abs() / rhs_a.abs(),
        res_b: (lhs_b - rhs_b).abs() / rhs_b.abs().max(f64::MIN_POSITIVE),
    })
}

/// `H`, `S₁` and their Koenigs-form counterparts at one phase point of the
/// `e = +1` family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KoenigsPhase {
    pub h: f64,
    pub h_k: f64,
    pub s1: f64,
    pub s1_k: f64,
}

impl KoenigsPhase {
    /// `|H_K − H/μ²|` relative to `H/μ²`.
    pub fn h_residual(&self, m: f64) -> f64 {
        let r = self.h / koenigs_mu(m).powi(2);
        (self.h_k - r).abs() / r.abs().max(1.0)
    }

    /// `|S₁ᴷ − S₁/√m|` relative to `|S₁/√m| + 1`.
    pub fn s1_residual(&self, m: f64) -> f64 {
        let r = self.s1 * koenigs_s1_scale(m);
        (self.s1_k - r).abs() / (r.abs() + 1.0)
    }

    /// `|S₁ᴷ − S₁|` relative to `|S₁| + 1`, without the `1/√m` factor.
    pub fn s1_unscaled_residual(&self) -> f64 {
        (self.s1_k - self.s1).abs() / (self.s1.abs() + 1.0)
    }
}

pub fn koenigs_phase(m: f64, p: &PhasePoint) -> Result<KoenigsPhase, GeometryError> {
    check_mass(m)?;
    let family = MetricFamily::koenigs(m, 1)?;
    let v = IntegralSystem::new(&family).evaluate(p)?;
    let chi = koenigs_chi(m, p.t)?;
    let rho = koenigs_rho(m);
    let p_chi = p.pt / koenigs_dchi(m, p.t);
    let h_k = (p_chi * p_chi + p.py * p.py / chi.cosh().powi(2)) / koenigs_weight(m, chi);
    let s1_k = p.y.cosh() * (0.5 * rho * h_k + chi.tanh() * p.py * p.py)
        - p.y.sinh() * p_chi * p.py;
    Ok(KoenigsPhase {
        h: v.h,
        h_k,
        s1: v.s1,
        s1_k,
    })
}

/// `|ψ(t)|` stays below `νπ/2`.
pub fn psi_range(family: &MetricFamily) -> f64 {
    family.nu() as f64 * FRAC_PI_2
}
