//! End-to-end acceptance run: one line per criterion, non-zero exit if any
//! criterion fails.

use std::process::ExitCode;

use rayon::prelude::*;
use si_geodesics::brackets::{verify_commutation, verify_poisson_algebra};
use si_geodesics::checks::{
    max_sigma_form_error, max_gen_pde_residual, max_h_derivative_residual, max_ode_residual,
    max_top_identity_residual, sample_t,
};
use si_geodesics::flow::{
    conservation_report, conservation_report_with, convergence_ratio, integrate, time_reversal_error,
};
use si_geodesics::geometry::{
    check_hypotheses, classify_manifold, conformal_residuals, koenigs_correspondence,
    koenigs_phase, psi_bound, psi_lower, recurrence_checks, sigma_factor, Verdict,
    DEFAULT_GRID_POINTS, DEFAULT_T_RANGE,
};
use si_geodesics::integrals::{gen_context, moment_polynomial, IntegralSystem};
use si_geodesics::numerics::{stream, uniform, SamplerSpec};
use si_geodesics::{MetricFamily, Parity, PhasePoint};

struct Case {
    name: &'static str,
    family: MetricFamily,
}

fn cases() -> Vec<Case> {
    vec![
        Case {
            name: "even n=1 [2]",
            family: MetricFamily::koenigs(2.0, 1).unwrap(),
        },
        Case {
            name: "even n=2 [2,3,5]",
            family: MetricFamily::new(Parity::EvenDegree, 2, vec![2.0, 3.0, 5.0], vec![1, 1, -1])
                .unwrap(),
        },
        Case {
            name: "odd n=1 [3,5]",
            family: MetricFamily::new(Parity::OddDegree, 1, vec![3.0, 5.0], vec![1, -1]).unwrap(),
        },
        Case {
            name: "odd n=2 [4,3,2,6]",
            family: MetricFamily::new(
                Parity::OddDegree,
                2,
                vec![4.0, 3.0, 2.0, 6.0],
                vec![1, 1, -1, -1],
            )
            .unwrap(),
        },
    ]
}

fn grid(range: (f64, f64), points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| range.0 + (range.1 - range.0) * i as f64 / (points - 1) as f64)
        .collect()
}

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

fn c01_superintegrability() -> Outcome {
    let mut worst = 0.0f64;
    let mut controls = Vec::new();
    for (ci, case) in cases().iter().enumerate() {
        let f = &case.family;
        let spec = SamplerSpec::flow_box(100 + ci as u64);
        let bad = IntegralSystem::new(f).with_perturbation(1, 1e-3);
        let runs: Vec<(f64, f64)> = (0..10u64)
            .into_par_iter()
            .map(|i| {
                let p0 = spec.sample_phase(i).unwrap();
                match integrate(f, p0, 10.0, 1e-3) {
                    Ok(tr) => (
                        conservation_report(&tr).max(),
                        conservation_report_with(&bad, &tr).max(),
                    ),
                    Err(_) => (f64::INFINITY, 0.0),
                }
            })
            .collect();
        worst = runs.iter().map(|r| r.0).fold(worst, f64::max);
        controls.push(runs.iter().map(|r| r.1).fold(0.0, f64::max));
    }
    let control = controls.iter().copied().fold(0.0, f64::max);
    let shown: Vec<String> = controls.iter().map(|c| format!("{c:.2e}")).collect();
    Outcome::new(
        worst < 1e-6 && control > 1e-4,
        format!(
            "max drift {worst:.3e} (< 1e-6); λ_1 += 1e-3 control drift {control:.3e} (> 1e-4), \
             per family [{}]",
            shown.join(", ")
        ),
    )
}

fn per_family(limit: f64, what: &str, f: impl Fn(&MetricFamily, u64) -> f64) -> Outcome {
    let values: Vec<(String, f64)> = cases()
        .iter()
        .enumerate()
        .map(|(i, c)| (c.name.to_string(), f(&c.family, 10 + i as u64)))
        .collect();
    let worst = values.iter().map(|v| v.1).fold(0.0, f64::max);
    let parts: Vec<String> = values.iter().map(|(n, v)| format!("{n}: {v:.2e}")).collect();
    Outcome::new(worst < limit, format!("{what} < {limit:e}; {}", parts.join(", ")))
}

fn c05_moments() -> Outcome {
    let mut rel = 0.0f64;
    let mut at_roots = 0.0f64;
    for (ci, case) in cases().iter().enumerate() {
        let f = &case.family;
        for i in 0..50u64 {
            let mut rng = stream(500 + ci as u64, i);
            let t = uniform(&mut rng, (-3.0, 3.0));
            let xi = uniform(&mut rng, (-2.0, 0.9));
            let exact = moment_polynomial(f.masses(), xi);
            let got = gen_context(f, t, xi).unwrap().sigma;
            rel = rel.max((got - exact).abs() / exact.abs().max(1.0));
        }
        for &t in &sample_t(600 + ci as u64, 10, (-3.0, 3.0)) {
            for xi in std::iter::once(1.0).chain(f.masses().iter().map(|m| 1.0 / m)) {
                at_roots = at_roots.max(gen_context(f, t, xi).unwrap().sigma.abs());
            }
        }
    }
    Outcome::new(
        rel < 1e-10 && at_roots < 1e-10,
        format!("relative {rel:.2e} (< 1e-10); |Σ(1)|, |Σ(1/m_k)| ≤ {at_roots:.2e} (< 1e-10)"),
    )
}

fn c07_h_coefficients() -> Outcome {
    let mut der = 0.0f64;
    let mut top = 0.0f64;
    for (i, case) in cases().iter().enumerate() {
        assert!(case.family.nu() <= 4);
        der = der.max(max_h_derivative_residual(&case.family, 700 + i as u64, 100));
        top = top.max(max_top_identity_residual(&case.family, 700 + i as u64, 100));
    }
    Outcome::new(
        der < 1e-7 && top < 1e-10,
        format!("derivative identity {der:.2e} (< 1e-7); top identity {top:.2e} (< 1e-10)"),
    )
}

fn c08_conformal_factor() -> Outcome {
    let sigma_forms = cases()
        .iter()
        .enumerate()
        .map(|(i, c)| max_sigma_form_error(&c.family, 800 + i as u64, 50))
        .fold(0.0, f64::max);
    let odd2 = &cases()[3].family;
    let g = grid(DEFAULT_T_RANGE, DEFAULT_GRID_POINTS);
    let recurrences = g
        .iter()
        .map(|&t| recurrence_checks(odd2, t).unwrap().max())
        .fold(0.0, f64::max);
    let b2 = psi_bound(odd2).unwrap();
    let (lo, hi) = g.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &t| {
        let v = psi_lower(odd2, t).unwrap();
        (lo.min(v), hi.max(v))
    });
    let h3 = check_hypotheses(odd2).unwrap().h3_sum;
    let bound_ok = lo > 0.0 && hi <= b2 * (1.0 + 1e-14) && b2 < 1.0;
    Outcome::new(
        sigma_forms < 1e-10 && recurrences < 1e-10 && bound_ok,
        format!(
            "Σ vs coefficient form {sigma_forms:.2e}; recurrences {recurrences:.2e}; \
             ψ^(2) in [{lo:.3e}, {hi:.6}] with B_2 = {b2:.6} < h3 sum {h3:.4} < 1"
        ),
    )
}

fn c09_koenigs() -> Outcome {
    let (mut h, mut s1, mut raw, mut rel) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for m in [2.0, 10.0] {
        let spec = SamplerSpec::verification(900 + m as u64);
        for i in 0..50 {
            let k = koenigs_phase(m, &spec.sample_phase(i).unwrap()).unwrap();
            h = h.max(k.h_residual(m));
            s1 = s1.max(k.s1_residual(m));
            raw = raw.max(k.s1_unscaled_residual());
        }
        for t in grid((-5.0, 5.0), 201) {
            let k = koenigs_correspondence(m, t).unwrap();
            rel = rel.max(k.res_a).max(k.res_b);
        }
    }
    Outcome::new(
        h < 1e-10 && s1 < 1e-9 && rel < 1e-8,
        format!(
            "|H_K − H/μ²| {h:.2e} (< 1e-10); |S₁ᴷ − S₁/√m| {s1:.2e} (< 1e-9; without the 1/√m \
             factor the difference is {raw:.2e}); relations (a), (b) {rel:.2e} (< 1e-8)"
        ),
    )
}

fn c10_classification() -> Outcome {
    let cs = cases();
    let verdict = |i: usize| classify_manifold(&cs[i].family, DEFAULT_T_RANGE, DEFAULT_GRID_POINTS);
    let odd1 = verdict(2);
    let odd2 = verdict(3);
    let even2 = verdict(1);
    let root_ok = even2.sign_change_at.is_some_and(|r| {
        let f = &cs[1].family;
        sigma_factor(f, r - 1e-9) * sigma_factor(f, r + 1e-9) < 0.0
    });
    let area_ok = cs
        .iter()
        .all(|c| classify_manifold(&c.family, DEFAULT_T_RANGE, 64).area_diverges);
    Outcome::new(
        odd1.verdict == Verdict::HyperbolicPlane
            && odd2.verdict == Verdict::HyperbolicPlane
            && even2.verdict == Verdict::NoManifold
            && root_ok
            && area_ok,
        format!(
            "odd [3,5]: {:?}; odd [4,3,2,6]: {:?}; even [2,3,5]: {:?} (Σ changes sign at t = {:.10}); \
             cosh(20)·A(20) > 1e6 for every family: {area_ok}",
            odd1.verdict,
            odd2.verdict,
            even2.verdict,
            even2.sign_change_at.unwrap_or(f64::NAN)
        ),
    )
}

fn c11_conformal() -> Outcome {
    let (mut c, mut d, mut n) = (0.0f64, 0.0f64, 0usize);
    for case in &cases()[2..] {
        for t in grid(DEFAULT_T_RANGE, DEFAULT_GRID_POINTS) {
            if sigma_factor(&case.family, t) > 0.0 {
                let (rc, rd) = conformal_residuals(&case.family, t).unwrap();
                c = c.max(rc);
                d = d.max(rd);
                n += 1;
            }
        }
    }
    Outcome::new(
        c < 1e-10 && d < 1e-6,
        format!("{n} points; ρ cosh χ vs cosh t {c:.2e} (< 1e-10); ρ χ' vs A {d:.2e} (< 1e-6)"),
    )
}

fn c12_integrator() -> Outcome {
    let p0 = PhasePoint::new(0.3, 0.0, 0.5, 0.7);
    let mut ratios = Vec::new();
    let mut reversal = 0.0f64;
    for case in cases() {
        ratios.push(convergence_ratio(&case.family, p0, 10.0, 0.05).unwrap());
        reversal = reversal.max(time_reversal_error(&case.family, p0, 10.0, 1e-3).unwrap());
    }
    let ok = ratios.iter().all(|r| (8.0..=32.0).contains(r)) && reversal < 1e-6;
    let shown: Vec<String> = ratios.iter().map(|r| format!("{r:.2}")).collect();
    Outcome::new(
        ok,
        format!(
            "drift ratio for steps 0.05 → 0.025: [{}] (in [8, 32]); time reversal {reversal:.2e} (< 1e-6)",
            shown.join(", ")
        ),
    )
}

fn main() -> ExitCode {
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("superintegrability along trajectories", Box::new(c01_superintegrability)),
        (
            "bracket vanishing",
            Box::new(|| {
                per_family(1e-6, "normalized |{H,S1}|, |{H,S2}| over 200 points", |f, s| {
                    verify_commutation(f, 200, s).max_commutation()
                })
            }),
        ),
        (
            "ODE systems",
            Box::new(|| per_family(1e-6, "residuals at 50 t", |f, s| max_ode_residual(f, s, 50))),
        ),
        (
            "generating-function PDEs",
            Box::new(|| {
                per_family(1e-6, "residuals at 50 (t, ξ)", |f, s| max_gen_pde_residual(f, s, 50))
            }),
        ),
        ("moment product formula", Box::new(c05_moments)),
        (
            "Poisson algebra",
            Box::new(|| {
                per_family(1e-5, "relative error at 100 points, |P_y| > 0.2", |f, s| {
                    verify_poisson_algebra(f, 100, s)
                })
            }),
        ),
        ("H-coefficient identities", Box::new(c07_h_coefficients)),
        ("conformal factor forms and recurrences", Box::new(c08_conformal_factor)),
        ("Koenigs correspondence", Box::new(c09_koenigs)),
        ("global classification", Box::new(c10_classification)),
        ("conformal identities", Box::new(c11_conformal)),
        ("integrator quality", Box::new(c12_integrator)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let out = run();
        let tag = if out.pass { "PASS" } else { "FAIL" };
        if !out.pass {
            failed += 1;
        }
        println!("criterion {:>2} {tag}  {name}: {}", i + 1, out.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
