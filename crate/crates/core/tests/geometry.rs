use std::f64::consts::PI;

use si_geodesics::geometry::{
    check_hypotheses, classify_manifold, conformal_map, koenigs_chi, koenigs_dchi, koenigs_mu,
    koenigs_rho, psi, psi_bound, psi_lower, sigma_factor, sigma_limits, sigma_via_coeffs,
    GeometryError, Verdict, DEFAULT_GRID_POINTS, DEFAULT_T_RANGE, GRID_CSV_HEADER,
};
use si_geodesics::numerics::central_diff;
use si_geodesics::{MetricFamily, Parity};

fn odd1() -> MetricFamily {
    MetricFamily::new(Parity::OddDegree, 1, vec![3.0, 5.0], vec![1, -1]).unwrap()
}

fn odd2() -> MetricFamily {
    MetricFamily::new(Parity::OddDegree, 2, vec![4.0, 3.0, 2.0, 6.0], vec![1, 1, -1, -1]).unwrap()
}

fn even2() -> MetricFamily {
    MetricFamily::new(Parity::EvenDegree, 2, vec![2.0, 3.0, 5.0], vec![1, 1, -1]).unwrap()
}

#[test]
fn psi_derivative_is_the_profile() {
    for f in [odd1(), odd2(), even2(), MetricFamily::koenigs(2.0, 1).unwrap()] {
        let at_zero: f64 = f
            .masses()
            .iter()
            .zip(f.signs())
            .map(|(m, e)| e as f64 * (m - 1.0).sqrt().atan())
            .sum();
        assert!((psi(&f, 0.0) - at_zero).abs() < 1e-15);
        for t in [-4.0, -1.0, 0.3, 2.0, 6.0] {
            let d = central_diff(|x| psi(&f, x), t, 1e-5);
            assert!((d - (f.eval_a(t) - 1.0) / t.cosh()).abs() < 1e-9, "{t}");
        }
    }
}

#[test]
fn hypotheses_and_bound_for_the_paired_family() {
    let h = check_hypotheses(&odd2()).unwrap();
    let expected = (1.0 - 1.0 / 3f64.sqrt()) + (1.0 / 2f64.sqrt() - 1.0 / 5f64.sqrt());
    assert!((h.h3_sum - expected).abs() < 1e-15);
    assert!(h.all());
    assert!((psi_bound(&odd2()).unwrap() - PI / 12.0).abs() < 1e-15);
    assert!((psi_lower(&odd2(), 0.0).unwrap() - PI / 12.0).abs() < 1e-15);

    let swapped = MetricFamily::new(Parity::OddDegree, 2, vec![2.0, 3.0, 4.0, 6.0], vec![1, 1, -1, -1])
        .unwrap();
    assert!(!check_hypotheses(&swapped).unwrap().h2);
    assert!(matches!(check_hypotheses(&even2()), Err(GeometryError::BadParity)));
}

#[test]
fn sigma_forms_and_limits() {
    for f in [odd1(), odd2(), even2()] {
        for t in [-12.0, -3.0, 0.0, 0.7, 9.0] {
            let (a, b) = (sigma_factor(&f, t), sigma_via_coeffs(&f, t));
            assert!((a - b).abs() < 1e-10 * a.abs().max(1.0), "{t}: {a} vs {b}");
        }
    }
    let f = odd2();
    let (lo, hi) = sigma_limits(&f);
    assert!((sigma_factor(&f, -40.0) - lo).abs() < 1e-12);
    assert!((sigma_factor(&f, 40.0) - hi).abs() < 1e-12);
    let k = MetricFamily::koenigs(2.0, 1).unwrap();
    assert_eq!(sigma_limits(&k), (f64::INFINITY, f64::NEG_INFINITY));
    assert!(sigma_factor(&k, -30.0) > 1e10 && sigma_factor(&k, 30.0) < -1e10);
    let (lo, hi) = sigma_limits(&odd1());
    assert!((sigma_factor(&odd1(), -40.0) - lo).abs() < 1e-12);
    assert!((sigma_factor(&odd1(), 40.0) - hi).abs() < 1e-12);
}

#[test]
fn conformal_map_pulls_back_the_hyperbolic_metric() {
    for f in [odd1(), odd2()] {
        for t in [-8.0, -2.0, 0.0, 1.5, 8.0] {
            let (chi, rho) = conformal_map(&f, t).unwrap();
            assert!((rho * chi.cosh() - t.cosh()).abs() < 1e-10 * t.cosh());
            let dchi = central_diff(|x| conformal_map(&f, x).unwrap().0, t, 1e-5);
            assert!((rho * dchi - f.eval_a(t)).abs() < 1e-7, "{t}");
        }
    }
}

#[test]
fn verdicts() {
    let r1 = classify_manifold(&odd1(), DEFAULT_T_RANGE, DEFAULT_GRID_POINTS);
    let r2 = classify_manifold(&odd2(), DEFAULT_T_RANGE, DEFAULT_GRID_POINTS);
    let re = classify_manifold(&even2(), DEFAULT_T_RANGE, DEFAULT_GRID_POINTS);
    assert_eq!(r1.verdict, Verdict::HyperbolicPlane);
    assert_eq!(r2.verdict, Verdict::HyperbolicPlane);
    assert_eq!(r2.hypothesis_flags, Some([true, true, true]));
    assert_eq!(re.verdict, Verdict::NoManifold);
    let root = re.sign_change_at.unwrap();
    assert!(sigma_factor(&even2(), root - 1e-9) * sigma_factor(&even2(), root + 1e-9) < 0.0);
    for r in [&r1, &r2, &re] {
        assert!(r.area_diverges);
        assert_eq!(r.grid.len(), DEFAULT_GRID_POINTS);
    }

    let k = classify_manifold(&MetricFamily::koenigs(2.0, 1).unwrap(), DEFAULT_T_RANGE, 401);
    assert_eq!(k.verdict, Verdict::NoManifold);
    assert_eq!(k.koenigs_verdict, Some(Verdict::HyperbolicPlane));
    assert_eq!(r2.koenigs_verdict, None);
}

#[test]
fn grid_csv_leaves_undefined_cells_empty() {
    let r = classify_manifold(&even2(), (-2.0, 2.0), 41);
    let mut buf = Vec::new();
    r.write_grid_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], GRID_CSV_HEADER);
    assert_eq!(lines.len(), 42);
    let undefined = lines[1..].iter().filter(|l| l.contains(",,")).count();
    let negative = r.sigma.iter().filter(|&&s| s <= 0.0).count();
    assert!(negative > 0);
    assert_eq!(undefined, negative);
}

#[test]
fn koenigs_change_of_variables() {
    for m in [1.5, 2.0, 10.0] {
        let (rho, mu) = (koenigs_rho(m), koenigs_mu(m));
        assert!((rho - 2.0 * m.sqrt() / (m + 1.0)).abs() < 1e-15);
        assert!((mu - (m / (m + 1.0)).sqrt()).abs() < 1e-15);
        for t in [-3.0, -0.5, 0.0, 0.8, 4.0] {
            let chi = koenigs_chi(m, t).unwrap();
            let w = (1.0 + rho * chi.tanh()).sqrt();
            assert!((w * chi.cosh() - mu * t.cosh()).abs() < 1e-10 * t.cosh());
            let d = central_diff(|x| koenigs_chi(m, x).unwrap(), t, 1e-5);
            let closed = m.sqrt() * t.cosh() / (m * t.cosh().powi(2) - 1.0).sqrt();
            assert!((d - closed).abs() < 1e-8 && (koenigs_dchi(m, t) - closed).abs() < 1e-12);
            let f = MetricFamily::koenigs(m, 1).unwrap();
            assert!((w * closed - mu * f.eval_a(t)).abs() < 1e-10);
        }
    }
    assert!(koenigs_chi(1.0, 0.0).is_err());
}
