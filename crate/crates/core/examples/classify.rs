//! Global classification: whether the metric extends to the hyperbolic
//! plane, from the sign of the conformal factor `Σ`.
//!
//! `cargo run --example classify`

use si_geodesics::geometry::{
    check_hypotheses, classify_manifold, psi_bound, DEFAULT_GRID_POINTS, DEFAULT_T_RANGE,
};
use si_geodesics::{MetricFamily, Parity};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let families = [
        ("Koenigs m=2", MetricFamily::koenigs(2.0, 1)?),
        ("even n=2 [2,3,5]", MetricFamily::new(Parity::EvenDegree, 2, vec![2.0, 3.0, 5.0], vec![1, 1, -1])?),
        ("odd n=1 [3,5]", MetricFamily::new(Parity::OddDegree, 1, vec![3.0, 5.0], vec![1, -1])?),
        (
            "odd n=2 [4,3,2,6]",
            MetricFamily::new(Parity::OddDegree, 2, vec![4.0, 3.0, 2.0, 6.0], vec![1, 1, -1, -1])?,
        ),
    ];
    for (name, f) in &families {
        let r = classify_manifold(f, DEFAULT_T_RANGE, DEFAULT_GRID_POINTS);
        println!("{name}: {:?}", r.verdict);
        println!("  Σ limits {:?}, min A on grid {:.4}", r.sigma_limits, r.a_min);
        if let Some(t) = r.sign_change_at {
            println!("  Σ changes sign at t = {t:.10}");
        }
        if let Some(k) = r.koenigs_verdict {
            println!("  via the Koenigs change of variables: {k:?}");
        }
        if let Ok(h) = check_hypotheses(f) {
            println!("  h1 {} h2 {} h3 {} (sum {:.4})", h.h1, h.h2, h.h3, h.h3_sum);
            if f.n() > 1 {
                println!("  lower angle bound B = {:.6}", psi_bound(f)?);
            }
        }
        println!("  cosh(20) A(20) = {:.3e}", r.area_probe);
    }
    Ok(())
}
