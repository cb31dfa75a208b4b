//! Profile `A(t)`, its limits and the curvature of a few metric families.
//!
//! `cargo run --example metric_profile`

use si_geodesics::{MetricFamily, Parity};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let families = [
        ("Koenigs m=2", MetricFamily::koenigs(2.0, 1)?),
        ("even n=2", MetricFamily::new(Parity::EvenDegree, 2, vec![2.0, 3.0, 5.0], vec![1, 1, -1])?),
        ("odd n=2", MetricFamily::new(Parity::OddDegree, 2, vec![4.0, 3.0, 2.0, 6.0], vec![1, 1, -1, -1])?),
    ];
    for (name, f) in &families {
        let (lo, hi) = f.a_limits();
        println!("{name}: degree {}, A(-inf) = {lo:.6}, A(+inf) = {hi:.6}", f.degree());
        println!("{:>6} {:>12} {:>12} {:>12} {:>12}", "t", "A", "A'", "K", "R");
        for t in [-3.0, -1.0, 0.0, 1.0, 3.0] {
            println!(
                "{t:>6.1} {:>12.6} {:>12.6} {:>12.6} {:>12.6}",
                f.eval_a(t),
                f.eval_a_prime(t),
                f.gaussian_curvature(t)?,
                f.curvature_r(t)?
            );
        }
        let hc = f.eval_h_coeffs(0.5);
        let coeffs: Vec<String> = (0..=f.nu()).map(|k| format!("{:.5}", hc.get(k as i64))).collect();
        println!("H-coefficients at t = 0.5: [{}]\n", coeffs.join(", "));
    }
    Ok(())
}
