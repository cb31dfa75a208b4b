//! The λ table, the extra integrals at a phase point and the moments `σ_k`.
//!
//! `cargo run --example integrals`

use si_geodesics::integrals::{gen_context, lambda_table, moments, ode_residuals};
use si_geodesics::{eval_integrals, MetricFamily, Parity, PhasePoint};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = MetricFamily::new(Parity::OddDegree, 2, vec![4.0, 3.0, 2.0, 6.0], vec![1, 1, -1, -1])?;
    let t = 0.4;

    let table = lambda_table(&f, t);
    let (lo, hi) = table.range();
    println!("λ table at t = {t}:");
    for j in lo..=hi {
        println!("  λ_{j:<2} = {:+.12}", table.get(j));
    }
    println!("worst ODE residual: {:.2e}", ode_residuals(&f, t).max());

    let p = PhasePoint::new(t, 0.3, 0.6, -0.5);
    let v = eval_integrals(&f, &p)?;
    println!("\nat {p:?}:");
    println!("  H = {:.12}  P_y = {:.3}", v.h, v.py);
    println!("  S1 = {:.12}  S2 = {:.12}", v.s1, v.s2);
    println!("  S+ = {:.12}  S- = {:.12}", v.splus, v.sminus);

    let mv = moments(&f);
    println!("\nmoments σ_k: {:?}", mv.sigma);
    println!(
        "S+ S- = {:.12}, moment form = {:.12}",
        v.splus * v.sminus,
        mv.product_form(v.h, v.py)
    );
    for xi in [-1.0, 0.25, 1.0 / 6.0] {
        let g = gen_context(&f, t, xi)?;
        println!("Σ({xi:.4}) = {:+.3e}  (L = {:.6}, M = {:.6})", g.sigma, g.l, g.m);
    }
    Ok(())
}
