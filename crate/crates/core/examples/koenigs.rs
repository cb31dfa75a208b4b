//! The Koenigs change of variables `t ↦ χ` and the relations it satisfies.
//!
//! `cargo run --example koenigs [-- mass]`

use si_geodesics::geometry::{
    koenigs_correspondence, koenigs_mu, koenigs_phase, koenigs_rho, koenigs_s1_scale,
};
use si_geodesics::PhasePoint;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m: f64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(2.0);
    println!(
        "m = {m}: ρ_K = {:.12}, μ = {:.12}, S1 scale = {:.12}",
        koenigs_rho(m),
        koenigs_mu(m),
        koenigs_s1_scale(m)
    );
    println!("{:>6} {:>14} {:>10} {:>10}", "t", "χ", "res (a)", "res (b)");
    for t in [-4.0, -1.0, 0.0, 0.5, 2.0, 4.0] {
        let k = koenigs_correspondence(m, t)?;
        println!("{t:>6.1} {:>14.10} {:>10.2e} {:>10.2e}", k.chi, k.res_a, k.res_b);
    }
    let p = PhasePoint::new(0.7, -0.3, 0.4, 0.8);
    let k = koenigs_phase(m, &p)?;
    println!("\nH = {:.12}, H_K = {:.12}, H/μ² = {:.12}", k.h, k.h_k, k.h / koenigs_mu(m).powi(2));
    println!("S1 = {:.12}, S1_K = {:.12}, S1/√m = {:.12}", k.s1, k.s1_k, k.s1 / m.sqrt());
    Ok(())
}
