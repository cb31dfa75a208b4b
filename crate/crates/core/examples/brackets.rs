//! Commutation of the extra integrals with `H` and the Poisson algebra of
//! `S₊, S₋`, by finite differences and by exact dual-number gradients.
//!
//! `cargo run --example brackets`

use si_geodesics::brackets::{
    koenigs_algebra_sign, poisson_bracket, verify_commutation, verify_poisson_algebra, Observable,
    Scheme,
};
use si_geodesics::integrals::IntegralSystem;
use si_geodesics::{MetricFamily, Parity, PhasePoint};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let families = [
        MetricFamily::koenigs(2.0, 1)?,
        MetricFamily::new(Parity::EvenDegree, 2, vec![2.0, 3.0, 5.0], vec![1, 1, -1])?,
        MetricFamily::new(Parity::OddDegree, 1, vec![3.0, 5.0], vec![1, -1])?,
    ];
    println!("frozen algebra sign: {}", koenigs_algebra_sign());
    for f in &families {
        let report = verify_commutation(f, 200, 7);
        println!(
            "{:?} n={} masses {:?}: |{{H,S1}}| {:.2e}, |{{H,S2}}| {:.2e}, algebra {:.2e}",
            f.parity(),
            f.n(),
            f.masses(),
            report.max_abs_HS1,
            report.max_abs_HS2,
            verify_poisson_algebra(f, 100, 7)
        );
    }

    let f = &families[1];
    let sys = IntegralSystem::new(f);
    let p = PhasePoint::new(0.2, -0.1, 0.4, 0.9);
    for scheme in [Scheme::default(), Scheme::Analytic] {
        let b = poisson_bracket(&sys, Observable::Splus, Observable::Sminus, &p, scheme)?;
        println!("{{S+, S-}} with {scheme:?}: {b:.12}");
    }
    Ok(())
}
