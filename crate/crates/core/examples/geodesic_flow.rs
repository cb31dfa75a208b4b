//! Integrates a geodesic and reports how well `H`, `P_y`, `S₁`, `S₂` are
//! conserved; the trajectory is written to `trajectory.csv` when a path is
//! given.
//!
//! `cargo run --example geodesic_flow [-- trajectory.csv]`

use std::fs::File;
use std::io::BufWriter;

use si_geodesics::flow::{conservation_report, convergence_ratio, integrate, time_reversal_error};
use si_geodesics::{MetricFamily, Parity, PhasePoint};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = MetricFamily::new(Parity::OddDegree, 2, vec![4.0, 3.0, 2.0, 6.0], vec![1, 1, -1, -1])?;
    let p0 = PhasePoint::new(0.3, 0.0, 0.5, 0.7);
    let traj = integrate(&f, p0, 10.0, 1e-3)?;
    let end = traj.last();
    println!("{} samples, end point t = {:.6}, y = {:.6}", traj.len(), end.t, end.y);
    println!("{:#?}", conservation_report(&traj));
    println!("drift ratio 0.05 -> 0.025: {:.2}", convergence_ratio(&f, p0, 10.0, 0.05)?);
    println!("time reversal error: {:.2e}", time_reversal_error(&f, p0, 10.0, 1e-3)?);
    if let Some(path) = std::env::args().nth(1) {
        traj.write_csv(BufWriter::new(File::create(&path)?))?;
        println!("wrote {path}");
    }
    Ok(())
}
