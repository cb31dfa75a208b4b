//! Runs the `check` verb of the command-line interface on every JSON
//! configuration in `examples/configs`.
//!
//! `cargo run --example run_configs`

use std::path::Path;

use si_geodesics::cli;

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs");
    let mut paths: Vec<_> = std::fs::read_dir(&dir)
        .expect("configs directory")
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    for path in paths {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let args = ["si-geodesics", "check", "--samples", "50", "--config", path.to_str().unwrap()];
        let code = cli::run(args, &mut out, &mut err);
        println!("{}: exit {code}", path.file_name().unwrap().to_string_lossy());
        let report: serde_json::Value = serde_json::from_slice(&out).unwrap_or_default();
        if let Some(checks) = report.as_object() {
            for (name, c) in checks {
                println!("  {name:<22} {:.2e} (tol {:.0e})", c["max_residual"].as_f64().unwrap_or(f64::NAN), c["tolerance"].as_f64().unwrap_or(f64::NAN));
            }
        }
        if !err.is_empty() {
            print!("  {}", String::from_utf8_lossy(&err));
        }
    }
}
