//! Decoded inner-product error of the SVT ladder on the matching gadget for
//! growing dimension. Writes `results/lower_bound_matching.csv` at the
//! workspace root; the numbers are demonstrative, not a certified bound.

use std::path::PathBuf;

use continual_dp::cli::append_csv;
use continual_dp::graph_mech::{LadderMechanism, LadderTarget};
use continual_dp::harness::{build_matching_gadget, run_inc_reduction, InnerProductInstance};
use continual_dp::privacy::{PrivacyBudget, RandomSource};
use serde::Serialize;

#[derive(Serialize)]
struct Row {
    d: usize,
    trial: usize,
    vertices: usize,
    steps: usize,
    max_error: f64,
    mean_error: f64,
    ladder_allowance: f64,
}

fn main() -> continual_dp::Result<()> {
    let trials = 10;
    let budget = PrivacyBudget::pure(1.0, 0.1)?;
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../results");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("lower_bound_matching.csv");
    if path.exists() {
        std::fs::remove_file(&path)?;
    }
    let mut rows = Vec::new();
    println!("   d  mean(max error)  allowance");
    for d in [4, 8, 16, 32] {
        let mut total = 0.0;
        let mut allowance = 0.0;
        for trial in 0..trials {
            let mut rng = RandomSource::new(1000 * d as u64 + trial as u64);
            let inst = InnerProductInstance::random(d, 1.0, &mut rng)?;
            let g = build_matching_gadget(&inst)?;
            let (n, horizon) = (g.stream.universe(), g.stream.horizon());
            let mut ladder = LadderMechanism::new(LadderTarget::Matching, n, horizon, &budget, rng.fork())?;
            let report = run_inc_reduction(&g, &mut ladder, 0.0)?;
            allowance = ladder.error_allowance(&budget);
            total += report.max_error;
            rows.push(Row {
                d,
                trial,
                vertices: n,
                steps: horizon,
                max_error: report.max_error,
                mean_error: report.mean_error,
                ladder_allowance: allowance,
            });
        }
        println!("{d:>4}  {:>15.2}  {allowance:>9.1}", total / trials as f64);
    }
    append_csv(&path, "continual-dp/lower-bound-matching v1", &rows)?;
    println!("wrote {}", path.canonicalize()?.display());
    Ok(())
}
