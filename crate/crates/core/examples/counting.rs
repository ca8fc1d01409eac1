//! Continual counting with the binary tree mechanism, and a shifted
//! multi-column histogram, compared against the calibrated error bound.

use continual_dp::counting::{compute_error_bound, HistogramMechanism, TreeCounter};
use continual_dp::privacy::{PrivacyBudget, RandomSource};

fn main() -> continual_dp::Result<()> {
    let horizon = 1024;
    let budget = PrivacyBudget::pure(1.0, 0.01)?;
    let mut rng = RandomSource::new(42);

    let mut counter = TreeCounter::new(horizon, &budget, rng.fork())?;
    let mut truth = 0i64;
    let mut worst = 0.0f64;
    for t in 0..horizon {
        let bit = i64::from(t % 3 != 0);
        truth += bit;
        let noisy = counter.step(bit)?;
        worst = worst.max((noisy - truth as f64).abs());
    }
    let bound = compute_error_bound(1, &budget, horizon)?;
    println!("counter: final count {truth}, max error {worst:.2}, calibrated bound {bound:.2}");

    let columns = 8;
    let mut hist = HistogramMechanism::new(columns, horizon, &budget, true, rng.fork())?;
    let mut freq = vec![0i64; columns];
    for t in 0..horizon {
        let col = (t * 7) % columns;
        freq[col] += 1;
        hist.step(col, 1)?;
    }
    println!("shifted histogram, released = noisy count - bound (bound {:.2}):", hist.bound());
    for (c, (f, est)) in freq.iter().zip(hist.outputs()).enumerate() {
        println!("  column {c}: true {f:>4}  released {est:>8.2}");
    }
    Ok(())
}
