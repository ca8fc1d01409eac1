//! Monotone symmetric norm estimation: one SNE instance tracking l1, l2 and
//! Top-10 against the sandwich bounds, plus the boosted median variant.

use continual_dp::privacy::{PrivacyBudget, RandomSource};
use continual_dp::sne::{eval_norm, BoostedSne, NormSpec, SneMechanism};
use continual_dp::stream::Update;

fn main() -> continual_dp::Result<()> {
    let (n, horizon, zeta) = (100, 5000, 0.5);
    let budget = PrivacyBudget::pure(1.0, 0.1)?;
    let mut rng = RandomSource::new(5);
    let mut sne = SneMechanism::new(n, horizon, zeta, &budget, rng.fork())?;
    let mut boosted = BoostedSne::new(n, horizon, zeta, &budget, rng.fork())?;
    let p = *sne.parameters();
    println!("tau_f {:.1}, levels {}, tau_b {:.1}, slack A {:.3e}", p.tau_f, p.levels, p.tau_b, p.additive_slack());
    println!("boosted copies: {}", boosted.copies().len());

    let mut stream = rng.fork();
    for _ in 0..horizon {
        // Skewed stream: low ids are far more frequent.
        let i = stream.below(n).min(stream.below(n));
        let u = Update::InsertElement(i);
        sne.step(&u)?;
        boosted.step(&u)?;
    }
    let freq: Vec<f64> = sne.frequencies().iter().map(|&f| f as f64).collect();
    for norm in [NormSpec::Lp(1.0), NormSpec::Lp(2.0), NormSpec::TopK(10)] {
        let truth = eval_norm(&norm, &freq)?;
        let (lo, hi) = p.sandwich(truth, norm.unit_value());
        println!(
            "{:>5}: true {truth:>9.1}  estimate {:>9.1}  boosted {:>9.1}  window [{lo:.3e}, {hi:.1}]",
            norm.label(),
            eval_norm(&norm, sne.estimate())?,
            boosted.query(&norm)?,
        );
    }
    Ok(())
}
