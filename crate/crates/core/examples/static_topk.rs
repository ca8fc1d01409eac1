//! Static Top-k norms of a frequency vector from one private prefix-sum pass.

use continual_dp::privacy::{PrivacyBudget, RandomSource};
use continual_dp::sne::{static_topk, static_topk_bound, topk_prefix_sums};

fn main() -> continual_dp::Result<()> {
    let n = 256;
    let budget = PrivacyBudget::pure(1.0, 0.01)?;
    let mut rng = RandomSource::new(11);
    let freq: Vec<i64> = (0..n).map(|_| rng.below(50) as i64).collect();
    let exact = topk_prefix_sums(&freq.iter().map(|&f| f as f64).collect::<Vec<_>>());
    let private = static_topk(&freq, &budget, rng.fork())?;
    let worst = exact.iter().zip(&private).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    for k in [1, 10, 64, 256] {
        println!("top-{k:<3} true {:>8.0}  private {:>10.2}", exact[k - 1], private[k - 1]);
    }
    println!("max error over k {worst:.2}, calibrated bound {:.2}", static_topk_bound(n, &budget)?);
    Ok(())
}
