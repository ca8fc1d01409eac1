//! Sparse vector queries and the SVT ladder releasing a maximum matching size.

use continual_dp::graph_mech::{LadderMechanism, LadderTarget};
use continual_dp::privacy::{PrivacyBudget, RandomSource};
use continual_dp::stream::Update;
use continual_dp::svt::{svt_alpha, SvtInstance};

fn main() -> continual_dp::Result<()> {
    let budget = PrivacyBudget::pure(1.0, 0.1)?;
    let mut rng = RandomSource::new(7);

    let mut svt = SvtInstance::new(&budget, 3, rng.fork())?;
    let thresholds = [50.0, 50.0, 50.0, 50.0];
    let queries = [10.0, 120.0, 30.0, 140.0];
    for (q, thr) in queries.iter().zip(thresholds) {
        println!("svt: query {q:>5} vs {thr}: {:?}", svt.query(*q, thr)?);
    }
    println!("svt alpha for 4 queries, cap 3: {:.1}", svt_alpha(&budget, 4, 3, 1.0));

    let n = 60;
    let horizon = 200;
    let mut ladder = LadderMechanism::new(LadderTarget::Matching, n, horizon, &budget, rng.fork())?;
    println!("ladder: range {:?}, rung spacing {}, cap {}", ladder.range(), ladder.step_size(), ladder.cap());
    let mut edges = rng.fork();
    for t in 1..=horizon {
        let u = edges.below(n);
        let v = (u + 1 + edges.below(n - 1)) % n;
        let released = ladder.step(&Update::insert_edge(u, v))?;
        if t % 40 == 0 {
            println!("  t={t:>3} true matching {:>2}  released {released}", ladder.true_value());
        }
    }
    println!("ladder error allowance: {:.1}", ladder.error_allowance(&budget));
    Ok(())
}
