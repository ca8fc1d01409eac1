//! Private degree histogram of an insertion-only graph stream.

use continual_dp::graph::degree_histogram;
use continual_dp::graph_mech::DegreeHistogramMechanism;
use continual_dp::privacy::{NoiseMode, PrivacyBudget, RandomSource};
use continual_dp::stream::Update;

fn main() -> continual_dp::Result<()> {
    let n = 12;
    let horizon = 40;
    let budget = PrivacyBudget::new(1.0, 1e-6, 0.05, NoiseMode::Standard)?;
    let mut mech = DegreeHistogramMechanism::new(n, horizon, &budget, RandomSource::new(3))?;
    println!("per-counter epsilon {:.4}, simultaneous bound {:.1}", mech.counter_epsilon(), mech.bound());
    let mut out = Vec::new();
    for t in 0..horizon {
        let u = t % n;
        let v = (t * 5 + 1) % n;
        out = if u == v { mech.step(&Update::Noop)? } else { mech.step(&Update::insert_edge(u, v))? };
    }
    let exact = degree_histogram(mech.graph());
    println!("degree  true  released");
    for deg in 1..n {
        println!("{deg:>6} {:>5} {:>9.1}", exact[deg - 1], out[deg]);
    }
    Ok(())
}
