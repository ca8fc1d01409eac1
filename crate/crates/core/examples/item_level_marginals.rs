//! Item-level reductions from one-way marginals through every shipped
//! marginals-solving family, with a neighboring-row check and size planning.

use continual_dp::harness::{
    build_msf_stream, neighbor_diff_check, plan_item_level, run_inc_reduction, ExactOracle, GadgetProblem,
    MarginalsInstance, MsfProblem,
};
use continual_dp::privacy::RandomSource;

fn main() -> continual_dp::Result<()> {
    let mut rng = RandomSource::new(8);
    let y = MarginalsInstance::random(6, 3, &mut rng)?;
    println!("column sums: {:?}", (0..y.d()).map(|j| y.column_sum(j)).collect::<Vec<_>>());
    for problem in MsfProblem::all(3) {
        let g = build_msf_stream(problem, &y)?;
        let report = run_inc_reduction(&g, &mut ExactOracle::for_instance(&g)?, 0.0)?;
        let diff = neighbor_diff_check(GadgetProblem::Msf(problem), 6, 1)?;
        println!(
            "{:>15}: weight {}, {} steps, decoded {:?}, neighbor touches {:?}",
            problem.name(),
            g.weight,
            g.stream.horizon(),
            report.outcomes.iter().map(|o| o.decoded).collect::<Vec<_>>(),
            diff.touched_edges
        );
    }
    for delta in [0.0, 1e-6] {
        let plan = plan_item_level(MsfProblem::StMincut, 100_000, 10_000, 1.0, delta)?;
        println!("plan for T=1e5, N=1e4, delta={delta}: {plan:?}");
    }
    Ok(())
}
