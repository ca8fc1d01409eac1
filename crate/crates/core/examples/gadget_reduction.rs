//! Inner-product gadgets driven through exact oracles and private mechanisms.

use continual_dp::graph_mech::{LadderMechanism, LadderTarget};
use continual_dp::harness::{
    build_deghist_gadget, build_kcore_gadget, build_matching_gadget, build_topk_reduction, run_inc_reduction,
    ExactOracle, InnerProductInstance,
};
use continual_dp::privacy::{PrivacyBudget, RandomSource};

fn main() -> continual_dp::Result<()> {
    let mut rng = RandomSource::new(2024);
    let inst = InnerProductInstance::random(6, 1.0, &mut rng)?;
    println!("secret x = {:?}", inst.x.iter().map(|&b| u8::from(b)).collect::<Vec<_>>());
    println!("answers  = {:?}", inst.answers());

    for g in [
        build_matching_gadget(&inst)?,
        build_kcore_gadget(&inst)?,
        build_deghist_gadget(&inst)?,
        build_topk_reduction(&inst)?,
    ] {
        let mut oracle = ExactOracle::for_instance(&g)?;
        let report = run_inc_reduction(&g, &mut oracle, 0.0)?;
        let decoded: Vec<f64> = report.outcomes.iter().map(|o| o.decoded).collect();
        println!(
            "{:>8}: {} vertices, {} steps, exact decode {decoded:?}",
            g.problem.name(),
            g.stream.universe(),
            g.stream.horizon()
        );
    }

    let g = build_matching_gadget(&inst)?;
    let budget = PrivacyBudget::pure(1.0, 0.1)?;
    let mut ladder =
        LadderMechanism::new(LadderTarget::Matching, g.stream.universe(), g.stream.horizon(), &budget, rng.fork())?;
    let report = run_inc_reduction(&g, &mut ladder, 0.0)?;
    println!(
        "ladder on matching gadget: max error {}, allowance 2 x {:.1}",
        report.max_error,
        ladder.error_allowance(&budget)
    );
    Ok(())
}
