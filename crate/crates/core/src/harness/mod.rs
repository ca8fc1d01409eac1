//! Executable lower-bound constructions: instance generators, gadget and
//! marginals-family stream builders, reduction drivers, decoders and
//! neighboring-stream checks.

mod diff;
mod dump;
mod gadgets;
mod instances;
mod msf;
mod planner;
mod reduction;
mod topk;

pub use diff::{
    column_diffs, deghist_counter_streams, diff_streams, neighbor_diff_check, sne_level_diff_check,
    sne_level_streams, ColumnDiff, NeighborReport,
};
pub use dump::{dump_gadget, timetable_rows, write_timetable, TimetableRow};
pub use gadgets::{
    build_deghist_gadget, build_kcore_gadget, build_matching_gadget, Decoded, Decoder, GadgetInstance,
    GadgetProblem, Reading,
};
pub use instances::{InnerProductInstance, MarginalsInstance};
pub use msf::{build_msf_stream, msf_family, MsfFamily, MsfProblem, ZeroBasedGadget};
pub use planner::{generalized_inverse, plan_item_level, plan_item_level_with, ItemPlan, DEFAULT_ROW_SCALE};
pub use reduction::{
    run_inc_reduction, Biased, ExactOracle, Mechanism, QueryOutcome, ReductionReport, Release, Statistic,
};
pub use topk::build_topk_reduction;
