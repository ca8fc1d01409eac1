//! Monotone symmetric norms, static Top-k estimation and continual
//! symmetric norm estimation.

mod boosted;
mod mechanism;
mod norm;
mod static_topk;

pub use boosted::{boosted_query, boosting_copies, median, BoostedSne};
pub use mechanism::{level_count, level_stream, level_transition, sne_step, SneMechanism, SneParameters};
pub use norm::{audit_norm, eval_norm, sorted_magnitudes, topk_prefix_sums, NormSpec};
pub use static_topk::{static_topk, static_topk_bound};
