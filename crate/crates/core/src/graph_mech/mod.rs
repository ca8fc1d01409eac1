//! Private continual release of graph statistics on insertion-only streams.

mod composition;
mod deghist;
mod ladder;
mod statistic;

pub use composition::advanced_composition_epsilon;
pub use deghist::{private_degree_histogram_step, DegreeHistogramMechanism, DegreeSensitivity};
pub use ladder::{default_step, ladder_step, LadderMechanism};
pub use statistic::{largest_clique_order, LadderTarget, StatisticTracker};
