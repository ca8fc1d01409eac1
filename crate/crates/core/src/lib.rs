pub mod cli;
pub mod counting;
pub mod error;
pub mod graph;
pub mod graph_mech;
pub mod harness;
pub mod privacy;
pub mod sne;
pub mod stream;
pub mod svt;

pub use error::{Error, Result};
