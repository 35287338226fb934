//! File formats, wall-clock deadlines, the benchmark harness and the
//! command line for `ubcount-core`.

pub mod bench;
pub mod cli;
pub mod deadline;
pub mod dimacs;

pub use deadline::WallDeadline;
