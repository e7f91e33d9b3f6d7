//! File formats, wall-clock budgets and the benchmark harness around
//! [`qbvsched_core`].

pub mod bench;
pub mod budget;
pub mod gcl_files;
pub mod io;

pub use qbvsched_core as core;
