//! Schedule synthesis for 802.1Qbv time-aware-shaper networks.
//!
//! The crate is `no_std` (it needs `alloc`) and purely computational: network
//! and stream-set generation, the scheduling engines, Gate Control List
//! derivation and an independent schedule checker/simulator. File formats,
//! wall-clock budgets and the benchmark runner live in the `qbvsched` crate.
//!
//! All time quantities are integer nanoseconds ([`TimeNs`]); nothing in the
//! schedule path rounds.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod engine;
pub mod model;
pub mod netgen;
pub mod schedule;
pub mod streamgen;
pub mod time;
pub mod verify;

#[cfg(test)]
mod testkit;

pub use engine::{Budget, EngineKind, Instance, Outcome};
pub use model::{
    Device, DeviceId, DeviceKind, Fragmentation, Isolation, Link, LinkId, ModelConfig, ModelError, Network,
    ReleaseMode, Route, RoutingMode, Stream, StreamId, WaitMode,
};
pub use schedule::{Gcl, GclEntry, GclTextError, Schedule, StreamPlan, TxWindow};
pub use time::TimeNs;
