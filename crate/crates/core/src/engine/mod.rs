//! Scheduling engines.
//!
//! Every engine is a pure function of an [`Instance`] and a [`Budget`]. The
//! exact engines search a lattice of event-driven candidate times (zero plus
//! the ends of already placed windows projected back through the route) with
//! chronological backtracking; the heuristics place greedily and report
//! [`Unknown::HeuristicInfeasible`] instead of a proof when they fail.

use alloc::string::String;
use alloc::vec::Vec;
use core::cell::Cell;
use core::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    hyperperiod, Fragmentation, Isolation, ModelConfig, ModelError, Network, ReleaseMode, RoutingMode, Stream,
    StreamId, Topology, WaitMode,
};
use crate::schedule::Schedule;

mod book;
mod cg;
mod collide;
mod dt;
mod exact_nw;
mod exact_wa;
pub mod frag;
mod iter_groups;
mod ls_nw;
mod ls_pl;
mod ls_tb;
mod prep;
mod wa;


pub use collide::collides_periodic;
pub use iter_groups::{degree_of_conflict, group_streams, GroupParams};
pub use ls_pl::link_phases;

/// A network, a stream set and the scheduling model to apply.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub network: Network,
    pub streams: Vec<Stream>,
    pub cfg: ModelConfig,
}

impl Instance {
    pub fn validate(&self) -> Result<(), ModelError> {
        self.network.validate()?;
        let topo = Topology::new(&self.network);
        let mut ids = alloc::collections::BTreeSet::new();
        for s in &self.streams {
            if !ids.insert(s.id) {
                return Err(ModelError::DuplicateStream(s.id));
            }
            s.validate(&topo)?;
            if self.cfg.release_mode == ReleaseMode::Fully && s.fixed_release.is_some() {
                return Err(ModelError::InvalidStream(
                    s.id,
                    "fixed release given under the fully schedulable model",
                ));
            }
        }
        if !self.streams.is_empty() {
            hyperperiod(&self.streams)?;
        }
        Ok(())
    }
}

/// Cooperative search budget, polled at every node expansion.
pub trait Budget {
    fn exhausted(&self) -> bool;
}

pub struct Unlimited;

impl Budget for Unlimited {
    fn exhausted(&self) -> bool {
        false
    }
}

/// Allows a fixed number of polls.
pub struct NodeBudget {
    left: Cell<u64>,
}

impl NodeBudget {
    pub fn new(nodes: u64) -> Self {
        NodeBudget { left: Cell::new(nodes) }
    }
}

impl Budget for NodeBudget {
    fn exhausted(&self) -> bool {
        match self.left.get() {
            0 => true,
            n => {
                self.left.set(n - 1);
                false
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Infeasible {
    /// The stream's no-wait bound on every admissible route exceeds its
    /// deadline.
    DeadlineBelowBound(StreamId),
    /// The complete search space was explored.
    SearchExhausted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Unknown {
    BudgetExhausted,
    HeuristicInfeasible,
    CyclicDependency,
    Unsupported,
    Crash,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Schedulable(Schedule),
    Unschedulable(Infeasible),
    Unknown(Unknown),
}

impl Outcome {
    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Schedulable(_) => "schedulable",
            Outcome::Unschedulable(_) => "unschedulable",
            Outcome::Unknown(_) => "unknown",
        }
    }

    pub fn reason(&self) -> &'static str {
        match self {
            Outcome::Schedulable(_) => "",
            Outcome::Unschedulable(Infeasible::DeadlineBelowBound(_)) => "deadline-below-bound",
            Outcome::Unschedulable(Infeasible::SearchExhausted) => "search-exhausted",
            Outcome::Unknown(Unknown::BudgetExhausted) => "budget-exhausted",
            Outcome::Unknown(Unknown::HeuristicInfeasible) => "heuristic-infeasible",
            Outcome::Unknown(Unknown::CyclicDependency) => "cyclic-dependency",
            Outcome::Unknown(Unknown::Unsupported) => "unsupported",
            Outcome::Unknown(Unknown::Crash) => "crash",
        }
    }

    pub fn schedule(&self) -> Option<&Schedule> {
        match self {
            Outcome::Schedulable(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_schedulable(&self) -> bool {
        matches!(self, Outcome::Schedulable(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{engine} does not support this model: {why}")]
    Precondition { engine: EngineKind, why: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EngineKind {
    ExactNw,
    ExactWa,
    LsNw,
    LsTb,
    LsPl,
    Dt,
    Cg,
    IterGroups,
}

impl fmt::Display for EngineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl EngineKind {
    pub const ALL: [EngineKind; 8] = [
        EngineKind::ExactNw,
        EngineKind::ExactWa,
        EngineKind::LsNw,
        EngineKind::LsTb,
        EngineKind::LsPl,
        EngineKind::Dt,
        EngineKind::Cg,
        EngineKind::IterGroups,
    ];

    pub fn id(self) -> &'static str {
        match self {
            EngineKind::ExactNw => "exact-nw",
            EngineKind::ExactWa => "exact-wa",
            EngineKind::LsNw => "ls-nw",
            EngineKind::LsTb => "ls-tb",
            EngineKind::LsPl => "ls-pl",
            EngineKind::Dt => "dt",
            EngineKind::Cg => "cg",
            EngineKind::IterGroups => "iter-groups",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.id() == s)
    }

    /// Whether the engine proves infeasibility (as opposed to giving up).
    pub fn is_exact(self) -> bool {
        matches!(self, EngineKind::ExactNw | EngineKind::ExactWa)
    }

    /// Rejects models the engine was not designed for.
    pub fn check_config(self, cfg: &ModelConfig) -> Result<(), EngineError> {
        let fail = |why: &str| {
            Err(EngineError::Precondition {
                engine: self,
                why: why.into(),
            })
        };
        let nw = cfg.wait_mode == WaitMode::NoWait;
        let fixed = cfg.routing_mode == RoutingMode::Fixed;
        if self != EngineKind::ExactNw && cfg.fragmentation != Fragmentation::Off {
            return fail("fragmentation is only supported by exact-nw");
        }
        match self {
            EngineKind::ExactNw | EngineKind::IterGroups if !nw => fail("requires wait_mode no_wait"),
            EngineKind::ExactWa if nw => fail("requires wait_mode wait_allowed"),
            EngineKind::LsNw | EngineKind::Cg if !nw || fixed => {
                fail("requires wait_mode no_wait and routing_mode joint")
            }
            EngineKind::Dt if !nw || !fixed => fail("requires wait_mode no_wait and routing_mode fixed"),
            EngineKind::LsTb if nw || !fixed || cfg.release_mode != ReleaseMode::Partially => {
                fail("requires wait_allowed, fixed routing and release_mode partially")
            }
            EngineKind::LsPl if nw || !fixed => fail("requires wait_allowed and fixed routing"),
            _ => Ok(()),
        }
    }

    /// The engine's own scheduling model, keeping the generic parts of
    /// `base` (framing, k, GCL limit, fragmentation for exact-nw). Used to
    /// run every engine of a benchmark on the same instances.
    pub fn native_config(self, base: &ModelConfig) -> ModelConfig {
        let mut cfg = *base;
        if self != EngineKind::ExactNw {
            cfg.fragmentation = Fragmentation::Off;
        }
        let (wait, routing, release) = match self {
            EngineKind::ExactNw | EngineKind::Dt | EngineKind::IterGroups => {
                (WaitMode::NoWait, RoutingMode::Fixed, ReleaseMode::Fully)
            }
            EngineKind::ExactWa => (WaitMode::WaitAllowed, RoutingMode::Fixed, ReleaseMode::Fully),
            EngineKind::LsNw | EngineKind::Cg => (WaitMode::NoWait, RoutingMode::Joint, ReleaseMode::Fully),
            EngineKind::LsTb | EngineKind::LsPl => (WaitMode::WaitAllowed, RoutingMode::Fixed, ReleaseMode::Partially),
        };
        cfg.wait_mode = wait;
        cfg.routing_mode = routing;
        cfg.release_mode = release;
        if wait == WaitMode::WaitAllowed && cfg.isolation == Isolation::Unrestricted {
            cfg.isolation = Isolation::Frame;
        }
        cfg
    }

    /// `instance` with the engine's native model applied; fixed releases
    /// are dropped or defaulted to zero to match the release model.
    pub fn adapt(self, instance: &Instance) -> Instance {
        let cfg = self.native_config(&instance.cfg);
        let streams = instance
            .streams
            .iter()
            .map(|s| {
                let mut s = s.clone();
                s.fixed_release = match cfg.release_mode {
                    ReleaseMode::Fully => None,
                    ReleaseMode::Partially => Some(s.fixed_release.unwrap_or_default()),
                };
                s
            })
            .collect();
        Instance {
            network: instance.network.clone(),
            streams,
            cfg,
        }
    }

    pub fn run(self, instance: &Instance, budget: &dyn Budget) -> Result<Outcome, EngineError> {
        self.check_config(&instance.cfg)?;
        instance.validate()?;
        if budget.exhausted() {
            return Ok(Outcome::Unknown(Unknown::BudgetExhausted));
        }
        if instance.streams.is_empty() {
            return Ok(Outcome::Schedulable(Schedule::default()));
        }
        match self {
            EngineKind::ExactNw => frag::schedule_fragmented(instance, budget),
            EngineKind::ExactWa => exact_wa::schedule(instance, budget),
            EngineKind::LsNw => ls_nw::schedule(instance, budget),
            EngineKind::LsTb => ls_tb::schedule(instance, budget),
            EngineKind::LsPl => ls_pl::schedule(instance, budget),
            EngineKind::Dt => dt::schedule(instance, budget),
            EngineKind::Cg => cg::schedule(instance, budget),
            EngineKind::IterGroups => iter_groups::schedule(instance, &GroupParams::default(), budget),
        }
    }
}

pub fn schedule_exact_nw(instance: &Instance, budget: &dyn Budget) -> Result<Outcome, EngineError> {
    EngineKind::ExactNw.run(instance, budget)
}

pub fn schedule_exact_wa(instance: &Instance, budget: &dyn Budget) -> Result<Outcome, EngineError> {
    EngineKind::ExactWa.run(instance, budget)
}

pub fn schedule_ls_nw(instance: &Instance, budget: &dyn Budget) -> Result<Outcome, EngineError> {
    EngineKind::LsNw.run(instance, budget)
}

pub fn schedule_ls_tb(instance: &Instance, budget: &dyn Budget) -> Result<Outcome, EngineError> {
    EngineKind::LsTb.run(instance, budget)
}

pub fn schedule_ls_pl(instance: &Instance, budget: &dyn Budget) -> Result<Outcome, EngineError> {
    EngineKind::LsPl.run(instance, budget)
}

pub fn schedule_dt(instance: &Instance, budget: &dyn Budget) -> Result<Outcome, EngineError> {
    EngineKind::Dt.run(instance, budget)
}

pub fn schedule_cg(instance: &Instance, budget: &dyn Budget) -> Result<Outcome, EngineError> {
    EngineKind::Cg.run(instance, budget)
}

pub fn schedule_iter_groups(
    instance: &Instance,
    params: &GroupParams,
    budget: &dyn Budget,
) -> Result<Outcome, EngineError> {
    EngineKind::IterGroups.check_config(&instance.cfg)?;
    instance.validate()?;
    if budget.exhausted() {
        return Ok(Outcome::Unknown(Unknown::BudgetExhausted));
    }
    iter_groups::schedule(instance, params, budget)
}
