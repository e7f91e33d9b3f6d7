//! Fragmentation planning in front of the exact no-wait search.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::book::Book;
use super::exact_nw::{deadline_order, search, Search};
use super::prep::{build_schedule, prepare, Prepared};
use super::{Budget, EngineError, Infeasible, Instance, Outcome, Unknown};
use crate::model::{frame_split, Fragmentation, ModelConfig, Stream, StreamId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FragmentPlan {
    pub stream: StreamId,
    pub fragments: u32,
    pub fragment_bytes: u32,
}

/// Splits every stream into `requested` equal fragments (more if the MTU
/// demands it, fewer if the payload is too small).
pub fn fragment_streams(streams: &[Stream], cfg: &ModelConfig, requested: u32) -> Vec<FragmentPlan> {
    streams
        .iter()
        .map(|s| {
            let (fragments, fragment_bytes) = frame_split(s.payload_bytes, cfg.mtu_bytes, requested);
            FragmentPlan {
                stream: s.id,
                fragments,
                fragment_bytes,
            }
        })
        .collect()
}

/// Exact no-wait search with a fixed fragment count per stream.
pub(crate) fn schedule_with_parts(inst: &Instance, parts: &[u32], budget: &dyn Budget) -> Result<Outcome, EngineError> {
    let ctx = match prepare(inst, parts)? {
        Prepared::Ready(ctx) => ctx,
        Prepared::Infeasible(why) => return Ok(Outcome::Unschedulable(why)),
    };
    let mut book = Book::new(ctx.n_links);
    Ok(match search(&ctx, &deadline_order(&ctx), &mut book, budget) {
        Search::Found(placements) => Outcome::Schedulable(build_schedule(&ctx, &placements)),
        Search::Exhausted => Outcome::Unschedulable(Infeasible::SearchExhausted),
        Search::OutOfBudget => Outcome::Unknown(Unknown::BudgetExhausted),
    })
}

/// Tries fragment counts from the configured maximum down to one and
/// returns the first schedulable plan. Unschedulable only if every plan
/// was refuted.
pub(crate) fn schedule_fragmented(inst: &Instance, budget: &dyn Budget) -> Result<Outcome, EngineError> {
    let max = match inst.cfg.fragmentation {
        Fragmentation::Off => 1,
        Fragmentation::MaxFragments(f) => f.max(1),
    };
    let mut tried: BTreeSet<Vec<u32>> = BTreeSet::new();
    let mut unknown = false;
    let mut refuted = Infeasible::SearchExhausted;
    for n in (1..=max).rev() {
        let parts: Vec<u32> = fragment_streams(&inst.streams, &inst.cfg, n)
            .iter()
            .map(|p| p.fragments)
            .collect();
        if !tried.insert(parts.clone()) {
            continue;
        }
        match schedule_with_parts(inst, &parts, budget)? {
            s @ Outcome::Schedulable(_) => return Ok(s),
            Outcome::Unknown(Unknown::BudgetExhausted) => return Ok(Outcome::Unknown(Unknown::BudgetExhausted)),
            Outcome::Unknown(_) => unknown = true,
            Outcome::Unschedulable(why) => refuted = why,
        }
    }
    Ok(if unknown {
        Outcome::Unknown(Unknown::BudgetExhausted)
    } else {
        Outcome::Unschedulable(refuted)
    })
}
