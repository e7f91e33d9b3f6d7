//! Per-link phase scheduler. Links are layered by the dependency "some
//! stream crosses link a right before link b"; all frames of a phase are
//! placed (earliest eligible first) before the next phase starts.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use super::book::Book;
use super::prep::{build_schedule, prepare, unfragmented, Ctx, Placement, Prepared};
use super::wa::{dispatch_candidates, eligibility, empty_times, queue_choices, try_dispatch};
use super::{Budget, EngineError, Instance, Outcome, Unknown};
use crate::model::{LinkId, ModelError, ReleaseMode};

/// Link phases of the dependency graph over the routes the engine would
/// use, or `None` when the graph has a cycle.
pub fn link_phases(inst: &Instance) -> Result<Option<Vec<Vec<LinkId>>>, ModelError> {
    let ctx = match prepare(inst, &unfragmented(inst)) {
        Ok(Prepared::Ready(ctx)) => ctx,
        Ok(Prepared::Infeasible(_)) => return Ok(None),
        Err(super::EngineError::Model(e)) => return Err(e),
        Err(_) => return Ok(None),
    };
    Ok(phases(&ctx).map(|ph| {
        ph.into_iter()
            .map(|layer| layer.into_iter().map(|l| inst.network.links[l].id).collect())
            .collect()
    }))
}

/// Longest-path layering of the link dependency graph (Kahn's algorithm).
fn phases(ctx: &Ctx) -> Option<Vec<Vec<usize>>> {
    let mut succ: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    let mut nodes = BTreeSet::new();
    for sp in &ctx.streams {
        for hop in &sp.options[0].hops {
            nodes.insert(hop.link);
            if let Some(p) = hop.parent {
                succ.entry(sp.options[0].hops[p].link).or_default().insert(hop.link);
            }
        }
    }
    let mut indeg: BTreeMap<usize, usize> = nodes.iter().map(|&n| (n, 0)).collect();
    for targets in succ.values() {
        for t in targets {
            *indeg.get_mut(t).expect("node") += 1;
        }
    }
    let mut layer: Vec<usize> = indeg.iter().filter(|(_, &d)| d == 0).map(|(&n, _)| n).collect();
    let mut out = Vec::new();
    let mut seen = 0;
    while !layer.is_empty() {
        seen += layer.len();
        let mut next = BTreeSet::new();
        for n in &layer {
            for t in succ.get(n).into_iter().flatten() {
                let d = indeg.get_mut(t).expect("node");
                *d -= 1;
                if *d == 0 {
                    next.insert(*t);
                }
            }
        }
        out.push(core::mem::take(&mut layer));
        layer = next.into_iter().collect();
    }
    (seen == nodes.len()).then_some(out)
}

pub(crate) fn schedule(inst: &Instance, budget: &dyn Budget) -> Result<Outcome, EngineError> {
    let ctx = match prepare(inst, &unfragmented(inst))? {
        Prepared::Ready(ctx) => ctx,
        Prepared::Infeasible(why) => return Ok(Outcome::Unschedulable(why)),
    };
    let Some(phases) = phases(&ctx) else {
        return Ok(Outcome::Unknown(Unknown::CyclicDependency));
    };
    let fully = inst.cfg.release_mode == ReleaseMode::Fully;
    let base_release = |s: usize| ctx.streams[s].release.unwrap_or(0);
    let mut times: Vec<Vec<Vec<(u64, u8)>>> = ctx
        .streams
        .iter()
        .map(|sp| empty_times(&sp.options[0], sp.parts))
        .collect();
    let mut book = Book::new(ctx.n_links);
    let iso = inst.cfg.effective_isolation();
    // under the fully schedulable model the talker may hold a frame, the
    // release then moves to its dispatch
    let mode = if fully {
        ReleaseMode::Partially
    } else {
        inst.cfg.release_mode
    };
    for layer in phases {
        for link in layer {
            let mut frames: Vec<(u64, usize, usize, u32)> = Vec::new();
            for (s, sp) in ctx.streams.iter().enumerate() {
                let opt = &sp.options[0];
                if let Some(h) = opt.hops.iter().position(|hop| hop.link == link) {
                    for j in 0..sp.parts {
                        let parent_e = match opt.hops[h].parent {
                            Some(p) => times[s][p][j as usize].0 + opt.hops[p].tx + opt.hops[p].lag,
                            None => base_release(s),
                        };
                        frames.push((parent_e, s, h, j));
                    }
                }
            }
            frames.sort_by_key(|&(e, s, _, j)| (e, ctx.streams[s].id, j));
            for (_, s, h, j) in frames {
                let sp = &ctx.streams[s];
                let opt = &sp.options[0];
                let release = base_release(s);
                let (a, e) = eligibility(opt, &times[s], release, h, j);
                let mut done = false;
                'search: for t in dispatch_candidates(&book, sp, opt, release, h, j, (a, e), mode) {
                    for q in queue_choices(&book, opt, &times[s], h, j) {
                        if budget.exhausted() {
                            return Ok(Outcome::Unknown(Unknown::BudgetExhausted));
                        }
                        if let Some(p) = try_dispatch(&book, s, sp, opt, h, j, a, t, q, iso) {
                            book.push(link, p);
                            times[s][h][j as usize] = (t, q);
                            done = true;
                            break 'search;
                        }
                    }
                }
                if !done {
                    return Ok(Outcome::Unknown(Unknown::HeuristicInfeasible));
                }
            }
        }
    }
    let placements: Vec<Placement> = times
        .into_iter()
        .enumerate()
        .map(|(s, times)| {
            let release = if fully { times[0][0].0 } else { base_release(s) };
            Placement {
                stream: s,
                option: 0,
                release,
                times,
            }
        })
        .collect();
    Ok(Outcome::Schedulable(build_schedule(&ctx, &placements)))
}
