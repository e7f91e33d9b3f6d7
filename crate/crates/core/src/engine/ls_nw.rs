//! No-wait list scheduler: streams in order of route length, each placed
//! at the earliest free release offset on the first candidate route that
//! has one. Never revisits a placed stream.

use alloc::vec;
use alloc::vec::Vec;

use super::collide::collides;
use super::prep::{build_schedule, prepare, unfragmented, Ctx, Placement, Prepared};
use super::{Budget, EngineError, Instance, Outcome, Unknown};

/// Busy intervals per link over one hyperperiod, sorted and disjoint.
struct BusyLists {
    links: Vec<Vec<(u64, u64)>>,
}

impl BusyLists {
    /// First busy interval on `link` intersecting `[s, e)`.
    fn conflict(&self, link: usize, s: u64, e: u64) -> Option<(u64, u64)> {
        let list = &self.links[link];
        let i = list.partition_point(|iv| iv.1 <= s);
        list.get(i).copied().filter(|iv| iv.0 < e)
    }

    fn insert(&mut self, link: usize, s: u64, e: u64) {
        let list = &mut self.links[link];
        let i = list.partition_point(|iv| iv.0 < s);
        list.insert(i, (s, e));
    }
}

enum Find {
    At(u64),
    None,
    OutOfBudget,
}

/// Earliest release offset of `stream` on `option`, jumping past each
/// conflicting busy interval.
fn find_it(ctx: &Ctx, busy: &BusyLists, stream: usize, option: usize, budget: &dyn Budget) -> Find {
    let sp = &ctx.streams[stream];
    let opt = &sp.options[option];
    let (p, h) = (sp.period, ctx.hyper);
    // fragments of one stream keep fixed distances: check them once
    for (hi, hop) in opt.hops.iter().enumerate() {
        for j in 0..sp.parts {
            for jj in 0..j {
                let (a, b) = (opt.nw_start(hi, jj) % p, opt.nw_start(hi, j) % p);
                if collides(a, hop.tx, p, b, hop.tx, p) {
                    return Find::None;
                }
            }
        }
    }
    let (mut r, last) = match sp.release {
        Some(r) => (r, r),
        None => (0, p - 1),
    };
    while r <= last {
        if budget.exhausted() {
            return Find::OutOfBudget;
        }
        let mut jump = None;
        'check: for (hi, hop) in opt.hops.iter().enumerate() {
            for j in 0..sp.parts {
                let start = r + opt.nw_start(hi, j);
                let phase = start % p;
                if phase + hop.tx > p {
                    jump = Some(r + (p - phase));
                    break 'check;
                }
                for k in 0..h / p {
                    let s = (start + k * p) % h;
                    if let Some((_, end)) = busy.conflict(hop.link, s, s + hop.tx) {
                        jump = Some(r + (end - s));
                        break 'check;
                    }
                }
            }
        }
        match jump {
            None => return Find::At(r),
            Some(next) => r = next,
        }
    }
    Find::None
}

pub(crate) fn schedule(inst: &Instance, budget: &dyn Budget) -> Result<Outcome, EngineError> {
    let ctx = match prepare(inst, &unfragmented(inst))? {
        Prepared::Ready(ctx) => ctx,
        Prepared::Infeasible(why) => return Ok(Outcome::Unschedulable(why)),
    };
    let mut order: Vec<usize> = (0..ctx.streams.len()).collect();
    // shortest candidate first in the option list
    order.sort_by_key(|&i| (ctx.streams[i].options[0].hops.len(), ctx.streams[i].id));
    let mut busy = BusyLists {
        links: vec![Vec::new(); ctx.n_links],
    };
    let mut placements = Vec::with_capacity(order.len());
    for s in order {
        let sp = &ctx.streams[s];
        let mut placed = false;
        for option in 0..sp.options.len() {
            match find_it(&ctx, &busy, s, option, budget) {
                Find::OutOfBudget => return Ok(Outcome::Unknown(Unknown::BudgetExhausted)),
                Find::None => continue,
                Find::At(r) => {
                    let pl = Placement::no_wait(&ctx, s, option, r);
                    let opt = &sp.options[option];
                    for (hop, frags) in opt.hops.iter().zip(&pl.times) {
                        for &(t, _) in frags {
                            for k in 0..ctx.hyper / sp.period {
                                let st = (t + k * sp.period) % ctx.hyper;
                                busy.insert(hop.link, st, st + hop.tx);
                            }
                        }
                    }
                    placements.push(pl);
                    placed = true;
                    break;
                }
            }
        }
        if !placed {
            return Ok(Outcome::Unknown(Unknown::HeuristicInfeasible));
        }
    }
    Ok(Outcome::Schedulable(build_schedule(&ctx, &placements)))
}
