//! Traceback list scheduler: frames are placed greedily at their earliest
//! feasible dispatch time; when a frame cannot be placed, the most recently
//! placed stream of the local conflict set (streams using the blocking
//! link) is removed and rescheduled after the blocked one.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use super::book::Book;
use super::exact_nw::deadline_order;
use super::prep::{build_schedule, prepare, unfragmented, Ctx, Placement, Prepared};
use super::wa::{dispatch_candidates, eligibility, empty_times, items, queue_choices, try_dispatch};
use super::{Budget, EngineError, Instance, Outcome, Unknown};
use crate::model::ModelConfig;

pub(crate) const MAX_TRACEBACKS: u32 = 10_000;

pub(crate) enum Greedy {
    Placed(Placement),
    /// The link on which some frame found no slot.
    Blocked(usize),
    OutOfBudget,
}

/// Places every frame of `s` at its earliest feasible time, pushing the
/// frames into `book`. On failure the stream's frames are removed again.
pub(crate) fn place_greedy(ctx: &Ctx, cfg: &ModelConfig, book: &mut Book, s: usize, budget: &dyn Budget) -> Greedy {
    let sp = &ctx.streams[s];
    let opt = &sp.options[0];
    let release = sp.release.unwrap_or(0);
    let mut times = empty_times(opt, sp.parts);
    for (hop, j) in items(opt, sp.parts) {
        let (a, e) = eligibility(opt, &times, release, hop, j);
        let mut done = false;
        'search: for t in dispatch_candidates(book, sp, opt, release, hop, j, (a, e), cfg.release_mode) {
            for q in queue_choices(book, opt, &times, hop, j) {
                if budget.exhausted() {
                    book.remove_stream(s);
                    return Greedy::OutOfBudget;
                }
                let iso = cfg.effective_isolation();
                if let Some(p) = try_dispatch(book, s, sp, opt, hop, j, a, t, q, iso) {
                    book.push(opt.hops[hop].link, p);
                    times[hop][j as usize] = (t, q);
                    done = true;
                    break 'search;
                }
            }
        }
        if !done {
            book.remove_stream(s);
            return Greedy::Blocked(opt.hops[hop].link);
        }
    }
    Greedy::Placed(Placement {
        stream: s,
        option: 0,
        release,
        times,
    })
}

pub(crate) fn schedule(inst: &Instance, budget: &dyn Budget) -> Result<Outcome, EngineError> {
    Ok(run(inst, budget)?.0)
}

/// The outcome and the number of tracebacks taken.
pub(crate) fn run(inst: &Instance, budget: &dyn Budget) -> Result<(Outcome, u32), EngineError> {
    let ctx = match prepare(inst, &unfragmented(inst))? {
        Prepared::Ready(ctx) => ctx,
        Prepared::Infeasible(why) => return Ok((Outcome::Unschedulable(why), 0)),
    };
    let mut book = Book::new(ctx.n_links);
    let mut queue: VecDeque<usize> = deadline_order(&ctx).into();
    // placed streams, most recent last
    let mut placed: Vec<Placement> = Vec::new();
    let mut tracebacks = 0;
    while let Some(s) = queue.pop_front() {
        match place_greedy(&ctx, &inst.cfg, &mut book, s, budget) {
            Greedy::OutOfBudget => return Ok((Outcome::Unknown(Unknown::BudgetExhausted), tracebacks)),
            Greedy::Placed(pl) => placed.push(pl),
            Greedy::Blocked(link) => {
                let victim = placed
                    .iter()
                    .rposition(|pl| book.links[link].iter().any(|w| w.stream == pl.stream));
                let Some(v) = victim else {
                    return Ok((Outcome::Unknown(Unknown::HeuristicInfeasible), tracebacks));
                };
                if tracebacks == MAX_TRACEBACKS {
                    return Ok((Outcome::Unknown(Unknown::HeuristicInfeasible), tracebacks));
                }
                tracebacks += 1;
                let pl = placed.remove(v);
                book.remove_stream(pl.stream);
                queue.push_front(pl.stream);
                queue.push_front(s);
            }
        }
    }
    Ok((Outcome::Schedulable(build_schedule(&ctx, &placed)), tracebacks))
}
