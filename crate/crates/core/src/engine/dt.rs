//! Incremental offset assignment with the gcd collision test and no
//! traceback. Each stream takes the first collision-free offset.

use alloc::vec::Vec;

use super::book::Book;
use super::exact_nw::{deadline_order, fits, place, release_candidates};
use super::prep::{build_schedule, prepare, unfragmented, Placement, Prepared};
use super::{Budget, EngineError, Instance, Outcome, Unknown};

pub(crate) fn schedule(inst: &Instance, budget: &dyn Budget) -> Result<Outcome, EngineError> {
    let ctx = match prepare(inst, &unfragmented(inst))? {
        Prepared::Ready(ctx) => ctx,
        Prepared::Infeasible(why) => return Ok(Outcome::Unschedulable(why)),
    };
    if ctx.streams.iter().any(|s| s.parts > 1) {
        return Ok(Outcome::Unknown(Unknown::Unsupported));
    }
    let mut book = Book::new(ctx.n_links);
    let mut placements = Vec::with_capacity(ctx.streams.len());
    for s in deadline_order(&ctx) {
        let mut found = None;
        for r in release_candidates(&ctx, &book, s, 0) {
            if budget.exhausted() {
                return Ok(Outcome::Unknown(Unknown::BudgetExhausted));
            }
            if fits(&ctx, &book, s, 0, r) {
                found = Some(r);
                break;
            }
        }
        let Some(r) = found else {
            return Ok(Outcome::Unknown(Unknown::HeuristicInfeasible));
        };
        let pl = Placement::no_wait(&ctx, s, 0, r);
        place(&ctx, &mut book, &pl);
        placements.push(pl);
    }
    Ok(Outcome::Schedulable(build_schedule(&ctx, &placements)))
}
