//! Exact wait-allowed search: backtracking over release offsets, then over
//! the dispatch time and queue of every frame on every hop.

use alloc::vec::Vec;

use super::book::Book;
use super::exact_nw::{deadline_order, release_candidates};
use super::prep::{build_schedule, prepare, unfragmented, Ctx, Placement, Prepared};
use super::wa::{dispatch_candidates, eligibility, empty_times, items, queue_choices, try_dispatch};
use super::{Budget, EngineError, Infeasible, Instance, Outcome, Unknown};
use crate::model::ModelConfig;

struct Search<'c> {
    ctx: &'c Ctx,
    cfg: ModelConfig,
    /// Unplaced streams, deadline order.
    remaining: Vec<usize>,
    budget: &'c dyn Budget,
    book: Book,
    chosen: Vec<Placement>,
}

impl Search<'_> {
    /// Places one more stream, trying every choice of which one goes next.
    fn stream(&mut self) -> Option<bool> {
        if self.remaining.is_empty() {
            return Some(true);
        }
        for i in 0..self.remaining.len() {
            let s = self.remaining.remove(i);
            let found = self.releases(s);
            self.remaining.insert(i, s);
            match found {
                Some(false) => {}
                other => return other,
            }
        }
        Some(false)
    }

    fn releases(&mut self, s: usize) -> Option<bool> {
        let sp = &self.ctx.streams[s];
        for option in 0..sp.options.len() {
            for r in release_candidates(self.ctx, &self.book, s, option) {
                if self.budget.exhausted() {
                    return None;
                }
                let opt = &sp.options[option];
                let mut times = empty_times(opt, sp.parts);
                let todo = items(opt, sp.parts);
                if self.item(s, option, r, &todo, &mut times)? {
                    return Some(true);
                }
            }
        }
        Some(false)
    }

    fn item(
        &mut self,
        s: usize,
        option: usize,
        release: u64,
        todo: &[(usize, u32)],
        times: &mut Vec<Vec<(u64, u8)>>,
    ) -> Option<bool> {
        let ctx = self.ctx;
        let sp = &ctx.streams[s];
        let opt = &sp.options[option];
        let Some((&(hop, j), rest)) = todo.split_first() else {
            self.chosen.push(Placement {
                stream: s,
                option,
                release,
                times: times.clone(),
            });
            if self.stream()? {
                return Some(true);
            }
            self.chosen.pop();
            return Some(false);
        };
        let (a, e) = eligibility(opt, times, release, hop, j);
        let link = opt.hops[hop].link;
        let cands = dispatch_candidates(&self.book, sp, opt, release, hop, j, (a, e), self.cfg.release_mode);
        for t in cands {
            for q in queue_choices(&self.book, opt, times, hop, j) {
                if self.budget.exhausted() {
                    return None;
                }
                let iso = self.cfg.effective_isolation();
                let Some(placed) = try_dispatch(&self.book, s, sp, opt, hop, j, a, t, q, iso) else {
                    continue;
                };
                self.book.push(link, placed);
                times[hop][j as usize] = (t, q);
                let found = self.item(s, option, release, rest, times);
                self.book.pop(link);
                match found {
                    Some(true) => return Some(true),
                    Some(false) => {}
                    None => return None,
                }
            }
        }
        Some(false)
    }
}

pub(crate) fn schedule(inst: &Instance, budget: &dyn Budget) -> Result<Outcome, EngineError> {
    let ctx = match prepare(inst, &unfragmented(inst))? {
        Prepared::Ready(ctx) => ctx,
        Prepared::Infeasible(why) => return Ok(Outcome::Unschedulable(why)),
    };
    let mut search = Search {
        remaining: deadline_order(&ctx),
        ctx: &ctx,
        cfg: inst.cfg,
        budget,
        book: Book::new(ctx.n_links),
        chosen: Vec::new(),
    };
    Ok(match search.stream() {
        Some(true) => Outcome::Schedulable(build_schedule(&ctx, &search.chosen)),
        Some(false) => Outcome::Unschedulable(Infeasible::SearchExhausted),
        None => Outcome::Unknown(Unknown::BudgetExhausted),
    })
}
