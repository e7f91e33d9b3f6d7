//! Conflict-graph scheduler. Nodes are (stream, route option, release
//! offset) triples on a per-stream offset grid; two nodes conflict when
//! their windows collide. An independent set is grown greedily, always
//! extending the stream with the fewest surviving nodes.

use alloc::vec::Vec;

use super::book::Book;
use super::collide::collides;
use super::exact_nw::{fits, place};
use super::prep::{build_schedule, prepare, unfragmented, Ctx, Placement, Prepared};
use super::{Budget, EngineError, Instance, Outcome, Unknown};

/// Grid of candidate releases: step is the stream's longest transmission,
/// coarsened so that no stream has more than 512 offsets per route.
pub(crate) fn offset_grid(ctx: &Ctx, stream: usize) -> Vec<u64> {
    let sp = &ctx.streams[stream];
    if let Some(r) = sp.release {
        return alloc::vec![r];
    }
    let max_tx = sp
        .options
        .iter()
        .flat_map(|o| o.hops.iter().map(|h| h.tx))
        .max()
        .unwrap_or(1);
    let step = max_tx.max(sp.period.div_ceil(512)).max(1);
    (0..sp.period).step_by(step as usize).collect()
}

/// Whether node `(stream, option, release)` collides with placement `pl`.
fn conflicts(ctx: &Ctx, stream: usize, option: usize, release: u64, pl: &Placement) -> bool {
    let a = &ctx.streams[stream];
    let b = &ctx.streams[pl.stream];
    let oa = &a.options[option];
    let ob = &b.options[pl.option];
    for (ha, hop_a) in oa.hops.iter().enumerate() {
        for (hop_b, frags_b) in ob.hops.iter().zip(&pl.times) {
            if hop_a.link != hop_b.link {
                continue;
            }
            for j in 0..a.parts {
                let sa = (release + oa.nw_start(ha, j)) % a.period;
                for &(tb, _) in frags_b {
                    if collides(sa, hop_a.tx, a.period, tb % b.period, hop_b.tx, b.period) {
                        return true;
                    }
                }
            }
        }
    }
    false
}

pub(crate) fn schedule(inst: &Instance, budget: &dyn Budget) -> Result<Outcome, EngineError> {
    let ctx = match prepare(inst, &unfragmented(inst))? {
        Prepared::Ready(ctx) => ctx,
        Prepared::Infeasible(why) => return Ok(Outcome::Unschedulable(why)),
    };
    let empty = Book::new(ctx.n_links);
    // surviving nodes per stream; self-infeasible nodes are dropped up front
    let mut nodes: Vec<Vec<(usize, u64)>> = Vec::with_capacity(ctx.streams.len());
    for s in 0..ctx.streams.len() {
        let grid = offset_grid(&ctx, s);
        let mut list = Vec::new();
        for option in 0..ctx.streams[s].options.len() {
            for &r in &grid {
                if budget.exhausted() {
                    return Ok(Outcome::Unknown(Unknown::BudgetExhausted));
                }
                if fits(&ctx, &empty, s, option, r) {
                    list.push((option, r));
                }
            }
        }
        nodes.push(list);
    }
    let mut book = Book::new(ctx.n_links);
    let mut open: Vec<usize> = (0..ctx.streams.len()).collect();
    let mut placements = Vec::with_capacity(open.len());
    while !open.is_empty() {
        let (pos, &s) = open
            .iter()
            .enumerate()
            .min_by_key(|(_, &s)| (nodes[s].len(), ctx.streams[s].id))
            .expect("non-empty");
        // conflicts only cover collisions; isolation is checked on the book
        let Some(&(option, r)) = nodes[s].iter().find(|&&(o, r)| fits(&ctx, &book, s, o, r)) else {
            return Ok(Outcome::Unknown(Unknown::HeuristicInfeasible));
        };
        open.swap_remove(pos);
        let pl = Placement::no_wait(&ctx, s, option, r);
        place(&ctx, &mut book, &pl);
        for &o in &open {
            if budget.exhausted() {
                return Ok(Outcome::Unknown(Unknown::BudgetExhausted));
            }
            nodes[o].retain(|&(opt, rel)| !conflicts(&ctx, o, opt, rel, &pl));
        }
        placements.push(pl);
    }
    Ok(Outcome::Schedulable(build_schedule(&ctx, &placements)))
}
