//! Exact no-wait search: chronological backtracking over release offsets
//! (and route options under joint routing).

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use super::book::{Book, Placed};
use super::collide::collides;
use super::prep::{Ctx, Placement};
use super::Budget;
use crate::time::{gcd, modulo};

pub(crate) enum Search {
    Found(Vec<Placement>),
    Exhausted,
    OutOfBudget,
}

/// Candidate release offsets of `stream` on `option` given the windows in
/// `book`: zero, offsets putting a window at a period boundary, and offsets
/// making a window abut a placed window on either side.
pub(crate) fn release_candidates(ctx: &Ctx, book: &Book, stream: usize, option: usize) -> Vec<u64> {
    let sp = &ctx.streams[stream];
    if let Some(r) = sp.release {
        return alloc::vec![r];
    }
    let p = sp.period;
    let opt = &sp.options[option];
    let mut set = BTreeSet::from([0u64]);
    for (h, hop) in opt.hops.iter().enumerate() {
        for j in 0..sp.parts {
            let base = opt.nw_start(h, j) as i128;
            set.insert(modulo(-base, p));
            set.insert(modulo(p as i128 - hop.tx as i128 - base, p));
            for w in &book.links[hop.link] {
                let g = gcd(p, w.period);
                for target in [w.end() as i128, w.start as i128 - hop.tx as i128] {
                    let c = modulo(target - base, g);
                    set.extend((0..p / g).map(|k| c + k * g));
                }
            }
        }
    }
    set.into_iter().collect()
}

/// Whether the no-wait placement at `release` fits the book.
pub(crate) fn fits(ctx: &Ctx, book: &Book, stream: usize, option: usize, release: u64) -> bool {
    let sp = &ctx.streams[stream];
    let opt = &sp.options[option];
    let p = sp.period;
    for (h, hop) in opt.hops.iter().enumerate() {
        for j in 0..sp.parts {
            let phase = (release + opt.nw_start(h, j)) % p;
            if phase + hop.tx > p || !book.free(hop.link, phase, hop.tx, p) {
                return false;
            }
            for jj in 0..j {
                let other = (release + opt.nw_start(h, jj)) % p;
                if collides(other, hop.tx, p, phase, hop.tx, p) {
                    return false;
                }
            }
        }
    }
    true
}

pub(crate) fn place(ctx: &Ctx, book: &mut Book, pl: &Placement) {
    let sp = &ctx.streams[pl.stream];
    let opt = &sp.options[pl.option];
    for (hop, frags) in opt.hops.iter().zip(&pl.times) {
        for (j, &(t, q)) in frags.iter().enumerate() {
            book.push(
                hop.link,
                Placed {
                    stream: pl.stream,
                    id: sp.id,
                    frag: j as u32,
                    start: t,
                    dur: hop.tx,
                    period: sp.period,
                    queue: q,
                    // frames never queue: eligibility is the window start
                    arrival: t,
                    bridge_egress: hop.bridge_egress,
                },
            );
        }
    }
}

pub(crate) fn unplace(ctx: &Ctx, book: &mut Book, pl: &Placement) {
    let opt = &ctx.streams[pl.stream].options[pl.option];
    for (hop, frags) in opt.hops.iter().zip(&pl.times).rev() {
        for _ in frags {
            book.pop(hop.link);
        }
    }
}

/// Streams by (deadline, id).
pub(crate) fn deadline_order(ctx: &Ctx) -> Vec<usize> {
    let mut order: Vec<usize> = (0..ctx.streams.len()).collect();
    order.sort_by_key(|&i| (ctx.streams[i].deadline, ctx.streams[i].id));
    order
}

/// Complete search over the streams in `order` on top of the obstacles
/// already in `book`. Streams are tried in `order` first; on failure every
/// other choice of the next stream is explored too, since an offset may only
/// be reachable from a window placed later in `order`. The book is restored
/// on return.
pub(crate) fn search(ctx: &Ctx, order: &[usize], book: &mut Book, budget: &dyn Budget) -> Search {
    let mut chosen = Vec::with_capacity(order.len());
    let mut remaining = order.to_vec();
    let result = dfs(ctx, &mut remaining, book, budget, &mut chosen);
    for pl in chosen.iter().rev() {
        unplace(ctx, book, pl);
    }
    match result {
        Some(true) => Search::Found(chosen),
        Some(false) => Search::Exhausted,
        None => Search::OutOfBudget,
    }
}

/// Whether `stream` still fits somewhere. Any fitting offset slides left
/// onto a candidate, so checking the candidates suffices.
fn placeable(ctx: &Ctx, book: &Book, stream: usize) -> bool {
    (0..ctx.streams[stream].options.len()).any(|o| {
        release_candidates(ctx, book, stream, o)
            .into_iter()
            .any(|r| fits(ctx, book, stream, o, r))
    })
}

fn dfs(
    ctx: &Ctx,
    remaining: &mut Vec<usize>,
    book: &mut Book,
    budget: &dyn Budget,
    chosen: &mut Vec<Placement>,
) -> Option<bool> {
    if remaining.is_empty() {
        return Some(true);
    }
    // windows only ever get added, so a stream with no room now never fits
    if remaining.len() > 1 && !remaining.iter().all(|&s| placeable(ctx, book, s)) {
        return Some(false);
    }
    for i in 0..remaining.len() {
        let s = remaining.remove(i);
        let found = place_next(ctx, s, remaining, book, budget, chosen);
        remaining.insert(i, s);
        match found {
            Some(false) => {}
            other => return other,
        }
    }
    Some(false)
}

fn place_next(
    ctx: &Ctx,
    s: usize,
    remaining: &mut Vec<usize>,
    book: &mut Book,
    budget: &dyn Budget,
    chosen: &mut Vec<Placement>,
) -> Option<bool> {
    for option in 0..ctx.streams[s].options.len() {
        for r in release_candidates(ctx, book, s, option) {
            if budget.exhausted() {
                return None;
            }
            if !fits(ctx, book, s, option, r) {
                continue;
            }
            let pl = Placement::no_wait(ctx, s, option, r);
            place(ctx, book, &pl);
            chosen.push(pl);
            match dfs(ctx, remaining, book, budget, chosen) {
                Some(true) => return Some(true),
                Some(false) => {}
                None => return None,
            }
            let pl = chosen.pop().expect("pushed above");
            unplace(ctx, book, &pl);
        }
    }
    Some(false)
}
