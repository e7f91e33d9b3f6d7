//! Per-frame placement primitives of the wait-allowed engines.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use super::book::{Book, Placed};
use super::prep::{PathOpt, Prep};
use crate::model::{Isolation, ReleaseMode};
use crate::time::gcd;

/// Hop-major (breadth-first), then fragment order.
pub(crate) fn items(opt: &PathOpt, parts: u32) -> Vec<(usize, u32)> {
    (0..opt.hops.len())
        .flat_map(|h| (0..parts).map(move |j| (h, j)))
        .collect()
}

pub(crate) fn empty_times(opt: &PathOpt, parts: u32) -> Vec<Vec<(u64, u8)>> {
    vec![vec![(0, 0); parts as usize]; opt.hops.len()]
}

/// Arrival of fragment `j` in the queue of `hop` (from the parent hop, or
/// the release at the talker) and the earliest time it may leave, which is
/// also after fragment `j - 1` left on the same hop.
pub(crate) fn eligibility(opt: &PathOpt, times: &[Vec<(u64, u8)>], release: u64, hop: usize, j: u32) -> (u64, u64) {
    let h = &opt.hops[hop];
    let arrival = match h.parent {
        Some(p) => times[p][j as usize].0 + opt.hops[p].tx + opt.hops[p].lag,
        None => release,
    };
    let mut e = arrival;
    if j > 0 {
        e = e.max(times[hop][j as usize - 1].0 + h.tx);
    }
    (arrival, e)
}

/// Candidate dispatch times in ascending order: the eligibility itself,
/// the next period boundary, the ends of placed windows on the link, and
/// times that let the frame continue without waiting into a gap on a child
/// link. Waits are below one period and the deadline bound prunes late
/// starts.
#[allow(clippy::too_many_arguments)]
pub(crate) fn dispatch_candidates(
    book: &Book,
    sp: &Prep,
    opt: &PathOpt,
    release: u64,
    hop: usize,
    j: u32,
    (arrival, eligible): (u64, u64),
    release_mode: ReleaseMode,
) -> Vec<u64> {
    let h = &opt.hops[hop];
    let p = sp.period;
    if h.parent.is_none() && j == 0 && release_mode == ReleaseMode::Fully {
        return vec![eligible];
    }
    let lo = eligible;
    let by_wait = (arrival + p).saturating_sub(h.tx);
    let by_deadline = (release + sp.deadline).saturating_sub(h.tail + (sp.parts - 1 - j) as u64 * h.tx);
    let hi = by_wait.min(by_deadline);
    if hi < lo {
        return Vec::new();
    }
    let mut set = BTreeSet::from([lo]);
    let boundary = lo.div_ceil(p) * p;
    if boundary <= hi {
        set.insert(boundary);
    }
    let mut align = |target: i128, g: u64| {
        let g = g as i128;
        let first = lo as i128 + (target - lo as i128).rem_euclid(g);
        let mut t = first;
        while t <= hi as i128 {
            set.insert(t as u64);
            t += g;
        }
    };
    for w in &book.links[h.link] {
        align(w.end() as i128, gcd(p, w.period));
    }
    for &c in &h.children {
        let child = &opt.hops[c];
        for w in &book.links[child.link] {
            align(w.end() as i128 - (h.tx + h.lag) as i128, gcd(p, w.period));
        }
    }
    set.into_iter().collect()
}

/// Queues to try for fragment `j` on `hop`.
pub(crate) fn queue_choices(book: &Book, opt: &PathOpt, times: &[Vec<(u64, u8)>], hop: usize, j: u32) -> Vec<u8> {
    let h = &opt.hops[hop];
    if !h.bridge_egress {
        vec![0]
    } else if j > 0 {
        vec![times[hop][0].1]
    } else {
        book.queue_choices(h.link, h.num_queues)
    }
}

/// The placed record if dispatching at `t` on `queue` is feasible.
#[allow(clippy::too_many_arguments)]
pub(crate) fn try_dispatch(
    book: &Book,
    stream: usize,
    sp: &Prep,
    opt: &PathOpt,
    hop: usize,
    j: u32,
    arrival: u64,
    t: u64,
    queue: u8,
    iso: Isolation,
) -> Option<Placed> {
    let h = &opt.hops[hop];
    let p = sp.period;
    if (t % p) + h.tx > p || !book.free(h.link, t, h.tx, p) {
        return None;
    }
    let placed = Placed {
        stream,
        id: sp.id,
        frag: j,
        start: t,
        dur: h.tx,
        period: p,
        queue,
        arrival,
        bridge_egress: h.bridge_egress,
    };
    book.isolation_ok(h.link, &placed, iso).then_some(placed)
}
