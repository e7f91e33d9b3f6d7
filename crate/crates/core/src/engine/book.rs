//! Periodic occupancy of every link, with the queue-isolation predicates.

use alloc::vec;
use alloc::vec::Vec;

use super::collide::collides;
use crate::model::{Isolation, StreamId};
use crate::time::gcd;

/// One fragment of one stream on one link, repeating with `period`.
/// Times are on the stream's instance-0 timeline.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Placed {
    pub stream: usize,
    pub id: StreamId,
    pub frag: u32,
    pub start: u64,
    pub dur: u64,
    pub period: u64,
    pub queue: u8,
    /// Eligibility at this egress port.
    pub arrival: u64,
    pub bridge_egress: bool,
}

impl Placed {
    pub fn end(&self) -> u64 {
        self.start + self.dur
    }

    fn wait(&self) -> u64 {
        self.start - self.arrival
    }

    fn occupancy(&self) -> u64 {
        self.end() - self.arrival
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Book {
    pub links: Vec<Vec<Placed>>,
}

impl Book {
    pub fn new(n_links: usize) -> Self {
        Book {
            links: vec![Vec::new(); n_links],
        }
    }

    /// No window on `link` intersects `[start, start + dur)` repeating with
    /// `period`.
    pub fn free(&self, link: usize, start: u64, dur: u64, period: u64) -> bool {
        self.links[link]
            .iter()
            .all(|w| !collides(w.start % w.period, w.dur, w.period, start % period, dur, period))
    }

    pub fn push(&mut self, link: usize, p: Placed) {
        self.links[link].push(p);
    }

    pub fn pop(&mut self, link: usize) {
        self.links[link].pop();
    }

    pub fn remove_stream(&mut self, stream: usize) {
        for l in &mut self.links {
            l.retain(|w| w.stream != stream);
        }
    }

    /// Queues a new stream may pick on `link`: those already in use, then
    /// the lowest unused one (unused queues are interchangeable).
    pub fn queue_choices(&self, link: usize, num_queues: u8) -> Vec<u8> {
        let mut used: Vec<u8> = self.links[link].iter().map(|w| w.queue).collect();
        used.sort_unstable();
        used.dedup();
        if let Some(free) = (0..num_queues).find(|q| !used.contains(q)) {
            used.push(free);
            used.sort_unstable();
        }
        used
    }

    /// Whether `cand` respects `iso` against every same-queue frame on
    /// `link`. Only bridge egress ports are constrained.
    pub fn isolation_ok(&self, link: usize, cand: &Placed, iso: Isolation) -> bool {
        if !cand.bridge_egress || iso == Isolation::Unrestricted {
            return true;
        }
        let same_queue = self.links[link].iter().filter(|w| w.queue == cand.queue);
        match iso {
            Isolation::Unrestricted => true,
            Isolation::Fifo => same_queue.into_iter().all(|w| fifo_ok(cand, w)),
            Isolation::Frame => same_queue.into_iter().all(|w| {
                !collides(
                    cand.arrival % cand.period,
                    cand.occupancy(),
                    cand.period,
                    w.arrival % w.period,
                    w.occupancy(),
                    w.period,
                )
            }),
            Isolation::Stream => {
                let (lo, hi) = self.block(link, cand);
                if hi - lo > cand.period {
                    return false;
                }
                let mut others: Vec<usize> = same_queue
                    .filter(|w| w.stream != cand.stream)
                    .map(|w| w.stream)
                    .collect();
                others.sort_unstable();
                others.dedup();
                others.into_iter().all(|s| {
                    let w = self.links[link].iter().find(|w| w.stream == s).expect("stream present");
                    let (wlo, whi) = self.block(link, w);
                    !collides(
                        lo % cand.period,
                        hi - lo,
                        cand.period,
                        wlo % w.period,
                        whi - wlo,
                        w.period,
                    )
                })
            }
        }
    }

    /// Residency block of one instance of `p`'s stream on `link`, including
    /// `p` itself.
    fn block(&self, link: usize, p: &Placed) -> (u64, u64) {
        self.links[link]
            .iter()
            .filter(|w| w.stream == p.stream)
            .chain(core::iter::once(p))
            .fold((p.arrival, p.end()), |(lo, hi), w| (lo.min(w.arrival), hi.max(w.end())))
    }
}

/// Same-queue dispatch order equals arrival order for every pair of
/// co-resident instances of `a` and `b`. Equal arrivals are ordered by
/// (stream id, fragment).
pub(crate) fn fifo_ok(a: &Placed, b: &Placed) -> bool {
    let la = a.occupancy() as i128;
    let lb = b.occupancy() as i128;
    let g = gcd(a.period, b.period) as i128;
    let d0 = (b.arrival as i128 - a.arrival as i128).rem_euclid(g);
    // smallest shift with b's occupancy ending after a's arrival
    let mut d = d0 - ((d0 + lb) / g) * g;
    if d <= -lb {
        d += g;
    }
    let (wa, wb) = (a.wait() as i128, b.wait() as i128);
    while d < la {
        let ok = match d.cmp(&0) {
            core::cmp::Ordering::Greater => wa < d + wb,
            core::cmp::Ordering::Less => d + wb < wa,
            core::cmp::Ordering::Equal => {
                if (a.id, a.frag) == (b.id, b.frag) {
                    true
                } else {
                    ((a.id, a.frag) < (b.id, b.frag)) == (wa < wb)
                }
            }
        };
        if !ok {
            return false;
        }
        d += g;
    }
    true
}
