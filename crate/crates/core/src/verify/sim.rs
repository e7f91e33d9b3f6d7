//! Discrete-event simulation of the derived gate control lists.
//!
//! Frames enter their talker queue at the planned talker window; bridges
//! forward whatever sits at the head of a queue whose gate is open and has
//! room for the whole frame. Three cycles are simulated and the middle one
//! is measured. Frames of the first cycle replay the plan (they never leave
//! before their planned time) so that the measured cycle starts from the
//! steady state, including frames that straddle the cycle boundary.

use alloc::collections::{BTreeMap, BTreeSet, BinaryHeap, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use serde::{Deserialize, Serialize};

use super::{reconstruct, StreamTimes, StructureError, Violation, ViolationKind};
use crate::engine::Instance;
use crate::model::{DeviceId, StreamId};
use crate::schedule::{derive_gcl, Schedule};
use crate::time::TimeNs;

const CYCLES: u64 = 3;
const MEASURED: u64 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameDelay {
    pub stream: StreamId,
    pub listener: DeviceId,
    pub instance: u32,
    /// From the first bit leaving the talker to full receipt.
    pub delay: TimeNs,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StreamStats {
    pub stream: StreamId,
    pub min_delay: TimeNs,
    pub max_delay: TimeNs,
    pub mean_delay: f64,
    /// Largest spread of delays seen by a single listener.
    pub jitter: TimeNs,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub cycle: TimeNs,
    pub delays: Vec<FrameDelay>,
    pub streams: Vec<StreamStats>,
    pub violations: Vec<Violation>,
}

impl SimReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Open intervals of one queue within the cycle, sorted and merged.
struct Gate {
    runs: Vec<(u64, u64)>,
    cycle: u64,
}

impl Gate {
    fn wraps(&self) -> bool {
        matches!((self.runs.first(), self.runs.last()), (Some(f), Some(l)) if f.0 == 0 && l.1 == self.cycle)
    }

    /// End of the open run containing `t`, if the gate is open at `t`.
    fn open_until(&self, t: u64) -> Option<u64> {
        let tc = t % self.cycle;
        let base = t - tc;
        let i = self.runs.partition_point(|r| r.1 <= tc);
        let r = *self.runs.get(i).filter(|r| r.0 <= tc)?;
        if r.1 == self.cycle && self.wraps() {
            if self.runs.len() == 1 {
                return Some(u64::MAX);
            }
            return Some(base + self.cycle + self.runs[0].1);
        }
        Some(base + r.1)
    }

    /// Next opening strictly after `t`.
    fn next_open(&self, t: u64) -> Option<u64> {
        let tc = t % self.cycle;
        let base = t - tc;
        match self.runs.iter().find(|r| r.0 > tc) {
            Some(r) => Some(base + r.0),
            None => self.runs.first().map(|r| base + self.cycle + r.0),
        }
    }
}

struct Frame {
    stream: usize,
    /// Instance within the cycle.
    k: usize,
    cycle: u64,
    frag: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Ev {
    // variant order breaks ties at equal times
    TxEnd { link: usize },
    Enqueue { frame: usize, hop: usize },
    TryTx { link: usize },
}

struct Port {
    queues: Vec<VecDeque<(usize, usize)>>,
    busy: Option<(usize, usize)>,
}

/// Runs the simulation. Structural problems are reported as errors; timing
/// deviations from the plan, deadline misses and jitter-bound breaches as
/// violations.
pub fn simulate(schedule: &Schedule, inst: &Instance) -> Result<SimReport, StructureError> {
    let tl = reconstruct(schedule, inst)?;
    if tl.streams.is_empty() {
        return Ok(SimReport {
            cycle: schedule.cycle,
            ..SimReport::default()
        });
    }
    let h = tl.cycle;
    let links = &inst.network.links;
    let mut gates: Vec<Vec<Gate>> = Vec::with_capacity(links.len());
    for l in links {
        let gcl = derive_gcl(schedule, l)?;
        let mut per_q: Vec<Vec<(u64, u64)>> = vec![Vec::new(); 8];
        let mut at = 0;
        for e in &gcl.entries {
            for (q, runs) in per_q.iter_mut().enumerate() {
                if e.gate_mask & (1 << q) != 0 {
                    match runs.last_mut() {
                        Some(last) if last.1 == at => last.1 = at + e.duration.0,
                        _ => runs.push((at, at + e.duration.0)),
                    }
                }
            }
            at += e.duration.0;
        }
        gates.push(per_q.into_iter().map(|runs| Gate { runs, cycle: h }).collect());
    }

    let mut frames: Vec<Frame> = Vec::new();
    let mut heap: BinaryHeap<Reverse<(u64, Ev, u64)>> = BinaryHeap::new();
    let mut seq = 0u64;
    let mut push = |heap: &mut BinaryHeap<Reverse<(u64, Ev, u64)>>, t: u64, ev: Ev| {
        seq += 1;
        heap.push(Reverse((t, ev, seq)));
    };
    for (si, st) in tl.streams.iter().enumerate() {
        for c in 0..CYCLES {
            for (k, per_hop) in st.times.iter().enumerate() {
                for (j, pl) in per_hop[0].iter().enumerate() {
                    frames.push(Frame {
                        stream: si,
                        k,
                        cycle: c,
                        frag: j,
                    });
                    push(
                        &mut heap,
                        pl.start + c * h,
                        Ev::Enqueue {
                            frame: frames.len() - 1,
                            hop: 0,
                        },
                    );
                }
            }
        }
    }
    let hop_of = |f: &Frame, hop: usize| &tl.streams[f.stream].hops[hop];
    let planned = |f: &Frame, hop: usize| tl.streams[f.stream].times[f.k][hop][f.frag];

    let mut ports: Vec<Port> = links
        .iter()
        .map(|l| Port {
            queues: vec![VecDeque::new(); l.num_queues.max(1) as usize],
            busy: None,
        })
        .collect();
    let mut sent: Vec<BTreeMap<usize, u64>> = (0..frames.len()).map(|_| BTreeMap::new()).collect();
    let mut received: Vec<BTreeMap<usize, u64>> = (0..frames.len()).map(|_| BTreeMap::new()).collect();
    let mut tries: BTreeSet<(u64, usize)> = BTreeSet::new();
    let max_deadline = tl.streams.iter().map(|s| s.deadline + s.period).max().unwrap_or(0);
    let horizon = (CYCLES + 1) * h + max_deadline;

    while let Some(Reverse((t, ev, _))) = heap.pop() {
        if t > horizon {
            break;
        }
        match ev {
            Ev::Enqueue { frame, hop } => {
                let f = &frames[frame];
                let link = hop_of(f, hop).link;
                let q = planned(f, hop).queue as usize;
                let port = &mut ports[link];
                let q = q.min(port.queues.len() - 1);
                port.queues[q].push_back((frame, hop));
                if tries.insert((t, link)) {
                    push(&mut heap, t, Ev::TryTx { link });
                }
            }
            Ev::TxEnd { link } => {
                let (frame, hop) = ports[link].busy.take().expect("busy port");
                let f = &frames[frame];
                let info = hop_of(f, hop);
                if info.listener.is_some() {
                    received[frame].insert(hop, t + info.lag);
                }
                for &c in &info.children {
                    push(&mut heap, t + info.lag, Ev::Enqueue { frame, hop: c });
                }
                if tries.insert((t, link)) {
                    push(&mut heap, t, Ev::TryTx { link });
                }
            }
            Ev::TryTx { link } => {
                tries.remove(&(t, link));
                if ports[link].busy.is_some() {
                    continue;
                }
                let mut wake: Option<u64> = None;
                let mut chosen = None;
                let fits = |q: usize, tx: u64| gates[link][q.min(7)].open_until(t).is_some_and(|end| t + tx <= end);
                // replayed frames leave at their planned time from any queue position
                let mut due_now: Option<(u64, usize, usize)> = None;
                for (q, queue) in ports[link].queues.iter().enumerate() {
                    for (pos, &(frame, hop)) in queue.iter().enumerate() {
                        let f = &frames[frame];
                        if f.cycle != 0 {
                            continue;
                        }
                        let due = planned(f, hop).start;
                        if due > t {
                            wake = Some(wake.map_or(due, |w| w.min(due)));
                        } else if due_now.is_none_or(|(d, _, _)| due < d) {
                            due_now = Some((due, q, pos));
                        }
                    }
                }
                if let Some((_, q, pos)) = due_now {
                    let (frame, hop) = ports[link].queues[q][pos];
                    let tx = hop_of(&frames[frame], hop).tx;
                    if fits(q, tx) {
                        chosen = Some((q, pos, frame, hop, tx));
                    }
                }
                if chosen.is_none() {
                    for q in (0..ports[link].queues.len()).rev() {
                        let Some(&(frame, hop)) = ports[link].queues[q].front() else {
                            continue;
                        };
                        let f = &frames[frame];
                        if f.cycle == 0 && planned(f, hop).start > t {
                            continue;
                        }
                        let tx = hop_of(f, hop).tx;
                        if fits(q, tx) {
                            chosen = Some((q, 0, frame, hop, tx));
                            break;
                        }
                        if let Some(n) = gates[link][q.min(7)].next_open(t) {
                            wake = Some(wake.map_or(n, |w| w.min(n)));
                        }
                    }
                }
                match chosen {
                    Some((q, pos, frame, hop, tx)) => {
                        ports[link].queues[q].remove(pos);
                        ports[link].busy = Some((frame, hop));
                        sent[frame].insert(hop, t);
                        push(&mut heap, t + tx, Ev::TxEnd { link });
                    }
                    None => {
                        if let Some(w) = wake {
                            if tries.insert((w, link)) {
                                push(&mut heap, w, Ev::TryTx { link });
                            }
                        }
                    }
                }
            }
        }
    }

    let mut violations = Vec::new();
    let mut delays = Vec::new();
    let mut per_stream: Vec<BTreeMap<usize, Vec<u64>>> = vec![BTreeMap::new(); tl.streams.len()];
    // frames of the measured cycle, grouped by (stream, instance)
    let mut groups: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (fi, f) in frames.iter().enumerate() {
        if f.cycle == MEASURED {
            groups.entry((f.stream, f.k)).or_default().push(fi);
        }
    }
    for ((si, k), fs) in groups {
        let st = &tl.streams[si];
        let global_k = k as u64 + MEASURED * (h / st.period);
        for &fi in &fs {
            let f = &frames[fi];
            for hop in 0..st.hops.len() {
                let plan = planned(f, hop).start + MEASURED * h;
                if let Some(&actual) = sent[fi].get(&hop) {
                    if actual != plan {
                        violations.push(
                            Violation::new(
                                ViolationKind::Divergence,
                                format!("planned at {}, dispatched at {}", plan % h, actual % h),
                            )
                            .at(Some(st.hops[hop].id), st.id, k as u32, f.frag as u32),
                        );
                    }
                }
            }
        }
        let first_bit = fs
            .iter()
            .find(|&&fi| frames[fi].frag == 0)
            .and_then(|&fi| sent[fi].get(&0))
            .copied();
        for (hi, hop) in st.hops.iter().enumerate() {
            let Some(listener) = hop.listener else { continue };
            let receipt: Option<u64> = fs
                .iter()
                .map(|&fi| received[fi].get(&hi).copied())
                .try_fold(0u64, |acc, r| r.map(|r| acc.max(r)));
            let (Some(receipt), Some(first_bit)) = (receipt, first_bit) else {
                violations.push(
                    Violation::new(ViolationKind::DeadlineMiss, String::from("not delivered")).at(
                        Some(hop.id),
                        st.id,
                        k as u32,
                        st.parts - 1,
                    ),
                );
                continue;
            };
            let release = st.release + global_k * st.period;
            let response = receipt - release;
            if response > st.deadline {
                violations.push(
                    Violation::new(
                        ViolationKind::DeadlineMiss,
                        format!("delay {} ns exceeds deadline {} ns", response, st.deadline),
                    )
                    .at(Some(hop.id), st.id, k as u32, st.parts - 1),
                );
            }
            let delay = receipt - first_bit;
            per_stream[si].entry(hi).or_default().push(delay);
            delays.push(FrameDelay {
                stream: st.id,
                listener,
                instance: k as u32,
                delay: TimeNs(delay),
            });
        }
    }
    let mut streams = Vec::new();
    for (st, by_listener) in tl.streams.iter().zip(&per_stream) {
        let all: Vec<u64> = by_listener.values().flatten().copied().collect();
        if all.is_empty() {
            continue;
        }
        let jitter = by_listener
            .values()
            .map(|v| v.iter().max().unwrap() - v.iter().min().unwrap())
            .max()
            .unwrap_or(0);
        if st.jitter_bound.is_some_and(|b| jitter > b) {
            violations.push(Violation {
                stream: Some(st.id),
                ..Violation::new(
                    ViolationKind::JitterBound,
                    format!("jitter {} ns exceeds bound {} ns", jitter, st.jitter_bound.unwrap_or(0)),
                )
            });
        }
        streams.push(stats(st, &all, jitter));
    }
    Ok(SimReport {
        cycle: TimeNs(h),
        delays,
        streams,
        violations,
    })
}

fn stats(st: &StreamTimes, all: &[u64], jitter: u64) -> StreamStats {
    StreamStats {
        stream: st.id,
        min_delay: TimeNs(*all.iter().min().expect("non-empty")),
        max_delay: TimeNs(*all.iter().max().expect("non-empty")),
        mean_delay: all.iter().sum::<u64>() as f64 / all.len() as f64,
        jitter: TimeNs(jitter),
    }
}

#[cfg(test)]
pub(super) fn gate_probe(runs: &[(u64, u64)], cycle: u64, t: u64) -> (Option<u64>, Option<u64>) {
    let g = Gate {
        runs: runs.to_vec(),
        cycle,
    };
    (g.open_until(t), g.next_open(t))
}
