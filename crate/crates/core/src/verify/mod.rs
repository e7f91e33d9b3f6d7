//! Independent schedule checker and time-aware-shaper simulator.
//!
//! Nothing here consults engine internals: a schedule is judged only by its
//! windows, plans and the instance it claims to solve.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::Instance;
use crate::model::{
    frame_split, hyperperiod, transmission_duration, Fragmentation, Isolation, LinkId, ModelError, ReleaseMode,
    StreamId, Topology,
};
use crate::schedule::{derive_gcl, Schedule, ScheduleError, TxWindow};
use crate::time::TimeNs;

mod quality;
mod sim;

pub use quality::{measure_quality, QualityMetrics};
pub use sim::{simulate, FrameDelay, SimReport, StreamStats};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    Overlap,
    DeadlineMiss,
    Precedence,
    IsolationFifo,
    IsolationFrame,
    IsolationStream,
    QueueRange,
    GclLength,
    JitterBound,
    ReleaseBound,
    Divergence,
}

impl ViolationKind {
    pub fn name(self) -> &'static str {
        match self {
            ViolationKind::Overlap => "overlap",
            ViolationKind::DeadlineMiss => "deadline-miss",
            ViolationKind::Precedence => "precedence",
            ViolationKind::IsolationFifo => "isolation-fifo",
            ViolationKind::IsolationFrame => "isolation-frame",
            ViolationKind::IsolationStream => "isolation-stream",
            ViolationKind::QueueRange => "queue-range",
            ViolationKind::GclLength => "gcl-length",
            ViolationKind::JitterBound => "jitter-bound",
            ViolationKind::ReleaseBound => "release-bound",
            ViolationKind::Divergence => "divergence",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub link: Option<LinkId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stream: Option<StreamId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fragment: Option<u32>,
    pub detail: String,
}

impl Violation {
    fn new(kind: ViolationKind, detail: String) -> Self {
        Violation {
            kind,
            link: None,
            stream: None,
            instance: None,
            fragment: None,
            detail,
        }
    }

    fn at(mut self, link: Option<LinkId>, stream: StreamId, instance: u32, fragment: u32) -> Self {
        self.link = link;
        self.stream = Some(stream);
        self.instance = Some(instance);
        self.fragment = Some(fragment);
        self
    }
}

/// Schedules that do not even describe a solution of the instance.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Gcl(#[from] ScheduleError),
    #[error("schedule cycle {got} differs from the hyperperiod {expected}")]
    Cycle { expected: TimeNs, got: TimeNs },
    #[error("stream {0} has no plan or more than one")]
    Plan(StreamId),
    #[error("plan for unknown stream {0}")]
    UnknownStream(StreamId),
    #[error("stream {0}: {1}")]
    BadPlan(StreamId, &'static str),
    #[error("window of {stream} on {link} (instance {instance}, fragment {fragment}): {why}")]
    BadWindow {
        stream: StreamId,
        link: LinkId,
        instance: u32,
        fragment: u32,
        why: &'static str,
    },
}

#[derive(Clone, Debug)]
pub(crate) struct HopInfo {
    pub link: usize,
    pub id: LinkId,
    pub tx: u64,
    pub lag: u64,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub listener: Option<crate::model::DeviceId>,
    pub bridge_egress: bool,
}

/// Planned absolute times of one instance of one frame on one hop.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Planned {
    pub eligible: u64,
    pub start: u64,
    pub queue: u8,
}

#[derive(Clone, Debug)]
pub(crate) struct StreamTimes {
    pub id: StreamId,
    pub period: u64,
    pub deadline: u64,
    pub jitter_bound: Option<u64>,
    pub release: u64,
    pub parts: u32,
    pub hops: Vec<HopInfo>,
    /// `[instance][hop][fragment]`
    pub times: Vec<Vec<Vec<Planned>>>,
}

impl StreamTimes {
    pub fn release_of(&self, k: u64) -> u64 {
        self.release + k * self.period
    }
}

pub(crate) struct Timeline<'a> {
    pub topo: Topology<'a>,
    pub cycle: u64,
    pub streams: Vec<StreamTimes>,
}

/// Recovers absolute planned times from window phases: each window is
/// taken at the first occurrence of its phase at or after the frame's
/// eligibility.
pub(crate) fn reconstruct<'a>(schedule: &Schedule, inst: &'a Instance) -> Result<Timeline<'a>, StructureError> {
    inst.validate()?;
    let topo = Topology::new(&inst.network);
    if inst.streams.is_empty() {
        return Ok(Timeline {
            topo,
            cycle: schedule.cycle.0,
            streams: vec![],
        });
    }
    let h = hyperperiod(&inst.streams)?;
    if schedule.cycle != h {
        return Err(StructureError::Cycle {
            expected: h,
            got: schedule.cycle,
        });
    }
    let h = h.0;
    for p in &schedule.plans {
        if !inst.streams.iter().any(|s| s.id == p.stream) {
            return Err(StructureError::UnknownStream(p.stream));
        }
    }
    let mut index: BTreeMap<(StreamId, LinkId, u32, u32), &TxWindow> = BTreeMap::new();
    for w in &schedule.windows {
        if w.duration.0 == 0 || w.end() > schedule.cycle {
            return Err(StructureError::BadWindow {
                stream: w.stream,
                link: w.link,
                instance: w.instance,
                fragment: w.fragment,
                why: "window is empty or leaves the cycle",
            });
        }
        if index.insert((w.stream, w.link, w.instance, w.fragment), w).is_some() {
            return Err(StructureError::BadWindow {
                stream: w.stream,
                link: w.link,
                instance: w.instance,
                fragment: w.fragment,
                why: "duplicate window",
            });
        }
    }
    let mut used = 0;
    let mut streams = Vec::with_capacity(inst.streams.len());
    for s in &inst.streams {
        let mut plans = schedule.plans.iter().filter(|p| p.stream == s.id);
        let (Some(plan), None) = (plans.next(), plans.next()) else {
            return Err(StructureError::Plan(s.id));
        };
        let tree = plan.route.tree(s, &topo)?;
        let requested = match inst.cfg.fragmentation {
            Fragmentation::Off => 1,
            Fragmentation::MaxFragments(f) => f.max(1),
        };
        let (min_parts, _) = frame_split(s.payload_bytes, inst.cfg.mtu_bytes, 1);
        let (max_parts, _) = frame_split(s.payload_bytes, inst.cfg.mtu_bytes, requested);
        if plan.fragments < min_parts || plan.fragments > max_parts {
            return Err(StructureError::BadPlan(s.id, "fragment count not permitted"));
        }
        if plan.fragment_bytes != frame_split(s.payload_bytes, inst.cfg.mtu_bytes, plan.fragments).1 {
            return Err(StructureError::BadPlan(s.id, "fragment size inconsistent"));
        }
        if plan.release >= s.period {
            return Err(StructureError::BadPlan(s.id, "release offset not below the period"));
        }
        let mut hops: Vec<HopInfo> = tree
            .hops
            .iter()
            .map(|th| {
                let l = topo.link(th.link).expect("validated route");
                HopInfo {
                    link: topo.link_index(th.link).expect("validated route"),
                    id: th.link,
                    tx: transmission_duration(plan.fragment_bytes, inst.cfg.header_bytes, l.line_rate_bps).0,
                    lag: topo.hop_lag(l).0,
                    parent: th.parent,
                    children: vec![],
                    listener: th.listener,
                    bridge_egress: topo.is_bridge(l.src),
                }
            })
            .collect();
        for i in 0..hops.len() {
            if let Some(p) = hops[i].parent {
                hops[p].children.push(i);
            }
        }
        let p = s.period.0;
        let n_inst = h / p;
        let mut times = Vec::with_capacity(n_inst as usize);
        for k in 0..n_inst {
            let release = plan.release.0 + k * p;
            let mut per_hop: Vec<Vec<Planned>> = Vec::with_capacity(hops.len());
            for hop in &hops {
                let mut frags = Vec::with_capacity(plan.fragments as usize);
                for j in 0..plan.fragments {
                    let key = (s.id, hop.id, k as u32, j);
                    let w = index.get(&key).ok_or(StructureError::BadWindow {
                        stream: s.id,
                        link: hop.id,
                        instance: k as u32,
                        fragment: j,
                        why: "missing window",
                    })?;
                    used += 1;
                    if w.duration.0 != hop.tx {
                        return Err(StructureError::BadWindow {
                            stream: s.id,
                            link: hop.id,
                            instance: k as u32,
                            fragment: j,
                            why: "duration differs from the transmission time",
                        });
                    }
                    let eligible = match hop.parent {
                        None => release,
                        Some(par) => {
                            let pp: &Planned = &per_hop[par][j as usize];
                            pp.start + hops[par].tx + hops[par].lag
                        }
                    };
                    let start = eligible + (w.start.0 as i128 - eligible as i128).rem_euclid(h as i128) as u64;
                    frags.push(Planned {
                        eligible,
                        start,
                        queue: w.queue,
                    });
                }
                per_hop.push(frags);
            }
            times.push(per_hop);
        }
        streams.push(StreamTimes {
            id: s.id,
            period: p,
            deadline: s.deadline.0,
            jitter_bound: s.jitter_bound.map(|j| j.0),
            release: plan.release.0,
            parts: plan.fragments,
            hops,
            times,
        });
    }
    if used != schedule.windows.len() {
        let stray = schedule
            .windows
            .iter()
            .find(|w| {
                !streams.iter().any(|st| {
                    st.id == w.stream
                        && st.hops.iter().any(|hp| hp.id == w.link)
                        && (w.instance as usize) < st.times.len()
                        && w.fragment < st.parts
                })
            })
            .expect("some window was not matched");
        return Err(StructureError::BadWindow {
            stream: stray.stream,
            link: stray.link,
            instance: stray.instance,
            fragment: stray.fragment,
            why: "window does not belong to the plan",
        });
    }
    Ok(Timeline {
        topo,
        cycle: h,
        streams,
    })
}

/// One queued frame on a bridge egress port, times on the absolute axis.
#[derive(Clone, Copy, Debug)]
struct Resident {
    arrival: u64,
    start: u64,
    end: u64,
    stream: StreamId,
    instance: u32,
    frag: u32,
    queue: u8,
}

/// Checks every constraint of the scheduling model. Structural problems
/// are errors; everything else is reported as violations.
pub fn check_static(schedule: &Schedule, inst: &Instance) -> Result<Vec<Violation>, StructureError> {
    let tl = reconstruct(schedule, inst)?;
    let mut out = Vec::new();
    let h = tl.cycle;

    // per-link non-overlap and queue ranges
    for (link_id, windows) in schedule.windows_by_link() {
        let link = tl.topo.link(link_id).ok_or(ModelError::UnknownLink(link_id))?;
        let mut reach: Option<&TxWindow> = None;
        for w in windows {
            if w.queue >= link.num_queues {
                out.push(
                    Violation::new(
                        ViolationKind::QueueRange,
                        format!("queue {} on a link with {} queues", w.queue, link.num_queues),
                    )
                    .at(Some(link_id), w.stream, w.instance, w.fragment),
                );
            }
            if let Some(prev) = reach {
                if w.start < prev.end() {
                    out.push(
                        Violation::new(
                            ViolationKind::Overlap,
                            format!(
                                "[{}, {}) overlaps [{}, {}) of {}",
                                w.start.0,
                                w.end().0,
                                prev.start.0,
                                prev.end().0,
                                prev.stream
                            ),
                        )
                        .at(Some(link_id), w.stream, w.instance, w.fragment),
                    );
                }
            }
            if reach.is_none_or(|r| w.end() > r.end()) {
                reach = Some(w);
            }
        }
    }

    let iso = inst.cfg.effective_isolation();
    let mut residents: BTreeMap<usize, Vec<Resident>> = BTreeMap::new();
    for (st, s) in tl.streams.iter().zip(&inst.streams) {
        let fixed = match inst.cfg.release_mode {
            ReleaseMode::Partially => Some(s.fixed_release.unwrap_or_default().0),
            ReleaseMode::Fully => None,
        };
        if let Some(r) = fixed {
            if st.release != r {
                out.push(Violation {
                    stream: Some(st.id),
                    ..Violation::new(
                        ViolationKind::ReleaseBound,
                        format!("release {} differs from the fixed release {}", st.release, r),
                    )
                });
            }
        }
        let mut delays: BTreeMap<usize, (u64, u64)> = BTreeMap::new();
        for (k, per_hop) in st.times.iter().enumerate() {
            let k32 = k as u32;
            for (hi, hop) in st.hops.iter().enumerate() {
                for (j, pl) in per_hop[hi].iter().enumerate() {
                    let wait = pl.start - pl.eligible;
                    if wait >= st.period {
                        let kind = if hop.parent.is_none() {
                            ViolationKind::ReleaseBound
                        } else {
                            ViolationKind::Precedence
                        };
                        out.push(
                            Violation::new(kind, format!("waits {} ns, not below the period", wait)).at(
                                Some(hop.id),
                                st.id,
                                k32,
                                j as u32,
                            ),
                        );
                    }
                    if j > 0 {
                        let prev = per_hop[hi][j - 1];
                        if pl.start < prev.start + hop.tx {
                            out.push(
                                Violation::new(
                                    ViolationKind::Precedence,
                                    String::from("fragment sent before its predecessor finished"),
                                )
                                .at(Some(hop.id), st.id, k32, j as u32),
                            );
                        }
                    }
                    if hop.bridge_egress {
                        residents.entry(hop.link).or_default().push(Resident {
                            arrival: pl.eligible,
                            start: pl.start,
                            end: pl.start + hop.tx,
                            stream: st.id,
                            instance: k32,
                            frag: j as u32,
                            queue: pl.queue,
                        });
                    }
                }
                if hop.listener.is_some() {
                    let last = per_hop[hi][st.parts as usize - 1];
                    let receipt = last.start + hop.tx + hop.lag;
                    let delay = receipt - st.release_of(k as u64);
                    if delay > st.deadline {
                        out.push(
                            Violation::new(
                                ViolationKind::DeadlineMiss,
                                format!("delay {} ns exceeds deadline {} ns", delay, st.deadline),
                            )
                            .at(Some(hop.id), st.id, k32, st.parts - 1),
                        );
                    }
                    let from_first_bit = receipt - per_hop[0][0].start;
                    let e = delays.entry(hi).or_insert((u64::MAX, 0));
                    *e = (e.0.min(from_first_bit), e.1.max(from_first_bit));
                }
            }
        }
        if let Some(bound) = st.jitter_bound {
            let jitter = delays.values().map(|(lo, hi)| hi - lo).max().unwrap_or(0);
            if jitter > bound {
                out.push(Violation {
                    stream: Some(st.id),
                    ..Violation::new(
                        ViolationKind::JitterBound,
                        format!("jitter {} ns exceeds bound {} ns", jitter, bound),
                    )
                });
            }
        }
    }

    if iso != Isolation::Unrestricted {
        for (link, list) in residents {
            isolation(&mut out, inst.network.links[link].id, list, h, iso);
        }
    }

    if inst.cfg.enforce_gcl_len {
        for link in &inst.network.links {
            match derive_gcl(schedule, link) {
                Ok(g) if g.entries.len() > link.max_gcl_len as usize => out.push(Violation {
                    link: Some(link.id),
                    ..Violation::new(
                        ViolationKind::GclLength,
                        format!("{} entries, limit {}", g.entries.len(), link.max_gcl_len),
                    )
                }),
                // unrealizable GCLs are already reported as overlaps or queue-range
                _ => {}
            }
        }
    }
    Ok(out)
}

fn isolation(out: &mut Vec<Violation>, link: LinkId, list: Vec<Resident>, h: u64, iso: Isolation) {
    // fold into one cycle, then add a shifted copy so wrap-around pairs meet
    let mut all: Vec<Resident> = list
        .iter()
        .map(|r| {
            let shift = r.arrival / h * h;
            Resident {
                arrival: r.arrival - shift,
                start: r.start - shift,
                end: r.end - shift,
                ..*r
            }
        })
        .collect();
    let n = all.len();
    all.extend_from_within(..);
    for r in &mut all[n..] {
        r.arrival += h;
        r.start += h;
        r.end += h;
    }
    all.sort_by_key(|r| (r.arrival, r.stream, r.frag));
    let mut reported = alloc::collections::BTreeSet::new();
    for i in 0..all.len() {
        let a = all[i];
        if a.arrival >= h {
            break;
        }
        for b in &all[i + 1..] {
            if b.arrival >= a.end {
                break;
            }
            if a.queue != b.queue || (a.stream, a.instance, a.frag) == (b.stream, b.instance, b.frag) {
                continue;
            }
            // a arrived first (or ties first by stream, fragment)
            let kind = match iso {
                Isolation::Fifo if b.start < a.start => Some(ViolationKind::IsolationFifo),
                Isolation::Frame => Some(ViolationKind::IsolationFrame),
                Isolation::Stream if a.stream != b.stream => Some(ViolationKind::IsolationStream),
                _ => None,
            };
            if let Some(kind) = kind {
                if reported.insert((kind, b.stream, b.instance, b.frag)) {
                    out.push(
                        Violation::new(
                            kind,
                            format!(
                                "shares queue {} with {} instance {} fragment {}",
                                a.queue, a.stream, a.instance, a.frag
                            ),
                        )
                        .at(Some(link), b.stream, b.instance, b.frag),
                    );
                }
            }
        }
    }
    if iso == Isolation::Stream {
        stream_blocks(out, link, &list, h);
    }
}

/// Residency blocks of different streams in one queue must not interleave.
fn stream_blocks(out: &mut Vec<Violation>, link: LinkId, list: &[Resident], h: u64) {
    let mut blocks: BTreeMap<(StreamId, u32), (u64, u64, u8)> = BTreeMap::new();
    for r in list {
        let e = blocks
            .entry((r.stream, r.instance))
            .or_insert((r.arrival, r.end, r.queue));
        e.0 = e.0.min(r.arrival);
        e.1 = e.1.max(r.end);
    }
    let mut v: Vec<(u64, u64, u8, StreamId, u32)> = Vec::new();
    for (&(s, k), &(lo, hi, q)) in &blocks {
        let shift = lo / h * h;
        v.push((lo - shift, hi - shift, q, s, k));
        v.push((lo - shift + h, hi - shift + h, q, s, k));
    }
    v.sort();
    for i in 0..v.len() {
        let a = v[i];
        if a.0 >= h {
            break;
        }
        for b in &v[i + 1..] {
            if b.0 >= a.1 {
                break;
            }
            if a.2 == b.2 && a.3 != b.3 {
                out.push(
                    Violation::new(
                        ViolationKind::IsolationStream,
                        format!("residency interleaves with {} instance {}", a.3, a.4),
                    )
                    .at(Some(link), b.3, b.4, 0),
                );
            }
        }
    }
}
