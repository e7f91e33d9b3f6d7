//! Per-stream route options and timing constants shared by the engines.

use alloc::vec;
use alloc::vec::Vec;

use super::{EngineError, Infeasible, Instance};
use crate::model::{
    frame_split, hyperperiod, transmission_duration, LinkId, ModelError, ReleaseMode, Route, RoutingMode, StreamId,
    Topology,
};
use crate::netgen::{k_candidate_paths, shortest_route};
use crate::schedule::{Schedule, StreamPlan, TxWindow};
use crate::time::TimeNs;

#[derive(Clone, Debug)]
pub(crate) struct Hop {
    /// Index into `network.links`.
    pub link: usize,
    pub id: LinkId,
    pub tx: u64,
    /// End of transmission to eligibility at the next egress port.
    pub lag: u64,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// Egress of a bridge (queues matter) rather than of the talker.
    pub bridge_egress: bool,
    pub num_queues: u8,
    /// Start of fragment 0 relative to the release under no-wait.
    pub nw_off: u64,
    /// Lower bound from the start of this hop to the last listener receipt
    /// below it.
    pub tail: u64,
}

#[derive(Clone, Debug)]
pub(crate) struct PathOpt {
    pub route: Route,
    pub hops: Vec<Hop>,
    /// Talker spacing of consecutive fragments under no-wait.
    pub spacing: u64,
    /// No-wait end-to-end delay of the worst listener.
    pub bound: u64,
}

impl PathOpt {
    /// Start of fragment `j` on `hop` relative to the release under no-wait.
    pub fn nw_start(&self, hop: usize, j: u32) -> u64 {
        self.hops[hop].nw_off + j as u64 * self.spacing
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Prep {
    pub id: StreamId,
    pub period: u64,
    pub deadline: u64,
    pub parts: u32,
    pub frame_bytes: u32,
    /// Release offset fixed by the partially schedulable model.
    pub release: Option<u64>,
    /// Admissible route options (no-wait bound within the deadline).
    pub options: Vec<PathOpt>,
}

pub(crate) struct Ctx {
    pub hyper: u64,
    pub streams: Vec<Prep>,
    pub n_links: usize,
}

pub(crate) enum Prepared {
    Ready(Ctx),
    Infeasible(Infeasible),
}

fn path_option(
    inst: &Instance,
    topo: &Topology<'_>,
    idx: usize,
    route: Route,
    parts: u32,
    frame_bytes: u32,
) -> Result<PathOpt, ModelError> {
    let stream = &inst.streams[idx];
    let tree = route.tree(stream, topo)?;
    let mut hops: Vec<Hop> = tree
        .hops
        .iter()
        .map(|h| {
            let link = topo.link(h.link).expect("validated route");
            Hop {
                link: topo.link_index(h.link).expect("validated route"),
                id: h.link,
                tx: transmission_duration(frame_bytes, inst.cfg.header_bytes, link.line_rate_bps).0,
                lag: topo.hop_lag(link).0,
                parent: h.parent,
                children: vec![],
                bridge_egress: topo.is_bridge(link.src),
                num_queues: link.num_queues,
                nw_off: 0,
                tail: 0,
            }
        })
        .collect();
    for i in 0..hops.len() {
        if let Some(p) = hops[i].parent {
            hops[p].children.push(i);
            hops[i].nw_off = hops[p].nw_off + hops[p].tx + hops[p].lag;
        }
    }
    // children follow parents in breadth-first order
    for i in (0..hops.len()).rev() {
        let below = hops[i].children.iter().map(|&c| hops[c].tail).max().unwrap_or(0);
        hops[i].tail = hops[i].tx + hops[i].lag + below;
    }
    let spacing = hops.iter().map(|h| h.tx).max().unwrap_or(0);
    let bound = hops[0].tail + (parts as u64 - 1) * spacing;
    Ok(PathOpt {
        route,
        hops,
        spacing,
        bound,
    })
}

/// Builds route options for every stream with `parts[i]` frames per
/// instance of stream `i`.
pub(crate) fn prepare(inst: &Instance, parts: &[u32]) -> Result<Prepared, EngineError> {
    let topo = Topology::new(&inst.network);
    let hyper = hyperperiod(&inst.streams)?.0;
    let mut streams = Vec::with_capacity(inst.streams.len());
    for (idx, s) in inst.streams.iter().enumerate() {
        let (parts, frame_bytes) = frame_split(s.payload_bytes, inst.cfg.mtu_bytes, parts[idx]);
        let routes: Vec<Route> = match inst.cfg.routing_mode {
            RoutingMode::Joint if s.listeners.len() == 1 => k_candidate_paths(
                &topo,
                s.talker,
                s.listeners[0],
                inst.cfg.candidate_paths_k.max(1) as usize,
            )?
            .into_iter()
            .map(|p| Route {
                stream: s.id,
                paths: vec![p],
            })
            .collect(),
            _ => vec![shortest_route(&topo, s)?],
        };
        let mut options = Vec::new();
        for r in routes {
            let opt = path_option(inst, &topo, idx, r, parts, frame_bytes)?;
            if opt.bound <= s.deadline.0 {
                options.push(opt);
            }
        }
        if options.is_empty() {
            return Ok(Prepared::Infeasible(Infeasible::DeadlineBelowBound(s.id)));
        }
        streams.push(Prep {
            id: s.id,
            period: s.period.0,
            deadline: s.deadline.0,
            parts,
            frame_bytes,
            release: match inst.cfg.release_mode {
                ReleaseMode::Partially => Some(s.fixed_release.unwrap_or_default().0),
                ReleaseMode::Fully => None,
            },
            options,
        });
    }
    Ok(Prepared::Ready(Ctx {
        n_links: inst.network.links.len(),
        hyper,
        streams,
    }))
}

/// Requested parts of 1 for every stream (MTU framing only).
pub(crate) fn unfragmented(inst: &Instance) -> Vec<u32> {
    vec![1; inst.streams.len()]
}

/// Chosen route, release and per-hop, per-fragment transmission start
/// (relative to the timeline of instance 0) with its queue.
#[derive(Clone, Debug)]
pub(crate) struct Placement {
    pub stream: usize,
    pub option: usize,
    pub release: u64,
    pub times: Vec<Vec<(u64, u8)>>,
}

impl Placement {
    pub fn no_wait(ctx: &Ctx, stream: usize, option: usize, release: u64) -> Self {
        let sp = &ctx.streams[stream];
        let opt = &sp.options[option];
        let times = (0..opt.hops.len())
            .map(|h| (0..sp.parts).map(|j| (release + opt.nw_start(h, j), 0)).collect())
            .collect();
        Placement {
            stream,
            option,
            release,
            times,
        }
    }
}

/// Expands placements over the hyperperiod.
pub(crate) fn build_schedule(ctx: &Ctx, placements: &[Placement]) -> Schedule {
    let mut placements: Vec<&Placement> = placements.iter().collect();
    placements.sort_by_key(|p| ctx.streams[p.stream].id);
    let h = ctx.hyper;
    let mut plans = Vec::with_capacity(placements.len());
    let mut windows = Vec::new();
    for pl in placements {
        let sp = &ctx.streams[pl.stream];
        let opt = &sp.options[pl.option];
        plans.push(StreamPlan {
            stream: sp.id,
            route: opt.route.clone(),
            release: TimeNs(pl.release),
            fragments: sp.parts,
            fragment_bytes: sp.frame_bytes,
        });
        for (hop, frags) in opt.hops.iter().zip(&pl.times) {
            for (j, &(t, q)) in frags.iter().enumerate() {
                for k in 0..h / sp.period {
                    windows.push(TxWindow {
                        link: hop.id,
                        queue: q,
                        start: TimeNs((t + k * sp.period) % h),
                        duration: TimeNs(hop.tx),
                        stream: sp.id,
                        instance: k as u32,
                        fragment: j as u32,
                    });
                }
            }
        }
    }
    windows.sort();
    Schedule {
        cycle: TimeNs(h),
        plans,
        windows,
    }
}
