//! Exhaustive search over whole-microsecond schedules, judged only by the
//! static checker. With integral data an integral schedule exists whenever
//! any schedule does, so the grid loses nothing.

use qbvsched_core::engine::Instance;
use qbvsched_core::model::{
    hyperperiod, no_wait_bound, transmission_duration, LinkId, Route, Stream, Topology, WaitMode,
};
use qbvsched_core::netgen::shortest_route;
use qbvsched_core::schedule::{Schedule, StreamPlan, TxWindow};
use qbvsched_core::verify::check_static;
use qbvsched_core::TimeNs;

const UNIT: u64 = 1_000;

/// One way to send a stream: release plus per-hop start offsets and queues.
#[derive(Clone, Debug)]
struct Choice {
    release: u64,
    hops: Vec<(LinkId, u64, u64, u8)>, // link, start, duration, queue
}

struct StreamInfo {
    stream: Stream,
    route: Route,
    /// Per hop: link, transmission time, lag to the next hop, whether the
    /// sender is a bridge.
    hops: Vec<(LinkId, u64, u64, bool)>,
}

fn info(inst: &Instance, s: &Stream) -> StreamInfo {
    let topo = Topology::new(&inst.network);
    let route = shortest_route(&topo, s).unwrap();
    let hops = route.paths[0]
        .iter()
        .map(|&l| {
            let link = topo.link(l).unwrap();
            let tx = transmission_duration(s.payload_bytes, inst.cfg.header_bytes, link.line_rate_bps).0;
            (l, tx, topo.hop_lag(link).0, topo.is_bridge(link.src))
        })
        .collect();
    StreamInfo {
        stream: s.clone(),
        route,
        hops,
    }
}

/// Non-negative waits for `n` hops summing to at most `slack` units.
fn waits(n: usize, slack: u64) -> Vec<Vec<u64>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for w in 0..=slack {
        for mut rest in waits(n - 1, slack - w) {
            rest.insert(0, w * UNIT);
            out.push(rest);
        }
    }
    out
}

/// Stream `index` may use queues `0..=index` on a link: relabelling the
/// queues of a link in order of first use never needs more.
fn choices(inst: &Instance, si: &StreamInfo, index: usize) -> Vec<Choice> {
    let s = &si.stream;
    let nw = no_wait_bound(s, &si.route, &inst.network, &inst.cfg).unwrap().0;
    if nw > s.deadline.0 {
        return Vec::new();
    }
    let wa = inst.cfg.wait_mode == WaitMode::WaitAllowed;
    let slack = if wa { (s.deadline.0 - nw) / UNIT } else { 0 };
    let bridge_hops: Vec<usize> = (0..si.hops.len()).filter(|&h| si.hops[h].3).collect();
    let queue_sets: Vec<Vec<u8>> = if wa {
        let q = index as u8 + 1;
        bridge_hops.iter().fold(vec![vec![]], |acc, _| {
            acc.into_iter()
                .flat_map(|v| (0..q).map(move |x| [v.clone(), vec![x]].concat()))
                .collect()
        })
    } else {
        vec![vec![0; bridge_hops.len()]]
    };
    let mut out = Vec::new();
    for r in (0..s.period.0).step_by(UNIT as usize) {
        for ws in waits(bridge_hops.len(), slack) {
            for qs in &queue_sets {
                let mut t = r;
                let mut hops = Vec::new();
                let mut b = 0;
                for (i, &(l, tx, lag, from_bridge)) in si.hops.iter().enumerate() {
                    let mut q = 0;
                    if from_bridge {
                        t += ws[b];
                        q = qs[b];
                        b += 1;
                    }
                    hops.push((l, t, tx, q));
                    if i + 1 < si.hops.len() {
                        t += tx + lag;
                    }
                }
                out.push(Choice { release: r, hops });
            }
        }
    }
    out
}

fn schedule_of(infos: &[&StreamInfo], picks: &[&Choice]) -> Option<(Schedule, Vec<Stream>)> {
    let streams: Vec<Stream> = infos.iter().map(|i| i.stream.clone()).collect();
    let h = hyperperiod(&streams).unwrap().0;
    let mut windows = Vec::new();
    let mut plans = Vec::new();
    for (si, c) in infos.iter().zip(picks) {
        let p = si.stream.period.0;
        for k in 0..h / p {
            for &(link, start, dur, queue) in &c.hops {
                let phase = (start + k * p) % h;
                if phase + dur > h {
                    return None;
                }
                windows.push(TxWindow {
                    link,
                    queue,
                    start: TimeNs(phase),
                    duration: TimeNs(dur),
                    stream: si.stream.id,
                    instance: k as u32,
                    fragment: 0,
                });
            }
        }
        plans.push(StreamPlan {
            stream: si.stream.id,
            route: si.route.clone(),
            release: TimeNs(c.release),
            fragments: 1,
            fragment_bytes: si.stream.payload_bytes,
        });
    }
    Some((
        Schedule {
            cycle: TimeNs(h),
            plans,
            windows,
        },
        streams,
    ))
}

fn feasible(inst: &Instance, infos: &[&StreamInfo], picks: &[&Choice]) -> bool {
    let Some((schedule, streams)) = schedule_of(infos, picks) else {
        return false;
    };
    let sub = Instance {
        network: inst.network.clone(),
        streams,
        cfg: inst.cfg,
    };
    matches!(check_static(&schedule, &sub), Ok(v) if v.is_empty())
}

/// Whether some whole-microsecond schedule on the shortest routes passes
/// the static checker. Single-frame unicast streams under the fully
/// schedulable model only.
pub fn brute_force(inst: &Instance) -> bool {
    solve(inst).is_some()
}

/// The first schedule found by [`brute_force`].
pub fn solve(inst: &Instance) -> Option<Schedule> {
    let infos: Vec<StreamInfo> = inst.streams.iter().map(|s| info(inst, s)).collect();
    let all: Vec<Vec<Choice>> = infos.iter().enumerate().map(|(k, i)| choices(inst, i, k)).collect();
    // checking each prefix is enough: every violation involves at most two
    // streams
    fn dfs<'a>(inst: &Instance, infos: &'a [StreamInfo], all: &'a [Vec<Choice>], picks: &mut Vec<&'a Choice>) -> bool {
        let depth = picks.len();
        if depth == infos.len() {
            return true;
        }
        let prefix: Vec<&StreamInfo> = infos[..=depth].iter().collect();
        for c in &all[depth] {
            picks.push(c);
            if feasible(inst, &prefix, picks) && dfs(inst, infos, all, picks) {
                return true;
            }
            picks.pop();
        }
        false
    }
    let mut picks = Vec::new();
    if !dfs(inst, &infos, &all, &mut picks) {
        return None;
    }
    let refs: Vec<&StreamInfo> = infos.iter().collect();
    schedule_of(&refs, &picks).map(|(s, _)| s)
}
