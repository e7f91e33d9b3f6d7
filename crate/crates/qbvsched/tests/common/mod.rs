//! Shared fixtures: 1 Gbps links, zero header, so 125 payload bytes take
//! one microsecond on the wire.
#![allow(dead_code)]

pub mod oracle;

use qbvsched_core::engine::Instance;
use qbvsched_core::model::{
    DeviceId, Fragmentation, Isolation, LinkId, ModelConfig, Network, ReleaseMode, Route, Stream, StreamId, WaitMode,
};
use qbvsched_core::netgen::{build_topology, custom_network, LinkDefaults, TopologyKind};
use qbvsched_core::schedule::{Schedule, StreamPlan, TxWindow};
use qbvsched_core::TimeNs;
use rand::Rng;

pub fn zero_delays() -> LinkDefaults {
    LinkDefaults {
        propagation_delay: TimeNs::ZERO,
        processing_delay: TimeNs::ZERO,
        sync_error: TimeNs::ZERO,
        ..LinkDefaults::default()
    }
}

pub fn net(bridges: u32, end_stations: u32, cables: &[(u32, u32)]) -> Network {
    custom_network(bridges, end_stations, cables, &zero_delays()).unwrap()
}

pub fn stream(id: u32, talker: u32, listener: u32, period_us: u64, tx_us: u64, deadline_us: u64) -> Stream {
    Stream {
        id: StreamId(id),
        talker: DeviceId(talker),
        listeners: vec![DeviceId(listener)],
        period: TimeNs::from_us(period_us),
        payload_bytes: (tx_us * 125) as u32,
        deadline: TimeNs::from_us(deadline_us),
        jitter_bound: None,
        fixed_release: None,
    }
}

pub fn cfg(wait: WaitMode) -> ModelConfig {
    ModelConfig {
        wait_mode: wait,
        header_bytes: 0,
        mtu_bytes: 9000,
        ..ModelConfig::default()
    }
}

pub fn instance(network: Network, streams: Vec<Stream>, cfg: ModelConfig) -> Instance {
    Instance { network, streams, cfg }
}

/// Two streams share two consecutive links with different frame sizes: no
/// common release works without waiting, a wait at the first bridge does.
pub fn wait_dodges_conflict() -> Instance {
    let n = net(3, 3, &[(0, 1), (1, 2), (3, 0), (4, 0), (5, 2)]);
    instance(
        n,
        vec![stream(0, 3, 5, 12, 8, 40), stream(1, 4, 5, 12, 4, 40)],
        cfg(WaitMode::WaitAllowed),
    )
}

/// Bridge 0 with talkers 1, 2 and listener 3; links 0 = 1->0, 2 = 2->0,
/// 4 = 0->3. S3 has 40 us, S4 20 us to deliver a 10 us frame.
pub fn merge_instance(iso: Isolation) -> Instance {
    let mut c = cfg(WaitMode::WaitAllowed);
    c.isolation = iso;
    instance(
        net(1, 3, &[(1, 0), (2, 0), (0, 3)]),
        vec![stream(3, 1, 3, 100, 10, 40), stream(4, 2, 3, 100, 10, 20)],
        c,
    )
}

/// Plan for [`merge_instance`] with S4 sent ahead of S3 on the shared link
/// although S3 reaches the bridge first.
pub fn overtaking() -> Schedule {
    let win = |link: u32, start_us: u64, s: u32| TxWindow {
        link: LinkId(link),
        queue: 0,
        start: TimeNs::from_us(start_us),
        duration: TimeNs::from_us(10),
        stream: StreamId(s),
        instance: 0,
        fragment: 0,
    };
    let plan = |s: u32, first: u32, release_us: u64| StreamPlan {
        stream: StreamId(s),
        route: Route {
            stream: StreamId(s),
            paths: vec![vec![LinkId(first), LinkId(4)]],
        },
        release: TimeNs::from_us(release_us),
        fragments: 1,
        fragment_bytes: 1250,
    };
    Schedule {
        cycle: TimeNs::from_us(100),
        plans: vec![plan(3, 0, 0), plan(4, 2, 2)],
        windows: vec![win(0, 0, 3), win(2, 2, 4), win(4, 12, 4), win(4, 22, 3)],
    }
}

/// Talker 2 on bridge 0, listener 3 on bridge 1: three hops of 6 us each
/// against a 12 us deadline.
pub fn didactic(fragmentation: Fragmentation) -> Instance {
    let mut c = cfg(WaitMode::NoWait);
    c.mtu_bytes = 1500;
    c.fragmentation = fragmentation;
    instance(
        net(2, 2, &[(0, 1), (0, 2), (1, 3)]),
        vec![stream(0, 2, 3, 100, 6, 12)],
        c,
    )
}

/// Six streams, each from the end station of bridge `i` to that of bridge
/// `i + 2`; on a ring their paths chain all the way round.
pub fn ring_covering(kind: TopologyKind) -> Instance {
    let n = build_topology(kind, 6, &zero_delays()).unwrap();
    let count = if kind == TopologyKind::Ring { 6 } else { 4 };
    let streams = (0..count)
        .map(|i| {
            let mut s = stream(i, 6 + i, 6 + (i + 2) % 6, 100, 5, 100);
            s.fixed_release = Some(TimeNs::ZERO);
            s
        })
        .collect();
    let mut c = cfg(WaitMode::WaitAllowed);
    c.release_mode = ReleaseMode::Partially;
    instance(n, streams, c)
}

/// A two-bridge network small enough to enumerate: end stations 2, 3 on
/// bridge 0 and 4, 5 on bridge 1. Periods, frames, delays and deadlines are
/// whole microseconds.
pub fn tiny_instance(rng: &mut impl Rng, wait: WaitMode, max_streams: u32) -> Instance {
    let defaults = LinkDefaults {
        propagation_delay: TimeNs::from_us(rng.gen_range(0..2)),
        ..zero_delays()
    };
    let network = custom_network(2, 4, &[(0, 1), (0, 2), (0, 3), (1, 4), (1, 5)], &defaults).unwrap();
    let mut c = cfg(wait);
    c.isolation = [Isolation::Fifo, Isolation::Frame, Isolation::Stream][rng.gen_range(0..3)];
    let n = rng.gen_range(2..=max_streams);
    let base = [4u64, 6][rng.gen_range(0..2)];
    let streams = (0..n)
        .map(|i| {
            let talker = rng.gen_range(2..4);
            let listener = loop {
                let l = rng.gen_range(2..6);
                if l != talker {
                    break l;
                }
            };
            let hops = if (talker < 4) == (listener < 4) { 2 } else { 3 };
            let period = base * rng.gen_range(1..=2);
            let tx = rng.gen_range(1..=3);
            let lag = defaults.propagation_delay.0 / 1000;
            let bound = hops * tx + (hops - 1) * lag + lag;
            stream(i, talker, listener, period, tx, bound + rng.gen_range(0..=2))
        })
        .collect();
    instance(network, streams, c)
}
