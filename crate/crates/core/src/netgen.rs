//! Benchmark topologies and route computation.
//!
//! Every topology attaches one end station per bridge. Bridges get ids
//! `0..n`, end stations `n..2n` (end station `n + i` hangs off bridge `i`).
//! Paths never relay through an end station.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::model::{Device, DeviceId, DeviceKind, Link, LinkId, ModelError, Network, Route, Stream, Topology};
use crate::time::TimeNs;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TopologyKind {
    Linear,
    Ring,
    Tree,
    Mesh,
}

impl TopologyKind {
    pub const ALL: [TopologyKind; 4] = [
        TopologyKind::Linear,
        TopologyKind::Ring,
        TopologyKind::Tree,
        TopologyKind::Mesh,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TopologyKind::Linear => "linear",
            TopologyKind::Ring => "ring",
            TopologyKind::Tree => "tree",
            TopologyKind::Mesh => "mesh",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

/// Attributes applied to every generated link, plus the network-wide
/// synchronization error. Defaults are the testbed calibration values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkDefaults {
    pub propagation_delay: TimeNs,
    pub processing_delay: TimeNs,
    pub line_rate_bps: u64,
    pub num_queues: u8,
    pub max_gcl_len: u32,
    pub sync_error: TimeNs,
}

impl Default for LinkDefaults {
    fn default() -> Self {
        LinkDefaults {
            propagation_delay: TimeNs(6),
            processing_delay: TimeNs(1_900),
            line_rate_bps: 1_000_000_000,
            num_queues: 8,
            max_gcl_len: 1024,
            sync_error: TimeNs(10),
        }
    }
}

fn bridge_cables(kind: TopologyKind, n: u32) -> Vec<(u32, u32)> {
    let mut cables: Vec<(u32, u32)> = (0..n - 1).map(|i| (i, i + 1)).collect();
    match kind {
        TopologyKind::Linear => {}
        TopologyKind::Ring => {
            if n > 2 {
                cables.push((n - 1, 0));
            }
        }
        TopologyKind::Tree => {
            // binary tree: parent of i is (i - 1) / 2
            cables = (1..n).map(|i| ((i - 1) / 2, i)).collect();
            // one redundant cross link between the root's children
            if n >= 3 {
                cables.push((1, 2));
            }
        }
        TopologyKind::Mesh => {
            if n > 2 {
                cables.push((n - 1, 0));
            }
            let chords = (n / 2).saturating_sub(2) as usize;
            let half = n / 2;
            let mut present: BTreeSet<(u32, u32)> = cables.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
            let starts = (0..n).step_by(2).chain((1..n).step_by(2));
            let mut added = 0;
            for a in starts {
                if added == chords {
                    break;
                }
                let b = (a + half) % n;
                let key = (a.min(b), a.max(b));
                if a == b || present.contains(&key) {
                    continue;
                }
                present.insert(key);
                cables.push((a, b));
                added += 1;
            }
        }
    }
    cables
}

/// Builds one of the four benchmark topologies with `n_bridges` bridges.
pub fn build_topology(kind: TopologyKind, n_bridges: usize, defaults: &LinkDefaults) -> Result<Network, ModelError> {
    if n_bridges < 2 || n_bridges > (u32::MAX / 4) as usize {
        return Err(ModelError::UnsupportedBridgeCount(n_bridges));
    }
    let n = n_bridges as u32;
    let mut cables = bridge_cables(kind, n);
    cables.extend((0..n).map(|i| (i, n + i)));
    custom_network(n, n, &cables, defaults)
}

/// A network from full-duplex cables. Devices `0..bridges` are bridges, the
/// next `end_stations` ids are end stations; every cable becomes two
/// directed links numbered in cable order.
pub fn custom_network(
    bridges: u32,
    end_stations: u32,
    cables: &[(u32, u32)],
    defaults: &LinkDefaults,
) -> Result<Network, ModelError> {
    let devices: Vec<Device> = (0..bridges + end_stations)
        .map(|i| Device {
            id: DeviceId(i),
            kind: if i < bridges {
                DeviceKind::Bridge
            } else {
                DeviceKind::EndStation
            },
        })
        .collect();
    let mut links = Vec::with_capacity(cables.len() * 2);
    for &(a, b) in cables {
        for (src, dst) in [(a, b), (b, a)] {
            links.push(Link {
                id: LinkId(links.len() as u32),
                src: DeviceId(src),
                dst: DeviceId(dst),
                propagation_delay: defaults.propagation_delay,
                processing_delay: defaults.processing_delay,
                line_rate_bps: defaults.line_rate_bps,
                num_queues: defaults.num_queues,
                max_gcl_len: defaults.max_gcl_len,
            });
        }
    }
    let net = Network {
        devices,
        links,
        sync_error: defaults.sync_error,
    };
    net.validate()?;
    Ok(net)
}

type Edge = (DeviceId, DeviceId);

/// Minimum-hop, lexicographically smallest device sequence from `from` to
/// `to`, avoiding banned devices and directed edges.
fn lex_shortest(
    topo: &Topology<'_>,
    from: DeviceId,
    to: DeviceId,
    banned_nodes: &BTreeSet<DeviceId>,
    banned_edges: &BTreeSet<Edge>,
) -> Option<Vec<DeviceId>> {
    // hop distance to `to`, walking links backwards
    let mut dist: BTreeMap<DeviceId, u32> = BTreeMap::new();
    dist.insert(to, 0);
    let mut queue = VecDeque::from([to]);
    while let Some(v) = queue.pop_front() {
        if v != to && !topo.is_bridge(v) {
            continue;
        }
        let d = dist[&v];
        for (u, _) in topo.neighbors(v) {
            // reverse link u -> v must exist and be usable
            if topo.link_between(u, v).is_none()
                || banned_nodes.contains(&u)
                || banned_edges.contains(&(u, v))
                || dist.contains_key(&u)
            {
                continue;
            }
            dist.insert(u, d + 1);
            queue.push_back(u);
        }
    }
    let mut at = from;
    let mut d = *dist.get(&from)?;
    let mut path = vec![from];
    while at != to {
        let next = topo
            .neighbors(at)
            .map(|(w, _)| w)
            .filter(|w| !banned_edges.contains(&(at, *w)))
            .find(|w| dist.get(w) == Some(&(d - 1)) && (*w == to || topo.is_bridge(*w)))?;
        path.push(next);
        at = next;
        d -= 1;
    }
    Some(path)
}

fn to_links(topo: &Topology<'_>, devices: &[DeviceId]) -> Vec<LinkId> {
    devices
        .windows(2)
        .map(|w| topo.link_between(w[0], w[1]).expect("adjacent devices").id)
        .collect()
}

/// Minimum-hop path between two end stations, ties broken by the smallest
/// device-id sequence.
pub fn shortest_path(topo: &Topology<'_>, from: DeviceId, to: DeviceId) -> Result<Vec<LinkId>, ModelError> {
    for dev in [from, to] {
        if topo.kind(dev).is_none() {
            return Err(ModelError::UnknownDevice(dev));
        }
    }
    if from == to {
        return Err(ModelError::NoPath(from, to));
    }
    let devices =
        lex_shortest(topo, from, to, &BTreeSet::new(), &BTreeSet::new()).ok_or(ModelError::NoPath(from, to))?;
    Ok(to_links(topo, &devices))
}

/// Up to `k` loop-free paths in non-decreasing hop order (Yen's algorithm
/// with the same deterministic tie-break as [`shortest_path`]).
pub fn k_candidate_paths(
    topo: &Topology<'_>,
    from: DeviceId,
    to: DeviceId,
    k: usize,
) -> Result<Vec<Vec<LinkId>>, ModelError> {
    shortest_path(topo, from, to)?;
    let first = lex_shortest(topo, from, to, &BTreeSet::new(), &BTreeSet::new()).ok_or(ModelError::NoPath(from, to))?;
    let mut accepted: Vec<Vec<DeviceId>> = vec![first];
    let mut pending: BTreeSet<(usize, Vec<DeviceId>)> = BTreeSet::new();
    while accepted.len() < k.max(1) {
        let prev = accepted.last().expect("non-empty").clone();
        for i in 0..prev.len() - 1 {
            let spur = prev[i];
            let root = &prev[..=i];
            let banned_edges: BTreeSet<Edge> = accepted
                .iter()
                .filter(|p| p.len() > i + 1 && &p[..=i] == root)
                .map(|p| (p[i], p[i + 1]))
                .collect();
            let banned_nodes: BTreeSet<DeviceId> = root[..i].iter().copied().collect();
            if let Some(tail) = lex_shortest(topo, spur, to, &banned_nodes, &banned_edges) {
                let mut full = root[..i].to_vec();
                full.extend(tail);
                if !accepted.contains(&full) {
                    pending.insert((full.len(), full));
                }
            }
        }
        match pending.pop_first() {
            Some((_, p)) => accepted.push(p),
            None => break,
        }
    }
    Ok(accepted.iter().map(|p| to_links(topo, p)).collect())
}

/// Per-listener shortest paths of a multicast stream. Shared prefixes are
/// identical, so the union is a tree.
pub fn shortest_path_tree(
    topo: &Topology<'_>,
    talker: DeviceId,
    listeners: &[DeviceId],
) -> Result<Vec<Vec<LinkId>>, ModelError> {
    listeners.iter().map(|&l| shortest_path(topo, talker, l)).collect()
}

/// Fixed-routing route of a stream.
pub fn shortest_route(topo: &Topology<'_>, stream: &Stream) -> Result<Route, ModelError> {
    Ok(Route {
        stream: stream.id,
        paths: shortest_path_tree(topo, stream.talker, &stream.listeners)?,
    })
}
