//! Network, traffic and scheduling-model types shared by every other module.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::time::{checked_lcm, TimeNs};

/// Maximum number of egress queues on a port.
pub const MAX_QUEUES: u8 = 8;

macro_rules! id_type {
    ($(#[$m:meta])* $name:ident, $prefix:literal) => {
        $(#[$m])*
        #[derive(
            Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
        )]
        #[serde(transparent)]
        pub struct $name(pub u32);

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!($prefix, "{}"), self.0)
            }
        }
    };
}

id_type!(DeviceId, "d");
id_type!(LinkId, "l");
id_type!(StreamId, "s");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeviceKind {
    Bridge,
    EndStation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Device {
    pub id: DeviceId,
    pub kind: DeviceKind,
}

/// A directed logical link. A full-duplex cable is two of these.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Link {
    pub id: LinkId,
    pub src: DeviceId,
    pub dst: DeviceId,
    pub propagation_delay: TimeNs,
    /// Processing delay of the receiving device, charged on ingress when
    /// `dst` is a bridge.
    pub processing_delay: TimeNs,
    pub line_rate_bps: u64,
    pub num_queues: u8,
    pub max_gcl_len: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Network {
    pub devices: Vec<Device>,
    pub links: Vec<Link>,
    pub sync_error: TimeNs,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stream {
    pub id: StreamId,
    pub talker: DeviceId,
    pub listeners: Vec<DeviceId>,
    pub period: TimeNs,
    pub payload_bytes: u32,
    pub deadline: TimeNs,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jitter_bound: Option<TimeNs>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_release: Option<TimeNs>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoutingMode {
    #[default]
    Fixed,
    Joint,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaitMode {
    #[default]
    NoWait,
    WaitAllowed,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Isolation {
    Unrestricted,
    #[default]
    Fifo,
    Frame,
    Stream,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReleaseMode {
    #[default]
    Fully,
    Partially,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fragmentation {
    #[default]
    Off,
    MaxFragments(u32),
}

fn default_header() -> u32 {
    22
}
fn default_mtu() -> u32 {
    1500
}
fn default_k() -> u32 {
    3
}

/// Switches of the scheduling-model taxonomy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelConfig {
    #[serde(default)]
    pub routing_mode: RoutingMode,
    #[serde(default)]
    pub wait_mode: WaitMode,
    #[serde(default)]
    pub isolation: Isolation,
    #[serde(default)]
    pub release_mode: ReleaseMode,
    #[serde(default)]
    pub fragmentation: Fragmentation,
    #[serde(default = "default_header")]
    pub header_bytes: u32,
    #[serde(default = "default_mtu")]
    pub mtu_bytes: u32,
    #[serde(default = "default_k")]
    pub candidate_paths_k: u32,
    /// Report GCLs longer than `Link::max_gcl_len` as violations.
    #[serde(default)]
    pub enforce_gcl_len: bool,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            routing_mode: RoutingMode::Fixed,
            wait_mode: WaitMode::NoWait,
            isolation: Isolation::Fifo,
            release_mode: ReleaseMode::Fully,
            fragmentation: Fragmentation::Off,
            header_bytes: default_header(),
            mtu_bytes: default_mtu(),
            candidate_paths_k: default_k(),
            enforce_gcl_len: false,
        }
    }
}

impl ModelConfig {
    /// Isolation level in force. Frames never queue under no-wait.
    pub fn effective_isolation(&self) -> Isolation {
        match self.wait_mode {
            WaitMode::NoWait => Isolation::Unrestricted,
            WaitMode::WaitAllowed => self.isolation,
        }
    }
}

/// Per-listener link paths of one stream. Their union is a tree rooted at
/// the talker.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Route {
    pub stream: StreamId,
    pub paths: Vec<Vec<LinkId>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("duplicate device id {0}")]
    DuplicateDevice(DeviceId),
    #[error("duplicate link id {0}")]
    DuplicateLink(LinkId),
    #[error("duplicate stream id {0}")]
    DuplicateStream(StreamId),
    #[error("unknown device {0}")]
    UnknownDevice(DeviceId),
    #[error("unknown link {0}")]
    UnknownLink(LinkId),
    #[error("link {0} has invalid attributes: {1}")]
    InvalidLink(LinkId, &'static str),
    #[error("link {0} has no reverse link")]
    MissingReverse(LinkId),
    #[error("end station {0} must attach to exactly one bridge")]
    EndStationAttachment(DeviceId),
    #[error("network is not connected")]
    Disconnected,
    #[error("stream {0} is invalid: {1}")]
    InvalidStream(StreamId, &'static str),
    #[error("route does not match stream {0}: {1}")]
    RouteMismatch(StreamId, &'static str),
    #[error("no path from {0} to {1}")]
    NoPath(DeviceId, DeviceId),
    #[error("hyperperiod overflows the time type")]
    HyperperiodOverflow,
    #[error("empty stream set")]
    EmptyStreamSet,
    #[error("unsupported bridge count {0}")]
    UnsupportedBridgeCount(usize),
}

impl Network {
    pub fn validate(&self) -> Result<(), ModelError> {
        let mut kinds = BTreeMap::new();
        for d in &self.devices {
            if kinds.insert(d.id, d.kind).is_some() {
                return Err(ModelError::DuplicateDevice(d.id));
            }
        }
        let mut pairs = BTreeSet::new();
        let mut ids = BTreeSet::new();
        for l in &self.links {
            if !ids.insert(l.id) {
                return Err(ModelError::DuplicateLink(l.id));
            }
            for dev in [l.src, l.dst] {
                if !kinds.contains_key(&dev) {
                    return Err(ModelError::UnknownDevice(dev));
                }
            }
            if l.src == l.dst {
                return Err(ModelError::InvalidLink(l.id, "self loop"));
            }
            if l.line_rate_bps == 0 {
                return Err(ModelError::InvalidLink(l.id, "line rate must be positive"));
            }
            if l.num_queues == 0 || l.num_queues > MAX_QUEUES {
                return Err(ModelError::InvalidLink(l.id, "queue count outside [1, 8]"));
            }
            if l.max_gcl_len == 0 {
                return Err(ModelError::InvalidLink(l.id, "max GCL length must be >= 1"));
            }
            if !pairs.insert((l.src, l.dst)) {
                return Err(ModelError::InvalidLink(l.id, "parallel link"));
            }
        }
        for l in &self.links {
            if !pairs.contains(&(l.dst, l.src)) {
                return Err(ModelError::MissingReverse(l.id));
            }
        }
        for d in &self.devices {
            if d.kind == DeviceKind::EndStation {
                let attached: Vec<_> = self.links.iter().filter(|l| l.src == d.id).collect();
                if attached.len() != 1 || kinds[&attached[0].dst] != DeviceKind::Bridge {
                    return Err(ModelError::EndStationAttachment(d.id));
                }
            }
        }
        if let Some(first) = self.devices.first() {
            let topo = Topology::new(self);
            let mut seen = BTreeSet::new();
            let mut queue = VecDeque::from([first.id]);
            seen.insert(first.id);
            while let Some(dev) = queue.pop_front() {
                for (next, _) in topo.neighbors(dev) {
                    if seen.insert(next) {
                        queue.push_back(next);
                    }
                }
            }
            if seen.len() != self.devices.len() {
                return Err(ModelError::Disconnected);
            }
        }
        Ok(())
    }

    pub fn device(&self, id: DeviceId) -> Option<&Device> {
        self.devices.iter().find(|d| d.id == id)
    }

    pub fn end_stations(&self) -> impl Iterator<Item = DeviceId> + '_ {
        self.devices
            .iter()
            .filter(|d| d.kind == DeviceKind::EndStation)
            .map(|d| d.id)
    }
}

/// Lookup tables over a [`Network`].
#[derive(Clone, Debug)]
pub struct Topology<'a> {
    pub net: &'a Network,
    link_pos: BTreeMap<LinkId, usize>,
    kinds: BTreeMap<DeviceId, DeviceKind>,
    /// Outgoing links per device, sorted by destination id.
    out: BTreeMap<DeviceId, Vec<(DeviceId, usize)>>,
    by_pair: BTreeMap<(DeviceId, DeviceId), usize>,
}

impl<'a> Topology<'a> {
    pub fn new(net: &'a Network) -> Self {
        let mut link_pos = BTreeMap::new();
        let mut out: BTreeMap<DeviceId, Vec<(DeviceId, usize)>> = BTreeMap::new();
        let mut by_pair = BTreeMap::new();
        for (i, l) in net.links.iter().enumerate() {
            link_pos.insert(l.id, i);
            out.entry(l.src).or_default().push((l.dst, i));
            by_pair.insert((l.src, l.dst), i);
        }
        for v in out.values_mut() {
            v.sort();
        }
        let kinds = net.devices.iter().map(|d| (d.id, d.kind)).collect();
        Topology {
            net,
            link_pos,
            kinds,
            out,
            by_pair,
        }
    }

    pub fn link_index(&self, id: LinkId) -> Option<usize> {
        self.link_pos.get(&id).copied()
    }

    pub fn link(&self, id: LinkId) -> Option<&'a Link> {
        self.link_index(id).map(|i| &self.net.links[i])
    }

    pub fn link_between(&self, src: DeviceId, dst: DeviceId) -> Option<&'a Link> {
        self.by_pair.get(&(src, dst)).map(|&i| &self.net.links[i])
    }

    pub fn kind(&self, dev: DeviceId) -> Option<DeviceKind> {
        self.kinds.get(&dev).copied()
    }

    pub fn is_bridge(&self, dev: DeviceId) -> bool {
        self.kind(dev) == Some(DeviceKind::Bridge)
    }

    /// Neighbours reachable over one outgoing link, ascending by id.
    pub fn neighbors(&self, dev: DeviceId) -> impl Iterator<Item = (DeviceId, usize)> + '_ {
        self.out.get(&dev).into_iter().flatten().copied()
    }

    /// Delay between the end of a transmission on `link` and the moment the
    /// frame is eligible at the next egress port of `link.dst`.
    pub fn hop_lag(&self, link: &Link) -> TimeNs {
        let mut lag = link.propagation_delay;
        if self.is_bridge(link.dst) {
            lag += link.processing_delay + self.net.sync_error;
        }
        lag
    }
}

impl Stream {
    pub fn validate(&self, topo: &Topology<'_>) -> Result<(), ModelError> {
        let bad = |why| Err(ModelError::InvalidStream(self.id, why));
        if self.period.0 == 0 {
            return bad("period must be positive");
        }
        if self.deadline.0 == 0 {
            return bad("deadline must be positive");
        }
        if self.payload_bytes == 0 {
            return bad("payload must be at least one byte");
        }
        if self.listeners.is_empty() {
            return bad("no listeners");
        }
        if self.listeners.contains(&self.talker) {
            return bad("talker is also a listener");
        }
        let unique: BTreeSet<_> = self.listeners.iter().collect();
        if unique.len() != self.listeners.len() {
            return bad("duplicate listener");
        }
        for &dev in core::iter::once(&self.talker).chain(&self.listeners) {
            match topo.kind(dev) {
                None => return Err(ModelError::UnknownDevice(dev)),
                Some(DeviceKind::Bridge) => return bad("talker and listeners must be end stations"),
                Some(DeviceKind::EndStation) => {}
            }
        }
        if let Some(r) = self.fixed_release {
            if r >= self.period {
                return bad("fixed release must be below the period");
            }
        }
        Ok(())
    }
}

/// One hop of a route tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeHop {
    pub link: LinkId,
    pub parent: Option<usize>,
    /// Set when the link enters a listener.
    pub listener: Option<DeviceId>,
}

/// A validated route as a tree of hops in breadth-first order; `hops[0]`
/// leaves the talker.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RouteTree {
    pub hops: Vec<TreeHop>,
}

impl RouteTree {
    pub fn children(&self, hop: usize) -> impl Iterator<Item = usize> + '_ {
        self.hops
            .iter()
            .enumerate()
            .filter(move |(_, h)| h.parent == Some(hop))
            .map(|(i, _)| i)
    }

    /// Hop indices from the root down to `hop`.
    pub fn path_to(&self, mut hop: usize) -> Vec<usize> {
        let mut path = vec![hop];
        while let Some(p) = self.hops[hop].parent {
            path.push(p);
            hop = p;
        }
        path.reverse();
        path
    }
}

impl Route {
    /// Checks the route against its stream and builds the hop tree.
    pub fn tree(&self, stream: &Stream, topo: &Topology<'_>) -> Result<RouteTree, ModelError> {
        let bad = |why| Err(ModelError::RouteMismatch(stream.id, why));
        if self.stream != stream.id {
            return bad("stream id differs");
        }
        if self.paths.len() != stream.listeners.len() {
            return bad("one path per listener required");
        }
        let mut hops: Vec<TreeHop> = Vec::new();
        let mut index: BTreeMap<LinkId, usize> = BTreeMap::new();
        // device -> link that enters it
        let mut entered: BTreeMap<DeviceId, LinkId> = BTreeMap::new();
        for (path, &listener) in self.paths.iter().zip(&stream.listeners) {
            if path.is_empty() {
                return bad("empty path");
            }
            let mut at = stream.talker;
            let mut visited = BTreeSet::from([at]);
            let mut parent = None;
            for &lid in path {
                let link = topo.link(lid).ok_or(ModelError::UnknownLink(lid))?;
                if link.src != at {
                    return bad("path links are not consecutive");
                }
                if !visited.insert(link.dst) {
                    return bad("path is not simple");
                }
                if link.dst == stream.talker {
                    return bad("path re-enters the talker");
                }
                match entered.get(&link.dst) {
                    Some(&other) if other != lid => return bad("paths do not form a tree"),
                    _ => {}
                }
                entered.insert(link.dst, lid);
                let idx = match index.get(&lid) {
                    Some(&i) => {
                        if hops[i].parent != parent {
                            return bad("paths do not form a tree");
                        }
                        i
                    }
                    None => {
                        hops.push(TreeHop {
                            link: lid,
                            parent,
                            listener: None,
                        });
                        index.insert(lid, hops.len() - 1);
                        hops.len() - 1
                    }
                };
                parent = Some(idx);
                at = link.dst;
            }
            if at != listener {
                return bad("path does not end at its listener");
            }
            let last = parent.expect("non-empty path");
            hops[last].listener = Some(listener);
        }
        if hops.iter().filter(|h| h.parent.is_none()).count() != 1 {
            return bad("paths do not share the talker link");
        }
        // Intermediate listeners would make a listener forward traffic.
        for (i, h) in hops.iter().enumerate() {
            let l = topo.link(h.link).expect("checked above");
            if !topo.is_bridge(l.dst) && hops.iter().any(|c| c.parent == Some(i)) {
                return bad("end station used as a relay");
            }
        }
        // Re-order breadth first so parents precede children.
        let mut order = Vec::with_capacity(hops.len());
        let mut queue: VecDeque<usize> = hops
            .iter()
            .enumerate()
            .filter(|(_, h)| h.parent.is_none())
            .map(|(i, _)| i)
            .collect();
        while let Some(i) = queue.pop_front() {
            order.push(i);
            queue.extend(
                hops.iter()
                    .enumerate()
                    .filter(|(_, h)| h.parent == Some(i))
                    .map(|(c, _)| c),
            );
        }
        let mut remap = vec![0; hops.len()];
        for (new, &old) in order.iter().enumerate() {
            remap[old] = new;
        }
        let hops = order
            .iter()
            .map(|&old| {
                let h = &hops[old];
                TreeHop {
                    link: h.link,
                    parent: h.parent.map(|p| remap[p]),
                    listener: h.listener,
                }
            })
            .collect();
        Ok(RouteTree { hops })
    }
}

/// Time to serialize one frame of `payload_bytes` plus header at `line_rate_bps`,
/// rounded up to the next nanosecond.
pub fn transmission_duration(payload_bytes: u32, header_bytes: u32, line_rate_bps: u64) -> TimeNs {
    let bits = (payload_bytes as u128 + header_bytes as u128) * 8 * 1_000_000_000;
    let rate = line_rate_bps as u128;
    TimeNs(bits.div_ceil(rate) as u64)
}

/// Number of frames an instance is split into and the payload carried by
/// each: at least `ceil(payload / mtu)` frames, or `requested` when larger,
/// never more frames than payload bytes.
pub fn frame_split(payload_bytes: u32, mtu_bytes: u32, requested: u32) -> (u32, u32) {
    let mtu_parts = payload_bytes.div_ceil(mtu_bytes.max(1));
    let parts = requested.max(mtu_parts).clamp(1, payload_bytes.max(1));
    (parts, payload_bytes.div_ceil(parts))
}

/// Minimum end-to-end delay of each listener under the no-wait model with
/// `parts` frames per instance. Returned in listener order.
pub fn listener_no_wait_bounds(
    stream: &Stream,
    route: &Route,
    topo: &Topology<'_>,
    cfg: &ModelConfig,
    parts: u32,
) -> Result<Vec<TimeNs>, ModelError> {
    let tree = route.tree(stream, topo)?;
    let frame_bytes = stream.payload_bytes.div_ceil(parts.max(1));
    let tx = |lid: LinkId| {
        let l = topo.link(lid).expect("validated route");
        transmission_duration(frame_bytes, cfg.header_bytes, l.line_rate_bps)
    };
    let spacing = tree.hops.iter().map(|h| tx(h.link)).max().unwrap_or_default();
    let mut out = Vec::with_capacity(route.paths.len());
    for path in &route.paths {
        let mut total = TimeNs::ZERO;
        for (i, &lid) in path.iter().enumerate() {
            let link = topo.link(lid).expect("validated route");
            total += tx(lid) + link.propagation_delay;
            if i + 1 < path.len() {
                total += link.processing_delay + topo.net.sync_error;
            }
        }
        out.push(total + spacing * (parts.max(1) as u64 - 1));
    }
    Ok(out)
}

/// Minimum end-to-end delay of a stream along `route` with MTU-level
/// framing; the worst listener governs for multicast.
pub fn no_wait_bound(
    stream: &Stream,
    route: &Route,
    network: &Network,
    cfg: &ModelConfig,
) -> Result<TimeNs, ModelError> {
    let topo = Topology::new(network);
    let (parts, _) = frame_split(stream.payload_bytes, cfg.mtu_bytes, 1);
    let bounds = listener_no_wait_bounds(stream, route, &topo, cfg, parts)?;
    Ok(bounds.into_iter().max().unwrap_or_default())
}

/// Least common multiple of all stream periods.
pub fn hyperperiod(streams: &[Stream]) -> Result<TimeNs, ModelError> {
    let mut iter = streams.iter();
    let first = iter.next().ok_or(ModelError::EmptyStreamSet)?;
    let mut acc = first.period.0;
    for s in iter {
        acc = checked_lcm(acc, s.period.0).ok_or(ModelError::HyperperiodOverflow)?;
    }
    Ok(TimeNs(acc))
}
