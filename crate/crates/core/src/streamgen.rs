//! Seeded stream-set generator over the benchmark parameter pools.

use alloc::vec::Vec;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::{
    frame_split, hyperperiod, DeviceId, ModelConfig, ModelError, Network, ReleaseMode, Stream, StreamId, Topology,
};
use crate::netgen::shortest_route;
use crate::time::TimeNs;

pub const DEFAULT_SEED: u64 = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PeriodType {
    SparseSingle,
    DenseSingle,
    SparseHarmonic,
    DenseHarmonic,
    SparseInharmonic,
    DenseInharmonic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PayloadType {
    Tiny,
    Small,
    Medium,
    Large,
    Huge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeadlineType {
    Implicit,
    Relaxed,
    Normal,
    Strict,
    NoWait,
}

macro_rules! named {
    ($ty:ident { $($v:ident => $s:literal),* $(,)? }) => {
        impl $ty {
            pub const ALL: &'static [$ty] = &[$($ty::$v),*];

            pub fn name(self) -> &'static str {
                match self { $($ty::$v => $s),* }
            }

            pub fn parse(s: &str) -> Option<Self> {
                Self::ALL.iter().copied().find(|v| v.name() == s)
            }
        }
    };
}

named!(PeriodType {
    SparseSingle => "sparse-single",
    DenseSingle => "dense-single",
    SparseHarmonic => "sparse-harmonic",
    DenseHarmonic => "dense-harmonic",
    SparseInharmonic => "sparse-inharmonic",
    DenseInharmonic => "dense-inharmonic",
});

named!(PayloadType {
    Tiny => "tiny",
    Small => "small",
    Medium => "medium",
    Large => "large",
    Huge => "huge",
});

named!(DeadlineType {
    Implicit => "implicit",
    Relaxed => "relaxed",
    Normal => "normal",
    Strict => "strict",
    NoWait => "no-wait",
});

impl PeriodType {
    /// Period pool in microseconds.
    pub fn pool_us(self) -> &'static [u64] {
        match self {
            PeriodType::SparseSingle => &[2_000],
            PeriodType::DenseSingle => &[400],
            PeriodType::SparseHarmonic => &[500, 1_000, 2_000, 4_000],
            PeriodType::DenseHarmonic => &[100, 200, 400, 800],
            PeriodType::SparseInharmonic => &[250, 500, 1_250, 2_500, 4_000],
            PeriodType::DenseInharmonic => &[50, 100, 250, 500, 800],
        }
    }
}

impl PayloadType {
    /// Inclusive payload range in bytes.
    pub fn range(self) -> (u32, u32) {
        match self {
            PayloadType::Tiny => (50, 50),
            PayloadType::Small => (50, 500),
            PayloadType::Medium => (200, 1500),
            PayloadType::Large => (500, 4500),
            PayloadType::Huge => (1500, 4500),
        }
    }
}

impl DeadlineType {
    /// Slack added to the no-wait bound, in nanoseconds. `None` for implicit.
    pub fn slack_pool_ns(self) -> Option<&'static [u64]> {
        match self {
            DeadlineType::Implicit => None,
            DeadlineType::Relaxed => Some(&[100_000, 200_000, 400_000, 800_000, 1_600_000]),
            DeadlineType::Normal => Some(&[10_000, 25_000, 50_000, 100_000, 200_000, 400_000]),
            DeadlineType::Strict => Some(&[0, 10_000, 20_000, 25_000, 50_000]),
            DeadlineType::NoWait => Some(&[0]),
        }
    }
}

fn one() -> u32 {
    1
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamSpec {
    pub n_streams: u32,
    pub period_type: PeriodType,
    pub payload_type: PayloadType,
    pub deadline_type: DeadlineType,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Listeners per stream; 1 gives unicast.
    #[serde(default = "one")]
    pub listeners_per_stream: u32,
}

/// Draws `spec.n_streams` streams. Talkers and listeners are uniform over the
/// end stations, the period, payload and deadline slack uniform over their
/// pools. Deadlines are the no-wait bound on the shortest route plus the
/// slack; implicit deadlines equal the period (raised to the bound if the
/// period is shorter).
pub fn generate_streamset(spec: &StreamSpec, network: &Network, cfg: &ModelConfig) -> Result<Vec<Stream>, ModelError> {
    let topo = Topology::new(network);
    let stations: Vec<DeviceId> = network.end_stations().collect();
    if stations.len() < 2 {
        return Err(ModelError::InvalidStream(StreamId(0), "network needs two end stations"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n_listeners = (spec.listeners_per_stream.max(1) as usize).min(stations.len() - 1);
    let periods = spec.period_type.pool_us();
    let (lo, hi) = spec.payload_type.range();
    let mut streams = Vec::with_capacity(spec.n_streams as usize);
    for i in 0..spec.n_streams {
        let t = rng.gen_range(0..stations.len());
        let talker = stations[t];
        let mut listeners: Vec<DeviceId> = index::sample(&mut rng, stations.len() - 1, n_listeners)
            .into_iter()
            .map(|j| stations[if j >= t { j + 1 } else { j }])
            .collect();
        listeners.sort();
        let period = TimeNs::from_us(periods[rng.gen_range(0..periods.len())]);
        let payload_bytes = rng.gen_range(lo..=hi);
        let mut stream = Stream {
            id: StreamId(i),
            talker,
            listeners,
            period,
            payload_bytes,
            deadline: period,
            jitter_bound: None,
            fixed_release: match cfg.release_mode {
                ReleaseMode::Fully => None,
                ReleaseMode::Partially => Some(TimeNs::ZERO),
            },
        };
        let route = shortest_route(&topo, &stream)?;
        let nw = crate::model::no_wait_bound(&stream, &route, network, cfg)?;
        stream.deadline = match spec.deadline_type.slack_pool_ns() {
            None => period.max(nw),
            Some(pool) => nw + TimeNs(pool[rng.gen_range(0..pool.len())]),
        };
        streams.push(stream);
    }
    Ok(streams)
}

/// Frames per hyperperiod: each instance carries `ceil(payload / mtu)`
/// frames.
pub fn frame_count(streams: &[Stream], cfg: &ModelConfig) -> Result<u64, ModelError> {
    let h = hyperperiod(streams)?;
    Ok(streams
        .iter()
        .map(|s| (h.0 / s.period.0) * frame_split(s.payload_bytes, cfg.mtu_bytes, 1).0 as u64)
        .sum())
}
