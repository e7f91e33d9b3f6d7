//! Small fixtures for unit tests: 1 Gbps, zero delays, zero header, so one
//! byte takes 8 ns and 125 bytes take one microsecond.

use alloc::vec;
use alloc::vec::Vec;

use crate::engine::Instance;
use crate::model::{DeviceId, ModelConfig, Network, Stream, StreamId, WaitMode};
use crate::netgen::{custom_network, LinkDefaults};
use crate::time::TimeNs;

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

/// Payload of `us` microseconds of transmission.
pub fn bytes_for_us(us: u64) -> u32 {
    (us * 125) as u32
}

pub fn stream(id: u32, talker: u32, listener: u32, period_us: u64, tx_us: u64, deadline_us: u64) -> Stream {
    Stream {
        id: StreamId(id),
        talker: DeviceId(talker),
        listeners: vec![DeviceId(listener)],
        period: TimeNs::from_us(period_us),
        payload_bytes: bytes_for_us(tx_us),
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

pub fn inst(network: Network, streams: Vec<Stream>, cfg: ModelConfig) -> Instance {
    Instance { network, streams, cfg }
}
