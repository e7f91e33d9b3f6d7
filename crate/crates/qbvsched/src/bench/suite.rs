use serde::{Deserialize, Serialize};

use qbvsched_core::engine::Instance;
use qbvsched_core::model::{ModelConfig, ModelError};
use qbvsched_core::netgen::{build_topology, LinkDefaults, TopologyKind};
use qbvsched_core::streamgen::{generate_streamset, DeadlineType, PayloadType, PeriodType, StreamSpec};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedInstance {
    pub id: String,
    pub instance: Instance,
}

fn one() -> u32 {
    1
}

/// A grid of generated instances: one per (stream count, seed).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratedSet {
    pub topology: TopologyKind,
    pub bridges: usize,
    pub stream_counts: Vec<u32>,
    pub seeds: Vec<u64>,
    pub period_type: PeriodType,
    pub payload_type: PayloadType,
    pub deadline_type: DeadlineType,
    #[serde(default = "one")]
    pub listeners_per_stream: u32,
    #[serde(default)]
    pub cfg: ModelConfig,
    #[serde(default)]
    pub links: LinkDefaults,
}

/// Contents of a suite file: explicit instances, generated grids, or both.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Suite {
    #[serde(default)]
    pub instances: Vec<NamedInstance>,
    #[serde(default)]
    pub generate: Vec<GeneratedSet>,
}

impl GeneratedSet {
    pub fn expand(&self) -> Result<Vec<NamedInstance>, ModelError> {
        let network = build_topology(self.topology, self.bridges, &self.links)?;
        let mut out = Vec::new();
        for &n in &self.stream_counts {
            for &seed in &self.seeds {
                let spec = StreamSpec {
                    n_streams: n,
                    period_type: self.period_type,
                    payload_type: self.payload_type,
                    deadline_type: self.deadline_type,
                    seed,
                    listeners_per_stream: self.listeners_per_stream,
                };
                let streams = generate_streamset(&spec, &network, &self.cfg)?;
                out.push(NamedInstance {
                    id: format!(
                        "{}-b{}-n{}-{}-{}-{}-s{}",
                        self.topology.name(),
                        self.bridges,
                        n,
                        self.period_type.name(),
                        self.payload_type.name(),
                        self.deadline_type.name(),
                        seed
                    ),
                    instance: Instance {
                        network: network.clone(),
                        streams,
                        cfg: self.cfg,
                    },
                });
            }
        }
        Ok(out)
    }
}

impl Suite {
    /// Explicit instances first, then each generated grid in order.
    pub fn expand(&self) -> Result<Vec<NamedInstance>, ModelError> {
        let mut out = self.instances.clone();
        for g in &self.generate {
            out.extend(g.expand()?);
        }
        Ok(out)
    }
}
