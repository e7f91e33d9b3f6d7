//! Under no-wait every frame arrives exactly after the route's no-wait
//! bound: no queuing, no jitter.

use proptest::prelude::*;
use qbvsched_core::engine::{EngineKind, Instance, NodeBudget};
use qbvsched_core::model::{no_wait_bound, ModelConfig};
use qbvsched_core::netgen::{build_topology, LinkDefaults, TopologyKind};
use qbvsched_core::streamgen::{generate_streamset, DeadlineType, PayloadType, PeriodType, StreamSpec};
use qbvsched_core::verify::simulate;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn simulated_delay_is_the_no_wait_bound(
        kind in prop::sample::select(TopologyKind::ALL.to_vec()),
        n in 1u32..10,
        period_type in prop::sample::select(PeriodType::ALL),
        payload_type in prop::sample::select(PayloadType::ALL),
        seed in any::<u64>(),
        engine in prop::sample::select(vec![EngineKind::ExactNw, EngineKind::LsNw, EngineKind::Cg]),
    ) {
        let network = build_topology(kind, 6, &LinkDefaults::default()).unwrap();
        let spec = StreamSpec {
            n_streams: n,
            period_type,
            payload_type,
            deadline_type: DeadlineType::Relaxed,
            seed,
            listeners_per_stream: 1,
        };
        let base = Instance {
            streams: generate_streamset(&spec, &network, &ModelConfig::default()).unwrap(),
            network,
            cfg: ModelConfig::default(),
        };
        let inst = engine.adapt(&base);
        let outcome = engine.run(&inst, &NodeBudget::new(20_000)).unwrap();
        if let Some(s) = outcome.schedule() {
            let report = simulate(s, &inst).unwrap();
            prop_assert!(report.is_clean(), "{:?}", report.violations);
            for st in &inst.streams {
                let route = &s.plan(st.id).unwrap().route;
                let bound = no_wait_bound(st, route, &inst.network, &inst.cfg).unwrap();
                let stats = report.streams.iter().find(|x| x.stream == st.id).unwrap();
                prop_assert_eq!(stats.min_delay, bound);
                prop_assert_eq!(stats.max_delay, bound);
                prop_assert_eq!(stats.jitter.0, 0);
            }
        }
    }
}
