//! Every schedule an engine emits must pass the static checker and replay
//! cleanly in the simulator.

use proptest::prelude::*;
use qbvsched_core::engine::{EngineKind, Instance, NodeBudget, Outcome};
use qbvsched_core::model::{ModelConfig, WaitMode};
use qbvsched_core::netgen::{build_topology, LinkDefaults, TopologyKind};
use qbvsched_core::streamgen::{generate_streamset, DeadlineType, PayloadType, PeriodType, StreamSpec};
use qbvsched_core::verify::{check_static, simulate};

fn instance(kind: TopologyKind, bridges: usize, spec: StreamSpec) -> Instance {
    let network = build_topology(kind, bridges, &LinkDefaults::default()).unwrap();
    let cfg = ModelConfig::default();
    let streams = generate_streamset(&spec, &network, &cfg).unwrap();
    Instance { network, streams, cfg }
}

fn assert_sound(base: &Instance, engine: EngineKind) -> Result<(), TestCaseError> {
    let inst = engine.adapt(base);
    let outcome = engine.run(&inst, &NodeBudget::new(20_000)).unwrap();
    if let Outcome::Schedulable(s) = outcome {
        let v = check_static(&s, &inst).unwrap();
        prop_assert!(v.is_empty(), "{engine}: {v:?}");
        let r = simulate(&s, &inst).unwrap();
        prop_assert!(r.is_clean(), "{engine}: {:?}", r.violations);
        for st in &r.streams {
            let d = inst.streams.iter().find(|x| x.id == st.stream).unwrap().deadline;
            prop_assert!(st.max_delay <= d);
            if inst.cfg.wait_mode == WaitMode::NoWait {
                prop_assert_eq!(st.jitter.0, 0);
            }
        }
    }
    Ok(())
}

fn spec_strategy() -> impl Strategy<Value = StreamSpec> {
    (
        1u32..8,
        prop::sample::select(PeriodType::ALL),
        prop::sample::select(PayloadType::ALL),
        prop::sample::select(DeadlineType::ALL),
        any::<u64>(),
    )
        .prop_map(|(n, period_type, payload_type, deadline_type, seed)| StreamSpec {
            n_streams: n,
            period_type,
            payload_type,
            deadline_type,
            seed,
            listeners_per_stream: 1,
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn engines_emit_verifiable_schedules(
        kind in prop::sample::select(TopologyKind::ALL.to_vec()),
        bridges in 3usize..7,
        spec in spec_strategy(),
    ) {
        let base = instance(kind, bridges, spec);
        for engine in EngineKind::ALL {
            assert_sound(&base, engine)?;
        }
    }

    #[test]
    fn multicast_trees_verify(seed in any::<u64>(), listeners in 2u32..4) {
        let spec = StreamSpec {
            n_streams: 4,
            period_type: PeriodType::SparseHarmonic,
            payload_type: PayloadType::Small,
            deadline_type: DeadlineType::Relaxed,
            seed,
            listeners_per_stream: listeners,
        };
        let base = instance(TopologyKind::Ring, 6, spec);
        for engine in [EngineKind::ExactNw, EngineKind::ExactWa, EngineKind::Dt, EngineKind::LsTb] {
            assert_sound(&base, engine)?;
        }
    }
}
