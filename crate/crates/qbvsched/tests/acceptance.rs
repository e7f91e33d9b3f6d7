//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! fails. Thresholds are pinned below.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::oracle::brute_force;
use common::{didactic, merge_instance, overtaking, ring_covering, tiny_instance, wait_dodges_conflict};
use qbvsched::bench::{
    quality_rank, run_benchmark, schedulability_advantage, schedulable_ratio, BenchConfig, GeneratedSet, Metric,
    NamedInstance, OutcomeKind, ResultRow, ResultTable,
};
use qbvsched::budget::WallClock;
use qbvsched::gcl_files::{export_gcls, file_name, import_gcls};
use qbvsched_core::engine::{collides_periodic, EngineKind, Instance, Outcome, Unknown, Unlimited};
use qbvsched_core::model::{no_wait_bound, Fragmentation, Isolation, ModelConfig, WaitMode};
use qbvsched_core::netgen::{build_topology, LinkDefaults, TopologyKind};
use qbvsched_core::schedule::{derive_all_gcls, Gcl};
use qbvsched_core::streamgen::{generate_streamset, DeadlineType, PayloadType, PeriodType, StreamSpec};
use qbvsched_core::time::gcd;
use qbvsched_core::verify::{check_static, simulate, QualityMetrics, ViolationKind};
use qbvsched_core::TimeNs;

const C1_PAIRS: usize = 5000;
const C1_MAX_PERIOD: u64 = 10_000;
const C1_LIMIT: Duration = Duration::from_secs(10);

const C2_INSTANCES: usize = 200;
const C2_BRIDGES: usize = 8;
const C2_STREAMS: std::ops::RangeInclusive<u32> = 5..=20;
const C2_RUN_BUDGET: Duration = Duration::from_millis(100);
const C2_LIMIT: Duration = Duration::from_secs(300);

const C4_INSTANCES: usize = 100;
const C4_MAX_STREAMS: u32 = 3;

const C9_COUNTS: [u32; 4] = [10, 25, 40, 55];
const C9_SEEDS: u64 = 20;
const C9_BUDGET: Duration = Duration::from_secs(10);
const C9_MONOTONE_SHARE: f64 = 0.8;
const C9_LIMIT: Duration = Duration::from_secs(15 * 60);
const C9_ENGINES: [EngineKind; 4] = [
    EngineKind::ExactNw,
    EngineKind::ExactWa,
    EngineKind::LsNw,
    EngineKind::LsTb,
];

const C10_SCHEDULES: usize = 100;

type Verdict = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Verdict);

fn ensure(cond: bool, why: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(why())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {t:.1?}, limit {limit:?}"))
}

/// Sweeps both occurrence sequences over one hyperperiod (plus margin) for
/// an overlap.
fn brute_collides(o1: u64, d1: u64, p1: u64, o2: u64, d2: u64, p2: u64) -> bool {
    if d1 == 0 || d2 == 0 {
        return false;
    }
    let h = (p1 / gcd(p1, p2) * p2) as i64;
    let a: Vec<(i64, i64)> = (0..=h / p1 as i64)
        .map(|m| {
            let s = o1 as i64 + m * p1 as i64;
            (s, s + d1 as i64)
        })
        .collect();
    let b: Vec<(i64, i64)> = (-1..=h / p2 as i64 + 1)
        .map(|n| {
            let s = o2 as i64 + n * p2 as i64;
            (s, s + d2 as i64)
        })
        .collect();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i].0 < b[j].1 && b[j].0 < a[i].1 {
            return true;
        }
        if a[i].1 <= b[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    false
}

fn c1_collision_test() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut hits = 0;
    for k in 0..C1_PAIRS {
        // odd pairs share a large factor, which keeps both outcomes common;
        // even pairs have unrelated periods and long hyperperiods
        let g = if k % 2 == 0 {
            1
        } else {
            rng.gen_range(1..=C1_MAX_PERIOD / 4)
        };
        let mut draw = || {
            let p = g * rng.gen_range(1..=C1_MAX_PERIOD / g);
            let d = if g == 1 || rng.gen_bool(0.25) {
                rng.gen_range(0..=p)
            } else {
                rng.gen_range(0..=g / 2)
            };
            (rng.gen_range(0..p), d, p)
        };
        let (o1, d1, p1) = draw();
        let (o2, d2, p2) = draw();
        let fast = collides_periodic(TimeNs(o1), TimeNs(d1), TimeNs(p1), TimeNs(o2), TimeNs(d2), TimeNs(p2));
        let slow = brute_collides(o1, d1, p1, o2, d2, p2);
        ensure(fast == slow, || {
            format!("pair {k}: ({o1},{d1},{p1}) vs ({o2},{d2},{p2}): {fast} != {slow}")
        })?;
        hits += slow as usize;
    }
    within(start, C1_LIMIT)?;
    Ok(format!("{C1_PAIRS} pairs agree, {hits} colliding"))
}

fn c2_instance(i: usize) -> Instance {
    let kind = TopologyKind::ALL[i % 4];
    let network = build_topology(kind, C2_BRIDGES, &LinkDefaults::default()).unwrap();
    let span = C2_STREAMS.end() - C2_STREAMS.start() + 1;
    let spec = StreamSpec {
        n_streams: C2_STREAMS.start() + (i as u32 * 7) % span,
        period_type: PeriodType::ALL[i % PeriodType::ALL.len()],
        payload_type: PayloadType::ALL[(i / 2) % PayloadType::ALL.len()],
        deadline_type: DeadlineType::ALL[(i / 3) % DeadlineType::ALL.len()],
        seed: i as u64,
        listeners_per_stream: 1,
    };
    let cfg = ModelConfig::default();
    Instance {
        streams: generate_streamset(&spec, &network, &cfg).unwrap(),
        network,
        cfg,
    }
}

/// Criteria 2 and 3 share the sweep: soundness of every schedule and the
/// no-wait delay identity on the no-wait ones.
fn c2_c3_sweep() -> (Verdict, Verdict) {
    let start = Instant::now();
    let mut schedulable = 0;
    let mut nw_streams = 0;
    let mut soundness: Result<(), String> = Ok(());
    let mut identity: Result<(), String> = Ok(());
    'outer: for i in 0..C2_INSTANCES {
        let base = c2_instance(i);
        for engine in EngineKind::ALL {
            let inst = engine.adapt(&base);
            let outcome = match engine.run(&inst, &WallClock::new(C2_RUN_BUDGET)) {
                Ok(o) => o,
                Err(e) => {
                    soundness = Err(format!("instance {i}, {engine}: {e}"));
                    break 'outer;
                }
            };
            let Outcome::Schedulable(s) = outcome else { continue };
            schedulable += 1;
            let v = check_static(&s, &inst).map_err(|e| e.to_string()).and_then(|v| {
                let r = simulate(&s, &inst).map_err(|e| e.to_string())?;
                Ok((v, r))
            });
            let (v, report) = match v {
                Ok(x) => x,
                Err(e) => {
                    soundness = Err(format!("instance {i}, {engine}: {e}"));
                    break 'outer;
                }
            };
            if let Some(first) = v.first().or(report.violations.first()) {
                soundness = Err(format!(
                    "instance {i}, {engine}: {} {}",
                    first.kind.name(),
                    first.detail
                ));
                break 'outer;
            }
            if inst.cfg.wait_mode != WaitMode::NoWait || identity.is_err() {
                continue;
            }
            for st in &inst.streams {
                let bound = no_wait_bound(st, &s.plan(st.id).unwrap().route, &inst.network, &inst.cfg).unwrap();
                let stats = report.streams.iter().find(|x| x.stream == st.id).unwrap();
                nw_streams += 1;
                if stats.min_delay != bound || stats.max_delay != bound || stats.jitter.0 != 0 {
                    identity = Err(format!(
                        "instance {i}, {engine}, stream {}: delay {:?}..{:?} vs bound {bound:?}",
                        st.id.0, stats.min_delay, stats.max_delay
                    ));
                }
            }
        }
    }
    let c2 = soundness.and_then(|()| within(start, C2_LIMIT)).and_then(|()| {
        ensure(schedulable > 0, || "no engine produced a schedule".into())?;
        Ok(format!(
            "{C2_INSTANCES} instances, {schedulable} schedules verified clean"
        ))
    });
    let c3 = identity.and_then(|()| {
        ensure(nw_streams > 0, || "no no-wait schedule to check".into())?;
        Ok(format!("{nw_streams} no-wait stream delays equal the bound, jitter 0"))
    });
    (c2, c3)
}

fn c4_exactness() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut suite: Vec<NamedInstance> = (0..C4_INSTANCES)
        .map(|k| NamedInstance {
            id: format!("tiny-{k}"),
            instance: tiny_instance(&mut rng, WaitMode::WaitAllowed, C4_MAX_STREAMS),
        })
        .collect();
    suite.push(NamedInstance {
        id: "wait-dodges-conflict".into(),
        instance: wait_dodges_conflict(),
    });
    let cfg = BenchConfig {
        engines: vec![EngineKind::ExactNw, EngineKind::ExactWa],
        budget: Duration::from_secs(10),
        jobs: 1,
    };
    let table = run_benchmark(&suite, &cfg).map_err(|e| e.to_string())?;
    let mut classes = BTreeMap::new();
    for row in &table.rows {
        let ni = suite.iter().find(|n| n.id == row.instance_id).unwrap();
        let expected = brute_force(&row.engine.adapt(&ni.instance));
        let got = match row.outcome {
            OutcomeKind::Schedulable => true,
            OutcomeKind::Unschedulable => false,
            OutcomeKind::Unknown => return Err(format!("{} on {}: {}", row.engine, row.instance_id, row.reason)),
        };
        ensure(got == expected, || {
            format!(
                "{} on {}: engine says {got}, enumeration {expected}",
                row.engine, row.instance_id
            )
        })?;
        *classes.entry((row.engine, got)).or_insert(0) += 1;
    }
    for e in cfg.engines.iter() {
        ensure(
            classes.contains_key(&(*e, true)) && classes.contains_key(&(*e, false)),
            || format!("{e}: only one outcome class {classes:?}"),
        )?;
    }
    let nw_wa = schedulability_advantage(&table, EngineKind::ExactNw, EngineKind::ExactWa);
    let wa_nw = schedulability_advantage(&table, EngineKind::ExactWa, EngineKind::ExactNw);
    ensure(nw_wa == Some(0.0), || format!("phi(nw, wa) = {nw_wa:?}"))?;
    ensure(wa_nw.is_some_and(|x| x > 0.0), || format!("phi(wa, nw) = {wa_nw:?}"))?;
    Ok(format!(
        "{} runs match enumeration; phi(nw,wa) = 0, phi(wa,nw) = {:.3}",
        table.rows.len(),
        wa_nw.unwrap()
    ))
}

fn c5_fragmentation() -> Verdict {
    let engine = EngineKind::ExactNw;
    let whole = engine.adapt(&didactic(Fragmentation::Off));
    let o = engine.run(&whole, &Unlimited).map_err(|e| e.to_string())?;
    ensure(matches!(o, Outcome::Unschedulable(_)), || {
        format!("unfragmented: {}", o.label())
    })?;
    let split = engine.adapt(&didactic(Fragmentation::MaxFragments(3)));
    let o = engine.run(&split, &Unlimited).map_err(|e| e.to_string())?;
    let s = o.schedule().ok_or_else(|| format!("three fragments: {}", o.label()))?;
    ensure(check_static(s, &split).map_err(|e| e.to_string())?.is_empty(), || {
        "static violations".into()
    })?;
    let r = simulate(s, &split).map_err(|e| e.to_string())?;
    ensure(r.is_clean(), || format!("{:?}", r.violations))?;
    let arrival = r.streams[0].max_delay;
    ensure(arrival == TimeNs::from_us(10), || format!("arrival {arrival:?}"))?;
    Ok("unfragmented infeasible; 3 fragments arrive at 10 us".into())
}

fn c6_queue_semantics() -> Verdict {
    let loose = merge_instance(Isolation::Unrestricted);
    let r = simulate(&overtaking(), &loose).map_err(|e| e.to_string())?;
    ensure(
        r.violations.iter().any(|v| v.kind == ViolationKind::DeadlineMiss),
        || format!("no deadline miss: {:?}", r.violations),
    )?;
    let fifo = merge_instance(Isolation::Fifo);
    let o = EngineKind::ExactWa.run(&fifo, &Unlimited).map_err(|e| e.to_string())?;
    let s = o.schedule().ok_or_else(|| format!("fifo: {}", o.label()))?;
    let v = check_static(s, &fifo).map_err(|e| e.to_string())?;
    let r = simulate(s, &fifo).map_err(|e| e.to_string())?;
    ensure(v.is_empty() && r.is_clean(), || format!("{v:?} {:?}", r.violations))?;
    Ok("overtaking plan misses its deadline; fifo plan replays as planned".into())
}

fn c7_pipelined_precedence() -> Verdict {
    let engine = EngineKind::LsPl;
    let ring = engine.adapt(&ring_covering(TopologyKind::Ring));
    let o = engine.run(&ring, &Unlimited).map_err(|e| e.to_string())?;
    ensure(matches!(o, Outcome::Unknown(Unknown::CyclicDependency)), || {
        format!("ring: {} ({})", o.label(), o.reason())
    })?;
    let line = engine.adapt(&ring_covering(TopologyKind::Linear));
    let o = engine.run(&line, &Unlimited).map_err(|e| e.to_string())?;
    let s = o
        .schedule()
        .ok_or_else(|| format!("line: {} ({})", o.label(), o.reason()))?;
    let v = check_static(s, &line).map_err(|e| e.to_string())?;
    let r = simulate(s, &line).map_err(|e| e.to_string())?;
    ensure(v.is_empty() && r.is_clean(), || format!("{v:?} {:?}", r.violations))?;
    Ok("ring reports cyclic-dependency, line schedules".into())
}

fn row(instance: &str, engine: EngineKind, outcome: OutcomeKind, gcl_len: usize) -> ResultRow {
    ResultRow {
        instance_id: instance.into(),
        engine,
        outcome,
        reason: String::new(),
        runtime_ms: 0.0,
        quality: (outcome == OutcomeKind::Schedulable).then(|| QualityMetrics {
            max_gcl_len: gcl_len,
            ..QualityMetrics::default()
        }),
    }
}

fn c8_statistics() -> Verdict {
    use EngineKind::{Dt as C, ExactNw as A, ExactWa as B};
    use OutcomeKind::{Schedulable as S, Unknown as K, Unschedulable as U};

    let outcomes = [S, S, S, S, S, S, U, U, K, K];
    let sr_table = ResultTable {
        rows: outcomes
            .iter()
            .enumerate()
            .map(|(i, &o)| row(&format!("i{i}"), A, o, 1))
            .collect(),
    };
    let sr = schedulable_ratio(&sr_table, A);
    ensure(sr == Some(0.6), || format!("SR {sr:?}, want 0.6"))?;

    let sa_table = ResultTable {
        rows: vec![
            row("i1", A, S, 1),
            row("i1", B, U, 0),
            row("i2", A, S, 1),
            row("i2", B, S, 1),
            row("i3", A, K, 0),
            row("i3", B, S, 1),
        ],
    };
    let sa = schedulability_advantage(&sa_table, A, B);
    ensure(sa == Some(0.5), || format!("phi(A,B) {sa:?}, want 0.5"))?;
    let self_sa = schedulability_advantage(&sa_table, A, A);
    ensure(self_sa == Some(0.0), || format!("phi(A,A) {self_sa:?}"))?;
    let none = ResultTable {
        rows: vec![row("i1", A, K, 0), row("i1", B, S, 1)],
    };
    let undefined = schedulability_advantage(&none, A, B);
    ensure(undefined.is_none(), || format!("empty denominator gave {undefined:?}"))?;

    let rank_of = |t: &ResultTable, e: EngineKind| -> Vec<usize> {
        quality_rank(t, Metric::MaxGclLen)[&e]
            .iter()
            .flat_map(|(&r, &n)| std::iter::repeat_n(r, n))
            .collect()
    };
    let ranked = ResultTable {
        rows: vec![row("i", A, U, 0), row("i", B, S, 5), row("i", C, S, 7)],
    };
    let got = (rank_of(&ranked, A), rank_of(&ranked, B), rank_of(&ranked, C));
    ensure(got == (vec![], vec![2], vec![3]), || {
        format!("ranks {got:?}, want [], [2], [3]")
    })?;
    let tied = ResultTable {
        rows: vec![row("i", A, S, 4), row("i", B, S, 4), row("i", C, S, 4)],
    };
    ensure([A, B, C].iter().all(|&e| rank_of(&tied, e) == vec![1]), || {
        "ties do not share rank 1".into()
    })?;
    Ok("SR 0.6, phi 1/2, phi(A,A) 0, undefined phi, ranks 2/3 and shared 1".into())
}

fn c9_desk_suite() -> Verdict {
    let start = Instant::now();
    let set = GeneratedSet {
        topology: TopologyKind::Ring,
        bridges: 8,
        stream_counts: C9_COUNTS.to_vec(),
        seeds: (1..=C9_SEEDS).collect(),
        period_type: PeriodType::DenseHarmonic,
        payload_type: PayloadType::Medium,
        deadline_type: DeadlineType::Relaxed,
        listeners_per_stream: 1,
        cfg: ModelConfig::default(),
        links: LinkDefaults::default(),
    };
    let suite = set.expand().map_err(|e| e.to_string())?;
    let cfg = BenchConfig {
        engines: C9_ENGINES.to_vec(),
        budget: C9_BUDGET,
        jobs: std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let table = run_benchmark(&suite, &cfg).map_err(|e| e.to_string())?;
    let count_of = |id: &str| -> u32 {
        id.split("-n")
            .nth(1)
            .unwrap()
            .split('-')
            .next()
            .unwrap()
            .parse()
            .unwrap()
    };
    let sr_at = |engine: EngineKind, n: u32| -> f64 {
        let rows = ResultTable {
            rows: table
                .rows
                .iter()
                .filter(|r| count_of(&r.instance_id) == n)
                .cloned()
                .collect(),
        };
        schedulable_ratio(&rows, engine).unwrap_or(0.0)
    };
    let mut curves = Vec::new();
    for e in C9_ENGINES {
        let sr: Vec<f64> = C9_COUNTS.iter().map(|&n| sr_at(e, n)).collect();
        let down = sr.windows(2).filter(|w| w[1] <= w[0]).count();
        let share = down as f64 / (sr.len() - 1) as f64;
        curves.push(format!("{e} {sr:?}"));
        ensure(share >= C9_MONOTONE_SHARE, || {
            format!("{e} SR {sr:?} non-increasing on {share:.2} of pairs")
        })?;
    }
    let degraded = C9_COUNTS
        .iter()
        .rev()
        .copied()
        .find(|&n| {
            [EngineKind::ExactNw, EngineKind::ExactWa]
                .iter()
                .all(|&e| sr_at(e, n) < 1.0)
        })
        .ok_or_else(|| format!("exact engines never degraded: {}", curves.join("; ")))?;
    for e in [EngineKind::LsTb, EngineKind::LsNw] {
        let sr = sr_at(e, degraded);
        ensure(sr > 0.0, || {
            format!("{e} SR 0 at {degraded} streams: {}", curves.join("; "))
        })?;
    }
    within(start, C9_LIMIT)?;
    Ok(format!(
        "exact engines degraded at {degraded} streams; {}",
        curves.join("; ")
    ))
}

fn c10_gcl_round_trip() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut done = 0;
    let mut entries = 0;
    let mut attempts = 0;
    while done < C10_SCHEDULES {
        attempts += 1;
        ensure(attempts < 20 * C10_SCHEDULES, || {
            format!("only {done} schedules in {attempts} attempts")
        })?;
        let network = build_topology(
            TopologyKind::ALL[rng.gen_range(0..4)],
            rng.gen_range(2..=8),
            &LinkDefaults::default(),
        )
        .unwrap();
        let spec = StreamSpec {
            n_streams: rng.gen_range(1..=12),
            period_type: PeriodType::ALL[rng.gen_range(0..PeriodType::ALL.len())],
            payload_type: PayloadType::ALL[rng.gen_range(0..PayloadType::ALL.len())],
            deadline_type: DeadlineType::Relaxed,
            seed: rng.gen(),
            listeners_per_stream: 1,
        };
        let base = Instance {
            streams: generate_streamset(&spec, &network, &ModelConfig::default()).unwrap(),
            network,
            cfg: ModelConfig::default(),
        };
        let engine = [EngineKind::Dt, EngineKind::LsTb, EngineKind::ExactWa][rng.gen_range(0..3)];
        let inst = engine.adapt(&base);
        let Ok(Outcome::Schedulable(s)) = engine.run(&inst, &WallClock::new(Duration::from_millis(200))) else {
            continue;
        };
        let out = dir.path().join(format!("s{done}"));
        let mut want = derive_all_gcls(&s, &inst.network).map_err(|e| e.to_string())?;
        want.sort_by_key(|g| g.link);
        export_gcls(&s, &inst.network, &out).map_err(|e| e.to_string())?;
        let back = import_gcls(&out).map_err(|e| e.to_string())?;
        ensure(back == want, || format!("schedule {done}: imported lists differ"))?;
        for g in &back {
            let bytes = std::fs::read_to_string(out.join(file_name(g.link))).map_err(|e| e.to_string())?;
            ensure(g.to_text() == bytes, || {
                format!("schedule {done}, link {}: text differs", g.link.0)
            })?;
            ensure(Gcl::from_text(g.link, &bytes).as_ref() == Ok(g), || {
                "re-parse differs".into()
            })?;
            entries += g.entries.len();
        }
        done += 1;
    }
    Ok(format!("{done} schedules, {entries} entries round-trip"))
}

fn main() -> ExitCode {
    let guarded = |f: &dyn Fn() -> Verdict| -> Verdict {
        catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        })
    };
    let mut failed = 0;
    let mut report = |n: u32, name: &str, v: Verdict, t: Duration| {
        let (tag, detail) = match v {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {n:>2}: {tag} {name} [{t:.1?}] {detail}");
    };

    let timed = |f: &dyn Fn() -> Verdict| {
        let s = Instant::now();
        let v = guarded(f);
        (v, s.elapsed())
    };

    // criterion numbers on the command line restrict the run
    let only: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let wanted = |n: u32| only.is_empty() || only.contains(&n);
    let single: [Criterion; 8] = [
        (1, "periodic collision test", c1_collision_test),
        (4, "exact engines against enumeration", c4_exactness),
        (5, "fragmentation", c5_fragmentation),
        (6, "queue semantics", c6_queue_semantics),
        (7, "pipelined precedence", c7_pipelined_precedence),
        (8, "SR, SA and rank", c8_statistics),
        (9, "desk suite SR trend", c9_desk_suite),
        (10, "GCL export/import", c10_gcl_round_trip),
    ];
    if wanted(2) || wanted(3) {
        let s = Instant::now();
        let (c2, c3) = catch_unwind(c2_c3_sweep).unwrap_or_else(|_| (Err("panicked".into()), Err("panicked".into())));
        let t = s.elapsed();
        report(2, "soundness of generated schedules", c2, t);
        report(3, "no-wait delay identity", c3, t);
    }
    for (n, name, f) in single {
        if wanted(n) {
            let (v, t) = timed(&f);
            report(n, name, v, t);
        }
    }

    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
