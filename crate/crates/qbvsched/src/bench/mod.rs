//! Benchmark runner and the schedulability and quality statistics.
//!
//! Every (instance, engine) pair runs on the engine's native model (see
//! [`EngineKind::adapt`]) under a wall-clock budget. Schedulable results are
//! re-verified before they are recorded; a schedule that fails verification
//! aborts the run.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use qbvsched_core::engine::{Budget, EngineError, EngineKind, Instance, Outcome, Unknown};
use qbvsched_core::model::ModelError;
use qbvsched_core::verify::{check_static, measure_quality, simulate, QualityMetrics};

use crate::budget::WallClock;
use crate::io::IoError;

mod stats;
mod suite;

pub use stats::{quality_rank, schedulability_advantage, schedulable_ratio, write_report, Metric, RankHistogram};
pub use suite::{GeneratedSet, NamedInstance, Suite};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutcomeKind {
    Schedulable,
    Unschedulable,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub instance_id: String,
    pub engine: EngineKind,
    pub outcome: OutcomeKind,
    /// Why the run is not schedulable, empty otherwise.
    pub reason: String,
    pub runtime_ms: f64,
    /// Present exactly on schedulable rows.
    pub quality: Option<QualityMetrics>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("empty benchmark suite")]
    EmptySuite,
    #[error("instance {id}: {source}")]
    InvalidInstance { id: String, source: ModelError },
    #[error("{engine} produced a schedule for {instance} that fails verification: {detail}")]
    Verification {
        instance: String,
        engine: EngineKind,
        detail: String,
    },
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("{path}: {source}")]
    Csv { path: String, source: csv::Error },
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub engines: Vec<EngineKind>,
    pub budget: Duration,
    pub jobs: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            engines: EngineKind::ALL.to_vec(),
            budget: Duration::from_secs(10),
            jobs: 1,
        }
    }
}

/// Signature of a scheduler as the runner sees it.
pub type Solver = dyn Fn(EngineKind, &Instance, &dyn Budget) -> Result<Outcome, EngineError> + Sync;

pub fn run_benchmark(suite: &[NamedInstance], cfg: &BenchConfig) -> Result<ResultTable, BenchError> {
    run_benchmark_with(suite, cfg, &|engine, inst, budget| engine.run(inst, budget))
}

/// [`run_benchmark`] with a substitute scheduler.
pub fn run_benchmark_with(
    suite: &[NamedInstance],
    cfg: &BenchConfig,
    solve: &Solver,
) -> Result<ResultTable, BenchError> {
    if suite.is_empty() {
        return Err(BenchError::EmptySuite);
    }
    for ni in suite {
        ni.instance.validate().map_err(|source| BenchError::InvalidInstance {
            id: ni.id.clone(),
            source,
        })?;
    }
    let tasks: Vec<(usize, EngineKind)> = (0..suite.len())
        .flat_map(|i| cfg.engines.iter().map(move |&e| (i, e)))
        .collect();
    let next = AtomicUsize::new(0);
    let stop = AtomicBool::new(false);
    let results: Mutex<Vec<Option<Result<ResultRow, BenchError>>>> =
        Mutex::new((0..tasks.len()).map(|_| None).collect());
    thread::scope(|scope| {
        for _ in 0..cfg.jobs.clamp(1, tasks.len()) {
            scope.spawn(|| loop {
                let t = next.fetch_add(1, Ordering::Relaxed);
                if t >= tasks.len() || stop.load(Ordering::Relaxed) {
                    break;
                }
                let (i, engine) = tasks[t];
                let row = run_one(&suite[i], engine, cfg.budget, solve);
                if row.is_err() {
                    stop.store(true, Ordering::Relaxed);
                }
                results.lock().unwrap()[t] = Some(row);
            });
        }
    });
    let mut rows = Vec::with_capacity(tasks.len());
    for r in results.into_inner().unwrap() {
        match r {
            Some(row) => rows.push(row?),
            None => continue,
        }
    }
    Ok(ResultTable { rows })
}

fn run_one(ni: &NamedInstance, engine: EngineKind, budget: Duration, solve: &Solver) -> Result<ResultRow, BenchError> {
    let inst = engine.adapt(&ni.instance);
    let started = Instant::now();
    let clock = WallClock::new(budget);
    let outcome = match catch_unwind(AssertUnwindSafe(|| solve(engine, &inst, &clock))) {
        Ok(Ok(o)) => o,
        Ok(Err(EngineError::Precondition { .. })) => Outcome::Unknown(Unknown::Unsupported),
        Ok(Err(EngineError::Model(source))) => {
            return Err(BenchError::InvalidInstance {
                id: ni.id.clone(),
                source,
            })
        }
        Err(_) => Outcome::Unknown(Unknown::Crash),
    };
    let runtime_ms = started.elapsed().as_secs_f64() * 1e3;
    let fail = |detail: String| BenchError::Verification {
        instance: ni.id.clone(),
        engine,
        detail,
    };
    let quality = match &outcome {
        Outcome::Schedulable(s) => {
            let v = check_static(s, &inst).map_err(|e| fail(e.to_string()))?;
            if let Some(first) = v.first() {
                return Err(fail(format!("{} ({} violations)", first.detail, v.len())));
            }
            let report = simulate(s, &inst).map_err(|e| fail(e.to_string()))?;
            if let Some(first) = report.violations.first() {
                return Err(fail(format!("simulation: {}", first.detail)));
            }
            Some(measure_quality(s, &inst, &report).map_err(|e| fail(e.to_string()))?)
        }
        _ => None,
    };
    Ok(ResultRow {
        instance_id: ni.id.clone(),
        engine,
        outcome: match outcome {
            Outcome::Schedulable(_) => OutcomeKind::Schedulable,
            Outcome::Unschedulable(_) => OutcomeKind::Unschedulable,
            Outcome::Unknown(_) => OutcomeKind::Unknown,
        },
        reason: outcome.reason().to_string(),
        runtime_ms,
        quality,
    })
}

/// Flat CSV record; quality columns are empty on rows without a schedule.
#[derive(Serialize, Deserialize)]
struct CsvRow {
    instance_id: String,
    engine: EngineKind,
    outcome: OutcomeKind,
    reason: String,
    runtime_ms: f64,
    max_gcl_len: Option<usize>,
    link_util: Option<f64>,
    queue_util: Option<usize>,
    mean_delay_ns: Option<f64>,
    mean_jitter_ns: Option<f64>,
}

impl ResultTable {
    pub fn rows_for(&self, engine: EngineKind) -> impl Iterator<Item = &ResultRow> + '_ {
        self.rows.iter().filter(move |r| r.engine == engine)
    }

    /// Engines in order of first appearance.
    pub fn engines(&self) -> Vec<EngineKind> {
        let mut out: Vec<EngineKind> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.engine) {
                out.push(r.engine);
            }
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), BenchError> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|e| IoError::file(dir, e))?;
        }
        let csv_err = |source| BenchError::Csv {
            path: path.display().to_string(),
            source,
        };
        let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
        for r in &self.rows {
            let q = r.quality.as_ref();
            w.serialize(CsvRow {
                instance_id: r.instance_id.clone(),
                engine: r.engine,
                outcome: r.outcome,
                reason: r.reason.clone(),
                runtime_ms: r.runtime_ms,
                max_gcl_len: q.map(|q| q.max_gcl_len),
                link_util: q.map(|q| q.link_utilization),
                queue_util: q.map(|q| q.queue_utilization),
                mean_delay_ns: q.map(|q| q.mean_delay_ns),
                mean_jitter_ns: q.map(|q| q.mean_jitter_ns),
            })
            .map_err(csv_err)?;
        }
        w.flush().map_err(|e| BenchError::Csv {
            path: path.display().to_string(),
            source: e.into(),
        })
    }

    pub fn read_csv(path: &Path) -> Result<ResultTable, BenchError> {
        let csv_err = |source| BenchError::Csv {
            path: path.display().to_string(),
            source,
        };
        let mut rd = csv::Reader::from_path(path).map_err(csv_err)?;
        let mut rows = Vec::new();
        for rec in rd.deserialize::<CsvRow>() {
            let r = rec.map_err(csv_err)?;
            let quality = match (
                r.max_gcl_len,
                r.link_util,
                r.queue_util,
                r.mean_delay_ns,
                r.mean_jitter_ns,
            ) {
                (Some(g), Some(l), Some(q), Some(d), Some(j)) => Some(QualityMetrics {
                    max_gcl_len: g,
                    link_utilization: l,
                    queue_utilization: q,
                    mean_delay_ns: d,
                    mean_jitter_ns: j,
                }),
                _ => None,
            };
            rows.push(ResultRow {
                instance_id: r.instance_id,
                engine: r.engine,
                outcome: r.outcome,
                reason: r.reason,
                runtime_ms: r.runtime_ms,
                quality,
            });
        }
        Ok(ResultTable { rows })
    }
}
