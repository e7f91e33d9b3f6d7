//! `qbvsched`: generate networks and stream sets, synthesize and validate
//! schedules, export GCLs and run benchmarks.
//!
//! Exit codes: 0 success, 1 when the queried result is a violation or an
//! infeasible/unknown outcome, 2 on usage or IO errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand};
use serde::Serialize;

use qbvsched::bench::{run_benchmark, write_report, BenchConfig, ResultTable, Suite};
use qbvsched::budget::WallClock;
use qbvsched::gcl_files::export_gcls;
use qbvsched::io::{load_instance, read_json, write_json};
use qbvsched_core::engine::{EngineKind, Outcome};
use qbvsched_core::model::{ModelConfig, Network};
use qbvsched_core::netgen::{build_topology, LinkDefaults, TopologyKind};
use qbvsched_core::schedule::Schedule;
use qbvsched_core::streamgen::{generate_streamset, DeadlineType, PayloadType, PeriodType, StreamSpec};
use qbvsched_core::verify::{check_static, simulate, SimReport, Violation};

#[derive(Parser)]
#[command(name = "qbvsched", version, about = "802.1Qbv schedule synthesis toolkit")]
#[command(arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a benchmark topology.
    GenNet {
        #[arg(long, value_parser = parse_with(TopologyKind::parse, "linear, ring, tree, mesh"))]
        kind: TopologyKind,
        #[arg(long)]
        bridges: usize,
        #[arg(long, default_value = "net.json")]
        out: PathBuf,
    },
    /// Draw a stream set over a network's end stations.
    GenStreams {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value = "sparse-harmonic", value_parser = parse_with(PeriodType::parse, "sparse-single, dense-single, sparse-harmonic, dense-harmonic, sparse-inharmonic, dense-inharmonic"))]
        period_type: PeriodType,
        #[arg(long, default_value = "small", value_parser = parse_with(PayloadType::parse, "tiny, small, medium, large, huge"))]
        payload_type: PayloadType,
        #[arg(long, default_value = "normal", value_parser = parse_with(DeadlineType::parse, "implicit, relaxed, normal, strict, no-wait"))]
        deadline_type: DeadlineType,
        #[arg(long, env = "QBVSCHED_SEED", default_value_t = qbvsched_core::streamgen::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        listeners: u32,
        #[arg(long)]
        cfg: Option<PathBuf>,
        #[arg(long, default_value = "streams.json")]
        out: PathBuf,
    },
    /// Run one engine. Without --cfg the engine's own model is used.
    Schedule {
        #[arg(long, value_parser = parse_with(EngineKind::parse, "exact-nw, exact-wa, ls-nw, ls-tb, ls-pl, dt, cg, iter-groups"))]
        engine: EngineKind,
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        streams: PathBuf,
        #[arg(long)]
        cfg: Option<PathBuf>,
        #[arg(long, default_value_t = 10_000)]
        budget_ms: u64,
        #[arg(long, default_value = "schedule.json")]
        out: PathBuf,
    },
    /// Check a schedule statically and by simulation.
    Validate {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        streams: PathBuf,
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long)]
        cfg: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run engines over a suite and write the result table.
    Bench {
        #[arg(long)]
        suite: PathBuf,
        #[arg(long, value_delimiter = ',', value_parser = parse_with(EngineKind::parse, "exact-nw, exact-wa, ls-nw, ls-tb, ls-pl, dt, cg, iter-groups"))]
        engines: Vec<EngineKind>,
        #[arg(long, default_value_t = 10_000)]
        budget_ms: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, default_value = "results.csv")]
        out: PathBuf,
    },
    /// Summarize a result table into SR, SA and rank CSVs.
    Report {
        #[arg(long)]
        results: PathBuf,
        #[arg(long, default_value = "report")]
        out: PathBuf,
    },
    /// Write one GCL text file per egress link.
    ExportGcl {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long, default_value = "gcl")]
        out: PathBuf,
    },
}

fn parse_with<T: Clone + Send + Sync + 'static>(
    f: fn(&str) -> Option<T>,
    expected: &'static str,
) -> impl Fn(&str) -> Result<T, String> + Clone {
    move |s| f(s).ok_or_else(|| format!("expected one of: {expected}"))
}

/// Failure with its exit code.
struct Fail(u8, String);

impl<E: std::fmt::Display> From<E> for Fail {
    fn from(e: E) -> Self {
        Fail(2, e.to_string())
    }
}

#[derive(Serialize)]
struct ValidationReport<'a> {
    delay_reference: &'static str,
    violations: &'a [Violation],
    simulation: &'a SimReport,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail(code, msg)) => {
            if !msg.is_empty() {
                eprintln!("qbvsched: {msg}");
            }
            ExitCode::from(code)
        }
    }
}

fn run(cmd: Cmd) -> Result<(), Fail> {
    match cmd {
        Cmd::GenNet { kind, bridges, out } => {
            let net = build_topology(kind, bridges, &LinkDefaults::default())?;
            write_json(&out, &net)?;
        }
        Cmd::GenStreams {
            net,
            n,
            period_type,
            payload_type,
            deadline_type,
            seed,
            listeners,
            cfg,
            out,
        } => {
            let network: Network = read_json(&net)?;
            let cfg = opt_cfg(cfg.as_deref())?.unwrap_or_default();
            let spec = StreamSpec {
                n_streams: n,
                period_type,
                payload_type,
                deadline_type,
                seed,
                listeners_per_stream: listeners,
            };
            write_json(&out, &generate_streamset(&spec, &network, &cfg)?)?;
        }
        Cmd::Schedule {
            engine,
            net,
            streams,
            cfg,
            budget_ms,
            out,
        } => {
            let mut inst = load_instance(&net, &streams, cfg.as_deref())?;
            if cfg.is_none() {
                inst = engine.adapt(&inst);
            }
            let outcome = engine.run(&inst, &WallClock::new(Duration::from_millis(budget_ms)))?;
            match outcome {
                Outcome::Schedulable(s) => {
                    write_json(&out, &s)?;
                    println!("schedulable");
                }
                other => {
                    println!("{} ({})", other.label(), other.reason());
                    return Err(Fail(1, String::new()));
                }
            }
        }
        Cmd::Validate {
            net,
            streams,
            schedule,
            cfg,
            report,
        } => {
            let inst = load_instance(&net, &streams, cfg.as_deref())?;
            let sched: Schedule = read_json(&schedule)?;
            let invalid = |e: qbvsched_core::verify::StructureError| Fail(1, format!("invalid schedule: {e}"));
            let violations = check_static(&sched, &inst).map_err(invalid)?;
            let sim = simulate(&sched, &inst).map_err(invalid)?;
            if let Some(path) = report {
                let r = ValidationReport {
                    delay_reference: "delays are measured from the first bit leaving the talker",
                    violations: &violations,
                    simulation: &sim,
                };
                write_json(&path, &r)?;
            }
            let all: Vec<&Violation> = violations.iter().chain(&sim.violations).collect();
            for v in &all {
                println!("{}: {}", v.kind.name(), v.detail);
            }
            if !all.is_empty() {
                return Err(Fail(1, format!("{} violations", all.len())));
            }
            println!("ok");
        }
        Cmd::Bench {
            suite,
            engines,
            budget_ms,
            jobs,
            out,
        } => {
            let suite: Suite = read_json(&suite)?;
            let instances = suite.expand()?;
            let cfg = BenchConfig {
                engines: if engines.is_empty() {
                    EngineKind::ALL.to_vec()
                } else {
                    engines
                },
                budget: Duration::from_millis(budget_ms),
                jobs,
            };
            run_benchmark(&instances, &cfg)?.write_csv(&out)?;
        }
        Cmd::Report { results, out } => {
            let table = ResultTable::read_csv(&results)?;
            for p in write_report(&table, &out)? {
                println!("{}", p.display());
            }
        }
        Cmd::ExportGcl { net, schedule, out } => {
            let network: Network = read_json(&net)?;
            let sched: Schedule = read_json(&schedule)?;
            for p in export_gcls(&sched, &network, &out)? {
                println!("{}", p.display());
            }
        }
    }
    Ok(())
}

fn opt_cfg(path: Option<&Path>) -> Result<Option<ModelConfig>, Fail> {
    Ok(match path {
        Some(p) => Some(read_json(p)?),
        None => None,
    })
}
