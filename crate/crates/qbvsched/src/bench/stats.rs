//! Schedulable ratio, schedulability advantage and rank distributions.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use qbvsched_core::engine::EngineKind;
use qbvsched_core::verify::QualityMetrics;

use super::{BenchError, OutcomeKind, ResultRow, ResultTable};
use crate::io::IoError;

/// Share of the engine's runs that are schedulable; unknown counts as not
/// schedulable. `None` if the engine has no rows.
pub fn schedulable_ratio(table: &ResultTable, engine: EngineKind) -> Option<f64> {
    let rows: Vec<&ResultRow> = table.rows_for(engine).collect();
    if rows.is_empty() {
        return None;
    }
    let ok = rows.iter().filter(|r| r.outcome == OutcomeKind::Schedulable).count();
    Some(ok as f64 / rows.len() as f64)
}

fn by_instance(table: &ResultTable) -> BTreeMap<&str, Vec<&ResultRow>> {
    let mut m: BTreeMap<&str, Vec<&ResultRow>> = BTreeMap::new();
    for r in &table.rows {
        m.entry(r.instance_id.as_str()).or_default().push(r);
    }
    m
}

/// Φ(a, b): instances where `a` is schedulable and `b` unschedulable, over
/// instances where both are known. `None` when no instance qualifies.
pub fn schedulability_advantage(table: &ResultTable, a: EngineKind, b: EngineKind) -> Option<f64> {
    let (mut wins, mut known) = (0usize, 0usize);
    for rows in by_instance(table).values() {
        let get = |e| rows.iter().find(|r| r.engine == e).map(|r| r.outcome);
        let (Some(oa), Some(ob)) = (get(a), get(b)) else {
            continue;
        };
        if oa == OutcomeKind::Unknown || ob == OutcomeKind::Unknown {
            continue;
        }
        known += 1;
        if oa == OutcomeKind::Schedulable && ob == OutcomeKind::Unschedulable {
            wins += 1;
        }
    }
    (known > 0).then(|| wins as f64 / known as f64)
}

/// Quality metrics that can be ranked; lower is better for all of them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Metric {
    MaxGclLen,
    LinkUtil,
    QueueUtil,
    MeanDelay,
    MeanJitter,
}

impl Metric {
    pub const ALL: [Metric; 5] = [
        Metric::MaxGclLen,
        Metric::LinkUtil,
        Metric::QueueUtil,
        Metric::MeanDelay,
        Metric::MeanJitter,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::MaxGclLen => "max_gcl_len",
            Metric::LinkUtil => "link_util",
            Metric::QueueUtil => "queue_util",
            Metric::MeanDelay => "mean_delay_ns",
            Metric::MeanJitter => "mean_jitter_ns",
        }
    }

    pub fn value(self, q: &QualityMetrics) -> f64 {
        match self {
            Metric::MaxGclLen => q.max_gcl_len as f64,
            Metric::LinkUtil => q.link_utilization,
            Metric::QueueUtil => q.queue_utilization as f64,
            Metric::MeanDelay => q.mean_delay_ns,
            Metric::MeanJitter => q.mean_jitter_ns,
        }
    }
}

/// Per engine: rank value -> number of instances with that rank.
pub type RankHistogram = BTreeMap<EngineKind, BTreeMap<usize, usize>>;

/// Rank of every schedulable run: the number of engines on the instance
/// without a schedule, plus one, plus the number of schedulable engines that
/// did strictly better. Equal values share a rank.
pub fn quality_rank(table: &ResultTable, metric: Metric) -> RankHistogram {
    let mut hist: RankHistogram = table.engines().into_iter().map(|e| (e, BTreeMap::new())).collect();
    for rows in by_instance(table).values() {
        let feasible: Vec<(EngineKind, f64)> = rows
            .iter()
            .filter_map(|r| r.quality.as_ref().map(|q| (r.engine, metric.value(q))))
            .collect();
        let failed = rows.len() - feasible.len();
        for &(e, v) in &feasible {
            let better = feasible.iter().filter(|(_, w)| *w < v).count();
            *hist.entry(e).or_default().entry(failed + 1 + better).or_default() += 1;
        }
    }
    hist
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v}")).unwrap_or_default()
}

/// Writes `sr.csv`, `sa_matrix.csv` and one `rank_<metric>.csv` per metric.
pub fn write_report(table: &ResultTable, dir: &Path) -> Result<Vec<PathBuf>, BenchError> {
    fs::create_dir_all(dir).map_err(|e| IoError::file(dir, e))?;
    let engines = table.engines();
    let mut files = Vec::new();
    let mut put = |name: String, text: String| -> Result<(), BenchError> {
        let path = dir.join(name);
        fs::write(&path, text).map_err(|e| IoError::file(&path, e))?;
        files.push(path);
        Ok(())
    };

    let mut sr = String::from("engine,sr\n");
    for &e in &engines {
        sr += &format!("{},{}\n", e, fmt_opt(schedulable_ratio(table, e)));
    }
    put("sr.csv".into(), sr)?;

    let mut sa = String::from("a\\b");
    for &e in &engines {
        sa += &format!(",{e}");
    }
    sa.push('\n');
    for &a in &engines {
        sa += a.id();
        for &b in &engines {
            sa += &format!(",{}", fmt_opt(schedulability_advantage(table, a, b)));
        }
        sa.push('\n');
    }
    put("sa_matrix.csv".into(), sa)?;

    for m in Metric::ALL {
        let mut text = String::from("engine,rank,count\n");
        for (e, h) in quality_rank(table, m) {
            for (rank, count) in h {
                text += &format!("{e},{rank},{count}\n");
            }
        }
        put(format!("rank_{}.csv", m.name()), text)?;
    }
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;
    use EngineKind::{ExactNw as A, ExactWa as B, LsTb as C};

    fn row(instance: &str, engine: EngineKind, outcome: OutcomeKind, value: f64) -> ResultRow {
        ResultRow {
            instance_id: instance.into(),
            engine,
            outcome,
            reason: String::new(),
            runtime_ms: 0.0,
            quality: (outcome == OutcomeKind::Schedulable).then(|| QualityMetrics {
                max_gcl_len: value as usize,
                ..QualityMetrics::default()
            }),
        }
    }

    use OutcomeKind::{Schedulable as S, Unknown as K, Unschedulable as U};

    #[test]
    fn unknown_runs_count_against_the_ratio() {
        let outcomes = [S, S, S, S, S, S, U, U, K, K];
        let rows = outcomes
            .iter()
            .enumerate()
            .map(|(i, &o)| row(&format!("i{i}"), A, o, 1.0))
            .collect();
        let table = ResultTable { rows };
        assert_eq!(schedulable_ratio(&table, A), Some(0.6));
        assert_eq!(schedulable_ratio(&table, B), None);

        let all_unknown = ResultTable {
            rows: (0..4).map(|i| row(&format!("i{i}"), A, K, 0.0)).collect(),
        };
        assert_eq!(schedulable_ratio(&all_unknown, A), Some(0.0));
    }

    #[test]
    fn advantage_skips_instances_with_an_unknown_side() {
        let table = ResultTable {
            rows: vec![
                row("i1", A, S, 1.0),
                row("i1", B, U, 0.0),
                row("i2", A, S, 1.0),
                row("i2", B, S, 1.0),
                row("i3", A, K, 0.0),
                row("i3", B, S, 1.0),
            ],
        };
        assert_eq!(schedulability_advantage(&table, A, B), Some(0.5));
        assert_eq!(schedulability_advantage(&table, B, A), Some(0.0));
        assert_eq!(schedulability_advantage(&table, A, A), Some(0.0));

        let unknown = ResultTable {
            rows: vec![row("i1", A, K, 0.0), row("i1", B, S, 1.0)],
        };
        assert_eq!(schedulability_advantage(&unknown, A, B), None);
    }

    fn ranks(table: &ResultTable) -> BTreeMap<EngineKind, Vec<usize>> {
        quality_rank(table, Metric::MaxGclLen)
            .into_iter()
            .map(|(e, h)| (e, h.into_iter().flat_map(|(r, n)| std::iter::repeat_n(r, n)).collect()))
            .collect()
    }

    #[test]
    fn failed_engines_push_feasible_ones_down() {
        let table = ResultTable {
            rows: vec![row("i", A, U, 0.0), row("i", B, S, 5.0), row("i", C, S, 7.0)],
        };
        let r = ranks(&table);
        assert_eq!(r[&A], Vec::<usize>::new());
        assert_eq!(r[&B], vec![2]);
        assert_eq!(r[&C], vec![3]);
    }

    #[test]
    fn ties_share_a_rank() {
        let table = ResultTable {
            rows: vec![row("i", A, S, 4.0), row("i", B, S, 4.0), row("i", C, S, 4.0)],
        };
        assert!(ranks(&table).values().all(|r| r == &vec![1]));

        let mixed = ResultTable {
            rows: vec![row("i", A, S, 3.0), row("i", B, S, 3.0), row("i", C, S, 9.0)],
        };
        let r = ranks(&mixed);
        assert_eq!((r[&A][0], r[&B][0], r[&C][0]), (1, 1, 3));
    }

    #[test]
    fn all_infeasible_ranks_nothing() {
        let table = ResultTable {
            rows: vec![row("i", A, U, 0.0), row("i", B, K, 0.0)],
        };
        assert!(ranks(&table).values().all(Vec::is_empty));
    }

    #[test]
    fn report_files_are_written() {
        let dir = tempfile::tempdir().unwrap();
        let table = ResultTable {
            rows: vec![row("i1", A, S, 2.0), row("i1", B, U, 0.0)],
        };
        let files = write_report(&table, dir.path()).unwrap();
        assert_eq!(files.len(), 2 + Metric::ALL.len());
        let sr = fs::read_to_string(dir.path().join("sr.csv")).unwrap();
        assert_eq!(sr, format!("engine,sr\n{A},1\n{B},0\n"));
        let sa = fs::read_to_string(dir.path().join("sa_matrix.csv")).unwrap();
        assert_eq!(sa.lines().nth(1).unwrap(), format!("{},0,1", A.id()));
    }
}
