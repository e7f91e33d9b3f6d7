use serde::{Deserialize, Serialize};

use super::SimReport;
use crate::engine::Instance;
use crate::schedule::{link_utilization, max_gcl_length, queue_utilization, Schedule, ScheduleError};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct QualityMetrics {
    pub max_gcl_len: usize,
    pub link_utilization: f64,
    pub queue_utilization: usize,
    /// Mean over streams of the per-stream mean delay, in ns.
    pub mean_delay_ns: f64,
    /// Mean over streams of the per-stream jitter, in ns.
    pub mean_jitter_ns: f64,
}

pub fn measure_quality(
    schedule: &Schedule,
    inst: &Instance,
    report: &SimReport,
) -> Result<QualityMetrics, ScheduleError> {
    let n = report.streams.len();
    let (delay, jitter) = report
        .streams
        .iter()
        .fold((0.0, 0.0), |(d, j), s| (d + s.mean_delay, j + s.jitter.0 as f64));
    let mean = |x: f64| if n == 0 { 0.0 } else { x / n as f64 };
    Ok(QualityMetrics {
        max_gcl_len: if schedule.cycle.0 == 0 {
            1
        } else {
            max_gcl_length(schedule, &inst.network)?
        },
        link_utilization: link_utilization(schedule),
        queue_utilization: queue_utilization(schedule),
        mean_delay_ns: mean(delay),
        mean_jitter_ns: mean(jitter),
    })
}
