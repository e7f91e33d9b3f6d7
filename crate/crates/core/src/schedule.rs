//! Schedules, Gate Control List derivation and per-schedule quality metrics.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Link, LinkId, Network, Route, StreamId, MAX_QUEUES};
use crate::time::TimeNs;

/// One transmission of one frame on one link within the cycle.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TxWindow {
    pub link: LinkId,
    pub queue: u8,
    /// Phase within the cycle.
    pub start: TimeNs,
    pub duration: TimeNs,
    pub stream: StreamId,
    /// Instance index within the cycle, `0..cycle / period`.
    pub instance: u32,
    pub fragment: u32,
}

impl TxWindow {
    pub fn end(&self) -> TimeNs {
        self.start + self.duration
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamPlan {
    pub stream: StreamId,
    pub route: Route,
    /// Release offset of instance 0; instance `k` is released at
    /// `release + k * period`.
    pub release: TimeNs,
    /// Frames per instance.
    pub fragments: u32,
    /// Payload bytes carried by each frame.
    pub fragment_bytes: u32,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub cycle: TimeNs,
    pub plans: Vec<StreamPlan>,
    pub windows: Vec<TxWindow>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GclEntry {
    pub duration: TimeNs,
    /// Bit `i` set means queue `i` is open.
    pub gate_mask: u8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gcl {
    pub link: LinkId,
    pub entries: Vec<GclEntry>,
}

impl Gcl {
    pub fn cycle(&self) -> TimeNs {
        TimeNs(self.entries.iter().map(|e| e.duration.0).sum())
    }

    /// Text form: one `duration_ns gate_mask` line per entry, the mask as
    /// eight binary digits with queue 0 rightmost.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let _ = writeln!(out, "{} {:08b}", e.duration.0, e.gate_mask);
        }
        out
    }

    /// Inverse of [`Gcl::to_text`]. Blank lines are skipped.
    pub fn from_text(link: LinkId, text: &str) -> Result<Gcl, GclTextError> {
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let bad = |why| GclTextError { line: i + 1, why };
            let mut parts = line.split_whitespace();
            let (Some(d), Some(m), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(bad("expected `duration_ns gate_mask`"));
            };
            let duration = d.parse::<u64>().map_err(|_| bad("duration is not an integer"))?;
            if m.len() != 8 || !m.bytes().all(|b| b == b'0' || b == b'1') {
                return Err(bad("gate mask must be eight binary digits"));
            }
            let gate_mask = u8::from_str_radix(m, 2).map_err(|_| bad("gate mask"))?;
            entries.push(GclEntry {
                duration: TimeNs(duration),
                gate_mask,
            });
        }
        if entries.is_empty() {
            return Err(GclTextError {
                line: 0,
                why: "no entries",
            });
        }
        Ok(Gcl { link, entries })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("GCL line {line}: {why}")]
pub struct GclTextError {
    pub line: usize,
    pub why: &'static str,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleError {
    #[error("schedule cycle must be positive")]
    EmptyCycle,
    #[error("window on {link} at {start} leaves the cycle or has zero length")]
    WindowOutOfCycle { link: LinkId, start: TimeNs },
    #[error("queue {queue} on {link} cannot be expressed in a gate mask")]
    QueueOutOfRange { link: LinkId, queue: u8 },
    #[error("windows of queue {queue} overlap on {link} at {at}")]
    SameQueueOverlap { link: LinkId, queue: u8, at: TimeNs },
}

impl Schedule {
    pub fn windows_on(&self, link: LinkId) -> impl Iterator<Item = &TxWindow> + '_ {
        self.windows.iter().filter(move |w| w.link == link)
    }

    pub fn plan(&self, stream: StreamId) -> Option<&StreamPlan> {
        self.plans.iter().find(|p| p.stream == stream)
    }

    /// Windows grouped by link, each group sorted by start.
    pub fn windows_by_link(&self) -> BTreeMap<LinkId, Vec<&TxWindow>> {
        let mut map: BTreeMap<LinkId, Vec<&TxWindow>> = BTreeMap::new();
        for w in &self.windows {
            map.entry(w.link).or_default().push(w);
        }
        for v in map.values_mut() {
            v.sort_by_key(|w| (w.start, w.queue));
        }
        map
    }
}

/// Gate Control List of one egress link: queue `q` is open exactly during
/// the union of `q`'s windows, adjacent equal states are merged.
pub fn derive_gcl(schedule: &Schedule, link: &Link) -> Result<Gcl, ScheduleError> {
    let cycle = schedule.cycle;
    if cycle.0 == 0 {
        return Err(ScheduleError::EmptyCycle);
    }
    let mut windows: Vec<&TxWindow> = schedule.windows_on(link.id).collect();
    windows.sort_by_key(|w| (w.queue, w.start));
    for w in &windows {
        if w.duration.0 == 0 || w.end() > cycle {
            return Err(ScheduleError::WindowOutOfCycle {
                link: link.id,
                start: w.start,
            });
        }
        if w.queue >= MAX_QUEUES {
            return Err(ScheduleError::QueueOutOfRange {
                link: link.id,
                queue: w.queue,
            });
        }
    }
    for pair in windows.windows(2) {
        if pair[0].queue == pair[1].queue && pair[1].start < pair[0].end() {
            return Err(ScheduleError::SameQueueOverlap {
                link: link.id,
                queue: pair[0].queue,
                at: pair[1].start,
            });
        }
    }
    let mut cuts: BTreeSet<TimeNs> = BTreeSet::from([TimeNs::ZERO, cycle]);
    for w in &windows {
        cuts.insert(w.start);
        cuts.insert(w.end());
    }
    // +1 at start, -1 at end, per queue
    let mut open = [0i32; MAX_QUEUES as usize];
    let mut events: BTreeMap<TimeNs, Vec<(u8, i32)>> = BTreeMap::new();
    for w in &windows {
        events.entry(w.start).or_default().push((w.queue, 1));
        events.entry(w.end()).or_default().push((w.queue, -1));
    }
    let cuts: Vec<TimeNs> = cuts.into_iter().collect();
    let mut entries: Vec<GclEntry> = Vec::new();
    for seg in cuts.windows(2) {
        if let Some(evs) = events.get(&seg[0]) {
            for &(q, delta) in evs {
                open[q as usize] += delta;
            }
        }
        let mask = open
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .fold(0u8, |m, (q, _)| m | (1 << q));
        let duration = seg[1] - seg[0];
        match entries.last_mut() {
            Some(last) if last.gate_mask == mask => last.duration += duration,
            _ => entries.push(GclEntry {
                duration,
                gate_mask: mask,
            }),
        }
    }
    Ok(Gcl { link: link.id, entries })
}

/// GCLs of every link of the network, in link order.
pub fn derive_all_gcls(schedule: &Schedule, network: &Network) -> Result<Vec<Gcl>, ScheduleError> {
    network.links.iter().map(|l| derive_gcl(schedule, l)).collect()
}

/// Longest GCL over all links; links without windows count one entry.
pub fn max_gcl_length(schedule: &Schedule, network: &Network) -> Result<usize, ScheduleError> {
    let mut best = 1;
    for l in &network.links {
        best = best.max(derive_gcl(schedule, l)?.entries.len());
    }
    Ok(best)
}

/// Largest fraction of the cycle any link spends in transmission windows.
pub fn link_utilization(schedule: &Schedule) -> f64 {
    if schedule.cycle.0 == 0 {
        return 0.0;
    }
    let mut busy: BTreeMap<LinkId, u64> = BTreeMap::new();
    for w in &schedule.windows {
        *busy.entry(w.link).or_default() += w.duration.0;
    }
    busy.values()
        .map(|&b| b as f64 / schedule.cycle.0 as f64)
        .fold(0.0, f64::max)
}

/// Largest number of distinct queues used on one link.
pub fn queue_utilization(schedule: &Schedule) -> usize {
    let mut used: BTreeMap<LinkId, BTreeSet<u8>> = BTreeMap::new();
    for w in &schedule.windows {
        used.entry(w.link).or_default().insert(w.queue);
    }
    used.values().map(BTreeSet::len).max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DeviceId;
    use alloc::vec;

    fn link() -> Link {
        Link {
            id: LinkId(0),
            src: DeviceId(0),
            dst: DeviceId(1),
            propagation_delay: TimeNs::ZERO,
            processing_delay: TimeNs::ZERO,
            line_rate_bps: 1_000_000_000,
            num_queues: 8,
            max_gcl_len: 1024,
        }
    }

    fn win(start: u64, dur: u64, queue: u8) -> TxWindow {
        TxWindow {
            link: LinkId(0),
            queue,
            start: TimeNs(start),
            duration: TimeNs(dur),
            stream: StreamId(0),
            instance: 0,
            fragment: 0,
        }
    }

    fn sched(windows: Vec<TxWindow>) -> Schedule {
        Schedule {
            cycle: TimeNs::from_us(100),
            plans: vec![],
            windows,
        }
    }

    #[test]
    fn empty_link_is_one_closed_entry() {
        let g = derive_gcl(&sched(vec![]), &link()).unwrap();
        assert_eq!(
            g.entries,
            vec![GclEntry {
                duration: TimeNs::from_us(100),
                gate_mask: 0
            }]
        );
    }

    #[test]
    fn single_window_three_entries() {
        let s = sched(vec![win(10_000, 10_000, 0)]);
        let g = derive_gcl(&s, &link()).unwrap();
        let got: Vec<_> = g.entries.iter().map(|e| (e.duration.0, e.gate_mask)).collect();
        assert_eq!(got, vec![(10_000, 0), (10_000, 1), (80_000, 0)]);
        let net = Network {
            devices: vec![],
            links: vec![
                link(),
                Link {
                    id: LinkId(1),
                    ..link()
                },
            ],
            sync_error: TimeNs::ZERO,
        };
        assert_eq!(max_gcl_length(&s, &net).unwrap(), 3);
    }

    #[test]
    fn abutting_windows_merge() {
        let s = sched(vec![win(0, 5_000, 2), win(5_000, 5_000, 2)]);
        let g = derive_gcl(&s, &link()).unwrap();
        assert_eq!(g.entries.len(), 2);
        assert_eq!(g.entries[0].gate_mask, 0b100);
        assert_eq!(g.entries[0].duration, TimeNs(10_000));
        assert_eq!(g.cycle(), TimeNs::from_us(100));
    }

    #[test]
    fn same_queue_overlap_rejected() {
        let s = sched(vec![win(0, 5_000, 1), win(4_000, 5_000, 1)]);
        assert!(matches!(
            derive_gcl(&s, &link()),
            Err(ScheduleError::SameQueueOverlap { queue: 1, .. })
        ));
        let s = sched(vec![win(99_000, 5_000, 1)]);
        assert!(matches!(
            derive_gcl(&s, &link()),
            Err(ScheduleError::WindowOutOfCycle { .. })
        ));
    }

    #[test]
    fn utilization_metrics() {
        assert_eq!(link_utilization(&sched(vec![])), 0.0);
        assert_eq!(queue_utilization(&sched(vec![])), 0);
        let s = Schedule {
            cycle: TimeNs::from_ms(1),
            plans: vec![],
            windows: vec![win(0, 200_000, 0)],
        };
        assert!((link_utilization(&s) - 0.2).abs() < 1e-12);
        let full = sched(vec![win(0, 100_000, 0)]);
        assert_eq!(link_utilization(&full), 1.0);
        let g = derive_gcl(&full, &link()).unwrap();
        assert_eq!(g.entries.len(), 1);
        let nine: Vec<_> = (0..9).map(|q| win(q as u64 * 1000, 1000, q)).collect();
        assert_eq!(queue_utilization(&sched(nine)), 9);
    }

    #[test]
    fn text_round_trip() {
        let s = sched(vec![win(10_000, 10_000, 0), win(30_000, 5_000, 7)]);
        let g = derive_gcl(&s, &link()).unwrap();
        let text = g.to_text();
        assert_eq!(
            text,
            "10000 00000000\n10000 00000001\n10000 00000000\n5000 10000000\n65000 00000000\n"
        );
        assert_eq!(Gcl::from_text(LinkId(0), &text).unwrap(), g);
    }

    #[test]
    fn text_rejects_malformed_lines() {
        for bad in ["", "10 1", "10 000000001", "x 00000000", "10 00000000 3", "10 0000000a"] {
            assert!(Gcl::from_text(LinkId(0), bad).is_err(), "{bad:?}");
        }
    }
}
