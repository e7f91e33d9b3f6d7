//! Iterative grouping: streams are clustered by their degree of conflict
//! and the clusters are scheduled one after another with the exact no-wait
//! search, earlier clusters frozen as obstacles.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::book::Book;
use super::exact_nw::{place, search, Search};
use super::prep::{build_schedule, prepare, unfragmented, Prepared};
use super::{Budget, EngineError, Infeasible, Instance, Outcome, Unknown};
use crate::model::{frame_split, transmission_duration, LinkId, ModelError, Topology};
use crate::netgen::shortest_route;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupParams {
    /// Streams per cluster before the group-count cap is applied.
    pub group_size: usize,
    /// Upper bound on the number of sequential iterations.
    pub max_groups: usize,
}

impl Default for GroupParams {
    fn default() -> Self {
        GroupParams {
            group_size: 10,
            max_groups: 100,
        }
    }
}

/// Pairwise degree of conflict: links shared by the shortest routes,
/// weighted by the sum of both streams' link utilisation (transmission time
/// per period on the first hop).
pub fn degree_of_conflict(inst: &Instance) -> Result<Vec<Vec<f64>>, ModelError> {
    let topo = Topology::new(&inst.network);
    let mut links: Vec<BTreeSet<LinkId>> = Vec::new();
    let mut util: Vec<f64> = Vec::new();
    for s in &inst.streams {
        let route = shortest_route(&topo, s)?;
        let first = topo
            .link(route.paths[0][0])
            .ok_or(ModelError::UnknownLink(route.paths[0][0]))?;
        let (parts, bytes) = frame_split(s.payload_bytes, inst.cfg.mtu_bytes, 1);
        let tx = transmission_duration(bytes, inst.cfg.header_bytes, first.line_rate_bps).0 * parts as u64;
        util.push(tx as f64 / s.period.0 as f64);
        links.push(route.paths.into_iter().flatten().collect());
    }
    let n = inst.streams.len();
    let mut doc = alloc::vec![alloc::vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let shared = links[i].intersection(&links[j]).count();
                doc[i][j] = shared as f64 * (util[i] + util[j]);
            }
        }
    }
    Ok(doc)
}

/// Agglomerative clustering: repeatedly merge the two clusters with the
/// largest total conflict while the merged size stays within
/// `group_size`; then merge the smallest clusters until at most
/// `max_groups` remain. Clusters are ordered by their tightest deadline.
pub fn group_streams(inst: &Instance, params: &GroupParams) -> Result<Vec<Vec<usize>>, ModelError> {
    let doc = degree_of_conflict(inst)?;
    let mut groups: Vec<Vec<usize>> = (0..inst.streams.len()).map(|i| alloc::vec![i]).collect();
    loop {
        let mut best: Option<(f64, usize, usize)> = None;
        for a in 0..groups.len() {
            for b in a + 1..groups.len() {
                if groups[a].len() + groups[b].len() > params.group_size {
                    continue;
                }
                let w: f64 = groups[a]
                    .iter()
                    .flat_map(|&i| groups[b].iter().map(move |&j| (i, j)))
                    .map(|(i, j)| doc[i][j])
                    .sum();
                if w > 0.0 && best.is_none_or(|(bw, _, _)| w > bw) {
                    best = Some((w, a, b));
                }
            }
        }
        let Some((_, a, b)) = best else { break };
        let moved = groups.remove(b);
        groups[a].extend(moved);
    }
    let max_groups = params.max_groups.max(1);
    while groups.len() > max_groups {
        groups.sort_by_key(|g| g.len());
        let smallest = groups.remove(0);
        groups[0].extend(smallest);
    }
    for g in &mut groups {
        g.sort_by_key(|&i| (inst.streams[i].deadline, inst.streams[i].id));
    }
    groups.sort_by_key(|g| {
        let s = &inst.streams[g[0]];
        (s.deadline, s.id)
    });
    Ok(groups)
}

pub(crate) fn schedule(inst: &Instance, params: &GroupParams, budget: &dyn Budget) -> Result<Outcome, EngineError> {
    let ctx = match prepare(inst, &unfragmented(inst))? {
        Prepared::Ready(ctx) => ctx,
        Prepared::Infeasible(why) => return Ok(Outcome::Unschedulable(why)),
    };
    let groups = group_streams(inst, params)?;
    let mut book = Book::new(ctx.n_links);
    let mut placements = Vec::with_capacity(inst.streams.len());
    for (gi, group) in groups.iter().enumerate() {
        match search(&ctx, group, &mut book, budget) {
            Search::Found(found) => {
                for pl in &found {
                    place(&ctx, &mut book, pl);
                }
                placements.extend(found);
            }
            // nothing frozen yet: the group alone is infeasible
            Search::Exhausted if gi == 0 => return Ok(Outcome::Unschedulable(Infeasible::SearchExhausted)),
            Search::Exhausted => return Ok(Outcome::Unknown(Unknown::HeuristicInfeasible)),
            Search::OutOfBudget => return Ok(Outcome::Unknown(Unknown::BudgetExhausted)),
        }
    }
    Ok(Outcome::Schedulable(build_schedule(&ctx, &placements)))
}
