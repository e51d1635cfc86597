//! Synchronous-round simulation of a full parallel sort on an OHHC network.
//!
//! A run splits the master array into `N` buckets (bucket `b` belongs to
//! flat node `b`), scatters them from the master down the reversed gather
//! forest, sorts every bucket locally and then executes the gather plan. In
//! each round every node whose wait is satisfied sends its whole payload
//! once; messages are delivered at the end of the round.

mod plan;

use std::fmt;
use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

pub use plan::{GatherPhase, GatherPlan, GroupZeroWaits, SendRule};

use crate::error::{OhhcError, Result};
use crate::partition::split;
use crate::quicksort::{quicksort, SortMetrics};
use crate::topology::{GroupMode, LinkKind, OhhcTopology, CELL_SIZE};

/// A sorted run covering the contiguous bucket range `bucket_lo..=bucket_hi`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PayloadChunk {
    pub bucket_lo: usize,
    pub bucket_hi: usize,
    pub values: Vec<i64>,
    pub unit_count: usize,
}

impl PayloadChunk {
    pub fn single(bucket: usize, values: Vec<i64>) -> Self {
        Self {
            bucket_lo: bucket,
            bucket_hi: bucket,
            values,
            unit_count: 1,
        }
    }

    fn is_ascending(&self) -> bool {
        self.values.windows(2).all(|w| w[0] <= w[1])
    }

    /// Appends `next`, which must cover the range right after `self`.
    pub fn append(&mut self, next: PayloadChunk) -> Result<()> {
        if next.bucket_lo != self.bucket_hi + 1 {
            return Err(OhhcError::PlanViolation(format!(
                "cannot append buckets {}..={} after {}..={}",
                next.bucket_lo, next.bucket_hi, self.bucket_lo, self.bucket_hi
            )));
        }
        if let (Some(&last), Some(&first)) = (self.values.last(), next.values.first()) {
            if last > first {
                return Err(OhhcError::PlanViolation(format!(
                    "merge of buckets {}..={} and {}..={} is not ascending ({last} > {first})",
                    self.bucket_lo, self.bucket_hi, next.bucket_lo, next.bucket_hi
                )));
            }
        }
        self.bucket_hi = next.bucket_hi;
        self.unit_count += next.unit_count;
        self.values.extend(next.values);
        Ok(())
    }
}

/// Inserts `chunk` into a list ordered by bucket range and coalesces
/// neighbours that became adjacent.
fn merge_chunk(held: &mut Vec<PayloadChunk>, chunk: PayloadChunk) -> Result<()> {
    let at = held.partition_point(|c| c.bucket_lo < chunk.bucket_lo);
    if held.get(at).is_some_and(|c| c.bucket_lo <= chunk.bucket_hi)
        || (at > 0 && held[at - 1].bucket_hi >= chunk.bucket_lo)
    {
        return Err(OhhcError::PlanViolation(format!(
            "bucket range {}..={} delivered twice",
            chunk.bucket_lo, chunk.bucket_hi
        )));
    }
    held.insert(at, chunk);
    let mut i = at.saturating_sub(1);
    while i + 1 < held.len() && i <= at {
        if held[i].bucket_hi + 1 == held[i + 1].bucket_lo {
            let next = held.remove(i + 1);
            held[i].append(next)?;
        } else {
            i += 1;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SimOptions {
    /// Sort buckets on worker threads and record wall-clock time.
    pub measure: bool,
    /// Record one [`TraceRecord`] per message.
    pub trace: bool,
}

/// One message of the scatter or the gather.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TraceRecord {
    pub round: usize,
    pub src: usize,
    pub dst: usize,
    pub kind: LinkKind,
    pub units: usize,
    pub elements: usize,
}

impl fmt::Display for TraceRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{},{},{}",
            self.round,
            self.src,
            self.dst,
            self.kind.as_str(),
            self.units,
            self.elements
        )
    }
}

/// Writes `round,src_flat,dst_flat,edge_kind,units,elements` lines.
pub fn write_trace<W: Write>(records: &[TraceRecord], mut out: W) -> Result<()> {
    for r in records {
        writeln!(out, "{r}")?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub dimension: u32,
    pub group_mode: GroupMode,
    pub groups: usize,
    pub processors_per_group: usize,
    pub nodes: usize,
    pub element_count: usize,
    /// Sequential step count of the scatter plus gather accounting.
    pub comm_steps_total: u64,
    pub scatter_rounds: usize,
    pub gather_rounds: usize,
    pub parallel_rounds: usize,
    pub max_message_hops: usize,
    pub gather_messages: usize,
    pub gather_units_at_master: usize,
    /// Sum over rounds of the largest message (in elements) sent that round.
    pub comm_critical_elements: u64,
    pub totals: SortMetrics,
    /// Largest per-node sort cost (comparisons + swaps).
    pub max_node_cost_units: u64,
    pub largest_bucket: usize,
    pub empty_buckets: usize,
    pub sort_wall_clock_ns: Option<u64>,
    pub per_node_metrics: Vec<SortMetrics>,
}

#[derive(Debug, Clone)]
pub struct ParallelRun {
    pub report: SimReport,
    /// The master's final concatenation.
    pub output: Vec<i64>,
    pub trace: Vec<TraceRecord>,
}

/// Communication steps under the sequential accounting: in every group five
/// steps inside one cell plus six per hypercube dimension, one optical step
/// per non-master group, all doubled for scatter and gather.
pub fn count_comm_steps(topo: &OhhcTopology) -> Result<u64> {
    let plan = GatherPlan::build(topo)?;
    Ok(count_comm_steps_with(topo, &plan))
}

fn count_comm_steps_with(topo: &OhhcTopology, plan: &GatherPlan) -> u64 {
    let config = topo.config();
    let inner = plan
        .sends()
        .filter(|&(src, r)| src < CELL_SIZE && r.target < CELL_SIZE)
        .count() as u64;
    // parallel links joining two adjacent cube vertices
    let per_dimension = topo
        .electronic_edges()
        .iter()
        .filter(|e| {
            e.a.group_id == 0 && e.a.hhc_subgroup_id == 0 && e.b.hhc_subgroup_id == 1
        })
        .count() as u64;
    let cube_dims = (config.dimension() - 1) as u64;
    let optical = plan.sends().filter(|(_, r)| r.kind == LinkKind::Optical).count() as u64;
    let groups = config.group_count() as u64;
    2 * (groups * (inner + cube_dims * per_dimension) + optical)
}

pub fn max_hops(report: &SimReport) -> usize {
    report.max_message_hops
}

pub fn run_parallel_sort(
    topo: &OhhcTopology,
    master: &[i64],
    options: SimOptions,
) -> Result<ParallelRun> {
    let plan = GatherPlan::build(topo)?;
    run_with_plan(topo, &plan, master, options)
}

pub fn run_with_plan(
    topo: &OhhcTopology,
    plan: &GatherPlan,
    master: &[i64],
    options: SimOptions,
) -> Result<ParallelRun> {
    let config = topo.config();
    let n = config.node_count();
    let mut buckets = split(master, n)?.buckets;
    let mut trace = Vec::new();
    let mut critical = 0u64;

    let scatter_rounds = scatter(plan, &buckets, options.trace, &mut trace, &mut critical)?;

    let start = options.measure.then(Instant::now);
    let per_node_metrics: Vec<SortMetrics> = if options.measure {
        buckets.par_iter_mut().map(|b| quicksort(b)).collect()
    } else {
        buckets.iter_mut().map(|b| quicksort(b)).collect()
    };
    let sort_wall_clock_ns = start.map(|s| s.elapsed().as_nanos() as u64);

    let largest_bucket = buckets.iter().map(Vec::len).max().unwrap_or(0);
    let empty_buckets = buckets.iter().filter(|b| b.is_empty()).count();
    let mut held: Vec<Vec<PayloadChunk>> = buckets
        .into_iter()
        .enumerate()
        .map(|(i, b)| vec![PayloadChunk::single(i, b)])
        .collect();

    let gather = gather(plan, &mut held, scatter_rounds, options.trace, &mut trace)?;
    critical += gather.critical_elements;

    let mut final_chunks = std::mem::take(&mut held[0]);
    if final_chunks.len() != 1 || final_chunks[0].unit_count != n {
        return Err(OhhcError::PlanViolation(format!(
            "master finished with {} chunk(s)",
            final_chunks.len()
        )));
    }
    let result = final_chunks.pop().expect("one chunk");
    if !result.is_ascending() {
        return Err(OhhcError::PlanViolation("final output is not sorted".into()));
    }

    let totals: SortMetrics = per_node_metrics.iter().sum();
    let report = SimReport {
        dimension: config.dimension(),
        group_mode: config.group_mode(),
        groups: config.group_count(),
        processors_per_group: config.processors_per_group(),
        nodes: n,
        element_count: master.len(),
        comm_steps_total: count_comm_steps_with(topo, plan),
        scatter_rounds,
        gather_rounds: gather.rounds,
        parallel_rounds: scatter_rounds + gather.rounds,
        max_message_hops: plan.max_hops(),
        gather_messages: gather.messages,
        gather_units_at_master: result.unit_count,
        comm_critical_elements: critical,
        totals,
        max_node_cost_units: per_node_metrics
            .iter()
            .map(SortMetrics::cost_units)
            .max()
            .unwrap_or(0),
        largest_bucket,
        empty_buckets,
        sort_wall_clock_ns,
        per_node_metrics,
    };
    Ok(ParallelRun {
        report,
        output: result.values,
        trace,
    })
}

/// Routes every bucket from the master to its owner along the reversed gather
/// forest. Each node forwards, in one round, one message per child carrying
/// the buckets of that child's subtree. Returns the number of rounds.
fn scatter(
    plan: &GatherPlan,
    buckets: &[Vec<i64>],
    record: bool,
    trace: &mut Vec<TraceRecord>,
    critical: &mut u64,
) -> Result<usize> {
    let n = buckets.len();
    // path[b] = master -> ... -> b
    let paths: Vec<Vec<usize>> = (0..n)
        .map(|b| {
            let mut path = vec![b];
            let mut cur = b;
            while let Some(r) = plan.send_rule_flat(cur) {
                cur = r.target;
                path.push(cur);
            }
            path.reverse();
            path
        })
        .collect();
    let rounds = paths.iter().map(|p| p.len() - 1).max().unwrap_or(0);

    for round in 1..=rounds {
        // (src, dst) -> (units, elements)
        let mut messages: std::collections::BTreeMap<(usize, usize), (usize, usize)> =
            Default::default();
        for (b, path) in paths.iter().enumerate() {
            if path.len() > round {
                let entry = messages.entry((path[round - 1], path[round])).or_default();
                entry.0 += 1;
                entry.1 += buckets[b].len();
            }
        }
        *critical += messages.values().map(|&(_, e)| e as u64).max().unwrap_or(0);
        if record {
            for (&(src, dst), &(units, elements)) in &messages {
                let kind = plan
                    .send_rule_flat(dst)
                    .filter(|r| r.target == src)
                    .map(|r| r.kind)
                    .ok_or_else(|| {
                        OhhcError::PlanViolation(format!("scatter edge {src} -> {dst} unknown"))
                    })?;
                trace.push(TraceRecord {
                    round,
                    src,
                    dst,
                    kind,
                    units,
                    elements,
                });
            }
        }
    }
    Ok(rounds)
}

struct GatherOutcome {
    rounds: usize,
    messages: usize,
    critical_elements: u64,
}

fn gather(
    plan: &GatherPlan,
    held: &mut [Vec<PayloadChunk>],
    round_offset: usize,
    record: bool,
    trace: &mut Vec<TraceRecord>,
) -> Result<GatherOutcome> {
    let n = held.len();
    let units = |chunks: &[PayloadChunk]| chunks.iter().map(|c| c.unit_count).sum::<usize>();
    let mut sent = vec![false; n];
    let mut outcome = GatherOutcome {
        rounds: 0,
        messages: 0,
        critical_elements: 0,
    };

    while units(&held[0]) < n {
        outcome.rounds += 1;
        let mut outgoing = Vec::new();
        for (i, chunks) in held.iter_mut().enumerate() {
            let Some(rule) = plan.send_rule_flat(i) else {
                continue;
            };
            if sent[i] {
                continue;
            }
            let have = units(chunks);
            let wait = plan.wait_units_flat(i);
            if have > wait {
                return Err(OhhcError::PlanViolation(format!(
                    "node {i} holds {have} units but waits for {wait}"
                )));
            }
            if have == wait {
                sent[i] = true;
                outgoing.push((i, rule, std::mem::take(chunks)));
            }
        }
        if outgoing.is_empty() {
            return Err(OhhcError::PlanViolation(format!(
                "gather stalled in round {} with {} of {n} units at the master",
                outcome.rounds,
                units(&held[0])
            )));
        }

        let mut largest = 0usize;
        for (src, rule, chunks) in outgoing {
            let elements: usize = chunks.iter().map(|c| c.values.len()).sum();
            largest = largest.max(elements);
            outcome.messages += 1;
            if record {
                trace.push(TraceRecord {
                    round: round_offset + outcome.rounds,
                    src,
                    dst: rule.target,
                    kind: rule.kind,
                    units: units(&chunks),
                    elements,
                });
            }
            for c in chunks {
                merge_chunk(&mut held[rule.target], c)?;
            }
        }
        outcome.critical_elements += largest as u64;

        let in_network: usize = held.iter().map(|c| units(c)).sum();
        if in_network != n {
            return Err(OhhcError::PlanViolation(format!(
                "{in_network} units in the network after round {}, expected {n}",
                outcome.rounds
            )));
        }
    }
    Ok(outcome)
}
