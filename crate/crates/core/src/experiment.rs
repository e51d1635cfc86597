//! Single runs and sweeps over dimension × mode × distribution × size.

use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::analytics::{self, CostModelParams};
use crate::error::{OhhcError, Result};
use crate::partition::{generate, Distribution, DistributionSpec, DEFAULT_LOCAL_SEGMENTS, DEFAULT_VALUE_RANGE};
use crate::quicksort::{run_baseline, Baseline, SortMetrics};
use crate::simulator::{run_parallel_sort, SimOptions, SimReport, TraceRecord};
use crate::topology::{GroupMode, OhhcConfig, OhhcTopology};

/// Bumped whenever a field of [`RunReport`] changes meaning or disappears.
pub const SCHEMA_VERSION: u32 = 1;

/// Bytes per element when converting the "MB" array sizes to element counts.
pub const BYTES_PER_ELEMENT: usize = 4;

/// Array sizes of the full-scale sweep, in MB.
pub const STANDARD_SIZES_MB: [usize; 6] = [10, 20, 30, 40, 50, 60];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    /// Single-threaded and fully deterministic.
    Reference,
    /// Buckets are sorted on worker threads and wall-clock time is recorded.
    Measure,
}

impl FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "reference" => Ok(Engine::Reference),
            "measure" => Ok(Engine::Measure),
            other => Err(format!("unknown engine `{other}` (expected reference|measure)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(format!("unknown format `{other}` (expected json|csv)")),
        }
    }
}

/// Parses `2621440`, `10MB`, `64KB` or `1GB` into an element count.
pub fn parse_size(text: &str) -> Result<usize, String> {
    let t = text.trim();
    let upper = t.to_ascii_uppercase();
    let (digits, scale) = if let Some(d) = upper.strip_suffix("GB") {
        (d, 1usize << 30)
    } else if let Some(d) = upper.strip_suffix("MB") {
        (d, 1 << 20)
    } else if let Some(d) = upper.strip_suffix("KB") {
        (d, 1 << 10)
    } else {
        (upper.as_str(), 0)
    };
    let value: usize = digits
        .trim()
        .parse()
        .map_err(|e| format!("invalid size `{t}`: {e}"))?;
    let count = if scale == 0 {
        value
    } else {
        value * scale / BYTES_PER_ELEMENT
    };
    if count == 0 {
        return Err(format!("size `{t}` is zero elements"));
    }
    Ok(count)
}

/// Everything that determines one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub dimension: u32,
    pub group_mode: GroupMode,
    pub distribution: Distribution,
    pub element_count: usize,
    pub seed: u64,
    pub engine: Engine,
    pub format: OutputFormat,
    pub trace: bool,
    pub value_range: (i64, i64),
    pub local_segments: usize,
    /// Cost units charged per communication step when forming the parallel
    /// cost; 0 compares sort work only.
    pub comm_step_weight: f64,
}

impl RunConfig {
    pub fn new(dimension: u32, group_mode: GroupMode, distribution: Distribution, element_count: usize, seed: u64) -> Self {
        Self {
            dimension,
            group_mode,
            distribution,
            element_count,
            seed,
            engine: Engine::Reference,
            format: OutputFormat::Json,
            trace: false,
            value_range: DEFAULT_VALUE_RANGE,
            local_segments: DEFAULT_LOCAL_SEGMENTS,
            comm_step_weight: 0.0,
        }
    }

    pub fn distribution_spec(&self) -> DistributionSpec {
        DistributionSpec {
            kind: self.distribution,
            element_count: self.element_count,
            seed: self.seed,
            value_range: self.value_range,
            local_segments: self.local_segments,
        }
    }

    pub fn ohhc_config(&self) -> Result<OhhcConfig> {
        OhhcConfig::new(self.dimension, self.group_mode)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BaselineSummary {
    pub metrics: SortMetrics,
    pub cost_units: u64,
    pub wall_clock_ns: Option<u64>,
}

impl From<&Baseline> for BaselineSummary {
    fn from(b: &Baseline) -> Self {
        Self {
            metrics: b.metrics,
            cost_units: b.cost_units,
            wall_clock_ns: b.wall_clock.map(|d| d.as_nanos() as u64),
        }
    }
}

/// Simulated quantities next to their closed-form counterparts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelComparison {
    pub params: CostModelParams,
    pub comm_steps_simulated: u64,
    pub comm_steps_model: u64,
    pub max_hops_simulated: usize,
    pub path_links_model: u64,
    pub parallel_time_model: f64,
    pub speedup_model: Option<f64>,
    pub efficiency_model: Option<f64>,
    pub message_delay_average: u64,
    pub message_delay_worst: u64,
    pub baseline_cost_units: u64,
    pub parallel_cost_units: f64,
    pub measured_speedup: f64,
    pub measured_efficiency: f64,
    pub wall_clock_speedup: Option<f64>,
}

impl ModelComparison {
    pub fn new(
        config: &OhhcConfig,
        sim: &SimReport,
        baseline: &BaselineSummary,
        comm_step_weight: f64,
    ) -> Result<Self> {
        let n = sim.element_count as u64;
        let params = CostModelParams::new(config, n);
        let parallel_cost_units =
            sim.max_node_cost_units as f64 + comm_step_weight * sim.comm_steps_total as f64;
        // A run whose buckets all have at most one element does no sort work.
        let measured_speedup = if parallel_cost_units > 0.0 {
            analytics::measured_speedup(baseline.cost_units as f64, parallel_cost_units)?
        } else {
            0.0
        };
        let wall_clock_speedup = match (baseline.wall_clock_ns, sim.sort_wall_clock_ns) {
            (Some(b), Some(p)) if p > 0 => Some(b as f64 / p as f64),
            _ => None,
        };
        Ok(Self {
            comm_steps_simulated: sim.comm_steps_total,
            comm_steps_model: analytics::comm_steps_model(params.g, params.d_h),
            max_hops_simulated: sim.max_message_hops,
            path_links_model: params.l,
            parallel_time_model: analytics::parallel_time_model(n, params.p),
            speedup_model: analytics::speedup_model(n, params.p).ok(),
            efficiency_model: analytics::efficiency_model(n, params.p).ok(),
            message_delay_average: analytics::message_delay_model(params.t, params.d_h, false, n),
            message_delay_worst: analytics::message_delay_model(params.t, params.d_h, true, n),
            baseline_cost_units: baseline.cost_units,
            parallel_cost_units,
            measured_speedup,
            measured_efficiency: analytics::measured_efficiency(measured_speedup, params.p),
            wall_clock_speedup,
            params,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub config: RunConfig,
    pub simulation: SimReport,
    pub baseline: BaselineSummary,
    pub analytics: ModelComparison,
    pub output_matches_baseline: bool,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: RunReport,
    pub trace: Vec<TraceRecord>,
    pub output: Vec<i64>,
}

/// Runs one configuration. `input` replaces the generated array when given.
pub fn run_experiment(config: &RunConfig, input: Option<Vec<i64>>) -> Result<RunOutcome> {
    let ohhc = config.ohhc_config()?;
    let master = match input {
        Some(values) => values,
        None => generate(&config.distribution_spec())?,
    };
    if master.is_empty() {
        return Err(OhhcError::EmptyInput);
    }
    let mut config = config.clone();
    config.element_count = master.len();

    let measure = config.engine == Engine::Measure;
    let baseline = run_baseline(&master, measure)?;
    let topo = OhhcTopology::build(ohhc)?;
    let run = run_parallel_sort(
        &topo,
        &master,
        SimOptions {
            measure,
            trace: config.trace,
        },
    )?;
    let summary = BaselineSummary::from(&baseline);
    let analytics = ModelComparison::new(&ohhc, &run.report, &summary, config.comm_step_weight)?;
    let report = RunReport {
        schema_version: SCHEMA_VERSION,
        output_matches_baseline: run.output == baseline.sorted,
        config,
        simulation: run.report,
        baseline: summary,
        analytics,
    };
    Ok(RunOutcome {
        report,
        trace: run.trace,
        output: run.output,
    })
}

/// One row of a sweep table. Metric columns are empty when the cell failed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub cell: usize,
    pub dimension: u32,
    pub mode: GroupMode,
    pub distribution: Distribution,
    pub element_count: usize,
    pub seed: u64,
    pub groups: usize,
    pub processors_per_group: usize,
    pub nodes: usize,
    pub comm_steps: Option<u64>,
    pub comm_steps_model: Option<u64>,
    pub scatter_rounds: Option<usize>,
    pub gather_rounds: Option<usize>,
    pub parallel_rounds: Option<usize>,
    pub max_hops: Option<usize>,
    pub path_links_model: Option<u64>,
    pub recursion_calls: Option<u64>,
    pub iterations: Option<u64>,
    pub swaps: Option<u64>,
    pub comparisons: Option<u64>,
    pub baseline_cost_units: Option<u64>,
    pub max_node_cost_units: Option<u64>,
    pub parallel_cost_units: Option<f64>,
    pub measured_speedup: Option<f64>,
    pub measured_efficiency: Option<f64>,
    pub model_speedup: Option<f64>,
    pub model_efficiency: Option<f64>,
    pub output_matches_baseline: Option<bool>,
    pub status: String,
}

impl SweepRow {
    fn empty(cell: usize, config: &RunConfig, status: String) -> Self {
        let (groups, processors_per_group, nodes) = config
            .ohhc_config()
            .map(|c| (c.group_count(), c.processors_per_group(), c.node_count()))
            .unwrap_or_default();
        Self {
            cell,
            dimension: config.dimension,
            mode: config.group_mode,
            distribution: config.distribution,
            element_count: config.element_count,
            seed: config.seed,
            groups,
            processors_per_group,
            nodes,
            comm_steps: None,
            comm_steps_model: None,
            scatter_rounds: None,
            gather_rounds: None,
            parallel_rounds: None,
            max_hops: None,
            path_links_model: None,
            recursion_calls: None,
            iterations: None,
            swaps: None,
            comparisons: None,
            baseline_cost_units: None,
            max_node_cost_units: None,
            parallel_cost_units: None,
            measured_speedup: None,
            measured_efficiency: None,
            model_speedup: None,
            model_efficiency: None,
            output_matches_baseline: None,
            status,
        }
    }

    pub fn from_report(cell: usize, report: &RunReport) -> Self {
        let sim = &report.simulation;
        let a = &report.analytics;
        let status = if report.output_matches_baseline {
            "ok".to_string()
        } else {
            "error: output differs from baseline".to_string()
        };
        Self {
            comm_steps: Some(sim.comm_steps_total),
            comm_steps_model: Some(a.comm_steps_model),
            scatter_rounds: Some(sim.scatter_rounds),
            gather_rounds: Some(sim.gather_rounds),
            parallel_rounds: Some(sim.parallel_rounds),
            max_hops: Some(sim.max_message_hops),
            path_links_model: Some(a.path_links_model),
            recursion_calls: Some(sim.totals.recursion_calls),
            iterations: Some(sim.totals.iterations),
            swaps: Some(sim.totals.swaps),
            comparisons: Some(sim.totals.comparisons),
            baseline_cost_units: Some(a.baseline_cost_units),
            max_node_cost_units: Some(sim.max_node_cost_units),
            parallel_cost_units: Some(a.parallel_cost_units),
            measured_speedup: Some(a.measured_speedup),
            measured_efficiency: Some(a.measured_efficiency),
            model_speedup: a.speedup_model,
            model_efficiency: a.efficiency_model,
            output_matches_baseline: Some(report.output_matches_baseline),
            ..Self::empty(cell, &report.config, status)
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

/// Sequential run of one (distribution, size) pair, shared by every cell
/// that sorts the same array.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BaselineRow {
    pub distribution: Distribution,
    pub element_count: usize,
    pub seed: u64,
    pub recursion_calls: Option<u64>,
    pub iterations: Option<u64>,
    pub swaps: Option<u64>,
    pub comparisons: Option<u64>,
    pub cost_units: Option<u64>,
    pub wall_clock_ns: Option<u64>,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepMatrix {
    pub dimensions: Vec<u32>,
    pub modes: Vec<GroupMode>,
    pub distributions: Vec<Distribution>,
    pub sizes: Vec<usize>,
    pub seed: u64,
    pub engine: Engine,
    pub comm_step_weight: f64,
}

impl SweepMatrix {
    /// 4 dimensions × 2 modes × 4 distributions × 6 sizes (10–60 MB of 4-byte
    /// integers): 192 parallel cells plus 24 sequential baselines.
    pub fn standard_preset(seed: u64) -> Self {
        Self::with_sizes(
            STANDARD_SIZES_MB
                .iter()
                .map(|mb| mb * (1 << 20) / BYTES_PER_ELEMENT)
                .collect(),
            seed,
        )
    }

    /// Same matrix, sizes scaled down 64× so it finishes in seconds.
    pub fn desk_preset(seed: u64) -> Self {
        Self::with_sizes(
            STANDARD_SIZES_MB
                .iter()
                .map(|mb| mb * (1 << 20) / BYTES_PER_ELEMENT / 64)
                .collect(),
            seed,
        )
    }

    pub fn with_sizes(sizes: Vec<usize>, seed: u64) -> Self {
        Self {
            dimensions: vec![1, 2, 3, 4],
            modes: GroupMode::ALL.to_vec(),
            distributions: Distribution::ALL.to_vec(),
            sizes,
            seed,
            engine: Engine::Reference,
            comm_step_weight: 0.0,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.cells().is_empty()
    }

    /// Cells in output order: dimension, then mode, distribution and size.
    pub fn cells(&self) -> Vec<RunConfig> {
        let mut cells = Vec::new();
        for &d in &self.dimensions {
            for &mode in &self.modes {
                for &dist in &self.distributions {
                    for &size in &self.sizes {
                        let mut c = RunConfig::new(d, mode, dist, size, self.seed);
                        c.engine = self.engine;
                        c.comm_step_weight = self.comm_step_weight;
                        cells.push(c);
                    }
                }
            }
        }
        cells
    }

    fn baseline_keys(&self) -> Vec<(Distribution, usize)> {
        let mut keys = Vec::new();
        for &dist in &self.distributions {
            for &size in &self.sizes {
                keys.push((dist, size));
            }
        }
        keys
    }
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub baselines: Vec<BaselineRow>,
}

impl SweepOutcome {
    pub fn all_ok(&self) -> bool {
        self.rows.iter().all(SweepRow::is_ok) && self.baselines.iter().all(|b| b.status == "ok")
    }

    pub fn total_runs(&self) -> usize {
        self.rows.len() + self.baselines.len()
    }
}

fn digest(values: &[i64]) -> u64 {
    let mut h = DefaultHasher::new();
    values.hash(&mut h);
    h.finish()
}

struct CachedBaseline {
    summary: BaselineSummary,
    digest: u64,
}

/// Runs every cell of `matrix`. Cells execute concurrently; rows come back in
/// cell order. A failing cell yields a row with an `error:` status and the
/// sweep carries on.
pub fn run_sweep(matrix: &SweepMatrix) -> SweepOutcome {
    let measure = matrix.engine == Engine::Measure;
    let keys = matrix.baseline_keys();
    let computed: Vec<Result<CachedBaseline>> = keys
        .par_iter()
        .map(|&(dist, size)| {
            let master = generate(&RunConfig::new(1, GroupMode::Full, dist, size, matrix.seed).distribution_spec())?;
            let b = run_baseline(&master, measure)?;
            Ok(CachedBaseline {
                summary: BaselineSummary::from(&b),
                digest: digest(&b.sorted),
            })
        })
        .collect();

    let baselines: Vec<BaselineRow> = keys
        .iter()
        .zip(&computed)
        .map(|(&(distribution, element_count), r)| {
            let m = r.as_ref().ok().map(|c| c.summary.metrics);
            BaselineRow {
                distribution,
                element_count,
                seed: matrix.seed,
                recursion_calls: m.map(|m| m.recursion_calls),
                iterations: m.map(|m| m.iterations),
                swaps: m.map(|m| m.swaps),
                comparisons: m.map(|m| m.comparisons),
                cost_units: m.map(|m| m.cost_units()),
                wall_clock_ns: r.as_ref().ok().and_then(|c| c.summary.wall_clock_ns),
                status: match r {
                    Ok(_) => "ok".into(),
                    Err(e) => format!("error: {e}"),
                },
            }
        })
        .collect();
    let cache: BTreeMap<(Distribution, usize), &CachedBaseline> = keys
        .iter()
        .zip(&computed)
        .filter_map(|(k, r)| r.as_ref().ok().map(|c| (*k, c)))
        .collect();

    let rows = matrix
        .cells()
        .par_iter()
        .enumerate()
        .map(|(i, cell)| {
            run_cell(cell, cache.get(&(cell.distribution, cell.element_count)).copied())
                .map(|report| SweepRow::from_report(i, &report))
                .unwrap_or_else(|e| SweepRow::empty(i, cell, format!("error: {e}")))
        })
        .collect();

    SweepOutcome { rows, baselines }
}

fn run_cell(cell: &RunConfig, baseline: Option<&CachedBaseline>) -> Result<RunReport> {
    let baseline = baseline.ok_or_else(|| OhhcError::InvalidSpec("baseline run failed".into()))?;
    let ohhc = cell.ohhc_config()?;
    let master = generate(&cell.distribution_spec())?;
    let topo = OhhcTopology::build(ohhc)?;
    let run = run_parallel_sort(
        &topo,
        &master,
        SimOptions {
            measure: cell.engine == Engine::Measure,
            trace: false,
        },
    )?;
    let analytics = ModelComparison::new(&ohhc, &run.report, &baseline.summary, cell.comm_step_weight)?;
    Ok(RunReport {
        schema_version: SCHEMA_VERSION,
        config: cell.clone(),
        output_matches_baseline: digest(&run.output) == baseline.digest,
        simulation: run.report,
        baseline: baseline.summary.clone(),
        analytics,
    })
}

/// Writes serializable rows as CSV with a header line.
pub fn write_csv<W: Write, T: Serialize>(rows: &[T], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> OhhcError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => OhhcError::Io(io),
        other => OhhcError::InvalidSpec(format!("csv: {other:?}")),
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Reference => "reference",
            Engine::Measure => "measure",
        })
    }
}
