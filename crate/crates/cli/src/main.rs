use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use ohhc_core::experiment::{
    parse_size, run_experiment, run_sweep, write_csv, Engine, OutputFormat, RunConfig, SweepMatrix,
    SweepRow,
};
use ohhc_core::io::{read_array, write_array};
use ohhc_core::partition::{generate, DistributionSpec};
use ohhc_core::simulator::write_trace;
use ohhc_core::{Distribution, GroupMode, OhhcConfig, OhhcTopology};

/// Default directory for reports when `--out` is not given.
const OUTPUT_DIR_ENV: &str = "OHHC_OUTPUT_DIR";

#[derive(Parser, Debug)]
#[command(
    name = "ohhc",
    version,
    about = "Parallel Quick Sort on a simulated OTIS Hyper Hexa-Cell network"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one simulated parallel sort and write its report.
    Run(RunArgs),
    /// Run a dimension × mode × distribution × size matrix and write a CSV table.
    Sweep(SweepArgs),
    /// Export the network as an edge list (`E|O <flat_a> <flat_b>` per line).
    Topology(TopologyArgs),
    /// Write a generated input array (`.bin` = raw little-endian i64, else text).
    Generate(GenerateArgs),
}

#[derive(Args, Debug)]
struct NetworkArgs {
    /// OHHC dimension (>= 1).
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    dimension: u32,
    /// Group mode: `full` (G = P) or `half` (G = P/2).
    #[arg(long, default_value = "full")]
    mode: GroupMode,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    network: NetworkArgs,
    /// Input distribution: random|sorted|reversed|local.
    #[arg(long, default_value = "random")]
    dist: Distribution,
    /// Element count; also accepts sizes such as `10MB` (4 bytes per element).
    #[arg(long, value_parser = parse_size, default_value = "1000000")]
    count: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// `reference` is deterministic; `measure` sorts on threads and records wall-clock time.
    #[arg(long, default_value = "reference")]
    engine: Engine,
    #[arg(long, default_value = "json")]
    format: OutputFormat,
    /// Write one `round,src_flat,dst_flat,edge_kind,units,elements` line per message.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Report path; defaults to $OHHC_OUTPUT_DIR/<run name> or stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Sort this array file instead of generating one.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Cost units charged per communication step in the parallel cost.
    #[arg(long, default_value_t = 0.0)]
    comm_weight: f64,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// `standard`: 4 dims × 2 modes × 4 distributions × 10..60 MB (192 cells plus
    /// 24 sequential baselines, 216 runs). `desk`: the same matrix at 1/64 of the sizes.
    #[arg(long, default_value = "standard")]
    preset: Preset,
    #[arg(long, value_delimiter = ',', value_parser = clap::value_parser!(u32).range(1..))]
    dims: Option<Vec<u32>>,
    #[arg(long, value_delimiter = ',')]
    modes: Option<Vec<GroupMode>>,
    #[arg(long, value_delimiter = ',')]
    dists: Option<Vec<Distribution>>,
    /// Element counts or sizes such as `10MB,20MB`.
    #[arg(long, value_delimiter = ',', value_parser = parse_size)]
    sizes: Option<Vec<usize>>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = "reference")]
    engine: Engine,
    #[arg(long, default_value_t = 0.0)]
    comm_weight: f64,
    /// Cells run concurrently on this many threads.
    #[arg(long)]
    jobs: Option<usize>,
    /// Sweep table path; defaults to $OHHC_OUTPUT_DIR/sweep.csv or stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Sequential baseline table; defaults to $OHHC_OUTPUT_DIR/baselines.csv.
    #[arg(long)]
    baselines: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum Preset {
    Standard,
    Desk,
}

#[derive(Args, Debug)]
struct TopologyArgs {
    #[command(flatten)]
    network: NetworkArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long, default_value = "random")]
    dist: Distribution,
    #[arg(long, value_parser = parse_size)]
    count: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn default_path(explicit: Option<PathBuf>, file_name: &str) -> Option<PathBuf> {
    explicit.or_else(|| {
        std::env::var_os(OUTPUT_DIR_ENV)
            .filter(|d| !d.is_empty())
            .map(|d| Path::new(&d).join(file_name))
    })
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)
                    .with_context(|| format!("creating {}", dir.display()))?;
            }
            Box::new(BufWriter::new(
                File::create(p).with_context(|| format!("creating {}", p.display()))?,
            ))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(args: RunArgs) -> Result<bool> {
    let mut config = RunConfig::new(
        args.network.dimension,
        args.network.mode,
        args.dist,
        args.count,
        args.seed,
    );
    config.engine = args.engine;
    config.format = args.format;
    config.trace = args.trace.is_some();
    config.comm_step_weight = args.comm_weight;

    let input = match &args.input {
        Some(p) => Some(read_array(p).with_context(|| format!("reading {}", p.display()))?),
        None => None,
    };
    let outcome = run_experiment(&config, input)?;
    let report = &outcome.report;

    let ext = match args.format {
        OutputFormat::Json => "json",
        OutputFormat::Csv => "csv",
    };
    let name = format!(
        "run-d{}-{}-{}-{}-s{}.{ext}",
        config.dimension, config.group_mode, config.distribution, report.config.element_count, config.seed
    );
    let mut out = open_output(default_path(args.out, &name).as_deref())?;
    match args.format {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut out, report)?;
            writeln!(out)?;
        }
        OutputFormat::Csv => write_csv(&[SweepRow::from_report(0, report)], &mut out)?,
    }
    out.flush()?;

    if let Some(path) = &args.trace {
        let mut t = open_output(Some(path))?;
        write_trace(&outcome.trace, &mut t)?;
        t.flush()?;
    }
    if !report.output_matches_baseline {
        eprintln!("error: parallel output differs from the sequential baseline");
    }
    Ok(report.output_matches_baseline)
}

fn sweep(args: SweepArgs) -> Result<bool> {
    let mut matrix = match args.preset {
        Preset::Standard => SweepMatrix::standard_preset(args.seed),
        Preset::Desk => SweepMatrix::desk_preset(args.seed),
    };
    if let Some(d) = args.dims {
        matrix.dimensions = d;
    }
    if let Some(m) = args.modes {
        matrix.modes = m;
    }
    if let Some(d) = args.dists {
        matrix.distributions = d;
    }
    if let Some(s) = args.sizes {
        matrix.sizes = s;
    }
    matrix.engine = args.engine;
    matrix.comm_step_weight = args.comm_weight;
    if matrix.is_empty() {
        anyhow::bail!("sweep matrix is empty");
    }

    eprintln!(
        "sweeping {} cells ({} dims x {} modes x {} distributions x {} sizes)",
        matrix.cells().len(),
        matrix.dimensions.len(),
        matrix.modes.len(),
        matrix.distributions.len(),
        matrix.sizes.len()
    );
    let outcome = match args.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()?
            .install(|| run_sweep(&matrix)),
        None => run_sweep(&matrix),
    };

    let mut out = open_output(default_path(args.out, "sweep.csv").as_deref())?;
    write_csv(&outcome.rows, &mut out)?;
    out.flush()?;
    if let Some(path) = default_path(args.baselines, "baselines.csv") {
        let mut b = open_output(Some(&path))?;
        write_csv(&outcome.baselines, &mut b)?;
        b.flush()?;
    }

    let failed = outcome.rows.iter().filter(|r| !r.is_ok()).count()
        + outcome.baselines.iter().filter(|b| b.status != "ok").count();
    eprintln!("{} runs, {failed} failed", outcome.total_runs());
    Ok(failed == 0)
}

fn topology(args: TopologyArgs) -> Result<bool> {
    let config = OhhcConfig::new(args.network.dimension, args.network.mode)?;
    let topo = OhhcTopology::build(config)?;
    let mut out = open_output(args.out.as_deref())?;
    topo.write_edge_list(&mut out)?;
    out.flush()?;
    eprintln!(
        "G = {}, P = {}, N = {}, {} electronic + {} optical edges",
        config.group_count(),
        config.processors_per_group(),
        config.node_count(),
        topo.electronic_edges().len(),
        topo.optical_edges().len()
    );
    Ok(true)
}

fn generate_array(args: GenerateArgs) -> Result<bool> {
    let values = generate(&DistributionSpec::new(args.dist, args.count, args.seed))?;
    write_array(&args.out, &values).with_context(|| format!("writing {}", args.out.display()))?;
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Sweep(a) => sweep(a),
        Command::Topology(a) => topology(a),
        Command::Generate(a) => generate_array(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
