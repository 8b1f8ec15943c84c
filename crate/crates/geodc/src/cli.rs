//! `geodc` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind as ClapErrorKind;
use clap::{Args, Parser, Subcommand};
use geodc_core::{
    beta_grid, delay_matrix, disconnection_matrix, oracle_solve, DesignInstance, DesignResult,
    OptimalityStatus, SolveConfig, SrgCatalog, Topology, DEFAULT_SPEED_MPS,
};
use serde::Serialize;

use crate::error::{Error, Result, EXIT_OK, EXIT_USAGE};
use crate::format::{self, PlacementFile, ReportJson, TopologyFile};
use crate::parallel;

#[derive(Debug, Parser)]
#[command(name = "geodc", version, about = "Place data center racks over a WAN, trading survivability against latency")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a topology file and summarize it
    Validate(TopologyArgs),
    /// All-pairs shortest-path delay matrix as CSV (ms)
    Delays(DelayArgs),
    /// Accessibility matrix per failure group as CSV
    Srgs(SrgArgs),
    /// Evaluate a placement file
    Eval(EvalArgs),
    /// Optimal placement for one weight
    Design(DesignArgs),
    /// Pareto points over a weight grid as CSV
    Sweep(SweepArgs),
    /// Exhaustive reference solution for tiny instances
    Oracle(DesignArgs),
}

#[derive(Debug, Args)]
struct TopologyArgs {
    /// Topology JSON file
    #[arg(long, short = 't')]
    topology: PathBuf,
    /// Propagation speed, m/s
    #[arg(long, default_value_t = DEFAULT_SPEED_MPS)]
    speed: f64,
}

#[derive(Debug, Args)]
struct DelayArgs {
    #[command(flatten)]
    topo: TopologyArgs,
    #[arg(long, short = 'o')]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SrgArgs {
    /// Topology JSON file
    #[arg(long, short = 't')]
    topology: PathBuf,
    /// Failure groups file, replacing the single-failure catalog
    #[arg(long)]
    srgs: Option<PathBuf>,
    #[arg(long, short = 'o')]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct InstanceArgs {
    #[command(flatten)]
    topo: TopologyArgs,
    /// Failure groups file, replacing the single-failure catalog
    #[arg(long)]
    srgs: Option<PathBuf>,
    /// Total racks to place
    #[arg(long, default_value_t = 1024, value_parser = clap::value_parser!(u32).range(1..))]
    racks: u32,
    /// Uniform per-site capacity; per-site file values or the rack total otherwise
    #[arg(long)]
    capacity: Option<u32>,
}

#[derive(Debug, Args)]
struct SolverArgs {
    /// Accepted absolute objective gap
    #[arg(long, default_value_t = 0.0)]
    gap: f64,
    /// Search node budget per phase
    #[arg(long, default_value_t = SolveConfig::default().budget_nodes)]
    budget_nodes: u64,
    /// Worker threads; results do not depend on it
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    threads: u64,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[command(flatten)]
    inst: InstanceArgs,
    /// Placement JSON: {"racks": {"<site id>": count}}
    #[arg(long, short = 'p')]
    placement: PathBuf,
    /// Write the JSON report here instead of stdout
    #[arg(long, short = 'o')]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DesignArgs {
    #[command(flatten)]
    inst: InstanceArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Weight of latency against survivability, in [0, 1]
    #[arg(long, short = 'b')]
    beta: f64,
    /// Write the placement JSON here
    #[arg(long, short = 'o')]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    inst: InstanceArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long, default_value_t = 0.0)]
    beta_start: f64,
    #[arg(long, default_value_t = 1.0)]
    beta_end: f64,
    #[arg(long, default_value_t = 0.05)]
    beta_step: f64,
    /// Write the CSV here instead of stdout
    #[arg(long, short = 'o')]
    out: Option<PathBuf>,
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let help = matches!(e.kind(), ClapErrorKind::DisplayHelp | ClapErrorKind::DisplayVersion);
            let text = e.render().to_string();
            if help {
                let _ = out.write_all(text.as_bytes());
                return EXIT_OK;
            }
            let _ = err.write_all(text.as_bytes());
            return EXIT_USAGE;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    match command {
        Command::Validate(a) => validate(&a, out),
        Command::Delays(a) => {
            let t = load_topology(&a.topo.topology)?;
            let d = delay_matrix(&t, a.topo.speed)?;
            emit(a.out.as_deref(), &format::delays_csv(&t, &d), out)
        }
        Command::Srgs(a) => {
            let (t, file) = load(&a.topology)?;
            let catalog = catalog(&t, &file, a.srgs.as_deref())?;
            emit(a.out.as_deref(), &format::disconnection_csv(&disconnection_matrix(&t, &catalog)), out)
        }
        Command::Eval(a) => {
            let inst = instance(&a.inst)?;
            let placement = PlacementFile::load(&a.placement)?.placement(inst.site_count())?;
            let report = inst.evaluate(&placement)?;
            let json = pretty(&ReportJson::from(&report));
            match &a.out {
                Some(path) => format::write(path, &json)?,
                None => put(out, &json)?,
            }
            put(out, &format::report_csv_line(&report))
        }
        Command::Design(a) => {
            let inst = instance(&a.inst)?;
            let cfg = solve_config(&a.solver)?;
            let result = geodc_core::solve(&inst, a.beta, &cfg)?;
            design_output(&inst, &result, a.out.as_deref(), out)
        }
        Command::Oracle(a) => {
            let inst = instance(&a.inst)?;
            if !(0.0..=1.0).contains(&a.beta) {
                return Err(geodc_core::Error::InvalidBeta(a.beta).into());
            }
            let result = oracle_solve(&inst, a.beta)?;
            design_output(&inst, &result, a.out.as_deref(), out)
        }
        Command::Sweep(a) => {
            let inst = instance(&a.inst)?;
            let cfg = solve_config(&a.solver)?;
            let grid = beta_grid(a.beta_start, a.beta_end, a.beta_step)?;
            let points = parallel::sweep(&inst, &grid, &cfg, a.solver.threads as usize)?;
            for p in &points {
                if let OptimalityStatus::GapBounded { gap } = p.status {
                    let _ = writeln!(err, "warning: beta {} is gap-bounded (gap {})", format::decimal(p.beta), format::decimal(gap));
                }
            }
            emit(a.out.as_deref(), &format::pareto_csv(&points)?, out)
        }
    }
}

fn validate(a: &TopologyArgs, out: &mut dyn Write) -> Result<()> {
    let (t, file) = load(&a.topology)?;
    let d = delay_matrix(&t, a.speed)?;
    let catalog = file.catalog(&t)?.unwrap_or_else(|| SrgCatalog::single_failures(&t));
    let gateways = t.sites().iter().filter(|s| s.gateway).count();
    put(
        out,
        &format!(
            "ok: {} sites, {} links, {} gateways, {} failure groups, L_max {} ms\n",
            t.site_count(),
            t.link_count(),
            gateways,
            catalog.len(),
            format::decimal(d.l_max())
        ),
    )
}

fn load(path: &Path) -> Result<(Topology, TopologyFile)> {
    let file = TopologyFile::load(path)?;
    Ok((file.topology()?, file))
}

fn load_topology(path: &Path) -> Result<Topology> {
    Ok(load(path)?.0)
}

fn catalog(t: &Topology, file: &TopologyFile, srgs: Option<&Path>) -> Result<SrgCatalog> {
    match srgs {
        Some(path) => format::load_srg_file(path, t),
        None => Ok(file.catalog(t)?.unwrap_or_else(|| SrgCatalog::single_failures(t))),
    }
}

fn instance(a: &InstanceArgs) -> Result<DesignInstance> {
    let (t, file) = load(&a.topo.topology)?;
    let catalog = catalog(&t, &file, a.srgs.as_deref())?;
    Ok(DesignInstance::with_catalog(t, catalog, a.topo.speed, a.racks, a.capacity)?)
}

fn solve_config(a: &SolverArgs) -> Result<SolveConfig> {
    if !(a.gap.is_finite() && a.gap >= 0.0) {
        return Err(Error::Invalid(format!("gap must be a non-negative number, got {}", a.gap)));
    }
    Ok(SolveConfig { gap: a.gap, budget_nodes: a.budget_nodes })
}

/// `key=value` summary of a design, one line.
pub fn result_line(inst: &DesignInstance, r: &DesignResult) -> String {
    let status = match r.status {
        OptimalityStatus::CertifiedOptimal => "status=certified_optimal".to_string(),
        OptimalityStatus::GapBounded { gap } => format!("status=gap_bounded gap={}", format::decimal(gap)),
    };
    format!(
        "beta={} objective={} survivability={} accessible_racks={}/{} latency_ms={} normalized_latency={} active_sites={} {} canonical={} nodes={}\n",
        format::decimal(r.beta),
        format::decimal(r.objective),
        format::decimal(r.survivability),
        r.accessible_racks,
        inst.racks(),
        format::decimal(r.latency_ms),
        format::decimal(r.normalized_latency),
        r.active_sites(),
        status,
        r.canonical,
        r.nodes
    )
}

fn design_output(inst: &DesignInstance, r: &DesignResult, path: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    let placement = PlacementFile::from_placement(&r.placement).to_json();
    match path {
        Some(path) => format::write(path, &placement)?,
        None => put(out, &placement)?,
    }
    put(out, &result_line(inst, r))
}

fn pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data serializes");
    s.push('\n');
    s
}

fn emit(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(path) => format::write(path, text),
        None => put(out, text),
    }
}

fn put(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .map_err(|source| Error::Io { path: PathBuf::from("<stdout>"), source })
}
