//! `arman` command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 input-data error, 3 internal
//! consistency failure.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::arrangement::{selector_config, simulate_network, Arrangement};
use crate::dse::{self, DesignSpace, DseError, DseResult, HwConfig, DEFAULT_BASES, OBJECTIVES};
use crate::energy::{
    activity_energy, energy_report, load_tech_params, Activity, EnergyError, EnergyReport,
    TechParams, FIXED_WIRING_CLOCK_HZ,
};
use crate::reconfig::{select_arrangement, Objective};
use crate::timing::{layer_stats, ArrayDims, Dataflow};
use crate::workload::{layer_to_gemm, parse_topology_csv, NetworkModel, WorkloadError};

pub const TECH_ENV: &str = "ARMAN_TECH";

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "arman",
    version,
    about = "Reconfigurable systolic-array simulator and design-space explorer"
)]
pub struct Cli {
    /// Cap on parallel evaluation workers (default: available parallelism)
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// Write a zero timestamp into run manifests so reports are byte-stable
    #[arg(long, global = true)]
    pub fixed_clock: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct TechArgs {
    /// Technology parameter file (falls back to $ARMAN_TECH, then built-in defaults)
    #[arg(long)]
    pub tech: Option<PathBuf>,

    /// Use the fixed-wiring clock (826 MHz) instead of the tech file's clock
    #[arg(long)]
    pub non_reconfigurable: bool,
}

#[derive(Debug, Args, Clone)]
pub struct AxisArgs {
    /// Base tile sizes
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_BASES)]
    pub bases: Vec<u64>,

    /// Dataflows (os, ws, is)
    #[arg(long, value_delimiter = ',', default_values = ["os", "ws", "is"])]
    pub dataflows: Vec<Dataflow>,

    /// Arrangements (default: all ten)
    #[arg(long, value_delimiter = ',')]
    pub arrangements: Vec<Arrangement>,
}

impl AxisArgs {
    fn space(&self) -> Result<DesignSpace, CliError> {
        let arrangements = if self.arrangements.is_empty() {
            Arrangement::ALL.to_vec()
        } else {
            self.arrangements.clone()
        };
        Ok(DesignSpace::new(
            self.dataflows.clone(),
            self.bases.clone(),
            arrangements,
        )?)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-layer stats of one network on a single rows x cols array
    Simulate {
        #[arg(long)]
        topology: PathBuf,
        #[arg(long)]
        rows: u64,
        #[arg(long)]
        cols: u64,
        #[arg(long, default_value = "os")]
        dataflow: Dataflow,
        /// Technology parameter file; energy figures are reported only when
        /// this or $ARMAN_TECH is set
        #[arg(long)]
        tech: Option<PathBuf>,
        #[arg(long)]
        non_reconfigurable: bool,
        #[arg(long, default_value = "arman_out")]
        out_dir: PathBuf,
    },
    /// All objectives for every (base, dataflow, arrangement) point
    Sweep {
        #[arg(long)]
        topology: PathBuf,
        #[command(flatten)]
        axes: AxisArgs,
        #[command(flatten)]
        tech: TechArgs,
        /// Output CSV (default: stdout)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pareto-based choice of dataflow and base size over several models
    Dse {
        #[arg(long, num_args = 1.., required = true)]
        models: Vec<PathBuf>,
        /// Share of the design space pruned before front construction
        #[arg(long, default_value_t = 0.30)]
        alpha: f64,
        #[command(flatten)]
        axes: AxisArgs,
        #[command(flatten)]
        tech: TechArgs,
        #[arg(long, default_value = "arman_out")]
        out_dir: PathBuf,
    },
    /// Best run-time arrangement of one network for an objective
    Select {
        #[arg(long)]
        topology: PathBuf,
        #[arg(long, default_value = "os")]
        dataflow: Dataflow,
        #[arg(long, default_value_t = 64)]
        base: u64,
        #[arg(long)]
        objective: Objective,
        #[arg(long, default_value = "2x2")]
        baseline: Arrangement,
        /// Candidate arrangements (default: all ten)
        #[arg(long, value_delimiter = ',')]
        arrangements: Vec<Arrangement>,
        #[command(flatten)]
        tech: TechArgs,
        /// Output JSON (default: stdout)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mux/demux selector string of an arrangement (all when omitted)
    Selectors { arrangement: Option<Arrangement> },
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn input(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<WorkloadError> for CliError {
    fn from(e: WorkloadError) -> Self {
        CliError::input(e.to_string())
    }
}

impl From<EnergyError> for CliError {
    fn from(e: EnergyError) -> Self {
        let code = match e {
            EnergyError::Inconsistent { .. } => EXIT_INTERNAL,
            _ => EXIT_INPUT,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<DseError> for CliError {
    fn from(e: DseError) -> Self {
        let code = match &e {
            DseError::Workload { .. } => EXIT_INPUT,
            DseError::Energy {
                source: EnergyError::Inconsistent { .. },
                ..
            } => EXIT_INTERNAL,
            DseError::Energy { .. } => EXIT_INPUT,
            _ => EXIT_USAGE,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::input(format!("{}: {e}", path.display()))
}

/// Provenance record attached to every report.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: Vec<String>,
    pub parameters: BTreeMap<String, Value>,
    pub tool_version: String,
    pub outputs: Vec<String>,
    pub created_unix: u64,
}

impl RunManifest {
    fn new(command: &str, fixed_clock: bool) -> Self {
        let created_unix = if fixed_clock {
            0
        } else {
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        };
        RunManifest {
            command: command.to_string(),
            inputs: Vec::new(),
            parameters: BTreeMap::new(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            outputs: Vec::new(),
            created_unix,
        }
    }

    fn param(&mut self, key: &str, value: impl Serialize) {
        self.parameters.insert(
            key.to_string(),
            serde_json::to_value(value).unwrap_or(Value::Null),
        );
    }

    fn input(&mut self, path: &Path) {
        self.inputs.push(path.display().to_string());
    }

    fn output(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }
}

struct Ctx {
    fixed_clock: bool,
    /// Buffered stdout, flushed once the command finishes.
    out: Vec<u8>,
}

/// Entry point used by the binary.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{rendered}");
                    0
                }
                _ => {
                    let _ = write!(err, "{rendered}");
                    EXIT_USAGE
                }
            };
        }
    };
    match dispatch(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::usage("--jobs must be ≥ 1"));
        }
        pool = pool.num_threads(jobs);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::usage(format!("cannot start worker pool: {e}")))?;
    let mut ctx = Ctx {
        fixed_clock: cli.fixed_clock,
        out: Vec::new(),
    };
    pool.install(|| match cli.command {
        Command::Simulate {
            topology,
            rows,
            cols,
            dataflow,
            tech,
            non_reconfigurable,
            out_dir,
        } => {
            let tech = resolve_tech(tech.as_deref(), non_reconfigurable, false)?;
            cmd_simulate(&mut ctx, &topology, rows, cols, dataflow, tech, &out_dir)
        }
        Command::Sweep {
            topology,
            axes,
            tech,
            out,
        } => {
            let space = axes.space()?;
            let tech = tech_from_args(&tech)?;
            cmd_sweep(&mut ctx, &topology, &space, &tech, out.as_deref())
        }
        Command::Dse {
            models,
            alpha,
            axes,
            tech,
            out_dir,
        } => {
            let space = axes.space()?;
            let tech = tech_from_args(&tech)?;
            cmd_dse(&mut ctx, &models, alpha, &space, &tech, &out_dir)
        }
        Command::Select {
            topology,
            dataflow,
            base,
            objective,
            baseline,
            arrangements,
            tech,
            out,
        } => {
            let tech = tech_from_args(&tech)?;
            let candidates = if arrangements.is_empty() {
                Arrangement::ALL.to_vec()
            } else {
                arrangements
            };
            cmd_select(
                &mut ctx,
                &topology,
                HwConfig {
                    flow: dataflow,
                    base,
                },
                objective,
                baseline,
                &candidates,
                &tech,
                out.as_deref(),
            )
        }
        Command::Selectors { arrangement } => cmd_selectors(&mut ctx, arrangement),
    })?;
    out.write_all(&ctx.out).map_err(io_err(Path::new("stdout")))
}

fn tech_from_args(args: &TechArgs) -> Result<TechParams, CliError> {
    Ok(
        resolve_tech(args.tech.as_deref(), args.non_reconfigurable, true)?
            .expect("fallback requested"),
    )
}

/// `--tech`, then `$ARMAN_TECH`, then (when `fallback`) the built-in file.
fn resolve_tech(
    path: Option<&Path>,
    non_reconfigurable: bool,
    fallback: bool,
) -> Result<Option<TechParams>, CliError> {
    let env_path = std::env::var_os(TECH_ENV).map(PathBuf::from);
    let tech = match path.map(Path::to_path_buf).or(env_path) {
        Some(p) => Some(load_tech_params(&p)?),
        None if fallback => Some(TechParams::default()),
        None => None,
    };
    Ok(tech.map(|t| {
        if non_reconfigurable {
            t.with_clock(FIXED_WIRING_CLOCK_HZ)
        } else {
            t
        }
    }))
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    std::fs::write(path, contents).map_err(io_err(path))
}

fn to_json(value: &impl Serialize) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("report serializes");
    bytes.push(b'\n');
    bytes
}

fn csv_bytes<R: Serialize>(rows: &[R]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).expect("row serializes");
    }
    w.into_inner().expect("in-memory writer")
}

fn check_report(r: &EnergyReport) -> Result<(), CliError> {
    let rel = |a: f64, b: f64| ((a - b) / b).abs();
    if rel(r.edp, r.energy * r.exec_time) > 1e-12
        || rel(r.avg_power, r.energy / r.exec_time) > 1e-12
    {
        return Err(CliError {
            code: EXIT_INTERNAL,
            message: format!("energy report fields disagree: {r:?}"),
        });
    }
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct LayerRow {
    pub layer: String,
    pub m: u64,
    pub n: u64,
    pub k: u64,
    pub folds: u64,
    pub cycles: u64,
    pub mapping_efficiency: f64,
    pub compute_utilization: f64,
    pub sram_reads: u64,
    pub sram_writes: u64,
    pub mac_ops: u64,
}

pub fn simulate_single_array(
    net: &NetworkModel,
    dims: ArrayDims,
    flow: Dataflow,
) -> Result<Vec<LayerRow>, CliError> {
    net.layers
        .iter()
        .map(|layer| {
            let g = layer_to_gemm(layer)?;
            let s = layer_stats(g, dims, flow);
            Ok(LayerRow {
                layer: layer.name.clone(),
                m: g.m,
                n: g.n,
                k: g.k,
                folds: s.folds,
                cycles: s.cycles,
                mapping_efficiency: s.mapping_efficiency,
                compute_utilization: s.compute_utilization,
                sram_reads: s.sram_reads,
                sram_writes: s.sram_writes,
                mac_ops: s.mac_ops,
            })
        })
        .collect()
}

fn cmd_simulate(
    ctx: &mut Ctx,
    topology: &Path,
    rows: u64,
    cols: u64,
    flow: Dataflow,
    tech: Option<TechParams>,
    out_dir: &Path,
) -> Result<(), CliError> {
    if rows == 0 || cols == 0 {
        return Err(CliError::usage("--rows and --cols must be ≥ 1"));
    }
    let net = parse_topology_csv(topology)?;
    let dims = ArrayDims::new(rows, cols);
    let rows_out = simulate_single_array(&net, dims, flow)?;

    let act = Activity {
        cycles: rows_out.iter().map(|r| r.cycles).sum(),
        mac_ops: rows_out.iter().map(|r| r.mac_ops).sum(),
        sram_reads: rows_out.iter().map(|r| r.sram_reads).sum(),
        sram_writes: rows_out.iter().map(|r| r.sram_writes).sum(),
        active_pes: dims.pes(),
    };
    let energy = match &tech {
        Some(t) => {
            let r = activity_energy(act, t)?;
            check_report(&r)?;
            Some(r)
        }
        None => None,
    };

    let csv_path = out_dir.join(format!("{}_layers.csv", net.name));
    let json_path = out_dir.join(format!("{}_summary.json", net.name));
    let mut manifest = RunManifest::new("simulate", ctx.fixed_clock);
    manifest.input(topology);
    manifest.param("rows", rows);
    manifest.param("cols", cols);
    manifest.param("dataflow", flow);
    manifest.param("tech", tech);
    manifest.output(&csv_path);
    manifest.output(&json_path);

    let summary = json!({
        "network": net.name,
        "array": { "rows": rows, "cols": cols },
        "dataflow": flow,
        "layers": rows_out.len(),
        "total_cycles": act.cycles,
        "total_mac_ops": act.mac_ops,
        "compute_utilization": act.mac_ops as f64 / (dims.pes() * act.cycles) as f64,
        "sram_reads": act.sram_reads,
        "sram_writes": act.sram_writes,
        "energy": energy,
        "manifest": manifest,
    });
    write_file(&csv_path, &csv_bytes(&rows_out))?;
    let json_bytes = to_json(&summary);
    write_file(&json_path, &json_bytes)?;
    ctx.out.extend_from_slice(&json_bytes);
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct SweepRow {
    pub base: u64,
    pub dataflow: Dataflow,
    pub arrangement: Arrangement,
    pub cycles: u64,
    pub avg_power_w: f64,
    pub utilization: f64,
    pub mem_accesses: u64,
    pub sram_reads: u64,
    pub sram_writes: u64,
    pub energy_j: f64,
    pub edp_js: f64,
    pub exec_time_s: f64,
    pub mac_ops: u64,
    pub active_pes: u64,
}

/// Rows in canonical (base, dataflow, arrangement) order.
pub fn sweep_rows(
    net: &NetworkModel,
    space: &DesignSpace,
    tech: &TechParams,
) -> Result<Vec<SweepRow>, CliError> {
    let mut points = Vec::with_capacity(space.len());
    for &base in space.bases() {
        for &flow in space.dataflows() {
            for &arr in space.arrangements() {
                points.push((base, flow, arr));
            }
        }
    }
    points
        .par_iter()
        .map(|&(base, flow, arr)| {
            let s = simulate_network(net, arr, base, flow)?;
            let r = energy_report(&s, tech)?;
            check_report(&r)?;
            Ok(SweepRow {
                base,
                dataflow: flow,
                arrangement: arr,
                cycles: s.total_cycles,
                avg_power_w: r.avg_power,
                utilization: s.utilization,
                mem_accesses: s.sram_accesses(),
                sram_reads: s.sram_reads,
                sram_writes: s.sram_writes,
                energy_j: r.energy,
                edp_js: r.edp,
                exec_time_s: r.exec_time,
                mac_ops: s.total_mac_ops,
                active_pes: s.active_pes,
            })
        })
        .collect()
}

fn cmd_sweep(
    ctx: &mut Ctx,
    topology: &Path,
    space: &DesignSpace,
    tech: &TechParams,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let net = parse_topology_csv(topology)?;
    let rows = sweep_rows(&net, space, tech)?;
    let bytes = csv_bytes(&rows);
    match out {
        Some(path) => {
            let mut manifest = RunManifest::new("sweep", ctx.fixed_clock);
            manifest.input(topology);
            manifest.param("bases", space.bases());
            manifest.param("dataflows", space.dataflows());
            manifest.param("arrangements", space.arrangements());
            manifest.param("tech", tech);
            manifest.output(path);
            write_file(path, &bytes)?;
            write_file(&manifest_path(path), &to_json(&manifest))?;
        }
        None => ctx.out.extend_from_slice(&bytes),
    }
    Ok(())
}

fn manifest_path(report: &Path) -> PathBuf {
    let mut name = report.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    report.with_file_name(name)
}

#[derive(Debug, Serialize)]
pub struct DseRow {
    pub model: String,
    pub point_id: usize,
    pub dataflow: Dataflow,
    pub base: u64,
    pub arrangement: Arrangement,
    pub cycles: u64,
    pub avg_power_w: f64,
    pub utilization: f64,
    pub mem_accesses: u64,
    pub energy_j: f64,
    pub edp_js: f64,
    pub norm_cycles: f64,
    pub norm_power: f64,
    pub norm_utilization: f64,
    pub norm_mem_accesses: f64,
    pub pruned: bool,
    pub on_front: bool,
    pub distance: Option<f64>,
}

pub fn dse_rows(result: &DseResult) -> Vec<DseRow> {
    let mut rows = Vec::new();
    for model in &result.models {
        for p in &result.points {
            let m = model.metrics[p.id];
            let n = model.normalized[p.id];
            rows.push(DseRow {
                model: model.model.clone(),
                point_id: p.id,
                dataflow: p.config.flow,
                base: p.config.base,
                arrangement: p.arrangement,
                cycles: m.cycles,
                avg_power_w: m.avg_power,
                utilization: m.utilization,
                mem_accesses: m.mem_accesses,
                energy_j: m.energy,
                edp_js: m.edp,
                norm_cycles: n[0],
                norm_power: n[1],
                norm_utilization: n[2],
                norm_mem_accesses: n[3],
                pruned: !result.survivors[p.id],
                on_front: model.front.members.binary_search(&p.id).is_ok(),
                distance: model.distances[p.id],
            });
        }
    }
    rows
}

pub fn dse_summary(result: &DseResult, manifest: &RunManifest) -> Value {
    let ranking: Vec<Value> = result
        .ranking
        .iter()
        .map(|c| {
            json!({
                "config": c.config.to_string(),
                "dataflow": c.config.flow,
                "base": c.config.base,
                "r": if c.r.is_finite() { json!(c.r) } else { json!("inf") },
                "samples": c.samples,
            })
        })
        .collect();
    let fronts: BTreeMap<&str, usize> = result
        .models
        .iter()
        .map(|m| (m.model.as_str(), m.front.members.len()))
        .collect();
    json!({
        "alpha": result.alpha,
        "objectives": OBJECTIVES,
        "points": result.points.len(),
        "survivors": result.survivors.iter().filter(|&&k| k).count(),
        "front_sizes": fronts,
        "c_star": {
            "config": result.c_star.to_string(),
            "dataflow": result.c_star.flow,
            "base": result.c_star.base,
        },
        "ranking": ranking,
        "manifest": manifest,
    })
}

fn cmd_dse(
    ctx: &mut Ctx,
    model_paths: &[PathBuf],
    alpha: f64,
    space: &DesignSpace,
    tech: &TechParams,
    out_dir: &Path,
) -> Result<(), CliError> {
    let models = model_paths
        .iter()
        .map(|p| parse_topology_csv(p).map_err(CliError::from))
        .collect::<Result<Vec<_>, _>>()?;
    let result = dse::run_dse(&models, space, tech, alpha)?;

    let csv_path = out_dir.join("dse_points.csv");
    let json_path = out_dir.join("dse_summary.json");
    let mut manifest = RunManifest::new("dse", ctx.fixed_clock);
    for p in model_paths {
        manifest.input(p);
    }
    manifest.param("alpha", alpha);
    manifest.param("bases", space.bases());
    manifest.param("dataflows", space.dataflows());
    manifest.param("arrangements", space.arrangements());
    manifest.param("tech", tech);
    manifest.output(&csv_path);
    manifest.output(&json_path);

    write_file(&csv_path, &csv_bytes(&dse_rows(&result)))?;
    let json_bytes = to_json(&dse_summary(&result, &manifest));
    write_file(&json_path, &json_bytes)?;
    ctx.out.extend_from_slice(&json_bytes);
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_select(
    ctx: &mut Ctx,
    topology: &Path,
    config: HwConfig,
    objective: Objective,
    baseline: Arrangement,
    candidates: &[Arrangement],
    tech: &TechParams,
    out: Option<&Path>,
) -> Result<(), CliError> {
    if config.base == 0 {
        return Err(CliError::usage("--base must be ≥ 1"));
    }
    let net = parse_topology_csv(topology)?;
    let decision = select_arrangement(&net, config, tech, objective, baseline, candidates)?;
    let mut manifest = RunManifest::new("select", ctx.fixed_clock);
    manifest.input(topology);
    manifest.param("config", config.to_string());
    manifest.param("objective", objective);
    manifest.param("baseline", baseline);
    manifest.param("arrangements", candidates);
    manifest.param("tech", tech);
    if let Some(p) = out {
        manifest.output(p);
    }
    let doc = json!({
        "objective": objective,
        "network": decision.network,
        "config": config.to_string(),
        "winner": decision.arrangement,
        "selectors": decision.selectors.to_string(),
        "baseline": baseline,
        "baseline_value": decision.baseline_value,
        "chosen_value": decision.chosen_value,
        "improvement": decision.improvement,
        "table": decision.table,
        "manifest": manifest,
    });
    let bytes = to_json(&doc);
    match out {
        Some(p) => write_file(p, &bytes),
        None => {
            ctx.out.extend_from_slice(&bytes);
            Ok(())
        }
    }
}

fn cmd_selectors(ctx: &mut Ctx, arrangement: Option<Arrangement>) -> Result<(), CliError> {
    let text = match arrangement {
        Some(a) => format!("{}\n", selector_config(a)),
        None => Arrangement::ALL
            .iter()
            .map(|a| format!("{:<5} {}\n", a.name(), selector_config(*a)))
            .collect(),
    };
    ctx.out.extend_from_slice(text.as_bytes());
    Ok(())
}
