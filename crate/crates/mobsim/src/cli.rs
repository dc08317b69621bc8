//! Command-line interface.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use mobsim_core::harness::{canonical_conditions, CANONICAL_WORLDS, DEFAULT_MASTER_SEED};
use mobsim_core::world::{generate_world, reduce_to_group};
use mobsim_core::{engine, ControllerParams, RangePolicy, SensorRig, SimConfig, WorldError};

use crate::analysis::{analyze, Response};
use crate::error::{Error, Result};
use crate::records::{read_runs, read_trace, write_events, write_robots, write_runs, TraceRow, TraceWriter};
use crate::render::render_svg;
use crate::summary::summary_text;
use crate::sweep::{run_sweep, write_sweep};
use crate::world_file::WorldFile;

#[derive(Debug, Parser)]
#[command(name = "mobsim", version, about = "Braitenberg mobbing simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random world file.
    Gen(GenArgs),
    /// Run one simulation and write its record, event log and pose trace.
    Run(RunArgs),
    /// Run the range x group-size experiment over a batch of worlds.
    Sweep(SweepArgs),
    /// Repeated-measures ANOVA and planned contrasts on a runs.csv.
    Analyze(AnalyzeArgs),
    /// Draw a world and a pose trace as SVG.
    Render(RenderArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub robots: usize,
    #[arg(long, default_value_t = 3)]
    pub boxes: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TimeArgs {
    /// Simulated seconds per run.
    #[arg(long, default_value_t = 60.0)]
    pub duration: f64,
    /// Seconds per tick.
    #[arg(long, default_value_t = 0.032)]
    pub dt: f64,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub world: PathBuf,
    /// Radio range in meters, or `inf` / `-1` for unlimited.
    #[arg(long, default_value = "inf", allow_hyphen_values = true)]
    pub range: String,
    /// Keep only robots 1..=k.
    #[arg(long)]
    pub robots: Option<usize>,
    #[command(flatten)]
    pub time: TimeArgs,
    /// Write every n-th tick to trace.csv (the last tick is always written).
    #[arg(long, default_value_t = 1)]
    pub trace_stride: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = DEFAULT_MASTER_SEED)]
    pub master_seed: u64,
    #[arg(long, default_value_t = CANONICAL_WORLDS)]
    pub worlds: usize,
    #[command(flatten)]
    pub time: TimeArgs,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Check overlaps and containment after every tick and write audit.txt.
    #[arg(long)]
    pub audit: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ResponseArg {
    Participation,
    Unanimous,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub runs: PathBuf,
    #[arg(long, value_enum, default_value_t = ResponseArg::Participation)]
    pub response: ResponseArg,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long)]
    pub trace: PathBuf,
    #[arg(long)]
    pub world: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen(a) => gen(a),
        Command::Run(a) => run(a),
        Command::Sweep(a) => sweep(a),
        Command::Analyze(a) => analyze_cmd(a),
        Command::Render(a) => render(a),
    }
}

fn config(t: &TimeArgs) -> Result<SimConfig> {
    if !(t.dt.is_finite() && t.dt > 0.0) {
        return Err(Error::Usage(format!("--dt must be positive, got {}", t.dt)));
    }
    if !(t.duration.is_finite() && t.duration >= t.dt) {
        return Err(Error::Usage(format!("--duration must be at least one tick, got {}", t.duration)));
    }
    Ok(SimConfig {
        dt: t.dt,
        duration: t.duration,
        ..SimConfig::default()
    })
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn gen(a: GenArgs) -> Result<()> {
    if a.robots == 0 {
        return Err(Error::Usage("--robots must be at least 1".into()));
    }
    let world = generate_world(a.seed, a.robots, a.boxes)?;
    WorldFile {
        seed: Some(a.seed),
        world,
    }
    .write(&a.out)
}

fn run(a: RunArgs) -> Result<()> {
    let range = RangePolicy::parse(&a.range).map_err(|e| Error::Usage(e.to_string()))?;
    if a.trace_stride == 0 {
        return Err(Error::Usage("--trace-stride must be at least 1".into()));
    }
    let cfg = SimConfig {
        range_policy: range,
        ..config(&a.time)?
    };
    let file = WorldFile::read(&a.world)?;
    let world = match a.robots {
        Some(k) => reduce_to_group(&file.world, k).map_err(|e| match e {
            WorldError::GroupOutOfRange { .. } => Error::Usage(format!("--robots: {e}")),
            other => other.into(),
        })?,
        None => file.world,
    };
    create_dir(&a.out)?;

    let trace_path = a.out.join("trace.csv");
    let f = File::create(&trace_path).map_err(|e| Error::io(&trace_path, e))?;
    let mut trace = TraceWriter::new(BufWriter::new(f)).map_err(|e| Error::io(&trace_path, e))?;
    let mut trace_err = None;
    let out = engine::run_observed(&world, &cfg, false, |sim| {
        if trace_err.is_some() || !(sim.tick() % a.trace_stride == 0 || sim.is_finished()) {
            return;
        }
        for ((id, pose), state) in sim.ids().iter().zip(sim.poses()).zip(sim.controllers()) {
            let row = TraceRow {
                tick: sim.tick(),
                robot_id: *id,
                x: pose.position.x,
                y: pose.position.y,
                heading: pose.heading,
                mode: state.mode,
            };
            if let Err(e) = trace.push(&row) {
                trace_err = Some(e);
                return;
            }
        }
    });
    if let Some(e) = trace_err {
        return Err(Error::io(&trace_path, e));
    }
    trace.finish().map_err(|e| Error::io(&trace_path, e))?;

    let mut record = out.record;
    record.world_id = 1;
    let path = a.out.join("runs.csv");
    let f = File::create(&path).map_err(|e| Error::io(&path, e))?;
    write_runs(BufWriter::new(f), [(1, file.seed, &record)]).map_err(|e| Error::io(&path, e))?;
    let path = a.out.join("robots.csv");
    let f = File::create(&path).map_err(|e| Error::io(&path, e))?;
    write_robots(BufWriter::new(f), [(1, &record)]).map_err(|e| Error::io(&path, e))?;
    let path = a.out.join("events.jsonl");
    let f = File::create(&path).map_err(|e| Error::io(&path, e))?;
    write_events(BufWriter::new(f), &out.events).map_err(|e| Error::io(&path, e))
}

fn sweep(a: SweepArgs) -> Result<()> {
    if a.worlds == 0 {
        return Err(Error::Usage("--worlds must be at least 1".into()));
    }
    if a.jobs == 0 {
        return Err(Error::Usage("--jobs must be at least 1".into()));
    }
    let cfg = config(&a.time)?;
    let out = run_sweep(a.master_seed, a.worlds, &canonical_conditions(), &cfg, a.jobs, a.audit)?;
    write_sweep(&a.out, &out)
}

fn analyze_cmd(a: AnalyzeArgs) -> Result<()> {
    let f = File::open(&a.runs).map_err(|e| Error::io(&a.runs, e))?;
    let rows = read_runs(f).map_err(|e| match e {
        Error::Data(m) => Error::Data(format!("{}: {m}", a.runs.display())),
        other => other,
    })?;
    let records: Vec<_> = rows.into_iter().map(|r| r.record).collect();
    let response = match a.response {
        ResponseArg::Participation => Response::Participation,
        ResponseArg::Unanimous => Response::Unanimous,
    };
    let analysis = analyze(&records, response)?;
    create_dir(&a.out)?;
    for (name, text) in [
        ("anova.csv", analysis.anova_csv()),
        ("report.txt", analysis.report()),
        ("summary.txt", summary_text(&records)),
    ] {
        let path = a.out.join(name);
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

fn render(a: RenderArgs) -> Result<()> {
    let world = WorldFile::read(&a.world)?.world;
    let f = File::open(&a.trace).map_err(|e| Error::io(&a.trace, e))?;
    let trace = read_trace(f)?;
    let radius = SensorRig::default().detection_radius(world.light.intensity, ControllerParams::default().light_threshold);
    let svg = render_svg(&world, &trace, radius)?;
    if let Some(dir) = a.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        create_dir(dir)?;
    }
    fs::write(&a.out, svg).map_err(|e| Error::io(&a.out, e))
}
