//! Command-line front end.

use crate::error::{Error, Result};
use crate::geometry::{Polarization, Scene, Vec2};
use crate::modes::{dispersion_residual, find_modes, SlabSpec};
use crate::output::{
    density_rows, grid_rows, probe_rows, read_rows, write_grid, write_rows, ConvergenceRow, GridHeader, ModeRow,
    ProbeRow, WindowDemoRow,
};
use crate::scene_io::{eval_expr, load_scene, scene_hash, scene_to_json};
use crate::scenes::{named_scene, SCENE_NAMES};
use crate::solver::{error_metric, solve, BeamRhs, GridAxis, GridSpec, SolveOptions};
use crate::study::{convergence_sweep, incident_mode_values, probe_values, Reference, SweepSettings};
use crate::window::{windowed_oscillatory_demo, WindowParams};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Thread count for parallel assembly and evaluation.
pub const THREADS_ENV: &str = "WGF_THREADS";

#[derive(Debug, Parser)]
#[command(name = "wgf", version, about = "Windowed Green function solver for open dielectric waveguides")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one scene and write densities, field grid and diagnostics.
    Solve(SolveArgs),
    /// Probe error as a function of the window size.
    Converge(ConvergeArgs),
    /// Guided modes of a symmetric slab.
    Modes(ModesArgs),
    /// Truncated and windowed integrals of exp(i a z)/sqrt(z).
    WindowDemo(WindowDemoArgs),
    /// Print a named scene as a scene file.
    Scene(SceneArgs),
}

#[derive(Debug, Args)]
pub struct SceneSource {
    /// Named scene or path to a scene file.
    #[arg(long)]
    pub scene: String,
    /// Plateau fraction of the window.
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    /// Points per shortest wavelength.
    #[arg(long, default_value_t = 10.0)]
    pub ppw: f64,
    /// CSV with columns z,x (other columns ignored); defaults to the named
    /// scene's probe line.
    #[arg(long)]
    pub probe: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub source: SceneSource,
    /// Window size in units of the largest wavelength.
    #[arg(long, conflicts_with = "window")]
    pub window_lambda: Option<f64>,
    /// Window size as a length.
    #[arg(long)]
    pub window: Option<f64>,
    /// Field grid "z0:z1:nz,x0:x1:nx".
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Right-hand side for beam and plane-wave illumination.
    #[arg(long, value_enum, default_value_t = BeamRhsArg::Unweighted)]
    pub beam_rhs: BeamRhsArg,
    /// Probe CSV with reference values; its points are used as the probe.
    #[arg(long)]
    pub reference: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BeamRhsArg {
    Unweighted,
    EWeighted,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub source: SceneSource,
    /// Comma-separated A/lambda values.
    #[arg(long, value_delimiter = ',', default_value = "4,6,8,10,12")]
    pub sweep: Vec<f64>,
    /// A/lambda of the self-reference solve. Scenes with an exact solution
    /// use it unless this is given.
    #[arg(long, conflicts_with = "reference")]
    pub reference_lambda: Option<f64>,
    /// Probe CSV with reference values.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Output CSV; standard output if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ModesArgs {
    /// Core wavenumber (number or expression such as "2*pi").
    #[arg(long, value_parser = parse_number)]
    pub kco: f64,
    /// Cladding wavenumber.
    #[arg(long, value_parser = parse_number)]
    pub kcl: f64,
    /// Core half-width.
    #[arg(long, value_parser = parse_number)]
    pub h: f64,
    /// TE or TM.
    #[arg(long, default_value = "TE", value_parser = parse_polarization)]
    pub pol: Polarization,
}

#[derive(Debug, Args)]
pub struct WindowDemoArgs {
    /// Oscillation frequency.
    #[arg(long, default_value = "2*pi", value_parser = parse_number)]
    pub a: f64,
    /// Plateau fraction of the window.
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    /// Comma-separated window sizes.
    #[arg(long, value_delimiter = ',', default_value = "10,20,25,50,75,100")]
    pub sizes: Vec<f64>,
    /// Gauss-Legendre panels per oscillation period.
    #[arg(long, default_value_t = 10.0)]
    pub quadrature_ppw: f64,
}

#[derive(Debug, Args)]
pub struct SceneArgs {
    /// One of FLAT, COUPLER, BRANCH, HORN, DISK, ILLUM, LBEND.
    pub name: String,
    /// Output file; standard output if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Deterministic run summary written as diagnostics.json.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub scene: String,
    pub scene_hash: String,
    pub polarization: Polarization,
    pub window_a: f64,
    pub a_over_lambda: f64,
    pub alpha: f64,
    pub ppw: f64,
    pub unknowns: usize,
    pub nodes: usize,
    pub panels: usize,
    pub residual: f64,
    pub rcond: f64,
    pub probe_points: usize,
    /// Relative L2 probe error and what it was measured against.
    pub error: Option<f64>,
    pub error_reference: Option<String>,
}

/// Wall-clock timings written as timings.json.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub discretize_seconds: f64,
    pub assembly_seconds: f64,
    pub rhs_seconds: f64,
    pub solve_seconds: f64,
    pub evaluation_seconds: f64,
    pub total_seconds: f64,
}

/// Exit status for an error: 2 for bad input, 1 for numerical failures.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_config() {
        2
    } else {
        1
    }
}

pub fn run(cli: Cli) -> Result<()> {
    configure_threads()?;
    match cli.command {
        Command::Solve(a) => cmd_solve(&a),
        Command::Converge(a) => cmd_converge(&a),
        Command::Modes(a) => cmd_modes(&a, std::io::stdout().lock()),
        Command::WindowDemo(a) => cmd_window_demo(&a, std::io::stdout().lock()),
        Command::Scene(a) => cmd_scene(&a),
    }
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Config(format!("{THREADS_ENV} must be a positive integer, got '{v}'")))?;
    #[cfg(feature = "parallel")]
    {
        // A pool may already exist when called twice in one process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

struct Loaded {
    scene: Scene,
    label: String,
    window_lambdas: Option<f64>,
    probe: Vec<Vec2>,
    exact_mode: bool,
}

fn load(source: &SceneSource) -> Result<Loaded> {
    let mut loaded = if SCENE_NAMES.iter().any(|n| n.eq_ignore_ascii_case(&source.scene)) {
        let ns = named_scene(&source.scene)?;
        Loaded {
            label: ns.scene.name.clone(),
            scene: ns.scene,
            window_lambdas: Some(ns.window_lambdas),
            probe: ns.probe,
            exact_mode: ns.exact_mode,
        }
    } else {
        let scene = load_scene(Path::new(&source.scene))?;
        let label = if scene.name.is_empty() { source.scene.clone() } else { scene.name.clone() };
        Loaded { scene, label, window_lambdas: None, probe: Vec::new(), exact_mode: false }
    };
    if let Some(p) = &source.probe {
        loaded.probe = read_points(p)?;
    }
    if !(source.ppw >= 4.0) {
        return Err(Error::Config(format!("ppw must be at least 4, got {}", source.ppw)));
    }
    Ok(loaded)
}

#[derive(Deserialize)]
struct PointRow {
    z: f64,
    x: f64,
}

fn read_points(path: &Path) -> Result<Vec<Vec2>> {
    let rows: Vec<PointRow> = read_rows(File::open(path)?).map_err(|e| with_path(e, path))?;
    Ok(rows.iter().map(|r| Vec2::new(r.z, r.x)).collect())
}

fn read_reference(path: &Path) -> Result<Vec<ProbeRow>> {
    let rows: Vec<ProbeRow> = read_rows(File::open(path)?).map_err(|e| with_path(e, path))?;
    if rows.is_empty() {
        return Err(Error::Config(format!("{}: reference has no rows", path.display())));
    }
    Ok(rows)
}

fn with_path(e: Error, path: &Path) -> Error {
    match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    }
}

/// Parses "z0:z1:nz,x0:x1:nx".
pub fn parse_grid(s: &str) -> Result<GridSpec> {
    let bad = || Error::Config(format!("bad grid '{s}', expected z0:z1:nz,x0:x1:nx"));
    let axes: Vec<&str> = s.split(',').collect();
    if axes.len() != 2 {
        return Err(bad());
    }
    let axis = |a: &str| -> Result<GridAxis> {
        let p: Vec<&str> = a.split(':').collect();
        if p.len() != 3 {
            return Err(bad());
        }
        Ok(GridAxis {
            min: eval_expr(p[0]).map_err(|_| bad())?,
            max: eval_expr(p[1]).map_err(|_| bad())?,
            n: p[2].trim().parse().map_err(|_| bad())?,
        })
    };
    let spec = GridSpec { z: axis(axes[0])?, x: axis(axes[1])? };
    spec.validate()?;
    Ok(spec)
}

fn parse_number(s: &str) -> std::result::Result<f64, String> {
    eval_expr(s)
}

fn parse_polarization(s: &str) -> std::result::Result<Polarization, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn write_json<T: Serialize>(path: &Path, v: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(v).map_err(|e| Error::Evaluation(e.to_string()))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

pub fn cmd_solve(args: &SolveArgs) -> Result<()> {
    let start = Instant::now();
    let mut src = load(&args.source)?;
    let lambda = src.scene.max_wavelength();
    let a = match (args.window, args.window_lambda, src.window_lambdas) {
        (Some(a), _, _) => a,
        (None, Some(l), _) | (None, None, Some(l)) => l * lambda,
        (None, None, None) => {
            return Err(Error::Config("a scene file needs --window or --window-lambda".into()))
        }
    };
    let grid = args.grid.as_deref().map(parse_grid).transpose()?;
    let reference = args.reference.as_deref().map(read_reference).transpose()?;
    if let Some(r) = &reference {
        src.probe = r.iter().map(ProbeRow::point).collect();
    }
    let window = WindowParams::new(a, args.source.alpha)?;
    let mut opts = SolveOptions::new(window, args.source.ppw);
    opts.beam_rhs = match args.beam_rhs {
        BeamRhsArg::Unweighted => BeamRhs::Unweighted,
        BeamRhsArg::EWeighted => BeamRhs::EWeighted,
    };
    let sol = solve(&src.scene, &opts)?;

    let eval_start = Instant::now();
    let probe = if src.probe.is_empty() { Vec::new() } else { probe_values(&sol, &src.probe)? };
    let (error, error_reference) = match (&reference, src.exact_mode && !src.probe.is_empty()) {
        (Some(r), _) => {
            let v: Vec<_> = r.iter().map(ProbeRow::u).collect();
            (Some(error_metric(&probe, &v)?), Some(format!("file {}", args.reference.as_ref().unwrap().display())))
        }
        (None, true) => {
            let exact = incident_mode_values(&src.scene, &src.probe)?;
            (Some(error_metric(&probe, &exact)?), Some("exact mode".to_string()))
        }
        (None, false) => (None, None),
    };
    std::fs::create_dir_all(&args.out)?;
    let hash = scene_hash(&src.scene);
    write_rows(create(&args.out.join("densities.csv"))?, &density_rows(&sol))?;
    if !probe.is_empty() {
        write_rows(create(&args.out.join("probe.csv"))?, &probe_rows(&src.probe, &probe))?;
    }
    if let Some(spec) = &grid {
        let g = sol.evaluate_grid(spec)?;
        let header = GridHeader {
            scene: src.label.clone(),
            scene_hash: hash.clone(),
            polarization: src.scene.polarization,
            z: spec.z,
            x: spec.x,
        };
        write_grid(create(&args.out.join("grid.csv"))?, &header, &grid_rows(&g))?;
    }
    let evaluation_seconds = eval_start.elapsed().as_secs_f64();

    let d = &sol.diagnostics;
    let diag = Diagnostics {
        scene: src.label.clone(),
        scene_hash: hash,
        polarization: src.scene.polarization,
        window_a: a,
        a_over_lambda: a / lambda,
        alpha: args.source.alpha,
        ppw: args.source.ppw,
        unknowns: d.unknowns,
        nodes: d.nodes,
        panels: d.panels,
        residual: d.residual,
        rcond: d.rcond,
        probe_points: src.probe.len(),
        error,
        error_reference,
    };
    write_json(&args.out.join("diagnostics.json"), &diag)?;
    let timings = Timings {
        discretize_seconds: d.discretize_seconds,
        assembly_seconds: d.assembly_seconds,
        rhs_seconds: d.rhs_seconds,
        solve_seconds: d.solve_seconds,
        evaluation_seconds,
        total_seconds: start.elapsed().as_secs_f64(),
    };
    write_json(&args.out.join("timings.json"), &timings)?;
    eprintln!(
        "{}: {} unknowns, residual {:.1e}, {:.2} s{}",
        src.label,
        d.unknowns,
        d.residual,
        timings.total_seconds,
        error.map(|e| format!(", probe error {e:.3e}")).unwrap_or_default()
    );
    Ok(())
}

pub fn cmd_converge(args: &ConvergeArgs) -> Result<()> {
    let mut src = load(&args.source)?;
    let reference = match (&args.reference, args.reference_lambda) {
        (Some(path), _) => {
            let rows = read_reference(path)?;
            src.probe = rows.iter().map(ProbeRow::point).collect();
            Reference::Values(rows.iter().map(ProbeRow::u).collect())
        }
        (None, Some(r)) => Reference::Window(r),
        (None, None) if src.exact_mode => Reference::ExactMode,
        (None, None) => Reference::Window(22.0),
    };
    if src.probe.is_empty() {
        return Err(Error::Config("a scene file needs --probe or --reference".into()));
    }
    let settings = SweepSettings { alpha: args.source.alpha, ppw: args.source.ppw };
    let rows = convergence_sweep(&src.scene, &src.probe, &args.sweep, &reference, settings)?;
    for r in &rows {
        eprintln!("A/lambda {}: error {:.3e}, {} unknowns, {:.2} s", r.a_over_lambda, r.error, r.unknowns, r.seconds);
    }
    let table: Vec<ConvergenceRow> = rows.iter().map(ConvergenceRow::from).collect();
    match &args.out {
        Some(p) => write_rows(create(p)?, &table),
        None => write_rows(std::io::stdout().lock(), &table),
    }
}

pub fn cmd_modes<W: Write>(args: &ModesArgs, out: W) -> Result<()> {
    let spec = SlabSpec::new(args.kco, args.kcl, args.h, args.pol)?;
    let rows: Vec<ModeRow> = find_modes(&spec).iter().map(|m| ModeRow::new(m, dispersion_residual(m, &spec))).collect();
    write_rows(out, &rows)
}

pub fn cmd_window_demo<W: Write>(args: &WindowDemoArgs, out: W) -> Result<()> {
    let rows = args
        .sizes
        .iter()
        .map(|&a| {
            let p = WindowParams::new(a, args.alpha)?;
            Ok(WindowDemoRow::from(&windowed_oscillatory_demo(args.a, &p, args.quadrature_ppw)?))
        })
        .collect::<Result<Vec<_>>>()?;
    write_rows(out, &rows)
}

pub fn cmd_scene(args: &SceneArgs) -> Result<()> {
    let ns = named_scene(&args.name)?;
    let text = scene_to_json(&ns.scene);
    match &args.out {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}
