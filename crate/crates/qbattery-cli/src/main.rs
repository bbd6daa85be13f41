//! `qbattery` — deterministic CSV grids and cross-checks for the two-qubit
//! battery charging model.
//!
//! Subcommands map onto the experiments: `dynamics` (stored energy and power
//! over coupling and time), `steady` (long-time observables over the
//! initial-state/coupling plane), `plane` (observables over the
//! energy-transfer plane), `point` (full report at a single time) and
//! `verify` (the oracle cross-check suite).
//!
//! Exit codes: 0 on success, 1 on usage or validation errors, 2 when
//! verification fails.

mod config;

use std::f64::consts::PI;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::ConfigMap;
use qbattery::params::{self, ModelParams};
use qbattery::sweeps::{self, AxisSpec, SweepGrid, CSV_HEADER};
use qbattery::verify::{self, Tolerances};

#[derive(Parser)]
#[command(
    name = "qbattery",
    version,
    about = "Two-qubit battery charging through a common reservoir: energetics, \
             entanglement and entropic-uncertainty sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Stored energy, power and uncertainty observables over (R, lt)
    Dynamics(DynamicsArgs),
    /// Steady-state observables over (theta, zeta1) at fixed phase
    Steady(SteadyArgs),
    /// Observables over the energy-transfer plane (|eta1|^2, |eta2|^2)
    Plane(PlaneArgs),
    /// Full report at a single (params, lt) point as one CSV row
    Point(PointArgs),
    /// Run the oracle cross-check suite and print a pass/fail table
    Verify(VerifyArgs),
}

#[derive(Args, Clone)]
struct ModelArgs {
    /// Config file with key = value lines; CLI flags override it
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Spectral width lambda > 0 [default: 1]
    #[arg(long)]
    lambda: Option<f64>,
    /// Coupling ratio R = L/lambda >= 0 [default: 0.3]
    #[arg(long = "R")]
    coupling_ratio: Option<f64>,
    /// Relative charger-reservoir strength in [0, 1] [default: 1/sqrt(2)]
    #[arg(long)]
    zeta1: Option<f64>,
    /// Relative battery-reservoir strength; derived from zeta1 when omitted
    #[arg(long)]
    zeta2: Option<f64>,
    /// Initial-state angle theta in radians, within [0, pi/2] [default: pi/2]
    #[arg(long, conflicts_with = "theta_pi")]
    theta: Option<f64>,
    /// Convenience form: theta = X * pi
    #[arg(long, value_name = "X")]
    theta_pi: Option<f64>,
    /// Relative phase phi in radians [default: 0]
    #[arg(long, conflicts_with = "phi_pi")]
    phi: Option<f64>,
    /// Convenience form: phi = X * pi
    #[arg(long, value_name = "X")]
    phi_pi: Option<f64>,
    /// Qubit transition frequency omega0 > 0 [default: 1]
    #[arg(long)]
    omega0: Option<f64>,
}

#[derive(Args, Clone)]
struct IoArgs {
    /// Output CSV path; stdout when omitted
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Worker-thread cap for grid evaluation; 0 means all cores. Any value
    /// produces byte-identical output [default: 0]
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct DynamicsArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    io: IoArgs,
    /// Lower end of the coupling-ratio axis [default: 0]
    #[arg(long)]
    r_min: Option<f64>,
    /// Upper end of the coupling-ratio axis [default: 1]
    #[arg(long)]
    r_max: Option<f64>,
    /// Points on the coupling-ratio axis [default: 21]
    #[arg(long)]
    r_points: Option<usize>,
    /// Upper end of the dimensionless-time axis (starts at 0) [default: 20]
    #[arg(long)]
    lt_max: Option<f64>,
    /// Requested points on the time axis [default: 2001]
    #[arg(long)]
    lt_points: Option<usize>,
    /// Time-axis densification factor; omit for automatic
    /// ceil(max(1, r-max)) capped at 64, pass 1 to disable
    #[arg(long)]
    densify: Option<usize>,
}

#[derive(Args)]
struct SteadyArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    io: IoArgs,
    /// Lower end of the theta axis [default: 0.25*pi]
    #[arg(long)]
    theta_min: Option<f64>,
    /// Upper end of the theta axis [default: 0.5*pi]
    #[arg(long)]
    theta_max: Option<f64>,
    /// Points on the theta axis [default: 201]
    #[arg(long)]
    theta_points: Option<usize>,
    /// Lower end of the zeta1 axis [default: 0]
    #[arg(long)]
    zeta1_min: Option<f64>,
    /// Upper end of the zeta1 axis [default: 1]
    #[arg(long)]
    zeta1_max: Option<f64>,
    /// Points on the zeta1 axis [default: 201]
    #[arg(long)]
    zeta1_points: Option<usize>,
}

#[derive(Args)]
struct PlaneArgs {
    #[command(flatten)]
    io: IoArgs,
    /// Config file with key = value lines; CLI flags override it
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Lower end of the |eta1|^2 axis [default: 0]
    #[arg(long)]
    a_min: Option<f64>,
    /// Upper end of the |eta1|^2 axis [default: 1]
    #[arg(long)]
    a_max: Option<f64>,
    /// Points on the |eta1|^2 axis [default: 201]
    #[arg(long)]
    a_points: Option<usize>,
    /// Lower end of the |eta2|^2 axis [default: 0]
    #[arg(long)]
    b_min: Option<f64>,
    /// Upper end of the |eta2|^2 axis [default: 1]
    #[arg(long)]
    b_max: Option<f64>,
    /// Points on the |eta2|^2 axis [default: 201]
    #[arg(long)]
    b_points: Option<usize>,
}

#[derive(Args)]
struct PointArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    io: IoArgs,
    /// Dimensionless time lambda*t >= 0 (required here or in the config)
    #[arg(long)]
    lt: Option<f64>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Config file with key = value lines; CLI flags override it
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Kernel-vs-RK4 sup-norm tolerance [default: 1e-8]
    #[arg(long)]
    tol_ode: Option<f64>,
    /// Closed-form EUR vs channel-route tolerance [default: 1e-10]
    #[arg(long)]
    tol_eur: Option<f64>,
    /// Concurrence route-consistency tolerance [default: 1e-12]
    #[arg(long)]
    tol_concurrence: Option<f64>,
    /// Eigensolver reconstruction tolerance [default: 1e-10]
    #[arg(long)]
    tol_eig: Option<f64>,
    /// Partial-trace consistency tolerance [default: 1e-12]
    #[arg(long)]
    tol_trace: Option<f64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn load_config(path: &Option<PathBuf>) -> Result<ConfigMap, String> {
    match path {
        None => Ok(ConfigMap::default()),
        Some(p) => ConfigMap::load(p).map_err(|e| e.to_string()),
    }
}

/// Radian/`*pi` angle pair, CLI over config over default; giving both forms
/// at the same level is ambiguous and rejected.
fn resolve_angle(
    cli_rad: Option<f64>,
    cli_pi: Option<f64>,
    cfg: &mut ConfigMap,
    rad_key: &str,
    pi_key: &str,
    default: f64,
) -> Result<f64, String> {
    let cfg_rad = cfg.take_f64(rad_key).map_err(|e| e.to_string())?;
    let cfg_pi = cfg.take_f64(pi_key).map_err(|e| e.to_string())?;
    if let Some(x) = cli_pi {
        return Ok(x * PI);
    }
    if let Some(x) = cli_rad {
        return Ok(x);
    }
    match (cfg_rad, cfg_pi) {
        (Some(_), Some(_)) => Err(format!("config sets both `{rad_key}` and `{pi_key}`")),
        (_, Some(x)) => Ok(x * PI),
        (Some(x), _) => Ok(x),
        (None, None) => Ok(default),
    }
}

fn resolve_model(args: &ModelArgs, cfg: &mut ConfigMap) -> Result<ModelParams, String> {
    let take = |cfg: &mut ConfigMap, key: &str| cfg.take_f64(key).map_err(|e| e.to_string());
    let lambda = args.lambda.or(take(cfg, "lambda")?).unwrap_or(1.0);
    let coupling_ratio = args.coupling_ratio.or(take(cfg, "R")?).unwrap_or(0.3);
    let omega0 = args.omega0.or(take(cfg, "omega0")?).unwrap_or(1.0);
    let theta = resolve_angle(args.theta, args.theta_pi, cfg, "theta", "theta-pi", PI / 2.0)?;
    let phi = resolve_angle(args.phi, args.phi_pi, cfg, "phi", "phi-pi", 0.0)?;
    let zeta1 = args.zeta1.or(take(cfg, "zeta1")?);
    let zeta2 = args.zeta2.or(take(cfg, "zeta2")?);
    let (zeta1, zeta2) = match (zeta1, zeta2) {
        (None, None) => (std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2),
        (Some(z1), None) => {
            if !(0.0..=1.0).contains(&z1) {
                return Err(format!("zeta1 = {z1} must lie in [0, 1]"));
            }
            (z1, (1.0 - z1 * z1).sqrt())
        }
        (None, Some(z2)) => {
            if !(0.0..=1.0).contains(&z2) {
                return Err(format!("zeta2 = {z2} must lie in [0, 1]"));
            }
            ((1.0 - z2 * z2).sqrt(), z2)
        }
        (Some(z1), Some(z2)) => (z1, z2),
    };
    params::validate(ModelParams {
        lambda,
        coupling_ratio,
        zeta1,
        zeta2,
        theta,
        phi,
        omega0,
    })
    .map_err(|e| e.to_string())
}

struct Io {
    output: Option<PathBuf>,
    workers: usize,
}

fn resolve_io(args: &IoArgs, cfg: &mut ConfigMap) -> Result<Io, String> {
    let output = args
        .output
        .clone()
        .or_else(|| cfg.take_string("output").map(PathBuf::from));
    let workers = match args.workers {
        Some(w) => w,
        None => cfg.take_usize("workers").map_err(|e| e.to_string())?.unwrap_or(0),
    };
    Ok(Io { output, workers })
}

fn emit(io: &Io, csv: &str) -> Result<(), String> {
    match &io.output {
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(csv.as_bytes()).map_err(|e| e.to_string())
        }
        Some(path) => std::fs::write(path, csv)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
    }
}

fn emit_grid(io: &Io, grid: &SweepGrid) -> Result<(), String> {
    emit(io, &grid.to_csv())
}

fn axis(
    name: &str,
    min: Option<f64>,
    max: Option<f64>,
    points: Option<usize>,
    defaults: (f64, f64, usize),
) -> Result<AxisSpec, String> {
    AxisSpec::new(
        name,
        min.unwrap_or(defaults.0),
        max.unwrap_or(defaults.1),
        points.unwrap_or(defaults.2),
    )
    .map_err(|e| e.to_string())
}

fn run(cli: Cli) -> Result<u8, String> {
    match cli.command {
        Command::Dynamics(args) => {
            let mut cfg = load_config(&args.model.config)?;
            let model = resolve_model(&args.model, &mut cfg)?;
            let io = resolve_io(&args.io, &mut cfg)?;
            let take = |cfg: &mut ConfigMap, k: &str| cfg.take_f64(k).map_err(|e| e.to_string());
            let takeu = |cfg: &mut ConfigMap, k: &str| cfg.take_usize(k).map_err(|e| e.to_string());
            let r_axis = axis(
                "R",
                args.r_min.or(take(&mut cfg, "r-min")?),
                args.r_max.or(take(&mut cfg, "r-max")?),
                args.r_points.or(takeu(&mut cfg, "r-points")?),
                (0.0, 1.0, 21),
            )?;
            let lt_axis = axis(
                "lt",
                Some(0.0),
                args.lt_max.or(take(&mut cfg, "lt-max")?),
                args.lt_points.or(takeu(&mut cfg, "lt-points")?),
                (0.0, 20.0, 2001),
            )?;
            let densify = match args.densify {
                Some(d) => Some(d),
                None => takeu(&mut cfg, "densify")?,
            };
            cfg.finish("dynamics").map_err(|e| e.to_string())?;
            let grid = sweeps::with_worker_pool(io.workers, || {
                sweeps::sweep_dynamics(&model, &r_axis, &lt_axis, densify)
            })
            .map_err(|e| e.to_string())?;
            emit_grid(&io, &grid)?;
            Ok(0)
        }
        Command::Steady(args) => {
            let mut cfg = load_config(&args.model.config)?;
            let model = resolve_model(&args.model, &mut cfg)?;
            let io = resolve_io(&args.io, &mut cfg)?;
            let take = |cfg: &mut ConfigMap, k: &str| cfg.take_f64(k).map_err(|e| e.to_string());
            let takeu = |cfg: &mut ConfigMap, k: &str| cfg.take_usize(k).map_err(|e| e.to_string());
            let theta_axis = axis(
                "theta",
                args.theta_min.or(take(&mut cfg, "theta-min")?),
                args.theta_max.or(take(&mut cfg, "theta-max")?),
                args.theta_points.or(takeu(&mut cfg, "theta-points")?),
                (0.25 * PI, 0.5 * PI, 201),
            )?;
            let zeta_axis = axis(
                "zeta1",
                args.zeta1_min.or(take(&mut cfg, "zeta1-min")?),
                args.zeta1_max.or(take(&mut cfg, "zeta1-max")?),
                args.zeta1_points.or(takeu(&mut cfg, "zeta1-points")?),
                (0.0, 1.0, 201),
            )?;
            cfg.finish("steady").map_err(|e| e.to_string())?;
            let grid = sweeps::with_worker_pool(io.workers, || {
                sweeps::sweep_steady(&model, &theta_axis, &zeta_axis)
            })
            .map_err(|e| e.to_string())?;
            emit_grid(&io, &grid)?;
            Ok(0)
        }
        Command::Plane(args) => {
            let mut cfg = load_config(&args.config)?;
            let io = resolve_io(&args.io, &mut cfg)?;
            let take = |cfg: &mut ConfigMap, k: &str| cfg.take_f64(k).map_err(|e| e.to_string());
            let takeu = |cfg: &mut ConfigMap, k: &str| cfg.take_usize(k).map_err(|e| e.to_string());
            let a_axis = axis(
                "a",
                args.a_min.or(take(&mut cfg, "a-min")?),
                args.a_max.or(take(&mut cfg, "a-max")?),
                args.a_points.or(takeu(&mut cfg, "a-points")?),
                (0.0, 1.0, 201),
            )?;
            let b_axis = axis(
                "b",
                args.b_min.or(take(&mut cfg, "b-min")?),
                args.b_max.or(take(&mut cfg, "b-max")?),
                args.b_points.or(takeu(&mut cfg, "b-points")?),
                (0.0, 1.0, 201),
            )?;
            cfg.finish("plane").map_err(|e| e.to_string())?;
            let grid = sweeps::with_worker_pool(io.workers, || {
                sweeps::sweep_transfer_plane(&a_axis, &b_axis)
            })
            .map_err(|e| e.to_string())?;
            emit_grid(&io, &grid)?;
            Ok(0)
        }
        Command::Point(args) => {
            let mut cfg = load_config(&args.model.config)?;
            let model = resolve_model(&args.model, &mut cfg)?;
            let io = resolve_io(&args.io, &mut cfg)?;
            let lt = match args.lt {
                Some(lt) => lt,
                None => cfg
                    .take_f64("lt")
                    .map_err(|e| e.to_string())?
                    .ok_or("`point` needs --lt (or `lt` in the config file)")?,
            };
            if lt < 0.0 {
                return Err(format!("lt = {lt} must be nonnegative"));
            }
            cfg.finish("point").map_err(|e| e.to_string())?;
            let record = sweeps::point_record(&model, lt).map_err(|e| e.to_string())?;
            emit(&io, &format!("{CSV_HEADER}\n{}\n", record.to_csv_row()))?;
            Ok(0)
        }
        Command::Verify(args) => {
            let mut cfg = load_config(&args.config)?;
            let take = |cfg: &mut ConfigMap, k: &str| cfg.take_f64(k).map_err(|e| e.to_string());
            let defaults = Tolerances::default();
            let tol = Tolerances {
                ode_sup: args.tol_ode.or(take(&mut cfg, "tol-ode")?).unwrap_or(defaults.ode_sup),
                eur: args.tol_eur.or(take(&mut cfg, "tol-eur")?).unwrap_or(defaults.eur),
                concurrence: args
                    .tol_concurrence
                    .or(take(&mut cfg, "tol-concurrence")?)
                    .unwrap_or(defaults.concurrence),
                eig: args.tol_eig.or(take(&mut cfg, "tol-eig")?).unwrap_or(defaults.eig),
                partial_trace: args
                    .tol_trace
                    .or(take(&mut cfg, "tol-trace")?)
                    .unwrap_or(defaults.partial_trace),
            };
            cfg.finish("verify").map_err(|e| e.to_string())?;
            let checks = verify::run_all(&tol);
            let mut all_passed = true;
            println!("{:<32} {:<6} detail", "check", "result");
            for check in &checks {
                let status = if check.passed { "PASS" } else { "FAIL" };
                all_passed &= check.passed;
                println!("{:<32} {:<6} {}", check.name, status, check.detail);
            }
            if all_passed {
                println!("all {} checks passed", checks.len());
                Ok(0)
            } else {
                println!("verification FAILED");
                Ok(2)
            }
        }
    }
}
