//! Command-line front end. `run` returns the process exit code.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::config::{load_config, ConfigError, Mode, RunConfig};
use crate::constants::{log_control_norm_bound, SteeringConstants};
use crate::control::{ConstantControl, Control};
use crate::moment::empirical_cost;
use crate::numerics::norm;
use crate::simulator::{frame_sigma, GalerkinSystem};
use crate::spectral::{gallery, SpectralProblem};
use crate::steering::{steer_local, steer_semiglobal, steer_to_projection, SteerFailure, StopReason};
use crate::verify::run_checks;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_MAX_WINDOWS: i32 = 2;
pub const EXIT_DIVERGENCE: i32 = 3;
pub const EXIT_PRECONDITION: i32 = 4;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_IO: i32 = 74;

#[derive(Debug, Parser)]
#[command(
    name = "eigensteer",
    version,
    about = "Steer bilinear parabolic systems onto eigensolutions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List the built-in spectral problems.
    Gallery,
    /// Print every constant of the local steering estimate as JSON.
    Constants(RunArgs),
    /// Tabulate the empirical control cost against its bound.
    Cost(CostArgs),
    /// Integrate the Galerkin system under a constant control.
    Simulate(RunArgs),
    /// Synthesize a steering control and report every window.
    Steer(RunArgs),
    /// Run the built-in self-checks.
    Verify(VerifyArgs),
}

/// Flags shared by the run commands; each one overrides the config key of the
/// same name.
#[derive(Debug, Args, Default)]
struct RunArgs {
    /// Configuration file with `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    problem: Option<String>,
    /// Target eigenfunction index (1-based).
    #[arg(long)]
    j: Option<String>,
    /// Initial datum: `eigen+eps:k:eps[:k:eps...]` or `c1,c2,...`.
    #[arg(long, allow_hyphen_values = true)]
    u0: Option<String>,
    /// Horizon T.
    #[arg(long = "T")]
    horizon: Option<String>,
    #[arg(long)]
    nctrl: Option<String>,
    #[arg(long)]
    nsim: Option<String>,
    /// Stop once the deviation is below this value.
    #[arg(long)]
    tol: Option<String>,
    #[arg(long = "n-max")]
    n_max: Option<String>,
    /// Abort on hypothesis violations instead of flagging them.
    #[arg(long)]
    strict: bool,
    /// Cost exponent ν, or `auto`.
    #[arg(long)]
    nu: Option<String>,
    /// Cost horizon T0, or `auto`.
    #[arg(long)]
    t0: Option<String>,
    /// Constant of the biorthogonal estimate (C ≥ 1).
    #[arg(long = "C")]
    c: Option<String>,
    /// Maximum time step.
    #[arg(long)]
    dt: Option<String>,
    #[arg(long = "tol-step")]
    tol_step: Option<String>,
    /// local, semiglobal or cone.
    #[arg(long)]
    mode: Option<String>,
    /// Radius for the semiglobal and cone modes.
    #[arg(long = "R")]
    radius: Option<String>,
    /// Override of the local-phase radius r1, or `auto`.
    #[arg(long)]
    r1: Option<String>,
    /// Constant control used by `simulate`.
    #[arg(long, allow_hyphen_values = true)]
    p0: Option<String>,
    /// Number of output intervals in trajectory files.
    #[arg(long)]
    samples: Option<String>,
    /// Where to write the JSON report (default: stdout).
    #[arg(long)]
    report: Option<String>,
    /// Where to write the trajectory CSV.
    #[arg(long)]
    traj: Option<String>,
    /// Where to write the primary output (default: stdout).
    #[arg(long)]
    out: Option<String>,
}

#[derive(Debug, Args)]
struct CostArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Comma-separated horizons.
    #[arg(long, default_value = "0.05,0.1,0.2,0.5,1")]
    tgrid: String,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Restrict problem-specific checks to one problem.
    #[arg(long)]
    problem: Option<String>,
    /// Emit JSON instead of a table.
    #[arg(long)]
    json: bool,
}

/// Error that maps to an exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(m: impl ToString) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: m.to_string(),
        }
    }
    fn io(m: impl ToString) -> Self {
        Failure {
            code: EXIT_IO,
            message: m.to_string(),
        }
    }
    fn failed(m: impl ToString) -> Self {
        Failure {
            code: EXIT_FAILURE,
            message: m.to_string(),
        }
    }
}

impl From<crate::Error> for Failure {
    fn from(e: crate::Error) -> Self {
        Failure::failed(e)
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Io { .. } => Failure::io(e),
            _ => Failure::usage(e),
        }
    }
}

impl RunArgs {
    fn resolve(&self) -> Result<RunConfig, Failure> {
        let mut cfg = match &self.config {
            Some(path) => load_config(path)?,
            None => RunConfig::default(),
        };
        let pairs = [
            ("problem", &self.problem),
            ("j", &self.j),
            ("u0", &self.u0),
            ("T", &self.horizon),
            ("nctrl", &self.nctrl),
            ("nsim", &self.nsim),
            ("tol", &self.tol),
            ("n_max", &self.n_max),
            ("nu", &self.nu),
            ("t0", &self.t0),
            ("C", &self.c),
            ("dt", &self.dt),
            ("tol_step", &self.tol_step),
            ("mode", &self.mode),
            ("R", &self.radius),
            ("r1", &self.r1),
            ("p0", &self.p0),
            ("samples", &self.samples),
            ("report", &self.report),
            ("traj", &self.traj),
            ("out", &self.out),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                cfg.set(key, v).map_err(|e| Failure::usage(format!("--{key}: {e}")))?;
            }
        }
        if self.strict {
            cfg.strict = true;
        }
        Ok(cfg)
    }
}

fn write_target(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::io(format!("cannot write {}: {e}", p.display()))),
        None => out.write_all(text.as_bytes()).map_err(Failure::io),
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(value).map_err(Failure::failed)?;
    s.push('\n');
    Ok(s)
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn cmd_gallery(out: &mut dyn Write) -> Result<i32, Failure> {
    let mut s = String::from("id,index_origin,alpha,sigma,b_norm,q,decay_b,lambda_1,lambda_2\n");
    for p in gallery() {
        let b = p.decay_b()?;
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            p.name(),
            p.index_origin,
            num(p.gap_alpha),
            num(p.sigma),
            num(p.b_norm),
            num(p.decay_exponent),
            num(b),
            num(p.eigenvalue(1)),
            num(p.eigenvalue(2)),
        ));
    }
    write_target(None, &s, out)?;
    Ok(EXIT_OK)
}

fn cmd_constants(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32, Failure> {
    let problem = cfg.spectral_problem()?;
    let (model, suff) = cfg.cost_model(&problem)?;
    let suff = match suff {
        Some(s) => s,
        None => crate::constants::compute_suffcond(&problem, cfg.j, cfg.c)?,
    };
    let sigma = frame_sigma(&problem, problem.eigenvalue(cfg.j));
    let c = SteeringConstants::new(&model, problem.b_norm, sigma, cfg.horizon)?;
    let value = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "problem": problem.name(),
        "j": cfg.j,
        "T": cfg.horizon,
        "C": suff.c,
        "nu": model.nu,
        "T0": model.t0,
        "sigma": sigma,
        "B_norm": problem.b_norm,
        "D": c.d,
        "Gamma0": c.gamma0,
        "T1": c.t1,
        "Tf": c.tf,
        "RT": c.rt,
        "logRT": c.log_rt,
        "log_control_norm_bound": log_control_norm_bound(c.gamma0, c.tf),
        "GammaJ": suff.gamma_j,
        "M": suff.m,
        "Cq": suff.cq,
        "Cqa": suff.cqa,
        "alpha": suff.alpha,
        "q": suff.q,
        "b": suff.b,
        "b_jj": suff.b_jj,
    });
    write_target(cfg.out.as_deref(), &to_json(&value)?, out)?;
    Ok(EXIT_OK)
}

fn cmd_cost(cfg: &RunConfig, tgrid: &str, out: &mut dyn Write) -> Result<i32, Failure> {
    let problem = cfg.spectral_problem()?;
    let (model, _) = cfg.cost_model(&problem)?;
    let grid: Vec<f64> = tgrid
        .split(',')
        .map(|t| t.trim().parse::<f64>().ok().filter(|v| *v > 0.0 && v.is_finite()))
        .collect::<Option<_>>()
        .ok_or_else(|| Failure::usage(format!("--tgrid: expected positive numbers, got `{tgrid}`")))?;
    let mut s = String::from("T,empirical_cost,bound,log_bound,condition\n");
    let mut prev: Option<f64> = None;
    for t in grid {
        let cost = empirical_cost(&problem, cfg.j, t, cfg.n_ctrl)?;
        let mp = crate::moment::build_moment_problem(&problem, cfg.j, &vec![0.0; cfg.n_ctrl], t, cfg.n_ctrl)?;
        let cond = mp.gram().condition;
        let log_bound = model.nu / t;
        if let Some(p) = prev {
            if cost > p * (1.0 + 1e-9) {
                eprintln!("note: empirical cost increases at T = {t}");
            }
        }
        prev = Some(cost);
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            num(t),
            num(cost),
            num(log_bound.exp()),
            num(log_bound),
            num(cond)
        ));
    }
    write_target(cfg.out.as_deref(), &s, out)?;
    Ok(EXIT_OK)
}

/// Sample the bilinear system at `samples + 1` uniform times on `[0, t_end]`.
fn sample_csv(
    problem: &SpectralProblem,
    cfg: &RunConfig,
    u0: &[f64],
    control: &dyn Control,
    t_end: f64,
    target: Option<usize>,
) -> Result<String, Failure> {
    let n = cfg.n_sim;
    if u0.len() > n {
        return Err(Failure::usage(format!("datum has {} modes but nsim = {n}", u0.len())));
    }
    let system = GalerkinSystem::new(problem, n, 0.0, None)?;
    let sim = cfg.sim_config();
    let mut header = vec!["t".to_string()];
    header.extend((1..=n).map(|k| format!("u_{k}")));
    header.push("norm".into());
    if target.is_some() {
        header.push("deviation".into());
    }
    header.push("p".into());
    let mut s = header.join(",");
    s.push('\n');
    let mut x = u0.to_vec();
    x.resize(n, 0.0);
    let row = |t: f64, x: &[f64]| {
        let mut cols = vec![num(t)];
        cols.extend(x.iter().map(|v| num(*v)));
        cols.push(num(norm(x)));
        if let Some(j) = target {
            let mut d = x.to_vec();
            d[j - 1] -= (-problem.eigenvalue(j) * t).exp();
            cols.push(num(norm(&d)));
        }
        cols.push(num(control.value(t)));
        cols.join(",") + "\n"
    };
    s.push_str(&row(0.0, &x));
    let steps = cfg.samples;
    let mut t = 0.0;
    for i in 1..=steps {
        let next = t_end * i as f64 / steps as f64;
        let traj = system.integrate(&x, control, (t, next), &sim)?;
        x = traj.final_state().to_vec();
        t = next;
        s.push_str(&row(t, &x));
    }
    Ok(s)
}

fn cmd_simulate(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32, Failure> {
    let problem = cfg.spectral_problem()?;
    let u0 = cfg.u0.coefficients(cfg.j);
    let csv = sample_csv(&problem, cfg, &u0, &ConstantControl(cfg.p0), cfg.horizon, None)?;
    let target = cfg.out.as_deref().or(cfg.traj.as_deref());
    write_target(target, &csv, out)?;
    Ok(EXIT_OK)
}

fn cmd_steer(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32, Failure> {
    let problem = cfg.spectral_problem()?;
    let scfg = cfg.steering_config(&problem)?;
    let u0 = cfg.u0.coefficients(cfg.j);
    let outcome = match cfg.mode {
        Mode::Local => steer_local(&problem, cfg.j, &u0, cfg.horizon, &scfg).map(|o| {
            let code = if o.report.stop == StopReason::MaxWindows {
                EXIT_MAX_WINDOWS
            } else {
                EXIT_OK
            };
            let t_end = o.report.final_time;
            (serde_json::to_value(&o.report), o.control, t_end, code, cfg.j)
        }),
        Mode::Semiglobal => steer_semiglobal(&problem, &u0, cfg.radius, &scfg).map(|o| {
            let code = if o.report.local.stop == StopReason::MaxWindows {
                EXIT_MAX_WINDOWS
            } else {
                EXIT_OK
            };
            let t_end = o.report.total_time;
            (serde_json::to_value(&o.report), o.control, t_end, code, 1)
        }),
        Mode::Cone => steer_to_projection(&problem, &u0, cfg.radius, &scfg).map(|o| {
            let code = match &o.report.semiglobal {
                Some(sg) if sg.local.stop == StopReason::MaxWindows => EXIT_MAX_WINDOWS,
                _ => EXIT_OK,
            };
            let t_end = o.report.total_time;
            (serde_json::to_value(&o.report), o.control, t_end, code, 1)
        }),
    };
    match outcome {
        Ok((report, control, t_end, code, target)) => {
            let report = report.map_err(Failure::failed)?;
            write_target(cfg.report.as_deref(), &to_json(&report)?, out)?;
            if let Some(path) = &cfg.traj {
                // Only the local mode steers onto ψ_j; the others report the plain norm.
                let dev = (cfg.mode == Mode::Local).then_some(target);
                let csv = sample_csv(&problem, cfg, &u0, &control, t_end, dev)?;
                write_target(Some(path), &csv, out)?;
            }
            Ok(code)
        }
        Err(SteerFailure::Divergence(report)) => {
            write_target(cfg.report.as_deref(), &to_json(&report)?, out)?;
            eprintln!("error: deviation grew on two consecutive windows");
            Ok(EXIT_DIVERGENCE)
        }
        Err(SteerFailure::Precondition(m)) => {
            eprintln!("error: precondition violated: {m}");
            Ok(EXIT_PRECONDITION)
        }
        Err(SteerFailure::Failed(e)) => Err(Failure::failed(e)),
    }
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let only = match &args.problem {
        Some(id) => Some(SpectralProblem::from_id(id).map_err(Failure::usage)?),
        None => None,
    };
    let checks = run_checks(only.as_ref());
    let text = if args.json {
        to_json(&checks)?
    } else {
        let mut s = String::new();
        for c in &checks {
            s.push_str(&format!(
                "{:<4}  {:<24} {:<13} {}\n",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.problem.as_deref().unwrap_or("-"),
                c.detail
            ));
        }
        let failed = checks.iter().filter(|c| !c.passed).count();
        s.push_str(&format!("{} checks, {failed} failed\n", checks.len()));
        s
    };
    write_target(None, &text, out)?;
    Ok(if checks.iter().all(|c| c.passed) {
        EXIT_OK
    } else {
        EXIT_FAILURE
    })
}

/// Parse `args` (including the program name) and run the command.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            if e.use_stderr() {
                eprint!("{e}");
            } else {
                let _ = write!(out, "{e}");
            }
            return code;
        }
    };
    let result = match &cli.command {
        Command::Gallery => cmd_gallery(out),
        Command::Constants(a) => a.resolve().and_then(|c| cmd_constants(&c, out)),
        Command::Cost(a) => a.run.resolve().and_then(|c| cmd_cost(&c, &a.tgrid, out)),
        Command::Simulate(a) => a.resolve().and_then(|c| cmd_simulate(&c, out)),
        Command::Steer(a) => a.resolve().and_then(|c| cmd_steer(&c, out)),
        Command::Verify(a) => cmd_verify(a, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}
