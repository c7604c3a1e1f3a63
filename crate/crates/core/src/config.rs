//! Run configuration: a flat `key = value` text format with `#` comments.
//! Command-line flags use the same keys and override file values.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::constants::{compute_suffcond, natural_horizon, CostModel, SuffCondConstants};
use crate::error::Error;
use crate::moment::DEFAULT_N_CTRL;
use crate::simulator::SimConfig;
use crate::spectral::SpectralProblem;
use crate::steering::{SteeringConfig, DEFAULT_N_MAX, DEFAULT_TOL_FINAL};

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("cannot read {path}: {msg}")]
    Io { path: String, msg: String },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("invalid value for `{key}`: {msg}")]
    Value { key: String, msg: String },
}

/// A numeric parameter that may be derived automatically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Param {
    Auto,
    Value(f64),
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::Auto => f.write_str("auto"),
            Param::Value(v) => write!(f, "{v}"),
        }
    }
}

impl FromStr for Param {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(Param::Auto);
        }
        let v: f64 = s
            .parse()
            .map_err(|_| format!("expected `auto` or a number, got `{s}`"))?;
        if v > 0.0 && v.is_finite() {
            Ok(Param::Value(v))
        } else {
            Err(format!("must be positive, got {v}"))
        }
    }
}

/// Initial datum in eigencoordinates.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialDatum {
    /// `φ_j + Σ ε_i φ_{k_i}`, written `eigen+eps:k:ε[:k:ε...]` (or `eigen`).
    EigenPlus(Vec<(usize, f64)>),
    /// Explicit coefficients `c_1,c_2,...`.
    Coefficients(Vec<f64>),
}

impl InitialDatum {
    /// Coefficient vector for target index `j`.
    pub fn coefficients(&self, j: usize) -> Vec<f64> {
        match self {
            InitialDatum::Coefficients(c) => c.clone(),
            InitialDatum::EigenPlus(perturb) => {
                let len = perturb.iter().map(|p| p.0).chain([j]).max().unwrap_or(j);
                let mut c = vec![0.0; len];
                c[j - 1] = 1.0;
                for (k, e) in perturb {
                    c[k - 1] += e;
                }
                c
            }
        }
    }
}

impl fmt::Display for InitialDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialDatum::EigenPlus(p) if p.is_empty() => f.write_str("eigen"),
            InitialDatum::EigenPlus(p) => {
                f.write_str("eigen+eps")?;
                for (k, e) in p {
                    write!(f, ":{k}:{e}")?;
                }
                Ok(())
            }
            InitialDatum::Coefficients(c) => {
                let parts: Vec<String> = c.iter().map(|v| v.to_string()).collect();
                f.write_str(&parts.join(","))
            }
        }
    }
}

impl FromStr for InitialDatum {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s == "eigen" {
            return Ok(InitialDatum::EigenPlus(vec![]));
        }
        if let Some(rest) = s.strip_prefix("eigen+eps:") {
            let parts: Vec<&str> = rest.split(':').collect();
            if !parts.len().is_multiple_of(2) {
                return Err("eigen+eps expects index:amplitude pairs".into());
            }
            let mut out = Vec::new();
            for pair in parts.chunks(2) {
                let k: usize = pair[0].parse().map_err(|_| format!("bad mode index `{}`", pair[0]))?;
                if k == 0 {
                    return Err("mode indices are 1-based".into());
                }
                let e: f64 = pair[1].parse().map_err(|_| format!("bad amplitude `{}`", pair[1]))?;
                out.push((k, e));
            }
            return Ok(InitialDatum::EigenPlus(out));
        }
        let coeffs: Result<Vec<f64>, _> = s.split(',').map(|t| t.trim().parse::<f64>()).collect();
        match coeffs {
            Ok(c) if !c.is_empty() && c.iter().all(|v| v.is_finite()) => Ok(InitialDatum::Coefficients(c)),
            _ => Err(format!(
                "expected `eigen+eps:k:eps` or a comma-separated coefficient list, got `{s}`"
            )),
        }
    }
}

/// Which steering strategy `steer` runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Local,
    Semiglobal,
    Cone,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Local => "local",
            Mode::Semiglobal => "semiglobal",
            Mode::Cone => "cone",
        })
    }
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "local" => Ok(Mode::Local),
            "semiglobal" => Ok(Mode::Semiglobal),
            "cone" => Ok(Mode::Cone),
            _ => Err(format!("expected local, semiglobal or cone, got `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: String,
    pub j: usize,
    pub u0: InitialDatum,
    pub horizon: f64,
    pub n_ctrl: usize,
    pub n_sim: usize,
    pub tol_final: f64,
    pub n_max: usize,
    pub strict: bool,
    pub nu: Param,
    pub t0: Param,
    /// Constant of the biorthogonal estimate behind the automatic cost model.
    pub c: f64,
    pub dt_max: f64,
    pub tol_step: f64,
    pub mode: Mode,
    pub radius: f64,
    pub r1: Option<f64>,
    /// Constant control used by `simulate`.
    pub p0: f64,
    pub samples: usize,
    pub report: Option<PathBuf>,
    pub traj: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let sim = SimConfig::default();
        RunConfig {
            problem: "dirichlet-x2".into(),
            j: 1,
            u0: InitialDatum::EigenPlus(vec![(2, 1e-3)]),
            horizon: 1.0,
            n_ctrl: DEFAULT_N_CTRL,
            n_sim: 3 * DEFAULT_N_CTRL,
            tol_final: DEFAULT_TOL_FINAL,
            n_max: DEFAULT_N_MAX,
            strict: false,
            nu: Param::Auto,
            t0: Param::Value(1.0),
            c: 1.0,
            dt_max: sim.dt_max,
            tol_step: sim.tol_step,
            mode: Mode::Local,
            radius: 1.0,
            r1: None,
            p0: 0.0,
            samples: 100,
            report: None,
            traj: None,
            out: None,
        }
    }
}

/// Keys accepted in files and as `--key` flags.
pub const KEYS: &[&str] = &[
    "problem", "j", "u0", "T", "nctrl", "nsim", "tol", "n_max", "strict", "nu", "t0", "C", "dt", "tol_step", "mode",
    "R", "r1", "p0", "samples", "report", "traj", "out",
];

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
    v.parse().map_err(|_| ConfigError::Value {
        key: key.into(),
        msg: format!("cannot parse `{v}`"),
    })
}

fn positive(key: &str, v: f64) -> Result<f64, ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(ConfigError::Value {
            key: key.into(),
            msg: format!("must be positive, got {v}"),
        })
    }
}

fn at_least_one(key: &str, v: usize) -> Result<usize, ConfigError> {
    if v >= 1 {
        Ok(v)
    } else {
        Err(ConfigError::Value {
            key: key.into(),
            msg: "must be at least 1".into(),
        })
    }
}

impl RunConfig {
    /// Set one key from its textual value. Returns `Ok(false)` for unknown keys.
    pub fn set(&mut self, key: &str, value: &str) -> Result<bool, ConfigError> {
        let v = value.trim();
        let err = |msg: String| ConfigError::Value { key: key.into(), msg };
        match key {
            "problem" => {
                SpectralProblem::from_id(v).map_err(|e| err(e.to_string()))?;
                self.problem = v.to_string();
            }
            "j" => self.j = at_least_one(key, parse_num(key, v)?)?,
            "u0" => self.u0 = v.parse().map_err(err)?,
            "T" => self.horizon = positive(key, parse_num(key, v)?)?,
            "nctrl" => self.n_ctrl = at_least_one(key, parse_num(key, v)?)?,
            "nsim" => self.n_sim = at_least_one(key, parse_num(key, v)?)?,
            "tol" => self.tol_final = positive(key, parse_num(key, v)?)?,
            "n_max" => self.n_max = at_least_one(key, parse_num(key, v)?)?,
            "strict" => self.strict = parse_num(key, v)?,
            "nu" => self.nu = v.parse().map_err(err)?,
            "t0" => self.t0 = v.parse().map_err(err)?,
            "C" => {
                let c: f64 = parse_num(key, v)?;
                if !(c >= 1.0) {
                    return Err(err(format!("must be >= 1, got {c}")));
                }
                self.c = c;
            }
            "dt" => self.dt_max = positive(key, parse_num(key, v)?)?,
            "tol_step" => self.tol_step = positive(key, parse_num(key, v)?)?,
            "mode" => self.mode = v.parse().map_err(err)?,
            "R" => self.radius = positive(key, parse_num(key, v)?)?,
            "r1" => {
                self.r1 = if v == "auto" {
                    None
                } else {
                    Some(positive(key, parse_num(key, v)?)?)
                }
            }
            "p0" => self.p0 = parse_num(key, v)?,
            "samples" => self.samples = at_least_one(key, parse_num(key, v)?)?,
            "report" => self.report = Some(PathBuf::from(v)),
            "traj" => self.traj = Some(PathBuf::from(v)),
            "out" => self.out = Some(PathBuf::from(v)),
            _ => return Ok(false),
        }
        Ok(true)
    }

    /// Text that `parse_config` maps back to an equal configuration.
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let mut line = |k: &str, v: String| {
            s.push_str(k);
            s.push_str(" = ");
            s.push_str(&v);
            s.push('\n');
        };
        line("problem", self.problem.clone());
        line("j", self.j.to_string());
        line("u0", self.u0.to_string());
        line("T", self.horizon.to_string());
        line("nctrl", self.n_ctrl.to_string());
        line("nsim", self.n_sim.to_string());
        line("tol", self.tol_final.to_string());
        line("n_max", self.n_max.to_string());
        line("strict", self.strict.to_string());
        line("nu", self.nu.to_string());
        line("t0", self.t0.to_string());
        line("C", self.c.to_string());
        line("dt", self.dt_max.to_string());
        line("tol_step", self.tol_step.to_string());
        line("mode", self.mode.to_string());
        line("R", self.radius.to_string());
        line("r1", self.r1.map_or("auto".to_string(), |v| v.to_string()));
        line("p0", self.p0.to_string());
        line("samples", self.samples.to_string());
        for (k, p) in [("report", &self.report), ("traj", &self.traj), ("out", &self.out)] {
            if let Some(p) = p {
                line(k, p.display().to_string());
            }
        }
        s
    }

    pub fn spectral_problem(&self) -> crate::Result<SpectralProblem> {
        SpectralProblem::from_id(&self.problem)
    }

    pub fn sim_config(&self) -> SimConfig {
        SimConfig {
            n_sim: self.n_sim,
            dt_max: self.dt_max,
            tol_step: self.tol_step,
            ..SimConfig::default()
        }
    }

    /// Resolve `nu`/`t0`, computing the sufficient-condition constants when
    /// either is automatic.
    pub fn cost_model(&self, problem: &SpectralProblem) -> crate::Result<(CostModel, Option<SuffCondConstants>)> {
        resolve_cost_model(problem, self.j, self.nu, self.t0, self.c)
    }

    pub fn steering_config(&self, problem: &SpectralProblem) -> crate::Result<SteeringConfig> {
        let (cost_model, suffcond) = self.cost_model(problem)?;
        let mut cfg = SteeringConfig::new(cost_model);
        cfg.n_ctrl = self.n_ctrl;
        cfg.tol_final = self.tol_final;
        cfg.n_max = self.n_max;
        cfg.strict = self.strict;
        cfg.sim = self.sim_config();
        cfg.r1_override = self.r1;
        cfg.suffcond = suffcond;
        Ok(cfg)
    }
}

/// `ν = Γ_j` on its natural horizon `min(1, 1/α²)`, rescaled when a longer
/// horizon is requested; explicit values pass through.
pub fn resolve_cost_model(
    problem: &SpectralProblem,
    j: usize,
    nu: Param,
    t0: Param,
    c: f64,
) -> crate::Result<(CostModel, Option<SuffCondConstants>)> {
    let t0v = match t0 {
        Param::Auto => natural_horizon(problem),
        Param::Value(v) => v,
    };
    match nu {
        Param::Value(v) => Ok((CostModel::new(v, t0v)?, None)),
        Param::Auto => {
            let s = compute_suffcond(problem, j, c)?;
            Ok((CostModel::from_suffcond_on(problem, &s, t0v)?, Some(s)))
        }
    }
}

/// Parse configuration text on top of the defaults.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Parse {
            line: line_no,
            msg: format!("expected `key = value`, got `{line}`"),
        })?;
        let key = key.trim();
        if key.is_empty() || key.contains(char::is_whitespace) {
            return Err(ConfigError::Parse {
                line: line_no,
                msg: format!("malformed key `{key}`"),
            });
        }
        match cfg.set(key, value) {
            Ok(true) => {}
            Ok(false) => {
                return Err(ConfigError::UnknownKey {
                    line: line_no,
                    key: key.into(),
                })
            }
            Err(ConfigError::Value { key, msg }) => {
                return Err(ConfigError::Parse {
                    line: line_no,
                    msg: format!("`{key}`: {msg}"),
                })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(cfg)
}

/// Read and parse a configuration file.
pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })?;
    parse_config(&text)
}

impl From<Error> for ConfigError {
    fn from(e: Error) -> Self {
        ConfigError::Value {
            key: String::new(),
            msg: e.to_string(),
        }
    }
}
