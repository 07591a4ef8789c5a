//! Command-line front end. The `freediff` binary only calls [`main_with_args`].
//!
//! Exit status: 0 when every check passed, 2 when checks ran and some
//! failed, 1 on operational errors (bad flags, I/O, invalid configuration).

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::convexity::{certify_with, CertifyOptions, ConvexityError, GapKind};
use crate::laws::{sample_stationary_law, LawError, MomentReport, StationaryProtocol, Tolerance};
use crate::matmodel::{brownian_increment, rescale_to_norm, MatrixTuple, RngStream};
use crate::ncpoly::{NCPoly, PolyError};
use crate::polylang::{parse_poly, ParseError};
use crate::sde::{
    coupled_simulate, fmt17, simulate_replicas, write_distance_csv, write_trajectory_csv, SdeConfig, SdeError,
    Trajectory,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("invalid config: {0}")]
    Config(String),
    #[error("{what}: {err}")]
    Parse { what: String, err: ParseError },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Sde(#[from] SdeError),
    #[error(transparent)]
    Law(#[from] LawError),
    #[error(transparent)]
    Convexity(#[from] ConvexityError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Passed,
    ChecksFailed,
}

impl Outcome {
    fn from_pass(pass: bool) -> Self {
        if pass {
            Outcome::Passed
        } else {
            Outcome::ChecksFailed
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Passed => 0,
            Outcome::ChecksFailed => 2,
        }
    }
}

pub fn exit_code(result: &Result<Outcome, CliError>) -> i32 {
    match result {
        Ok(o) => o.exit_code(),
        Err(_) => 1,
    }
}

#[derive(Debug, Parser)]
#[command(name = "freediff", version, about = "Free diffusion simulator and checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Debug, Default, Args)]
pub struct CommonArgs {
    /// JSON experiment config.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Master seed; overrides the config.
    #[arg(long, value_name = "U64")]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Replica count; overrides the config.
    #[arg(long, value_name = "R")]
    pub replicas: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the cyclic gradient and the difference quotient.
    Grad {
        /// Polynomial text; defaults to the config potential.
        poly: Option<String>,
        /// Variable index `i`, 1-based.
        #[arg(long, short)]
        index: Option<usize>,
        /// Number of variables; inferred from the text by default.
        #[arg(long)]
        nvars: Option<usize>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Simulate trajectories and write CSV plus a JSON summary.
    Simulate(CommonArgs),
    /// Estimate the stationary law and run the Schwinger–Dyson suite.
    SdCheck(CommonArgs),
    /// Couple runs from `Z` and `0` and fit the contraction rate.
    Couple(CommonArgs),
    /// Certify or refute (c, M)-convexity of the potential.
    Convexity(CommonArgs),
}

mod defaults {
    use crate::convexity::GapKind;

    pub fn n() -> usize {
        32
    }
    pub fn dt() -> f64 {
        0.01
    }
    pub fn t_max() -> f64 {
        10.0
    }
    pub fn one() -> usize {
        1
    }
    pub fn unit() -> f64 {
        1.0
    }
    pub fn deg_max() -> usize {
        4
    }
    pub fn stderr_factor() -> f64 {
        3.0
    }
    pub fn abs_tol() -> f64 {
        0.05
    }
    pub fn bound_k_max() -> u32 {
        6
    }
    pub fn trials() -> usize {
        1000
    }
    pub fn gap() -> GapKind {
        GapKind::Operator
    }
}

/// Experiment parameters, shared by all subcommands; each reads what it needs.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub potential: String,
    /// Number of variables; inferred from the potential when absent.
    #[serde(default)]
    pub m: Option<usize>,
    #[serde(rename = "N", default = "defaults::n")]
    pub n: usize,
    #[serde(default = "defaults::dt")]
    pub dt: f64,
    #[serde(default = "defaults::t_max")]
    pub t_max: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "defaults::one")]
    pub replicas: usize,
    #[serde(default = "defaults::one")]
    pub record_stride: usize,
    #[serde(default)]
    pub norm_cap: Option<f64>,
    /// Recorded observables; `X_i^2` for every `i` when empty.
    #[serde(default)]
    pub observables: Vec<String>,
    /// Defaults to `10 / c` (or 10), clipped to `t_max`.
    #[serde(default)]
    pub burn_in: Option<f64>,
    #[serde(default = "defaults::unit")]
    pub sample_interval: f64,
    #[serde(default = "defaults::deg_max")]
    pub deg_max: usize,
    #[serde(default = "defaults::stderr_factor")]
    pub stderr_factor: f64,
    #[serde(default = "defaults::abs_tol")]
    pub abs_tol: f64,
    /// Moment bound base `B_0`; enables the moment bound check.
    #[serde(default)]
    pub b0: Option<f64>,
    #[serde(default = "defaults::bound_k_max")]
    pub bound_k_max: u32,
    /// Tuple norm of the coupling initial data `Z`.
    #[serde(default = "defaults::unit")]
    pub z_norm: f64,
    /// Window `[t0, t1]` of the contraction fit; the whole run by default.
    #[serde(default)]
    pub fit_window: Option<[f64; 2]>,
    #[serde(default)]
    pub c: Option<f64>,
    #[serde(default)]
    pub m_bound: Option<f64>,
    #[serde(default = "defaults::trials")]
    pub trials: usize,
    #[serde(default = "defaults::gap")]
    pub gap: GapKind,
    #[serde(default = "defaults::one")]
    pub index: usize,
}

const INFER_LIMIT: usize = 1 << 20;

/// Largest variable index appearing in `text` (at least 1).
pub fn infer_nvars(text: &str) -> Result<usize, ParseError> {
    let p = parse_poly(text, INFER_LIMIT)?;
    Ok(p.terms().map(|(w, _)| w.max_index()).max().unwrap_or(0).max(1))
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_max >= self.dt) || !self.t_max.is_finite() {
            return bad(format!("t_max = {} must be at least dt = {}", self.t_max, self.dt));
        }
        if self.n == 0 {
            return bad("N must be at least 1".into());
        }
        if self.m == Some(0) {
            return bad("m must be at least 1".into());
        }
        if self.replicas == 0 || self.record_stride == 0 || self.trials == 0 {
            return bad("replicas, record_stride and trials must be at least 1".into());
        }
        if !(self.sample_interval > 0.0) {
            return bad("sample_interval must be positive".into());
        }
        if !(self.z_norm > 0.0) {
            return bad("z_norm must be positive".into());
        }
        self.potential()?;
        Ok(())
    }

    pub fn nvars(&self) -> Result<usize, CliError> {
        match self.m {
            Some(m) => Ok(m),
            None => infer_nvars(&self.potential).map_err(|err| CliError::Parse {
                what: "potential".into(),
                err,
            }),
        }
    }

    fn parse(&self, what: &str, text: &str) -> Result<NCPoly, CliError> {
        parse_poly(text, self.nvars()?).map_err(|err| CliError::Parse { what: what.into(), err })
    }

    pub fn potential(&self) -> Result<NCPoly, CliError> {
        self.parse("potential", &self.potential)
    }

    pub fn sde_config(&self) -> Result<SdeConfig, CliError> {
        let mut cfg = SdeConfig::new(self.potential()?, self.n, self.dt, self.t_max, self.seed);
        cfg.record_stride = self.record_stride;
        cfg.norm_cap = self.norm_cap;
        cfg.convexity = self.c;
        cfg.observables = if self.observables.is_empty() {
            (1..=cfg.nvars())
                .map(|i| Ok(NCPoly::var(cfg.nvars(), i)?.pow(2)))
                .collect::<Result<_, PolyError>>()?
        } else {
            self.observables
                .iter()
                .map(|o| self.parse("observable", o))
                .collect::<Result<_, _>>()?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply(&mut self, common: &CommonArgs) -> Result<(), CliError> {
        if let Some(seed) = common.seed {
            self.seed = seed;
        }
        if let Some(r) = common.replicas {
            if r == 0 {
                return Err(CliError::Config("--replicas must be at least 1".into()));
            }
            self.replicas = r;
        }
        Ok(())
    }
}

fn load_config(common: &CommonArgs) -> Result<ExperimentConfig, CliError> {
    let path = common
        .config
        .as_deref()
        .ok_or_else(|| CliError::Config("--config PATH is required".into()))?;
    let mut cfg = ExperimentConfig::load(path)?;
    cfg.apply(common)?;
    Ok(cfg)
}

fn out_dir(common: &CommonArgs) -> Result<PathBuf, CliError> {
    let dir = common.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).map_err(|source| CliError::Io {
        path: dir.clone(),
        source,
    })?;
    Ok(dir)
}

fn write_file(path: PathBuf, contents: &[u8]) -> Result<(), CliError> {
    fs::write(&path, contents).map_err(|source| CliError::Io { path, source })
}

fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("summary serializes");
    s.push('\n');
    s.into_bytes()
}

fn status(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Grad {
            poly,
            index,
            nvars,
            common,
        } => cmd_grad(poly.as_deref(), *index, *nvars, common, stdout),
        Command::Simulate(common) => cmd_simulate(common, stdout),
        Command::SdCheck(common) => cmd_sd_check(common, stdout),
        Command::Couple(common) => cmd_couple(common, stdout),
        Command::Convexity(common) => cmd_convexity(common, stdout),
    }
}

fn print(stdout: &mut dyn Write, line: String) -> Result<(), CliError> {
    writeln!(stdout, "{line}").map_err(|source| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    })
}

/// Text of `D_i P` and `∂_i P`.
pub fn grad_text(poly: &str, index: usize, nvars: Option<usize>) -> Result<(String, String), CliError> {
    let nvars = match nvars {
        Some(m) => m,
        None => infer_nvars(poly).map_err(|err| CliError::Parse {
            what: "polynomial".into(),
            err,
        })?,
    };
    let p = parse_poly(poly, nvars).map_err(|err| CliError::Parse {
        what: "polynomial".into(),
        err,
    })?;
    Ok((p.cyclic_grad(index)?.to_string(), p.diff_quot(index)?.to_string()))
}

fn cmd_grad(
    poly: Option<&str>,
    index: Option<usize>,
    nvars: Option<usize>,
    common: &CommonArgs,
    stdout: &mut dyn Write,
) -> Result<Outcome, CliError> {
    let (text, index, nvars) = match poly {
        Some(text) => (text.to_string(), index.unwrap_or(1), nvars),
        None => {
            let cfg = load_config(common)?;
            let m = cfg.nvars()?;
            (cfg.potential, index.unwrap_or(cfg.index), nvars.or(Some(m)))
        }
    };
    let (d, dq) = grad_text(&text, index, nvars)?;
    if common.out.is_some() {
        write_file(out_dir(common)?.join("grad.txt"), format!("{d}\n{dq}\n").as_bytes())?;
    }
    print(stdout, d)?;
    print(stdout, dq)?;
    Ok(Outcome::Passed)
}

#[derive(Serialize)]
struct NamedValue {
    polynomial: String,
    value: f64,
}

#[derive(Serialize)]
struct ReplicaSummary {
    replica: u64,
    max_norm: f64,
    cap_violations: usize,
    blow_up_at: Option<f64>,
    final_moments: Vec<NamedValue>,
    pass: bool,
}

#[derive(Serialize)]
struct SimulateSummary {
    potential: String,
    m: usize,
    #[serde(rename = "N")]
    n: usize,
    dt: f64,
    t_max: f64,
    seed: u64,
    norm_cap: Option<f64>,
    replicas: Vec<ReplicaSummary>,
    pass: bool,
}

fn replica_summary(traj: &Trajectory, blow_up_at: Option<f64>) -> ReplicaSummary {
    let final_moments = traj
        .observables
        .iter()
        .map(|o| NamedValue {
            polynomial: o.name.clone(),
            value: o.values.last().copied().unwrap_or(f64::NAN),
        })
        .collect();
    ReplicaSummary {
        replica: traj.replica,
        max_norm: traj.max_norm(),
        cap_violations: traj.cap_violations.len(),
        blow_up_at,
        final_moments,
        pass: blow_up_at.is_none() && traj.cap_violations.is_empty(),
    }
}

fn cmd_simulate(common: &CommonArgs, stdout: &mut dyn Write) -> Result<Outcome, CliError> {
    let cfg = load_config(common)?;
    let sde = cfg.sde_config()?;
    let dir = out_dir(common)?;
    let mut replicas = Vec::with_capacity(cfg.replicas);
    for run in simulate_replicas(&sde, cfg.replicas) {
        let (traj, blow_up_at) = match run {
            Ok(traj) => (traj, None),
            Err(SdeError::BlowUp { t, partial }) => (*partial, Some(t)),
            Err(e) => return Err(e.into()),
        };
        let mut csv = Vec::new();
        write_trajectory_csv(&mut csv, &traj).expect("writing to memory");
        write_file(dir.join(format!("trajectory_r{}.csv", traj.replica)), &csv)?;
        replicas.push(replica_summary(&traj, blow_up_at));
    }
    let pass = replicas.iter().all(|r| r.pass);
    let max_norm = replicas.iter().map(|r| r.max_norm).fold(0.0, f64::max);
    let summary = SimulateSummary {
        potential: sde.potential.to_string(),
        m: sde.nvars(),
        n: sde.n,
        dt: sde.dt,
        t_max: sde.t_max,
        seed: sde.seed,
        norm_cap: sde.norm_cap,
        replicas,
        pass,
    };
    write_file(dir.join("summary.json"), &to_json(&summary))?;
    print(stdout, format!("simulate: {} max_norm={}", status(pass), fmt17(max_norm)))?;
    Ok(Outcome::from_pass(pass))
}

fn write_report(dir: &Path, stem: &str, report: &MomentReport) -> Result<(), CliError> {
    write_file(dir.join(format!("{stem}.json")), report.to_json().as_bytes())?;
    let mut csv = Vec::new();
    report.write_csv(&mut csv).expect("writing to memory");
    write_file(dir.join(format!("{stem}.csv")), &csv)
}

fn cmd_sd_check(common: &CommonArgs, stdout: &mut dyn Write) -> Result<Outcome, CliError> {
    let cfg = load_config(common)?;
    let sde = cfg.sde_config()?;
    let dir = out_dir(common)?;
    let tol = Tolerance::new(cfg.stderr_factor, cfg.abs_tol);
    if cfg.deg_max == 0 && cfg.b0.is_none() {
        write_report(&dir, "sd_report", &MomentReport::new(tol))?;
        print(stdout, "sd-check: PASS entries=0".into())?;
        return Ok(Outcome::Passed);
    }
    let burn_in = cfg
        .burn_in
        .unwrap_or_else(|| cfg.c.map_or(10.0, |c| 10.0 / c))
        .min(cfg.t_max);
    let protocol = StationaryProtocol {
        burn_in,
        sample_interval: cfg.sample_interval,
        t_end: cfg.t_max,
        replicas: cfg.replicas,
    };
    let (law, trajectories) = sample_stationary_law(&sde, &protocol)?;
    let report = law.sd_residual_suite(&sde.potential, cfg.deg_max, tol)?;
    write_report(&dir, "sd_report", &report)?;
    let mut pass = report.all_pass();
    let mut line = format!("entries={} failures={}", report.entries.len(), report.failures().count());
    if let Some(b0) = cfg.b0 {
        let bounds = law.moment_bound_check(b0, cfg.bound_k_max)?;
        write_report(&dir, "bounds_report", &bounds)?;
        pass &= bounds.all_pass();
        line.push_str(&format!(" bound_failures={}", bounds.failures().count()));
    }
    let violations: usize = trajectories.iter().map(|t| t.cap_violations.len()).sum();
    pass &= violations == 0;
    print(stdout, format!("sd-check: {} {line} cap_violations={violations}", status(pass)))?;
    Ok(Outcome::from_pass(pass))
}

/// Initial data `Z` of the coupling: a GUE direction scaled to `z_norm`,
/// drawn from a stream no replica uses.
pub fn coupling_initial(m: usize, n: usize, z_norm: f64, seed: u64) -> Result<MatrixTuple, CliError> {
    let mut rng = RngStream::for_replica(seed, u64::MAX);
    let dir = brownian_increment(m, n, 1.0, &mut rng).map_err(SdeError::from)?;
    Ok(rescale_to_norm(&dir, z_norm, z_norm).map_err(SdeError::from)?)
}

#[derive(Serialize)]
struct CoupleReplica {
    replica: u64,
    noise_shared: bool,
    slope: Option<f64>,
    final_op_distance: f64,
    pass: bool,
}

#[derive(Serialize)]
struct CoupleSummary {
    potential: String,
    z_norm: f64,
    window: [f64; 2],
    c: Option<f64>,
    replicas: Vec<CoupleReplica>,
    pass: bool,
}

fn cmd_couple(common: &CommonArgs, stdout: &mut dyn Write) -> Result<Outcome, CliError> {
    let cfg = load_config(common)?;
    let sde = cfg.sde_config()?;
    let dir = out_dir(common)?;
    let z = coupling_initial(sde.nvars(), sde.n, cfg.z_norm, sde.seed)?;
    let window = cfg.fit_window.unwrap_or([0.0, cfg.t_max]);
    let mut replicas = Vec::with_capacity(cfg.replicas);
    for r in 0..cfg.replicas as u64 {
        let mut sde_r = sde.clone();
        sde_r.replica = r;
        let run = coupled_simulate(&sde_r, &z)?;
        let mut csv = Vec::new();
        write_distance_csv(&mut csv, &run.distance).expect("writing to memory");
        write_file(dir.join(format!("distance_r{r}.csv")), &csv)?;
        let slope = run.trace_decay_slope(window[0], window[1]);
        let rate_ok = match (cfg.c, slope) {
            (Some(c), Some(s)) => s <= -0.8 * c,
            (Some(_), None) => false,
            (None, _) => true,
        };
        replicas.push(CoupleReplica {
            replica: r,
            noise_shared: run.noise_shared(),
            slope,
            final_op_distance: run.distance.op_norm.last().copied().unwrap_or(f64::NAN),
            pass: run.noise_shared() && rate_ok,
        });
    }
    let pass = replicas.iter().all(|r| r.pass);
    let slope = replicas[0].slope;
    let summary = CoupleSummary {
        potential: sde.potential.to_string(),
        z_norm: cfg.z_norm,
        window,
        c: cfg.c,
        replicas,
        pass,
    };
    write_file(dir.join("couple.json"), &to_json(&summary))?;
    let slope = slope.map(fmt17).unwrap_or_else(|| "none".into());
    print(stdout, format!("couple: {} slope={slope}", status(pass)))?;
    Ok(Outcome::from_pass(pass))
}

fn cmd_convexity(common: &CommonArgs, stdout: &mut dyn Write) -> Result<Outcome, CliError> {
    let cfg = load_config(common)?;
    let v = cfg.potential()?;
    if !v.is_self_adjoint() {
        return Err(CliError::Config(format!("potential {v} is not self-adjoint")));
    }
    let c = cfg.c.ok_or_else(|| CliError::Config("convexity needs \"c\"".into()))?;
    let m_bound = cfg
        .m_bound
        .ok_or_else(|| CliError::Config("convexity needs \"m_bound\"".into()))?;
    let opts = CertifyOptions::new(cfg.trials, cfg.n).with_kind(cfg.gap);
    let report = certify_with(&v, c, m_bound, opts, &mut RngStream::new(cfg.seed))?;
    write_file(out_dir(common)?.join("convexity.json"), report.to_json().as_bytes())?;
    let pass = report.certified();
    print(
        stdout,
        format!("convexity: {} min_gap={}", status(pass), fmt17(report.min_gap)),
    )?;
    Ok(Outcome::from_pass(pass))
}

/// Parses `args` (program name first), runs, reports errors on stderr and
/// returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let result = run(&cli, &mut io::stdout().lock());
    if let Err(e) = &result {
        eprintln!("error: {e}");
    }
    exit_code(&result)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cli(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("freediff").chain(args.iter().copied())).unwrap()
    }

    fn run_capture(args: &[&str]) -> (Result<Outcome, CliError>, String) {
        let mut out = Vec::new();
        let r = run(&cli(args), &mut out);
        (r, String::from_utf8(out).unwrap())
    }

    #[test]
    fn grad_examples() {
        assert_eq!(
            grad_text("X1^2", 1, None).unwrap(),
            ("2*X1".to_string(), "1 (x) X1 + X1 (x) 1".to_string())
        );
        assert_eq!(grad_text("X1*X2*X1*X2", 1, None).unwrap().0, "2*X2*X1*X2");
        assert_eq!(grad_text("X2", 1, None).unwrap().0, "0");
        let (r, out) = run_capture(&["grad", "X1^2", "--index", "1"]);
        assert_eq!(r.unwrap(), Outcome::Passed);
        assert_eq!(out, "2*X1\n1 (x) X1 + X1 (x) 1\n");
    }

    #[test]
    fn grad_parse_error_has_position() {
        let err = grad_text("X1 + * X2", 1, None).unwrap_err();
        assert!(err.to_string().starts_with("polynomial: 1:"), "{err}");
        assert_eq!(exit_code(&Err(err)), 1);
    }

    #[test]
    fn config_defaults_and_inference() {
        let cfg = ExperimentConfig::from_json(r#"{"potential": "0.5*X1^2 + 0.5*X3^2"}"#).unwrap();
        assert_eq!(cfg.nvars().unwrap(), 3);
        assert_eq!((cfg.n, cfg.dt, cfg.replicas), (32, 0.01, 1));
        let sde = cfg.sde_config().unwrap();
        assert_eq!(sde.observables.len(), 3);
    }

    #[test]
    fn config_validation() {
        assert!(ExperimentConfig::from_json(r#"{"potential": "X1^2", "dt": -1}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"potential": "X1^2", "N": 0}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"potential": "X1^2 +"}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"potential": "X1^2", "bogus": 1}"#).is_err());
        let cfg = ExperimentConfig::from_json(r#"{"potential": "2i*X1"}"#).unwrap();
        assert!(matches!(cfg.sde_config(), Err(CliError::Sde(SdeError::Config(_)))));
    }

    #[test]
    fn missing_config_is_operational_error() {
        let (r, _) = run_capture(&["simulate", "--config", "/nonexistent/freediff.json"]);
        assert!(matches!(r, Err(CliError::Io { .. })));
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(main_with_args(["freediff", "simulate", "--seed", "x"]), 1);
    }
}
