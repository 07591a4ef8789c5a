//! Euler–Maruyama integration of `dX_t = dS_t − ½ DV(X_t) dt` on tuples of
//! Hermitian matrices, plus coupled runs that share one noise stream.

mod export;

pub use export::{
    decode_snapshot, encode_snapshot, read_snapshot, write_distance_csv, write_snapshot,
    write_trajectory_csv, SnapshotMeta,
};
pub(crate) use export::fmt17;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::matmodel::{
    brownian_increment, dot, spectral_norm, CMatrix, HermMatrix,
    MatrixError, MatrixTuple, RngStream,
};
use crate::ncpoly::{NCPoly, PolyError};

#[derive(Debug, Error)]
pub enum SdeError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("state became non-finite at t = {t}")]
    BlowUp { t: f64, partial: Box<Trajectory> },
    #[error("state became non-finite")]
    NonFinite,
}

/// The symbolic gradient `(D_1 V, …, D_m V)`, computed once.
#[derive(Clone, Debug)]
pub struct DriftEvaluator {
    grad: Vec<NCPoly>,
}

impl DriftEvaluator {
    pub fn new(potential: &NCPoly) -> Result<Self, SdeError> {
        Ok(DriftEvaluator {
            grad: potential.cyclic_gradient()?,
        })
    }

    pub fn gradient(&self) -> &[NCPoly] {
        &self.grad
    }

    pub fn nvars(&self) -> usize {
        self.grad.len()
    }

    /// `DV(X)`, each component re-hermitized.
    pub fn gradient_at(&self, x: &MatrixTuple) -> Result<MatrixTuple, SdeError> {
        let mats = self
            .grad
            .iter()
            .map(|g| Ok(HermMatrix::hermitized(&g.evaluate(x)?)))
            .collect::<Result<Vec<_>, SdeError>>()?;
        Ok(MatrixTuple::new(mats)?)
    }
}

/// `½ DV(X)`, re-hermitized.
pub fn drift(ev: &DriftEvaluator, x: &MatrixTuple) -> Result<MatrixTuple, SdeError> {
    let half = Complex64::new(0.5, 0.0);
    let mats = ev
        .grad
        .iter()
        .map(|g| Ok(HermMatrix::hermitized(&(g.evaluate(x)? * half))))
        .collect::<Result<Vec<_>, SdeError>>()?;
    Ok(MatrixTuple::new(mats)?)
}

/// One explicit step: `X' = herm(X + dS − drift(X)·dt)`.
pub fn em_step(
    x: &MatrixTuple,
    ev: &DriftEvaluator,
    dt: f64,
    ds: &MatrixTuple,
) -> Result<MatrixTuple, SdeError> {
    if x.len() != ds.len() || x.dim() != ds.dim() || x.len() != ev.nvars() {
        return Err(MatrixError::Shape("state, noise and potential disagree".into()).into());
    }
    let b = drift(ev, x)?;
    let dt = Complex64::new(dt, 0.0);
    let mut mats = Vec::with_capacity(x.len());
    for ((xi, si), bi) in x.iter().zip(ds.iter()).zip(b.iter()) {
        let next: CMatrix = (xi.matrix() + si.matrix()) - bi.matrix() * dt;
        if !next.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(SdeError::NonFinite);
        }
        mats.push(HermMatrix::hermitized(&next));
    }
    Ok(MatrixTuple::new(mats)?)
}

/// Parameters of one run.
#[derive(Clone, Debug)]
pub struct SdeConfig {
    pub potential: NCPoly,
    /// Matrix size `N`.
    pub n: usize,
    pub dt: f64,
    pub t_max: f64,
    /// Initial data `Z`; `None` starts from the zero tuple.
    pub initial: Option<MatrixTuple>,
    pub seed: u64,
    /// Replica index; selects an independent noise stream under `seed`.
    pub replica: u64,
    /// Observables are recorded every `record_stride` steps.
    pub record_stride: usize,
    /// Asserted convexity constant, if any.
    pub convexity: Option<f64>,
    /// Norm guard `M_cap`; recorded states above it are flagged.
    pub norm_cap: Option<f64>,
    /// Bound `b` on the initial data.
    pub initial_bound: Option<f64>,
    /// Polynomials `P` whose `Re tr_N P(X_t)` is recorded.
    pub observables: Vec<NCPoly>,
    /// Store a state snapshot every `k` steps, and at the last step, once
    /// `t ≥ snapshot_after`.
    pub snapshot_stride: Option<usize>,
    pub snapshot_after: f64,
}

impl SdeConfig {
    pub fn new(potential: NCPoly, n: usize, dt: f64, t_max: f64, seed: u64) -> Self {
        SdeConfig {
            potential,
            n,
            dt,
            t_max,
            initial: None,
            seed,
            replica: 0,
            record_stride: 1,
            convexity: None,
            norm_cap: None,
            initial_bound: None,
            observables: Vec::new(),
            snapshot_stride: None,
            snapshot_after: 0.0,
        }
    }

    pub fn nvars(&self) -> usize {
        self.potential.nvars()
    }

    pub fn steps(&self) -> usize {
        (self.t_max / self.dt).round() as usize
    }

    pub fn validate(&self) -> Result<(), SdeError> {
        let bad = |msg: String| Err(SdeError::Config(msg));
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_max >= self.dt) || !self.t_max.is_finite() {
            return bad(format!("t_max = {} must be at least dt = {}", self.t_max, self.dt));
        }
        if self.n == 0 {
            return bad("matrix size N must be at least 1".into());
        }
        if self.record_stride == 0 {
            return bad("record_stride must be at least 1".into());
        }
        if self.snapshot_stride == Some(0) {
            return bad("snapshot_stride must be at least 1".into());
        }
        if !self.potential.is_self_adjoint() {
            return bad(format!("potential {} is not self-adjoint", self.potential));
        }
        let m = self.nvars();
        for p in &self.observables {
            if p.nvars() != m {
                return bad(format!("observable {p} has {} variables, expected {m}", p.nvars()));
            }
        }
        if let Some(z) = &self.initial {
            check_initial(z, m, self.n, self.initial_bound)?;
        }
        Ok(())
    }
}

fn check_initial(z: &MatrixTuple, m: usize, n: usize, bound: Option<f64>) -> Result<(), SdeError> {
    if z.len() != m || z.dim() != n {
        return Err(SdeError::Config(format!(
            "initial data is a {}-tuple of {}x{} matrices, expected {m} of {n}x{n}",
            z.len(),
            z.dim(),
            z.dim()
        )));
    }
    if z.max_hermitian_deviation() > 1e-12 {
        return Err(SdeError::Config("initial data is not Hermitian".into()));
    }
    if let Some(b) = bound {
        let norm = z.norm()?;
        if !(norm < b) {
            return Err(SdeError::Config(format!(
                "initial norm {norm} is not below the bound b = {b}"
            )));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Observable {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub state: MatrixTuple,
}

/// Recorded path of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub seed: u64,
    pub replica: u64,
    pub times: Vec<f64>,
    /// Tuple norm `max_i ‖X_i(t)‖`.
    pub norm_max: Vec<f64>,
    pub observables: Vec<Observable>,
    pub snapshots: Vec<Snapshot>,
    /// Recorded times at which the tuple norm exceeded the configured cap.
    pub cap_violations: Vec<f64>,
    /// Fingerprint of every noise increment this run consumed.
    pub noise_checksum: u64,
    pub final_state: MatrixTuple,
}

impl Trajectory {
    pub fn max_norm(&self) -> f64 {
        self.norm_max.iter().copied().fold(0.0, f64::max)
    }

    /// Mean recorded tuple norm over `t ≥ after`: the stationary plateau.
    pub fn plateau_norm(&self, after: f64) -> Option<f64> {
        let tail: Vec<f64> = self
            .times
            .iter()
            .zip(&self.norm_max)
            .filter(|(t, _)| **t >= after)
            .map(|(_, v)| *v)
            .collect();
        if tail.is_empty() {
            None
        } else {
            Some(tail.iter().sum::<f64>() / tail.len() as f64)
        }
    }

    pub fn observable(&self, name: &str) -> Option<&[f64]> {
        self.observables
            .iter()
            .find(|o| o.name == name)
            .map(|o| o.values.as_slice())
    }
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// Time-stepping state of one trajectory.
struct Integrator<'a> {
    cfg: &'a SdeConfig,
    ev: &'a DriftEvaluator,
    state: MatrixTuple,
    traj: Trajectory,
}

impl<'a> Integrator<'a> {
    fn new(cfg: &'a SdeConfig, ev: &'a DriftEvaluator, start: MatrixTuple) -> Self {
        let traj = Trajectory {
            seed: cfg.seed,
            replica: cfg.replica,
            times: Vec::new(),
            norm_max: Vec::new(),
            observables: cfg
                .observables
                .iter()
                .map(|p| Observable {
                    name: p.to_string(),
                    values: Vec::new(),
                })
                .collect(),
            snapshots: Vec::new(),
            cap_violations: Vec::new(),
            noise_checksum: FNV_OFFSET,
            final_state: start.clone(),
        };
        Integrator {
            cfg,
            ev,
            state: start,
            traj,
        }
    }

    fn time(&self, step: usize) -> f64 {
        step as f64 * self.cfg.dt
    }

    fn observe(&mut self, step: usize) -> Result<(), SdeError> {
        let t = self.time(step);
        if step % self.cfg.record_stride == 0 || step == self.cfg.steps() {
            let norm = self.state.norm()?;
            self.traj.times.push(t);
            self.traj.norm_max.push(norm);
            if let Some(cap) = self.cfg.norm_cap {
                if norm > cap {
                    self.traj.cap_violations.push(t);
                }
            }
            for (p, obs) in self.cfg.observables.iter().zip(&mut self.traj.observables) {
                let value = crate::matmodel::ntrace(&p.evaluate(&self.state)?).re;
                obs.values.push(value);
            }
        }
        if let Some(stride) = self.cfg.snapshot_stride {
            if (step % stride == 0 || step == self.cfg.steps()) && t >= self.cfg.snapshot_after - 0.5 * self.cfg.dt {
                self.traj.snapshots.push(Snapshot {
                    t,
                    state: self.state.clone(),
                });
            }
        }
        Ok(())
    }

    fn step(&mut self, step: usize, ds: &MatrixTuple) -> Result<(), SdeError> {
        let mut h = self.traj.noise_checksum;
        ds.for_each_bits(|bits| {
            h ^= bits;
            h = h.wrapping_mul(FNV_PRIME);
        });
        self.traj.noise_checksum = h;
        match em_step(&self.state, self.ev, self.cfg.dt, ds) {
            Ok(next) => {
                self.state = next;
                Ok(())
            }
            Err(SdeError::NonFinite) => {
                let t = self.time(step + 1);
                let mut partial = self.traj.clone();
                partial.final_state = self.state.clone();
                Err(SdeError::BlowUp {
                    t,
                    partial: Box::new(partial),
                })
            }
            Err(e) => Err(e),
        }
    }

    fn finish(mut self) -> Trajectory {
        self.traj.final_state = self.state;
        self.traj
    }
}

fn start_state(cfg: &SdeConfig) -> MatrixTuple {
    cfg.initial
        .clone()
        .unwrap_or_else(|| MatrixTuple::zeros(cfg.nvars(), cfg.n))
}

/// Runs one trajectory from `X_0 = Z` (or 0) to `t_max`.
pub fn simulate(cfg: &SdeConfig) -> Result<Trajectory, SdeError> {
    cfg.validate()?;
    let ev = DriftEvaluator::new(&cfg.potential)?;
    let mut rng = RngStream::for_replica(cfg.seed, cfg.replica);
    let mut run = Integrator::new(cfg, &ev, start_state(cfg));
    run.observe(0)?;
    for step in 0..cfg.steps() {
        let ds = brownian_increment(cfg.nvars(), cfg.n, cfg.dt, &mut rng)?;
        run.step(step, &ds)?;
        run.observe(step + 1)?;
    }
    Ok(run.finish())
}

/// Runs `replicas` independent copies of `cfg` in parallel, replica `r` using
/// the noise stream `(cfg.seed, r)`. Results come back in replica order.
pub fn simulate_replicas(cfg: &SdeConfig, replicas: usize) -> Vec<Result<Trajectory, SdeError>> {
    (0..replicas)
        .into_par_iter()
        .map(|r| {
            let mut c = cfg.clone();
            c.replica = r as u64;
            simulate(&c)
        })
        .collect()
}

/// Distances between the two coupled solutions at each recorded time.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceSeries {
    pub times: Vec<f64>,
    /// `max_i ‖X_i^Z(t) − X_i^0(t)‖`.
    pub op_norm: Vec<f64>,
    /// `tr_N[(X^Z − X^0).(X^Z − X^0)]`.
    pub trace_sq: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct CoupledRun {
    pub from_z: Trajectory,
    pub from_zero: Trajectory,
    pub distance: DistanceSeries,
}

impl CoupledRun {
    /// True when both solutions consumed the same increments.
    pub fn noise_shared(&self) -> bool {
        self.from_z.noise_checksum == self.from_zero.noise_checksum
    }

    /// Least-squares slope of `log trace_sq` over `t ∈ [t0, t1]`.
    pub fn trace_decay_slope(&self, t0: f64, t1: f64) -> Option<f64> {
        log_linear_slope(&self.distance.times, &self.distance.trace_sq, t0, t1)
    }
}

fn coupled_visit<F>(cfg: &SdeConfig, z: &MatrixTuple, mut visit: F) -> Result<(Trajectory, Trajectory), SdeError>
where
    F: FnMut(f64, &MatrixTuple, &MatrixTuple) -> Result<(), SdeError>,
{
    let mut cfg_z = cfg.clone();
    cfg_z.initial = Some(z.clone());
    cfg_z.validate()?;
    let mut cfg_0 = cfg.clone();
    cfg_0.initial = None;
    let ev = DriftEvaluator::new(&cfg.potential)?;
    let mut rng = RngStream::for_replica(cfg.seed, cfg.replica);
    let mut run_z = Integrator::new(&cfg_z, &ev, z.clone());
    let mut run_0 = Integrator::new(&cfg_0, &ev, MatrixTuple::zeros(cfg.nvars(), cfg.n));
    let steps = cfg.steps();
    for step in 0..=steps {
        if step > 0 {
            let ds = brownian_increment(cfg.nvars(), cfg.n, cfg.dt, &mut rng)?;
            run_z.step(step - 1, &ds)?;
            run_0.step(step - 1, &ds)?;
        }
        run_z.observe(step)?;
        run_0.observe(step)?;
        if step % cfg.record_stride == 0 || step == steps {
            visit(step as f64 * cfg.dt, &run_z.state, &run_0.state)?;
        }
    }
    Ok((run_z.finish(), run_0.finish()))
}

/// Solutions from `Z` and from `0` driven by the same increments.
pub fn coupled_simulate(cfg: &SdeConfig, z: &MatrixTuple) -> Result<CoupledRun, SdeError> {
    let mut distance = DistanceSeries {
        times: Vec::new(),
        op_norm: Vec::new(),
        trace_sq: Vec::new(),
    };
    let (from_z, from_zero) = coupled_visit(cfg, z, |t, xz, x0| {
        let h = xz.try_sub(x0)?;
        distance.times.push(t);
        distance.op_norm.push(h.norm()?);
        distance.trace_sq.push(dot(&h, &h)?.ntrace());
        Ok(())
    })?;
    Ok(CoupledRun {
        from_z,
        from_zero,
        distance,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransportSeries {
    pub times: Vec<f64>,
    /// `‖p(X^Z_t) − p(X^0_t)‖`.
    pub error: Vec<f64>,
    /// Coupling distance `max_i ‖X_i^Z − X_i^0‖` at the same times.
    pub distance: Vec<f64>,
    /// Largest tuple norm seen in either solution up to each time.
    pub running_norm: Vec<f64>,
}

/// How far `p` evaluated along the two coupled solutions stays apart.
pub fn transport_check(p: &NCPoly, cfg: &SdeConfig, z: &MatrixTuple) -> Result<TransportSeries, SdeError> {
    if p.nvars() != cfg.nvars() {
        return Err(SdeError::Config(format!(
            "test polynomial has {} variables, potential has {}",
            p.nvars(),
            cfg.nvars()
        )));
    }
    let mut out = TransportSeries {
        times: Vec::new(),
        error: Vec::new(),
        distance: Vec::new(),
        running_norm: Vec::new(),
    };
    let mut sup = 0.0f64;
    coupled_visit(cfg, z, |t, xz, x0| {
        let diff = p.evaluate(xz)? - p.evaluate(x0)?;
        sup = sup.max(xz.norm()?).max(x0.norm()?);
        out.times.push(t);
        out.error.push(spectral_norm(&diff)?);
        out.distance.push(xz.try_sub(x0)?.norm()?);
        out.running_norm.push(sup);
        Ok(())
    })?;
    Ok(out)
}

/// Least-squares slope of `ln y` against `t` over the window `[t0, t1]`,
/// ignoring non-positive values. `None` with fewer than two usable points.
pub fn log_linear_slope(times: &[f64], values: &[f64], t0: f64, t1: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(values)
        .filter(|(t, y)| **t >= t0 && **t <= t1 && **y > 0.0 && y.is_finite())
        .map(|(t, y)| (*t, y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polylang::parse_poly;

    fn quad(m: usize) -> NCPoly {
        let text: Vec<String> = (1..=m).map(|i| format!("0.5*X{i}^2")).collect();
        parse_poly(&text.join(" + "), m).unwrap()
    }

    #[test]
    fn drift_of_quadratic_is_half_state() {
        let ev = DriftEvaluator::new(&quad(2)).unwrap();
        let mut rng = RngStream::new(1);
        let x = crate::matmodel::random_selfadjoint_tuple(2, 4, 1.0, &mut rng).unwrap();
        assert_eq!(drift(&ev, &x).unwrap(), x.scaled(0.5));
    }

    #[test]
    fn drift_of_quartic_scalar() {
        let v = parse_poly("0.25*X1^4", 1).unwrap();
        let ev = DriftEvaluator::new(&v).unwrap();
        let d = drift(&ev, &MatrixTuple::scalars(&[1.5])).unwrap();
        assert!((d.get(1).matrix()[(0, 0)].re - 0.5 * 1.5f64.powi(3)).abs() < 1e-15);
        let z = drift(&ev, &MatrixTuple::zeros(1, 3)).unwrap();
        assert_eq!(z, MatrixTuple::zeros(1, 3));
    }

    #[test]
    fn noiseless_quadratic_step_contracts() {
        let ev = DriftEvaluator::new(&quad(2)).unwrap();
        let mut rng = RngStream::new(2);
        let x = crate::matmodel::random_selfadjoint_tuple(2, 3, 1.0, &mut rng).unwrap();
        let next = em_step(&x, &ev, 0.1, &MatrixTuple::zeros(2, 3)).unwrap();
        let want = x.scaled(1.0 - 0.05);
        assert!(next.try_sub(&want).unwrap().norm().unwrap() < 1e-15);
    }

    #[test]
    fn step_from_zero_is_the_increment() {
        let v = parse_poly("0.5*X1^2 + 0.1*X1^4 + 0.5*X2^2", 2).unwrap();
        let ev = DriftEvaluator::new(&v).unwrap();
        let ds = brownian_increment(2, 5, 0.01, &mut RngStream::new(3)).unwrap();
        assert_eq!(em_step(&MatrixTuple::zeros(2, 5), &ev, 0.01, &ds).unwrap(), ds);
    }

    #[test]
    fn validation_rejects_bad_configs() {
        let mut cfg = SdeConfig::new(quad(1), 4, -1.0, 1.0, 0);
        assert!(matches!(cfg.validate(), Err(SdeError::Config(_))));
        cfg.dt = 0.1;
        cfg.t_max = 0.01;
        assert!(cfg.validate().is_err());
        cfg.t_max = 1.0;
        assert!(cfg.validate().is_ok());
        cfg.potential = parse_poly("X1^3 + 2i*X1", 1).unwrap();
        assert!(cfg.validate().is_err());
        cfg.potential = quad(1);
        cfg.initial = Some(MatrixTuple::scalars(&[3.0]));
        assert!(cfg.validate().is_err());
        cfg.initial = Some(MatrixTuple::zeros(1, 4).scaled(1.0));
        cfg.initial_bound = Some(1.0);
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn blow_up_carries_time_and_partial_path() {
        let v = parse_poly("-0.25*X1^4", 1).unwrap();
        let mut cfg = SdeConfig::new(v, 1, 0.1, 100.0, 0);
        cfg.initial = Some(MatrixTuple::scalars(&[10.0]));
        match simulate(&cfg) {
            Err(SdeError::BlowUp { t, partial }) => {
                assert!(t > 0.0 && t < 100.0);
                assert!(!partial.times.is_empty());
            }
            other => panic!("expected blow-up, got {other:?}"),
        }
    }

    #[test]
    fn slope_of_exact_exponential() {
        let times: Vec<f64> = (0..50).map(|k| k as f64 * 0.2).collect();
        let vals: Vec<f64> = times.iter().map(|t| 3.0 * (-1.7 * t).exp()).collect();
        let s = log_linear_slope(&times, &vals, 0.0, 10.0).unwrap();
        assert!((s + 1.7).abs() < 1e-12);
        assert_eq!(log_linear_slope(&times[..1], &vals[..1], 0.0, 1.0), None);
    }
}
