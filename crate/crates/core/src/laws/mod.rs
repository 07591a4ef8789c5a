//! Empirical tracial laws assembled from simulation snapshots.
//!
//! Samples are grouped by replica. Every estimate is the mean of the
//! per-replica means, and its standard error comes from the scatter of those
//! replica means, never from the (autocorrelated) scatter within one run.
//! The pairing `μ ⊗ μ` is estimated as a product of averages.

mod report;

pub use report::{MomentReport, ReportEntry, Tolerance};

use std::collections::{HashMap, HashSet};
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::matmodel::{ntrace, ntrace_product, CMatrix, MatrixTuple};
use crate::ncpoly::{Letter, NCPoly, PolyError, TensorPoly, Word};
use crate::sde::{simulate_replicas, SdeConfig, SdeError, Trajectory};

#[derive(Debug, Error)]
pub enum LawError {
    #[error("an empirical law needs at least one sample")]
    Empty,
    #[error("samples disagree in shape: {0}")]
    Shape(String),
    #[error("polynomial has {poly} variables but the law has {law}")]
    Arity { poly: usize, law: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Sde(#[from] SdeError),
    #[error("invalid sampling protocol: {0}")]
    Protocol(String),
}

/// A complex estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    pub stderr: f64,
}

/// An estimate kept together with each replica's deviation from it, so that
/// products and sums can be propagated to first order.
#[derive(Clone, Debug)]
struct Linearized {
    value: Complex64,
    devs: Vec<Complex64>,
}

impl Linearized {
    fn zero(groups: usize) -> Self {
        Linearized {
            value: Complex64::new(0.0, 0.0),
            devs: vec![Complex64::new(0.0, 0.0); groups],
        }
    }

    fn add_scaled(&mut self, other: &Linearized, s: f64) {
        self.value += other.value * s;
        for (d, o) in self.devs.iter_mut().zip(&other.devs) {
            *d += o * s;
        }
    }

    /// First-order product rule.
    fn add_product(&mut self, a: &Linearized, b: &Linearized) {
        self.value += a.value * b.value;
        for ((d, da), db) in self.devs.iter_mut().zip(&a.devs).zip(&b.devs) {
            *d += b.value * da + a.value * db;
        }
    }

    fn estimate(&self) -> Estimate {
        let g = self.devs.len();
        let stderr = if g < 2 {
            0.0
        } else {
            let ss: f64 = self.devs.iter().map(|d| d.norm_sqr()).sum();
            (ss / (g as f64 * (g as f64 - 1.0))).sqrt()
        };
        Estimate {
            value: self.value,
            stderr,
        }
    }
}

/// Provenance of a law's samples.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LawMeta {
    pub dt: Option<f64>,
    pub burn_in: Option<f64>,
    /// Master seed; replica `r` used noise stream `(seed, r)`.
    pub seed: Option<u64>,
}

/// Uniformly weighted samples of an `m`-tuple of `N×N` Hermitian matrices.
#[derive(Debug)]
pub struct EmpiricalLaw {
    nvars: usize,
    n: usize,
    samples: Vec<MatrixTuple>,
    group_of: Vec<usize>,
    groups: usize,
    pub meta: LawMeta,
    traces: Mutex<HashMap<Word, Arc<Vec<Complex64>>>>,
}

impl EmpiricalLaw {
    /// One group per replica; each inner list holds that replica's snapshots.
    pub fn from_replicas(replicas: Vec<Vec<MatrixTuple>>, meta: LawMeta) -> Result<Self, LawError> {
        let replicas: Vec<_> = replicas.into_iter().filter(|r| !r.is_empty()).collect();
        let first = replicas.first().and_then(|r| r.first()).ok_or(LawError::Empty)?;
        let (nvars, n) = (first.len(), first.dim());
        let groups = replicas.len();
        let mut samples = Vec::new();
        let mut group_of = Vec::new();
        for (g, rep) in replicas.into_iter().enumerate() {
            for s in rep {
                if s.len() != nvars || s.dim() != n {
                    return Err(LawError::Shape(format!(
                        "({}, {}) vs ({nvars}, {n})",
                        s.len(),
                        s.dim()
                    )));
                }
                samples.push(s);
                group_of.push(g);
            }
        }
        Ok(EmpiricalLaw {
            nvars,
            n,
            samples,
            group_of,
            groups,
            meta,
            traces: Mutex::new(HashMap::new()),
        })
    }

    /// All samples in a single group (standard errors are then reported as 0).
    pub fn from_samples(samples: Vec<MatrixTuple>) -> Result<Self, LawError> {
        Self::from_replicas(vec![samples], LawMeta::default())
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn num_samples(&self) -> usize {
        self.samples.len()
    }

    pub fn num_groups(&self) -> usize {
        self.groups
    }

    pub fn samples(&self) -> &[MatrixTuple] {
        &self.samples
    }

    fn check(&self, p: &NCPoly) -> Result<(), LawError> {
        if p.nvars() != self.nvars {
            Err(LawError::Arity {
                poly: p.nvars(),
                law: self.nvars,
            })
        } else {
            Ok(())
        }
    }

    /// Computes `tr_N(w(X))` on every sample for each word not seen before.
    pub fn prefetch<'a>(&self, polys: impl IntoIterator<Item = &'a NCPoly>) {
        let mut wanted: HashSet<Word> = HashSet::new();
        {
            let cache = self.traces.lock().expect("trace cache poisoned");
            for p in polys {
                for (w, _) in p.terms() {
                    if !cache.contains_key(w) {
                        wanted.insert(w.clone());
                    }
                }
            }
        }
        if wanted.is_empty() {
            return;
        }
        let mut words: Vec<Word> = wanted.into_iter().collect();
        words.sort();
        let per_sample: Vec<Vec<Complex64>> = self
            .samples
            .par_iter()
            .map(|x| sample_word_traces(x, &words))
            .collect();
        let mut cache = self.traces.lock().expect("trace cache poisoned");
        for (k, w) in words.into_iter().enumerate() {
            let column: Vec<Complex64> = per_sample.iter().map(|row| row[k]).collect();
            cache.insert(w, Arc::new(column));
        }
    }

    fn linear(&self, p: &NCPoly) -> Result<Linearized, LawError> {
        self.check(p)?;
        self.prefetch([p]);
        let cache = self.traces.lock().expect("trace cache poisoned");
        let mut per_sample = vec![Complex64::new(0.0, 0.0); self.samples.len()];
        for (w, c) in p.terms() {
            let col = &cache[w];
            for (acc, t) in per_sample.iter_mut().zip(col.iter()) {
                *acc += c * t;
            }
        }
        drop(cache);
        let mut sums = vec![Complex64::new(0.0, 0.0); self.groups];
        let mut counts = vec![0usize; self.groups];
        for (v, g) in per_sample.iter().zip(&self.group_of) {
            sums[*g] += v;
            counts[*g] += 1;
        }
        let means: Vec<Complex64> = sums
            .iter()
            .zip(&counts)
            .map(|(s, c)| s / *c as f64)
            .collect();
        let value = means.iter().sum::<Complex64>() / self.groups as f64;
        Ok(Linearized {
            value,
            devs: means.iter().map(|m| m - value).collect(),
        })
    }

    fn tensor_linear(&self, t: &TensorPoly) -> Result<Linearized, LawError> {
        if t.nvars() != self.nvars {
            return Err(LawError::Arity {
                poly: t.nvars(),
                law: self.nvars,
            });
        }
        self.prefetch(t.summands().iter().flat_map(|(q, r)| [q, r]));
        let mut acc = Linearized::zero(self.groups);
        for (q, r) in t.summands() {
            acc.add_product(&self.linear(q)?, &self.linear(r)?);
        }
        Ok(acc)
    }

    /// `μ(P)`: average of `tr_N P(X)` over the samples.
    pub fn moment(&self, p: &NCPoly) -> Result<Estimate, LawError> {
        Ok(self.linear(p)?.estimate())
    }

    /// `μ ⊗ μ (Σ Q_j ⊗ R_j) = Σ μ(Q_j) μ(R_j)`.
    pub fn tensor_moment(&self, t: &TensorPoly) -> Result<Estimate, LawError> {
        Ok(self.tensor_linear(t)?.estimate())
    }

    fn sd_component_linear(&self, v: &NCPoly, p: &NCPoly, i: usize) -> Result<Linearized, LawError> {
        self.check(v)?;
        self.check(p)?;
        let quotient = p.diff_quot(i)?;
        let rhs = v.cyclic_grad(i)?.try_mul(p)?;
        let mut acc = self.tensor_linear(&quotient)?;
        acc.add_scaled(&self.linear(&rhs)?, -1.0);
        Ok(acc)
    }

    /// `μ⊗μ(∂_i P) − μ(D_i V · P)` for one index `i`.
    pub fn sd_residual_component(&self, v: &NCPoly, p: &NCPoly, i: usize) -> Result<Estimate, LawError> {
        Ok(self.sd_component_linear(v, p, i)?.estimate())
    }

    /// `Σ_i [μ⊗μ(∂_i P) − μ(D_i V · P)]`.
    pub fn sd_residual(&self, v: &NCPoly, p: &NCPoly) -> Result<Estimate, LawError> {
        let mut acc = Linearized::zero(self.groups);
        for i in 1..=self.nvars {
            acc.add_scaled(&self.sd_component_linear(v, p, i)?, 1.0);
        }
        Ok(acc.estimate())
    }

    /// `Σ_i [μ⊗μ(∂_i D_i P) − μ(D_i V · D_i P)]`: the componentwise residual
    /// with `P` replaced by `D_i P`.
    pub fn sd_residual_thm2(&self, v: &NCPoly, p: &NCPoly) -> Result<Estimate, LawError> {
        let mut acc = Linearized::zero(self.groups);
        for i in 1..=self.nvars {
            let dp = p.cyclic_grad(i)?;
            acc.add_scaled(&self.sd_component_linear(v, &dp, i)?, 1.0);
        }
        Ok(acc.estimate())
    }

    /// Residual components for every adjoint-free monomial `P` with
    /// `1 ≤ deg P ≤ deg_max` and every index `i`, each checked against 0.
    pub fn sd_residual_suite(&self, v: &NCPoly, deg_max: usize, tol: Tolerance) -> Result<MomentReport, LawError> {
        self.check(v)?;
        let m = self.nvars;
        let one = Complex64::new(1.0, 0.0);
        let monomials: Vec<NCPoly> = (1..=deg_max)
            .flat_map(|d| Word::all_of_degree(m, d))
            .map(|w| NCPoly::monomial(m, w, one))
            .collect::<Result<_, _>>()?;

        let grads = v.cyclic_gradient()?;
        let mut needed: Vec<NCPoly> = Vec::new();
        for p in &monomials {
            for (i, g) in grads.iter().enumerate() {
                needed.push(g.try_mul(p)?);
                for (q, r) in p.diff_quot(i + 1)?.summands() {
                    needed.push(q.clone());
                    needed.push(r.clone());
                }
            }
        }
        self.prefetch(needed.iter());

        let mut report = MomentReport::new(tol);
        for p in &monomials {
            for i in 1..=m {
                let est = self.sd_residual_component(v, p, i)?;
                report.push_target(p.to_string(), Some(i), est, Complex64::new(0.0, 0.0));
            }
        }
        Ok(report)
    }

    /// `μ(X_i^k) ≤ B0^k` for all `i` and `1 ≤ k ≤ k_max`, with a `3·stderr`
    /// allowance. Odd powers are bounded in absolute value.
    pub fn moment_bound_check(&self, b0: f64, k_max: u32) -> Result<MomentReport, LawError> {
        let mut report = MomentReport::new(Tolerance::new(3.0, 0.0));
        for i in 1..=self.nvars {
            let x = NCPoly::var(self.nvars, i)?;
            for k in 1..=k_max {
                let p = x.pow(k);
                let est = self.moment(&p)?;
                report.push_bound(p.to_string(), Some(i), est, b0.powi(k as i32), k % 2 == 0);
            }
        }
        Ok(report)
    }
}

fn letter_matrix(x: &MatrixTuple, l: Letter) -> CMatrix {
    let a = x.get(l.index()).matrix();
    if l.is_starred() {
        a.adjoint()
    } else {
        a.clone()
    }
}

fn word_product<'a>(x: &MatrixTuple, w: &[Letter], memo: &'a mut HashMap<Vec<Letter>, CMatrix>) -> &'a CMatrix {
    if !memo.contains_key(w) {
        let prod = match w.split_last() {
            None => CMatrix::identity(x.dim(), x.dim()),
            Some((last, [])) => letter_matrix(x, *last),
            Some((last, init)) => {
                let left = word_product(x, init, memo).clone();
                left * letter_matrix(x, *last)
            }
        };
        memo.insert(w.to_vec(), prod);
    }
    &memo[w]
}

/// `tr_N` of each word on one sample. Each word is split in half and the
/// trace of the product of the halves is taken without forming it.
fn sample_word_traces(x: &MatrixTuple, words: &[Word]) -> Vec<Complex64> {
    let mut memo: HashMap<Vec<Letter>, CMatrix> = HashMap::new();
    words
        .iter()
        .map(|w| match w.len() {
            0 => Complex64::new(1.0, 0.0),
            1 => ntrace(&letter_matrix(x, w[0])),
            d => {
                let h = d / 2;
                let left = word_product(x, &w[..h], &mut memo).clone();
                let right = word_product(x, &w[h..], &mut memo);
                ntrace_product(&left, right)
            }
        })
        .collect()
}

/// Burn-in and sampling schedule for estimating a stationary law.
#[derive(Clone, Debug, PartialEq)]
pub struct StationaryProtocol {
    pub burn_in: f64,
    pub sample_interval: f64,
    pub t_end: f64,
    pub replicas: usize,
}

impl StationaryProtocol {
    /// Burn-in `10 / c`, one snapshot per unit time, 8 replicas.
    pub fn for_convexity(c: f64, t_end: f64) -> Self {
        StationaryProtocol {
            burn_in: 10.0 / c,
            sample_interval: 1.0,
            t_end,
            replicas: 8,
        }
    }
}

/// Runs the replicas of `base` under `protocol` and collects their
/// post-burn-in snapshots. Returned trajectories keep their scalar records
/// but not the snapshots.
pub fn sample_stationary_law(
    base: &SdeConfig,
    protocol: &StationaryProtocol,
) -> Result<(EmpiricalLaw, Vec<Trajectory>), LawError> {
    if protocol.replicas == 0 {
        return Err(LawError::Protocol("at least one replica is required".into()));
    }
    if !(protocol.sample_interval > 0.0) || !(protocol.burn_in >= 0.0) {
        return Err(LawError::Protocol("burn-in and sampling interval must be non-negative and positive".into()));
    }
    if protocol.t_end < protocol.burn_in {
        return Err(LawError::Protocol(format!(
            "sampling ends at {} before burn-in {} is over",
            protocol.t_end, protocol.burn_in
        )));
    }
    let mut cfg = base.clone();
    cfg.t_max = protocol.t_end;
    cfg.snapshot_stride = Some(((protocol.sample_interval / cfg.dt).round() as usize).max(1));
    cfg.snapshot_after = protocol.burn_in;
    let runs = simulate_replicas(&cfg, protocol.replicas);
    let mut groups = Vec::with_capacity(runs.len());
    let mut trajectories = Vec::with_capacity(runs.len());
    for run in runs {
        let mut traj = run?;
        groups.push(std::mem::take(&mut traj.snapshots).into_iter().map(|s| s.state).collect());
        trajectories.push(traj);
    }
    let meta = LawMeta {
        dt: Some(cfg.dt),
        burn_in: Some(protocol.burn_in),
        seed: Some(cfg.seed),
    };
    Ok((EmpiricalLaw::from_replicas(groups, meta)?, trajectories))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matmodel::{random_selfadjoint_tuple, RngStream};
    use crate::polylang::parse_poly;

    fn law(m: usize, n: usize, groups: usize, per: usize, seed: u64) -> EmpiricalLaw {
        let mut rng = RngStream::new(seed);
        let reps = (0..groups)
            .map(|_| {
                (0..per)
                    .map(|_| random_selfadjoint_tuple(m, n, 2.0, &mut rng).unwrap())
                    .collect()
            })
            .collect();
        EmpiricalLaw::from_replicas(reps, LawMeta::default()).unwrap()
    }

    #[test]
    fn unit_has_moment_one() {
        let l = law(2, 4, 3, 2, 1);
        assert_eq!(l.moment(&NCPoly::one(2)).unwrap().value, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn empty_law_is_an_error() {
        assert!(matches!(EmpiricalLaw::from_samples(vec![]), Err(LawError::Empty)));
        assert!(matches!(
            EmpiricalLaw::from_replicas(vec![vec![], vec![]], LawMeta::default()),
            Err(LawError::Empty)
        ));
    }

    #[test]
    fn mixed_shapes_rejected() {
        let r = EmpiricalLaw::from_samples(vec![MatrixTuple::zeros(1, 2), MatrixTuple::zeros(1, 3)]);
        assert!(matches!(r, Err(LawError::Shape(_))));
    }

    #[test]
    fn tensor_moment_unit_pairings() {
        let l = law(2, 5, 4, 3, 2);
        let one = NCPoly::one(2);
        let t = TensorPoly::elementary(one.clone(), one.clone()).unwrap();
        assert_eq!(l.tensor_moment(&t).unwrap().value, Complex64::new(1.0, 0.0));
        let p = parse_poly("X1*X2 + 2*X2^2", 2).unwrap();
        let tp = TensorPoly::elementary(p.clone(), one).unwrap();
        let a = l.tensor_moment(&tp).unwrap();
        let b = l.moment(&p).unwrap();
        assert!((a.value - b.value).norm() < 1e-14);
    }

    #[test]
    fn zero_state_residual_detects_non_stationarity() {
        let l = EmpiricalLaw::from_samples(vec![MatrixTuple::zeros(2, 3)]).unwrap();
        let v = parse_poly("0.5*X1^2 + 0.5*X2^2", 2).unwrap();
        let p = NCPoly::var(2, 1).unwrap();
        let r = l.sd_residual(&v, &p).unwrap();
        assert_eq!(r.value, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn residual_rejects_adjoints() {
        let l = law(1, 3, 2, 2, 3);
        let v = parse_poly("0.5*X1^2", 1).unwrap();
        let p = parse_poly("X1*", 1).unwrap();
        assert!(matches!(l.sd_residual(&v, &p), Err(LawError::Poly(PolyError::StarredLetter { .. }))));
    }

    #[test]
    fn thm2_form_is_componentwise_form_at_gradient() {
        let l = law(2, 4, 3, 3, 4);
        let v = parse_poly("0.5*X1^2 + 0.5*X2^2 + 0.1*X1^4 + 0.2*X1*X2*X1*X2", 2).unwrap();
        let p = parse_poly("X1^2*X2 + X2^3", 2).unwrap();
        let thm2 = l.sd_residual_thm2(&v, &p).unwrap();
        let mut acc = Linearized::zero(l.num_groups());
        for i in 1..=2 {
            let dp = p.cyclic_grad(i).unwrap();
            acc.add_scaled(&l.sd_component_linear(&v, &dp, i).unwrap(), 1.0);
        }
        assert_eq!(thm2.value, acc.value);
    }

    #[test]
    fn suite_of_degree_zero_is_empty() {
        let l = law(2, 3, 2, 2, 5);
        let v = parse_poly("0.5*X1^2 + 0.5*X2^2", 2).unwrap();
        let r = l.sd_residual_suite(&v, 0, Tolerance::new(3.0, 0.05)).unwrap();
        assert!(r.entries.is_empty());
        assert!(r.all_pass());
    }

    #[test]
    fn zero_law_passes_moment_bounds() {
        let l = EmpiricalLaw::from_samples(vec![MatrixTuple::zeros(2, 3); 4]).unwrap();
        assert!(l.moment_bound_check(0.1, 6).unwrap().all_pass());
    }

    #[test]
    fn word_traces_match_direct_evaluation() {
        let l = law(2, 6, 1, 3, 6);
        let p = parse_poly("X1*X2*X1**X2^3 + 0.5i*X2*X1 - X1^5", 2).unwrap();
        let direct: Complex64 = l
            .samples()
            .iter()
            .map(|x| ntrace(&p.evaluate(x).unwrap()))
            .sum::<Complex64>()
            / l.num_samples() as f64;
        assert!((l.moment(&p).unwrap().value - direct).norm() < 1e-12);
    }
}
