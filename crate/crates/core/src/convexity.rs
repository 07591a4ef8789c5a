//! Sampling-based certifier and refuter for `(c, M)`-convexity:
//!
//! ```text
//! (DV(X) − DV(Y)).(X − Y) ≥ c (X − Y).(X − Y)   whenever ‖X‖, ‖Y‖ ≤ M
//! ```
//!
//! A refutation comes with a witness pair that can be re-checked. A
//! certificate only says that no violation was found among the sampled
//! pairs; it is not a proof.

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matmodel::{
    brownian_increment, dot, frobenius_norm, random_selfadjoint_tuple, rescale_to_norm,
    MatrixError, MatrixTuple, RngStream,
};
use crate::ncpoly::NCPoly;
use crate::sde::{decode_snapshot, encode_snapshot, DriftEvaluator, SdeError, SnapshotMeta};

#[derive(Debug, Error)]
pub enum ConvexityError {
    #[error(transparent)]
    Sde(#[from] SdeError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("at least one trial is required")]
    NoTrials,
    #[error("witness could not be decoded: {0}")]
    Witness(String),
}

/// Which form of the inequality is tested.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapKind {
    /// As an operator inequality: smallest eigenvalue of the difference.
    Operator,
    /// After taking `tr_N`: the form a Grönwall estimate on
    /// `tr_N[(X − Y).(X − Y)]` uses.
    Trace,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    CertifiedAtTolerance,
    Refuted,
}

fn gap_matrix(
    ev: &DriftEvaluator,
    x: &MatrixTuple,
    y: &MatrixTuple,
    c: f64,
) -> Result<(crate::matmodel::CMatrix, f64), ConvexityError> {
    let h = x.try_sub(y)?;
    let a = ev.gradient_at(x)?.try_sub(&ev.gradient_at(y)?)?;
    let lhs = dot(&a, &h)?;
    let rhs = dot(&h, &h)?;
    let scale = 1f64
        .max(frobenius_norm(lhs.matrix()))
        .max(c.abs() * frobenius_norm(rhs.matrix()));
    let g = lhs.matrix() - rhs.matrix() * num_complex::Complex64::new(c, 0.0);
    Ok((g, scale))
}

fn gap_with(ev: &DriftEvaluator, x: &MatrixTuple, y: &MatrixTuple, c: f64, kind: GapKind) -> Result<(f64, f64), ConvexityError> {
    let (g, scale) = gap_matrix(ev, x, y, c)?;
    let gap = match kind {
        GapKind::Operator => crate::matmodel::hermitian_eigenvalues(&crate::matmodel::hermitize(&g))?[0],
        GapKind::Trace => crate::matmodel::ntrace(&g).re,
    };
    Ok((gap, scale))
}

/// Smallest eigenvalue of `(DV(X) − DV(Y)).(X − Y) − c (X − Y).(X − Y)`.
/// Non-negative means the inequality holds at this pair.
pub fn convexity_gap(v: &NCPoly, x: &MatrixTuple, y: &MatrixTuple, c: f64) -> Result<f64, ConvexityError> {
    let ev = DriftEvaluator::new(v)?;
    Ok(gap_with(&ev, x, y, c, GapKind::Operator)?.0)
}

/// `tr_N` of the same difference.
pub fn convexity_trace_gap(v: &NCPoly, x: &MatrixTuple, y: &MatrixTuple, c: f64) -> Result<f64, ConvexityError> {
    let ev = DriftEvaluator::new(v)?;
    Ok(gap_with(&ev, x, y, c, GapKind::Trace)?.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub x: MatrixTuple,
    pub y: MatrixTuple,
    pub gap: f64,
}

impl Witness {
    /// Recomputes the gap of this pair.
    pub fn recheck(&self, v: &NCPoly, c: f64, kind: GapKind) -> Result<f64, ConvexityError> {
        let ev = DriftEvaluator::new(v)?;
        Ok(gap_with(&ev, &self.x, &self.y, c, kind)?.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvexityReport {
    pub potential: String,
    pub c: f64,
    pub m_bound: f64,
    pub n: usize,
    pub kind: GapKind,
    pub trials: usize,
    /// Most negative gap found (or the smallest non-negative one).
    pub min_gap: f64,
    /// Relative tolerance the refutation threshold is scaled by.
    pub tolerance: f64,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
}

impl ConvexityReport {
    pub fn certified(&self) -> bool {
        self.verdict == Verdict::CertifiedAtTolerance
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertifyOptions {
    pub trials: usize,
    pub n: usize,
    pub kind: GapKind,
    /// Size of perturbation pairs `Y = X + ε·D`; default `1e-3 · M`.
    pub epsilon: Option<f64>,
    /// Refute when `gap < −tolerance · scale`.
    pub tolerance: f64,
}

impl CertifyOptions {
    pub fn new(trials: usize, n: usize) -> Self {
        CertifyOptions {
            trials,
            n,
            kind: GapKind::Operator,
            epsilon: None,
            tolerance: 1e-8,
        }
    }

    pub fn with_kind(mut self, kind: GapKind) -> Self {
        self.kind = kind;
        self
    }
}

/// Operator-form certification with default options.
pub fn certify(
    v: &NCPoly,
    c: f64,
    m_bound: f64,
    trials: usize,
    n: usize,
    rng: &mut RngStream,
) -> Result<ConvexityReport, ConvexityError> {
    certify_with(v, c, m_bound, CertifyOptions::new(trials, n), rng)
}

fn sample_pair(
    trial: usize,
    m: usize,
    n: usize,
    m_bound: f64,
    eps: f64,
    rng: &mut RngStream,
) -> Result<(MatrixTuple, MatrixTuple), MatrixError> {
    match trial % 3 {
        // independent pair inside the ball
        0 => Ok((
            random_selfadjoint_tuple(m, n, m_bound, rng)?,
            random_selfadjoint_tuple(m, n, m_bound, rng)?,
        )),
        // nearby pair: local, second-order regime
        1 => {
            let inner = (m_bound - eps).max(0.5 * m_bound);
            let x = random_selfadjoint_tuple(m, n, inner, rng)?;
            let d = brownian_increment(m, n, 1.0, rng)?;
            let d = rescale_to_norm(&d, eps.min(m_bound - inner).max(f64::MIN_POSITIVE), m_bound)?;
            let y = x.try_add(&d)?;
            Ok((x, y))
        }
        // both on the boundary sphere
        _ => {
            let x = brownian_increment(m, n, 1.0, rng)?;
            let y = brownian_increment(m, n, 1.0, rng)?;
            Ok((rescale_to_norm(&x, m_bound, m_bound)?, rescale_to_norm(&y, m_bound, m_bound)?))
        }
    }
}

pub fn certify_with(
    v: &NCPoly,
    c: f64,
    m_bound: f64,
    opts: CertifyOptions,
    rng: &mut RngStream,
) -> Result<ConvexityReport, ConvexityError> {
    if opts.trials == 0 {
        return Err(ConvexityError::NoTrials);
    }
    if !(m_bound > 0.0) {
        return Err(MatrixError::NonPositiveBound(m_bound).into());
    }
    let ev = DriftEvaluator::new(v)?;
    let m = v.nvars();
    let eps = opts.epsilon.unwrap_or(1e-3 * m_bound);
    let master = rng.next_u64();

    let results: Vec<(usize, f64, f64, MatrixTuple, MatrixTuple)> = (0..opts.trials)
        .into_par_iter()
        .map(|trial| {
            let mut local = RngStream::for_replica(master, trial as u64);
            let (x, y) = sample_pair(trial, m, opts.n, m_bound, eps, &mut local)?;
            let (gap, scale) = gap_with(&ev, &x, &y, c, opts.kind)?;
            Ok((trial, gap, scale, x, y))
        })
        .collect::<Result<_, ConvexityError>>()?;

    let worst = results
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
        .expect("at least one trial");
    let violation = results
        .iter()
        .filter(|r| r.1 < -opts.tolerance * r.2)
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));

    let (verdict, witness) = match violation {
        Some(r) => (
            Verdict::Refuted,
            Some(Witness {
                x: r.3.clone(),
                y: r.4.clone(),
                gap: r.1,
            }),
        ),
        None => (Verdict::CertifiedAtTolerance, None),
    };
    Ok(ConvexityReport {
        potential: v.to_string(),
        c,
        m_bound,
        n: opts.n,
        kind: opts.kind,
        trials: opts.trials,
        min_gap: worst.1,
        tolerance: opts.tolerance,
        verdict,
        witness,
    })
}

#[derive(Serialize, Deserialize)]
struct EncodedTuple {
    #[serde(flatten)]
    meta: SnapshotMeta,
    /// Base64 of the little-endian complex64 snapshot bytes.
    data: String,
}

impl EncodedTuple {
    fn new(x: &MatrixTuple) -> Self {
        EncodedTuple {
            meta: SnapshotMeta {
                m: x.len(),
                n: x.dim(),
                t: 0.0,
                seed: 0,
            },
            data: B64.encode(encode_snapshot(x)),
        }
    }

    fn decode(&self) -> Result<MatrixTuple, ConvexityError> {
        let bytes = B64
            .decode(&self.data)
            .map_err(|e| ConvexityError::Witness(e.to_string()))?;
        decode_snapshot(&self.meta, &bytes).map_err(|e| ConvexityError::Witness(e.to_string()))
    }
}

#[derive(Serialize, Deserialize)]
struct EncodedWitness {
    gap: f64,
    x: EncodedTuple,
    y: EncodedTuple,
}

#[derive(Serialize, Deserialize)]
struct ReportJson {
    potential: String,
    c: f64,
    m_bound: f64,
    #[serde(rename = "N")]
    n: usize,
    kind: GapKind,
    trials: usize,
    min_gap: f64,
    tolerance: f64,
    verdict: Verdict,
    witness: Option<EncodedWitness>,
}

impl ConvexityReport {
    /// JSON with the witness tuples in snapshot encoding (base64 payload).
    pub fn to_json(&self) -> String {
        let json = ReportJson {
            potential: self.potential.clone(),
            c: self.c,
            m_bound: self.m_bound,
            n: self.n,
            kind: self.kind,
            trials: self.trials,
            min_gap: self.min_gap,
            tolerance: self.tolerance,
            verdict: self.verdict,
            witness: self.witness.as_ref().map(|w| EncodedWitness {
                gap: w.gap,
                x: EncodedTuple::new(&w.x),
                y: EncodedTuple::new(&w.y),
            }),
        };
        serde_json::to_string_pretty(&json).expect("report serializes") + "\n"
    }

    /// Parses [`ConvexityReport::to_json`] output. Witness entries come back
    /// at complex64 precision.
    pub fn from_json(text: &str) -> Result<Self, ConvexityError> {
        let j: ReportJson = serde_json::from_str(text).map_err(|e| ConvexityError::Witness(e.to_string()))?;
        let witness = match j.witness {
            Some(w) => Some(Witness {
                x: w.x.decode()?,
                y: w.y.decode()?,
                gap: w.gap,
            }),
            None => None,
        };
        Ok(ConvexityReport {
            potential: j.potential,
            c: j.c,
            m_bound: j.m_bound,
            n: j.n,
            kind: j.kind,
            trials: j.trials,
            min_gap: j.min_gap,
            tolerance: j.tolerance,
            verdict: j.verdict,
            witness,
        })
    }
}
