//! Hermitian matrix models standing in for operators in a tracial
//! W*-probability space.
//!
//! A free Brownian motion is approximated by Hermitian Brownian motion: each
//! increment over a step `dt` is a GUE matrix whose entries have variance
//! `dt / N`, so that `tr_N(ΔS²)` concentrates at `dt`.

mod rng;

pub use rng::RngStream;

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

pub type CMatrix = DMatrix<Complex64>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatrixError {
    #[error("time step must be positive, got {0}")]
    NonPositiveStep(f64),
    #[error("matrix dimension must be at least 1")]
    EmptyDimension,
    #[error("a tuple needs at least one matrix")]
    EmptyTuple,
    #[error("bound must be positive, got {0}")]
    NonPositiveBound(f64),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
}

/// `(A + A†) / 2`.
pub fn hermitize(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Largest absolute entry of `A − A†`.
pub fn hermitian_deviation(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Normalized trace `(1/N) Σ A_kk`.
pub fn ntrace(a: &CMatrix) -> Complex64 {
    a.trace() / a.nrows() as f64
}

/// `tr_N(A B)` without forming the product.
pub fn ntrace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..n {
        for k in 0..n {
            acc += a[(j, k)] * b[(k, j)];
        }
    }
    acc / n as f64
}

fn check_finite(a: &CMatrix) -> Result<(), MatrixError> {
    if a.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(MatrixError::NonFinite)
    }
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Result<Vec<f64>, MatrixError> {
    check_finite(a)?;
    let mut eig: Vec<f64> = a.clone().symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

/// Operator norm of a Hermitian matrix: the largest `|eigenvalue|`.
pub fn op_norm(a: &CMatrix) -> Result<f64, MatrixError> {
    let eig = hermitian_eigenvalues(a)?;
    Ok(eig.iter().fold(0.0f64, |m, l| m.max(l.abs())))
}

/// Operator norm of an arbitrary square matrix (largest singular value).
pub fn spectral_norm(a: &CMatrix) -> Result<f64, MatrixError> {
    let gram = hermitize(&(a.adjoint() * a));
    Ok(op_norm(&gram)?.sqrt())
}

pub fn frobenius_norm(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// A complex matrix equal to its conjugate transpose.
#[derive(Clone, Debug, PartialEq)]
pub struct HermMatrix(CMatrix);

impl HermMatrix {
    /// Projects onto the Hermitian part.
    pub fn hermitized(a: &CMatrix) -> Self {
        HermMatrix(hermitize(a))
    }

    /// Accepts `a` if it is Hermitian within `tol` (then symmetrizes it exactly).
    pub fn try_new(a: CMatrix, tol: f64) -> Result<Self, MatrixError> {
        if !a.is_square() {
            return Err(MatrixError::Shape(format!(
                "{}x{} is not square",
                a.nrows(),
                a.ncols()
            )));
        }
        check_finite(&a)?;
        let dev = hermitian_deviation(&a);
        if dev > tol {
            return Err(MatrixError::NotHermitian(dev));
        }
        Ok(HermMatrix(hermitize(&a)))
    }

    pub fn zeros(n: usize) -> Self {
        HermMatrix(CMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        HermMatrix(CMatrix::identity(n, n))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        HermMatrix(CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(diag[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn op_norm(&self) -> Result<f64, MatrixError> {
        op_norm(&self.0)
    }

    pub fn ntrace(&self) -> f64 {
        ntrace(&self.0).re
    }

    pub fn scaled(&self, s: f64) -> Self {
        HermMatrix(&self.0 * Complex64::new(s, 0.0))
    }

    pub fn min_eigenvalue(&self) -> Result<f64, MatrixError> {
        Ok(hermitian_eigenvalues(&self.0)?[0])
    }
}

impl std::ops::Deref for HermMatrix {
    type Target = CMatrix;

    fn deref(&self) -> &CMatrix {
        &self.0
    }
}

/// `m` Hermitian matrices of a common size `N`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixTuple {
    mats: Vec<HermMatrix>,
}

impl MatrixTuple {
    pub fn new(mats: Vec<HermMatrix>) -> Result<Self, MatrixError> {
        let first = mats.first().ok_or(MatrixError::EmptyTuple)?;
        let n = first.dim();
        if n == 0 {
            return Err(MatrixError::EmptyDimension);
        }
        if let Some(bad) = mats.iter().find(|a| a.dim() != n) {
            return Err(MatrixError::Shape(format!(
                "tuple mixes {n}x{n} and {0}x{0} matrices",
                bad.dim()
            )));
        }
        Ok(MatrixTuple { mats })
    }

    pub fn zeros(m: usize, n: usize) -> Self {
        assert!(m >= 1 && n >= 1, "tuple must be non-empty");
        MatrixTuple {
            mats: (0..m).map(|_| HermMatrix::zeros(n)).collect(),
        }
    }

    /// The scalar (`N = 1`) tuple with the given real entries.
    pub fn scalars(values: &[f64]) -> Self {
        Self::new(
            values
                .iter()
                .map(|&v| HermMatrix::from_real_diagonal(&[v]))
                .collect(),
        )
        .expect("non-empty scalar tuple")
    }

    /// Number of matrices `m`.
    pub fn len(&self) -> usize {
        self.mats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mats.is_empty()
    }

    /// Matrix size `N`.
    pub fn dim(&self) -> usize {
        self.mats[0].dim()
    }

    /// The `i`-th matrix, 1-based to match `X_i`.
    pub fn get(&self, i: usize) -> &HermMatrix {
        &self.mats[i - 1]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, HermMatrix> {
        self.mats.iter()
    }

    pub fn into_matrices(self) -> Vec<HermMatrix> {
        self.mats
    }

    fn check_shape(&self, other: &MatrixTuple) -> Result<(), MatrixError> {
        if self.len() != other.len() || self.dim() != other.dim() {
            return Err(MatrixError::Shape(format!(
                "({}, {}) vs ({}, {})",
                self.len(),
                self.dim(),
                other.len(),
                other.dim()
            )));
        }
        Ok(())
    }

    /// Tuple norm: the largest operator norm among the entries.
    pub fn norm(&self) -> Result<f64, MatrixError> {
        self.mats
            .iter()
            .try_fold(0.0f64, |m, a| Ok(m.max(a.op_norm()?)))
    }

    pub fn try_sub(&self, other: &MatrixTuple) -> Result<MatrixTuple, MatrixError> {
        self.check_shape(other)?;
        Ok(MatrixTuple {
            mats: self
                .mats
                .iter()
                .zip(&other.mats)
                .map(|(a, b)| HermMatrix(&a.0 - &b.0))
                .collect(),
        })
    }

    pub fn try_add(&self, other: &MatrixTuple) -> Result<MatrixTuple, MatrixError> {
        self.check_shape(other)?;
        Ok(MatrixTuple {
            mats: self
                .mats
                .iter()
                .zip(&other.mats)
                .map(|(a, b)| HermMatrix(&a.0 + &b.0))
                .collect(),
        })
    }

    pub fn scaled(&self, s: f64) -> MatrixTuple {
        MatrixTuple {
            mats: self.mats.iter().map(|a| a.scaled(s)).collect(),
        }
    }

    pub fn max_hermitian_deviation(&self) -> f64 {
        self.mats
            .iter()
            .map(|a| hermitian_deviation(&a.0))
            .fold(0.0, f64::max)
    }

    /// Feeds every entry's bit pattern to `f`, in a fixed order.
    pub fn for_each_bits(&self, mut f: impl FnMut(u64)) {
        for a in &self.mats {
            for z in a.0.iter() {
                f(z.re.to_bits());
                f(z.im.to_bits());
            }
        }
    }
}

/// `X.Y = ½ Σ_i (X_i Y_i* + Y_i X_i*)`.
pub fn dot(x: &MatrixTuple, y: &MatrixTuple) -> Result<HermMatrix, MatrixError> {
    x.check_shape(y)?;
    let n = x.dim();
    let mut acc = CMatrix::zeros(n, n);
    for (a, b) in x.iter().zip(y.iter()) {
        // both products, so swapping X and Y gives the same bits
        let ab = a.matrix() * b.matrix().adjoint();
        let ba = b.matrix() * a.matrix().adjoint();
        acc += ab + ba;
    }
    Ok(HermMatrix::hermitized(&(acc * Complex64::new(0.5, 0.0))))
}

/// GUE-type sample: Hermitian, diagonal entries real `N(0, var)`, off-diagonal
/// entries complex with total variance `var`.
pub fn gue_matrix(n: usize, var: f64, rng: &mut RngStream) -> CMatrix {
    let sd_diag = var.sqrt();
    let sd_off = (var / 2.0).sqrt();
    let mut a = CMatrix::zeros(n, n);
    for i in 0..n {
        a[(i, i)] = Complex64::new(sd_diag * rng.standard_normal(), 0.0);
        for j in (i + 1)..n {
            let z = Complex64::new(
                sd_off * rng.standard_normal(),
                sd_off * rng.standard_normal(),
            );
            a[(i, j)] = z;
            a[(j, i)] = z.conj();
        }
    }
    a
}

/// Increment `ΔS` of an `m`-tuple of Hermitian Brownian motions over `dt`.
pub fn brownian_increment(
    m: usize,
    n: usize,
    dt: f64,
    rng: &mut RngStream,
) -> Result<MatrixTuple, MatrixError> {
    if !(dt > 0.0) {
        return Err(MatrixError::NonPositiveStep(dt));
    }
    if n == 0 {
        return Err(MatrixError::EmptyDimension);
    }
    if m == 0 {
        return Err(MatrixError::EmptyTuple);
    }
    let var = dt / n as f64;
    Ok(MatrixTuple {
        mats: (0..m)
            .map(|_| HermMatrix(gue_matrix(n, var, rng)))
            .collect(),
    })
}

/// Random Hermitian tuple with tuple norm uniform in `(0, bound]`.
pub fn random_selfadjoint_tuple(
    m: usize,
    n: usize,
    bound: f64,
    rng: &mut RngStream,
) -> Result<MatrixTuple, MatrixError> {
    let raw = brownian_increment(m, n, 1.0, rng)?;
    let target = bound * rng.unit_interval_open_closed();
    rescale_to_norm(&raw, target, bound)
}

/// Rescales `x` so its tuple norm equals `target`; `bound > 0` is validated.
pub fn rescale_to_norm(x: &MatrixTuple, target: f64, bound: f64) -> Result<MatrixTuple, MatrixError> {
    if !(bound > 0.0) {
        return Err(MatrixError::NonPositiveBound(bound));
    }
    let norm = x.norm()?;
    if norm == 0.0 {
        return Ok(x.clone());
    }
    // Never let rounding push the result past the bound.
    let mut s = target / norm;
    let mut out = x.scaled(s);
    while out.norm()? > bound {
        s *= 1.0 - 1e-15;
        out = x.scaled(s);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn op_norm_examples() {
        assert_eq!(HermMatrix::identity(4).op_norm().unwrap(), 1.0);
        let d = HermMatrix::from_real_diagonal(&[3.0, -5.0]);
        assert!((d.op_norm().unwrap() - 5.0).abs() < 1e-14);
    }

    #[test]
    fn op_norm_rejects_non_finite() {
        let mut a = CMatrix::identity(2, 2);
        a[(0, 0)] = Complex64::new(f64::NAN, 0.0);
        assert_eq!(op_norm(&a), Err(MatrixError::NonFinite));
    }

    #[test]
    fn ntrace_examples() {
        assert_eq!(ntrace(&CMatrix::identity(7, 7)), Complex64::new(1.0, 0.0));
        let mut rng = RngStream::new(3);
        let a = gue_matrix(8, 1.0, &mut rng);
        let b = gue_matrix(8, 1.0, &mut rng);
        let comm = &a * &b - &b * &a;
        assert!(ntrace(&comm).norm() < 1e-12);
        let direct = ntrace(&(&a * &b));
        assert!((ntrace_product(&a, &b) - direct).norm() < 1e-12);
    }

    #[test]
    fn dot_with_zero_is_zero() {
        let mut rng = RngStream::new(1);
        let x = random_selfadjoint_tuple(2, 5, 1.0, &mut rng).unwrap();
        let z = MatrixTuple::zeros(2, 5);
        assert!(dot(&x, &z).unwrap().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn dot_of_selfadjoint_tuple_is_sum_of_squares() {
        let mut rng = RngStream::new(2);
        let x = random_selfadjoint_tuple(3, 6, 2.0, &mut rng).unwrap();
        let d = dot(&x, &x).unwrap();
        let squares: CMatrix = x.iter().map(|a| a.matrix() * a.matrix()).sum();
        assert!(frobenius_norm(&(d.matrix() - squares)) < 1e-12);
        assert!(d.min_eigenvalue().unwrap() >= -1e-10);
    }

    #[test]
    fn dot_shape_mismatch() {
        assert!(dot(&MatrixTuple::zeros(2, 3), &MatrixTuple::zeros(2, 4)).is_err());
        assert!(dot(&MatrixTuple::zeros(1, 3), &MatrixTuple::zeros(2, 3)).is_err());
    }

    #[test]
    fn increment_is_hermitian_and_seeded() {
        let a = brownian_increment(2, 9, 0.1, &mut RngStream::new(11)).unwrap();
        let b = brownian_increment(2, 9, 0.1, &mut RngStream::new(11)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.max_hermitian_deviation(), 0.0);
        assert_eq!(
            brownian_increment(1, 2, 0.0, &mut RngStream::new(0)),
            Err(MatrixError::NonPositiveStep(0.0))
        );
        assert!(brownian_increment(1, 2, -1.0, &mut RngStream::new(0)).is_err());
    }

    #[test]
    fn random_tuple_respects_bound() {
        let mut rng = RngStream::new(5);
        for _ in 0..1000 {
            let x = random_selfadjoint_tuple(2, 3, 0.7, &mut rng).unwrap();
            assert!(x.norm().unwrap() <= 0.7);
            assert!(x.max_hermitian_deviation() <= 1e-12);
        }
        assert!(random_selfadjoint_tuple(1, 3, 0.0, &mut rng).is_err());
    }

    #[test]
    fn herm_try_new_checks() {
        let mut a = CMatrix::identity(2, 2);
        a[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(matches!(
            HermMatrix::try_new(a, 1e-12),
            Err(MatrixError::NotHermitian(_))
        ));
        assert!(HermMatrix::try_new(CMatrix::zeros(2, 3), 1e-12).is_err());
    }
}
