//! Dense complex linear algebra used by every other module.
//!
//! [`ComplexMatrix`] wraps a `faer` matrix and adds the handful of checks the
//! rest of the crate relies on: Hermiticity before diagonalization, unitarity
//! of exponentials, and the [`Projection`] wrapper whose residuals are recorded
//! at construction.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use faer::{Mat, Side};
pub use faer::c64;

use crate::error::{Error, Result};

/// Relative tolerance on `||A - A*||` accepted by [`eigh`].
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Default tolerance for [`validate_projection`].
pub const PROJECTION_TOL: f64 = 1e-8;

const ZERO: c64 = c64 { re: 0.0, im: 0.0 };

/// Runs every dense kernel on the calling thread. Results then no longer
/// depend on the size of the thread pool; callers may still parallelize
/// over independent problems.
pub fn use_sequential_kernels() {
    faer::set_global_parallelism(faer::Par::Seq);
}

/// Dense complex matrix with at least one row and one column.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(Mat<c64>);

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix({}x{})", self.nrows(), self.ncols())
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(Mat::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(Mat::identity(n, n))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> c64) -> Self {
        Self(Mat::from_fn(rows, cols, f))
    }

    /// Builds a matrix from row-major entries, rejecting empty shapes and
    /// non-finite values.
    pub fn from_row_major(rows: usize, cols: usize, entries: &[c64]) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidMatrix);
        }
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: entries.len(),
            });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidMatrix);
        }
        Ok(Self::from_fn(rows, cols, |i, j| entries[i * cols + j]))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { c64::new(diag[i], 0.0) } else { ZERO })
    }

    pub fn from_diagonal(diag: &[c64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { ZERO })
    }

    /// The rank-one operator `|f><g|`.
    pub fn rank_one(f: &[c64], g: &[c64]) -> Self {
        Self::from_fn(f.len(), g.len(), |i, j| f[i] * g[j].conj())
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<c64>]) -> Self {
        Self::from_fn(rows, columns.len(), |i, j| columns[j][i])
    }

    /// Orthogonal projection onto the span of orthonormal `vectors`.
    pub fn projector_onto(dim: usize, vectors: &[Vec<c64>]) -> Self {
        let mut out = Self::zeros(dim, dim);
        for v in vectors {
            for i in 0..dim {
                for j in 0..dim {
                    out.0[(i, j)] += v[i] * v[j].conj();
                }
            }
        }
        out
    }

    pub fn from_mat(m: Mat<c64>) -> Self {
        Self(m)
    }

    pub fn as_mat(&self) -> &Mat<c64> {
        &self.0
    }

    pub fn into_mat(self) -> Mat<c64> {
        self.0
    }

    pub fn nrows(&self) -> usize {
        self.0.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.nrows() == self.ncols()
    }

    pub fn dim(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.nrows())
        } else {
            Err(Error::NotSquare {
                rows: self.nrows(),
                cols: self.ncols(),
            })
        }
    }

    pub fn get(&self, i: usize, j: usize) -> c64 {
        self.0[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: c64) {
        self.0[(i, j)] = value;
    }

    pub fn column(&self, j: usize) -> Vec<c64> {
        (0..self.nrows()).map(|i| self.0[(i, j)]).collect()
    }

    pub fn diagonal(&self) -> Vec<c64> {
        (0..self.nrows().min(self.ncols()))
            .map(|i| self.0[(i, i)])
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        (0..self.nrows()).all(|i| {
            (0..self.ncols()).all(|j| {
                let z = self.0[(i, j)];
                z.re.is_finite() && z.im.is_finite()
            })
        })
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint().to_owned())
    }

    pub fn scale(&self, s: c64) -> Self {
        Self::from_fn(self.nrows(), self.ncols(), |i, j| self.0[(i, j)] * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(c64::new(s, 0.0))
    }

    pub fn trace(&self) -> c64 {
        self.diagonal().into_iter().fold(ZERO, |acc, z| acc + z)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm_l2()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.norm_max()
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> Result<f64> {
        let s = self.0.singular_values().map_err(|_| Error::ConvergenceFailure)?;
        Ok(s.first().copied().unwrap_or(0.0))
    }

    /// Operator norm, skipping the SVD whenever the Frobenius norm already
    /// bounds it below `threshold`.
    pub fn operator_norm_bounded(&self, threshold: f64) -> Result<f64> {
        let fro = self.frobenius_norm();
        if fro <= threshold {
            Ok(fro)
        } else {
            self.operator_norm()
        }
    }

    pub fn matvec(&self, v: &[c64]) -> Vec<c64> {
        (0..self.nrows())
            .map(|i| (0..self.ncols()).fold(ZERO, |acc, j| acc + self.0[(i, j)] * v[j]))
            .collect()
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// `||A - A*||` in operator norm.
    pub fn hermiticity_residual(&self) -> Result<f64> {
        let d = self.dim()?;
        let diff = Self::from_fn(d, d, |i, j| self.0[(i, j)] - self.0[(j, i)].conj());
        diff.operator_norm()
    }

    /// `||W*W - 1||` in operator norm.
    pub fn unitarity_residual(&self) -> Result<f64> {
        let d = self.dim()?;
        let gram = &self.adjoint() * self;
        (&gram - &Self::identity(d)).operator_norm()
    }

    /// `(A + A*) / 2`.
    pub fn hermitian_part(&self) -> Result<Self> {
        let d = self.dim()?;
        Ok(Self::from_fn(d, d, |i, j| {
            (self.0[(i, j)] + self.0[(j, i)].conj()) * 0.5
        }))
    }

    /// Multiplies row `i` by `left[i]` and column `j` by `right[j]`.
    pub fn scale_rows_cols(&self, left: &[c64], right: &[c64]) -> Self {
        Self::from_fn(self.nrows(), self.ncols(), |i, j| {
            left[i] * self.0[(i, j)] * right[j]
        })
    }

    /// Keeps entries whose row and column both satisfy `mask`, zeroing the rest.
    pub fn compress(&self, mask: &[bool]) -> Self {
        Self::from_fn(self.nrows(), self.ncols(), |i, j| {
            if mask[i] && mask[j] {
                self.0[(i, j)]
            } else {
                ZERO
            }
        })
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

/// Hermitian eigendecomposition `A = U diag(values) U*`, values ascending.
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigh {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, k: usize) -> Vec<c64> {
        self.vectors.column(k)
    }

    /// `U f(diag) U*` for a complex spectral function.
    pub fn apply_function(&self, f: impl Fn(f64) -> c64) -> ComplexMatrix {
        let n = self.dim();
        let fv: Vec<c64> = self.values.iter().map(|&l| f(l)).collect();
        let left = ComplexMatrix::from_fn(n, n, |i, k| self.vectors.get(i, k) * fv[k]);
        &left * &self.vectors.adjoint()
    }

    /// Projection onto the eigenvectors whose eigenvalue satisfies `keep`.
    pub fn spectral_projector(&self, keep: impl Fn(f64) -> bool) -> ComplexMatrix {
        let n = self.dim();
        let cols: Vec<usize> = (0..n).filter(|&k| keep(self.values[k])).collect();
        let v = ComplexMatrix::from_fn(n, cols.len().max(1), |i, c| {
            if c < cols.len() {
                self.vectors.get(i, cols[c])
            } else {
                ZERO
            }
        });
        &v * &v.adjoint()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply_function(|l| c64::new(l, 0.0))
    }
}

/// Rotates `v` so its first component of non-negligible magnitude is real
/// and positive.
pub fn fix_phase(v: &mut [c64]) {
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return;
    }
    if let Some(z) = v.iter().find(|z| z.norm() > 1e-8 * scale).copied() {
        let phase = z.conj() / z.norm();
        for x in v.iter_mut() {
            *x *= phase;
        }
    }
}

/// Hermitian eigendecomposition with ascending eigenvalues and phase-fixed
/// eigenvectors.
pub fn eigh(a: &ComplexMatrix) -> Result<Eigh> {
    let n = a.dim()?;
    check_hermitian(a)?;
    let sym = a.hermitian_part()?;
    let evd = sym
        .0
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::ConvergenceFailure)?;
    let s = evd.S().column_vector();
    let values: Vec<f64> = (0..n).map(|k| s[k].re).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::ConvergenceFailure);
    }
    let u = evd.U();
    let mut vectors = Mat::<c64>::zeros(n, n);
    for k in 0..n {
        let mut col: Vec<c64> = (0..n).map(|i| u[(i, k)]).collect();
        fix_phase(&mut col);
        for (i, z) in col.into_iter().enumerate() {
            vectors[(i, k)] = z;
        }
    }
    Ok(Eigh {
        values,
        vectors: ComplexMatrix(vectors),
    })
}

/// Eigenvalues only, ascending.
pub fn eigvalsh(a: &ComplexMatrix) -> Result<Vec<f64>> {
    a.dim()?;
    check_hermitian(a)?;
    let sym = a.hermitian_part()?;
    sym.0
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::ConvergenceFailure)
}

fn check_hermitian(a: &ComplexMatrix) -> Result<()> {
    let tol = HERMITICITY_TOL * a.frobenius_norm().max(1.0);
    let n = a.nrows();
    let fro = {
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (a.get(i, j) - a.get(j, i).conj()).norm_sqr();
            }
        }
        acc.sqrt()
    };
    if fro <= tol {
        return Ok(());
    }
    let residual = a.hermiticity_residual()?;
    if residual > tol {
        return Err(Error::NonHermitian { residual, tol });
    }
    Ok(())
}

/// Singular values, descending.
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    a.0.singular_values().map_err(|_| Error::ConvergenceFailure)
}

/// Order of a Schatten norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SchattenOrder {
    Finite(f64),
    Infinity,
}

/// `(sum sigma_i^p)^(1/p)` over singular values, or the largest one for `p = inf`.
pub fn schatten_norm(a: &ComplexMatrix, order: SchattenOrder) -> Result<f64> {
    if let SchattenOrder::Finite(p) = order {
        if !(p >= 1.0) {
            return Err(Error::InvalidOrder(p));
        }
    }
    if !a.is_finite() {
        return Err(Error::InvalidMatrix);
    }
    let s = singular_values(a)?;
    Ok(match order {
        SchattenOrder::Infinity => s.first().copied().unwrap_or(0.0),
        SchattenOrder::Finite(p) => {
            let top = s.first().copied().unwrap_or(0.0);
            if top == 0.0 {
                0.0
            } else {
                // factor out the largest value to avoid overflow for large p
                top * s.iter().map(|x| (x / top).powf(p)).sum::<f64>().powf(1.0 / p)
            }
        }
    })
}

/// `exp(i t A)` for Hermitian `A`, built from its eigendecomposition.
pub fn expm_antihermitian(a: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let e = eigh(a)?;
    Ok(exp_from_eigh(&e, t))
}

/// `exp(i t A)` given the eigendecomposition of `A`.
pub fn exp_from_eigh(e: &Eigh, t: f64) -> ComplexMatrix {
    e.apply_function(|l| c64::from_polar(1.0, t * l))
}

/// Orthogonal projection with its validation residuals.
#[derive(Clone, Debug)]
pub struct Projection {
    matrix: ComplexMatrix,
    tol: f64,
    hermiticity_residual: f64,
    idempotency_residual: f64,
}

impl Projection {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn hermiticity_residual(&self) -> f64 {
        self.hermiticity_residual
    }

    pub fn idempotency_residual(&self) -> f64 {
        self.idempotency_residual
    }

    /// Trace rounded to the nearest integer.
    pub fn rank(&self) -> usize {
        self.matrix.trace().re.round().max(0.0) as usize
    }

    /// `1 - P`.
    pub fn complement(&self) -> Projection {
        let d = self.dim();
        Projection {
            matrix: &ComplexMatrix::identity(d) - &self.matrix,
            ..self.clone()
        }
    }

    /// Orthonormal basis of the range, ordered by descending eigenvalue and
    /// phase-fixed.
    pub fn range_basis(&self) -> Result<Vec<Vec<c64>>> {
        let e = eigh(&self.matrix)?;
        Ok((0..e.dim())
            .rev()
            .filter(|&k| e.values[k] > 0.5)
            .map(|k| e.vector(k))
            .collect())
    }

    /// Wraps a matrix known to be a projection by construction.
    pub(crate) fn trusted(matrix: ComplexMatrix) -> Projection {
        Projection {
            matrix,
            tol: PROJECTION_TOL,
            hermiticity_residual: 0.0,
            idempotency_residual: 0.0,
        }
    }

    /// Projection onto the coordinates selected by `mask`.
    pub fn coordinate(mask: &[bool]) -> Projection {
        let diag: Vec<f64> = mask.iter().map(|&m| if m { 1.0 } else { 0.0 }).collect();
        Projection::trusted(ComplexMatrix::from_real_diagonal(&diag))
    }

    /// Projection onto the span of orthonormal vectors.
    pub fn onto(dim: usize, vectors: &[Vec<c64>]) -> Projection {
        Projection::trusted(ComplexMatrix::projector_onto(dim, vectors))
    }
}

/// Checks Hermiticity and idempotency in operator norm and wraps `m`.
pub fn validate_projection(m: &ComplexMatrix, tol: f64) -> Result<Projection> {
    let d = m.dim()?;
    if !m.is_finite() {
        return Err(Error::InvalidMatrix);
    }
    let herm = {
        let diff = ComplexMatrix::from_fn(d, d, |i, j| m.get(i, j) - m.get(j, i).conj());
        diff.operator_norm_bounded(tol)?
    };
    let idem = (&(m * m) - m).operator_norm_bounded(tol)?;
    if herm > tol || idem > tol {
        return Err(Error::NotProjection {
            hermiticity: herm,
            idempotency: idem,
            tol,
        });
    }
    Ok(Projection {
        matrix: m.clone(),
        tol,
        hermiticity_residual: herm,
        idempotency_residual: idem,
    })
}

/// `<a, b>`, antilinear in `a`.
pub fn inner(a: &[c64], b: &[c64]) -> c64 {
    a.iter().zip(b).fold(ZERO, |acc, (x, y)| acc + x.conj() * y)
}

pub fn norm(a: &[c64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples::{random_hermitian, seeded_rng};

    const ONE: c64 = c64 { re: 1.0, im: 0.0 };

    fn close(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
        (a - b).operator_norm().unwrap()
    }

    #[test]
    fn eigh_identity() {
        let e = eigh(&ComplexMatrix::identity(3)).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0, 1.0]);
        assert!(e.vectors.unitarity_residual().unwrap() < 1e-12);
    }

    #[test]
    fn eigh_diagonal_sorted() {
        let e = eigh(&ComplexMatrix::from_real_diagonal(&[2.0, -1.0])).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!((e.values[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn eigh_random_reconstruction() {
        let mut rng = seeded_rng(3);
        let a = random_hermitian(8, &mut rng);
        let e = eigh(&a).unwrap();
        let scale = a.operator_norm().unwrap().max(1.0);
        assert!(close(&e.reconstruct(), &a) < 1e-10 * scale);
        assert!(e.vectors.unitarity_residual().unwrap() < 1e-10);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let a = ComplexMatrix::from_row_major(
            2,
            2,
            &[ZERO, ONE, ZERO, ZERO],
        )
        .unwrap();
        assert!(matches!(eigh(&a), Err(Error::NonHermitian { .. })));
    }

    #[test]
    fn eigenvector_phase_is_fixed() {
        let mut rng = seeded_rng(11);
        let a = random_hermitian(5, &mut rng);
        let e = eigh(&a).unwrap();
        for k in 0..5 {
            let v = e.vector(k);
            let first = v.iter().find(|z| z.norm() > 1e-8).unwrap();
            assert!(first.im.abs() < 1e-12 && first.re > 0.0);
        }
    }

    #[test]
    fn schatten_examples() {
        let z = ComplexMatrix::zeros(3, 3);
        assert_eq!(schatten_norm(&z, SchattenOrder::Finite(2.0)).unwrap(), 0.0);
        assert_eq!(schatten_norm(&z, SchattenOrder::Infinity).unwrap(), 0.0);
        let mut r = ComplexMatrix::zeros(3, 3);
        r.set(0, 1, c64::new(3.0, 0.0));
        assert!((schatten_norm(&r, SchattenOrder::Finite(1.0)).unwrap() - 3.0).abs() < 1e-12);
        assert_eq!(
            schatten_norm(&r, SchattenOrder::Finite(0.5)),
            Err(Error::InvalidOrder(0.5))
        );
    }

    #[test]
    fn schatten_two_is_frobenius() {
        let mut rng = seeded_rng(5);
        let a = random_hermitian(10, &mut rng);
        let s2 = schatten_norm(&a, SchattenOrder::Finite(2.0)).unwrap();
        let tr = (&a.adjoint() * &a).trace().re;
        assert!((s2 * s2 - tr).abs() < 1e-10 * tr);
    }

    #[test]
    fn expm_examples() {
        let mut rng = seeded_rng(8);
        let a = random_hermitian(6, &mut rng);
        let w = expm_antihermitian(&a, 0.0).unwrap();
        assert!(close(&w, &ComplexMatrix::identity(6)) < 1e-12);
        let one = ComplexMatrix::from_real_diagonal(&[1.0]);
        let w = expm_antihermitian(&one, std::f64::consts::TAU).unwrap();
        assert!((w.get(0, 0) - ONE).norm() < 1e-12);
    }

    #[test]
    fn expm_group_property() {
        let mut rng = seeded_rng(9);
        let a = random_hermitian(7, &mut rng);
        let (t, s) = (0.37, -1.21);
        let lhs = &expm_antihermitian(&a, t).unwrap() * &expm_antihermitian(&a, s).unwrap();
        let rhs = expm_antihermitian(&a, t + s).unwrap();
        assert!(close(&lhs, &rhs) < 1e-9);
        assert!(rhs.unitarity_residual().unwrap() < 1e-10);
    }

    fn taylor_exp(a: &ComplexMatrix, t: f64) -> ComplexMatrix {
        // scaling and squaring around a truncated Taylor series
        let squarings = 8;
        let h = a.scale(c64::new(0.0, t / f64::from(1 << squarings)));
        let n = a.nrows();
        let mut sum = ComplexMatrix::identity(n);
        let mut term = ComplexMatrix::identity(n);
        for k in 1..20 {
            term = (&term * &h).scale_real(1.0 / k as f64);
            sum = &sum + &term;
        }
        for _ in 0..squarings {
            sum = &sum * &sum;
        }
        sum
    }

    #[test]
    fn expm_matches_taylor_oracle() {
        let sy = ComplexMatrix::from_row_major(
            2,
            2,
            &[ZERO, c64::new(0.0, -1.0), c64::new(0.0, 1.0), ZERO],
        )
        .unwrap();
        let t = std::f64::consts::FRAC_PI_2;
        let w = expm_antihermitian(&sy, t).unwrap();
        assert!(close(&w, &taylor_exp(&sy, t)) < 1e-12);
        // exp(i pi/2 sigma_y) is the real rotation [[0, 1], [-1, 0]]
        assert!((w.get(0, 1) - ONE).norm() < 1e-12);
        assert!((w.get(1, 0) + ONE).norm() < 1e-12);
        let mut rng = seeded_rng(31);
        let a = random_hermitian(6, &mut rng);
        assert!(close(&expm_antihermitian(&a, 0.7).unwrap(), &taylor_exp(&a, 0.7)) < 1e-10);
    }

    #[test]
    fn projection_validation() {
        let p = ComplexMatrix::from_real_diagonal(&[1.0, 0.0, 1.0]);
        let proj = validate_projection(&p, PROJECTION_TOL).unwrap();
        assert_eq!(proj.rank(), 2);
        let half = ComplexMatrix::from_real_diagonal(&[0.5, 0.5]);
        match validate_projection(&half, PROJECTION_TOL) {
            Err(Error::NotProjection { idempotency, .. }) => assert!((idempotency - 0.25).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn spectral_projection_of_gapped_matrix_is_valid() {
        let mut rng = seeded_rng(21);
        let a = random_hermitian(12, &mut rng);
        let e = eigh(&a).unwrap();
        let mu = 0.5 * (e.values[5] + e.values[6]);
        let p = e.spectral_projector(|l| l < mu);
        let proj = validate_projection(&p, PROJECTION_TOL).unwrap();
        assert!(proj.idempotency_residual() < 1e-12);
        assert_eq!(proj.rank(), 6);
    }
}
