//! Index of a pair of projections.
//!
//! Three formulas are provided, all exact in finite dimension:
//! the signed multiplicity of the eigenvalues `±1` of `P - Q`
//! ([`index_eig`]), the odd trace powers `tr (P - Q)^(2p'+1)`
//! ([`index_trace_power`]) and the compressed form
//! `tr Q(P - Q)Q + tr Q⊥(P - Q)Q⊥` ([`index_arveson`]).
//!
//! [`wold_decompose`] splits `P2 = V P1 V* + N₊ - N₋` where `N₊` is the
//! `-1` eigenspace of `P1 - P2` (range of `P2` inside the kernel of `P1`),
//! `N₋` the `+1` eigenspace, and `V` the direct rotation
//! `(P2 P1 + P2⊥ P1⊥)(1 - D²)^(-1/2)` on the rest. With these conventions
//! `index(P1, P2) = n₋ - n₊ = -tr(N₊ - N₋)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{c64, eigh, eigvalsh, ComplexMatrix, Projection};

/// Default distance from `±1` within which an eigenvalue of `P - Q` counts
/// as an excess state.
pub const CROSSING_TOL: f64 = 1e-7;
/// Default tolerance on the agreement of the three index formulas.
pub const AGREEMENT_TOL: f64 = 1e-8;

fn check_dims(p: &Projection, q: &Projection) -> Result<()> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: q.dim(),
        });
    }
    Ok(())
}

fn difference(p: &Projection, q: &Projection) -> Result<ComplexMatrix> {
    check_dims(p, q)?;
    Ok(p.matrix() - q.matrix())
}

/// Counts of eigenvalues of `P - Q` near `+1` and near `-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ExcessCounts {
    pub plus_one: usize,
    pub minus_one: usize,
}

impl ExcessCounts {
    pub fn index(&self) -> i64 {
        self.plus_one as i64 - self.minus_one as i64
    }
}

/// Classifies the spectrum of a Hermitian contraction against `±1`.
///
/// An eigenvalue within `tol` of `±1` counts; one whose distance falls in
/// `(tol, 2 tol]` is rejected as ambiguous.
pub fn classify_excess(values: &[f64], tol: f64) -> Result<ExcessCounts> {
    let mut counts = ExcessCounts {
        plus_one: 0,
        minus_one: 0,
    };
    for &l in values {
        let dist = 1.0 - l.abs();
        if dist <= tol {
            if l > 0.0 {
                counts.plus_one += 1;
            } else {
                counts.minus_one += 1;
            }
        } else if dist <= 2.0 * tol {
            return Err(Error::AmbiguousSpectrum { eigenvalue: l, tol });
        }
    }
    Ok(counts)
}

/// `dim(ran P ∩ ker Q) - dim(ran Q ∩ ker P)` with the default tolerance.
pub fn index_eig(p: &Projection, q: &Projection) -> Result<i64> {
    index_eig_with_tol(p, q, CROSSING_TOL)
}

pub fn index_eig_with_tol(p: &Projection, q: &Projection, tol: f64) -> Result<i64> {
    excess_counts(p, q, tol).map(|c| c.index())
}

pub fn excess_counts(p: &Projection, q: &Projection, tol: f64) -> Result<ExcessCounts> {
    let d = difference(p, q)?;
    let values = eigvalsh(&d)?;
    classify_excess(&values, tol)
}

/// `tr (P - Q)^(2p'+1)`.
pub fn index_trace_power(p: &Projection, q: &Projection, p_prime: usize) -> Result<f64> {
    let d = difference(p, q)?;
    let d2 = &d * &d;
    let mut acc = d;
    for _ in 0..p_prime {
        acc = &acc * &d2;
    }
    Ok(acc.trace().re)
}

/// `tr Q(P - Q)Q + tr Q⊥(P - Q)Q⊥`.
pub fn index_arveson(p: &Projection, q: &Projection) -> Result<f64> {
    let d = difference(p, q)?;
    let qm = q.matrix();
    let qc = q.complement();
    let qcm = qc.matrix();
    let a = (&(qm * &d) * qm).trace().re;
    let b = (&(qcm * &d) * qcm).trace().re;
    Ok(a + b)
}

/// All three formulas side by side.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IndexReport {
    pub value_eig: i64,
    /// `(p', tr (P - Q)^(2p'+1))` for each requested `p'`.
    pub value_trace_power: Vec<(usize, f64)>,
    pub value_arveson: f64,
    /// Largest deviation of a real-valued formula from `value_eig`.
    pub agreement_residual: f64,
}

impl IndexReport {
    pub fn agrees(&self, tol: f64) -> bool {
        self.agreement_residual <= tol
    }
}

pub fn index_report(p: &Projection, q: &Projection, p_primes: &[usize]) -> Result<IndexReport> {
    let value_eig = index_eig(p, q)?;
    let value_trace_power = p_primes
        .iter()
        .map(|&k| index_trace_power(p, q, k).map(|v| (k, v)))
        .collect::<Result<Vec<_>>>()?;
    let value_arveson = index_arveson(p, q)?;
    let target = value_eig as f64;
    let agreement_residual = value_trace_power
        .iter()
        .map(|(_, v)| (v - target).abs())
        .chain(std::iter::once((value_arveson - target).abs()))
        .fold(0.0, f64::max);
    Ok(IndexReport {
        value_eig,
        value_trace_power,
        value_arveson,
        agreement_residual,
    })
}

/// `P2 = V P1 V* + N₊ - N₋`.
#[derive(Clone, Debug)]
pub struct WoldDecomposition {
    pub v: ComplexMatrix,
    pub n_plus: Projection,
    pub n_minus: Projection,
    /// Orthonormal basis of the range of `N₊`.
    pub plus_basis: Vec<Vec<c64>>,
    /// Orthonormal basis of the range of `N₋`.
    pub minus_basis: Vec<Vec<c64>>,
    /// Norm of `P1 - P2` restricted to the generic part.
    pub generic_norm: f64,
}

impl WoldDecomposition {
    pub fn rank_plus(&self) -> usize {
        self.plus_basis.len()
    }

    pub fn rank_minus(&self) -> usize {
        self.minus_basis.len()
    }

    /// `n₋ - n₊`, which equals `index(P1, P2)`.
    pub fn index(&self) -> i64 {
        self.rank_minus() as i64 - self.rank_plus() as i64
    }

    /// `V P1 V*`.
    pub fn rotated(&self, p1: &Projection) -> ComplexMatrix {
        &(&self.v * p1.matrix()) * &self.v.adjoint()
    }

    /// `‖P2 - (V P1 V* + N₊ - N₋)‖`.
    pub fn reconstruction_residual(&self, p1: &Projection, p2: &Projection) -> Result<f64> {
        let rebuilt = &(&self.rotated(p1) + self.n_plus.matrix()) - self.n_minus.matrix();
        (p2.matrix() - &rebuilt).operator_norm()
    }
}

pub fn wold_decompose(p1: &Projection, p2: &Projection) -> Result<WoldDecomposition> {
    wold_decompose_with_tol(p1, p2, CROSSING_TOL)
}

pub fn wold_decompose_with_tol(
    p1: &Projection,
    p2: &Projection,
    tol: f64,
) -> Result<WoldDecomposition> {
    let d = difference(p1, p2)?;
    let n = d.nrows();
    let e = eigh(&d)?;
    let mut plus_basis = Vec::new();
    let mut minus_basis = Vec::new();
    let mut generic_norm: f64 = 0.0;
    for (k, &l) in e.values.iter().enumerate() {
        if 1.0 - l.abs() <= tol {
            if l < 0.0 {
                plus_basis.push(e.vector(k));
            } else {
                minus_basis.push(e.vector(k));
            }
        } else {
            generic_norm = generic_norm.max(l.abs());
        }
    }
    if generic_norm > 1.0 - 2.0 * tol {
        return Err(Error::DegenerateGeometry {
            norm: generic_norm,
            tol,
        });
    }
    let scaled = e.apply_function(|l| {
        if 1.0 - l.abs() <= tol {
            c64::new(0.0, 0.0)
        } else {
            c64::new(1.0 / (1.0 - l * l).sqrt(), 0.0)
        }
    });
    let p1m = p1.matrix();
    let p2m = p2.matrix();
    let id = ComplexMatrix::identity(n);
    let r = &(p2m * p1m) + &(&(&id - p2m) * &(&id - p1m));
    let n_plus = Projection::onto(n, &plus_basis);
    let n_minus = Projection::onto(n, &minus_basis);
    let v = &(&(&r * &scaled) + n_plus.matrix()) + n_minus.matrix();
    Ok(WoldDecomposition {
        v,
        n_plus,
        n_minus,
        plus_basis,
        minus_basis,
        generic_norm,
    })
}
