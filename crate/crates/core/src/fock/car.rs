use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};
use crate::fock::modes::ModeSpace;
use crate::linalg::{c64, ComplexMatrix};

const ZERO: c64 = c64 { re: 0.0, im: 0.0 };

/// Jordan-Wigner sign of mode `i` on basis state `s`: `-1` to the number of
/// occupied modes below `i`.
#[inline]
pub fn jw_sign(s: usize, i: usize) -> f64 {
    if (s & ((1usize << i) - 1)).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Operator on the `2^n`-dimensional Fock space of `n` modes.
#[derive(Clone, Debug, PartialEq)]
pub struct FockOperator {
    n_modes: usize,
    matrix: ComplexMatrix,
}

impl FockOperator {
    pub fn new(n_modes: usize, matrix: ComplexMatrix) -> Result<Self> {
        let d = matrix.dim()?;
        if d != 1usize << n_modes {
            return Err(Error::DimensionMismatch {
                expected: 1 << n_modes,
                found: d,
            });
        }
        Ok(Self { n_modes, matrix })
    }

    pub fn identity(n_modes: usize) -> Self {
        Self {
            n_modes,
            matrix: ComplexMatrix::identity(1 << n_modes),
        }
    }

    pub fn zeros(n_modes: usize) -> Self {
        let d = 1 << n_modes;
        Self {
            n_modes,
            matrix: ComplexMatrix::zeros(d, d),
        }
    }

    pub fn from_diagonal(n_modes: usize, diag: &[c64]) -> Self {
        Self {
            n_modes,
            matrix: ComplexMatrix::from_diagonal(diag),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn dim(&self) -> usize {
        1 << self.n_modes
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self {
            n_modes: self.n_modes,
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn scale(&self, s: c64) -> Self {
        Self {
            n_modes: self.n_modes,
            matrix: self.matrix.scale(s),
        }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        &(self * other) + &(other * self)
    }

    pub fn apply(&self, v: &[c64]) -> Vec<c64> {
        self.matrix.matvec(v)
    }

    pub fn operator_norm(&self) -> Result<f64> {
        self.matrix.operator_norm()
    }

    pub fn unitarity_residual(&self) -> Result<f64> {
        self.matrix.unitarity_residual()
    }

    pub fn distance(&self, other: &Self) -> Result<f64> {
        (&self.matrix - &other.matrix).operator_norm()
    }
}

impl Mul for &FockOperator {
    type Output = FockOperator;
    fn mul(self, rhs: &FockOperator) -> FockOperator {
        assert_eq!(self.n_modes, rhs.n_modes, "Fock operators on different mode counts");
        FockOperator {
            n_modes: self.n_modes,
            matrix: &self.matrix * &rhs.matrix,
        }
    }
}

impl Add for &FockOperator {
    type Output = FockOperator;
    fn add(self, rhs: &FockOperator) -> FockOperator {
        assert_eq!(self.n_modes, rhs.n_modes, "Fock operators on different mode counts");
        FockOperator {
            n_modes: self.n_modes,
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

impl Sub for &FockOperator {
    type Output = FockOperator;
    fn sub(self, rhs: &FockOperator) -> FockOperator {
        assert_eq!(self.n_modes, rhs.n_modes, "Fock operators on different mode counts");
        FockOperator {
            n_modes: self.n_modes,
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}

/// Dense creation and annihilation operators of a mode space.
///
/// The occupation basis is ordered by bit pattern and
/// `|S> = a*_{s1} ... a*_{sk} |0>` with `s1 < ... < sk`, so that
/// `a_i |S> = (-1)^{#(S below i)} |S \ i>`.
#[derive(Clone, Debug)]
pub struct Car {
    modes: ModeSpace,
    annihilators: Vec<FockOperator>,
    creators: Vec<FockOperator>,
}

pub fn build_car(modes: &ModeSpace) -> Result<Car> {
    let n = modes.n_modes();
    if n > modes.cap() {
        return Err(Error::TooManyModes {
            requested: n,
            cap: modes.cap(),
        });
    }
    log::info!(
        "building CAR tables for {n} modes: {} operators of {} bytes each",
        2 * n,
        modes.dense_operator_bytes()
    );
    let dim = 1usize << n;
    let annihilators: Vec<FockOperator> = (0..n)
        .map(|i| {
            let mut m = ComplexMatrix::zeros(dim, dim);
            for s in (0..dim).filter(|s| s & (1 << i) != 0) {
                m.set(s ^ (1 << i), s, c64::new(jw_sign(s, i), 0.0));
            }
            FockOperator { n_modes: n, matrix: m }
        })
        .collect();
    let creators = annihilators.iter().map(FockOperator::adjoint).collect();
    Ok(Car {
        modes: modes.clone(),
        annihilators,
        creators,
    })
}

impl Car {
    pub fn modes(&self) -> &ModeSpace {
        &self.modes
    }

    pub fn n_modes(&self) -> usize {
        self.modes.n_modes()
    }

    pub fn a(&self, i: usize) -> &FockOperator {
        &self.annihilators[i]
    }

    pub fn a_dag(&self, i: usize) -> &FockOperator {
        &self.creators[i]
    }

    pub fn annihilators(&self) -> &[FockOperator] {
        &self.annihilators
    }

    pub fn creators(&self) -> &[FockOperator] {
        &self.creators
    }

    pub fn identity(&self) -> FockOperator {
        FockOperator::identity(self.n_modes())
    }

    fn check_vector(&self, f: &[c64]) -> Result<()> {
        if f.len() != self.n_modes() {
            return Err(Error::DimensionMismatch {
                expected: self.n_modes(),
                found: f.len(),
            });
        }
        Ok(())
    }

    /// `a(f) = sum_i conj(f_i) a_i`, antilinear in `f`.
    pub fn annihilator_of(&self, f: &[c64]) -> Result<FockOperator> {
        self.check_vector(f)?;
        let mut out = FockOperator::zeros(self.n_modes());
        for (i, fi) in f.iter().enumerate() {
            if *fi != ZERO {
                out = &out + &self.annihilators[i].scale(fi.conj());
            }
        }
        Ok(out)
    }

    /// `a*(f) = sum_i f_i a*_i`.
    pub fn creator_of(&self, f: &[c64]) -> Result<FockOperator> {
        Ok(self.annihilator_of(f)?.adjoint())
    }

    /// `a*_i a_j`.
    pub fn hopping(&self, i: usize, j: usize) -> FockOperator {
        &self.creators[i] * &self.annihilators[j]
    }
}

/// Matrix-free operations on Fock vectors of length `2^n`.
pub mod vector {
    use super::*;

    pub fn n_modes_of(v: &[c64]) -> Result<usize> {
        if !v.len().is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "Fock vector length {} is not a power of two",
                v.len()
            )));
        }
        Ok(v.len().trailing_zeros() as usize)
    }

    pub fn vacuum(n_modes: usize) -> Vec<c64> {
        let mut v = vec![ZERO; 1 << n_modes];
        v[0] = c64::new(1.0, 0.0);
        v
    }

    pub fn basis_state(n_modes: usize, occupied: usize) -> Vec<c64> {
        let mut v = vec![ZERO; 1 << n_modes];
        v[occupied] = c64::new(1.0, 0.0);
        v
    }

    /// `a_i v`.
    pub fn annihilate(i: usize, v: &[c64]) -> Vec<c64> {
        let mut out = vec![ZERO; v.len()];
        let bit = 1usize << i;
        for (s, &x) in v.iter().enumerate() {
            if s & bit != 0 && x != ZERO {
                out[s ^ bit] += x * jw_sign(s, i);
            }
        }
        out
    }

    /// `a*_i v`.
    pub fn create(i: usize, v: &[c64]) -> Vec<c64> {
        let mut out = vec![ZERO; v.len()];
        let bit = 1usize << i;
        for (s, &x) in v.iter().enumerate() {
            if s & bit == 0 && x != ZERO {
                out[s | bit] += x * jw_sign(s, i);
            }
        }
        out
    }

    /// `a*(f) v`.
    pub fn create_f(f: &[c64], v: &[c64]) -> Vec<c64> {
        let mut out = vec![ZERO; v.len()];
        for (i, &fi) in f.iter().enumerate() {
            if fi == ZERO {
                continue;
            }
            let bit = 1usize << i;
            for (s, &x) in v.iter().enumerate() {
                if s & bit == 0 && x != ZERO {
                    out[s | bit] += fi * x * jw_sign(s, i);
                }
            }
        }
        out
    }

    /// `a(f) v`.
    pub fn annihilate_f(f: &[c64], v: &[c64]) -> Vec<c64> {
        let mut out = vec![ZERO; v.len()];
        for (i, &fi) in f.iter().enumerate() {
            if fi == ZERO {
                continue;
            }
            let bit = 1usize << i;
            let c = fi.conj();
            for (s, &x) in v.iter().enumerate() {
                if s & bit != 0 && x != ZERO {
                    out[s ^ bit] += c * x * jw_sign(s, i);
                }
            }
        }
        out
    }

    /// `(a(f) + a*(f)) v`.
    pub fn field(f: &[c64], v: &[c64]) -> Vec<c64> {
        let mut out = create_f(f, v);
        for (o, x) in out.iter_mut().zip(annihilate_f(f, v)) {
            *o += x;
        }
        out
    }

    pub fn inner(a: &[c64], b: &[c64]) -> c64 {
        crate::linalg::inner(a, b)
    }

    pub fn norm(a: &[c64]) -> f64 {
        crate::linalg::norm(a)
    }

    pub fn sub(a: &[c64], b: &[c64]) -> Vec<c64> {
        a.iter().zip(b).map(|(x, y)| x - y).collect()
    }
}
