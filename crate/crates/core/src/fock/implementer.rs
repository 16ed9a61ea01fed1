//! Second quantization of one-particle unitaries and the unitaries that
//! carry one quasi-free state into another.
//!
//! `Γ(V)` is normalized by `Γ(V) a*(f) Γ(V)* = a*(V f)` and `Γ(V)|0> = |0>`,
//! so `Γ(V)` maps the state of `P` to the state of `V P V*`. It is available
//! both as a dense operator ([`gamma`], summed from [`dgamma`]) and as a
//! matrix-free map ([`GivensGamma`]) built from adjacent-mode rotations.

use crate::error::{Error, Result};
use crate::fock::car::{jw_sign, vector, Car, FockOperator};
use crate::linalg::{c64, ComplexMatrix, Projection};
use crate::pair_index::{wold_decompose_with_tol, WoldDecomposition, CROSSING_TOL};

const ZERO: c64 = c64 { re: 0.0, im: 0.0 };

/// Tolerance on `||V* V - 1||` accepted by the implementers.
pub const ONE_PARTICLE_UNITARITY_TOL: f64 = 1e-9;

/// A linear map on Fock vectors together with its adjoint.
pub trait FockMap {
    fn n_modes(&self) -> usize;
    fn apply(&self, v: &[c64]) -> Vec<c64>;
    fn apply_adjoint(&self, v: &[c64]) -> Vec<c64>;
}

impl FockMap for FockOperator {
    fn n_modes(&self) -> usize {
        FockOperator::n_modes(self)
    }

    fn apply(&self, v: &[c64]) -> Vec<c64> {
        FockOperator::apply(self, v)
    }

    fn apply_adjoint(&self, v: &[c64]) -> Vec<c64> {
        let m = self.matrix();
        (0..self.dim())
            .map(|j| (0..self.dim()).fold(ZERO, |acc, i| acc + m.get(i, j).conj() * v[i]))
            .collect()
    }
}

fn check_unitary(v: &ComplexMatrix) -> Result<()> {
    let residual = v.unitarity_residual()?;
    if residual > ONE_PARTICLE_UNITARITY_TOL {
        return Err(Error::NotUnitary { residual });
    }
    Ok(())
}

/// `dΓ(A_1, ..., A_k) = sum a*_{i_k} ... a*_{i_1} a_{j_1} ... a_{j_k}`
/// weighted by `(A_1)_{i_1 j_1} ... (A_k)_{i_k j_k}`.
pub fn dgamma(operators: &[ComplexMatrix], car: &Car) -> Result<FockOperator> {
    let n = car.n_modes();
    for a in operators {
        if a.nrows() != n || a.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: a.nrows(),
            });
        }
    }
    let mut x = car.identity();
    for a in operators {
        x = sandwich(a, &x, n, c64::new(1.0, 0.0));
    }
    Ok(x)
}

/// `w * sum_ij A_ij a*_i X a_j`, using
/// `<T| a*_i X a_j |S> = sign_i(T) sign_j(S) X[T \ i, S \ j]`.
fn sandwich(a: &ComplexMatrix, x: &FockOperator, n: usize, w: c64) -> FockOperator {
    let dim = 1usize << n;
    let xm = x.matrix();
    let entries: Vec<(usize, usize, c64)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| (i, j, a.get(i, j) * w))
        .filter(|(_, _, c)| *c != ZERO)
        .collect();
    let out = ComplexMatrix::from_fn(dim, dim, |t, s| {
        let mut acc = ZERO;
        for &(i, j, c) in &entries {
            if t & (1 << i) != 0 && s & (1 << j) != 0 {
                let sign = jw_sign(t, i) * jw_sign(s, j);
                acc += c * xm.get(t ^ (1 << i), s ^ (1 << j)) * sign;
            }
        }
        acc
    });
    FockOperator::new(n, out).expect("dimension preserved")
}

/// `Γ(V) = 1 + sum_k dΓ(V - 1, ..., V - 1) / k!`, summed until the terms
/// vanish (at most `n` terms).
pub fn gamma(v: &ComplexMatrix, car: &Car) -> Result<FockOperator> {
    let n = car.n_modes();
    if v.nrows() != n || v.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: v.nrows(),
        });
    }
    check_unitary(v)?;
    let a = v - &ComplexMatrix::identity(n);
    let mut sum = car.identity();
    let mut term = car.identity();
    for k in 1..=n {
        term = sandwich(&a, &term, n, c64::new(1.0 / k as f64, 0.0));
        if term.matrix().max_abs() == 0.0 {
            break;
        }
        sum = &sum + &term;
    }
    Ok(sum)
}

/// Rotation `g` on the adjacent modes `(mode, mode + 1)`.
#[derive(Clone, Copy, Debug)]
struct Rotation {
    mode: usize,
    g: [[c64; 2]; 2],
}

impl Rotation {
    fn adjoint(&self) -> Self {
        let g = self.g;
        Self {
            mode: self.mode,
            g: [[g[0][0].conj(), g[1][0].conj()], [g[0][1].conj(), g[1][1].conj()]],
        }
    }

    fn apply_gamma(&self, v: &mut [c64]) {
        let i = self.mode;
        let (bi, bj) = (1usize << i, 1usize << (i + 1));
        let g = self.g;
        let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
        for r in 0..v.len() {
            if r & (bi | bj) != 0 {
                continue;
            }
            let (si, sj, sb) = (r | bi, r | bj, r | bi | bj);
            let (xi, xj) = (v[si], v[sj]);
            v[si] = g[0][0] * xi + g[0][1] * xj;
            v[sj] = g[1][0] * xi + g[1][1] * xj;
            v[sb] *= det;
        }
    }
}

/// Matrix-free `Γ(V)` from the factorization `V = G_1 ... G_m D` into
/// adjacent-mode rotations and a diagonal phase.
#[derive(Clone, Debug)]
pub struct GivensGamma {
    n_modes: usize,
    /// `G_1, ..., G_m` in product order.
    rotations: Vec<Rotation>,
    phases: Vec<c64>,
}

impl GivensGamma {
    pub fn new(v: &ComplexMatrix) -> Result<Self> {
        let n = v.dim()?;
        check_unitary(v)?;
        let mut m = v.clone();
        let mut eliminations = Vec::new();
        for c in 0..n {
            for r in (c + 1..n).rev() {
                let a = m.get(r - 1, c);
                let b = m.get(r, c);
                if b == ZERO {
                    continue;
                }
                let rho = (a.norm_sqr() + b.norm_sqr()).sqrt();
                let g = [
                    [a.conj() / rho, b.conj() / rho],
                    [-b / rho, a / rho],
                ];
                for col in 0..n {
                    let (x, y) = (m.get(r - 1, col), m.get(r, col));
                    m.set(r - 1, col, g[0][0] * x + g[0][1] * y);
                    m.set(r, col, g[1][0] * x + g[1][1] * y);
                }
                eliminations.push(Rotation { mode: r - 1, g });
            }
        }
        // R_m ... R_1 V = D, so V = R_1* ... R_m* D
        let rotations = eliminations.iter().map(Rotation::adjoint).collect();
        let phases = (0..n).map(|k| m.get(k, k)).collect();
        Ok(Self {
            n_modes: n,
            rotations,
            phases,
        })
    }

    fn apply_phases(&self, v: &mut [c64], conjugate: bool) {
        for (s, x) in v.iter_mut().enumerate() {
            let mut ph = c64::new(1.0, 0.0);
            for (k, d) in self.phases.iter().enumerate() {
                if s & (1 << k) != 0 {
                    ph *= if conjugate { d.conj() } else { *d };
                }
            }
            *x *= ph;
        }
    }
}

impl FockMap for GivensGamma {
    fn n_modes(&self) -> usize {
        self.n_modes
    }

    fn apply(&self, v: &[c64]) -> Vec<c64> {
        let mut out = v.to_vec();
        self.apply_phases(&mut out, false);
        for r in self.rotations.iter().rev() {
            r.apply_gamma(&mut out);
        }
        out
    }

    fn apply_adjoint(&self, v: &[c64]) -> Vec<c64> {
        let mut out = v.to_vec();
        for r in &self.rotations {
            r.adjoint().apply_gamma(&mut out);
        }
        self.apply_phases(&mut out, true);
        out
    }
}

/// `Π_i (a(f_i) + a*(f_i))` as a dense operator.
pub fn excess_unitary(vectors: &[Vec<c64>], car: &Car) -> Result<FockOperator> {
    check_orthonormal(vectors, car.n_modes())?;
    let mut out = car.identity();
    for f in vectors {
        let a = car.annihilator_of(f)?;
        let field = &a + &a.adjoint();
        out = &out * &field;
    }
    Ok(out)
}

pub fn check_orthonormal(vectors: &[Vec<c64>], n_modes: usize) -> Result<()> {
    let mut residual: f64 = 0.0;
    for (i, f) in vectors.iter().enumerate() {
        if f.len() != n_modes {
            return Err(Error::DimensionMismatch {
                expected: n_modes,
                found: f.len(),
            });
        }
        for (j, g) in vectors.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            residual = residual.max((vector::inner(f, g) - c64::new(target, 0.0)).norm());
        }
    }
    if residual > 1e-10 {
        return Err(Error::NotOrthonormal { residual });
    }
    Ok(())
}

/// One factor of a [`FockProduct`].
#[derive(Clone, Debug)]
pub enum Factor {
    Gamma(GivensGamma),
    /// `a(f) + a*(f)` for a unit vector `f`.
    Field(Vec<c64>),
    Dense(FockOperator),
}

impl Factor {
    fn apply(&self, v: &[c64]) -> Vec<c64> {
        match self {
            Factor::Gamma(g) => g.apply(v),
            Factor::Field(f) => vector::field(f, v),
            Factor::Dense(d) => d.apply(v),
        }
    }

    fn apply_adjoint(&self, v: &[c64]) -> Vec<c64> {
        match self {
            Factor::Gamma(g) => g.apply_adjoint(v),
            Factor::Field(f) => vector::field(f, v),
            Factor::Dense(d) => FockMap::apply_adjoint(d, v),
        }
    }
}

/// Product `F_1 F_2 ... F_k` of factors, applied right to left.
#[derive(Clone, Debug)]
pub struct FockProduct {
    n_modes: usize,
    factors: Vec<Factor>,
}

impl FockProduct {
    pub fn identity(n_modes: usize) -> Self {
        Self {
            n_modes,
            factors: Vec::new(),
        }
    }

    pub fn new(n_modes: usize, factors: Vec<Factor>) -> Self {
        Self { n_modes, factors }
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    /// `self * other`.
    pub fn then_after(mut self, other: FockProduct) -> Self {
        self.factors.extend(other.factors);
        self
    }
}

impl FockMap for FockProduct {
    fn n_modes(&self) -> usize {
        self.n_modes
    }

    fn apply(&self, v: &[c64]) -> Vec<c64> {
        self.factors
            .iter()
            .rev()
            .fold(v.to_vec(), |acc, f| f.apply(&acc))
    }

    fn apply_adjoint(&self, v: &[c64]) -> Vec<c64> {
        self.factors
            .iter()
            .fold(v.to_vec(), |acc, f| f.apply_adjoint(&acc))
    }
}

/// Unitary `u = v₊ v₋ Γ(V)` with `ω_{P2} = ω_{P1} ∘ Ad u`, built from the
/// decomposition `P2 = V P1 V* + N₊ - N₋`.
#[derive(Clone, Debug)]
pub struct Intertwiner {
    pub wold: WoldDecomposition,
}

impl Intertwiner {
    pub fn new(p1: &Projection, p2: &Projection) -> Result<Self> {
        Self::with_tol(p1, p2, CROSSING_TOL)
    }

    pub fn with_tol(p1: &Projection, p2: &Projection, tol: f64) -> Result<Self> {
        Ok(Self {
            wold: wold_decompose_with_tol(p1, p2, tol)?,
        })
    }

    /// The excess vectors of `v₊` followed by those of `v₋`.
    pub fn field_vectors(&self) -> Vec<Vec<c64>> {
        self.wold
            .plus_basis
            .iter()
            .chain(&self.wold.minus_basis)
            .cloned()
            .collect()
    }

    pub fn dense(&self, car: &Car) -> Result<FockOperator> {
        let fields = excess_unitary(&self.field_vectors(), car)?;
        Ok(&fields * &gamma(&self.wold.v, car)?)
    }

    pub fn map(&self) -> Result<FockProduct> {
        let n = self.wold.v.nrows();
        let mut factors: Vec<Factor> = self.field_vectors().into_iter().map(Factor::Field).collect();
        factors.push(Factor::Gamma(GivensGamma::new(&self.wold.v)?));
        Ok(FockProduct::new(n, factors))
    }
}

/// Dense intertwiner `u` with `ω_{P2}(A) = ω_{P1}(u* A u)`.
pub fn intertwiner(p1: &Projection, p2: &Projection, car: &Car) -> Result<FockOperator> {
    Intertwiner::new(p1, p2)?.dense(car)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::car::build_car;
    use crate::fock::modes::ModeSpace;
    use crate::samples::{haar_unitary, random_unit_vector, seeded_rng};

    fn car(n: usize) -> Car {
        build_car(&ModeSpace::chain(n).unwrap()).unwrap()
    }

    #[test]
    fn gamma_of_identity_is_identity() {
        let c = car(3);
        assert_eq!(gamma(&ComplexMatrix::identity(3), &c).unwrap(), c.identity());
    }

    #[test]
    fn gamma_of_single_phase() {
        let c = car(3);
        let ph = c64::from_polar(1.0, 0.7);
        let mut d = vec![c64::new(1.0, 0.0); 3];
        d[1] = ph;
        let g = gamma(&ComplexMatrix::from_diagonal(&d), &c).unwrap();
        let expected = &c.identity() + &c.hopping(1, 1).scale(ph - c64::new(1.0, 0.0));
        assert!(g.distance(&expected).unwrap() < 1e-14);
    }

    #[test]
    fn gamma_implements_v() {
        let mut rng = seeded_rng(12);
        let c = car(4);
        let v = haar_unitary(4, &mut rng);
        let g = gamma(&v, &c).unwrap();
        assert!(g.unitarity_residual().unwrap() < 1e-9);
        let f = random_unit_vector(4, &mut rng);
        let lhs = &g * &c.creator_of(&f).unwrap();
        let rhs = &c.creator_of(&v.matvec(&f)).unwrap() * &g;
        assert!(lhs.distance(&rhs).unwrap() < 1e-9);
    }

    #[test]
    fn givens_route_matches_series() {
        let mut rng = seeded_rng(13);
        let c = car(5);
        let v = haar_unitary(5, &mut rng);
        let dense = gamma(&v, &c).unwrap();
        let map = GivensGamma::new(&v).unwrap();
        let x = random_unit_vector(32, &mut rng);
        let diff = vector::sub(&map.apply(&x), &dense.apply(&x));
        assert!(vector::norm(&diff) < 1e-10);
        let diff = vector::sub(&map.apply_adjoint(&x), &FockMap::apply_adjoint(&dense, &x));
        assert!(vector::norm(&diff) < 1e-10);
    }

    #[test]
    fn excess_unitary_examples() {
        let c = car(3);
        assert_eq!(excess_unitary(&[], &c).unwrap(), c.identity());
        let e0 = vec![c64::new(1.0, 0.0), ZERO, ZERO];
        let u = excess_unitary(&[e0.clone()], &c).unwrap();
        assert_eq!(u, c.a(0) + c.a_dag(0));
        assert_eq!(&u * &u, c.identity());
        let e1 = vec![ZERO, c64::new(1.0, 0.0), ZERO];
        let u01 = excess_unitary(&[e0.clone(), e1.clone()], &c).unwrap();
        let u10 = excess_unitary(&[e1, e0.clone()], &c).unwrap();
        assert!(u01.unitarity_residual().unwrap() < 1e-14);
        assert_eq!(u01, u10.scale(c64::new(-1.0, 0.0)));
        let bad = vec![c64::new(2.0, 0.0), ZERO, ZERO];
        assert!(matches!(
            excess_unitary(&[bad], &c),
            Err(Error::NotOrthonormal { .. })
        ));
    }

    #[test]
    fn rejects_non_unitary() {
        let c = car(2);
        let v = ComplexMatrix::from_real_diagonal(&[1.0, 2.0]);
        assert!(matches!(gamma(&v, &c), Err(Error::NotUnitary { .. })));
        assert!(GivensGamma::new(&v).is_err());
    }
}
