use crate::error::{Error, Result};
use crate::fock::car::{vector, FockOperator};
use crate::fock::implementer::FockMap;
use crate::fock::modes::{ModeLabel, ModeSpace};
use crate::linalg::c64;
use crate::samples::{random_unit_vector, seeded_rng};

/// Tolerance on `||u* u x - x||` for the probe vectors of [`many_body_index`].
pub const UNITARITY_TOL: f64 = 1e-9;
/// Tolerance on `||Q Omega - <Q> Omega||` in [`many_body_index`].
pub const INVARIANCE_TOL: f64 = 1e-8;

/// Particle number of a set of modes, diagonal in the occupation basis.
#[derive(Clone, Debug, PartialEq)]
pub struct ChargeOperator {
    n_modes: usize,
    region: Vec<usize>,
    mask: usize,
}

pub fn charge_operator(region: &[ModeLabel], modes: &ModeSpace) -> Result<ChargeOperator> {
    let idx = region
        .iter()
        .map(|l| modes.index_of(l))
        .collect::<Result<Vec<_>>>()?;
    Ok(ChargeOperator::from_indices(modes.n_modes(), &idx))
}

impl ChargeOperator {
    pub fn from_indices(n_modes: usize, indices: &[usize]) -> Self {
        let mut region: Vec<usize> = indices.to_vec();
        region.sort_unstable();
        region.dedup();
        let mask = region.iter().fold(0usize, |m, &i| m | (1 << i));
        Self {
            n_modes,
            region,
            mask,
        }
    }

    pub fn full(n_modes: usize) -> Self {
        Self::from_indices(n_modes, &(0..n_modes).collect::<Vec<_>>())
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn region(&self) -> &[usize] {
        &self.region
    }

    /// Eigenvalue on the occupation basis state `s`.
    #[inline]
    pub fn value(&self, s: usize) -> f64 {
        (s & self.mask).count_ones() as f64
    }

    pub fn operator(&self) -> FockOperator {
        let diag: Vec<c64> = (0..1usize << self.n_modes)
            .map(|s| c64::new(self.value(s), 0.0))
            .collect();
        FockOperator::from_diagonal(self.n_modes, &diag)
    }

    pub fn apply(&self, v: &[c64]) -> Vec<c64> {
        v.iter()
            .enumerate()
            .map(|(s, &x)| x * self.value(s))
            .collect()
    }

    /// `exp(i theta Q)` as a diagonal operator.
    pub fn exp_i(&self, theta: f64) -> FockOperator {
        let diag: Vec<c64> = (0..1usize << self.n_modes)
            .map(|s| c64::from_polar(1.0, theta * self.value(s)))
            .collect();
        FockOperator::from_diagonal(self.n_modes, &diag)
    }

    /// `<v, Q v>`.
    pub fn expectation(&self, v: &[c64]) -> f64 {
        v.iter()
            .enumerate()
            .map(|(s, x)| x.norm_sqr() * self.value(s))
            .sum()
    }

    /// `||Q v - <Q> v||` for a unit vector, zero exactly when `v` is a
    /// charge eigenvector.
    pub fn invariance_residual(&self, v: &[c64]) -> f64 {
        let mean = self.expectation(v);
        v.iter()
            .enumerate()
            .map(|(s, x)| (x * (self.value(s) - mean)).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// `i [Q, A]`.
pub fn delta_rho(a: &FockOperator, q: &ChargeOperator) -> Result<FockOperator> {
    if a.n_modes() != q.n_modes() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: 1 << q.n_modes(),
        });
    }
    let d = a.dim();
    let m = a.matrix();
    let out = crate::linalg::ComplexMatrix::from_fn(d, d, |t, s| {
        m.get(t, s) * c64::new(0.0, q.value(t) - q.value(s))
    });
    FockOperator::new(a.n_modes(), out)
}

/// `i omega(u* delta(u))` with `delta = i[Q, .]` for the pure state with
/// unit vector `omega`.
///
/// Unitarity of `u` is probed on `omega` and on seeded random vectors, and
/// `omega` must be an eigenvector of `Q`.
pub fn many_body_index(omega: &[c64], u: &dyn FockMap, q: &ChargeOperator) -> Result<f64> {
    let dim = 1usize << u.n_modes();
    if omega.len() != dim || q.n_modes() != u.n_modes() {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: omega.len(),
        });
    }
    let residual = unitarity_probe(u, omega);
    if residual > UNITARITY_TOL {
        return Err(Error::NotUnitary { residual });
    }
    let residual = q.invariance_residual(omega);
    if residual > INVARIANCE_TOL {
        return Err(Error::NotInvariant { residual });
    }
    // u* i[Q, u] omega = i u* (Q u omega - u Q omega)
    let u_omega = u.apply(omega);
    let comm = vector::sub(&q.apply(&u_omega), &u.apply(&q.apply(omega)));
    let delta_u_omega: Vec<c64> = comm.iter().map(|z| z * c64::new(0.0, 1.0)).collect();
    let value = vector::inner(omega, &u.apply_adjoint(&delta_u_omega)) * c64::new(0.0, 1.0);
    Ok(value.re)
}

/// Largest `||u* u x - x||` and `||u u* x - x||` over `omega` and two seeded
/// random unit vectors.
pub fn unitarity_probe(u: &dyn FockMap, omega: &[c64]) -> f64 {
    let dim = omega.len();
    let mut rng = seeded_rng(0x5eed);
    let mut probes = vec![omega.to_vec()];
    probes.push(random_unit_vector(dim, &mut rng));
    probes.push(random_unit_vector(dim, &mut rng));
    probes
        .iter()
        .map(|x| {
            let a = vector::norm(&vector::sub(&u.apply_adjoint(&u.apply(x)), x));
            let b = vector::norm(&vector::sub(&u.apply(&u.apply_adjoint(x)), x));
            a.max(b)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::car::build_car;

    #[test]
    fn charge_examples() {
        let modes = ModeSpace::chain(2).unwrap();
        assert_eq!(
            charge_operator(&[], &modes).unwrap().operator(),
            FockOperator::zeros(2)
        );
        let full = charge_operator(modes.labels(), &modes).unwrap();
        let diag: Vec<f64> = full.operator().matrix().diagonal().iter().map(|z| z.re).collect();
        assert_eq!(diag, vec![0.0, 1.0, 1.0, 2.0]);
        let unknown = ModeLabel::new((9, 9), 0);
        assert!(matches!(
            charge_operator(&[unknown], &modes),
            Err(Error::UnknownLabel(_))
        ));
    }

    #[test]
    fn stacked_charge_counts_layer_one() {
        let base = ModeSpace::chain(2).unwrap();
        let s = base.stacked().unwrap();
        let region: Vec<ModeLabel> = s.labels().iter().copied().filter(|l| l.layer == 1).collect();
        let q = charge_operator(&region, &s).unwrap();
        // modes 0 and 2 are layer 1
        for st in 0..16usize {
            let expected = ((st & 1) + ((st >> 2) & 1)) as f64;
            assert_eq!(q.value(st), expected);
        }
    }

    #[test]
    fn delta_rho_examples() {
        let modes = ModeSpace::chain(3).unwrap();
        let car = build_car(&modes).unwrap();
        let q = ChargeOperator::full(3);
        let zero = FockOperator::zeros(3);
        assert_eq!(delta_rho(&car.identity(), &q).unwrap(), zero);
        let i = c64::new(0.0, 1.0);
        assert_eq!(delta_rho(car.a(1), &q).unwrap(), car.a(1).scale(-i));
        assert_eq!(delta_rho(car.a_dag(1), &q).unwrap(), car.a_dag(1).scale(i));
        assert_eq!(delta_rho(&car.hopping(1, 2), &q).unwrap(), zero);
        let u = car.a(0) + car.a_dag(0);
        let lhs = delta_rho(&u, &q).unwrap().scale(-i);
        assert_eq!(lhs, car.a_dag(0) - car.a(0));
    }

    #[test]
    fn charge_is_two_pi_periodic() {
        let q = ChargeOperator::from_indices(4, &[0, 2, 3]);
        let w = q.exp_i(std::f64::consts::TAU);
        assert!(w.distance(&FockOperator::identity(4)).unwrap() < 1e-12);
    }
}
