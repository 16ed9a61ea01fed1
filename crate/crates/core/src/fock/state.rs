use crate::error::{Error, Result};
use crate::fock::car::{vector, FockOperator};
use crate::fock::modes::ModeSpace;
use crate::linalg::{c64, validate_projection, Projection};

/// Pure quasi-free state of a projection, stored as its Fock vector
/// `a*(phi_1) ... a*(phi_r) |0>` over the phase-fixed eigenbasis of the
/// range, ordered by descending eigenvalue.
#[derive(Clone, Debug)]
pub struct QuasiFreeState {
    projection: Projection,
    fock_vector: Vec<c64>,
}

pub fn quasi_free_state(p: &Projection, modes: &ModeSpace) -> Result<QuasiFreeState> {
    if p.dim() != modes.n_modes() {
        return Err(Error::DimensionMismatch {
            expected: modes.n_modes(),
            found: p.dim(),
        });
    }
    let p = validate_projection(p.matrix(), p.tol())?;
    let basis = p.range_basis()?;
    let mut v = vector::vacuum(modes.n_modes());
    for phi in basis.iter().rev() {
        v = vector::create_f(phi, &v);
    }
    let r = vector::norm(&v);
    v.iter_mut().for_each(|z| *z /= r);
    Ok(QuasiFreeState {
        projection: p,
        fock_vector: v,
    })
}

impl QuasiFreeState {
    pub fn projection(&self) -> &Projection {
        &self.projection
    }

    pub fn vector(&self) -> &[c64] {
        &self.fock_vector
    }

    pub fn n_modes(&self) -> usize {
        self.projection.dim()
    }

    /// `<Omega, A Omega>`.
    pub fn expectation(&self, a: &FockOperator) -> Result<c64> {
        expectation(&self.fock_vector, a)
    }

    /// `omega(a*(f) a(g))`, evaluated on the Fock vector.
    pub fn two_point(&self, f: &[c64], g: &[c64]) -> c64 {
        let ag = vector::annihilate_f(g, &self.fock_vector);
        let af = vector::annihilate_f(f, &self.fock_vector);
        vector::inner(&af, &ag)
    }
}

/// `<v, A v>`.
pub fn expectation(v: &[c64], a: &FockOperator) -> Result<c64> {
    if v.len() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: v.len(),
        });
    }
    Ok(vector::inner(v, &a.apply(v)))
}

/// `2 sqrt(1 - |<Omega2, Omega1>|^2)` for unit vectors.
pub fn state_distance(omega1: &[c64], omega2: &[c64]) -> Result<f64> {
    if omega1.len() != omega2.len() {
        return Err(Error::DimensionMismatch {
            expected: omega1.len(),
            found: omega2.len(),
        });
    }
    let overlap = vector::inner(omega2, omega1).norm_sqr();
    Ok(2.0 * (1.0 - overlap).max(0.0).sqrt())
}
