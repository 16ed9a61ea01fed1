//! Two-layer stacking. The layer 1 copy of one-particle mode `k` is mode
//! `2k` and the layer 2 copy is mode `2k + 1`, so graded tensor products
//! become ordinary Jordan-Wigner products on the interleaved space.

use crate::error::{Error, Result};
use crate::fock::charge::{many_body_index, ChargeOperator};
use crate::fock::implementer::{FockMap, FockProduct, Intertwiner};
use crate::fock::modes::ModeSpace;
use crate::fock::state::{quasi_free_state, QuasiFreeState};
use crate::linalg::{c64, ComplexMatrix, Projection};

/// Interleaved direct sum `A ⊕ B` with `A` on layer 1.
pub fn interleave(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.dim()?;
    if b.dim()? != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: b.nrows(),
        });
    }
    Ok(ComplexMatrix::from_fn(2 * n, 2 * n, |i, j| {
        if i % 2 != j % 2 {
            c64::new(0.0, 0.0)
        } else if i % 2 == 0 {
            a.get(i / 2, j / 2)
        } else {
            b.get(i / 2, j / 2)
        }
    }))
}

/// `P ⊕ Q` on the interleaved two-layer space.
pub fn stack_projections(p: &Projection, q: &Projection) -> Result<Projection> {
    Ok(Projection::trusted(interleave(p.matrix(), q.matrix())?))
}

/// The stacked state `ω_P ⊗ ω_{P⊥}`.
pub fn stacked_state(p: &Projection, stacked_modes: &ModeSpace) -> Result<QuasiFreeState> {
    quasi_free_state(&stack_projections(p, &p.complement())?, stacked_modes)
}

/// Charge of the layer 1 modes of an interleaved space with `2n` modes.
pub fn layer_one_charge(n_stacked: usize) -> ChargeOperator {
    let idx: Vec<usize> = (0..n_stacked).step_by(2).collect();
    ChargeOperator::from_indices(n_stacked, &idx)
}

/// Many-body index of `ω_P ⊗ ω_{P⊥}` under `u_hat` with the layer 1 charge.
pub fn stacked_index(p: &Projection, u_hat: &dyn FockMap, stacked_modes: &ModeSpace) -> Result<f64> {
    if stacked_modes.n_modes() != 2 * p.dim() || u_hat.n_modes() != stacked_modes.n_modes() {
        return Err(Error::DimensionMismatch {
            expected: 2 * p.dim(),
            found: u_hat.n_modes(),
        });
    }
    let state = stacked_state(p, stacked_modes)?;
    many_body_index(state.vector(), u_hat, &layer_one_charge(stacked_modes.n_modes()))
}

/// Factorized `û = u₂ u₁` carrying `ω_P ⊗ ω_{P⊥}` to `ω_{P'} ⊗ ω_{P'⊥}`:
/// `u₁` changes layer 1 from `P` to `P'` and `u₂` layer 2 from `P⊥` to `P'⊥`.
pub fn factorized_stacked_intertwiner(p: &Projection, p_prime: &Projection) -> Result<FockProduct> {
    let start = stack_projections(p, &p.complement())?;
    let middle = stack_projections(p_prime, &p.complement())?;
    let end = stack_projections(p_prime, &p_prime.complement())?;
    let u1 = Intertwiner::new(&start, &middle)?.map()?;
    let u2 = Intertwiner::new(&middle, &end)?.map()?;
    Ok(u2.then_after(u1))
}
