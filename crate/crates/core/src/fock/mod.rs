//! Fermionic Fock space over finitely many modes.

pub mod car;
pub mod charge;
pub mod implementer;
pub mod modes;
pub mod stack;
pub mod state;

pub use car::{build_car, vector, Car, FockOperator};
pub use charge::{charge_operator, delta_rho, many_body_index, ChargeOperator};
pub use implementer::{
    dgamma, excess_unitary, gamma, intertwiner, Factor, FockMap, FockProduct, GivensGamma,
    Intertwiner,
};
pub use modes::{ModeLabel, ModeSpace, DEFAULT_MODE_CAP};
pub use stack::{factorized_stacked_intertwiner, stack_projections, stacked_index, stacked_state};
pub use state::{expectation, quasi_free_state, state_distance, QuasiFreeState};
