//! Two-dimensional lattice models on finite patches, flux insertion and the
//! spectral quantities attached to it.

pub mod adiabatic;
pub mod chern;
pub mod flux;
pub mod model;
pub mod pipeline;

pub use adiabatic::{
    charge_deficiency, charge_deficiency_in, kato_generator, quasi_adiabatic_evolve, region_index,
    truncate_left, AdiabaticRun, EvolveOptions, RegionIndex, REGION_INDEX_THRESHOLD,
};
pub use chern::{chern_number, chern_number_of, BandSelector, ChernResult};
pub use flux::{
    fermi_projection, gauge_flux_hamiltonian, spectral_flow, Crossing, FluxSweep,
    SpectralFlowResult, SweepOptions,
};
pub use model::{build_model, build_model_with_bound, DecayBound, Hop, LatticeModel, ModelPreset, Patch};
pub use pipeline::{probe_region, run_pipeline, PipelineOptions, PipelineReport};
