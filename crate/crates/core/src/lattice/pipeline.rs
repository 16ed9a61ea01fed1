//! Full flux-insertion run on one model: spectral flow, quasi-adiabatic
//! transport, charge deficiency, index and an optional Chern cross-check.

use serde::Serialize;

use crate::error::Result;
use crate::lattice::adiabatic::{
    charge_deficiency, charge_deficiency_in, quasi_adiabatic_evolve, region_index, EvolveOptions,
    REGION_INDEX_THRESHOLD,
};
use crate::lattice::chern::{chern_number, BandSelector};
use crate::lattice::flux::{spectral_flow, Crossing, FluxSweep, SweepOptions};
use crate::lattice::model::LatticeModel;
use crate::pair_index::index_eig;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PipelineOptions {
    pub mu: f64,
    /// Half-width of the probe box `|x1|, |x2| <= radius` around the flux.
    pub probe_radius: i64,
    pub sweep: SweepOptions,
    pub evolve: EvolveOptions,
    /// Bands for the Chern cross-check, or `None` to skip it.
    pub chern_bands: Option<BandSelector>,
}

impl PipelineOptions {
    pub fn new(mu: f64) -> Self {
        Self {
            mu,
            probe_radius: 7,
            sweep: SweepOptions::default(),
            evolve: EvolveOptions::default(),
            chern_bands: None,
        }
    }
}

/// Integer and real outputs of [`run_pipeline`]. Global quantities refer to
/// the whole patch, local ones to the probe box.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PipelineReport {
    pub crossings: Vec<Crossing>,
    pub net_flow: i64,
    pub local_flow: i64,
    pub charge_deficiency: f64,
    pub local_deficiency: f64,
    pub index_eig: i64,
    pub local_index: i64,
    pub local_index_weight: f64,
    pub chern: Option<i64>,
    pub steps: usize,
    pub step_delta: f64,
    pub unitarity_residual: f64,
    pub evaluations: usize,
}

impl PipelineReport {
    /// `local_flow = round(local_deficiency) = local_index`, with the Chern
    /// number, when present, equal to `-local_flow`.
    pub fn is_consistent(&self, deficiency_tol: f64) -> bool {
        (self.local_deficiency - self.local_flow as f64).abs() < deficiency_tol
            && self.local_index == self.local_flow
            && self.chern.is_none_or(|c| c == -self.local_flow)
    }
}

pub fn probe_region(model: &LatticeModel, radius: i64) -> Vec<bool> {
    model.site_mask(|(x, y)| x.abs() <= radius && y.abs() <= radius)
}

/// Runs every stage and returns the report together with the sweep.
pub fn run_pipeline(model: &LatticeModel, options: &PipelineOptions) -> Result<(PipelineReport, FluxSweep)> {
    let region = probe_region(model, options.probe_radius);
    let sweep = FluxSweep::run(model, options.mu, options.sweep.clone())?;
    let flow = spectral_flow(model, &sweep, &region)?;
    let run = quasi_adiabatic_evolve(model, options.mu, &region, &options.evolve)?;
    let local_deficiency = charge_deficiency_in(&run.transported, &run.fermi, &region)?;
    let global = charge_deficiency(&run.transported, &run.fermi)?;
    let index = index_eig(&run.transported, &run.fermi)?;
    let local = region_index(&run.transported, &run.fermi, &region, REGION_INDEX_THRESHOLD)?;
    let chern = match options.chern_bands {
        Some(b) => Some(chern_number(model, b)?.chern),
        None => None,
    };
    let report = PipelineReport {
        net_flow: flow.net_flow,
        local_flow: flow.local_flow,
        crossings: flow.crossings,
        charge_deficiency: global,
        local_deficiency,
        index_eig: index,
        local_index: local.rounded(),
        local_index_weight: local.weighted,
        chern,
        steps: run.steps,
        step_delta: run.last_delta,
        unitarity_residual: run.unitarity_residual,
        evaluations: flow.evaluations,
    };
    Ok((report, sweep))
}
