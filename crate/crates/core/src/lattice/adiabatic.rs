//! Quasi-adiabatic transport of the Fermi projection through one flux
//! quantum, driven by the left-truncated Kato generator.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::flux::{fermi_projection, upper};
use crate::lattice::model::LatticeModel;
use crate::linalg::{c64, eigh, ComplexMatrix, Eigh, Projection};

/// Largest accepted `‖U*U - 1‖` of the evolution at `2 pi`.
pub const EVOLUTION_UNITARITY_TOL: f64 = 1e-8;

/// Indicator of the open left half-plane, `x1 < 0`.
pub fn left_open(site: (i64, i64)) -> bool {
    site.0 < 0
}

/// Diagonal of `exp(i phi chi_up)`.
fn gauge_phases(upper_mask: &[bool], phi: f64) -> Vec<c64> {
    let p = c64::from_polar(1.0, phi);
    upper_mask
        .iter()
        .map(|&u| if u { p } else { c64::new(1.0, 0.0) })
        .collect()
}

fn conj_all(v: &[c64]) -> Vec<c64> {
    v.iter().map(|z| z.conj()).collect()
}

/// `[P, [chi, P]]` for a diagonal 0/1 mask `chi`.
pub fn kato_generator_at_zero(p: &Projection, chi: &[bool]) -> ComplexMatrix {
    let pm = p.matrix();
    let n = pm.nrows();
    let dp = ComplexMatrix::from_fn(n, n, |i, j| {
        let c = chi[i] as i32 - chi[j] as i32;
        pm.get(i, j) * c as f64
    });
    pm.commutator(&dp)
}

/// `K_up(phi) = i [dP_up, P_up]`, the generator with `i dU = K_up U dphi` that
/// transports `P_up(phi) = e^{i phi chi_up} P e^{-i phi chi_up}`,
/// where `P` is the Fermi projection of the model at level `mu`.
pub fn kato_generator(model: &LatticeModel, mu: f64, phi: f64) -> Result<ComplexMatrix> {
    let p = fermi_projection(&model.hamiltonian, mu)?;
    let chi = model.site_mask(upper);
    let k0 = kato_generator_at_zero(&p, &chi);
    let d = gauge_phases(&chi, phi);
    Ok(k0.scale_rows_cols(&d, &conj_all(&d)))
}

/// Keeps the entries of `k` with both indices at `x1 < 0`.
pub fn truncate_left(k: &ComplexMatrix, model: &LatticeModel) -> ComplexMatrix {
    k.compress(&model.site_mask(left_open))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvolveOptions {
    /// Midpoint steps of the first pass.
    pub initial_steps: usize,
    /// Largest number of step halvings after the first pass.
    pub max_halvings: usize,
    /// Convergence threshold on the change of the region deficiency.
    pub tol: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            initial_steps: 16,
            max_halvings: 6,
            tol: 1e-3,
        }
    }
}

/// Result of [`quasi_adiabatic_evolve`].
#[derive(Clone, Debug)]
pub struct AdiabaticRun {
    pub unitary: ComplexMatrix,
    /// `U P U*` at `phi = 2 pi`.
    pub transported: Projection,
    /// Fermi projection at `phi = 2 pi`, which equals the one at `0`.
    pub fermi: Projection,
    pub steps: usize,
    /// Region deficiency of the accepted pass.
    pub deficiency: f64,
    /// Change of the region deficiency against the previous pass.
    pub last_delta: f64,
    pub unitarity_residual: f64,
}

/// Fixed-step evolution `U <- exp(-i K(phi_mid) h) U` over `[0, 2 pi]`.
///
/// `K(phi) = D(phi) K_left D(phi)*` with `D = e^{i phi chi_up}` diagonal and
/// `K_left` the truncated generator at zero flux, so each step costs one
/// diagonal scaling and one product with the fixed `exp(-i K_left h)`.
pub fn evolve_fixed_step(k_left: &Eigh, chi_up: &[bool], steps: usize) -> ComplexMatrix {
    let n = k_left.dim();
    let h = std::f64::consts::TAU / steps as f64;
    let step = k_left.apply_function(|l| c64::from_polar(1.0, -l * h));
    let mut u = ComplexMatrix::identity(n);
    for s in 0..steps {
        let d = gauge_phases(chi_up, (s as f64 + 0.5) * h);
        let g = step.scale_rows_cols(&d, &conj_all(&d));
        u = &g * &u;
    }
    u
}

/// `exp(-2 pi i (K_left + chi_up))`, the exact propagator at `2 pi`.
pub fn exact_propagator(k_left: &ComplexMatrix, chi_up: &[bool]) -> Result<ComplexMatrix> {
    let n = k_left.nrows();
    let g = ComplexMatrix::from_fn(n, n, |i, j| {
        let diag = if i == j && chi_up[i] { 1.0 } else { 0.0 };
        k_left.get(i, j) + c64::new(diag, 0.0)
    });
    Ok(eigh(&g)?.apply_function(|l| c64::from_polar(1.0, -std::f64::consts::TAU * l)))
}

/// Transports the Fermi projection at level `mu` by the truncated Kato
/// evolution, halving the step until the deficiency inside `region` moves by
/// less than `options.tol`.
pub fn quasi_adiabatic_evolve(
    model: &LatticeModel,
    mu: f64,
    region: &[bool],
    options: &EvolveOptions,
) -> Result<AdiabaticRun> {
    if region.len() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            found: region.len(),
        });
    }
    if options.initial_steps == 0 {
        return Err(Error::InvalidArgument("evolution needs at least one step".into()));
    }
    let p = fermi_projection(&model.hamiltonian, mu)?;
    let chi = model.site_mask(upper);
    let k_left = truncate_left(&kato_generator_at_zero(&p, &chi), model);
    let k_eig = eigh(&k_left)?;

    let mut steps = options.initial_steps;
    let mut previous: Option<f64> = None;
    let mut last_delta = f64::INFINITY;
    for _ in 0..=options.max_halvings {
        let u = evolve_fixed_step(&k_eig, &chi, steps);
        let transported = Projection::trusted(&(&u * p.matrix()) * &u.adjoint());
        let deficiency = charge_deficiency_in(&transported, &p, region)?;
        log::debug!("quasi-adiabatic pass: {steps} steps, region deficiency {deficiency:.6}");
        if let Some(prev) = previous {
            last_delta = (deficiency - prev).abs();
            if last_delta < options.tol {
                let unitarity_residual = u.unitarity_residual()?;
                if unitarity_residual >= EVOLUTION_UNITARITY_TOL {
                    return Err(Error::UnitarityLoss {
                        residual: unitarity_residual,
                    });
                }
                return Ok(AdiabaticRun {
                    unitary: u,
                    transported,
                    fermi: p,
                    steps,
                    deficiency,
                    last_delta,
                    unitarity_residual,
                });
            }
        }
        previous = Some(deficiency);
        steps *= 2;
    }
    Err(Error::StepFloorReached {
        steps: steps / 2,
        delta: last_delta,
    })
}

/// `Tr(P_qa - P_mu)`.
pub fn charge_deficiency(p_qa: &Projection, p_mu: &Projection) -> Result<f64> {
    if p_qa.dim() != p_mu.dim() {
        return Err(Error::DimensionMismatch {
            expected: p_mu.dim(),
            found: p_qa.dim(),
        });
    }
    Ok((p_qa.matrix() - p_mu.matrix()).trace().re)
}

/// `Tr(chi (P_qa - P_mu))` for the coordinate projection `chi` given by
/// `region`.
pub fn charge_deficiency_in(p_qa: &Projection, p_mu: &Projection, region: &[bool]) -> Result<f64> {
    if p_qa.dim() != p_mu.dim() || region.len() != p_mu.dim() {
        return Err(Error::DimensionMismatch {
            expected: p_mu.dim(),
            found: p_qa.dim().max(region.len()),
        });
    }
    let (a, b) = (p_qa.matrix(), p_mu.matrix());
    Ok((0..region.len())
        .filter(|&i| region[i])
        .map(|i| (a.get(i, i) - b.get(i, i)).re)
        .sum())
}

/// Eigenvalues of `P_qa - P_mu` near `+1` and `-1`, weighted by their mass
/// inside `region`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegionIndex {
    /// Eigenvalues within `threshold` of `+1`.
    pub plus: Vec<f64>,
    /// Eigenvalues within `threshold` of `-1`.
    pub minus: Vec<f64>,
    /// `Tr(chi (E_plus - E_minus))`.
    pub weighted: f64,
    /// Count of near-`±1` eigenvalues over the whole patch, which is always
    /// zero on a finite patch.
    pub global: i64,
}

impl RegionIndex {
    pub fn rounded(&self) -> i64 {
        self.weighted.round() as i64
    }
}

/// Region-weighted count of the `±1` eigenvectors of `P_qa - P_mu`.
pub fn region_index(
    p_qa: &Projection,
    p_mu: &Projection,
    region: &[bool],
    threshold: f64,
) -> Result<RegionIndex> {
    let d = p_qa.matrix() - p_mu.matrix();
    let e = eigh(&d)?;
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    let mut weighted = 0.0;
    for (k, &l) in e.values.iter().enumerate() {
        let sign = if (l - 1.0).abs() < threshold {
            plus.push(l);
            1.0
        } else if (l + 1.0).abs() < threshold {
            minus.push(l);
            -1.0
        } else {
            continue;
        };
        let v = e.vector(k);
        let w: f64 = v
            .iter()
            .zip(region)
            .filter(|(_, &r)| r)
            .map(|(z, _)| z.norm_sqr())
            .sum();
        weighted += sign * w;
    }
    let global = plus.len() as i64 - minus.len() as i64;
    Ok(RegionIndex {
        plus,
        minus,
        weighted,
        global,
    })
}

/// Default threshold for [`region_index`]. Eigenvalues of a difference of
/// projections come in `±lambda` pairs, and on a finite patch the would-be
/// `±1` pair sits a finite-size distance away from `±1`.
pub const REGION_INDEX_THRESHOLD: f64 = 0.5;
