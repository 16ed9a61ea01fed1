//! Flux insertion at the origin and the spectral flow it induces.
//!
//! Matrix elements with both sites in the closed left half-plane `x1 <= 0`
//! are multiplied by `exp(i phi (up(x) - up(y)))`, where `up` is the
//! indicator of the upper half-plane `x2 >= 0`. Only hops crossing the cut
//! between rows `-1` and `0` left of the origin pick up a phase, so `H_phi`
//! carries a point flux `phi` through the plaquette at the end of the cut.
//!
//! Crossing orientation: a branch moving from below `mu` to above `mu` as
//! `phi` increases counts `+1`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::model::LatticeModel;
use crate::linalg::{c64, eigh, inner, ComplexMatrix, Eigh, Projection};

/// Smallest distance between `mu` and the spectrum accepted by
/// [`fermi_projection`].
pub const GAP_TOL: f64 = 1e-9;

/// Indicator of the upper half-plane, `x2 >= 0`.
pub fn upper(site: (i64, i64)) -> bool {
    site.1 >= 0
}

/// Indicator of the closed left half-plane used by the flux phase, `x1 <= 0`.
pub fn left_closed(site: (i64, i64)) -> bool {
    site.0 <= 0
}

pub fn gauge_flux_hamiltonian(model: &LatticeModel, phi: f64) -> ComplexMatrix {
    let h = &model.hamiltonian;
    let n = model.dim();
    let sites: Vec<(i64, i64)> = (0..n).map(|k| model.site_of(k)).collect();
    ComplexMatrix::from_fn(n, n, |a, b| {
        let v = h.get(a, b);
        let (x, y) = (sites[a], sites[b]);
        if v == c64::new(0.0, 0.0) || !left_closed(x) || !left_closed(y) {
            return v;
        }
        let s = upper(x) as i64 - upper(y) as i64;
        if s == 0 {
            v
        } else {
            // phi = 2 pi must reproduce H exactly, not up to rounding
            v * unit_phase(phi * s as f64)
        }
    })
}

fn unit_phase(theta: f64) -> c64 {
    let turns = theta / std::f64::consts::TAU;
    if (turns - turns.round()).abs() < 1e-15 {
        c64::new(1.0, 0.0)
    } else {
        c64::from_polar(1.0, theta)
    }
}

/// Spectral projection of `H` onto `(-inf, mu]`.
pub fn fermi_projection(h: &ComplexMatrix, mu: f64) -> Result<Projection> {
    let e = eigh(h)?;
    fermi_projection_from(&e, mu, GAP_TOL)
}

pub fn fermi_projection_from(e: &Eigh, mu: f64, gap_tol: f64) -> Result<Projection> {
    if let Some(&l) = e.values.iter().find(|&&l| (l - mu).abs() < gap_tol) {
        return Err(Error::FermiLevelInSpectrum {
            eigenvalue: l,
            mu,
            tol: gap_tol,
        });
    }
    Ok(Projection::trusted(e.spectral_projector(|l| l < mu)))
}

/// Parameters of a flux sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepOptions {
    /// Number of grid cells on `[0, 2 pi]`; the grid has `cells + 1` points.
    pub cells: usize,
    /// Eigenvectors kept on each side of `mu` for branch matching.
    pub window: usize,
    /// Maximal bisection depth for cells with unresolved or multiple
    /// crossings.
    pub max_bisections: usize,
    /// Extra bisections applied to each crossing cell to locate `phi*`.
    pub locate_bisections: usize,
    /// Smallest overlap accepted when matching a crossing branch.
    pub min_overlap: f64,
    /// Sweep `2 pi -> 0` instead of `0 -> 2 pi`.
    pub reversed: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            cells: 64,
            window: 6,
            max_bisections: 12,
            locate_bisections: 4,
            min_overlap: 0.5,
            reversed: false,
        }
    }
}

/// Spectrum and near-`mu` eigenvectors of `H_phi` at one flux value.
#[derive(Clone, Debug)]
pub struct SweepPoint {
    pub phi: f64,
    pub eigenvalues: Vec<f64>,
    /// Index of the first kept eigenvector in the ascending spectrum.
    pub window_start: usize,
    pub window_vectors: Vec<Vec<c64>>,
}

impl SweepPoint {
    fn compute(model: &LatticeModel, phi: f64, mu: f64, window: usize) -> Result<Self> {
        let e = eigh(&gauge_flux_hamiltonian(model, phi))?;
        let below = e.values.iter().filter(|&&l| l < mu).count();
        let start = below.saturating_sub(window);
        let end = (below + window).min(e.dim());
        Ok(Self {
            phi,
            window_vectors: (start..end).map(|k| e.vector(k)).collect(),
            eigenvalues: e.values,
            window_start: start,
        })
    }

    pub fn count_below(&self, mu: f64) -> usize {
        self.eigenvalues.iter().filter(|&&l| l < mu).count()
    }
}

/// Spectra of `H_phi` on a grid over `[0, 2 pi]`.
#[derive(Clone, Debug)]
pub struct FluxSweep {
    pub mu: f64,
    pub options: SweepOptions,
    /// Grid points in sweep order; endpoints are exactly `0` and `2 pi`.
    pub points: Vec<SweepPoint>,
}

impl FluxSweep {
    pub fn run(model: &LatticeModel, mu: f64, options: SweepOptions) -> Result<Self> {
        if options.cells == 0 {
            return Err(Error::InvalidArgument("sweep needs at least one cell".into()));
        }
        let tau = std::f64::consts::TAU;
        let mut grid: Vec<f64> = (0..=options.cells)
            .map(|k| tau * k as f64 / options.cells as f64)
            .collect();
        grid[options.cells] = tau;
        if options.reversed {
            grid.reverse();
        }
        let points = grid
            .par_iter()
            .map(|&phi| SweepPoint::compute(model, phi, mu, options.window))
            .collect::<Result<Vec<_>>>()?;
        for p in [&points[0], &points[options.cells]] {
            if let Some(&l) = p.eigenvalues.iter().find(|&&l| (l - mu).abs() < GAP_TOL) {
                return Err(Error::FermiLevelInSpectrum {
                    eigenvalue: l,
                    mu,
                    tol: GAP_TOL,
                });
            }
        }
        Ok(Self {
            mu,
            options,
            points,
        })
    }

    pub fn grid(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.phi).collect()
    }
}

/// One eigenvalue branch passing through `mu`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Crossing {
    /// Estimated flux at the crossing.
    pub phi: f64,
    /// `+1` upward, `-1` downward, in sweep order.
    pub direction: i64,
    /// Position of the branch in the ascending spectrum at the start of the
    /// refined cell.
    pub branch: usize,
    /// Weight of the crossing eigenvector inside the probe region, when one
    /// was given.
    pub region_weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralFlowResult {
    pub crossings: Vec<Crossing>,
    /// Sum of all directions.
    pub net_flow: i64,
    /// Sum of the directions of crossings with region weight at least 1/2.
    pub local_flow: i64,
    /// Number of diagonalizations, including refinements.
    pub evaluations: usize,
}

/// Signed crossings of `mu`, with per-crossing weight in `region` (one flag
/// per one-particle index; pass all `false` to skip).
pub fn spectral_flow(
    model: &LatticeModel,
    sweep: &FluxSweep,
    region: &[bool],
) -> Result<SpectralFlowResult> {
    let mu = sweep.mu;
    let opts = &sweep.options;
    let cells: Vec<(usize, Vec<Crossing>, usize)> = (0..sweep.points.len() - 1)
        .into_par_iter()
        .map(|k| {
            let mut evals = 0;
            let c = resolve_cell(
                model,
                &sweep.points[k],
                &sweep.points[k + 1],
                mu,
                opts,
                0,
                region,
                &mut evals,
            )?;
            Ok((k, c, evals))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut crossings = Vec::new();
    let mut evaluations = sweep.points.len();
    for (_, c, e) in cells {
        crossings.extend(c);
        evaluations += e;
    }
    let net_flow = crossings.iter().map(|c| c.direction).sum();
    let local_flow = crossings
        .iter()
        .filter(|c| c.region_weight >= 0.5)
        .map(|c| c.direction)
        .sum();
    Ok(SpectralFlowResult {
        crossings,
        net_flow,
        local_flow,
        evaluations,
    })
}

enum CellOutcome {
    Resolved(Vec<Crossing>),
    Ambiguous { branch: usize },
    Multiple { first: usize, second: usize },
}

/// Matches the near-`mu` eigenvectors of two points and lists the branches
/// that change side.
fn match_cell(a: &SweepPoint, b: &SweepPoint, mu: f64, min_overlap: f64, region: &[bool]) -> CellOutcome {
    let n_a = a.count_below(mu);
    let n_b = b.count_below(mu);
    let overlaps: Vec<Vec<f64>> = a
        .window_vectors
        .iter()
        .map(|va| b.window_vectors.iter().map(|vb| inner(va, vb).norm_sqr()).collect())
        .collect();
    let mut crossings = Vec::new();
    let mut matched_b = vec![false; b.window_vectors.len()];
    for (ia, row) in overlaps.iter().enumerate() {
        let ka = a.window_start + ia;
        let (ib, &best) = row
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.total_cmp(y.1))
            .expect("non-empty window");
        let kb = b.window_start + ib;
        let mutual = overlaps
            .iter()
            .map(|r| r[ib])
            .enumerate()
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .map(|(i, _)| i == ia)
            .unwrap_or(false);
        let side_a = ka < n_a;
        let side_b = kb < n_b;
        if side_a != side_b {
            if best < min_overlap || !mutual {
                return CellOutcome::Ambiguous { branch: ka };
            }
            matched_b[ib] = true;
            let la = a.eigenvalues[ka] - mu;
            let lb = b.eigenvalues[kb] - mu;
            let t = la / (la - lb);
            let weight = if region.iter().any(|&r| r) {
                let (va, vb) = (&a.window_vectors[ia], &b.window_vectors[ib]);
                let wa: f64 = va.iter().zip(region).filter(|(_, &r)| r).map(|(z, _)| z.norm_sqr()).sum();
                let wb: f64 = vb.iter().zip(region).filter(|(_, &r)| r).map(|(z, _)| z.norm_sqr()).sum();
                (1.0 - t) * wa + t * wb
            } else {
                0.0
            };
            crossings.push(Crossing {
                phi: a.phi + t * (b.phi - a.phi),
                direction: if side_a { 1 } else { -1 },
                branch: ka,
                region_weight: weight,
            });
        }
    }
    // branches whose match left the window cannot be followed
    let net: i64 = crossings.iter().map(|c| c.direction).sum();
    if net != n_a as i64 - n_b as i64 {
        return CellOutcome::Ambiguous {
            branch: n_a.min(n_b),
        };
    }
    if crossings.len() > 1 {
        return CellOutcome::Multiple {
            first: crossings[0].branch,
            second: crossings[1].branch,
        };
    }
    CellOutcome::Resolved(crossings)
}

#[allow(clippy::too_many_arguments)]
fn resolve_cell(
    model: &LatticeModel,
    a: &SweepPoint,
    b: &SweepPoint,
    mu: f64,
    opts: &SweepOptions,
    depth: usize,
    region: &[bool],
    evals: &mut usize,
) -> Result<Vec<Crossing>> {
    match match_cell(a, b, mu, opts.min_overlap, region) {
        CellOutcome::Resolved(c) if c.is_empty() => Ok(c),
        CellOutcome::Resolved(c) if depth >= opts.locate_bisections => Ok(c),
        outcome => {
            if depth >= opts.max_bisections {
                let phi = 0.5 * (a.phi + b.phi);
                return Err(match outcome {
                    CellOutcome::Multiple { first, second } => Error::NonSimpleCrossing { phi, first, second },
                    CellOutcome::Ambiguous { branch } => Error::UnresolvedCrossing { phi, branch },
                    CellOutcome::Resolved(c) => return Ok(c),
                });
            }
            let mid = SweepPoint::compute(model, 0.5 * (a.phi + b.phi), mu, opts.window)?;
            *evals += 1;
            let mut left = resolve_cell(model, a, &mid, mu, opts, depth + 1, region, evals)?;
            let right = resolve_cell(model, &mid, b, mu, opts, depth + 1, region, evals)?;
            left.extend(right);
            Ok(left)
        }
    }
}
