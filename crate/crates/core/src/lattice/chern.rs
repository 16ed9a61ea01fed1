//! Chern numbers of isolated band groups from the lattice field strength of
//! the Bloch eigenvectors on a discretized Brillouin zone.

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::model::{LatticeModel, ModelPreset};
use crate::linalg::{c64, eigh, ComplexMatrix};

/// Smallest direct gap accepted between the selected bands and the rest.
pub const BAND_GAP_TOL: f64 = 1e-6;

/// Bands, counted from the bottom of the Bloch spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "bands", rename_all = "kebab-case")]
pub enum BandSelector {
    /// Bands `start..end` in ascending order.
    Range { start: usize, end: usize },
    /// The lowest `count` bands.
    Lowest { count: usize },
}

impl BandSelector {
    fn bounds(&self, n_bands: usize) -> Result<(usize, usize)> {
        let (s, e) = match *self {
            BandSelector::Range { start, end } => (start, end),
            BandSelector::Lowest { count } => (0, count),
        };
        if s >= e || e > n_bands {
            return Err(Error::InvalidArgument(format!(
                "band range {s}..{e} is empty or exceeds {n_bands} bands"
            )));
        }
        Ok((s, e))
    }
}

/// Bloch Hamiltonian on the unit cell `period` with twist `theta`:
/// `H(theta)_{s i, s' j} = sum_n H(s, i; s' + n L, j) e^{i theta . n}`.
pub fn bloch_hamiltonian(preset: &ModelPreset, period: (usize, usize), theta: (f64, f64)) -> ComplexMatrix {
    let (l1, l2) = (period.0 as i64, period.1 as i64);
    let ni = preset.n_internal();
    let cells = (l1 * l2) as usize;
    let n = cells * ni;
    let site = |c: usize| ((c as i64) / l2, (c as i64) % l2);
    let r = preset.range();
    let (m1, m2) = (r / l1 + 1, r / l2 + 1);
    ComplexMatrix::from_fn(n, n, |a, b| {
        let (x, i) = (site(a / ni), a % ni);
        let (y, j) = (site(b / ni), b % ni);
        let mut acc = c64::new(0.0, 0.0);
        for n1 in -m1..=m1 {
            for n2 in -m2..=m2 {
                let shifted = (y.0 + n1 * l1, y.1 + n2 * l2);
                let amp = preset.amplitude(x, i, shifted, j);
                if amp != c64::new(0.0, 0.0) {
                    acc += amp * c64::from_polar(1.0, theta.0 * n1 as f64 + theta.1 * n2 as f64);
                }
            }
        }
        acc
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChernResult {
    pub chern: i64,
    /// Unrounded plaquette sum at the finest grid.
    pub raw: f64,
    /// Grid sizes visited, each doubling the previous.
    pub grids: Vec<usize>,
    /// Smallest direct gap between the selected bands and their neighbours.
    pub min_gap: f64,
}

/// Plaquette sum on an `n × n` grid and the smallest gap encountered.
pub fn plaquette_sum(
    preset: &ModelPreset,
    period: (usize, usize),
    selector: BandSelector,
    n: usize,
) -> Result<(f64, f64)> {
    let tau = std::f64::consts::TAU;
    let mut frames = Vec::with_capacity(n * n);
    let mut min_gap = f64::INFINITY;
    let mut bounds = None;
    for k1 in 0..n {
        for k2 in 0..n {
            let theta = (tau * k1 as f64 / n as f64, tau * k2 as f64 / n as f64);
            let e = eigh(&bloch_hamiltonian(preset, period, theta))?;
            let (s, t) = match bounds {
                Some(b) => b,
                None => {
                    let b = selector.bounds(e.dim())?;
                    bounds = Some(b);
                    b
                }
            };
            if s > 0 {
                min_gap = min_gap.min(e.values[s] - e.values[s - 1]);
            }
            if t < e.dim() {
                min_gap = min_gap.min(e.values[t] - e.values[t - 1]);
            }
            let dim = e.dim();
            frames.push(Mat::<c64>::from_fn(dim, t - s, |i, c| e.vectors.get(i, s + c)));
        }
    }
    if min_gap < BAND_GAP_TOL {
        return Err(Error::GapClosesOnBZ { gap: min_gap });
    }
    let at = |k1: usize, k2: usize| &frames[(k1 % n) * n + (k2 % n)];
    let link = |a: &Mat<c64>, b: &Mat<c64>| -> c64 {
        let o = a.adjoint() * b;
        let d = o.determinant();
        d / d.norm()
    };
    let mut total = 0.0;
    for k1 in 0..n {
        for k2 in 0..n {
            let u1 = link(at(k1, k2), at(k1 + 1, k2));
            let u2 = link(at(k1 + 1, k2), at(k1 + 1, k2 + 1));
            let u3 = link(at(k1, k2 + 1), at(k1 + 1, k2 + 1));
            let u4 = link(at(k1, k2), at(k1, k2 + 1));
            total += (u1 * u2 * u3.conj() * u4.conj()).arg();
        }
    }
    Ok((total / tau, min_gap))
}

/// Chern number of the selected bands of a periodic model.
///
/// The grid starts at `initial_grid` and doubles until two successive
/// rounded values agree, at most `max_doublings` times.
pub fn chern_number_of(
    preset: &ModelPreset,
    selector: BandSelector,
    initial_grid: usize,
    max_doublings: usize,
) -> Result<ChernResult> {
    let period = preset.period()?;
    let mut n = initial_grid.max(2);
    let (mut raw, mut min_gap) = plaquette_sum(preset, period, selector, n)?;
    let mut grids = vec![n];
    for _ in 0..max_doublings {
        n *= 2;
        let (next, gap) = plaquette_sum(preset, period, selector, n)?;
        grids.push(n);
        min_gap = min_gap.min(gap);
        let stable = next.round() == raw.round() && (next - next.round()).abs() < 1e-6;
        raw = next;
        if stable {
            return Ok(ChernResult {
                chern: raw.round() as i64,
                raw,
                grids,
                min_gap,
            });
        }
    }
    Err(Error::ConvergenceFailure)
}

/// Chern number of the selected bands of the model's preset, after checking
/// that the patch is a whole number of unit cells.
pub fn chern_number(model: &LatticeModel, selector: BandSelector) -> Result<ChernResult> {
    let (l1, l2) = model.preset.period()?;
    if model.patch.width() % l1 != 0 || model.patch.height() % l2 != 0 {
        return Err(Error::NotCommensurate(format!(
            "patch {}x{} is not a multiple of the unit cell {l1}x{l2}",
            model.patch.width(),
            model.patch.height()
        )));
    }
    chern_number_of(&model.preset, selector, 12, 3)
}
