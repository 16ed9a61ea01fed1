use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c64, ComplexMatrix};

const ZERO: c64 = c64 { re: 0.0, im: 0.0 };

/// Rectangle `[x_min, x_max] × [y_min, y_max]` of ℤ², origin in the interior.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Patch {
    pub x_min: i64,
    pub x_max: i64,
    pub y_min: i64,
    pub y_max: i64,
}

impl Patch {
    pub fn new(x_min: i64, x_max: i64, y_min: i64, y_max: i64) -> Result<Self> {
        if !(x_min < 0 && 0 < x_max && y_min < 0 && 0 < y_max) {
            return Err(Error::OriginOnBoundary);
        }
        Ok(Self {
            x_min,
            x_max,
            y_min,
            y_max,
        })
    }

    /// `width × height` sites with `x` in `[-width/2, width - width/2 - 1]`,
    /// and likewise for `y`.
    pub fn centered(width: usize, height: usize) -> Result<Self> {
        let (w, h) = (width as i64, height as i64);
        Self::new(-w / 2, w - w / 2 - 1, -h / 2, h - h / 2 - 1)
    }

    pub fn width(&self) -> usize {
        (self.x_max - self.x_min + 1) as usize
    }

    pub fn height(&self) -> usize {
        (self.y_max - self.y_min + 1) as usize
    }

    pub fn n_sites(&self) -> usize {
        self.width() * self.height()
    }

    pub fn contains(&self, (x, y): (i64, i64)) -> bool {
        (self.x_min..=self.x_max).contains(&x) && (self.y_min..=self.y_max).contains(&y)
    }

    /// Column-major site index: `(x - x_min) * height + (y - y_min)`.
    pub fn site_index(&self, (x, y): (i64, i64)) -> Option<usize> {
        self.contains((x, y))
            .then(|| ((x - self.x_min) as usize) * self.height() + (y - self.y_min) as usize)
    }

    pub fn site(&self, index: usize) -> (i64, i64) {
        let h = self.height();
        (
            self.x_min + (index / h) as i64,
            self.y_min + (index % h) as i64,
        )
    }

    pub fn sites(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        (0..self.n_sites()).map(move |k| self.site(k))
    }
}

/// One translation-invariant hopping term `H(x + offset, to; x, from)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hop {
    pub offset: (i64, i64),
    pub from: usize,
    pub to: usize,
    /// Real and imaginary part.
    pub amplitude: (f64, f64),
}

/// Named model families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "kebab-case")]
pub enum ModelPreset {
    /// Nearest-neighbour hopping `-t` with Landau-gauge flux `alpha` per
    /// plaquette: `H(x + e2, x) = -t exp(2 pi i alpha x1)`.
    Hofstadter { alpha: f64, hopping: f64 },
    /// On-site checkerboard energies `energy * (-1)^(x1 + x2)`.
    Atomic { energy: f64 },
    /// Translation-invariant kernel; reverse hops are added by Hermitian
    /// conjugation.
    Custom { n_internal: usize, hops: Vec<Hop> },
}

impl ModelPreset {
    pub fn n_internal(&self) -> usize {
        match self {
            ModelPreset::Custom { n_internal, .. } => *n_internal,
            _ => 1,
        }
    }

    /// `H(x, i; y, j)` on all of ℤ².
    pub fn amplitude(&self, x: (i64, i64), i: usize, y: (i64, i64), j: usize) -> c64 {
        let d = (x.0 - y.0, x.1 - y.1);
        match self {
            ModelPreset::Hofstadter { alpha, hopping } => {
                let t = c64::new(-hopping, 0.0);
                match d {
                    (1, 0) | (-1, 0) => t,
                    (0, 1) => t * c64::from_polar(1.0, std::f64::consts::TAU * alpha * y.0 as f64),
                    (0, -1) => t * c64::from_polar(1.0, -std::f64::consts::TAU * alpha * x.0 as f64),
                    _ => ZERO,
                }
            }
            ModelPreset::Atomic { energy } => {
                if d == (0, 0) {
                    let sign = if (x.0 + x.1).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                    c64::new(energy * sign, 0.0)
                } else {
                    ZERO
                }
            }
            ModelPreset::Custom { hops, .. } => {
                let mut acc = ZERO;
                for h in hops {
                    let a = c64::new(h.amplitude.0, h.amplitude.1);
                    if h.offset == d && h.to == i && h.from == j {
                        acc += a;
                    }
                    if (-h.offset.0, -h.offset.1) == d && h.from == i && h.to == j {
                        acc += a.conj();
                    }
                }
                acc
            }
        }
    }

    /// Largest `|x - y|_inf` with a nonzero amplitude.
    pub fn range(&self) -> i64 {
        match self {
            ModelPreset::Hofstadter { .. } => 1,
            ModelPreset::Atomic { .. } => 0,
            ModelPreset::Custom { hops, .. } => hops
                .iter()
                .map(|h| h.offset.0.abs().max(h.offset.1.abs()))
                .max()
                .unwrap_or(0),
        }
    }

    /// Translations leaving the kernel invariant, or `NotCommensurate`.
    pub fn period(&self) -> Result<(usize, usize)> {
        match self {
            ModelPreset::Hofstadter { alpha, .. } => {
                let q = (1..=256usize)
                    .find(|&q| {
                        let a = alpha * q as f64;
                        (a - a.round()).abs() < 1e-10
                    })
                    .ok_or_else(|| {
                        Error::NotCommensurate(format!("flux {alpha} has no denominator <= 256"))
                    })?;
                Ok((q, 1))
            }
            ModelPreset::Atomic { .. } => Ok((2, 2)),
            ModelPreset::Custom { .. } => Ok((1, 1)),
        }
    }
}

/// Exponential decay bound `|H(x, .; y, .)| <= c exp(-mu |x - y|)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayBound {
    pub c: f64,
    pub mu: f64,
}

impl Default for DecayBound {
    fn default() -> Self {
        Self { c: 10.0, mu: 1.0 }
    }
}

/// Outcome of the decay check: the largest ratio `|H| / (c e^{-mu d})`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecayReport {
    pub bound: DecayBound,
    pub max_ratio: f64,
}

/// Hamiltonian on a finite patch with open boundaries.
#[derive(Clone, Debug)]
pub struct LatticeModel {
    pub patch: Patch,
    pub preset: ModelPreset,
    pub hamiltonian: ComplexMatrix,
    pub decay: DecayReport,
}

impl LatticeModel {
    pub fn n_internal(&self) -> usize {
        self.preset.n_internal()
    }

    pub fn dim(&self) -> usize {
        self.patch.n_sites() * self.n_internal()
    }

    /// Lattice site of a one-particle index.
    pub fn site_of(&self, index: usize) -> (i64, i64) {
        self.patch.site(index / self.n_internal())
    }

    /// One entry per one-particle index, selected by a predicate on sites.
    pub fn site_mask(&self, pred: impl Fn((i64, i64)) -> bool) -> Vec<bool> {
        (0..self.dim()).map(|k| pred(self.site_of(k))).collect()
    }
}

pub fn build_model(preset: ModelPreset, patch: Patch) -> Result<LatticeModel> {
    build_model_with_bound(preset, patch, DecayBound::default())
}

pub fn build_model_with_bound(
    preset: ModelPreset,
    patch: Patch,
    bound: DecayBound,
) -> Result<LatticeModel> {
    let patch = Patch::new(patch.x_min, patch.x_max, patch.y_min, patch.y_max)?;
    if let ModelPreset::Custom { n_internal, hops } = &preset {
        if *n_internal == 0 {
            return Err(Error::InvalidArgument("custom kernel needs n_internal >= 1".into()));
        }
        if let Some(h) = hops.iter().find(|h| h.from >= *n_internal || h.to >= *n_internal) {
            return Err(Error::InvalidArgument(format!(
                "hop orbital index out of range: {} -> {}",
                h.from, h.to
            )));
        }
    }
    let ni = preset.n_internal();
    let n = patch.n_sites() * ni;
    let mut h = ComplexMatrix::zeros(n, n);
    let mut max_ratio: f64 = 0.0;
    let range = preset.range();
    for a in 0..patch.n_sites() {
        let x = patch.site(a);
        for dx in -range..=range {
            for dy in -range..=range {
                let Some(b) = patch.site_index((x.0 + dx, x.1 + dy)) else {
                    continue;
                };
                let y = patch.site(b);
                let dist = ((dx * dx + dy * dy) as f64).sqrt();
                let limit = bound.c * (-bound.mu * dist).exp();
                for i in 0..ni {
                    for j in 0..ni {
                        let v = preset.amplitude(x, i, y, j);
                        if v.norm() > limit {
                            return Err(Error::DecayViolation {
                                distance: dist,
                                amplitude: v.norm(),
                                bound: limit,
                            });
                        }
                        max_ratio = max_ratio.max(v.norm() / limit);
                        h.set(a * ni + i, b * ni + j, v);
                    }
                }
            }
        }
    }
    let residual = h.hermiticity_residual()?;
    if residual > 1e-12 {
        return Err(Error::NonHermitian {
            residual,
            tol: 1e-12,
        });
    }
    Ok(LatticeModel {
        patch,
        preset,
        hamiltonian: h,
        decay: DecayReport { bound, max_ratio },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigvalsh;

    #[test]
    fn centered_patch_layout() {
        let p = Patch::centered(30, 30).unwrap();
        assert_eq!((p.x_min, p.x_max), (-15, 14));
        assert_eq!(p.site_index((-15, -15)), Some(0));
        assert_eq!(p.site_index((-15, -14)), Some(1));
        assert_eq!(p.site(p.site_index((3, -7)).unwrap()), (3, -7));
        assert!(matches!(Patch::new(0, 3, -1, 1), Err(Error::OriginOnBoundary)));
    }

    #[test]
    fn atomic_model_is_diagonal_checkerboard() {
        let m = build_model(ModelPreset::Atomic { energy: 1.0 }, Patch::centered(4, 4).unwrap()).unwrap();
        let h = &m.hamiltonian;
        for a in 0..m.dim() {
            let (x, y) = m.site_of(a);
            let expected = if (x + y).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            assert_eq!(h.get(a, a).re, expected);
        }
        assert_eq!(h.frobenius_norm(), (m.dim() as f64).sqrt());
    }

    #[test]
    fn hofstadter_plaquette_flux() {
        let alpha = 1.0 / 3.0;
        let p = ModelPreset::Hofstadter { alpha, hopping: 1.0 };
        // product of hops around a counterclockwise plaquette, H(to, from)
        let x = (2, -1);
        let loop_ = [x, (x.0 + 1, x.1), (x.0 + 1, x.1 + 1), (x.0, x.1 + 1), x];
        let mut prod = c64::new(1.0, 0.0);
        for w in loop_.windows(2) {
            prod *= p.amplitude(w[1], 0, w[0], 0);
        }
        let phase = prod.arg();
        assert!((phase - std::f64::consts::TAU * alpha).abs() < 1e-12);
    }

    #[test]
    fn hofstadter_spectrum_has_three_bands() {
        let m = build_model(
            ModelPreset::Hofstadter { alpha: 1.0 / 3.0, hopping: 1.0 },
            Patch::centered(18, 18).unwrap(),
        )
        .unwrap();
        let ev = eigvalsh(&m.hamiltonian).unwrap();
        // bulk histogram: two windows inside the bulk gaps hold only edge states
        let in_gap = |lo: f64, hi: f64| ev.iter().filter(|&&e| e > lo && e < hi).count();
        let n = ev.len();
        // bulk bands [-2.73, -2], [-0.73, 0.73], [2, 2.73]
        assert!(in_gap(-1.7, -1.0) < n / 20);
        assert!(in_gap(1.0, 1.7) < n / 20);
        let lowest = ev.iter().filter(|&&e| e < -1.366).count();
        assert!(lowest > n / 4 && lowest < n / 3 + n / 20);
    }

    #[test]
    fn far_hop_violates_decay() {
        let preset = ModelPreset::Custom {
            n_internal: 1,
            hops: vec![Hop { offset: (20, 0), from: 0, to: 0, amplitude: (1.0, 0.0) }],
        };
        let err = build_model(preset, Patch::centered(30, 3).unwrap()).unwrap_err();
        assert!(matches!(err, Error::DecayViolation { .. }));
    }

    #[test]
    fn custom_kernel_is_hermitian_completed() {
        let preset = ModelPreset::Custom {
            n_internal: 2,
            hops: vec![Hop { offset: (1, 0), from: 0, to: 1, amplitude: (0.3, 0.4) }],
        };
        let m = build_model(preset, Patch::centered(4, 3).unwrap()).unwrap();
        assert!(m.hamiltonian.hermiticity_residual().unwrap() < 1e-15);
        let a = m.patch.site_index((0, 0)).unwrap();
        let b = m.patch.site_index((1, 0)).unwrap();
        assert_eq!(m.hamiltonian.get(b * 2 + 1, a * 2), c64::new(0.3, 0.4));
        assert_eq!(m.hamiltonian.get(a * 2, b * 2 + 1), c64::new(0.3, -0.4));
    }
}
