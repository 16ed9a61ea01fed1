use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest number of modes accepted unless a different cap is requested.
pub const DEFAULT_MODE_CAP: usize = 14;

/// A single fermionic mode: lattice site, internal orbital and layer.
///
/// Unstacked spaces use layer 1. The stacked space adds the layer 2 copies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ModeLabel {
    pub site: (i64, i64),
    pub orbital: usize,
    pub layer: u8,
}

impl ModeLabel {
    pub fn new(site: (i64, i64), orbital: usize) -> Self {
        Self {
            site,
            orbital,
            layer: 1,
        }
    }
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{})#{}@{}",
            self.site.0, self.site.1, self.orbital, self.layer
        )
    }
}

/// Ordered list of modes. The position of a label is its Jordan-Wigner
/// index: bit `k` of a Fock basis index is the occupation of mode `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModeSpace {
    labels: Vec<ModeLabel>,
    cap: usize,
}

impl ModeSpace {
    pub fn new(labels: Vec<ModeLabel>) -> Result<Self> {
        Self::with_cap(labels, DEFAULT_MODE_CAP)
    }

    pub fn with_cap(labels: Vec<ModeLabel>, cap: usize) -> Result<Self> {
        if labels.len() > cap {
            return Err(Error::TooManyModes {
                requested: labels.len(),
                cap,
            });
        }
        let mut sorted = labels.clone();
        sorted.sort();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument(format!("duplicate mode label {}", w[0])));
        }
        Ok(Self { labels, cap })
    }

    /// `n` modes on the sites `(0,0), (1,0), ...` of a chain.
    pub fn chain(n: usize) -> Result<Self> {
        Self::new((0..n as i64).map(|x| ModeLabel::new((x, 0), 0)).collect())
    }

    /// One mode per site and orbital, sites outermost.
    pub fn from_sites(sites: &[(i64, i64)], n_internal: usize) -> Result<Self> {
        Self::new(
            sites
                .iter()
                .flat_map(|&s| (0..n_internal).map(move |o| ModeLabel::new(s, o)))
                .collect(),
        )
    }

    /// Two-layer space with the layer copies interleaved: the layer 1 copy
    /// of mode `k` sits at `2k` and the layer 2 copy at `2k + 1`.
    pub fn stacked(&self) -> Result<Self> {
        let labels = self
            .labels
            .iter()
            .flat_map(|l| {
                [
                    ModeLabel { layer: 1, ..*l },
                    ModeLabel { layer: 2, ..*l },
                ]
            })
            .collect();
        Self::with_cap(labels, 2 * self.cap)
    }

    pub fn n_modes(&self) -> usize {
        self.labels.len()
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn labels(&self) -> &[ModeLabel] {
        &self.labels
    }

    pub fn fock_dim(&self) -> usize {
        1usize << self.n_modes()
    }

    pub fn index_of(&self, label: &ModeLabel) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Indices of the modes in the given layer.
    pub fn layer_modes(&self, layer: u8) -> Vec<usize> {
        (0..self.n_modes())
            .filter(|&k| self.labels[k].layer == layer)
            .collect()
    }

    /// Bytes held by one dense operator on the Fock space.
    pub fn dense_operator_bytes(&self) -> usize {
        self.fock_dim() * self.fock_dim() * std::mem::size_of::<crate::linalg::c64>()
    }
}
