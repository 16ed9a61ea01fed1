//! Reproducible sample inputs: random Hermitian matrices, Haar unitaries,
//! random projections, and the named projection pairs.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{c64, inner, norm, ComplexMatrix, Projection};

pub type SampleRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut impl Rng) -> c64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn random_vector(n: usize, rng: &mut impl Rng) -> Vec<c64> {
    (0..n).map(|_| gaussian(rng)).collect()
}

pub fn random_unit_vector(n: usize, rng: &mut impl Rng) -> Vec<c64> {
    let mut v = random_vector(n, rng);
    let r = norm(&v);
    v.iter_mut().for_each(|z| *z /= r);
    v
}

/// Hermitian matrix `(G + G*) / 2` with standard complex Gaussian `G`.
pub fn random_hermitian(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(n, n, |_, _| gaussian(rng));
    g.hermitian_part().expect("square by construction")
}

/// Gram-Schmidt on Gaussian columns, which yields a Haar-distributed unitary.
pub fn haar_unitary(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let mut cols: Vec<Vec<c64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let v = random_vector(n, rng);
        if let Some(u) = orthonormalize_against(&v, &cols) {
            cols.push(u);
        }
    }
    ComplexMatrix::from_columns(n, &cols)
}

/// Removes the components of `v` along `basis` (twice, for stability) and
/// normalizes; `None` when nothing is left.
pub fn orthonormalize_against(v: &[c64], basis: &[Vec<c64>]) -> Option<Vec<c64>> {
    let mut w = v.to_vec();
    for _ in 0..2 {
        for b in basis {
            let c = inner(b, &w);
            for (x, y) in w.iter_mut().zip(b) {
                *x -= c * y;
            }
        }
    }
    let r = norm(&w);
    if r < 1e-10 * norm(v).max(1e-300) {
        return None;
    }
    w.iter_mut().for_each(|z| *z /= r);
    Some(w)
}

/// Haar-random projection of the given rank.
pub fn random_projection(n: usize, rank: usize, rng: &mut impl Rng) -> Projection {
    let w = haar_unitary(n, rng);
    let cols: Vec<Vec<c64>> = (0..rank.min(n)).map(|k| w.column(k)).collect();
    Projection::onto(n, &cols)
}

/// Random pair with uniformly drawn ranks in `0..=n`.
pub fn random_pair(n: usize, rng: &mut impl Rng) -> (Projection, Projection) {
    let r1 = rng.random_range(0..=n);
    let r2 = rng.random_range(0..=n);
    (random_projection(n, r1, rng), random_projection(n, r2, rng))
}

/// Pair `(P1, P2)` with `dim(ran P2 ∩ ker P1) = n_plus`,
/// `dim(ran P1 ∩ ker P2) = n_minus`, and a generic rotated part, all
/// conjugated by a Haar unitary.
///
/// `P1` is spanned by `common` rotated vectors plus `n_minus` planted ones;
/// `P2` by the rotated images plus `n_plus` planted ones.
pub fn planted_pair(
    n: usize,
    common: usize,
    n_plus: usize,
    n_minus: usize,
    rng: &mut impl Rng,
) -> Result<(Projection, Projection)> {
    if 2 * common + n_plus + n_minus > n {
        return Err(Error::InvalidArgument(format!(
            "need 2*{common} + {n_plus} + {n_minus} <= {n}"
        )));
    }
    let w = haar_unitary(n, rng);
    let e = |k: usize| w.column(k);
    let mut p1 = Vec::new();
    let mut p2 = Vec::new();
    for k in 0..common {
        // rotate within span(e_{2k}, e_{2k+1}) by an angle bounded away from pi/2
        let theta: f64 = rng.random_range(0.1..1.3);
        let (a, b) = (e(2 * k), e(2 * k + 1));
        p1.push(a.clone());
        p2.push(
            a.iter()
                .zip(&b)
                .map(|(x, y)| x * theta.cos() + y * theta.sin())
                .collect(),
        );
    }
    let mut next = 2 * common;
    for _ in 0..n_plus {
        p2.push(e(next));
        next += 1;
    }
    for _ in 0..n_minus {
        p1.push(e(next));
        next += 1;
    }
    Ok((Projection::onto(n, &p1), Projection::onto(n, &p2)))
}

/// Positions `-l..=l` of the truncated chain, indexed `0..2l+1`.
pub fn chain_sites(l: usize) -> Vec<i64> {
    (-(l as i64)..=l as i64).collect()
}

/// Truncated shift pair on `sites` sites (odd, at least 3): `P` projects
/// onto `x >= 1` and `P_R` onto `x >= 0`.
pub fn shift_pair(sites: usize) -> Result<(Projection, Projection)> {
    if sites < 3 || sites % 2 == 0 {
        return Err(Error::InvalidArgument(format!(
            "shift example needs an odd number of sites >= 3, got {sites}"
        )));
    }
    let xs = chain_sites(sites / 2);
    let p: Vec<bool> = xs.iter().map(|&x| x >= 1).collect();
    let pr: Vec<bool> = xs.iter().map(|&x| x >= 0).collect();
    Ok((Projection::coordinate(&p), Projection::coordinate(&pr)))
}

/// Index of site 0 in the truncated chain with `sites` sites.
pub fn shift_origin(sites: usize) -> usize {
    sites / 2
}

/// Dimer pair: `P` fills the top of each dimer and `Q = U* P U` with
/// `U` a block rotation by `theta_n = arcsin(n^-beta)`, `n = 1..=dimers`.
pub fn dimer_pair(beta: f64, dimers: usize) -> Result<(Projection, Projection)> {
    if !(beta > 0.0) || dimers == 0 {
        return Err(Error::InvalidArgument(format!(
            "dimer example needs beta > 0 and at least one dimer, got beta = {beta}, dimers = {dimers}"
        )));
    }
    let dim = 2 * dimers;
    let top: Vec<bool> = (0..dim).map(|i| i % 2 == 0).collect();
    let mut q = ComplexMatrix::zeros(dim, dim);
    for n in 1..=dimers {
        let s = (n as f64).powf(-beta);
        let c = (1.0 - s * s).max(0.0).sqrt();
        let i = 2 * (n - 1);
        // U* P U for the rotation [[c, s], [-s, c]] projects onto (c, s)
        q.set(i, i, c64::new(c * c, 0.0));
        q.set(i, i + 1, c64::new(c * s, 0.0));
        q.set(i + 1, i, c64::new(c * s, 0.0));
        q.set(i + 1, i + 1, c64::new(s * s, 0.0));
    }
    Ok((Projection::coordinate(&top), Projection::trusted(q)))
}

/// `n^-beta` for `n = 1..=dimers`.
pub fn dimer_singular_values(beta: f64, dimers: usize) -> Vec<f64> {
    (1..=dimers).map(|n| (n as f64).powf(-beta)).collect()
}
