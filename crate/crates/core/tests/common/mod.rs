#![allow(dead_code)]

use fluxindex::fock::{
    many_body_index, quasi_free_state, vector, ChargeOperator, Intertwiner, ModeSpace,
};
use fluxindex::linalg::{expm_antihermitian, inner, ComplexMatrix};
use fluxindex::samples::{random_hermitian, SampleRng};
use fluxindex::{c64, Projection};

/// Determinant formula for a quasi-free state:
/// `omega(a*(f_1) ... a*(f_n) a(g_n) ... a(g_1)) = det <g_i, P f_j>`.
pub fn wick_oracle(p: &Projection, fs: &[Vec<c64>], gs: &[Vec<c64>]) -> c64 {
    if fs.len() != gs.len() {
        return c64::new(0.0, 0.0);
    }
    if fs.is_empty() {
        return c64::new(1.0, 0.0);
    }
    let n = fs.len();
    let pf: Vec<Vec<c64>> = fs.iter().map(|f| p.matrix().matvec(f)).collect();
    let mut m: Vec<Vec<c64>> = (0..n)
        .map(|i| (0..n).map(|j| inner(&gs[i], &pf[j])).collect())
        .collect();
    determinant(&mut m)
}

/// Gaussian elimination with partial pivoting.
pub fn determinant(m: &mut [Vec<c64>]) -> c64 {
    let n = m.len();
    let mut det = c64::new(1.0, 0.0);
    for c in 0..n {
        let pivot = (c..n)
            .max_by(|&a, &b| m[a][c].norm().total_cmp(&m[b][c].norm()))
            .unwrap();
        if m[pivot][c].norm() == 0.0 {
            return c64::new(0.0, 0.0);
        }
        if pivot != c {
            m.swap(pivot, c);
            det = -det;
        }
        det *= m[c][c];
        for r in c + 1..n {
            let factor = m[r][c] / m[c][c];
            for k in c..n {
                let sub = factor * m[c][k];
                m[r][k] -= sub;
            }
        }
    }
    det
}

/// The same monomial evaluated on a Fock vector:
/// `<a(f_n) ... a(f_1) Omega, a(g_n) ... a(g_1) Omega>`.
pub fn vector_monomial(omega: &[c64], fs: &[Vec<c64>], gs: &[Vec<c64>]) -> c64 {
    let left = fs.iter().fold(omega.to_vec(), |v, f| vector::annihilate_f(f, &v));
    let right = gs.iter().fold(omega.to_vec(), |v, g| vector::annihilate_f(g, &v));
    inner(&left, &right)
}

/// Largest deviation of `omega(u* a*_m a_n u)` from `<e_n, P e_m>` over all
/// mode pairs, with `u` applied to the vector of `omega`.
pub fn two_point_mismatch(transported: &[c64], p: &Projection) -> f64 {
    let n = p.dim();
    let mut worst: f64 = 0.0;
    for m in 0..n {
        let am = vector::annihilate(m, transported);
        for k in 0..n {
            let ak = vector::annihilate(k, transported);
            let value = inner(&am, &ak);
            worst = worst.max((value - p.matrix().get(k, m)).norm());
        }
    }
    worst
}

pub fn close_to_integer(x: f64, tol: f64) -> bool {
    (x - x.round()).abs() <= tol
}

/// Many-body index of the quasi-free pair through the matrix-free intertwiner.
pub fn index_between(p1: &Projection, p2: &Projection, modes: &ModeSpace) -> f64 {
    let s1 = quasi_free_state(p1, modes).unwrap();
    let u = Intertwiner::new(p1, p2).unwrap().map().unwrap();
    many_body_index(s1.vector(), &u, &ChargeOperator::full(modes.n_modes())).unwrap()
}

/// Unitary commuting with `p`: `exp(i (P A P + P⊥ B P⊥))`.
pub fn stabilizer(p: &Projection, rng: &mut SampleRng) -> ComplexMatrix {
    let n = p.dim();
    let (pm, pc) = (p.matrix(), p.complement().into_matrix());
    let a = random_hermitian(n, rng);
    let b = random_hermitian(n, rng);
    let h = &(&(pm * &a) * pm) + &(&(&pc * &b) * &pc);
    expm_antihermitian(&h.hermitian_part().unwrap(), 1.0).unwrap()
}
