use fluxindex::fock::{build_car, delta_rho, gamma, ChargeOperator, FockMap, GivensGamma, ModeSpace};
use fluxindex::linalg::{schatten_norm, ComplexMatrix, SchattenOrder};
use fluxindex::samples::{haar_unitary, seeded_rng};

const MODES: usize = 6;
const TOL: f64 = 1e-9;

#[test]
fn gamma_properties_on_random_unitaries() {
    let car = build_car(&ModeSpace::chain(MODES).unwrap()).unwrap();
    let q = ChargeOperator::full(MODES);
    let mut rng = seeded_rng(5);
    for trial in 0..20 {
        let v = haar_unitary(MODES, &mut rng);
        let w = haar_unitary(MODES, &mut rng);
        let g = gamma(&v, &car).unwrap();
        for k in 0..MODES {
            let e: Vec<_> = (0..MODES)
                .map(|i| fluxindex::c64::new((i == k) as u8 as f64, 0.0))
                .collect();
            let lhs = &(&g * car.a_dag(k)) * &g.adjoint();
            let rhs = car.creator_of(&v.matvec(&e)).unwrap();
            assert!(lhs.distance(&rhs).unwrap() < TOL, "trial {trial} mode {k}");
        }
        let product = &g * &gamma(&w, &car).unwrap();
        let joint = gamma(&(&v * &w), &car).unwrap();
        assert!(product.distance(&joint).unwrap() < TOL, "trial {trial}");
        assert!(delta_rho(&g, &q).unwrap().operator_norm().unwrap() < TOL);
        let bound = schatten_norm(&(&v - &ComplexMatrix::identity(MODES)), SchattenOrder::Finite(1.0))
            .unwrap()
            .exp();
        assert!(g.operator_norm().unwrap() <= bound + TOL);
        assert!(g.unitarity_residual().unwrap() < TOL);
    }
}

#[test]
fn givens_factorization_matches_dense_series() {
    let car = build_car(&ModeSpace::chain(MODES).unwrap()).unwrap();
    let mut rng = seeded_rng(6);
    for _ in 0..5 {
        let v = haar_unitary(MODES, &mut rng);
        let dense = gamma(&v, &car).unwrap();
        let map = GivensGamma::new(&v).unwrap();
        for s in 0..1 << MODES {
            let mut e = vec![fluxindex::c64::new(0.0, 0.0); 1 << MODES];
            e[s] = fluxindex::c64::new(1.0, 0.0);
            let a = dense.apply(&e);
            let b = map.apply(&e);
            let c = map.apply_adjoint(&e);
            let d = dense.adjoint().apply(&e);
            let err = a.iter().zip(&b).chain(c.iter().zip(&d)).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
            assert!(err < 1e-10);
        }
    }
}

#[test]
fn non_unitary_input_is_rejected() {
    let car = build_car(&ModeSpace::chain(3).unwrap()).unwrap();
    let v = ComplexMatrix::from_real_diagonal(&[1.0, 2.0, 1.0]);
    assert!(matches!(gamma(&v, &car), Err(fluxindex::Error::NotUnitary { .. })));
    assert!(matches!(GivensGamma::new(&v), Err(fluxindex::Error::NotUnitary { .. })));
}
