use fluxindex::fock::{factorized_stacked_intertwiner, stacked_index, ModeSpace};
use fluxindex::lattice::adiabatic::quasi_adiabatic_evolve;
use fluxindex::lattice::{
    build_model, fermi_projection, probe_region, run_pipeline, spectral_flow, FluxSweep,
    LatticeModel, ModelPreset, Patch, PipelineOptions, SweepOptions,
};
use fluxindex::linalg::{eigvalsh, singular_values};
use fluxindex::pair_index::index_eig;

const MU: f64 = -1.366;

fn hofstadter(w: usize, alpha: f64) -> LatticeModel {
    build_model(
        ModelPreset::Hofstadter { alpha, hopping: 1.0 },
        Patch::centered(w, w).unwrap(),
    )
    .unwrap()
}

#[test]
fn reversing_the_sweep_negates_the_flow() {
    let m = hofstadter(18, 1.0 / 3.0);
    let region = probe_region(&m, 5);
    let opts = SweepOptions { cells: 24, ..Default::default() };
    let fwd = FluxSweep::run(&m, MU, opts.clone()).unwrap();
    let rev = FluxSweep::run(&m, MU, SweepOptions { reversed: true, ..opts }).unwrap();
    let a = spectral_flow(&m, &fwd, &region).unwrap();
    let b = spectral_flow(&m, &rev, &region).unwrap();
    assert_eq!(a.local_flow.abs(), 1);
    assert_eq!(a.local_flow, -b.local_flow);
    assert_eq!(a.net_flow, -b.net_flow);
    assert_eq!(a.crossings.len(), b.crossings.len());
}

#[test]
fn flow_is_stable_under_grid_refinement() {
    let m = hofstadter(18, 1.0 / 3.0);
    let region = probe_region(&m, 5);
    let flows: Vec<_> = [12, 24, 48]
        .iter()
        .map(|&cells| {
            let s = FluxSweep::run(&m, MU, SweepOptions { cells, ..Default::default() }).unwrap();
            let f = spectral_flow(&m, &s, &region).unwrap();
            (f.net_flow, f.local_flow, f.crossings.len())
        })
        .collect();
    assert!(flows.windows(2).all(|w| w[0] == w[1]), "{flows:?}");
}

#[test]
fn opposite_flux_reverses_every_sign() {
    let mut signs = Vec::new();
    for alpha in [1.0 / 3.0, -1.0 / 3.0] {
        let m = hofstadter(18, alpha);
        let mut opts = PipelineOptions::new(MU);
        opts.probe_radius = 5;
        opts.sweep.cells = 24;
        opts.chern_bands = Some(fluxindex::lattice::BandSelector::Lowest { count: 1 });
        let (r, _) = run_pipeline(&m, &opts).unwrap();
        assert!(r.is_consistent(0.1), "{r:?}");
        signs.push((r.local_flow, r.local_index, r.chern.unwrap()));
    }
    assert_eq!(signs[0].0, -signs[1].0);
    assert_eq!(signs[0].2, -signs[1].2);
}

#[test]
fn atomic_pipeline_is_trivial() {
    let m = build_model(ModelPreset::Atomic { energy: 1.0 }, Patch::centered(8, 8).unwrap()).unwrap();
    let mut opts = PipelineOptions::new(0.0);
    opts.sweep.cells = 8;
    opts.chern_bands = Some(fluxindex::lattice::BandSelector::Lowest { count: 2 });
    let (r, _) = run_pipeline(&m, &opts).unwrap();
    assert!(r.crossings.is_empty());
    assert_eq!((r.net_flow, r.local_flow, r.index_eig, r.local_index), (0, 0, 0, 0));
    assert_eq!(r.chern, Some(0));
    assert!(r.charge_deficiency.abs() < 1e-12 && r.local_deficiency.abs() < 1e-12);
}

#[test]
fn transported_difference_has_decaying_singular_values() {
    let m = hofstadter(18, 1.0 / 3.0);
    let region = probe_region(&m, 5);
    let run = quasi_adiabatic_evolve(&m, MU, &region, &Default::default()).unwrap();
    let d = run.transported.matrix() - run.fermi.matrix();
    let s = singular_values(&d).unwrap();
    // least-squares slope of log s_k over the first 24 singular values
    let pts: Vec<(f64, f64)> = s
        .iter()
        .take(24)
        .enumerate()
        .filter(|(_, &v)| v > 1e-14)
        .map(|(k, &v)| (k as f64, v.ln()))
        .collect();
    let n = pts.len() as f64;
    let (mx, my) = (
        pts.iter().map(|p| p.0).sum::<f64>() / n,
        pts.iter().map(|p| p.1).sum::<f64>() / n,
    );
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!(-slope > 0.05, "fitted decay rate {}", -slope);
}

#[test]
fn stacked_index_of_a_flux_pair_on_a_small_patch() {
    let m = hofstadter(3, 1.0 / 3.0);
    let mut e = eigvalsh(&m.hamiltonian).unwrap();
    e.sort_by(f64::total_cmp);
    let (k, _) = e
        .windows(2)
        .enumerate()
        .max_by(|a, b| (a.1[1] - a.1[0]).total_cmp(&(b.1[1] - b.1[0])))
        .unwrap();
    let mu = 0.5 * (e[k] + e[k + 1]);
    let p = fermi_projection(&m.hamiltonian, mu).unwrap();
    let run = quasi_adiabatic_evolve(&m, mu, &vec![true; m.dim()], &Default::default()).unwrap();
    let modes = ModeSpace::from_sites(&m.patch.sites().collect::<Vec<_>>(), 1)
        .unwrap()
        .stacked()
        .unwrap();
    let u = factorized_stacked_intertwiner(&p, &run.transported).unwrap();
    let value = stacked_index(&p, &u, &modes).unwrap();
    let expected = index_eig(&p, &run.transported).unwrap();
    assert!((value - expected as f64).abs() < 1e-7, "{value} vs {expected}");
}
