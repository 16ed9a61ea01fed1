use std::collections::BTreeMap;

use fluxindex::fock::{
    factorized_stacked_intertwiner, many_body_index, quasi_free_state, stacked_index,
    ChargeOperator, Intertwiner, ModeSpace,
};
use fluxindex::lattice::adiabatic::quasi_adiabatic_evolve;
use fluxindex::lattice::{
    build_model, chern_number_of, fermi_projection, run_pipeline, BandSelector, EvolveOptions,
    LatticeModel, Patch, PipelineOptions, SweepOptions,
};
use fluxindex::linalg::{eigvalsh, singular_values};
use fluxindex::pair_index::{index_eig, index_report};
use fluxindex::samples::{dimer_pair, planted_pair, random_pair, seeded_rng, shift_pair};
use fluxindex::Projection;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{
    ChernConfig, CorrespondenceConfig, FluxSweepConfig, IndexPairConfig, ModelConfig,
    StackedIndexConfig, SCHEMA_VERSION,
};
use crate::error::CliError;
use crate::matfile::{read_projection, PROJECTION_TOL};
use crate::output::{csv_bytes, TraceRow};

pub const INDEX_PAIR_TOL: f64 = 1e-8;
pub const CORRESPONDENCE_TOL: f64 = 1e-7;
pub const CHERN_TOL: f64 = 1e-6;
pub const STACKED_TOL: f64 = 1e-7;

/// Machine-readable result of one command.
#[derive(Debug, Serialize)]
pub struct Summary {
    pub schema_version: u32,
    pub command: &'static str,
    pub seed: u64,
    pub tolerances: BTreeMap<&'static str, f64>,
    pub passed: bool,
    pub result: Value,
}

pub struct Outcome {
    pub summary: Summary,
    pub table: Vec<(String, String)>,
    /// Extra files for the output directory, by file name.
    pub files: Vec<(String, Vec<u8>)>,
    pub failure: Option<String>,
}

impl Outcome {
    fn new(
        command: &'static str,
        seed: u64,
        tolerances: BTreeMap<&'static str, f64>,
        result: Value,
        failure: Option<String>,
    ) -> Self {
        Self {
            summary: Summary {
                schema_version: SCHEMA_VERSION,
                command,
                seed,
                tolerances,
                passed: failure.is_none(),
                result,
            },
            table: Vec::new(),
            files: Vec::new(),
            failure,
        }
    }

    fn row(mut self, key: &str, value: impl ToString) -> Self {
        self.table.push((key.to_string(), value.to_string()));
        self
    }
}

fn positive(name: &str, value: f64) -> Result<f64, CliError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(CliError::Config(format!("{name} must be positive, got {value}")))
    }
}

fn unknown(kind: &str, value: &str, allowed: &str) -> CliError {
    CliError::Config(format!("unknown {kind} {value:?}; expected {allowed}"))
}

pub fn index_pair(cfg: &IndexPairConfig, seed: u64, tol: Option<f64>) -> Result<Outcome, CliError> {
    let tol = positive("tol", tol.unwrap_or(INDEX_PAIR_TOL))?;
    let mut params = json!({ "example": cfg.example });
    let (p, q) = match cfg.example.as_str() {
        "shift" => {
            params["sites"] = json!(cfg.sites);
            shift_pair(cfg.sites)?
        }
        "dimer" => {
            params["beta"] = json!(cfg.beta);
            params["dimers"] = json!(cfg.dimers);
            dimer_pair(cfg.beta, cfg.dimers)?
        }
        "random" => {
            params["dim"] = json!(cfg.dim);
            if cfg.dim == 0 {
                return Err(CliError::Config("dim must be at least 1".into()));
            }
            random_pair(cfg.dim, &mut seeded_rng(seed))
        }
        "files" => {
            let (Some(pp), Some(qp)) = (&cfg.p, &cfg.q) else {
                return Err(CliError::Config("the files example needs both p and q".into()));
            };
            params["p"] = json!(pp.display().to_string());
            params["q"] = json!(qp.display().to_string());
            (read_projection(pp)?, read_projection(qp)?)
        }
        other => return Err(unknown("example", other, "shift, dimer, random or files")),
    };
    if p.dim() != q.dim() {
        return Err(CliError::Config(format!(
            "P is {0}x{0} but Q is {1}x{1}",
            p.dim(),
            q.dim()
        )));
    }
    let report = index_report(&p, &q, &[0, 1, 2])?;
    let mut result = json!({
        "input": params,
        "dim": p.dim(),
        "rank_p": p.rank(),
        "rank_q": q.rank(),
        "index_eig": report.value_eig,
        "trace_powers": report.value_trace_power.iter()
            .map(|(k, v)| json!({ "p": k, "exponent": 2 * k + 1, "value": v }))
            .collect::<Vec<_>>(),
        "arveson": report.value_arveson,
        "agreement_residual": report.agreement_residual,
    });
    if cfg.example == "dimer" {
        result["relative_tails"] = dimer_tails(&p, &q)?;
    }
    let failure = (!report.agrees(tol)).then(|| {
        format!(
            "formulas disagree by {:.3e} (tolerance {tol:.1e})",
            report.agreement_residual
        )
    });
    let mut tolerances = BTreeMap::from([("agreement", tol)]);
    if cfg.example == "files" {
        tolerances.insert("projection", PROJECTION_TOL);
    }
    let mut out = Outcome::new("index-pair", seed, tolerances, result, failure)
        .row("example", &cfg.example)
        .row("dimension", p.dim())
        .row("index (eigenvalue count)", report.value_eig);
    for (k, v) in &report.value_trace_power {
        out = out.row(&format!("tr (P - Q)^{}", 2 * k + 1), format!("{v:.12}"));
    }
    Ok(out
        .row("tr (P - Q) difference formula", format!("{:.12}", report.value_arveson))
        .row("agreement residual", format!("{:.3e}", report.agreement_residual)))
}

/// Relative size of the last term in the partial sums of `s^2` and `s^3`
/// over the singular values of `P - Q`, taken in decreasing order.
fn dimer_tails(p: &Projection, q: &Projection) -> Result<Value, CliError> {
    let mut s = singular_values(&(p.matrix() - q.matrix()))?;
    s.sort_by(|a, b| b.total_cmp(a));
    let tail = |power: i32| {
        let total: f64 = s.iter().map(|x| x.powi(power)).sum();
        // singular values come in equal pairs, so the last term is a pair
        let last: f64 = s.iter().rev().take(2).map(|x| x.powi(power)).sum();
        if total > 0.0 {
            last / total
        } else {
            0.0
        }
    };
    Ok(json!({ "squares": tail(2), "cubes": tail(3) }))
}

pub fn correspondence(
    cfg: &CorrespondenceConfig,
    seed: u64,
    tol: Option<f64>,
) -> Result<Outcome, CliError> {
    let tol = positive("tol", tol.unwrap_or(CORRESPONDENCE_TOL))?;
    let modes = ModeSpace::chain(cfg.modes)?;
    let mut rng = seeded_rng(seed);
    let pairs: Vec<(Projection, Projection)> = match cfg.example.as_str() {
        "shift" => vec![shift_pair(cfg.modes)?],
        "random" => (0..cfg.trials).map(|_| random_pair(cfg.modes, &mut rng)).collect(),
        "equal" => (0..cfg.trials)
            .map(|_| {
                let (p, _) = random_pair(cfg.modes, &mut rng);
                (p.clone(), p)
            })
            .collect(),
        other => return Err(unknown("example", other, "shift, random or equal")),
    };
    let q = ChargeOperator::full(cfg.modes);
    let mut trials = Vec::with_capacity(pairs.len());
    let mut worst: f64 = 0.0;
    let mut agreed = 0;
    for (p1, p2) in &pairs {
        let single = index_eig(p1, p2)?;
        let state = quasi_free_state(p1, &modes)?;
        let u = Intertwiner::new(p1, p2)?.map()?;
        let many = many_body_index(state.vector(), &u, &q)?;
        let residual = (many - single as f64).abs();
        worst = worst.max(residual);
        if residual < tol {
            agreed += 1;
        }
        trials.push(json!({
            "index_eig": single,
            "many_body": many,
            "residual": residual,
        }));
    }
    let n = pairs.len();
    let failure = (agreed != n).then(|| format!("{agreed}/{n} trials agree within {tol:.1e}"));
    let result = json!({
        "example": cfg.example,
        "modes": cfg.modes,
        "trials": trials,
        "agreed": agreed,
        "worst_residual": worst,
    });
    let mut out = Outcome::new(
        "correspondence",
        seed,
        BTreeMap::from([("equality", tol)]),
        result,
        failure,
    )
    .row("example", &cfg.example)
    .row("modes", cfg.modes)
    .row("agreeing trials", format!("{agreed}/{n}"))
    .row("worst residual", format!("{worst:.3e}"));
    if n == 1 {
        let t = &out.summary.result["trials"][0];
        let (a, b) = (t["index_eig"].clone(), t["many_body"].as_f64().unwrap_or(f64::NAN));
        out = out
            .row("index (eigenvalue count)", a)
            .row("many-body index", format!("{b:.12}"));
    }
    Ok(out)
}

fn model_from(cfg: &ModelConfig, patch: Patch) -> Result<LatticeModel, CliError> {
    Ok(build_model(cfg.preset()?, patch)?)
}

pub fn flux_sweep(
    model_cfg: &ModelConfig,
    cfg: &FluxSweepConfig,
    seed: u64,
    tol: Option<f64>,
) -> Result<Outcome, CliError> {
    let deficiency_tol = positive("deficiency_tol", tol.unwrap_or(cfg.deficiency_tol))?;
    let step_tol = positive("step_tol", cfg.step_tol)?;
    if cfg.cells == 0 {
        return Err(CliError::Config("cells must be at least 1".into()));
    }
    let model = model_from(model_cfg, model_cfg.patch()?)?;
    let mut opts = PipelineOptions::new(cfg.mu);
    opts.probe_radius = cfg.probe_radius;
    opts.sweep = SweepOptions {
        cells: cfg.cells,
        window: cfg.window,
        max_bisections: cfg.max_bisections,
        ..SweepOptions::default()
    };
    opts.evolve = EvolveOptions {
        initial_steps: cfg.initial_steps,
        max_halvings: cfg.max_halvings,
        tol: step_tol,
    };
    opts.chern_bands = (cfg.chern_bands > 0).then_some(BandSelector::Lowest {
        count: cfg.chern_bands,
    });
    let (r, sweep) = run_pipeline(&model, &opts)?;

    let mut rows = Vec::new();
    for point in &sweep.points {
        let end = point.window_start + point.window_vectors.len();
        for branch in point.window_start..end {
            rows.push(TraceRow {
                phi: point.phi,
                branch,
                eigenvalue: point.eigenvalues[branch],
            });
        }
    }
    let xs: Vec<i64> = model.patch.sites().map(|s| s.0).collect();
    let ys: Vec<i64> = model.patch.sites().map(|s| s.1).collect();
    let range = |v: &[i64]| [*v.iter().min().unwrap_or(&0), *v.iter().max().unwrap_or(&0)];
    let (xr, yr) = (range(&xs), range(&ys));
    // the flux sits at the origin; an even side length puts it half a site off centre
    let offset = [
        0.5 * (xr[0] + xr[1]) as f64,
        0.5 * (yr[0] + yr[1]) as f64,
    ];

    let failure = (!r.is_consistent(deficiency_tol)).then(|| {
        format!(
            "inconsistent invariants: local flow {}, local deficiency {:.6}, local index {}, chern {:?}",
            r.local_flow, r.local_deficiency, r.local_index, r.chern
        )
    });
    let result = json!({
        "model": model.preset,
        "patch": { "x": xr, "y": yr, "centre_offset": offset },
        "mu": cfg.mu,
        "probe_radius": cfg.probe_radius,
        "sweep": {
            "cells": cfg.cells,
            "window": cfg.window,
            "max_bisections": cfg.max_bisections,
            "evaluations": r.evaluations,
        },
        "crossings": r.crossings,
        "net_flow": r.net_flow,
        "local_flow": r.local_flow,
        "charge_deficiency": r.charge_deficiency,
        "local_deficiency": r.local_deficiency,
        "local_deficiency_residual": (r.local_deficiency - r.local_flow as f64).abs(),
        "index_eig": r.index_eig,
        "local_index": r.local_index,
        "local_index_weight": r.local_index_weight,
        "chern": r.chern,
        "evolution": {
            "steps": r.steps,
            "last_step_change": r.step_delta,
            "unitarity_residual": r.unitarity_residual,
        },
    });
    let tolerances = BTreeMap::from([("deficiency", deficiency_tol), ("step", step_tol)]);
    let mut out = Outcome::new("flux-sweep", seed, tolerances, result, failure)
        .row("preset", &model_cfg.preset)
        .row("patch", format!("{} x {}", model.patch.width(), model.patch.height()))
        .row("mu", cfg.mu)
        .row("crossings", r.crossings.len())
        .row("net flow (whole patch)", r.net_flow)
        .row("local flow", r.local_flow)
        .row("charge deficiency (whole patch)", format!("{:.3e}", r.charge_deficiency))
        .row("local deficiency", format!("{:.6}", r.local_deficiency))
        .row("index (whole patch)", r.index_eig)
        .row("local index", format!("{} (weight {:.6})", r.local_index, r.local_index_weight))
        .row("chern", r.chern.map_or("skipped".into(), |c| c.to_string()))
        .row("evolution steps", format!("{} (last change {:.1e})", r.steps, r.step_delta))
        .row("unitarity residual", format!("{:.1e}", r.unitarity_residual));
    out.files.push(("flux_sweep_spectrum.csv".into(), csv_bytes(&rows)?));
    Ok(out)
}

pub fn chern(model_cfg: &ModelConfig, cfg: &ChernConfig, seed: u64, tol: Option<f64>) -> Result<Outcome, CliError> {
    let tol = positive("tol", tol.unwrap_or(CHERN_TOL))?;
    if cfg.end <= cfg.start {
        return Err(CliError::Config(format!(
            "empty band range {}..{}",
            cfg.start, cfg.end
        )));
    }
    let preset = model_cfg.preset()?;
    let r = chern_number_of(&preset, cfg.selector(), cfg.grid, cfg.max_doublings)?;
    let residual = (r.raw - r.chern as f64).abs();
    let failure = (residual >= tol)
        .then(|| format!("plaquette sum {:.9} is {residual:.2e} from an integer", r.raw));
    let result = json!({
        "model": preset,
        "bands": [cfg.start, cfg.end],
        "chern": r.chern,
        "raw": r.raw,
        "integer_residual": residual,
        "grids": r.grids,
        "min_gap": r.min_gap,
    });
    Ok(Outcome::new("chern", seed, BTreeMap::from([("integrality", tol)]), result, failure)
        .row("preset", &model_cfg.preset)
        .row("bands", format!("{}..{}", cfg.start, cfg.end))
        .row("chern number", r.chern)
        .row("plaquette sum", format!("{:.12}", r.raw))
        .row("k-grids", format!("{:?}", r.grids))
        .row("smallest gap", format!("{:.6}", r.min_gap)))
}

pub fn stacked(
    model_cfg: &ModelConfig,
    cfg: &StackedIndexConfig,
    seed: u64,
    tol: Option<f64>,
) -> Result<Outcome, CliError> {
    let tol = positive("tol", tol.unwrap_or(STACKED_TOL))?;
    let (p1, p2, modes, input) = match cfg.example.as_str() {
        "flux" => {
            let model = model_from(model_cfg, Patch::centered(cfg.width, cfg.height)?)?;
            let mu = match cfg.mu {
                Some(mu) => mu,
                None => largest_gap_midpoint(&model)?,
            };
            let p = fermi_projection(&model.hamiltonian, mu)?;
            let run = quasi_adiabatic_evolve(&model, mu, &vec![true; model.dim()], &EvolveOptions::default())?;
            let sites: Vec<_> = model.patch.sites().collect();
            let modes = ModeSpace::from_sites(&sites, model.preset.n_internal())?.stacked()?;
            let input = json!({
                "example": "flux",
                "model": model.preset,
                "patch": [cfg.width, cfg.height],
                "mu": mu,
            });
            (p, run.transported, modes, input)
        }
        "planted" => {
            let common = cfg.modes.saturating_sub(cfg.n_plus + cfg.n_minus) / 2;
            let (a, b) = planted_pair(cfg.modes, common, cfg.n_plus, cfg.n_minus, &mut seeded_rng(seed))?;
            let modes = ModeSpace::chain(cfg.modes)?.stacked()?;
            let input = json!({
                "example": "planted",
                "modes": cfg.modes,
                "n_plus": cfg.n_plus,
                "n_minus": cfg.n_minus,
            });
            (a, b, modes, input)
        }
        other => return Err(unknown("example", other, "flux or planted")),
    };
    let u = factorized_stacked_intertwiner(&p1, &p2)?;
    let value = stacked_index(&p1, &u, &modes)?;
    let expected = index_eig(&p1, &p2)?;
    let residual = (value - expected as f64).abs();
    let failure = (residual >= tol)
        .then(|| format!("stacked index {value:.9} differs from {expected} by {residual:.2e}"));
    let result = json!({
        "input": input,
        "stacked_modes": modes.n_modes(),
        "stacked_index": value,
        "index_eig": expected,
        "residual": residual,
    });
    Ok(Outcome::new("stacked-index", seed, BTreeMap::from([("equality", tol)]), result, failure)
        .row("example", &cfg.example)
        .row("stacked modes", modes.n_modes())
        .row("index (eigenvalue count)", expected)
        .row("stacked index", format!("{value:.12}"))
        .row("residual", format!("{residual:.3e}")))
}

fn largest_gap_midpoint(model: &LatticeModel) -> Result<f64, CliError> {
    let mut e = eigvalsh(&model.hamiltonian)?;
    e.sort_by(f64::total_cmp);
    let k = (0..e.len().saturating_sub(1))
        .max_by(|&a, &b| (e[a + 1] - e[a]).total_cmp(&(e[b + 1] - e[b])))
        .ok_or_else(|| CliError::Config("model has a single level".into()))?;
    Ok(0.5 * (e[k] + e[k + 1]))
}
