mod commands;
mod config;
mod error;
mod matfile;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::Outcome;
use crate::config::RunConfig;
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "fluxindex", version, about = "Index of pairs of projections, many-body charge transport and flux insertion")]
struct Cli {
    /// TOML run configuration; flags given here take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Seed for random examples, recorded in every summary.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Tolerance of the identity checked by the command.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Directory for the JSON summary and any CSV traces.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Print the JSON summary on stdout instead of the table.
    #[arg(long, global = true)]
    json: bool,

    /// Worker threads for parallel sections.
    #[arg(long, global = true, env = "FLUXINDEX_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Index of a pair of projections by three independent formulas.
    IndexPair(IndexPairArgs),
    /// Single-particle index against the many-body index of the quasi-free states.
    Correspondence(CorrespondenceArgs),
    /// Flux insertion sweep: spectral flow, transported charge and Chern number.
    FluxSweep(FluxSweepArgs),
    /// Chern number of a band selection of the periodic model.
    Chern(ChernArgs),
    /// Index through the doubled Fock space.
    StackedIndex(StackedArgs),
}

#[derive(Debug, Args)]
struct IndexPairArgs {
    /// shift, dimer, random or files.
    #[arg(long)]
    example: Option<String>,
    #[arg(long)]
    sites: Option<usize>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    dimers: Option<usize>,
    /// Projection P as a .mat file; implies `--example files`.
    #[arg(long, requires = "q")]
    p: Option<PathBuf>,
    #[arg(long, requires = "p")]
    q: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CorrespondenceArgs {
    /// shift, random or equal.
    #[arg(long)]
    example: Option<String>,
    #[arg(long)]
    modes: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// hofstadter, atomic or custom.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long)]
    width: Option<usize>,
    #[arg(long)]
    height: Option<usize>,
}

#[derive(Debug, Args)]
struct FluxSweepArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<f64>,
    #[arg(long)]
    cells: Option<usize>,
    #[arg(long)]
    max_bisections: Option<usize>,
    #[arg(long)]
    probe_radius: Option<i64>,
    /// Lowest bands for the Chern cross-check; 0 skips it.
    #[arg(long)]
    chern_bands: Option<usize>,
}

#[derive(Debug, Args)]
struct ChernArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    start: Option<usize>,
    #[arg(long)]
    end: Option<usize>,
    #[arg(long)]
    grid: Option<usize>,
}

#[derive(Debug, Args)]
struct StackedArgs {
    /// flux or planted.
    #[arg(long)]
    example: Option<String>,
    #[arg(long)]
    preset: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<f64>,
    #[arg(long)]
    width: Option<usize>,
    #[arg(long)]
    height: Option<usize>,
    #[arg(long)]
    modes: Option<usize>,
    #[arg(long)]
    n_plus: Option<usize>,
    #[arg(long)]
    n_minus: Option<usize>,
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

impl ModelArgs {
    fn apply(self, cfg: &mut RunConfig) {
        set(&mut cfg.model.preset, self.preset);
        set(&mut cfg.model.alpha, self.alpha);
        set(&mut cfg.model.width, self.width);
        set(&mut cfg.model.height, self.height);
    }
}

fn run(cli: Cli) -> Result<(Outcome, Option<PathBuf>, bool), CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(CliError::Config("thread count must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot start thread pool: {e}")))?;
    }
    fluxindex::linalg::use_sequential_kernels();
    let seed = cli.seed.or(cfg.seed).unwrap_or(0);
    let tol = cli.tol.or(cfg.tol);
    let out = cli.out.or(cfg.out.take());

    let outcome = match cli.command {
        Command::IndexPair(a) => {
            let c = &mut cfg.index_pair;
            if a.p.is_some() {
                c.example = "files".into();
            }
            set(&mut c.example, a.example);
            set(&mut c.sites, a.sites);
            set(&mut c.dim, a.dim);
            set(&mut c.beta, a.beta);
            set(&mut c.dimers, a.dimers);
            c.p = a.p.or(c.p.take());
            c.q = a.q.or(c.q.take());
            commands::index_pair(c, seed, tol)?
        }
        Command::Correspondence(a) => {
            let c = &mut cfg.correspondence;
            set(&mut c.example, a.example);
            set(&mut c.modes, a.modes);
            set(&mut c.trials, a.trials);
            commands::correspondence(c, seed, tol)?
        }
        Command::FluxSweep(a) => {
            a.model.apply(&mut cfg);
            let c = &mut cfg.flux_sweep;
            set(&mut c.mu, a.mu);
            set(&mut c.cells, a.cells);
            set(&mut c.max_bisections, a.max_bisections);
            set(&mut c.probe_radius, a.probe_radius);
            set(&mut c.chern_bands, a.chern_bands);
            commands::flux_sweep(&cfg.model, &cfg.flux_sweep, seed, tol)?
        }
        Command::Chern(a) => {
            a.model.apply(&mut cfg);
            let c = &mut cfg.chern;
            set(&mut c.start, a.start);
            set(&mut c.end, a.end);
            set(&mut c.grid, a.grid);
            commands::chern(&cfg.model, &cfg.chern, seed, tol)?
        }
        Command::StackedIndex(a) => {
            set(&mut cfg.model.preset, a.preset);
            set(&mut cfg.model.alpha, a.alpha);
            let c = &mut cfg.stacked_index;
            set(&mut c.example, a.example);
            c.mu = a.mu.or(c.mu);
            set(&mut c.width, a.width);
            set(&mut c.height, a.height);
            set(&mut c.modes, a.modes);
            set(&mut c.n_plus, a.n_plus);
            set(&mut c.n_minus, a.n_minus);
            commands::stacked(&cfg.model, &cfg.stacked_index, seed, tol)?
        }
    };
    Ok((outcome, out, cli.json))
}

fn emit(outcome: &Outcome, out: Option<&PathBuf>, json: bool) -> Result<(), CliError> {
    let bytes = output::json_bytes(&outcome.summary)?;
    if let Some(dir) = out {
        let name = format!("{}.json", outcome.summary.command.replace('-', "_"));
        output::write_atomic(&dir.join(name), &bytes)?;
        for (name, data) in &outcome.files {
            output::write_atomic(&dir.join(name), data)?;
        }
    }
    if json {
        print!("{}", String::from_utf8_lossy(&bytes));
    } else {
        let mut rows = outcome.table.clone();
        rows.push(("seed".into(), outcome.summary.seed.to_string()));
        rows.push((
            "status".into(),
            if outcome.summary.passed { "PASS".into() } else { "FAIL".into() },
        ));
        print!("{}", output::table(&rows));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(cli).and_then(|(outcome, out, json)| {
        emit(&outcome, out.as_ref(), json)?;
        match outcome.failure {
            Some(msg) => Err(CliError::Assertion(msg)),
            None => Ok(()),
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
