use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use surprise_core::electorate::Electorate;
use surprise_core::harness::config::Config;
use surprise_core::harness::output::emit_csv;
use surprise_core::harness::{
    run_sweep, run_trial, trial_seed, NetSettings, PointParams, Population, RegimeKind,
};
use surprise_core::ingest::{apply_mapping, load_regions, sample_voters, A1Column};
use surprise_core::netgen::Backend;
use surprise_core::theory::{classify_regime, RegimeParams, TheoryVerdict};

#[derive(Parser)]
#[command(name = "surprise-sim", version, about = "Election surprise simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single trial, from a config file or from flags.
    Simulate {
        #[arg(long, conflicts_with_all = ["n1", "n2", "p", "q"])]
        config: Option<PathBuf>,
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, value_enum, default_value = "auto")]
        backend: BackendArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the full grid of a config file and write CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads (default: SURPRISE_SIM_THREADS or all cores).
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Print the asymptotic verdict for a parameter point.
    Theory {
        #[command(flatten)]
        point: PointArgs,
    },
    /// Validate regional data files and optionally draw a sample.
    IngestCheck {
        #[arg(long)]
        votes: PathBuf,
        #[arg(long)]
        coords: PathBuf,
        #[arg(long)]
        sample_size: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "votes-a1")]
        a1_column: A1Arg,
    },
}

#[derive(Args)]
struct PointArgs {
    #[arg(long)]
    n1: Option<usize>,
    #[arg(long)]
    n2: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long, value_enum, default_value = "influential")]
    regime: RegimeArg,
    #[arg(long, default_value_t = 0.0)]
    c: f64,
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    delta: f64,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum RegimeArg {
    Influential,
    Uninfluential,
    Absent,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum BackendArg {
    Auto,
    Homogeneous,
    Edgewise,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum A1Arg {
    VotesA1,
    VotesA2,
}

impl PointArgs {
    fn resolve(&self) -> Result<(Electorate, PointParams)> {
        let (Some(n1), Some(n2), Some(p), Some(q)) = (self.n1, self.n2, self.p, self.q) else {
            bail!("--n1, --n2, --p and --q are required");
        };
        let regime = match self.regime {
            RegimeArg::Influential => RegimeKind::Influential,
            RegimeArg::Uninfluential => RegimeKind::Uninfluential,
            RegimeArg::Absent => RegimeKind::Absent,
        };
        let params = PointParams {
            p,
            q,
            delta: self.delta,
            c: self.c,
            a: self.a,
            gamma: self.gamma,
            regime,
        };
        Ok((Electorate::new(n1, n2)?, params))
    }
}

fn print_verdict(v: &TheoryVerdict) {
    let range = v
        .all_unsurprised_range
        .map_or("none".to_string(), |(lo, hi)| format!("({lo:.6}, {hi:.6})"));
    let rows = [
        ("majority threshold", format!("{:.6}", v.majority_threshold)),
        ("minority threshold", format!("{:.6}", v.minority_threshold)),
        ("majority prediction", v.majority_prediction.to_string()),
        ("minority prediction", v.minority_prediction.to_string()),
        ("all-unsurprised p range", range),
        ("E[X] majority", format!("{:.4}", v.exact_expectation_majority)),
        ("E[X] minority", format!("{:.4}", v.exact_expectation_minority)),
        ("deviation scale", format!("{:.4}", v.deviation_scale)),
        ("per-voter bound", format!("{:.6e}", v.per_voter_bound)),
        ("union bound majority", format!("{:.6}", v.union_bound_majority)),
        ("union bound minority", format!("{:.6}", v.union_bound_minority)),
        ("union bound minority (class size)", format!("{:.6}", v.union_bound_minority_class_size)),
        ("all-unsurprised bound", format!("{:.6}", v.all_unsurprised_bound)),
    ];
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    for (k, val) in &rows {
        println!("{k:<width$}  {val}");
    }
    println!();
    println!(
        "majority_threshold,minority_threshold,majority_prediction,minority_prediction,\
         exact_expectation_majority,exact_expectation_minority,deviation_scale"
    );
    println!(
        "{},{},{},{},{},{},{}",
        v.majority_threshold,
        v.minority_threshold,
        v.majority_prediction,
        v.minority_prediction,
        v.exact_expectation_majority,
        v.exact_expectation_minority,
        v.deviation_scale
    );
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate {
            config,
            point,
            backend,
            seed,
        } => {
            let (population, params, net, master) = match config {
                Some(path) => {
                    let cfg = Config::load(&path).with_context(|| format!("loading {}", path.display()))?;
                    (cfg.population()?, cfg.base_params(), cfg.net_settings(), cfg.sweep.seed)
                }
                None => {
                    let (e, params) = point.resolve()?;
                    let backend = match backend {
                        BackendArg::Auto => Backend::Auto,
                        BackendArg::Homogeneous => Backend::Homogeneous,
                        BackendArg::Edgewise => Backend::Edgewise,
                    };
                    let net = NetSettings {
                        backend,
                        ..Default::default()
                    };
                    (Population::synthetic(e), params, net, seed)
                }
            };
            let f = run_trial(&population, &params, &net, trial_seed(params.seed(master), 0))?;
            println!("point: {params}");
            println!("maj_frac,min_frac");
            println!("{:.6},{:.6}", f.majority, f.minority);
        }
        Command::Sweep { config, out, workers } => {
            let cfg = Config::load(&config).with_context(|| format!("loading {}", config.display()))?;
            let spec = cfg.sweep_spec()?;
            let result = run_sweep(&spec, workers)?;
            emit_csv(&result, &out)?;
            eprintln!("wrote {} rows to {}", result.rows.len(), out.display());
        }
        Command::Theory { point } => {
            let (e, params) = point.resolve()?;
            params.media().validate(e.margin().value())?;
            print_verdict(&classify_regime(&RegimeParams::for_electorate(&e, params.p, params.q, params.media())));
        }
        Command::IngestCheck {
            votes,
            coords,
            sample_size,
            seed,
            a1_column,
        } => {
            let mapping = match a1_column {
                A1Arg::VotesA1 => A1Column::VotesA1,
                A1Arg::VotesA2 => A1Column::VotesA2,
            };
            let records = apply_mapping(load_regions(&votes, &coords)?, mapping);
            let a1: u64 = records.iter().map(|r| r.votes_a1).sum();
            let total: u64 = records.iter().map(|r| r.total()).sum();
            println!("regions: {}", records.len());
            println!("votes: {total} (a1 share {:.4})", a1 as f64 / total as f64);
            if let Some(k) = sample_size {
                let s = sample_voters(&records, k, seed)?;
                let e = &s.electorate;
                println!(
                    "sample: n={} n1={} n2={} margin={:.4} winner={}",
                    e.n(),
                    e.n1(),
                    e.n2(),
                    e.margin().value(),
                    e.winner()
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
