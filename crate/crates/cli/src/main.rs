use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use vqls_cli::commands::{self, circuits_table, estimate_table, write_table};
use vqls_cli::config::ShotsArg;
use vqls_cli::{CliError, Result, RunConfig};
use vqls_core::resources::ForecastConfig;

#[derive(Parser)]
#[command(
    name = "vqls",
    version,
    about = "Variational linear solves of the advection-diffusion system"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a seeded ensemble and write records, references and error summaries.
    Solve(SolveArgs),
    /// Per-iteration cost and solution CSV for one ensemble member.
    Trace(TraceArgs),
    /// Pauli decomposition of a matrix (default: the reduced system matrix).
    Decompose(DecomposeArgs),
    /// Circuit counts per cost evaluation against the number of Pauli terms.
    Circuits(CircuitsArgs),
    /// Vector dimension and qubit count for global forecast configurations.
    Estimate(EstimateArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// JSON run configuration; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "vqls-run")]
    out: PathBuf,
    /// Base seed; member i uses seed + i.
    #[arg(long)]
    seed: Option<u64>,
    /// Ensemble size.
    #[arg(long)]
    ensemble: Option<usize>,
    /// Shots per Pauli expectation, or `exact`.
    #[arg(long)]
    shots: Option<ShotsArg>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Skip the variational solve and write only reference fields.
    #[arg(long)]
    classical_only: bool,
}

#[derive(Args)]
struct TraceArgs {
    /// Output directory of a previous `solve`.
    #[arg(long)]
    run: PathBuf,
    #[arg(long, default_value_t = 0)]
    member: usize,
    /// Where to write the trace (default: the run directory).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DecomposeArgs {
    /// Matrix JSON: array of rows, entries numbers or {"re", "im"}.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Run configuration supplying the problem when no matrix is given.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Drop terms with |c| at or below this value.
    #[arg(long)]
    prune: Option<f64>,
    /// Directory for decomposition.json (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CircuitsArgs {
    #[arg(long, default_value_t = 3)]
    qubits: u64,
    #[arg(long, default_value_t = 30)]
    max_terms: u64,
    /// Directory for circuits.csv (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EstimateArgs {
    /// Forecast configuration JSON (default: 5 degrees, 10 days, 100 m/s, CFL 1).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Truncation order; required unless set in the config.
    #[arg(long)]
    tau: Option<u32>,
    /// Horizontal resolutions in degrees, comma separated.
    #[arg(long, value_delimiter = ',')]
    resolution: Vec<f64>,
    /// Directory for estimate.csv (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit_table(
    out: Option<&Path>,
    name: &str,
    header: &[String],
    rows: &[Vec<String>],
) -> Result<()> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| CliError::Io {
                path: dir.into(),
                source: e,
            })?;
            let path = dir.join(name);
            let file = std::fs::File::create(&path).map_err(|e| CliError::Io {
                path: path.clone(),
                source: e,
            })?;
            write_table(file, &path, header, rows)
        }
        None => write_table(
            std::io::stdout().lock(),
            Path::new("<stdout>"),
            header,
            rows,
        ),
    }
}

fn solve(args: SolveArgs) -> Result<()> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.base_seed = seed;
    }
    if let Some(n) = args.ensemble {
        cfg.ensemble_size = n;
    }
    if let Some(ShotsArg(mode)) = args.shots {
        cfg.mode = mode;
    }
    if let Some(w) = args.workers {
        cfg.workers = Some(w);
    }
    if let Some(m) = args.max_iter {
        cfg.spsa.max_iter = m;
    }
    cfg.classical_only |= args.classical_only;

    if let Some(s) = commands::cmd_solve(&cfg, &args.out)? {
        let pct: Vec<String> = s
            .ensemble_relative_error
            .iter()
            .map(|e| format!("{:.2}%", 100.0 * e))
            .collect();
        eprintln!(
            "{} members, {} converged; ensemble-mean relative RMSE per time: {}",
            s.ensemble_size,
            s.converged_members,
            pct.join(", ")
        );
    }
    Ok(())
}

fn decompose(args: DecomposeArgs) -> Result<()> {
    let cfg = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let d = commands::cmd_decompose(args.input.as_deref(), &cfg.problem, args.prune)?;
    let mut text = serde_json::to_string_pretty(&d).expect("plain data serializes");
    text.push('\n');
    match args.out {
        Some(dir) => {
            std::fs::create_dir_all(&dir).map_err(|e| CliError::Io {
                path: dir.clone(),
                source: e,
            })?;
            let path = dir.join("decomposition.json");
            std::fs::write(&path, text).map_err(|e| CliError::Io { path, source: e })
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn estimate(args: EstimateArgs) -> Result<()> {
    let cfg = match (&args.config, args.tau) {
        (Some(path), tau) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
                path: path.clone(),
                source: e,
            })?;
            let mut cfg: ForecastConfig =
                serde_json::from_str(&text).map_err(|e| CliError::Json {
                    path: path.clone(),
                    source: e,
                })?;
            if let Some(t) = tau {
                cfg.tau = t;
            }
            cfg
        }
        (None, Some(tau)) => ForecastConfig::ten_day_global(tau),
        (None, None) => {
            return Err(CliError::Config(
                "the truncation order is required: pass --tau or a config".into(),
            ))
        }
    };
    let rows = commands::cmd_estimate(&cfg, &args.resolution)?;
    let (header, body) = estimate_table(&rows);
    emit_table(args.out.as_deref(), "estimate.csv", &header, &body)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve(a) => solve(a),
        Command::Trace(a) => {
            let out = a.out.unwrap_or_else(|| a.run.clone());
            let path = commands::cmd_trace(&a.run, a.member, &out)?;
            eprintln!("wrote {}", path.display());
            Ok(())
        }
        Command::Decompose(a) => decompose(a),
        Command::Circuits(a) => {
            let rows = commands::cmd_circuits(a.qubits, a.max_terms)?;
            let (header, body) = circuits_table(&rows);
            emit_table(a.out.as_deref(), "circuits.csv", &header, &body)
        }
        Command::Estimate(a) => estimate(a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let line = serde_json::json!({
                "error": { "kind": e.kind(), "message": e.to_string() }
            });
            eprintln!("{line}");
            ExitCode::FAILURE
        }
    }
}
