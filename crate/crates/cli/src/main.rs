mod commands;
mod error;
mod fetch;
mod job;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "orbq", version, about = "Characters of cyclic orbifolds of lattice vertex operator algebras")]
struct Cli {
    /// Worker threads for lattice enumeration (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    /// Overrides the job's trunc_weight.
    #[arg(long, global = true)]
    trunc_weight: Option<i64>,
    /// Theta and lattice cache.
    #[arg(long, global = true, env = "ORBQ_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lattice invariants.
    Lattice {
        #[command(subcommand)]
        cmd: LatticeCmd,
    },
    /// Isometry and lift analysis.
    Aut {
        #[command(subcommand)]
        cmd: AutCmd,
    },
    /// Runs a job file and writes its report.
    Run { job: PathBuf },
    /// Downloads and validates a lattice from the catalogue.
    Fetch {
        name: String,
        #[arg(long)]
        dim: Option<usize>,
        /// Source template; `{name}` is substituted. Local paths are allowed.
        #[arg(long, env = "ORBQ_CATALOGUE_URL")]
        url: Option<String>,
        /// Enumerate short vectors even in large dimension.
        #[arg(long)]
        check_minimum: bool,
    },
    /// Cache maintenance.
    Cache {
        #[command(subcommand)]
        cmd: CacheCmd,
    },
}

#[derive(Subcommand)]
enum LatticeCmd {
    Info {
        gram: PathBuf,
        /// Count vectors up to this norm.
        #[arg(long, default_value_t = 4)]
        norm_bound: i64,
    },
}

#[derive(Subcommand)]
enum AutCmd {
    Analyze {
        gram: PathBuf,
        aut: PathBuf,
        /// Comma-separated rationals in lattice coordinates.
        #[arg(long, allow_hyphen_values = true)]
        beta: Option<String>,
    },
}

#[derive(Subcommand)]
enum CacheCmd {
    Ls,
    Gc,
}

fn cache_dir(cli: &Cli) -> PathBuf {
    cli.cache_dir.clone().unwrap_or_else(|| PathBuf::from(".orbq-cache"))
}

fn run(cli: &Cli) -> Result<()> {
    if let Some(k) = cli.jobs {
        orbq_core::lattice::set_default_jobs(k);
    }
    let out = match &cli.command {
        Command::Lattice { cmd: LatticeCmd::Info { gram, norm_bound } } => commands::lattice_info(gram, *norm_bound, cli.json)?,
        Command::Aut { cmd: AutCmd::Analyze { gram, aut, beta } } => commands::aut_analyze(gram, aut, beta.as_deref(), cli.json)?,
        Command::Run { job } => {
            if let Some(dir) = &cli.cache_dir {
                std::env::set_var("ORBQ_CACHE_DIR", dir);
            }
            let o = commands::run_job(job, cli.trunc_weight)?;
            if cli.json {
                serde_json::to_string_pretty(&o.json)? + "\n"
            } else {
                format!("{}\n\n{}", o.classification, o.text)
            }
        }
        Command::Fetch { name, dim, url, check_minimum } => commands::fetch(name, *dim, url.clone(), &cache_dir(cli), *check_minimum)?,
        Command::Cache { cmd: CacheCmd::Ls } => commands::cache_ls(&cache_dir(cli)),
        Command::Cache { cmd: CacheCmd::Gc } => commands::cache_gc(&cache_dir(cli))?,
    };
    print!("{out}");
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(error::exit_code(&e))
        }
    }
}
