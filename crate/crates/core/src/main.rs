use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use carleman_lab::config::{RunConfig, Suite};
use carleman_lab::suites;
use carleman_lab::Error;

/// Numerical verification suites for an interface Carleman estimate.
#[derive(Parser, Debug)]
#[command(name = "carleman-lab", version)]
struct Cli {
    /// Suite to run: freq | global31 | global21 | seminorm | partition |
    /// assembly | calibrate
    suite: String,

    /// Flat key=value configuration file
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output directory for CSV reports (overrides the config file)
    #[arg(long)]
    out: Option<PathBuf>,

    /// Random seed (overrides the config file)
    #[arg(long)]
    seed: Option<u64>,

    /// Worker threads (overrides CARLEMAN_LAB_JOBS; default: all cores)
    #[arg(long)]
    jobs: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::Inadmissible(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn run(cli: Cli) -> carleman_lab::Result<bool> {
    let suite = Suite::parse(&cli.suite)?;
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(out) = cli.out {
        cfg.out_dir = out;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(jobs) = cli.jobs {
        cfg.jobs = Some(jobs);
    } else if cfg.jobs.is_none() {
        if let Ok(v) = std::env::var("CARLEMAN_LAB_JOBS") {
            let n = v
                .parse()
                .map_err(|_| Error::Config(format!("bad CARLEMAN_LAB_JOBS value '{v}'")))?;
            cfg.jobs = Some(n);
        }
    }
    if let Some(n) = cfg.jobs {
        if n == 0 {
            return Err(Error::Config("jobs must be at least 1".into()));
        }
        // ignore the error if a global pool already exists (tests)
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let outcome = suites::run(suite, &cfg)?;
    println!(
        "suite {}: {} ({} rows, report {})",
        outcome.suite.name(),
        if outcome.pass { "PASS" } else { "FAIL" },
        outcome.rows,
        outcome.csv.display()
    );
    for f in &outcome.failures {
        println!("  FAIL {f}");
    }
    Ok(outcome.pass)
}
