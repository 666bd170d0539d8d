use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kmlab::report::{emit, SuiteReport};
use kmlab::suites::{run_suite, SuiteConfig, SuiteError, SUITES};

#[derive(Parser)]
#[command(name = "kmlab", version, about = "Seeded verification suites for pivot laws, loop weights and spherical transforms")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one suite.
    Run {
        suite: String,
        #[command(flatten)]
        opts: Opts,
    },
    /// List registered suites.
    List,
    /// Run every suite.
    All {
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(Args)]
struct Opts {
    /// TOML config file (flat keys, unknown keys rejected).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 0 uses every core. Never changes results.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma list of json, csv.
    #[arg(long)]
    format: Option<String>,
}

fn resolve(opts: &Opts) -> Result<SuiteConfig, SuiteError> {
    let file = match &opts.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| SuiteError::Config(format!("{}: {e}", p.display())))?;
            SuiteConfig::from_toml(&text)?
        }
        None => SuiteConfig::default(),
    };
    let flags = SuiteConfig {
        seed: opts.seed,
        threads: opts.threads,
        out: opts.out.clone(),
        format: opts.format.clone(),
        ..Default::default()
    };
    let mut cfg = file.merged(&flags);
    if let Ok(v) = std::env::var("KMLAB_SEED") {
        let seed = v.trim().parse().map_err(|_| SuiteError::Config(format!("KMLAB_SEED='{v}' is not an unsigned integer")))?;
        cfg.seed = Some(seed);
    }
    cfg.formats()?;
    Ok(cfg)
}

fn summary(r: &SuiteReport) {
    let t = r.tally;
    println!(
        "{:<16} pass {:>3}  fail {:>3}  pole {:>2}  exploratory {:>2}  {:>8.2}s",
        r.suite, t.pass, t.fail, t.pole, t.exploratory, r.wall_time_s
    );
    for c in r.checks.iter().filter(|c| c.verdict == kmlab::report::Verdict::Fail) {
        println!("  FAIL {} score={:?} tol={:?}", c.name, c.score, c.tolerance);
    }
}

fn run(names: &[&str], opts: &Opts) -> Result<bool, String> {
    let cfg = resolve(opts).map_err(|e| e.to_string())?;
    let formats = cfg.formats().map_err(|e| e.to_string())?;
    let out = cfg.out.clone().unwrap_or_else(|| PathBuf::from("kmlab-out"));
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.threads.unwrap_or(0)).build().map_err(|e| e.to_string())?;
    let mut failed = false;
    for name in names {
        let report = match pool.install(|| run_suite(name, &cfg)) {
            Ok(r) => r,
            Err(e) => return Err(e.to_string()),
        };
        summary(&report);
        if let Err(e) = emit(&report, &formats, &out) {
            eprintln!("kmlab: {e}");
            std::process::exit(2);
        }
        failed |= report.failed();
    }
    Ok(failed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let res = match &cli.cmd {
        Cmd::List => {
            for (name, about) in SUITES {
                println!("{name:<16} {about}");
            }
            return ExitCode::SUCCESS;
        }
        Cmd::Run { suite, opts } => run(&[suite.as_str()], opts),
        Cmd::All { opts } => run(&SUITES.map(|s| s.0), opts),
    };
    match res {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(1),
        Err(e) => {
            eprintln!("kmlab: {e}");
            ExitCode::from(2)
        }
    }
}
