//! Runs one suite through the library API and writes its JSON and CSV.
//!
//!     cargo run --release --example run_suite -- weyl-dim /tmp/kmlab-out

use std::path::PathBuf;

use kmlab::report::{emit, Format};
use kmlab::suites::{run_suite, SuiteConfig};

fn main() {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "weyl-dim".into());
    let out = PathBuf::from(args.next().unwrap_or_else(|| "kmlab-out".into()));
    let cfg = SuiteConfig { draws: Some(50_000), ..Default::default() };
    let report = run_suite(&name, &cfg).unwrap_or_else(|e| {
        eprintln!("{e}");
        std::process::exit(2)
    });
    for c in &report.checks {
        println!("{:<40} {:?} score {:?}", c.name, c.verdict, c.score);
    }
    for p in emit(&report, &[Format::Json, Format::Csv], &out).unwrap() {
        println!("wrote {}", p.display());
    }
}
