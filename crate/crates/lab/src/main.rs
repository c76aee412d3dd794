use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use algebroid_lab::bundled::{lookup, BUNDLED};
use algebroid_lab::cache::DiskCache;
use algebroid_lab::checks::{kind_info, KINDS};
use algebroid_lab::core::algebra::set_groebner_cache;
use algebroid_lab::report::{render, Format};
use algebroid_lab::run::{run_scenario, RunOptions};
use algebroid_lab::scenario::parse_scenario;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "algebroid-lab", version, about = "Verify algebroid, foliation and Dirac scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check of a scenario file or bundled scenario.
    Verify {
        scenario: String,
        #[arg(long, default_value = "human")]
        format: Format,
        /// Leave timing out of the report.
        #[arg(long)]
        no_timing: bool,
        #[arg(long)]
        jobs: Option<usize>,
        /// Gröbner basis cache directory. Overrides ALGEBROID_LAB_CACHE.
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Names of the bundled scenarios.
    ListScenarios,
    /// Describe a check kind, or a named check from a bundled scenario.
    Explain { check: String },
}

fn load(arg: &str) -> Result<(String, String), String> {
    let path = Path::new(arg);
    if path.exists() {
        return std::fs::read_to_string(path)
            .map(|t| (arg.to_string(), t))
            .map_err(|e| format!("{arg}: {e}"));
    }
    match lookup(arg) {
        Some(b) => Ok((format!("{}.toml", b.name), b.text.to_string())),
        None => Err(format!("{arg}: no such file or bundled scenario")),
    }
}

fn verify(scenario: &str, format: Format, timing: bool, jobs: Option<usize>, cache: Option<PathBuf>) -> ExitCode {
    let (label, text) = match load(scenario) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let parsed = match parse_scenario(&text) {
        Ok(s) => s,
        Err(diags) => {
            for d in diags {
                eprintln!("{label}:{d}");
            }
            return ExitCode::from(2);
        }
    };
    match DiskCache::from_options(cache.as_deref()) {
        Ok(Some(c)) => set_groebner_cache(Some(Arc::new(c))),
        Ok(None) => {}
        Err(e) => eprintln!("warning: cache disabled: {e}"),
    }
    let report = run_scenario(&parsed, &RunOptions { jobs });
    print!("{}", render(&report, format, timing));
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn explain(name: &str) -> ExitCode {
    if let Some(k) = kind_info(name) {
        println!("{}", k.name);
        println!("  outcomes: {}", k.outcomes.join(", "));
        println!("  keys: {}", k.keys);
        println!("  {}", k.summary.split_whitespace().collect::<Vec<_>>().join(" "));
        return ExitCode::SUCCESS;
    }
    for b in BUNDLED {
        let Ok(s) = parse_scenario(b.text) else { continue };
        if let Some(c) = s.checks.iter().find(|c| c.name == name) {
            let k = algebroid_lab::checks::info(c.kind);
            println!("{} ({}.toml)", c.name, b.name);
            println!("  kind: {}", k.name);
            println!("  expect: {}", c.expect);
            if let Some(d) = &c.description {
                println!("  {d}");
            }
            println!("  {}", k.summary.split_whitespace().collect::<Vec<_>>().join(" "));
            return ExitCode::SUCCESS;
        }
    }
    eprintln!(
        "error: `{name}` is neither a check kind ({}) nor a bundled check",
        KINDS.iter().map(|k| k.name).collect::<Vec<_>>().join(", ")
    );
    ExitCode::from(2)
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
    match cli.command {
        Command::Verify {
            scenario,
            format,
            no_timing,
            jobs,
            cache,
        } => verify(&scenario, format, !no_timing, jobs, cache),
        Command::ListScenarios => {
            for b in BUNDLED {
                let desc = parse_scenario(b.text).ok().and_then(|s| s.description).unwrap_or_default();
                println!("{:<26} {desc}", b.name);
            }
            ExitCode::SUCCESS
        }
        Command::Explain { check } => explain(&check),
    }
}
