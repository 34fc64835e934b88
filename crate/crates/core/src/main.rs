use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use whspec::report::{defaults, emit_curve, run_suite, CATALOG, CURVE_KINDS, SUITES};
use whspec::{Error, Result};

#[derive(Parser)]
#[command(
    name = "whspec",
    version,
    about = "Verification suites and curves for sinc Wiener-Hopf spectral representations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite; JSON report on stdout, exit 0 iff all checks pass.
    Verify {
        suite: String,
        /// Parameter overrides as `--key value` pairs.
        #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
        params: Vec<String>,
    },
    /// Write a curve as CSV.
    Curve {
        kind: String,
        #[arg(long)]
        out: PathBuf,
        /// Curve parameters as `--key value` pairs.
        #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
        params: Vec<String>,
    },
    /// List suites, their checks and default parameters.
    List,
}

fn parse_pairs(args: &[String]) -> Result<BTreeMap<String, f64>> {
    let mut map = BTreeMap::new();
    let mut it = args.iter();
    while let Some(key) = it.next() {
        let name = key
            .strip_prefix("--")
            .ok_or_else(|| Error::Usage(format!("expected --key value, got '{key}'")))?;
        let raw = it
            .next()
            .ok_or_else(|| Error::Usage(format!("missing value for --{name}")))?;
        let value: f64 = raw
            .parse()
            .map_err(|_| Error::Usage(format!("value for --{name} is not a number: '{raw}'")))?;
        map.insert(name.to_string(), value);
    }
    Ok(map)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Verify { suite, params } => {
            let report = run_suite(&suite, &parse_pairs(&params)?)?;
            for c in &report.checks {
                eprintln!(
                    "{} {} max_error={:.3e} tol={:.3e}{}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.id,
                    c.max_error,
                    c.tolerance,
                    c.tail_bound
                        .map(|t| format!(" tail={t:.3e}"))
                        .unwrap_or_default()
                );
            }
            let json =
                serde_json::to_string_pretty(&report).map_err(|e| Error::Io(e.to_string()))?;
            println!("{json}");
            Ok(report.all_pass())
        }
        Command::Curve { kind, out, params } => {
            let rows = emit_curve(&kind, &parse_pairs(&params)?, &out)?;
            eprintln!("wrote {rows} rows to {}", out.display());
            Ok(true)
        }
        Command::List => {
            for suite in SUITES {
                println!("{suite}");
                for f in CATALOG
                    .iter()
                    .filter(|f| suite == "all" || f.suite == suite)
                {
                    if suite != "all" {
                        println!("  {}  [{}]  {}", f.id, f.module, f.anchor);
                    }
                }
                if suite == "all" {
                    println!("  every check above");
                } else {
                    let d = defaults(suite)?;
                    let items: Vec<String> = d.iter().map(|(k, v)| format!("{k}={v}")).collect();
                    println!("  defaults: {}", items.join(" "));
                }
            }
            println!("curves: {}", CURVE_KINDS.join(", "));
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
