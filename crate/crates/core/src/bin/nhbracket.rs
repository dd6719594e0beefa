use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::thread;

use clap::{Parser, Subcommand};

use nhbracket::dsl::parse_operator;
use nhbracket::operator::eigenvalues;
use nhbracket::scenario::{compare_scenario_pictures, load_scenario, run_scenario};
use nhbracket::timeseries::emit_timeseries;
use nhbracket::verify::{verify_suite, VerifyConfig};

#[derive(Parser)]
#[command(name = "nhbracket", version, about = "Non-Hermitian dynamics through generalized operator brackets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run scenario files; several files run concurrently.
    Simulate {
        #[arg(required = true)]
        scenarios: Vec<PathBuf>,
    },
    /// Check the bracket identities on seeded random operators.
    Verify {
        #[arg(long, value_delimiter = ',', default_values_t = [2, 4, 8])]
        dims: Vec<usize>,
        #[arg(long = "n", default_value_t = 100)]
        n_random: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// Draw Hermitian Hamiltonians only.
        #[arg(long)]
        hermitian_only: bool,
        /// Also write the report to this file.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Heisenberg vs Schrödinger expectation of a scenario's observable.
    ComparePictures {
        scenario: PathBuf,
        #[arg(long)]
        t: f64,
    },
    /// Print the eigenvalues of an operator expression.
    Spectrum { expr: String },
}

fn simulate_one(path: &Path) -> Result<String, String> {
    let scenario = load_scenario(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let ts = run_scenario(&scenario).map_err(|e| format!("{}: {e}", path.display()))?;
    match &scenario.output {
        Some(out) => {
            emit_timeseries(&ts, out.format, &out.path).map_err(|e| format!("{}: {e}", out.path.display()))?;
            Ok(String::new())
        }
        None => Ok(ts.to_csv_string()),
    }
}

fn simulate(paths: &[PathBuf]) -> Result<(), String> {
    let results: Vec<Result<String, String>> = thread::scope(|s| {
        let handles: Vec<_> = paths.iter().map(|p| s.spawn(move || simulate_one(p))).collect();
        handles.into_iter().map(|h| h.join().expect("scenario thread panicked")).collect()
    });
    let mut stdout = io::stdout().lock();
    let mut failed = Vec::new();
    for r in results {
        match r {
            Ok(text) => stdout.write_all(text.as_bytes()).map_err(|e| e.to_string())?,
            Err(e) => failed.push(e),
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(failed.join("\n"))
    }
}

fn run(cli: Cli) -> Result<bool, String> {
    match cli.command {
        Command::Simulate { scenarios } => simulate(&scenarios).map(|_| true),
        Command::Verify { dims, n_random, seed, tol, hermitian_only, report } => {
            let config = VerifyConfig { dims, n_random, seed, tol, hermitian_only };
            let result = verify_suite(&config).map_err(|e| e.to_string())?;
            let text = result.to_string();
            print!("{text}");
            if let Some(path) = report {
                std::fs::write(&path, &text).map_err(|e| format!("{}: {e}", path.display()))?;
            }
            Ok(result.passed())
        }
        Command::ComparePictures { scenario, t } => {
            let s = load_scenario(&scenario).map_err(|e| format!("{}: {e}", scenario.display()))?;
            let cmp = compare_scenario_pictures(&s, t).map_err(|e| e.to_string())?;
            println!("t,heisenberg.re,heisenberg.im,schrodinger.re,schrodinger.im,gap");
            println!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                t, cmp.heisenberg.re, cmp.heisenberg.im, cmp.schrodinger.re, cmp.schrodinger.im, cmp.gap
            );
            Ok(true)
        }
        Command::Spectrum { expr } => {
            let op = parse_operator(&expr).map_err(|e| e.render(&expr))?;
            for z in eigenvalues(&op).map_err(|e| e.to_string())? {
                println!("{:.16e} {:.16e}", z.re, z.im);
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
