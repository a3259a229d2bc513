use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cradon::config::parse;
use cradon::fixtures;
use cradon::run::{detail, execute, exit_code, summary, write_outputs};
use cradon_core::harness::{check_calibration, CalibrationCheck};

/// Exit code for invalid configurations.
const EXIT_CONFIG: u8 = 64;

#[derive(Parser)]
#[command(name = "cradon", version, about = "Complex Radon transform experiments on C²")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON configuration.
    Run {
        config: PathBuf,
        /// Output directory for report.json, report.csv and data dumps
        /// (default: cradon-out/<config name>).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Set a configuration value: dotted key path, JSON value.
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Print every check.
        #[arg(short, long)]
        verbose: bool,
    },
    /// List the shipped example configurations.
    Fixtures {
        #[arg(long)]
        dir: Option<PathBuf>,
    },
    /// Calibrate the inversion constant and compare it with 1/(2π³).
    Calibrate {
        /// s-grid cells per unit length.
        #[arg(long, default_value_t = 40)]
        res: u32,
    },
}

fn configure_threads() {
    let Ok(v) = std::env::var("CRADON_THREADS") else { return };
    match v.trim().parse::<usize>() {
        Ok(0) => {}
        Ok(n) => {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        Err(_) => eprintln!("warning: ignoring CRADON_THREADS={v}: not a thread count"),
    }
}

fn run(config: PathBuf, out: Option<PathBuf>, overrides: Vec<String>, verbose: bool) -> ExitCode {
    let text = match std::fs::read_to_string(&config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", config.display());
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let exp = match parse(&text, &overrides) {
        Ok(e) => e,
        Err(e) => {
            let suffix = if overrides.is_empty() { "" } else { " (after overrides)" };
            eprintln!("error: invalid config {}{suffix}: {e}", config.display());
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let outcome = match execute(&exp) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    println!("{}", summary(&outcome.report));
    if verbose {
        for line in detail(&outcome.report) {
            println!("{line}");
        }
    }
    let dir = out.or_else(|| exp.output().dir.clone()).unwrap_or_else(|| {
        let stem = config.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "run".into());
        PathBuf::from("cradon-out").join(stem)
    });
    match write_outputs(&outcome, &dir) {
        Ok(w) => {
            if verbose {
                println!("wrote {}", w.report_json.display());
            }
        }
        Err(e) => {
            eprintln!("error: writing outputs to {}: {e}", dir.display());
            return ExitCode::from(1);
        }
    }
    ExitCode::from(exit_code(&outcome.report))
}

fn list_fixtures(dir: Option<PathBuf>) -> ExitCode {
    let dir = dir.unwrap_or_else(fixtures::default_dir);
    match fixtures::list(&dir) {
        Ok(entries) => {
            for e in &entries {
                println!("{}", e.line());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: cannot read fixture directory {}: {e}", dir.display());
            ExitCode::from(1)
        }
    }
}

fn calibrate(res: u32) -> ExitCode {
    if res == 0 {
        eprintln!("error: --res must be positive");
        return ExitCode::from(EXIT_CONFIG);
    }
    let mut check = CalibrationCheck::default();
    check.params.spacing = 1.0 / res as f64;
    match check_calibration(&check) {
        Ok(report) => {
            for (k, v) in &report.provenance {
                if k == "c_hat" || k == "analytic" || k == "per_radius" {
                    println!("{k} = {v}");
                }
            }
            println!("{}", summary(&report));
            ExitCode::from(exit_code(&report))
        }
        Err(e) => {
            eprintln!("error: calibration failed: {e}");
            ExitCode::from(1)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    match cli.command {
        Command::Run { config, out, overrides, verbose } => run(config, out, overrides, verbose),
        Command::Fixtures { dir } => list_fixtures(dir),
        Command::Calibrate { res } => calibrate(res),
    }
}
