use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use evpos_cli::{
    builtin_suite, execute, load_scenario, CliError, Input, Kind, Parameters, RunOptions, Scenario,
};

#[derive(Parser)]
#[command(name = "evpos", version, about = "Eventual positivity analyses for linear evolution equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario file.
    Run {
        scenario: PathBuf,
        /// Output directory (defaults to the scenario's output_dir, then evpos-out/<name>).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the built-in scenarios.
    Suite {
        /// Only run scenarios whose name contains this string.
        #[arg(long)]
        filter: Option<String>,
        #[arg(long, default_value = "evpos-out")]
        out: PathBuf,
    },
    /// Classify the semigroup generated by a CSV matrix and print the summary.
    AnalyzeMatrix {
        matrix: PathBuf,
        #[arg(long = "t-max")]
        t_max: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let opts = RunOptions::from_env()?;
    match cli.command {
        Command::Run { scenario, out } => {
            let s = load_scenario(&scenario)?;
            let dir = out
                .or_else(|| s.output_dir.as_ref().map(|d| s.base_dir.clone().unwrap_or_default().join(d)))
                .unwrap_or_else(|| PathBuf::from("evpos-out").join(&s.name));
            let report = execute(&s, &opts)?;
            report.write(&dir)?;
            print!("{}", report.summary_json());
        }
        Command::Suite { filter, out } => {
            let mut worst: Option<CliError> = None;
            for s in builtin_suite() {
                if filter.as_ref().is_some_and(|f| !s.name.contains(f.as_str())) {
                    continue;
                }
                match execute(&s, &opts).and_then(|r| r.write(&out.join(&s.name)).map(|_| r)) {
                    Ok(r) => println!("{:<32} ok   {}", s.name, headline(&r.summary)),
                    Err(e) => {
                        println!("{:<32} FAIL {e}", s.name);
                        if worst.as_ref().is_none_or(|w| e.code > w.code) {
                            worst = Some(e);
                        }
                    }
                }
            }
            if let Some(e) = worst {
                return Err(e);
            }
        }
        Command::AnalyzeMatrix { matrix, t_max, tol, out } => {
            let s = Scenario {
                name: matrix.file_stem().map_or("matrix".into(), |n| n.to_string_lossy().into_owned()),
                kind: Kind::AnalyzeMatrix,
                input: Input::MatrixFile(matrix),
                parameters: Parameters { t_max, tol, ..Default::default() },
                output_dir: None,
                base_dir: None,
            };
            let report = execute(&s, &opts)?;
            if let Some(dir) = out {
                report.write(&dir)?;
            }
            print!("{}", report.summary_json());
        }
    }
    Ok(())
}

fn headline(summary: &serde_json::Value) -> String {
    let r = &summary["results"];
    for key in ["classification", "left_window_verdict", "onset_time", "hits"] {
        if !r[key].is_null() {
            return format!("{key}={}", r[key]);
        }
    }
    if !r["report"]["verdict"].is_null() {
        return format!("criterion={}", r["report"]["verdict"]);
    }
    String::new()
}
