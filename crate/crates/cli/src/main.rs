use clap::{Parser, Subcommand};
use rispaces::error::Error;
use rispaces::job::{error_text, parse_job, run_text, serialize_job, JobOutput, Overrides};
use rispaces::report::Format;
use rispaces::sample::DEFAULT_SEED;
use rispaces::suite::{run_paper_suite, SuiteOptions};
use std::io::Read;
use std::process::ExitCode;

/// Norms, rearrangements and quotient distances in rearrangement-invariant
/// function spaces.
#[derive(Parser)]
#[command(name = "rispaces", version)]
struct Cli {
    /// Engine tolerance (default 1e-9 for exact inputs, 1e-6 otherwise).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for the randomised suite.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// json, csv or table.
    #[arg(long, global = true, value_parser = parse_format)]
    format: Option<Format>,
    /// Glob over suite row ids.
    #[arg(long, global = true)]
    filter: Option<String>,
    /// Refuse the Cesaro copy check unless the rule table certifies that C
    /// is bounded on the space.
    #[arg(long, global = true)]
    require_bound_rule: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a job file (`-` reads standard input).
    Run { job: String },
    /// Print the canonical form of a job file.
    Canon { job: String },
    /// Run the reproduction suite.
    Report,
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn read_input(path: &str) -> std::io::Result<String> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path)
    }
}

fn max_depth() -> Option<u32> {
    std::env::var("RISPACES_MAX_DEPTH").ok().and_then(|v| v.parse().ok())
}

fn emit(out: JobOutput) -> ExitCode {
    if out.code == 2 {
        eprint!("{}", out.text);
    } else {
        print!("{}", out.text);
    }
    ExitCode::from(out.code as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ov = Overrides {
        tol: cli.tol,
        seed: cli.seed,
        format: cli.format,
        filter: cli.filter.clone(),
        require_bound_rule: cli.require_bound_rule,
        max_depth: max_depth(),
    };
    let format = cli.format.unwrap_or_default();
    match cli.command {
        Cmd::Run { job } => match read_input(&job) {
            Ok(text) => emit(run_text(&text, &ov)),
            Err(e) => emit(JobOutput {
                text: format!("error [io]: {job}: {e}\n"),
                code: 2,
            }),
        },
        Cmd::Canon { job } => {
            let parsed = read_input(&job)
                .map_err(|e| Error::Unsupported(format!("{job}: {e}")))
                .and_then(|t| parse_job(&t));
            match parsed {
                Ok(j) => emit(JobOutput {
                    text: serialize_job(&j),
                    code: 0,
                }),
                Err(e) => emit(JobOutput {
                    text: error_text(&e, format),
                    code: 2,
                }),
            }
        }
        Cmd::Report => {
            let opts = SuiteOptions {
                seed: cli.seed.unwrap_or(DEFAULT_SEED),
                filter: cli.filter,
                engine_tol: cli.tol,
                max_depth: max_depth(),
            };
            match run_paper_suite(&opts) {
                Err(e) => emit(JobOutput {
                    text: error_text(&e, format),
                    code: 2,
                }),
                Ok(rep) => {
                    let header = [("seed", rep.seed.to_string())];
                    let text = rispaces::report::render(&rep.rows, &header, format);
                    // Timings vary between runs, so they stay out of the report.
                    for t in &rep.timings {
                        eprintln!("time {}: {:.2}s", t.group, t.seconds);
                    }
                    emit(JobOutput {
                        text,
                        code: if rep.failures() == 0 { 0 } else { 1 },
                    })
                }
            }
        }
    }
}
