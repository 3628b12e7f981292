//! `qql`: seeded query-model experiments with JSON or CSV reports.

mod output;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, CommandFactory, Parser, Subcommand};
use qql_core::{experiments, oracle, program, ExperimentReport, Oracle, OracleKind, QueryProgram, StateVector};
use serde::Serialize;

use output::{Format, Rendered};

#[derive(Parser)]
#[command(name = "qql", version, about = "Quantum query-model laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Serialize, Clone)]
struct OutputArgs {
    /// Write the report here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "snake_case", tag = "subcommand")]
enum Command {
    /// Grover success and separation curve for k = 0..=kmax
    Grover {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        kmax: usize,
        #[command(flatten)]
        #[serde(skip)]
        out: OutputArgs,
    },
    /// One phase query against a single marked string
    Separation {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        #[serde(skip)]
        out: OutputArgs,
    },
    /// Hybrid and heavy-set bounds over random programs and timed patches
    Hybrid {
        /// Largest register size sampled
        #[arg(long)]
        n: usize,
        /// Largest query count sampled
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        #[serde(skip)]
        out: OutputArgs,
    },
    /// Heavy set of one seeded random program
    Heavyset {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        #[serde(skip)]
        out: OutputArgs,
    },
    /// Preimage counts of 1ⁿ under random length-preserving oracles
    Patchcount {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        #[serde(skip)]
        out: OutputArgs,
    },
    /// Query magnitude along random transposition chains
    Permhybrid {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        /// Program JSON to use instead of the uniform probe
        #[arg(long)]
        program: Option<PathBuf>,
        #[command(flatten)]
        #[serde(skip)]
        out: OutputArgs,
    },
    /// Majority-vote amplification of a single-qubit rotation
    Boost {
        #[arg(long)]
        success: f64,
        #[arg(long)]
        k: usize,
        /// Also report the repetitions needed for this error
        #[arg(long)]
        eps: Option<f64>,
        #[command(flatten)]
        #[serde(skip)]
        out: OutputArgs,
    },
    /// Tidiness of the clean-up transform of a single-qubit rotation
    Tidy {
        #[arg(long)]
        success: f64,
        #[command(flatten)]
        #[serde(skip)]
        out: OutputArgs,
    },
    /// Sample or inspect oracle tables
    Oracle {
        #[command(subcommand)]
        action: OracleAction,
    },
    /// Validate or run query programs
    Program {
        #[command(subcommand)]
        action: ProgramAction,
    },
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "snake_case", tag = "action")]
enum OracleAction {
    /// Write a seeded random oracle as JSON
    Sample {
        #[arg(long)]
        n: usize,
        /// boolean, length_preserving or permutation
        #[arg(long, value_parser = parse_kind)]
        kind: OracleKind,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        #[serde(skip)]
        out: OutputArgs,
    },
    /// Summarize an oracle file
    Inspect {
        file: PathBuf,
        #[command(flatten)]
        #[serde(skip)]
        out: OutputArgs,
    },
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "snake_case", tag = "action")]
enum ProgramAction {
    /// Check that a program file is well formed
    Validate {
        file: PathBuf,
        #[command(flatten)]
        #[serde(skip)]
        out: OutputArgs,
    },
    /// Run a program against an oracle from a basis input
    Run {
        file: PathBuf,
        #[arg(long)]
        oracle: PathBuf,
        /// Input basis state as a bitstring over all qubits; zeros if omitted
        #[arg(long)]
        input: Option<String>,
        #[command(flatten)]
        #[serde(skip)]
        out: OutputArgs,
    },
}

fn parse_kind(s: &str) -> Result<OracleKind, String> {
    s.parse::<OracleKind>().map_err(|e| e.to_string())
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Grover { .. } => "grover",
            Command::Separation { .. } => "separation",
            Command::Hybrid { .. } => "hybrid",
            Command::Heavyset { .. } => "heavyset",
            Command::Patchcount { .. } => "patchcount",
            Command::Permhybrid { .. } => "permhybrid",
            Command::Boost { .. } => "boost",
            Command::Tidy { .. } => "tidy",
            Command::Oracle { .. } => "oracle",
            Command::Program { .. } => "program",
        }
    }

    fn output(&self) -> &OutputArgs {
        match self {
            Command::Grover { out, .. }
            | Command::Separation { out, .. }
            | Command::Hybrid { out, .. }
            | Command::Heavyset { out, .. }
            | Command::Patchcount { out, .. }
            | Command::Permhybrid { out, .. }
            | Command::Boost { out, .. }
            | Command::Tidy { out, .. } => out,
            Command::Oracle { action } => match action {
                OracleAction::Sample { out, .. } | OracleAction::Inspect { out, .. } => out,
            },
            Command::Program { action } => match action {
                ProgramAction::Validate { out, .. } | ProgramAction::Run { out, .. } => out,
            },
        }
    }
}

/// Failures that are the caller's fault; these exit with status 2.
#[derive(Debug)]
struct Usage(anyhow::Error);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for Usage {}

fn usage<T>(r: Result<T, impl Into<anyhow::Error>>) -> anyhow::Result<T> {
    r.map_err(|e| Usage(e.into()).into())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> anyhow::Result<T> {
    let text = usage(fs::read_to_string(path).with_context(|| format!("reading {}", path.display())))?;
    usage(serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display())))
}

fn execute(command: &Command) -> anyhow::Result<Rendered> {
    let report = match command {
        Command::Grover { n, kmax, out } => {
            let report = usage(experiments::grover_report(*n, *kmax))?;
            if out.format == Format::Csv {
                let schedule = qql_core::grover::success_curve(*n, *kmax)?;
                return Ok(Rendered::raw(schedule.to_csv(), report.passed()));
            }
            report
        }
        Command::Separation { n, .. } => usage(experiments::separation_report(*n))?,
        Command::Hybrid {
            n,
            steps,
            trials,
            eps,
            seed,
            ..
        } => usage(experiments::hybrid_sweep(*n, *steps, *trials, *eps, *seed))?,
        Command::Heavyset {
            n, steps, eps, seed, ..
        } => usage(experiments::heavy_set_report(*n, *steps, *eps, *seed))?,
        Command::Patchcount { n, trials, seed, .. } => usage(experiments::patch_counting(*n, *trials, *seed))?,
        Command::Permhybrid {
            n,
            steps,
            trials,
            seed,
            program,
            ..
        } => {
            let custom: Option<QueryProgram> = program.as_ref().map(read_json).transpose()?;
            usage(experiments::permutation_hybrid(
                *n,
                *steps,
                *trials,
                *seed,
                custom.as_ref(),
            ))?
        }
        Command::Boost { success, k, eps, .. } => usage(experiments::boost_report(*success, *k, *eps))?,
        Command::Tidy { success, .. } => usage(experiments::tidy_report(*success))?,
        Command::Oracle { action } => match action {
            OracleAction::Sample { n, kind, seed, .. } => {
                let a = usage(oracle::sample_oracle(*n, *kind, *seed))?;
                return Ok(Rendered::raw(serde_json::to_string_pretty(&a)? + "\n", true));
            }
            OracleAction::Inspect { file, .. } => inspect_oracle(&read_json(file)?)?,
        },
        Command::Program { action } => match action {
            ProgramAction::Validate { file, .. } => describe_program(&read_json(file)?),
            ProgramAction::Run {
                file, oracle, input, ..
            } => {
                let p: QueryProgram = read_json(file)?;
                let a: Oracle = read_json(oracle)?;
                let start = match input {
                    Some(bits) => usage(StateVector::from_bits(bits))?,
                    None => usage(StateVector::basis(p.width(), 0))?,
                };
                usage(run_program(&p, &a, &start))?
            }
        },
    };
    Ok(Rendered::report(report))
}

fn inspect_oracle(a: &Oracle) -> anyhow::Result<ExperimentReport> {
    let mut r = ExperimentReport::new(
        "oracle_inspect",
        qql_core::report::Parameters {
            n: Some(a.n()),
            ..Default::default()
        },
    );
    let ones = qql_core::bits::ones(a.output_width());
    r.stat("output_width", a.output_width() as f64)
        .stat("marked_on_bit0", a.marked(0)?.len() as f64)
        .stat("preimages_of_ones", a.preimage_count(ones) as f64)
        .stat("bijection", f64::from(u8::from(a.is_bijection())));
    if a.kind() == OracleKind::Permutation {
        r.check("is_bijection", a.is_bijection());
    }
    Ok(r)
}

fn describe_program(p: &QueryProgram) -> ExperimentReport {
    let mut r = ExperimentReport::new(
        "program_validate",
        qql_core::report::Parameters {
            n: Some(p.n()),
            queries: Some(p.num_queries()),
            ..Default::default()
        },
    );
    r.stat("workspace", p.workspace() as f64)
        .stat("width", p.width() as f64)
        .stat("steps", p.steps().len() as f64)
        .check("valid", true);
    r
}

fn run_program(p: &QueryProgram, a: &Oracle, start: &StateVector) -> qql_core::Result<ExperimentReport> {
    let (out, trace) = program::run(p, a, start)?;
    let mut r = describe_program(p);
    r.name = "program_run".into();
    r.stat("final_norm", out.norm())
        .stat("total_query_magnitude", trace.total());
    r.check("norm_preserved", (out.norm() - 1.0).abs() <= qql_core::TOLERANCE);
    for (index, amp) in out.amplitudes().iter().enumerate() {
        let prob = amp.norm_sqr();
        if prob > qql_core::TOLERANCE {
            r.records.push(
                [
                    ("index".to_string(), index as f64),
                    ("probability".to_string(), prob),
                    ("re".to_string(), amp.re),
                    ("im".to_string(), amp.im),
                ]
                .into(),
            );
        }
    }
    Ok(r)
}

/// Usage line of subcommand `name`, or of the whole tool if there is none.
fn usage_text(name: &str) -> clap::builder::StyledStr {
    let mut cmd = Cli::command();
    cmd.build();
    match cmd.find_subcommand_mut(name) {
        Some(sub) => sub.render_usage(),
        None => cmd.render_usage(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            if !e.use_stderr() {
                return ExitCode::SUCCESS;
            }
            if !e.to_string().contains("Usage:") {
                let sub = std::env::args().nth(1).unwrap_or_default();
                eprintln!("\n{}", usage_text(&sub));
            }
            return ExitCode::from(2);
        }
    };
    let out = cli.command.output().clone();
    let rendered = match execute(&cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Usage>().is_some() {
                eprintln!("\n{}", usage_text(cli.command.name()));
                return ExitCode::from(2);
            }
            return ExitCode::from(1);
        }
    };
    let text = match rendered.text(&cli.command, out.format) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    let written = match &out.output {
        Some(path) => fs::write(path, &text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    if rendered.passed {
        ExitCode::SUCCESS
    } else {
        eprintln!("checks failed: {}", rendered.failed.join(", "));
        ExitCode::from(1)
    }
}
