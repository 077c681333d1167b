use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use sizesched::experiment::{
    emit_results, preset, results_to_csv, results_to_json, run_experiment_with, Axis, ExperimentSpec, Format,
    RawWriter, PRESETS,
};
use sizesched::policies::PolicyKind;
use sizesched::workload::load_trace;

#[derive(Parser)]
#[command(
    name = "sizesched",
    version,
    about = "Single-server scheduling simulator with inexact job sizes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment sweep and write aggregate results.
    Run(Box<RunArgs>),
    /// List the available policies.
    ListPolicies,
    /// List the named experiment presets.
    ListPresets,
    /// Parse and validate a trace file, printing a summary.
    ValidateTrace {
        path: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        sigma: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(clap::Args)]
struct RunArgs {
    /// Start from a named preset; explicit flags override it.
    #[arg(long)]
    preset: Option<String>,
    /// Policies to evaluate (comma-separated).
    #[arg(long, value_delimiter = ',')]
    policy: Vec<PolicyKind>,
    /// Weibull shape of job sizes; several values make a sweep axis.
    #[arg(long, value_delimiter = ',')]
    shape: Vec<f64>,
    /// Log-normal error sigma; several values make a sweep axis.
    #[arg(long, value_delimiter = ',')]
    sigma: Vec<f64>,
    /// Offered load in (0, 1).
    #[arg(long, value_delimiter = ',')]
    load: Vec<f64>,
    /// Weibull shape of inter-arrival gaps (1 = Poisson).
    #[arg(long, value_delimiter = ',')]
    timeshape: Vec<f64>,
    /// Jobs per workload.
    #[arg(long, value_delimiter = ',')]
    njobs: Vec<usize>,
    /// Repetitions per grid cell.
    #[arg(long)]
    reps: Option<usize>,
    /// Base seed; each cell and repetition derives its own.
    #[arg(long)]
    seed: Option<u64>,
    /// Replay a trace CSV instead of generating workloads.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Output file; results go to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: csv or json.
    #[arg(long, default_value = "csv")]
    format: Format,
    /// Also dump every job outcome to this CSV file.
    #[arg(long)]
    raw: Option<PathBuf>,
    /// Worker threads (defaults to all cores).
    #[arg(long, env = "SIZESCHED_WORKERS")]
    workers: Option<usize>,
}

fn apply_axis(spec: &mut ExperimentSpec, axis: Axis, values: Vec<f64>) {
    spec.axes.retain(|(a, _)| *a != axis);
    match values.as_slice() {
        [] => {}
        [v] => match axis {
            Axis::Shape => spec.base.shape = Some(*v),
            Axis::Sigma => spec.base.sigma = *v,
            Axis::Load => spec.base.load = Some(*v),
            Axis::Timeshape => spec.base.timeshape = Some(*v),
            Axis::Njobs => spec.base.njobs = *v as usize,
        },
        _ => spec.axes.push((axis, values)),
    }
}

fn build_spec(args: &RunArgs) -> Result<ExperimentSpec> {
    let mut spec = match &args.preset {
        Some(name) => preset(name)?,
        None => ExperimentSpec::default(),
    };
    if !args.policy.is_empty() {
        spec.policies = args.policy.clone();
    }
    for (axis, values) in [
        (Axis::Shape, &args.shape),
        (Axis::Sigma, &args.sigma),
        (Axis::Load, &args.load),
        (Axis::Timeshape, &args.timeshape),
    ] {
        if !values.is_empty() {
            apply_axis(&mut spec, axis, values.clone());
        }
    }
    if !args.njobs.is_empty() {
        apply_axis(&mut spec, Axis::Njobs, args.njobs.iter().map(|&n| n as f64).collect());
    }
    if let Some(reps) = args.reps {
        spec.repetitions = reps;
    }
    if let Some(seed) = args.seed {
        spec.base_seed = seed;
    }
    if args.trace.is_some() {
        spec.trace = args.trace.clone();
        spec.axes.retain(|(a, _)| *a == Axis::Sigma);
    }
    spec.workers = args.workers;
    if spec.policies.is_empty() {
        bail!("no policies selected; pass --policy or --preset");
    }
    if args.preset.as_deref() == Some("fig7-trace") && spec.trace.is_none() {
        bail!("preset fig7-trace needs --trace");
    }
    spec.validate()?;
    Ok(spec)
}

fn run(args: RunArgs) -> Result<()> {
    let spec = build_spec(&args)?;
    let mut raw = args.raw.as_deref().map(RawWriter::create).transpose()?;
    let mut so_far = Vec::new();
    let ncells = spec.cells().len();
    let results = run_experiment_with(&spec, |cell, rows, runs| {
        if let Some(raw) = raw.as_mut() {
            raw.write_cell(cell, runs)?;
        }
        so_far.extend_from_slice(rows);
        // Rewrite after every cell so an interrupted sweep keeps what it has.
        if let Some(out) = &args.out {
            emit_results(&so_far, args.format, out)?;
        }
        eprintln!("cell {}/{} done", cell + 1, ncells);
        Ok(())
    })?;
    if let Some(raw) = raw {
        raw.finish()?;
    }
    if args.out.is_none() {
        let text = match args.format {
            Format::Csv => results_to_csv(&results)?,
            Format::Json => results_to_json(&results)? + "\n",
        };
        std::io::stdout().write_all(text.as_bytes())?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => run(*args),
        Command::ListPolicies => {
            for kind in PolicyKind::ALL {
                println!("{:<6} {}", kind.name(), kind.description());
            }
            Ok(())
        }
        Command::ListPresets => {
            for (name, what) in PRESETS {
                println!("{name:<14} {what}");
            }
            Ok(())
        }
        Command::ValidateTrace { path, sigma, seed } => load_trace(&path, sigma, seed)
            .with_context(|| format!("invalid trace {}", path.display()))
            .map(|w| {
                let span = w.jobs.last().map_or(0.0, |j| j.arrival);
                println!("jobs: {}", w.len());
                println!("total work: {}", w.total_work());
                println!("arrival span: {span}");
                if span > 0.0 {
                    println!("offered load: {}", w.total_work() / span);
                }
            }),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
