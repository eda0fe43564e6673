use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::error;

use torsionlab::catalog::{get_group, GroupId};
use torsionlab::experiment::{io, run_sweep, summarize, ExperimentError, Format, SweepConfig};

#[derive(Parser)]
#[command(name = "torsionlab", version, about = "Torsion growth in projective covers of tetrahedral groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute cover records over a range of primes.
    Run(RunArgs),
    /// Per-group statistics of a record file.
    Summarize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        format: Option<Format>,
    },
    /// Print a catalog group definition.
    ShowGroup { group: GroupId },
}

#[derive(clap::Args)]
struct RunArgs {
    /// Group ids, comma separated (H1..H6).
    #[arg(long, value_delimiter = ',', required = true)]
    group: Vec<GroupId>,
    /// Start from a named range: paper-set-1, paper-set-2, desk-set-1, desk-set-2.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    p_min: Option<u64>,
    #[arg(long)]
    p_max: Option<u64>,
    #[arg(long)]
    max_norm: Option<u64>,
    /// Residue degrees: 1, 2 or all.
    #[arg(long)]
    degrees: Option<String>,
    /// Keep only the first level over each prime.
    #[arg(long)]
    one_per_p: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<Format>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Skip levels already present in the output file.
    #[arg(long)]
    resume: bool,
}

fn parse_degrees(s: &str) -> Result<Vec<usize>, ExperimentError> {
    match s {
        "all" => Ok(vec![1, 2]),
        _ => s
            .split(',')
            .map(|d| d.trim().parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|_| ExperimentError::Config(format!("bad --degrees {s:?}; expected 1, 2 or all"))),
    }
}

fn run(args: RunArgs) -> Result<(), ExperimentError> {
    let mut cfg = match &args.preset {
        Some(name) => {
            let mut groups = args.group.iter();
            let mut cfg = SweepConfig::preset(name, *groups.next().unwrap())?;
            for g in groups {
                let other = SweepConfig::preset(name, *g)?;
                if (other.p_min, other.p_max, other.max_norm) != (cfg.p_min, cfg.p_max, cfg.max_norm) {
                    return Err(ExperimentError::Config(format!(
                        "preset {name} has different ranges for {g}; run groups separately"
                    )));
                }
                cfg.groups.push(*g);
            }
            cfg
        }
        None => SweepConfig::new(args.group.clone(), 2, 1000),
    };
    if let Some(v) = args.p_min {
        cfg.p_min = v;
    }
    if let Some(v) = args.p_max {
        cfg.p_max = v;
    }
    if let Some(v) = args.max_norm {
        cfg.max_norm = Some(v);
    }
    if let Some(d) = &args.degrees {
        cfg.degrees = parse_degrees(d)?;
    }
    cfg.one_per_p |= args.one_per_p;
    cfg.jobs = args.jobs;
    cfg.resume = args.resume;
    cfg.format = args
        .format
        .or_else(|| args.out.as_deref().map(Format::from_path))
        .unwrap_or(Format::Csv);
    cfg.out = args.out;

    let to_stdout = cfg.out.is_none();
    let result = run_sweep(&cfg)?;
    if to_stdout {
        let stdout = std::io::stdout();
        let mut w = csv::WriterBuilder::new()
            .has_headers(false)
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(stdout.lock());
        w.write_record(io::CSV_HEADER).ok();
        for r in &result.records {
            w.serialize(r).map_err(|e| ExperimentError::Config(e.to_string()))?;
        }
        w.flush().ok();
    }
    eprintln!(
        "{} records ({} computed), {} primes skipped",
        result.records.len(),
        result.computed,
        result.skipped.len()
    );
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp_millis()
        .init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => run(args),
        Command::Summarize { input, format } => {
            let format = format.unwrap_or_else(|| Format::from_path(&input));
            io::read_records(&input, format)
                .and_then(|r| summarize(&r))
                .map(|s| print!("{s}"))
        }
        Command::ShowGroup { group } => {
            print!("{}", get_group(group).to_toml());
            Ok(())
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            error!("{e}");
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
