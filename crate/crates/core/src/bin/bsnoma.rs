use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use bsnoma::aobws::{run_aobws_detailed, AobwsOutcome, Solution};
use bsnoma::es_oracle::{es_search_detailed, EsOutcome};
use bsnoma::harness::{
    draw_scenario, load_config, run_figure, run_sweep, write_csv, write_json, Config, EsSettings,
    SweepRow,
};
use bsnoma::{Error, Result, ScenarioChannel};

#[derive(Parser)]
#[command(
    name = "bsnoma",
    version,
    about = "EE optimization for NOMA backscatter roadside sensors"
)]
struct Cli {
    /// TOML config; defaults apply to anything it leaves out.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Base seed (overrides `sweep.seed`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo trials per sweep value (overrides `sweep.trials`).
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads; all cores when omitted.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize one seeded scenario with AOBWS.
    Optimize,
    /// Run the sweep described by the config.
    Sweep,
    /// Exhaustive search on one seeded scenario.
    Es,
    /// Sweep preset behind one of figures 3 to 8.
    Figure { number: u8 },
}

#[derive(Serialize)]
struct OptimizeReport<'a> {
    seed: u64,
    channel: &'a ScenarioChannel,
    #[serde(flatten)]
    outcome: &'a AobwsOutcome,
}

#[derive(Serialize)]
struct EsReport<'a> {
    seed: u64,
    channel: &'a ScenarioChannel,
    es: &'a Solution,
    visited: usize,
    feasible_points: usize,
}

enum Produced {
    Optimize(ScenarioChannel, Box<AobwsOutcome>),
    Es(ScenarioChannel, EsOutcome),
    Rows(Vec<SweepRow>),
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config { .. } | Error::InvalidArgument(_) | Error::Io(_) => 2,
        Error::Infeasible { .. } => 3,
        Error::Numerical(_) | Error::Domain(_) => 4,
    }
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn solution_csv(sol: &Solution, out: &mut dyn Write) -> Result<()> {
    writeln!(
        out,
        "p_ce_w,gamma1,gamma2,rate,p_total_w,ee_bits_hz_j,feasible,iterations"
    )?;
    writeln!(
        out,
        "{},{},{},{},{},{},{},{}",
        sol.p_ce_w,
        sol.gamma[0],
        sol.gamma[1],
        sol.rate,
        sol.p_total_w,
        sol.ee,
        sol.feasible,
        sol.iterations
    )?;
    Ok(())
}

fn emit_rows(rows: &[SweepRow], format: Format, out: &mut dyn Write) -> Result<()> {
    match format {
        Format::Csv => write_csv(rows, out),
        Format::Json => write_json(rows, out),
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut config = match &cli.config {
        Some(path) => load_config(path)?,
        None => Config::default(),
    };
    if let Some(seed) = cli.seed {
        config.sweep.seed = seed;
    }
    if let Some(trials) = cli.trials {
        config.sweep.trials = trials;
    }
    config.sweep.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let seed = config.sweep.seed;

    let produced = pool.install(|| -> Result<Produced> {
        Ok(match cli.command {
            Command::Optimize => {
                let channel = draw_scenario(&config, seed)?;
                let outcome = run_aobws_detailed(&channel, &config.params)?;
                Produced::Optimize(channel, Box::new(outcome))
            }
            Command::Es => {
                let channel = draw_scenario(&config, seed)?;
                let es = config
                    .es
                    .unwrap_or_default()
                    .to_config(&config.params, None);
                let found = es_search_detailed(&channel, &config.params, &es)?;
                Produced::Es(channel, found)
            }
            Command::Sweep => {
                let es = config.es.unwrap_or_else(EsSettings::figure_default);
                Produced::Rows(run_sweep(
                    &config.sweep,
                    &config.params,
                    &config.topology,
                    es,
                )?)
            }
            Command::Figure { number } => Produced::Rows(run_figure(number, &config)?),
        })
    })?;

    let mut out = output(&cli.out)?;
    match produced {
        Produced::Optimize(channel, outcome) => match cli.format.unwrap_or(Format::Json) {
            Format::Json => write_json(
                &OptimizeReport {
                    seed,
                    channel: &channel,
                    outcome: &outcome,
                },
                &mut out,
            )?,
            Format::Csv => solution_csv(&outcome.aobws, &mut out)?,
        },
        Produced::Es(channel, found) => match cli.format.unwrap_or(Format::Json) {
            Format::Json => write_json(
                &EsReport {
                    seed,
                    channel: &channel,
                    es: &found.solution,
                    visited: found.visited,
                    feasible_points: found.feasible_points,
                },
                &mut out,
            )?,
            Format::Csv => solution_csv(&found.solution, &mut out)?,
        },
        Produced::Rows(rows) => emit_rows(&rows, cli.format.unwrap_or(Format::Csv), &mut out)?,
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
