//! Command-line front end: `solve`, `sweep` and `check` on scenario files.
//!
//! Exit codes: 0 on success, 2 when the scenario cannot be parsed or its
//! parameters are invalid, 3 when solving fails, 1 on I/O errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use goodwill_game::report::Format;
use goodwill_game::scenario::{self, ScenarioConfig, SweepConfig};
use goodwill_game::Error;

#[derive(Parser)]
#[command(
    name = "goodwill",
    version,
    about = "Steady states of a symmetric advertising differential game"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output directory; overrides `out` in the scenario.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
}

#[derive(Subcommand)]
enum Command {
    /// Solve every concept and write the steady-state, stability and comparison reports.
    Solve { config: PathBuf },
    /// Re-solve over a grid of one model parameter.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        axis: String,
        #[arg(long, allow_negative_numbers = true)]
        lo: f64,
        #[arg(long, allow_negative_numbers = true)]
        hi: f64,
        #[arg(long)]
        steps: usize,
    },
    /// Evaluate the comparison claims only.
    Check { config: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Parse { .. } | Error::InvalidParameter { .. } | Error::InvalidAxis(_) => 2,
        Error::Io(_) => 1,
        _ => 3,
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    let format = match cli.format {
        OutputFormat::Csv => Format::Csv,
        OutputFormat::Json => Format::Json,
    };
    let load = |path: &PathBuf| -> Result<ScenarioConfig, Error> {
        let mut cfg = ScenarioConfig::load(path)?;
        if let Some(out) = &cli.out {
            cfg.run.out = out.clone();
        }
        Ok(cfg)
    };
    match &cli.command {
        Command::Solve { config } => {
            let cfg = load(config)?;
            let out = scenario::run_scenario(&cfg, format)?;
            print!("{}", scenario::summary(&out.report, &cfg.run.concepts));
            let solved = cfg
                .run
                .concepts
                .iter()
                .any(|&c| out.report.outcome(c).primary().is_some());
            if !solved {
                return Err(Error::Range(
                    "no requested concept has a steady state".into(),
                ));
            }
        }
        Command::Sweep {
            config,
            axis,
            lo,
            hi,
            steps,
        } => {
            let cfg = load(config)?;
            let sweep = SweepConfig {
                axis: axis.clone(),
                lo: *lo,
                hi: *hi,
                steps: *steps,
            };
            let path = scenario::write_sweep(&cfg, &sweep, format)?;
            println!("{}", path.display());
        }
        Command::Check { config } => {
            let cfg = load(config)?;
            let spec = cfg.model.to_spec()?;
            let report = goodwill_game::check_propositions(&spec);
            let text = goodwill_game::report::comparison_text(&report);
            print!("{text}");
            std::fs::create_dir_all(&cfg.run.out)?;
            std::fs::write(cfg.run.out.join("comparison.txt"), &text)?;
            if matches!(format, Format::Json) {
                std::fs::write(
                    cfg.run.out.join("comparison.json"),
                    scenario::comparison_json(&report),
                )?;
            }
        }
    }
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
