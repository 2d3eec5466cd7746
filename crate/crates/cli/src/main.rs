use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use folia_cli::{list_scenarios, run, Format, RunConfig, RunError, EXIT_ERROR};

#[derive(Debug, Parser)]
#[command(name = "folia")]
#[command(about = "verify integral formulas for codimension-one foliations on sub-Riemannian manifolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the checks of a configuration
    Run {
        /// JSON run configuration.
        #[arg(long)]
        config: Option<PathBuf>,

        /// Scenario name, overriding the configuration.
        #[arg(long)]
        scenario: Option<String>,

        /// Comma-separated checks, overriding the configuration.
        #[arg(long, value_delimiter = ',')]
        checks: Vec<String>,

        /// Comma-separated node counts per axis.
        #[arg(long, value_delimiter = ',')]
        grid: Vec<usize>,

        /// Tolerance for integral checks.
        #[arg(long)]
        tolerance: Option<f64>,

        /// Report file.
        #[arg(long)]
        output: Option<PathBuf>,

        #[arg(long)]
        format: Option<Format>,

        /// Print per-term values and notes.
        #[arg(short, long, action = clap::ArgAction::Count)]
        verbose: u8,

        /// Print only the summary line.
        #[arg(short, long)]
        quiet: bool,
    },

    /// List the scenario catalog
    List {
        #[arg(long, default_value = "table")]
        format: Format,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn dispatch(command: Command) -> Result<u8, RunError> {
    match command {
        Command::Run {
            config,
            scenario,
            checks,
            grid,
            tolerance,
            output,
            format,
            verbose,
            quiet,
        } => {
            let mut cfg = match config {
                Some(path) => RunConfig::load(&path)?,
                None => RunConfig::default(),
            };
            if scenario.is_some() {
                cfg.scenario = scenario;
                cfg.profiles = None;
            }
            if !checks.is_empty() {
                cfg.checks = checks
                    .iter()
                    .map(|c| c.parse().map_err(RunError::Config))
                    .collect::<Result<_, _>>()?;
            }
            if !grid.is_empty() {
                cfg.grid = Some(grid);
            }
            if tolerance.is_some() {
                cfg.tolerance = tolerance;
            }
            if output.is_some() {
                cfg.output = output;
            }
            if let Some(f) = format {
                cfg.format = f;
            }
            let (report, code) = run(&cfg, verbose > 0)?;
            if quiet {
                print!("{}", report.table(false).lines().last().unwrap_or_default());
                println!();
            } else if cfg.output.is_none() {
                print!("{}", report.render(cfg.format, verbose > 0));
            } else {
                print!("{}", report.table(verbose > 0));
            }
            let warnings = report.summary.warnings();
            if warnings > 0 {
                eprintln!("warning: {warnings} check(s) ran outside their hypotheses");
            }
            Ok(code)
        }
        Command::List { format } => {
            let entries = list_scenarios()?;
            match format {
                Format::Structured => {
                    println!("{}", serde_json::to_string_pretty(&entries).expect("catalog serializes"))
                }
                Format::Table => {
                    for e in entries {
                        let f = e.flags;
                        println!(
                            "{:<28} {:<16} m={} n={} harmonic={} admissible={} p_curvature_invariant={} umbilical={}{}",
                            e.name,
                            e.backend,
                            e.dim,
                            e.leaf_dim,
                            f.harmonic_perp,
                            f.admissible,
                            f.p_curvature_invariant,
                            f.umbilical,
                            f.pcurv_c.map(|c| format!(" c={c}")).unwrap_or_default()
                        );
                        for (name, note) in e.expected {
                            println!("    {name}: {note}");
                        }
                    }
                }
            }
            Ok(0)
        }
    }
}
