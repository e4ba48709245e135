use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use thicket_cli::{cmd_bench, cmd_plan, cmd_validate, parse_layers, CliError, PlanOptions};

/// Motion planning through permeable obstacles: single plans, benchmark
/// experiments and SVG rendering over scenario files.
#[derive(Parser)]
#[command(name = "thicket", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one plan and write its run record (and optionally an SVG).
    Plan {
        #[arg(long)]
        scenario: PathBuf,
        /// Planner profile declared in the scenario file.
        #[arg(long)]
        profile: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory for the run record.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Also render the scene to this SVG file.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Comma-separated layers: world,tree,path,quiver.
        #[arg(long, default_value = "world,tree,path")]
        layers: String,
    },
    /// Run the scenario's experiment block and write records, the
    /// aggregate table and t-test reports.
    Bench {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Plan and render to SVG without writing a run record.
    Render {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        profile: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        svg: PathBuf,
        #[arg(long, default_value = "world,tree,path")]
        layers: String,
        /// Override the profile's iteration budget.
        #[arg(long)]
        iterations: Option<u32>,
    },
    /// Parse a scenario, build its environment and smoke-plan each profile.
    ValidateScenario {
        #[arg(long)]
        scenario: PathBuf,
    },
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Plan {
            scenario,
            profile,
            seed,
            out,
            svg,
            layers,
        } => {
            let result = cmd_plan(&PlanOptions {
                scenario: &scenario,
                profile: &profile,
                seed,
                out_dir: Some(&out),
                svg: svg.as_deref(),
                layers: parse_layers(&layers)?,
                iterations: None,
            })?;
            match &result.path {
                Some(path) => {
                    println!(
                        "solved: cost {:.2} (length {:.2}, {} collision nodes, {} path nodes, {} tree nodes)",
                        result.total_cost,
                        result.path_length,
                        result.n_collision,
                        path.len(),
                        result.tree_size
                    );
                    Ok(ExitCode::SUCCESS)
                }
                None => Err(CliError::NoSolution),
            }
        }
        Command::Bench { scenario, out } => {
            let table = cmd_bench(&scenario, &out)?;
            print!("{table}");
            println!("reports written to {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Render {
            scenario,
            profile,
            seed,
            svg,
            layers,
            iterations,
        } => {
            cmd_plan(&PlanOptions {
                scenario: &scenario,
                profile: &profile,
                seed,
                out_dir: None,
                svg: Some(&svg),
                layers: parse_layers(&layers)?,
                iterations,
            })?;
            println!("rendered {}", svg.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::ValidateScenario { scenario } => {
            let summary = cmd_validate(&scenario, 50)?;
            print!("{summary}");
            println!("ok");
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
