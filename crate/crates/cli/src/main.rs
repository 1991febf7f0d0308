use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use confmodel::continuation::PolarGridSpec;
use confmodel::verify::Tolerances;
use confmodel_cli::{
    cmd_model, cmd_render, cmd_report, cmd_verify, parse_grid, report_json, CliError,
    EXIT_INVALID_INPUT, EXIT_OK, EXIT_VERIFY_FAILED,
};

/// Polynomial conformal models for finite Blaschke products.
#[derive(Parser)]
#[command(name = "confmodel", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn grid_arg(s: &str) -> Result<PolarGridSpec, String> {
    parse_grid(s).map_err(|e| e.to_string())
}

#[derive(Subcommand)]
enum Command {
    /// Build the model for a Blaschke product and write it as JSON.
    Model {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Continuation grid, radii x angles.
        #[arg(long, default_value = "64x256", value_parser = grid_arg)]
        grid: PolarGridSpec,
    },
    /// Check a model against its product; prints the report as JSON.
    Verify {
        input: PathBuf,
        model: PathBuf,
        /// Residual and boundary tolerance.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "64x256", value_parser = grid_arg)]
        grid: PolarGridSpec,
    },
    /// Draw the level-curve figures for the product and its polynomial.
    Render {
        input: PathBuf,
        model: PathBuf,
        /// Output files are PREFIX_B.svg and PREFIX_p.svg.
        prefix: String,
        #[arg(long, default_value_t = 800)]
        size: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Print critical points and values (degree at most three).
    Report { input: PathBuf },
}

fn run(command: Command) -> Result<i32, CliError> {
    match command {
        Command::Model {
            input,
            output,
            grid,
        } => {
            let file = cmd_model(&input, &output, grid)?;
            println!(
                "{} model written to {} (residual {:e})",
                file.case,
                output.display(),
                file.residual
            );
            Ok(EXIT_OK)
        }
        Command::Verify {
            input,
            model,
            tol,
            seed,
            grid,
        } => {
            let tolerances = Tolerances {
                residual: tol,
                boundary: tol,
                ..Tolerances::default()
            };
            let report = cmd_verify(&input, &model, grid, &tolerances, seed)?;
            print!("{}", report_json(&report));
            Ok(if report.passed {
                EXIT_OK
            } else {
                EXIT_VERIFY_FAILED
            })
        }
        Command::Render {
            input,
            model,
            prefix,
            size,
            tol,
        } => {
            let (left, right) = cmd_render(&input, &model, &prefix, size, tol)?;
            println!("{}\n{}", left.display(), right.display());
            Ok(EXIT_OK)
        }
        Command::Report { input } => {
            print!("{}", cmd_report(&input)?);
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_INVALID_INPUT as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let code = run(cli.command).unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.exit_code()
    });
    ExitCode::from(code as u8)
}
