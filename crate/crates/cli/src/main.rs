use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use distbvp_cli::{output, CliError, IntegralKind, SolveOverrides};

#[derive(Parser)]
#[command(name = "distbvp", version, about = "Solve and check distributional three-point BVPs")]
struct Cli {
    /// Log progress to stderr (RUST_LOG also works).
    #[arg(short, long, global = true)]
    verbose: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Hk,
    Hks,
}

#[derive(Clone, Copy, ValueEnum)]
enum Interp {
    Hermite,
    Linear,
}

#[derive(Subcommand)]
enum Command {
    /// Print the hypothesis report; exit 1 if the smallness condition fails.
    Check {
        file: PathBuf,
        /// Re-verify a solution CSV written by `solve`.
        #[arg(long)]
        verify: Option<PathBuf>,
        /// Tolerance for the re-verification.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Also write the report here.
        #[arg(long)]
        out_json: Option<PathBuf>,
    },
    /// Run the damped Picard iteration and write the solution and report.
    Solve {
        file: PathBuf,
        #[arg(long)]
        out_csv: PathBuf,
        #[arg(long)]
        out_json: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        max_iter: Option<usize>,
        #[arg(long)]
        damping: Option<f64>,
        #[arg(long, value_enum)]
        interp: Option<Interp>,
        /// Iterate even when the smallness condition fails.
        #[arg(long)]
        force: bool,
    },
    /// Integrate catalog functions: `hk <f> <a> <b>` or `hks <g> <u> <a> <b>`.
    Integrate {
        #[arg(value_enum)]
        kind: Kind,
        /// Catalog names followed by the bounds a and b.
        #[arg(required = true, num_args = 3..=4, allow_negative_numbers = true)]
        args: Vec<String>,
        #[arg(long)]
        tol: Option<f64>,
    },
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Check { file, verify, tol, out_json } => {
            let (report, code) = distbvp_cli::cmd_check(&file, verify.as_deref(), tol)?;
            output::write_json(std::io::stdout().lock(), &report)?;
            if let Some(path) = out_json {
                let f = std::fs::File::create(&path)
                    .map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })?;
                output::write_json(f, &report)?;
            }
            Ok(code)
        }
        Command::Solve { file, out_csv, out_json, tol, grid, max_iter, damping, interp, force } => {
            let overrides = SolveOverrides {
                tol,
                grid,
                max_iter,
                damping,
                interpolation: interp.map(|i| match i {
                    Interp::Hermite => distbvp::Interpolation::Hermite,
                    Interp::Linear => distbvp::Interpolation::Linear,
                }),
                override_condition: force,
            };
            let (report, code) = distbvp_cli::cmd_solve(&file, &out_csv, &out_json, &overrides)?;
            println!(
                "{} after {} iterations: residual {:.3e}, ‖x‖ = {:.6}, boundary residuals ({:.1e}, {:.1e})",
                if report.converged { "converged" } else { "NO CONVERGENCE" },
                report.iterations,
                report.residual,
                report.norm_x,
                report.bc_residuals.0,
                report.bc_residuals.1,
            );
            Ok(code)
        }
        Command::Integrate { kind, args, tol } => {
            let kind = match kind {
                Kind::Hk => IntegralKind::Hk,
                Kind::Hks => IntegralKind::Hks,
            };
            let (names, bounds) = args.split_at(args.len() - 2);
            let bound = |s: &str| s.parse::<f64>().map_err(|_| CliError::Input(format!("bad bound `{s}`")));
            let r = distbvp_cli::cmd_integrate(kind, names, bound(&bounds[0])?, bound(&bounds[1])?, tol)?;
            println!("value          {}", output::fmt_f64(r.result.value));
            println!("error_estimate {:.3e}", r.result.error_estimate);
            println!("method         {}", r.result.method);
            Ok(distbvp_cli::EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
