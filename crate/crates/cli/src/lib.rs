//! Library side of the `distbvp` command-line tool: problem files, the
//! `check`/`solve`/`integrate` commands and their output formats.
//!
//! | exit code | meaning                                   |
//! |-----------|-------------------------------------------|
//! | 0         | ok                                        |
//! | 1         | smallness condition fails                 |
//! | 2         | input error (parse, catalog, I/O, option) |
//! | 3         | solver did not converge (report written)  |

pub mod output;
pub mod problem;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use distbvp::integrate::{DEFAULT_IMPROPER_TOL, DEFAULT_TOL};
use distbvp::{catalog, check_hypotheses, hk_integrate, hks_integrate, solve, verify, SolveError, SolveOptions};
use distbvp::{HypothesisReport, IntegralResult, IntegrateError, Interpolation, ProblemError, Verification};
use serde::Serialize;
use thiserror::Error;

pub use problem::{ProblemEcho, ProblemFile};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONDITION: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_NO_CONVERGENCE: u8 = 3;

/// Tolerance for the hypothesis quadratures in `check`.
pub const CHECK_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{origin}:{line}:{column}: {message}")]
    Parse { origin: String, line: usize, column: usize, message: String },

    #[error("{path}: {message}")]
    Io { path: String, message: String },

    #[error("{0}")]
    Input(String),

    #[error("{0}")]
    NoConvergence(String),

    #[error(transparent)]
    Solve(#[from] SolveError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Solve(SolveError::Condition { .. }) => EXIT_CONDITION,
            CliError::NoConvergence(_)
            | CliError::Solve(SolveError::Integrate(IntegrateError::NonConvergence { .. }))
            | CliError::Solve(SolveError::Problem(ProblemError::Integrate(IntegrateError::NonConvergence { .. }))) => {
                EXIT_NO_CONVERGENCE
            }
            _ => EXIT_INPUT,
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

#[derive(Debug, Serialize)]
pub struct CheckReport {
    pub problem: ProblemEcho,
    pub hypotheses: HypothesisReport,
    /// Present when a solution CSV was re-verified.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<Verification>,
}

/// `check <file> [--verify <csv>]`: hypothesis report, exit 0 iff the
/// smallness condition holds.
pub fn cmd_check(file: &Path, solution: Option<&Path>, tol: f64) -> Result<(CheckReport, u8), CliError> {
    let problem = ProblemFile::read(file)?;
    let hypotheses = check_hypotheses(&problem.spec, CHECK_TOL)?;
    let verification = match solution {
        Some(path) => {
            let f = File::open(path).map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })?;
            let sol = output::read_csv(f)?;
            Some(verify(&problem.spec, &sol, tol))
        }
        None => None,
    };
    let code = if hypotheses.condition_ok { EXIT_OK } else { EXIT_CONDITION };
    Ok((CheckReport { problem: problem.echo, hypotheses, verification }, code))
}

/// Command-line overrides of the file's `[options]`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SolveOverrides {
    pub tol: Option<f64>,
    pub grid: Option<usize>,
    pub max_iter: Option<usize>,
    pub damping: Option<f64>,
    pub interpolation: Option<Interpolation>,
    pub override_condition: bool,
}

#[derive(Debug, Serialize)]
pub struct OptionsEcho {
    pub tol: f64,
    pub grid: usize,
    pub max_iter: usize,
    pub damping: f64,
    pub quad_tol: f64,
    pub interpolation: Interpolation,
    pub override_condition: bool,
}

#[derive(Debug, Serialize)]
pub struct SolveReport {
    pub problem: ProblemEcho,
    pub options: OptionsEcho,
    pub converged: bool,
    pub iterations: usize,
    pub residual: f64,
    pub bc_residuals: (f64, f64),
    pub norm_x: f64,
    pub radius: Option<f64>,
    pub within_ball: Option<bool>,
    pub final_damping: f64,
    pub grid_points: usize,
    pub csv_rows: usize,
    pub residual_history: Vec<f64>,
    pub hypotheses: HypothesisReport,
    pub verification: Verification,
}

/// `solve <file> --out-csv <p> --out-json <p>`: both files are written
/// whether or not the iteration converged. Returns the exit code.
pub fn cmd_solve(file: &Path, out_csv: &Path, out_json: &Path, overrides: &SolveOverrides) -> Result<(SolveReport, u8), CliError> {
    let problem = ProblemFile::read(file)?;
    let mut options = problem.options.apply_to(SolveOptions::default());
    if let Some(v) = overrides.tol {
        options.tol = v;
    }
    if let Some(v) = overrides.grid {
        options.grid = v;
    }
    if let Some(v) = overrides.max_iter {
        options.max_iter = v;
    }
    if let Some(v) = overrides.damping {
        options.damping = v;
    }
    if let Some(v) = overrides.interpolation {
        options.interpolation = v;
    }
    options.override_condition = overrides.override_condition;

    let res = solve(&problem.spec, &options)?;
    let verification = verify(&problem.spec, &res.solution, options.tol);
    let grid = res.solution.grid();
    let report = SolveReport {
        problem: problem.echo,
        options: OptionsEcho {
            tol: options.tol,
            grid: options.grid,
            max_iter: options.max_iter,
            damping: options.damping,
            quad_tol: options.quadrature_tol(),
            interpolation: options.interpolation,
            override_condition: options.override_condition,
        },
        converged: res.converged,
        iterations: res.iterations,
        residual: res.residual,
        bc_residuals: res.bc_residuals,
        norm_x: res.norm_x,
        radius: res.radius,
        within_ball: res.within_ball,
        final_damping: res.final_damping,
        grid_points: grid.len(),
        csv_rows: grid.len() + 2 * grid.breakpoint_indices().len(),
        residual_history: res.residual_history,
        hypotheses: res.report,
        verification,
    };

    let mut csv = create(out_csv)?;
    output::write_csv(&mut csv, &res.solution)?;
    csv.flush().map_err(|e| CliError::Io { path: out_csv.display().to_string(), message: e.to_string() })?;
    output::write_json(create(out_json)?, &report)?;
    let code = if report.converged { EXIT_OK } else { EXIT_NO_CONVERGENCE };
    Ok((report, code))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegralKind {
    /// `∫ f` of one integrand.
    Hk,
    /// `∫ g du` of a regulated pair.
    Hks,
}

#[derive(Debug, Serialize)]
pub struct IntegrateReport {
    pub names: Vec<String>,
    pub a: f64,
    pub b: f64,
    pub tol: f64,
    #[serde(flatten)]
    pub result: IntegralResult,
}

/// `integrate <hk|hks> <names> <a> <b> [--tol]`. Without `--tol`, an
/// integrand that must go through the improper limit gets the looser
/// improper-route default.
pub fn cmd_integrate(kind: IntegralKind, names: &[String], a: f64, b: f64, tol: Option<f64>) -> Result<IntegrateReport, CliError> {
    let input = |e: distbvp::CatalogError| CliError::Input(e.to_string());
    let wrong_arity = |want: usize| {
        CliError::Input(format!("expected {want} catalog name(s), got {}", names.len()))
    };
    let (result, tol) = match kind {
        IntegralKind::Hk => {
            let [name] = names else { return Err(wrong_arity(1)) };
            let f = catalog::integrand(name).map_err(input)?;
            let improper = f.antiderivative().is_none() && f.singular_at().is_some_and(|s| (a..=b).contains(&s));
            let tol = tol.unwrap_or(if improper { DEFAULT_IMPROPER_TOL } else { DEFAULT_TOL });
            (hk_integrate(&f, a, b, tol), tol)
        }
        IntegralKind::Hks => {
            let [g, u] = names else { return Err(wrong_arity(2)) };
            let g = catalog::regulated(g).map_err(input)?;
            let u = catalog::regulated(u).map_err(input)?;
            let tol = tol.unwrap_or(DEFAULT_TOL);
            (hks_integrate(&g, &u, a, b, tol), tol)
        }
    };
    let result = result.map_err(|e| match e {
        IntegrateError::NonConvergence { .. } => CliError::NoConvergence(e.to_string()),
        e => CliError::Input(e.to_string()),
    })?;
    Ok(IntegrateReport { names: names.to_vec(), a, b, tol, result })
}

/// Resolves `path` against the crate's shipped `problems/` directory.
pub fn shipped_problem(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("problems").join(name)
}
