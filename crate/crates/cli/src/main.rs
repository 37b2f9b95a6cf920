use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qpencil_cli::{run, Command, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "qpencil", version, about = "Quadratic pencil factorization, certification and boundary-value solves")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// JSON input file (pencil, operator or boundary-value problem).
    #[arg(long, global = true)]
    input: Option<PathBuf>,

    /// JSON coefficient file for `pde-example`.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// CSV output path.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// JSON report path; stdout when omitted.
    #[arg(long, global = true)]
    report: Option<PathBuf>,

    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Relative tolerance for residual checks.
    #[arg(long, global = true)]
    tol: Option<f64>,

    #[arg(long, global = true, value_enum, default_value_t = ConventionArg::Auto)]
    convention: ConventionArg,

    /// Sample count (random λ, unit vectors or range angles, per command).
    #[arg(long, global = true)]
    samples: Option<usize>,

    /// Grid size (x intervals for `solve`, n_y for `pde-example`).
    #[arg(long, global = true)]
    grid: Option<usize>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Cmd {
    /// Conditions (C.1)–(C.5), Λ, kernels and eigenvalue localization for a pencil.
    Check,
    /// Factor a pencil and report the residuals.
    Factorize,
    /// Support-function samples of the numerical range of an operator.
    Numrange,
    /// Contraction, holomorphic-sector and quasi-sectorial checks.
    Semigroup,
    /// Solve a boundary-value problem with the explicit formula.
    Solve,
    /// Claims and the 2D comparison for the mixed-derivative example.
    PdeExample,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum ConventionArg {
    Real,
    Rotated,
    Auto,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = RunConfig {
        command: match cli.command {
            Cmd::Check => Command::Check,
            Cmd::Factorize => Command::Factorize,
            Cmd::Numrange => Command::Numrange,
            Cmd::Semigroup => Command::Semigroup,
            Cmd::Solve => Command::Solve,
            Cmd::PdeExample => Command::PdeExample,
        },
        input: cli.input.or(cli.config),
        out: cli.out,
        report: cli.report,
        seed: cli.seed,
        tol: cli.tol,
        convention: match cli.convention {
            ConventionArg::Real => qpencil::pde_example::ConventionChoice::Real,
            ConventionArg::Rotated => qpencil::pde_example::ConventionChoice::Rotated,
            ConventionArg::Auto => qpencil::pde_example::ConventionChoice::Auto,
        },
        samples: cli.samples,
        grid: cli.grid,
    };
    ExitCode::from(run(&config))
}
