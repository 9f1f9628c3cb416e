//! `superlin`: JSON in, JSON or TSV reports out.
//!
//! Exit status: 0 when every check passes, 1 when a check fails, 2 for
//! unreadable or malformed input, 3 when the library rejects the input.

mod commands;
mod input;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use superlin::cartan_poincare::Assembly;
use superlin::straightening::SolveMode;
use superlin_verify::criteria::Budget;

use commands::SderhamOp;
use input::CliError;
use output::{OutFormat, Outcome};

#[derive(Parser)]
#[command(name = "superlin", version, about = "Exact superlinear algebra checks")]
struct Cli {
    /// Seed of the randomized suites.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Case budget of the randomized suites.
    #[arg(long, global = true, value_enum, default_value = "small")]
    budget: BudgetArg,
    /// Format of the report on stdout.
    #[arg(long, global = true, value_enum, default_value = "json")]
    out: OutFormat,
    /// Suppress the human-readable table on stderr.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BudgetArg {
    Small,
    Medium,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AssemblyArg {
    Generic,
    Direct,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Canonical,
    RawNatural,
    RawReversed,
}

#[derive(Subcommand)]
enum Cmd {
    /// Homology of the Cartan–Poincaré complex of a matrix F.
    CpHomology {
        input: Option<PathBuf>,
        /// Alternative to the positional input.
        #[arg(long = "F", value_name = "FILE")]
        f: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        kmax: u32,
        #[arg(long, default_value_t = 3)]
        lmax: usize,
        #[arg(long, value_enum, default_value = "generic")]
        assembly: AssemblyArg,
    },
    /// Splits a derivation of ΛV* into its odd images and the form η.
    DerivationClassify { input: PathBuf },
    /// Dimensions of derivation spaces, brute-forced for n ≤ 4.
    SderDims {
        #[arg(long, default_value_t = 4)]
        nmax: usize,
    },
    /// Checks the Lie superalgebra axioms.
    LieCheck {
        input: PathBuf,
        /// Input is (g, rho, b) data; also checks the structure conditions.
        #[arg(long)]
        rep: bool,
    },
    /// Normal forms of a tensor word in both supertensor quotients.
    TensorNormalize { input: PathBuf },
    /// Straightens a commuting family of odd derivations.
    Straighten {
        input: Option<PathBuf>,
        /// Alternative to the positional input.
        #[arg(long, value_name = "FILE")]
        family: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "canonical")]
        mode: ModeArg,
    },
    /// Factors a differential operator through jets at a point.
    JetFactor {
        input: PathBuf,
        /// Jet order; defaults to the operator's order.
        #[arg(long)]
        k: Option<u32>,
    },
    /// Order, filtration and bundle-map checks of a supermap.
    SupermapCheck { input: PathBuf },
    /// Super de Rham operator, Δ and truncated cohomology.
    Sderham {
        #[arg(long, value_name = "FILE")]
        conn: PathBuf,
        #[arg(long, value_enum)]
        op: SderhamOp,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 3)]
        cutoff: usize,
        /// Form to apply the operator to; without it, basis-wide checks run.
        #[arg(long, value_name = "FILE")]
        form: Option<PathBuf>,
    },
    /// Runs every acceptance suite.
    FuzzAll,
}

fn one_of(positional: Option<PathBuf>, flag: Option<PathBuf>, name: &str) -> Result<PathBuf, CliError> {
    positional.or(flag).ok_or_else(|| CliError::Input(format!("missing input file (positional or --{name})")))
}

fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    let budget = match cli.budget {
        BudgetArg::Small => Budget::Small,
        BudgetArg::Medium => Budget::Medium,
    };
    match &cli.cmd {
        Cmd::CpHomology { input, f, kmax, lmax, assembly } => {
            let how = match assembly {
                AssemblyArg::Generic => Assembly::Generic,
                AssemblyArg::Direct => Assembly::Direct,
            };
            commands::cp_homology(&one_of(input.clone(), f.clone(), "F")?, *kmax, *lmax, how)
        }
        Cmd::DerivationClassify { input } => commands::derivation_classify(input),
        Cmd::SderDims { nmax } => commands::sder_dims(*nmax),
        Cmd::LieCheck { input, rep } => commands::lie_check(input, *rep),
        Cmd::TensorNormalize { input } => commands::tensor_normalize(input),
        Cmd::Straighten { input, family, mode } => {
            let mode = match mode {
                ModeArg::Canonical => SolveMode::Canonical,
                ModeArg::RawNatural => SolveMode::RawNatural,
                ModeArg::RawReversed => SolveMode::RawReversed,
            };
            commands::straighten(&one_of(input.clone(), family.clone(), "family")?, mode)
        }
        Cmd::JetFactor { input, k } => commands::jet_factor(input, *k),
        Cmd::SupermapCheck { input } => commands::supermap_check(input),
        Cmd::Sderham { conn, op, k, cutoff, form } => commands::sderham(conn, *op, *k, *cutoff, form.as_deref()),
        Cmd::FuzzAll => commands::fuzz_all(cli.seed, budget),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(o) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(o.render(cli.out).as_bytes());
            if !cli.quiet {
                eprint!("{}", o.human());
            }
            ExitCode::from(if o.passed() { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
