use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use psl2_surface::certifier::DEFAULT_WITNESSES;
use psl2_surface::lfunc::Mode;
use psl2_surface_cli::{
    cmd_certify, cmd_group_check, cmd_invariants, cmd_lpoly, cmd_scan, cmd_verify, CliError,
    EllTarget, Output, EXIT_FAILURE,
};

#[derive(Parser)]
#[command(
    name = "psl2cert",
    version,
    about = "L-polynomials and PSL2 surjectivity certificates for the surface (t^3 - t) y^2 = x(x+1)(x+t^2)",
    after_help = "EXIT CODES:\n  0 success\n  1 other failure\n  2 shape violation\n  3 Weil-bound failure\n  4 out of range"
)]
struct Cli {
    /// Worker threads (default: available parallelism)
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    /// Degree 1 and 2 traces plus the functional equation
    Fe,
    /// Also count over degree 3 and 4 extensions (p <= 13)
    Full,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Fe => Mode::FunctionalEquation,
            ModeArg::Full => Mode::FullDirect,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print P_p(T) and its shape
    Lpoly {
        #[arg(long)]
        p: u64,
        #[arg(long, value_enum, default_value = "fe")]
        mode: ModeArg,
        /// JSON cache of computed polynomials
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// CSV of P_p and its shape for all odd primes up to pmax
    Scan {
        #[arg(long, default_value_t = 100)]
        pmax: u64,
    },
    /// Certify surjectivity mod ell for one prime or a range A:B
    #[command(group = clap::ArgGroup::new("target").required(true))]
    Certify {
        #[arg(long, group = "target")]
        ell: Option<u64>,
        #[arg(long, group = "target", value_name = "A:B")]
        ell_range: Option<EllTarget>,
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_WITNESSES)]
        witnesses: Vec<u64>,
        /// Write the certificate(s) as JSON
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Re-check a certificate file written by `certify --json`
    Verify { path: PathBuf },
    /// Discriminant, j-invariant and Kodaira types of the surface
    Invariants,
    /// Group-order and Gaussian-model identities for one ell <= 13
    GroupCheck {
        #[arg(long)]
        ell: u64,
    },
}

fn run(cli: Cli) -> Result<Output, CliError> {
    match cli.command {
        Command::Lpoly { p, mode, cache } => cmd_lpoly(p, mode.into(), cache.as_deref()),
        Command::Scan { pmax } => cmd_scan(pmax),
        Command::Certify {
            ell,
            ell_range,
            witnesses,
            json,
        } => {
            let target = match (ell, ell_range) {
                (Some(ell), _) => EllTarget::Single(ell),
                (None, Some(EllTarget::Single(ell))) => EllTarget::Range(ell, ell),
                (None, Some(r)) => r,
                (None, None) => unreachable!("clap requires a target"),
            };
            cmd_certify(target, &witnesses, json.as_deref())
        }
        Command::Verify { path } => cmd_verify(&path),
        Command::Invariants => cmd_invariants(),
        Command::GroupCheck { ell } => cmd_group_check(ell),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_FAILURE as u8 } else { 0 });
        }
    };
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_FAILURE as u8);
        }
    }
    let start = Instant::now();
    let result = run(cli);
    eprintln!("elapsed: {:.3?}", start.elapsed());
    match result {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.stdout.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(EXIT_FAILURE as u8);
            }
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
