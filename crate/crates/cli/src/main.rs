use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mme_cli::gen::{generate, parse_modulus, GenSpec};
use mme_cli::{bench, cmd_eval, configure_threads, format, selftest, Algo, CliError, EvalArgs};

/// Multivariate multipoint evaluation over Z/r^s Z and its extension rings.
#[derive(Parser)]
#[command(name = "mme", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a polynomial at a list of points.
    Eval {
        #[arg(long, value_parser = parse_algo)]
        algo: Algo,
        #[arg(long)]
        poly: PathBuf,
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Recursion depth for mme-b, overriding the automatic choice.
        #[arg(long)]
        depth: Option<u32>,
        /// Compare against naive evaluation; exit 3 on mismatch.
        #[arg(long)]
        check: bool,
    },
    /// Run a benchmark suite and write CSV.
    Bench {
        #[arg(long)]
        suite: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the built-in invariant checks.
    Selftest,
    /// Write a random instance and point set.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        r: String,
        #[arg(long, default_value_t = 1)]
        s: u32,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        d: usize,
        /// Number of points.
        #[arg(long, default_value_t = 10)]
        n: usize,
        /// Monic extension modulus, ascending coefficients separated by commas.
        #[arg(long = "ext-modulus")]
        ext_modulus: Option<String>,
        /// Keep only monomials of this total degree.
        #[arg(long)]
        homogeneous: Option<usize>,
        #[arg(long)]
        poly: PathBuf,
        #[arg(long)]
        points: PathBuf,
    },
}

fn parse_algo(s: &str) -> Result<Algo, String> {
    s.parse().map_err(|e: CliError| e.to_string())
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Eval { algo, poly, points, out, depth, check } => {
            cmd_eval(&EvalArgs { algo, poly, points, out, depth, check })
        }
        Command::Bench { suite, out } => bench::cmd_bench(&suite, &out),
        Command::Selftest => {
            let failed = selftest::run(&mut std::io::stdout());
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::Selftest(failed.join(", ")))
            }
        }
        Command::Gen { seed, r, s, m, d, n, ext_modulus, homogeneous, poly, points } => {
            let spec = GenSpec {
                seed,
                r: format::parse_natural(&r)?,
                s,
                m,
                d,
                n,
                ext: ext_modulus.as_deref().map(parse_modulus).transpose()?,
                homogeneous,
            };
            let (inst, pts) = generate(&spec)?;
            format::load(&inst, &pts)?;
            format::write_json(&poly, &inst)?;
            format::write_json(&points, &pts)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mme: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
