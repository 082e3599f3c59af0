//! Command-line front end: evaluation, benchmarks, self-test and instance generation.
//!
//! Exit codes: 0 success, 1 parse or validation failure (including I/O),
//! 2 algorithm precondition or internal error, 3 `--check` mismatch,
//! 4 self-test failure.

pub mod bench;
pub mod format;
pub mod gen;
pub mod selftest;

use std::path::PathBuf;
use std::str::FromStr;

use mme_core::arith::{ExtRing, ResidueRing, Zn, Zn64};
use mme_core::mme_a::{evaluate_theorem1, evaluate_theorem1_ext};
use mme_core::mme_b::{evaluate_theorem61, evaluate_theorem61_ext, Depth, MmeBConfig};
use mme_core::MultiPoly;

use crate::format::{Codec, Loaded, Problem, Value, ValuesFile};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("algorithm error: {0}")]
    Algorithm(#[from] mme_core::Error),
    #[error("check failed: {0}")]
    Mismatch(String),
    #[error("self-test failed: {0}")]
    Selftest(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Io(_) => 1,
            CliError::Algorithm(_) => 2,
            CliError::Mismatch(_) => 3,
            CliError::Selftest(_) => 4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algo {
    Naive,
    MmeA,
    MmeB,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Naive => "naive",
            Algo::MmeA => "mme-a",
            Algo::MmeB => "mme-b",
        }
    }
}

impl FromStr for Algo {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "naive" => Ok(Algo::Naive),
            "mme-a" => Ok(Algo::MmeA),
            "mme-b" => Ok(Algo::MmeB),
            _ => Err(CliError::Parse(format!("unknown algorithm {s:?} (naive, mme-a, mme-b)"))),
        }
    }
}

impl std::fmt::Display for Algo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

fn depth_config(depth: Option<u32>) -> MmeBConfig {
    MmeBConfig { depth: depth.map_or(Depth::default(), Depth::Fixed) }
}

fn naive<R: mme_core::Ring>(f: &MultiPoly<R>, points: &[Vec<R::Elem>]) -> mme_core::Result<Vec<R::Elem>> {
    points.iter().map(|p| f.naive_eval(p)).collect()
}

/// Rings the CLI can evaluate over.
pub trait Evaluator: Codec {
    fn run(algo: Algo, f: &MultiPoly<Self>, points: &[Vec<Self::Elem>], depth: Option<u32>)
        -> mme_core::Result<Vec<Self::Elem>>;
}

macro_rules! residue_evaluator {
    ($t:ty) => {
        impl Evaluator for $t {
            fn run(
                algo: Algo,
                f: &MultiPoly<Self>,
                points: &[Vec<Self::Elem>],
                depth: Option<u32>,
            ) -> mme_core::Result<Vec<Self::Elem>> {
                match algo {
                    Algo::Naive => naive(f, points),
                    Algo::MmeA => evaluate_theorem1(f, points),
                    Algo::MmeB => evaluate_theorem61(f, points, &depth_config(depth)),
                }
            }
        }
    };
}

residue_evaluator!(Zn64);
residue_evaluator!(Zn);

impl<R: ResidueRing> Evaluator for ExtRing<R> {
    fn run(
        algo: Algo,
        f: &MultiPoly<Self>,
        points: &[Vec<Self::Elem>],
        depth: Option<u32>,
    ) -> mme_core::Result<Vec<Self::Elem>> {
        match algo {
            Algo::Naive => naive(f, points),
            Algo::MmeA => evaluate_theorem1_ext(f, points),
            Algo::MmeB => evaluate_theorem61_ext(f, points, &depth_config(depth)),
        }
    }
}

/// Runs `algo` on every point. A `--check` mismatch is reported alongside the values.
pub fn evaluate<R: Evaluator>(
    p: &Problem<R>,
    algo: Algo,
    depth: Option<u32>,
    check: bool,
) -> Result<(Vec<Value>, Option<String>), CliError> {
    let vals = R::run(algo, &p.f, &p.points, depth)?;
    let mut mismatch = None;
    if check {
        let want = naive(&p.f, &p.points)?;
        if let Some(i) = (0..want.len()).find(|&i| want[i] != vals[i]) {
            mismatch = Some(format!(
                "{algo} disagrees with naive evaluation at point {i} ({} mismatches)",
                (0..want.len()).filter(|&i| want[i] != vals[i]).count()
            ));
        }
    }
    let ring = p.f.ring();
    Ok((vals.iter().map(|v| ring.encode(v)).collect(), mismatch))
}

/// Dispatches a generic function over the ring of a [`Loaded`] instance.
#[macro_export]
macro_rules! with_problem {
    ($loaded:expr, $p:ident => $body:expr) => {
        match $loaded {
            $crate::format::Loaded::Word($p) => $body,
            $crate::format::Loaded::Big($p) => $body,
            $crate::format::Loaded::WordExt($p) => $body,
            $crate::format::Loaded::BigExt($p) => $body,
        }
    };
}

#[derive(Clone, Debug)]
pub struct EvalArgs {
    pub algo: Algo,
    pub poly: PathBuf,
    pub points: PathBuf,
    pub out: PathBuf,
    pub depth: Option<u32>,
    pub check: bool,
}

pub fn cmd_eval(args: &EvalArgs) -> Result<(), CliError> {
    let inst = format::read_json(&args.poly)?;
    let pts = format::read_json(&args.points)?;
    let loaded: Loaded = format::load(&inst, &pts)?;
    let (values, mismatch) = with_problem!(&loaded, p => evaluate(p, args.algo, args.depth, args.check))?;
    format::write_json(&args.out, &ValuesFile { schema_version: format::SCHEMA_VERSION.into(), values })?;
    match mismatch {
        Some(msg) => Err(CliError::Mismatch(msg)),
        None => Ok(()),
    }
}

/// Applies `MME_THREADS` (0 or unset means automatic) to the global thread pool.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("MME_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| CliError::Parse(format!("MME_THREADS must be a count, got {v:?}")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Parse(format!("cannot configure thread pool: {e}")))?;
    }
    Ok(())
}
