//! Benchmark suites and the CSV they produce.
//!
//! The CSV header is fixed: `algo,r,s,e,m,d,N,wall_time_ns,per_point_ns,checked`.
//! After the rows, one comment line per (entry, non-naive algorithm) reports
//! the smallest swept `N` at which that algorithm's per-point time drops
//! below naive evaluation:
//!
//! ```text
//! # crossover algo=mme-b r=65536 s=1 e=1 m=3 d=4 N=none max_N=100000
//! ```

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::format::{self, parse_natural, Loaded, Problem};
use crate::gen::{generate, GenSpec};
use crate::{naive, with_problem, Algo, CliError, Evaluator};

pub const HEADER: [&str; 10] = ["algo", "r", "s", "e", "m", "d", "N", "wall_time_ns", "per_point_ns", "checked"];

#[derive(Clone, Debug, Default, PartialEq, Eq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Suite {
    #[serde(default = "schema")]
    pub schema_version: String,
    #[serde(default)]
    pub entries: Vec<SuiteEntry>,
}

fn schema() -> String {
    format::SCHEMA_VERSION.into()
}

fn one() -> u32 {
    1
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteEntry {
    pub algos: Vec<String>,
    pub r: String,
    #[serde(default = "one")]
    pub s: u32,
    /// Ascending coefficients of a monic extension modulus.
    #[serde(default, rename = "E")]
    pub ext: Option<Vec<String>>,
    pub m: usize,
    pub d: usize,
    /// Point counts, swept in order on prefixes of one point set.
    #[serde(rename = "N")]
    pub n: Vec<usize>,
    #[serde(default)]
    pub depth: Option<u32>,
    #[serde(default)]
    pub check: bool,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize, Serialize)]
pub struct BenchRow {
    pub algo: String,
    pub r: String,
    pub s: u32,
    pub e: usize,
    pub m: usize,
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub wall_time_ns: u128,
    pub per_point_ns: u128,
    pub checked: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub crossovers: Vec<String>,
}

fn bench_problem<R: Evaluator>(
    p: &Problem<R>,
    entry: &SuiteEntry,
    algos: &[Algo],
    e: usize,
) -> Result<Vec<BenchRow>, CliError> {
    let mut rows = Vec::new();
    for &n in &entry.n {
        let pts = &p.points[..n];
        let oracle = if entry.check { Some(naive(&p.f, pts)?) } else { None };
        for &algo in algos {
            let start = Instant::now();
            let vals = R::run(algo, &p.f, pts, entry.depth)?;
            let wall = start.elapsed().as_nanos();
            if let Some(want) = &oracle {
                if want != &vals {
                    return Err(CliError::Mismatch(format!(
                        "{algo} disagrees with naive evaluation (r={}, m={}, d={}, N={n})",
                        entry.r, entry.m, entry.d
                    )));
                }
            }
            rows.push(BenchRow {
                algo: algo.name().into(),
                r: entry.r.clone(),
                s: entry.s,
                e,
                m: entry.m,
                d: entry.d,
                n,
                wall_time_ns: wall,
                per_point_ns: wall / n.max(1) as u128,
                checked: oracle.is_some(),
            });
        }
    }
    Ok(rows)
}

/// The smallest `N` where `algo` beats naive per point, if the entry swept both.
pub fn crossover(rows: &[BenchRow], algo: &str) -> Option<usize> {
    let naive_at = |n| rows.iter().find(|r| r.algo == "naive" && r.n == n).map(|r| r.per_point_ns);
    rows.iter()
        .filter(|r| r.algo == algo)
        .find(|r| naive_at(r.n).is_some_and(|t| r.per_point_ns < t))
        .map(|r| r.n)
}

pub fn run_suite(suite: &Suite) -> Result<BenchReport, CliError> {
    if suite.schema_version != format::SCHEMA_VERSION {
        return Err(CliError::Parse(format!("unsupported schema_version {:?}", suite.schema_version)));
    }
    let mut report = BenchReport::default();
    for entry in &suite.entries {
        let algos = entry.algos.iter().map(|a| a.parse()).collect::<Result<Vec<Algo>, _>>()?;
        let max_n = entry.n.iter().copied().max().unwrap_or(0);
        if entry.n.iter().any(|&n| n == 0) {
            return Err(CliError::Parse("every N must be positive".into()));
        }
        let ext = entry
            .ext
            .as_ref()
            .map(|p| p.iter().map(|c| parse_natural(c)).collect::<Result<Vec<_>, _>>())
            .transpose()?;
        let e = ext.as_ref().map_or(1, |p| p.len().saturating_sub(1));
        let spec = GenSpec {
            seed: entry.seed,
            r: parse_natural(&entry.r)?,
            s: entry.s,
            m: entry.m,
            d: entry.d,
            n: max_n,
            ext,
            homogeneous: None,
        };
        let (inst, pts) = generate(&spec)?;
        let loaded: Loaded = format::load(&inst, &pts)?;
        let rows = with_problem!(&loaded, p => bench_problem(p, entry, &algos, e))?;
        for algo in algos.iter().filter(|a| **a != Algo::Naive) {
            if !algos.contains(&Algo::Naive) {
                break;
            }
            let n = crossover(&rows, algo.name()).map_or("none".to_string(), |n| n.to_string());
            report.crossovers.push(format!(
                "crossover algo={algo} r={} s={} e={e} m={} d={} N={n} max_N={max_n}",
                entry.r, entry.s, entry.m, entry.d
            ));
        }
        report.rows.extend(rows);
    }
    Ok(report)
}

pub fn write_csv(report: &BenchReport, out: impl Write) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::Io(e.to_string());
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(HEADER).map_err(io)?;
    for row in &report.rows {
        w.serialize(row).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))?;
    let mut out = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    for c in &report.crossovers {
        writeln!(out, "# {c}").map_err(|e| CliError::Io(e.to_string()))?;
    }
    Ok(())
}

/// Reads rows back, skipping `#` comment lines and checking the header.
pub fn read_csv(text: &str) -> Result<Vec<BenchRow>, CliError> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let header = r.headers().map_err(|e| CliError::Parse(e.to_string()))?;
    if header.iter().ne(HEADER) {
        return Err(CliError::Parse(format!("unexpected CSV header {header:?}")));
    }
    r.deserialize()
        .map(|row| row.map_err(|e| CliError::Parse(e.to_string())))
        .collect()
}

pub fn cmd_bench(suite: &Path, out: &Path) -> Result<(), CliError> {
    let suite: Suite = format::read_json(suite)?;
    let report = run_suite(&suite)?;
    let file = std::fs::File::create(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    write_csv(&report, std::io::BufWriter::new(file))
}
