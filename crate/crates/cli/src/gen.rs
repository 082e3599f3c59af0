//! Seeded random instances.

use mme_core::mpoly::ExpVec;
use mme_core::Natural;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::format::{parse_natural, ExtSpec, InstanceFile, PointsFile, Value, SCHEMA_VERSION};
use crate::CliError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenSpec {
    pub seed: u64,
    pub r: Natural,
    pub s: u32,
    pub m: usize,
    pub d: usize,
    pub n: usize,
    /// Ascending coefficients of a monic extension modulus.
    pub ext: Option<Vec<Natural>>,
    /// Keep only monomials of this total degree.
    pub homogeneous: Option<usize>,
}

impl GenSpec {
    pub fn new(seed: u64, r: u64, m: usize, d: usize, n: usize) -> Self {
        Self { seed, r: r.into(), s: 1, m, d, n, ext: None, homogeneous: None }
    }
}

pub fn random_below(rng: &mut ChaCha8Rng, n: &Natural) -> Natural {
    if let Some(n) = n.to_u64() {
        return rng.gen_range(0..n).into();
    }
    let words = (n.bits() as usize + 64).div_ceil(32);
    let digits: Vec<u32> = (0..words).map(|_| rng.gen()).collect();
    Natural::new(digits) % n
}

/// A random instance and point set, deterministic in the seed.
pub fn generate(spec: &GenSpec) -> Result<(InstanceFile, PointsFile), CliError> {
    if spec.r < Natural::from(2u32) || spec.s == 0 || spec.d == 0 {
        return Err(CliError::Parse("need r >= 2, s >= 1 and d >= 1".into()));
    }
    let n = spec.r.pow(spec.s);
    let len = spec
        .d
        .checked_pow(spec.m as u32)
        .ok_or_else(|| CliError::Parse("d^m overflows".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let e = spec.ext.as_ref().map_or(1, |p| p.len().saturating_sub(1));
    let elem = |rng: &mut ChaCha8Rng| match spec.ext {
        None => Value::Scalar(random_below(rng, &n).to_string()),
        Some(_) => Value::Ext((0..e).map(|_| random_below(rng, &n).to_string()).collect()),
    };
    let zero = match spec.ext {
        None => Value::Scalar("0".into()),
        Some(_) => Value::Ext(vec!["0".into(); e]),
    };
    let coeffs = (0..len)
        .map(|i| match spec.homogeneous {
            Some(k) if ExpVec::from_index(i, spec.m, spec.d).weight() != k => zero.clone(),
            _ => elem(&mut rng),
        })
        .collect();
    let points = (0..spec.n).map(|_| (0..spec.m).map(|_| elem(&mut rng)).collect()).collect();
    let ext = spec.ext.as_ref().map(|p| ExtSpec { e, modulus: p.iter().map(|c| c.to_string()).collect() });
    Ok((
        InstanceFile {
            schema_version: SCHEMA_VERSION.into(),
            r: spec.r.to_string(),
            s: spec.s,
            ext,
            m: spec.m,
            d: spec.d,
            coeffs,
        },
        PointsFile { schema_version: SCHEMA_VERSION.into(), points },
    ))
}

/// Parses a comma-separated list of decimal coefficients.
pub fn parse_modulus(list: &str) -> Result<Vec<Natural>, CliError> {
    list.split(',').map(|c| parse_natural(c.trim())).collect()
}
