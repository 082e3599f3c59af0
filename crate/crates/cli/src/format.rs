//! JSON instance, point and value files.
//!
//! Every residue is a decimal string. Extension ring elements are arrays of
//! `e` decimal strings, lowest power of `z` first. Coefficients are listed in
//! flat order `sum_j e_j d^(j-1)`, so `x_1` varies fastest.

use std::path::Path;

use mme_core::arith::{ExtRing, ResidueRing, Ring, Zn, Zn64};
use mme_core::{MultiPoly, Natural, PowerModulus};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SCHEMA_VERSION: &str = "1";

fn schema() -> String {
    SCHEMA_VERSION.to_string()
}

fn one() -> u32 {
    1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Scalar(String),
    Ext(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtSpec {
    pub e: usize,
    /// Coefficients of the monic modulus, ascending, `e + 1` entries.
    #[serde(rename = "E")]
    pub modulus: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub schema_version: String,
    pub r: String,
    #[serde(default = "one")]
    pub s: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ext: Option<ExtSpec>,
    pub m: usize,
    pub d: usize,
    pub coeffs: Vec<Value>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointsFile {
    #[serde(default = "schema")]
    pub schema_version: String,
    pub points: Vec<Vec<Value>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValuesFile {
    #[serde(default = "schema")]
    pub schema_version: String,
    pub values: Vec<Value>,
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("file types always serialize");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    std::fs::write(path, to_json(value)).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn check_schema(found: &str) -> Result<(), CliError> {
    if found != SCHEMA_VERSION {
        return Err(CliError::Parse(format!(
            "unsupported schema_version {found:?}, expected {SCHEMA_VERSION:?}"
        )));
    }
    Ok(())
}

pub fn parse_natural(s: &str) -> Result<Natural, CliError> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(CliError::Parse(format!("{s:?} is not a decimal natural number")));
    }
    s.parse().map_err(|_| CliError::Parse(format!("{s:?} is not a decimal natural number")))
}

/// Decimal encoding of ring elements.
pub trait Codec: Ring {
    fn encode(&self, x: &Self::Elem) -> Value;
    fn decode(&self, v: &Value) -> Result<Self::Elem, CliError>;
}

fn decode_residue<R: ResidueRing>(ring: &R, s: &str) -> Result<R::Elem, CliError> {
    let v = parse_natural(s)?;
    if &v >= ring.modulus().n() {
        return Err(CliError::Parse(format!("{v} is not reduced modulo {}", ring.modulus().n())));
    }
    Ok(ring.from_natural(&v))
}

macro_rules! residue_codec {
    ($t:ty) => {
        impl Codec for $t {
            fn encode(&self, x: &Self::Elem) -> Value {
                Value::Scalar(self.to_natural(x).to_string())
            }

            fn decode(&self, v: &Value) -> Result<Self::Elem, CliError> {
                match v {
                    Value::Scalar(s) => decode_residue(self, s),
                    Value::Ext(_) => Err(CliError::Parse("expected a decimal string, found an array".into())),
                }
            }
        }
    };
}

residue_codec!(Zn64);
residue_codec!(Zn);

impl<R: ResidueRing> Codec for ExtRing<R> {
    fn encode(&self, x: &Self::Elem) -> Value {
        Value::Ext(x.iter().map(|c| self.base().to_natural(c).to_string()).collect())
    }

    fn decode(&self, v: &Value) -> Result<Self::Elem, CliError> {
        match v {
            Value::Ext(cs) if cs.len() == self.degree() => {
                cs.iter().map(|c| decode_residue(self.base(), c)).collect()
            }
            Value::Ext(cs) => Err(CliError::Parse(format!(
                "extension element has {} entries, expected {}",
                cs.len(),
                self.degree()
            ))),
            Value::Scalar(_) => Err(CliError::Parse("expected an array of decimal strings".into())),
        }
    }
}

/// A polynomial with its evaluation points over a concrete ring.
#[derive(Clone, Debug)]
pub struct Problem<R: Ring> {
    pub f: MultiPoly<R>,
    pub points: Vec<Vec<R::Elem>>,
}

/// A validated instance, with word-size moduli kept in machine words.
#[derive(Clone, Debug)]
pub enum Loaded {
    Word(Problem<Zn64>),
    Big(Problem<Zn>),
    WordExt(Problem<ExtRing<Zn64>>),
    BigExt(Problem<ExtRing<Zn>>),
}

fn build<R: Codec>(ring: R, inst: &InstanceFile, pts: &PointsFile) -> Result<Problem<R>, CliError> {
    let coeffs = inst
        .coeffs
        .iter()
        .map(|c| ring.decode(c))
        .collect::<Result<Vec<_>, _>>()?;
    let f = MultiPoly::new(ring.clone(), inst.m, inst.d, coeffs).map_err(|e| CliError::Parse(e.to_string()))?;
    let points = pts
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            if p.len() != inst.m {
                return Err(CliError::Parse(format!("point {i} has {} coordinates, expected {}", p.len(), inst.m)));
            }
            p.iter().map(|x| ring.decode(x)).collect()
        })
        .collect::<Result<_, _>>()?;
    Ok(Problem { f, points })
}

fn ext_ring<R: Codec + ResidueRing>(base: R, spec: &ExtSpec) -> Result<ExtRing<R>, CliError> {
    if spec.e == 0 || spec.modulus.len() != spec.e + 1 {
        return Err(CliError::Parse(format!(
            "extension of degree {} needs {} modulus coefficients, found {}",
            spec.e,
            spec.e + 1,
            spec.modulus.len()
        )));
    }
    let poly = spec
        .modulus
        .iter()
        .map(|c| decode_residue(&base, c))
        .collect::<Result<Vec<_>, _>>()?;
    ExtRing::new(base, poly).map_err(|e| CliError::Parse(e.to_string()))
}

pub fn load(inst: &InstanceFile, pts: &PointsFile) -> Result<Loaded, CliError> {
    check_schema(&inst.schema_version)?;
    check_schema(&pts.schema_version)?;
    let r = parse_natural(&inst.r)?;
    if inst.s == 0 {
        return Err(CliError::Parse("s must be at least 1".into()));
    }
    if inst.d == 0 {
        return Err(CliError::Parse("d must be at least 1".into()));
    }
    let pm = PowerModulus::new(r, inst.s).map_err(|e| CliError::Parse(e.to_string()))?;
    let word = pm.n_u64().filter(|&n| n < 1 << 63).is_some();
    Ok(match (&inst.ext, word) {
        (None, true) => Loaded::Word(build(Zn64::new(pm).map_err(|e| CliError::Parse(e.to_string()))?, inst, pts)?),
        (None, false) => Loaded::Big(build(Zn::new(pm), inst, pts)?),
        (Some(spec), true) => {
            let base = Zn64::new(pm).map_err(|e| CliError::Parse(e.to_string()))?;
            Loaded::WordExt(build(ext_ring(base, spec)?, inst, pts)?)
        }
        (Some(spec), false) => Loaded::BigExt(build(ext_ring(Zn::new(pm), spec)?, inst, pts)?),
    })
}

/// The instance and point files describing `problem`.
pub fn emit<R: Codec>(
    problem: &Problem<R>,
    r: &Natural,
    s: u32,
    ext: Option<ExtSpec>,
) -> (InstanceFile, PointsFile) {
    let ring = problem.f.ring();
    let inst = InstanceFile {
        schema_version: schema(),
        r: r.to_string(),
        s,
        ext,
        m: problem.f.m(),
        d: problem.f.d(),
        coeffs: problem.f.coeffs().iter().map(|c| ring.encode(c)).collect(),
    };
    let pts = PointsFile {
        schema_version: schema(),
        points: problem
            .points
            .iter()
            .map(|p| p.iter().map(|x| ring.encode(x)).collect())
            .collect(),
    };
    (inst, pts)
}
