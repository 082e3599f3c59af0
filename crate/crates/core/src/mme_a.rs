//! Evaluation through prime fields with Kakeya sets.
//!
//! A homogeneous `f` over `Z/nZ` is lifted to the integers, reduced modulo
//! primes `p ≡ 1 (mod d_tilde)`, evaluated on each prime field through
//! [`NiceField`], and recombined by CRT. Extension rings are first packed into
//! `Z/r'Z` by substituting an integer `M` for `z`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith::{ext_reduce_naturals, ExtRing, Natural, PowerModulus, ResidueRing, Ring, Zn};
use crate::checks::{self, Bound};
use crate::error::{Error, Result};
use crate::interp::CrtBasis;
use crate::kakeya::NiceField;
use crate::mpoly::MultiPoly;
use crate::primes::{ap_prime_search, ApPrimeResult};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MmeAConfig {
    /// Degree bounds below this are padded up before the prime search.
    pub min_degree: usize,
    /// Warn when the packed modulus of an extension instance exceeds this many bits.
    pub ext_bits_warn: u64,
}

impl Default for MmeAConfig {
    fn default() -> Self {
        Self { min_degree: 5, ext_bits_warn: 1 << 16 }
    }
}

/// Primes, prime-field contexts and CRT data for one `(n, m, d)`.
#[derive(Debug)]
pub struct MmeAPlan {
    modulus: Natural,
    m: usize,
    d: usize,
    bound: Natural,
    bound_digits: Vec<u64>,
    ap: ApPrimeResult,
    fields: Vec<NiceField>,
    crt: CrtBasis,
}

impl MmeAPlan {
    /// `d` is the padded degree bound; the magnitude bound is `d^m * n^(dm)`.
    pub fn new(modulus: &Natural, m: usize, d: usize) -> Result<Self> {
        if modulus < &Natural::from(2u32) {
            return Err(Error::Usage(format!("modulus must be at least 2, got {modulus}")));
        }
        let bound = Natural::from(d).pow(m as u32) * modulus.pow((d * m) as u32);
        let ap = ap_prime_search(d as u64, &bound)?;
        log::debug!(
            "mme_a plan n={modulus} m={m} d={d}: d_tilde={} with {} primes up to {}",
            ap.d_tilde,
            ap.primes.len(),
            ap.primes.last().unwrap()
        );
        let fields = ap
            .primes
            .par_iter()
            .map(|&p| NiceField::new(p, ap.d_tilde, m))
            .collect::<Result<Vec<_>>>()?;
        let crt = CrtBasis::new(&ap.primes)?;
        let bound_digits = crt
            .mixed_radix(&bound)
            .ok_or_else(|| Error::Internal("prime product does not exceed the bound".into()))?;
        Ok(Self { modulus: modulus.clone(), m, d, bound, bound_digits, ap, fields, crt })
    }

    pub fn bound(&self) -> &Natural {
        &self.bound
    }

    pub fn primes(&self) -> &[u64] {
        &self.ap.primes
    }

    pub fn d_tilde(&self) -> u64 {
        self.ap.d_tilde
    }

    pub fn degree_bound(&self) -> usize {
        self.d
    }

    /// `f(a)` for homogeneous `f` of total degree `deg` over `Z/nZ`.
    pub fn evaluate_homogeneous<R: ResidueRing>(
        &self,
        f: &MultiPoly<R>,
        deg: usize,
        points: &[Vec<R::Elem>],
    ) -> Result<Vec<R::Elem>> {
        let ring = f.ring();
        if ring.modulus().n() != &self.modulus || f.m() != self.m {
            return Err(Error::ModulusMismatch(format!(
                "plan for Z/{} in {} variables used with Z/{} in {}",
                self.modulus,
                self.m,
                ring.modulus().n(),
                f.m()
            )));
        }
        if f.d() > self.d {
            return Err(Error::Usage(format!("degree bound {} exceeds the plan's {}", f.d(), self.d)));
        }
        if points.iter().any(|a| a.len() != self.m) {
            return Err(Error::Usage("point dimension mismatch".into()));
        }
        if points.is_empty() || f.is_zero() {
            return Ok(vec![ring.zero(); points.len()]);
        }
        let per_prime: Vec<Vec<u64>> = self
            .fields
            .par_iter()
            .map(|nf| {
                let p = nf.kakeya().q();
                let fp = f.map_coeffs(nf.kakeya().field().clone(), |c| ring.rem_u64(c, p));
                let pts: Vec<Vec<u64>> = points
                    .iter()
                    .map(|a| a.iter().map(|x| ring.rem_u64(x, p)).collect())
                    .collect();
                nf.evaluate(&fp, deg, &pts)
            })
            .collect::<Result<_>>()?;
        let weights: Vec<R::Elem> = self.crt.weights_in(ring);
        let k = self.fields.len();
        let mut residues = vec![0u64; k];
        let mut digits = vec![0u64; k];
        let mut out = Vec::with_capacity(points.len());
        for i in 0..points.len() {
            for (r, vals) in residues.iter_mut().zip(&per_prime) {
                *r = vals[i];
            }
            self.crt.digits(&residues, &mut digits);
            checks::check(
                Bound::CrtMagnitude,
                || CrtBasis::digits_less(&digits, &self.bound_digits),
                || format!("lifted value {} is not below {}", self.crt.digits_to_natural(&digits), self.bound),
            )?;
            debug_assert!({
                let v = self.crt.digits_to_natural(&digits);
                self.ap.primes.iter().zip(&residues).all(|(&p, &x)| (&v % p).to_u64() == Some(x))
            });
            let mut acc = ring.zero();
            for (c, w) in digits.iter().zip(&weights) {
                acc = ring.mul_add(&acc, &ring.from_u64(*c), w);
            }
            out.push(acc);
        }
        Ok(out)
    }
}

type PlanKey = (Natural, usize, usize);

/// Algorithm A with a cache of plans keyed by `(n, m, padded d)`.
#[derive(Debug, Default)]
pub struct MmeA {
    config: MmeAConfig,
    plans: Mutex<HashMap<PlanKey, Arc<MmeAPlan>>>,
}

impl MmeA {
    pub fn new(config: MmeAConfig) -> Self {
        Self { config, plans: Mutex::default() }
    }

    pub fn config(&self) -> &MmeAConfig {
        &self.config
    }

    pub fn padded_degree(&self, d: usize) -> usize {
        d.max(self.config.min_degree)
    }

    pub fn plan(&self, modulus: &Natural, m: usize, d: usize) -> Result<Arc<MmeAPlan>> {
        let d = self.padded_degree(d);
        let key = (modulus.clone(), m, d);
        if let Some(p) = self.plans.lock().unwrap().get(&key) {
            return Ok(p.clone());
        }
        let plan = Arc::new(MmeAPlan::new(modulus, m, d)?);
        self.plans.lock().unwrap().insert(key, plan.clone());
        Ok(plan)
    }

    /// `f(a)` for homogeneous `f` over `Z/nZ`.
    pub fn homogeneous<R: ResidueRing>(&self, f: &MultiPoly<R>, points: &[Vec<R::Elem>]) -> Result<Vec<R::Elem>> {
        let Some(deg) = f.homogeneous_degree()? else {
            return Ok(vec![f.ring().zero(); points.len()]);
        };
        if deg == 0 {
            return Ok(vec![f.coeffs()[0].clone(); points.len()]);
        }
        self.plan(f.ring().modulus().n(), f.m(), f.d())?
            .evaluate_homogeneous(f, deg, points)
    }

    /// `f(a)` for arbitrary `f`, summing over homogeneous components.
    pub fn evaluate<R: ResidueRing>(&self, f: &MultiPoly<R>, points: &[Vec<R::Elem>]) -> Result<Vec<R::Elem>> {
        let ring = f.ring();
        let mut out = vec![ring.zero(); points.len()];
        if points.is_empty() {
            return Ok(out);
        }
        for (_, comp) in f.homogeneous_components() {
            let vals = self.homogeneous(&comp, points)?;
            for (o, v) in out.iter_mut().zip(&vals) {
                *o = ring.add(o, v);
            }
        }
        Ok(out)
    }

    /// `f(a)` for homogeneous `f` over `(Z/rZ)[z]/(E)`.
    pub fn homogeneous_ext<R: ResidueRing>(
        &self,
        f: &MultiPoly<ExtRing<R>>,
        points: &[Vec<Vec<R::Elem>>],
    ) -> Result<Vec<Vec<R::Elem>>> {
        let ctx = f.ring();
        let Some(deg) = f.homogeneous_degree()? else {
            return Ok(vec![ctx.zero(); points.len()]);
        };
        if deg == 0 {
            return Ok(vec![f.coeffs()[0].clone(); points.len()]);
        }
        let packing = ExtPacking::new(ctx, f.m(), f.d());
        if packing.modulus_bits() > self.config.ext_bits_warn {
            log::warn!(
                "packed modulus r' has {} bits (budget {})",
                packing.modulus_bits(),
                self.config.ext_bits_warn
            );
        }
        let big = Zn::new(PowerModulus::new(packing.r_prime.clone(), 1)?);
        let fp = f.map_coeffs(big.clone(), |c| packing.pack(ctx, c));
        let pts: Vec<Vec<Natural>> = points
            .iter()
            .map(|a| a.iter().map(|x| packing.pack(ctx, x)).collect())
            .collect();
        let vals = self.plan(&packing.r_prime, f.m(), f.d())?.evaluate_homogeneous(&fp, deg, &pts)?;
        vals.iter().map(|v| packing.unpack(ctx, v)).collect()
    }

    pub fn evaluate_ext<R: ResidueRing>(
        &self,
        f: &MultiPoly<ExtRing<R>>,
        points: &[Vec<Vec<R::Elem>>],
    ) -> Result<Vec<Vec<R::Elem>>> {
        let ctx = f.ring();
        let mut out = vec![ctx.zero(); points.len()];
        if points.is_empty() {
            return Ok(out);
        }
        for (_, comp) in f.homogeneous_components() {
            let vals = self.homogeneous_ext(&comp, points)?;
            for (o, v) in out.iter_mut().zip(&vals) {
                *o = ctx.add(o, v);
            }
        }
        Ok(out)
    }
}

/// Substitution `z -> M` from `(Z/rZ)[z]/(E)` into `Z/r'Z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtPacking {
    /// `M = d^m (e(r-1))^((d-1)m+1) + 1`
    pub base: Natural,
    /// `r' = M^((e-1)dm+1)`
    pub r_prime: Natural,
    pub digits: usize,
}

impl ExtPacking {
    pub fn new<R: ResidueRing>(ctx: &ExtRing<R>, m: usize, d: usize) -> Self {
        let e = ctx.degree();
        let r = ctx.base().modulus().n();
        let base = Natural::from(d).pow(m as u32)
            * (Natural::from(e) * (r - 1u32)).pow(((d - 1) * m + 1) as u32)
            + 1u32;
        let digits = (e - 1) * d * m + 1;
        let r_prime = base.pow(digits as u32);
        Self { base, r_prime, digits }
    }

    pub fn modulus_bits(&self) -> u64 {
        self.r_prime.bits()
    }

    pub fn pack<R: ResidueRing>(&self, ctx: &ExtRing<R>, x: &[R::Elem]) -> Natural {
        let base = ctx.base();
        x.iter()
            .rev()
            .fold(Natural::zero(), |acc, c| acc * &self.base + base.to_natural(c))
    }

    /// Base-`M` digits of `v` reduced modulo `(r, E)`.
    pub fn unpack<R: ResidueRing>(&self, ctx: &ExtRing<R>, v: &Natural) -> Result<Vec<R::Elem>> {
        let mut digits = Vec::with_capacity(self.digits);
        let mut v = v.clone();
        while !v.is_zero() {
            let (q, r) = v.div_rem(&self.base);
            digits.push(r);
            v = q;
        }
        if digits.len() > self.digits {
            return Err(Error::Internal(format!(
                "packed value has {} base-M digits, expected at most {}",
                digits.len(),
                self.digits
            )));
        }
        debug_assert!(digits.iter().all(|c| c < &self.base));
        if digits.is_empty() {
            digits.push(Natural::zero());
        }
        let mut out = ext_reduce_naturals(&digits, ctx);
        if out.is_empty() {
            out = ctx.zero();
        }
        Ok(out)
    }
}

pub fn mme_a<R: ResidueRing>(f: &MultiPoly<R>, points: &[Vec<R::Elem>]) -> Result<Vec<R::Elem>> {
    MmeA::default().homogeneous(f, points)
}

pub fn mme_a_ext<R: ResidueRing>(f: &MultiPoly<ExtRing<R>>, points: &[Vec<Vec<R::Elem>>]) -> Result<Vec<Vec<R::Elem>>> {
    MmeA::default().homogeneous_ext(f, points)
}

pub fn evaluate_theorem1<R: ResidueRing>(f: &MultiPoly<R>, points: &[Vec<R::Elem>]) -> Result<Vec<R::Elem>> {
    MmeA::default().evaluate(f, points)
}

pub fn evaluate_theorem1_ext<R: ResidueRing>(
    f: &MultiPoly<ExtRing<R>>,
    points: &[Vec<Vec<R::Elem>>],
) -> Result<Vec<Vec<R::Elem>>> {
    MmeA::default().evaluate_ext(f, points)
}
