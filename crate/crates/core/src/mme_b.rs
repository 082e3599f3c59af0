//! Evaluation over `Z/r^s Z` by recursive reduction to small prime powers.
//!
//! At depth 0 the polynomial and its low-order Hasse derivatives are tabulated
//! on a product set inside `[0, r)^m` and every point is recovered from its
//! reduction mod `r` by a Taylor correction. At depth `t >= 1` the derivatives
//! are lifted to the integers, evaluated at the small lifts of the points
//! modulo `p^m` for several primes `p` (recursing with depth `t - 1`), and
//! recombined by CRT.

use std::collections::HashMap;

use num_traits::ToPrimitive;

use crate::arith::{ext_reduce_naturals, ExtRing, Natural, PowerModulus, ResidueRing, Ring, Zn, Zn64};
use crate::checks::{self, Bound};
use crate::error::{Error, Result};
use crate::interp::{CrtBasis, HermiteBasis};
use crate::mpoly::{enumerate_exps, series_mul, taylor_shift, MultiPoly, UniPoly};
use crate::primes::{is_prime_u64, log_star, small_primes_exceeding};
use crate::prodeval::{delta_monomials, derivative_grid_sets};

/// How the recursion depth is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Depth {
    /// `t = min(c, log*(r) - 1)`, or `min(max(c, 2), log*(d (e r)^d) - 1)` for extensions.
    Auto { c: u32 },
    /// Use exactly this depth.
    Fixed(u32),
}

impl Default for Depth {
    fn default() -> Self {
        Depth::Auto { c: 2 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MmeBConfig {
    pub depth: Depth,
}

/// Depth for a plain ring `Z/r^s Z`.
pub fn choose_depth(r: &Natural, cfg: &MmeBConfig) -> u32 {
    match cfg.depth {
        Depth::Fixed(t) => t,
        Depth::Auto { c } => c.min(log_star(r).saturating_sub(1)),
    }
}

/// Depth for `(Z/rZ)[z]/(E)` with `deg E = e` and degree bound `d`.
pub fn choose_depth_ext(r: &Natural, e: usize, d: usize, cfg: &MmeBConfig) -> u32 {
    match cfg.depth {
        Depth::Fixed(t) => t,
        Depth::Auto { c } => {
            let x = Natural::from(d) * (Natural::from(e) * r).pow(d as u32);
            c.max(2).min(log_star(&x).saturating_sub(1))
        }
    }
}

/// Small lifts `ã ∈ [0, r)` of point coordinates, flattened point-major.
#[derive(Clone, Debug)]
enum SmallLifts {
    Word(Vec<u64>),
    Big(Vec<Natural>),
}

impl SmallLifts {
    fn new<R: ResidueRing>(ring: &R, points: &[Vec<R::Elem>]) -> Self {
        let r = ring.modulus().r();
        match r.to_u64() {
            Some(r) => SmallLifts::Word(points.iter().flatten().map(|x| ring.rem_u64(x, r)).collect()),
            None => SmallLifts::Big(points.iter().flatten().map(|x| ring.to_natural(x) % r).collect()),
        }
    }

    fn into_ring<S: ResidueRing>(&self, ring: &S) -> Vec<S::Elem> {
        match self {
            SmallLifts::Word(v) => v.iter().map(|&x| ring.from_u64(x)).collect(),
            SmallLifts::Big(v) => v.iter().map(|x| ring.from_natural(x)).collect(),
        }
    }

    fn max(&self) -> Natural {
        match self {
            SmallLifts::Word(v) => Natural::from(v.iter().copied().max().unwrap_or(0)),
            SmallLifts::Big(v) => v.iter().max().cloned().unwrap_or_default(),
        }
    }
}

/// The small lifts `ã_i ∈ [0, r)^m` used for the recursive calls.
pub fn recursion_points<R: ResidueRing>(ring: &R, points: &[Vec<R::Elem>]) -> Vec<Vec<Natural>> {
    let m = points.first().map_or(0, |p| p.len());
    let lifts = SmallLifts::new(ring, points);
    let flat: Vec<Natural> = match lifts {
        SmallLifts::Word(v) => v.into_iter().map(Natural::from).collect(),
        SmallLifts::Big(v) => v,
    };
    if m == 0 {
        return vec![Vec::new(); points.len()];
    }
    flat.chunks(m).map(|c| c.to_vec()).collect()
}

/// Distinct nonzero polynomials with an index map; `None` marks the zero polynomial.
fn dedupe<R: Ring>(polys: impl IntoIterator<Item = MultiPoly<R>>) -> (Vec<MultiPoly<R>>, Vec<Option<usize>>) {
    let mut seen: HashMap<Vec<R::Elem>, usize> = HashMap::new();
    let mut distinct = Vec::new();
    let mut map = Vec::new();
    for f in polys {
        if f.is_zero() {
            map.push(None);
            continue;
        }
        let next = distinct.len();
        let idx = *seen.entry(f.coeffs().to_vec()).or_insert(next);
        if idx == next {
            distinct.push(f);
        }
        map.push(Some(idx));
    }
    (distinct, map)
}

fn validate<R: ResidueRing>(ring: &R, polys: &[MultiPoly<R>], points: &[Vec<R::Elem>], m: usize) -> Result<usize> {
    let s = ring.modulus().s() as usize;
    if s == 0 {
        return Err(Error::Usage("exponent s must be at least 1".into()));
    }
    if s > m {
        return Err(Error::Usage(format!("exponent s = {s} exceeds the number of variables m = {m}")));
    }
    if polys.iter().any(|f| f.m() != m || f.ring().modulus() != ring.modulus()) {
        return Err(Error::ModulusMismatch("polynomials disagree on ring or variable count".into()));
    }
    if points.iter().any(|a| a.len() != m) {
        return Err(Error::Usage("point dimension mismatch".into()));
    }
    Ok(s)
}

/// Evaluates every polynomial at every point: `out[j][i] = polys[j](points[i])`.
///
/// All polynomials share the ring `Z/r^s Z` (with `1 <= s <= m`) and the
/// number of variables; work on identical polynomials is shared.
pub fn mme_b_batch<R: ResidueRing>(
    ring: &R,
    polys: &[MultiPoly<R>],
    points: &[Vec<R::Elem>],
    t: u32,
) -> Result<Vec<Vec<R::Elem>>> {
    let Some(m) = polys.first().map(|f| f.m()) else {
        return Ok(Vec::new());
    };
    let s = validate(ring, polys, points, m)?;
    let n = points.len();
    if n == 0 {
        return Ok(vec![Vec::new(); polys.len()]);
    }
    let (distinct, map) = dedupe(polys.iter().cloned());
    let lifts = SmallLifts::new(ring, points);
    let bar = lifts.into_ring(ring);
    let exps = enumerate_exps(m, s - 1);
    let n_exps = exps.len();

    // monos[i * n_exps + k] = (a_i - ā_i)^exps[k]
    let mut monos = Vec::with_capacity(n * n_exps);
    for (i, a) in points.iter().enumerate() {
        let delta: Vec<R::Elem> = a.iter().zip(&bar[i * m..(i + 1) * m]).map(|(x, y)| ring.sub(x, y)).collect();
        monos.extend(delta_monomials(ring, &delta, &exps));
    }

    // derivs[(j * n + i) * n_exps + k] = ∂_{exps[k]} distinct[j] at ā_i
    let derivs = if t == 0 {
        base_case(&distinct, &bar, m, s)?
    } else {
        lifted_derivatives(ring, &distinct, &lifts, n, m, s, t)?
    };
    let per_poly: Vec<Vec<R::Elem>> = distinct
        .iter()
        .enumerate()
        .map(|(j, _)| {
            (0..n)
                .map(|i| {
                    let base = (j * n + i) * n_exps;
                    ring.dot(&derivs[base..base + n_exps], &monos[i * n_exps..(i + 1) * n_exps])
                })
                .collect()
        })
        .collect();
    Ok(map
        .into_iter()
        .map(|idx| match idx {
            Some(j) => per_poly[j].clone(),
            None => vec![ring.zero(); n],
        })
        .collect())
}

/// Hasse derivatives of order `< s` at the reduced points, read off product-set tables.
///
/// Each variable uses the set of distinct reduced coordinates that occur.
fn base_case<R: ResidueRing>(
    polys: &[MultiPoly<R>],
    bar: &[R::Elem],
    m: usize,
    s: usize,
) -> Result<Vec<R::Elem>> {
    let n = bar.len() / m.max(1);
    let mut sets: Vec<Vec<R::Elem>> = vec![Vec::new(); m];
    let mut index: Vec<HashMap<R::Elem, usize>> = vec![HashMap::new(); m];
    let mut coords = vec![0usize; n * m];
    for i in 0..n {
        for j in 0..m {
            let x = &bar[i * m + j];
            let next = sets[j].len();
            let k = *index[j].entry(x.clone()).or_insert(next);
            if k == next {
                sets[j].push(x.clone());
            }
            coords[i * m + j] = k;
        }
    }
    let set_refs: Vec<&[R::Elem]> = sets.iter().map(|s| s.as_slice()).collect();
    let n_exps = enumerate_exps(m, s - 1).len();
    let mut out = Vec::with_capacity(polys.len() * n * n_exps);
    for f in polys {
        let grid = derivative_grid_sets(f, &set_refs, s - 1)?;
        for i in 0..n {
            out.extend_from_slice(grid.at(grid.index(&coords[i * m..(i + 1) * m])));
        }
    }
    Ok(out)
}

/// Primes `p` for the recursive calls: the shortest prefix with product above
/// `d (r-1)^d`, extended until `prod p^m` exceeds `bound`.
pub fn recursion_primes(r: &Natural, d: usize, m: usize, bound: &Natural) -> Result<Vec<u64>> {
    let two = Natural::from(2u32);
    let small = Natural::from(d) * (r - 1u32).pow(d as u32);
    let mut primes = small_primes_exceeding(if small < two { &two } else { &small })?;
    let mut product: Natural = primes.iter().map(|&p| Natural::from(p).pow(m as u32)).product();
    let mut p = *primes.last().unwrap();
    while &product <= bound {
        p += 1;
        while !is_prime_u64(p) {
            p += 1;
        }
        primes.push(p);
        product *= Natural::from(p).pow(m as u32);
    }
    Ok(primes)
}

/// `d^m (r^s - 1) (r - 1)^((d-1)m)`, the largest value of a lifted derivative at a small lift.
pub fn lift_bound(r: &Natural, s: u32, d: usize, m: usize) -> Natural {
    Natural::from(d).pow(m as u32) * (r.pow(s) - 1u32) * (r - 1u32).pow(((d - 1) * m) as u32)
}

fn lifted_derivatives<R: ResidueRing>(
    ring: &R,
    polys: &[MultiPoly<R>],
    lifts: &SmallLifts,
    n: usize,
    m: usize,
    s: usize,
    t: u32,
) -> Result<Vec<R::Elem>> {
    let pm = ring.modulus();
    let n_exps = enumerate_exps(m, s - 1).len();
    let d = polys.iter().map(|f| f.d()).max().unwrap_or(1);
    let (derived, map) = dedupe(polys.iter().flat_map(|f| f.hasse_all_upto(s - 1).into_iter().map(|(_, h)| h)));
    let mut out = vec![ring.zero(); polys.len() * n * n_exps];
    if derived.is_empty() {
        return Ok(out);
    }
    debug_assert!(lifts.max() < *pm.r());
    let bound = lift_bound(pm.r(), pm.s(), d, m);
    let primes = recursion_primes(pm.r(), d, m, &bound)?;
    let moduli: Vec<u64> = primes
        .iter()
        .map(|&p| {
            p.checked_pow(m as u32)
                .filter(|&q| q < 1 << 63)
                .ok_or_else(|| Error::Unsupported(format!("prime power {p}^{m} does not fit in a word")))
        })
        .collect::<Result<_>>()?;
    let crt = CrtBasis::new(&moduli)?;
    let bound_digits = crt
        .mixed_radix(&bound)
        .ok_or_else(|| Error::Internal("prime powers do not exceed the lift bound".into()))?;
    log::debug!(
        "depth {t} over {}: {} derived polynomials, {} prime powers up to {}",
        pm,
        derived.len(),
        moduli.len(),
        moduli.last().unwrap()
    );

    let k = moduli.len();
    // residues[(j * n + i) * k + l] = derived[j] at ã_i mod p_l^m
    let mut residues = vec![0u64; derived.len() * n * k];
    for (l, (&p, &q)) in primes.iter().zip(&moduli).enumerate() {
        let sub = Zn64::new(PowerModulus::from_u64(p, m as u32)?)?;
        let sub_polys: Vec<MultiPoly<Zn64>> = derived
            .iter()
            .map(|f| f.map_coeffs(sub.clone(), |c| ring.rem_u64(c, q)))
            .collect();
        let flat = lifts.into_ring(&sub);
        let sub_points: Vec<Vec<u64>> = flat.chunks(m).map(|c| c.to_vec()).collect();
        let vals = mme_b_batch(&sub, &sub_polys, &sub_points, t - 1)?;
        for (j, row) in vals.iter().enumerate() {
            for (i, v) in row.iter().enumerate() {
                residues[(j * n + i) * k + l] = *v;
            }
        }
    }

    let weights = crt.weights_in(ring);
    let mut digits = vec![0u64; k];
    let mut values = Vec::with_capacity(derived.len() * n);
    for chunk in residues.chunks(k) {
        crt.digits(chunk, &mut digits);
        checks::check(
            Bound::CrtMagnitude,
            || !CrtBasis::digits_less(&bound_digits, &digits),
            || format!("recombined value {} exceeds {bound}", crt.digits_to_natural(&digits)),
        )?;
        let mut acc = ring.zero();
        for (c, w) in digits.iter().zip(&weights) {
            acc = ring.mul_add(&acc, &ring.from_u64(*c), w);
        }
        values.push(acc);
    }
    for (slot, idx) in map.iter().enumerate() {
        let (j, e) = (slot / n_exps, slot % n_exps);
        if let Some(src) = idx {
            for i in 0..n {
                out[(j * n + i) * n_exps + e] = values[src * n + i].clone();
            }
        }
    }
    Ok(out)
}

/// Product-set evaluation with Taylor correction (depth 0).
pub fn mme_product_set<R: ResidueRing>(f: &MultiPoly<R>, points: &[Vec<R::Elem>]) -> Result<Vec<R::Elem>> {
    mme_b(f, points, 0)
}

/// `f(a_i)` over `Z/r^s Z` with recursion depth `t`.
pub fn mme_b<R: ResidueRing>(f: &MultiPoly<R>, points: &[Vec<R::Elem>], t: u32) -> Result<Vec<R::Elem>> {
    Ok(mme_b_batch(f.ring(), std::slice::from_ref(f), points, t)?.pop().unwrap())
}

/// Parameters for evaluation over `(Z/rZ)[z]/(E)` through `Z/r'^m Z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtBPlan {
    /// `ℓ = e d`, the number of interpolation nodes.
    pub ell: usize,
    /// The first prime `P >= ℓ`.
    pub big_p: u64,
    /// `r' = P^w`, the smallest power of `P` with `r' >= d (e r)^d`.
    pub r_prime: Natural,
    pub w: u32,
}

impl ExtBPlan {
    pub fn new(e: usize, d: usize, r: &Natural) -> Self {
        let ell = e * d;
        let mut big_p = ell.max(2) as u64;
        while !is_prime_u64(big_p) {
            big_p += 1;
        }
        let target = Natural::from(d) * (Natural::from(e) * r).pow(d as u32);
        let mut r_prime = Natural::from(big_p);
        let mut w = 1;
        while r_prime < target {
            r_prime *= big_p;
            w += 1;
        }
        Self { ell, big_p, r_prime, w }
    }
}

/// `f(a_i)` over `(Z/rZ)[z]/(E)` with recursion depth `t`.
pub fn mme_b_ext<R: ResidueRing>(
    f: &MultiPoly<ExtRing<R>>,
    points: &[Vec<Vec<R::Elem>>],
    t: u32,
) -> Result<Vec<Vec<R::Elem>>> {
    let ctx = f.ring();
    let m = f.m();
    if points.iter().any(|a| a.len() != m || a.iter().any(|x| x.len() != ctx.degree())) {
        return Err(Error::Usage("point dimension mismatch".into()));
    }
    if points.is_empty() {
        return Ok(Vec::new());
    }
    if f.is_zero() {
        return Ok(vec![ctx.zero(); points.len()]);
    }
    if m == 0 {
        return Ok(vec![f.coeffs()[0].clone(); points.len()]);
    }
    let plan = ExtBPlan::new(ctx.degree(), f.d(), ctx.base().modulus().n());
    let big = PowerModulus::new(plan.r_prime.clone(), m as u32)?;
    match big.n_u64() {
        Some(n) if n < 1 << 63 => ext_via(&Zn64::new(big)?, &plan, f, points, t),
        _ => ext_via(&Zn::new(big), &plan, f, points, t),
    }
}

fn ext_via<R: ResidueRing, G: ResidueRing>(
    big: &G,
    plan: &ExtBPlan,
    f: &MultiPoly<ExtRing<R>>,
    points: &[Vec<Vec<R::Elem>>],
    t: u32,
) -> Result<Vec<Vec<R::Elem>>> {
    let ctx = f.ring();
    let base = ctx.base();
    let (e, m, ell) = (ctx.degree(), f.m(), plan.ell);
    let n = points.len();
    let lift = |x: &R::Elem| big.from_natural(&base.to_natural(x));

    // ∂_exp f_u for every coefficient slice u < e and |exp| < m
    let exps = enumerate_exps(m, m - 1);
    let n_exps = exps.len();
    let mut derived = Vec::with_capacity(e * n_exps);
    for u in 0..e {
        let fu = f.map_coeffs(big.clone(), |c| lift(&c[u]));
        derived.extend(fu.hasse_all_upto(m - 1).into_iter().map(|(_, h)| h));
    }

    // taylor[(i * ell + j) * m + k] = coordinate k of a_i as a polynomial in w = z - j
    let mut taylor: Vec<Vec<G::Elem>> = Vec::with_capacity(n * ell * m);
    for a in points {
        for j in 0..ell {
            let shift = big.from_u64(j as u64);
            for x in a {
                let p = UniPoly::new(big.clone(), x.iter().map(&lift).collect());
                let mut c = taylor_shift(&p, &shift).into_coeffs();
                c.resize(m.max(c.len()), big.zero());
                taylor.push(c);
            }
        }
    }
    let centers: Vec<Vec<G::Elem>> = taylor.chunks(m).map(|c| c.iter().map(|s| s[0].clone()).collect()).collect();
    let vals = mme_b_batch(big, &derived, &centers, t)?;

    checks::check(
        Bound::UnitDifference,
        || (ell as u64) <= plan.big_p,
        || format!("nodes 0..{ell} have differences divisible by P = {}", plan.big_p),
    )?;
    let basis = HermiteBasis::new(big, &(0..ell).map(|j| (big.from_u64(j as u64), m)).collect::<Vec<_>>())?;
    // (j + w)^u mod w^m
    let shifts: Vec<Vec<Vec<G::Elem>>> = (0..ell)
        .map(|j| {
            let lin = vec![big.from_u64(j as u64), big.one()];
            let mut acc = vec![big.one()];
            let mut out = Vec::with_capacity(e);
            for _ in 0..e {
                out.push(acc.clone());
                acc = series_mul(big, &acc, &lin, m);
            }
            out
        })
        .collect();

    let mut out = Vec::with_capacity(n);
    let mut blocks: Vec<Vec<G::Elem>> = Vec::with_capacity(ell);
    for i in 0..n {
        blocks.clear();
        for j in 0..ell {
            let pt = i * ell + j;
            let deltas: Vec<Vec<G::Elem>> = (0..m)
                .map(|k| {
                    let mut c = taylor[pt * m + k].clone();
                    c[0] = big.zero();
                    c.truncate(m);
                    c
                })
                .collect();
            // δ^exp mod w^m for every |exp| < m
            let monos: Vec<Vec<G::Elem>> = exps
                .iter()
                .map(|x| {
                    let mut acc = vec![big.one()];
                    for (k, &p) in x.0.iter().enumerate() {
                        for _ in 0..p {
                            acc = series_mul(big, &acc, &deltas[k], m);
                        }
                    }
                    acc
                })
                .collect();
            let mut block = vec![big.zero(); m];
            for u in 0..e {
                let mut inner = vec![big.zero(); m];
                for (x, mono) in monos.iter().enumerate() {
                    let v = &vals[u * n_exps + x][pt];
                    if big.is_zero(v) {
                        continue;
                    }
                    for (o, c) in inner.iter_mut().zip(mono) {
                        *o = big.mul_add(o, v, c);
                    }
                }
                let term = series_mul(big, &shifts[j][u], &inner, m);
                for (o, c) in block.iter_mut().zip(&term) {
                    *o = big.add(o, c);
                }
            }
            blocks.push(block);
        }
        let refs: Vec<&[G::Elem]> = blocks.iter().map(|b| b.as_slice()).collect();
        let q = basis.interpolate(&refs)?;
        checks::check(
            Bound::HermiteDegree,
            || q.degree().map_or(true, |deg| deg < ell * m),
            || format!("interpolant degree {:?} is not below {}", q.degree(), ell * m),
        )?;
        let coeffs: Vec<Natural> = q.coeffs().iter().map(|c| big.to_natural(c)).collect();
        let mut v = ext_reduce_naturals(&coeffs, ctx);
        if v.is_empty() {
            v = ctx.zero();
        }
        out.push(v);
    }
    Ok(out)
}

/// Chooses the depth and evaluates over `Z/r^s Z`.
///
/// When `s > m` the ring is treated as `Z/nZ` with `n = r^s`.
pub fn evaluate_theorem61<R: ResidueRing>(
    f: &MultiPoly<R>,
    points: &[Vec<R::Elem>],
    cfg: &MmeBConfig,
) -> Result<Vec<R::Elem>> {
    let pm = f.ring().modulus();
    if pm.s() as usize <= f.m() {
        return mme_b(f, points, choose_depth(pm.r(), cfg));
    }
    let flat = R::for_modulus(PowerModulus::new(pm.n().clone(), 1)?)?;
    let g = f.map_coeffs(flat.clone(), |c| c.clone());
    mme_b(&g, points, choose_depth(pm.n(), cfg))
}

/// Chooses the depth and evaluates over `(Z/rZ)[z]/(E)`.
pub fn evaluate_theorem61_ext<R: ResidueRing>(
    f: &MultiPoly<ExtRing<R>>,
    points: &[Vec<Vec<R::Elem>>],
    cfg: &MmeBConfig,
) -> Result<Vec<Vec<R::Elem>>> {
    let ctx = f.ring();
    let t = choose_depth_ext(ctx.base().modulus().n(), ctx.degree(), f.d(), cfg);
    mme_b_ext(f, points, t)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::mpoly::ExpVec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_poly(ring: &Zn64, m: usize, d: usize, rng: &mut ChaCha8Rng) -> MultiPoly<Zn64> {
        let n = ring.n();
        MultiPoly::from_fn(ring.clone(), m, d, |_| rng.gen_range(0..n))
    }

    fn random_points(n: u64, m: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<u64>> {
        (0..count).map(|_| (0..m).map(|_| rng.gen_range(0..n)).collect()).collect()
    }

    fn assert_naive(f: &MultiPoly<Zn64>, pts: &[Vec<u64>], got: &[u64]) {
        for (p, v) in pts.iter().zip(got) {
            assert_eq!(*v, f.naive_eval(p).unwrap(), "at {p:?}");
        }
    }

    #[test]
    fn product_set_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let z7 = Zn64::with_power(7, 1).unwrap();
        let f = random_poly(&z7, 2, 3, &mut rng);
        let pts = random_points(7, 2, 15, &mut rng);
        assert_naive(&f, &pts, &mme_product_set(&f, &pts).unwrap());

        let z4 = Zn64::with_power(2, 2).unwrap();
        let mut sq = MultiPoly::zero(z4.clone(), 2, 3);
        sq.set_coeff(&ExpVec(vec![2, 0]), 1).unwrap();
        assert_eq!(mme_product_set(&sq, &[vec![3, 0]]).unwrap(), vec![1]);

        let z9 = Zn64::with_power(3, 2).unwrap();
        let g = random_poly(&z9, 2, 3, &mut rng);
        let pts = random_points(9, 2, 20, &mut rng);
        assert_naive(&g, &pts, &mme_product_set(&g, &pts).unwrap());

        let z8 = Zn64::with_power(2, 3).unwrap();
        let h = random_poly(&z8, 2, 3, &mut rng);
        assert!(mme_product_set(&h, &[vec![1, 1]]).is_err());
    }

    #[test]
    fn depths_agree_with_naive() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let z97 = Zn64::with_power(97, 1).unwrap();
        let f = random_poly(&z97, 2, 3, &mut rng);
        let pts = random_points(97, 2, 20, &mut rng);
        let t0 = mme_b(&f, &pts, 0).unwrap();
        let t1 = mme_b(&f, &pts, 1).unwrap();
        let t2 = mme_b(&f, &pts, 2).unwrap();
        assert_naive(&f, &pts, &t1);
        assert_eq!(t0, t1);
        assert_eq!(t1, t2);
    }

    #[test]
    fn composite_prime_powers() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (r, s, m) in [(6, 2, 2), (2, 3, 3), (12, 2, 3)] {
            let ring = Zn64::with_power(r, s).unwrap();
            let f = random_poly(&ring, m, 3, &mut rng);
            let pts = random_points(ring.n(), m, 12, &mut rng);
            for t in 0..=2 {
                assert_naive(&f, &pts, &mme_b(&f, &pts, t).unwrap());
            }
        }
    }

    #[test]
    fn lifted_value_may_equal_bound() {
        // x + 1 at x = 1 over Z/2 lifts to exactly 2 = lift_bound(2, 1, 2, 1).
        let ring = Zn64::with_power(2, 1).unwrap();
        let f = MultiPoly::new(ring, 1, 2, vec![1, 1]).unwrap();
        assert_eq!(lift_bound(&Natural::from(2u32), 1, 2, 1), Natural::from(2u32));
        assert_eq!(mme_b(&f, &[vec![1]], 1).unwrap(), vec![0]);
    }

    #[test]
    fn recursion_uses_small_lifts() {
        // Coordinates near r^s would overflow the prime bound if lifted from [0, r^s).
        let ring = Zn64::with_power(3, 3).unwrap();
        let pts = vec![vec![26, 25, 24], vec![13, 26, 1]];
        for p in recursion_points(&ring, &pts) {
            assert!(p.iter().all(|x| x < &Natural::from(3u32)));
        }
        let f = MultiPoly::from_fn(ring.clone(), 3, 4, |e| (e.weight() as u64 * 5 + 26) % 27);
        let bound = lift_bound(&Natural::from(3u32), 3, 4, 3);
        let primes = recursion_primes(&Natural::from(3u32), 4, 3, &bound).unwrap();
        let product: Natural = primes.iter().map(|&p| Natural::from(p).pow(3)).product();
        let big_lift = Natural::from(4u32).pow(3) * (Natural::from(26u32)).pow(10);
        assert!(big_lift > product);
        assert_naive(&f, &pts, &mme_b(&f, &pts, 1).unwrap());
    }

    #[test]
    fn batch_shares_duplicates() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let ring = Zn64::with_power(5, 1).unwrap();
        let f = random_poly(&ring, 2, 3, &mut rng);
        let zero = MultiPoly::zero(ring.clone(), 2, 3);
        let pts = random_points(5, 2, 7, &mut rng);
        let out = mme_b_batch(&ring, &[f.clone(), zero, f.clone()], &pts, 1).unwrap();
        assert_eq!(out[0], out[2]);
        assert_eq!(out[1], vec![0; 7]);
        assert_naive(&f, &pts, &out[0]);
    }

    #[test]
    fn depth_selection() {
        let auto = |c| MmeBConfig { depth: Depth::Auto { c } };
        assert_eq!(choose_depth(&Natural::from(2u32), &auto(5)), 0);
        assert_eq!(choose_depth(&Natural::from(65536u32), &auto(2)), 2);
        assert_eq!(choose_depth(&Natural::from(65536u32), &auto(7)), 3);
        assert_eq!(choose_depth(&Natural::from(5u32), &MmeBConfig { depth: Depth::Fixed(1) }), 1);
        assert_eq!(log_star(&Natural::from(65536u32)), 4);
    }

    #[test]
    fn ext_plan_invariants() {
        for (e, d, r) in [(3, 3, 2u32), (2, 4, 4), (1, 2, 97)] {
            let p = ExtBPlan::new(e, d, &Natural::from(r));
            assert!(is_prime_u64(p.big_p) && p.big_p as usize >= p.ell && p.big_p as usize <= 2 * p.ell.max(2));
            let target = Natural::from(d) * Natural::from(e as u32 * r).pow(d as u32);
            assert!(p.r_prime >= target);
            assert!(p.r_prime.clone() / p.big_p < target);
        }
    }

    fn ext_random(ctx: &ExtRing<Zn64>, m: usize, d: usize, rng: &mut ChaCha8Rng) -> MultiPoly<ExtRing<Zn64>> {
        let n = ctx.base().n();
        let e = ctx.degree();
        MultiPoly::from_fn(ctx.clone(), m, d, |_| (0..e).map(|_| rng.gen_range(0..n)).collect())
    }

    #[test]
    fn extension_rings() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let f8 = ExtRing::new(Zn64::with_power(2, 1).unwrap(), vec![1, 1, 0, 1]).unwrap();
        let gr = ExtRing::new(Zn64::with_power(2, 2).unwrap(), vec![1, 1, 1]).unwrap();
        for ctx in [f8, gr] {
            let n = ctx.base().n();
            let f = ext_random(&ctx, 2, 3, &mut rng);
            let pts: Vec<Vec<Vec<u64>>> = (0..10)
                .map(|_| (0..2).map(|_| (0..ctx.degree()).map(|_| rng.gen_range(0..n)).collect()).collect())
                .collect();
            for t in 0..=1 {
                let got = mme_b_ext(&f, &pts, t).unwrap();
                for (p, v) in pts.iter().zip(&got) {
                    assert_eq!(*v, f.naive_eval(p).unwrap());
                }
            }
        }
    }

    #[test]
    fn degree_one_extension_matches_base() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let base = Zn64::with_power(13, 1).unwrap();
        let ext = ExtRing::new(base.clone(), vec![4, 1]).unwrap();
        let f = random_poly(&base, 2, 3, &mut rng);
        let fe = f.map_coeffs(ext.clone(), |c| vec![*c]);
        let pts = random_points(13, 2, 8, &mut rng);
        let pe: Vec<Vec<Vec<u64>>> = pts.iter().map(|p| p.iter().map(|x| vec![*x]).collect()).collect();
        let a = mme_b(&f, &pts, 1).unwrap();
        let b: Vec<u64> = mme_b_ext(&fe, &pe, 1).unwrap().into_iter().map(|v| v[0]).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn driver_is_independent_of_c() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let ring = Zn64::with_power(1 << 16, 1).unwrap();
        let f = random_poly(&ring, 2, 3, &mut rng);
        let pts = random_points(1 << 16, 2, 10, &mut rng);
        let outs: Vec<_> = (0..=2)
            .map(|c| evaluate_theorem61(&f, &pts, &MmeBConfig { depth: Depth::Auto { c } }).unwrap())
            .collect();
        assert_naive(&f, &pts, &outs[0]);
        assert!(outs.windows(2).all(|w| w[0] == w[1]));
    }
}
