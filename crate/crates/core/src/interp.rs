//! Chinese remaindering and Hermite interpolation over rings.

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{inv_mod_natural, inv_mod_u64, mul_mod_u64, Natural, ResidueRing, Ring, UnitRing};
use crate::error::{Error, Result};
use crate::mpoly::{series_mul, taylor_shift, UniPoly};

/// Residues modulo pairwise coprime moduli.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrtInstance {
    pub moduli: Vec<Natural>,
    pub residues: Vec<Natural>,
}

/// The unique `v < prod(moduli)` with `v ≡ residues[i] (mod moduli[i])`.
pub fn crt_combine(inst: &CrtInstance) -> Result<Natural> {
    if inst.moduli.len() != inst.residues.len() {
        return Err(Error::Usage("moduli and residues differ in length".into()));
    }
    let mut v = Natural::zero();
    let mut prod = Natural::one();
    for (n, x) in inst.moduli.iter().zip(&inst.residues) {
        if n < &Natural::from(2u32) {
            return Err(Error::Usage(format!("modulus {n} is below 2")));
        }
        if x >= n {
            return Err(Error::Usage(format!("residue {x} is not reduced modulo {n}")));
        }
        let inv = inv_mod_natural(&(&prod % n), n)
            .ok_or_else(|| Error::Usage(format!("modulus {n} is not coprime to the others")))?;
        let cur = &v % n;
        let diff = if x >= &cur { x - &cur } else { n - (&cur - x) };
        let t = (diff * inv) % n;
        v += &prod * t;
        prod *= n;
    }
    Ok(v)
}

/// Precomputed Garner data for a fixed list of word-size moduli.
///
/// Values are handled as mixed-radix digits `c_k < n_k` with
/// `v = sum_k c_k * n_0 * ... * n_(k-1)`.
#[derive(Clone, Debug)]
pub struct CrtBasis {
    moduli: Vec<u64>,
    inv_prefix: Vec<u64>,
    prefix_mod: Vec<Vec<u64>>,
    prefixes: Vec<Natural>,
    product: Natural,
}

impl CrtBasis {
    pub fn new(moduli: &[u64]) -> Result<Self> {
        if moduli.is_empty() {
            return Err(Error::Usage("at least one modulus is required".into()));
        }
        let mut prefixes = Vec::with_capacity(moduli.len());
        let mut inv_prefix = Vec::with_capacity(moduli.len());
        let mut prefix_mod = Vec::with_capacity(moduli.len());
        let mut prod = Natural::one();
        for (k, &n) in moduli.iter().enumerate() {
            if n < 2 {
                return Err(Error::Usage(format!("modulus {n} is below 2")));
            }
            let row: Vec<u64> = prefixes
                .iter()
                .map(|p: &Natural| (p % n).to_u64().unwrap())
                .collect();
            let p_mod = (&prod % n).to_u64().unwrap();
            let inv = inv_mod_u64(p_mod, n).ok_or_else(|| {
                Error::Usage(format!("modulus {n} (index {k}) is not coprime to the others"))
            })?;
            prefix_mod.push(row);
            inv_prefix.push(inv);
            prefixes.push(prod.clone());
            prod *= n;
        }
        Ok(Self {
            moduli: moduli.to_vec(),
            inv_prefix,
            prefix_mod,
            prefixes,
            product: prod,
        })
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn product(&self) -> &Natural {
        &self.product
    }

    /// Mixed-radix digits of the CRT solution for `residues`.
    pub fn digits(&self, residues: &[u64], out: &mut [u64]) {
        for k in 0..self.moduli.len() {
            let n = self.moduli[k];
            let mut acc: u128 = 0;
            for (c, p) in out[..k].iter().zip(&self.prefix_mod[k]) {
                acc += *c as u128 * *p as u128;
                if acc >> 127 != 0 {
                    acc %= n as u128;
                }
            }
            let partial = (acc % n as u128) as u64;
            let x = residues[k] % n;
            let diff = if x >= partial { x - partial } else { x + (n - partial) };
            out[k] = mul_mod_u64(diff, self.inv_prefix[k], n);
        }
    }

    pub fn digits_to_natural(&self, digits: &[u64]) -> Natural {
        digits
            .iter()
            .zip(&self.prefixes)
            .map(|(&c, p)| p * c)
            .sum()
    }

    pub fn combine(&self, residues: &[u64]) -> Natural {
        let mut digits = vec![0; self.moduli.len()];
        self.digits(residues, &mut digits);
        self.digits_to_natural(&digits)
    }

    /// Mixed-radix digits of `v`, or `None` if `v >= product`.
    pub fn mixed_radix(&self, v: &Natural) -> Option<Vec<u64>> {
        if v >= &self.product {
            return None;
        }
        let mut v = v.clone();
        Some(
            self.moduli
                .iter()
                .map(|&n| {
                    let (q, r) = v.div_rem(&Natural::from(n));
                    v = q;
                    r.to_u64().unwrap()
                })
                .collect(),
        )
    }

    /// Whether the value with digits `a` is below the value with digits `b`.
    pub fn digits_less(a: &[u64], b: &[u64]) -> bool {
        for (x, y) in a.iter().zip(b).rev() {
            if x != y {
                return x < y;
            }
        }
        false
    }

    /// Radix weights `n_0 * ... * n_(k-1)` reduced into `ring`.
    pub fn weights_in<R: ResidueRing>(&self, ring: &R) -> Vec<R::Elem> {
        self.prefixes.iter().map(|p| ring.from_natural(p)).collect()
    }
}

/// Taylor data of `f` at `node`: the coefficients of `(x - node)^j`, `j < multiplicity`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HermiteBlock<R: Ring> {
    pub node: R::Elem,
    pub taylor: Vec<R::Elem>,
}

impl<R: Ring> HermiteBlock<R> {
    pub fn multiplicity(&self) -> usize {
        self.taylor.len()
    }

    /// The block of `f` at `node` with the given multiplicity.
    pub fn of(f: &UniPoly<R>, node: &R::Elem, multiplicity: usize) -> Self {
        let shifted = taylor_shift(f, node);
        let taylor = (0..multiplicity).map(|j| shifted.coeff(j)).collect();
        Self { node: node.clone(), taylor }
    }
}

fn pow_poly_mod<R: Ring>(p: &UniPoly<R>, e: usize, modulus: &UniPoly<R>) -> Result<UniPoly<R>> {
    let mut acc = UniPoly::new(p.ring().clone(), vec![p.ring().one()]);
    for _ in 0..e {
        acc = acc.mul(p).div_rem_monic(modulus)?.1;
    }
    Ok(acc)
}

/// Precomputed Hermite interpolation for fixed nodes and multiplicities.
///
/// `basis[i][j] = δ_i (x - a_i)^j mod W` with `W = prod (x - a_i)^(e_i)` and the
/// idempotents `δ_i = 1 - λ_i^(e_i)`, so interpolation is a linear combination.
#[derive(Clone, Debug)]
pub struct HermiteBasis<R: Ring> {
    ring: R,
    nodes: Vec<(R::Elem, usize)>,
    basis: Vec<Vec<Vec<R::Elem>>>,
    degree_bound: usize,
}

impl<R: UnitRing> HermiteBasis<R> {
    pub fn new(ring: &R, nodes: &[(R::Elem, usize)]) -> Result<Self> {
        if nodes.iter().any(|(_, e)| *e == 0) {
            return Err(Error::Usage("multiplicities must be positive".into()));
        }
        for i in 0..nodes.len() {
            for j in i + 1..nodes.len() {
                let diff = ring.sub(&nodes[i].0, &nodes[j].0);
                if ring.inv(&diff).is_err() {
                    return Err(Error::Contract(format!(
                        "nodes {i} and {j} differ by a non-unit ({:?} - {:?})",
                        nodes[i].0, nodes[j].0
                    )));
                }
            }
        }
        let linear: Vec<UniPoly<R>> = nodes
            .iter()
            .map(|(a, _)| UniPoly::linear(ring.clone(), a))
            .collect();
        let one = UniPoly::new(ring.clone(), vec![ring.one()]);
        let power = |p: &UniPoly<R>, e: usize| (0..e).fold(one.clone(), |acc, _| acc.mul(p));
        let w = linear
            .iter()
            .zip(nodes)
            .fold(one.clone(), |acc, (l, (_, e))| acc.mul(&power(l, *e)));
        let degree_bound: usize = nodes.iter().map(|(_, e)| e).sum();

        let mut basis = Vec::with_capacity(nodes.len());
        for (i, (a, e)) in nodes.iter().enumerate() {
            let others = linear
                .iter()
                .zip(nodes)
                .enumerate()
                .filter(|(j, _)| *j != i)
                .fold(one.clone(), |acc, (_, (l, (_, ej)))| acc.mul(&power(l, *ej)));
            let r_i = others.eval(a);
            let r_inv = ring.inv(&r_i)?;
            // λ_i = r_i^{-1} h_i (x - a_i) = 1 - r_i^{-1} prod_{j != i} (x - a_j)^{e_j}
            let lambda = one.sub(&others.scale(&r_inv));
            let delta = one.sub(&pow_poly_mod(&lambda, *e, &w)?);
            if cfg!(debug_assertions) {
                for (j, (b, ej)) in nodes.iter().enumerate() {
                    let block = HermiteBlock::of(&delta, b, *ej);
                    let expect_one = i == j;
                    for (t, c) in block.taylor.iter().enumerate() {
                        let want = if expect_one && t == 0 { ring.one() } else { ring.zero() };
                        debug_assert_eq!(c, &want, "idempotent δ_{i} fails at node {j}");
                    }
                }
            }
            let mut row = Vec::with_capacity(*e);
            let mut cur = delta;
            for _ in 0..*e {
                let mut c = cur.div_rem_monic(&w)?.1.into_coeffs();
                c.resize(degree_bound, ring.zero());
                row.push(c);
                cur = UniPoly::new(ring.clone(), row.last().unwrap().clone()).mul(&linear[i]);
            }
            basis.push(row);
        }
        Ok(Self {
            ring: ring.clone(),
            nodes: nodes.to_vec(),
            basis,
            degree_bound,
        })
    }

    /// `sum e_i`: interpolants have degree below this.
    pub fn degree_bound(&self) -> usize {
        self.degree_bound
    }

    /// Interpolates from Taylor blocks given in node order.
    pub fn interpolate(&self, taylor: &[&[R::Elem]]) -> Result<UniPoly<R>> {
        if taylor.len() != self.nodes.len() {
            return Err(Error::Usage("one Taylor block per node is required".into()));
        }
        let ring = &self.ring;
        let mut out = vec![ring.zero(); self.degree_bound];
        for ((block, row), (_, e)) in taylor.iter().zip(&self.basis).zip(&self.nodes) {
            if block.len() != *e {
                return Err(Error::Usage(format!(
                    "Taylor block has {} entries, multiplicity is {e}",
                    block.len()
                )));
            }
            for (beta, b) in block.iter().zip(row) {
                if ring.is_zero(beta) {
                    continue;
                }
                for (o, c) in out.iter_mut().zip(b) {
                    *o = ring.mul_add(o, beta, c);
                }
            }
        }
        Ok(UniPoly::new(ring.clone(), out).trimmed())
    }
}

/// The unique polynomial of degree `< sum e_i` with the given Taylor blocks.
pub fn hermite_interpolate<R: UnitRing>(ring: &R, blocks: &[HermiteBlock<R>]) -> Result<UniPoly<R>> {
    let nodes: Vec<_> = blocks
        .iter()
        .map(|b| (b.node.clone(), b.multiplicity()))
        .collect();
    let basis = HermiteBasis::new(ring, &nodes)?;
    let taylor: Vec<&[R::Elem]> = blocks.iter().map(|b| b.taylor.as_slice()).collect();
    basis.interpolate(&taylor)
}

fn series_inv<R: UnitRing>(ring: &R, a: &[R::Elem]) -> Result<Vec<R::Elem>> {
    let len = a.len();
    let c0 = ring.inv(&a[0])?;
    let mut out = Vec::with_capacity(len);
    out.push(c0.clone());
    for k in 1..len {
        let mut acc = ring.zero();
        for i in 1..=k {
            acc = ring.mul_add(&acc, &a[i], &out[k - i]);
        }
        out.push(ring.neg(&ring.mul(&acc, &c0)));
    }
    Ok(out)
}

fn series_pow<R: Ring>(ring: &R, a: &[R::Elem], e: usize) -> Vec<R::Elem> {
    let len = a.len();
    let mut acc = vec![ring.zero(); len];
    if len > 0 {
        acc[0] = ring.one();
    }
    for _ in 0..e {
        acc = series_mul(ring, &acc, a, len);
    }
    acc
}

/// Weights `w[i][j]` such that the coefficient of `x^(L-1)` (`L = sum e_i`) of the
/// Hermite interpolant at nodes `0, 1, ..., n-1` equals `sum_{i,j} w[i][j] β_{ij}`.
///
/// All multiplicities except the last must be equal. The weight is the
/// coefficient of `z^(e_i - 1 - j)` in `1 / prod_{l != i} (i - l + z)^(e_l)`.
pub fn leading_coeff_weights<R: UnitRing>(ring: &R, mults: &[usize]) -> Result<Vec<Vec<R::Elem>>> {
    let n = mults.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let e = mults[0];
    if mults[..n - 1].iter().any(|&x| x != e) || mults.iter().any(|&x| x == 0) {
        return Err(Error::Usage(
            "multiplicities must be positive and equal except the last".into(),
        ));
    }
    let e_last = mults[n - 1];
    let len = e.max(e_last);
    let lin = |c: u64, negate: bool| -> Vec<R::Elem> {
        // c + z or z - c
        let mut s = vec![ring.zero(); len];
        let cst = ring.from_u64(c);
        s[0] = if negate { ring.neg(&cst) } else { cst };
        if len > 1 {
            s[1] = ring.one();
        }
        s
    };
    // up[i] = prod_{t=1..i} (t + z), down[x] = prod_{t=1..x} (z - t)
    let mut unit = vec![ring.zero(); len];
    unit[0] = ring.one();
    let mut up = vec![unit.clone()];
    let mut down = vec![unit];
    for t in 1..n as u64 {
        let next_up = series_mul(ring, up.last().unwrap(), &lin(t, false), len);
        let next_down = series_mul(ring, down.last().unwrap(), &lin(t, true), len);
        up.push(next_up);
        down.push(next_down);
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let ei = mults[i];
        let denom = if i + 1 == n {
            series_pow(ring, &up[i], e)
        } else {
            let below = series_pow(ring, &up[i], e);
            let above = series_pow(ring, &down[n - 2 - i], e);
            let last = series_pow(ring, &lin((n - 1 - i) as u64, true), e_last);
            series_mul(ring, &series_mul(ring, &below, &above, len), &last, len)
        };
        let inv = series_inv(ring, &denom).map_err(|_| {
            Error::Contract(format!("node differences up to {} are not units", n - 1))
        })?;
        out.push((0..ei).map(|j| inv[ei - 1 - j].clone()).collect());
    }
    Ok(out)
}
