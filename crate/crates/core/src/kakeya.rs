//! Explicit Kakeya sets of degree `u` over a prime field `F_q`, derivative
//! tables on them, and evaluation of homogeneous polynomials at arbitrary
//! points by reading leading coefficients of curve restrictions.
//!
//! With `W = {x^(u+1) : x in F_q}` the set for parameter `τ` is
//! `S_τ = W - τ^(u+1)`, and the curve through direction `a` is
//! `G_a(y)_i = (β_i + y)^(u+1) - y^(u+1)` with `β_i = a_i / (u+1)`.
//! Since `S_τ` only depends on `τ^(u+1)`, there are `|W|` distinct sets; each
//! is a *class*, indexed like `W`.

use crate::arith::{inv_mod_u64, Ring, Zn64};
use crate::checks::{self, Bound};
use crate::error::{Error, Result};
use crate::interp::leading_coeff_weights;
use crate::mpoly::{enumerate_exps, ExpVec, MultiPoly};
use crate::primes::is_prime_u64;
use crate::prodeval::{derivative_grid, DerivGrid};

/// Hasse derivative order used on Kakeya sets for `m` variables.
pub const fn derivative_order(m: usize) -> usize {
    2 * m
}

/// Largest field size supported by the table-driven construction.
pub const MAX_FIELD_SIZE: u64 = 1 << 28;

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Discrete logarithm and power tables of `F_q^*` for a primitive root.
#[derive(Clone, Debug)]
struct LogTables {
    q: u64,
    dlog: Vec<u32>,
    gpow: Vec<u32>,
}

impl LogTables {
    fn new(q: u64) -> Self {
        let factors = prime_factors(q - 1);
        let field = Zn64::with_power(q, 1).unwrap();
        let g = (1..q)
            .find(|&g| factors.iter().all(|&p| field.pow(&g, (q - 1) / p) != 1))
            .expect("a prime field has a primitive root");
        let mut dlog = vec![0u32; q as usize];
        let mut gpow = Vec::with_capacity(q as usize - 1);
        let mut x = 1u64;
        for k in 0..q - 1 {
            gpow.push(x as u32);
            dlog[x as usize] = k as u32;
            x = x * g % q;
        }
        Self { q, dlog, gpow }
    }

    /// `x^e` for `x` in `F_q`.
    #[inline]
    fn pow(&self, x: u64, e: u64) -> u64 {
        if x == 0 {
            return u64::from(e == 0);
        }
        let k = self.dlog[x as usize] as u64 * (e % (self.q - 1)) % (self.q - 1);
        self.gpow[k as usize] as u64
    }
}

/// The degree-`u` Kakeya set in `F_q^m`.
#[derive(Clone, Debug)]
pub struct KakeyaSet {
    q: u64,
    u: u64,
    m: usize,
    field: Zn64,
    inv_u1: u64,
    d_tilde: u64,
    /// `W` ordered as `0, g^0, g^(u+1), g^(2(u+1)), ...`
    w: Vec<u64>,
    binom: Vec<u64>,
    logs: LogTables,
}

/// Builds the Kakeya set of degree `u` over `F_q^m`; requires `(u+1) | (q-1)`.
pub fn build_kakeya(q: u64, u: u64, m: usize) -> Result<KakeyaSet> {
    if !is_prime_u64(q) {
        return Err(Error::Usage(format!("field size {q} is not prime")));
    }
    if q > MAX_FIELD_SIZE {
        return Err(Error::Unsupported(format!("field size {q} exceeds {MAX_FIELD_SIZE}")));
    }
    if u == 0 {
        return Err(Error::Usage("curve degree u must be at least 1".into()));
    }
    if (q - 1) % (u + 1) != 0 {
        return Err(Error::Usage(format!("u + 1 = {} does not divide q - 1 = {}", u + 1, q - 1)));
    }
    let field = Zn64::with_power(q, 1)?;
    let logs = LogTables::new(q);
    let d_tilde = (q - 1) / (u + 1);
    let mut w = Vec::with_capacity(d_tilde as usize + 1);
    w.push(0);
    for k in 0..d_tilde {
        w.push(logs.gpow[(k * (u + 1)) as usize] as u64);
    }
    let mut binom = Vec::with_capacity(u as usize + 2);
    binom.push(1u64);
    for j in 1..=u + 1 {
        let prev = *binom.last().unwrap();
        let inv_j = inv_mod_u64(j % q, q).unwrap();
        binom.push(field.mul(&field.mul(&prev, &((u + 2 - j) % q)), &inv_j));
    }
    let inv_u1 = inv_mod_u64((u + 1) % q, q).unwrap();
    let k = KakeyaSet { q, u, m, field, inv_u1, d_tilde, w, binom, logs };
    let per = k.set_size() as f64;
    log::debug!(
        "Kakeya set q={q} u={u} m={m}: {} points; per-set bound^(m+1) = {}",
        k.total_size(),
        per.powi(m as i32 + 1)
    );
    Ok(k)
}

impl KakeyaSet {
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn u(&self) -> u64 {
        self.u
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn field(&self) -> &Zn64 {
        &self.field
    }

    /// `(u+1)^(-1)` in `F_q`.
    pub fn inv_u1(&self) -> u64 {
        self.inv_u1
    }

    /// `(q-1)/(u+1)`
    pub fn d_tilde(&self) -> u64 {
        self.d_tilde
    }

    /// `|S_τ| = (q-1)/(u+1) + 1` for every `τ`.
    pub fn set_size(&self) -> usize {
        self.w.len()
    }

    /// Number of distinct sets `S_τ`.
    pub fn class_count(&self) -> usize {
        self.w.len()
    }

    /// `sum_τ |S_τ|^m`
    pub fn total_size(&self) -> u128 {
        self.q as u128 * (self.set_size() as u128).pow(self.m as u32)
    }

    /// Index of `x` in `W`, for `x = y^(u+1)` given `y`.
    #[inline]
    fn windex_of_root(&self, y: u64) -> usize {
        if y == 0 {
            0
        } else {
            1 + (self.logs.dlog[y as usize] as u64 % self.d_tilde) as usize
        }
    }

    /// Index of `x` in `W`, if `x` is a `(u+1)`-th power.
    pub fn windex(&self, x: u64) -> Option<usize> {
        if x == 0 {
            return Some(0);
        }
        let l = self.logs.dlog[x as usize] as u64;
        (l % (self.u + 1) == 0).then(|| 1 + (l / (self.u + 1)) as usize)
    }

    /// The class of `τ`, i.e. the index of `τ^(u+1)` in `W`.
    pub fn class_of(&self, tau: u64) -> usize {
        self.windex_of_root(tau)
    }

    /// The ordered set of a class.
    pub fn class_set(&self, class: usize) -> Vec<u64> {
        let shift = self.w[class];
        self.w.iter().map(|x| self.field.sub(x, &shift)).collect()
    }

    /// `S_τ`, ordered consistently with [`KakeyaSet::index_in_set`].
    pub fn set(&self, tau: u64) -> Vec<u64> {
        self.class_set(self.class_of(tau))
    }

    /// Position of `v` in `S_τ`.
    pub fn index_in_set(&self, tau: u64, v: u64) -> Option<usize> {
        let shift = self.w[self.class_of(tau)];
        self.windex(self.field.add(&v, &shift))
    }

    /// Whether `point` lies in `S_τ^m`.
    pub fn contains(&self, tau: u64, point: &[u64]) -> bool {
        point.iter().all(|&v| self.index_in_set(tau, v).is_some())
    }

    /// `x^e` in `F_q`.
    pub fn pow(&self, x: u64, e: u64) -> u64 {
        self.logs.pow(x, e)
    }

    /// `C(u+1, j)` in `F_q`.
    pub fn binom_u1(&self, j: usize) -> u64 {
        self.binom.get(j).copied().unwrap_or(0)
    }
}

/// The curve `G_a(y) = g_0(a) + g_1(a) y + ... + a y^u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Curve {
    /// `β_i = a_i / (u+1)`
    pub beta: Vec<u64>,
    /// `coeffs[j]` is the vector `g_j(a)`, `j = 0..=u`.
    pub coeffs: Vec<Vec<u64>>,
}

impl Curve {
    pub fn eval(&self, k: &KakeyaSet, y: u64) -> Vec<u64> {
        let f = k.field();
        (0..self.beta.len())
            .map(|i| {
                self.coeffs
                    .iter()
                    .rev()
                    .fold(0, |acc, g| f.mul_add(&g[i], &acc, &y))
            })
            .collect()
    }
}

/// `g_j(a)_i = C(u+1, j) β_i^(u+1-j)`.
pub fn curve_coeffs(a: &[u64], k: &KakeyaSet) -> Curve {
    let f = k.field();
    let beta: Vec<u64> = a.iter().map(|x| f.mul(&(x % k.q), &k.inv_u1)).collect();
    let coeffs = (0..=k.u as usize)
        .map(|j| {
            beta.iter()
                .map(|&b| f.mul(&k.binom_u1(j), &k.pow(b, k.u + 1 - j as u64)))
                .collect()
        })
        .collect();
    Curve { beta, coeffs }
}

/// Hasse derivatives of order `<= k` of a polynomial on every set of a Kakeya set.
#[derive(Clone, Debug)]
pub struct DerivTable {
    order: usize,
    exps: Vec<ExpVec>,
    /// For `exps[t]` with weight `>= 1`: `(p, i)` with `exps[t] = exps[p] + unit_i`.
    parents: Vec<(usize, usize)>,
    grids: Vec<Option<DerivGrid<Zn64>>>,
    set_size: usize,
}

fn parent_table(exps: &[ExpVec]) -> Vec<(usize, usize)> {
    let index: std::collections::HashMap<&ExpVec, usize> =
        exps.iter().enumerate().map(|(t, e)| (e, t)).collect();
    exps.iter()
        .map(|e| match e.0.iter().position(|&x| x > 0) {
            None => (usize::MAX, usize::MAX),
            Some(i) => {
                let mut p = e.clone();
                p.0[i] -= 1;
                (index[&p], i)
            }
        })
        .collect()
}

impl DerivTable {
    fn build(f: &MultiPoly<Zn64>, k: &KakeyaSet, order: usize, classes: &[bool]) -> Result<Self> {
        if f.ring().n() != k.q {
            return Err(Error::ModulusMismatch(format!(
                "polynomial over Z/{} used with Kakeya set over F_{}",
                f.ring().n(),
                k.q
            )));
        }
        let exps = enumerate_exps(f.m(), order);
        let parents = parent_table(&exps);
        let grids = classes
            .iter()
            .enumerate()
            .map(|(c, &needed)| {
                needed
                    .then(|| derivative_grid(f, &k.class_set(c), order))
                    .transpose()
            })
            .collect::<Result<_>>()?;
        Ok(Self { order, exps, parents, grids, set_size: k.set_size() })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn exps(&self) -> &[ExpVec] {
        &self.exps
    }

    /// Number of `(e, τ)` entries available.
    pub fn entry_count(&self, k: &KakeyaSet) -> usize {
        let present = (0..k.q).filter(|&t| self.grids[k.class_of(t)].is_some()).count();
        present * self.exps.len()
    }

    /// `∂_e f` at the grid point with per-coordinate indices `coords` of `S_τ^m`.
    pub fn value(&self, k: &KakeyaSet, e: usize, tau: u64, coords: &[usize]) -> Result<u64> {
        let grid = self.grids[k.class_of(tau)]
            .as_ref()
            .ok_or_else(|| Error::Internal(format!("no derivative table for τ = {tau}")))?;
        let idx = coords.iter().rev().fold(0, |acc, &i| acc * self.set_size + i);
        Ok(grid.at(idx)[e])
    }
}

/// Tables of all derivatives of order `<= order` of `f` on every `S_τ`.
pub fn kakeya_derivative_tables(f: &MultiPoly<Zn64>, k: &KakeyaSet, order: usize) -> Result<DerivTable> {
    DerivTable::build(f, k, order, &vec![true; k.class_count()])
}

/// Per-`τ` scratch space for the chain-rule transfer.
struct Transfer {
    delta: Vec<u64>,
    monos: Vec<u64>,
    h: Vec<u64>,
}

impl Transfer {
    fn new(m: usize, n_exps: usize, order: usize) -> Self {
        Self {
            delta: vec![0; m * (order + 1)],
            monos: vec![0; n_exps * (order + 1)],
            h: vec![0; order + 1],
        }
    }

    /// Fills `self.h` with the Hasse derivatives `h^(j)(τ)`, `j <= order`, of
    /// `h(y) = f(G(y))`, where `G(τ + Z) = G(τ) + δ(Z)` and
    /// `h(τ + Z) = sum_e ∂_e f(G(τ)) δ(Z)^e`.
    fn run(&mut self, k: &KakeyaSet, table: &DerivTable, beta: &[u64], tau: u64, order: usize) -> Result<()> {
        let f = k.field();
        let m = beta.len();
        let width = order + 1;
        let grid = table.grids[k.class_of(tau)]
            .as_ref()
            .ok_or_else(|| Error::Internal(format!("no derivative table for τ = {tau}")))?;
        let mut idx = 0;
        for i in (0..m).rev() {
            let y = f.add(&beta[i], &tau);
            idx = idx * table.set_size + k.windex_of_root(y);
            for t in 1..width {
                let e = k.u + 1 - t as u64;
                let diff = f.sub(&k.pow(y, e), &k.pow(tau, e));
                self.delta[i * width + t] = f.mul(&k.binom_u1(t), &diff);
            }
        }
        let values = grid.at(idx);
        // δ^e has valuation |e|, so monos[t][s] is only needed for s >= |e|.
        self.h.iter_mut().for_each(|x| *x = 0);
        self.h[0] = values[0];
        let mut weight = vec![0usize; table.exps.len()];
        self.monos[0] = 1;
        for t in 1..table.exps.len() {
            let (p, i) = table.parents[t];
            let w = weight[p] + 1;
            weight[t] = w;
            for s in w..width {
                let mut acc = 0;
                for r in weight[p]..s {
                    acc = f.mul_add(&acc, &self.monos[p * width + r], &self.delta[i * width + s - r]);
                }
                self.monos[t * width + s] = acc;
            }
            let v = values[t];
            if v != 0 {
                for s in w..width {
                    self.h[s] = f.mul_add(&self.h[s], &v, &self.monos[t * width + s]);
                }
            }
        }
        Ok(())
    }
}

/// `h^(j)(τ)` for every `τ` in `F_q` and `j <= table.order()`, where `h = f ∘ G`.
pub fn curve_hasse_transfer(table: &DerivTable, curve: &Curve, k: &KakeyaSet) -> Result<Vec<Vec<u64>>> {
    let order = table.order;
    let mut tr = Transfer::new(curve.beta.len(), table.exps.len(), order);
    (0..k.q)
        .map(|tau| {
            tr.run(k, table, &curve.beta, tau, order)?;
            Ok(tr.h.clone())
        })
        .collect()
}

/// How a homogeneous polynomial of a given degree is recovered on a Kakeya set.
///
/// The restriction `R(y) = f(G_a(y))` has degree `L - 1 = u * deg` and
/// leading coefficient `f(a)`. It is determined by Hermite data at nodes
/// `0, 1, ..., n-1` whose multiplicities sum to exactly `L`; the derivative
/// order is the smallest that fits in `q` nodes.
#[derive(Clone, Debug)]
pub struct DegreePlan {
    pub deg: usize,
    pub order: usize,
    pub mults: Vec<usize>,
    weights: Vec<Vec<u64>>,
}

impl KakeyaSet {
    pub fn degree_plan(&self, deg: usize) -> Result<DegreePlan> {
        let q = self.q as u128;
        let top = self.u as u128 * deg as u128;
        let cap = derivative_order(self.m) as u128 + 1;
        checks::check(
            Bound::DegreeBudget,
            || top < q * cap,
            || format!("u * deg = {top} exceeds q * (2m + 1) = {}", q * cap),
        )?;
        let len = top + 1;
        let order = (top / q) as usize;
        let per = order as u128 + 1;
        let nodes = len.div_ceil(per) as usize;
        let mut mults = vec![order + 1; nodes];
        mults[nodes - 1] = (len - (nodes as u128 - 1) * per) as usize;
        let weights = leading_coeff_weights(&self.field, &mults)?;
        Ok(DegreePlan { deg, order, mults, weights })
    }
}

/// Evaluates homogeneous polynomials over `F_q` through a fixed Kakeya set.
#[derive(Clone, Debug)]
pub struct NiceField {
    kakeya: KakeyaSet,
}

impl NiceField {
    /// Uses the Kakeya set with `u + 1 = (q-1)/d_tilde`.
    pub fn new(q: u64, d_tilde: u64, m: usize) -> Result<Self> {
        if d_tilde == 0 || (q - 1) % d_tilde != 0 {
            return Err(Error::Usage(format!("d_tilde = {d_tilde} does not divide q - 1 = {}", q - 1)));
        }
        let u1 = (q - 1) / d_tilde;
        if u1 < 2 {
            return Err(Error::Usage(format!(
                "q = {q} gives curve degree {} < 1 for d_tilde = {d_tilde}",
                u1 as i64 - 1
            )));
        }
        Ok(Self { kakeya: build_kakeya(q, u1 - 1, m)? })
    }

    pub fn kakeya(&self) -> &KakeyaSet {
        &self.kakeya
    }

    /// `f(a)` for every point, where `f` is homogeneous of total degree `deg`
    /// (a zero `f` may claim any degree).
    pub fn evaluate(&self, f: &MultiPoly<Zn64>, deg: usize, points: &[Vec<u64>]) -> Result<Vec<u64>> {
        let k = &self.kakeya;
        if f.m() != k.m {
            return Err(Error::Usage(format!("polynomial has {} variables, Kakeya set {}", f.m(), k.m)));
        }
        if f.is_zero() {
            return Ok(vec![0; points.len()]);
        }
        let plan = k.degree_plan(deg)?;
        let mut needed = vec![false; k.class_count()];
        for tau in 0..plan.mults.len() as u64 {
            needed[k.class_of(tau)] = true;
        }
        let table = DerivTable::build(f, k, plan.order, &needed)?;
        let field = k.field();
        let mut tr = Transfer::new(k.m, table.exps.len(), plan.order);
        let mut beta = vec![0; k.m];
        points
            .iter()
            .map(|a| {
                if a.len() != k.m {
                    return Err(Error::Usage("point dimension mismatch".into()));
                }
                for (b, x) in beta.iter_mut().zip(a) {
                    *b = field.mul(&(x % k.q), &k.inv_u1);
                }
                let mut lead = 0;
                for (tau, (w, &e)) in plan.weights.iter().zip(&plan.mults).enumerate() {
                    tr.run(k, &table, &beta, tau as u64, e - 1)?;
                    lead = field.add(&lead, &field.dot(&tr.h[..e], w));
                }
                Ok(lead)
            })
            .collect()
    }
}

/// `f(a)` for every point, with `f` homogeneous over `F_q` and `d_tilde | q - 1`.
pub fn mme_nice_field(f: &MultiPoly<Zn64>, points: &[Vec<u64>], d_tilde: u64) -> Result<Vec<u64>> {
    let q = f.ring().n();
    let deg = f.homogeneous_degree()?;
    let Some(deg) = deg else {
        return Ok(vec![0; points.len()]);
    };
    NiceField::new(q, d_tilde, f.m())?.evaluate(f, deg, points)
}
