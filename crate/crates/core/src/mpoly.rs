//! Dense univariate and multivariate polynomials, Hasse derivatives and
//! homogeneous decomposition.
//!
//! A multivariate polynomial in `m` variables of individual degree `< d` is a
//! flat array of `d^m` coefficients; the coefficient of `x^e` sits at
//! `sum_j e_j * d^(j-1)`, so `x_1` varies fastest.

use std::fmt;

use crate::arith::{Natural, ResidueRing, Ring, Zn};
use crate::error::{Error, Result};

/// An exponent vector `e` in `N^m`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ExpVec(pub Vec<u32>);

impl ExpVec {
    pub fn zero(m: usize) -> Self {
        Self(vec![0; m])
    }

    pub fn unit(m: usize, j: usize, k: u32) -> Self {
        let mut e = vec![0; m];
        e[j] = k;
        Self(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `|e|_1`
    pub fn weight(&self) -> usize {
        self.0.iter().map(|&x| x as usize).sum()
    }

    /// Flat coefficient index for individual degree bound `d`, if every entry is `< d`.
    pub fn index(&self, d: usize) -> Option<usize> {
        let mut idx = 0;
        for &ej in self.0.iter().rev() {
            if ej as usize >= d {
                return None;
            }
            idx = idx * d + ej as usize;
        }
        Some(idx)
    }

    pub fn from_index(mut idx: usize, m: usize, d: usize) -> Self {
        let mut e = Vec::with_capacity(m);
        for _ in 0..m {
            e.push((idx % d) as u32);
            idx /= d;
        }
        Self(e)
    }
}

impl fmt::Debug for ExpVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// All exponent vectors of length `m` with `|e|_1 <= k`, by weight and then
/// lexicographically.
pub fn enumerate_exps(m: usize, k: usize) -> Vec<ExpVec> {
    fn rec(prefix: &mut Vec<u32>, m: usize, left: usize, out: &mut Vec<ExpVec>) {
        if prefix.len() == m {
            if left == 0 {
                out.push(ExpVec(prefix.clone()));
            }
            return;
        }
        for x in (0..=left).rev() {
            prefix.push(x as u32);
            rec(prefix, m, left - x, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for w in 0..=k {
        rec(&mut Vec::with_capacity(m), m, w, &mut out);
    }
    out
}

/// Number of exponent vectors of length `m` with weight at most `k`: `C(m+k, m)`.
pub fn count_exps(m: usize, k: usize) -> usize {
    let mut c: u128 = 1;
    for i in 1..=m as u128 {
        c = c * (k as u128 + i) / i;
    }
    c as usize
}

/// Pascal's triangle `C(i, j)` for `i < n`, built with ring additions only.
pub fn binomial_table<R: Ring>(ring: &R, n: usize) -> Vec<Vec<R::Elem>> {
    let mut rows: Vec<Vec<R::Elem>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(i + 1);
        row.push(ring.one());
        for j in 1..i {
            row.push(ring.add(&rows[i - 1][j - 1], &rows[i - 1][j]));
        }
        if i > 0 {
            row.push(ring.one());
        }
        rows.push(row);
    }
    rows
}

/// A dense univariate polynomial, ascending coefficients.
#[derive(Clone)]
pub struct UniPoly<R: Ring> {
    ring: R,
    coeffs: Vec<R::Elem>,
}

impl<R: Ring> PartialEq for UniPoly<R> {
    fn eq(&self, other: &Self) -> bool {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n).all(|i| self.coeff(i) == other.coeff(i))
    }
}

impl<R: Ring> fmt::Debug for UniPoly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UniPoly{:?}", self.coeffs)
    }
}

impl<R: Ring> UniPoly<R> {
    pub fn new(ring: R, coeffs: Vec<R::Elem>) -> Self {
        Self { ring, coeffs }
    }

    pub fn zero(ring: R) -> Self {
        Self::new(ring, Vec::new())
    }

    /// `x - a`
    pub fn linear(ring: R, a: &R::Elem) -> Self {
        let c = vec![ring.neg(a), ring.one()];
        Self::new(ring, c)
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn coeffs(&self) -> &[R::Elem] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<R::Elem> {
        self.coeffs
    }

    pub fn coeff(&self, i: usize) -> R::Elem {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.ring.zero())
    }

    /// Highest index with a nonzero coefficient; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !self.ring.is_zero(c))
    }

    pub fn is_zero(&self) -> bool {
        self.degree().is_none()
    }

    /// Drops trailing zero coefficients.
    pub fn trimmed(mut self) -> Self {
        let len = self.degree().map_or(0, |d| d + 1);
        self.coeffs.truncate(len);
        self
    }

    pub fn eval(&self, x: &R::Elem) -> R::Elem {
        self.coeffs
            .iter()
            .rev()
            .fold(self.ring.zero(), |acc, c| self.ring.mul_add(c, &acc, x))
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n)
            .map(|i| self.ring.add(&self.coeff(i), &other.coeff(i)))
            .collect();
        Self::new(self.ring.clone(), c)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n)
            .map(|i| self.ring.sub(&self.coeff(i), &other.coeff(i)))
            .collect();
        Self::new(self.ring.clone(), c)
    }

    pub fn scale(&self, c: &R::Elem) -> Self {
        let v = self.coeffs.iter().map(|x| self.ring.mul(x, c)).collect();
        Self::new(self.ring.clone(), v)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::zero(self.ring.clone());
        }
        let mut c = vec![self.ring.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, x) in self.coeffs.iter().enumerate() {
            if self.ring.is_zero(x) {
                continue;
            }
            for (j, y) in other.coeffs.iter().enumerate() {
                c[i + j] = self.ring.mul_add(&c[i + j], x, y);
            }
        }
        Self::new(self.ring.clone(), c)
    }

    /// Quotient and remainder by a monic `g` of degree at least one.
    pub fn div_rem_monic(&self, g: &Self) -> Result<(Self, Self)> {
        let ring = &self.ring;
        let dg = match g.degree() {
            Some(d) if d >= 1 => d,
            _ => return Err(Error::Usage("divisor must have degree at least 1".into())),
        };
        if g.coeffs[dg] != ring.one() {
            return Err(Error::Usage("divisor must be monic".into()));
        }
        let mut rem = self.coeffs.clone();
        if rem.len() <= dg {
            rem.resize(dg, ring.zero());
            return Ok((Self::zero(ring.clone()), Self::new(ring.clone(), rem)));
        }
        let mut quot = vec![ring.zero(); rem.len() - dg];
        for k in (dg..rem.len()).rev() {
            let lead = rem[k].clone();
            if ring.is_zero(&lead) {
                continue;
            }
            quot[k - dg] = lead.clone();
            for i in 0..dg {
                let t = ring.mul(&lead, &g.coeffs[i]);
                rem[k - dg + i] = ring.sub(&rem[k - dg + i], &t);
            }
            rem[k] = ring.zero();
        }
        rem.truncate(dg);
        Ok((Self::new(ring.clone(), quot), Self::new(ring.clone(), rem)))
    }
}

/// `q(x) = p(x + c)`, by repeated synthetic division.
pub fn taylor_shift<R: Ring>(p: &UniPoly<R>, c: &R::Elem) -> UniPoly<R> {
    let ring = p.ring();
    let mut a = p.coeffs().to_vec();
    let n = a.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            a[j] = ring.mul_add(&a[j], &a[j + 1], c);
        }
    }
    UniPoly::new(ring.clone(), a)
}

/// Product of two truncated power series, keeping `len` terms.
pub fn series_mul<R: Ring>(ring: &R, a: &[R::Elem], b: &[R::Elem], len: usize) -> Vec<R::Elem> {
    let mut out = vec![ring.zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if ring.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j] = ring.mul_add(&out[i + j], x, y);
        }
    }
    out
}

/// A dense `m`-variate polynomial of individual degree `< d`.
#[derive(Clone)]
pub struct MultiPoly<R: Ring> {
    ring: R,
    m: usize,
    d: usize,
    coeffs: Vec<R::Elem>,
}

impl<R: Ring> PartialEq for MultiPoly<R> {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m && self.d == other.d && self.coeffs == other.coeffs
    }
}

impl<R: Ring> fmt::Debug for MultiPoly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiPoly")
            .field("m", &self.m)
            .field("d", &self.d)
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

/// `d^m`, or `None` on overflow.
pub fn dense_len(m: usize, d: usize) -> Option<usize> {
    (0..m).try_fold(1usize, |acc, _| acc.checked_mul(d))
}

impl<R: Ring> MultiPoly<R> {
    pub fn new(ring: R, m: usize, d: usize, coeffs: Vec<R::Elem>) -> Result<Self> {
        if d == 0 {
            return Err(Error::Usage("degree bound d must be at least 1".into()));
        }
        let len = dense_len(m, d).ok_or_else(|| Error::Resource(format!("{d}^{m} overflows")))?;
        if coeffs.len() != len {
            return Err(Error::Usage(format!(
                "expected {len} coefficients for m = {m}, d = {d}, got {}",
                coeffs.len()
            )));
        }
        Ok(Self { ring, m, d, coeffs })
    }

    pub fn zero(ring: R, m: usize, d: usize) -> Self {
        let len = dense_len(m, d).expect("d^m fits in memory");
        let z = ring.zero();
        Self {
            ring,
            m,
            d,
            coeffs: vec![z; len],
        }
    }

    pub fn constant(ring: R, m: usize, d: usize, c: R::Elem) -> Self {
        let mut f = Self::zero(ring, m, d);
        f.coeffs[0] = c;
        f
    }

    pub fn from_fn(ring: R, m: usize, d: usize, mut coeff: impl FnMut(&ExpVec) -> R::Elem) -> Self {
        let len = dense_len(m, d).expect("d^m fits in memory");
        let coeffs = (0..len)
            .map(|i| coeff(&ExpVec::from_index(i, m, d)))
            .collect();
        Self { ring, m, d, coeffs }
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn coeffs(&self) -> &[R::Elem] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<R::Elem> {
        self.coeffs
    }

    /// Coefficient of `x^e`; zero when some `e_j >= d`.
    pub fn coeff(&self, e: &ExpVec) -> R::Elem {
        e.index(self.d)
            .map_or_else(|| self.ring.zero(), |i| self.coeffs[i].clone())
    }

    pub fn set_coeff(&mut self, e: &ExpVec, c: R::Elem) -> Result<()> {
        let i = e
            .index(self.d)
            .ok_or_else(|| Error::Usage(format!("exponent {e:?} exceeds degree bound {}", self.d)))?;
        self.coeffs[i] = c;
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| self.ring.is_zero(c))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.m != other.m || self.d != other.d {
            return Err(Error::Usage("polynomial shapes differ".into()));
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| self.ring.add(a, b))
            .collect();
        Ok(Self { coeffs, ..self.clone() })
    }

    pub fn map_coeffs<S: Ring>(&self, ring: S, f: impl FnMut(&R::Elem) -> S::Elem) -> MultiPoly<S> {
        MultiPoly {
            coeffs: self.coeffs.iter().map(f).collect(),
            ring,
            m: self.m,
            d: self.d,
        }
    }

    /// The same polynomial viewed with a larger individual degree bound.
    pub fn with_degree_bound(&self, d: usize) -> Result<Self> {
        if d < self.d {
            return Err(Error::Usage(format!("cannot shrink degree bound {} to {d}", self.d)));
        }
        if d == self.d {
            return Ok(self.clone());
        }
        let mut out = Self::zero(self.ring.clone(), self.m, d);
        for (i, c) in self.coeffs.iter().enumerate() {
            let e = ExpVec::from_index(i, self.m, self.d);
            out.coeffs[e.index(d).unwrap()] = c.clone();
        }
        Ok(out)
    }

    /// `f(a)` by iterated Horner, innermost variable `x_1`.
    pub fn naive_eval(&self, a: &[R::Elem]) -> Result<R::Elem> {
        if a.len() != self.m {
            return Err(Error::Usage(format!(
                "point has {} coordinates, polynomial has {} variables",
                a.len(),
                self.m
            )));
        }
        Ok(self.eval_unchecked(a))
    }

    pub(crate) fn eval_unchecked(&self, a: &[R::Elem]) -> R::Elem {
        let ring = &self.ring;
        let d = self.d;
        if self.m == 0 {
            return self.coeffs[0].clone();
        }
        let horner = |chunk: &[R::Elem], x: &R::Elem| {
            chunk
                .iter()
                .rev()
                .fold(ring.zero(), |acc, c| ring.mul_add(c, &acc, x))
        };
        let mut buf: Vec<R::Elem> = self.coeffs.chunks(d).map(|c| horner(c, &a[0])).collect();
        for x in &a[1..] {
            buf = buf.chunks(d).map(|c| horner(c, x)).collect();
        }
        buf.pop().unwrap()
    }

    /// The Hasse derivative `sum_a C(a, e) Coeff_{x^a}(f) x^(a - e)`.
    pub fn hasse_derivative(&self, e: &ExpVec) -> Self {
        let binom = binomial_table(&self.ring, self.d);
        self.hasse_with_table(e, &binom)
    }

    fn hasse_with_table(&self, e: &ExpVec, binom: &[Vec<R::Elem>]) -> Self {
        let ring = &self.ring;
        let mut out = Self::zero(ring.clone(), self.m, self.d);
        if e.len() != self.m || e.0.iter().any(|&x| x as usize >= self.d) {
            return out;
        }
        let mut a = vec![0usize; self.m];
        for (idx, c) in self.coeffs.iter().enumerate() {
            if idx > 0 {
                // Odometer increment of the exponent vector.
                for aj in a.iter_mut() {
                    *aj += 1;
                    if *aj < self.d {
                        break;
                    }
                    *aj = 0;
                }
            }
            if ring.is_zero(c) || a.iter().zip(&e.0).any(|(&aj, &ej)| aj < ej as usize) {
                continue;
            }
            let mut v = c.clone();
            let mut target = 0;
            for j in (0..self.m).rev() {
                let ej = e.0[j] as usize;
                if ej > 0 {
                    v = ring.mul(&v, &binom[a[j]][ej]);
                }
                target = target * self.d + (a[j] - ej);
            }
            out.coeffs[target] = v;
        }
        out
    }

    /// All Hasse derivatives of order at most `k`, in [`enumerate_exps`] order.
    pub fn hasse_all_upto(&self, k: usize) -> Vec<(ExpVec, Self)> {
        let binom = binomial_table(&self.ring, self.d);
        enumerate_exps(self.m, k)
            .into_iter()
            .map(|e| {
                let h = self.hasse_with_table(&e, &binom);
                (e, h)
            })
            .collect()
    }

    /// Total degree of every monomial index, in flat order.
    fn monomial_degrees(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.coeffs.len()).map(move |i| {
            let mut i = i;
            let mut w = 0;
            for _ in 0..self.m {
                w += i % self.d;
                i /= self.d;
            }
            w
        })
    }

    /// Splits `f` into its nonzero homogeneous components, by ascending degree.
    ///
    /// The zero polynomial yields a single zero component of degree 0.
    pub fn homogeneous_components(&self) -> Vec<(usize, Self)> {
        let max_deg = (self.d - 1) * self.m;
        let mut comps: Vec<Option<Self>> = vec![None; max_deg + 1];
        for (i, w) in self.monomial_degrees().enumerate() {
            let c = &self.coeffs[i];
            if self.ring.is_zero(c) {
                continue;
            }
            let comp = comps[w]
                .get_or_insert_with(|| Self::zero(self.ring.clone(), self.m, self.d));
            comp.coeffs[i] = c.clone();
        }
        let out: Vec<_> = comps
            .into_iter()
            .enumerate()
            .filter_map(|(w, c)| c.map(|c| (w, c)))
            .collect();
        if out.is_empty() {
            vec![(0, Self::zero(self.ring.clone(), self.m, self.d))]
        } else {
            out
        }
    }

    /// The common total degree of all monomials, `None` for the zero polynomial.
    pub fn homogeneous_degree(&self) -> Result<Option<usize>> {
        let mut deg = None;
        for (i, w) in self.monomial_degrees().enumerate() {
            if self.ring.is_zero(&self.coeffs[i]) {
                continue;
            }
            match deg {
                None => deg = Some(w),
                Some(d) if d != w => {
                    return Err(Error::Usage(format!(
                        "polynomial is not homogeneous: has monomials of degree {d} and {w}"
                    )))
                }
                _ => {}
            }
        }
        Ok(deg)
    }
}

impl<R: ResidueRing> MultiPoly<R> {
    /// Replaces every coefficient by its natural lift in `[0, n)`.
    pub fn lift_to_integers(&self) -> IntMultiPoly {
        IntMultiPoly {
            m: self.m,
            d: self.d,
            coeffs: self.coeffs.iter().map(|c| self.ring.to_natural(c)).collect(),
        }
    }
}

/// A dense polynomial with natural-number coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMultiPoly {
    pub m: usize,
    pub d: usize,
    pub coeffs: Vec<Natural>,
}

impl IntMultiPoly {
    pub fn reduce_into<R: ResidueRing>(&self, ring: &R) -> MultiPoly<R> {
        MultiPoly {
            ring: ring.clone(),
            m: self.m,
            d: self.d,
            coeffs: self.coeffs.iter().map(|c| ring.from_natural(c)).collect(),
        }
    }

    pub fn reduce_mod(&self, n: &Natural) -> Result<MultiPoly<Zn>> {
        let ring = Zn::new(crate::arith::PowerModulus::new(n.clone(), 1)?);
        Ok(self.reduce_into(&ring))
    }
}
