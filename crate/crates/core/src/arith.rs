//! Natural numbers, residue rings `Z/r^s Z` and their quotient extensions
//! `(Z/nZ)[z]/(E(z))`.
//!
//! Rings are passed around as lightweight context values (cloning is an `Arc`
//! bump) and elements are plain data, always stored in canonical reduced form.

use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::mpoly::UniPoly;

pub type Natural = BigUint;

/// A modulus of the form `n = r^s`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PowerModulus {
    r: Natural,
    s: u32,
    n: Natural,
}

impl PowerModulus {
    pub fn new(r: Natural, s: u32) -> Result<Self> {
        if r < Natural::from(2u32) {
            return Err(Error::Usage(format!("modulus base must be at least 2, got {r}")));
        }
        if s == 0 {
            return Err(Error::Usage("modulus exponent must be positive".into()));
        }
        let n = r.pow(s);
        Ok(Self { r, s, n })
    }

    pub fn from_u64(r: u64, s: u32) -> Result<Self> {
        Self::new(Natural::from(r), s)
    }

    pub fn r(&self) -> &Natural {
        &self.r
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn n(&self) -> &Natural {
        &self.n
    }

    pub fn r_u64(&self) -> Option<u64> {
        self.r.to_u64()
    }

    pub fn n_u64(&self) -> Option<u64> {
        self.n.to_u64()
    }
}

impl fmt::Debug for PowerModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.s == 1 {
            write!(f, "{}", self.r)
        } else {
            write!(f, "{}^{}", self.r, self.s)
        }
    }
}

impl fmt::Display for PowerModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A commutative ring with one, given as a context object.
pub trait Ring: Clone + Send + Sync + fmt::Debug {
    type Elem: Clone + PartialEq + Eq + Hash + fmt::Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_u64(&self, v: u64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    fn is_zero(&self, a: &Self::Elem) -> bool {
        *a == self.zero()
    }

    fn add_assign(&self, a: &mut Self::Elem, b: &Self::Elem) {
        *a = self.add(a, b);
    }

    /// `acc + a * b`
    fn mul_add(&self, acc: &Self::Elem, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(acc, &self.mul(a, b))
    }

    /// `sum_i a[i] * b[i]` over the common prefix.
    fn dot(&self, a: &[Self::Elem], b: &[Self::Elem]) -> Self::Elem {
        a.iter()
            .zip(b)
            .fold(self.zero(), |acc, (x, y)| self.mul_add(&acc, x, y))
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    fn pow_natural(&self, a: &Self::Elem, e: &Natural) -> Self::Elem {
        let mut acc = self.one();
        for i in (0..e.bits()).rev() {
            acc = self.mul(&acc, &acc);
            if e.bit(i) {
                acc = self.mul(&acc, a);
            }
        }
        acc
    }
}

/// A ring where units can be inverted.
pub trait UnitRing: Ring {
    /// Inverse of a unit; [`Error::NonUnit`] otherwise.
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem>;
}

/// `Z/nZ` with `n = r^s`, elements identified with their lifts in `[0, n)`.
pub trait ResidueRing: UnitRing {
    fn modulus(&self) -> &PowerModulus;
    fn from_natural(&self, v: &Natural) -> Self::Elem;
    fn to_natural(&self, a: &Self::Elem) -> Natural;

    /// The natural lift of `a`, reduced modulo `m`.
    fn rem_u64(&self, a: &Self::Elem, m: u64) -> u64 {
        (self.to_natural(a) % m).to_u64().unwrap()
    }

    /// The ring for another modulus, using the same representation.
    fn for_modulus(pm: PowerModulus) -> Result<Self>
    where
        Self: Sized;
}

fn non_unit(value: impl fmt::Display, modulus: impl fmt::Display) -> Error {
    Error::NonUnit {
        value: value.to_string(),
        modulus: modulus.to_string(),
    }
}

/// Inverse of `a` modulo `n` via extended Euclid, for word-size moduli.
pub fn inv_mod_u64(a: u64, n: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128, n as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return if n == 1 { Some(0) } else { None };
    }
    Some(old_s.rem_euclid(n as i128) as u64)
}

/// Inverse of `a` modulo `n` via extended Euclid.
pub fn inv_mod_natural(a: &Natural, n: &Natural) -> Option<Natural> {
    let n_int = BigInt::from_biguint(Sign::Plus, n.clone());
    let a_int = BigInt::from_biguint(Sign::Plus, a % n);
    let egcd = a_int.extended_gcd(&n_int);
    if !egcd.gcd.is_one() {
        return None;
    }
    egcd.x.mod_floor(&n_int).to_biguint()
}

#[inline]
pub fn mul_mod_u64(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

pub fn pow_mod_u64(mut a: u64, mut e: u64, n: u64) -> u64 {
    let mut acc = 1 % n;
    a %= n;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod_u64(acc, a, n);
        }
        a = mul_mod_u64(a, a, n);
        e >>= 1;
    }
    acc
}

/// `Z/nZ` for moduli below `2^64`, elements are `u64` in `[0, n)`.
#[derive(Clone)]
pub struct Zn64 {
    pm: Arc<PowerModulus>,
    n: u64,
    small: bool,
}

impl Zn64 {
    pub fn new(pm: PowerModulus) -> Result<Self> {
        let n = pm
            .n_u64()
            .ok_or_else(|| Error::Unsupported(format!("modulus {pm} does not fit in 64 bits")))?;
        Ok(Self {
            pm: Arc::new(pm),
            n,
            small: n <= u32::MAX as u64,
        })
    }

    pub fn with_power(r: u64, s: u32) -> Result<Self> {
        Self::new(PowerModulus::from_u64(r, s)?)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    #[inline]
    pub fn reduce(&self, v: u64) -> u64 {
        v % self.n
    }
}

impl fmt::Debug for Zn64 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z/{}", self.pm)
    }
}

impl Ring for Zn64 {
    type Elem = u64;

    #[inline]
    fn zero(&self) -> u64 {
        0
    }

    #[inline]
    fn one(&self) -> u64 {
        1 % self.n
    }

    #[inline]
    fn from_u64(&self, v: u64) -> u64 {
        v % self.n
    }

    #[inline]
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let (s, carry) = a.overflowing_add(*b);
        if carry || s >= self.n {
            s.wrapping_sub(self.n)
        } else {
            s
        }
    }

    #[inline]
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a.wrapping_sub(*b).wrapping_add(self.n)
        }
    }

    #[inline]
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.n - a
        }
    }

    #[inline]
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        if self.small {
            (a * b) % self.n
        } else {
            mul_mod_u64(*a, *b, self.n)
        }
    }

    #[inline]
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }

    #[inline]
    fn mul_add(&self, acc: &u64, a: &u64, b: &u64) -> u64 {
        if self.small {
            (acc + a * b % self.n) % self.n
        } else {
            ((*acc as u128 + *a as u128 * *b as u128) % self.n as u128) as u64
        }
    }

    fn dot(&self, a: &[u64], b: &[u64]) -> u64 {
        if self.small {
            // Products fit in 64 bits, so a 128-bit accumulator never overflows.
            let acc: u128 = a.iter().zip(b).map(|(x, y)| (x * y) as u128).sum();
            (acc % self.n as u128) as u64
        } else {
            a.iter()
                .zip(b)
                .fold(0, |acc, (x, y)| self.mul_add(&acc, x, y))
        }
    }
}

impl UnitRing for Zn64 {
    fn inv(&self, a: &u64) -> Result<u64> {
        inv_mod_u64(*a, self.n).ok_or_else(|| non_unit(a, &self.pm))
    }
}

impl ResidueRing for Zn64 {
    fn modulus(&self) -> &PowerModulus {
        &self.pm
    }

    fn from_natural(&self, v: &Natural) -> u64 {
        (v % self.n).to_u64().unwrap()
    }

    fn to_natural(&self, a: &u64) -> Natural {
        Natural::from(*a)
    }

    #[inline]
    fn rem_u64(&self, a: &u64, m: u64) -> u64 {
        a % m
    }

    fn for_modulus(pm: PowerModulus) -> Result<Self> {
        Self::new(pm)
    }
}

/// `Z/nZ` for moduli of any size.
#[derive(Clone)]
pub struct Zn {
    pm: Arc<PowerModulus>,
}

impl Zn {
    pub fn new(pm: PowerModulus) -> Self {
        Self { pm: Arc::new(pm) }
    }

    pub fn n(&self) -> &Natural {
        self.pm.n()
    }
}

impl fmt::Debug for Zn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z/{}", self.pm)
    }
}

impl Ring for Zn {
    type Elem = Natural;

    fn zero(&self) -> Natural {
        Natural::zero()
    }

    fn one(&self) -> Natural {
        Natural::one() % self.n()
    }

    fn from_u64(&self, v: u64) -> Natural {
        Natural::from(v) % self.n()
    }

    fn add(&self, a: &Natural, b: &Natural) -> Natural {
        let s = a + b;
        if &s >= self.n() {
            s - self.n()
        } else {
            s
        }
    }

    fn sub(&self, a: &Natural, b: &Natural) -> Natural {
        if a >= b {
            a - b
        } else {
            self.n() - b + a
        }
    }

    fn neg(&self, a: &Natural) -> Natural {
        if a.is_zero() {
            Natural::zero()
        } else {
            self.n() - a
        }
    }

    fn mul(&self, a: &Natural, b: &Natural) -> Natural {
        (a * b) % self.n()
    }

    fn is_zero(&self, a: &Natural) -> bool {
        a.is_zero()
    }

    fn dot(&self, a: &[Natural], b: &[Natural]) -> Natural {
        let acc: Natural = a.iter().zip(b).map(|(x, y)| x * y).sum();
        acc % self.n()
    }

    fn pow_natural(&self, a: &Natural, e: &Natural) -> Natural {
        a.modpow(e, self.n())
    }
}

impl UnitRing for Zn {
    fn inv(&self, a: &Natural) -> Result<Natural> {
        inv_mod_natural(a, self.n()).ok_or_else(|| non_unit(a, &self.pm))
    }
}

impl ResidueRing for Zn {
    fn modulus(&self) -> &PowerModulus {
        &self.pm
    }

    fn from_natural(&self, v: &Natural) -> Natural {
        v % self.n()
    }

    fn to_natural(&self, a: &Natural) -> Natural {
        a.clone()
    }

    fn for_modulus(pm: PowerModulus) -> Result<Self> {
        Ok(Self::new(pm))
    }
}

struct ExtInner<R: Ring> {
    base: R,
    /// Monic modulus `E`, ascending coefficients, length `e + 1`.
    poly: Vec<R::Elem>,
}

/// The quotient ring `R[z]/(E(z))` for a monic `E` of degree `e >= 1`.
///
/// Elements are coefficient vectors of length exactly `e`, ascending powers of `z`.
pub struct ExtRing<R: Ring> {
    inner: Arc<ExtInner<R>>,
}

impl<R: Ring> Clone for ExtRing<R> {
    fn clone(&self) -> Self {
        Self {
            inner: Arc::clone(&self.inner),
        }
    }
}

impl<R: Ring> fmt::Debug for ExtRing<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}[z]/({:?})", self.inner.base, self.inner.poly)
    }
}

impl<R: Ring> ExtRing<R> {
    /// `poly` lists the coefficients of `E` in ascending order and must be monic.
    pub fn new(base: R, poly: Vec<R::Elem>) -> Result<Self> {
        if poly.len() < 2 {
            return Err(Error::Usage("extension modulus must have degree at least 1".into()));
        }
        if *poly.last().unwrap() != base.one() {
            return Err(Error::Usage("extension modulus must be monic".into()));
        }
        Ok(Self {
            inner: Arc::new(ExtInner { base, poly }),
        })
    }

    pub fn base(&self) -> &R {
        &self.inner.base
    }

    /// `e = deg E`
    pub fn degree(&self) -> usize {
        self.inner.poly.len() - 1
    }

    pub fn modulus_poly(&self) -> &[R::Elem] {
        &self.inner.poly
    }

    pub fn from_base(&self, c: R::Elem) -> Vec<R::Elem> {
        let mut v = vec![self.inner.base.zero(); self.degree()];
        v[0] = c;
        v
    }

    /// The class of `z`.
    pub fn generator(&self) -> Vec<R::Elem> {
        let base = &self.inner.base;
        self.reduce_coeffs(vec![base.zero(), base.one()])
    }

    /// Reduces an arbitrary coefficient vector modulo `E`.
    pub fn reduce_coeffs(&self, mut c: Vec<R::Elem>) -> Vec<R::Elem> {
        let base = &self.inner.base;
        let e = self.degree();
        let poly = &self.inner.poly;
        for k in (e..c.len()).rev() {
            let lead = c[k].clone();
            if base.is_zero(&lead) {
                continue;
            }
            for i in 0..e {
                let t = base.mul(&lead, &poly[i]);
                c[k - e + i] = base.sub(&c[k - e + i], &t);
            }
        }
        c.resize(e, base.zero());
        c
    }
}

impl<R: Ring> Ring for ExtRing<R> {
    type Elem = Vec<R::Elem>;

    fn zero(&self) -> Self::Elem {
        vec![self.inner.base.zero(); self.degree()]
    }

    fn one(&self) -> Self::Elem {
        self.reduce_coeffs(vec![self.inner.base.one()])
    }

    fn from_u64(&self, v: u64) -> Self::Elem {
        self.reduce_coeffs(vec![self.inner.base.from_u64(v)])
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let base = &self.inner.base;
        a.iter().zip(b).map(|(x, y)| base.add(x, y)).collect()
    }

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let base = &self.inner.base;
        a.iter().zip(b).map(|(x, y)| base.sub(x, y)).collect()
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        let base = &self.inner.base;
        a.iter().map(|x| base.neg(x)).collect()
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let base = &self.inner.base;
        let e = self.degree();
        let mut prod = vec![base.zero(); 2 * e - 1];
        for (i, x) in a.iter().enumerate() {
            if base.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                prod[i + j] = base.mul_add(&prod[i + j], x, y);
            }
        }
        self.reduce_coeffs(prod)
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.iter().all(|x| self.inner.base.is_zero(x))
    }
}

/// Remainder of `p` modulo `(n, E)` as an element of `ctx`.
pub fn ext_reduce<R: Ring>(p: &UniPoly<R>, ctx: &ExtRing<R>) -> Vec<R::Elem> {
    ctx.reduce_coeffs(p.coeffs().to_vec())
}

/// Reduces integer coefficients modulo `n` and then modulo `E`.
pub fn ext_reduce_naturals<R: ResidueRing>(p: &[Natural], ctx: &ExtRing<R>) -> Vec<R::Elem> {
    let base = ctx.base();
    ctx.reduce_coeffs(p.iter().map(|c| base.from_natural(c)).collect())
}

/// `f mod g` for monic `g` of degree at least one.
pub fn poly_mod<R: Ring>(f: &UniPoly<R>, g: &UniPoly<R>) -> Result<UniPoly<R>> {
    Ok(f.div_rem_monic(g)?.1)
}

/// A residue together with its modulus, for checked one-off arithmetic.
#[derive(Clone, PartialEq, Eq)]
pub struct RingElem {
    value: Natural,
    modulus: Arc<PowerModulus>,
}

impl fmt::Debug for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.value, self.modulus)
    }
}

impl RingElem {
    /// Reduces `value` modulo `n`.
    pub fn new(value: Natural, modulus: Arc<PowerModulus>) -> Self {
        let value = value % modulus.n();
        Self { value, modulus }
    }

    pub fn value(&self) -> &Natural {
        &self.value
    }

    pub fn modulus(&self) -> &PowerModulus {
        &self.modulus
    }

    fn same_ring(&self, other: &Self) -> Result<()> {
        if self.modulus.n() == other.modulus.n() {
            Ok(())
        } else {
            Err(Error::ModulusMismatch(format!(
                "{} vs {}",
                self.modulus, other.modulus
            )))
        }
    }

    fn with_value(&self, value: Natural) -> Self {
        Self {
            value,
            modulus: Arc::clone(&self.modulus),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_ring(other)?;
        Ok(self.with_value((&self.value + &other.value) % self.modulus.n()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_ring(other)?;
        let n = self.modulus.n();
        Ok(self.with_value((&self.value + n - &other.value) % n))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_ring(other)?;
        Ok(self.with_value((&self.value * &other.value) % self.modulus.n()))
    }

    pub fn pow(&self, e: &Natural) -> Self {
        self.with_value(self.value.modpow(e, self.modulus.n()))
    }

    pub fn inverse(&self) -> Result<Self> {
        inv_mod_natural(&self.value, self.modulus.n())
            .map(|v| self.with_value(v))
            .ok_or_else(|| non_unit(&self.value, &self.modulus))
    }
}

/// Operations accepted by [`mod_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Pow,
}

/// Binary residue arithmetic; for [`ArithOp::Pow`] the value of `y` is the exponent.
pub fn mod_arith(op: ArithOp, x: &RingElem, y: &RingElem) -> Result<RingElem> {
    match op {
        ArithOp::Add => x.add(y),
        ArithOp::Sub => x.sub(y),
        ArithOp::Mul => x.mul(y),
        ArithOp::Pow => Ok(x.pow(&y.value)),
    }
}

pub fn mod_inverse(x: &RingElem) -> Result<RingElem> {
    x.inverse()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn elem(v: u64, n: &Arc<PowerModulus>) -> RingElem {
        RingElem::new(Natural::from(v), Arc::clone(n))
    }

    #[test]
    fn small_examples() {
        let m5 = Arc::new(PowerModulus::from_u64(5, 1).unwrap());
        assert_eq!(elem(3, &m5).add(&elem(4, &m5)).unwrap().value(), &Natural::from(2u32));

        let m1000 = Arc::new(PowerModulus::from_u64(1000, 1).unwrap());
        let p = mod_arith(ArithOp::Pow, &elem(2, &m1000), &elem(10, &m1000)).unwrap();
        assert_eq!(p.value(), &Natural::from(24u32));

        let big = Arc::new(PowerModulus::from_u64(10, 6).unwrap());
        let x = elem(999_999, &big);
        assert_eq!(x.mul(&x).unwrap().value(), &Natural::from(1u32));
    }

    #[test]
    fn inverse_and_non_unit() {
        let m7 = Arc::new(PowerModulus::from_u64(7, 1).unwrap());
        assert_eq!(mod_inverse(&elem(3, &m7)).unwrap().value(), &Natural::from(5u32));
        let m4 = Arc::new(PowerModulus::from_u64(2, 2).unwrap());
        assert!(matches!(mod_inverse(&elem(2, &m4)), Err(Error::NonUnit { .. })));
        assert_eq!(Zn64::with_power(2, 2).unwrap().inv(&2).is_err(), true);
    }

    #[test]
    fn modulus_mismatch_is_reported() {
        let a = Arc::new(PowerModulus::from_u64(5, 1).unwrap());
        let b = Arc::new(PowerModulus::from_u64(7, 1).unwrap());
        assert!(matches!(
            elem(1, &a).add(&elem(1, &b)),
            Err(Error::ModulusMismatch(_))
        ));
    }

    #[test]
    fn power_modulus_caches_n() {
        let pm = PowerModulus::from_u64(3, 5).unwrap();
        assert_eq!(pm.n(), &Natural::from(243u32));
        assert!(PowerModulus::from_u64(1, 2).is_err());
        assert!(PowerModulus::from_u64(2, 0).is_err());
        assert!(Zn64::with_power(2, 64).is_err());
        assert!(Zn64::with_power(2, 63).is_ok());
    }

    #[test]
    fn f4_arithmetic() {
        let f2 = Zn64::with_power(2, 1).unwrap();
        let f4 = ExtRing::new(f2.clone(), vec![1, 1, 1]).unwrap();
        let z = f4.generator();
        assert_eq!(f4.mul(&z, &z), vec![1, 1]);
        let p = UniPoly::new(f2, vec![0, 0, 1]);
        assert_eq!(ext_reduce(&p, &f4), vec![1, 1]);
        assert!(ExtRing::new(Zn64::with_power(3, 1).unwrap(), vec![1, 2]).is_err());
    }

    #[test]
    fn word_and_big_rings_agree() {
        let pm = PowerModulus::from_u64(3, 30).unwrap();
        let small = Zn64::new(pm.clone()).unwrap();
        let big = Zn::new(pm);
        let a = 123_456_789_013u64 % small.n();
        let b = 98_765_432_109u64 % small.n();
        assert_eq!(Natural::from(small.mul(&a, &b)), big.mul(&a.into(), &b.into()));
        assert_eq!(Natural::from(small.sub(&a, &b)), big.sub(&a.into(), &b.into()));
        assert_eq!(
            Natural::from(small.inv(&a).unwrap()),
            big.inv(&Natural::from(a)).unwrap()
        );
    }

    fn big_modulus() -> impl Strategy<Value = Natural> {
        proptest::collection::vec(any::<u32>(), 1..9)
            .prop_map(|limbs| Natural::new(limbs) + Natural::from(2u32))
    }

    proptest! {
        #[test]
        fn add_sub_and_inverse(n in big_modulus(), x in any::<u128>(), y in any::<u128>()) {
            let ring = Zn::new(PowerModulus::new(n, 1).unwrap());
            let x = ring.from_natural(&Natural::from(x));
            let y = ring.from_natural(&Natural::from(y));
            prop_assert_eq!(ring.sub(&ring.add(&x, &y), &y), x.clone());
            if let Ok(v) = ring.inv(&x) {
                prop_assert_eq!(ring.mul(&x, &v), ring.one());
            } else {
                prop_assert!(!x.gcd(ring.n()).is_one());
            }
        }

        #[test]
        fn units_mod_3_pow_5(u in 1u64..243) {
            prop_assume!(u % 3 != 0);
            let ring = Zn64::with_power(3, 5).unwrap();
            let v = ring.inv(&u).unwrap();
            prop_assert_eq!(ring.mul(&u, &v), 1);
        }

        #[test]
        fn zn64_matches_u128(n in 2u64.., a in any::<u64>(), b in any::<u64>()) {
            let ring = Zn64::new(PowerModulus::from_u64(n, 1).unwrap()).unwrap();
            let (a, b) = (a % n, b % n);
            prop_assert_eq!(ring.mul(&a, &b), ((a as u128 * b as u128) % n as u128) as u64);
            prop_assert_eq!(ring.add(&a, &b), ((a as u128 + b as u128) % n as u128) as u64);
            prop_assert_eq!(ring.add(&ring.sub(&a, &b), &b), a);
        }
    }
}
