//! Prime generation: sieve, deterministic primality below `2^64`, small primes
//! with a large product, primes in an arithmetic progression, and `log*`.

use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{mul_mod_u64, pow_mod_u64, Natural};
use crate::error::{Error, Result};

/// Largest sieve bound accepted by [`sieve_primes`].
pub const MAX_SIEVE_LIMIT: u64 = 1 << 32;

/// All primes `<= limit`, ascending.
pub fn sieve_primes(limit: u64) -> Result<Vec<u64>> {
    if limit < 2 {
        return Err(Error::Usage(format!("sieve limit must be at least 2, got {limit}")));
    }
    if limit > MAX_SIEVE_LIMIT {
        return Err(Error::Resource(format!(
            "sieve limit {limit} exceeds {MAX_SIEVE_LIMIT}"
        )));
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    Ok(primes)
}

/// Miller–Rabin with the first twelve primes as witnesses, exact for all `u64`.
pub fn is_prime_u64(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for p in WITNESSES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in WITNESSES {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primality of `n`; only defined below `2^64`.
pub fn is_prime(n: &Natural) -> Result<bool> {
    n.to_u64()
        .map(is_prime_u64)
        .ok_or_else(|| Error::Unsupported(format!("primality of {n} (at least 2^64)")))
}

/// `ceil(log2 x)` for `x >= 1`.
pub fn ceil_log2(x: &Natural) -> u64 {
    if x.is_zero() || x.is_one() {
        0
    } else {
        (x - 1u32).bits()
    }
}

/// The shortest ascending prefix of the primes whose product exceeds `m`.
pub fn small_primes_exceeding(m: &Natural) -> Result<Vec<u64>> {
    if m < &Natural::from(2u32) {
        return Err(Error::Usage(format!("bound must be at least 2, got {m}")));
    }
    let ceiling = 16 * ceil_log2(m);
    let mut product = Natural::one();
    let mut out = Vec::new();
    for p in sieve_primes(ceiling)? {
        out.push(p);
        product *= p;
        if &product > m {
            return Ok(out);
        }
    }
    Err(Error::Internal(format!(
        "primes up to {ceiling} do not multiply past {m}"
    )))
}

/// Primes `p_1 < ... < p_k`, all `≡ 1 (mod d_tilde)`, with product above the bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApPrimeResult {
    pub d_tilde: u64,
    pub primes: Vec<u64>,
    pub product: Natural,
}

/// Candidate cap `(D * ceil(log2 M))^3`, saturating at `u64::MAX`.
pub fn ap_candidate_cap(d: u64, m: &Natural) -> u64 {
    let base = d as u128 * ceil_log2(m) as u128;
    base.checked_pow(3)
        .and_then(|c| u64::try_from(c).ok())
        .unwrap_or(u64::MAX)
}

/// Searches common differences `D, D-1, ..., ceil(0.8 D)` for primes
/// `1 + k * d_tilde` (`k >= 2`) below the cap whose product exceeds `m`.
pub fn ap_prime_search(d: u64, m: &Natural) -> Result<ApPrimeResult> {
    if d < 5 {
        return Err(Error::Usage(format!("D must be at least 5, got {d}")));
    }
    if m < &Natural::from(2u32) {
        return Err(Error::Usage(format!("M must be at least 2, got {m}")));
    }
    let cap = ap_candidate_cap(d, m);
    let low = (4 * d).div_ceil(5);
    for d_tilde in (low..=d).rev() {
        let mut product = Natural::one();
        let mut primes = Vec::new();
        let mut k = 2u64;
        while let Some(p) = k.checked_mul(d_tilde).and_then(|x| x.checked_add(1)) {
            if p > cap {
                break;
            }
            if is_prime_u64(p) {
                primes.push(p);
                product *= p;
                if &product > m {
                    return Ok(ApPrimeResult { d_tilde, primes, product });
                }
            }
            k += 1;
        }
    }
    Err(Error::NoProgressionFound { d, m_bits: ceil_log2(m) })
}

/// Number of `ceil(log2)` steps needed to bring `x` down to at most 1.
///
/// On integers this agrees with iterating the real logarithm.
pub fn log_star(x: &Natural) -> u32 {
    let mut c = 0;
    let mut v = x.clone();
    while v > Natural::one() {
        v = Natural::from(ceil_log2(&v));
        c += 1;
    }
    c
}

/// `ceil(log2)` applied `c` times.
pub fn iterated_log(x: &Natural, c: u32) -> Natural {
    (0..c).fold(x.clone(), |v, _| Natural::from(ceil_log2(&v)))
}
