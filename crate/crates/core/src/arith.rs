//! Exact integer arithmetic and the number-theoretic predicates the rest of
//! the crate is built on: Bézout solves, square and squarefree tests, and
//! primality.
//!
//! Squarefree testing is trial division by primes up to a bound (default
//! 10^6) followed by checks on the leftover cofactor. A cofactor that is
//! composite, not a perfect power and larger than the cube of the bound is
//! reported as [`Squarefreeness::Unproven`] instead of guessed.
//!
//! Primality is deterministic below 2^64 (Miller–Rabin with the first twelve
//! prime bases). Above that it is Baillie–PSW plus a configurable number of
//! extra Miller–Rabin rounds with bases drawn from a seeded ChaCha stream, and
//! the answer is [`Primality::ProbablePrime`].

use std::borrow::Cow;
use std::sync::OnceLock;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default trial-division bound used by the squarefree and factoring helpers.
pub const DEFAULT_TRIAL_BOUND: u64 = 1_000_000;

/// Extended Euclid. Returns `(g, u, v)` with `u*a + v*b = g = gcd(a, b) >= 0`.
pub fn extended_gcd(a: &BigInt, b: &BigInt) -> Result<(BigInt, BigInt, BigInt)> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::DegenerateInput("extended_gcd(0, 0)".into()));
    }
    let (mut old_r, mut r) = (a.clone(), b.clone());
    let (mut old_s, mut s) = (BigInt::one(), BigInt::zero());
    let (mut old_t, mut t) = (BigInt::zero(), BigInt::one());
    while !r.is_zero() {
        let q = old_r.div_floor(&r);
        let next_r = &old_r - &q * &r;
        old_r = std::mem::replace(&mut r, next_r);
        let next_s = &old_s - &q * &s;
        old_s = std::mem::replace(&mut s, next_s);
        let next_t = &old_t - &q * &t;
        old_t = std::mem::replace(&mut t, next_t);
    }
    if old_r.is_negative() {
        Ok((-old_r, -old_s, -old_t))
    } else {
        Ok((old_r, old_s, old_t))
    }
}

/// Inverse of `a` modulo `m` (m > 0), as the least non-negative residue.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    if m.is_one() {
        return Some(BigInt::zero());
    }
    let (g, u, _) = extended_gcd(a, m).ok()?;
    if !g.is_one() {
        return None;
    }
    Some(u.mod_floor(m))
}

/// Floor of the square root of a non-negative integer.
pub fn isqrt(n: &BigInt) -> BigInt {
    debug_assert!(!n.is_negative());
    n.sqrt()
}

pub fn is_perfect_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

/// Returns `Some(r)` with `r^k = n` when `n >= 0` is a perfect k-th power.
fn exact_root(n: &BigInt, k: u32) -> Option<BigInt> {
    let r = n.nth_root(k);
    if num_traits::pow(r.clone(), k as usize) == *n {
        Some(r)
    } else {
        None
    }
}

/// Smallest `(r, k)` decomposition with `n = r^k`, `k >= 2` maximal, or `None`.
fn perfect_power(n: &BigInt) -> Option<(BigInt, u32)> {
    if n <= &BigInt::one() {
        return None;
    }
    let bits = n.bits() as u32;
    for k in (2..=bits).rev() {
        if let Some(r) = exact_root(n, k) {
            if r > BigInt::one() {
                return Some((r, k));
            }
        }
    }
    None
}

fn sieve(limit: u64) -> Vec<u64> {
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for i in 2..=limit {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= limit {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

fn small_primes(bound: u64) -> Cow<'static, [u64]> {
    static TABLE: OnceLock<Vec<u64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| sieve(DEFAULT_TRIAL_BOUND));
    if bound <= DEFAULT_TRIAL_BOUND {
        let end = table.partition_point(|&p| p <= bound);
        Cow::Borrowed(&table[..end])
    } else {
        Cow::Owned(sieve(bound))
    }
}

/// Result of trial division: prime factors found below the bound, plus the
/// cofactor whose prime factors all exceed the bound.
struct TrialDivision {
    factors: Vec<(BigInt, u32)>,
    cofactor: BigInt,
    /// True when the cofactor is known to be 1 or prime (p^2 exceeded it).
    cofactor_resolved: bool,
}

fn trial_divide(n: &BigInt, bound: u64) -> TrialDivision {
    let mut factors = Vec::new();
    let n = n.abs();
    let primes = small_primes(bound);
    if let Some(mut m) = n.to_u64() {
        for &p in primes.iter() {
            if p.saturating_mul(p) > m {
                return TrialDivision {
                    factors,
                    cofactor: BigInt::from(m),
                    cofactor_resolved: true,
                };
            }
            if m % p == 0 {
                let mut e = 0;
                while m % p == 0 {
                    m /= p;
                    e += 1;
                }
                factors.push((BigInt::from(p), e));
            }
        }
        let last = primes.last().copied().unwrap_or(1);
        let resolved = m == 1 || (last as u128) * (last as u128) >= m as u128;
        return TrialDivision {
            factors,
            cofactor: BigInt::from(m),
            cofactor_resolved: resolved,
        };
    }
    let mut m = n;
    let mut resolved = false;
    for &p in primes.iter() {
        let pb = BigInt::from(p);
        if &pb * &pb > m {
            resolved = true;
            break;
        }
        if (&m % p).is_zero() {
            let mut e = 0;
            while (&m % p).is_zero() {
                m /= p;
                e += 1;
            }
            factors.push((pb, e));
        }
    }
    if m.is_one() {
        resolved = true;
    }
    TrialDivision {
        factors,
        cofactor: m,
        cofactor_resolved: resolved,
    }
}

/// Tri-state squarefreeness verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Squarefreeness {
    Squarefree,
    NotSquarefree,
    Unproven,
}

/// Squarefree test with an explicit trial-division bound.
pub fn squarefree_status(n: &BigInt, bound: u64) -> Result<Squarefreeness> {
    if n.is_zero() {
        return Err(Error::DegenerateInput("squarefree test of 0".into()));
    }
    let td = trial_divide(n, bound);
    if td.factors.iter().any(|(_, e)| *e >= 2) {
        return Ok(Squarefreeness::NotSquarefree);
    }
    let m = td.cofactor;
    if td.cofactor_resolved || m.is_one() {
        return Ok(Squarefreeness::Squarefree);
    }
    if is_prime(&m)? {
        return Ok(Squarefreeness::Squarefree);
    }
    if perfect_power(&m).is_some() {
        return Ok(Squarefreeness::NotSquarefree);
    }
    // Composite, no prime factor <= bound, below bound^3: exactly two distinct primes.
    let b = BigInt::from(bound);
    if m < &b * &b * &b {
        return Ok(Squarefreeness::Squarefree);
    }
    Ok(Squarefreeness::Unproven)
}

/// True iff no prime square divides `n`. Errors on 0, and when the default
/// trial-division bound cannot decide.
pub fn is_squarefree(n: &BigInt) -> Result<bool> {
    match squarefree_status(n, DEFAULT_TRIAL_BOUND)? {
        Squarefreeness::Squarefree => Ok(true),
        Squarefreeness::NotSquarefree => Ok(false),
        Squarefreeness::Unproven => Err(Error::SquarefreeUnproven(n.clone())),
    }
}

/// Factorization of |n| into primes, trial division plus prime/perfect-power
/// analysis of the cofactor. Fails when the cofactor is composite with only
/// large prime factors and not a prime power.
pub fn factor(n: &BigInt, bound: u64) -> Result<Vec<(BigInt, u32)>> {
    if n.is_zero() {
        return Err(Error::DegenerateInput("factor(0)".into()));
    }
    let td = trial_divide(n, bound);
    let mut factors = td.factors;
    let m = td.cofactor;
    if !m.is_one() {
        if td.cofactor_resolved || is_prime(&m)? {
            factors.push((m, 1));
        } else if let Some((r, k)) = perfect_power(&m) {
            for (p, e) in factor(&r, bound)? {
                factors.push((p, e * k));
            }
        } else {
            return Err(Error::Unfactored(m));
        }
    }
    factors.sort();
    Ok(factors)
}

/// Squarefree `s` with `n = s * m^2`, sign preserved.
pub fn squarefree_part(n: &BigInt) -> Result<BigInt> {
    if n.is_zero() {
        return Err(Error::DegenerateInput("squarefree part of 0".into()));
    }
    let td = trial_divide(n, DEFAULT_TRIAL_BOUND);
    let mut s = BigInt::one();
    for (p, e) in &td.factors {
        if e % 2 == 1 {
            s *= p;
        }
    }
    let m = td.cofactor;
    if !m.is_one() {
        if td.cofactor_resolved || is_prime(&m)? {
            s *= m;
        } else if let Some((r, k)) = perfect_power(&m) {
            if k % 2 == 1 {
                s *= squarefree_part(&r)?;
            }
        } else {
            let b = BigInt::from(DEFAULT_TRIAL_BOUND);
            if m < &b * &b * &b {
                s *= m;
            } else {
                return Err(Error::SquarefreeUnproven(n.clone()));
            }
        }
    }
    if n.is_negative() {
        s = -s;
    }
    Ok(s)
}

/// Jacobi symbol (a/n) for odd positive n.
pub fn jacobi(a: &BigInt, n: &BigInt) -> i32 {
    assert!(
        n.is_positive() && n.is_odd(),
        "jacobi needs odd positive modulus"
    );
    let mut a = a.mod_floor(n);
    let mut n = n.clone();
    let mut result = 1;
    let three = BigInt::from(3);
    let five = BigInt::from(5);
    let eight = BigInt::from(8);
    let four = BigInt::from(4);
    while !a.is_zero() {
        while a.is_even() {
            a >>= 1;
            let r = n.mod_floor(&eight);
            if r == three || r == five {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a.mod_floor(&four) == three && n.mod_floor(&four) == three {
            result = -result;
        }
        a = a.mod_floor(&n);
    }
    if n.is_one() {
        result
    } else {
        0
    }
}

/// Primality verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Primality {
    Prime,
    ProbablePrime,
    Composite,
}

/// Knobs for the probable-prime path above 2^64.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimalityConfig {
    /// Miller–Rabin rounds with random bases, run after Baillie–PSW.
    pub extra_rounds: u32,
    /// Seed for the base stream, so verdicts are replayable.
    pub seed: u64,
}

impl Default for PrimalityConfig {
    fn default() -> Self {
        Self {
            extra_rounds: 8,
            seed: 0,
        }
    }
}

/// Prime factorization of a machine integer, trial division first.
pub fn factor_u64(mut n: u64) -> Result<Vec<(u64, u32)>> {
    let mut out = Vec::new();
    if n == 0 {
        return Err(Error::Domain("cannot factor 0".into()));
    }
    for &p in small_primes(DEFAULT_TRIAL_BOUND).iter() {
        if p * p > n {
            break;
        }
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    if n > 1 {
        let bound = DEFAULT_TRIAL_BOUND as u128;
        if (n as u128) < bound * bound || is_prime_u64(n) {
            out.push((n, 1));
        } else {
            for (p, e) in factor(&BigInt::from(n), DEFAULT_TRIAL_BOUND)? {
                out.push((p.to_u64().expect("factor of a u64"), e));
            }
            out.sort_unstable();
        }
    }
    Ok(out)
}

/// All positive divisors of `n`, unsorted.
pub fn divisors_u64(n: u64) -> Result<Vec<u64>> {
    let mut divs = vec![1u64];
    for (p, e) in factor_u64(n)? {
        let len = divs.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    Ok(divs)
}

const DETERMINISTIC_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &DETERMINISTIC_BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &DETERMINISTIC_BASES {
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

fn strong_probable_prime(n: &BigInt, base: &BigInt) -> bool {
    let n_minus_1: BigInt = n - 1;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    let mut x = base.modpow(&d, n);
    if x.is_one() || x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == n_minus_1 {
            return true;
        }
    }
    false
}

fn half_mod(x: BigInt, n: &BigInt) -> BigInt {
    if x.is_odd() {
        (x + n) >> 1
    } else {
        x >> 1
    }
}

/// Strong Lucas probable-prime test with Selfridge parameters.
fn strong_lucas_probable_prime(n: &BigInt) -> bool {
    if is_perfect_square(n) {
        return false;
    }
    let mut d_param = BigInt::from(5);
    loop {
        let j = jacobi(&d_param, n);
        if j == -1 {
            break;
        }
        if j == 0 && d_param.abs() != *n {
            return false;
        }
        d_param = if d_param.is_positive() {
            -(d_param + 2u32)
        } else {
            -(d_param - 2u32)
        };
    }
    let p = BigInt::one();
    let q: BigInt = (BigInt::one() - &d_param) / 4;
    let n_plus_1: BigInt = n + 1;
    let s = n_plus_1.trailing_zeros().unwrap_or(0);
    let d = &n_plus_1 >> s;

    let mut u = BigInt::one();
    let mut v = p.clone();
    let mut qk = q.mod_floor(n);
    let bits = d.bits();
    for i in (0..bits - 1).rev() {
        u = (&u * &v).mod_floor(n);
        v = (&v * &v - &qk * 2u32).mod_floor(n);
        qk = (&qk * &qk).mod_floor(n);
        if d.bit(i) {
            let nu = half_mod((&p * &u + &v).mod_floor(n), n);
            let nv = half_mod((&d_param * &u + &p * &v).mod_floor(n), n);
            u = nu.mod_floor(n);
            v = nv.mod_floor(n);
            qk = (&qk * &q).mod_floor(n);
        }
    }
    if u.is_zero() || v.is_zero() {
        return true;
    }
    for _ in 1..s {
        v = (&v * &v - &qk * 2u32).mod_floor(n);
        if v.is_zero() {
            return true;
        }
        qk = (&qk * &qk).mod_floor(n);
    }
    false
}

/// Primality with an explicit probable-prime configuration.
pub fn primality_with(n: &BigInt, cfg: &PrimalityConfig) -> Result<Primality> {
    if n <= &BigInt::one() {
        return Err(Error::Domain(format!("primality of {n} (need n > 1)")));
    }
    if let Some(small) = n.to_u64() {
        return Ok(if is_prime_u64(small) {
            Primality::Prime
        } else {
            Primality::Composite
        });
    }
    for &p in small_primes(1000).iter() {
        if (n % p).is_zero() {
            return Ok(Primality::Composite);
        }
    }
    if !strong_probable_prime(n, &BigInt::from(2)) || !strong_lucas_probable_prime(n) {
        return Ok(Primality::Composite);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let span = n - 3u32;
    for _ in 0..cfg.extra_rounds {
        let bytes: Vec<u8> = (0..n.bits().div_ceil(8) + 8).map(|_| rng.gen()).collect();
        let base = BigInt::from_bytes_le(Sign::Plus, &bytes).mod_floor(&span) + 2u32;
        if !strong_probable_prime(n, &base) {
            return Ok(Primality::Composite);
        }
    }
    Ok(Primality::ProbablePrime)
}

pub fn primality(n: &BigInt) -> Result<Primality> {
    primality_with(n, &PrimalityConfig::default())
}

/// Primality test. Exact below 2^64, Baillie–PSW based above.
pub fn is_prime(n: &BigInt) -> Result<bool> {
    Ok(primality(n)? != Primality::Composite)
}

const SIEVE_SPAN_LIMIT: u64 = 50_000_000;

/// All primes in `[lo, hi]`, ascending.
pub fn primes_in_range(lo: &BigInt, hi: &BigInt) -> Vec<BigInt> {
    let two = BigInt::from(2);
    let lo = if lo < &two { two } else { lo.clone() };
    if lo > *hi {
        return Vec::new();
    }
    if let (Some(l), Some(h)) = (lo.to_u64(), hi.to_u64()) {
        if h - l <= SIEVE_SPAN_LIMIT && h < (1u64 << 40) {
            return segmented_sieve(l, h)
                .into_iter()
                .map(BigInt::from)
                .collect();
        }
    }
    let mut out = Vec::new();
    let mut n = lo;
    while &n <= hi {
        if is_prime(&n).unwrap_or(false) {
            out.push(n.clone());
        }
        n += 1;
    }
    out
}

fn segmented_sieve(lo: u64, hi: u64) -> Vec<u64> {
    let root = (hi as f64).sqrt() as u64 + 1;
    let base = sieve(root);
    let len = (hi - lo + 1) as usize;
    let mut composite = vec![false; len];
    for &p in &base {
        if p * p > hi {
            break;
        }
        let start = std::cmp::max(p * p, lo.div_ceil(p) * p);
        let mut j = start;
        while j <= hi {
            composite[(j - lo) as usize] = true;
            j += p;
        }
    }
    (0..len)
        .filter(|&i| !composite[i])
        .map(|i| lo + i as u64)
        .filter(|&v| v >= 2)
        .collect()
}

/// Odd part of a non-zero integer (absolute value).
pub fn odd_part(n: &BigInt) -> BigInt {
    let n = n.abs();
    if n.is_zero() {
        return n;
    }
    let tz = n.trailing_zeros().unwrap_or(0);
    n >> tz
}

/// Non-negative gcd.
pub fn gcd(a: &BigInt, b: &BigInt) -> BigInt {
    a.gcd(b)
}
