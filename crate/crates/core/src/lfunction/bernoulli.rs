//! Exact Bernoulli numbers, B_1 = −1/2.
//!
//! Even-index values come from the tangent numbers: with T_n the n-th
//! tangent number, B_{2n} = (−1)^{n−1}·2n·T_n / (4^n·(4^n − 1)). The table is
//! filled in one O(n²) pass and cached process-wide.

use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Largest index served by default.
pub const DEFAULT_BOUND: usize = 4096;

fn table() -> &'static RwLock<Vec<Rational>> {
    static TABLE: OnceLock<RwLock<Vec<Rational>>> = OnceLock::new();
    TABLE.get_or_init(|| RwLock::new(Vec::new()))
}

/// B_{2i} for i = 0..=half.
fn even_bernoulli(half: usize) -> Vec<Rational> {
    let mut out = Vec::with_capacity(half + 1);
    out.push(Rational::one());
    if half == 0 {
        return out;
    }
    // tangent numbers, index 1..=half
    let mut t = vec![BigInt::zero(); half + 1];
    t[1] = BigInt::one();
    for k in 2..=half {
        t[k] = &t[k - 1] * BigInt::from(k - 1);
    }
    for k in 2..=half {
        for j in k..=half {
            t[j] = &t[j - 1] * BigInt::from(j - k) + &t[j] * BigInt::from(j - k + 2);
        }
    }
    for (n, tn) in t.iter().enumerate().skip(1) {
        let four_n = BigInt::one() << (2 * n);
        let den = &four_n * (&four_n - BigInt::one());
        let mut num = tn * BigInt::from(2 * n);
        if n % 2 == 0 {
            num = -num;
        }
        out.push(Rational::new(num, den));
    }
    out
}

/// B_m with the default bound.
pub fn bernoulli(m: usize) -> Result<Rational> {
    bernoulli_bounded(m, DEFAULT_BOUND)
}

pub fn bernoulli_bounded(m: usize, bound: usize) -> Result<Rational> {
    if m > bound {
        return Err(Error::BoundExceeded { index: m, bound });
    }
    match m {
        0 => return Ok(Rational::one()),
        1 => return Ok(Rational::new(BigInt::from(-1), BigInt::from(2))),
        _ if m % 2 == 1 => return Ok(Rational::zero()),
        _ => {}
    }
    let half = m / 2;
    if let Some(b) = table().read().expect("bernoulli cache poisoned").get(half) {
        return Ok(b.clone());
    }
    let mut guard = table().write().expect("bernoulli cache poisoned");
    if guard.len() <= half {
        // grow geometrically so repeated requests stay amortized
        let target = half.max(2 * guard.len()).max(32).min(bound.max(m) / 2);
        *guard = even_bernoulli(target);
    }
    Ok(guard[half].clone())
}

/// Snapshot of the cached even-index values B_0, B_2, B_4, ...
pub fn cached_even() -> Vec<Rational> {
    table().read().expect("bernoulli cache poisoned").clone()
}

/// Install precomputed even-index values B_0, B_2, ... if they extend the
/// cache. Each denominator is checked against von Staudt–Clausen first.
pub fn seed_cache(values: Vec<Rational>) -> Result<usize> {
    for (i, b) in values.iter().enumerate() {
        let expected = if i == 0 { BigInt::one() } else { staudt_denominator(2 * i as u64) };
        if *b.denom() != expected {
            return Err(Error::Schema(format!("cached B_{} has denominator {}, expected {}", 2 * i, b.denom(), expected)));
        }
    }
    let mut guard = table().write().expect("bernoulli cache poisoned");
    if values.len() > guard.len() {
        *guard = values;
    }
    Ok(guard.len())
}

/// ∏ p over primes with (p − 1) | n.
fn staudt_denominator(n: u64) -> BigInt {
    let mut den = BigInt::one();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            let e = n / d;
            if crate::padic::is_prime(d + 1) {
                den *= BigInt::from(d + 1);
            }
            if e != d && crate::padic::is_prime(e + 1) {
                den *= BigInt::from(e + 1);
            }
        }
        d += 1;
    }
    den
}
