//! Residues in Z/p^M carrying an absolute precision.
//!
//! A [`PadicScalar`] stands for an element of Z_p known modulo p^prec, where
//! `prec` never exceeds the working precision M of its [`PrimeContext`].
//! Digits above `prec` are always zeroed, so equal scalars have equal
//! representations.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// An odd prime together with the working absolute precision M.
#[derive(Debug)]
pub struct PrimeContext {
    p: u64,
    prec: u32,
    powers: Vec<BigUint>,
}

pub type Ctx = Arc<PrimeContext>;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl PrimeContext {
    pub fn new(p: u64, prec: u32) -> Result<Ctx> {
        if p == 2 || !is_prime(p) {
            return Err(Error::InvalidPrime(p));
        }
        if prec == 0 {
            return Err(Error::ZeroPrecision);
        }
        let pb = BigUint::from(p);
        let mut powers = Vec::with_capacity(prec as usize + 1);
        powers.push(BigUint::one());
        for i in 0..prec as usize {
            let next = &powers[i] * &pb;
            powers.push(next);
        }
        Ok(Arc::new(PrimeContext { p, prec, powers }))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn modulus(&self) -> &BigUint {
        &self.powers[self.prec as usize]
    }

    /// p^e for e ≤ M.
    pub fn pow(&self, e: u32) -> &BigUint {
        &self.powers[e as usize]
    }

    /// Same prime at another working precision.
    pub fn with_precision(&self, prec: u32) -> Result<Ctx> {
        PrimeContext::new(self.p, prec)
    }

    pub fn same_as(&self, other: &PrimeContext) -> bool {
        self.p == other.p && self.prec == other.prec
    }
}

impl PartialEq for PrimeContext {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

impl Eq for PrimeContext {}

/// p-adic valuation of a nonnegative integer, capped at `cap`.
pub fn vp_capped(x: &BigUint, p: u64, cap: u32) -> u32 {
    if x.is_zero() {
        return cap;
    }
    let mut v = 0;
    let mut m = x.clone();
    loop {
        if v >= cap {
            return cap;
        }
        let (q, r) = m.div_rem(&BigUint::from(p));
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

pub fn vp_u64(mut x: u64, p: u64) -> Option<u32> {
    if x == 0 {
        return None;
    }
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    Some(v)
}

fn mod_floor(x: &BigInt, m: &BigUint) -> BigUint {
    let m = BigInt::from_biguint(Sign::Plus, m.clone());
    x.mod_floor(&m).to_biguint().expect("mod_floor is nonnegative")
}

fn inverse_mod(x: &BigUint, m: &BigUint) -> Option<BigUint> {
    if m.is_one() {
        return Some(BigUint::zero());
    }
    x.modinv(m)
}

#[derive(Clone)]
pub struct PadicScalar {
    ctx: Ctx,
    value: BigUint,
    prec: u32,
}

impl PadicScalar {
    /// `value mod p^prec`, with `prec` clamped to the working precision.
    pub fn with_prec(ctx: &Ctx, value: BigUint, prec: u32) -> Self {
        let prec = prec.min(ctx.prec());
        let value = value % ctx.pow(prec);
        PadicScalar { ctx: ctx.clone(), value, prec }
    }

    pub fn new(ctx: &Ctx, value: BigUint) -> Self {
        Self::with_prec(ctx, value, ctx.prec())
    }

    pub fn from_bigint(ctx: &Ctx, x: &BigInt) -> Self {
        PadicScalar { ctx: ctx.clone(), value: mod_floor(x, ctx.modulus()), prec: ctx.prec() }
    }

    pub fn from_i64(ctx: &Ctx, x: i64) -> Self {
        Self::from_bigint(ctx, &BigInt::from(x))
    }

    pub fn zero(ctx: &Ctx) -> Self {
        Self::with_prec(ctx, BigUint::zero(), ctx.prec())
    }

    pub fn one(ctx: &Ctx) -> Self {
        Self::from_i64(ctx, 1)
    }

    /// Nothing known: the residue mod p^0.
    pub fn unknown(ctx: &Ctx) -> Self {
        PadicScalar { ctx: ctx.clone(), value: BigUint::zero(), prec: 0 }
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn p(&self) -> u64 {
        self.ctx.p()
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Symmetric representative in (-p^prec/2, p^prec/2].
    pub fn to_signed(&self) -> BigInt {
        let m = self.ctx.pow(self.prec);
        let v = BigInt::from_biguint(Sign::Plus, self.value.clone());
        if &self.value + &self.value > *m {
            v - BigInt::from_biguint(Sign::Plus, m.clone())
        } else {
            v
        }
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.value.to_u64()
    }

    /// Lower bound for the valuation: exact when the value is nonzero mod
    /// p^prec, otherwise `prec`.
    pub fn val_lower(&self) -> u32 {
        vp_capped(&self.value, self.p(), self.prec)
    }

    pub fn is_zero_within_prec(&self) -> bool {
        self.value.is_zero()
    }

    pub fn valuation(&self) -> Result<u32> {
        if self.value.is_zero() {
            return Err(Error::exhausted(format!(
                "value is zero modulo {}^{}",
                self.p(),
                self.prec
            )));
        }
        Ok(self.val_lower())
    }

    pub fn is_unit(&self) -> bool {
        self.prec > 0 && !(&self.value % self.p()).is_zero()
    }

    /// Congruence modulo p^digits; fails if either side is not known that far.
    pub fn eq_mod(&self, other: &PadicScalar, digits: u32) -> bool {
        let d = digits.min(self.prec).min(other.prec);
        if d < digits {
            return false;
        }
        let m = self.ctx.pow(digits.min(self.ctx.prec()));
        (&self.value % m) == (&other.value % m)
    }

    /// Agreement as far as both sides are known.
    pub fn agrees_with(&self, other: &PadicScalar) -> bool {
        let d = self.prec.min(other.prec);
        let m = self.ctx.pow(d);
        (&self.value % m) == (&other.value % m)
    }

    pub fn truncate(&self, prec: u32) -> Self {
        Self::with_prec(&self.ctx, self.value.clone(), prec.min(self.prec))
    }

    /// Move into another context of the same prime; precision is clamped.
    pub fn to_context(&self, ctx: &Ctx) -> Self {
        assert_eq!(self.p(), ctx.p(), "prime mismatch");
        Self::with_prec(ctx, self.value.clone(), self.prec)
    }

    fn check(&self, other: &PadicScalar) {
        assert!(self.ctx.same_as(&other.ctx), "p-adic context mismatch");
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = PadicScalar::one(&self.ctx);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn inv(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NotCoprime { value: self.value.to_string(), p: self.p() });
        }
        let m = self.ctx.pow(self.prec);
        let inv = inverse_mod(&self.value, m).expect("unit is invertible");
        Ok(PadicScalar { ctx: self.ctx.clone(), value: inv, prec: self.prec })
    }

    /// Exact division `self / other` where `other = p^v·u`.
    ///
    /// The quotient loses v digits of absolute precision.
    pub fn div_exact(&self, other: &PadicScalar) -> Result<Self> {
        self.check(other);
        let v = other.val_lower();
        if v >= other.prec {
            return Err(Error::exhausted("divisor is zero within its precision"));
        }
        if self.prec < v {
            return Err(Error::exhausted("dividend known to fewer digits than divisor valuation"));
        }
        let pv = self.ctx.pow(v);
        let (xq, xr) = self.value.div_rem(pv);
        if !xr.is_zero() {
            return Err(Error::Invalid(format!(
                "{} is not divisible by {}^{}",
                self.value,
                self.p(),
                v
            )));
        }
        let unit_prec = other.prec - v;
        let unit = PadicScalar {
            ctx: self.ctx.clone(),
            value: &other.value / pv,
            prec: unit_prec,
        };
        let q = PadicScalar::with_prec(&self.ctx, xq, self.prec - v);
        let uinv = unit.inv()?;
        Ok(&q * &uinv)
    }

    /// Exact division by p^e, losing e digits of absolute precision.
    pub fn div_p(&self, e: u32) -> Result<Self> {
        if self.prec < e {
            return Err(Error::exhausted(format!(
                "cannot divide a value known mod {}^{} by {}^{}",
                self.p(),
                self.prec,
                self.p(),
                e
            )));
        }
        let (q, r) = self.value.div_rem(self.ctx.pow(e));
        if !r.is_zero() {
            return Err(Error::Invalid(format!("{} is not divisible by {}^{}", self.value, self.p(), e)));
        }
        Ok(Self::with_prec(&self.ctx, q, self.prec - e))
    }

    /// Multiply by p^e, gaining e digits of absolute precision.
    pub fn shl_p(&self, e: u32) -> Self {
        let prec = self.prec.saturating_add(e);
        let value = &self.value * self.ctx.pow(e.min(self.ctx.prec()));
        Self::with_prec(&self.ctx, value, prec)
    }
}

impl fmt::Debug for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + O({}^{})", self.value, self.p(), self.prec)
    }
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl PartialEq for PadicScalar {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.same_as(&other.ctx) && self.prec == other.prec && self.value == other.value
    }
}

impl Eq for PadicScalar {}

impl Add for &PadicScalar {
    type Output = PadicScalar;
    fn add(self, rhs: &PadicScalar) -> PadicScalar {
        self.check(rhs);
        let prec = self.prec.min(rhs.prec);
        PadicScalar::with_prec(&self.ctx, &self.value + &rhs.value, prec)
    }
}

impl Sub for &PadicScalar {
    type Output = PadicScalar;
    fn sub(self, rhs: &PadicScalar) -> PadicScalar {
        self.check(rhs);
        let prec = self.prec.min(rhs.prec);
        let m = self.ctx.pow(prec);
        let a = &self.value % m;
        let b = &rhs.value % m;
        let value = if a >= b { a - b } else { m - b + a };
        PadicScalar::with_prec(&self.ctx, value, prec)
    }
}

impl Neg for &PadicScalar {
    type Output = PadicScalar;
    fn neg(self) -> PadicScalar {
        if self.value.is_zero() {
            return self.clone();
        }
        let m = self.ctx.pow(self.prec);
        PadicScalar { ctx: self.ctx.clone(), value: m - &self.value, prec: self.prec }
    }
}

impl Mul for &PadicScalar {
    type Output = PadicScalar;
    /// Absolute precision of a product: min(prec_a + v(b), prec_b + v(a)).
    fn mul(self, rhs: &PadicScalar) -> PadicScalar {
        self.check(rhs);
        let va = self.val_lower();
        let vb = rhs.val_lower();
        let prec = (self.prec + vb).min(rhs.prec + va);
        PadicScalar::with_prec(&self.ctx, &self.value * &rhs.value, prec)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for PadicScalar {
            type Output = PadicScalar;
            fn $m(self, rhs: PadicScalar) -> PadicScalar {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// The Teichmüller lift ω(a): the (p-1)-th root of unity congruent to a mod p.
///
/// Computed by iterating x ← x^p from a until the iterate is fixed.
pub fn teichmuller(a: &BigInt, ctx: &Ctx) -> Result<PadicScalar> {
    let p = ctx.p();
    if (a % BigInt::from(p)).is_zero() {
        return Err(Error::NotCoprime { value: a.to_string(), p });
    }
    let m = ctx.modulus();
    let pb = BigUint::from(p);
    let mut x = mod_floor(a, m);
    for _ in 0..=ctx.prec() {
        let next = x.modpow(&pb, m);
        if next == x {
            return Ok(PadicScalar::new(ctx, x));
        }
        x = next;
    }
    unreachable!("Teichmüller iteration stabilizes within M steps")
}

pub fn teichmuller_i64(a: i64, ctx: &Ctx) -> Result<PadicScalar> {
    teichmuller(&BigInt::from(a), ctx)
}

/// num/den as an element of Z/p^M; `den` must be prime to p.
pub fn embed_rational(num: &BigInt, den: &BigInt, ctx: &Ctx) -> Result<PadicScalar> {
    let p = BigInt::from(ctx.p());
    if (den % &p).is_zero() {
        return Err(Error::NotCoprime { value: den.to_string(), p: ctx.p() });
    }
    let m = ctx.modulus();
    let d = mod_floor(den, m);
    let dinv = inverse_mod(&d, m).expect("denominator is a unit");
    let n = mod_floor(num, m);
    Ok(PadicScalar::new(ctx, (n * dinv) % m))
}

/// (1+p)^s mod p^M for any integer s.
pub fn pow_onep(s: i64, ctx: &Ctx) -> PadicScalar {
    let m = ctx.modulus();
    let base = BigUint::from(ctx.p() + 1);
    let e = BigUint::from(s.unsigned_abs());
    let mut v = base.modpow(&e, m);
    if s < 0 {
        v = inverse_mod(&v, m).expect("1+p is a unit");
    }
    PadicScalar::new(ctx, v)
}
