//! Kubota–Leopoldt branch series and their finite-level images.
//!
//! The branch attached to an odd component k ≢ 1 mod (p−1) is the series
//! f ∈ Z_p[[T]] with f((1+p)^ℓ − 1) = (1 − p^{−ℓ})·ζ(ℓ) for every negative
//! ℓ ≡ k mod (p−1). Two constructions are provided: Newton interpolation at
//! the nodes (1+p)^{ℓ_i} − 1, and a Stickelberger sum at each finite level.

pub mod bernoulli;
pub mod check;
pub mod stickelberger;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::padic::{embed_rational, pow_onep, teichmuller_i64, vp_u64, Ctx, PadicScalar, PrimeContext};
use crate::series::{Preparation, TruncatedSeries};

pub use check::{interp_check, CheckConfig, InterpCheck};
pub use bernoulli::{bernoulli, bernoulli_bounded, Rational, DEFAULT_BOUND};
pub use stickelberger::{
    branch_by_stickelberger, calibrate, stickelberger_element, Calibration, Convention, StickelbergerBranch,
};

/// Which branch to build and how far.
#[derive(Clone, Debug)]
pub struct BranchSpec {
    ctx: Ctx,
    k: u64,
    trunc: usize,
    level: u32,
    bound: usize,
}

impl BranchSpec {
    /// `k` is reduced mod p−1; it must be odd and ≢ 1.
    pub fn new(ctx: &Ctx, k: i64, trunc: usize, level: u32) -> Result<Self> {
        let k = component(ctx.p(), k)?;
        if trunc == 0 {
            return Err(Error::Invalid("truncation order must be positive".into()));
        }
        Ok(BranchSpec { ctx: ctx.clone(), k, trunc, level, bound: DEFAULT_BOUND })
    }

    /// Largest Bernoulli index the construction may request.
    pub fn with_bound(mut self, bound: usize) -> Self {
        self.bound = bound;
        self
    }

    pub fn with_trunc(&self, trunc: usize) -> Self {
        BranchSpec { trunc, ..self.clone() }
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn p(&self) -> u64 {
        self.ctx.p()
    }

    /// Component index as a residue in [0, p−1).
    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    /// ℓ_0: the largest negative integer ≡ k mod (p−1).
    pub fn first_node(&self) -> i64 {
        self.k as i64 - (self.p() as i64 - 1)
    }

    /// ℓ_i = ℓ_0 − (p−1)·i.
    pub fn node(&self, i: usize) -> i64 {
        self.first_node() - (self.p() as i64 - 1) * i as i64
    }

    /// Node count reachable without exceeding the Bernoulli bound.
    pub fn max_nodes(&self) -> usize {
        let first_index = (1 - self.first_node()) as usize;
        if self.bound < first_index {
            0
        } else {
            (self.bound - first_index) / (self.p() as usize - 1) + 1
        }
    }
}

/// Validate a component index and reduce it into [0, p−1).
pub fn component(p: u64, k: i64) -> Result<u64> {
    let r = k.rem_euclid(p as i64 - 1) as u64;
    if r % 2 == 0 || r == 1 {
        return Err(Error::ExcludedComponent { k });
    }
    Ok(r)
}

/// ζ(ℓ) = −B_{1−ℓ}/(1−ℓ) for ℓ < 0.
pub fn zeta_neg(l: i64) -> Result<Rational> {
    zeta_neg_bounded(l, DEFAULT_BOUND)
}

fn zeta_neg_bounded(l: i64, bound: usize) -> Result<Rational> {
    if l >= 0 {
        return Err(Error::Invalid(format!("zeta_neg needs a negative argument, got {}", l)));
    }
    let m = (1 - l) as usize;
    let b = bernoulli_bounded(m, bound)?;
    Ok(-b / Rational::from_integer(BigInt::from(m)))
}

/// (1 − p^{−ℓ})·ζ(ℓ) in Z/p^M, for ℓ < 0 in the class of the branch.
pub fn interp_value(spec: &BranchSpec, l: i64) -> Result<PadicScalar> {
    interp_value_in(spec.ctx(), spec.k, l, spec.bound)
}

pub(crate) fn interp_value_in(ctx: &Ctx, k: u64, l: i64, bound: usize) -> Result<PadicScalar> {
    let p = ctx.p() as i64;
    if l >= 0 || l % 2 == 0 || (l - k as i64).rem_euclid(p - 1) != 0 {
        return Err(Error::WrongCongruenceClass { l, k: k as i64 });
    }
    let z = zeta_neg_bounded(l, bound)?;
    let euler = BigInt::one() - num_traits::pow(BigInt::from(p), l.unsigned_abs() as usize);
    let v = z * Rational::from_integer(euler);
    embed_rational(v.numer(), v.denom(), ctx)
}

/// Digits of working precision used by Newton interpolation on N nodes.
pub fn interpolation_precision(p: u64, prec: u32, trunc: usize) -> u32 {
    let n = trunc as u32;
    prec + n + n.div_ceil(p as u32 - 1) + 2
}

/// The branch series mod (p^M, T^N) from its values at N nodes.
///
/// Divided differences over T_i = A·q^i − 1 (A = (1+p)^{ℓ_0},
/// q = (1+p)^{−(p−1)}) only ever divide by T_i − T_{i−j} = A·q^{i−j}(q^j − 1),
/// of valuation 1 + v_p(j). The Newton terms past N change the T^t
/// coefficient by something of valuation ≥ N − t, which caps its precision.
pub fn branch_by_interpolation(spec: &BranchSpec) -> Result<TruncatedSeries> {
    let p = spec.p();
    let n = spec.trunc;
    if n > spec.max_nodes() {
        return Err(Error::BoundExceeded { index: (1 - spec.node(n - 1)) as usize, bound: spec.bound });
    }
    let wctx = PrimeContext::new(p, interpolation_precision(p, spec.ctx.prec(), n))?;
    let mut c: Vec<PadicScalar> = (0..n)
        .map(|i| interp_value_in(&wctx, spec.k, spec.node(i), spec.bound))
        .collect::<Result<_>>()?;

    let a = pow_onep(spec.first_node(), &wctx);
    let q = pow_onep(-(p as i64 - 1), &wctx);
    let a_inv = a.inv()?;
    let q_inv = q.inv()?;
    let mut q_inv_pows = Vec::with_capacity(n);
    let mut acc = PadicScalar::one(&wctx);
    for _ in 0..n {
        q_inv_pows.push(acc.clone());
        acc = &acc * &q_inv;
    }
    // unit parts of q^j − 1
    let mut drops = vec![0u32; n];
    let mut unit_inv = vec![PadicScalar::one(&wctx); n];
    let mut qj = PadicScalar::one(&wctx);
    for j in 1..n {
        qj = &qj * &q;
        let d = 1 + vp_u64(j as u64, p).unwrap_or(0);
        drops[j] = d;
        unit_inv[j] = (&qj - &PadicScalar::one(&wctx)).div_p(d)?.inv()?;
    }

    for j in 1..n {
        for i in (j..n).rev() {
            let diff = (&c[i] - &c[i - 1]).div_p(drops[j])?;
            c[i] = &(&(&diff * &a_inv) * &q_inv_pows[i - j]) * &unit_inv[j];
        }
    }

    // monomial form by Horner in (T − T_i)
    let mut nodes = Vec::with_capacity(n);
    let mut qi = a.clone();
    for _ in 0..n {
        nodes.push(&qi - &PadicScalar::one(&wctx));
        qi = &qi * &q;
    }
    let mut poly: Vec<PadicScalar> = vec![c[n - 1].clone()];
    for i in (0..n - 1).rev() {
        let mut next = vec![PadicScalar::zero(&wctx); poly.len() + 1];
        for (t, x) in poly.iter().enumerate() {
            next[t + 1] = &next[t + 1] + x;
            next[t] = &next[t] - &(x * &nodes[i]);
        }
        next[0] = &next[0] + &c[i];
        poly = next;
    }
    let coeffs = poly
        .iter()
        .enumerate()
        .map(|(t, x)| x.truncate((n - t) as u32).to_context(&spec.ctx))
        .collect();
    TruncatedSeries::new(&spec.ctx, coeffs)
}

/// B_{1,ω^r} = (1/p)·Σ_{a=1}^{p−1} a·ω^r(a), for a nontrivial power ω^r.
pub fn gen_bernoulli_b1(r: i64, ctx: &Ctx) -> Result<PadicScalar> {
    let p = ctx.p();
    let r = r.rem_euclid(p as i64 - 1) as u64;
    if r == 0 {
        return Err(Error::Invalid("trivial character".into()));
    }
    let wide = ctx.with_precision(ctx.prec() + 1)?;
    let mut sum = PadicScalar::zero(&wide);
    for a in 1..p {
        let w = teichmuller_i64(a as i64, &wide)?.pow(r);
        sum = &sum + &(&PadicScalar::from_i64(&wide, a as i64) * &w);
    }
    let b = sum.div_p(1).map_err(|_| {
        Error::Invalid(format!("B_1 of ω^{} is not {}-integral", r, p))
    })?;
    Ok(b.to_context(ctx))
}

/// Result of λ extraction.
#[derive(Clone, Debug)]
pub struct LambdaReport {
    pub lambda: usize,
    pub trunc: usize,
    pub series: TruncatedSeries,
    pub preparation: Preparation,
}

/// λ of the branch: degree of the distinguished factor.
///
/// Starts from the spec's N and doubles until Weierstrass preparation
/// succeeds with λ < N/2.
pub fn lambda_invariant(spec: &BranchSpec) -> Result<LambdaReport> {
    let mut n = spec.trunc.max(8);
    loop {
        let s = spec.with_trunc(n.min(spec.max_nodes()));
        let attempt = branch_by_interpolation(&s).and_then(|series| {
            let prep = series.weierstrass_prepare()?;
            Ok((series, prep))
        });
        let last = n >= spec.max_nodes();
        match attempt {
            Ok((series, prep)) if 2 * prep.lambda < s.trunc => {
                return Ok(LambdaReport { lambda: prep.lambda, trunc: s.trunc, series, preparation: prep });
            }
            Ok(_) if last => {
                return Err(Error::InsufficientTruncation { need: 2 * n + 1, have: s.trunc });
            }
            Err(e) if last => return Err(e),
            Err(e @ (Error::BoundExceeded { .. } | Error::ExcludedComponent { .. })) => return Err(e),
            _ => n *= 2,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64, m: u32) -> Ctx {
        PrimeContext::new(p, m).unwrap()
    }

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn zeta_examples() {
        assert_eq!(zeta_neg(-1).unwrap(), rat(-1, 12));
        assert_eq!(zeta_neg(-2).unwrap(), rat(0, 1));
        assert_eq!(zeta_neg(-11).unwrap(), rat(691, 32760));
    }

    #[test]
    fn rejects_excluded_components() {
        let c = ctx(5, 8);
        assert!(matches!(BranchSpec::new(&c, 1, 8, 0), Err(Error::ExcludedComponent { .. })));
        assert!(matches!(BranchSpec::new(&c, 2, 8, 0), Err(Error::ExcludedComponent { .. })));
        assert!(matches!(BranchSpec::new(&c, 5, 8, 0), Err(Error::ExcludedComponent { .. })));
        assert_eq!(BranchSpec::new(&c, -1, 8, 0).unwrap().k(), 3);
    }

    #[test]
    fn interp_examples() {
        let c = ctx(5, 6);
        let spec = BranchSpec::new(&c, 3, 8, 0).unwrap();
        let third = embed_rational(&BigInt::from(1), &BigInt::from(3), &c).unwrap();
        assert_eq!(interp_value(&spec, -1).unwrap(), third);
        // (1 − 5^5)·(−1/252)
        let expect = embed_rational(&BigInt::from(3124), &BigInt::from(252), &c).unwrap();
        assert_eq!(interp_value(&spec, -5).unwrap(), expect);
        assert!(matches!(interp_value(&spec, -3), Err(Error::WrongCongruenceClass { .. })));
        assert!(matches!(interp_value(&spec, 3), Err(Error::WrongCongruenceClass { .. })));
    }

    #[test]
    fn kummer_congruences() {
        for (p, k) in [(5u64, 3i64), (7, 3), (7, 5), (13, 7), (37, 5)] {
            let c = ctx(p, 4);
            let spec = BranchSpec::new(&c, k, 8, 0).unwrap();
            let base = interp_value(&spec, spec.node(0)).unwrap();
            for i in 1..6 {
                assert!(interp_value(&spec, spec.node(i)).unwrap().eq_mod(&base, 1), "p={} k={} i={}", p, k, i);
            }
        }
    }

    #[test]
    fn gen_bernoulli_examples() {
        // p = 5, r = 2: direct 4-term sum against teichmuller values
        let c = ctx(5, 6);
        let wide = ctx(5, 7);
        let direct: BigInt = (1..5i64)
            .map(|a| BigInt::from(a) * teichmuller_i64(a, &wide).unwrap().pow(2).to_signed())
            .sum();
        let expect = PadicScalar::from_bigint(&wide, &direct).div_p(1).unwrap().to_context(&c);
        assert_eq!(gen_bernoulli_b1(2, &c).unwrap(), expect);

        assert_eq!(gen_bernoulli_b1(31, &ctx(37, 3)).unwrap().valuation().unwrap(), 1);
        for p in [5u64, 7, 11, 13] {
            let c = ctx(p, 4);
            // odd characters: units for a regular prime
            for r in (1..p as i64 - 2).step_by(2) {
                assert_eq!(gen_bernoulli_b1(r, &c).unwrap().valuation().unwrap(), 0, "p={} r={}", p, r);
            }
            // even characters: B_1 vanishes identically
            for r in (2..p as i64 - 1).step_by(2) {
                assert!(gen_bernoulli_b1(r, &c).unwrap().is_zero_within_prec(), "p={} r={}", p, r);
            }
            assert!(gen_bernoulli_b1(p as i64 - 2, &c).is_err());
        }
        assert!(gen_bernoulli_b1(0, &c).is_err());
    }

    #[test]
    fn interpolation_reproduces_held_out_nodes() {
        for (p, k) in [(5u64, 3i64), (7, 5), (37, 5)] {
            let c = ctx(p, 10);
            let spec = BranchSpec::new(&c, k, 16, 0).unwrap();
            let f = branch_by_interpolation(&spec).unwrap();
            for i in 16..19 {
                let l = spec.node(i);
                let x = &pow_onep(l, &c) - &PadicScalar::one(&c);
                let got = f.eval_at(&x).unwrap();
                let want = interp_value(&spec, l).unwrap();
                assert!(got.eq_mod(&want, 10), "p={} k={} l={}: {} vs {}", p, k, l, got, want);
            }
        }
    }

    #[test]
    fn constant_term_anchor() {
        for (p, k) in [(5u64, 3i64), (7, 3), (7, 5), (13, 3), (13, 11), (37, 5), (37, 7)] {
            let c = ctx(p, 8);
            let spec = BranchSpec::new(&c, k, 12, 0).unwrap();
            let f = branch_by_interpolation(&spec).unwrap();
            let b = gen_bernoulli_b1(-k, &c).unwrap();
            assert!(f.coeff(0).eq_mod(&-&b, 8), "p={} k={}", p, k);
        }
    }

    #[test]
    fn lambda_examples() {
        let c = ctx(5, 10);
        assert_eq!(lambda_invariant(&BranchSpec::new(&c, 3, 8, 0).unwrap()).unwrap().lambda, 0);
        let c = ctx(7, 10);
        for k in [3, 5] {
            assert_eq!(lambda_invariant(&BranchSpec::new(&c, k, 8, 0).unwrap()).unwrap().lambda, 0);
        }
        let c = ctx(37, 10);
        let rep = lambda_invariant(&BranchSpec::new(&c, 5, 8, 0).unwrap()).unwrap();
        assert_eq!(rep.lambda, 1);
        assert_eq!(rep.series.coeff(0).valuation().unwrap(), 1);
        assert!(rep.series.coeff(1).is_unit());
    }
}
