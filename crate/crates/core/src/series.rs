//! Truncated power series over Z/p^M, distinguished polynomials, and the
//! finite-level group rings (Z/p^M)[T]/(ω_n) with ω_n = (1+T)^{p^n} − 1.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::padic::{Ctx, PadicScalar};
use crate::zmod::{self, Montgomery};

fn check_ctx(coeffs: &[PadicScalar], ctx: &Ctx) -> Result<()> {
    if coeffs.iter().all(|c| c.ctx().same_as(ctx)) {
        Ok(())
    } else {
        Err(Error::ContextMismatch)
    }
}

/// An element of Z_p[[T]] known modulo (p^M, T^N). Each coefficient carries
/// its own certified precision.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries {
    ctx: Ctx,
    coeffs: Vec<PadicScalar>,
}

impl TruncatedSeries {
    pub fn new(ctx: &Ctx, coeffs: Vec<PadicScalar>) -> Result<Self> {
        check_ctx(&coeffs, ctx)?;
        Ok(TruncatedSeries { ctx: ctx.clone(), coeffs })
    }

    pub fn from_i64s(ctx: &Ctx, coeffs: &[i64]) -> Self {
        let coeffs = coeffs.iter().map(|&c| PadicScalar::from_i64(ctx, c)).collect();
        TruncatedSeries { ctx: ctx.clone(), coeffs }
    }

    pub fn one(ctx: &Ctx, n: usize) -> Self {
        let mut coeffs = vec![PadicScalar::zero(ctx); n];
        if n > 0 {
            coeffs[0] = PadicScalar::one(ctx);
        }
        TruncatedSeries { ctx: ctx.clone(), coeffs }
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    /// Truncation order N.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, t: usize) -> &PadicScalar {
        &self.coeffs[t]
    }

    pub fn coeffs(&self) -> &[PadicScalar] {
        &self.coeffs
    }

    pub fn truncated(&self, n: usize) -> Self {
        TruncatedSeries { ctx: self.ctx.clone(), coeffs: self.coeffs[..n.min(self.len())].to_vec() }
    }

    /// Least coefficient precision.
    pub fn min_prec(&self) -> u32 {
        self.coeffs.iter().map(|c| c.prec()).min().unwrap_or(self.ctx.prec())
    }

    pub fn mul(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        if !self.ctx.same_as(&other.ctx) {
            return Err(Error::ContextMismatch);
        }
        let n = self.len().min(other.len());
        Ok(TruncatedSeries { ctx: self.ctx.clone(), coeffs: convolve(&self.coeffs, &other.coeffs, n) })
    }

    /// Inverse of a unit series.
    pub fn inverse(&self) -> Result<TruncatedSeries> {
        let n = self.len();
        if n == 0 {
            return Ok(self.clone());
        }
        let c0inv = self.coeffs[0].inv()?;
        let mut out: Vec<PadicScalar> = Vec::with_capacity(n);
        out.push(c0inv.clone());
        for t in 1..n {
            let mut acc = PadicScalar::zero(&self.ctx);
            for i in 1..=t {
                acc = &acc + &(&self.coeffs[i] * &out[t - i]);
            }
            out.push(-&(&acc * &c0inv));
        }
        Ok(TruncatedSeries { ctx: self.ctx.clone(), coeffs: out })
    }

    /// Σ f_t x^t for x in the maximal ideal.
    ///
    /// The unknown tail Σ_{t≥N} f_t x^t has valuation ≥ N·v(x), which caps
    /// the reported precision.
    pub fn eval_at(&self, x: &PadicScalar) -> Result<PadicScalar> {
        if !x.ctx().same_as(&self.ctx) {
            return Err(Error::ContextMismatch);
        }
        let vx = x.val_lower();
        if vx == 0 || x.prec() == 0 {
            return Err(Error::Invalid("evaluation point must have positive valuation".into()));
        }
        let mut acc = PadicScalar::zero(&self.ctx);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        let tail = (self.len() as u64 * vx as u64).min(u32::MAX as u64) as u32;
        Ok(acc.truncate(tail))
    }

    /// Factor f = P·u with P distinguished and u a unit series.
    ///
    /// Solves T^λ = q·f + r by the contraction Q ↦ 1 − τ(Q·B·C^{-1}) where
    /// f = B + T^λ·C and τ drops λ coefficients; then P = q·f, u = q^{-1}.
    /// Coefficients beyond the truncation enter as unknowns, so the reported
    /// precisions of P and u account for truncation loss.
    pub fn weierstrass_prepare(&self) -> Result<Preparation> {
        let ctx = &self.ctx;
        let n = self.len();
        let lambda = match self.coeffs.iter().position(|c| c.is_unit()) {
            Some(l) => l,
            None => {
                return Err(Error::MuPositive { trunc: n, prec: self.min_prec() });
            }
        };
        if self.coeffs[..lambda].iter().any(|c| c.prec() == 0) {
            return Err(Error::exhausted("coefficients below the lambda index are unknown"));
        }
        if lambda == 0 {
            return Ok(Preparation {
                lambda: 0,
                poly: DistinguishedPoly { ctx: ctx.clone(), coeffs: vec![PadicScalar::one(ctx)] },
                unit: self.clone(),
            });
        }
        let len = n - lambda;
        if len <= lambda {
            return Err(Error::InsufficientTruncation { need: 2 * lambda + 1, have: n });
        }
        let b = &self.coeffs[..lambda];
        let c = TruncatedSeries { ctx: ctx.clone(), coeffs: self.coeffs[lambda..].to_vec() };
        let u_inv_c = c.inverse()?;
        let bu = convolve(b, u_inv_c.coeffs(), len);

        let iterations = ctx.prec() as usize + 1;
        let mut q = TruncatedSeries::one(ctx, len).coeffs;
        for _ in 0..iterations {
            let prod = convolve(&q, &bu, len);
            let mut next = Vec::with_capacity(len);
            for t in 0..len {
                let shifted = match prod.get(t + lambda) {
                    Some(x) => x.clone(),
                    None => PadicScalar::unknown(ctx),
                };
                let base = if t == 0 { PadicScalar::one(ctx) } else { PadicScalar::zero(ctx) };
                next.push(&base - &shifted);
            }
            if next == q {
                break;
            }
            q = next;
        }
        // q = Q·C^{-1}
        let q = convolve(&q, u_inv_c.coeffs(), len);
        let qf = convolve(&q, &self.coeffs, lambda + 1);
        let mut poly = qf[..lambda].to_vec();
        poly.push(PadicScalar::one(ctx));
        if !qf[lambda].agrees_with(&PadicScalar::one(ctx)) {
            return Err(Error::exhausted("Weierstrass division did not converge"));
        }
        let q_series = TruncatedSeries { ctx: ctx.clone(), coeffs: q };
        let unit = q_series.inverse()?;
        let poly = DistinguishedPoly::new(ctx, poly)?;
        Ok(Preparation { lambda, poly, unit })
    }

    /// Image in (Z/p^M)[T]/(ω_n).
    ///
    /// Coefficients past the truncation are unknown; their contribution lies
    /// in p^τ·R_n where τ is the least coefficient valuation of T^N mod ω_n,
    /// and every result coefficient is capped at that precision.
    pub fn reduce_mod_omega(&self, n: u32) -> Result<GroupRingElement> {
        let ctx = &self.ctx;
        let d = group_ring_dim(ctx.p(), n)?;
        if self.len() < d {
            return Err(Error::InsufficientTruncation { need: d, have: self.len() });
        }
        let omega = omega_coeffs(ctx, n);
        let reduced = reduce_poly(&self.coeffs, &omega, d, ctx);
        let tail = omega_tail_valuation(ctx, n, self.len());
        let coeffs = reduced.into_iter().map(|c| c.truncate(tail)).collect();
        Ok(GroupRingElement { ctx: ctx.clone(), level: n, coeffs })
    }
}

pub(crate) fn convolve(a: &[PadicScalar], b: &[PadicScalar], n: usize) -> Vec<PadicScalar> {
    let ctx = a.first().or(b.first()).map(|x| x.ctx().clone());
    let ctx = match ctx {
        Some(c) => c,
        None => return Vec::new(),
    };
    (0..n)
        .map(|t| {
            let lo = (t + 1).saturating_sub(b.len());
            let hi = t.min(a.len().saturating_sub(1));
            let mut acc = PadicScalar::zero(&ctx);
            for i in lo..=hi {
                acc = &acc + &(&a[i] * &b[t - i]);
            }
            acc
        })
        .collect()
}

/// Result of Weierstrass preparation.
#[derive(Clone, Debug)]
pub struct Preparation {
    pub lambda: usize,
    pub poly: DistinguishedPoly,
    pub unit: TruncatedSeries,
}

/// Monic polynomial whose lower coefficients are divisible by p.
#[derive(Clone, Debug, PartialEq)]
pub struct DistinguishedPoly {
    ctx: Ctx,
    coeffs: Vec<PadicScalar>,
}

impl DistinguishedPoly {
    pub fn new(ctx: &Ctx, coeffs: Vec<PadicScalar>) -> Result<Self> {
        check_ctx(&coeffs, ctx)?;
        let lead = coeffs.last().ok_or_else(|| Error::Invalid("empty polynomial".into()))?;
        if !lead.agrees_with(&PadicScalar::one(ctx)) {
            return Err(Error::Invalid("distinguished polynomial must be monic".into()));
        }
        for c in &coeffs[..coeffs.len() - 1] {
            if c.prec() == 0 || c.val_lower() == 0 {
                return Err(Error::Invalid(format!(
                    "non-leading coefficient {} is not known to be divisible by p",
                    c
                )));
            }
        }
        Ok(DistinguishedPoly { ctx: ctx.clone(), coeffs })
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn lambda(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[PadicScalar] {
        &self.coeffs
    }

    pub fn as_series(&self, n: usize) -> TruncatedSeries {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(n.max(coeffs.len()), PadicScalar::zero(&self.ctx));
        TruncatedSeries { ctx: self.ctx.clone(), coeffs }
    }

    /// Q(t) = P(t − 1).
    pub fn shift_variable(&self) -> ShiftedPoly {
        ShiftedPoly { ctx: self.ctx.clone(), coeffs: taylor_shift(&self.coeffs, -1, &self.ctx) }
    }
}

/// A distinguished polynomial rewritten in t = T + 1.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftedPoly {
    ctx: Ctx,
    coeffs: Vec<PadicScalar>,
}

impl ShiftedPoly {
    pub fn coeffs(&self) -> &[PadicScalar] {
        &self.coeffs
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }
}

/// Coefficients of c(X + s) from those of c(X), by Horner.
fn taylor_shift(coeffs: &[PadicScalar], s: i64, ctx: &Ctx) -> Vec<PadicScalar> {
    let shift = PadicScalar::from_i64(ctx, s);
    let mut acc: Vec<PadicScalar> = Vec::with_capacity(coeffs.len());
    for c in coeffs.iter().rev() {
        // acc ← acc·(X + s) + c
        let mut next = vec![PadicScalar::zero(ctx); acc.len() + 1];
        for (i, a) in acc.iter().enumerate() {
            next[i + 1] = &next[i + 1] + a;
            next[i] = &next[i] + &(a * &shift);
        }
        next[0] = &next[0] + c;
        acc = next;
    }
    acc
}

/// p^n, the rank of R_n = Z_p[T]/(ω_n).
pub fn group_ring_dim(p: u64, n: u32) -> Result<usize> {
    p.checked_pow(n)
        .and_then(|d| usize::try_from(d).ok())
        .filter(|&d| d <= 1 << 24)
        .ok_or_else(|| Error::Invalid(format!("level {} too large for p = {}", n, p)))
}

/// Binomial coefficients C(d, i), i = 0..=d, exactly.
fn binomial_row(d: usize) -> Vec<BigUint> {
    let mut row = Vec::with_capacity(d + 1);
    let mut c = BigUint::one();
    row.push(c.clone());
    for i in 0..d {
        c = c * BigUint::from(d - i) / BigUint::from(i + 1);
        row.push(c.clone());
    }
    row
}

/// ω_n(T) = Σ_{i=1}^{p^n} C(p^n, i) T^i, coefficients 0..=p^n.
pub fn omega_coeffs(ctx: &Ctx, n: u32) -> Vec<PadicScalar> {
    let d = ctx.p().pow(n) as usize;
    let mut row: Vec<PadicScalar> = binomial_row(d).into_iter().map(|c| PadicScalar::new(ctx, c)).collect();
    row[0] = PadicScalar::zero(ctx);
    row
}

/// Remainder of a polynomial modulo the monic ω_n of degree d.
fn reduce_poly(coeffs: &[PadicScalar], omega: &[PadicScalar], d: usize, ctx: &Ctx) -> Vec<PadicScalar> {
    let mut work = coeffs.to_vec();
    if work.len() < d {
        work.resize(d, PadicScalar::zero(ctx));
    }
    for t in (d..work.len()).rev() {
        let c = work[t].clone();
        if c.is_zero_within_prec() && c.prec() == ctx.prec() {
            continue;
        }
        // T^t = T^{t-d}·T^d ≡ −T^{t-d}·Σ_{i<d} C(d,i) T^i
        for i in 1..d {
            let idx = t - d + i;
            work[idx] = &work[idx] - &(&c * &omega[i]);
        }
        work[t] = PadicScalar::zero(ctx);
    }
    work.truncate(d);
    work
}

/// Least coefficient valuation (capped at M) of T^t reduced mod ω_n.
pub fn omega_tail_valuation(ctx: &Ctx, n: u32, t: usize) -> u32 {
    let d = ctx.p().pow(n) as usize;
    if t < d {
        return 0;
    }
    let mut mono = vec![PadicScalar::zero(ctx); t + 1];
    mono[t] = PadicScalar::one(ctx);
    let omega = omega_coeffs(ctx, n);
    reduce_poly(&mono, &omega, d, ctx).iter().map(|c| c.val_lower()).min().unwrap_or(ctx.prec())
}

/// Smallest N ≤ `limit` with τ_n(N) ≥ `target`, where τ_n(N) is the least
/// coefficient valuation of T^N mod ω_n (capped at the working precision).
pub fn truncation_for_tail(ctx: &Ctx, n: u32, target: u32, limit: usize) -> Option<usize> {
    let d = ctx.p().pow(n) as usize;
    if target == 0 {
        return Some(0);
    }
    if target > ctx.prec() || limit < d {
        return None;
    }
    let omega = omega_coeffs(ctx, n);
    // r = T^t mod ω_n, starting at t = d
    let mut r: Vec<PadicScalar> = omega[..d].iter().map(|c| -c).collect();
    for t in d..=limit {
        if r.iter().all(|c| c.val_lower() >= target) {
            return Some(t);
        }
        let top = r[d - 1].clone();
        for i in (1..d).rev() {
            r[i] = &r[i - 1] - &(&top * &omega[i]);
        }
        r[0] = PadicScalar::zero(ctx);
    }
    None
}

/// Element of (Z/p^M)[T]/(ω_n), stored in the monomial basis 1, T, …, T^{p^n−1}.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupRingElement {
    ctx: Ctx,
    level: u32,
    coeffs: Vec<PadicScalar>,
}

impl GroupRingElement {
    pub fn new(ctx: &Ctx, level: u32, coeffs: Vec<PadicScalar>) -> Result<Self> {
        check_ctx(&coeffs, ctx)?;
        let d = group_ring_dim(ctx.p(), level)?;
        if coeffs.len() != d {
            return Err(Error::Invalid(format!("expected {} coefficients, got {}", d, coeffs.len())));
        }
        Ok(GroupRingElement { ctx: ctx.clone(), level, coeffs })
    }

    /// From coordinates in the group basis γ^i = (1+T)^i, i < p^n.
    pub fn from_group_basis(ctx: &Ctx, level: u32, gamma: Vec<PadicScalar>) -> Result<Self> {
        let d = group_ring_dim(ctx.p(), level)?;
        if gamma.len() != d {
            return Err(Error::Invalid(format!("expected {} coefficients, got {}", d, gamma.len())));
        }
        check_ctx(&gamma, ctx)?;
        // Horner in u = 1+T: acc ← acc·(1+T) + c, which is a shift-and-add
        let mut acc: Vec<PadicScalar> = vec![PadicScalar::zero(ctx); d];
        let mut deg = 0usize;
        for c in gamma.iter().rev() {
            for i in (1..=deg.min(d - 1)).rev() {
                acc[i] = &acc[i] + &acc[i - 1];
            }
            acc[0] = &acc[0] + c;
            deg += 1;
        }
        Ok(GroupRingElement { ctx: ctx.clone(), level, coeffs: acc })
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn coeffs(&self) -> &[PadicScalar] {
        &self.coeffs
    }

    pub fn min_prec(&self) -> u32 {
        self.coeffs.iter().map(|c| c.prec()).min().unwrap_or(self.ctx.prec())
    }

    pub fn mul(&self, other: &GroupRingElement) -> Result<GroupRingElement> {
        if !self.ctx.same_as(&other.ctx) || self.level != other.level {
            return Err(Error::ContextMismatch);
        }
        let d = self.coeffs.len();
        let full = convolve(&self.coeffs, &other.coeffs, 2 * d - 1);
        let omega = omega_coeffs(&self.ctx, self.level);
        let coeffs = reduce_poly(&full, &omega, d, &self.ctx);
        Ok(GroupRingElement { ctx: self.ctx.clone(), level: self.level, coeffs })
    }

    /// Coefficientwise congruence modulo p^digits.
    pub fn eq_mod(&self, other: &GroupRingElement, digits: u32) -> bool {
        self.level == other.level
            && self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| a.eq_mod(b, digits))
    }
}

/// v_p(Res(ω_n, P)) computed two ways.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResultantValuation {
    pub exponent: u32,
    /// Working precision of the final (successful) attempt.
    pub precision: u32,
    pub by_multiplication: u32,
    pub by_sylvester: u32,
}

/// Limits for the resultant computation.
#[derive(Clone, Copy, Debug)]
pub struct ResultantConfig {
    /// First working precision tried; doubled on exhaustion.
    pub start_precision: u32,
    /// Skip the Sylvester cross-check above this matrix size (0 = never skip).
    pub sylvester_max_dim: usize,
}

impl Default for ResultantConfig {
    fn default() -> Self {
        ResultantConfig { start_precision: 8, sylvester_max_dim: 0 }
    }
}

/// v_p(Res(ω_n, P)) for a polynomial P given by its coefficients.
///
/// Algorithm (i) takes the determinant of multiplication by P on
/// (Z/p^M)[T]/(ω_n); algorithm (ii) the determinant of the Sylvester matrix
/// of (ω_n, P). Both must agree. Precision starts at
/// `cfg.start_precision` and doubles on exhaustion, bounded by the
/// precision of the coefficients and by word size.
pub fn resultant_valuation(coeffs: &[PadicScalar], n: u32, cfg: ResultantConfig) -> Result<ResultantValuation> {
    let ctx = coeffs
        .first()
        .ok_or_else(|| Error::Invalid("empty polynomial".into()))?
        .ctx()
        .clone();
    check_ctx(coeffs, &ctx)?;
    let p = ctx.p();
    let avail = coeffs.iter().map(|c| c.prec()).min().unwrap_or(0);
    let ceiling = avail.min(zmod::max_word_precision(p));
    if ceiling == 0 {
        return Err(Error::exhausted("coefficients carry no precision"));
    }
    let mut prec = cfg.start_precision.clamp(1, ceiling);
    loop {
        let attempt = resultant_at(coeffs, n, prec, cfg);
        match attempt {
            Err(Error::PrecisionExhausted(msg)) => {
                if prec >= ceiling {
                    return Err(Error::exhausted(format!(
                        "{} (ceiling {} digits; coefficients known to {})",
                        msg, ceiling, avail
                    )));
                }
                prec = (prec * 2).min(ceiling);
            }
            other => return other,
        }
    }
}

fn residues(coeffs: &[PadicScalar], prec: u32) -> Vec<u64> {
    let m = BigUint::from(zmod::pow_u64(coeffs[0].p(), prec));
    coeffs.iter().map(|c| (c.value() % &m).to_u64().expect("fits a word")).collect()
}

fn omega_residues(p: u64, n: u32, prec: u32) -> Vec<u64> {
    let d = p.pow(n) as usize;
    let m = BigUint::from(zmod::pow_u64(p, prec));
    let mut row: Vec<u64> = binomial_row(d).into_iter().map(|c| (c % &m).to_u64().unwrap()).collect();
    row[0] = 0;
    row
}

fn resultant_at(coeffs: &[PadicScalar], n: u32, prec: u32, cfg: ResultantConfig) -> Result<ResultantValuation> {
    let p = coeffs[0].p();
    let poly = residues(coeffs, prec);
    let omega = omega_residues(p, n, prec);
    let by_multiplication = zmod::det_valuation(multiplication_matrix(&poly, &omega, p, prec), p, prec)?;
    let deg = poly.iter().rposition(|&c| c != 0).unwrap_or(0);
    let dim = omega.len() - 1 + deg;
    let by_sylvester = if cfg.sylvester_max_dim == 0 || dim <= cfg.sylvester_max_dim {
        zmod::det_valuation(sylvester_matrix(&omega, &poly[..=deg]), p, prec)?
    } else {
        by_multiplication
    };
    if by_multiplication != by_sylvester {
        return Err(Error::Invalid(format!(
            "resultant algorithms disagree: multiplication {} vs Sylvester {}",
            by_multiplication, by_sylvester
        )));
    }
    Ok(ResultantValuation { exponent: by_multiplication, precision: prec, by_multiplication, by_sylvester })
}

/// Columns P·T^j mod ω_n, j < p^n (returned as rows; the determinant is
/// unchanged by transposition).
fn multiplication_matrix(poly: &[u64], omega: &[u64], p: u64, prec: u32) -> Vec<Vec<u64>> {
    let d = omega.len() - 1;
    let m = zmod::pow_u64(p, prec);
    let mont = Montgomery::new(m);
    let neg_omega: Vec<u64> = omega[..d].iter().map(|&c| mont.to_mont((m - c) % m)).collect();
    // reduce P mod ω_n first
    let mut col = vec![0u64; d.max(poly.len())];
    col[..poly.len()].copy_from_slice(poly);
    for t in (d..col.len()).rev() {
        let c = col[t];
        if c != 0 {
            for i in 1..d {
                col[t - d + i] = mont.add(col[t - d + i], mont.from_mont(mont.mul(mont.to_mont(c), neg_omega[i])));
            }
        }
        col[t] = 0;
    }
    col.truncate(d);
    let mut out = Vec::with_capacity(d);
    for _ in 0..d {
        out.push(col.clone());
        // multiply by T: shift up, fold T^d back
        let top = col[d - 1];
        for i in (1..d).rev() {
            col[i] = col[i - 1];
        }
        col[0] = 0;
        if top != 0 {
            let tm = mont.to_mont(top);
            for i in 1..d {
                col[i] = mont.add(col[i], mont.from_mont(mont.mul(tm, neg_omega[i])));
            }
        }
    }
    out
}

/// Sylvester matrix of A (degree a) and B (degree b), size a + b.
fn sylvester_matrix(a: &[u64], b: &[u64]) -> Vec<Vec<u64>> {
    let da = a.len() - 1;
    let db = b.len() - 1;
    let size = da + db;
    let mut rows = Vec::with_capacity(size);
    for i in 0..db {
        let mut r = vec![0u64; size];
        for (j, &c) in a.iter().enumerate() {
            r[i + j] = c;
        }
        rows.push(r);
    }
    for i in 0..da {
        let mut r = vec![0u64; size];
        for (j, &c) in b.iter().enumerate() {
            r[i + j] = c;
        }
        rows.push(r);
    }
    rows
}

impl DistinguishedPoly {
    pub fn resultant_valuation(&self, n: u32, cfg: ResultantConfig) -> Result<ResultantValuation> {
        resultant_valuation(&self.coeffs, n, cfg)
    }
}

impl GroupRingElement {
    pub fn resultant_valuation(&self, cfg: ResultantConfig) -> Result<ResultantValuation> {
        resultant_valuation(&self.coeffs, self.level, cfg)
    }
}

/// True if every coefficient is zero within its precision.
pub fn is_zero_poly(coeffs: &[PadicScalar]) -> bool {
    coeffs.iter().all(|c| c.value().is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::PrimeContext;

    fn ctx(p: u64, m: u32) -> Ctx {
        PrimeContext::new(p, m).unwrap()
    }

    fn vals(s: &[PadicScalar]) -> Vec<i64> {
        s.iter().map(|c| i64::try_from(c.to_signed()).unwrap()).collect()
    }

    #[test]
    fn mul_examples() {
        let c = ctx(5, 8);
        let f = TruncatedSeries::from_i64s(&c, &[1, 1, 0]);
        let g = TruncatedSeries::from_i64s(&c, &[1, -1, 0]);
        assert_eq!(vals(f.mul(&g).unwrap().coeffs()), vec![1, 0, -1]);
        let one = TruncatedSeries::one(&c, 3);
        assert_eq!(f.mul(&one).unwrap(), f);
        // direct convolution oracle for (1+pT)(1-pT+p²T²)
        let f = TruncatedSeries::from_i64s(&c, &[1, 5, 0, 0]);
        let g = TruncatedSeries::from_i64s(&c, &[1, -5, 25, 0]);
        assert_eq!(vals(f.mul(&g).unwrap().coeffs()), vec![1, 0, 0, 125]);
    }

    #[test]
    fn mul_rejects_mixed_contexts() {
        let f = TruncatedSeries::from_i64s(&ctx(5, 4), &[1]);
        let g = TruncatedSeries::from_i64s(&ctx(5, 5), &[1]);
        assert_eq!(f.mul(&g).unwrap_err(), Error::ContextMismatch);
    }

    #[test]
    fn eval_examples() {
        let c = ctx(5, 6);
        let p = PadicScalar::from_i64(&c, 5);
        let f = TruncatedSeries::from_i64s(&c, &[1, 1]);
        assert_eq!(f.eval_at(&p).unwrap().to_u64(), Some(6));
        // geometric series oracle: Σ p^t = (1-p)^{-1}
        let f = TruncatedSeries::from_i64s(&c, &[1; 6]);
        let v = f.eval_at(&p).unwrap();
        let expect = PadicScalar::from_i64(&c, -4).inv().unwrap();
        assert_eq!(v, expect);
        let k = TruncatedSeries::from_i64s(&c, &[7, 0, 0]);
        assert_eq!(k.eval_at(&PadicScalar::from_i64(&c, 25)).unwrap().to_u64(), Some(7));
        assert!(f.eval_at(&PadicScalar::from_i64(&c, 2)).is_err());
    }

    fn known(x: &PadicScalar, v: i64, digits: u32) -> bool {
        x.prec() >= digits && x.agrees_with(&PadicScalar::from_i64(x.ctx(), v))
    }

    #[test]
    fn weierstrass_examples() {
        let c = ctx(5, 10);
        let f = TruncatedSeries::from_i64s(&c, &[5, 1, 0, 0, 0, 0, 0, 0]);
        let prep = f.weierstrass_prepare().unwrap();
        assert_eq!(prep.lambda, 1);
        assert!(known(&prep.poly.coeffs()[0], 5, 6));
        assert!(known(&prep.unit.coeff(0), 1, 6));
        assert!(known(&prep.unit.coeff(1), 0, 5));

        // (T+p)(1+T) = p + (1+p)T + T²
        let f = TruncatedSeries::from_i64s(&c, &[5, 6, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0]);
        let prep = f.weierstrass_prepare().unwrap();
        assert_eq!(prep.lambda, 1);
        assert!(known(&prep.poly.coeffs()[0], 5, 8));
        assert!(known(&prep.unit.coeff(0), 1, 8));
        assert!(known(&prep.unit.coeff(1), 1, 8));
        assert!(known(&prep.unit.coeff(2), 0, 6));

        let f = TruncatedSeries::from_i64s(&c, &[5, 5, 5]);
        assert!(matches!(f.weierstrass_prepare(), Err(Error::MuPositive { .. })));

        let f = TruncatedSeries::from_i64s(&c, &[3, 5]);
        let prep = f.weierstrass_prepare().unwrap();
        assert_eq!(prep.lambda, 0);
        assert_eq!(prep.poly.coeffs().len(), 1);
    }

    #[test]
    fn shift_examples() {
        let c = ctx(5, 6);
        let t = DistinguishedPoly::new(&c, vec![PadicScalar::zero(&c), PadicScalar::one(&c)]).unwrap();
        assert_eq!(vals(t.shift_variable().coeffs()), vec![-1, 1]);
        let p = |x| PadicScalar::from_i64(&c, x);
        let q = DistinguishedPoly::new(&c, vec![p(5), p(1)]).unwrap();
        assert_eq!(vals(q.shift_variable().coeffs()), vec![4, 1]);
        // binomial expansion oracle: (t-1)² + 5(t-1) + 5 = t² + 3t + 1
        let r = DistinguishedPoly::new(&c, vec![p(5), p(5), p(1)]).unwrap();
        assert_eq!(vals(r.shift_variable().coeffs()), vec![1, 3, 1]);
    }

    #[test]
    fn distinguished_validation() {
        let c = ctx(5, 6);
        let p = |x| PadicScalar::from_i64(&c, x);
        assert!(DistinguishedPoly::new(&c, vec![p(1), p(1)]).is_err());
        assert!(DistinguishedPoly::new(&c, vec![p(5), p(2)]).is_err());
    }

    #[test]
    fn reduce_mod_omega_examples() {
        let c = ctx(5, 8);
        let omega = omega_coeffs(&c, 1);
        let mut coeffs = omega.clone();
        coeffs.resize(40, PadicScalar::zero(&c));
        let f = TruncatedSeries::new(&c, coeffs).unwrap();
        let r = f.reduce_mod_omega(1).unwrap();
        assert!(r.coeffs().iter().all(|x| x.value().is_zero()));

        // degree < p^n is returned unchanged
        let mut coeffs: Vec<PadicScalar> = (1..=4).map(|x| PadicScalar::from_i64(&c, x)).collect();
        coeffs.resize(40, PadicScalar::zero(&c));
        let f = TruncatedSeries::new(&c, coeffs).unwrap();
        let r = f.reduce_mod_omega(1).unwrap();
        assert_eq!(vals(&r.coeffs()[..4]), vec![1, 2, 3, 4]);
        assert_eq!(r.coeffs()[4].to_u64(), Some(0));

        // T^5 ≡ T^5 − ω_1 = −(5T + 10T² + 10T³ + 5T⁴)
        let mut coeffs = vec![PadicScalar::zero(&c); 40];
        coeffs[5] = PadicScalar::one(&c);
        let f = TruncatedSeries::new(&c, coeffs).unwrap();
        let r = f.reduce_mod_omega(1).unwrap();
        assert_eq!(vals(r.coeffs()), vec![0, -5, -10, -10, -5]);

        let short = TruncatedSeries::from_i64s(&c, &[1, 2]);
        assert!(matches!(short.reduce_mod_omega(1), Err(Error::InsufficientTruncation { .. })));
    }

    #[test]
    fn tail_valuation_grows() {
        let c = ctx(5, 20);
        assert_eq!(omega_tail_valuation(&c, 1, 3), 0);
        assert!(omega_tail_valuation(&c, 1, 5) >= 1);
        let a = omega_tail_valuation(&c, 1, 40);
        let b = omega_tail_valuation(&c, 1, 80);
        assert!(b > a && a >= 8);
    }

    #[test]
    fn tail_search_matches_direct_reduction() {
        let c = ctx(5, 10);
        let n = truncation_for_tail(&c, 1, 6, 500).unwrap();
        assert!(omega_tail_valuation(&c, 1, n) >= 6);
        assert!(omega_tail_valuation(&c, 1, n - 1) < 6);
        assert_eq!(truncation_for_tail(&c, 1, 6, n - 1), None);
    }

    #[test]
    fn group_basis_conversion() {
        let c = ctx(5, 8);
        // γ = 1 + T
        let mut g = vec![PadicScalar::zero(&c); 5];
        g[1] = PadicScalar::one(&c);
        let e = GroupRingElement::from_group_basis(&c, 1, g).unwrap();
        assert_eq!(vals(e.coeffs()), vec![1, 1, 0, 0, 0]);
        // γ^3 = 1 + 3T + 3T² + T³
        let mut g = vec![PadicScalar::zero(&c); 5];
        g[3] = PadicScalar::one(&c);
        let e = GroupRingElement::from_group_basis(&c, 1, g).unwrap();
        assert_eq!(vals(e.coeffs()), vec![1, 3, 3, 1, 0]);
    }

    #[test]
    fn resultant_examples() {
        let c = ctx(5, 10);
        let p = |x| PadicScalar::from_i64(&c, x);
        let cfg = ResultantConfig::default();
        assert_eq!(resultant_valuation(&[p(1)], 1, cfg).unwrap().exponent, 0);
        assert!(matches!(
            resultant_valuation(&[p(0), p(1)], 1, cfg),
            Err(Error::PrecisionExhausted(_))
        ));
        // T − 5c: v((1+5c)^5 − 1) = 2 for a unit c
        for cu in [1, 2, 3, 7] {
            let r = resultant_valuation(&[p(-5 * cu), p(1)], 1, cfg).unwrap();
            assert_eq!(r.exponent, 2);
            assert_eq!(r.by_multiplication, r.by_sylvester);
        }
        // level 0: Res(T, P) = P(0)
        assert_eq!(resultant_valuation(&[p(25), p(1)], 0, cfg).unwrap().exponent, 2);
    }
}
