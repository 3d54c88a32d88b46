//! Finite-level branch images from twisted Stickelberger sums.
//!
//! G_n = s·(−1/p^{n+1})·Σ_{a} a·ω(a)^r·γ^{e·ι(a)} over 1 ≤ a < p^{n+1} prime to p,
//! where a ≡ ω(a)·(1+p)^{ι(a)} mod p^{n+1} and γ = 1 + T in
//! (Z/p^M)[T]/(ω_n). The twist r and the signs s, e are fixed by matching
//! the interpolation values at three nodes.

use std::collections::BTreeMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigUint;
use serde::Serialize;

use super::{interp_value_in, BranchSpec};
use crate::error::{Error, Result};
use crate::padic::{pow_onep, teichmuller_i64, Ctx, PadicScalar, PrimeContext};
use crate::series::{group_ring_dim, GroupRingElement};
use crate::zmod::{inv_mod, mulmod};

/// Normalization of the Stickelberger sum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Convention {
    /// Symbolic twist, e.g. "-k".
    pub twist_label: String,
    /// Twist exponent r as a residue mod p−1.
    pub twist: u64,
    /// Exponent sign e on ι(a).
    pub exponent_sign: i8,
    /// Overall sign s.
    pub global_sign: i8,
}

impl Convention {
    /// Candidates in the order they are tried.
    pub fn grid(p: u64, k: u64) -> Vec<Convention> {
        let m = p as i64 - 1;
        let k = k as i64;
        let twists = [("-k", -k), ("k-1", k - 1), ("1-k", 1 - k), ("k", k)];
        let mut out = Vec::new();
        for (label, r) in twists {
            for exponent_sign in [1, -1] {
                for global_sign in [1, -1] {
                    out.push(Convention {
                        twist_label: label.to_string(),
                        twist: r.rem_euclid(m) as u64,
                        exponent_sign,
                        global_sign,
                    });
                }
            }
        }
        out
    }

    pub fn describe(&self) -> String {
        format!(
            "r={} ({}), exponent {}, sign {}",
            self.twist_label,
            self.twist,
            if self.exponent_sign > 0 { "+" } else { "-" },
            if self.global_sign > 0 { "+" } else { "-" }
        )
    }

    /// A deliberately wrong twist, for negative controls.
    pub fn mistwisted(&self, p: u64) -> Convention {
        let m = p - 1;
        let twist = (1..m)
            .map(|o| (self.twist + o) % m)
            .find(|&r| r != 0 && r != m - 1)
            .unwrap_or(self.twist);
        Convention { twist_label: format!("{}+mistwist", self.twist_label), twist, ..self.clone() }
    }
}

/// Outcome of matching conventions against interpolation data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Calibration {
    pub convention: Convention,
    /// Group-ring level the match was tested at.
    pub level: u32,
    /// Congruences are checked mod p^{level+1}.
    pub digits: u32,
    pub nodes_checked: usize,
    pub candidates_tried: usize,
    /// How many grid entries fit the data; the first is used.
    pub matching: usize,
}

/// Largest p^{n+1} summed over.
const MAX_TERMS: u64 = 1 << 24;

/// G_n for one convention, with coefficients in the context of `ctx`.
pub fn stickelberger_element(ctx: &Ctx, k: u64, n: u32, conv: &Convention) -> Result<GroupRingElement> {
    let p = ctx.p();
    let d = group_ring_dim(p, n)?;
    let modulus = p
        .checked_pow(n + 1)
        .filter(|&m| m <= MAX_TERMS)
        .ok_or_else(|| Error::Invalid(format!("level {} too large for p = {}", n, p)))?;
    if conv.twist % (p - 1) == 0 {
        return Err(Error::Invalid(format!("trivial twist for k = {}", k)));
    }
    let wide = ctx.with_precision(ctx.prec() + n + 1)?;
    let small = PrimeContext::new(p, n + 1)?;

    let mut dlog = vec![u32::MAX; modulus as usize];
    let mut g = 1u64;
    for j in 0..d {
        dlog[g as usize] = j as u32;
        g = mulmod(g, 1 + p, modulus);
    }
    let width = (p - 1) as usize;
    let mut omega_inv = vec![0u64; width];
    for b in 1..p {
        let w = teichmuller_i64(b as i64, &small)?.to_u64().expect("small residue");
        omega_inv[(b - 1) as usize] = inv_mod(w, modulus).expect("unit");
    }
    // sums[idx·(p−1) + b − 1] = Σ a over a ≡ b mod p with γ-exponent idx
    let mut sums = vec![0u64; d * width];
    for a in 1..modulus {
        let b = a % p;
        if b == 0 {
            continue;
        }
        let u = mulmod(a, omega_inv[(b - 1) as usize], modulus);
        let j = dlog[u as usize] as usize;
        debug_assert!(j < d, "1-unit outside the cyclic group");
        let idx = if conv.exponent_sign > 0 { j } else { (d - j) % d };
        sums[idx * width + (b - 1) as usize] += a;
    }
    let twist: Vec<BigUint> = (1..p)
        .map(|b| Ok(teichmuller_i64(b as i64, &wide)?.pow(conv.twist).value().clone()))
        .collect::<Result<_>>()?;
    let mut gamma = Vec::with_capacity(d);
    for idx in 0..d {
        let mut s = BigUint::default();
        for (b, t) in twist.iter().enumerate() {
            let c = sums[idx * width + b];
            if c != 0 {
                s += t * BigUint::from(c);
            }
        }
        let x = PadicScalar::new(&wide, s).div_p(n + 1).map_err(|_| {
            Error::Invalid(format!("convention {} gives a non-integral sum", conv.describe()))
        })?;
        let x = if conv.global_sign > 0 { -&x } else { x };
        gamma.push(x.to_context(ctx));
    }
    GroupRingElement::from_group_basis(ctx, n, gamma)
}

fn calibration_cache() -> &'static Mutex<BTreeMap<(u64, u64, usize), Calibration>> {
    static CACHE: OnceLock<Mutex<BTreeMap<(u64, u64, usize), Calibration>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(BTreeMap::new()))
}

/// Pick the first convention whose G_n matches the interpolation values at
/// three nodes mod p^{n+1} (n = 2, or 1 when p^3 is too large to sum over).
pub fn calibrate(spec: &BranchSpec) -> Result<Calibration> {
    let p = spec.p();
    let key = (p, spec.k(), spec.bound());
    if let Some(c) = calibration_cache().lock().expect("calibration cache poisoned").get(&key) {
        return Ok(c.clone());
    }
    let level = if p.pow(3) <= 1 << 21 { 2 } else { 1 };
    let digits = level + 1;
    let ctx = PrimeContext::new(p, digits)?;
    let checks: Vec<(PadicScalar, PadicScalar)> = (0..3)
        .map(|i| {
            let l = spec.node(i);
            let x = &pow_onep(l, &ctx) - &PadicScalar::one(&ctx);
            Ok((x, interp_value_in(&ctx, spec.k(), l, spec.bound())?))
        })
        .collect::<Result<_>>()?;
    let grid = Convention::grid(p, spec.k());
    let mut found: Vec<Convention> = Vec::new();
    for conv in &grid {
        let g = match stickelberger_element(&ctx, spec.k(), level, conv) {
            Ok(g) => g,
            Err(Error::Invalid(_)) => continue,
            Err(e) => return Err(e),
        };
        let fits = checks.iter().all(|(x, want)| {
            let mut acc = PadicScalar::zero(&ctx);
            for c in g.coeffs().iter().rev() {
                acc = &(&acc * x) + c;
            }
            acc.eq_mod(want, digits)
        });
        if fits {
            found.push(conv.clone());
        }
    }
    let convention = found.first().cloned().ok_or_else(|| Error::CalibrationFailure {
        attempted: grid.iter().map(|c| c.describe()).collect::<Vec<_>>().join("; "),
    })?;
    let cal = Calibration {
        convention,
        level,
        digits,
        nodes_checked: checks.len(),
        candidates_tried: grid.len(),
        matching: found.len(),
    };
    calibration_cache().lock().expect("calibration cache poisoned").insert(key, cal.clone());
    Ok(cal)
}

/// Stickelberger image of a branch at level n.
#[derive(Clone, Debug)]
pub struct StickelbergerBranch {
    pub element: GroupRingElement,
    pub calibration: Calibration,
    /// The convention actually summed (differs from the calibrated one
    /// only for a mis-twisted control run).
    pub convention: Convention,
}

pub fn branch_by_stickelberger(spec: &BranchSpec, n: u32, mistwist: bool) -> Result<StickelbergerBranch> {
    let calibration = calibrate(spec)?;
    let convention = if mistwist {
        calibration.convention.mistwisted(spec.p())
    } else {
        calibration.convention.clone()
    };
    let element = stickelberger_element(spec.ctx(), spec.k(), n, &convention)?;
    Ok(StickelbergerBranch { element, calibration, convention })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lfunction::{branch_by_interpolation, gen_bernoulli_b1};

    fn ctx(p: u64, m: u32) -> Ctx {
        PrimeContext::new(p, m).unwrap()
    }

    #[test]
    fn calibration_finds_a_convention() {
        for (p, k) in [(5u64, 3i64), (7, 3), (7, 5), (13, 5), (37, 5)] {
            let spec = BranchSpec::new(&ctx(p, 8), k, 8, 0).unwrap();
            let cal = calibrate(&spec).unwrap();
            assert!(cal.matching >= 1, "p={} k={}", p, k);
        }
    }

    #[test]
    fn level_zero_is_the_bernoulli_anchor() {
        let c = ctx(37, 6);
        let spec = BranchSpec::new(&c, 5, 8, 0).unwrap();
        let g = branch_by_stickelberger(&spec, 0, false).unwrap();
        assert_eq!(g.element.coeffs()[0].valuation().unwrap(), 1);
        let b = gen_bernoulli_b1(-5, &c).unwrap();
        assert!(g.element.coeffs()[0].eq_mod(&-&b, 6));
    }

    #[test]
    fn agrees_with_interpolation_at_level_one() {
        let c = ctx(5, 6);
        let spec = BranchSpec::new(&c, 3, 80, 1).unwrap();
        let f = branch_by_interpolation(&spec).unwrap().reduce_mod_omega(1).unwrap();
        let g = branch_by_stickelberger(&spec, 1, false).unwrap().element;
        assert!(f.min_prec() >= 6, "certified {}", f.min_prec());
        assert!(f.eq_mod(&g, 6));
    }

    #[test]
    fn trivial_twist_rejected() {
        let c = ctx(5, 4);
        let conv = Convention { twist_label: "0".into(), twist: 0, exponent_sign: 1, global_sign: 1 };
        assert!(stickelberger_element(&c, 3, 1, &conv).is_err());
    }

    #[test]
    fn mistwist_breaks_agreement() {
        let c = ctx(5, 6);
        let spec = BranchSpec::new(&c, 3, 80, 1).unwrap();
        let f = branch_by_interpolation(&spec).unwrap().reduce_mod_omega(1).unwrap();
        let g = branch_by_stickelberger(&spec, 1, true).unwrap().element;
        assert!(!f.eq_mod(&g, 6));
    }
}
