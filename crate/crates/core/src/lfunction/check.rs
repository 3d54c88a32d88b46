//! Ground-truth checks for a branch: held-out interpolation nodes and
//! agreement of the Stickelberger and interpolation constructions mod ω_n.

use std::collections::BTreeMap;
use std::sync::{Mutex, OnceLock};

use serde::Serialize;

use super::bernoulli::DEFAULT_BOUND;
use super::{branch_by_interpolation, branch_by_stickelberger, interp_value, BranchSpec, Calibration};
use crate::error::Result;
use crate::padic::{pow_onep, Ctx, PadicScalar, PrimeContext};
use crate::series::{group_ring_dim, truncation_for_tail};

/// Parameters of an interpolation check.
#[derive(Clone, Debug)]
pub struct CheckConfig {
    /// Working precision M.
    pub prec: u32,
    /// Guard digits g; comparisons are made mod p^{M−g}.
    pub guard: u32,
    /// Truncation used for the held-out test (raised to at least M).
    pub trunc: usize,
    pub held_out: usize,
    pub max_level: u32,
    pub bound: usize,
    pub mistwist: bool,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig { prec: 12, guard: 2, trunc: 16, held_out: 3, max_level: 2, bound: DEFAULT_BOUND, mistwist: false }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HeldOutNode {
    pub index: usize,
    pub l: i64,
    /// v_p of f(x_ℓ) − value(ℓ); `None` when it vanishes to the evaluation precision.
    pub residual_valuation: Option<u32>,
    pub certified: u32,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelAgreement {
    pub n: u32,
    pub dim: usize,
    /// Interpolation nodes used for this level (0 when none sufficed).
    pub nodes: usize,
    /// Nodes needed for the ω_n tail to reach the target precision.
    pub nodes_needed: Option<usize>,
    pub certified: u32,
    pub agree: bool,
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct InterpCheck {
    pub p: u64,
    pub k: u64,
    pub prec: u32,
    pub guard: u32,
    pub target: u32,
    pub bound: usize,
    pub held_out: Vec<HeldOutNode>,
    pub levels: Vec<LevelAgreement>,
    pub calibration: Calibration,
    pub mistwist: bool,
    pub pass: bool,
}

/// Held-out residuals of the truncated interpolation series.
pub fn held_out_residuals(p: u64, k: i64, cfg: &CheckConfig) -> Result<Vec<HeldOutNode>> {
    let target = cfg.prec.saturating_sub(cfg.guard);
    let ctx = PrimeContext::new(p, cfg.prec)?;
    let trunc = cfg.trunc.max(cfg.prec as usize);
    let spec = BranchSpec::new(&ctx, k, trunc, 0)?.with_bound(cfg.bound);
    let series = branch_by_interpolation(&spec)?;
    (trunc..trunc + cfg.held_out)
        .map(|i| {
            let l = spec.node(i);
            let x = &pow_onep(l, &ctx) - &PadicScalar::one(&ctx);
            let got = series.eval_at(&x)?;
            let want = interp_value(&spec, l)?;
            let diff = &got - &want;
            let certified = diff.prec();
            let residual_valuation = (!diff.is_zero_within_prec()).then(|| diff.val_lower());
            let ok = certified >= target && residual_valuation.map_or(true, |v| v >= target);
            Ok(HeldOutNode { index: i, l, residual_valuation, certified, ok })
        })
        .collect()
}

/// Compare G_n with the interpolation series reduced mod ω_n, mod p^{target}.
///
/// N starts at the smallest truncation whose ω_n tail reaches the target and
/// grows by a quarter while the certified precision falls short.
pub fn level_agreement(
    p: u64,
    k: i64,
    n: u32,
    target: u32,
    cfg: &CheckConfig,
) -> Result<LevelAgreement> {
    let ctx = PrimeContext::new(p, target.max(1))?;
    let base = BranchSpec::new(&ctx, k, 1, n)?.with_bound(cfg.bound);
    let dim = group_ring_dim(p, n)?;
    let limit = base.max_nodes();
    let needed = tail_truncation(&ctx, n, target, limit.max(64 * dim));
    let mut result = LevelAgreement { n, dim, nodes: 0, nodes_needed: needed, certified: 0, agree: false, note: None };
    let Some(start) = needed.map(|x| x.max(dim)) else {
        result.note = Some(format!("ω_{} tail does not reach {} digits within {} nodes", n, target, 64 * dim));
        return Ok(result);
    };
    if start > limit {
        let index = (1 - base.node(start - 1)) as usize;
        result.note = Some(format!(
            "needs {} nodes (Bernoulli index {}), bound {} allows {}",
            start, index, cfg.bound, limit
        ));
        return Ok(result);
    }
    let g = branch_by_stickelberger(&base, n, cfg.mistwist)?.element;
    let mut trunc = start;
    loop {
        let f = branch_by_interpolation(&base.with_trunc(trunc))?.reduce_mod_omega(n)?;
        result.nodes = trunc;
        result.certified = f.min_prec();
        if result.certified >= target {
            result.agree = f.eq_mod(&g, target);
            return Ok(result);
        }
        if trunc >= limit {
            result.note = Some(format!("certified precision {} below {} at the node limit", result.certified, target));
            return Ok(result);
        }
        trunc = (trunc + trunc / 4 + 1).min(limit);
    }
}

fn tail_truncation(ctx: &Ctx, n: u32, target: u32, limit: usize) -> Option<usize> {
    static CACHE: OnceLock<Mutex<BTreeMap<(u64, u32, u32, usize), Option<usize>>>> = OnceLock::new();
    let key = (ctx.p(), n, target, limit);
    let cache = CACHE.get_or_init(|| Mutex::new(BTreeMap::new()));
    if let Some(v) = cache.lock().expect("tail cache poisoned").get(&key) {
        return *v;
    }
    let v = truncation_for_tail(ctx, n, target, limit);
    cache.lock().expect("tail cache poisoned").insert(key, v);
    v
}

pub fn interp_check(p: u64, k: i64, cfg: &CheckConfig) -> Result<InterpCheck> {
    let target = cfg.prec.saturating_sub(cfg.guard);
    let held_out = held_out_residuals(p, k, cfg)?;
    let ctx = PrimeContext::new(p, target.max(1))?;
    let spec = BranchSpec::new(&ctx, k, 1, 0)?.with_bound(cfg.bound);
    let calibration = super::calibrate(&spec)?;
    let levels = (0..=cfg.max_level)
        .map(|n| level_agreement(p, k, n, target, cfg))
        .collect::<Result<Vec<_>>>()?;
    let pass = held_out.iter().all(|h| h.ok) && levels.iter().all(|l| l.agree);
    Ok(InterpCheck {
        p,
        k: spec.k(),
        prec: cfg.prec,
        guard: cfg.guard,
        target,
        bound: cfg.bound,
        held_out,
        levels,
        calibration,
        mistwist: cfg.mistwist,
        pass,
    })
}
