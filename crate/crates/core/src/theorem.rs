//! End-to-end comparison of the two sides of the class-number identity at
//! level n: the p-adic size of ∏_{ζ^{p^n}=1} f(ζ − 1) for the branch f, and
//! the stabilized exponential sum over the synthetic level-k field space.

use std::collections::BTreeMap;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::bf::scenario::level_sum_sequence;
use crate::bf::{p_power_log, stabilization_limit, StabilizationMode, DEFAULT_ENUMERATION_BOUND, STABLE_WINDOW};
use crate::error::{Error, Result};
use crate::lfunction::{branch_by_stickelberger, lambda_invariant, BranchSpec, Calibration};
use crate::padic::{PadicScalar, PrimeContext};
use crate::series::{resultant_valuation, DistinguishedPoly, ResultantConfig};

/// Externally supplied type of Cl[p^∞]_k at level n.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassFixture {
    pub p: u64,
    pub n: u32,
    pub k: i64,
    pub class_type: Vec<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Class data predicted from the analytic side itself.
    Consistency,
    /// Class data taken from a fixture.
    Verification,
}

#[derive(Clone, Debug)]
pub struct TheoremConfig {
    pub prec: u32,
    pub trunc: usize,
    pub enumeration_bound: u128,
    pub resultant: ResultantConfig,
    pub mistwist: bool,
}

impl Default for TheoremConfig {
    fn default() -> Self {
        TheoremConfig {
            prec: 12,
            trunc: 8,
            enumeration_bound: DEFAULT_ENUMERATION_BOUND,
            resultant: ResultantConfig { start_precision: 8, sylvester_max_dim: 1024 },
            mistwist: false,
        }
    }
}

/// A coefficient with its certified precision.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Coeff {
    pub value: String,
    pub prec: u32,
}

impl From<&PadicScalar> for Coeff {
    fn from(x: &PadicScalar) -> Self {
        Coeff { value: x.to_signed().to_string(), prec: x.prec() }
    }
}

pub fn coeffs(xs: &[PadicScalar]) -> Vec<Coeff> {
    xs.iter().map(Coeff::from).collect()
}

/// v_p(∏_{ζ^{p^n}=1} P(ζ − 1)) from the Newton polygon of a distinguished P.
///
/// A root β contributes v(β) at ζ = 1 and min(v(β), 1/φ(p^j)) at each of
/// the φ(p^j) roots of exact order p^j; a tie is reported as exhausted.
pub fn exponent_by_root_valuations(poly: &DistinguishedPoly, n: u32) -> Result<u32> {
    let p = poly.ctx().p() as i64;
    let slopes = root_valuations(poly.coeffs())?;
    let mut total = Ratio::from_integer(0i64);
    for &(v, mult) in &slopes {
        total += v * Ratio::from_integer(mult as i64);
    }
    for j in 1..=n {
        let phi = (p - 1) * p.pow(j - 1);
        let circle = Ratio::new(1, phi);
        for &(v, mult) in &slopes {
            if v == circle {
                return Err(Error::exhausted("a root lies on a torsion circle"));
            }
            total += v.min(circle) * Ratio::from_integer(phi * mult as i64);
        }
    }
    if !total.is_integer() {
        return Err(Error::Invalid(format!("non-integral norm valuation {}", total)));
    }
    Ok(*total.numer() as u32)
}

/// Root valuations with multiplicities, from the lower convex hull of
/// (i, v(a_i)).
fn root_valuations(coeffs: &[PadicScalar]) -> Result<Vec<(Ratio<i64>, usize)>> {
    let deg = coeffs.len() - 1;
    if deg == 0 {
        return Ok(Vec::new());
    }
    let mut pts: Vec<(i64, i64)> = Vec::new();
    for (i, c) in coeffs.iter().enumerate() {
        if !c.is_zero_within_prec() {
            pts.push((i as i64, c.val_lower() as i64));
        } else if i == 0 {
            return Err(Error::exhausted("constant term vanishes within precision"));
        }
    }
    // monotone chain lower hull
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &pt in &pts {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            if (y2 - y1) * (pt.0 - x1) >= (pt.1 - y1) * (x2 - x1) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    // a vanishing intermediate coefficient must not lie below the hull
    for (i, c) in coeffs.iter().enumerate() {
        if c.is_zero_within_prec() && i > 0 {
            let seg = hull.windows(2).find(|w| w[0].0 <= i as i64 && i as i64 <= w[1].0).expect("inside hull");
            let (x1, y1) = seg[0];
            let (x2, y2) = seg[1];
            let line = Ratio::new(y1 * (x2 - i as i64) + y2 * (i as i64 - x1), x2 - x1);
            if Ratio::from_integer(c.prec() as i64) < line {
                return Err(Error::exhausted("coefficient precision too low for the Newton polygon"));
            }
        }
    }
    Ok(hull
        .windows(2)
        .map(|w| (Ratio::new(w[0].1 - w[1].1, w[1].0 - w[0].0), (w[1].0 - w[0].0) as usize))
        .collect())
}

/// LHS exponent at one level, computed three ways where possible.
#[derive(Clone, Debug, Serialize)]
pub struct LevelExponent {
    pub n: u32,
    /// Resultant of the Stickelberger image with ω_n.
    pub by_stickelberger: u32,
    /// Resultant of the interpolation-derived distinguished polynomial.
    pub by_distinguished: u32,
    /// Newton-polygon count for the distinguished polynomial.
    pub by_root_valuations: Option<u32>,
    pub precision: u32,
}

impl LevelExponent {
    pub fn consistent(&self) -> bool {
        self.by_stickelberger == self.by_distinguished
            && self.by_root_valuations.is_none_or(|v| v == self.by_distinguished)
    }
}

/// Everything about the branch needed at several levels.
#[derive(Clone, Debug)]
pub struct BranchData {
    pub spec: BranchSpec,
    pub lambda: usize,
    pub trunc: usize,
    pub poly: DistinguishedPoly,
    pub series: Vec<PadicScalar>,
}

pub fn branch_data(p: u64, k: i64, cfg: &TheoremConfig) -> Result<BranchData> {
    let ctx = PrimeContext::new(p, cfg.prec)?;
    let spec = BranchSpec::new(&ctx, k, cfg.trunc, 0)?;
    let rep = lambda_invariant(&spec)?;
    Ok(BranchData {
        spec,
        lambda: rep.lambda,
        trunc: rep.trunc,
        poly: rep.preparation.poly,
        series: rep.series.coeffs().to_vec(),
    })
}

pub fn level_exponent(data: &BranchData, n: u32, cfg: &TheoremConfig) -> Result<(LevelExponent, Calibration)> {
    let stick = branch_by_stickelberger(&data.spec, n, cfg.mistwist)?;
    let by_stick = stick.element.resultant_valuation(cfg.resultant)?;
    let by_poly = resultant_valuation(data.poly.coeffs(), n, cfg.resultant)?;
    let by_roots = exponent_by_root_valuations(&data.poly, n).ok();
    Ok((
        LevelExponent {
            n,
            by_stickelberger: by_stick.exponent,
            by_distinguished: by_poly.exponent,
            by_root_valuations: by_roots,
            precision: by_stick.precision.max(by_poly.precision),
        },
        stick.calibration,
    ))
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthRow {
    pub n: u32,
    pub e: u32,
    pub delta: Option<i64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthTable {
    pub p: u64,
    pub k: i64,
    pub lambda: usize,
    pub rows: Vec<GrowthRow>,
    pub levels: Vec<LevelExponent>,
    /// First n with Δe_n = λ.
    pub lambda_from: Option<u32>,
    /// Whether Δe_n = λ for every later n.
    pub persists: bool,
}

pub fn growth_rows(es: &[u32]) -> Vec<GrowthRow> {
    es.iter()
        .enumerate()
        .map(|(n, &e)| GrowthRow { n: n as u32, e, delta: (n > 0).then(|| e as i64 - es[n - 1] as i64) })
        .collect()
}

/// First n with Δe_n = λ, and whether every later row keeps it.
pub fn lambda_onset(rows: &[GrowthRow], lambda: usize) -> (Option<u32>, bool) {
    let hit = |r: &GrowthRow| r.delta == Some(lambda as i64);
    match rows.iter().position(hit) {
        Some(i) => (Some(rows[i].n), rows[i..].iter().all(hit)),
        None => (None, false),
    }
}

pub fn growth(p: u64, k: i64, n_max: u32, cfg: &TheoremConfig) -> Result<GrowthTable> {
    let data = branch_data(p, k, cfg)?;
    let mut levels = Vec::new();
    for n in 0..=n_max {
        levels.push(level_exponent(&data, n, cfg)?.0);
    }
    let es: Vec<u32> = levels.iter().map(|l| l.by_stickelberger).collect();
    let rows = growth_rows(&es);
    let (lambda_from, persists) = lambda_onset(&rows, data.lambda);
    Ok(GrowthTable { p, k, lambda: data.lambda, rows, levels, lambda_from, persists })
}

/// Growth of a given distinguished polynomial, e.g. a synthetic T − p·c.
pub fn growth_for_poly(poly: &DistinguishedPoly, n_max: u32, cfg: &TheoremConfig) -> Result<Vec<GrowthRow>> {
    let es: Vec<u32> = (0..=n_max)
        .map(|n| resultant_valuation(poly.coeffs(), n, cfg.resultant).map(|r| r.exponent))
        .collect::<Result<_>>()?;
    Ok(growth_rows(&es))
}

#[derive(Clone, Debug, Serialize)]
pub struct RhsReport {
    pub mode: Mode,
    pub class_type: Vec<u32>,
    /// (m, Σ) pairs.
    pub sequence: Vec<(u32, String)>,
    pub limit: String,
    pub exponent: u32,
}

/// Stabilized sum over the synthetic odd-level field space with the given
/// class type.
pub fn rhs(p: u64, k: i64, class_type: &[u32], mode: Mode, cfg: &TheoremConfig) -> Result<RhsReport> {
    let kk = k.rem_euclid(p as i64 - 1) as u64;
    let top = class_type.iter().copied().max().unwrap_or(0);
    let m_max = top.div_ceil(2) + STABLE_WINDOW as u32;
    let seq = level_sum_sequence(p, kk, class_type, m_max, cfg.enumeration_bound)?;
    let limit = stabilization_limit(&seq, 1, p, StabilizationMode::Plain)?;
    let exponent = p_power_log(&limit, p).ok_or_else(|| Error::NotPPower(limit.to_string()))?;
    Ok(RhsReport {
        mode,
        class_type: class_type.to_vec(),
        sequence: seq.iter().enumerate().map(|(i, v)| (i as u32 + 1, v.to_string())).collect(),
        limit: limit.to_string(),
        exponent,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TheoremReport {
    pub p: u64,
    pub n: u32,
    pub k: i64,
    pub precision: u32,
    pub trunc: usize,
    pub lhs_exponent: u32,
    pub lhs: LevelExponent,
    pub lambda: usize,
    pub distinguished: Vec<Coeff>,
    pub shifted: Vec<Coeff>,
    pub rhs: RhsReport,
    pub rhs_order: String,
    pub growth: Vec<GrowthRow>,
    pub calibration: Calibration,
    pub agree: bool,
}

pub fn theorem(p: u64, n: u32, k: i64, fixture: Option<&ClassFixture>, cfg: &TheoremConfig) -> Result<TheoremReport> {
    let data = branch_data(p, k, cfg)?;
    let mut levels = Vec::new();
    let mut calibration = None;
    for j in 0..=n {
        let (lvl, cal) = level_exponent(&data, j, cfg)?;
        levels.push(lvl);
        calibration = Some(cal);
    }
    let lhs = levels.last().cloned().expect("at least level 0");
    if !lhs.consistent() {
        return Err(Error::Invalid(format!(
            "LHS algorithms disagree at n = {}: Stickelberger {}, distinguished {}, roots {:?}",
            n, lhs.by_stickelberger, lhs.by_distinguished, lhs.by_root_valuations
        )));
    }
    let e = lhs.by_stickelberger;
    let (class_type, mode) = match fixture {
        Some(f) => (f.class_type.clone(), Mode::Verification),
        None => (if e > 0 { vec![e] } else { Vec::new() }, Mode::Consistency),
    };
    let rhs = rhs(p, k, &class_type, mode, cfg)?;
    let es: Vec<u32> = levels.iter().map(|l| l.by_stickelberger).collect();
    Ok(TheoremReport {
        p,
        n,
        k,
        precision: cfg.prec,
        trunc: data.trunc,
        lhs_exponent: e,
        lhs,
        lambda: data.lambda,
        distinguished: coeffs(data.poly.coeffs()),
        shifted: coeffs(data.poly.shift_variable().coeffs()),
        rhs_order: rhs.limit.clone(),
        agree: rhs.exponent == e,
        rhs,
        growth: growth_rows(&es),
        calibration: calibration.expect("calibrated"),
    })
}

/// Fixture lookup keyed by (p, n, k mod p−1).
pub fn fixture_index(fixtures: &[ClassFixture]) -> BTreeMap<(u64, u32, i64), ClassFixture> {
    fixtures
        .iter()
        .map(|f| ((f.p, f.n, f.k.rem_euclid(f.p as i64 - 1)), f.clone()))
        .collect()
}

pub fn find_fixture<'a>(
    index: &'a BTreeMap<(u64, u32, i64), ClassFixture>,
    p: u64,
    n: u32,
    k: i64,
) -> Option<&'a ClassFixture> {
    index.get(&(p, n, k.rem_euclid(p as i64 - 1)))
}


#[cfg(test)]
mod tests {
    use super::*;

    fn poly(p: u64, m: u32, c: &[i64]) -> DistinguishedPoly {
        let ctx = PrimeContext::new(p, m).unwrap();
        DistinguishedPoly::new(&ctx, c.iter().map(|&x| PadicScalar::from_i64(&ctx, x)).collect()).unwrap()
    }

    #[test]
    fn root_valuation_counts() {
        // T − 5c: e_n = 1 + n
        let f = poly(5, 10, &[-10, 1]);
        for n in 0..3 {
            assert_eq!(exponent_by_root_valuations(&f, n).unwrap(), 1 + n);
        }
        // T − 25: e_0 = 2, then +1 per level
        let f = poly(5, 10, &[-25, 1]);
        assert_eq!(exponent_by_root_valuations(&f, 2).unwrap(), 4);
        // T² − 5: roots of valuation 1/2
        let f = poly(5, 10, &[-5, 0, 1]);
        assert_eq!(exponent_by_root_valuations(&f, 0).unwrap(), 1);
        assert_eq!(exponent_by_root_valuations(&f, 1).unwrap(), 1 + 4 * 2 / 4);
    }

    #[test]
    fn root_valuations_match_resultants() {
        let cfg = TheoremConfig::default();
        for c in [&[-5i64, 1][..], &[-25, 1], &[5, 5, 1], &[-5, 0, 1], &[25, -10, 0, 1]] {
            let f = poly(5, 12, c);
            for n in 0..3 {
                let by_res = resultant_valuation(f.coeffs(), n, cfg.resultant).unwrap().exponent;
                if let Ok(by_roots) = exponent_by_root_valuations(&f, n) {
                    assert_eq!(by_roots, by_res, "{:?} n={}", c, n);
                }
            }
        }
    }

    #[test]
    fn regular_prime_theorem() {
        let rep = theorem(5, 1, 3, None, &TheoremConfig::default()).unwrap();
        assert_eq!(rep.lhs_exponent, 0);
        assert_eq!(rep.rhs_order, "1");
        assert!(rep.agree);
    }

    #[test]
    fn irregular_growth() {
        let cfg = TheoremConfig::default();
        let t = growth(37, 5, 1, &cfg).unwrap();
        let es: Vec<u32> = t.rows.iter().map(|r| r.e).collect();
        assert_eq!(es, vec![1, 2]);
        assert_eq!(t.lambda, 1);
        assert_eq!(t.lambda_from, Some(1));
        assert!(t.persists);
    }

    #[test]
    fn synthetic_growth() {
        let f = poly(5, 12, &[-5 * 3, 1]);
        let rows = growth_for_poly(&f, 2, &TheoremConfig::default()).unwrap();
        assert_eq!(rows.iter().map(|r| r.e).collect::<Vec<_>>(), vec![1, 2, 3]);
    }

    #[test]
    fn verification_mode_uses_fixture() {
        let fx = ClassFixture { p: 37, n: 0, k: 5, class_type: vec![1] };
        let rep = theorem(37, 0, 5, Some(&fx), &TheoremConfig::default()).unwrap();
        assert_eq!(rep.lhs_exponent, 1);
        assert_eq!(rep.rhs.mode, Mode::Verification);
        assert!(rep.agree);
    }
}
