use anyhow::Result;
use bfzeta::padic::{PadicScalar, PrimeContext};
use bfzeta::series::DistinguishedPoly;
use bfzeta::theorem::{growth, growth_for_poly, lambda_onset, GrowthRow};
use serde::Serialize;

use super::theorem::config;
use super::Env;
use crate::output::json;
use crate::{Common, Outcome};

#[derive(Serialize)]
struct GrowthReport {
    p: u64,
    /// Component index, or `None` for a synthetic polynomial.
    k: Option<i64>,
    synthetic: Option<i64>,
    lambda: usize,
    rows: Vec<GrowthRow>,
    lambda_from: Option<u32>,
    persists: bool,
}

pub fn run(env: &Env, c: &Common, synthetic: Option<i64>) -> Result<Outcome> {
    let p = env.p(c)?;
    let n_max = env.n(c, 2);
    let cfg = config(env, c, false);
    let report = match synthetic {
        Some(s) => {
            let ctx = PrimeContext::new(p, cfg.prec)?;
            let c0 = PadicScalar::from_i64(&ctx, -(p as i64) * s);
            let poly = DistinguishedPoly::new(&ctx, vec![c0, PadicScalar::one(&ctx)])?;
            let rows = growth_for_poly(&poly, n_max, &cfg)?;
            let (lambda_from, persists) = lambda_onset(&rows, 1);
            GrowthReport { p, k: None, synthetic: Some(s), lambda: 1, rows, lambda_from, persists }
        }
        None => {
            let t = growth(p, env.k(c)?, n_max, &cfg)?;
            GrowthReport {
                p,
                k: Some(t.k),
                synthetic: None,
                lambda: t.lambda,
                rows: t.rows,
                lambda_from: t.lambda_from,
                persists: t.persists,
            }
        }
    };
    let ok = report.lambda_from.is_none() || report.persists;
    let body = if env.json { json(&report)? } else { csv(&report) };
    Ok(Outcome { body, ok })
}

/// One row per level; `lambda_growth` marks rows from the first n with
/// Δe_n = λ onwards.
fn csv(r: &GrowthReport) -> String {
    let mut out = vec!["n,e_n,delta,lambda_growth".to_string()];
    for row in &r.rows {
        let marked = r.lambda_from.is_some_and(|n0| row.n >= n0);
        out.push(format!(
            "{},{},{},{}",
            row.n,
            row.e,
            row.delta.map_or(String::new(), |d| d.to_string()),
            u8::from(marked)
        ));
    }
    out.join("\n")
}
