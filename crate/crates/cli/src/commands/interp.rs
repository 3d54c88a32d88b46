use anyhow::Result;
use bfzeta::lfunction::{interp_check, CheckConfig, InterpCheck};

use super::Env;
use crate::config::pick;
use crate::output::{fields, json, table, yes_no};
use crate::{Common, Outcome};

pub fn run(env: &Env, c: &Common, nodes: Option<usize>, guard: Option<u32>, mistwist: bool) -> Result<Outcome> {
    let base = CheckConfig::default();
    let cfg = CheckConfig {
        prec: env.prec(c, base.prec),
        guard: pick(guard, None, base.guard),
        trunc: env.trunc(c, base.trunc),
        held_out: pick(nodes, None, base.held_out),
        max_level: env.n(c, 1),
        bound: env.file.bound.unwrap_or(base.bound),
        mistwist,
    };
    let report = interp_check(env.p(c)?, env.k(c)?, &cfg)?;
    let body = if env.json { json(&report)? } else { text(&report) };
    Ok(Outcome { body, ok: report.pass })
}

fn text(r: &InterpCheck) -> String {
    let head = fields(&[
        ("p", r.p.to_string()),
        ("k", r.k.to_string()),
        ("precision", format!("{} (compared mod {}^{})", r.prec, r.p, r.target)),
        ("convention", r.calibration.convention.describe()),
        ("mistwisted", yes_no(r.mistwist)),
    ]);
    let held: Vec<Vec<String>> = r
        .held_out
        .iter()
        .map(|h| {
            vec![
                h.index.to_string(),
                h.l.to_string(),
                h.residual_valuation.map_or(">= digits".into(), |v| v.to_string()),
                h.certified.to_string(),
                yes_no(h.ok),
            ]
        })
        .collect();
    let levels: Vec<Vec<String>> = r
        .levels
        .iter()
        .map(|l| {
            vec![
                l.n.to_string(),
                l.dim.to_string(),
                l.nodes.to_string(),
                l.certified.to_string(),
                yes_no(l.agree),
                l.note.clone().unwrap_or_default(),
            ]
        })
        .collect();
    format!(
        "{}\n\nheld-out nodes\n{}\n\nStickelberger vs interpolation\n{}\n\n{}",
        head,
        table(&["i", "l", "v(residual)", "digits", "ok"], &held),
        table(&["n", "dim", "nodes", "digits", "agree", "note"], &levels),
        if r.pass { "PASS" } else { "FAIL" }
    )
}
