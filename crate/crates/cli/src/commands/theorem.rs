use anyhow::Result;
use bfzeta::theorem::{find_fixture, fixture_index, theorem, Mode, TheoremConfig, TheoremReport};

use super::Env;
use crate::output::{fields, json, table, yes_no};
use crate::{Common, Outcome};

pub fn config(env: &Env, c: &Common, mistwist: bool) -> TheoremConfig {
    let base = TheoremConfig::default();
    TheoremConfig {
        prec: env.prec(c, base.prec),
        trunc: env.trunc(c, base.trunc),
        enumeration_bound: env.file.enumeration_bound.unwrap_or(base.enumeration_bound),
        mistwist,
        ..base
    }
}

pub fn run(env: &Env, c: &Common, mistwist: bool) -> Result<Outcome> {
    let p = env.p(c)?;
    let k = env.k(c)?;
    let n = env.n(c, 0);
    let fixtures = env.fixtures(c)?;
    let index = fixture_index(&fixtures);
    let fixture = find_fixture(&index, p, n, k);
    let report = theorem(p, n, k, fixture, &config(env, c, mistwist))?;
    let body = if env.json { json(&report)? } else { text(&report) };
    Ok(Outcome { body, ok: report.agree })
}

fn text(r: &TheoremReport) -> String {
    let mode = match r.rhs.mode {
        Mode::Consistency => "consistency (class data predicted by the analytic side; not independent)",
        Mode::Verification => "verification (class data from fixture)",
    };
    let head = fields(&[
        ("p", r.p.to_string()),
        ("k", r.k.to_string()),
        ("n", r.n.to_string()),
        ("mode", mode.to_string()),
        ("lambda", r.lambda.to_string()),
        ("convention", r.calibration.convention.describe()),
        ("LHS exponent", r.lhs_exponent.to_string()),
        ("LHS", format!("{}^{} = {}", r.p, r.lhs_exponent, num_pow(r.p, r.lhs_exponent))),
        ("class type", format!("{:?}", r.rhs.class_type)),
        ("RHS", r.rhs_order.clone()),
        ("verdict", if r.agree { "agree" } else { "DISAGREE" }.to_string()),
    ]);
    let lhs = table(
        &["n", "stickelberger", "distinguished", "root valuations", "digits", "consistent"],
        &[vec![
            r.lhs.n.to_string(),
            r.lhs.by_stickelberger.to_string(),
            r.lhs.by_distinguished.to_string(),
            r.lhs.by_root_valuations.map_or("-".into(), |v| v.to_string()),
            r.lhs.precision.to_string(),
            yes_no(r.lhs.consistent()),
        ]],
    );
    let seq = table(
        &["m", "sum"],
        &r.rhs.sequence.iter().map(|(m, s)| vec![m.to_string(), s.clone()]).collect::<Vec<_>>(),
    );
    format!("{}\n\nLHS exponent by method\n{}\n\nRHS Gauss-sum sequence\n{}", head, lhs, seq)
}

fn num_pow(p: u64, e: u32) -> String {
    (p as u128).checked_pow(e).map_or_else(|| format!("{}^{}", p, e), |v| v.to_string())
}
