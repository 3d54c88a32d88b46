use std::path::PathBuf;

use anyhow::{Context, Result};
use bfzeta::bf::random::{oracle_run, OracleRun, RandomParams};
use bfzeta::bf::schema::parse_instance;
use bfzeta::bf::{
    bf_sum_bruteforce_bounded, bf_sum_closed_form, graded_bf_sum, BFInstance, SumMethod, DEFAULT_ENUMERATION_BOUND,
};
use bfzeta::Error;
use serde::Serialize;

use super::{Env, EXAMPLE_INSTANCE};
use crate::output::{fields, json, table, yes_no};
use crate::{Common, Outcome};

pub enum Source {
    File(PathBuf),
    Example,
    Random { count: usize },
}

#[derive(Serialize)]
struct LevelSum {
    k: u64,
    sum: String,
}

#[derive(Serialize)]
struct Graded {
    per_level: Vec<LevelSum>,
    total: String,
    product: String,
    splits: bool,
}

#[derive(Serialize)]
struct SumReport {
    p: u64,
    m: u32,
    pairs: Option<String>,
    /// `None` when the enumeration bound forbids brute force.
    brute_force: Option<String>,
    closed_form: String,
    integral: Option<bool>,
    agree: Option<bool>,
    graded: Option<Graded>,
    note: Option<String>,
}

pub fn run(env: &Env, c: &Common, source: Source) -> Result<Outcome> {
    let bound = env.file.enumeration_bound.unwrap_or(DEFAULT_ENUMERATION_BOUND);
    let text = match source {
        Source::Random { count } => return random(env, env.seed(c), count, bound),
        Source::Example => EXAMPLE_INSTANCE.to_string(),
        Source::File(path) => {
            std::fs::read_to_string(&path).with_context(|| format!("reading instance {}", path.display()))?
        }
    };
    let inst = parse_instance(&text)?;
    let report = sums(&inst, bound)?;
    let ok = report.agree != Some(false) && report.graded.as_ref().map_or(true, |g| g.splits);
    let body = if env.json { json(&report)? } else { sum_text(&report) };
    Ok(Outcome { body, ok })
}

fn sums(inst: &BFInstance, bound: u128) -> Result<SumReport> {
    let closed = bf_sum_closed_form(inst)?;
    let (brute, note) = match bf_sum_bruteforce_bounded(inst, bound) {
        Ok(v) => (Some(v), None),
        Err(e @ Error::EnumerationBound { .. }) => (None, Some(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    let graded = match inst.grading() {
        Some(_) => {
            let g = graded_bf_sum(inst, SumMethod::ClosedForm)?;
            Some(Graded {
                splits: g.splits(),
                per_level: g.per_level.iter().map(|(k, s)| LevelSum { k: *k, sum: s.to_string() }).collect(),
                total: g.total.to_string(),
                product: g.product.to_string(),
            })
        }
        None => None,
    };
    Ok(SumReport {
        p: inst.p(),
        m: inst.m(),
        pairs: inst.pair_count().map(|n| n.to_string()),
        integral: brute.as_ref().map(|_| true),
        agree: brute.as_ref().map(|b| *b == closed),
        brute_force: brute.map(|b| b.to_string()),
        closed_form: closed.to_string(),
        graded,
        note,
    })
}

fn sum_text(r: &SumReport) -> String {
    let opt = |x: &Option<String>| x.clone().unwrap_or_else(|| "-".into());
    let mut head = vec![
        ("p", r.p.to_string()),
        ("m", r.m.to_string()),
        ("pairs", opt(&r.pairs)),
        ("brute force", opt(&r.brute_force)),
        ("closed form", r.closed_form.clone()),
        ("integral", r.integral.map_or("-".into(), yes_no)),
        ("agree", r.agree.map_or("-".into(), yes_no)),
    ];
    if let Some(n) = &r.note {
        head.push(("note", n.clone()));
    }
    let mut out = fields(&head);
    if let Some(g) = &r.graded {
        let rows: Vec<Vec<String>> = g.per_level.iter().map(|l| vec![l.k.to_string(), l.sum.clone()]).collect();
        out.push_str(&format!(
            "\n\nper-level sums\n{}\n\n{}",
            table(&["k", "sum"], &rows),
            fields(&[("product", g.product.clone()), ("total", g.total.clone()), ("splits", yes_no(g.splits))])
        ));
    }
    out
}

fn random(env: &Env, seed: u64, count: usize, bound: u128) -> Result<Outcome> {
    let params = RandomParams { bound, ..RandomParams::default() };
    let run = oracle_run(seed, count, &params)?;
    let ok = run.agreements == run.count;
    let body = if env.json { json(&run)? } else { random_text(&run) };
    Ok(Outcome { body, ok })
}

fn random_text(r: &OracleRun) -> String {
    let mut out = fields(&[
        ("seed", r.seed.to_string()),
        ("instances", r.count.to_string()),
        ("perfect pairings", r.perfect.to_string()),
        ("agreements", format!("{}/{}", r.agreements, r.count)),
    ]);
    let bad: Vec<Vec<String>> = r
        .cases
        .iter()
        .filter(|c| !c.agree)
        .map(|c| vec![c.index.to_string(), c.p.to_string(), c.m.to_string(), c.brute_force.clone(), c.closed_form.clone()])
        .collect();
    if !bad.is_empty() {
        out.push_str("\n\ndisagreements\n");
        out.push_str(&table(&["index", "p", "m", "brute force", "closed form"], &bad));
    }
    out
}
