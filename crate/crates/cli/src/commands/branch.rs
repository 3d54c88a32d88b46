use anyhow::Result;
use bfzeta::lfunction::{lambda_invariant, BranchSpec};
use bfzeta::padic::PrimeContext;
use bfzeta::theorem::{coeffs, Coeff};
use serde::Serialize;

use super::Env;
use crate::output::{fields, json, table};
use crate::{Common, Outcome};

#[derive(Serialize)]
struct BranchReport {
    p: u64,
    k: u64,
    prec: u32,
    trunc: usize,
    lambda: usize,
    series: Vec<Coeff>,
    distinguished: Vec<Coeff>,
    /// Q(t) = P(t - 1)
    shifted: Vec<Coeff>,
    unit: Vec<Coeff>,
}

pub fn run(env: &Env, c: &Common) -> Result<Outcome> {
    let p = env.p(c)?;
    let k = env.k(c)?;
    let ctx = PrimeContext::new(p, env.prec(c, 12))?;
    let spec = BranchSpec::new(&ctx, k, env.trunc(c, 8), 0)?;
    let rep = lambda_invariant(&spec)?;
    let poly = &rep.preparation.poly;
    let report = BranchReport {
        p,
        k: spec.k(),
        prec: ctx.prec(),
        trunc: rep.trunc,
        lambda: rep.lambda,
        series: coeffs(rep.series.coeffs()),
        distinguished: coeffs(poly.coeffs()),
        shifted: coeffs(poly.shift_variable().coeffs()),
        unit: coeffs(rep.preparation.unit.coeffs()),
    };
    let body = if env.json { json(&report)? } else { text(&report) };
    Ok(Outcome { body, ok: true })
}

fn poly_text(cs: &[Coeff], var: &str) -> String {
    let top = cs.len() - 1;
    let mut out = String::new();
    for (i, c) in cs.iter().enumerate().rev() {
        if i != top && c.value == "0" {
            continue;
        }
        let (neg, mag) = match c.value.strip_prefix('-') {
            Some(m) => (true, m),
            None => (false, c.value.as_str()),
        };
        let monomial = match i {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{}^{}", var, i),
        };
        let term = match (mag, i) {
            (m, 0) => m.to_string(),
            ("1", _) => monomial,
            (m, _) => format!("{}*{}", m, monomial),
        };
        if out.is_empty() {
            out = if neg { format!("-{}", term) } else { term };
        } else {
            out.push_str(if neg { " - " } else { " + " });
            out.push_str(&term);
        }
    }
    out
}

fn text(r: &BranchReport) -> String {
    let head = fields(&[
        ("p", r.p.to_string()),
        ("k", r.k.to_string()),
        ("precision", r.prec.to_string()),
        ("truncation", r.trunc.to_string()),
        ("lambda", r.lambda.to_string()),
        ("P(T)", poly_text(&r.distinguished, "T")),
        ("Q(t)", poly_text(&r.shifted, "t")),
    ]);
    let rows: Vec<Vec<String>> = r
        .series
        .iter()
        .enumerate()
        .map(|(i, c)| vec![i.to_string(), c.value.clone(), c.prec.to_string()])
        .collect();
    format!("{}\n\nseries coefficients\n{}", head, table(&["t", "a_t", "digits"], &rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: &str) -> Coeff {
        Coeff { value: v.into(), prec: 4 }
    }

    #[test]
    fn polynomial_rendering() {
        assert_eq!(poly_text(&[c("1")], "T"), "1");
        assert_eq!(poly_text(&[c("-37"), c("1")], "T"), "T - 37");
        assert_eq!(poly_text(&[c("5"), c("0"), c("-10"), c("1")], "t"), "t^3 - 10*t^2 + 5");
    }
}
