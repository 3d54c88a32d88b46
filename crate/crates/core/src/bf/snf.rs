//! Smith normal form over Z/p^k, reduced to what is needed here: the
//! valuations of the elementary divisors.

use crate::error::{Error, Result};
use crate::padic::vp_u64;
use crate::zmod::{inv_mod, max_word_precision, mulmod, pow_u64};

/// Valuations e_1, …, e_r (r = number of rows) of the elementary divisors of
/// a matrix over Z/p^k. Rows beyond the rank report k, so the cokernel of
/// the column span in (Z/p^k)^r is ⊕ Z/p^{e_i}.
///
/// Full pivoting on the entry of least valuation, ties broken by lowest row
/// and then lowest column.
pub fn elementary_valuations(rows: &[Vec<u64>], p: u64, k: u32) -> Result<Vec<u32>> {
    if k > max_word_precision(p) {
        return Err(Error::Invalid(format!("{}^{} exceeds word size", p, k)));
    }
    let nrows = rows.len();
    if k == 0 {
        return Ok(vec![0; nrows]);
    }
    let ncols = rows.first().map_or(0, |r| r.len());
    let m = pow_u64(p, k);
    let mut a: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|&x| x % m).collect()).collect();
    let mut row_live = vec![true; nrows];
    let mut col_live = vec![true; ncols];
    let mut out = Vec::with_capacity(nrows);
    loop {
        let mut best: Option<(u32, usize, usize)> = None;
        for (i, row) in a.iter().enumerate() {
            if !row_live[i] {
                continue;
            }
            for (j, &x) in row.iter().enumerate() {
                if !col_live[j] {
                    continue;
                }
                if let Some(v) = vp_u64(x, p) {
                    if best.map_or(true, |(bv, _, _)| v < bv) {
                        best = Some((v, i, j));
                    }
                }
            }
        }
        let (v, pi, pj) = match best {
            Some(b) => b,
            None => break,
        };
        out.push(v);
        let pv = pow_u64(p, v);
        let unit_inv = inv_mod(a[pi][pj] / pv, m).expect("unit part");
        let prow = a[pi].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == pi || !row_live[i] || row[pj] == 0 {
                continue;
            }
            let c = mulmod(row[pj] / pv, unit_inv, m);
            for j in 0..ncols {
                if col_live[j] && prow[j] != 0 {
                    row[j] = (row[j] + m - mulmod(c, prow[j], m)) % m;
                }
            }
        }
        row_live[pi] = false;
        col_live[pj] = false;
    }
    out.resize(nrows, k);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_and_zero() {
        assert_eq!(elementary_valuations(&[vec![3, 0], vec![0, 9]], 3, 3).unwrap(), vec![1, 2]);
        assert_eq!(elementary_valuations(&[vec![0, 0]], 3, 2).unwrap(), vec![2]);
        assert_eq!(elementary_valuations(&[], 3, 2).unwrap(), Vec::<u32>::new());
    }

    #[test]
    fn needs_pivot_search() {
        // [[3,1],[1,0]] is unimodular
        assert_eq!(elementary_valuations(&[vec![3, 1], vec![1, 0]], 3, 3).unwrap(), vec![0, 0]);
        // [[2,4],[4,8]] mod 5^2: rank one
        assert_eq!(elementary_valuations(&[vec![2, 4], vec![4, 8]], 5, 2).unwrap(), vec![0, 2]);
    }
}
