//! Word-sized arithmetic modulo an odd prime power, for the dense linear
//! algebra behind resultant valuations.

use crate::error::{Error, Result};
use crate::padic::vp_u64;

/// Montgomery multiplication modulo an odd m < 2^63.
#[derive(Debug, Clone, Copy)]
pub struct Montgomery {
    m: u64,
    m_neg_inv: u64,
    r2: u64,
}

impl Montgomery {
    pub fn new(m: u64) -> Self {
        assert!(m % 2 == 1 && m < (1 << 63), "modulus must be odd and below 2^63");
        // Newton iteration for m^{-1} mod 2^64
        let mut inv: u64 = 1;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(m.wrapping_mul(inv)));
        }
        let r = ((1u128 << 64) % m as u128) as u64;
        let r2 = ((r as u128 * r as u128) % m as u128) as u64;
        Montgomery { m, m_neg_inv: inv.wrapping_neg(), r2 }
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        let t = a as u128 * b as u128;
        let u = (t as u64).wrapping_mul(self.m_neg_inv);
        let s = ((t + u as u128 * self.m as u128) >> 64) as u64;
        if s >= self.m {
            s - self.m
        } else {
            s
        }
    }

    #[inline]
    pub fn to_mont(&self, a: u64) -> u64 {
        self.mul(a % self.m, self.r2)
    }

    #[inline]
    pub fn from_mont(&self, a: u64) -> u64 {
        self.mul(a, 1)
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + (self.m - b)
        }
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.m {
            s - self.m
        } else {
            s
        }
    }
}

/// Plain modular product via 128-bit remainder.
#[inline]
pub fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(m as i128) as u64)
}

/// Largest M with p^M < 2^63.
pub fn max_word_precision(p: u64) -> u32 {
    let mut m = 0;
    let mut acc: u128 = 1;
    while acc * (p as u128) < (1u128 << 63) {
        acc *= p as u128;
        m += 1;
    }
    m
}

pub fn pow_u64(p: u64, e: u32) -> u64 {
    (0..e).fold(1u64, |a, _| a.checked_mul(p).expect("prime power overflows u64"))
}

/// v_p(det A) for a square matrix of residues mod p^prec.
///
/// Column-by-column elimination with the minimal-valuation entry of the
/// column as pivot (lowest row on ties). Every row operation is unimodular
/// over Z, so the determinant is preserved exactly mod p^prec; the answer is
/// the sum of pivot valuations and is reported only when it stays below
/// `prec`.
pub fn det_valuation(mut rows: Vec<Vec<u64>>, p: u64, prec: u32) -> Result<u32> {
    let n = rows.len();
    if n == 0 {
        return Ok(0);
    }
    let m = pow_u64(p, prec);
    let mont = Montgomery::new(m);
    for r in rows.iter_mut() {
        assert_eq!(r.len(), n, "matrix must be square");
        for x in r.iter_mut() {
            *x = mont.to_mont(*x);
        }
    }
    let val = |x: u64| vp_u64(x, p).map(|v| v.min(prec));
    let mut total = 0u32;
    for col in 0..n {
        let mut best: Option<(usize, u32)> = None;
        for (i, row) in rows.iter().enumerate().skip(col) {
            if let Some(v) = val(row[col]) {
                if best.map_or(true, |(_, bv)| v < bv) {
                    best = Some((i, v));
                    if v == 0 {
                        break;
                    }
                }
            }
        }
        let (piv, v) = best.ok_or_else(|| {
            Error::exhausted(format!("determinant vanishes mod {}^{} (column {})", p, prec, col))
        })?;
        total += v;
        if total >= prec {
            return Err(Error::exhausted(format!(
                "determinant valuation reaches working precision {}",
                prec
            )));
        }
        rows.swap(col, piv);
        let pv = pow_u64(p, v);
        let unit = rows[col][col] / pv;
        let unit_inv = inv_mod(unit, m).expect("pivot unit part is invertible");
        let (head, tail) = rows.split_at_mut(col + 1);
        let prow = &head[col];
        for row in tail.iter_mut() {
            let a = row[col];
            if a == 0 {
                continue;
            }
            // a = p^v·w exactly as integers since v(a) ≥ v
            let w = a / pv;
            let c = mont.to_mont(mulmod(w, unit_inv, m));
            row[col] = 0;
            for j in col + 1..n {
                let pj = prow[j];
                if pj != 0 {
                    row[j] = mont.sub(row[j], mont.mul(c, pj));
                }
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn montgomery_matches_plain() {
        let m = 37u64.pow(12);
        let mont = Montgomery::new(m);
        for (a, b) in [(1u64, 1u64), (m - 1, m - 1), (123456789, 987654321), (0, 5)] {
            let got = mont.from_mont(mont.mul(mont.to_mont(a), mont.to_mont(b)));
            assert_eq!(got, mulmod(a, b, m));
        }
    }

    #[test]
    fn det_valuation_diagonal() {
        let rows = vec![vec![5, 0, 0], vec![0, 25, 0], vec![0, 0, 3]];
        assert_eq!(det_valuation(rows, 5, 6).unwrap(), 3);
    }

    #[test]
    fn det_valuation_needs_row_swap() {
        // det = -5·(unit) after swapping; [[5,1],[1,0]] has det -1
        let rows = vec![vec![5, 1], vec![1, 0]];
        assert_eq!(det_valuation(rows, 5, 4).unwrap(), 0);
        let rows = vec![vec![10, 5], vec![5, 10]]; // det = 75
        assert_eq!(det_valuation(rows, 5, 4).unwrap(), 2);
    }

    #[test]
    fn singular_matrix_exhausts() {
        let rows = vec![vec![1, 2], vec![2, 4]];
        assert!(det_valuation(rows, 5, 4).is_err());
    }

    #[test]
    fn word_precision_bound() {
        assert_eq!(max_word_precision(37), 12);
        assert!(5u128.pow(max_word_precision(5)) < 1 << 63);
    }
}
