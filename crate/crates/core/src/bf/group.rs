//! Finite abelian p-groups ⊕ Z/p^{r_i}, homomorphisms and pairings between
//! them, all in coordinates on the standard generators.

use serde::{Deserialize, Serialize};

use super::snf::elementary_valuations;
use crate::error::{Error, Result};
use crate::padic::is_prime;
use crate::zmod::{mulmod, pow_u64};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteAbelianPGroup {
    p: u64,
    exponents: Vec<u32>,
}

impl FiniteAbelianPGroup {
    pub fn new(p: u64, exponents: Vec<u32>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidPrime(p));
        }
        if exponents.iter().any(|&r| r == 0) {
            return Err(Error::Invalid("cyclic factors must have exponent at least 1".into()));
        }
        Ok(FiniteAbelianPGroup { p, exponents })
    }

    pub fn trivial(p: u64) -> Self {
        FiniteAbelianPGroup { p, exponents: Vec::new() }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn rank(&self) -> usize {
        self.exponents.len()
    }

    /// Order of generator i.
    pub fn gen_order(&self, i: usize) -> u64 {
        pow_u64(self.p, self.exponents[i])
    }

    /// log_p of the order.
    pub fn log_order(&self) -> u32 {
        self.exponents.iter().sum()
    }

    /// The order, if it fits in u128.
    pub fn order(&self) -> Option<u128> {
        (self.p as u128).checked_pow(self.log_order())
    }

    pub fn max_exponent(&self) -> u32 {
        self.exponents.iter().copied().max().unwrap_or(0)
    }

    pub fn check_element(&self, x: &[u64]) -> Result<()> {
        if x.len() != self.rank() {
            return Err(Error::Invalid(format!("expected {} coordinates, got {}", self.rank(), x.len())));
        }
        for (i, &c) in x.iter().enumerate() {
            if c >= self.gen_order(i) {
                return Err(Error::Invalid(format!("coordinate {} = {} out of range", i, c)));
            }
        }
        Ok(())
    }

    /// Direct sum.
    pub fn sum(&self, other: &FiniteAbelianPGroup) -> FiniteAbelianPGroup {
        let mut exponents = self.exponents.clone();
        exponents.extend_from_slice(&other.exponents);
        FiniteAbelianPGroup { p: self.p, exponents }
    }

    /// Subgroup spanned by the listed generators.
    pub fn select(&self, idx: &[usize]) -> FiniteAbelianPGroup {
        FiniteAbelianPGroup { p: self.p, exponents: idx.iter().map(|&i| self.exponents[i]).collect() }
    }
}

/// A homomorphism in coordinates: `matrix[i][j]` is the i-th codomain
/// coordinate of the image of the j-th domain generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homomorphism {
    domain: FiniteAbelianPGroup,
    codomain: FiniteAbelianPGroup,
    matrix: Vec<Vec<u64>>,
}

impl Homomorphism {
    /// Entries are reduced mod the codomain orders. Generator j of order
    /// p^{r_j} must land in the p^{r_j}-torsion, i.e. entry (i, j) must be
    /// divisible by p^{max(c_i − r_j, 0)}.
    pub fn new(domain: FiniteAbelianPGroup, codomain: FiniteAbelianPGroup, matrix: Vec<Vec<i64>>) -> Result<Self> {
        let p = domain.p();
        if codomain.p() != p {
            return Err(Error::Invalid("groups for different primes".into()));
        }
        if matrix.len() != codomain.rank() || matrix.iter().any(|r| r.len() != domain.rank()) {
            return Err(Error::Schema(format!(
                "map matrix must be {}x{} (codomain rank x domain rank)",
                codomain.rank(),
                domain.rank()
            )));
        }
        let mut reduced = Vec::with_capacity(matrix.len());
        for (i, row) in matrix.iter().enumerate() {
            let ci = codomain.exponents()[i];
            let modulus = codomain.gen_order(i);
            let mut out = Vec::with_capacity(row.len());
            for (j, &x) in row.iter().enumerate() {
                let x = x.rem_euclid(modulus as i64) as u64;
                let need = ci.saturating_sub(domain.exponents()[j]);
                if x % pow_u64(p, need) != 0 {
                    return Err(Error::Schema(format!(
                        "map entry ({}, {}) = {} must be divisible by {}^{}",
                        i, j, x, p, need
                    )));
                }
                out.push(x);
            }
            reduced.push(out);
        }
        Ok(Homomorphism { domain, codomain, matrix: reduced })
    }

    pub fn zero(domain: FiniteAbelianPGroup, codomain: FiniteAbelianPGroup) -> Self {
        let matrix = vec![vec![0; domain.rank()]; codomain.rank()];
        Homomorphism { domain, codomain, matrix }
    }

    pub fn domain(&self) -> &FiniteAbelianPGroup {
        &self.domain
    }

    pub fn codomain(&self) -> &FiniteAbelianPGroup {
        &self.codomain
    }

    pub fn matrix(&self) -> &[Vec<u64>] {
        &self.matrix
    }

    pub fn apply(&self, x: &[u64]) -> Vec<u64> {
        let p = self.domain.p();
        self.matrix
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let m = pow_u64(p, self.codomain.exponents()[i]);
                row.iter().zip(x).fold(0u64, |acc, (&a, &b)| (acc + mulmod(a, b % m, m)) % m)
            })
            .collect()
    }

    /// self ∘ first.
    pub fn compose(&self, first: &Homomorphism) -> Result<Homomorphism> {
        if first.codomain != self.domain {
            return Err(Error::Invalid("composition of incompatible maps".into()));
        }
        let cols: Vec<Vec<u64>> = (0..first.domain.rank())
            .map(|j| {
                let e: Vec<u64> = first.matrix.iter().map(|r| r[j]).collect();
                self.apply(&e)
            })
            .collect();
        let matrix = (0..self.codomain.rank())
            .map(|i| cols.iter().map(|c| c[i]).collect())
            .collect();
        Ok(Homomorphism { domain: first.domain.clone(), codomain: self.codomain.clone(), matrix })
    }

    /// log_p |image|, via the cokernel of [M | diag(p^{c_i})].
    pub fn log_image_order(&self) -> Result<u32> {
        let p = self.domain.p();
        let k = self.codomain.max_exponent();
        if k == 0 {
            return Ok(0);
        }
        let m = pow_u64(p, k);
        let rows: Vec<Vec<u64>> = self
            .matrix
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut r = row.clone();
                for t in 0..self.codomain.rank() {
                    r.push(if t == i { self.codomain.gen_order(i) % m } else { 0 });
                }
                r
            })
            .collect();
        let coker: u32 = elementary_valuations(&rows, p, k)?.iter().sum();
        Ok(self.codomain.log_order() - coker)
    }

    /// log_p |kernel|.
    pub fn log_kernel_order(&self) -> Result<u32> {
        Ok(self.domain.log_order() - self.log_image_order()?)
    }
}

/// Bilinear pairing C × B → (1/p^m)Z/Z; `matrix[i][j]` = p^m·⟨c_i, b_j⟩.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pairing {
    left: FiniteAbelianPGroup,
    right: FiniteAbelianPGroup,
    m: u32,
    matrix: Vec<Vec<u64>>,
}

impl Pairing {
    /// Entry (i, j) must be divisible by p^{m − min(c_i, s_j)} for the
    /// pairing to be well defined on the given orders.
    pub fn new(left: FiniteAbelianPGroup, right: FiniteAbelianPGroup, m: u32, matrix: Vec<Vec<i64>>) -> Result<Self> {
        let p = left.p();
        if matrix.len() != left.rank() || matrix.iter().any(|r| r.len() != right.rank()) {
            return Err(Error::Schema(format!(
                "pairing matrix must be {}x{} (C rank x B rank)",
                left.rank(),
                right.rank()
            )));
        }
        let modulus = pow_u64(p, m);
        let mut reduced = Vec::with_capacity(matrix.len());
        for (i, row) in matrix.iter().enumerate() {
            let mut out = Vec::with_capacity(row.len());
            for (j, &x) in row.iter().enumerate() {
                let x = x.rem_euclid(modulus as i64) as u64;
                let need = m.saturating_sub(left.exponents()[i].min(right.exponents()[j]));
                if x % pow_u64(p, need) != 0 {
                    return Err(Error::Schema(format!(
                        "pairing entry ({}, {}) = {} must be divisible by {}^{}",
                        i, j, x, p, need
                    )));
                }
                out.push(x);
            }
            reduced.push(out);
        }
        Ok(Pairing { left, right, m, matrix: reduced })
    }

    pub fn left(&self) -> &FiniteAbelianPGroup {
        &self.left
    }

    pub fn right(&self) -> &FiniteAbelianPGroup {
        &self.right
    }

    pub fn level(&self) -> u32 {
        self.m
    }

    pub fn matrix(&self) -> &[Vec<u64>] {
        &self.matrix
    }

    /// p^m·⟨c, b⟩ mod p^m.
    pub fn eval(&self, c: &[u64], b: &[u64]) -> u64 {
        let modulus = pow_u64(self.left.p(), self.m);
        let mut acc = 0u64;
        for (i, row) in self.matrix.iter().enumerate() {
            for (j, &w) in row.iter().enumerate() {
                let t = mulmod(mulmod(w, c[i] % modulus, modulus), b[j] % modulus, modulus);
                acc = (acc + t) % modulus;
            }
        }
        acc
    }

    /// The map C → Hom(B, (1/p^m)Z/Z) ≅ ⊕_j Z/p^{min(s_j, m)}.
    fn adjoint(&self) -> Result<Homomorphism> {
        let p = self.left.p();
        let target: Vec<u32> = self.right.exponents().iter().map(|&s| s.min(self.m)).collect();
        let target_nonzero: Vec<usize> = (0..target.len()).filter(|&j| target[j] > 0).collect();
        let codomain = FiniteAbelianPGroup::new(p, target_nonzero.iter().map(|&j| target[j]).collect())?;
        let matrix = target_nonzero
            .iter()
            .map(|&j| {
                let shift = pow_u64(p, self.m - target[j]);
                (0..self.left.rank()).map(|i| (self.matrix[i][j] / shift) as i64).collect()
            })
            .collect();
        Homomorphism::new(self.left.clone(), codomain, matrix)
    }

    /// Perfect iff C → Hom(B, (1/p^m)Z/Z) is bijective.
    pub fn is_perfect(&self) -> Result<bool> {
        let adj = self.adjoint()?;
        Ok(adj.log_kernel_order()? == 0 && adj.codomain().log_order() == self.left.log_order()
            && self.right.max_exponent() <= self.m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(p: u64, e: &[u32]) -> FiniteAbelianPGroup {
        FiniteAbelianPGroup::new(p, e.to_vec()).unwrap()
    }

    #[test]
    fn well_definedness() {
        // Z/3 → Z/9 must land in 3·Z/9
        assert!(Homomorphism::new(g(3, &[1]), g(3, &[2]), vec![vec![1]]).is_err());
        assert!(Homomorphism::new(g(3, &[1]), g(3, &[2]), vec![vec![3]]).is_ok());
        assert!(Pairing::new(g(3, &[1]), g(3, &[1]), 2, vec![vec![1]]).is_err());
        assert!(Pairing::new(g(3, &[1]), g(3, &[1]), 2, vec![vec![3]]).is_ok());
    }

    #[test]
    fn kernel_orders() {
        // multiplication by 5 on Z/25
        let h = Homomorphism::new(g(5, &[2]), g(5, &[2]), vec![vec![5]]).unwrap();
        assert_eq!(h.log_kernel_order().unwrap(), 1);
        // projection Z/9 ⊕ Z/3 → Z/3
        let h = Homomorphism::new(g(3, &[2, 1]), g(3, &[1]), vec![vec![0, 1]]).unwrap();
        assert_eq!(h.log_kernel_order().unwrap(), 2);
        let h = Homomorphism::zero(g(3, &[2, 1]), FiniteAbelianPGroup::trivial(3));
        assert_eq!(h.log_kernel_order().unwrap(), 3);
    }

    #[test]
    fn kernel_matches_enumeration() {
        let a = g(3, &[2, 1]);
        let c = g(3, &[2, 2]);
        let h = Homomorphism::new(a, c, vec![vec![3, 3], vec![6, 0]]).unwrap();
        let mut count = 0;
        for x in 0..9 {
            for y in 0..3 {
                if h.apply(&[x, y]).iter().all(|&v| v == 0) {
                    count += 1;
                }
            }
        }
        assert_eq!(3u32.pow(h.log_kernel_order().unwrap()), count);
    }

    #[test]
    fn composition() {
        let f = Homomorphism::new(g(5, &[2]), g(5, &[2]), vec![vec![5]]).unwrap();
        let ff = f.compose(&f).unwrap();
        assert_eq!(ff.matrix(), &[vec![0]]);
    }

    #[test]
    fn perfection() {
        let z3 = g(3, &[1]);
        assert!(Pairing::new(z3.clone(), z3.clone(), 1, vec![vec![1]]).unwrap().is_perfect().unwrap());
        assert!(!Pairing::new(z3.clone(), z3.clone(), 1, vec![vec![0]]).unwrap().is_perfect().unwrap());
        let z9 = g(3, &[2]);
        assert!(Pairing::new(z9.clone(), z9.clone(), 2, vec![vec![2]]).unwrap().is_perfect().unwrap());
        assert!(!Pairing::new(z9.clone(), z9, 2, vec![vec![3]]).unwrap().is_perfect().unwrap());
    }
}
