//! Exponential sums Σ exp(2πi·⟨d(a), b⟩) over finite abelian p-groups.
//!
//! An instance is A →d C paired with B into (1/p^m)Z/Z. The brute-force
//! evaluator tallies phases and reduces in Z[x]/Φ_{p^m}(x); the closed form
//! is |ker(pairing ∘ d)|·|B| from a Smith normal form.

pub mod group;
pub mod random;
pub mod scenario;
pub mod schema;
pub mod snf;

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::{One, Zero};

pub use group::{FiniteAbelianPGroup, Homomorphism, Pairing};
use snf::elementary_valuations;

use crate::error::{Error, Result};
use crate::zmod::{mulmod, pow_u64};

/// Default cap on |A|·|B| for enumeration.
pub const DEFAULT_ENUMERATION_BOUND: u128 = 1 << 22;

/// Eigen-levels (mod p−1) of the generators of A, B and C.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grading {
    pub a: Vec<u64>,
    pub b: Vec<u64>,
    pub c: Vec<u64>,
}

#[derive(Clone, Debug)]
pub struct BFInstance {
    a: FiniteAbelianPGroup,
    b: FiniteAbelianPGroup,
    c: FiniteAbelianPGroup,
    d: Homomorphism,
    pairing: Pairing,
    grading: Option<Grading>,
}

/// exp(2πi·c/p^m).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Phase {
    pub m: u32,
    pub c: u64,
}

impl BFInstance {
    pub fn new(d: Homomorphism, pairing: Pairing, grading: Option<Grading>) -> Result<Self> {
        if d.codomain() != pairing.left() {
            return Err(Error::Schema("codomain of d must be the left factor of the pairing".into()));
        }
        let inst = BFInstance {
            a: d.domain().clone(),
            b: pairing.right().clone(),
            c: d.codomain().clone(),
            d,
            pairing,
            grading,
        };
        if let Some(g) = &inst.grading {
            inst.check_grading(g)?;
        }
        Ok(inst)
    }

    fn check_grading(&self, g: &Grading) -> Result<()> {
        let p = self.p();
        if g.a.len() != self.a.rank() || g.b.len() != self.b.rank() || g.c.len() != self.c.rank() {
            return Err(Error::Schema("grading must list one level per generator".into()));
        }
        let modulus = p - 1;
        for (i, row) in self.d.matrix().iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                if x != 0 && g.c[i] % modulus != g.a[j] % modulus {
                    return Err(Error::EquivarianceViolation(format!(
                        "d sends level {} to level {} (entry {}, {})",
                        g.a[j], g.c[i], i, j
                    )));
                }
            }
        }
        for (i, row) in self.pairing.matrix().iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                if x != 0 && (g.c[i] + g.b[j]) % modulus != 0 {
                    return Err(Error::EquivarianceViolation(format!(
                        "pairing couples levels {} and {} (entry {}, {})",
                        g.c[i], g.b[j], i, j
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn p(&self) -> u64 {
        self.a.p()
    }

    pub fn m(&self) -> u32 {
        self.pairing.level()
    }

    pub fn a(&self) -> &FiniteAbelianPGroup {
        &self.a
    }

    pub fn b(&self) -> &FiniteAbelianPGroup {
        &self.b
    }

    pub fn c(&self) -> &FiniteAbelianPGroup {
        &self.c
    }

    pub fn d(&self) -> &Homomorphism {
        &self.d
    }

    pub fn pairing(&self) -> &Pairing {
        &self.pairing
    }

    pub fn grading(&self) -> Option<&Grading> {
        self.grading.as_ref()
    }

    /// |A|·|B| if it fits.
    pub fn pair_count(&self) -> Option<u128> {
        self.a.order()?.checked_mul(self.b.order()?)
    }

    /// Matrix of a ↦ (p^m·⟨d(a), b_j⟩)_j over Z/p^m.
    fn composite(&self) -> Vec<Vec<u64>> {
        let modulus = pow_u64(self.p(), self.m());
        let w = self.pairing.matrix();
        let d = self.d.matrix();
        (0..self.b.rank())
            .map(|j| {
                (0..self.a.rank())
                    .map(|l| {
                        (0..self.c.rank()).fold(0u64, |acc, i| {
                            (acc + mulmod(w[i][j] % modulus, d[i][l] % modulus, modulus)) % modulus
                        })
                    })
                    .collect()
            })
            .collect()
    }

    /// Restriction to A_k, C_k and B_{−k}.
    pub fn level_part(&self, k: u64) -> Result<BFInstance> {
        let g = self.grading.as_ref().ok_or_else(|| Error::Invalid("instance is not graded".into()))?;
        let modulus = self.p() - 1;
        let k = k % modulus;
        let pick = |levels: &[u64], want: u64| -> Vec<usize> {
            (0..levels.len()).filter(|&i| levels[i] % modulus == want).collect()
        };
        let ia = pick(&g.a, k);
        let ic = pick(&g.c, k);
        let ib = pick(&g.b, (modulus - k) % modulus);
        let a = self.a.select(&ia);
        let c = self.c.select(&ic);
        let b = self.b.select(&ib);
        let dm = ic.iter().map(|&i| ia.iter().map(|&j| self.d.matrix()[i][j] as i64).collect()).collect();
        let wm = ic.iter().map(|&i| ib.iter().map(|&j| self.pairing.matrix()[i][j] as i64).collect()).collect();
        let d = Homomorphism::new(a, c.clone(), dm)?;
        let pairing = Pairing::new(c, b, self.m(), wm)?;
        let grading = Grading { a: vec![k; ia.len()], b: vec![(modulus - k) % modulus; ib.len()], c: vec![k; ic.len()] };
        BFInstance::new(d, pairing, Some(grading))
    }

    /// Levels k carrying any part of A, C or B_{−k}.
    pub fn levels(&self) -> Vec<u64> {
        let modulus = self.p() - 1;
        let mut out = BTreeSet::new();
        if let Some(g) = &self.grading {
            out.extend(g.a.iter().map(|x| x % modulus));
            out.extend(g.c.iter().map(|x| x % modulus));
            out.extend(g.b.iter().map(|x| (modulus - x % modulus) % modulus));
        }
        out.into_iter().collect()
    }
}

/// Visit every element of a group in lexicographic coordinate order.
fn for_each_element(g: &FiniteAbelianPGroup, mut f: impl FnMut(&[u64])) {
    let orders: Vec<u64> = (0..g.rank()).map(|i| g.gen_order(i)).collect();
    let mut x = vec![0u64; g.rank()];
    loop {
        f(&x);
        let mut j = 0;
        loop {
            if j == x.len() {
                return;
            }
            x[j] += 1;
            if x[j] < orders[j] {
                break;
            }
            x[j] = 0;
            j += 1;
        }
    }
}

pub fn bf_value(inst: &BFInstance, a: &[u64], b: &[u64]) -> Result<Phase> {
    inst.a.check_element(a)?;
    inst.b.check_element(b)?;
    let da = inst.d.apply(a);
    Ok(Phase { m: inst.m(), c: inst.pairing.eval(&da, b) })
}

/// Counts N_c of pairs with phase c, c ∈ [0, p^m).
pub fn phase_tally(inst: &BFInstance, bound: u128) -> Result<Vec<u64>> {
    let pairs = inst.pair_count().unwrap_or(u128::MAX);
    if pairs > bound {
        return Err(Error::EnumerationBound { pairs, bound });
    }
    let modulus = pow_u64(inst.p(), inst.m());
    let b_orders: Vec<u64> = (0..inst.b.rank()).map(|j| inst.b.gen_order(j)).collect();
    let mut tally = vec![0u64; modulus as usize];
    let e = inst.composite();
    for_each_element(&inst.a, |a| {
        // phase(b) = Σ_j v_j b_j
        let v: Vec<u64> = e
            .iter()
            .map(|row| row.iter().zip(a).fold(0u64, |s, (&x, &y)| (s + mulmod(x, y % modulus, modulus)) % modulus))
            .collect();
        let wrap: Vec<u64> = v.iter().zip(&b_orders).map(|(&vj, &o)| mulmod(vj, o % modulus, modulus)).collect();
        let mut b = vec![0u64; b_orders.len()];
        let mut phase = 0u64;
        'outer: loop {
            tally[phase as usize] += 1;
            let mut j = 0;
            loop {
                if j == b.len() {
                    break 'outer;
                }
                b[j] += 1;
                phase = (phase + v[j]) % modulus;
                if b[j] < b_orders[j] {
                    break;
                }
                b[j] = 0;
                phase = (phase + modulus - wrap[j]) % modulus;
                j += 1;
            }
        }
    });
    Ok(tally)
}

/// Σ N_c·x^c reduced mod Φ_{p^m}(x); the remainder must be constant.
pub fn reduce_cyclotomic(tally: &[u64], p: u64, m: u32) -> Result<i128> {
    let q = pow_u64(p, m) as usize;
    let step = pow_u64(p, m - 1) as usize;
    let deg = q - step;
    let mut poly: Vec<i128> = tally.iter().map(|&x| x as i128).collect();
    poly.resize(q, 0);
    // x^{deg} ≡ −Σ_{i=0}^{p−2} x^{i·step}
    for c in (deg..q).rev() {
        let t = poly[c];
        if t == 0 {
            continue;
        }
        poly[c] = 0;
        let base = c - deg;
        for i in 0..(p as usize - 1) {
            poly[base + i * step] -= t;
        }
    }
    if poly[1..].iter().any(|&x| x != 0) {
        return Err(Error::NonIntegerSum);
    }
    Ok(poly[0])
}

pub fn bf_sum_bruteforce(inst: &BFInstance) -> Result<BigUint> {
    bf_sum_bruteforce_bounded(inst, DEFAULT_ENUMERATION_BOUND)
}

pub fn bf_sum_bruteforce_bounded(inst: &BFInstance, bound: u128) -> Result<BigUint> {
    let tally = phase_tally(inst, bound)?;
    let s = reduce_cyclotomic(&tally, inst.p(), inst.m())?;
    BigUint::try_from(s).map_err(|_| Error::NonIntegerSum)
}

/// log_p of |{a : ⟨d(a), ·⟩ = 0}|.
pub fn log_pairing_kernel(inst: &BFInstance) -> Result<u32> {
    let e = inst.composite();
    let vals = elementary_valuations(&e, inst.p(), inst.m())?;
    let image: u32 = vals.iter().map(|&v| inst.m() - v).sum();
    Ok(inst.a.log_order() - image)
}

pub fn bf_sum_closed_form(inst: &BFInstance) -> Result<BigUint> {
    let log = log_pairing_kernel(inst)? + inst.b.log_order();
    Ok(BigUint::from(inst.p()).pow(log))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SumMethod {
    BruteForce { bound: u128 },
    ClosedForm,
}

fn sum_with(inst: &BFInstance, method: SumMethod) -> Result<BigUint> {
    match method {
        SumMethod::BruteForce { bound } => bf_sum_bruteforce_bounded(inst, bound),
        SumMethod::ClosedForm => bf_sum_closed_form(inst),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSum {
    pub per_level: BTreeMap<u64, BigUint>,
    pub total: BigUint,
    pub product: BigUint,
}

impl GradedSum {
    pub fn splits(&self) -> bool {
        self.total == self.product
    }
}

pub fn graded_bf_sum(inst: &BFInstance, method: SumMethod) -> Result<GradedSum> {
    if inst.grading.is_none() {
        return Err(Error::Invalid("instance is not graded".into()));
    }
    let mut per_level = BTreeMap::new();
    let mut product = BigUint::one();
    for k in inst.levels() {
        let s = sum_with(&inst.level_part(k)?, method)?;
        product *= &s;
        per_level.insert(k, s);
    }
    let total = sum_with(inst, method)?;
    Ok(GradedSum { per_level, total, product })
}

/// log_p n, if n is a power of p.
pub fn p_power_log(n: &BigUint, p: u64) -> Option<u32> {
    if n.is_zero() {
        return None;
    }
    let pb = BigUint::from(p);
    let mut x = n.clone();
    let mut e = 0;
    while !x.is_one() {
        if !(&x % &pb).is_zero() {
            return None;
        }
        x /= &pb;
        e += 1;
    }
    Some(e)
}

/// |(p^m·Cl[p^{2m}])_k| · |(units mod p^m)_k| · |(Cl/p^m)_k|.
pub fn prop21_product(p: u64, orders: [&BigUint; 3]) -> Result<BigUint> {
    let mut out = BigUint::one();
    for o in orders {
        if p_power_log(o, p).is_none() {
            return Err(Error::NotPPower(o.to_string()));
        }
        out *= o;
    }
    Ok(out)
}

/// |(O^×/(O^×)^{p^m})_k|: trivial for odd k, cyclic of order p^m for even k.
pub fn unit_eigenspace_order(k: i64, m: u32, p: u64) -> Result<BigUint> {
    let r = k.rem_euclid(p as i64 - 1);
    if r == 1 % (p as i64 - 1) {
        return Err(Error::ExcludedComponent { k });
    }
    Ok(if r % 2 == 0 { BigUint::from(p).pow(m) } else { BigUint::one() })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StabilizationMode {
    /// Odd k: the sums themselves settle.
    Plain,
    /// Even k: the sums divided by p^m settle.
    Divided,
}

/// Number of trailing equal values that counts as stable.
pub const STABLE_WINDOW: usize = 3;

/// Eventual value of a sequence indexed by m = first_m, first_m + 1, ….
pub fn stabilization_limit(values: &[BigUint], first_m: u32, p: u64, mode: StabilizationMode) -> Result<BigUint> {
    if values.len() < STABLE_WINDOW {
        return Err(Error::NotStabilized);
    }
    let mut adjusted = Vec::with_capacity(values.len());
    for (i, v) in values.iter().enumerate() {
        match mode {
            StabilizationMode::Plain => adjusted.push(v.clone()),
            StabilizationMode::Divided => {
                let d = BigUint::from(p).pow(first_m + i as u32);
                if !(v % &d).is_zero() {
                    return Err(Error::NotStabilized);
                }
                adjusted.push(v / d);
            }
        }
    }
    let tail = &adjusted[adjusted.len() - STABLE_WINDOW..];
    if tail.iter().all(|x| x == &tail[0]) {
        Ok(tail[0].clone())
    } else {
        Err(Error::NotStabilized)
    }
}
