//! Seeded random BF instances for oracle cross-checks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::scenario::random_automorphism;
use super::{bf_sum_bruteforce_bounded, bf_sum_closed_form, BFInstance, FiniteAbelianPGroup, Grading, Homomorphism, Pairing};
use crate::error::Result;
use crate::zmod::pow_u64;

#[derive(Clone, Debug)]
pub struct RandomParams {
    pub primes: Vec<u64>,
    pub max_m: u32,
    pub max_rank: usize,
    /// Cap on |A|·|B|.
    pub bound: u128,
}

impl Default for RandomParams {
    fn default() -> Self {
        RandomParams { primes: vec![3, 5, 7], max_m: 3, max_rank: 3, bound: 1 << 22 }
    }
}

fn random_group<R: Rng>(rng: &mut R, p: u64, max_rank: usize, max_exp: u32) -> FiniteAbelianPGroup {
    let rank = rng.gen_range(0..=max_rank);
    let exps = (0..rank).map(|_| rng.gen_range(1..=max_exp)).collect();
    FiniteAbelianPGroup::new(p, exps).expect("valid exponents")
}

/// Random well-defined map: entry (i, j) is a random multiple of
/// p^{max(c_i − r_j, 0)}, occasionally forced to zero.
fn random_map<R: Rng>(rng: &mut R, a: &FiniteAbelianPGroup, c: &FiniteAbelianPGroup) -> Vec<Vec<i64>> {
    let p = a.p();
    (0..c.rank())
        .map(|i| {
            (0..a.rank())
                .map(|j| {
                    if rng.gen_bool(0.2) {
                        return 0;
                    }
                    let step = pow_u64(p, c.exponents()[i].saturating_sub(a.exponents()[j]));
                    let order = c.gen_order(i);
                    (rng.gen_range(0..order / step) * step) as i64
                })
                .collect()
        })
        .collect()
}

fn random_pairing_matrix<R: Rng>(rng: &mut R, c: &FiniteAbelianPGroup, b: &FiniteAbelianPGroup, m: u32) -> Vec<Vec<i64>> {
    let p = c.p();
    let modulus = pow_u64(p, m);
    (0..c.rank())
        .map(|i| {
            (0..b.rank())
                .map(|j| {
                    if rng.gen_bool(0.2) {
                        return 0;
                    }
                    let need = m.saturating_sub(c.exponents()[i].min(b.exponents()[j]));
                    let step = pow_u64(p, need);
                    (rng.gen_range(0..modulus / step) * step) as i64
                })
                .collect()
        })
        .collect()
}

/// A perfect pairing C × B with B ≅ C and all exponents ≤ m: a diagonal
/// p^{m−c_i}·unit pairing twisted by a random automorphism of B.
fn random_perfect<R: Rng>(rng: &mut R, c: &FiniteAbelianPGroup, m: u32) -> Result<Pairing> {
    let p = c.p();
    let b = c.clone();
    let diag: Vec<Vec<i64>> = (0..c.rank())
        .map(|i| {
            (0..c.rank())
                .map(|j| {
                    if i != j {
                        return 0;
                    }
                    let order = c.gen_order(i);
                    let u = loop {
                        let u = rng.gen_range(1..order.max(2));
                        if u % p != 0 {
                            break u;
                        }
                    };
                    (pow_u64(p, m - c.exponents()[i]) * u) as i64
                })
                .collect()
        })
        .collect();
    let aut = random_automorphism(rng, &b, 2 * b.rank())?;
    // ⟨c, aut(b)⟩: W' = W · aut
    let modulus = pow_u64(p, m) as i128;
    let w: Vec<Vec<i64>> = (0..c.rank())
        .map(|i| {
            (0..b.rank())
                .map(|j| {
                    let s: i128 = (0..b.rank())
                        .map(|t| diag[i][t] as i128 * aut.matrix()[t][j] as i128)
                        .sum();
                    s.rem_euclid(modulus) as i64
                })
                .collect()
        })
        .collect();
    Pairing::new(c.clone(), b, m, w)
}

/// A random ungraded instance; returns it with whether its pairing was
/// built perfect.
pub fn random_instance<R: Rng>(rng: &mut R, params: &RandomParams) -> Result<(BFInstance, bool)> {
    loop {
        let p = *params.primes.choose(rng).expect("at least one prime");
        let m = rng.gen_range(1..=params.max_m);
        let perfect = rng.gen_bool(0.5);
        let a = random_group(rng, p, params.max_rank, m + 1);
        let (c, pairing) = if perfect {
            let c = random_group(rng, p, params.max_rank, m);
            let pr = random_perfect(rng, &c, m)?;
            (c, pr)
        } else {
            let c = random_group(rng, p, params.max_rank, m + 1);
            let b = random_group(rng, p, params.max_rank, m + 1);
            let w = random_pairing_matrix(rng, &c, &b, m);
            (c.clone(), Pairing::new(c, b, m, w)?)
        };
        let fits = a
            .order()
            .zip(pairing.right().order())
            .and_then(|(x, y)| x.checked_mul(y))
            .is_some_and(|n| n <= params.bound);
        if !fits {
            continue;
        }
        let d = Homomorphism::new(a.clone(), c, random_map(rng, &a, pairing.left()))?;
        return Ok((BFInstance::new(d, pairing, None)?, perfect));
    }
}

/// A random graded instance: every generator gets a level mod p−1, d only
/// links equal levels and the pairing only links C_k with B_{−k}.
pub fn random_graded_instance<R: Rng>(rng: &mut R, params: &RandomParams) -> Result<BFInstance> {
    loop {
        let p = *params.primes.choose(rng).expect("at least one prime");
        let m = rng.gen_range(1..=params.max_m);
        let levels = p - 1;
        let a = random_group(rng, p, params.max_rank + 1, m + 1);
        let c = random_group(rng, p, params.max_rank + 1, m + 1);
        let b = random_group(rng, p, params.max_rank + 1, m + 1);
        let fits = a
            .order()
            .zip(b.order())
            .and_then(|(x, y)| x.checked_mul(y))
            .is_some_and(|n| n <= params.bound);
        if !fits {
            continue;
        }
        let mut lv = |n: usize| -> Vec<u64> { (0..n).map(|_| rng.gen_range(0..levels)).collect() };
        let grading = Grading { a: lv(a.rank()), b: lv(b.rank()), c: lv(c.rank()) };
        let mut dm = random_map(rng, &a, &c);
        for (i, row) in dm.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                if grading.c[i] != grading.a[j] {
                    *x = 0;
                }
            }
        }
        let mut wm = random_pairing_matrix(rng, &c, &b, m);
        for (i, row) in wm.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                if (grading.c[i] + grading.b[j]) % levels != 0 {
                    *x = 0;
                }
            }
        }
        let d = Homomorphism::new(a, c.clone(), dm)?;
        let pairing = Pairing::new(c, b, m, wm)?;
        return BFInstance::new(d, pairing, Some(grading));
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleCase {
    pub index: usize,
    pub p: u64,
    pub m: u32,
    pub perfect: bool,
    pub pairs: String,
    pub brute_force: String,
    pub closed_form: String,
    pub agree: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleRun {
    pub seed: u64,
    pub count: usize,
    pub agreements: usize,
    pub perfect: usize,
    pub cases: Vec<OracleCase>,
}

/// Brute force against closed form on `count` instances drawn from a
/// ChaCha8 stream seeded with `seed`. A non-integral brute-force sum is an
/// error.
pub fn oracle_run(seed: u64, count: usize, params: &RandomParams) -> Result<OracleRun> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = Vec::with_capacity(count);
    for index in 0..count {
        let (inst, perfect) = random_instance(&mut rng, params)?;
        let brute = bf_sum_bruteforce_bounded(&inst, params.bound)?;
        let closed = bf_sum_closed_form(&inst)?;
        cases.push(OracleCase {
            index,
            p: inst.p(),
            m: inst.m(),
            perfect,
            pairs: inst.pair_count().map_or("overflow".into(), |n| n.to_string()),
            agree: brute == closed,
            brute_force: brute.to_string(),
            closed_form: closed.to_string(),
        });
    }
    Ok(OracleRun {
        seed,
        count,
        agreements: cases.iter().filter(|c| c.agree).count(),
        perfect: cases.iter().filter(|c| c.perfect).count(),
        cases,
    })
}
