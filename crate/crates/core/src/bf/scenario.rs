//! Synthetic cyclotomic scenarios: for each eigen-level k, the field space
//! A_k = U_k ⊕ Cl[p^m]_k, C_k = (Cl/p^m)_k and B_{−k} dual to C_k, with
//! d = f₂ ∘ f₁ where f₁ forgets the unit part and f₂ models the Bockstein
//! on the class part. Class-group types are inputs.

use num_bigint::BigUint;
use rand::Rng;

use super::{
    bf_sum_bruteforce_bounded, bf_sum_closed_form, BFInstance, FiniteAbelianPGroup, Grading, Homomorphism, Pairing,
};
use crate::error::{Error, Result};
use crate::zmod::pow_u64;

/// Type of Cl[p^∞]_k as exponents of its cyclic factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelData {
    pub k: u64,
    pub class_type: Vec<u32>,
}

/// One level of a scenario with the factor maps kept for inspection.
#[derive(Clone, Debug)]
pub struct ScenarioLevel {
    pub k: u64,
    pub f1: Homomorphism,
    pub f2: Homomorphism,
    pub pairing: Pairing,
}

impl ScenarioLevel {
    pub fn d(&self) -> Homomorphism {
        self.f2.compose(&self.f1).expect("factor maps compose")
    }

    /// The three orders whose product the closed form should equal:
    /// |ker f₂|, |ker f₁| (the unit part), |C_k|.
    pub fn extracted_orders(&self) -> Result<[BigUint; 3]> {
        let p = BigUint::from(self.f1.domain().p());
        Ok([
            p.pow(self.f2.log_kernel_order()?),
            p.pow(self.f1.log_kernel_order()?),
            p.pow(self.f2.codomain().log_order()),
        ])
    }
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub p: u64,
    pub m: u32,
    pub levels: Vec<ScenarioLevel>,
    pub instance: BFInstance,
}

fn random_unit<R: Rng>(rng: &mut R, p: u64, modulus: u64) -> u64 {
    loop {
        let u = rng.gen_range(1..modulus.max(2));
        if u % p != 0 {
            return u % modulus.max(1);
        }
    }
}

/// A random automorphism of ⊕ Z/p^{r_i} as a product of unit scalings and
/// elementary transvections e_j ↦ e_j + s·p^{max(r_i − r_j, 0)}·e_i.
pub fn random_automorphism<R: Rng>(rng: &mut R, g: &FiniteAbelianPGroup, steps: usize) -> Result<Homomorphism> {
    let p = g.p();
    let n = g.rank();
    let r = g.exponents();
    let mut mat: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
    for _ in 0..steps {
        if n == 0 {
            break;
        }
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        let mut e: Vec<Vec<i64>> = (0..n).map(|a| (0..n).map(|b| (a == b) as i64).collect()).collect();
        if i == j {
            e[i][i] = random_unit(rng, p, g.gen_order(i)) as i64;
        } else {
            let scale = pow_u64(p, r[i].saturating_sub(r[j]));
            e[i][j] = (rng.gen_range(0..g.gen_order(i)) * scale % g.gen_order(i)) as i64;
        }
        // mat ← e · mat, entries reduced by row order
        let prod: Vec<Vec<i64>> = (0..n)
            .map(|a| {
                let ord = g.gen_order(a) as i128;
                (0..n)
                    .map(|b| {
                        let s: i128 = (0..n).map(|t| e[a][t] as i128 * mat[t][b] as i128).sum();
                        s.rem_euclid(ord) as i64
                    })
                    .collect()
            })
            .collect();
        mat = prod;
    }
    Homomorphism::new(g.clone(), g.clone(), mat)
}

/// Build the level-k block. With `rng`, the unit/class splitting of A_k is
/// hidden by a random automorphism and the pairing uses random units.
pub fn build_level<R: Rng>(p: u64, m: u32, data: &LevelData, rng: Option<&mut R>) -> Result<ScenarioLevel> {
    let k = data.k % (p - 1);
    component_allowed(k)?;
    if data.class_type.iter().any(|&c| c == 0) {
        return Err(Error::Invalid("class-group factors must be nontrivial".into()));
    }
    let even = k % 2 == 0;
    let torsion: Vec<u32> = data.class_type.iter().map(|&c| c.min(m)).collect();
    let mut a_exp = Vec::new();
    if even {
        a_exp.push(m);
    }
    a_exp.extend_from_slice(&torsion);
    let a = FiniteAbelianPGroup::new(p, a_exp)?;
    let cl_tors = FiniteAbelianPGroup::new(p, torsion.clone())?;
    let c = FiniteAbelianPGroup::new(p, torsion.clone())?;
    let b = c.clone();
    let offset = even as usize;
    let f1_mat: Vec<Vec<i64>> = (0..torsion.len())
        .map(|i| (0..a.rank()).map(|j| (j == i + offset) as i64).collect())
        .collect();
    let mut f1 = Homomorphism::new(a.clone(), cl_tors.clone(), f1_mat)?;
    let f2_mat: Vec<Vec<i64>> = (0..torsion.len())
        .map(|i| {
            (0..torsion.len())
                .map(|j| {
                    if i == j {
                        let e = data.class_type[i].saturating_sub(m);
                        (pow_u64(p, e.min(torsion[i])) % pow_u64(p, torsion[i])) as i64
                    } else {
                        0
                    }
                })
                .collect()
        })
        .collect();
    let f2 = Homomorphism::new(cl_tors, c.clone(), f2_mat)?;
    let mut units = vec![1u64; torsion.len()];
    if let Some(rng) = rng {
        let aut = random_automorphism(rng, &a, 4 * a.rank())?;
        f1 = f1.compose(&aut)?;
        for (i, u) in units.iter_mut().enumerate() {
            *u = random_unit(rng, p, pow_u64(p, torsion[i]));
        }
    }
    let w: Vec<Vec<i64>> = (0..torsion.len())
        .map(|i| {
            (0..torsion.len())
                .map(|j| if i == j { (pow_u64(p, m - torsion[i]) * units[i]) as i64 } else { 0 })
                .collect()
        })
        .collect();
    let pairing = Pairing::new(c, b, m, w)?;
    Ok(ScenarioLevel { k, f1, f2, pairing })
}

fn component_allowed(k: u64) -> Result<()> {
    // k is already reduced mod p−1
    if k == 1 {
        return Err(Error::ExcludedComponent { k: k as i64 });
    }
    Ok(())
}

fn block_diag(blocks: &[&[Vec<u64>]], rows: &[usize], cols: &[usize]) -> Vec<Vec<i64>> {
    let nr: usize = rows.iter().sum();
    let nc: usize = cols.iter().sum();
    let mut out = vec![vec![0i64; nc]; nr];
    let (mut r0, mut c0) = (0, 0);
    for (b, blk) in blocks.iter().enumerate() {
        for (i, row) in blk.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                out[r0 + i][c0 + j] = x as i64;
            }
        }
        r0 += rows[b];
        c0 += cols[b];
    }
    out
}

/// Graded instance assembling the given levels. B_{−k} carries grading −k.
pub fn cyclotomic_scenario<R: Rng>(p: u64, m: u32, data: &[LevelData], mut rng: Option<&mut R>) -> Result<Scenario> {
    let levels: Vec<ScenarioLevel> = data
        .iter()
        .map(|d| build_level(p, m, d, rng.as_deref_mut()))
        .collect::<Result<_>>()?;
    let sum_groups = |f: &dyn Fn(&ScenarioLevel) -> FiniteAbelianPGroup| {
        levels.iter().fold(FiniteAbelianPGroup::trivial(p), |acc, l| acc.sum(&f(l)))
    };
    let a = sum_groups(&|l| l.f1.domain().clone());
    let c = sum_groups(&|l| l.f2.codomain().clone());
    let b = sum_groups(&|l| l.pairing.right().clone());
    let ds: Vec<Homomorphism> = levels.iter().map(|l| l.d()).collect();
    let d_blocks: Vec<&[Vec<u64>]> = ds.iter().map(|d| d.matrix()).collect();
    let c_ranks: Vec<usize> = levels.iter().map(|l| l.f2.codomain().rank()).collect();
    let a_ranks: Vec<usize> = levels.iter().map(|l| l.f1.domain().rank()).collect();
    let b_ranks: Vec<usize> = levels.iter().map(|l| l.pairing.right().rank()).collect();
    let d = Homomorphism::new(a, c.clone(), block_diag(&d_blocks, &c_ranks, &a_ranks))?;
    let w_blocks: Vec<&[Vec<u64>]> = levels.iter().map(|l| l.pairing.matrix()).collect();
    let pairing = Pairing::new(c, b, m, block_diag(&w_blocks, &c_ranks, &b_ranks))?;
    let modulus = p - 1;
    let mut grading = Grading { a: Vec::new(), b: Vec::new(), c: Vec::new() };
    for l in &levels {
        grading.a.extend(std::iter::repeat(l.k).take(l.f1.domain().rank()));
        grading.c.extend(std::iter::repeat(l.k).take(l.f2.codomain().rank()));
        grading.b.extend(std::iter::repeat((modulus - l.k) % modulus).take(l.pairing.right().rank()));
    }
    let instance = BFInstance::new(d, pairing, Some(grading))?;
    Ok(Scenario { p, m, levels, instance })
}

/// Path-integral values over m = 1..=m_max for one level, by the closed
/// form and, when small enough, also by enumeration (which must agree).
pub fn level_sum_sequence(p: u64, k: u64, class_type: &[u32], m_max: u32, bound: u128) -> Result<Vec<BigUint>> {
    (1..=m_max)
        .map(|m| {
            let data = LevelData { k, class_type: class_type.to_vec() };
            let sc = cyclotomic_scenario::<rand_chacha::ChaCha8Rng>(p, m, &[data], None)?;
            let closed = bf_sum_closed_form(&sc.instance)?;
            match bf_sum_bruteforce_bounded(&sc.instance, bound) {
                Ok(brute) if brute != closed => Err(Error::Invalid(format!(
                    "enumeration {} disagrees with closed form {} at m = {}",
                    brute, closed, m
                ))),
                _ => Ok(closed),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bf::{bf_sum_bruteforce, graded_bf_sum, prop21_product, SumMethod};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn closed_form_matches_prop21() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let data = [
            LevelData { k: 3, class_type: vec![1] },
            LevelData { k: 2, class_type: vec![] },
            LevelData { k: 0, class_type: vec![2] },
        ];
        let sc = cyclotomic_scenario(5, 2, &data, Some(&mut rng)).unwrap();
        for l in &sc.levels {
            let part = sc.instance.level_part(l.k).unwrap();
            let [a, b, c] = l.extracted_orders().unwrap();
            let expect = prop21_product(5, [&a, &b, &c]).unwrap();
            assert_eq!(bf_sum_closed_form(&part).unwrap(), expect, "k = {}", l.k);
        }
        let s = graded_bf_sum(&sc.instance, SumMethod::ClosedForm).unwrap();
        assert!(s.splits());
    }

    #[test]
    fn odd_level_sum_is_class_order_for_large_m() {
        // Z/p^2 at level 3: sum_m = p^{min(c,2m)}
        let seq = level_sum_sequence(5, 3, &[2], 4, 1 << 22).unwrap();
        let want: Vec<BigUint> = [25u32, 25, 25, 25].iter().map(|&x| BigUint::from(x)).collect();
        assert_eq!(seq, want);
        let seq = level_sum_sequence(3, 0, &[], 3, 1 << 22).unwrap();
        assert_eq!(seq, vec![BigUint::from(3u32), BigUint::from(9u32), BigUint::from(27u32)]);
    }

    #[test]
    fn excluded_level_rejected() {
        let data = [LevelData { k: 1, class_type: vec![] }];
        assert!(cyclotomic_scenario::<ChaCha8Rng>(5, 1, &data, None).is_err());
    }

    #[test]
    fn scrambled_scenario_enumerates_consistently() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let data = [LevelData { k: 3, class_type: vec![1, 2] }];
        let sc = cyclotomic_scenario(3, 1, &[LevelData { k: 0, class_type: vec![1] }], Some(&mut rng)).unwrap();
        assert_eq!(bf_sum_bruteforce(&sc.instance).unwrap(), bf_sum_closed_form(&sc.instance).unwrap());
        let sc = cyclotomic_scenario(5, 2, &data, Some(&mut rng)).unwrap();
        assert_eq!(bf_sum_bruteforce(&sc.instance).unwrap(), bf_sum_closed_form(&sc.instance).unwrap());
    }
}
