//! Cohomological-field-theory identities for `Ω`, checked against the
//! brute-force counts.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::{CorrelatorKey, Theory};
use crate::algebra::ClassVector;
use crate::error::Result;
use crate::group::GroupTable;
use crate::scalar::{format_rational, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CohftOptions {
    pub max_genus: u32,
    pub max_points: usize,
    /// Number of randomized keys for the invariance and string checks.
    pub random_keys: usize,
    pub seed: u64,
}

impl Default for CohftOptions {
    fn default() -> Self {
        CohftOptions {
            max_genus: 2,
            max_points: 4,
            random_keys: 64,
            seed: 0,
        }
    }
}

/// Outcome of one family of identities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub checked: usize,
    pub failures: Vec<String>,
}

impl IdentityCheck {
    fn new(name: &'static str) -> Self {
        IdentityCheck {
            name,
            checked: 0,
            failures: Vec::new(),
        }
    }

    fn expect_eq(&mut self, lhs: &Rational, rhs: &Rational, what: impl FnOnce() -> String) {
        self.checked += 1;
        if lhs != rhs {
            self.failures.push(format!(
                "{}: {} != {}",
                what(),
                format_rational(lhs),
                format_rational(rhs)
            ));
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({"name": self.name, "checked": self.checked, "failures": self.failures})
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CohftReport {
    pub checks: Vec<IdentityCheck>,
}

impl CohftReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(IdentityCheck::passed)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "passed": self.passed(),
            "checks": self.checks.iter().map(IdentityCheck::to_json).collect::<Vec<_>>(),
        })
    }
}

/// Sorted multisets of size `n` drawn from `0..r`.
pub(crate) fn multisets(r: usize, n: usize) -> Vec<Vec<usize>> {
    fn rec(r: usize, n: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for k in start..r {
            cur.push(k);
            rec(r, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(r, n, 0, &mut Vec::with_capacity(n), &mut out);
    out
}

struct Oracle<'a> {
    theory: &'a Theory,
    cache: HashMap<(u32, Vec<usize>), Rational>,
}

impl Oracle<'_> {
    fn omega(&mut self, genus: u32, classes: &[usize]) -> Result<Rational> {
        let mut key = classes.to_vec();
        key.sort_unstable();
        if let Some(v) = self.cache.get(&(genus, key.clone())) {
            return Ok(v.clone());
        }
        let v = self.theory.omega_bruteforce(genus, classes)?;
        self.cache.insert((genus, key), v.clone());
        Ok(v)
    }
}

impl Theory {
    /// Oracle agreement, cutting trees, cutting loops, forgetting tails,
    /// invariance, the string equation and the genus-0 three-point values.
    pub fn cohft_check(&self, opts: &CohftOptions) -> Result<CohftReport> {
        let r = self.num_classes();
        let cd = self.algebra.conjugacy().clone();
        let eta_inv = |z: usize| BigInt::from(cd.class_centralizer(z));
        let mut oracle = Oracle {
            theory: self,
            cache: HashMap::new(),
        };
        let mut agree = IdentityCheck::new("oracle-agreement");
        let mut trees = IdentityCheck::new("cutting-trees");
        let mut loops = IdentityCheck::new("cutting-loops");
        let mut tails = IdentityCheck::new("forgetting-tails");
        for genus in 0..=opts.max_genus {
            for n in 0..=opts.max_points {
                for classes in multisets(r, n) {
                    let bf = oracle.omega(genus, &classes)?;
                    let rec = self.omega(genus, &classes)?;
                    agree.expect_eq(&rec, &bf, || format!("g={genus} {classes:?}"));

                    let mut with_one = vec![0];
                    with_one.extend(&classes);
                    let tail = oracle.omega(genus, &with_one)?;
                    tails.expect_eq(&tail, &bf, || format!("g={genus} {classes:?}"));

                    if genus > 0 {
                        let mut sum = Rational::zero();
                        for z in 0..r {
                            let mut c = vec![z, cd.inverse_class[z]];
                            c.extend(&classes);
                            sum += oracle.omega(genus - 1, &c)? * eta_inv(z);
                        }
                        loops.expect_eq(&sum, &bf, || format!("g={genus} {classes:?}"));
                    }

                    for g1 in 0..=genus {
                        for mask in 0u32..(1 << n) {
                            let (mut left, mut right) = (Vec::new(), Vec::new());
                            for (i, &c) in classes.iter().enumerate() {
                                if mask >> i & 1 == 1 {
                                    left.push(c);
                                } else {
                                    right.push(c);
                                }
                            }
                            let mut sum = Rational::zero();
                            for z in 0..r {
                                let mut l = left.clone();
                                l.push(z);
                                let lv = oracle.omega(g1, &l)?;
                                if lv.is_zero() {
                                    continue;
                                }
                                let mut rr = vec![cd.inverse_class[z]];
                                rr.extend(&right);
                                sum += lv * oracle.omega(genus - g1, &rr)? * eta_inv(z);
                            }
                            trees.expect_eq(&sum, &bf, || {
                                format!("g={genus} {classes:?} split g1={g1} {left:?}|{right:?}")
                            });
                        }
                    }
                }
            }
        }

        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let mut invariance = IdentityCheck::new("invariance");
        let mut string = IdentityCheck::new("string-equation");
        let order = self.group.order();
        for _ in 0..opts.random_keys {
            let genus = rng.random_range(0..=opts.max_genus);
            let n = rng.random_range(0..=opts.max_points);
            let elems: Vec<usize> = (0..n).map(|_| rng.random_range(0..order)).collect();
            let classes: Vec<usize> = elems.iter().map(|&x| cd.class_of[x]).collect();
            let conjugated: Vec<usize> = elems
                .iter()
                .map(|&x| cd.class_of[self.group.conjugate(rng.random_range(0..order), x)])
                .collect();
            let mut shuffled = conjugated.clone();
            shuffled.shuffle(&mut rng);
            let base = self.omega_bruteforce(genus, &classes)?;
            let moved = self.omega_bruteforce(genus, &shuffled)?;
            invariance.expect_eq(&moved, &base, || format!("g={genus} {classes:?} vs {shuffled:?}"));

            // string equation on a random stable key satisfying the dimension rule
            let m = n.max(1);
            if !super::is_stable(genus, m) {
                continue;
            }
            let total = 3 * genus as i64 - 3 + m as i64 + 1;
            if total < 0 {
                continue;
            }
            let mut levels = vec![0u32; m];
            for _ in 0..total {
                let i = rng.random_range(0..m);
                levels[i] += 1;
            }
            let ins: Vec<(u32, usize)> = levels
                .iter()
                .enumerate()
                .map(|(i, &a)| (a, classes.get(i).copied().unwrap_or(0)))
                .collect();
            let mut with_unit = vec![(0u32, 0usize)];
            with_unit.extend(&ins);
            let lhs = self.correlator(&CorrelatorKey::new(genus, with_unit))?;
            let mut rhs = Rational::zero();
            for j in 0..m {
                if ins[j].0 == 0 {
                    continue;
                }
                let mut lowered = ins.clone();
                lowered[j].0 -= 1;
                rhs += self.correlator(&CorrelatorKey::new(genus, lowered))?;
            }
            string.expect_eq(&lhs, &rhs, || format!("g={genus} {ins:?}"));
        }

        let mut three = IdentityCheck::new("three-point");
        for i in 0..r {
            for j in 0..r {
                let eta = self.algebra.metric_entry(i, j);
                let unit = oracle.omega(0, &[0, i, j])?;
                three.expect_eq(&unit, &eta, || format!("metric ({i}, {j})"));
                let prod = self
                    .algebra
                    .quantum_product(&ClassVector::<Rational>::basis(r, i), &ClassVector::basis(r, j))?;
                for k in 0..r {
                    let want = self.algebra.pairing(&prod, &ClassVector::basis(r, k))?;
                    let got = oracle.omega(0, &[i, j, k])?;
                    three.expect_eq(&got, &want, || format!("product ({i}, {j}, {k})"));
                }
            }
        }

        Ok(CohftReport {
            checks: vec![agree, trees, loops, tails, invariance, string, three],
        })
    }
}

/// `Ω^{G×H}_g((γ_i, σ_i)) = Ω^G_g(γ) Ω^H_g(σ)`: brute force on the product
/// against the recursive counts of the factors, over all class tuples.
pub fn tensor_omega_check(
    g: &Theory,
    h: &Theory,
    max_genus: u32,
    max_points: usize,
) -> Result<IdentityCheck> {
    let product = Theory::new(GroupTable::direct_product(g.group(), h.group())?)
        .with_work_cap(g.work_cap().min(h.work_cap()));
    let nh = h.group().order();
    let (cg, ch) = (g.algebra().conjugacy(), h.algebra().conjugacy());
    let cp = product.algebra().conjugacy();
    let split: Vec<(usize, usize)> = cp
        .representative
        .iter()
        .map(|&x| (cg.class_of[x / nh], ch.class_of[x % nh]))
        .collect();
    let mut check = IdentityCheck::new("tensor");
    for genus in 0..=max_genus {
        for n in 0..=max_points {
            for classes in multisets(product.num_classes(), n) {
                let (left, right): (Vec<usize>, Vec<usize>) =
                    classes.iter().map(|&k| split[k]).unzip();
                let lhs = product.omega_bruteforce(genus, &classes)?;
                let rhs = g.omega(genus, &left)? * h.omega(genus, &right)?;
                check.expect_eq(&lhs, &rhs, || format!("g={genus} {left:?} x {right:?}"));
            }
        }
    }
    Ok(check)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupName;
    use crate::scalar::int;

    fn theory(name: GroupName, n: usize) -> Theory {
        Theory::new(GroupTable::named(name, n).unwrap())
    }

    #[test]
    fn multiset_counts() {
        assert_eq!(multisets(3, 0), vec![Vec::<usize>::new()]);
        assert_eq!(multisets(3, 2).len(), 6);
        assert_eq!(multisets(5, 3).len(), 35);
    }

    #[test]
    fn s3_satisfies_the_axioms() {
        let opts = CohftOptions {
            max_genus: 1,
            max_points: 3,
            random_keys: 16,
            seed: 7,
        };
        let report = theory(GroupName::Symmetric, 3).cohft_check(&opts).unwrap();
        for c in &report.checks {
            assert!(c.passed(), "{}: {:?}", c.name, c.failures);
            assert!(c.checked > 0, "{}", c.name);
        }
    }

    #[test]
    fn tensor_products() {
        let z2 = theory(GroupName::Cyclic, 2);
        let z3 = theory(GroupName::Cyclic, 3);
        let check = tensor_omega_check(&z2, &z3, 1, 2).unwrap();
        assert!(check.passed(), "{:?}", check.failures);
        let prod = Theory::new(GroupTable::direct_product(z2.group(), z3.group()).unwrap());
        assert_eq!(prod.omega(1, &[]).unwrap(), int(6));
        let trivial = theory(GroupName::Cyclic, 1);
        let q8 = theory(GroupName::Quaternion, 0);
        assert!(tensor_omega_check(&trivial, &q8, 1, 2).unwrap().passed());
    }
}
