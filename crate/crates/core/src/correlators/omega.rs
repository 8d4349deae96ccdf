//! `Ω^G_g(γ) = |X|/|G|` where `X` is the set of tuples
//! `(α_1, β_1, …, α_g, β_g, σ_1, …, σ_n)` with `∏[α_i, β_i] = ∏σ_j` and
//! `σ_j` in prescribed classes.

use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;

use super::{OmegaKey, Theory};
use crate::algebra::ClassVector;
use crate::error::{Error, Result};
use crate::group::GroupTable;
use crate::scalar::Rational;

/// Default bound on `|G|^{2g} · ∏|C_j|`.
pub const DEFAULT_WORK_CAP: u128 = 1_000_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct EnumerationStats {
    /// Tuples covered, `|G|^{2g} · ∏|C_j|`.
    pub tuples: u128,
    /// Size of the solution set `X`.
    pub solutions: u128,
    pub seconds: f64,
}

impl EnumerationStats {
    pub fn tuples_per_second(&self) -> f64 {
        if self.seconds > 0.0 {
            self.tuples as f64 / self.seconds
        } else {
            f64::INFINITY
        }
    }
}

pub(super) fn work(order: usize, genus: u32, class_sizes: impl Iterator<Item = usize>) -> u128 {
    let mut w: u128 = 1;
    for _ in 0..2 * genus {
        w = w.saturating_mul(order as u128);
    }
    for s in class_sizes {
        w = w.saturating_mul(s as u128);
    }
    w
}

/// Histogram of `∏_{i≤g}[α_i, β_i]` over all of `G^{2g}`, split over `α_1`.
pub(super) fn commutator_histogram(g: &GroupTable, genus: u32) -> Vec<u64> {
    let n = g.order();
    let mut hist = vec![0u64; n];
    if genus == 0 {
        hist[GroupTable::IDENTITY] = 1;
        return hist;
    }
    let slots = 2 * genus as usize;
    (0..n)
        .into_par_iter()
        .map(|a1| {
            let mut local = vec![0u64; n];
            let mut tuple = vec![0usize; slots];
            tuple[0] = a1;
            loop {
                let mut p = GroupTable::IDENTITY;
                for pair in tuple.chunks_exact(2) {
                    p = g.mul(p, g.commutator(pair[0], pair[1]));
                }
                local[p] += 1;
                // odometer over slots 1..
                let mut i = slots - 1;
                loop {
                    if i == 0 {
                        return local;
                    }
                    tuple[i] += 1;
                    if tuple[i] < n {
                        break;
                    }
                    tuple[i] = 0;
                    i -= 1;
                }
            }
        })
        .reduce(
            || vec![0u64; n],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        )
}

/// Histogram of `σ_1⋯σ_n` over `C_{m_1} × ⋯ × C_{m_n}`, in the given order.
fn product_histogram(g: &GroupTable, classes: &[&[usize]]) -> Vec<u64> {
    let mut hist = vec![0u64; g.order()];
    let n = classes.len();
    if classes.iter().any(|c| c.is_empty()) {
        return hist;
    }
    let mut idx = vec![0usize; n];
    loop {
        let p = idx
            .iter()
            .zip(classes)
            .fold(GroupTable::IDENTITY, |p, (&i, c)| g.mul(p, c[i]));
        hist[p] += 1;
        let mut j = n;
        loop {
            if j == 0 {
                return hist;
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < classes[j].len() {
                break;
            }
            idx[j] = 0;
        }
    }
}

impl Theory {
    /// Literal count over all tuples; `classes` is taken in the given order.
    pub fn omega_bruteforce(&self, genus: u32, classes: &[usize]) -> Result<Rational> {
        self.omega_bruteforce_with_stats(genus, classes).map(|(v, _)| v)
    }

    pub fn omega_bruteforce_with_stats(
        &self,
        genus: u32,
        classes: &[usize],
    ) -> Result<(Rational, EnumerationStats)> {
        self.check_classes(classes)?;
        let cd = self.algebra.conjugacy();
        let tuples = work(
            self.group.order(),
            genus,
            classes.iter().map(|&k| cd.class_size[k]),
        );
        if tuples > self.work_cap {
            return Err(Error::WorkCapExceeded {
                work: tuples,
                cap: self.work_cap,
            });
        }
        let start = Instant::now();
        let comm = self.commutator_histogram(genus);
        let members: Vec<&[usize]> = classes.iter().map(|&k| cd.classes[k].as_slice()).collect();
        let prod = product_histogram(&self.group, &members);
        let solutions: u128 = comm
            .iter()
            .zip(&prod)
            .map(|(&h, &p)| h as u128 * p as u128)
            .sum();
        let stats = EnumerationStats {
            tuples,
            solutions,
            seconds: start.elapsed().as_secs_f64(),
        };
        let value = Rational::new(BigInt::from(solutions), BigInt::from(self.group.order()));
        Ok((value, stats))
    }

    fn commutator_histogram(&self, genus: u32) -> Arc<Vec<u64>> {
        if let Some(h) = self.commutators.lock().expect("cache poisoned").get(&genus) {
            return Arc::clone(h);
        }
        let hist = Arc::new(self.install(|| commutator_histogram(&self.group, genus)));
        self.commutators
            .lock()
            .expect("cache poisoned")
            .insert(genus, Arc::clone(&hist));
        hist
    }

    /// Cutting loops down to genus 0, then the Frobenius product.
    pub fn omega(&self, genus: u32, classes: &[usize]) -> Result<Rational> {
        self.check_classes(classes)?;
        Ok(self.omega_key(&OmegaKey::new(genus, classes.to_vec())))
    }

    pub(super) fn omega_key(&self, key: &OmegaKey) -> Rational {
        if let Some(v) = self.memo.omega.read().expect("memo poisoned").get(key) {
            return v.clone();
        }
        let value = self.omega_uncached(key);
        self.memo
            .omega
            .write()
            .expect("memo poisoned")
            .insert(key.clone(), value.clone());
        value
    }

    fn omega_uncached(&self, key: &OmegaKey) -> Rational {
        let cd = self.algebra.conjugacy();
        let order = BigInt::from(self.group.order());
        if key.genus > 0 {
            let mut acc = Rational::zero();
            for z in 0..self.algebra.dim() {
                let mut classes = key.classes.clone();
                classes.push(z);
                classes.push(cd.inverse_class[z]);
                let sub = self.omega_key(&OmegaKey::new(key.genus - 1, classes));
                acc += sub * BigInt::from(cd.class_centralizer(z));
            }
            return acc;
        }
        let c = &key.classes;
        match c.len() {
            0 => Rational::new(1.into(), order),
            1 => {
                let hit = usize::from(c[0] == 0);
                Rational::new(hit.into(), order)
            }
            2 => {
                if cd.inverse_class[c[0]] == c[1] {
                    Rational::new(cd.class_size[c[0]].into(), order)
                } else {
                    Rational::zero()
                }
            }
            n => {
                let r = self.algebra.dim();
                let mut acc: ClassVector<Rational> = ClassVector::basis(r, c[0]);
                for &k in &c[1..n - 1] {
                    acc = self
                        .algebra
                        .quantum_product(&acc, &ClassVector::basis(r, k))
                        .expect("dimensions agree");
                }
                self.algebra
                    .pairing(&acc, &ClassVector::basis(r, c[n - 1]))
                    .expect("dimensions agree")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupName;
    use crate::scalar::{int, rational};

    fn theory(name: GroupName, n: usize) -> Theory {
        Theory::new(GroupTable::named(name, n).unwrap())
    }

    #[test]
    fn small_counts() {
        let z2 = theory(GroupName::Cyclic, 2);
        assert_eq!(z2.omega_bruteforce(1, &[]).unwrap(), int(2));
        let s3 = theory(GroupName::Symmetric, 3);
        assert_eq!(s3.omega_bruteforce(1, &[]).unwrap(), int(3));
        // classes of S3: identity, transpositions, 3-cycles
        assert_eq!(s3.omega_bruteforce(0, &[1, 1, 2]).unwrap(), int(1));
        assert_eq!(s3.omega(0, &[1, 1, 2]).unwrap(), int(1));
        assert_eq!(s3.omega(0, &[1, 1]).unwrap(), rational(1, 2));
        assert_eq!(s3.omega_bruteforce(0, &[1, 1]).unwrap(), rational(1, 2));
        assert_eq!(s3.omega(0, &[]).unwrap(), rational(1, 6));
        assert_eq!(s3.omega_bruteforce(0, &[]).unwrap(), rational(1, 6));
    }

    #[test]
    fn abelian_counts() {
        for n in 1..=6usize {
            let t = theory(GroupName::Cyclic, n);
            for g in 0..=2u32 {
                let want = Rational::new(BigInt::from(n).pow(2 * g), BigInt::from(n));
                assert_eq!(t.omega(g, &[]).unwrap(), want);
                assert_eq!(t.omega_bruteforce(g, &[]).unwrap(), want);
            }
        }
    }

    #[test]
    fn algorithms_agree_on_s3_genus_two() {
        let s3 = theory(GroupName::Symmetric, 3);
        for classes in [vec![], vec![1], vec![1, 2], vec![2, 2, 2], vec![0, 1, 1]] {
            assert_eq!(
                s3.omega(2, &classes).unwrap(),
                s3.omega_bruteforce(2, &classes).unwrap(),
                "{classes:?}"
            );
        }
    }

    #[test]
    fn work_cap() {
        let s4 = Theory::new(GroupTable::named(GroupName::Symmetric, 4).unwrap()).with_work_cap(1000);
        assert!(matches!(
            s4.omega_bruteforce(2, &[]),
            Err(Error::WorkCapExceeded { work: 331_776, cap: 1000 })
        ));
        assert!(s4.omega(2, &[]).is_ok());
    }

    #[test]
    fn job_count_does_not_change_counts() {
        let g = GroupTable::named(GroupName::Dihedral, 4).unwrap();
        let one = Theory::new(g.clone()).with_jobs(Some(1));
        let four = Theory::new(g).with_jobs(Some(4));
        for classes in [vec![], vec![1, 2], vec![3, 3, 4]] {
            let (a, sa) = one.omega_bruteforce_with_stats(2, &classes).unwrap();
            let (b, sb) = four.omega_bruteforce_with_stats(2, &classes).unwrap();
            assert_eq!(a, b);
            assert_eq!(sa.solutions, sb.solutions);
        }
    }

    #[test]
    fn invalid_class_index() {
        let z2 = theory(GroupName::Cyclic, 2);
        assert!(matches!(z2.omega(0, &[2]), Err(Error::InvalidInput(_))));
    }
}
