//! Intersection numbers `⟨τ_{a_1}⋯τ_{a_n}⟩_g` of ψ classes on the moduli of
//! stable curves.
//!
//! Insertions of `τ_0` are removed with the string equation; otherwise the
//! largest level is peeled off with the Dijkgraaf–Verlinde–Verlinde form of
//! the Virasoro recursion. The two seeds are `⟨τ_0³⟩_0 = 1` and
//! `⟨τ_1⟩_1 = 1/24`, the latter fixed by the constant term of `L_0`.

use std::collections::HashMap;
use std::sync::{LazyLock, RwLock};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{int, rational, Rational};

type PsiKey = (u32, Vec<u32>);

static MEMO: LazyLock<RwLock<HashMap<PsiKey, Rational>>> =
    LazyLock::new(|| RwLock::new(HashMap::new()));

/// `(2k-1)!!` with `(-1)!! = 1`.
pub fn double_factorial_odd(k: i64) -> i64 {
    assert!(k >= 0, "(2k-1)!! needs k >= 0");
    (1..=k).map(|j| 2 * j - 1).product()
}

/// Stability `2g - 2 + n > 0`.
pub fn is_stable(genus: u32, points: usize) -> bool {
    2 * genus as i64 - 2 + points as i64 > 0
}

/// `⟨τ_{a_1}⋯τ_{a_n}⟩_g`; zero unless `Σ a_i = 3g - 3 + n`.
pub fn psi_intersection(genus: u32, levels: &[u32]) -> Result<Rational> {
    if !is_stable(genus, levels.len()) {
        return Err(Error::UnstableKey {
            genus,
            points: levels.len(),
        });
    }
    let mut sorted = levels.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    Ok(psi(genus, sorted))
}

// levels sorted in decreasing order; unstable keys are zero
fn psi(genus: u32, levels: Vec<u32>) -> Rational {
    let n = levels.len();
    if !is_stable(genus, n) {
        return Rational::zero();
    }
    let sum: i64 = levels.iter().map(|&a| a as i64).sum();
    if sum != 3 * genus as i64 - 3 + n as i64 {
        return Rational::zero();
    }
    if genus == 0 && n == 3 {
        return Rational::one();
    }
    if genus == 1 && n == 1 {
        return rational(1, 24);
    }
    let key = (genus, levels);
    if let Some(v) = MEMO.read().expect("psi memo poisoned").get(&key) {
        return v.clone();
    }
    let (genus, levels) = key;
    let value = if *levels.last().expect("n >= 1") == 0 {
        string_equation(genus, &levels)
    } else {
        dvv(genus, &levels)
    };
    MEMO.write()
        .expect("psi memo poisoned")
        .insert((genus, levels), value.clone());
    value
}

fn sorted_desc(mut v: Vec<u32>) -> Vec<u32> {
    v.sort_unstable_by(|a, b| b.cmp(a));
    v
}

// ⟨τ_0 ∏τ_{a_j}⟩ = Σ_j ⟨… τ_{a_j - 1} …⟩
fn string_equation(genus: u32, levels: &[u32]) -> Rational {
    let rest = &levels[..levels.len() - 1];
    let mut acc = Rational::zero();
    for j in 0..rest.len() {
        if rest[j] == 0 || (j > 0 && rest[j] == rest[j - 1]) {
            continue;
        }
        let mult = rest.iter().filter(|&&a| a == rest[j]).count() as i64;
        let mut v = rest.to_vec();
        v[j] -= 1;
        acc += psi(genus, sorted_desc(v)) * int(mult);
    }
    acc
}

fn dvv(genus: u32, levels: &[u32]) -> Rational {
    let k = levels[0] as i64 - 1;
    let rest = &levels[1..];
    let mut acc = Rational::zero();
    for j in 0..rest.len() {
        let d = rest[j] as i64;
        let coeff = rational(
            double_factorial_odd(k + d + 1),
            double_factorial_odd(d),
        );
        let mut v = rest.to_vec();
        v[j] = (d + k) as u32;
        acc += coeff * psi(genus, sorted_desc(v));
    }
    let mut split = Rational::zero();
    for r in 0..k {
        let s = k - 1 - r;
        let weight = int(double_factorial_odd(r + 1) * double_factorial_odd(s + 1));
        let mut term = Rational::zero();
        if genus > 0 {
            let mut v = rest.to_vec();
            v.push(r as u32);
            v.push(s as u32);
            term += psi(genus - 1, sorted_desc(v));
        }
        let m = rest.len();
        for mask in 0u64..(1u64 << m) {
            let mut left = vec![r as u32];
            let mut right = vec![s as u32];
            for (i, &a) in rest.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    left.push(a);
                } else {
                    right.push(a);
                }
            }
            for g1 in 0..=genus {
                let l = psi(g1, sorted_desc(left.clone()));
                if l.is_zero() {
                    continue;
                }
                term += l * psi(genus - g1, sorted_desc(right.clone()));
            }
        }
        split += weight * term;
    }
    acc += split / int(2);
    acc / int(double_factorial_odd(k + 2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn factorial(n: u32) -> i64 {
        (1..=n as i64).product()
    }

    #[test]
    fn seeds_and_small_values() {
        assert_eq!(psi_intersection(0, &[0, 0, 0]).unwrap(), int(1));
        assert_eq!(psi_intersection(1, &[1]).unwrap(), rational(1, 24));
        assert_eq!(psi_intersection(0, &[0, 0, 0, 1]).unwrap(), int(1));
        assert_eq!(psi_intersection(0, &[0, 0, 0, 1, 1]).unwrap(), int(2));
        assert_eq!(psi_intersection(0, &[0, 0, 1, 1]).unwrap(), int(0));
        assert_eq!(psi_intersection(2, &[4]).unwrap(), rational(1, 1152));
        assert_eq!(psi_intersection(1, &[1, 1]).unwrap(), rational(1, 24));
        assert_eq!(psi_intersection(1, &[0, 2]).unwrap(), rational(1, 24));
        assert_eq!(psi_intersection(2, &[2, 3]).unwrap(), rational(29, 5760));
        assert_eq!(psi_intersection(3, &[7]).unwrap(), rational(1, 82944));
    }

    #[test]
    fn dimension_rule_and_stability() {
        assert_eq!(psi_intersection(0, &[0, 0, 1]).unwrap(), int(0));
        assert_eq!(psi_intersection(2, &[]).unwrap(), int(0));
        assert!(matches!(
            psi_intersection(0, &[0, 0]),
            Err(Error::UnstableKey { genus: 0, points: 2 })
        ));
        assert!(psi_intersection(1, &[]).is_err());
    }

    #[test]
    fn genus_zero_closed_form_up_to_seven_points() {
        fn compositions(n: usize, total: u32, out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>) {
            if cur.len() == n {
                if total == 0 {
                    out.push(cur.clone());
                }
                return;
            }
            for a in 0..=total {
                cur.push(a);
                compositions(n, total - a, out, cur);
                cur.pop();
            }
        }
        for n in 3..=7usize {
            let mut all = Vec::new();
            compositions(n, n as u32 - 3, &mut all, &mut Vec::new());
            for levels in all {
                let denom: i64 = levels.iter().map(|&a| factorial(a)).product();
                let want = rational(factorial(n as u32 - 3), denom);
                assert_eq!(psi_intersection(0, &levels).unwrap(), want, "{levels:?}");
            }
        }
    }

    proptest! {
        #[test]
        fn dilaton_equation(genus in 0u32..3, extra in proptest::collection::vec(0u32..4, 0..4)) {
            let n = extra.len() + 1;
            prop_assume!(is_stable(genus, extra.len()));
            let total = 3 * genus as i64 - 3 + n as i64;
            let mut levels = extra.clone();
            let sum: i64 = levels.iter().map(|&a| a as i64).sum();
            prop_assume!(sum < total && !levels.is_empty());
            let last = levels.len() - 1;
            levels[last] += (total - 1 - sum) as u32;
            let base = psi_intersection(genus, &levels).unwrap();
            let mut with_one = levels.clone();
            with_one.push(1);
            let lhs = psi_intersection(genus, &with_one).unwrap();
            let factor = int(2 * genus as i64 - 2 + levels.len() as i64);
            prop_assert_eq!(lhs, base * factor);
        }
    }
}
