//! The KdV identity in the class basis, multiplied through by `λ²`:
//!
//! `(2a+1) η^{m m'} ∂_{a,v}∂_{0,m}∂_{0,m'} Φ
//!   = λ² η^{m1 m1'} η^{m3 m3'} [ (∂_{a-1,v}∂_{0,m1}Φ)(∂_{0,m1'}∂_{0,m3}∂_{0,m3'}Φ)
//!   + 2 (∂_{a-1,v}∂_{0,m1}∂_{0,m3}Φ)(∂_{0,m1'}∂_{0,m3'}Φ)
//!   + ¼ ∂_{a-1,v}∂_{0,m1}∂_{0,m1'}∂_{0,m3}∂_{0,m3'}Φ ]`.
//!
//! Derivatives drop up to five degrees, so `Φ` is built five degrees past
//! the compared window.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use serde_json::json;

use super::{ConstraintReport, Tally};
use crate::correlators::{Mutation, PotentialBasis, Theory};
use crate::error::Result;
use crate::scalar::{int, rational, Rational};
use crate::series::{Caps, Monomial, SeriesVar};
use crate::ExactSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KdvOptions {
    pub a_max: u32,
    pub degree: u32,
    pub genus: u32,
}

impl Default for KdvOptions {
    fn default() -> Self {
        KdvOptions {
            a_max: 2,
            degree: 4,
            genus: 1,
        }
    }
}

struct Derivatives {
    phi: ExactSeries,
    window: Caps,
    full: HashMap<Vec<SeriesVar>, ExactSeries>,
    truncated: HashMap<Vec<SeriesVar>, ExactSeries>,
}

impl Derivatives {
    fn raw(&mut self, vars: &[SeriesVar]) -> ExactSeries {
        if vars.is_empty() {
            return self.phi.clone();
        }
        if let Some(s) = self.full.get(vars) {
            return s.clone();
        }
        let (last, prefix) = vars.split_last().expect("nonempty");
        let s = self.raw(prefix).partial_derivative(*last);
        self.full.insert(vars.to_vec(), s.clone());
        s
    }

    /// The derivative, truncated to the compared window.
    fn get(&mut self, vars: &[SeriesVar]) -> Result<ExactSeries> {
        let mut key = vars.to_vec();
        key.sort_unstable();
        if let Some(s) = self.truncated.get(&key) {
            return Ok(s.clone());
        }
        let s = self.raw(&key).recap(self.window)?;
        self.truncated.insert(key, s.clone());
        Ok(s)
    }
}

/// One report per `(a, v)` with `1 ≤ a ≤ a_max` and `v` a class.
pub fn kdv_check(theory: &Theory, opts: &KdvOptions, mutation: Option<&Mutation>) -> Result<Vec<ConstraintReport>> {
    let built = Caps::new(opts.degree + 5, opts.genus).with_lambda_floor(-4);
    let level = built.level.max(opts.a_max);
    let built = built.with_level(level);
    let mut phi = theory.potential(built, PotentialBasis::Class)?;
    if let Some(mu) = mutation {
        phi = mu.apply(&phi)?;
    }
    let window = Caps::new(opts.degree, opts.genus)
        .with_level(level)
        .with_lambda_floor(-4);
    let r = theory.num_classes();
    let algebra = theory.algebra();
    // (m, m', η^{m m'})
    let pairs: Vec<(u32, u32, Rational)> = (0..r)
        .flat_map(|m| (0..r).map(move |k| (m, k)))
        .map(|(m, k)| (m as u32, k as u32, algebra.inverse_metric_entry(m, k)))
        .filter(|(_, _, x)| *x != int(0))
        .collect();
    let keys: Vec<(u32, u32)> = (1..=opts.a_max).flat_map(|a| (0..r as u32).map(move |v| (a, v))).collect();
    theory.install(|| {
        keys.par_iter()
            .map(|&(a, v)| {
                let mut d = Derivatives {
                    phi: phi.clone(),
                    window,
                    full: HashMap::new(),
                    truncated: HashMap::new(),
                };
                kdv_report(&mut d, &pairs, a, v, opts)
            })
            .collect()
    })
}

fn kdv_report(
    d: &mut Derivatives,
    pairs: &[(u32, u32, Rational)],
    a: u32,
    v: u32,
    opts: &KdvOptions,
) -> Result<ConstraintReport> {
    let t0 = |m: u32| SeriesVar::new(0, m);
    let top = SeriesVar::new(a, v);
    let low = SeriesVar::new(a - 1, v);
    let window = d.window;
    let mut lhs = ExactSeries::zero(window);
    for (m, mb, eta) in pairs {
        lhs = lhs.add(&d.get(&[top, t0(*m), t0(*mb)])?.scale(eta))?;
    }
    lhs = lhs.scale(&int(2 * a as i64 + 1));
    let mut bracket = ExactSeries::zero(window);
    for (m1, m1b, eta1) in pairs {
        for (m3, m3b, eta3) in pairs {
            let w = eta1 * eta3;
            let q1 = d.get(&[low, t0(*m1)])?.mul(&d.get(&[t0(*m1b), t0(*m3), t0(*m3b)])?)?;
            let q2 = d.get(&[low, t0(*m1), t0(*m3)])?.mul(&d.get(&[t0(*m1b), t0(*m3b)])?)?;
            let quartic = d.get(&[low, t0(*m1), t0(*m1b), t0(*m3), t0(*m3b)])?;
            let term = q1
                .add(&q2.scale(&int(2)))?
                .add(&quartic.scale(&rational(1, 4)))?;
            bracket = bracket.add(&term.scale(&w))?;
        }
    }
    let rhs = bracket.mul_lambda(2)?;
    let ceiling = 2 * opts.genus as i32 - 2;
    let positions: BTreeSet<(Monomial, i32)> = lhs
        .iter()
        .chain(rhs.iter())
        .filter(|(m, e, _)| m.degree() <= opts.degree && *e <= ceiling)
        .map(|(m, e, _)| (m.clone(), e))
        .collect();
    let mut tally = Tally::new(0.0);
    for (m, e) in positions {
        tally.compare(&m, e, lhs.coefficient(&m, e), rhs.coefficient(&m, e));
    }
    let operator = json!({ "equation": "kdv", "a": a, "v": v });
    Ok(tally.finish(format!("KdV a={a} v={v}"), operator, opts.degree as i32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{GroupName, GroupTable};

    fn theory(name: GroupName, n: usize) -> Theory {
        Theory::new(GroupTable::named(name, n).unwrap())
    }

    #[test]
    fn holds_for_small_groups() {
        for (name, n) in [(GroupName::Cyclic, 1), (GroupName::Cyclic, 2), (GroupName::Symmetric, 3)] {
            let t = theory(name, n);
            let reports = kdv_check(&t, &KdvOptions::default(), None).unwrap();
            assert_eq!(reports.len(), 2 * t.num_classes());
            for r in reports {
                assert!(r.passed(), "{name:?}{n} {}: {:?}", r.label, r.violations);
                assert!(r.checked > 0, "{}", r.label);
            }
        }
    }

    #[test]
    fn genus_zero_slice_of_the_trivial_group() {
        let t = theory(GroupName::Cyclic, 1);
        let opts = KdvOptions { a_max: 1, degree: 2, genus: 0 };
        let r = &kdv_check(&t, &opts, None).unwrap()[0];
        assert!(r.passed() && r.checked > 0);
    }

    #[test]
    fn mutation_fails() {
        let t = theory(GroupName::Cyclic, 2);
        let phi = t.potential(Caps::new(9, 1), PotentialBasis::Class).unwrap();
        let mu = Mutation::first_genus_zero_quartic(&phi).unwrap();
        let reports = kdv_check(&t, &KdvOptions::default(), Some(&mu)).unwrap();
        let bad: Vec<_> = reports.iter().filter(|r| !r.passed()).collect();
        assert!(!bad.is_empty());
        assert!(!bad[0].violations.is_empty());
    }
}
