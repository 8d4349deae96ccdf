//! Virasoro, KdV and factorization checks on truncated potentials.
//!
//! A truncated `Z = exp(Φ)` is only partly exact: a coefficient can pick up
//! contributions from the missing higher-genus part of `Φ` once enough
//! genus-0 factors drag its `λ` exponent back into range. Residuals of a
//! differential operator are compared only where every coefficient of `Z`
//! they read is known to be exact; the rest are counted as skipped.

mod factorization;
mod kdv;
mod virasoro;

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::algebra::ClassAlgebra;
use crate::scalar::{Rational, Scalar};
use crate::series::Monomial;

pub use factorization::{canonical_transform, factorization_check, factorization_report};
pub use kdv::{kdv_check, KdvOptions};
pub use virasoro::{
    annihilation_report, apply_virasoro, commutator_check, operator_identity_check,
    perturbed_partition, random_test_series, virasoro_check, Flavor, VirasoroOptions,
    VirasoroSpec,
};

/// Violations listed in a report; the total is always given.
pub const MAX_LISTED_VIOLATIONS: usize = 20;

/// The variables a series is written in.
#[derive(Debug, Clone, PartialEq)]
pub enum VariableSystem {
    /// `t_a^m` in the class basis, slot 0 the identity class.
    Class {
        metric: Vec<Vec<Rational>>,
        inverse_metric: Vec<Vec<Rational>>,
    },
    /// `ũ_a^α`, one slot per idempotent.
    Canonical { dim: usize },
}

impl VariableSystem {
    pub fn class(algebra: &ClassAlgebra) -> Self {
        VariableSystem::Class {
            metric: algebra.metric(),
            inverse_metric: algebra.inverse_metric(),
        }
    }

    pub fn canonical(dim: usize) -> Self {
        VariableSystem::Canonical { dim }
    }

    pub fn dim(&self) -> usize {
        match self {
            VariableSystem::Class { metric, .. } => metric.len(),
            VariableSystem::Canonical { dim } => *dim,
        }
    }
}

/// Which coefficients of a truncated `Z = exp(Φ)` are exact, given that `Φ`
/// is complete through `degree` and `genus`.
///
/// Every monomial of `Φ_g` has `Σ(a_i - 1) = 3g - 3`, so a coefficient of `Z`
/// at `λ^e` can be nonzero only when `3e = 2 Σ(a_i - 1)`. A missing
/// contribution needs a factor of genus above `genus` (or an intermediate
/// product clipped above the `λ` window), whose exponent is at least
/// `2·genus`, brought down by genus-0 factors. Each of those has degree at
/// least 3 and at least three level-0 variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactnessModel {
    pub degree: u32,
    pub genus: u32,
}

impl ExactnessModel {
    pub fn is_exact(&self, m: &Monomial, lambda: i32) -> bool {
        let k = m.degree();
        if k > self.degree {
            return false;
        }
        if k == 0 {
            return true;
        }
        let level_sum: i64 = m.pairs().iter().map(|(v, e)| v.level as i64 * *e as i64).sum();
        let weight = level_sum - k as i64;
        if 3 * lambda as i64 != 2 * weight {
            return true;
        }
        let zeros: i64 = m
            .pairs()
            .iter()
            .filter(|(v, _)| v.level == 0)
            .map(|(_, e)| *e as i64)
            .sum();
        let genus_zero_factors = (zeros / 3).min((k as i64 - 1) / 3);
        (lambda as i64) < 2 * self.genus as i64 - 2 * genus_zero_factors
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub monomial: Monomial,
    pub lambda: i32,
    pub lhs: Value,
    pub rhs: Value,
}

impl Violation {
    pub fn to_json(&self) -> Value {
        json!({
            "monomial": self.monomial.to_json(),
            "lambda": self.lambda,
            "lhs": self.lhs,
            "rhs": self.rhs,
        })
    }
}

/// Outcome of comparing two sides of an identity coefficientwise.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintReport {
    pub label: String,
    pub operator: Value,
    /// Coefficients compared.
    pub checked: usize,
    /// Coefficients within the degree window that could not be certified.
    pub skipped: usize,
    /// Highest degree compared.
    pub watermark: i32,
    pub max_residual: Value,
    pub max_residual_magnitude: f64,
    pub violation_count: usize,
    /// The first violations in monomial order.
    pub violations: Vec<Violation>,
}

impl ConstraintReport {
    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }

    pub fn to_json(&self) -> Value {
        json!({
            "label": self.label,
            "operator": self.operator,
            "checked": self.checked,
            "skipped": self.skipped,
            "watermark": self.watermark,
            "max_residual": self.max_residual,
            "violation_count": self.violation_count,
            "violations": self.violations.iter().map(Violation::to_json).collect::<Vec<_>>(),
        })
    }
}

/// Accumulates compared coefficients into a report.
pub(crate) struct Tally<S> {
    tolerance: f64,
    checked: usize,
    skipped: usize,
    worst: Option<S>,
    worst_magnitude: f64,
    violations: BTreeMap<(Monomial, i32), (S, S)>,
}

impl<S: Scalar> Tally<S> {
    /// `tolerance` is ignored for exact scalars.
    pub(crate) fn new(tolerance: f64) -> Self {
        Tally {
            tolerance,
            checked: 0,
            skipped: 0,
            worst: None,
            worst_magnitude: 0.0,
            violations: BTreeMap::new(),
        }
    }

    pub(crate) fn skip(&mut self) {
        self.skipped += 1;
    }

    pub(crate) fn compare(&mut self, m: &Monomial, lambda: i32, lhs: S, rhs: S) {
        self.checked += 1;
        let diff = lhs.clone() - rhs.clone();
        let mag = diff.magnitude();
        if self.worst.is_none() || mag > self.worst_magnitude {
            self.worst_magnitude = mag;
            self.worst = Some(diff.abs_value());
        }
        let bad = if S::EXACT {
            !diff.is_zero()
        } else {
            mag > self.tolerance
        };
        if bad {
            self.violations.insert((m.clone(), lambda), (lhs, rhs));
        }
    }

    pub(crate) fn finish(self, label: String, operator: Value, watermark: i32) -> ConstraintReport {
        let violation_count = self.violations.len();
        ConstraintReport {
            label,
            operator,
            checked: self.checked,
            skipped: self.skipped,
            watermark,
            max_residual: self.worst.unwrap_or_else(S::zero).to_json(),
            max_residual_magnitude: self.worst_magnitude,
            violation_count,
            violations: self
                .violations
                .into_iter()
                .take(MAX_LISTED_VIOLATIONS)
                .map(|((monomial, lambda), (lhs, rhs))| Violation {
                    monomial,
                    lambda,
                    lhs: lhs.to_json(),
                    rhs: rhs.to_json(),
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;
    use crate::series::SeriesVar;

    fn m(vars: &[(u32, u32)]) -> Monomial {
        Monomial::from_vars(vars.iter().map(|&(a, s)| SeriesVar::new(a, s)))
    }

    #[test]
    fn exactness_model() {
        let model = ExactnessModel { degree: 6, genus: 1 };
        assert!(model.is_exact(&Monomial::one(), 0));
        assert!(!model.is_exact(&m(&[(0, 0); 7]), -4));
        // genus-0 cube and its square are exact
        assert!(model.is_exact(&m(&[(0, 0); 3]), -2));
        assert!(model.is_exact(&m(&[(0, 0); 6]), -4));
        // λ^0 at t_0^3 t_4: the genus-2 term t_4 λ^2 times the genus-0 cube
        assert!(!model.is_exact(&m(&[(0, 0), (0, 0), (0, 0), (4, 0)]), 0));
        // without three level-0 variables no genus-0 factor fits
        assert!(model.is_exact(&m(&[(0, 0), (1, 0), (1, 0), (2, 0)]), 0));
        // exponent inconsistent with the levels: the true coefficient is 0
        assert!(model.is_exact(&m(&[(0, 0); 5]), 0));
    }

    #[test]
    fn tally_reports() {
        let mut t = Tally::<Rational>::new(0.0);
        t.compare(&m(&[(0, 0)]), 0, int(1), int(1));
        t.skip();
        let r = t.finish("x".into(), json!("x"), 3);
        assert!(r.passed());
        assert_eq!(r.max_residual, json!("0/1"));
        assert_eq!((r.checked, r.skipped), (1, 1));
        let mut t = Tally::<Rational>::new(0.0);
        t.compare(&m(&[(0, 0)]), 0, int(1), int(3));
        let r = t.finish("x".into(), json!("x"), 3);
        assert!(!r.passed());
        assert_eq!(r.max_residual, json!("2/1"));
        let mut t = Tally::<f64>::new(1e-9);
        t.compare(&m(&[(0, 0)]), 0, 1.0, 1.0 + 1e-12);
        assert!(t.finish("x".into(), json!("x"), 3).passed());
    }
}
