use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use serde_json::json;

use super::{ConstraintReport, Tally};
use crate::algebra::CanonicalBasis;
use crate::correlators::{point_potential, PotentialBasis, Theory};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::{Caps, Monomial, SeriesVar, TruncatedSeries};

/// Class-basis series in rescaled canonical variables:
/// `t^m = Σ_α C[m][α] u^α`, then `u_a^α = ν_α^{(a-1)/3} ũ_a^α`.
pub fn canonical_transform<S: Scalar>(
    series: &TruncatedSeries<S>,
    cb: &CanonicalBasis,
) -> Result<TruncatedSeries<Complex64>> {
    let linear = series
        .map(|c| c.to_complex())
        .substitute_linear(&cb.class_coefficients())?;
    let mut factors = BTreeMap::new();
    for level in 0..=series.caps().level {
        for alpha in 0..cb.dim() {
            let scale = cb.nu_f64(alpha).powf((level as f64 - 1.0) / 3.0);
            factors.insert(SeriesVar::new(level, alpha as u32), Complex64::new(scale, 0.0));
        }
    }
    linear.substitute_rescale(&factors)
}

/// Compares `Φ^G` moved to rescaled canonical variables with `Σ_α Φ(ũ^α)`.
pub fn factorization_report(
    theory: &Theory,
    cb: &CanonicalBasis,
    caps: Caps,
    tolerance: f64,
) -> Result<ConstraintReport> {
    let lhs = canonical_transform(&theory.potential(caps, PotentialBasis::Class)?, cb)?;
    let rhs = point_potential(caps, cb.dim())?.map(|c| c.to_complex());
    let positions: BTreeSet<(Monomial, i32)> = lhs
        .iter()
        .chain(rhs.iter())
        .map(|(m, e, _)| (m.clone(), e))
        .collect();
    let mut tally = Tally::<Complex64>::new(tolerance);
    for (m, e) in positions {
        tally.compare(&m, e, lhs.coefficient(&m, e), rhs.coefficient(&m, e));
    }
    let operator = json!({ "identity": "factorization", "r": cb.dim() });
    Ok(tally.finish("factorization".into(), operator, caps.degree as i32))
}

/// Like [`factorization_report`], failing with the worst monomial.
pub fn factorization_check(
    theory: &Theory,
    cb: &CanonicalBasis,
    caps: Caps,
    tolerance: f64,
) -> Result<ConstraintReport> {
    let report = factorization_report(theory, cb, caps, tolerance)?;
    if let Some(v) = report.violations.first() {
        return Err(Error::ToleranceExceeded {
            deviation: report.max_residual_magnitude,
            tolerance,
            monomial: format!("{} λ^{}", v.monomial, v.lambda),
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{canonical_basis, character_table, CharacterOptions};
    use crate::group::{GroupName, GroupTable};

    fn setup(name: GroupName, n: usize) -> (Theory, CanonicalBasis) {
        let t = Theory::new(GroupTable::named(name, n).unwrap());
        let ct = character_table(t.algebra(), &CharacterOptions::default()).unwrap();
        let cb = canonical_basis(&ct, t.algebra()).unwrap();
        (t, cb)
    }

    #[test]
    fn trivial_group_is_exact() {
        let (t, cb) = setup(GroupName::Cyclic, 1);
        let r = factorization_check(&t, &cb, Caps::new(5, 2), 1e-15).unwrap();
        assert_eq!(r.max_residual_magnitude, 0.0);
    }

    #[test]
    fn z2_and_s3() {
        let (t, cb) = setup(GroupName::Cyclic, 2);
        let r = factorization_check(&t, &cb, Caps::new(6, 2), 1e-9).unwrap();
        assert!(r.checked > 0);
        let (t, cb) = setup(GroupName::Symmetric, 3);
        factorization_check(&t, &cb, Caps::new(4, 1), 1e-8).unwrap();
    }

    #[test]
    fn wrong_potential_fails() {
        let (t, cb) = setup(GroupName::Cyclic, 3);
        let bad = canonical_transform(&point_potential(Caps::new(4, 1), 3).unwrap(), &cb).unwrap();
        let good = canonical_transform(&t.potential(Caps::new(4, 1), PotentialBasis::Class).unwrap(), &cb).unwrap();
        assert!(bad.max_deviation(&good).0 > 1e-3);
    }
}
