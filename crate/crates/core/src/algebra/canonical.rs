use num_bigint::BigInt;
use num_complex::Complex64;

use super::{CharacterTable, ClassAlgebra, ClassVector};
use crate::error::{Error, Result};
use crate::scalar::{rational_to_f64, Rational, Scalar};

/// Orthogonal idempotents `f_α` of `H` and their self-pairings `ν_α`.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalBasis {
    /// `f_α` in the class basis.
    pub vectors: Vec<ClassVector<Complex64>>,
    /// `ν_α = (χ_α(1) / |G|)²`, exact.
    pub nus: Vec<Rational>,
    pub tolerance: f64,
}

impl CanonicalBasis {
    pub fn dim(&self) -> usize {
        self.nus.len()
    }

    /// Matrix with `[m][α]` the coefficient of class `m` in `f_α`.
    pub fn class_coefficients(&self) -> Vec<Vec<Complex64>> {
        let r = self.dim();
        (0..r)
            .map(|m| (0..r).map(|a| self.vectors[a].coeffs[m]).collect())
            .collect()
    }

    pub fn nu_f64(&self, alpha: usize) -> f64 {
        rational_to_f64(&self.nus[alpha])
    }

    /// Worst violation of each defining identity: idempotency and
    /// orthogonality under `∗`, the metric values, and `Σ f_α = 1`.
    pub fn residuals(&self, algebra: &ClassAlgebra) -> Result<[(&'static str, f64); 3]> {
        let r = self.dim();
        let mut product: f64 = 0.0;
        let mut metric: f64 = 0.0;
        for a in 0..r {
            for b in 0..r {
                let fab = algebra.quantum_product(&self.vectors[a], &self.vectors[b])?;
                let target = if a == b {
                    self.vectors[a].clone()
                } else {
                    ClassVector::zero(r)
                };
                product = product.max(fab.distance(&target));
                let eta = algebra.pairing(&self.vectors[a], &self.vectors[b])?;
                let target = if a == b { self.nu_f64(a) } else { 0.0 };
                metric = metric.max((eta - target).norm());
            }
        }
        let mut sum = ClassVector::zero(r);
        for f in &self.vectors {
            sum = sum.add(f)?;
        }
        let unit = sum.distance(&algebra.unit());
        Ok([("idempotent", product), ("metric", metric), ("unit", unit)])
    }
}

/// `f_α` has class-`k` coefficient `(χ_α(1)/|G|) · χ_α(g_k⁻¹)`.
pub fn canonical_basis(ct: &CharacterTable, algebra: &ClassAlgebra) -> Result<CanonicalBasis> {
    let r = algebra.dim();
    if ct.num_irreducibles() != r {
        return Err(Error::DimensionMismatch {
            expected: r,
            found: ct.num_irreducibles(),
        });
    }
    let order = algebra.group_order() as f64;
    let inverse = &algebra.conjugacy().inverse_class;
    let vectors = (0..r)
        .map(|a| {
            let scale = ct.degrees[a] as f64 / order;
            ClassVector {
                coeffs: (0..r).map(|k| ct.values[a][inverse[k]] * scale).collect(),
            }
        })
        .collect();
    let nus = ct
        .degrees
        .iter()
        .map(|&d| {
            let q = Rational::new(BigInt::from(d), BigInt::from(algebra.group_order()));
            &q * &q
        })
        .collect();
    let cb = CanonicalBasis {
        vectors,
        nus,
        tolerance: ct.tolerance,
    };
    for (check, residual) in cb.residuals(algebra)? {
        if residual > cb.tolerance {
            return Err(Error::IdempotencyCheckFailed {
                check,
                residual,
                tolerance: cb.tolerance,
            });
        }
    }
    Ok(cb)
}

/// Coordinates `c_α` with `v = Σ c_α f_α`, via `c_α = η(v, f_α) / ν_α`.
pub fn to_canonical_coordinates<S: Scalar>(
    v: &ClassVector<S>,
    cb: &CanonicalBasis,
    algebra: &ClassAlgebra,
) -> Result<Vec<Complex64>> {
    let vc = v.map(|x| x.to_complex());
    let coords = (0..cb.dim())
        .map(|a| Ok(algebra.pairing(&vc, &cb.vectors[a])? / cb.nu_f64(a)))
        .collect::<Result<Vec<_>>>()?;
    let mut rebuilt = ClassVector::zero(cb.dim());
    for (c, f) in coords.iter().zip(&cb.vectors) {
        rebuilt = rebuilt.add(&f.scale(c))?;
    }
    let residual = rebuilt.distance(&vc);
    let scale = vc.coeffs.iter().map(|x| x.norm()).fold(1.0, f64::max);
    if residual > cb.tolerance * scale {
        return Err(Error::ReconstructionFailed { residual });
    }
    Ok(coords)
}
