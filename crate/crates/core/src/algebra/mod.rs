//! The state space `H`, spanned by one basis vector per conjugacy class.
//!
//! `H` is identified with the centre of the group algebra by sending the
//! basis vector of a class to the sum of its elements. The metric pairs a
//! class with its inverse class, weighted by the inverse centralizer order,
//! and the product has the class-multiplication coefficients as structure
//! constants. Both are kept in exact rationals.

mod canonical;
mod characters;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::group::{conjugacy_data, ConjugacyData, GroupTable};
use crate::scalar::{Rational, Scalar};

pub use canonical::{canonical_basis, to_canonical_coordinates, CanonicalBasis};
pub use characters::{character_table, CharacterOptions, CharacterTable};

/// Coefficients of an element of `H` in the class basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassVector<S> {
    pub coeffs: Vec<S>,
}

impl<S: Scalar> ClassVector<S> {
    pub fn zero(r: usize) -> Self {
        ClassVector {
            coeffs: vec![S::zero(); r],
        }
    }

    /// Indicator of class `k`.
    pub fn basis(r: usize, k: usize) -> Self {
        let mut v = Self::zero(r);
        v.coeffs[k] = S::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(ClassVector {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        })
    }

    pub fn scale(&self, c: &S) -> Self {
        ClassVector {
            coeffs: self.coeffs.iter().map(|a| a.mul_ref(c)).collect(),
        }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> ClassVector<T> {
        ClassVector {
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    /// Largest coefficient magnitude of `self - other`.
    pub fn distance(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a.clone() - b.clone()).magnitude())
            .fold(0.0, f64::max)
    }
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Frobenius algebra structure of `H` for one group.
#[derive(Debug, Clone)]
pub struct ClassAlgebra {
    conj: ConjugacyData,
    // a[i][j][k] flattened
    structure: Vec<u64>,
}

impl ClassAlgebra {
    pub fn new(g: &GroupTable) -> Self {
        Self::from_conjugacy(g, conjugacy_data(g))
    }

    pub fn from_conjugacy(g: &GroupTable, conj: ConjugacyData) -> Self {
        let r = conj.num_classes();
        let mut structure = vec![0u64; r * r * r];
        for (k, &z) in conj.representative.iter().enumerate() {
            for x in 0..g.order() {
                let y = g.mul(g.inv(x), z);
                let (i, j) = (conj.class_of[x], conj.class_of[y]);
                structure[(i * r + j) * r + k] += 1;
            }
        }
        ClassAlgebra { conj, structure }
    }

    pub fn conjugacy(&self) -> &ConjugacyData {
        &self.conj
    }

    /// Dimension of `H`, the number of conjugacy classes.
    pub fn dim(&self) -> usize {
        self.conj.num_classes()
    }

    pub fn group_order(&self) -> usize {
        self.conj.group_order()
    }

    /// `#{(x, y) ∈ C_i × C_j : x y = representative of C_k}`
    pub fn class_mult_coefficient(&self, i: usize, j: usize, k: usize) -> u64 {
        let r = self.dim();
        self.structure[(i * r + j) * r + k]
    }

    pub fn metric_entry(&self, j: usize, k: usize) -> Rational {
        if self.conj.inverse_class[j] == k {
            Rational::new(BigInt::one(), BigInt::from(self.conj.class_centralizer(j)))
        } else {
            Rational::zero()
        }
    }

    pub fn inverse_metric_entry(&self, j: usize, k: usize) -> Rational {
        if self.conj.inverse_class[j] == k {
            Rational::from_integer(BigInt::from(self.conj.class_centralizer(j)))
        } else {
            Rational::zero()
        }
    }

    pub fn metric(&self) -> Vec<Vec<Rational>> {
        let r = self.dim();
        (0..r)
            .map(|j| (0..r).map(|k| self.metric_entry(j, k)).collect())
            .collect()
    }

    pub fn inverse_metric(&self) -> Vec<Vec<Rational>> {
        let r = self.dim();
        (0..r)
            .map(|j| (0..r).map(|k| self.inverse_metric_entry(j, k)).collect())
            .collect()
    }

    /// Unit of the quantum product, the identity-class vector.
    pub fn unit<S: Scalar>(&self) -> ClassVector<S> {
        ClassVector::basis(self.dim(), 0)
    }

    pub fn pairing<S: Scalar>(&self, u: &ClassVector<S>, v: &ClassVector<S>) -> Result<S> {
        check_dims(self.dim(), u.dim())?;
        check_dims(self.dim(), v.dim())?;
        let mut acc = S::zero();
        for j in 0..self.dim() {
            let k = self.conj.inverse_class[j];
            if u.coeffs[j].is_zero() {
                continue;
            }
            let w = S::from_rational(&self.metric_entry(j, k));
            acc.add_assign_ref(&u.coeffs[j].mul_ref(&v.coeffs[k]).mul_ref(&w));
        }
        Ok(acc)
    }

    pub fn quantum_product<S: Scalar>(
        &self,
        u: &ClassVector<S>,
        v: &ClassVector<S>,
    ) -> Result<ClassVector<S>> {
        let r = self.dim();
        check_dims(r, u.dim())?;
        check_dims(r, v.dim())?;
        let mut out: ClassVector<S> = ClassVector::zero(r);
        for i in 0..r {
            if u.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..r {
                if v.coeffs[j].is_zero() {
                    continue;
                }
                let uv = u.coeffs[i].mul_ref(&v.coeffs[j]);
                for k in 0..r {
                    let a = self.class_mult_coefficient(i, j, k);
                    if a != 0 {
                        out.coeffs[k].add_assign_ref(&uv.mul_ref(&S::from_int(a as i64)));
                    }
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupName;
    use crate::scalar::{int, rational};

    fn algebra(name: GroupName, n: usize) -> (GroupTable, ClassAlgebra) {
        let g = GroupTable::named(name, n).unwrap();
        let a = ClassAlgebra::new(&g);
        (g, a)
    }

    #[test]
    fn metric_values() {
        let (_, s3) = algebra(GroupName::Symmetric, 3);
        assert_eq!(s3.metric_entry(1, 1), rational(1, 2));
        assert_eq!(s3.metric_entry(0, 0), rational(1, 6));
        let (g, z3) = algebra(GroupName::Cyclic, 3);
        let w = 1;
        let w2 = g.mul(1, 1);
        let (cw, cw2) = (z3.conjugacy().class_of[w], z3.conjugacy().class_of[w2]);
        assert_eq!(z3.metric_entry(cw, cw2), rational(1, 3));
        assert_eq!(z3.metric_entry(cw, cw), int(0));
    }

    #[test]
    fn inverse_metric_inverts() {
        for (name, n) in [
            (GroupName::Symmetric, 3),
            (GroupName::Quaternion, 0),
            (GroupName::Cyclic, 1),
        ] {
            let (_, a) = algebra(name, n);
            let (m, mi) = (a.metric(), a.inverse_metric());
            let r = a.dim();
            for i in 0..r {
                for k in 0..r {
                    let s: Rational = (0..r).map(|j| &m[i][j] * &mi[j][k]).sum();
                    assert_eq!(s, if i == k { int(1) } else { int(0) });
                }
            }
        }
        let (_, s3) = algebra(GroupName::Symmetric, 3);
        assert_eq!(s3.inverse_metric_entry(1, 1), int(2));
    }

    #[test]
    fn structure_constants() {
        let (_, s3) = algebra(GroupName::Symmetric, 3);
        assert_eq!(s3.class_mult_coefficient(1, 1, 0), 3);
        assert_eq!(s3.class_mult_coefficient(1, 1, 2), 3);
        for j in 0..3 {
            for k in 0..3 {
                assert_eq!(s3.class_mult_coefficient(0, j, k), u64::from(j == k));
            }
        }
    }

    #[test]
    fn products() {
        let (_, s3) = algebra(GroupName::Symmetric, 3);
        let t = ClassVector::<Rational>::basis(3, 1);
        let tt = s3.quantum_product(&t, &t).unwrap();
        assert_eq!(tt.coeffs, vec![int(3), int(0), int(3)]);
        let (_, z2) = algebra(GroupName::Cyclic, 2);
        let s = ClassVector::<Rational>::basis(2, 1);
        assert_eq!(z2.quantum_product(&s, &s).unwrap(), ClassVector::basis(2, 0));
        let bad = ClassVector::<Rational>::basis(3, 0);
        assert!(matches!(
            z2.quantum_product(&s, &bad),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
