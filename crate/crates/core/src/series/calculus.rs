use std::collections::BTreeMap;

use super::{Monomial, SeriesVar, TruncatedSeries};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Lowest `λ` exponent `exp` may produce from a degree-`degree` input.
pub fn exp_lambda_floor(degree: u32) -> i32 {
    -2 * degree.div_ceil(3) as i32
}

impl<S: Scalar> TruncatedSeries<S> {
    /// `Σ_k s^k / k!`, truncated.
    ///
    /// Requires no constant term and genus-zero (`λ^{-2}`) terms of degree at
    /// least 3, so that each power raises the degree and the `λ` floor can be
    /// widened to a finite bound in advance.
    pub fn exponential(&self) -> Result<Self> {
        for (m, e, _) in self.iter() {
            let d = m.degree();
            if d == 0 {
                return Err(Error::PreconditionViolated(
                    "exponential of a series with a constant term".into(),
                ));
            }
            if e < -2 || (e == -2 && d < 3) {
                return Err(Error::PreconditionViolated(format!(
                    "term {m} λ^{e} has too low a degree for its genus"
                )));
            }
        }
        let mut caps = self.caps;
        caps.lambda_floor = caps.lambda_floor.min(exp_lambda_floor(caps.degree));
        let s = self.recap(caps)?;
        // homogeneous recurrence: k Z_k = Σ_j j s_j Z_{k-j}
        let dmax = caps.degree;
        let parts: Vec<TruncatedSeries<S>> = (0..=dmax).map(|d| s.homogeneous_part(d)).collect();
        let mut z: Vec<TruncatedSeries<S>> = vec![TruncatedSeries::one(caps)];
        for k in 1..=dmax {
            let mut zk = TruncatedSeries::zero(caps);
            for j in 1..=k {
                if parts[j as usize].is_zero() || z[(k - j) as usize].is_zero() {
                    continue;
                }
                let prod = parts[j as usize].mul(&z[(k - j) as usize])?;
                zk = zk.add(&prod.scale(&S::from_int(j as i64)))?;
            }
            z.push(zk.scale(&(S::one() / S::from_int(k as i64))));
        }
        let mut out = TruncatedSeries::zero(caps);
        for zk in &z {
            out = out.add(zk)?;
        }
        out.watermark = self.watermark;
        Ok(out)
    }

    /// `∂s/∂v`; the watermark drops by one.
    pub fn partial_derivative(&self, v: SeriesVar) -> Self {
        let mut out = TruncatedSeries::zero(self.caps);
        out.watermark = self.watermark - 1;
        out.clipped = self.clipped;
        for (m, l) in &self.terms {
            if let Some((q, e)) = m.div_var(v) {
                let factor = S::from_int(e as i64);
                let laurent = l.iter().map(|(x, c)| (*x, c.mul_ref(&factor))).collect();
                out.terms.insert(q, laurent);
            }
        }
        out
    }

    pub fn second_partial(&self, v1: SeriesVar, v2: SeriesVar) -> Self {
        self.partial_derivative(v1).partial_derivative(v2)
    }

    /// Mixed partial derivative along each listed variable in turn.
    pub fn partial_derivatives(&self, vars: &[SeriesVar]) -> Self {
        vars.iter()
            .fold(self.clone(), |acc, &v| acc.partial_derivative(v))
    }

    /// Multiplies each variable by its factor (absent variables keep 1).
    pub fn substitute_rescale(&self, factors: &BTreeMap<SeriesVar, S>) -> Result<Self> {
        if factors.values().any(|f| f.is_negligible()) {
            return Err(Error::PreconditionViolated("zero rescaling factor".into()));
        }
        let mut out = TruncatedSeries::zero(self.caps);
        out.watermark = self.watermark;
        out.clipped = self.clipped;
        for (m, l) in &self.terms {
            let mut w = S::one();
            for &(v, e) in m.pairs() {
                if let Some(f) = factors.get(&v) {
                    for _ in 0..e {
                        w = w.mul_ref(f);
                    }
                }
            }
            let laurent = l.iter().map(|(x, c)| (*x, c.mul_ref(&w))).collect();
            out.terms.insert(m.clone(), laurent);
        }
        Ok(out)
    }

    /// Replaces every `t_a^m` by `Σ_{m'} matrix[m][m'] t_a^{m'}`, at every level.
    pub fn substitute_linear(&self, matrix: &[Vec<S>]) -> Result<Self> {
        let r = matrix.len();
        if let Some(row) = matrix.iter().find(|row| row.len() != r) {
            return Err(Error::DimensionMismatch {
                expected: r,
                found: row.len(),
            });
        }
        if let Some(slot) = self.monomials().filter_map(Monomial::max_slot).max() {
            if slot as usize >= r {
                return Err(Error::DimensionMismatch {
                    expected: r,
                    found: slot as usize + 1,
                });
            }
        }
        if !is_invertible(matrix) {
            return Err(Error::SingularMatrix);
        }
        let mut out = TruncatedSeries::zero(self.caps);
        out.watermark = self.watermark;
        out.clipped = self.clipped;
        for (m, l) in &self.terms {
            let mut expansion: BTreeMap<Monomial, S> = BTreeMap::from([(Monomial::one(), S::one())]);
            for v in m.vars() {
                let mut next: BTreeMap<Monomial, S> = BTreeMap::new();
                for (q, c) in &expansion {
                    for (slot, a) in matrix[v.slot as usize].iter().enumerate() {
                        if a.is_zero() {
                            continue;
                        }
                        let key = q.mul_var(SeriesVar::new(v.level, slot as u32));
                        next.entry(key)
                            .or_insert_with(S::zero)
                            .add_assign_ref(&c.mul_ref(a));
                    }
                }
                expansion = next;
            }
            for (q, c) in expansion {
                for (e, x) in l {
                    out.insert_unchecked_sum(&q, *e, &c.mul_ref(x))?;
                }
            }
        }
        Ok(out)
    }
}

/// Gaussian elimination with partial pivoting on magnitude.
fn is_invertible<S: Scalar>(matrix: &[Vec<S>]) -> bool {
    let n = matrix.len();
    let mut a: Vec<Vec<S>> = matrix.to_vec();
    for col in 0..n {
        let pivot = (col..n)
            .filter(|&i| !a[i][col].is_negligible())
            .max_by(|&i, &j| {
                a[i][col]
                    .magnitude()
                    .partial_cmp(&a[j][col].magnitude())
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
        let Some(p) = pivot else {
            return false;
        };
        a.swap(col, p);
        let inv = S::one() / a[col][col].clone();
        for i in col + 1..n {
            if a[i][col].is_zero() {
                continue;
            }
            let f = a[i][col].mul_ref(&inv);
            for j in col..n {
                let sub = f.mul_ref(&a[col][j]);
                a[i][j] = a[i][j].clone() - sub;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rational, Rational};
    use crate::series::Caps;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn t(level: u32) -> SeriesVar {
        SeriesVar::new(level, 0)
    }

    fn mono(vars: &[SeriesVar]) -> Monomial {
        Monomial::from_vars(vars.iter().copied())
    }

    fn naive_exp(s: &TruncatedSeries<Rational>) -> TruncatedSeries<Rational> {
        let mut caps = *s.caps();
        caps.lambda_floor = exp_lambda_floor(caps.degree);
        let s = s.recap(caps).unwrap();
        let mut total = TruncatedSeries::one(caps);
        let mut power = TruncatedSeries::one(caps);
        for k in 1..=caps.degree as i64 {
            power = power.mul(&s).unwrap().scale(&rational(1, k));
            total = total.add(&power).unwrap();
        }
        total
    }

    #[test]
    fn exp_of_zero_and_linear() {
        let caps = Caps::new(3, 1);
        let zero = TruncatedSeries::<Rational>::zero(caps);
        assert_eq!(zero.exponential().unwrap().recap(caps).unwrap(), TruncatedSeries::one(caps));
        let c = rational(2, 3);
        let s = TruncatedSeries::term(caps, mono(&[t(1)]), 0, c.clone()).unwrap();
        let z = s.exponential().unwrap();
        for k in 0..=3u32 {
            let m = Monomial::from_pairs([(t(1), k)]);
            let fact: i64 = (1..=k as i64).product();
            let mut want = int(1);
            for _ in 0..k {
                want *= &c;
            }
            assert_eq!(z.coefficient(&m, 0), want / int(fact));
        }
    }

    #[test]
    fn exp_of_genus_zero_cube() {
        let caps = Caps::new(6, 0);
        let s = TruncatedSeries::term(caps, mono(&[t(0); 3]), -2, rational(1, 6)).unwrap();
        let z = s.exponential().unwrap();
        assert_eq!(z.len(), 3);
        assert_eq!(z.coefficient(&Monomial::one(), 0), int(1));
        assert_eq!(z.coefficient(&mono(&[t(0); 3]), -2), rational(1, 6));
        assert_eq!(z.coefficient(&mono(&[t(0); 6]), -4), rational(1, 72));
    }

    #[test]
    fn exp_preconditions() {
        let caps = Caps::new(4, 1);
        let constant = TruncatedSeries::<Rational>::one(caps);
        assert!(matches!(
            constant.exponential(),
            Err(Error::PreconditionViolated(_))
        ));
        let low = TruncatedSeries::term(caps, mono(&[t(0), t(0)]), -2, int(1)).unwrap();
        assert!(matches!(low.exponential(), Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn derivatives() {
        let caps = Caps::new(4, 0);
        let sq = TruncatedSeries::term(caps, mono(&[t(0), t(0)]), 0, int(1)).unwrap();
        let d = sq.partial_derivative(t(0));
        assert_eq!(d.coefficient(&mono(&[t(0)]), 0), int(2));
        assert_eq!(d.watermark(), 3);
        let cube = TruncatedSeries::term(caps, mono(&[t(1); 3]), 0, int(1)).unwrap();
        assert!(cube.partial_derivative(t(0)).is_zero());
        let quart = TruncatedSeries::term(caps, mono(&[t(0); 4]), 0, rational(1, 24)).unwrap();
        let dd = quart.second_partial(t(0), t(0));
        assert_eq!(dd.coefficient(&mono(&[t(0); 2]), 0), rational(1, 2));
        assert_eq!(dd.watermark(), 2);
    }

    #[test]
    fn rescale() {
        let caps = Caps::new(3, 0);
        let cube = TruncatedSeries::term(caps, mono(&[t(0); 3]), 0, int(1)).unwrap();
        let f = BTreeMap::from([(t(0), int(2))]);
        let r = cube.substitute_rescale(&f).unwrap();
        assert_eq!(r.coefficient(&mono(&[t(0); 3]), 0), int(8));
        let ones = BTreeMap::from([(t(0), int(1)), (t(1), int(1))]);
        assert_eq!(cube.substitute_rescale(&ones).unwrap(), cube);
        let zero = BTreeMap::from([(t(0), int(0))]);
        assert!(cube.substitute_rescale(&zero).is_err());
    }

    #[test]
    fn linear_substitutions() {
        let caps = Caps::new(3, 0);
        let a = SeriesVar::new(0, 0);
        let b = SeriesVar::new(1, 1);
        let s = TruncatedSeries::term(caps, mono(&[a, a, b]), 0, int(5)).unwrap();
        let id = vec![vec![int(1), int(0)], vec![int(0), int(1)]];
        assert_eq!(s.substitute_linear(&id).unwrap(), s);
        let swap = vec![vec![int(0), int(1)], vec![int(1), int(0)]];
        let swapped = s.substitute_linear(&swap).unwrap();
        let want = mono(&[SeriesVar::new(0, 1), SeriesVar::new(0, 1), SeriesVar::new(1, 0)]);
        assert_eq!(swapped.coefficient(&want, 0), int(5));
        let singular = vec![vec![int(1), int(1)], vec![int(2), int(2)]];
        assert!(matches!(s.substitute_linear(&singular), Err(Error::SingularMatrix)));
    }

    #[test]
    fn z2_change_of_basis_round_trip() {
        let caps = Caps::new(4, 1);
        let x = SeriesVar::new(0, 0);
        let y = SeriesVar::new(1, 1);
        let mut s = TruncatedSeries::<Complex64>::zero(caps);
        s.insert(mono(&[x, y, y]), 0, Complex64::new(0.3, 0.0)).unwrap();
        s.insert(mono(&[x, x, x]), -2, Complex64::new(-1.5, 0.0)).unwrap();
        let h = Complex64::new(0.5, 0.0);
        let forward = vec![vec![h, h], vec![h, -h]];
        let two = Complex64::new(1.0, 0.0);
        let back = vec![vec![two, two], vec![two, -two]];
        let round = s.substitute_linear(&forward).unwrap().substitute_linear(&back).unwrap();
        assert!(s.max_deviation(&round).0 < 1e-12);
    }

    fn arb_series(caps: Caps) -> impl Strategy<Value = TruncatedSeries<Rational>> {
        let term = (
            proptest::collection::vec((0u32..2, 0u32..2), 1..=3),
            prop_oneof![Just(0i32), Just(2i32)],
            -5i64..=5,
            1i64..=4,
        );
        proptest::collection::vec(term, 0..5).prop_map(move |terms| {
            let mut s = TruncatedSeries::zero(caps);
            for (vars, e, n, d) in terms {
                let m = Monomial::from_vars(vars.into_iter().map(|(a, b)| SeriesVar::new(a, b)));
                s.insert(m, e, rational(n, d)).unwrap();
            }
            s
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn ring_laws(a in arb_series(Caps::new(5, 2)), b in arb_series(Caps::new(5, 2)), c in arb_series(Caps::new(5, 2))) {
            let ab_c = a.mul(&b).unwrap().mul(&c).unwrap();
            let a_bc = a.mul(&b.mul(&c).unwrap()).unwrap();
            prop_assert_eq!(ab_c.recap(*a.caps()).unwrap().iter().count(), a_bc.iter().count());
            prop_assert_eq!(ab_c.max_deviation(&a_bc).0, 0.0);
            let lhs = a.mul(&b.add(&c).unwrap()).unwrap();
            let rhs = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
            prop_assert_eq!(lhs.max_deviation(&rhs).0, 0.0);
            prop_assert_eq!(a.mul(&b).unwrap().max_deviation(&b.mul(&a).unwrap()).0, 0.0);
        }

        #[test]
        fn exp_is_a_homomorphism(a in arb_series(Caps::new(5, 2)), b in arb_series(Caps::new(5, 2))) {
            let ea = a.exponential().unwrap();
            let eb = b.exponential().unwrap();
            let eab = a.add(&b).unwrap().exponential().unwrap();
            let prod = ea.mul(&eb).unwrap();
            prop_assert_eq!(eab.max_deviation(&prod).0, 0.0);
            prop_assert_eq!(ea.max_deviation(&naive_exp(&a)).0, 0.0);
        }

        #[test]
        fn derivative_of_exp(a in arb_series(Caps::new(5, 2)), lvl in 0u32..2, slot in 0u32..2) {
            let v = SeriesVar::new(lvl, slot);
            let ea = a.exponential().unwrap();
            let lhs = ea.partial_derivative(v);
            let da = a.partial_derivative(v).recap(*ea.caps()).unwrap();
            let rhs = da.mul(&ea).unwrap();
            let w = lhs.watermark().min(rhs.watermark()) as u32;
            let diff = lhs.truncate_degree(w).max_deviation(&rhs.truncate_degree(w)).0;
            prop_assert_eq!(diff, 0.0);
        }
    }
}
