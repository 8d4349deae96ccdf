//! Truncated power series in descendant variables `t_a^m`, with
//! coefficients that are Laurent polynomials in the genus parameter `λ`.
//!
//! A series is truncated by total degree in the `t` variables and by a
//! window of `λ` exponents. Products that land above the window are
//! dropped and counted; products below the floor are an error, since they
//! mean the caller sized the window wrong. Each series also carries a
//! watermark: the degree up to which its coefficients are known to be
//! exact. Differentiation lowers it by one.

mod calculus;

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// The variable `t_level^slot`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SeriesVar {
    pub level: u32,
    pub slot: u32,
}

impl SeriesVar {
    pub const fn new(level: u32, slot: u32) -> Self {
        SeriesVar { level, slot }
    }
}

impl fmt::Display for SeriesVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t{}.{}", self.level, self.slot)
    }
}

/// Product of variables with positive exponents, sorted by variable.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<(SeriesVar, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: SeriesVar) -> Self {
        Monomial(vec![(v, 1)])
    }

    /// Collects repeated variables and drops zero exponents.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (SeriesVar, u32)>) -> Self {
        let mut map: BTreeMap<SeriesVar, u32> = BTreeMap::new();
        for (v, e) in pairs {
            *map.entry(v).or_default() += e;
        }
        Monomial(map.into_iter().filter(|&(_, e)| e > 0).collect())
    }

    pub fn from_vars(vars: impl IntoIterator<Item = SeriesVar>) -> Self {
        Self::from_pairs(vars.into_iter().map(|v| (v, 1)))
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn exponent(&self, v: SeriesVar) -> u32 {
        self.0
            .iter()
            .find(|(w, _)| *w == v)
            .map_or(0, |&(_, e)| e)
    }

    pub fn pairs(&self) -> &[(SeriesVar, u32)] {
        &self.0
    }

    /// Each variable repeated by its exponent.
    pub fn vars(&self) -> impl Iterator<Item = SeriesVar> + '_ {
        self.0
            .iter()
            .flat_map(|&(v, e)| std::iter::repeat_n(v, e as usize))
    }

    pub fn max_level(&self) -> u32 {
        self.0.iter().map(|(v, _)| v.level).max().unwrap_or(0)
    }

    pub fn max_slot(&self) -> Option<u32> {
        self.0.iter().map(|(v, _)| v.slot).max()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a, b) = (self.0[i], other.0[j]);
            match a.0.cmp(&b.0) {
                std::cmp::Ordering::Less => {
                    out.push(a);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a.0, a.1 + b.1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    pub fn mul_var(&self, v: SeriesVar) -> Monomial {
        self.mul(&Monomial::var(v))
    }

    /// `self / v` together with the exponent of `v` in `self`, if positive.
    pub fn div_var(&self, v: SeriesVar) -> Option<(Monomial, u32)> {
        let pos = self.0.iter().position(|(w, _)| *w == v)?;
        let e = self.0[pos].1;
        let mut out = self.0.clone();
        if e == 1 {
            out.remove(pos);
        } else {
            out[pos].1 -= 1;
        }
        Some((Monomial(out), e))
    }

    /// Multiplicity factor `∏ e_v!` of the monomial.
    pub fn symmetry_factor(&self) -> u64 {
        self.0
            .iter()
            .map(|&(_, e)| (1..=e as u64).product::<u64>())
            .product()
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.0
                .iter()
                .map(|(v, e)| json!([v.level, v.slot, e]))
                .collect(),
        )
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(v, e)| if *e == 1 { v.to_string() } else { format!("{v}^{e}") })
            .collect();
        f.write_str(&parts.join("*"))
    }
}

/// Truncation parameters shared by all series in one computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Maximum total degree in the `t` variables.
    pub degree: u32,
    /// Maximum genus; the `λ` ceiling is `2·genus − 2`, but never below 0
    /// so that constants stay representable.
    pub genus: u32,
    /// Maximum descendant level.
    pub level: u32,
    /// Lowest representable `λ` exponent.
    pub lambda_floor: i32,
}

impl Caps {
    /// Level cap defaults to `3·genus − 3 + degree`, the largest level a
    /// nonzero correlator within these caps can carry.
    pub fn new(degree: u32, genus: u32) -> Self {
        let natural = (3 * genus as i64 - 3 + degree as i64).max(1) as u32;
        Caps {
            degree,
            genus,
            level: natural,
            lambda_floor: -2,
        }
    }

    pub fn with_level(mut self, level: u32) -> Self {
        self.level = level;
        self
    }

    pub fn with_lambda_floor(mut self, floor: i32) -> Self {
        self.lambda_floor = floor;
        self
    }

    pub fn lambda_ceiling(&self) -> i32 {
        (2 * self.genus as i32 - 2).max(0)
    }
}

type Laurent<S> = BTreeMap<i32, S>;

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries<S> {
    caps: Caps,
    terms: BTreeMap<Monomial, Laurent<S>>,
    watermark: i32,
    clipped: usize,
}

impl<S: Scalar> TruncatedSeries<S> {
    pub fn zero(caps: Caps) -> Self {
        TruncatedSeries {
            caps,
            terms: BTreeMap::new(),
            watermark: caps.degree as i32,
            clipped: 0,
        }
    }

    pub fn one(caps: Caps) -> Self {
        Self::constant(caps, S::one())
    }

    pub fn constant(caps: Caps, c: S) -> Self {
        let mut s = Self::zero(caps);
        s.insert(Monomial::one(), 0, c).expect("λ^0 is always representable");
        s
    }

    /// A single term `c · m · λ^lambda`.
    pub fn term(caps: Caps, m: Monomial, lambda: i32, c: S) -> Result<Self> {
        let mut s = Self::zero(caps);
        s.insert(m, lambda, c)?;
        Ok(s)
    }

    pub fn caps(&self) -> &Caps {
        &self.caps
    }

    /// Degree up to which the coefficients are exact.
    pub fn watermark(&self) -> i32 {
        self.watermark
    }

    pub fn set_watermark(&mut self, w: i32) {
        self.watermark = w;
    }

    /// Number of terms dropped above the `λ` ceiling so far.
    pub fn clipped(&self) -> usize {
        self.clipped
    }

    /// Number of stored `(monomial, λ-exponent)` pairs.
    pub fn len(&self) -> usize {
        self.terms.values().map(BTreeMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Monomial, i32, &S)> {
        self.terms
            .iter()
            .flat_map(|(m, l)| l.iter().map(move |(e, c)| (m, *e, c)))
    }

    pub fn monomials(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.keys()
    }

    pub fn coefficient(&self, m: &Monomial, lambda: i32) -> S {
        self.terms
            .get(m)
            .and_then(|l| l.get(&lambda))
            .cloned()
            .unwrap_or_else(S::zero)
    }

    /// Adds `c · m · λ^lambda`, applying the truncation rules.
    pub fn insert(&mut self, m: Monomial, lambda: i32, c: S) -> Result<()> {
        if c.is_zero() || m.degree() > self.caps.degree {
            return Ok(());
        }
        if lambda % 2 != 0 {
            return Err(Error::PreconditionViolated(format!(
                "odd λ exponent {lambda}"
            )));
        }
        if lambda < self.caps.lambda_floor {
            return Err(Error::GenusUnderflow {
                exponent: lambda,
                floor: self.caps.lambda_floor,
            });
        }
        if lambda > self.caps.lambda_ceiling() {
            self.clipped += 1;
            return Ok(());
        }
        let level = m.max_level();
        if level > self.caps.level {
            return Err(Error::LevelCapExceeded {
                level,
                cap: self.caps.level,
            });
        }
        let laurent = self.terms.entry(m.clone()).or_default();
        match laurent.get_mut(&lambda) {
            Some(existing) => {
                existing.add_assign_ref(&c);
                if existing.is_zero() {
                    laurent.remove(&lambda);
                    if laurent.is_empty() {
                        self.terms.remove(&m);
                    }
                }
            }
            None => {
                laurent.insert(lambda, c);
            }
        }
        Ok(())
    }

    fn insert_unchecked_sum(&mut self, m: &Monomial, lambda: i32, c: &S) -> Result<()> {
        if let Some(l) = self.terms.get_mut(m) {
            if let Some(existing) = l.get_mut(&lambda) {
                existing.add_assign_ref(c);
                if existing.is_zero() {
                    l.remove(&lambda);
                    if l.is_empty() {
                        self.terms.remove(m);
                    }
                }
                return Ok(());
            }
        }
        self.insert(m.clone(), lambda, c.clone())
    }

    fn check_caps(&self, other: &Self) -> Result<()> {
        if self.caps != other.caps {
            return Err(Error::CapMismatch);
        }
        Ok(())
    }

    /// Same terms under different caps; terms that no longer fit are
    /// dropped or rejected by the usual rules.
    pub fn recap(&self, caps: Caps) -> Result<Self> {
        let mut out = Self::zero(caps);
        out.watermark = self.watermark.min(caps.degree as i32);
        out.clipped = self.clipped;
        for (m, e, c) in self.iter() {
            out.insert(m.clone(), e, c.clone())?;
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_caps(other)?;
        let mut out = self.clone();
        for (m, e, c) in other.iter() {
            out.insert_unchecked_sum(m, e, c)?;
        }
        out.watermark = self.watermark.min(other.watermark);
        out.clipped = self.clipped + other.clipped;
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-S::one())
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = Self::zero(self.caps);
        out.watermark = self.watermark;
        out.clipped = self.clipped;
        if c.is_zero() {
            return out;
        }
        for (m, l) in &self.terms {
            let scaled: Laurent<S> = l
                .iter()
                .map(|(e, x)| (*e, x.mul_ref(c)))
                .filter(|(_, x)| !x.is_zero())
                .collect();
            if !scaled.is_empty() {
                out.terms.insert(m.clone(), scaled);
            }
        }
        out
    }

    /// Multiplies by `λ^shift`.
    pub fn mul_lambda(&self, shift: i32) -> Result<Self> {
        let mut out = Self::zero(self.caps);
        out.watermark = self.watermark;
        out.clipped = self.clipped;
        for (m, e, c) in self.iter() {
            out.insert(m.clone(), e + shift, c.clone())?;
        }
        Ok(out)
    }

    /// Multiplies by the variable `v`.
    pub fn mul_var(&self, v: SeriesVar) -> Result<Self> {
        let mut out = Self::zero(self.caps);
        out.watermark = (self.watermark + 1).min(self.caps.degree as i32);
        out.clipped = self.clipped;
        for (m, l) in &self.terms {
            if m.degree() + 1 > self.caps.degree {
                continue;
            }
            let mv = m.mul_var(v);
            for (e, c) in l {
                out.insert(mv.clone(), *e, c.clone())?;
            }
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_caps(other)?;
        let mut out = Self::zero(self.caps);
        out.watermark = self.watermark.min(other.watermark);
        out.clipped = self.clipped + other.clipped;
        let mut rhs: Vec<(u32, &Monomial, &Laurent<S>)> =
            other.terms.iter().map(|(m, l)| (m.degree(), m, l)).collect();
        rhs.sort_by_key(|(d, _, _)| *d);
        let cap = self.caps.degree;
        for (m1, l1) in &self.terms {
            let d1 = m1.degree();
            for &(d2, m2, l2) in &rhs {
                if d1 + d2 > cap {
                    break;
                }
                let m = m1.mul(m2);
                for (e1, c1) in l1 {
                    for (e2, c2) in l2 {
                        out.insert_unchecked_sum(&m, e1 + e2, &c1.mul_ref(c2))?;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Terms of total degree exactly `d`.
    pub fn homogeneous_part(&self, d: u32) -> Self {
        let mut out = Self::zero(self.caps);
        out.watermark = self.watermark;
        for (m, l) in &self.terms {
            if m.degree() == d {
                out.terms.insert(m.clone(), l.clone());
            }
        }
        out
    }

    /// Drops every term of degree above `d`.
    pub fn truncate_degree(&self, d: u32) -> Self {
        let mut out = self.clone();
        out.terms.retain(|m, _| m.degree() <= d);
        out
    }

    /// Multiplies the coefficient of one term by `factor`.
    pub fn scale_term(&mut self, m: &Monomial, lambda: i32, factor: &S) {
        if let Some(l) = self.terms.get_mut(m) {
            if let Some(c) = l.get_mut(&lambda) {
                *c = c.mul_ref(factor);
                if c.is_zero() {
                    l.remove(&lambda);
                }
            }
            if l.is_empty() {
                self.terms.remove(m);
            }
        }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> TruncatedSeries<T> {
        let mut out = TruncatedSeries::zero(self.caps);
        out.watermark = self.watermark;
        out.clipped = self.clipped;
        for (m, l) in &self.terms {
            let mapped: Laurent<T> = l
                .iter()
                .map(|(e, c)| (*e, f(c)))
                .filter(|(_, c)| !c.is_zero())
                .collect();
            if !mapped.is_empty() {
                out.terms.insert(m.clone(), mapped);
            }
        }
        out
    }

    /// Largest coefficient difference over the union of terms, with the
    /// location where it occurs.
    pub fn max_deviation(&self, other: &Self) -> (f64, Option<(Monomial, i32)>) {
        let mut worst = 0.0;
        let mut at = None;
        let mut visit = |m: &Monomial, e: i32| {
            let d = (self.coefficient(m, e) - other.coefficient(m, e)).magnitude();
            if d > worst {
                worst = d;
                at = Some((m.clone(), e));
            }
        };
        for (m, e, _) in self.iter() {
            visit(m, e);
        }
        for (m, e, _) in other.iter() {
            visit(m, e);
        }
        (worst, at)
    }

    /// `[{"monomial": [[a, m, exp], ...], "lambda": e, "coeff": ...}, ...]`
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.iter()
                .map(|(m, e, c)| json!({"monomial": m.to_json(), "lambda": e, "coeff": c.to_json()}))
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rational, Rational};

    fn t(level: u32) -> SeriesVar {
        SeriesVar::new(level, 0)
    }

    fn poly(caps: Caps, terms: &[(&[SeriesVar], i32, Rational)]) -> TruncatedSeries<Rational> {
        let mut s = TruncatedSeries::zero(caps);
        for (vars, e, c) in terms {
            s.insert(Monomial::from_vars(vars.iter().copied()), *e, c.clone())
                .unwrap();
        }
        s
    }

    #[test]
    fn difference_of_squares() {
        let caps = Caps::new(2, 0);
        let a = poly(caps, &[(&[], 0, int(1)), (&[t(0)], 0, int(1))]);
        let b = poly(caps, &[(&[], 0, int(1)), (&[t(0)], 0, int(-1))]);
        let p = a.mul(&b).unwrap();
        let want = poly(caps, &[(&[], 0, int(1)), (&[t(0), t(0)], 0, int(-1))]);
        assert_eq!(p, want);
        let zero = TruncatedSeries::zero(caps);
        assert!(a.mul(&zero).unwrap().is_zero());
    }

    #[test]
    fn genus_underflow() {
        let caps = Caps::new(6, 0);
        let cube = poly(caps, &[(&[t(0), t(0), t(0)], -2, int(1))]);
        assert!(matches!(
            cube.mul(&cube),
            Err(Error::GenusUnderflow {
                exponent: -4,
                floor: -2
            })
        ));
    }

    #[test]
    fn ceiling_clips_and_counts() {
        let caps = Caps::new(4, 1);
        let a = poly(caps, &[(&[t(1)], 0, int(1))]);
        let up = a.mul_lambda(2).unwrap();
        assert!(up.is_zero());
        assert_eq!(up.clipped(), 1);
    }

    #[test]
    fn coefficients() {
        let caps = Caps::new(3, 1);
        let s = poly(caps, &[(&[], 0, int(1)), (&[t(0)], 0, int(3))]);
        assert_eq!(s.coefficient(&Monomial::var(t(0)), 0), int(3));
        assert_eq!(s.coefficient(&Monomial::var(t(1)), 0), int(0));
        assert_eq!(s.coefficient(&Monomial::var(t(0)), -1), int(0));
        let mut s2 = s.clone();
        assert!(s2.insert(Monomial::one(), 1, int(1)).is_err());
    }

    #[test]
    fn caps_must_match() {
        let a = TruncatedSeries::<Rational>::one(Caps::new(3, 0));
        let b = TruncatedSeries::<Rational>::one(Caps::new(4, 0));
        assert!(matches!(a.add(&b), Err(Error::CapMismatch)));
        assert!(matches!(a.mul(&b), Err(Error::CapMismatch)));
    }

    #[test]
    fn level_cap_is_enforced() {
        let caps = Caps::new(3, 0).with_level(2);
        let mut s = TruncatedSeries::<Rational>::zero(caps);
        assert!(matches!(
            s.insert(Monomial::var(t(3)), 0, int(1)),
            Err(Error::LevelCapExceeded { level: 3, cap: 2 })
        ));
    }

    #[test]
    fn json_shape() {
        let caps = Caps::new(3, 0);
        let s = poly(caps, &[(&[t(0), t(0), t(0)], -2, rational(1, 6))]);
        assert_eq!(
            s.to_json().to_string(),
            r#"[{"coeff":"1/6","lambda":-2,"monomial":[[0,0,3]]}]"#
        );
    }

    #[test]
    fn monomial_algebra() {
        let m = Monomial::from_vars([t(1), t(0), t(1)]);
        assert_eq!(m.degree(), 3);
        assert_eq!(m.exponent(t(1)), 2);
        assert_eq!(m.symmetry_factor(), 2);
        let (q, e) = m.div_var(t(1)).unwrap();
        assert_eq!(e, 2);
        assert_eq!(q, Monomial::from_vars([t(0), t(1)]));
        assert!(m.div_var(t(2)).is_none());
        assert_eq!(q.mul_var(t(1)), m);
        assert_eq!(m.to_string(), "t0.0*t1.0^2");
    }
}
