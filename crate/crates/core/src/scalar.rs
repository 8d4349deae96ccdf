//! Scalar types the algebra and series code is generic over.
//!
//! Exact computations use [`Rational`]; canonical-basis coordinates need
//! complex floating point because character values are cyclotomic.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{NumOps, One, Signed, ToPrimitive, Zero};
use serde_json::Value;

pub type Rational = BigRational;

pub trait Scalar:
    Clone + Debug + PartialEq + Zero + One + NumOps + Neg<Output = Self> + Send + Sync + 'static
{
    /// Whether arithmetic in this type is exact.
    const EXACT: bool;

    fn from_rational(q: &Rational) -> Self;

    fn from_int(n: i64) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(n)))
    }

    fn to_complex(&self) -> Complex64;

    /// Absolute value as a float, used for residual reporting.
    fn magnitude(&self) -> f64;

    /// Exact zero for exact types, below `1e-12` in magnitude otherwise.
    fn is_negligible(&self) -> bool;

    /// `|x|` in the same type (complex values map to their modulus).
    fn abs_value(&self) -> Self;

    fn mul_ref(&self, other: &Self) -> Self {
        self.clone() * other.clone()
    }

    fn add_assign_ref(&mut self, other: &Self) {
        *self = self.clone() + other.clone();
    }

    fn to_json(&self) -> Value;
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn to_complex(&self) -> Complex64 {
        Complex64::new(rational_to_f64(self), 0.0)
    }

    fn magnitude(&self) -> f64 {
        rational_to_f64(&self.abs())
    }

    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    fn abs_value(&self) -> Self {
        self.abs()
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }

    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }

    fn to_json(&self) -> Value {
        Value::String(format_rational(self))
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_rational(q: &Rational) -> Self {
        rational_to_f64(q)
    }

    fn to_complex(&self) -> Complex64 {
        Complex64::new(*self, 0.0)
    }

    fn magnitude(&self) -> f64 {
        self.abs()
    }

    fn is_negligible(&self) -> bool {
        self.abs() < 1e-12
    }

    fn abs_value(&self) -> Self {
        self.abs()
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }

    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }

    fn to_json(&self) -> Value {
        float_json(*self)
    }
}

impl Scalar for Complex64 {
    const EXACT: bool = false;

    fn from_rational(q: &Rational) -> Self {
        Complex64::new(rational_to_f64(q), 0.0)
    }

    fn to_complex(&self) -> Complex64 {
        *self
    }

    fn magnitude(&self) -> f64 {
        self.norm()
    }

    fn is_negligible(&self) -> bool {
        self.norm() < 1e-12
    }

    fn abs_value(&self) -> Self {
        Complex64::new(self.norm(), 0.0)
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }

    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }

    fn to_json(&self) -> Value {
        serde_json::json!({ "re": float_json(self.re), "im": float_json(self.im) })
    }
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() {
            return n / d;
        }
    }
    q.to_f64().unwrap_or(f64::NAN)
}

pub fn rational(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Always `p/q`, including integers (`2/1`) and zero (`0/1`).
pub fn format_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Accepts `p/q` or a bare integer `p`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

/// Float rounded to 15 significant digits.
pub fn float_json(x: f64) -> Value {
    if !x.is_finite() {
        return Value::String(format!("{x}"));
    }
    let rounded: f64 = format!("{x:.14e}").parse().unwrap_or(x);
    let rounded = if rounded == 0.0 { 0.0 } else { rounded };
    serde_json::Number::from_f64(rounded)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_strings() {
        assert_eq!(format_rational(&int(0)), "0/1");
        assert_eq!(format_rational(&int(2)), "2/1");
        assert_eq!(format_rational(&rational(6, -4)), "-3/2");
        assert_eq!(parse_rational("-3/2"), Some(rational(-3, 2)));
        assert_eq!(parse_rational("7"), Some(int(7)));
        assert_eq!(parse_rational("1/0"), None);
    }

    #[test]
    fn float_rounding_is_stable() {
        let v = float_json(0.1 + 0.2);
        assert_eq!(v, float_json(0.3));
        assert_eq!(float_json(-0.0), float_json(0.0));
    }
}
