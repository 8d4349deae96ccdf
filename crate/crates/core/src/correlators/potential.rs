use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{OmegaKey, Theory};
use crate::error::{Error, Result};
use crate::scalar::Rational;
use crate::series::{Caps, Monomial, SeriesVar, TruncatedSeries};
use crate::ExactSeries;

use super::psi::psi_intersection;

/// Variables of a potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialBasis {
    /// `t_a^m` paired with the class basis `e_m`; slot 0 is the identity class.
    Class,
    /// Rescaled canonical coordinates `ũ_a^α`, slot `α`.
    CanonicalRescaled,
}

/// Calls `f` with every nondecreasing sequence of `n` variables whose
/// levels add up to `total`, with levels at most `max_level` and slots
/// below `slots`.
fn for_each_monomial(
    n: usize,
    total: u32,
    max_level: u32,
    slots: u32,
    f: &mut impl FnMut(&[SeriesVar]) -> Result<()>,
) -> Result<()> {
    fn rec(
        cur: &mut Vec<SeriesVar>,
        n: usize,
        rem: u32,
        max_level: u32,
        slots: u32,
        f: &mut impl FnMut(&[SeriesVar]) -> Result<()>,
    ) -> Result<()> {
        let left = (n - cur.len()) as u32;
        if left == 0 {
            return if rem == 0 { f(cur) } else { Ok(()) };
        }
        let start = cur.last().copied().unwrap_or(SeriesVar::new(0, 0));
        for level in start.level..=max_level.min(rem) {
            if level * left > rem || rem > left * max_level {
                break;
            }
            let first_slot = if level == start.level { start.slot } else { 0 };
            for slot in first_slot..slots {
                cur.push(SeriesVar::new(level, slot));
                rec(cur, n, rem - level, max_level, slots, f)?;
                cur.pop();
            }
        }
        Ok(())
    }
    rec(&mut Vec::with_capacity(n), n, total, max_level, slots, f)
}

/// Runs `f(genus, n, level_sum)` for every stable shape within the caps.
fn for_each_shape(caps: &Caps, mut f: impl FnMut(u32, usize, u32) -> Result<()>) -> Result<()> {
    for genus in 0..=caps.genus {
        for n in 1..=caps.degree as usize {
            if !super::is_stable(genus, n) {
                continue;
            }
            let total = 3 * genus as i64 - 3 + n as i64;
            if total < 0 {
                continue;
            }
            f(genus, n, total as u32)?;
        }
    }
    Ok(())
}

fn symmetry(m: &Monomial) -> Rational {
    Rational::from_integer(BigInt::from(m.symmetry_factor()))
}

/// `Σ_α Φ(ũ^α)` over `copies` slots: each slot carries the potential of a point.
pub fn point_potential(caps: Caps, copies: usize) -> Result<ExactSeries> {
    let mut phi = TruncatedSeries::zero(caps);
    for_each_shape(&caps, |genus, n, total| {
        for_each_monomial(n, total, caps.level, 1, &mut |vars| {
            let levels: Vec<u32> = vars.iter().map(|v| v.level).collect();
            let psi = psi_intersection(genus, &levels)?;
            let base = Monomial::from_vars(vars.iter().copied());
            let coeff = psi / symmetry(&base);
            for alpha in 0..copies as u32 {
                let m = Monomial::from_vars(vars.iter().map(|v| SeriesVar::new(v.level, alpha)));
                phi.insert(m, 2 * genus as i32 - 2, coeff.clone())?;
            }
            Ok(())
        })
    })?;
    Ok(phi)
}

impl Theory {
    /// `Φ^G = Σ_g λ^{2g-2} ⟨exp(τ·t)⟩_g`, truncated by `caps`.
    pub fn potential(&self, caps: Caps, basis: PotentialBasis) -> Result<ExactSeries> {
        match basis {
            PotentialBasis::CanonicalRescaled => point_potential(caps, self.num_classes()),
            PotentialBasis::Class => self.class_potential(caps),
        }
    }

    fn class_potential(&self, caps: Caps) -> Result<ExactSeries> {
        let r = self.num_classes() as u32;
        let mut phi = TruncatedSeries::zero(caps);
        for_each_shape(&caps, |genus, n, total| {
            for_each_monomial(n, total, caps.level, r, &mut |vars| {
                let classes: Vec<usize> = vars.iter().map(|v| v.slot as usize).collect();
                let omega = self.omega_key(&OmegaKey::new(genus, classes));
                if omega.is_zero() {
                    return Ok(());
                }
                let levels: Vec<u32> = vars.iter().map(|v| v.level).collect();
                let psi = psi_intersection(genus, &levels)?;
                let m = Monomial::from_vars(vars.iter().copied());
                let coeff = psi * omega / symmetry(&m);
                phi.insert(m, 2 * genus as i32 - 2, coeff)
            })
        })?;
        Ok(phi)
    }

    /// `Z^G = exp(Φ^G)`.
    pub fn partition_function(&self, caps: Caps, basis: PotentialBasis) -> Result<ExactSeries> {
        self.potential(caps, basis)?.exponential()
    }
}

/// Rescales one coefficient of a potential, to test that the constraints
/// notice.
#[derive(Debug, Clone, PartialEq)]
pub struct Mutation {
    pub monomial: Monomial,
    pub lambda: i32,
    pub factor: Rational,
}

impl Mutation {
    pub fn double(monomial: Monomial, lambda: i32) -> Self {
        Mutation {
            monomial,
            lambda,
            factor: Rational::from_integer(2.into()),
        }
    }

    /// Doubles the first genus-0 quartic term of `phi` in monomial order.
    pub fn first_genus_zero_quartic(phi: &ExactSeries) -> Option<Self> {
        phi.iter()
            .find(|(m, e, _)| *e == -2 && m.degree() == 4)
            .map(|(m, e, _)| Mutation::double(m.clone(), e))
    }

    /// The change `(factor - 1) c m λ^e` this mutation makes to `phi`.
    pub fn delta(&self, phi: &ExactSeries) -> Result<ExactSeries> {
        let c = phi.coefficient(&self.monomial, self.lambda);
        if c.is_zero() {
            return Err(Error::InvalidInput(format!(
                "no term {} λ^{} to mutate",
                self.monomial, self.lambda
            )));
        }
        let d = c * (&self.factor - Rational::one());
        TruncatedSeries::term(*phi.caps(), self.monomial.clone(), self.lambda, d)
    }

    pub fn apply(&self, phi: &ExactSeries) -> Result<ExactSeries> {
        phi.add(&self.delta(phi)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{GroupName, GroupTable};
    use crate::scalar::{int, rational};

    fn theory(name: GroupName, n: usize) -> Theory {
        Theory::new(GroupTable::named(name, n).unwrap())
    }

    #[test]
    fn trivial_group_cubic() {
        let t = theory(GroupName::Cyclic, 1);
        let phi = t.potential(Caps::new(3, 0), PotentialBasis::Class).unwrap();
        let cube = Monomial::from_pairs([(SeriesVar::new(0, 0), 3)]);
        assert_eq!(phi.len(), 1);
        assert_eq!(phi.coefficient(&cube, -2), rational(1, 6));
        let empty = t.potential(Caps::new(2, 0), PotentialBasis::Class).unwrap();
        assert!(empty.is_zero());
    }

    #[test]
    fn z2_genus_one_linear_term() {
        let t = theory(GroupName::Cyclic, 2);
        let phi = t.potential(Caps::new(2, 1), PotentialBasis::Class).unwrap();
        assert_eq!(phi.coefficient(&Monomial::var(SeriesVar::new(1, 0)), 0), rational(1, 12));
        assert_eq!(phi.coefficient(&Monomial::var(SeriesVar::new(1, 1)), 0), int(0));
    }

    #[test]
    fn canonical_potential_is_copies_of_a_point() {
        let caps = Caps::new(5, 2);
        let point = theory(GroupName::Cyclic, 1).potential(caps, PotentialBasis::Class).unwrap();
        let z2 = theory(GroupName::Cyclic, 2).potential(caps, PotentialBasis::CanonicalRescaled).unwrap();
        assert_eq!(z2.len(), 2 * point.len());
        for (m, e, c) in point.iter() {
            let moved = Monomial::from_vars(m.vars().map(|v| SeriesVar::new(v.level, 1)));
            assert_eq!(&z2.coefficient(m, e), c);
            assert_eq!(&z2.coefficient(&moved, e), c);
        }
    }

    #[test]
    fn point_potential_known_terms() {
        let phi = point_potential(Caps::new(4, 2), 1).unwrap();
        let t = |a| SeriesVar::new(a, 0);
        assert_eq!(phi.coefficient(&Monomial::var(t(4)), 2), rational(1, 1152));
        assert_eq!(phi.coefficient(&Monomial::from_vars([t(0), t(0), t(0), t(1)]), -2), rational(1, 6));
        assert_eq!(phi.coefficient(&Monomial::from_pairs([(t(1), 2)]), 0), rational(1, 48));
    }

    #[test]
    fn mutation_doubles_one_term() {
        let t = theory(GroupName::Cyclic, 1);
        let phi = t.potential(Caps::new(4, 0), PotentialBasis::Class).unwrap();
        let mu = Mutation::first_genus_zero_quartic(&phi).unwrap();
        let mutated = mu.apply(&phi).unwrap();
        assert_eq!(
            mutated.coefficient(&mu.monomial, -2),
            phi.coefficient(&mu.monomial, -2) * int(2)
        );
        assert_eq!(mutated.len(), phi.len());
        let absent = Mutation::double(Monomial::var(SeriesVar::new(3, 0)), 0);
        assert!(absent.apply(&phi).is_err());
    }
}
