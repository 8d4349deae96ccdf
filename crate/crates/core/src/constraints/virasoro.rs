use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::factorization::canonical_transform;
use super::{ConstraintReport, ExactnessModel, Tally, VariableSystem};
use crate::algebra::{CanonicalBasis, ClassAlgebra};
use crate::correlators::{point_potential, Mutation, PotentialBasis, Theory};
use crate::error::{Error, Result};
use crate::scalar::{int, Rational, Scalar};
use crate::series::{Caps, Monomial, SeriesVar, TruncatedSeries};
use crate::ExactSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Flavor {
    /// `L_n` on class-basis variables `t_a^m`.
    Diagonal,
    /// `L_n^{(α)}` on the rescaled canonical variables `ũ_a^α`.
    PerIndex(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct VirasoroSpec {
    pub flavor: Flavor,
    pub n: i32,
}

impl VirasoroSpec {
    pub fn diagonal(n: i32) -> Self {
        VirasoroSpec {
            flavor: Flavor::Diagonal,
            n,
        }
    }

    pub fn per_index(alpha: usize, n: i32) -> Self {
        VirasoroSpec {
            flavor: Flavor::PerIndex(alpha),
            n,
        }
    }

    pub fn label(&self) -> String {
        match self.flavor {
            Flavor::Diagonal => format!("L_{}", self.n),
            Flavor::PerIndex(a) => format!("L_{}^({})", self.n, a),
        }
    }

    pub fn to_json(&self, dim: usize) -> Value {
        match self.flavor {
            Flavor::Diagonal => json!({
                "flavor": "diagonal",
                "n": self.n,
                "ambient": "class",
                "r": dim,
            }),
            Flavor::PerIndex(a) => json!({
                "flavor": "per_index",
                "alpha": a,
                "n": self.n,
                "ambient": "canonical-rescaled",
                "r": dim,
            }),
        }
    }
}

// (2k-1)!!, exact and unbounded
fn dfo(k: i64) -> Rational {
    (1..=k).fold(Rational::one(), |acc, j| acc * int(2 * j - 1))
}

fn two_pow(e: i32) -> Rational {
    Rational::from_integer(BigInt::one() << e as usize)
}

/// Nonzero matrix entries `(i, j, x)`.
type Entries = Vec<(u32, u32, Rational)>;

/// The operator as a list of elementary terms.
struct Terms<S> {
    n: i32,
    first: (SeriesVar, S),
    slots: Vec<u32>,
    /// Coefficient of `t_i ∂/∂t_{i+n}`, indexed by `i`.
    dilation: Vec<Option<S>>,
    /// `λ² c ∂_{v1} ∂_{v2}`.
    second: Vec<(SeriesVar, SeriesVar, S)>,
    /// `λ^{-2} c v1 v2`.
    quadratic: Vec<(SeriesVar, SeriesVar, S)>,
    constant: S,
}

impl<S: Scalar> Terms<S> {
    fn new(spec: &VirasoroSpec, system: &VariableSystem, max_level: u32) -> Result<Self> {
        let n = spec.n;
        if n < -1 {
            return Err(Error::PreconditionViolated(format!("L_{n} is not defined")));
        }
        let r = system.dim();
        let (slots, inverse, metric, copies): (Vec<u32>, Entries, Entries, usize) =
            match (spec.flavor, system) {
                (Flavor::Diagonal, VariableSystem::Class { metric, inverse_metric }) => {
                    let collect = |mat: &Vec<Vec<Rational>>| {
                        let mut out = Vec::new();
                        for (i, row) in mat.iter().enumerate() {
                            for (j, x) in row.iter().enumerate() {
                                if !x.is_zero() {
                                    out.push((i as u32, j as u32, x.clone()));
                                }
                            }
                        }
                        out
                    };
                    ((0..r as u32).collect(), collect(inverse_metric), collect(metric), r)
                }
                (Flavor::PerIndex(a), VariableSystem::Canonical { dim }) => {
                    if a >= *dim {
                        return Err(Error::VariableSystemMismatch(format!(
                            "index {a} out of range for {dim} canonical slots"
                        )));
                    }
                    let a = a as u32;
                    (vec![a], vec![(a, a, int(1))], vec![(a, a, int(1))], 1)
                }
                (Flavor::Diagonal, _) => {
                    return Err(Error::VariableSystemMismatch(
                        "diagonal operator needs class-basis variables".into(),
                    ))
                }
                (Flavor::PerIndex(_), _) => {
                    return Err(Error::VariableSystemMismatch(
                        "per-index operator needs canonical variables".into(),
                    ))
                }
            };
        let denom = two_pow(n + 1);
        let first_slot = slots[0];
        let first = (
            SeriesVar::new((n + 1) as u32, first_slot),
            S::from_rational(&(-dfo(n as i64 + 2) / &denom)),
        );
        let dilation = (0..=max_level as i64 + 1)
            .map(|i| {
                (i + n as i64 >= 0).then(|| {
                    S::from_rational(&(dfo(i + n as i64 + 1) / (dfo(i) * &denom)))
                })
            })
            .collect();
        let mut second = Vec::new();
        for i in 0..n.max(0) as i64 {
            let w = dfo(i + 1) * dfo(n as i64 - i) / (&denom * int(2));
            for (m1, m2, eta) in &inverse {
                second.push((
                    SeriesVar::new(i as u32, *m1),
                    SeriesVar::new((n as i64 - 1 - i) as u32, *m2),
                    S::from_rational(&(&w * eta)),
                ));
            }
        }
        let quadratic = if n == -1 {
            metric
                .iter()
                .map(|(m1, m2, eta)| {
                    (
                        SeriesVar::new(0, *m1),
                        SeriesVar::new(0, *m2),
                        S::from_rational(&(eta / int(2))),
                    )
                })
                .collect()
        } else {
            Vec::new()
        };
        let constant = if n == 0 {
            S::from_rational(&crate::scalar::rational(copies as i64, 16))
        } else {
            S::zero()
        };
        Ok(Terms {
            n,
            first,
            slots,
            dilation,
            second,
            quadratic,
            constant,
        })
    }

    fn dilation_at(&self, i: u32) -> Option<&S> {
        self.dilation.get(i as usize).and_then(Option::as_ref)
    }

    /// Images of `c·m·λ^e`.
    fn apply_term(&self, m: &Monomial, e: i32, c: &S, emit: &mut impl FnMut(Monomial, i32, S)) {
        let (v, coef) = &self.first;
        if let Some((q, k)) = m.div_var(*v) {
            emit(q, e, c.mul_ref(coef) * S::from_int(k as i64));
        }
        for &(w, k) in m.pairs() {
            if !self.slots.contains(&w.slot) {
                continue;
            }
            let i = w.level as i64 - self.n as i64;
            if i < 0 {
                continue;
            }
            if let Some(d) = self.dilation_at(i as u32) {
                let (q, _) = m.div_var(w).expect("variable present");
                emit(
                    q.mul_var(SeriesVar::new(i as u32, w.slot)),
                    e,
                    c.mul_ref(d) * S::from_int(k as i64),
                );
            }
        }
        for (v1, v2, coef) in &self.second {
            let Some((q, k1)) = m.div_var(*v1) else { continue };
            let Some((q, k2)) = q.div_var(*v2) else { continue };
            emit(q, e + 2, c.mul_ref(coef) * S::from_int(k1 as i64 * k2 as i64));
        }
        for (v1, v2, coef) in &self.quadratic {
            emit(m.mul_var(*v1).mul_var(*v2), e - 2, c.mul_ref(coef));
        }
        if !self.constant.is_zero() {
            emit(m.clone(), e, c.mul_ref(&self.constant));
        }
    }

    /// Whether every coefficient the output at `(m, e)` reads satisfies `exact`.
    fn reads_exact(&self, m: &Monomial, e: i32, exact: &impl Fn(&Monomial, i32) -> bool) -> bool {
        if !exact(&m.mul_var(self.first.0), e) {
            return false;
        }
        for &(w, _) in m.pairs() {
            if !self.slots.contains(&w.slot) || self.dilation_at(w.level).is_none() {
                continue;
            }
            let source = (w.level as i64 + self.n as i64) as u32;
            let (q, _) = m.div_var(w).expect("variable present");
            if !exact(&q.mul_var(SeriesVar::new(source, w.slot)), e) {
                return false;
            }
        }
        for (v1, v2, _) in &self.second {
            if !exact(&m.mul_var(*v1).mul_var(*v2), e - 2) {
                return false;
            }
        }
        for (v1, v2, _) in &self.quadratic {
            if let Some((q, _)) = m.div_var(*v1) {
                if let Some((q, _)) = q.div_var(*v2) {
                    if !exact(&q, e + 2) {
                        return false;
                    }
                }
            }
        }
        self.constant.is_zero() || exact(m, e)
    }
}

fn check_system<S: Scalar>(spec: &VirasoroSpec, system: &VariableSystem, z: &TruncatedSeries<S>) -> Result<()> {
    if let Some(slot) = z.monomials().filter_map(Monomial::max_slot).max() {
        if slot as usize >= system.dim() {
            return Err(Error::VariableSystemMismatch(format!(
                "series uses slot {slot}, variable system has {}",
                system.dim()
            )));
        }
    }
    let needed = (spec.n + 1).max(0) as u32;
    if needed > z.caps().level {
        return Err(Error::LevelCapExceeded {
            level: needed,
            cap: z.caps().level,
        });
    }
    Ok(())
}

/// `L z`, with the level cap raised by one and the `λ` floor lowered by 2.
pub fn apply_virasoro<S: Scalar>(
    spec: &VirasoroSpec,
    system: &VariableSystem,
    z: &TruncatedSeries<S>,
) -> Result<TruncatedSeries<S>> {
    check_system(spec, system, z)?;
    let caps = *z.caps();
    let terms = Terms::<S>::new(spec, system, caps.level)?;
    let out_caps = caps
        .with_level(caps.level + 1)
        .with_lambda_floor(caps.lambda_floor - 2);
    let mut out = TruncatedSeries::zero(out_caps);
    let mut failure = None;
    for (m, e, c) in z.iter() {
        terms.apply_term(m, e, c, &mut |q, x, v| {
            if failure.is_none() {
                if let Err(err) = out.insert(q, x, v) {
                    failure = Some(err);
                }
            }
        });
    }
    if let Some(err) = failure {
        return Err(err);
    }
    let lost = if spec.n >= 1 { 2 } else { 1 };
    out.set_watermark(z.watermark() - lost);
    Ok(out)
}

/// Residual of `L z = 0` at every degree up to `degree` and every `λ`
/// exponent up to the ceiling of `model.genus`. Positions reading a
/// coefficient `model` cannot vouch for are skipped.
pub fn annihilation_report<S: Scalar>(
    spec: &VirasoroSpec,
    system: &VariableSystem,
    z: &TruncatedSeries<S>,
    model: &ExactnessModel,
    degree: u32,
    tolerance: f64,
) -> Result<ConstraintReport> {
    check_system(spec, system, z)?;
    let terms = Terms::<S>::new(spec, system, z.caps().level)?;
    let ceiling = (2 * model.genus as i32 - 2).max(0);
    let mut residual: BTreeMap<(Monomial, i32), S> = BTreeMap::new();
    for (m, e, c) in z.iter() {
        terms.apply_term(m, e, c, &mut |q, x, v| {
            if q.degree() <= degree && x <= ceiling {
                residual
                    .entry((q, x))
                    .and_modify(|acc| acc.add_assign_ref(&v))
                    .or_insert(v);
            }
        });
    }
    let exact = |m: &Monomial, e: i32| model.is_exact(m, e);
    let mut tally = Tally::new(tolerance);
    for ((m, e), value) in residual {
        if terms.reads_exact(&m, e, &exact) {
            tally.compare(&m, e, value, S::zero());
        } else {
            tally.skip();
        }
    }
    let lost = if spec.n >= 1 { 2 } else { 1 };
    let watermark = (degree as i32).min(z.watermark() - lost);
    Ok(tally.finish(spec.label(), spec.to_json(system.dim()), watermark))
}

#[derive(Debug, Clone, PartialEq)]
pub struct VirasoroOptions {
    pub degree: u32,
    pub genus: u32,
    pub ns: Vec<i32>,
    pub diagonal: bool,
    pub per_index: bool,
    /// Extra degrees computed beyond `degree` so that derivatives read
    /// exact coefficients.
    pub buffer: u32,
}

impl Default for VirasoroOptions {
    fn default() -> Self {
        VirasoroOptions {
            degree: 6,
            genus: 2,
            ns: vec![-1, 0, 1, 2],
            diagonal: true,
            per_index: true,
            buffer: 2,
        }
    }
}

/// `exp(Φ)` with `mutation` applied to `Φ` first.
pub fn perturbed_partition(
    theory: &Theory,
    caps: Caps,
    basis: PotentialBasis,
    mutation: Option<&Mutation>,
) -> Result<ExactSeries> {
    let mut phi = theory.potential(caps, basis)?;
    if let Some(mu) = mutation {
        phi = mu.apply(&phi)?;
    }
    phi.exponential()
}

/// Annihilation of `Z^G` by `L_n` in class variables and by every
/// `L_n^{(α)}` in canonical variables. A mutation applies to the
/// class-basis potential only.
pub fn virasoro_check(
    theory: &Theory,
    opts: &VirasoroOptions,
    mutation: Option<&Mutation>,
) -> Result<Vec<ConstraintReport>> {
    let max_n = opts.ns.iter().copied().max().unwrap_or(0);
    let base = Caps::new(opts.degree + opts.buffer, opts.genus);
    let caps = base.with_level(base.level.max((max_n + 1).max(0) as u32));
    let model = ExactnessModel {
        degree: caps.degree,
        genus: opts.genus,
    };
    let r = theory.num_classes();
    let mut jobs: Vec<(VirasoroSpec, VariableSystem, usize)> = Vec::new();
    let mut series = Vec::new();
    if opts.diagonal {
        series.push(perturbed_partition(theory, caps, PotentialBasis::Class, mutation)?);
        for &n in &opts.ns {
            jobs.push((VirasoroSpec::diagonal(n), VariableSystem::class(theory.algebra()), series.len() - 1));
        }
    }
    if opts.per_index {
        series.push(point_potential(caps, r)?.exponential()?);
        for alpha in 0..r {
            for &n in &opts.ns {
                jobs.push((VirasoroSpec::per_index(alpha, n), VariableSystem::canonical(r), series.len() - 1));
            }
        }
    }
    theory.install(|| {
        jobs.par_iter()
            .map(|(spec, system, z)| annihilation_report(spec, system, &series[*z], &model, opts.degree, 0.0))
            .collect()
    })
}

/// A polynomial with `terms` random terms in `slots` slots within `caps`.
pub fn random_test_series(caps: Caps, slots: usize, terms: usize, seed: u64) -> Result<ExactSeries> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = TruncatedSeries::zero(caps);
    let exponents: Vec<i32> = (caps.lambda_floor..=caps.lambda_ceiling())
        .filter(|e| e % 2 == 0)
        .collect();
    for _ in 0..terms {
        let degree = rng.random_range(0..=caps.degree);
        let m = Monomial::from_vars((0..degree).map(|_| {
            SeriesVar::new(
                rng.random_range(0..=caps.level),
                rng.random_range(0..slots as u32),
            )
        }));
        let e = exponents[rng.random_range(0..exponents.len())];
        let c = crate::scalar::rational(rng.random_range(-9..=9), rng.random_range(1..=5));
        s.insert(m, e, c)?;
    }
    Ok(s)
}

fn compare_series<S: Scalar>(lhs: &TruncatedSeries<S>, rhs: &TruncatedSeries<S>, tally: &mut Tally<S>) {
    let positions: BTreeSet<(Monomial, i32)> = lhs
        .iter()
        .chain(rhs.iter())
        .map(|(m, e, _)| (m.clone(), e))
        .collect();
    for (m, e) in positions {
        tally.compare(&m, e, lhs.coefficient(&m, e), rhs.coefficient(&m, e));
    }
}

/// `[L_a, L_b] s` against `(a - b) L_{a+b} s`, or against 0 for per-index
/// operators on different indices. The series is first given room for two
/// operator applications, so the comparison is exact.
pub fn commutator_check(
    a: &VirasoroSpec,
    b: &VirasoroSpec,
    system: &VariableSystem,
    s: &ExactSeries,
) -> Result<ConstraintReport> {
    let expected = match (a.flavor, b.flavor) {
        (Flavor::Diagonal, Flavor::Diagonal) => Some(VirasoroSpec::diagonal(a.n + b.n)),
        (Flavor::PerIndex(x), Flavor::PerIndex(y)) if x == y => Some(VirasoroSpec::per_index(x, a.n + b.n)),
        (Flavor::PerIndex(_), Flavor::PerIndex(_)) => None,
        _ => {
            return Err(Error::VariableSystemMismatch(
                "commutator of diagonal and per-index operators".into(),
            ))
        }
    };
    if a.n + b.n < -1 {
        return Err(Error::PreconditionViolated(format!(
            "[L_{}, L_{}] leaves the algebra",
            a.n, b.n
        )));
    }
    let c = *s.caps();
    let room = Caps {
        degree: c.degree + 4,
        genus: c.genus + 3,
        level: c.level + 4,
        lambda_floor: c.lambda_floor - 4,
    };
    let s = s.recap(room)?;
    let ab = apply_virasoro(a, system, &apply_virasoro(b, system, &s)?)?;
    let ba = apply_virasoro(b, system, &apply_virasoro(a, system, &s)?)?;
    let lhs = ab.sub(&ba)?;
    let rhs = match expected {
        Some(spec) => apply_virasoro(&spec, system, &s)?
            .recap(*lhs.caps())?
            .scale(&int((a.n - b.n) as i64)),
        None => TruncatedSeries::zero(*lhs.caps()),
    };
    let mut tally = Tally::new(0.0);
    compare_series(&lhs, &rhs, &mut tally);
    let label = format!("[{}, {}]", a.label(), b.label());
    let operator = json!({
        "commutator": [a.to_json(system.dim()), b.to_json(system.dim())],
    });
    Ok(tally.finish(label, operator, lhs.watermark().min(rhs.watermark())))
}

/// Numerical check of `L_m = Σ_α ν_α^{-m/3} L_m^{(α)}` on a class-basis
/// test series, after changing variables.
pub fn operator_identity_check(
    algebra: &ClassAlgebra,
    cb: &CanonicalBasis,
    m: i32,
    s: &ExactSeries,
    tolerance: f64,
) -> Result<ConstraintReport> {
    let r = cb.dim();
    let c = *s.caps();
    let s = s.recap(c.with_level(c.level + 1).with_lambda_floor(c.lambda_floor - 2))?;
    let class = VariableSystem::class(algebra);
    let lhs = canonical_transform(&apply_virasoro(&VirasoroSpec::diagonal(m), &class, &s)?, cb)?;
    let moved = canonical_transform(&s, cb)?;
    let canonical = VariableSystem::canonical(r);
    let mut rhs = TruncatedSeries::zero(*lhs.caps());
    for alpha in 0..r {
        let weight = Complex64::new(cb.nu_f64(alpha).powf(-(m as f64) / 3.0), 0.0);
        let part = apply_virasoro(&VirasoroSpec::per_index(alpha, m), &canonical, &moved)?;
        rhs = rhs.add(&part.recap(*lhs.caps())?.scale(&weight))?;
    }
    let mut tally = Tally::new(tolerance);
    compare_series(&lhs, &rhs, &mut tally);
    let operator = json!({ "identity": "diagonal-vs-per-index", "n": m, "r": r });
    Ok(tally.finish(format!("L_{m} = Σ ν^(-{m}/3) L_{m}^(α)"), operator, lhs.watermark()))
}
