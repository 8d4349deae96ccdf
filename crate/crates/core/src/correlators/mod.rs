//! Correlators of the orbifold theory of `BG`.
//!
//! A descendant correlator factors as a ψ-intersection number times a
//! commutator count:
//! `⟨τ_{a_1}(e_{m_1})⋯τ_{a_n}(e_{m_n})⟩_g = ⟨τ_{a_1}⋯τ_{a_n}⟩_g · Ω_g(m_1, …, m_n)`.

mod cohft;
mod omega;
mod potential;
mod psi;

use std::collections::HashMap;
use std::sync::{Arc, Mutex, RwLock};

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::algebra::{CanonicalBasis, ClassAlgebra, ClassVector};
use crate::error::{Error, Result};
use crate::group::GroupTable;
use crate::scalar::{Rational, Scalar};

pub use cohft::{tensor_omega_check, CohftOptions, CohftReport, IdentityCheck};
pub use omega::{EnumerationStats, DEFAULT_WORK_CAP};
pub use potential::{point_potential, Mutation, PotentialBasis};
pub use psi::{double_factorial_odd, is_stable, psi_intersection};

/// Arguments of `Ω_g`, with the classes kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OmegaKey {
    pub genus: u32,
    pub classes: Vec<usize>,
}

impl OmegaKey {
    pub fn new(genus: u32, mut classes: Vec<usize>) -> Self {
        classes.sort_unstable();
        OmegaKey { genus, classes }
    }
}

/// `⟨τ_{a_1}(e_{m_1})⋯⟩_g` as a list of `(a_i, m_i)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CorrelatorKey {
    pub genus: u32,
    pub insertions: Vec<(u32, usize)>,
}

impl CorrelatorKey {
    pub fn new(genus: u32, insertions: Vec<(u32, usize)>) -> Self {
        CorrelatorKey { genus, insertions }
    }

    pub fn is_stable(&self) -> bool {
        is_stable(self.genus, self.insertions.len())
    }

    pub fn levels(&self) -> Vec<u32> {
        self.insertions.iter().map(|&(a, _)| a).collect()
    }

    pub fn classes(&self) -> Vec<usize> {
        self.insertions.iter().map(|&(_, m)| m).collect()
    }

    /// `Σ a_i = 3g - 3 + n`.
    pub fn satisfies_dimension(&self) -> bool {
        let sum: i64 = self.insertions.iter().map(|&(a, _)| a as i64).sum();
        sum == 3 * self.genus as i64 - 3 + self.insertions.len() as i64
    }
}

/// Why a correlator vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Vanishing {
    /// Levels do not add up to the dimension of the moduli space.
    Dimension,
    /// No tuple of group elements solves the commutator equation.
    Selection,
}

impl Vanishing {
    pub fn as_str(&self) -> &'static str {
        match self {
            Vanishing::Dimension => "dimension",
            Vanishing::Selection => "selection",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatorValue {
    pub value: Rational,
    pub psi: Rational,
    pub omega: Rational,
    pub vanishing: Option<Vanishing>,
}

#[derive(Debug, Default)]
pub(crate) struct MemoStore {
    omega: RwLock<HashMap<OmegaKey, Rational>>,
}

/// Group data plus memoized counts for one group.
pub struct Theory {
    group: GroupTable,
    algebra: ClassAlgebra,
    memo: MemoStore,
    work_cap: u128,
    pool: Option<rayon::ThreadPool>,
    commutators: Mutex<HashMap<u32, Arc<Vec<u64>>>>,
}

impl std::fmt::Debug for Theory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Theory")
            .field("order", &self.group.order())
            .field("classes", &self.algebra.dim())
            .field("work_cap", &self.work_cap)
            .finish()
    }
}

impl Theory {
    pub fn new(group: GroupTable) -> Self {
        let algebra = ClassAlgebra::new(&group);
        Theory {
            group,
            algebra,
            memo: MemoStore::default(),
            work_cap: DEFAULT_WORK_CAP,
            pool: None,
            commutators: Mutex::new(HashMap::new()),
        }
    }

    pub fn with_work_cap(mut self, cap: u128) -> Self {
        self.work_cap = cap;
        self
    }

    /// Worker threads for brute-force enumeration; `None` uses the global pool.
    pub fn with_jobs(mut self, jobs: Option<usize>) -> Self {
        self.pool = jobs.map(|n| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .expect("thread pool")
        });
        self
    }

    pub fn group(&self) -> &GroupTable {
        &self.group
    }

    pub fn algebra(&self) -> &ClassAlgebra {
        &self.algebra
    }

    pub fn num_classes(&self) -> usize {
        self.algebra.dim()
    }

    pub fn work_cap(&self) -> u128 {
        self.work_cap
    }

    pub(crate) fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        match &self.pool {
            Some(pool) => pool.install(f),
            None => f(),
        }
    }

    fn check_classes(&self, classes: &[usize]) -> Result<()> {
        let r = self.algebra.dim();
        match classes.iter().find(|&&k| k >= r) {
            Some(k) => Err(Error::InvalidInput(format!(
                "class index {k} out of range (group has {r} classes)"
            ))),
            None => Ok(()),
        }
    }

    pub fn correlator(&self, key: &CorrelatorKey) -> Result<Rational> {
        self.correlator_detail(key).map(|c| c.value)
    }

    /// Correlator with its two factors and, when zero, the reason.
    pub fn correlator_detail(&self, key: &CorrelatorKey) -> Result<CorrelatorValue> {
        if !key.is_stable() {
            return Err(Error::UnstableKey {
                genus: key.genus,
                points: key.insertions.len(),
            });
        }
        let classes = key.classes();
        self.check_classes(&classes)?;
        if !key.satisfies_dimension() {
            return Ok(CorrelatorValue {
                value: Rational::zero(),
                psi: Rational::zero(),
                omega: self.omega(key.genus, &classes)?,
                vanishing: Some(Vanishing::Dimension),
            });
        }
        let psi = psi_intersection(key.genus, &key.levels())?;
        let omega = self.omega(key.genus, &classes)?;
        let value = &psi * &omega;
        let vanishing = value.is_zero().then_some(Vanishing::Selection);
        Ok(CorrelatorValue {
            value,
            psi,
            omega,
            vanishing,
        })
    }

    /// Correlator with arbitrary state-space insertions, expanded
    /// multilinearly over the class basis.
    pub fn multilinear_correlator(
        &self,
        genus: u32,
        insertions: &[(u32, ClassVector<Complex64>)],
    ) -> Result<Complex64> {
        let r = self.algebra.dim();
        let n = insertions.len();
        if let Some((_, v)) = insertions.iter().find(|(_, v)| v.dim() != r) {
            return Err(Error::DimensionMismatch {
                expected: r,
                found: v.dim(),
            });
        }
        let levels: Vec<u32> = insertions.iter().map(|(a, _)| *a).collect();
        let psi = psi_intersection(genus, &levels)?;
        if psi.is_zero() {
            return Ok(Complex64::zero());
        }
        let mut total = Complex64::zero();
        let mut idx = vec![0usize; n];
        loop {
            let weight: Complex64 = idx
                .iter()
                .zip(insertions)
                .map(|(&m, (_, v))| v.coeffs[m])
                .product();
            if weight.norm() > 0.0 {
                let omega = self.omega(genus, &idx)?;
                total += weight * Complex64::from_rational(&omega);
            }
            let mut j = n;
            loop {
                if j == 0 {
                    return Ok(total * Complex64::from_rational(&psi));
                }
                j -= 1;
                idx[j] += 1;
                if idx[j] < r {
                    break;
                }
                idx[j] = 0;
            }
        }
    }
}

/// `⟨τ_{a_1}(f_{α_1})⋯⟩_g = ν_α^{1-g} ⟨τ_{a_1}⋯⟩_g` when all `α_i = α`, else 0.
pub fn canonical_correlator(
    genus: u32,
    cb: &CanonicalBasis,
    insertions: &[(u32, usize)],
) -> Result<Rational> {
    let r = cb.dim();
    if let Some(&(_, a)) = insertions.iter().find(|&&(_, a)| a >= r) {
        return Err(Error::InvalidInput(format!(
            "canonical index {a} out of range (dimension {r})"
        )));
    }
    let levels: Vec<u32> = insertions.iter().map(|&(a, _)| a).collect();
    let psi = psi_intersection(genus, &levels)?;
    let alpha = insertions[0].1;
    if insertions.iter().any(|&(_, a)| a != alpha) {
        return Ok(Rational::zero());
    }
    Ok(psi * nu_power(&cb.nus[alpha], 1 - genus as i64))
}

pub(crate) fn nu_power(nu: &Rational, e: i64) -> Rational {
    let base = if e < 0 { nu.recip() } else { nu.clone() };
    let mut out = Rational::one();
    for _ in 0..e.unsigned_abs() {
        out *= &base;
    }
    out
}
