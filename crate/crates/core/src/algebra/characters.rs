//! Irreducible characters by Burnside's method.
//!
//! The central characters `ω_α(C_k) = |C_k| χ_α(g_k) / χ_α(1)` form the
//! common eigenvectors of the class-multiplication matrices
//! `(M_i)_{jk} = a_{ijk}`. A random real combination of the `M_i` almost
//! surely has simple spectrum, so its eigenvectors are exactly those.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ClassAlgebra;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacterOptions {
    pub tolerance: f64,
    pub seed: u64,
    pub retries: usize,
}

impl Default for CharacterOptions {
    fn default() -> Self {
        CharacterOptions {
            tolerance: 1e-9,
            seed: 0,
            retries: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharacterTable {
    /// `χ_α(1)`; row 0 is the trivial character.
    pub degrees: Vec<u64>,
    /// `values[α][k] = χ_α(representative of class k)`.
    pub values: Vec<Vec<Complex64>>,
    pub tolerance: f64,
    class_size: Vec<usize>,
    inverse_class: Vec<usize>,
    order: usize,
}

impl CharacterTable {
    pub fn num_irreducibles(&self) -> usize {
        self.degrees.len()
    }

    pub fn group_order(&self) -> usize {
        self.order
    }

    /// `max |⟨χ_α, χ_β⟩ - δ_αβ|` over all pairs.
    pub fn orthogonality_residual(&self) -> f64 {
        let r = self.num_irreducibles();
        let mut worst: f64 = 0.0;
        for a in 0..r {
            for b in 0..r {
                let s: Complex64 = (0..r)
                    .map(|k| self.values[a][k] * self.values[b][k].conj() * self.class_size[k] as f64)
                    .sum::<Complex64>()
                    / self.order as f64;
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((s - target).norm());
            }
        }
        worst
    }

    /// `max |χ_α(g⁻¹) - conj χ_α(g)|`.
    pub fn inverse_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for row in &self.values {
            for (k, v) in row.iter().enumerate() {
                worst = worst.max((row[self.inverse_class[k]] - v.conj()).norm());
            }
        }
        worst
    }
}

pub fn character_table(algebra: &ClassAlgebra, opts: &CharacterOptions) -> Result<CharacterTable> {
    let r = algebra.dim();
    let cd = algebra.conjugacy();
    let order = algebra.group_order();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.retries.max(1) {
        let coeffs: Vec<f64> = (0..r).map(|_| rng.random_range(-1.0..1.0)).collect();
        let m = DMatrix::<f64>::from_fn(r, r, |j, k| {
            (0..r)
                .map(|i| coeffs[i] * algebra.class_mult_coefficient(i, j, k) as f64)
                .sum()
        });
        let Some(central) = simple_eigenvectors(&m) else {
            continue;
        };
        let mut rows = Vec::with_capacity(r);
        for w in central {
            let norm: f64 = (0..r)
                .map(|k| w[k].norm_sqr() / cd.class_size[k] as f64)
                .sum();
            let d = (order as f64 / norm).sqrt();
            let degree = d.round();
            if degree < 1.0 || (d - degree).abs() > 1e-4 {
                return Err(Error::CharacterTableInvalid(format!(
                    "degree estimate {d} is not an integer"
                )));
            }
            let values: Vec<Complex64> = (0..r)
                .map(|k| w[k] * degree / cd.class_size[k] as f64)
                .collect();
            rows.push((degree as u64, values));
        }
        rows.sort_by(|a, b| sort_key(a).partial_cmp(&sort_key(b)).expect("finite keys"));
        let table = CharacterTable {
            degrees: rows.iter().map(|(d, _)| *d).collect(),
            values: rows.into_iter().map(|(_, v)| v).collect(),
            tolerance: opts.tolerance,
            class_size: cd.class_size.clone(),
            inverse_class: cd.inverse_class.clone(),
            order,
        };
        validate(&table)?;
        return Ok(table);
    }
    Err(Error::DegenerateSpectrum {
        retries: opts.retries,
    })
}

fn sort_key((degree, values): &(u64, Vec<Complex64>)) -> Vec<f64> {
    let trivial = values.iter().all(|v| (v - 1.0).norm() < 1e-6);
    let mut key = vec![if trivial { 0.0 } else { 1.0 }, *degree as f64];
    for v in values {
        key.push(-(v.re * 1e6).round());
        key.push(-(v.im * 1e6).round());
    }
    key
}

fn validate(t: &CharacterTable) -> Result<()> {
    let sum_sq: u64 = t.degrees.iter().map(|d| d * d).sum();
    if sum_sq != t.order as u64 {
        return Err(Error::CharacterTableInvalid(format!(
            "sum of squared degrees {sum_sq} != |G| = {}",
            t.order
        )));
    }
    let orth = t.orthogonality_residual();
    if orth > t.tolerance {
        return Err(Error::CharacterTableInvalid(format!(
            "orthogonality residual {orth:e}"
        )));
    }
    let inv = t.inverse_residual();
    if inv > t.tolerance {
        return Err(Error::CharacterTableInvalid(format!(
            "inverse-class residual {inv:e}"
        )));
    }
    Ok(())
}

/// Eigenvectors of `m`, scaled so the identity-class entry is 1, or `None`
/// when two eigenvalues (nearly) coincide.
fn simple_eigenvectors(m: &DMatrix<f64>) -> Option<Vec<Vec<Complex64>>> {
    let r = m.nrows();
    let eig = m.complex_eigenvalues();
    let scale = eig.iter().map(|z| z.norm()).fold(1.0, f64::max);
    for i in 0..r {
        for j in 0..i {
            if (eig[i] - eig[j]).norm() < 1e-6 * scale {
                return None;
            }
        }
    }
    let mc = m.map(|x| Complex64::new(x, 0.0));
    let mut out = Vec::with_capacity(r);
    for &lambda in eig.iter() {
        let a = &mc - DMatrix::<Complex64>::identity(r, r) * lambda;
        let svd = a.svd(false, true);
        let vt = svd.v_t?;
        let (idx, _) = svd
            .singular_values
            .iter()
            .enumerate()
            .min_by(|x, y| x.1.partial_cmp(y.1).expect("finite"))?;
        let v: Vec<Complex64> = vt.row(idx).iter().map(|c| c.conj()).collect();
        if v[0].norm() < 1e-9 {
            return None;
        }
        let v0 = v[0];
        out.push(v.into_iter().map(|x| x / v0).collect());
    }
    Some(out)
}
