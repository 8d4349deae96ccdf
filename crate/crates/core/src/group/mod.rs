//! Finite groups as dense multiplication tables.
//!
//! Elements are indices `0..order` and the identity is always index 0.

mod conjugacy;
pub mod perm;
mod spec;

use std::collections::{HashMap, VecDeque};

use crate::error::{Axiom, Error, Result};

pub use conjugacy::{conjugacy_data, joint_centralizer_order, ConjugacyData};
pub use spec::GroupSpec;

/// Largest order for which a dense Cayley table is materialized.
pub const DENSE_TABLE_LIMIT: usize = 16_384;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupLimits {
    /// Cap on the number of elements produced by any construction.
    pub max_order: usize,
    /// Cayley input of at most this order is checked for associativity.
    pub associativity_bound: usize,
}

impl Default for GroupLimits {
    fn default() -> Self {
        GroupLimits {
            max_order: 100_000,
            associativity_bound: 512,
        }
    }
}

impl GroupLimits {
    fn check_order(&self, order: usize) -> Result<()> {
        let limit = self.max_order.min(DENSE_TABLE_LIMIT);
        if order > limit {
            return Err(Error::OrderExceedsLimit { order, limit });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupTable {
    order: usize,
    mult: Vec<u32>,
    inv: Vec<u32>,
    names: Option<Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupName {
    Symmetric,
    Cyclic,
    Dihedral,
    Quaternion,
}

impl std::str::FromStr for GroupName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "S" => Ok(GroupName::Symmetric),
            "Z" | "C" => Ok(GroupName::Cyclic),
            "D" => Ok(GroupName::Dihedral),
            "Q8" | "Q" => Ok(GroupName::Quaternion),
            other => Err(Error::UnsupportedName(other.to_string())),
        }
    }
}

impl GroupTable {
    pub fn order(&self) -> usize {
        self.order
    }

    pub const IDENTITY: usize = 0;

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mult[a * self.order + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a] as usize
    }

    /// `g x g⁻¹`
    #[inline]
    pub fn conjugate(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }

    /// `[a, b] = a b a⁻¹ b⁻¹`
    #[inline]
    pub fn commutator(&self, a: usize, b: usize) -> usize {
        self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b)))
    }

    pub fn element_order(&self, x: usize) -> usize {
        let mut k = 1;
        let mut y = x;
        while y != Self::IDENTITY {
            y = self.mul(y, x);
            k += 1;
        }
        k
    }

    pub fn element_names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    /// Display name of an element, falling back to its index.
    pub fn element_name(&self, x: usize) -> String {
        match &self.names {
            Some(n) => n[x].clone(),
            None => x.to_string(),
        }
    }

    pub fn element_by_name(&self, name: &str) -> Option<usize> {
        let names = self.names.as_ref()?;
        let wanted: String = name.split_whitespace().collect::<Vec<_>>().join(" ");
        names.iter().position(|n| *n == wanted)
    }

    /// Row-major copy of the multiplication table.
    pub fn cayley_table(&self) -> Vec<Vec<usize>> {
        (0..self.order)
            .map(|a| (0..self.order).map(|b| self.mul(a, b)).collect())
            .collect()
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn build_from_cayley(table: &[Vec<usize>]) -> Result<Self> {
        Self::build_from_cayley_with(table, &GroupLimits::default())
    }

    /// Validates the group axioms and relabels so the identity is index 0.
    pub fn build_from_cayley_with(table: &[Vec<usize>], limits: &GroupLimits) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::InvalidInput("empty Cayley table".into()));
        }
        limits.check_order(n)?;
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            if let Some(j) = row.iter().position(|&x| x >= n) {
                return Err(Error::NotAGroup {
                    axiom: Axiom::Closure,
                    witness: [i, j, row[j]],
                });
            }
        }
        for (i, row) in table.iter().enumerate() {
            if let Some((j, k)) = first_repeat(row.iter().copied(), n) {
                return Err(Error::NotAGroup {
                    axiom: Axiom::LatinRow,
                    witness: [i, j, k],
                });
            }
        }
        for j in 0..n {
            if let Some((i, k)) = first_repeat(table.iter().map(|row| row[j]), n) {
                return Err(Error::NotAGroup {
                    axiom: Axiom::LatinColumn,
                    witness: [j, i, k],
                });
            }
        }
        let e = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or(Error::NotAGroup {
                axiom: Axiom::Identity,
                witness: [0, 0, table[0][0]],
            })?;
        let mut inv = vec![0u32; n];
        for x in 0..n {
            let y = table[x].iter().position(|&z| z == e).unwrap_or(0);
            if table[y][x] != e {
                return Err(Error::NotAGroup {
                    axiom: Axiom::Inverse,
                    witness: [x, y, table[y][x]],
                });
            }
            inv[x] = y as u32;
        }
        if n <= limits.associativity_bound {
            for x in 0..n {
                for y in 0..n {
                    let xy = table[x][y];
                    for z in 0..n {
                        if table[xy][z] != table[x][table[y][z]] {
                            return Err(Error::NotAGroup {
                                axiom: Axiom::Associativity,
                                witness: [x, y, z],
                            });
                        }
                    }
                }
            }
        }
        // swap labels e <-> 0 so the identity sits at index 0
        let relabel = |x: usize| -> usize {
            if x == e {
                0
            } else if x == 0 {
                e
            } else {
                x
            }
        };
        let mut mult = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                mult[relabel(a) * n + relabel(b)] = relabel(table[a][b]) as u32;
            }
        }
        let mut inv2 = vec![0u32; n];
        for x in 0..n {
            inv2[relabel(x)] = relabel(inv[x] as usize) as u32;
        }
        Ok(GroupTable {
            order: n,
            mult,
            inv: inv2,
            names: None,
        })
    }

    pub fn build_from_generators(perms: &[Vec<u32>]) -> Result<Self> {
        Self::build_from_generators_with(perms, &GroupLimits::default())
    }

    /// Closure of the generators under composition, by breadth-first search.
    ///
    /// Elements are numbered in discovery order with the identity first.
    pub fn build_from_generators_with(perms: &[Vec<u32>], limits: &GroupLimits) -> Result<Self> {
        let degree = perms.iter().map(Vec::len).max().unwrap_or(0);
        let gens: Vec<perm::Perm> = perms.iter().map(|p| perm::pad(p, degree)).collect();
        for g in &gens {
            if !perm::is_bijection(g) {
                return Err(Error::InvalidInput(format!(
                    "generator {g:?} is not a permutation"
                )));
            }
        }
        let identity: perm::Perm = (0..degree as u32).collect();
        let mut elements = vec![identity.clone()];
        let mut index: HashMap<perm::Perm, u32> = HashMap::from([(identity, 0)]);
        // parent[x] = (p, k) with element x = element p ∘ gens[k]
        let mut parent: Vec<(u32, u32)> = vec![(0, 0)];
        let mut right: Vec<Vec<u32>> = vec![Vec::new(); gens.len()];
        let mut queue = VecDeque::from([0usize]);
        let cap = limits.max_order.min(DENSE_TABLE_LIMIT);
        while let Some(x) = queue.pop_front() {
            for (k, g) in gens.iter().enumerate() {
                let y = perm::compose(&elements[x], g);
                let idx = match index.get(&y) {
                    Some(&i) => i,
                    None => {
                        let i = elements.len() as u32;
                        if elements.len() + 1 > cap {
                            return Err(Error::OrderExceedsLimit {
                                order: elements.len() + 1,
                                limit: cap,
                            });
                        }
                        index.insert(y.clone(), i);
                        elements.push(y);
                        parent.push((x as u32, k as u32));
                        queue.push_back(i as usize);
                        i
                    }
                };
                let row = &mut right[k];
                if row.len() <= x {
                    row.resize(x + 1, 0);
                }
                row[x] = idx;
            }
        }
        let n = elements.len();
        let mut mult = vec![0u32; n * n];
        for i in 0..n {
            mult[i * n] = i as u32;
            for j in 1..n {
                let (p, k) = parent[j];
                let ip = mult[i * n + p as usize];
                mult[i * n + j] = right[k as usize][ip as usize];
            }
        }
        let mut inv = vec![0u32; n];
        for i in 0..n {
            let j = (0..n).find(|&j| mult[i * n + j] == 0).expect("closure has inverses");
            inv[i] = j as u32;
        }
        let names = elements.iter().map(|p| perm::format_cycles(p)).collect();
        Ok(GroupTable {
            order: n,
            mult,
            inv,
            names: Some(names),
        })
    }

    pub fn named(name: GroupName, param: usize) -> Result<Self> {
        Self::named_with(name, param, &GroupLimits::default())
    }

    /// `S n`, `Z n`, `D n` (order `2n`) and `Q8`.
    pub fn named_with(name: GroupName, param: usize, limits: &GroupLimits) -> Result<Self> {
        if param == 0 && name != GroupName::Quaternion {
            return Err(Error::InvalidInput(format!(
                "group parameter must be at least 1, got {param}"
            )));
        }
        match name {
            GroupName::Symmetric => {
                // |S_n| = n! must fit before we enumerate
                let mut order: usize = 1;
                for k in 2..=param {
                    order = order.saturating_mul(k);
                }
                limits.check_order(order)?;
                if param == 1 {
                    return Self::build_from_generators_with(&[], limits);
                }
                let transposition = perm::pad(&vec![1, 0], param);
                let cycle: Vec<u32> = (0..param as u32).map(|i| (i + 1) % param as u32).collect();
                Self::build_from_generators_with(&[transposition, cycle], limits)
            }
            GroupName::Cyclic => {
                limits.check_order(param)?;
                if param == 1 {
                    return Self::build_from_generators_with(&[], limits);
                }
                let cycle: Vec<u32> = (0..param as u32).map(|i| (i + 1) % param as u32).collect();
                Self::build_from_generators_with(&[cycle], limits)
            }
            GroupName::Dihedral => {
                let n = param;
                limits.check_order(2 * n)?;
                // index k + n e  <->  r^k s^e
                let table: Vec<Vec<usize>> = (0..2 * n)
                    .map(|x| {
                        let (a, b) = (x % n, x / n);
                        (0..2 * n)
                            .map(|y| {
                                let (c, d) = (y % n, y / n);
                                let k = if b == 0 { (a + c) % n } else { (a + n - c) % n };
                                k + n * ((b + d) % 2)
                            })
                            .collect()
                    })
                    .collect();
                let mut g = Self::build_from_cayley_with(&table, limits)?;
                let names = (0..2 * n)
                    .map(|x| {
                        let (k, e) = (x % n, x / n);
                        match (k, e) {
                            (0, 0) => "1".to_string(),
                            (0, _) => "s".to_string(),
                            (k, 0) => format!("r^{k}"),
                            (k, _) => format!("r^{k} s"),
                        }
                    })
                    .collect();
                g.names = Some(names);
                Ok(g)
            }
            GroupName::Quaternion => {
                // unit products: i j = k, j k = i, k i = j, squares are -1
                const UNIT: [[(bool, usize); 4]; 4] = [
                    [(false, 0), (false, 1), (false, 2), (false, 3)],
                    [(false, 1), (true, 0), (false, 3), (true, 2)],
                    [(false, 2), (true, 3), (true, 0), (false, 1)],
                    [(false, 3), (false, 2), (true, 1), (true, 0)],
                ];
                // index 2u + s for (±1)^s * unit u
                let table: Vec<Vec<usize>> = (0..8)
                    .map(|x| {
                        (0..8)
                            .map(|y| {
                                let (neg, u) = UNIT[x / 2][y / 2];
                                let sign = (x % 2) ^ (y % 2) ^ usize::from(neg);
                                2 * u + sign
                            })
                            .collect()
                    })
                    .collect();
                let mut g = Self::build_from_cayley_with(&table, limits)?;
                g.names = Some(
                    ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]
                        .iter()
                        .map(|s| s.to_string())
                        .collect(),
                );
                Ok(g)
            }
        }
    }

    pub fn direct_product(g: &GroupTable, h: &GroupTable) -> Result<Self> {
        Self::direct_product_with(g, h, &GroupLimits::default())
    }

    /// Element `(x, y)` has index `x·|H| + y`.
    pub fn direct_product_with(g: &GroupTable, h: &GroupTable, limits: &GroupLimits) -> Result<Self> {
        let (ng, nh) = (g.order, h.order);
        let n = ng.checked_mul(nh).ok_or(Error::OrderExceedsLimit {
            order: usize::MAX,
            limit: limits.max_order,
        })?;
        limits.check_order(n)?;
        let mut mult = vec![0u32; n * n];
        for a in 0..n {
            let (x, y) = (a / nh, a % nh);
            for b in 0..n {
                let (x2, y2) = (b / nh, b % nh);
                mult[a * n + b] = (g.mul(x, x2) * nh + h.mul(y, y2)) as u32;
            }
        }
        let inv = (0..n)
            .map(|a| (g.inv(a / nh) * nh + h.inv(a % nh)) as u32)
            .collect();
        let names = match (&g.names, &h.names) {
            (None, None) => None,
            _ => Some(
                (0..n)
                    .map(|a| format!("[{}, {}]", g.element_name(a / nh), h.element_name(a % nh)))
                    .collect(),
            ),
        };
        Ok(GroupTable {
            order: n,
            mult,
            inv,
            names,
        })
    }
}

fn first_repeat(values: impl Iterator<Item = usize>, n: usize) -> Option<(usize, usize)> {
    let mut seen = vec![usize::MAX; n];
    for (pos, v) in values.enumerate() {
        if seen[v] != usize::MAX {
            return Some((seen[v], pos));
        }
        seen[v] = pos;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_and_z2_from_cayley() {
        let t = GroupTable::build_from_cayley(&[vec![0]]).unwrap();
        assert_eq!(t.order(), 1);
        let z2 = GroupTable::build_from_cayley(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(z2.order(), 2);
        assert_eq!((z2.inv(0), z2.inv(1)), (0, 1));
    }

    #[test]
    fn latin_violation_is_reported() {
        let err = GroupTable::build_from_cayley(&[vec![0, 1], vec![1, 1]]).unwrap_err();
        assert!(matches!(
            err,
            Error::NotAGroup {
                axiom: Axiom::LatinRow,
                witness: [1, 0, 1]
            }
        ));
    }

    #[test]
    fn identity_is_relabelled_to_zero() {
        // Z_3 with identity at label 2
        let table = vec![vec![1, 2, 0], vec![2, 0, 1], vec![0, 1, 2]];
        let g = GroupTable::build_from_cayley(&table).unwrap();
        for x in 0..3 {
            assert_eq!(g.mul(0, x), x);
            assert_eq!(g.mul(x, g.inv(x)), 0);
        }
    }

    #[test]
    fn non_associative_latin_square() {
        // a Latin square with identity 0 that is not associative (order 5 loop)
        let table = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        let err = GroupTable::build_from_cayley(&table).unwrap_err();
        assert!(matches!(
            err,
            Error::NotAGroup {
                axiom: Axiom::Associativity,
                ..
            }
        ));
    }

    #[test]
    fn generator_closures() {
        let s3 = GroupTable::build_from_generators(&[
            perm::parse_cycles("(0 1)").unwrap(),
            perm::parse_cycles("(0 1 2)").unwrap(),
        ])
        .unwrap();
        assert_eq!(s3.order(), 6);
        assert_eq!(s3.element_name(0), "()");
        let trivial = GroupTable::build_from_generators(&[]).unwrap();
        assert_eq!(trivial.order(), 1);
        let z4 = GroupTable::build_from_generators(&[perm::parse_cycles("(0 1 2 3)").unwrap()])
            .unwrap();
        assert_eq!(z4.order(), 4);
        assert!(z4.is_abelian());
    }

    #[test]
    fn closure_cap() {
        let limits = GroupLimits {
            max_order: 10,
            ..Default::default()
        };
        let err = GroupTable::named_with(GroupName::Symmetric, 4, &limits).unwrap_err();
        assert!(matches!(err, Error::OrderExceedsLimit { .. }));
    }

    #[test]
    fn named_groups() {
        assert_eq!(GroupTable::named(GroupName::Symmetric, 3).unwrap().order(), 6);
        assert_eq!(GroupTable::named(GroupName::Symmetric, 4).unwrap().order(), 24);
        assert_eq!(GroupTable::named(GroupName::Cyclic, 1).unwrap().order(), 1);
        assert_eq!(GroupTable::named(GroupName::Dihedral, 4).unwrap().order(), 8);
        assert_eq!(GroupTable::named(GroupName::Dihedral, 1).unwrap().order(), 2);
        let q8 = GroupTable::named(GroupName::Quaternion, 0).unwrap();
        assert_eq!(q8.order(), 8);
        let involutions = (0..8).filter(|&x| q8.element_order(x) == 2).count();
        assert_eq!(involutions, 1);
        assert!(!q8.is_abelian());
        assert!("X".parse::<GroupName>().is_err());
    }

    #[test]
    fn products() {
        let z2 = GroupTable::named(GroupName::Cyclic, 2).unwrap();
        let z3 = GroupTable::named(GroupName::Cyclic, 3).unwrap();
        let p = GroupTable::direct_product(&z2, &z3).unwrap();
        assert_eq!(p.order(), 6);
        assert!(p.is_abelian());

        let trivial = GroupTable::named(GroupName::Cyclic, 1).unwrap();
        let s3 = GroupTable::named(GroupName::Symmetric, 3).unwrap();
        let q = GroupTable::direct_product(&trivial, &s3).unwrap();
        assert_eq!(q.cayley_table(), s3.cayley_table());
    }
}
