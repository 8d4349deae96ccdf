use super::GroupTable;

/// Conjugacy classes and centralizer orders of a group.
///
/// Class 0 is always the identity class; classes are numbered by the
/// smallest element index they contain, which is also the representative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjugacyData {
    pub classes: Vec<Vec<usize>>,
    pub class_of: Vec<usize>,
    pub representative: Vec<usize>,
    pub class_size: Vec<usize>,
    pub centralizer_order: Vec<usize>,
    pub inverse_class: Vec<usize>,
}

impl ConjugacyData {
    /// Number of conjugacy classes.
    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn group_order(&self) -> usize {
        self.class_of.len()
    }

    /// Centralizer order of the representative of class `k`.
    pub fn class_centralizer(&self, k: usize) -> usize {
        self.centralizer_order[self.representative[k]]
    }
}

pub fn conjugacy_data(g: &GroupTable) -> ConjugacyData {
    let n = g.order();
    let mut class_of = vec![usize::MAX; n];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for x in 0..n {
        if class_of[x] != usize::MAX {
            continue;
        }
        let k = classes.len();
        let mut members = Vec::new();
        for h in 0..n {
            let y = g.conjugate(h, x);
            if class_of[y] == usize::MAX {
                class_of[y] = k;
                members.push(y);
            }
        }
        members.sort_unstable();
        classes.push(members);
    }
    let representative: Vec<usize> = classes.iter().map(|c| c[0]).collect();
    let class_size: Vec<usize> = classes.iter().map(Vec::len).collect();
    let mut centralizer_order = vec![0; n];
    for (k, members) in classes.iter().enumerate() {
        let rep = representative[k];
        let c = (0..n).filter(|&h| g.mul(h, rep) == g.mul(rep, h)).count();
        for &x in members {
            centralizer_order[x] = c;
        }
    }
    let inverse_class = representative.iter().map(|&r| class_of[g.inv(r)]).collect();
    ConjugacyData {
        classes,
        class_of,
        representative,
        class_size,
        centralizer_order,
        inverse_class,
    }
}

/// Order of `{x : x commutes with every element of elems}`.
pub fn joint_centralizer_order(g: &GroupTable, elems: &[usize]) -> usize {
    (0..g.order())
        .filter(|&x| elems.iter().all(|&e| g.mul(x, e) == g.mul(e, x)))
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupName;

    fn check_identities(g: &GroupTable, cd: &ConjugacyData) {
        let n = g.order();
        assert_eq!(cd.class_size.iter().sum::<usize>(), n);
        for x in 0..n {
            assert_eq!(cd.class_size[cd.class_of[x]] * cd.centralizer_order[x], n);
        }
        assert_eq!(cd.classes[0], vec![0]);
        assert_eq!(cd.inverse_class[0], 0);
        for k in 0..cd.num_classes() {
            assert_eq!(cd.inverse_class[cd.inverse_class[k]], k);
        }
    }

    #[test]
    fn s3_classes() {
        let g = GroupTable::named(GroupName::Symmetric, 3).unwrap();
        let cd = conjugacy_data(&g);
        assert_eq!(cd.class_size, vec![1, 3, 2]);
        let cent: Vec<usize> = (0..3).map(|k| cd.class_centralizer(k)).collect();
        assert_eq!(cent, vec![6, 2, 3]);
        check_identities(&g, &cd);
    }

    #[test]
    fn z4_and_q8_classes() {
        let z4 = GroupTable::named(GroupName::Cyclic, 4).unwrap();
        let cd = conjugacy_data(&z4);
        assert_eq!(cd.class_size, vec![1; 4]);
        assert!(cd.centralizer_order.iter().all(|&c| c == 4));

        let q8 = GroupTable::named(GroupName::Quaternion, 0).unwrap();
        let cd = conjugacy_data(&q8);
        assert_eq!(cd.class_size, vec![1, 1, 2, 2, 2]);
        check_identities(&q8, &cd);
    }

    #[test]
    fn joint_centralizers() {
        let s3 = GroupTable::named(GroupName::Symmetric, 3).unwrap();
        let t = s3.element_by_name("(0 1)").unwrap();
        let c = s3.element_by_name("(0 1 2)").unwrap();
        assert_eq!(joint_centralizer_order(&s3, &[t, c]), 1);
        assert_eq!(joint_centralizer_order(&s3, &[0]), 6);
        let q8 = GroupTable::named(GroupName::Quaternion, 0).unwrap();
        let minus_one = q8.element_by_name("-1").unwrap();
        assert_eq!(joint_centralizer_order(&q8, &[minus_one]), 8);
    }

    #[test]
    fn product_class_counts() {
        let s3 = GroupTable::named(GroupName::Symmetric, 3).unwrap();
        let z2 = GroupTable::named(GroupName::Cyclic, 2).unwrap();
        let p = GroupTable::direct_product(&s3, &z2).unwrap();
        let cd = conjugacy_data(&p);
        assert_eq!(p.order(), 12);
        assert_eq!(cd.num_classes(), 6);
        check_identities(&p, &cd);
    }
}
