//! Permutations in cycle notation.

use crate::error::{Error, Result};

/// Image list of a permutation of `0..degree`.
pub type Perm = Vec<u32>;

/// Parses `(0 1)(2 3)`; `()` or an empty string is the identity.
///
/// The result has degree `max point + 1`; pad with [`pad`] to a common degree.
pub fn parse_cycles(s: &str) -> Result<Perm> {
    let mut cycles: Vec<Vec<u32>> = Vec::new();
    let mut rest = s.trim();
    while !rest.is_empty() {
        let body_start = rest
            .strip_prefix('(')
            .ok_or_else(|| Error::InvalidInput(format!("expected `(` in cycle notation `{s}`")))?;
        let close = body_start
            .find(')')
            .ok_or_else(|| Error::InvalidInput(format!("unclosed cycle in `{s}`")))?;
        let body = &body_start[..close];
        let points = body
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<u32>()
                    .map_err(|_| Error::InvalidInput(format!("bad point `{t}` in `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        cycles.push(points);
        rest = body_start[close + 1..].trim_start();
    }
    let degree = cycles
        .iter()
        .flatten()
        .map(|&p| p as usize + 1)
        .max()
        .unwrap_or(0);
    let mut perm: Perm = (0..degree as u32).collect();
    let mut seen = vec![false; degree];
    for cycle in &cycles {
        for (i, &p) in cycle.iter().enumerate() {
            if seen[p as usize] {
                return Err(Error::InvalidInput(format!(
                    "point {p} repeated in cycle notation `{s}`"
                )));
            }
            seen[p as usize] = true;
            perm[p as usize] = cycle[(i + 1) % cycle.len()];
        }
    }
    Ok(perm)
}

pub fn pad(perm: &Perm, degree: usize) -> Perm {
    let mut out = perm.clone();
    out.extend(perm.len() as u32..degree as u32);
    out
}

pub fn is_bijection(perm: &[u32]) -> bool {
    let mut seen = vec![false; perm.len()];
    for &p in perm {
        match seen.get_mut(p as usize) {
            Some(s) if !*s => *s = true,
            _ => return false,
        }
    }
    true
}

/// `(x ∘ y)(i) = x(y(i))`.
pub fn compose(x: &[u32], y: &[u32]) -> Perm {
    y.iter().map(|&i| x[i as usize]).collect()
}

/// Disjoint-cycle notation with fixed points omitted; identity is `()`.
pub fn format_cycles(perm: &[u32]) -> String {
    let mut seen = vec![false; perm.len()];
    let mut out = String::new();
    for start in 0..perm.len() {
        if seen[start] || perm[start] as usize == start {
            continue;
        }
        let mut cycle = vec![start];
        seen[start] = true;
        let mut next = perm[start] as usize;
        while next != start {
            seen[next] = true;
            cycle.push(next);
            next = perm[next] as usize;
        }
        out.push('(');
        let pts: Vec<String> = cycle.iter().map(|p| p.to_string()).collect();
        out.push_str(&pts.join(" "));
        out.push(')');
    }
    if out.is_empty() {
        out.push_str("()");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_cycles() {
        let p = parse_cycles("(0 1)(2 4 3)").unwrap();
        assert_eq!(p, vec![1, 0, 4, 2, 3]);
        assert_eq!(format_cycles(&p), "(0 1)(2 4 3)");
        assert_eq!(parse_cycles("()").unwrap(), Vec::<u32>::new());
        assert_eq!(format_cycles(&[0, 1, 2]), "()");
    }

    #[test]
    fn rejects_repeated_points() {
        assert!(parse_cycles("(0 1)(1 2)").is_err());
        assert!(parse_cycles("(0 1").is_err());
        assert!(parse_cycles("0 1").is_err());
    }

    #[test]
    fn composition_is_right_to_left() {
        let a = parse_cycles("(0 1)").unwrap();
        let b = pad(&parse_cycles("(1 2)").unwrap(), 3);
        let a = pad(&a, 3);
        // (0 1)(1 2): 2 -> 1 -> 0
        assert_eq!(compose(&a, &b)[2], 0);
    }
}
