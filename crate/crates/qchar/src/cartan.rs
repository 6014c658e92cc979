//! Cartan matrices of the built-in families, symmetrizers and the quantized
//! Cartan matrix `C(z)`.
//!
//! Nodes are 0-based in memory and 1-based in every text form.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::CartanError;
use crate::laurent::Laurent;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    A(usize),
    B(usize),
    C(usize),
    D(usize),
    F4,
    G2,
    /// Untwisted affine type A with `l + 1` nodes.
    AffineA(usize),
    /// A full subdiagram of another family, keeping the parent's symmetrizer.
    Sub {
        parent: Box<Family>,
        nodes: Vec<usize>,
    },
}

impl Family {
    pub fn is_affine(&self) -> bool {
        match self {
            Family::AffineA(_) => true,
            Family::Sub { parent, .. } => parent.is_affine(),
            _ => false,
        }
    }

    /// Letter used by the family-scoped checks ('A', 'B', 'C', ...).
    pub fn letter(&self) -> &'static str {
        match self {
            Family::A(_) => "A",
            Family::B(_) => "B",
            Family::C(_) => "C",
            Family::D(_) => "D",
            Family::F4 => "F",
            Family::G2 => "G",
            Family::AffineA(_) => "A~",
            Family::Sub { .. } => "sub",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::A(n) => write!(f, "A{n}"),
            Family::B(n) => write!(f, "B{n}"),
            Family::C(n) => write!(f, "C{n}"),
            Family::D(n) => write!(f, "D{n}"),
            Family::F4 => f.write_str("F4"),
            Family::G2 => f.write_str("G2"),
            Family::AffineA(l) => write!(f, "A{l}~"),
            Family::Sub { parent, nodes } => {
                let ns: Vec<String> = nodes.iter().map(|n| (n + 1).to_string()).collect();
                write!(f, "{parent}[{}]", ns.join(","))
            }
        }
    }
}

impl FromStr for Family {
    type Err = CartanError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let unknown = || CartanError::UnknownFamily(s.to_string());
        let t = s.trim();
        let (body, affine) = match t.strip_suffix('~') {
            Some(b) => (b, true),
            None => (t, false),
        };
        let mut chars = body.chars();
        let letter = chars.next().ok_or_else(unknown)?.to_ascii_uppercase();
        let rank: usize = chars.as_str().parse().map_err(|_| unknown())?;
        let fam = match (letter, affine) {
            ('A', false) => Family::A(rank),
            ('A', true) => Family::AffineA(rank),
            ('B', false) => Family::B(rank),
            ('C', false) => Family::C(rank),
            ('D', false) => Family::D(rank),
            ('F', false) if rank == 4 => Family::F4,
            ('G', false) if rank == 2 => Family::G2,
            ('F', false) | ('G', false) => {
                return Err(CartanError::InvalidRank {
                    family: letter.to_string(),
                    rank,
                })
            }
            _ => return Err(unknown()),
        };
        Ok(fam)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CartanData {
    pub family: Family,
    pub n: usize,
    pub c: Vec<Vec<i32>>,
    pub r: Vec<i32>,
}

/// Square matrix of Laurent polynomials in `z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZLaurentMatrix {
    pub n: usize,
    pub entries: Vec<Vec<Laurent>>,
}

pub fn build_cartan(family: Family) -> Result<CartanData, CartanError> {
    let bad = |fam: &str, rank: usize| CartanError::InvalidRank {
        family: fam.to_string(),
        rank,
    };
    let (n, links): (usize, Vec<(usize, usize, i32, i32)>) = match &family {
        Family::A(n) => {
            if *n < 1 {
                return Err(bad("A", *n));
            }
            (*n, (0..n - 1).map(|i| (i, i + 1, -1, -1)).collect())
        }
        Family::B(n) | Family::C(n) => {
            if *n < 2 {
                return Err(bad(family.letter(), *n));
            }
            let mut l: Vec<_> = (0..n - 2).map(|i| (i, i + 1, -1, -1)).collect();
            // B: C_{n,n-1} = -2 (node n short). C: C_{n-1,n} = -2 (node n long).
            if matches!(family, Family::B(_)) {
                l.push((n - 2, n - 1, -1, -2));
            } else {
                l.push((n - 2, n - 1, -2, -1));
            }
            (*n, l)
        }
        Family::D(n) => {
            if *n < 4 {
                return Err(bad("D", *n));
            }
            let mut l: Vec<_> = (0..n - 2).map(|i| (i, i + 1, -1, -1)).collect();
            l.push((n - 3, n - 1, -1, -1));
            (*n, l)
        }
        // Nodes 1, 2 short and 3, 4 long.
        Family::F4 => (4, vec![(0, 1, -1, -1), (1, 2, -2, -1), (2, 3, -1, -1)]),
        // Node 1 long.
        Family::G2 => (2, vec![(0, 1, -1, -3)]),
        Family::AffineA(l) => {
            if *l < 2 {
                return Err(bad("A~", *l));
            }
            (
                l + 1,
                (0..=*l).map(|i| (i, (i + 1) % (l + 1), -1, -1)).collect(),
            )
        }
        Family::Sub { .. } => return Err(CartanError::UnknownFamily(family.to_string())),
    };
    let mut c = vec![vec![0; n]; n];
    for (i, row) in c.iter_mut().enumerate() {
        row[i] = 2;
    }
    for (i, j, cij, cji) in links {
        c[i][j] = cij;
        c[j][i] = cji;
    }
    let r = symmetrizer(&c);
    Ok(CartanData { family, n, c, r })
}

/// Minimal positive `r` with `diag(r) C` symmetric; assumes a connected diagram.
pub fn symmetrizer(c: &[Vec<i32>]) -> Vec<i32> {
    let n = c.len();
    // Rational r_i = num/den, propagated along edges from node 0.
    let mut r: Vec<Option<(i64, i64)>> = vec![None; n];
    if n == 0 {
        return Vec::new();
    }
    r[0] = Some((1, 1));
    let mut stack = vec![0];
    while let Some(i) = stack.pop() {
        let (pi, qi) = r[i].unwrap();
        for j in 0..n {
            if j != i && c[i][j] != 0 && r[j].is_none() {
                // r_i c_ij = r_j c_ji
                let (p, q) = (pi * c[i][j] as i64, qi * c[j][i] as i64);
                let g = gcd(p, q);
                r[j] = Some((p / g * q.signum(), (q / g).abs()));
                stack.push(j);
            }
        }
    }
    let r: Vec<(i64, i64)> = r.into_iter().map(|x| x.unwrap_or((1, 1))).collect();
    let den = r.iter().fold(1, |acc, &(_, q)| acc / gcd(acc, q) * q);
    let ints: Vec<i64> = r.iter().map(|&(p, q)| p * (den / q)).collect();
    let g = ints.iter().fold(0, |acc, &x| gcd(acc, x));
    ints.iter().map(|&x| (x / g) as i32).collect()
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `[l]_z = (z^l - z^{-l}) / (z - z^{-1})`.
pub fn quantum_integer(l: i32) -> Laurent {
    let k = l.abs();
    let sign = if l < 0 { -1 } else { 1 };
    Laurent::from_terms((0..k).map(|p| (k - 1 - 2 * p, sign)))
}

impl CartanData {
    pub fn check_node(&self, node: usize) -> Result<(), CartanError> {
        if node < self.n {
            Ok(())
        } else {
            Err(CartanError::NodeOutOfRange {
                node: node + 1,
                rank: self.n,
            })
        }
    }

    /// Neighbors `j` of `i` with `C_{ji} < 0`.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&j| j != i && self.c[j][i] < 0)
    }

    pub fn symmetrized(&self) -> Vec<Vec<i64>> {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| self.r[i] as i64 * self.c[i][j] as i64)
                    .collect()
            })
            .collect()
    }

    pub fn is_symmetrizable_by_r(&self) -> bool {
        let b = self.symmetrized();
        (0..self.n).all(|i| (0..self.n).all(|j| b[i][j] == b[j][i]))
    }

    pub fn satisfies_invariants(&self) -> bool {
        let n = self.n;
        self.c.len() == n
            && self.r.len() == n
            && self.r.iter().all(|&x| x > 0)
            && (0..n).all(|i| {
                self.c[i][i] == 2
                    && (0..n).all(|j| {
                        i == j
                            || (self.c[i][j] <= 0 && ((self.c[i][j] == 0) == (self.c[j][i] == 0)))
                    })
            })
            && self.is_symmetrizable_by_r()
    }

    /// `C_{ij} < -1 => -C_{ji} <= r_i` for all `i != j`.
    pub fn sufficient_condition(&self) -> bool {
        (0..self.n).all(|i| {
            (0..self.n).all(|j| i == j || self.c[i][j] >= -1 || -self.c[j][i] <= self.r[i])
        })
    }

    /// `C_{ij} C_{ji} <= 3` for `i != j`, the hypothesis of the t-deformed algorithm.
    pub fn t_algorithm_hypothesis(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || self.c[i][j] * self.c[j][i] <= 3))
    }

    /// Positive definiteness of `diag(r) C` restricted to `nodes`.
    pub fn is_finite_type(&self, nodes: &[usize]) -> bool {
        let b = self.symmetrized();
        let sub: Vec<Vec<i64>> = nodes
            .iter()
            .map(|&i| nodes.iter().map(|&j| b[i][j]).collect())
            .collect();
        (1..=sub.len()).all(|k| {
            let m: Vec<Vec<i64>> = sub[..k].iter().map(|row| row[..k].to_vec()).collect();
            int_det(m) > 0
        })
    }

    pub fn is_finite(&self) -> bool {
        let all: Vec<usize> = (0..self.n).collect();
        self.is_finite_type(&all)
    }

    /// The full subdiagram on `nodes` (in the given order).
    pub fn restrict(&self, nodes: &[usize]) -> CartanData {
        CartanData {
            family: Family::Sub {
                parent: Box::new(self.family.clone()),
                nodes: nodes.to_vec(),
            },
            n: nodes.len(),
            c: nodes
                .iter()
                .map(|&i| nodes.iter().map(|&j| self.c[i][j]).collect())
                .collect(),
            r: nodes.iter().map(|&i| self.r[i]).collect(),
        }
    }

    /// Errors unless `C(z)` is invertible.
    pub fn ensure_invertible(&self) -> Result<(), CartanError> {
        if self.sufficient_condition() || is_invertible(&quantized_cartan(self)) {
            Ok(())
        } else {
            Err(CartanError::NotInvertible)
        }
    }
}

pub fn quantized_cartan(cd: &CartanData) -> ZLaurentMatrix {
    let entries = (0..cd.n)
        .map(|i| {
            (0..cd.n)
                .map(|j| {
                    if i == j {
                        Laurent::from_terms([(cd.r[i], 1), (-cd.r[i], 1)])
                    } else {
                        quantum_integer(cd.c[i][j])
                    }
                })
                .collect()
        })
        .collect();
    ZLaurentMatrix { n: cd.n, entries }
}

impl ZLaurentMatrix {
    /// Exact determinant by fraction-free elimination.
    pub fn determinant(&self) -> Laurent {
        let n = self.n;
        if n == 0 {
            return Laurent::one();
        }
        let mut a = self.entries.clone();
        let mut sign = 1;
        let mut prev = Laurent::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                    Some(r) => {
                        a.swap(k, r);
                        sign = -sign;
                    }
                    None => return Laurent::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = num
                        .exact_div(&prev)
                        .expect("fraction-free step divides exactly");
                }
            }
            prev = a[k][k].clone();
        }
        a[n - 1][n - 1].scale(sign)
    }

    /// Entrywise `z -> 1`.
    pub fn at_one(&self) -> Vec<Vec<i64>> {
        self.entries
            .iter()
            .map(|row| row.iter().map(Laurent::eval_one).collect())
            .collect()
    }
}

pub fn is_invertible(qc: &ZLaurentMatrix) -> bool {
    !qc.determinant().is_zero()
}

fn int_det(mut a: Vec<Vec<i64>>) -> i128 {
    let n = a.len();
    let mut m: Vec<Vec<i128>> = a
        .drain(..)
        .map(|r| r.into_iter().map(|x| x as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&r| m[r][k] != 0) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cd(s: &str) -> CartanData {
        build_cartan(s.parse().unwrap()).unwrap()
    }

    #[test]
    fn small_cases() {
        let a1 = cd("A1");
        assert_eq!(a1.c, vec![vec![2]]);
        assert_eq!(a1.r, vec![1]);
        assert_eq!(cd("B3").r, vec![2, 2, 1]);
        assert_eq!(cd("C3").r, vec![1, 1, 2]);
        assert_eq!(cd("F4").r, vec![1, 1, 2, 2]);
        assert_eq!(cd("G2").r, vec![3, 1]);
        assert_eq!(cd("D4").r, vec![1, 1, 1, 1]);
        assert_eq!(cd("A2~").n, 3);
        let d4 = cd("D4");
        assert_eq!(d4.neighbors(1).count(), 3);
    }

    #[test]
    fn invalid_ranks() {
        assert!(build_cartan(Family::D(3)).is_err());
        assert!(build_cartan(Family::B(1)).is_err());
        assert!(build_cartan(Family::AffineA(1)).is_err());
        assert!(build_cartan(Family::A(0)).is_err());
        assert!("F5".parse::<Family>().is_err());
        assert!("X3".parse::<Family>().is_err());
    }

    #[test]
    fn family_strings() {
        for s in ["A5", "B3", "C4", "D4", "F4", "G2", "A2~"] {
            assert_eq!(s.parse::<Family>().unwrap().to_string(), s);
        }
    }

    #[test]
    fn quantized_entries() {
        let c2 = quantized_cartan(&cd("C2"));
        // Node 2 of C2 is long, so the -2 sits at (1,2).
        assert_eq!(c2.entries[0][1], Laurent::from_terms([(-1, -1), (1, -1)]));
        assert_eq!(c2.entries[1][0], Laurent::constant(-1));
        let a2 = quantized_cartan(&cd("A2"));
        assert_eq!(a2.entries[0][1], Laurent::constant(-1));
        let a1 = quantized_cartan(&cd("A1"));
        assert_eq!(a1.determinant(), Laurent::from_terms([(1, 1), (-1, 1)]));
    }

    #[test]
    fn finite_type() {
        assert!(cd("F4").is_finite());
        assert!(cd("G2").is_finite());
        assert!(!cd("A2~").is_finite());
        assert!(cd("A2~").is_finite_type(&[0, 1]));
    }
}
