//! Laurent monomials in `Y_{i,l}`, A-inverse vectors and the dominance order.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cartan::CartanData;
use crate::error::ParseError;
use crate::laurent::parse_exponent;

/// Sparse exponent map, sorted by `(node, shift)`, with no zero exponents.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Monomial(Vec<(u16, i32, i32)>);

/// Exponents of `A_{i,l}^{-1}` factors, sorted by `(node, shift)`, all positive.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AVector(Vec<(u16, i32, u32)>);

fn merge<T: Copy, F: Fn(T, T) -> Option<T>>(
    a: &[(u16, i32, T)],
    b: &[(u16, i32, T)],
    add: F,
) -> Vec<(u16, i32, T)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut x, mut y) = (0, 0);
    while x < a.len() && y < b.len() {
        let (ka, kb) = ((a[x].0, a[x].1), (b[y].0, b[y].1));
        match ka.cmp(&kb) {
            Ordering::Less => {
                out.push(a[x]);
                x += 1;
            }
            Ordering::Greater => {
                out.push(b[y]);
                y += 1;
            }
            Ordering::Equal => {
                if let Some(s) = add(a[x].2, b[y].2) {
                    out.push((ka.0, ka.1, s));
                }
                x += 1;
                y += 1;
            }
        }
    }
    out.extend_from_slice(&a[x..]);
    out.extend_from_slice(&b[y..]);
    out
}

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    /// `Y_{i,l}` with 0-based node `i`.
    pub fn y(i: usize, l: i32) -> Self {
        Monomial(vec![(i as u16, l, 1)])
    }

    pub fn from_exps<I: IntoIterator<Item = (usize, i32, i32)>>(it: I) -> Self {
        let mut v: Vec<(u16, i32, i32)> =
            it.into_iter().map(|(i, l, e)| (i as u16, l, e)).collect();
        v.sort_by_key(|&(i, l, _)| (i, l));
        let mut out: Vec<(u16, i32, i32)> = Vec::with_capacity(v.len());
        for (i, l, e) in v {
            match out.last_mut() {
                Some(last) if last.0 == i && last.1 == l => last.2 += e,
                _ => out.push((i, l, e)),
            }
        }
        out.retain(|t| t.2 != 0);
        Monomial(out)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `(node, shift, exponent)` in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, i32, i32)> + '_ {
        self.0.iter().map(|&(i, l, e)| (i as usize, l, e))
    }

    pub fn exp(&self, i: usize, l: i32) -> i32 {
        self.0
            .binary_search_by_key(&(i as u16, l), |&(a, b, _)| (a, b))
            .map(|k| self.0[k].2)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(merge(&self.0, &other.0, |a, b| {
            Some(a + b).filter(|&s| s != 0)
        }))
    }

    pub fn pow(&self, k: i32) -> Monomial {
        if k == 0 {
            return Monomial::one();
        }
        Monomial(self.0.iter().map(|&(i, l, e)| (i, l, e * k)).collect())
    }

    pub fn inverse(&self) -> Monomial {
        self.pow(-1)
    }

    pub fn div(&self, other: &Monomial) -> Monomial {
        self.mul(&other.inverse())
    }

    /// Translates every shift by `c`.
    pub fn shifted(&self, c: i32) -> Monomial {
        Monomial(self.0.iter().map(|&(i, l, e)| (i, l + c, e)).collect())
    }

    /// The `(shift, exponent)` list at node `i`.
    pub fn slice(&self, i: usize) -> Vec<(i32, i32)> {
        self.0
            .iter()
            .filter(|t| t.0 as usize == i)
            .map(|t| (t.1, t.2))
            .collect()
    }

    pub fn nodes(&self) -> impl Iterator<Item = usize> + '_ {
        let mut last = None;
        self.0.iter().filter_map(move |t| {
            if last == Some(t.0) {
                None
            } else {
                last = Some(t.0);
                Some(t.0 as usize)
            }
        })
    }

    pub fn min_shift(&self) -> Option<i32> {
        self.0.iter().map(|t| t.1).min()
    }

    pub fn max_shift(&self) -> Option<i32> {
        self.0.iter().map(|t| t.1).max()
    }

    /// Multiplies by `A_{i,l}^{-k}`.
    pub fn mul_a_inverse(&self, cd: &CartanData, i: usize, l: i32, k: i32) -> Monomial {
        self.mul(&a_monomial(cd, i, l).pow(-k))
    }

    /// Renders in the machine grammar `Y[i,l]^e * ...` (1-based nodes).
    pub fn to_machine(&self) -> String {
        if self.0.is_empty() {
            return "1".to_string();
        }
        let parts: Vec<String> = self
            .iter()
            .map(|(i, l, e)| {
                if e == 1 {
                    format!("Y[{},{}]", i + 1, l)
                } else {
                    format!("Y[{},{}]^{}", i + 1, l, e)
                }
            })
            .collect();
        parts.join(" * ")
    }

    /// Parses the braced grammar, e.g. `Y^{-1}_{1,12}Y_{2,7}Y^2_{2,8}`.
    pub fn parse_braced(text: &str) -> Result<Monomial, ParseError> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s == "1" {
            return Ok(Monomial::one());
        }
        let bad = |what: &str| ParseError::new(format!("{what} in monomial `{text}`"));
        let mut rest = s.as_str();
        let mut exps = Vec::new();
        if rest.is_empty() {
            return Err(bad("empty input"));
        }
        while !rest.is_empty() {
            rest = rest.strip_prefix('Y').ok_or_else(|| bad("expected `Y`"))?;
            let mut e = 1;
            if let Some(r) = rest.strip_prefix('^') {
                let (v, used) = parse_exponent(r).ok_or_else(|| bad("bad exponent"))?;
                e = v;
                rest = &r[used..];
            }
            rest = rest
                .strip_prefix("_{")
                .ok_or_else(|| bad("expected `_{`"))?;
            let end = rest.find('}').ok_or_else(|| bad("unclosed index"))?;
            let (i, l) = parse_index(&rest[..end]).ok_or_else(|| bad("bad index"))?;
            exps.push((i, l, e));
            rest = &rest[end + 1..];
        }
        Ok(Monomial::from_exps(exps))
    }

    /// Parses the machine grammar `Y[i,l]^e * Y[i,l] ...`.
    pub fn parse_machine(text: &str) -> Result<Monomial, ParseError> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s == "1" {
            return Ok(Monomial::one());
        }
        let bad = |what: &str| ParseError::new(format!("{what} in monomial `{text}`"));
        let mut exps = Vec::new();
        for factor in s.split('*') {
            let body = factor
                .strip_prefix("Y[")
                .ok_or_else(|| bad("expected `Y[`"))?;
            let end = body.find(']').ok_or_else(|| bad("unclosed index"))?;
            let (i, l) = parse_index(&body[..end]).ok_or_else(|| bad("bad index"))?;
            let tail = &body[end + 1..];
            let e = match tail.strip_prefix('^') {
                Some(x) => x.parse().map_err(|_| bad("bad exponent"))?,
                None if tail.is_empty() => 1,
                None => return Err(bad("trailing characters")),
            };
            exps.push((i, l, e));
        }
        Ok(Monomial::from_exps(exps))
    }

    /// Accepts either grammar.
    pub fn parse_any(text: &str) -> Result<Monomial, ParseError> {
        if text.contains('[') {
            Monomial::parse_machine(text)
        } else {
            Monomial::parse_braced(text)
        }
    }

    /// Structured form `[[i, l, e], ...]` with 1-based nodes.
    pub fn to_triples(&self) -> Vec<[i64; 3]> {
        self.iter()
            .map(|(i, l, e)| [i as i64 + 1, l as i64, e as i64])
            .collect()
    }

    pub fn from_triples(t: &[[i64; 3]]) -> Result<Monomial, ParseError> {
        let mut v = Vec::with_capacity(t.len());
        for &[i, l, e] in t {
            if i < 1 || i > u16::MAX as i64 {
                return Err(ParseError::new(format!("node {i} out of range")));
            }
            v.push(((i - 1) as usize, l as i32, e as i32));
        }
        Ok(Monomial::from_exps(v))
    }
}

/// Parses `i,l` with 1-based `i`.
fn parse_index(s: &str) -> Option<(usize, i32)> {
    let (a, b) = s.split_once(',')?;
    let i: usize = a.parse().ok()?;
    if i == 0 {
        return None;
    }
    Some((i - 1, b.parse().ok()?))
}

impl fmt::Display for Monomial {
    /// Braced grammar with 1-based nodes.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, l, e) in self.iter() {
            match e {
                1 => write!(f, "Y_{{{},{}}}", i + 1, l)?,
                2..=9 => write!(f, "Y^{}_{{{},{}}}", e, i + 1, l)?,
                _ => write!(f, "Y^{{{}}}_{{{},{}}}", e, i + 1, l)?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl AVector {
    pub fn zero() -> Self {
        AVector(Vec::new())
    }

    pub fn single(i: usize, l: i32, k: u32) -> Self {
        if k == 0 {
            return AVector::zero();
        }
        AVector(vec![(i as u16, l, k)])
    }

    pub fn from_entries<I: IntoIterator<Item = (usize, i32, u32)>>(it: I) -> Self {
        let mut v: Vec<(u16, i32, u32)> = it
            .into_iter()
            .filter(|t| t.2 != 0)
            .map(|(i, l, k)| (i as u16, l, k))
            .collect();
        v.sort_by_key(|&(i, l, _)| (i, l));
        let mut out: Vec<(u16, i32, u32)> = Vec::with_capacity(v.len());
        for (i, l, k) in v {
            match out.last_mut() {
                Some(last) if last.0 == i && last.1 == l => last.2 += k,
                _ => out.push((i, l, k)),
            }
        }
        AVector(out)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, i32, u32)> + '_ {
        self.0.iter().map(|&(i, l, k)| (i as usize, l, k))
    }

    pub fn get(&self, i: usize, l: i32) -> u32 {
        self.0
            .binary_search_by_key(&(i as u16, l), |&(a, b, _)| (a, b))
            .map(|k| self.0[k].2)
            .unwrap_or(0)
    }

    pub fn add(&self, other: &AVector) -> AVector {
        AVector(merge(&self.0, &other.0, |a, b| Some(a + b)))
    }

    /// `self - other` when `other <= self` entrywise.
    pub fn checked_sub(&self, other: &AVector) -> Option<AVector> {
        let mut out = self.clone();
        for (i, l, k) in other.iter() {
            let pos = out
                .0
                .binary_search_by_key(&(i as u16, l), |&(a, b, _)| (a, b))
                .ok()?;
            if out.0[pos].2 < k {
                return None;
            }
            out.0[pos].2 -= k;
            if out.0[pos].2 == 0 {
                out.0.remove(pos);
            }
        }
        Some(out)
    }

    /// Total number of A-inverse factors.
    pub fn height(&self) -> u32 {
        self.0.iter().map(|t| t.2).sum()
    }

    /// `v_i`, the number of factors at node `i`.
    pub fn node_height(&self, i: usize) -> u32 {
        self.0
            .iter()
            .filter(|t| t.0 as usize == i)
            .map(|t| t.2)
            .sum()
    }

    pub fn shifted(&self, c: i32) -> AVector {
        AVector(self.0.iter().map(|&(i, l, k)| (i, l + c, k)).collect())
    }

    /// Relabels nodes through `map` (sub-diagram index to full index).
    pub fn relabel(&self, map: &[usize]) -> AVector {
        AVector::from_entries(self.iter().map(|(i, l, k)| (map[i], l, k)))
    }

    /// Y-exponents of `prod A_{i,l}^{-v_{i,l}}`.
    pub fn y_part(&self, cd: &CartanData) -> Monomial {
        let mut exps = Vec::new();
        for (i, l, k) in self.iter() {
            for (j, s, e) in a_monomial(cd, i, l).iter() {
                exps.push((j, s, -(e * k as i32)));
            }
        }
        Monomial::from_exps(exps)
    }

    pub fn to_triples(&self) -> Vec<[i64; 3]> {
        self.iter()
            .map(|(i, l, k)| [i as i64 + 1, l as i64, k as i64])
            .collect()
    }
}

impl fmt::Display for AVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("{}");
        }
        let parts: Vec<String> = self
            .iter()
            .map(|(i, l, k)| format!("({},{}):{}", i + 1, l, k))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

impl fmt::Debug for AVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A Y-monomial together with its A-inverse vector relative to a head.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TrackedMonomial {
    pub head: Monomial,
    pub y: Monomial,
    pub v: AVector,
}

impl TrackedMonomial {
    pub fn new(head: Monomial) -> Self {
        TrackedMonomial {
            y: head.clone(),
            head,
            v: AVector::zero(),
        }
    }

    pub fn is_consistent(&self, cd: &CartanData) -> bool {
        self.head.mul(&self.v.y_part(cd)) == self.y
    }
}

/// `A_{i,l}`.
pub fn a_monomial(cd: &CartanData, i: usize, l: i32) -> Monomial {
    let mut exps = vec![(i, l - cd.r[i], 1), (i, l + cd.r[i], 1)];
    for j in cd.neighbors(i) {
        let cji = cd.c[j][i];
        let mut s = cji + 1;
        while s < -cji {
            exps.push((j, l + s, -1));
            s += 2;
        }
    }
    Monomial::from_exps(exps)
}

pub fn apply_a_inverse(cd: &CartanData, tm: &TrackedMonomial, i: usize, l: i32) -> TrackedMonomial {
    TrackedMonomial {
        head: tm.head.clone(),
        y: tm.y.mul_a_inverse(cd, i, l, 1),
        v: tm.v.add(&AVector::single(i, l, 1)),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct UStats {
    pub u: i64,
    pub u_plus: i64,
    pub u_minus: i64,
    /// `(node, shift, exponent)` restricted to `J`.
    pub table: Vec<(usize, i32, i32)>,
}

pub fn u_stats(m: &Monomial, j: &[usize]) -> UStats {
    let mut st = UStats::default();
    for (i, l, e) in m.iter() {
        if !j.contains(&i) {
            continue;
        }
        st.u += e as i64;
        if e > 0 {
            st.u_plus += e as i64;
        } else {
            st.u_minus += e as i64;
        }
        st.table.push((i, l, e));
    }
    st
}

/// `m^{(J)}`: keeps the factors at nodes in `J`.
pub fn truncate(m: &Monomial, j: &[usize]) -> Monomial {
    Monomial(
        m.0.iter()
            .copied()
            .filter(|t| j.contains(&(t.0 as usize)))
            .collect(),
    )
}

pub fn is_dominant(m: &Monomial, j: &[usize]) -> bool {
    m.iter().all(|(i, _, e)| e >= 0 || !j.contains(&i))
}

pub fn is_dominant_all(m: &Monomial) -> bool {
    m.iter().all(|(_, _, e)| e >= 0)
}

pub fn is_node_dominant(m: &Monomial, i: usize) -> bool {
    m.iter().all(|(k, _, e)| k != i || e >= 0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RightNegativity {
    RightNegative,
    NotRightNegative,
    /// The empty monomial has no maximal shift.
    Empty,
}

pub fn is_right_negative(m: &Monomial) -> RightNegativity {
    let Some(b) = m.max_shift() else {
        return RightNegativity::Empty;
    };
    if m.iter().filter(|&(_, l, _)| l == b).all(|(_, _, e)| e <= 0) {
        RightNegativity::RightNegative
    } else {
        RightNegativity::NotRightNegative
    }
}

/// The vector `v` with `m_lo = m_hi * prod A^{-v}`, if it exists.
///
/// Peels the quotient from its top shift downward: the top Y-factor of
/// `A_{i,l}` is `Y_{i,l+r_i}` alone, which needs `-C_{ji} <= r_i`.
pub fn dominance_compare(cd: &CartanData, m_lo: &Monomial, m_hi: &Monomial) -> Option<AVector> {
    let mut q = m_lo.div(m_hi);
    let Some(floor) = q.min_shift() else {
        return Some(AVector::zero());
    };
    let mut v = Vec::new();
    loop {
        let Some(top) = q.max_shift() else {
            return Some(AVector::from_entries(v));
        };
        let at_top: Vec<(usize, i32)> = q
            .iter()
            .filter(|&(_, l, _)| l == top)
            .map(|(i, _, e)| (i, e))
            .collect();
        let mut step = Monomial::one();
        for (i, e) in at_top {
            if e > 0 {
                return None;
            }
            let l = top - cd.r[i];
            if l - cd.r[i] < floor {
                return None;
            }
            v.push((i, l, (-e) as u32));
            step = step.mul(&a_monomial(cd, i, l).pow(-e));
        }
        q = q.mul(&step);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::build_cartan;

    fn cd(s: &str) -> CartanData {
        build_cartan(s.parse().unwrap()).unwrap()
    }

    fn m(s: &str) -> Monomial {
        Monomial::parse_braced(s).unwrap()
    }

    #[test]
    fn a_monomials() {
        assert_eq!(a_monomial(&cd("A1"), 0, 1), m("Y_{1,0}Y_{1,2}"));
        let c4 = cd("C4");
        assert_eq!(a_monomial(&c4, 0, 5), m("Y_{1,6}Y_{1,4}Y^{-1}_{2,5}"));
        let b4 = cd("B4");
        assert_eq!(a_monomial(&b4, 3, 5), m("Y_{4,6}Y_{4,4}Y^{-1}_{3,5}"));
        assert_eq!(
            a_monomial(&b4, 2, 5),
            m("Y_{3,7}Y_{3,3}Y^{-1}_{2,5}Y^{-1}_{4,4}Y^{-1}_{4,6}")
        );
    }

    #[test]
    fn apply_and_compare() {
        let a1 = cd("A1");
        let tm = apply_a_inverse(&a1, &TrackedMonomial::new(m("Y_{1,0}")), 0, 1);
        assert_eq!(tm.y, m("Y^{-1}_{1,2}"));
        assert_eq!(tm.v, AVector::single(0, 1, 1));
        assert!(tm.is_consistent(&a1));
        assert_eq!(
            dominance_compare(&a1, &m("Y^{-1}_{1,2}"), &m("Y_{1,0}")),
            Some(AVector::single(0, 1, 1))
        );
        assert_eq!(
            dominance_compare(&a1, &m("Y_{1,0}"), &m("Y^{-1}_{1,2}")),
            None
        );
        assert_eq!(
            dominance_compare(&a1, &m("Y_{1,0}"), &m("Y_{1,0}")),
            Some(AVector::zero())
        );
    }

    #[test]
    fn b2_apply() {
        let b2 = cd("B2");
        let tm = apply_a_inverse(&b2, &TrackedMonomial::new(m("Y_{1,0}")), 0, 2);
        // A_{1,2} = Y_{1,0}Y_{1,4}Y^{-1}_{2,1}Y^{-1}_{2,3}
        assert_eq!(tm.y, m("Y^{-1}_{1,4}Y_{2,1}Y_{2,3}"));
    }

    #[test]
    fn u_stats_cases() {
        let s = u_stats(&m("Y_{1,0}Y^{-1}_{1,2}"), &[0]);
        assert_eq!((s.u, s.u_plus, s.u_minus), (0, 1, -1));
        assert_eq!(u_stats(&m("Y_{2,7}Y^{-1}_{2,9}Y^{-1}_{2,11}"), &[1]).u, -1);
        assert_eq!(u_stats(&Monomial::one(), &[0, 1]), UStats::default());
    }

    #[test]
    fn truncation_and_dominance() {
        let x = m("Y_{1,0}Y^{-1}_{2,3}");
        assert_eq!(truncate(&x, &[0, 1]), x);
        assert_eq!(truncate(&x, &[]), Monomial::one());
        assert_eq!(truncate(&x, &[1]), m("Y^{-1}_{2,3}"));
        assert!(is_dominant(&m("Y_{1,0}"), &[0]));
        assert!(!is_dominant(&m("Y^{-1}_{1,2}"), &[0]));
        assert!(is_dominant(&x, &[0]));
    }

    #[test]
    fn right_negativity() {
        assert_eq!(
            is_right_negative(&m("Y^{-1}_{1,2}")),
            RightNegativity::RightNegative
        );
        assert_eq!(
            is_right_negative(&m("Y_{1,0}")),
            RightNegativity::NotRightNegative
        );
        assert_eq!(
            is_right_negative(&m("Y_{1,0}Y^{-1}_{1,2}")),
            RightNegativity::RightNegative
        );
        assert_eq!(is_right_negative(&Monomial::one()), RightNegativity::Empty);
    }

    #[test]
    fn grammars() {
        for s in [
            "Y_{1,10}Y_{2,7}Y^{-1}_{2,9}Y^{-1}_{2,11}Y_{4,6}",
            "Y^{-1}_{1,9}Y^2_{2,8}Y_{2,10}",
            "Y^{-2}_{2,12}",
            "1",
        ] {
            assert_eq!(m(s).to_string(), s);
        }
        let x = m("Y^{-1}_{1,9}Y^2_{2,8}");
        assert_eq!(x.to_machine(), "Y[1,9]^-1 * Y[2,8]^2");
        assert_eq!(Monomial::parse_machine(&x.to_machine()).unwrap(), x);
        assert_eq!(
            Monomial::parse_machine("Y[1,0]*Y[1,0]").unwrap(),
            m("Y^2_{1,0}")
        );
        assert!(Monomial::parse_braced("Y_{0,1}").is_err());
        assert!(Monomial::parse_braced("Y_{1,1").is_err());
        assert!(Monomial::parse_machine("Y[1,1]^x").is_err());
    }
}
