//! Sparse Laurent polynomials in one variable with integer coefficients.
//!
//! The same type serves as the quantized Cartan entries (variable `z`) and
//! as the t-coefficients of q,t-characters (variable `t`, alias [`TPoly`]).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::ParseError;

#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Laurent {
    terms: BTreeMap<i32, i64>,
}

/// Coefficient ring of q,t-characters.
pub type TPoly = Laurent;

impl Laurent {
    pub fn zero() -> Self {
        Laurent::default()
    }

    pub fn one() -> Self {
        Laurent::monomial(0, 1)
    }

    pub fn constant(c: i64) -> Self {
        Laurent::monomial(0, c)
    }

    pub fn monomial(exp: i32, coeff: i64) -> Self {
        let mut terms = BTreeMap::new();
        if coeff != 0 {
            terms.insert(exp, coeff);
        }
        Laurent { terms }
    }

    /// Builds from (exponent, coefficient) pairs, summing repeats.
    pub fn from_terms<I: IntoIterator<Item = (i32, i64)>>(it: I) -> Self {
        let mut p = Laurent::zero();
        for (e, c) in it {
            p.add_term(e, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0) == Some(&1)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, i64)> + '_ {
        self.terms.iter().map(|(&e, &c)| (e, c))
    }

    pub fn coeff(&self, exp: i32) -> i64 {
        self.terms.get(&exp).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_exp(&self) -> Option<i32> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i32> {
        self.terms.keys().next_back().copied()
    }

    pub fn add_term(&mut self, exp: i32, coeff: i64) {
        if coeff == 0 {
            return;
        }
        let e = self.terms.entry(exp).or_insert(0);
        *e += coeff;
        if *e == 0 {
            self.terms.remove(&exp);
        }
    }

    /// Multiplication by `var^d`.
    pub fn shift(&self, d: i32) -> Self {
        if d == 0 {
            return self.clone();
        }
        Laurent {
            terms: self.terms.iter().map(|(&e, &c)| (e + d, c)).collect(),
        }
    }

    pub fn scale(&self, k: i64) -> Self {
        if k == 0 {
            return Laurent::zero();
        }
        Laurent {
            terms: self.terms.iter().map(|(&e, &c)| (e, c * k)).collect(),
        }
    }

    /// Value at `var = 1`.
    pub fn eval_one(&self) -> i64 {
        self.terms.values().sum()
    }

    /// Substitutes `var -> var^{-1}`.
    pub fn bar(&self) -> Self {
        Laurent {
            terms: self.terms.iter().map(|(&e, &c)| (-e, c)).collect(),
        }
    }

    /// `Some((e, c))` when the polynomial is the single term `c var^e`.
    pub fn as_single_term(&self) -> Option<(i32, i64)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(&e, &c)| (e, c))
        } else {
            None
        }
    }

    /// The power `d` with `other = var^d * self`, if any.
    pub fn power_ratio(&self, other: &Laurent) -> Option<i32> {
        if self.is_zero() || other.is_zero() {
            return if self.is_zero() && other.is_zero() {
                Some(0)
            } else {
                None
            };
        }
        let d = other.min_exp()? - self.min_exp()?;
        if self.shift(d) == *other {
            Some(d)
        } else {
            None
        }
    }

    /// The unique `var^d * self` invariant under `var -> var^{-1}`.
    pub fn bar_symmetrize(&self) -> Option<Laurent> {
        let (lo, hi) = (self.min_exp()?, self.max_exp()?);
        if (lo + hi) % 2 != 0 {
            return None;
        }
        let p = self.shift(-(lo + hi) / 2);
        if p.bar() == p {
            Some(p)
        } else {
            None
        }
    }

    /// True when every coefficient is nonnegative.
    pub fn is_nonnegative(&self) -> bool {
        self.terms.values().all(|&c| c >= 0)
    }

    /// Exact division. Returns `None` if `divisor` does not divide `self`.
    pub fn exact_div(&self, divisor: &Laurent) -> Option<Laurent> {
        if divisor.is_zero() {
            return None;
        }
        let mut rem = self.clone();
        let mut quot = Laurent::zero();
        let (dlead_e, dlead_c) = divisor.terms.iter().next_back().map(|(&e, &c)| (e, c))?;
        let dlow = divisor.min_exp()?;
        let floor = self.min_exp().unwrap_or(0) - dlow;
        while let Some((re, rc)) = rem.terms.iter().next_back().map(|(&e, &c)| (e, c)) {
            if rc % dlead_c != 0 {
                return None;
            }
            let qe = re - dlead_e;
            if qe < floor {
                return None;
            }
            let qc = rc / dlead_c;
            quot.add_term(qe, qc);
            rem = rem - divisor.shift(qe).scale(qc);
        }
        Some(quot)
    }

    /// Renders with the given variable name, e.g. `(t^{-1}+t)`, `t^2`, `1`.
    pub fn render(&self, var: &str) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (k, (&e, &c)) in self.terms.iter().enumerate() {
            let mag = c.unsigned_abs();
            if c < 0 {
                s.push('-');
            } else if k > 0 {
                s.push('+');
            }
            if e == 0 {
                s.push_str(&mag.to_string());
                continue;
            }
            if mag != 1 {
                s.push_str(&mag.to_string());
            }
            s.push_str(var);
            if e != 1 {
                if (2..=9).contains(&e) {
                    s.push('^');
                    s.push_str(&e.to_string());
                } else {
                    s.push_str(&format!("^{{{e}}}"));
                }
            }
        }
        if self.terms.len() > 1 {
            format!("({s})")
        } else {
            s
        }
    }

    /// Parses the output of [`Laurent::render`]; whitespace is ignored.
    pub fn parse(text: &str, var: char) -> Result<Laurent, ParseError> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let inner = match s.strip_prefix('(') {
            Some(rest) => rest
                .strip_suffix(')')
                .ok_or_else(|| ParseError::new(format!("unbalanced parenthesis in `{text}`")))?,
            None => s.as_str(),
        };
        if inner.is_empty() {
            return Err(ParseError::new("empty polynomial"));
        }
        let bytes = inner.as_bytes();
        let mut p = Laurent::zero();
        let mut pos = 0;
        let bad = |what: &str| ParseError::new(format!("{what} in polynomial `{text}`"));
        while pos < bytes.len() {
            let mut sign = 1i64;
            if bytes[pos] == b'+' || bytes[pos] == b'-' {
                if bytes[pos] == b'-' {
                    sign = -1;
                }
                pos += 1;
            } else if pos > 0 {
                return Err(bad("missing sign"));
            }
            let start = pos;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            let mag: Option<i64> = if pos > start {
                Some(
                    inner[start..pos]
                        .parse()
                        .map_err(|_| bad("bad coefficient"))?,
                )
            } else {
                None
            };
            let mut exp = 0;
            if pos < bytes.len() && bytes[pos] == var as u8 {
                pos += 1;
                exp = 1;
                if pos < bytes.len() && bytes[pos] == b'^' {
                    pos += 1;
                    let (e, used) =
                        parse_exponent(&inner[pos..]).ok_or_else(|| bad("bad exponent"))?;
                    exp = e;
                    pos += used;
                }
            } else if mag.is_none() {
                return Err(bad("missing term"));
            }
            p.add_term(exp, sign * mag.unwrap_or(1));
        }
        Ok(p)
    }
}

/// Parses `{-12}` or a single digit; returns the value and bytes consumed.
pub(crate) fn parse_exponent(s: &str) -> Option<(i32, usize)> {
    if let Some(rest) = s.strip_prefix('{') {
        let end = rest.find('}')?;
        let v = rest[..end].parse().ok()?;
        Some((v, end + 2))
    } else {
        let c = s.chars().next()?;
        if c == '-' {
            let d = s[1..].chars().next()?.to_digit(10)?;
            Some((-(d as i32), 2))
        } else {
            Some((c.to_digit(10)? as i32, 1))
        }
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("t"))
    }
}

impl fmt::Debug for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("t"))
    }
}

impl Add for Laurent {
    type Output = Laurent;
    fn add(mut self, rhs: Laurent) -> Laurent {
        self += &rhs;
        self
    }
}

impl Sub for Laurent {
    type Output = Laurent;
    fn sub(mut self, rhs: Laurent) -> Laurent {
        self -= &rhs;
        self
    }
}

impl AddAssign<&Laurent> for Laurent {
    fn add_assign(&mut self, rhs: &Laurent) {
        for (&e, &c) in &rhs.terms {
            self.add_term(e, c);
        }
    }
}

impl SubAssign<&Laurent> for Laurent {
    fn sub_assign(&mut self, rhs: &Laurent) {
        for (&e, &c) in &rhs.terms {
            self.add_term(e, -c);
        }
    }
}

impl Neg for Laurent {
    type Output = Laurent;
    fn neg(self) -> Laurent {
        self.scale(-1)
    }
}

impl Mul for &Laurent {
    type Output = Laurent;
    fn mul(self, rhs: &Laurent) -> Laurent {
        let mut out = Laurent::zero();
        for (&e1, &c1) in &self.terms {
            for (&e2, &c2) in &rhs.terms {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl Mul for Laurent {
    type Output = Laurent;
    fn mul(self, rhs: Laurent) -> Laurent {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Laurent {
        Laurent::parse(s, 't').unwrap()
    }

    #[test]
    fn render_forms() {
        assert_eq!(
            Laurent::from_terms([(-1, 1), (1, 1)]).to_string(),
            "(t^{-1}+t)"
        );
        assert_eq!(Laurent::monomial(2, 1).to_string(), "t^2");
        assert_eq!(Laurent::one().to_string(), "1");
        assert_eq!(Laurent::from_terms([(0, 1), (2, 1)]).to_string(), "(1+t^2)");
        assert_eq!(
            Laurent::from_terms([(0, 2), (12, -3)]).to_string(),
            "(2-3t^{12})"
        );
        assert_eq!(Laurent::monomial(-1, -1).to_string(), "-t^{-1}");
    }

    #[test]
    fn parse_roundtrip() {
        for s in [
            "(t^{-1}+t)",
            "t^2",
            "1",
            "(1+t^2)",
            "(2-3t^{12})",
            "-t^{-1}",
            "-4",
            "t",
        ] {
            assert_eq!(p(s).to_string(), s);
        }
        assert_eq!(p("(t^{-1} +t)"), p("(t^{-1}+t)"));
        assert!(Laurent::parse("(t+", 't').is_err());
        assert!(Laurent::parse("", 't').is_err());
    }

    #[test]
    fn bar_symmetrize_cases() {
        assert_eq!(p("(1+t^2)").bar_symmetrize(), Some(p("(t^{-1}+t)")));
        assert_eq!(p("1").bar_symmetrize(), Some(p("1")));
        assert_eq!(p("t^4").bar_symmetrize(), Some(p("1")));
        assert_eq!(p("(1+t)").bar_symmetrize(), None);
        assert_eq!(p("(1+2t^2)").bar_symmetrize(), None);
    }

    #[test]
    fn exact_division() {
        let a = p("(t^{-1}+t)");
        let b = p("(1-t^2)");
        assert_eq!((&a * &b).exact_div(&b), Some(a.clone()));
        assert_eq!(p("(1+t)").exact_div(&p("(1+t^2)")), None);
        assert_eq!(p("(2+2t)").exact_div(&p("2")), Some(p("(1+t)")));
    }

    #[test]
    fn power_ratio() {
        assert_eq!(p("(1+t^2)").power_ratio(&p("(t^3+t^5)")), Some(3));
        assert_eq!(p("(1+t^2)").power_ratio(&p("(1+t)")), None);
    }
}
