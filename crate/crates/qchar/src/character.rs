//! Finite formal sums of monomials with integer or `Z[t^{+-1}]` coefficients.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::cartan::CartanData;
use crate::error::{AlgoError, ParseError};
use crate::laurent::TPoly;
use crate::monomial::{dominance_compare, is_dominant, AVector, Monomial};

/// Coefficient ring of a character.
pub trait Coeff: Clone + PartialEq + Eq + fmt::Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(c: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn add_to(&mut self, other: &Self);
    fn sub_from(&mut self, other: &Self);
    fn times(&self, other: &Self) -> Self;
    /// Multiplication by `t^d`; the identity on integers.
    fn twist(&self, d: i32) -> Self;
    fn at_one(&self) -> i64;
    /// Equality up to a power of `t`.
    fn gauge_eq(&self, other: &Self) -> bool;
    /// Preferred representative among gauge-equal candidates, if any.
    fn gauge_canonical(&self) -> Option<Self>;
    fn is_unit(&self) -> bool;
    fn render(&self) -> String;
    fn parse(text: &str) -> Result<Self, ParseError>;
    fn to_json(&self) -> serde_json::Value;
}

impl Coeff for i64 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn from_int(c: i64) -> Self {
        c
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn add_to(&mut self, other: &Self) {
        *self += other;
    }
    fn sub_from(&mut self, other: &Self) {
        *self -= other;
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn twist(&self, _d: i32) -> Self {
        *self
    }
    fn at_one(&self) -> i64 {
        *self
    }
    fn gauge_eq(&self, other: &Self) -> bool {
        self == other
    }
    fn gauge_canonical(&self) -> Option<Self> {
        Some(*self)
    }
    fn is_unit(&self) -> bool {
        *self == 1
    }
    fn render(&self) -> String {
        self.to_string()
    }
    fn parse(text: &str) -> Result<Self, ParseError> {
        text.trim()
            .parse()
            .map_err(|_| ParseError::new(format!("bad integer coefficient `{text}`")))
    }
    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::from(*self)
    }
}

impl Coeff for TPoly {
    fn zero() -> Self {
        TPoly::zero()
    }
    fn one() -> Self {
        TPoly::one()
    }
    fn from_int(c: i64) -> Self {
        TPoly::constant(c)
    }
    fn is_zero(&self) -> bool {
        TPoly::is_zero(self)
    }
    fn add_to(&mut self, other: &Self) {
        *self += other;
    }
    fn sub_from(&mut self, other: &Self) {
        *self -= other;
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn twist(&self, d: i32) -> Self {
        self.shift(d)
    }
    fn at_one(&self) -> i64 {
        self.eval_one()
    }
    fn gauge_eq(&self, other: &Self) -> bool {
        self.power_ratio(other).is_some()
    }
    fn gauge_canonical(&self) -> Option<Self> {
        self.bar_symmetrize()
    }
    fn is_unit(&self) -> bool {
        self.is_one()
    }
    fn render(&self) -> String {
        self.render("t")
    }
    fn parse(text: &str) -> Result<Self, ParseError> {
        TPoly::parse(text, 't')
    }
    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::from(
            self.terms()
                .map(|(e, c)| vec![e as i64, c])
                .collect::<Vec<_>>(),
        )
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct Character<C: Coeff> {
    pub head: Option<Monomial>,
    pub terms: BTreeMap<Monomial, C>,
    /// Height cutoff when terms above it were dropped.
    pub truncated_at: Option<u32>,
}

pub type QCharacter = Character<i64>;

impl<C: Coeff> Default for Character<C> {
    fn default() -> Self {
        Character {
            head: None,
            terms: BTreeMap::new(),
            truncated_at: None,
        }
    }
}

impl<C: Coeff> fmt::Debug for Character<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| format!("{} {}", c.render(), m))
            .collect();
        write!(f, "Character[{}]", parts.join(" + "))
    }
}

/// One exported term: monomial triples `[node, shift, exp]` and coefficient.
#[derive(Serialize)]
pub struct TermRecord {
    pub monomial: Vec<[i64; 3]>,
    pub coeff: serde_json::Value,
}

impl<C: Coeff> Character<C> {
    pub fn zero() -> Self {
        Character::default()
    }

    pub fn unit() -> Self {
        Character::from_monomial(Monomial::one())
    }

    pub fn from_monomial(m: Monomial) -> Self {
        let mut ch = Character::zero();
        ch.head = Some(m.clone());
        ch.terms.insert(m, C::one());
        ch
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, C)>>(it: I) -> Self {
        let mut ch = Character::zero();
        for (m, c) in it {
            ch.add_term(m, &c);
        }
        ch
    }

    pub fn with_head(mut self, head: Monomial) -> Self {
        self.head = Some(head);
        self
    }

    pub fn add_term(&mut self, m: Monomial, c: &C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(x) => {
                x.add_to(c);
                if x.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        out.head = None;
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            let mut neg = C::zero();
            neg.sub_from(c);
            out.add_term(m.clone(), &neg);
        }
        out.head = None;
        out
    }

    pub fn scale(&self, k: &C) -> Self {
        let mut out = Character::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), &c.times(k));
        }
        out.head = self.head.clone();
        out
    }

    /// Commutative product; heads multiply.
    pub fn multiply(&self, other: &Self) -> Self {
        let mut out = Character::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), &c1.times(c2));
            }
        }
        out.head = match (&self.head, &other.head) {
            (Some(a), Some(b)) => Some(a.mul(b)),
            _ => None,
        };
        out
    }

    /// Sum of the coefficients at `t = 1`.
    pub fn dimension(&self) -> i64 {
        self.terms.values().map(Coeff::at_one).sum()
    }

    /// Terms dominant on every node of `j`, in canonical order.
    pub fn j_dominant_terms(&self, j: &[usize]) -> Vec<(Monomial, C)> {
        self.terms
            .iter()
            .filter(|(m, _)| is_dominant(m, j))
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect()
    }

    /// Terms grouped by their height below the head, heights ascending.
    pub fn height_slices(
        &self,
        cd: &CartanData,
    ) -> Result<Vec<(u32, Vec<(Monomial, C)>)>, AlgoError> {
        let Some(head) = &self.head else {
            if self.terms.is_empty() {
                return Ok(Vec::new());
            }
            return Err(AlgoError::PreconditionFailed(
                "character has no head".into(),
            ));
        };
        let mut slices: BTreeMap<u32, Vec<(Monomial, C)>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let v = dominance_compare(cd, m, head)
                .ok_or_else(|| AlgoError::IncomparableTerm(m.clone()))?;
            slices
                .entry(v.height())
                .or_default()
                .push((m.clone(), c.clone()));
        }
        Ok(slices.into_iter().collect())
    }

    /// A-vectors of every term relative to the head.
    pub fn vectors(&self, cd: &CartanData) -> Result<BTreeMap<Monomial, AVector>, AlgoError> {
        let head = self
            .head
            .as_ref()
            .ok_or_else(|| AlgoError::PreconditionFailed("character has no head".into()))?;
        self.terms
            .keys()
            .map(|m| {
                dominance_compare(cd, m, head)
                    .map(|v| (m.clone(), v))
                    .ok_or_else(|| AlgoError::IncomparableTerm(m.clone()))
            })
            .collect()
    }

    pub fn shifted(&self, c: i32) -> Self {
        Character {
            head: self.head.as_ref().map(|h| h.shifted(c)),
            terms: self
                .terms
                .iter()
                .map(|(m, x)| (m.shifted(c), x.clone()))
                .collect(),
            truncated_at: self.truncated_at,
        }
    }

    pub fn records(&self) -> Vec<TermRecord> {
        self.terms
            .iter()
            .map(|(m, c)| TermRecord {
                monomial: m.to_triples(),
                coeff: c.to_json(),
            })
            .collect()
    }

    /// One line per term, `coeff monomial` in the machine grammar.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        if let Some(h) = self.truncated_at {
            s.push_str(&format!("# truncated at height {h}\n"));
        }
        for (m, c) in &self.terms {
            s.push_str(&c.render());
            s.push(' ');
            s.push_str(&m.to_machine());
            s.push('\n');
        }
        s
    }

    /// Parses [`Character::to_text`]; `#` lines are comments.
    pub fn parse_text(text: &str) -> Result<Self, ParseError> {
        let mut ch = Character::zero();
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if let Some(h) = rest.trim().strip_prefix("truncated at height ") {
                    ch.truncated_at = h.trim().parse().ok();
                }
                continue;
            }
            let (c, m) = line
                .split_once(char::is_whitespace)
                .ok_or_else(|| ParseError::new("expected `coeff monomial`").at_line(k + 1))?;
            let c = C::parse(c).map_err(|e| e.at_line(k + 1))?;
            let m = Monomial::parse_any(m).map_err(|e| e.at_line(k + 1))?;
            ch.add_term(m, &c);
        }
        Ok(ch)
    }
}

impl Character<i64> {
    pub fn to_tpoly(&self) -> Character<TPoly> {
        Character {
            head: self.head.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, &c)| (m.clone(), TPoly::constant(c)))
                .collect(),
            truncated_at: self.truncated_at,
        }
    }
}
