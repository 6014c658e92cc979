//! Text and JSON output of characters, and the golden-list fixture format.
//!
//! Fixture lines look like
//! `Monomial 70: (t^{-1}+t) Y_{1,10}Y_{2,7}Y^{-1}_{2,9}Y^{-1}_{2,11}Y_{4,6}`,
//! grouped under `[rep N]` headers. `#` starts a comment and
//! `@head-shift N` records the shift of the heads the list belongs to.

use serde::Serialize;

use crate::character::{Character, Coeff, TermRecord};
use crate::error::ParseError;
use crate::laurent::TPoly;
use crate::monomial::Monomial;

pub const F4_GOLDEN: &str = include_str!("../data/f4_golden.txt");
pub const F4_DIMENSIONS: &str = include_str!("../data/f4_dimensions.txt");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

impl std::str::FromStr for Format {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            _ => Err(ParseError::new(format!("unknown format `{s}`"))),
        }
    }
}

/// JSON document; field order is fixed: family, head, truncated_at, terms.
#[derive(Serialize)]
struct CharacterDoc<'a> {
    family: &'a str,
    head: Option<Vec<[i64; 3]>>,
    truncated_at: Option<u32>,
    terms: Vec<TermRecord>,
}

/// Deterministic rendering in canonical monomial order.
pub fn emit_character<C: Coeff>(ch: &Character<C>, family: &str, format: Format) -> String {
    match format {
        Format::Text => ch.to_text(),
        Format::Json => {
            let doc = CharacterDoc {
                family,
                head: ch.head.as_ref().map(Monomial::to_triples),
                truncated_at: ch.truncated_at,
                terms: ch.records(),
            };
            let mut s = serde_json::to_string_pretty(&doc).expect("character serializes");
            s.push('\n');
            s
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixtureEntry {
    pub rep: usize,
    /// Index as printed in the source list.
    pub index: u32,
    pub coeff: TPoly,
    pub monomial: Monomial,
}

impl FixtureEntry {
    pub fn to_line(&self) -> String {
        format!(
            "Monomial {}: {} {}",
            self.index,
            self.coeff.render("t"),
            self.monomial
        )
    }

    pub fn parse_line(rep: usize, line: &str) -> Result<FixtureEntry, ParseError> {
        let bad = || ParseError::new(format!("malformed fixture line `{line}`"));
        let rest = line.trim().strip_prefix("Monomial ").ok_or_else(bad)?;
        let (idx, rest) = rest.split_once(':').ok_or_else(bad)?;
        let index = idx.trim().parse().map_err(|_| bad())?;
        let rest = rest.trim();
        // The coefficient is either parenthesized or a single token.
        let (coeff, mono) = if rest.starts_with('(') {
            let close = rest.find(')').ok_or_else(bad)?;
            rest.split_at(close + 1)
        } else {
            rest.split_once(char::is_whitespace).ok_or_else(bad)?
        };
        Ok(FixtureEntry {
            rep,
            index,
            coeff: TPoly::parse(coeff, 't')?,
            monomial: Monomial::parse_braced(mono)?,
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Fixture {
    pub head_shift: i32,
    pub entries: Vec<FixtureEntry>,
}

impl Fixture {
    pub fn rep(&self, rep: usize) -> impl Iterator<Item = &FixtureEntry> {
        self.entries.iter().filter(move |e| e.rep == rep)
    }
}

pub fn parse_fixture(text: &str) -> Result<Fixture, ParseError> {
    let mut fx = Fixture::default();
    let mut rep = None;
    for (k, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let at = |e: ParseError| e.at_line(k + 1);
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(v) = line.strip_prefix("@head-shift") {
            fx.head_shift = v
                .trim()
                .parse()
                .map_err(|_| at(ParseError::new("bad head shift")))?;
        } else if let Some(h) = line.strip_prefix("[rep ").and_then(|h| h.strip_suffix(']')) {
            rep = Some(
                h.trim()
                    .parse()
                    .map_err(|_| at(ParseError::new("bad rep header")))?,
            );
        } else {
            let r = rep.ok_or_else(|| at(ParseError::new("entry before any [rep N] header")))?;
            fx.entries
                .push(FixtureEntry::parse_line(r, line).map_err(at)?);
        }
    }
    Ok(fx)
}

/// Canonical text of a fixture without comments.
pub fn emit_fixture(fx: &Fixture) -> String {
    let mut s = format!("@head-shift {}\n", fx.head_shift);
    let mut rep = None;
    for e in &fx.entries {
        if rep != Some(e.rep) {
            s.push_str(&format!("[rep {}]\n", e.rep));
            rep = Some(e.rep);
        }
        s.push_str(&e.to_line());
        s.push('\n');
    }
    s
}

pub fn f4_fixture() -> Fixture {
    parse_fixture(F4_GOLDEN).expect("embedded fixture parses")
}

/// `(node, monomial count, dimension)` per F4 fundamental, node 1-based.
pub fn f4_dimensions() -> Vec<(usize, usize, i64)> {
    F4_DIMENSIONS
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| {
            let v: Vec<i64> = l
                .split_whitespace()
                .map(|x| x.parse().expect("integer"))
                .collect();
            (v[0] as usize, v[1] as usize, v[2])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_fixture() {
        let fx = f4_fixture();
        assert_eq!(fx.head_shift, 1);
        assert_eq!(fx.rep(2).count(), 16);
        assert_eq!(fx.rep(3).count(), 171);
        let first = fx.rep(2).next().unwrap();
        assert_eq!(first.index, 70);
        assert_eq!(
            first.monomial.to_string(),
            "Y_{1,10}Y_{2,7}Y^{-1}_{2,9}Y^{-1}_{2,11}Y_{4,6}"
        );
        assert_eq!(parse_fixture(&emit_fixture(&fx)).unwrap(), fx);
    }

    #[test]
    fn line_roundtrip() {
        let l = "Monomial 70: (t^{-1}+t) Y_{1,10}Y_{2,7}Y^{-1}_{2,9}Y^{-1}_{2,11}Y_{4,6}";
        assert_eq!(FixtureEntry::parse_line(2, l).unwrap().to_line(), l);
        let unit = "Monomial 1: 1 Y_{2,1}";
        assert_eq!(FixtureEntry::parse_line(2, unit).unwrap().to_line(), unit);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let err =
            parse_fixture("[rep 2]\nMonomial 70: (t^{-1}+t) Y_{1,10}\nMonomial x: 1 Y_{1,1}\n")
                .unwrap_err();
        assert_eq!(err.line, Some(3));
        assert_eq!(
            parse_fixture("Monomial 1: 1 Y_{1,1}\n").unwrap_err().line,
            Some(1)
        );
    }

    #[test]
    fn dimensions_table() {
        assert_eq!(
            f4_dimensions(),
            vec![(1, 26, 26), (2, 283, 299), (3, 1532, 1703), (4, 53, 53)]
        );
    }
}
