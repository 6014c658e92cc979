//! Executable structural checks over computed characters, and the named
//! suites run by `qchar verify`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use crate::cartan::{build_cartan, CartanData, Family};
use crate::character::{Character, Coeff};
use crate::error::AlgoError;
use crate::fm::{fundamental_qcharacter, kernel_decompose, standard_qcharacter, Limits};
use crate::io::{emit_character, f4_dimensions, f4_fixture, Fixture, Format};
use crate::laurent::TPoly;
use crate::monomial::{
    dominance_compare, is_dominant_all, is_node_dominant, is_right_negative, u_stats, Monomial,
    RightNegativity,
};
use crate::qt::{qt_fundamental, qt_standard, specialize_t1, star_t, t_algorithm, TCharacter};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Skipped => "SKIP",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub monomial: String,
    pub coeff: String,
    pub note: String,
}

impl Witness {
    fn term<C: Coeff>(m: &Monomial, c: &C, note: impl Into<String>) -> Self {
        Witness {
            monomial: m.to_string(),
            coeff: c.render(),
            note: note.into(),
        }
    }

    fn note(note: impl Into<String>) -> Self {
        Witness {
            monomial: String::new(),
            coeff: String::new(),
            note: note.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub target: String,
    pub verdict: Verdict,
    pub truncated_at: Option<u32>,
    pub witnesses: Vec<Witness>,
    pub detail: String,
}

const MAX_WITNESSES: usize = 8;

impl CheckReport {
    fn new(name: &str, target: impl Into<String>) -> Self {
        CheckReport {
            name: name.into(),
            target: target.into(),
            verdict: Verdict::Pass,
            truncated_at: None,
            witnesses: Vec::new(),
            detail: String::new(),
        }
    }

    fn skipped(name: &str, target: impl Into<String>, why: &str) -> Self {
        let mut r = CheckReport::new(name, target);
        r.verdict = Verdict::Skipped;
        r.detail = why.into();
        r
    }

    fn error(name: &str, target: impl Into<String>, e: &AlgoError) -> Self {
        let mut r = CheckReport::new(name, target);
        r.fail(Witness::note(e.to_string()));
        r
    }

    fn fail(&mut self, w: Witness) {
        self.verdict = Verdict::Fail;
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(w);
        }
    }

    fn with_detail(mut self, d: impl Into<String>) -> Self {
        self.detail = d.into();
        self
    }

    fn scoped_to<C: Coeff>(mut self, ch: &Character<C>) -> Self {
        self.truncated_at = ch.truncated_at;
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn line(&self) -> String {
        let window = self
            .truncated_at
            .map(|h| format!(" [window: height <= {h}]"))
            .unwrap_or_default();
        let mut s = format!(
            "{}  {:<28} {}{}",
            self.verdict, self.name, self.target, window
        );
        if !self.detail.is_empty() {
            s.push_str(&format!(" ({})", self.detail));
        }
        for w in &self.witnesses {
            s.push_str(
                format!("\n      witness: {} {} {}", w.coeff, w.monomial, w.note).trim_end(),
            );
        }
        s
    }
}

/// Human-readable table, one line per report plus witnesses.
pub fn render_table(reports: &[CheckReport]) -> String {
    let mut s = String::new();
    for r in reports {
        s.push_str(&r.line());
        s.push('\n');
    }
    let fails = reports
        .iter()
        .filter(|r| r.verdict == Verdict::Fail)
        .count();
    let skips = reports
        .iter()
        .filter(|r| r.verdict == Verdict::Skipped)
        .count();
    s.push_str(&format!(
        "{} checks: {} passed, {} failed, {} skipped\n",
        reports.len(),
        reports.len() - fails - skips,
        fails,
        skips
    ));
    s
}

pub fn render_json(reports: &[CheckReport]) -> String {
    let mut s = serde_json::to_string_pretty(reports).expect("reports serialize");
    s.push('\n');
    s
}

pub fn target(cd: &CartanData, ch_head: Option<&Monomial>) -> String {
    match ch_head {
        Some(h) => format!("{} head {}", cd.family, h),
        None => cd.family.to_string(),
    }
}

fn head_of<'a, C: Coeff>(
    name: &str,
    cd: &CartanData,
    ch: &'a Character<C>,
) -> Result<&'a Monomial, Box<CheckReport>> {
    ch.head.as_ref().ok_or_else(|| {
        let mut r = CheckReport::new(name, target(cd, None));
        r.fail(Witness::note("character has no head"));
        Box::new(r)
    })
}

/// Every term lies below the head.
pub fn check_dominance<C: Coeff>(cd: &CartanData, ch: &Character<C>) -> CheckReport {
    let name = "dominance";
    let head = match head_of(name, cd, ch) {
        Ok(h) => h,
        Err(r) => return *r,
    };
    let mut r = CheckReport::new(name, target(cd, Some(head))).scoped_to(ch);
    for (m, c) in &ch.terms {
        if dominance_compare(cd, m, head).is_none() {
            r.fail(Witness::term(m, c, "not below the head"));
        }
    }
    r.with_detail(format!("{} terms", ch.len()))
}

fn covers_multiplicity_one(f: &Family) -> bool {
    matches!(
        f,
        Family::A(_) | Family::B(_) | Family::C(_) | Family::AffineA(_)
    )
}

/// Multiplicity one regardless of family: every `u_{j,l} <= 1`, every
/// coefficient 1.
pub fn check_multiplicity_one_unscoped<C: Coeff>(
    cd: &CartanData,
    ch: &Character<C>,
) -> CheckReport {
    let mut r = CheckReport::new("multiplicity-one", target(cd, ch.head.as_ref())).scoped_to(ch);
    for (m, c) in &ch.terms {
        if !c.is_unit() {
            r.fail(Witness::term(m, c, "coefficient is not 1"));
        } else if let Some((i, l, e)) = m.iter().find(|t| t.2 > 1) {
            r.fail(Witness::term(
                m,
                c,
                format!("exponent {e} at Y_{{{},{}}}", i + 1, l),
            ));
        }
    }
    r.with_detail(format!("{} terms", ch.len()))
}

/// Multiplicity one, for the families where it is expected (A, affine A,
/// B, C); skipped elsewhere.
pub fn check_multiplicity_one<C: Coeff>(cd: &CartanData, ch: &Character<C>) -> CheckReport {
    if !covers_multiplicity_one(&cd.family) {
        return CheckReport::skipped(
            "multiplicity-one",
            target(cd, ch.head.as_ref()),
            "family outside types A, B, C",
        );
    }
    check_multiplicity_one_unscoped(cd, ch)
}

fn is_fundamental_head(h: &Monomial) -> bool {
    h.len() == 1 && h.iter().all(|t| t.2 == 1)
}

/// Every non-head term of a fundamental character is right-negative.
pub fn check_right_negative<C: Coeff>(cd: &CartanData, ch: &Character<C>) -> CheckReport {
    let name = "right-negative";
    let head = match head_of(name, cd, ch) {
        Ok(h) => h,
        Err(r) => return *r,
    };
    if !is_fundamental_head(head) {
        return CheckReport::skipped(
            name,
            target(cd, Some(head)),
            "head is not a single fundamental variable",
        );
    }
    let mut r = CheckReport::new(name, target(cd, Some(head))).scoped_to(ch);
    for (m, c) in &ch.terms {
        if m != head && is_right_negative(m) != RightNegativity::RightNegative {
            r.fail(Witness::term(m, c, "not right-negative"));
        }
    }
    r
}

/// The head is the only dominant term.
pub fn check_unique_dominant<C: Coeff>(cd: &CartanData, ch: &Character<C>) -> CheckReport {
    let name = "unique-dominant";
    let head = match head_of(name, cd, ch) {
        Ok(h) => h,
        Err(r) => return *r,
    };
    let mut r = CheckReport::new(name, target(cd, Some(head))).scoped_to(ch);
    if !ch.terms.contains_key(head) {
        r.fail(Witness::term(head, &C::zero(), "head missing"));
    }
    for (m, c) in &ch.terms {
        if m != head && is_dominant_all(m) {
            r.fail(Witness::term(m, c, "second dominant monomial"));
        }
    }
    r
}

/// For each node `j`, the character decomposes into `F_j` kernels with
/// zero residue. Negative decomposition coefficients are reported in the
/// detail, not as failures.
pub fn check_kernel_oracle(cd: &CartanData, ch: &Character<i64>) -> CheckReport {
    let mut r = CheckReport::new("kernel-oracle", target(cd, ch.head.as_ref())).scoped_to(ch);
    if ch.truncated_at.is_some() {
        return CheckReport::skipped("kernel-oracle", r.target, "truncated character");
    }
    let mut negative = 0;
    for j in 0..cd.n {
        match kernel_decompose(cd, ch, &[j]) {
            Ok(parts) => negative += parts.iter().filter(|p| p.1 < 0).count(),
            Err(e) => r.fail(Witness::note(format!("node {}: {e}", j + 1))),
        }
    }
    r.with_detail(format!(
        "{} nodes, {} negative kernel coefficients",
        cd.n, negative
    ))
}

fn node_bound_report<C: Coeff>(
    name: &str,
    cd: &CartanData,
    ch: &Character<C>,
    bound: impl Fn(usize) -> i64,
) -> CheckReport {
    let mut r = CheckReport::new(name, target(cd, ch.head.as_ref())).scoped_to(ch);
    let mut checked = 0;
    for (m, c) in &ch.terms {
        for j in 0..cd.n {
            if is_node_dominant(m, j) {
                checked += 1;
                let u = u_stats(m, &[j]).u;
                if u > bound(j) {
                    r.fail(Witness::term(
                        m,
                        c,
                        format!("u_{} = {u} exceeds {}", j + 1, bound(j)),
                    ));
                }
            }
        }
    }
    r.with_detail(format!("{checked} node-dominant pairs"))
}

/// Type B: every `j`-dominant term has `u_j <= 2`.
pub fn check_bn_bound<C: Coeff>(cd: &CartanData, ch: &Character<C>) -> CheckReport {
    if !matches!(cd.family, Family::B(_)) {
        return CheckReport::skipped("b-degree-bound", target(cd, ch.head.as_ref()), "not type B");
    }
    node_bound_report("b-degree-bound", cd, ch, |_| 2)
}

/// Type C: `j`-dominant terms have `u_n <= 1` at the last node and
/// `u_j <= 2` elsewhere.
pub fn check_cn_bound<C: Coeff>(cd: &CartanData, ch: &Character<C>) -> CheckReport {
    if !matches!(cd.family, Family::C(_)) {
        return CheckReport::skipped("c-degree-bound", target(cd, ch.head.as_ref()), "not type C");
    }
    let n = cd.n;
    node_bound_report(
        "c-degree-bound",
        cd,
        ch,
        move |j| if j + 1 == n { 1 } else { 2 },
    )
}

/// Within each node, all shifts occurring in the character share one parity.
pub fn check_shift_lattice<C: Coeff>(cd: &CartanData, ch: &Character<C>) -> CheckReport {
    let mut r = CheckReport::new("shift-lattice", target(cd, ch.head.as_ref())).scoped_to(ch);
    let mut parity: BTreeMap<usize, (i32, Monomial)> = BTreeMap::new();
    for (m, c) in &ch.terms {
        for (j, l, _) in m.iter() {
            match parity.get(&j) {
                None => {
                    parity.insert(j, (l.rem_euclid(2), m.clone()));
                }
                Some((p, first)) if *p != l.rem_euclid(2) => {
                    r.fail(Witness::term(
                        m,
                        c,
                        format!("node {} shift {l} against {first}", j + 1),
                    ));
                }
                Some(_) => {}
            }
        }
    }
    let pattern = parity
        .iter()
        .map(|(j, (p, _))| format!("{}:{}", j + 1, p))
        .join(" ");
    r.with_detail(format!("parities {pattern}"))
}

/// `F(Y_{i,l+c})` is `F(Y_{i,l})` translated by `c`.
pub fn check_shift_equivariance(
    cd: &CartanData,
    i: usize,
    l: i32,
    c: i32,
    limits: &Limits,
) -> CheckReport {
    let tgt = format!("{} node {} shift {} by {}", cd.family, i + 1, l, c);
    let mut r = CheckReport::new("shift-equivariance", tgt.clone());
    let (a, b) = match (
        fundamental_qcharacter(cd, i, l, limits),
        fundamental_qcharacter(cd, i, l + c, limits),
    ) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return CheckReport::error("shift-equivariance", tgt, &e),
    };
    let moved = a.shifted(c);
    for (m, x) in moved.terms.iter() {
        if b.coeff(m) != *x {
            r.fail(Witness::term(
                m,
                x,
                "missing or different after translation",
            ));
        }
    }
    for (m, x) in b.terms.iter() {
        if !moved.terms.contains_key(m) {
            r.fail(Witness::term(m, x, "extra term"));
        }
    }
    r.scoped_to(&b).with_detail(format!("{} terms", b.len()))
}

/// Identical rendered bytes for two worker counts.
pub fn check_determinism(
    cd: &CartanData,
    i: usize,
    l: i32,
    threads: (usize, usize),
) -> CheckReport {
    let tgt = format!(
        "{} node {} shift {} threads {}/{}",
        cd.family,
        i + 1,
        l,
        threads.0,
        threads.1
    );
    let render = |n: usize| -> Result<(String, String), AlgoError> {
        let lim = Limits::default().with_threads(n);
        let ch = fundamental_qcharacter(cd, i, l, &lim)?;
        let t = qt_fundamental(cd, i, l, &lim)?;
        let fam = cd.family.to_string();
        Ok((
            emit_character(&ch, &fam, Format::Text) + &emit_character(&ch, &fam, Format::Json),
            emit_character(&t.y_view(), &fam, Format::Text),
        ))
    };
    let mut r = CheckReport::new("determinism", tgt.clone());
    match (render(threads.0), render(threads.1)) {
        (Ok(a), Ok(b)) => {
            if a.0 != b.0 {
                r.fail(Witness::note("classical output bytes differ"));
            }
            if a.1 != b.1 {
                r.fail(Witness::note("t-deformed output bytes differ"));
            }
            r.with_detail(format!("{} + {} bytes", a.0.len(), a.1.len()))
        }
        (Err(e), _) | (_, Err(e)) => CheckReport::error("determinism", tgt, &e),
    }
}

/// Specializing the t-deformed run at `t = 1` gives the classical run.
pub fn check_t_specialization(cd: &CartanData, head: &Monomial, limits: &Limits) -> CheckReport {
    let tgt = target(cd, Some(head));
    let classical = match crate::fm::classical_algorithm(cd, head, limits) {
        Ok(e) => e.character(),
        Err(e) => return CheckReport::error("t-specialization", tgt, &e),
    };
    let tch = match t_algorithm(cd, head, limits) {
        Ok(t) => t,
        Err(e) => return CheckReport::error("t-specialization", tgt, &e),
    };
    let sp = specialize_t1(&tch);
    let mut r = CheckReport::new("t-specialization", tgt).scoped_to(&classical);
    for (m, c) in &classical.terms {
        if sp.coeff(m) != *c {
            r.fail(Witness::term(m, c, format!("t = 1 gives {}", sp.coeff(m))));
        }
    }
    for (m, c) in &sp.terms {
        if !classical.terms.contains_key(m) {
            r.fail(Witness::term(m, c, "only in the t-deformed run"));
        }
    }
    if !tch.gauge_adjusted.is_empty() {
        r.fail(Witness::note(format!(
            "{} monomials consistent only up to a power of t",
            tch.gauge_adjusted.len()
        )));
    }
    let repeated = tch.repeated_monomials();
    r.with_detail(format!(
        "{} pair terms, {} repeated monomials",
        tch.len(),
        repeated.len()
    ))
}

/// `F_t(Y_{i,l}) *_t F_t(Y_{j,l}) = F_t(Y_{j,l}) *_t F_t(Y_{i,l})` for all pairs.
pub fn check_commutation(cd: &CartanData, l: i32) -> CheckReport {
    let tgt = format!("{} shift {}", cd.family, l);
    let fs: Result<Vec<TCharacter>, AlgoError> = (0..cd.n)
        .map(|i| qt_fundamental(cd, i, l, &Limits::default()))
        .collect();
    let fs = match fs {
        Ok(f) => f,
        Err(e) => return CheckReport::error("t-commutation", tgt, &e),
    };
    let pairs: Vec<(usize, usize)> = (0..cd.n).tuple_combinations().collect();
    let bad: Vec<(usize, usize)> = pairs
        .par_iter()
        .filter(|&&(i, j)| star_t(cd, &fs[i], &fs[j]).terms != star_t(cd, &fs[j], &fs[i]).terms)
        .copied()
        .collect();
    let mut r = CheckReport::new("t-commutation", tgt);
    for (i, j) in bad {
        r.fail(Witness::note(format!(
            "nodes {} and {} do not commute",
            i + 1,
            j + 1
        )));
    }
    r.with_detail(format!("{} pairs", pairs.len()))
}

/// For shift-separated lists, the ordered product of the concatenation is
/// the `*_t` product of the two ordered products.
pub fn check_multiplicativity(
    cd: &CartanData,
    first: &[(usize, i32)],
    second: &[(usize, i32)],
) -> CheckReport {
    let show = |fs: &[(usize, i32)]| fs.iter().map(|(i, l)| format!("{}:{}", i + 1, l)).join(",");
    let tgt = format!("{} [{}] [{}]", cd.family, show(first), show(second));
    let lim = Limits::default();
    let max_first = first.iter().map(|f| f.1).max();
    let min_second = second.iter().map(|f| f.1).min();
    if let (Some(a), Some(b)) = (max_first, min_second) {
        if a > b {
            return CheckReport::skipped(
                "t-multiplicativity",
                tgt,
                "lists are not shift-separated",
            );
        }
    }
    let all: Vec<(usize, i32)> = first.iter().chain(second).copied().collect();
    let res = (|| -> Result<bool, AlgoError> {
        let whole = qt_standard(cd, &all, &lim)?;
        let parts = star_t(
            cd,
            &qt_standard(cd, first, &lim)?,
            &qt_standard(cd, second, &lim)?,
        );
        Ok(whole.terms == parts.terms)
    })();
    let mut r = CheckReport::new("t-multiplicativity", tgt.clone());
    match res {
        Ok(true) => r,
        Ok(false) => {
            r.fail(Witness::note("pair terms differ"));
            r
        }
        Err(e) => CheckReport::error("t-multiplicativity", tgt, &e),
    }
}

/// Standard module: coefficients in `N[t^+-1]`, the same monomials as the
/// classical product, and the classical product at `t = 1`.
pub fn check_qt_standard(
    cd: &CartanData,
    factors: &[(usize, i32)],
    limits: &Limits,
) -> CheckReport {
    let tgt = format!(
        "{} [{}]",
        cd.family,
        factors
            .iter()
            .map(|(i, l)| format!("{}:{}", i + 1, l))
            .join(",")
    );
    let res = (|| -> Result<(TCharacter, Character<i64>), AlgoError> {
        Ok((
            qt_standard(cd, factors, limits)?,
            standard_qcharacter(cd, factors, limits)?,
        ))
    })();
    let (tch, classical) = match res {
        Ok(x) => x,
        Err(e) => return CheckReport::error("qt-standard", tgt, &e),
    };
    let mut r = CheckReport::new("qt-standard", tgt);
    for (k, p) in &tch.terms {
        if !p.is_nonnegative() {
            r.fail(Witness::term(&k.y, p, "negative coefficient"));
        }
    }
    let tset: BTreeSet<&Monomial> = tch.terms.keys().map(|k| &k.y).collect();
    let cset: BTreeSet<&Monomial> = classical.terms.keys().collect();
    for m in tset.symmetric_difference(&cset) {
        r.fail(Witness::term(m, &0i64, "monomial sets differ"));
    }
    if specialize_t1(&tch).terms != classical.terms {
        r.fail(Witness::note("t = 1 differs from the classical product"));
    }
    r.with_detail(format!("{} pair terms", tch.len()))
}

/// Counts, dimensions and the exact non-unit list for the F4 fundamentals.
/// `classical[k]` and `deformed` are computed at the fixture's head shift.
pub fn check_f4_golden(
    classical: &[Character<i64>],
    deformed: &[(usize, TCharacter)],
    fixture: &Fixture,
    dims: &[(usize, usize, i64)],
) -> Vec<CheckReport> {
    let mut counts = CheckReport::new("f4-dimensions", "F4 nodes 1-4");
    for &(node, count, dim) in dims {
        match classical.get(node - 1) {
            Some(ch) if ch.len() == count && ch.dimension() == dim => {}
            Some(ch) => counts.fail(Witness::note(format!(
                "node {node}: {} monomials, dimension {} (expected {count}, {dim})",
                ch.len(),
                ch.dimension()
            ))),
            None => counts.fail(Witness::note(format!("node {node} not computed"))),
        }
    }
    let summary = classical
        .iter()
        .map(|c| format!("{}/{}", c.len(), c.dimension()))
        .join(" ");
    let mut out = vec![counts.with_detail(summary)];
    let sym = TPoly::from_terms([(-1, 1), (1, 1)]);
    for (node, tch) in deformed {
        let mut r = CheckReport::new(
            "f4-t-coefficients",
            format!("F4 node {node} head {}", tch.head),
        );
        let listed: BTreeMap<Monomial, TPoly> = fixture
            .rep(*node)
            .map(|e| (e.monomial.clone(), e.coeff.clone()))
            .collect();
        let mut nonunit = 0;
        for (k, p) in &tch.terms {
            let bar = p.bar_symmetrize();
            match listed.get(&k.y) {
                Some(want) => {
                    nonunit += 1;
                    if bar.as_ref() != Some(want) || bar.as_ref() != Some(&sym) {
                        r.fail(Witness::term(&k.y, p, format!("listed as {want}")));
                    }
                }
                None => {
                    if bar != Some(TPoly::one()) {
                        nonunit += 1;
                        r.fail(Witness::term(&k.y, p, "non-unit but not listed"));
                    }
                }
            }
        }
        if !tch.gauge_adjusted.is_empty() {
            r.fail(Witness::note(format!(
                "{} monomials accepted only up to a power of t",
                tch.gauge_adjusted.len()
            )));
        }
        let present: BTreeSet<&Monomial> = tch.terms.keys().map(|k| &k.y).collect();
        for m in listed.keys() {
            if !present.contains(m) {
                r.fail(Witness::term(
                    m,
                    &listed[m],
                    "listed but not in the character",
                ));
            }
        }
        out.push(r.with_detail(format!(
            "{} listed, {} non-unit computed",
            listed.len(),
            nonunit
        )));
    }
    out
}

/// The D4 trivalent-node fundamental has `Y_{2,2}Y^{-1}_{2,4}` with
/// coefficient 2. If it does not, scans all nodes for a coefficient-2 term
/// of the form `Y_{j,2}Y^{-1}_{j,4}` and reports the node.
pub fn check_d4_coefficient_two() -> CheckReport {
    let cd = build_cartan(Family::D(4)).expect("D4 builds");
    let mut r = CheckReport::new("d4-coefficient-two", "D4 node 2 shift 0");
    let shape = |j: usize| Monomial::from_exps([(j, 2, 1), (j, 4, -1)]);
    let mut found = None;
    for j in std::iter::once(1).chain((0..4).filter(|&j| j != 1)) {
        match fundamental_qcharacter(&cd, j, 0, &Limits::default()) {
            Ok(ch) => {
                if ch.coeff(&shape(j)) == 2 {
                    found = Some(j);
                    break;
                }
            }
            Err(e) => return CheckReport::error("d4-coefficient-two", r.target, &e),
        }
    }
    match found {
        Some(1) => r.with_detail(format!("coefficient 2 at {}", shape(1))),
        Some(j) => {
            r.target = format!("D4 node {} shift 0", j + 1);
            r.with_detail(format!("found on node {} instead of node 2", j + 1))
        }
        None => {
            r.fail(Witness::note("no node has the coefficient-2 monomial"));
            r
        }
    }
}

/// Finite-type fundamentals used by the structural suite.
pub fn structural_families() -> Vec<Family> {
    let mut v = Vec::new();
    v.extend((1..=5).map(Family::A));
    v.extend((2..=4).map(Family::B));
    v.extend((2..=4).map(Family::C));
    v.push(Family::D(4));
    v.push(Family::G2);
    v.push(Family::F4);
    v
}

fn cartan(f: Family) -> CartanData {
    build_cartan(f).expect("built-in family")
}

/// Structural checks on one fundamental character.
pub fn structural_reports(cd: &CartanData, i: usize, l: i32) -> Vec<CheckReport> {
    let tgt = format!("{} node {} shift {}", cd.family, i + 1, l);
    match fundamental_qcharacter(cd, i, l, &Limits::default()) {
        Ok(ch) => vec![
            check_dominance(cd, &ch),
            check_right_negative(cd, &ch),
            check_unique_dominant(cd, &ch),
            check_kernel_oracle(cd, &ch),
            check_shift_lattice(cd, &ch),
        ],
        Err(e) => vec![CheckReport::error("fundamental", tgt, &e)],
    }
}

pub fn suite_structural() -> Vec<CheckReport> {
    let jobs: Vec<(CartanData, usize)> = structural_families()
        .into_iter()
        .map(cartan)
        .flat_map(|cd| (0..cd.n).map(move |i| (cd.clone(), i)))
        .collect();
    jobs.par_iter()
        .flat_map(|(cd, i)| structural_reports(cd, *i, 0))
        .collect()
}

pub fn suite_f4() -> Vec<CheckReport> {
    let cd = cartan(Family::F4);
    let fx = f4_fixture();
    let lim = Limits::default();
    let classical: Result<Vec<_>, _> = (0..4)
        .map(|i| fundamental_qcharacter(&cd, i, fx.head_shift, &lim))
        .collect();
    let deformed: Result<Vec<_>, _> = [2usize, 3]
        .iter()
        .map(|&n| qt_fundamental(&cd, n - 1, fx.head_shift, &lim).map(|t| (n, t)))
        .collect();
    match (classical, deformed) {
        (Ok(c), Ok(d)) => {
            let mut out = check_f4_golden(&c, &d, &fx, &f4_dimensions());
            out.push(check_multiplicity_one(&cd, &c[2]));
            out
        }
        (Err(e), _) | (_, Err(e)) => vec![CheckReport::error("f4-dimensions", "F4", &e)],
    }
}

pub fn suite_d4() -> Vec<CheckReport> {
    vec![check_d4_coefficient_two()]
}

/// Multiplicity one for A1..A5, B2..B4, C2..C4 and the degree bounds for
/// B2..B4, C2..C4.
pub fn suite_abc() -> Vec<CheckReport> {
    let mut fams: Vec<Family> = (1..=5).map(Family::A).collect();
    fams.extend((2..=4).map(Family::B));
    fams.extend((2..=4).map(Family::C));
    let jobs: Vec<(CartanData, usize)> = fams
        .into_iter()
        .map(cartan)
        .flat_map(|cd| (0..cd.n).map(move |i| (cd.clone(), i)))
        .collect();
    jobs.par_iter()
        .flat_map(
            |(cd, i)| match fundamental_qcharacter(cd, *i, 0, &Limits::default()) {
                Ok(ch) => {
                    let mut v = vec![check_multiplicity_one(cd, &ch)];
                    match cd.family {
                        Family::B(_) => v.push(check_bn_bound(cd, &ch)),
                        Family::C(_) => v.push(check_cn_bound(cd, &ch)),
                        _ => {}
                    }
                    v
                }
                Err(e) => vec![CheckReport::error(
                    "multiplicity-one",
                    format!("{} node {}", cd.family, i + 1),
                    &e,
                )],
            },
        )
        .collect()
}

pub const AFFINE_HEIGHT: u32 = 8;

pub fn suite_affine() -> Vec<CheckReport> {
    let mut out = Vec::new();
    for l in [2, 3] {
        let cd = cartan(Family::AffineA(l));
        for i in 0..cd.n {
            match fundamental_qcharacter(&cd, i, 0, &Limits::height(AFFINE_HEIGHT)) {
                Ok(ch) => {
                    out.push(check_multiplicity_one(&cd, &ch));
                    out.push(check_dominance(&cd, &ch));
                    out.push(check_right_negative(&cd, &ch));
                }
                Err(e) => out.push(CheckReport::error(
                    "multiplicity-one",
                    format!("{} node {}", cd.family, i + 1),
                    &e,
                )),
            }
        }
    }
    out
}

/// Shift windows used for standard-module factors.
const STANDARD_SHIFTS: [i32; 4] = [0, 1, 2, 3];

/// All factor multisets of size 1..=max_len with nodes of `cd` and the
/// standard shift window.
pub fn standard_factor_lists(cd: &CartanData, max_len: usize) -> Vec<Vec<(usize, i32)>> {
    let atoms: Vec<(usize, i32)> = (0..cd.n).cartesian_product(STANDARD_SHIFTS).collect();
    (1..=max_len)
        .flat_map(|k| atoms.iter().copied().combinations_with_replacement(k))
        .collect()
}

pub fn suite_qt() -> Vec<CheckReport> {
    let mut out = Vec::new();
    // Specialization on every tested head.
    let heads: Vec<(CartanData, Monomial)> = structural_families()
        .into_iter()
        .map(cartan)
        .flat_map(|cd| (0..cd.n).map(move |i| (cd.clone(), Monomial::y(i, 0))))
        .collect();
    out.extend(
        heads
            .par_iter()
            .map(|(cd, h)| check_t_specialization(cd, h, &Limits::default()))
            .collect::<Vec<_>>(),
    );
    out.push(check_commutation(&cartan(Family::F4), 0));
    // Multiplicativity on shift-separated lists.
    for fam in [Family::A(1), Family::B(2)] {
        let cd = cartan(fam);
        let lists = standard_factor_lists(&cd, 2);
        let pairs: Vec<_> = lists
            .iter()
            .cartesian_product(lists.iter())
            .filter(|(a, b)| {
                a.len() + b.len() <= 3 && a.iter().map(|f| f.1).max() <= b.iter().map(|f| f.1).min()
            })
            .collect();
        let reports: Vec<CheckReport> = pairs
            .par_iter()
            .map(|(a, b)| check_multiplicativity(&cd, a, b))
            .collect();
        out.push(summarize(
            "t-multiplicativity",
            &cd.family.to_string(),
            reports,
        ));
    }
    // Positivity of standard modules with up to three factors.
    for fam in [Family::A(2), Family::B(2), Family::G2] {
        let cd = cartan(fam);
        let lists = standard_factor_lists(&cd, 3);
        let reports: Vec<CheckReport> = lists
            .par_iter()
            .map(|fs| check_qt_standard(&cd, fs, &Limits::default()))
            .collect();
        out.push(summarize("qt-standard", &cd.family.to_string(), reports));
    }
    out
}

/// Folds many reports of one check into one, keeping failing witnesses.
pub fn summarize(name: &str, tgt: &str, reports: Vec<CheckReport>) -> CheckReport {
    let mut r = CheckReport::new(name, tgt);
    let total = reports.len();
    let mut passed = 0;
    for x in reports {
        match x.verdict {
            Verdict::Pass => passed += 1,
            Verdict::Skipped => {}
            Verdict::Fail => {
                for w in x.witnesses {
                    r.fail(Witness {
                        note: format!("{}: {}", x.target, w.note),
                        ..w
                    });
                }
            }
        }
    }
    r.with_detail(format!("{passed}/{total} cases"))
}

/// Shift equivariance and determinism on F4 node 3.
pub fn suite_invariance() -> Vec<CheckReport> {
    let cd = cartan(Family::F4);
    vec![
        check_shift_equivariance(&cd, 2, 0, 5, &Limits::default()),
        check_shift_equivariance(&cd, 2, 0, -3, &Limits::default()),
        check_shift_equivariance(&cd, 3, 0, 5, &Limits::default()),
        check_determinism(&cd, 2, 0, (1, 4)),
    ]
}

pub const SUITES: [&str; 6] = ["all", "f4", "d4", "abc", "qt", "affine"];

pub fn run_suite(name: &str) -> Option<Vec<CheckReport>> {
    let out = match name {
        "f4" => suite_f4(),
        "d4" => suite_d4(),
        "abc" => suite_abc(),
        "qt" => suite_qt(),
        "affine" => suite_affine(),
        "all" => {
            let mut v = suite_f4();
            v.extend(suite_d4());
            v.extend(suite_abc());
            v.extend(suite_affine());
            v.extend(suite_structural());
            v.extend(suite_qt());
            v.extend(suite_invariance());
            v
        }
        _ => return None,
    };
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cd(s: &str) -> CartanData {
        build_cartan(s.parse().unwrap()).unwrap()
    }

    fn m(s: &str) -> Monomial {
        Monomial::parse_braced(s).unwrap()
    }

    #[test]
    fn dominance_positive_and_negative() {
        let a1 = cd("A1");
        let ch = fundamental_qcharacter(&a1, 0, 0, &Limits::default()).unwrap();
        assert!(check_dominance(&a1, &ch).passed());
        let mut bad = ch.clone();
        bad.add_term(m("Y_{1,4}"), &1);
        let r = check_dominance(&a1, &bad);
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(!r.witnesses.is_empty());
        let aff = cd("A2~");
        let w = fundamental_qcharacter(&aff, 0, 0, &Limits::height(3)).unwrap();
        let r = check_dominance(&aff, &w);
        assert!(r.passed());
        assert_eq!(r.truncated_at, Some(3));
    }

    #[test]
    fn multiplicity_one_cases() {
        let f4 = cd("F4");
        let ch = fundamental_qcharacter(&f4, 2, 0, &Limits::default()).unwrap();
        let r = check_multiplicity_one_unscoped(&f4, &ch);
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(r.witnesses.iter().any(|w| w.monomial.contains("Y^2_{2,")));
        assert_eq!(check_multiplicity_one(&f4, &ch).verdict, Verdict::Skipped);
        let b2 = cd("B2");
        for i in 0..2 {
            assert!(check_multiplicity_one(
                &b2,
                &fundamental_qcharacter(&b2, i, 0, &Limits::default()).unwrap()
            )
            .passed());
        }
    }

    #[test]
    fn degree_bounds() {
        let b2 = cd("B2");
        let ch = fundamental_qcharacter(&b2, 0, 0, &Limits::default()).unwrap();
        assert!(check_bn_bound(&b2, &ch).passed());
        let mut bad = ch.clone();
        bad.add_term(m("Y^3_{1,0}"), &1);
        assert_eq!(check_bn_bound(&b2, &bad).verdict, Verdict::Fail);
        assert_eq!(check_bn_bound(&cd("C2"), &ch).verdict, Verdict::Skipped);
        let c3 = cd("C3");
        let mut badc = fundamental_qcharacter(&c3, 0, 0, &Limits::default()).unwrap();
        assert!(check_cn_bound(&c3, &badc).passed());
        badc.add_term(m("Y^2_{3,0}"), &1);
        assert_eq!(check_cn_bound(&c3, &badc).verdict, Verdict::Fail);
        let mut badc2 = fundamental_qcharacter(&c3, 0, 0, &Limits::default()).unwrap();
        badc2.add_term(m("Y^3_{1,0}"), &1);
        assert_eq!(check_cn_bound(&c3, &badc2).verdict, Verdict::Fail);
    }

    #[test]
    fn shift_lattice_cases() {
        let g2 = cd("G2");
        let ch = fundamental_qcharacter(&g2, 0, 0, &Limits::default()).unwrap();
        assert!(check_shift_lattice(&g2, &ch).passed());
        let mut bad = ch.clone();
        bad.add_term(m("Y_{1,1}Y^{-1}_{1,7}"), &1);
        assert_eq!(check_shift_lattice(&g2, &bad).verdict, Verdict::Fail);
    }

    #[test]
    fn shift_equivariance_small() {
        let a1 = cd("A1");
        assert!(check_shift_equivariance(&a1, 0, 0, 2, &Limits::default()).passed());
        assert!(check_shift_equivariance(&a1, 0, 0, 0, &Limits::default()).passed());
    }

    #[test]
    fn f4_golden_perturbed_fixture_fails() {
        let mut fx = f4_fixture();
        let e = &mut fx.entries[0];
        e.monomial = e.monomial.mul(&m("Y_{4,6}"));
        let f4 = cd("F4");
        let lim = Limits::default();
        let classical: Vec<_> = (0..4)
            .map(|i| fundamental_qcharacter(&f4, i, 1, &lim).unwrap())
            .collect();
        let deformed = vec![(2, qt_fundamental(&f4, 1, 1, &lim).unwrap())];
        let reports = check_f4_golden(&classical, &deformed, &fx, &f4_dimensions());
        assert!(reports[0].passed());
        assert_eq!(reports[1].verdict, Verdict::Fail);
        assert!(reports[1].witnesses.len() >= 2);
    }

    #[test]
    fn qt_standard_small() {
        assert!(check_qt_standard(&cd("A1"), &[(0, 0), (0, 2)], &Limits::default()).passed());
        assert!(check_qt_standard(&cd("B2"), &[(0, 0), (1, 1)], &Limits::default()).passed());
        assert!(check_qt_standard(&cd("A2"), &[(1, 0)], &Limits::default()).passed());
    }
}
