//! The worklist expansion of a dominant monomial into its character, and
//! what is built on it: fundamental and standard characters, restriction to
//! subdiagrams and decomposition into single-node or subdiagram kernels.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use crate::cartan::CartanData;
use crate::character::{Character, Coeff};
use crate::error::AlgoError;
use crate::monomial::{
    dominance_compare, is_dominant, is_dominant_all, truncate, AVector, Monomial,
};
use crate::sl2::{kernel_terms, KernelCache};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Limits {
    /// Drop every term above this height.
    pub max_height: Option<u32>,
    /// Fail once the result has more terms.
    pub max_terms: Option<usize>,
    /// Worker count for the per-level expansion; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Limits {
    pub fn height(h: u32) -> Self {
        Limits {
            max_height: Some(h),
            ..Limits::default()
        }
    }

    pub fn with_threads(mut self, n: usize) -> Self {
        self.threads = Some(n);
        self
    }
}

/// Raw output of the worklist: every term keyed by its A-vector.
#[derive(Clone, Debug)]
pub struct Expansion<C: Coeff> {
    pub head: Monomial,
    pub terms: BTreeMap<AVector, (Monomial, C)>,
    pub truncated_at: Option<u32>,
    /// Dominant monomials other than the head reached with nonzero pending
    /// contributions; their value was set to 0.
    pub other_dominant: Vec<Monomial>,
    /// Monomials whose candidate values agreed only up to a power of `t`.
    pub gauge_adjusted: Vec<Monomial>,
}

impl<C: Coeff> Expansion<C> {
    /// Terms keyed by Y-monomial (A-vectors determine the monomial).
    pub fn character(&self) -> Character<C> {
        let mut ch = Character::zero();
        for (y, c) in self.terms.values() {
            ch.add_term(y.clone(), c);
        }
        ch.head = Some(self.head.clone());
        ch.truncated_at = self.truncated_at;
        ch
    }
}

struct Pending<C> {
    y: Monomial,
    sj: Vec<C>,
}

struct Outcome<C> {
    v: AVector,
    y: Monomial,
    s: C,
    pushes: Vec<(AVector, Monomial, usize, C)>,
    other_dominant: bool,
    gauge_adjusted: bool,
}

/// `E(v, w)`: the power of `t` relating the kernel of the current monomial
/// to the pair basis of the global head.
fn transfer_exponent(
    cd: &CartanData,
    v: &AVector,
    uv: &Monomial,
    w: &AVector,
    uw: &Monomial,
) -> i32 {
    let mut e = 0;
    for (i, l, k) in v.iter() {
        e += k as i32 * uw.exp(i, l - cd.r[i]);
    }
    for (i, l, k) in w.iter() {
        e -= k as i32 * uv.exp(i, l + cd.r[i]);
    }
    e
}

fn negative_nodes(y: &Monomial) -> Vec<usize> {
    let mut out: Vec<usize> = y.iter().filter(|t| t.2 < 0).map(|t| t.0).collect();
    out.dedup();
    out
}

fn step<C: Coeff>(
    cd: &CartanData,
    head: &Monomial,
    cache: &KernelCache<C>,
    twisted: bool,
    v: &AVector,
    p: &Pending<C>,
) -> Result<Outcome<C>, AlgoError> {
    let nondom = negative_nodes(&p.y);
    let mut other_dominant = false;
    let mut gauge_adjusted = false;
    let s = if v.is_zero() {
        C::one()
    } else if nondom.is_empty() {
        other_dominant = p.sj.iter().any(|c| !c.is_zero());
        C::zero()
    } else {
        let first = &p.sj[nondom[0]];
        let mut value = first.clone();
        for &j in &nondom[1..] {
            let cand = &p.sj[j];
            if cand == first {
                continue;
            }
            if !first.gauge_eq(cand) {
                return Err(AlgoError::InconsistentAlgorithm {
                    monomial: p.y.clone(),
                    nodes: nondom.iter().map(|j| j + 1).collect(),
                    values: nondom
                        .iter()
                        .map(|&j| p.sj[j].clone())
                        .map(|c| format!("{c:?}"))
                        .collect(),
                });
            }
            gauge_adjusted = true;
            if let Some(canon) = first.gauge_canonical() {
                value = canon;
            }
        }
        value
    };
    let uv = p.y.div(head);
    let mut pushes = Vec::new();
    for j in 0..cd.n {
        if nondom.contains(&j) || p.y.slice(j).is_empty() {
            continue;
        }
        let mut weight = s.clone();
        weight.sub_from(&p.sj[j]);
        if weight.is_zero() {
            continue;
        }
        for (w, y2, c) in kernel_terms(cache, cd, j, &p.y, twisted) {
            if w.is_zero() {
                continue;
            }
            let mut coeff = weight.times(&c);
            if twisted {
                let uw = y2.div(&p.y);
                coeff = coeff.twist(transfer_exponent(cd, v, &uv, &w, &uw));
            }
            pushes.push((v.add(&w), y2, j, coeff));
        }
    }
    Ok(Outcome {
        v: v.clone(),
        y: p.y.clone(),
        s,
        pushes,
        other_dominant,
        gauge_adjusted,
    })
}

/// Runs the worklist on `head`. With `twisted`, kernels are the `*_t`
/// products and contributions carry the transfer twist.
pub(crate) fn expand<C: Coeff>(
    cd: &CartanData,
    head: &Monomial,
    limits: &Limits,
    twisted: bool,
) -> Result<Expansion<C>, AlgoError> {
    if !is_dominant_all(head) {
        return Err(AlgoError::NotDominant {
            monomial: head.clone(),
            nodes: (1..=cd.n).collect(),
        });
    }
    if let Some(i) = head.nodes().find(|&i| i >= cd.n) {
        return Err(crate::error::CartanError::NodeOutOfRange {
            node: i + 1,
            rank: cd.n,
        }
        .into());
    }
    if cd.family.is_affine() && limits.max_height.is_none() {
        return Err(AlgoError::HeightLimitRequired);
    }
    cd.ensure_invertible()?;
    let pool = match limits.threads {
        Some(n) => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| AlgoError::PreconditionFailed(e.to_string()))?,
        ),
        None => None,
    };
    let cache = KernelCache::<C>::new();
    let mut levels: BTreeMap<u32, HashMap<AVector, Pending<C>>> = BTreeMap::new();
    levels.entry(0).or_default().insert(
        AVector::zero(),
        Pending {
            y: head.clone(),
            sj: vec![C::zero(); cd.n],
        },
    );
    let mut out = Expansion {
        head: head.clone(),
        terms: BTreeMap::new(),
        truncated_at: None,
        other_dominant: Vec::new(),
        gauge_adjusted: Vec::new(),
    };
    while let Some((h, level)) = levels.pop_first() {
        let mut entries: Vec<(AVector, Pending<C>)> = level.into_iter().collect();
        entries.sort_by(|a, b| (&a.1.y, &a.0).cmp(&(&b.1.y, &b.0)));
        let run = || {
            entries
                .par_iter()
                .map(|(v, p)| step(cd, head, &cache, twisted, v, p))
                .collect::<Vec<_>>()
        };
        let outcomes = match &pool {
            Some(pool) => pool.install(run),
            None => run(),
        };
        for o in outcomes {
            let o = o?;
            if o.other_dominant {
                out.other_dominant.push(o.y.clone());
            }
            if o.gauge_adjusted {
                out.gauge_adjusted.push(o.y.clone());
            }
            for (v2, y2, j, c) in o.pushes {
                let h2 = v2.height();
                debug_assert!(h2 > h);
                if limits.max_height.is_some_and(|mh| h2 > mh) {
                    out.truncated_at = limits.max_height;
                    continue;
                }
                let slot = levels
                    .entry(h2)
                    .or_default()
                    .entry(v2)
                    .or_insert_with(|| Pending {
                        y: y2,
                        sj: vec![C::zero(); cd.n],
                    });
                slot.sj[j].add_to(&c);
            }
            if !o.s.is_zero() {
                out.terms.insert(o.v, (o.y, o.s));
                if let Some(max) = limits.max_terms {
                    if out.terms.len() > max {
                        return Err(AlgoError::BudgetExceeded { limit: max });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// The character `F(head)` with integer coefficients.
pub fn classical_algorithm(
    cd: &CartanData,
    head: &Monomial,
    limits: &Limits,
) -> Result<Expansion<i64>, AlgoError> {
    expand(cd, head, limits, false)
}

/// `F(Y_{i,l})`, with the unique-dominant and dominance contracts checked.
pub fn fundamental_qcharacter(
    cd: &CartanData,
    i: usize,
    l: i32,
    limits: &Limits,
) -> Result<Character<i64>, AlgoError> {
    cd.check_node(i)?;
    let head = Monomial::y(i, l);
    let exp = classical_algorithm(cd, &head, limits)?;
    if let Some(m) = exp.other_dominant.first() {
        return Err(AlgoError::PreconditionFailed(format!(
            "second dominant monomial {m} in a fundamental character"
        )));
    }
    for (v, (y, _)) in &exp.terms {
        if !v.is_zero() && is_dominant_all(y) {
            return Err(AlgoError::PreconditionFailed(format!(
                "second dominant monomial {y} in a fundamental character"
            )));
        }
        if !cd.family.is_affine() && dominance_compare(cd, y, &head).as_ref() != Some(v) {
            return Err(AlgoError::IncomparableTerm(y.clone()));
        }
    }
    Ok(exp.character())
}

/// Product of fundamental characters, one per `(node, shift)` factor.
pub fn standard_qcharacter(
    cd: &CartanData,
    factors: &[(usize, i32)],
    limits: &Limits,
) -> Result<Character<i64>, AlgoError> {
    let mut memo: HashMap<(usize, i32), Character<i64>> = HashMap::new();
    let mut out = Character::unit();
    for &(i, l) in factors {
        let f = match memo.entry((i, l)) {
            std::collections::hash_map::Entry::Occupied(e) => e.into_mut(),
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(fundamental_qcharacter(cd, i, l, limits)?)
            }
        };
        let truncated = out.truncated_at.or(f.truncated_at);
        out = out.multiply(f);
        out.truncated_at = truncated;
    }
    Ok(out)
}

fn sub_head(m: &Monomial, j: &[usize]) -> Monomial {
    let t = truncate(m, j);
    Monomial::from_exps(
        t.iter()
            .map(|(i, l, e)| (j.iter().position(|&x| x == i).unwrap(), l, e)),
    )
}

fn require_finite_subdiagram(cd: &CartanData, j: &[usize]) -> Result<(), AlgoError> {
    for &i in j {
        cd.check_node(i)?;
    }
    if cd.is_finite_type(j) {
        Ok(())
    } else {
        Err(crate::error::CartanError::NotFiniteType(j.iter().map(|i| i + 1).collect()).into())
    }
}

/// The subdiagram expansion of `m^{(J)}`, mapped back onto `m` through
/// the full-diagram A-monomials. Returns the terms and whether the run met
/// another dominant monomial.
fn subdiagram_kernel(
    cd: &CartanData,
    m: &Monomial,
    j: &[usize],
    limits: &Limits,
) -> Result<(Vec<(AVector, Monomial, i64)>, bool), AlgoError> {
    let sub = cd.restrict(j);
    let exp = classical_algorithm(&sub, &sub_head(m, j), limits)?;
    let terms = exp
        .terms
        .iter()
        .map(|(v, (_, c))| {
            let full = v.relabel(j);
            let y = m.mul(&full.y_part(cd));
            (full, y, *c)
        })
        .collect();
    Ok((terms, !exp.other_dominant.is_empty()))
}

/// `L_J(m)` through the subdiagram run on `m^{(J)}`.
pub fn restrict_l_j(
    cd: &CartanData,
    m: &Monomial,
    j: &[usize],
    limits: &Limits,
) -> Result<Character<i64>, AlgoError> {
    require_finite_subdiagram(cd, j)?;
    if !is_dominant(m, j) {
        return Err(AlgoError::NotDominant {
            monomial: m.clone(),
            nodes: j.iter().map(|i| i + 1).collect(),
        });
    }
    let (terms, met_other) = subdiagram_kernel(cd, m, j, limits)?;
    if met_other {
        return Err(AlgoError::PreconditionFailed(format!(
            "the subdiagram run on {} meets another dominant monomial, so it need not be simple",
            sub_head(m, j)
        )));
    }
    Ok(Character::from_terms(terms.into_iter().map(|(_, y, c)| (y, c))).with_head(m.clone()))
}

/// The term that every other term lies below, if there is one.
pub fn infer_head<C: Coeff>(cd: &CartanData, ch: &Character<C>) -> Option<Monomial> {
    ch.terms
        .keys()
        .filter(|m| is_dominant_all(m))
        .find(|h| {
            ch.terms
                .keys()
                .all(|m| dominance_compare(cd, m, h).is_some())
        })
        .cloned()
}

/// Greedy decomposition into kernel elements of the subdiagram `J`:
/// `ch = sum c * F_J(m')`. Fails unless the residual reaches zero.
pub fn kernel_decompose(
    cd: &CartanData,
    ch: &Character<i64>,
    j: &[usize],
) -> Result<Vec<(Monomial, i64)>, AlgoError> {
    require_finite_subdiagram(cd, j)?;
    let head = match &ch.head {
        Some(h) => h.clone(),
        None => infer_head(cd, ch).ok_or_else(|| {
            AlgoError::PreconditionFailed("no term dominates the character".into())
        })?,
    };
    let mut heights: HashMap<Monomial, u32> = HashMap::new();
    let mut height_of = |m: &Monomial| -> Result<u32, AlgoError> {
        if let Some(&h) = heights.get(m) {
            return Ok(h);
        }
        let h = dominance_compare(cd, m, &head)
            .ok_or_else(|| AlgoError::IncomparableTerm(m.clone()))?
            .height();
        heights.insert(m.clone(), h);
        Ok(h)
    };
    let cache = KernelCache::<i64>::new();
    let mut residual = ch.terms.clone();
    let mut out = Vec::new();
    loop {
        let mut best: Option<(u32, Monomial, i64)> = None;
        for (m, &c) in &residual {
            if !is_dominant(m, j) {
                continue;
            }
            let h = height_of(m)?;
            if best.as_ref().is_none_or(|b| (h, m) < (b.0, &b.1)) {
                best = Some((h, m.clone(), c));
            }
        }
        let Some((_, m, c)) = best else { break };
        let kernel = if j.len() == 1 {
            kernel_terms(&cache, cd, j[0], &m, false)
                .into_iter()
                .map(|(_, y, k)| (y, k))
                .collect::<Vec<_>>()
        } else {
            subdiagram_kernel(cd, &m, j, &Limits::default())?
                .0
                .into_iter()
                .map(|(_, y, k)| (y, k))
                .collect()
        };
        for (y, k) in kernel {
            let slot = residual.entry(y.clone()).or_insert(0);
            *slot -= c * k;
            if *slot == 0 {
                residual.remove(&y);
            }
        }
        out.push((m, c));
    }
    if let Some((w, _)) = residual.iter().next() {
        return Err(AlgoError::NonzeroResidue {
            remaining: residual.len(),
            witness: w.clone(),
        });
    }
    Ok(out)
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
    fn sl2_fundamental() {
        let ch = fundamental_qcharacter(&cd("A1"), 0, 0, &Limits::default()).unwrap();
        assert_eq!(
            ch.terms,
            Character::from_terms([(m("Y_{1,0}"), 1), (m("Y^{-1}_{1,2}"), 1)]).terms
        );
    }

    #[test]
    fn a2_fundamental() {
        let ch = fundamental_qcharacter(&cd("A2"), 0, 0, &Limits::default()).unwrap();
        let want = Character::from_terms([
            (m("Y_{1,0}"), 1),
            (m("Y^{-1}_{1,2}Y_{2,1}"), 1),
            (m("Y^{-1}_{2,3}"), 1),
        ]);
        assert_eq!(ch.terms, want.terms);
    }

    #[test]
    fn standard_products() {
        let a1 = cd("A1");
        let s = standard_qcharacter(&a1, &[(0, 0), (0, 2)], &Limits::default()).unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(s.coeff(&Monomial::one()), 1);
        assert_eq!(
            standard_qcharacter(&a1, &[], &Limits::default())
                .unwrap()
                .terms,
            Character::<i64>::unit().terms
        );
        let dec = kernel_decompose(&a1, &s, &[0]).unwrap();
        assert_eq!(dec, vec![(m("Y_{1,0}Y_{1,2}"), 1), (Monomial::one(), 1)]);
    }

    #[test]
    fn restriction_to_a2_in_f4() {
        let f4 = cd("F4");
        let ch = restrict_l_j(&f4, &m("Y_{1,0}"), &[0, 1], &Limits::default()).unwrap();
        assert_eq!(ch.len(), 3);
        let a2 = fundamental_qcharacter(&cd("A2"), 0, 0, &Limits::default()).unwrap();
        let vs = a2.vectors(&cd("A2")).unwrap();
        for v in vs.values() {
            assert!(ch.terms.contains_key(&m("Y_{1,0}").mul(&v.y_part(&f4))));
        }
    }

    #[test]
    fn affine_requires_height() {
        let a = cd("A2~");
        assert!(matches!(
            classical_algorithm(&a, &m("Y_{1,0}"), &Limits::default()),
            Err(AlgoError::HeightLimitRequired)
        ));
        let ex = classical_algorithm(&a, &m("Y_{1,0}"), &Limits::height(4)).unwrap();
        assert_eq!(ex.truncated_at, Some(4));
    }

    #[test]
    fn budget() {
        let r = classical_algorithm(
            &cd("F4"),
            &m("Y_{3,0}"),
            &Limits {
                max_terms: Some(10),
                ..Limits::default()
            },
        );
        assert!(matches!(r, Err(AlgoError::BudgetExceeded { limit: 10 })));
    }
}
