//! The t-deformed layer: the twisted product `*_t` on (monomial, A-vector)
//! pairs, the t-deformed algorithm and q,t-characters of standard modules.

use std::collections::BTreeMap;

use crate::cartan::CartanData;
use crate::character::Character;
use crate::error::AlgoError;
use crate::fm::{expand, Limits};
use crate::laurent::TPoly;
use crate::monomial::{is_node_dominant, AVector, Monomial, TrackedMonomial};
use crate::sl2::{kernel_terms, KernelCache};

/// A pair term: Y-monomial and A-vector below the head.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairKey {
    pub y: Monomial,
    pub v: AVector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TCharacter {
    pub head: Monomial,
    pub terms: BTreeMap<PairKey, TPoly>,
    pub truncated_at: Option<u32>,
    /// Monomials accepted by the algorithm only up to a power of `t`.
    pub gauge_adjusted: Vec<Monomial>,
}

impl TCharacter {
    pub fn unit() -> Self {
        TCharacter::singleton(Monomial::one())
    }

    pub fn singleton(head: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(
            PairKey {
                y: head.clone(),
                v: AVector::zero(),
            },
            TPoly::one(),
        );
        TCharacter {
            head,
            terms,
            truncated_at: None,
            gauge_adjusted: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, y: &Monomial) -> TPoly {
        let mut c = TPoly::zero();
        for (k, p) in &self.terms {
            if &k.y == y {
                c += p;
            }
        }
        c
    }

    /// Pair terms merged by Y-monomial, keeping `t`.
    pub fn y_view(&self) -> Character<TPoly> {
        let mut ch = Character::zero();
        for (k, p) in &self.terms {
            ch.add_term(k.y.clone(), p);
        }
        ch.head = Some(self.head.clone());
        ch.truncated_at = self.truncated_at;
        ch
    }

    /// Y-monomials carried by more than one A-vector.
    pub fn repeated_monomials(&self) -> Vec<Monomial> {
        let mut seen: BTreeMap<&Monomial, usize> = BTreeMap::new();
        for k in self.terms.keys() {
            *seen.entry(&k.y).or_insert(0) += 1;
        }
        seen.into_iter()
            .filter(|(_, n)| *n > 1)
            .map(|(m, _)| m.clone())
            .collect()
    }

    pub fn to_text(&self) -> String {
        self.y_view().to_text()
    }
}

/// The exponent `D` of `(m, v) *_t (m', v')`, where `m`, `m'` are the heads
/// and `y = m A^{-v}`, `y' = m' A^{-v'}`.
pub fn star_t_exponent(cd: &CartanData, a: &TrackedMonomial, b: &TrackedMonomial) -> i32 {
    pair_exponent(cd, &a.head, &a.y, &a.v, &b.head, &b.y, &b.v)
}

fn pair_exponent(
    cd: &CartanData,
    ma: &Monomial,
    ya: &Monomial,
    va: &AVector,
    mb: &Monomial,
    yb: &Monomial,
    vb: &AVector,
) -> i32 {
    // 2 u(m) + u(v) = u(m) + u(y) since y = m A^{-v}.
    let mut d = 0;
    for (i, l, k) in vb.iter() {
        let s = l + cd.r[i];
        d += k as i32 * (ma.exp(i, s) + ya.exp(i, s));
    }
    for (i, l, k) in va.iter() {
        let s = l - cd.r[i];
        d += k as i32 * (mb.exp(i, s) + yb.exp(i, s));
    }
    d
}

/// Bilinear extension of `*_t`.
pub fn star_t(cd: &CartanData, a: &TCharacter, b: &TCharacter) -> TCharacter {
    let mut terms: BTreeMap<PairKey, TPoly> = BTreeMap::new();
    for (ka, ca) in &a.terms {
        for (kb, cb) in &b.terms {
            let d = pair_exponent(cd, &a.head, &ka.y, &ka.v, &b.head, &kb.y, &kb.v);
            let key = PairKey {
                y: ka.y.mul(&kb.y),
                v: ka.v.add(&kb.v),
            };
            let c = (ca * cb).shift(d);
            let slot = terms.entry(key.clone()).or_default();
            *slot += &c;
            if slot.is_zero() {
                terms.remove(&key);
            }
        }
    }
    TCharacter {
        head: a.head.mul(&b.head),
        terms,
        truncated_at: a.truncated_at.or(b.truncated_at),
        gauge_adjusted: Vec::new(),
    }
}

/// `F_{i,t}(m)`: the `*_t` product of the segment strings at node `i`,
/// minus the kernels of its other `i`-dominant terms.
pub fn f_it(cd: &CartanData, i: usize, m: &Monomial) -> Result<TCharacter, AlgoError> {
    cd.check_node(i)?;
    if !is_node_dominant(m, i) {
        return Err(AlgoError::NotDominant {
            monomial: m.clone(),
            nodes: vec![i + 1],
        });
    }
    let cache = KernelCache::<TPoly>::new();
    let terms = kernel_terms(&cache, cd, i, m, true)
        .into_iter()
        .map(|(v, y, c)| (PairKey { y, v }, c))
        .collect();
    Ok(TCharacter {
        head: m.clone(),
        terms,
        truncated_at: None,
        gauge_adjusted: Vec::new(),
    })
}

/// The t-deformed algorithm on a dominant head.
pub fn t_algorithm(
    cd: &CartanData,
    head: &Monomial,
    limits: &Limits,
) -> Result<TCharacter, AlgoError> {
    if !cd.t_algorithm_hypothesis() {
        return Err(AlgoError::PreconditionFailed(
            "some C_ij C_ji exceeds 3".into(),
        ));
    }
    let exp = expand::<TPoly>(cd, head, limits, true)?;
    let terms = exp
        .terms
        .into_iter()
        .map(|(v, (y, c))| (PairKey { y, v }, c))
        .collect();
    Ok(TCharacter {
        head: head.clone(),
        terms,
        truncated_at: exp.truncated_at,
        gauge_adjusted: exp.gauge_adjusted,
    })
}

pub fn qt_fundamental(
    cd: &CartanData,
    i: usize,
    l: i32,
    limits: &Limits,
) -> Result<TCharacter, AlgoError> {
    cd.check_node(i)?;
    t_algorithm(cd, &Monomial::y(i, l), limits)
}

/// Ordered `*_t` product of fundamentals by nondecreasing shift, then node.
pub fn qt_standard(
    cd: &CartanData,
    factors: &[(usize, i32)],
    limits: &Limits,
) -> Result<TCharacter, AlgoError> {
    let mut ordered = factors.to_vec();
    ordered.sort_by_key(|&(i, l)| (l, i));
    let mut memo: BTreeMap<(usize, i32), TCharacter> = BTreeMap::new();
    let mut out = TCharacter::unit();
    for (i, l) in ordered {
        let f = match memo.entry((i, l)) {
            std::collections::btree_map::Entry::Occupied(e) => e.into_mut(),
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(qt_fundamental(cd, i, l, limits)?)
            }
        };
        out = star_t(cd, &out, f);
    }
    Ok(out)
}

/// `t = 1`, merging pair terms with equal Y-monomial.
pub fn specialize_t1(tch: &TCharacter) -> Character<i64> {
    let mut ch = Character::zero();
    for (k, p) in &tch.terms {
        ch.add_term(k.y.clone(), &p.eval_one());
    }
    ch.head = Some(tch.head.clone());
    ch.truncated_at = tch.truncated_at;
    ch
}

pub fn bar_symmetrize(p: &TPoly) -> Option<TPoly> {
    p.bar_symmetrize()
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

    fn tp(s: &str) -> TPoly {
        TPoly::parse(s, 't').unwrap()
    }

    #[test]
    fn d_values() {
        let a1 = cd("A1");
        let top = TrackedMonomial::new(m("Y_{1,0}"));
        let low = crate::monomial::apply_a_inverse(&a1, &top, 0, 1);
        assert_eq!(star_t_exponent(&a1, &top, &top), 0);
        assert_eq!(star_t_exponent(&a1, &top, &low), 0);
        assert_eq!(star_t_exponent(&a1, &low, &top), 2);
        assert_eq!(star_t_exponent(&a1, &low, &low), 0);
    }

    #[test]
    fn square_of_sl2_fundamental() {
        let a1 = cd("A1");
        let f = f_it(&a1, 0, &m("Y_{1,0}")).unwrap();
        assert!(f.terms.values().all(TPoly::is_one));
        let sq = star_t(&a1, &f, &f);
        let coeffs: Vec<TPoly> = sq.terms.values().cloned().collect();
        assert_eq!(sq.coeff(&m("Y^2_{1,0}")), tp("1"));
        assert_eq!(sq.coeff(&m("Y_{1,0}Y^{-1}_{1,2}")), tp("(1+t^2)"));
        assert_eq!(sq.coeff(&m("Y^{-2}_{1,2}")), tp("1"));
        assert_eq!(coeffs.len(), 3);
        let f2 = f_it(&a1, 0, &m("Y^2_{1,0}")).unwrap();
        assert_eq!(f2.terms, sq.terms);
    }

    #[test]
    fn unit_and_singleton() {
        let a1 = cd("A1");
        let f = f_it(&a1, 0, &m("Y_{1,0}")).unwrap();
        assert_eq!(star_t(&a1, &TCharacter::unit(), &f).terms, f.terms);
        let a2 = cd("A2");
        assert_eq!(f_it(&a2, 0, &m("Y_{2,0}")).unwrap().len(), 1);
    }

    #[test]
    fn sl2_t_algorithm() {
        let a1 = cd("A1");
        let f = qt_fundamental(&a1, 0, 0, &Limits::default()).unwrap();
        assert_eq!(f.len(), 2);
        assert!(f.terms.values().all(TPoly::is_one));
    }

    #[test]
    fn sl2_standard() {
        let a1 = cd("A1");
        let s = qt_standard(&a1, &[(0, 2), (0, 0)], &Limits::default()).unwrap();
        assert_eq!(s.len(), 4);
        assert!(s.terms.values().all(TPoly::is_nonnegative));
    }
}
