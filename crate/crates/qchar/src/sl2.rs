//! Single-node calculus: 2-segments, string characters and the kernel
//! elements `F_i(m)`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use crate::cartan::CartanData;
use crate::character::{Character, Coeff};
use crate::error::AlgoError;
use crate::monomial::{is_node_dominant, AVector, Monomial};

/// Shifts `start, start + step, ..., start + step * (len - 1)` at one node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Segment {
    pub node: usize,
    pub start: i32,
    pub len: u32,
    pub step: i32,
    pub mult: u32,
}

impl Segment {
    pub fn end(&self) -> i32 {
        self.start + self.step * (self.len as i32 - 1)
    }

    pub fn residue(&self) -> i32 {
        self.start.rem_euclid(self.step)
    }

    pub fn shifts(&self) -> impl Iterator<Item = i32> + '_ {
        (0..self.len as i32).map(move |p| self.start + self.step * p)
    }

    pub fn contains(&self, other: &Segment) -> bool {
        self.residue() == other.residue() && self.start <= other.start && other.end() <= self.end()
    }

    /// The union is a segment properly containing both.
    pub fn special_position(&self, other: &Segment) -> bool {
        if self.residue() != other.residue() || self.step != other.step {
            return false;
        }
        let joined = self.start.max(other.start) <= self.end().min(other.end()) + self.step;
        joined && !self.contains(other) && !other.contains(self)
    }
}

/// Splits a multiset of shifts at node `i` into pairwise non-special
/// segments with step `2 r`; equal segments are merged with multiplicity.
pub fn segment_decompose(i: usize, shifts: &[(i32, u32)], r: i32) -> Vec<Segment> {
    let step = 2 * r;
    let mut mult: BTreeMap<i32, u32> = BTreeMap::new();
    for &(l, k) in shifts {
        if k > 0 {
            *mult.entry(l).or_insert(0) += k;
        }
    }
    let mut out: Vec<Segment> = Vec::new();
    while let Some((&s, _)) = mult.iter().next() {
        let mut len = 1;
        while mult.contains_key(&(s + step * len as i32)) {
            len += 1;
        }
        for p in 0..len as i32 {
            let key = s + step * p;
            let e = mult.get_mut(&key).unwrap();
            *e -= 1;
            if *e == 0 {
                mult.remove(&key);
            }
        }
        match out.iter_mut().find(|seg| seg.start == s && seg.len == len) {
            Some(seg) => seg.mult += 1,
            None => out.push(Segment {
                node: i,
                start: s,
                len,
                step,
                mult: 1,
            }),
        }
    }
    out.sort_by_key(|s| (s.residue(), s.start, s.len));
    out
}

/// Local A-vector at one node: sorted `(shift, count)`.
pub type LocalV = Vec<(i32, u32)>;

fn local_add(a: &LocalV, b: &LocalV) -> LocalV {
    let mut m: BTreeMap<i32, u32> = a.iter().copied().collect();
    for &(l, k) in b {
        *m.entry(l).or_insert(0) += k;
    }
    m.into_iter().collect()
}

/// Node exponents of `u * prod A^{-v}` restricted to the node itself.
fn local_apply(u: &BTreeMap<i32, i32>, v: &LocalV, r: i32) -> BTreeMap<i32, i32> {
    let mut out = u.clone();
    for &(l, k) in v {
        for s in [l - r, l + r] {
            let e = out.entry(s).or_insert(0);
            *e -= k as i32;
            if *e == 0 {
                out.remove(&s);
            }
        }
    }
    out
}

/// A-vectors of the string character of a multiplicity-one segment.
pub fn string_vectors(start: i32, len: u32, r: i32) -> Vec<LocalV> {
    let mut out = vec![Vec::new()];
    let mut cur: LocalV = Vec::new();
    for p in (0..len as i32).rev() {
        cur.insert(0, (start + 2 * r * p + r, 1));
        out.push(cur.clone());
    }
    out
}

/// Twist exponent of the `*_t` product of two single-node pairs.
fn local_d(
    ma: &BTreeMap<i32, i32>,
    ya: &BTreeMap<i32, i32>,
    va: &LocalV,
    mb: &BTreeMap<i32, i32>,
    yb: &BTreeMap<i32, i32>,
    vb: &LocalV,
    r: i32,
) -> i32 {
    let g = |m: &BTreeMap<i32, i32>, l: i32| m.get(&l).copied().unwrap_or(0);
    let mut d = 0;
    for &(l, k) in vb {
        d += k as i32 * (g(ma, l + r) + g(ya, l + r));
    }
    for &(l, k) in va {
        d += k as i32 * (g(mb, l - r) + g(yb, l - r));
    }
    d
}

type KernelKey = (i32, bool, Vec<(i32, i32)>);

/// Memo table for single-node kernels, keyed by `r` and the slice
/// translated to start at shift 0.
pub struct KernelCache<C: Coeff> {
    map: Mutex<HashMap<KernelKey, Arc<Vec<(LocalV, C)>>>>,
}

impl<C: Coeff> Default for KernelCache<C> {
    fn default() -> Self {
        KernelCache {
            map: Mutex::new(HashMap::new()),
        }
    }
}

impl<C: Coeff> KernelCache<C> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The kernel element with unique dominant term `u` on one node with
    /// symmetrizer `r`, as `(A-vector, coefficient)` pairs. With
    /// `twisted` the segment strings are multiplied with `*_t`.
    pub fn kernel(&self, u: &[(i32, i32)], r: i32, twisted: bool) -> Vec<(LocalV, C)> {
        if u.is_empty() {
            return vec![(Vec::new(), C::one())];
        }
        let base = u.iter().map(|x| x.0).min().unwrap();
        let key: KernelKey = (r, twisted, u.iter().map(|&(l, e)| (l - base, e)).collect());
        let cached = self.map.lock().unwrap().get(&key).cloned();
        let local = match cached {
            Some(k) => k,
            None => {
                let k = Arc::new(self.compute(&key.2, r, twisted));
                self.map.lock().unwrap().entry(key).or_insert(k).clone()
            }
        };
        local
            .iter()
            .map(|(v, c)| (v.iter().map(|&(l, k)| (l + base, k)).collect(), c.clone()))
            .collect()
    }

    fn compute(&self, u: &[(i32, i32)], r: i32, twisted: bool) -> Vec<(LocalV, C)> {
        let shifts: Vec<(i32, u32)> = u.iter().map(|&(l, e)| (l, e as u32)).collect();
        let segs = segment_decompose(0, &shifts, r);
        let mut head: BTreeMap<i32, i32> = BTreeMap::new();
        let mut prod: BTreeMap<LocalV, C> = BTreeMap::new();
        prod.insert(Vec::new(), C::one());
        for seg in &segs {
            for _ in 0..seg.mult {
                let sh: BTreeMap<i32, i32> = seg.shifts().map(|l| (l, 1)).collect();
                let mut next: BTreeMap<LocalV, C> = BTreeMap::new();
                for (va, ca) in &prod {
                    let ya = local_apply(&head, va, r);
                    for vb in string_vectors(seg.start, seg.len, r) {
                        let mut c = ca.clone();
                        if twisted {
                            let yb = local_apply(&sh, &vb, r);
                            c = c.twist(local_d(&head, &ya, va, &sh, &yb, &vb, r));
                        }
                        let key = local_add(va, &vb);
                        let slot = next.entry(key).or_insert_with(C::zero);
                        slot.add_to(&c);
                    }
                }
                next.retain(|_, c| !c.is_zero());
                prod = next;
                for (l, e) in &sh {
                    *head.entry(*l).or_insert(0) += e;
                }
            }
        }
        // Remove the other dominant terms, lowest first.
        let uu: BTreeMap<i32, i32> = u.iter().copied().collect();
        loop {
            let lowest = prod
                .iter()
                .filter(|(v, _)| !v.is_empty())
                .filter(|(v, _)| local_apply(&uu, v, r).values().all(|&e| e >= 0))
                .map(|(v, c)| (v.iter().map(|x| x.1).sum::<u32>(), v.clone(), c.clone()))
                .min_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
            let Some((_, v, c)) = lowest else { break };
            let sub_u: Vec<(i32, i32)> = local_apply(&uu, &v, r).into_iter().collect();
            for (w, cw) in self.kernel(&sub_u, r, twisted) {
                let key = local_add(&v, &w);
                let slot = prod.entry(key.clone()).or_insert_with(C::zero);
                slot.sub_from(&c.times(&cw));
                if slot.is_zero() {
                    prod.remove(&key);
                }
            }
        }
        prod.into_iter().collect()
    }
}

/// Full-diagram terms of `F_i(m)` as `(A-vector, monomial, coefficient)`.
pub fn kernel_terms<C: Coeff>(
    cache: &KernelCache<C>,
    cd: &CartanData,
    i: usize,
    m: &Monomial,
    twisted: bool,
) -> Vec<(AVector, Monomial, C)> {
    let slice = m.slice(i);
    cache
        .kernel(&slice, cd.r[i], twisted)
        .into_iter()
        .map(|(lv, c)| {
            let v = AVector::from_entries(lv.iter().map(|&(l, k)| (i, l, k)));
            let y = m.mul(&v.y_part(cd));
            (v, y, c)
        })
        .collect()
}

fn require_node_dominant(m: &Monomial, i: usize) -> Result<(), AlgoError> {
    if is_node_dominant(m, i) {
        Ok(())
    } else {
        Err(AlgoError::NotDominant {
            monomial: m.clone(),
            nodes: vec![i + 1],
        })
    }
}

/// String character of a multiplicity-one segment: the head and the
/// successive A-inverse descents, all coefficients 1.
pub fn string_character(cd: &CartanData, seg: &Segment) -> Character<i64> {
    let head = Monomial::from_exps(seg.shifts().map(|l| (seg.node, l, 1)));
    let mut ch = Character::zero();
    for lv in string_vectors(seg.start, seg.len, cd.r[seg.node]) {
        let v = AVector::from_entries(lv.iter().map(|&(l, k)| (seg.node, l, k)));
        ch.add_term(head.mul(&v.y_part(cd)), &1);
    }
    ch.with_head(head)
}

/// `F_i(m)`: the single-node kernel element whose only `i`-dominant term is `m`.
pub fn f_i(cd: &CartanData, i: usize, m: &Monomial) -> Result<Character<i64>, AlgoError> {
    cd.check_node(i)?;
    require_node_dominant(m, i)?;
    let cache = KernelCache::<i64>::new();
    let ch = Character::from_terms(
        kernel_terms(&cache, cd, i, m, false)
            .into_iter()
            .map(|(_, y, c)| (y, c)),
    );
    Ok(ch.with_head(m.clone()))
}

/// Support of `L_i(m)` as the product of the string lists.
pub fn l_i_monomials(
    cd: &CartanData,
    i: usize,
    m: &Monomial,
) -> Result<BTreeSet<Monomial>, AlgoError> {
    cd.check_node(i)?;
    require_node_dominant(m, i)?;
    let shifts: Vec<(i32, u32)> = m.slice(i).into_iter().map(|(l, e)| (l, e as u32)).collect();
    let mut prod: BTreeSet<AVector> = BTreeSet::from([AVector::zero()]);
    for seg in segment_decompose(i, &shifts, cd.r[i]) {
        let strings: Vec<AVector> = string_vectors(seg.start, seg.len, cd.r[i])
            .into_iter()
            .map(|lv| AVector::from_entries(lv.into_iter().map(|(l, k)| (i, l, k))))
            .collect();
        for _ in 0..seg.mult {
            prod = prod
                .iter()
                .flat_map(|a| strings.iter().map(move |b| a.add(b)))
                .collect();
        }
    }
    Ok(prod.into_iter().map(|v| m.mul(&v.y_part(cd))).collect())
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

    fn seg(start: i32, len: u32, mult: u32) -> Segment {
        Segment {
            node: 0,
            start,
            len,
            step: 2,
            mult,
        }
    }

    #[test]
    fn decompositions() {
        assert_eq!(
            segment_decompose(0, &[(0, 1), (2, 1), (4, 1)], 1),
            vec![seg(0, 3, 1)]
        );
        assert_eq!(
            segment_decompose(0, &[(0, 1), (2, 2), (4, 1)], 1),
            vec![seg(0, 3, 1), seg(2, 1, 1)]
        );
        assert_eq!(segment_decompose(0, &[(0, 2)], 1), vec![seg(0, 1, 2)]);
    }

    #[test]
    fn strings() {
        let a1 = cd("A1");
        let s0 = string_character(&a1, &seg(0, 1, 1));
        assert_eq!(
            s0.terms,
            Character::from_terms([(m("Y_{1,0}"), 1), (m("Y^{-1}_{1,2}"), 1)]).terms
        );
        let s02 = string_character(&a1, &seg(0, 2, 1));
        let want = Character::from_terms([
            (m("Y_{1,0}Y_{1,2}"), 1),
            (m("Y_{1,0}Y^{-1}_{1,4}"), 1),
            (m("Y^{-1}_{1,2}Y^{-1}_{1,4}"), 1),
        ]);
        assert_eq!(s02.terms, want.terms);
        let b3 = cd("B3");
        let s = string_character(
            &b3,
            &Segment {
                node: 2,
                start: 0,
                len: 1,
                step: 2,
                mult: 1,
            },
        );
        assert_eq!(
            s.terms,
            Character::from_terms([(m("Y_{3,0}"), 1), (m("Y^{-1}_{3,2}Y_{2,1}"), 1)]).terms
        );
    }

    #[test]
    fn f_i_examples() {
        let a1 = cd("A1");
        let f = f_i(&a1, 0, &m("Y_{1,0}")).unwrap();
        assert_eq!(
            f.terms,
            Character::from_terms([(m("Y_{1,0}"), 1), (m("Y^{-1}_{1,2}"), 1)]).terms
        );
        let f2 = f_i(&a1, 0, &m("Y^2_{1,0}")).unwrap();
        let want = Character::from_terms([
            (m("Y^2_{1,0}"), 1),
            (m("Y_{1,0}Y^{-1}_{1,2}"), 2),
            (m("Y^{-2}_{1,2}"), 1),
        ]);
        assert_eq!(f2.terms, want.terms);
        let a2 = cd("A2");
        let trivial = f_i(&a2, 0, &m("Y^{-1}_{2,3}")).unwrap();
        assert_eq!(trivial.len(), 1);
        assert!(f_i(&a1, 0, &m("Y^{-1}_{1,0}")).is_err());
    }

    #[test]
    fn nested_segments_have_unique_dominant_term() {
        let a1 = cd("A1");
        let head = m("Y_{1,0}Y^2_{1,2}Y_{1,4}");
        let f = f_i(&a1, 0, &head).unwrap();
        let doms: Vec<_> = f.j_dominant_terms(&[0]);
        assert_eq!(doms, vec![(head, 1)]);
    }
}
