//! Independent oracles: hand expansions and classical dimension formulas.

use std::collections::BTreeSet;

use qchar::checks::{check_shift_lattice, Verdict};
use qchar::fm::kernel_decompose;
use qchar::{
    build_cartan, classical_algorithm, fundamental_qcharacter, standard_qcharacter, CartanData,
    Family, Limits, Monomial,
};

fn cd(f: Family) -> CartanData {
    build_cartan(f).unwrap()
}

fn m(s: &str) -> Monomial {
    Monomial::parse_braced(s).unwrap()
}

fn support(f: Family, i: usize) -> BTreeSet<Monomial> {
    fundamental_qcharacter(&cd(f), i, 0, &Limits::default())
        .unwrap()
        .terms
        .into_keys()
        .collect()
}

fn binom(n: i64, k: i64) -> i64 {
    if k < 0 || k > n {
        return 0;
    }
    (0..k).fold(1, |acc, j| acc * (n - j) / (j + 1))
}

fn dims(f: Family) -> Vec<i64> {
    let c = cd(f);
    (0..c.n)
        .map(|i| {
            fundamental_qcharacter(&c, i, 0, &Limits::default())
                .unwrap()
                .dimension()
        })
        .collect()
}

#[test]
fn hand_expansions() {
    let sl2: BTreeSet<_> = ["Y_{1,0}", "Y^{-1}_{1,2}"].map(m).into();
    assert_eq!(support(Family::A(1), 0), sl2);
    let a2: BTreeSet<_> = ["Y_{1,0}", "Y^{-1}_{1,2}Y_{2,1}", "Y^{-1}_{2,3}"]
        .map(m)
        .into();
    assert_eq!(support(Family::A(2), 0), a2);
    // Short node of B2: each step lowers by the only available A^{-1}.
    let b2: BTreeSet<_> = [
        "Y_{2,0}",
        "Y_{1,1}Y^{-1}_{2,2}",
        "Y^{-1}_{1,5}Y_{2,4}",
        "Y^{-1}_{2,6}",
    ]
    .map(m)
    .into();
    assert_eq!(support(Family::B(2), 1), b2);
}

#[test]
fn type_a_dimensions_are_binomials() {
    for n in 1..=6 {
        let want: Vec<i64> = (1..=n).map(|i| binom(n + 1, i)).collect();
        assert_eq!(dims(Family::A(n as usize)), want, "A{n}");
    }
}

#[test]
fn type_b_dimensions() {
    // Node i < n: sum of exterior powers of the vector representation
    // stepping down by two; last node: spin.
    for n in 2..=4i64 {
        let mut want: Vec<i64> = (1..n)
            .map(|i| (0..=i / 2).map(|k| binom(2 * n + 1, i - 2 * k)).sum())
            .collect();
        want.push(1 << n);
        assert_eq!(dims(Family::B(n as usize)), want, "B{n}");
    }
}

#[test]
fn type_c_dimensions() {
    // Primitive part of the i-th exterior power: binom(2n, i) - binom(2n, i-2).
    for n in 2..=4i64 {
        let want: Vec<i64> = (1..=n)
            .map(|i| binom(2 * n, i) - binom(2 * n, i - 2))
            .collect();
        assert_eq!(dims(Family::C(n as usize)), want, "C{n}");
    }
}

#[test]
fn exceptional_and_d4_dimensions() {
    // Adjoint plus trivial at the trivalent node; vector and half-spins elsewhere.
    assert_eq!(dims(Family::D(4)), vec![8, 29, 8, 8]);
    assert_eq!(dims(Family::G2), vec![15, 7]);
}

#[test]
fn d4_trivalent_coefficient_two() {
    let ch = fundamental_qcharacter(&cd(Family::D(4)), 1, 0, &Limits::default()).unwrap();
    let twos: Vec<_> = ch.terms.iter().filter(|(_, &c)| c != 1).collect();
    assert_eq!(twos, vec![(&m("Y_{2,2}Y^{-1}_{2,4}"), &2)]);
}

#[test]
fn printed_entry_1349_is_not_a_term() {
    let f4 = cd(Family::F4);
    let ch = fundamental_qcharacter(&f4, 2, 1, &Limits::default()).unwrap();
    let printed = m("Y^{-1}_{1,10}Y^{-1}_{1,12}Y_{2,9}Y_{2,11}Y^{-1}_{2,15}");
    let corrected = m("Y^{-1}_{2,10}Y^{-1}_{2,12}Y_{3,9}Y_{3,11}Y^{-1}_{3,15}");
    assert_eq!(ch.coeff(&printed), 0);
    assert_eq!(ch.coeff(&corrected), 2);
    let mut with_printed = ch.clone();
    with_printed.add_term(printed, &1);
    assert_eq!(
        check_shift_lattice(&f4, &with_printed).verdict,
        Verdict::Fail
    );
}

#[test]
fn standard_support_contains_simple_support() {
    for (f, heads) in [
        (
            Family::A(1),
            vec![
                vec![(0, 0), (0, 2)],
                vec![(0, 0), (0, 4)],
                vec![(0, 0), (0, 0)],
                vec![(0, 0), (0, 2), (0, 4)],
            ],
        ),
        (
            Family::A(2),
            vec![
                vec![(0, 0), (1, 1)],
                vec![(0, 0), (1, 3)],
                vec![(0, 0), (0, 2)],
                vec![(1, 0), (0, 1), (1, 2)],
            ],
        ),
    ] {
        let c = cd(f);
        for factors in heads {
            let head = Monomial::from_exps(factors.iter().map(|&(i, l)| (i, l, 1)));
            let simple = classical_algorithm(&c, &head, &Limits::default())
                .unwrap()
                .character();
            let standard = standard_qcharacter(&c, &factors, &Limits::default()).unwrap();
            for (mono, coeff) in &simple.terms {
                assert!(
                    standard.coeff(mono) >= *coeff,
                    "{mono} missing from the product for {head}"
                );
            }
        }
    }
}

#[test]
fn kernel_decomposition_of_f4_node_one_at_node_four() {
    let f4 = cd(Family::F4);
    let ch = fundamental_qcharacter(&f4, 0, 0, &Limits::default()).unwrap();
    let parts = kernel_decompose(&f4, &ch, &[3]).unwrap();
    assert!(!parts.is_empty());
    assert!(parts.iter().all(|p| p.1 >= 0));
    assert_eq!(parts.iter().filter(|p| p.0 == Monomial::y(0, 0)).count(), 1);
}
