//! Randomized invariants over small quadratic monomial rings.

use proptest::prelude::*;

use quadres::field::Scalar;
use quadres::homology::{complex_prefix, exactness_report};
use quadres::{Diagram, Field, FreeComplex, Monomial, RingElement, RingSpec};

fn pairs(n: usize) -> Vec<(usize, usize)> {
    (1..=n).flat_map(|i| (i..=n).map(move |j| (i, j))).collect()
}

/// A nonempty set of quadratic monomials on 1..=4 variables plus a valid initial label.
fn spec_and_initial() -> impl Strategy<Value = (RingSpec, usize)> {
    (1usize..=4)
        .prop_flat_map(|n| {
            let all = pairs(n);
            let len = all.len();
            (Just(n), proptest::sample::subsequence(all, 1..=len))
        })
        .prop_flat_map(|(n, gens)| {
            let spec = RingSpec::normalize(&gens, n).unwrap();
            let labels: Vec<usize> = (1..=n).filter(|&i| spec.is_factor(i)).collect();
            (Just(spec), proptest::sample::select(labels))
        })
}

fn element(spec: &RingSpec, field: Field, coeffs: &[i64]) -> RingElement {
    let basis: Vec<Monomial> = (0..=2).flat_map(|d| spec.enumerate_basis(d)).collect();
    basis.into_iter().zip(coeffs).fold(RingElement::zero(field), |acc, (m, &c)| {
        acc.add(&RingElement::monomial(spec, field, m, Scalar::from_i64(field, c))).unwrap()
    })
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// All exponent vectors of degree d, filtered by divisibility. Independent of the pruned recursion.
fn brute_basis(spec: &RingSpec, d: u32) -> Vec<Vec<u32>> {
    let n = spec.num_vars();
    let mut all = vec![vec![]];
    for _ in 0..n {
        all = all
            .into_iter()
            .flat_map(|v: Vec<u32>| (0..=d).map(move |e| [v.clone(), vec![e]].concat()))
            .collect();
    }
    let total: Vec<Vec<u32>> = all.into_iter().filter(|v| v.iter().sum::<u32>() == d).collect();
    assert_eq!(total.len(), binomial(n + d as usize - 1, d as usize));
    total
        .into_iter()
        .filter(|v| {
            !spec.generators().iter().any(|&(i, j)| {
                if i == j {
                    v[i - 1] >= 2
                } else {
                    v[i - 1] >= 1 && v[j - 1] >= 1
                }
            })
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn every_build_is_a_chain_complex((spec, initial) in spec_and_initial(), levels in 1usize..=8) {
        let d = Diagram::build(&spec, initial, levels).unwrap();
        d.check_invariants().unwrap();
        let c = FreeComplex::from_diagram(&d);
        prop_assert!(c.verify_all().is_ok());
        prop_assert_eq!(c.levels(), levels);
    }

    #[test]
    fn longer_builds_extend_shorter_ones((spec, initial) in spec_and_initial(), levels in 2usize..=6) {
        let long = FreeComplex::from_diagram(&Diagram::build(&spec, initial, levels).unwrap());
        let short = FreeComplex::from_diagram(&Diagram::build(&spec, initial, levels - 1).unwrap());
        prop_assert_eq!(complex_prefix(&long, levels - 1), short);
    }

    #[test]
    fn graded_ranks_fit_inside_each_piece((spec, initial) in spec_and_initial()) {
        let c = FreeComplex::from_diagram(&Diagram::build(&spec, initial, 4).unwrap());
        let r = exactness_report(&c, 6, Field::default());
        for row in &r.rows {
            prop_assert!(row.rank_dn + row.rank_dn1 <= row.dim_domain);
        }
    }

    #[test]
    fn rational_and_modular_homology_agree((spec, initial) in spec_and_initial()) {
        let c = FreeComplex::from_diagram(&Diagram::build(&spec, initial, 5).unwrap());
        let q = exactness_report(&c, 7, Field::Rational);
        let p = exactness_report(&c, 7, Field::default());
        prop_assert_eq!(q.rows, p.rows);
    }

    #[test]
    fn json_round_trip_is_byte_stable((spec, initial) in spec_and_initial(), levels in 1usize..=5) {
        let d = Diagram::build(&spec, initial, levels).unwrap();
        let text = d.to_json();
        prop_assert_eq!(Diagram::from_json(&text).unwrap().to_json(), text);
        let c = FreeComplex::from_diagram(&d);
        let text = c.to_json();
        prop_assert_eq!(FreeComplex::from_json(&spec, &text).unwrap().to_json(), text.clone());
        let dual = c.dualize();
        prop_assert_eq!(dual.dualize(), c);
        prop_assert_eq!(FreeComplex::from_json(&spec, &dual.to_json()).unwrap(), dual);
    }

    #[test]
    fn basis_matches_brute_force((spec, _) in spec_and_initial(), d in 0u32..=5) {
        let fast: Vec<Vec<u32>> = spec.enumerate_basis(d as usize).into_iter().map(|m| m.0).collect();
        let mut slow = brute_basis(&spec, d);
        let mut sorted = fast.clone();
        sorted.sort();
        slow.sort();
        prop_assert_eq!(sorted, slow);
    }

    #[test]
    fn multiplication_is_associative_and_commutative(
        (spec, _) in spec_and_initial(),
        a in proptest::collection::vec(-3i64..=3, 15),
        b in proptest::collection::vec(-3i64..=3, 15),
        c in proptest::collection::vec(-3i64..=3, 15),
    ) {
        for field in [Field::Rational, Field::Prime(7)] {
            let (a, b, c) = (element(&spec, field, &a), element(&spec, field, &b), element(&spec, field, &c));
            let mul = |x: &RingElement, y: &RingElement| RingElement::multiply(&spec, x, y).unwrap();
            prop_assert_eq!(mul(&mul(&a, &b), &c), mul(&a, &mul(&b, &c)));
            prop_assert_eq!(mul(&a, &b), mul(&b, &a));
            let distributed = mul(&a, &b).add(&mul(&a, &c)).unwrap();
            prop_assert_eq!(mul(&a, &b.add(&c).unwrap()), distributed);
        }
    }
}
