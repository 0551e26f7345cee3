//! Known rings: rank sequences, H_0, Ext, and the kernel-splitting identity, each
//! checked against a computation that does not go through the library's rank code.

use quadres::ext::{find_vv_patterns, injective_dimension_evidence};
use quadres::homology::{exactness_report, h0_check, kernel_dim};
use quadres::oracles::{compare, oracle_complex, OracleKind};
use quadres::{Diagram, Field, FreeComplex, RingSpec};

fn ex31() -> RingSpec {
    OracleKind::Fibonacci.spec()
}

fn ex32() -> RingSpec {
    OracleKind::Binary.spec()
}

fn fixtures() -> Vec<(&'static str, RingSpec, usize)> {
    vec![
        ("ex31", ex31(), 8),
        ("ex32", ex32(), 8),
        ("o2", OracleKind::OFamily(2).spec(), 7),
        ("o3", OracleKind::OFamily(3).spec(), 7),
        ("o4", OracleKind::OFamily(4).spec(), 7),
    ]
}

fn built(spec: &RingSpec, levels: usize) -> FreeComplex {
    FreeComplex::from_diagram(&Diagram::build(spec, 1, levels).unwrap())
}

#[test]
fn fibonacci_free_ranks() {
    let ranks = built(&ex31(), 10).ranks().to_vec();
    assert_eq!(ranks, [1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89]);
    for n in 2..ranks.len() {
        assert_eq!(ranks[n], ranks[n - 1] + ranks[n - 2]);
    }
}

#[test]
fn doubling_free_ranks() {
    let ranks = built(&ex32(), 10).ranks().to_vec();
    assert_eq!(&ranks[..6], &[1, 1, 2, 4, 8, 16]);
    for n in 2..ranks.len() {
        assert_eq!(ranks[n], 2 * ranks[n - 1]);
    }
}

/// Level sizes of the O(n) diagram from counting children: an `x_1` vertex has `n`
/// children (one of them reached by `x_1`), any other has `n - 1` (one reached by `x_1`).
fn o_family_counts(n: usize, levels: usize) -> Vec<usize> {
    let (mut a, mut b) = (1usize, 0usize);
    let mut out = vec![1, 1];
    for _ in 2..=levels {
        (a, b) = (a + b, (n - 1) * a + (n - 2) * b);
        out.push(a + b);
    }
    out
}

#[test]
fn o_family_ranks_follow_child_counts() {
    assert_eq!(o_family_counts(3, 3), [1, 1, 3, 7]);
    for n in 2..=5 {
        assert_eq!(built(&OracleKind::OFamily(n).spec(), 7).ranks(), o_family_counts(n, 7).as_slice(), "O({n})");
    }
}

#[test]
fn fixtures_are_exact_over_both_fields() {
    for (name, spec, levels) in fixtures() {
        let c = built(&spec, levels);
        for field in [Field::default(), Field::Rational] {
            let r = exactness_report(&c, levels + 4, field);
            assert!(r.consistent, "{name} over {field}: {:?}", r.defects());
        }
    }
}

#[test]
fn h0_is_the_quotient_by_x1() {
    for (name, spec, levels) in fixtures() {
        let h = h0_check(&built(&spec, levels), 12, Field::default()).unwrap();
        assert!(h.matches, "{name}: {:?} vs {:?}", h.observed, h.expected);
    }
    // R/(x1) for the first ring is k[x2, x3]
    let h = h0_check(&built(&ex31(), 2), 5, Field::default()).unwrap();
    assert_eq!(h.expected, [1, 2, 3, 4, 5, 6]);
}

#[test]
fn oracles_agree_with_construction() {
    let cases = [
        (OracleKind::Fibonacci, 8),
        (OracleKind::Binary, 8),
        (OracleKind::OFamily(3), 6),
        (OracleKind::OFamily(4), 6),
    ];
    for (kind, levels) in cases {
        let c = compare(&built(&kind.spec(), levels), &oracle_complex(kind, levels).unwrap(), levels + 4, Field::default());
        assert!(c.equal, "{kind}: {c:?}");
    }
}

#[test]
fn oracles_are_exact() {
    for kind in [OracleKind::Fibonacci, OracleKind::Binary, OracleKind::OFamily(2), OracleKind::OFamily(3)] {
        let r = exactness_report(&oracle_complex(kind, 7).unwrap(), 11, Field::default());
        assert!(r.consistent, "{kind}");
    }
}

/// Kernel of multiplication by x_i on monomials of degree t-1: those m with x_i m in I.
fn monomial_kernel(spec: &RingSpec, i: usize, t: i64) -> usize {
    if t < 1 {
        return 0;
    }
    spec.enumerate_basis(t as usize - 1)
        .into_iter()
        .filter(|m| !m.mul_var(i).is_admissible(spec))
        .count()
}

#[test]
fn kernel_splits_over_killing_pairs() {
    for (name, spec, _) in fixtures() {
        for &(i, j) in spec.generators().iter().filter(|(i, j)| i != j) {
            for t in 0..=10 {
                let f = Field::default();
                let single_i = kernel_dim(&spec, &[i], t, f);
                let single_j = kernel_dim(&spec, &[j], t, f);
                assert_eq!(single_i, monomial_kernel(&spec, i, t));
                assert_eq!(single_j, monomial_kernel(&spec, j, t));
                assert_eq!(kernel_dim(&spec, &[i, j], t, f), single_i + single_j, "{name} x{i}x{j} t={t}");
            }
        }
    }
}

/// Ext^1 for the ring with all quadrics, by listing every element of R over F_3.
/// With basis {1, x1, x2}, H^1 = ker(r -> (x1 r, x2 r)) / (x1 R).
#[test]
fn ext1_of_all_quadrics_by_enumeration() {
    // r = a + b x1 + c x2: x1 r = a x1, x2 r = a x2
    let elements: Vec<[u8; 3]> =
        (0..27u8).map(|k| [k % 3, (k / 3) % 3, k / 9]).collect();
    let kernel = elements.iter().filter(|r| r[0] == 0).count();
    let image: std::collections::BTreeSet<[u8; 3]> = elements.iter().map(|r| [0, r[0], 0]).collect();
    let dim = ((kernel / image.len()) as f64).log(3.0).round() as usize;
    assert_eq!(dim, 1);

    let dual = built(&ex32(), 4).dualize();
    let total: usize = (-1..=2).map(|u| quadres::ext::cohomology_dims(&dual, 1, u, Field::Prime(3))).sum();
    assert_eq!(total, dim);
    assert_eq!(quadres::ext::cohomology_dims(&dual, 1, 0, Field::Prime(3)), 1);
}

#[test]
fn ext_is_nonzero_in_many_positions() {
    for (name, spec) in [("ex31", ex31()), ("ex32", ex32()), ("o3", OracleKind::OFamily(3).spec())] {
        let r = injective_dimension_evidence(&spec, 1, 8, 12, Field::default()).unwrap();
        let low: Vec<usize> = r.nonzero_ext_positions.iter().copied().filter(|&p| p <= 7).collect();
        assert!(low.len() >= 4, "{name}: {low:?}");
    }
    let r = injective_dimension_evidence(&ex32(), 1, 8, 12, Field::default()).unwrap();
    assert_eq!(r.nonzero_ext_positions, (1..=7).collect::<Vec<_>>());
}

#[test]
fn first_ring_has_no_strict_vv_configuration() {
    // the x2 child of an x1 vertex always receives a diamond arrow labeled x3, and x2x3 is not in I
    assert!(find_vv_patterns(&Diagram::build(&ex31(), 1, 9).unwrap()).is_empty());
    let r = injective_dimension_evidence(&ex31(), 1, 9, 13, Field::default()).unwrap();
    assert_eq!(r.nonzero_ext_positions, [3, 5, 6, 7, 8]);
}

#[test]
fn vv_positions_only_grow_with_levels() {
    for spec in [ex31(), ex32(), OracleKind::OFamily(3).spec()] {
        let mut previous: Vec<usize> = Vec::new();
        for levels in 2..=8 {
            let mut now: Vec<usize> =
                find_vv_patterns(&Diagram::build(&spec, 1, levels).unwrap()).iter().map(|o| o.position).collect();
            now.dedup();
            assert!(previous.iter().all(|p| now.contains(p)), "{previous:?} -> {now:?}");
            previous = now;
        }
    }
}

#[test]
fn dual_of_dual_has_the_same_homology() {
    for (name, spec, levels) in fixtures() {
        let c = built(&spec, levels.min(6));
        let back = c.dualize().dualize();
        assert_eq!(
            exactness_report(&c, 8, Field::default()).rows,
            exactness_report(&back, 8, Field::default()).rows,
            "{name}"
        );
    }
}
