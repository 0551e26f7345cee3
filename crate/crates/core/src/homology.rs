//! Graded linear algebra over the complexes: per-internal-degree pieces, ranks,
//! homology dimensions and exactness reports.
//!
//! Every differential has entries `±x_l`, so it is homogeneous once generators of
//! position `n` are placed in internal degree `gen_degrees[n]`. The piece of a
//! differential in internal degree `t` is a finite `{-1, 0, 1}` matrix between
//! `⊕ R_{t - deg}` blocks, and homology can be computed one degree at a time.

use std::collections::HashMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::{FreeComplex, Orientation};
use crate::field::Field;
use crate::linalg::{rank, IntMatrix};
use crate::ring::{Monomial, RingSpec};

/// Admissible monomial bases for degrees `0..=max_degree`, with reverse lookup.
#[derive(Debug, Clone)]
pub struct GradedBasis {
    bases: Vec<Vec<Monomial>>,
    index: Vec<HashMap<Monomial, usize>>,
}

impl GradedBasis {
    pub fn new(spec: &RingSpec, max_degree: usize) -> Self {
        let bases: Vec<Vec<Monomial>> = (0..=max_degree).map(|d| spec.enumerate_basis(d)).collect();
        let index = bases
            .iter()
            .map(|b| b.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect())
            .collect();
        GradedBasis { bases, index }
    }

    pub fn max_degree(&self) -> usize {
        self.bases.len() - 1
    }

    /// Basis of `R_d`; empty for negative `d`.
    pub fn basis(&self, d: i64) -> &[Monomial] {
        if d < 0 {
            return &[];
        }
        self.bases
            .get(d as usize)
            .unwrap_or_else(|| panic!("degree {d} exceeds the precomputed bound {}", self.max_degree()))
    }

    pub fn dim(&self, d: i64) -> usize {
        self.basis(d).len()
    }

    fn position_of(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m.degree())?.get(m).copied()
    }
}

/// The `k`-linear component of one differential in a fixed internal degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedPiece {
    /// Index `n` of the differential (`d_n`, or `d^n` for a dual complex).
    pub differential: usize,
    pub degree: i64,
    /// `(generator index, monomial)`, generator-major then monomial order.
    pub domain: Vec<(usize, Monomial)>,
    pub codomain: Vec<(usize, Monomial)>,
    pub matrix: IntMatrix,
}

/// Builds the matrix of differential `n` of `complex` in internal degree `t`.
/// Column `(g, m)` maps to `σ` at row `(target, x_l·m)` for every entry `σ·x_l`,
/// unless `x_l·m` vanishes in `R`.
pub fn graded_matrix(complex: &FreeComplex, basis: &GradedBasis, n: usize, t: i64) -> IntMatrix {
    let d = complex.differential(n);
    let dom_deg = t - complex.gen_degrees()[complex.domain_position(n)];
    let cod_deg = t - complex.gen_degrees()[complex.codomain_position(n)];
    let dom_basis = basis.basis(dom_deg);
    let cod_dim = basis.dim(cod_deg);
    let mut m = IntMatrix::new(d.rows * cod_dim, d.cols * dom_basis.len());
    if cod_dim == 0 || dom_basis.is_empty() {
        return m;
    }
    for e in &d.entries {
        for (k, mono) in dom_basis.iter().enumerate() {
            let image = mono.mul_var(e.label);
            if let Some(pos) = basis.position_of(&image) {
                m.push(e.row * cod_dim + pos, e.col * dom_basis.len() + k, e.sign.value());
            }
        }
    }
    m
}

pub fn graded_piece(complex: &FreeComplex, n: usize, t: i64) -> GradedPiece {
    let dom_deg = t - complex.gen_degrees()[complex.domain_position(n)];
    let cod_deg = t - complex.gen_degrees()[complex.codomain_position(n)];
    let max = dom_deg.max(cod_deg).max(0) as usize;
    let basis = GradedBasis::new(complex.spec(), max);
    let d = complex.differential(n);
    let spread = |gens: usize, deg: i64| -> Vec<(usize, Monomial)> {
        (0..gens)
            .flat_map(|g| basis.basis(deg).iter().map(move |m| (g, m.clone())))
            .collect()
    };
    GradedPiece {
        differential: n,
        degree: t,
        domain: spread(d.cols, dom_deg),
        codomain: spread(d.rows, cod_deg),
        matrix: graded_matrix(complex, &basis, n, t),
    }
}

/// One row of a homology table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyRow {
    pub n: usize,
    pub t: i64,
    /// `dim_k` of the module at position `n` in internal degree `t`.
    pub dim_domain: usize,
    /// Rank of the map leaving position `n` (`d_n` in a chain complex).
    pub rank_dn: usize,
    /// Rank of the map arriving at position `n` (`d_{n+1}` in a chain complex).
    pub rank_dn1: usize,
    pub homology_dim: usize,
}

/// Ranks of every differential of `complex` in every internal degree of `degrees`,
/// computed in parallel and keyed by `(n, t)`.
pub struct RankTable {
    ranks: HashMap<(usize, i64), usize>,
}

impl RankTable {
    pub fn compute(complex: &FreeComplex, basis: &GradedBasis, degrees: &[i64], field: Field) -> Self {
        let jobs: Vec<(usize, i64)> = (1..=complex.levels())
            .flat_map(|n| degrees.iter().map(move |&t| (n, t)))
            .collect();
        let ranks = jobs
            .into_par_iter()
            .map(|(n, t)| ((n, t), rank(&graded_matrix(complex, basis, n, t), field)))
            .collect();
        RankTable { ranks }
    }

    pub fn get(&self, n: usize, t: i64) -> usize {
        self.ranks[&(n, t)]
    }
}

/// Homology at `position` in internal degree `t`, from a precomputed rank table.
/// Positions whose incoming map is not part of the finite complex are not assessable.
pub fn homology_row(complex: &FreeComplex, basis: &GradedBasis, ranks: &RankTable, position: usize, t: i64) -> HomologyRow {
    let levels = complex.levels();
    assert!(position < levels, "position {position} needs differential {} which is not built", position + 1);
    let (outgoing, incoming) = match complex.orientation() {
        Orientation::Primal => ((position >= 1).then_some(position), position + 1),
        Orientation::Dual => (Some(position + 1), position),
    };
    let deg = t - complex.gen_degrees()[position];
    let dim_domain = complex.ranks()[position] * basis.dim(deg);
    let rank_out = outgoing.map_or(0, |n| ranks.get(n, t));
    let rank_in = if incoming >= 1 { ranks.get(incoming, t) } else { 0 };
    HomologyRow {
        n: position,
        t,
        dim_domain,
        rank_dn: rank_out,
        rank_dn1: rank_in,
        homology_dim: dim_domain - rank_out - rank_in,
    }
}

/// Largest monomial degree any piece at internal degrees `degrees` can touch.
pub(crate) fn degree_bound(complex: &FreeComplex, degrees: &[i64]) -> usize {
    let lo = complex.gen_degrees().iter().copied().min().unwrap_or(0);
    let t_max = degrees.iter().copied().max().unwrap_or(0);
    (t_max - lo).max(0) as usize
}

/// `dim H_n` in internal degree `t`. For `n = 0` this is the cokernel of `d_1`.
pub fn homology_dims(complex: &FreeComplex, n: usize, t: i64, field: Field) -> usize {
    let degrees = [t];
    let basis = GradedBasis::new(complex.spec(), degree_bound(complex, &degrees));
    let table = RankTable::compute_for(complex, &basis, &[(n, t), (n + 1, t)], field);
    homology_row(complex, &basis, &table, n, t).homology_dim
}

impl RankTable {
    pub(crate) fn compute_for(complex: &FreeComplex, basis: &GradedBasis, jobs: &[(usize, i64)], field: Field) -> Self {
        let ranks = jobs
            .iter()
            .filter(|(n, _)| *n >= 1 && *n <= complex.levels())
            .map(|&(n, t)| ((n, t), rank(&graded_matrix(complex, basis, n, t), field)))
            .collect();
        RankTable { ranks }
    }
}

/// Homology table of a primal complex at positions `0..L-1` and internal degrees `0..=T`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactnessReport {
    pub levels: usize,
    pub max_degree: usize,
    pub field: Field,
    pub rows: Vec<HomologyRow>,
    /// The top position `L` lacks `d_{L+1}` and is never reported.
    pub not_assessable_position: usize,
    /// `H_n(t) = 0` for every `1 <= n <= L-1`, `t <= T`.
    pub consistent: bool,
}

impl ExactnessReport {
    pub fn homology(&self, n: usize, t: i64) -> Option<usize> {
        self.rows.iter().find(|r| r.n == n && r.t == t).map(|r| r.homology_dim)
    }

    /// `(n, t, dim)` for every nonzero homology group at positive position.
    pub fn defects(&self) -> Vec<(usize, i64, usize)> {
        self.rows
            .iter()
            .filter(|r| r.n >= 1 && r.homology_dim != 0)
            .map(|r| (r.n, r.t, r.homology_dim))
            .collect()
    }

    pub fn h0(&self) -> Vec<usize> {
        self.rows.iter().filter(|r| r.n == 0).map(|r| r.homology_dim).collect()
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("n\tt\tdim_domain\trank_dn\trank_dn1\thomology_dim\n");
        for r in &self.rows {
            writeln!(out, "{}\t{}\t{}\t{}\t{}\t{}", r.n, r.t, r.dim_domain, r.rank_dn, r.rank_dn1, r.homology_dim).unwrap();
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn verdict(&self) -> &'static str {
        if self.consistent {
            "consistent with a free resolution"
        } else {
            "NONZERO HOMOLOGY"
        }
    }
}

pub fn exactness_report(complex: &FreeComplex, max_degree: usize, field: Field) -> ExactnessReport {
    assert_eq!(complex.orientation(), Orientation::Primal, "exactness reports are for chain complexes");
    let levels = complex.levels();
    let degrees: Vec<i64> = (0..=max_degree as i64).collect();
    let basis = GradedBasis::new(complex.spec(), degree_bound(complex, &degrees));
    let ranks = RankTable::compute(complex, &basis, &degrees, field);
    let rows: Vec<HomologyRow> = (0..levels)
        .flat_map(|n| degrees.iter().map(move |&t| (n, t)))
        .map(|(n, t)| homology_row(complex, &basis, &ranks, n, t))
        .collect();
    let consistent = rows.iter().all(|r| r.n == 0 || r.homology_dim == 0);
    ExactnessReport { levels, max_degree, field, rows, not_assessable_position: levels, consistent }
}

/// Result of comparing `H_0` with `R/(x_i)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct H0Check {
    pub label: usize,
    pub observed: Vec<usize>,
    pub expected: Vec<usize>,
    pub matches: bool,
}

/// Compares `H_0(t)` for `t <= T` against a brute-force count of admissible monomials
/// of degree `t` free of the initial variable.
pub fn h0_check(complex: &FreeComplex, max_degree: usize, field: Field) -> Option<H0Check> {
    let label = complex.initial_label()?;
    let report = exactness_report(&complex_prefix(complex, 1), max_degree, field);
    let observed = (0..=max_degree as i64).map(|t| report.homology(0, t).unwrap_or(0)).collect::<Vec<_>>();
    let expected = (0..=max_degree)
        .map(|d| {
            compositions(complex.spec().num_vars(), d as u32)
                .into_iter()
                .filter(|m| m.exponent(label) == 0 && m.is_admissible(complex.spec()))
                .count()
        })
        .collect::<Vec<_>>();
    let matches = observed == expected;
    Some(H0Check { label, observed, expected, matches })
}

/// The first `levels` differentials of `complex` as a complex of its own.
pub fn complex_prefix(complex: &FreeComplex, levels: usize) -> FreeComplex {
    let keep = levels.min(complex.levels());
    FreeComplex::new(
        complex.spec().clone(),
        complex.ranks()[..=keep].to_vec(),
        (1..=keep).map(|n| complex.differential(n).entries.clone()).collect(),
    )
    .expect("a prefix of a valid complex is valid")
}

/// Every exponent vector of length `n` and degree `d`, admissible or not.
fn compositions(n: usize, d: u32) -> Vec<Monomial> {
    fn go(var: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if var + 1 == cur.len() {
            cur[var] = left;
            out.push(Monomial(cur.clone()));
            return;
        }
        for e in 0..=left {
            cur[var] = e;
            go(var + 1, left - e, cur, out);
        }
        cur[var] = 0;
    }
    let mut out = Vec::new();
    go(0, d, &mut vec![0; n], &mut out);
    out
}

/// `dim_k ker([x_{l_1} ... x_{l_k}] : R^k -> R)` in internal degree `t`, with the
/// generators of `R^k` in degree 1.
pub fn kernel_dim(spec: &RingSpec, labels: &[usize], t: i64, field: Field) -> usize {
    use crate::complex::Entry;
    use crate::diagram::Sign;
    let row: Vec<Entry> = labels
        .iter()
        .enumerate()
        .map(|(col, &label)| Entry { row: 0, col, sign: Sign::Plus, label })
        .collect();
    let map = FreeComplex::new(spec.clone(), vec![1, labels.len()], vec![row]).expect("row map is well-shaped");
    let basis = GradedBasis::new(spec, t.max(0) as usize);
    let domain = labels.len() * basis.dim(t - 1);
    domain - rank(&graded_matrix(&map, &basis, 1, t), field)
}
