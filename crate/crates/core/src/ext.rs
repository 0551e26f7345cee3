//! Cohomology of `Hom_R(P, R)` and the local "vv" configuration that forces a
//! nonzero class `(x_s, 0)`.
//!
//! In the dual complex the generator of a level-`p` vertex sits in internal degree
//! `-p`, so `C^p(u)` is spanned by `R_{u+p}` per vertex. The witness `x_s·e_{b0}`
//! therefore lives in internal degree `1 - p`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{FreeComplex, Orientation};
use crate::diagram::{Diagram, DiagramError};
use crate::field::Field;
use crate::homology::{degree_bound, homology_row, GradedBasis, RankTable};
use crate::ring::RingSpec;

#[derive(Debug, Error)]
pub enum ExtError {
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error("vv occurrence at position {} (c0={}, b0={}, b1={}) but H^{} in degree {} is zero",
        .occurrence.position, .occurrence.c0, .occurrence.b0, .occurrence.b1, .occurrence.position, .degree)]
    DetectorUnsound { occurrence: VVOccurrence, degree: i64 },
}

/// `c0 <-s- b0`, `c0 <-t- b1` with no other arrows leaving `b0` or `b1`, and every
/// arrow into `b0` labeled by a variable that kills `x_s`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VVOccurrence {
    pub position: usize,
    pub c0: usize,
    pub b0: usize,
    pub b1: usize,
    pub s: usize,
    pub t: usize,
    #[serde(skip)]
    pub b0_incoming: Vec<usize>,
}

impl VVOccurrence {
    /// Internal degree of the cochain `x_s·e_{b0}`.
    pub fn witness_degree(&self) -> i64 {
        1 - self.position as i64
    }
}

/// `dim H^i(u)` of a dual complex.
pub fn cohomology_dims(dual: &FreeComplex, i: usize, u: i64, field: Field) -> usize {
    assert_eq!(dual.orientation(), Orientation::Dual, "cohomology_dims expects a dualized complex");
    if i >= dual.levels() {
        return 0;
    }
    crate::homology::homology_dims(dual, i, u, field)
}

pub fn find_vv_patterns(diagram: &Diagram) -> Vec<VVOccurrence> {
    let spec = diagram.spec();
    let mut out_edges: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    let mut in_labels: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for e in diagram.edges() {
        out_edges.entry(e.from).or_default().push((e.to, e.label));
        in_labels.entry(e.to).or_default().push(e.label);
    }
    let mut found = Vec::new();
    // b0 must have a level above it, so positions stop below the top
    for p in 1..diagram.top_level() {
        // children of each c0 that have a single outgoing arrow
        let mut lone: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
        for &b in diagram.level(p) {
            if let Some([(to, label)]) = out_edges.get(&b).map(Vec::as_slice) {
                lone.entry(*to).or_default().push((b, *label));
            }
        }
        for (&c0, kids) in &lone {
            for &(b0, s) in kids {
                let incoming = in_labels.get(&b0).cloned().unwrap_or_default();
                if !incoming.iter().all(|&l| spec.kills(l, s)) {
                    continue;
                }
                for &(b1, t) in kids {
                    if b1 != b0 && t != s {
                        found.push(VVOccurrence { position: p, c0, b0, b1, s, t, b0_incoming: incoming.clone() });
                    }
                }
            }
        }
    }
    found.sort();
    found
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyRow {
    pub position: usize,
    pub degree: i64,
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvidenceReport {
    pub nonzero_ext_positions: Vec<usize>,
    pub vv_occurrences: Vec<VVOccurrence>,
    #[serde(skip)]
    pub cohomology: Vec<CohomologyRow>,
}

impl EvidenceReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Distinct positions carrying at least one vv occurrence.
    pub fn vv_positions(&self) -> Vec<usize> {
        let mut p: Vec<usize> = self.vv_occurrences.iter().map(|o| o.position).collect();
        p.dedup();
        p
    }

    pub fn dim(&self, position: usize, degree: i64) -> Option<usize> {
        self.cohomology.iter().find(|r| r.position == position && r.degree == degree).map(|r| r.dim)
    }
}

/// Builds `L` levels, dualizes, and tabulates `H^i(u)` for `1 <= i <= L-1` and
/// `-i <= u <= span - i` (cochains of monomial degree `0..=span`). Every vv occurrence
/// must come with a nonzero class in its witness degree.
pub fn injective_dimension_evidence(
    spec: &RingSpec,
    initial: usize,
    levels: usize,
    span: usize,
    field: Field,
) -> Result<EvidenceReport, ExtError> {
    let diagram = Diagram::build(spec, initial, levels)?;
    let dual = FreeComplex::from_diagram(&diagram).dualize();
    let grid: Vec<(usize, i64)> = (1..levels)
        .flat_map(|i| (0..=span as i64).map(move |k| (i, k - i as i64)))
        .collect();
    let degrees: Vec<i64> = {
        let mut d: Vec<i64> = grid.iter().map(|&(_, u)| u).collect();
        d.sort_unstable();
        d.dedup();
        d
    };
    let basis = GradedBasis::new(spec, degree_bound(&dual, &degrees));
    let needed: Vec<(usize, i64)> = grid.iter().flat_map(|&(i, u)| [(i, u), (i + 1, u)]).collect();
    let ranks = RankTable::compute_for(&dual, &basis, &needed, field);
    let cohomology: Vec<CohomologyRow> = grid
        .par_iter()
        .map(|&(i, u)| CohomologyRow { position: i, degree: u, dim: homology_row(&dual, &basis, &ranks, i, u).homology_dim })
        .collect();
    let mut nonzero: Vec<usize> = cohomology.iter().filter(|r| r.dim > 0).map(|r| r.position).collect();
    nonzero.dedup();
    let report = EvidenceReport { nonzero_ext_positions: nonzero, vv_occurrences: find_vv_patterns(&diagram), cohomology };
    for occ in &report.vv_occurrences {
        let degree = occ.witness_degree();
        let dim = match report.dim(occ.position, degree) {
            Some(d) => d,
            None => cohomology_dims(&dual, occ.position, degree, field),
        };
        if dim == 0 {
            return Err(ExtError::DetectorUnsound { occurrence: occ.clone(), degree });
        }
    }
    Ok(report)
}
