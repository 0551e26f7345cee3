//! Exhaustive search for counterexamples to exactness over small rings.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::{DdFailure, FreeComplex};
use crate::diagram::{Diagram, DiagramError};
use crate::field::Field;
use crate::homology::{exactness_report, h0_check};
use crate::ring::RingSpec;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Anomaly {
    SignConflict { level: usize, cycle: Vec<(usize, usize)> },
    NotAComplex { level: usize, position: usize, row: usize, col: usize, element: String },
    Homology { n: usize, t: i64, dim: usize },
    H0Mismatch { observed: Vec<usize>, expected: Vec<usize> },
    Other { message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseResult {
    pub ring: RingSpec,
    pub initial: usize,
    pub ranks: Vec<usize>,
    pub anomalies: Vec<Anomaly>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HuntReport {
    pub max_vars: usize,
    pub levels: usize,
    pub max_degree: usize,
    pub field: Field,
    pub cases: Vec<CaseResult>,
}

impl HuntReport {
    pub fn verified(&self) -> usize {
        self.cases.iter().filter(|c| c.anomalies.is_empty()).count()
    }

    pub fn anomalous(&self) -> impl Iterator<Item = &CaseResult> {
        self.cases.iter().filter(|c| !c.anomalies.is_empty())
    }

    pub fn anomaly_count(&self) -> usize {
        self.anomalous().count()
    }

    pub fn summary(&self) -> String {
        format!("{} anomalies, {} cases verified", self.anomaly_count(), self.verified())
    }
}

/// Every nonempty set of quadratic monomials in `n` variables, for `1 <= n <= max_vars`,
/// in a fixed order (by `n`, then by bitmask over the sorted pair list).
pub fn enumerate_specs(max_vars: usize) -> Vec<RingSpec> {
    let mut out = Vec::new();
    for n in 1..=max_vars {
        let pairs: Vec<(usize, usize)> = (1..=n).flat_map(|i| (i..=n).map(move |j| (i, j))).collect();
        for mask in 1u64..(1 << pairs.len()) {
            let gens: Vec<(usize, usize)> =
                pairs.iter().enumerate().filter(|(k, _)| mask & (1 << k) != 0).map(|(_, &p)| p).collect();
            out.push(RingSpec::normalize(&gens, n).expect("enumerated pairs are in range"));
        }
    }
    out
}

/// `(spec, initial)` for every enumerated spec and every label dividing a generator.
pub fn enumerate_cases(max_vars: usize) -> Vec<(RingSpec, usize)> {
    enumerate_specs(max_vars)
        .into_iter()
        .flat_map(|s| {
            let labels: Vec<usize> = (1..=s.num_vars()).filter(|&i| s.is_factor(i)).collect();
            labels.into_iter().map(move |i| (s.clone(), i))
        })
        .collect()
}

pub fn check_case(spec: &RingSpec, initial: usize, levels: usize, max_degree: usize, field: Field) -> CaseResult {
    let mut result = CaseResult { ring: spec.clone(), initial, ranks: Vec::new(), anomalies: Vec::new() };
    let diagram = match Diagram::build(spec, initial, levels) {
        Ok(d) => d,
        Err(e) => {
            result.anomalies.push(match e {
                DiagramError::SignConflict { level, cycle } => Anomaly::SignConflict { level, cycle },
                DiagramError::NotAComplex { level, failure } => not_a_complex(level, &failure),
                other => Anomaly::Other { message: other.to_string() },
            });
            return result;
        }
    };
    let complex = FreeComplex::from_diagram(&diagram);
    result.ranks = complex.ranks().to_vec();
    if let Err(failure) = complex.verify_all() {
        result.anomalies.push(not_a_complex(failure.position, &failure));
    }
    let report = exactness_report(&complex, max_degree, field);
    result
        .anomalies
        .extend(report.defects().into_iter().map(|(n, t, dim)| Anomaly::Homology { n, t, dim }));
    if let Some(h0) = h0_check(&complex, max_degree, field) {
        if !h0.matches {
            result.anomalies.push(Anomaly::H0Mismatch { observed: h0.observed, expected: h0.expected });
        }
    }
    result
}

fn not_a_complex(level: usize, f: &DdFailure) -> Anomaly {
    Anomaly::NotAComplex { level, position: f.position, row: f.row, col: f.col, element: f.element.to_string() }
}

/// Runs [`check_case`] over [`enumerate_cases`] in parallel; results keep enumeration order.
pub fn conjecture_hunt(max_vars: usize, levels: usize, max_degree: usize, field: Field) -> HuntReport {
    let cases = enumerate_cases(max_vars)
        .par_iter()
        .map(|(spec, i)| check_case(spec, *i, levels, max_degree, field))
        .collect();
    HuntReport { max_vars, levels, max_degree, field, cases }
}
