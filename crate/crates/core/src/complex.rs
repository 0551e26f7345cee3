//! Chain complexes of free `R`-modules whose differentials have entries `±x_l`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{Diagram, Sign};
use crate::field::{Field, Scalar};
use crate::ring::{Monomial, RingElement, RingSpec};

#[derive(Debug, Error)]
pub enum ComplexError {
    #[error("differential d{n} has an entry at ({row}, {col}) outside its {rows}x{cols} shape")]
    OutOfShape { n: usize, row: usize, col: usize, rows: usize, cols: usize },
    #[error("differential d{n} has two entries at ({row}, {col})")]
    DuplicateEntry { n: usize, row: usize, col: usize },
    #[error("label {label} in d{n} is not a variable of the ring")]
    BadLabel { n: usize, label: usize },
    #[error("{ranks} ranks need {} differentials, got {got}", ranks - 1)]
    Arity { ranks: usize, got: usize },
    #[error("malformed complex JSON: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// `d_n : P_n -> P_{n-1}`, generators of `P_n` in internal degree `n`.
    Primal,
    /// `d^n : C^{n-1} -> C^n` (transposes), generators of `C^n` in internal degree `-n`.
    Dual,
}

/// One matrix entry `sign · x_label`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Entry {
    pub row: usize,
    pub col: usize,
    pub sign: Sign,
    pub label: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Differential {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Entry>,
}

impl Differential {
    pub fn to_strings(&self) -> Vec<Vec<String>> {
        let mut out = vec![vec!["0".to_string(); self.cols]; self.rows];
        for e in &self.entries {
            let minus = if e.sign == Sign::Minus { "-" } else { "" };
            out[e.row][e.col] = format!("{minus}x{}", e.label);
        }
        out
    }

    fn transposed(&self) -> Differential {
        let mut entries: Vec<Entry> = self
            .entries
            .iter()
            .map(|e| Entry { row: e.col, col: e.row, ..*e })
            .collect();
        entries.sort();
        Differential { rows: self.cols, cols: self.rows, entries }
    }
}

/// A nonzero entry of a composite `d_{n-1} · d_n` (or its dual analogue).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DdFailure {
    pub position: usize,
    pub row: usize,
    pub col: usize,
    pub element: RingElement,
}

impl DdFailure {
    pub(crate) fn at(mut self, position: usize) -> Self {
        self.position = position;
        self
    }
}

impl fmt::Display for DdFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "composite at position {} has entry ({}, {}) = {}",
            self.position, self.row, self.col, self.element
        )
    }
}

/// Symbolic product `outer · inner` reduced in `R`; `None` when it vanishes.
/// The first surviving entry in `(row, col)` order is returned as the witness.
pub fn compose(spec: &RingSpec, outer: &[Entry], inner: &[Entry]) -> Option<DdFailure> {
    let mut by_row: HashMap<usize, Vec<&Entry>> = HashMap::new();
    for e in inner {
        by_row.entry(e.row).or_default().push(e);
    }
    let mut acc: BTreeMap<(usize, usize), BTreeMap<Monomial, i64>> = BTreeMap::new();
    let n = spec.num_vars();
    for a in outer {
        let Some(below) = by_row.get(&a.col) else {
            continue;
        };
        for b in below {
            let m = Monomial::var(n, a.label).mul_var(b.label);
            if spec.reduce_monomial(&m).is_none() {
                continue;
            }
            *acc.entry((a.row, b.col)).or_default().entry(m).or_insert(0) += a.sign.value() * b.sign.value();
        }
    }
    for ((row, col), terms) in acc {
        let surviving: Vec<_> = terms.into_iter().filter(|(_, c)| *c != 0).collect();
        if surviving.is_empty() {
            continue;
        }
        let field = Field::Rational;
        let mut element = RingElement::zero(field);
        for (m, c) in surviving {
            let term = RingElement::monomial(spec, field, m, Scalar::from_i64(field, c));
            element = element.add(&term).expect("same field");
        }
        return Some(DdFailure { position: 0, row, col, element });
    }
    None
}

/// A finite piece `P_L -> ... -> P_0` of a complex of free modules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeComplex {
    spec: RingSpec,
    ranks: Vec<usize>,
    gen_degrees: Vec<i64>,
    /// `differentials[n - 1]` is `d_n` (primal) or its transpose `d^n` (dual).
    differentials: Vec<Differential>,
    orientation: Orientation,
}

impl FreeComplex {
    /// Primal complex from ranks `r_0..r_L` and the entries of `d_1..d_L`
    /// (`d_n` has shape `r_{n-1} × r_n`).
    pub fn new(spec: RingSpec, ranks: Vec<usize>, differentials: Vec<Vec<Entry>>) -> Result<Self, ComplexError> {
        Self::with_orientation(spec, ranks, differentials, Orientation::Primal)
    }

    fn with_orientation(
        spec: RingSpec,
        ranks: Vec<usize>,
        differentials: Vec<Vec<Entry>>,
        orientation: Orientation,
    ) -> Result<Self, ComplexError> {
        if ranks.is_empty() || differentials.len() + 1 != ranks.len() {
            return Err(ComplexError::Arity { ranks: ranks.len().max(1), got: differentials.len() });
        }
        let mut out = Vec::with_capacity(differentials.len());
        for (idx, mut entries) in differentials.into_iter().enumerate() {
            let n = idx + 1;
            let (rows, cols) = match orientation {
                Orientation::Primal => (ranks[n - 1], ranks[n]),
                Orientation::Dual => (ranks[n], ranks[n - 1]),
            };
            entries.sort();
            for pair in entries.windows(2) {
                if (pair[0].row, pair[0].col) == (pair[1].row, pair[1].col) {
                    return Err(ComplexError::DuplicateEntry { n, row: pair[0].row, col: pair[0].col });
                }
            }
            for e in &entries {
                if e.row >= rows || e.col >= cols {
                    return Err(ComplexError::OutOfShape { n, row: e.row, col: e.col, rows, cols });
                }
                if e.label == 0 || e.label > spec.num_vars() {
                    return Err(ComplexError::BadLabel { n, label: e.label });
                }
            }
            out.push(Differential { rows, cols, entries });
        }
        let gen_degrees = (0..ranks.len() as i64)
            .map(|n| if orientation == Orientation::Primal { n } else { -n })
            .collect();
        Ok(FreeComplex { spec, ranks, gen_degrees, differentials: out, orientation })
    }

    /// Reads a diagram as a complex: one generator per vertex, one entry `σ·x_l` per arrow.
    pub fn from_diagram(diagram: &Diagram) -> Self {
        let ranks = diagram.level_counts();
        let differentials = (1..ranks.len())
            .map(|n| {
                diagram
                    .edges_from_level(n)
                    .iter()
                    .map(|e| Entry {
                        row: diagram.index_in_level(n - 1, e.to),
                        col: diagram.index_in_level(n, e.from),
                        sign: e.sign,
                        label: e.label,
                    })
                    .collect()
            })
            .collect();
        Self::new(diagram.spec().clone(), ranks, differentials).expect("diagrams translate to well-shaped complexes")
    }

    pub fn spec(&self) -> &RingSpec {
        &self.spec
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn gen_degrees(&self) -> &[i64] {
        &self.gen_degrees
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// Number of differentials `L`.
    pub fn levels(&self) -> usize {
        self.ranks.len() - 1
    }

    /// `d_n` for `1 <= n <= L`.
    pub fn differential(&self, n: usize) -> &Differential {
        &self.differentials[n - 1]
    }

    /// Position (homological index) of the domain of the stored differential `n`.
    pub fn domain_position(&self, n: usize) -> usize {
        match self.orientation {
            Orientation::Primal => n,
            Orientation::Dual => n - 1,
        }
    }

    pub fn codomain_position(&self, n: usize) -> usize {
        match self.orientation {
            Orientation::Primal => n - 1,
            Orientation::Dual => n,
        }
    }

    /// The label of the initial map `d_1 = [x_i]`, if `d_1` has that shape.
    pub fn initial_label(&self) -> Option<usize> {
        let d1 = self.differentials.first()?;
        match d1.entries.as_slice() {
            [e] if d1.rows == 1 && d1.cols == 1 => Some(e.label),
            _ => None,
        }
    }

    /// Checks that `d_{n-1} ∘ d_n = 0` in `R` (dual: `d^n ∘ d^{n-1}`), for `2 <= n <= L`.
    pub fn verify_dd_zero(&self, n: usize) -> Result<(), DdFailure> {
        assert!(n >= 2 && n <= self.levels(), "verify_dd_zero needs 2 <= n <= L");
        let (outer, inner) = match self.orientation {
            Orientation::Primal => (self.differential(n - 1), self.differential(n)),
            Orientation::Dual => (self.differential(n), self.differential(n - 1)),
        };
        match compose(&self.spec, &outer.entries, &inner.entries) {
            Some(failure) => Err(failure.at(n)),
            None => Ok(()),
        }
    }

    pub fn verify_all(&self) -> Result<(), DdFailure> {
        (2..=self.levels()).try_for_each(|n| self.verify_dd_zero(n))
    }

    /// `Hom_R(-, R)`: transposes every matrix, negates generator degrees. An involution.
    pub fn dualize(&self) -> FreeComplex {
        let orientation = match self.orientation {
            Orientation::Primal => Orientation::Dual,
            Orientation::Dual => Orientation::Primal,
        };
        FreeComplex {
            spec: self.spec.clone(),
            ranks: self.ranks.clone(),
            gen_degrees: self.gen_degrees.iter().map(|d| -d).collect(),
            differentials: self.differentials.iter().map(Differential::transposed).collect(),
            orientation,
        }
    }

    pub fn to_json(&self) -> String {
        let doc = ComplexDoc {
            ranks: self.ranks.clone(),
            differentials: self.differentials.iter().map(|d| d.entries.clone()).collect(),
            orientation: self.orientation,
        };
        serde_json::to_string_pretty(&doc).expect("complex serializes")
    }

    /// The ring is not part of the file format and must be supplied.
    pub fn from_json(spec: &RingSpec, text: &str) -> Result<Self, ComplexError> {
        let doc: ComplexDoc = serde_json::from_str(text)?;
        Self::with_orientation(spec.clone(), doc.ranks, doc.differentials, doc.orientation)
    }
}

#[derive(Serialize, Deserialize)]
struct ComplexDoc {
    ranks: Vec<usize>,
    differentials: Vec<Vec<Entry>>,
    orientation: Orientation,
}
