//! Closed-form reference resolutions of `R/(x_1)` for three families of rings,
//! used to cross-check the diagram construction.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{Entry, FreeComplex};
use crate::diagram::Sign;
use crate::field::Field;
use crate::homology::{exactness_report, HomologyRow};
use crate::ring::RingSpec;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("O(n) needs n >= 2, got {0}")]
    FamilyTooSmall(usize),
    #[error("oracle complexes need at least one level")]
    NoLevels,
    #[error("unknown oracle {0:?} (expected fibonacci, binary or o<N>)")]
    Unknown(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OracleKind {
    /// `k[x1,x2,x3]/(x1x2, x1x3)`
    Fibonacci,
    /// `k[x1,x2]/(x1^2, x1x2, x2^2)`
    Binary,
    /// `k[x1..xn]/(x1^2, xixj for i != j)`
    OFamily(usize),
}

impl OracleKind {
    pub fn spec(self) -> RingSpec {
        match self {
            OracleKind::Fibonacci => RingSpec::normalize(&[(1, 2), (1, 3)], 3),
            OracleKind::Binary => RingSpec::normalize(&[(1, 1), (1, 2), (2, 2)], 2),
            OracleKind::OFamily(n) => {
                let mut gens = vec![(1, 1)];
                for i in 1..=n {
                    gens.extend((i + 1..=n).map(|j| (i, j)));
                }
                RingSpec::normalize(&gens, n)
            }
        }
        .expect("oracle rings are well-formed")
    }

    fn validate(self) -> Result<(), OracleError> {
        match self {
            OracleKind::OFamily(n) if n < 2 => Err(OracleError::FamilyTooSmall(n)),
            _ => Ok(()),
        }
    }
}

impl FromStr for OracleKind {
    type Err = OracleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let kind = match s.to_ascii_lowercase().as_str() {
            "fibonacci" | "fib" => OracleKind::Fibonacci,
            "binary" => OracleKind::Binary,
            other => {
                let n = other
                    .strip_prefix('o')
                    .and_then(|n| n.trim_matches(|c| c == '(' || c == ')').parse().ok())
                    .ok_or_else(|| OracleError::Unknown(s.to_owned()))?;
                OracleKind::OFamily(n)
            }
        };
        kind.validate()?;
        Ok(kind)
    }
}

impl fmt::Display for OracleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleKind::Fibonacci => f.write_str("fibonacci"),
            OracleKind::Binary => f.write_str("binary"),
            OracleKind::OFamily(n) => write!(f, "o{n}"),
        }
    }
}

/// A matrix of `±x_l` entries together with its shape.
#[derive(Debug, Clone)]
struct Block {
    rows: usize,
    cols: usize,
    entries: Vec<Entry>,
}

impl Block {
    fn new(rows: usize, cols: usize, cells: &[(usize, usize, i64)]) -> Self {
        let entries = cells
            .iter()
            .map(|&(row, col, v)| Entry {
                row,
                col,
                sign: if v > 0 { Sign::Plus } else { Sign::Minus },
                label: v.unsigned_abs() as usize,
            })
            .collect();
        Block { rows, cols, entries }
    }

    fn diag(parts: &[&Block]) -> Block {
        let mut out = Block { rows: 0, cols: 0, entries: Vec::new() };
        for b in parts {
            out.entries
                .extend(b.entries.iter().map(|e| Entry { row: e.row + out.rows, col: e.col + out.cols, ..*e }));
            out.rows += b.rows;
            out.cols += b.cols;
        }
        out
    }
}

fn assemble(spec: RingSpec, blocks: Vec<Block>) -> FreeComplex {
    let mut ranks = vec![blocks[0].rows];
    ranks.extend(blocks.iter().map(|b| b.cols));
    FreeComplex::new(spec, ranks, blocks.into_iter().map(|b| b.entries).collect())
        .expect("oracle blocks chain together")
}

pub fn oracle_complex(kind: OracleKind, levels: usize) -> Result<FreeComplex, OracleError> {
    kind.validate()?;
    if levels == 0 {
        return Err(OracleError::NoLevels);
    }
    // d[k] is d_{k+1}
    let mut d: Vec<Block> = Vec::with_capacity(levels);
    match kind {
        OracleKind::Fibonacci => {
            let seeds = [
                Block::new(1, 1, &[(0, 0, 1)]),
                Block::new(1, 2, &[(0, 0, 2), (0, 1, 3)]),
                Block::new(2, 3, &[(0, 0, 1), (0, 1, 3), (1, 1, -2), (1, 2, 1)]),
            ];
            for n in 1..=levels {
                let b = if n <= 3 { seeds[n - 1].clone() } else { Block::diag(&[&d[n - 3], &d[n - 4], &d[n - 3]]) };
                d.push(b);
            }
        }
        OracleKind::Binary => {
            for n in 1..=levels {
                let b = match n {
                    1 => Block::new(1, 1, &[(0, 0, 1)]),
                    2 => Block::new(1, 2, &[(0, 0, 1), (0, 1, 2)]),
                    _ => Block::diag(&[&d[n - 2], &d[n - 2]]),
                };
                d.push(b);
            }
        }
        OracleKind::OFamily(vars) => {
            // label of the arrow reaching each generator of the current position
            let mut labels = vec![1usize];
            d.push(Block::new(1, 1, &[(0, 0, 1)]));
            for _ in 2..=levels {
                let rows: Vec<Vec<usize>> = labels
                    .iter()
                    .map(|&i| (1..=vars).filter(|&j| i == 1 || j != i).collect())
                    .collect();
                let parts: Vec<Block> = rows
                    .iter()
                    .map(|row| {
                        let cells: Vec<(usize, usize, i64)> =
                            row.iter().enumerate().map(|(c, &j)| (0, c, j as i64)).collect();
                        Block::new(1, row.len(), &cells)
                    })
                    .collect();
                d.push(Block::diag(&parts.iter().collect::<Vec<_>>()));
                labels = rows.concat();
            }
        }
    }
    Ok(assemble(kind.spec(), d))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comparison {
    pub equal: bool,
    pub ranks: (Vec<usize>, Vec<usize>),
    /// First `(n, t)` row where the homology tables differ: `(left, right)`.
    pub first_homology_difference: Option<(HomologyRow, HomologyRow)>,
}

/// Equal free ranks and equal graded homology tables for `n <= L-1`, `t <= T`.
/// Generator order and matrix entries are not compared.
pub fn compare(procedure: &FreeComplex, oracle: &FreeComplex, max_degree: usize, field: Field) -> Comparison {
    let ranks = (procedure.ranks().to_vec(), oracle.ranks().to_vec());
    let ranks_equal = ranks.0 == ranks.1;
    let first_homology_difference = if procedure.levels() == oracle.levels() {
        let a = exactness_report(procedure, max_degree, field);
        let b = exactness_report(oracle, max_degree, field);
        a.rows
            .iter()
            .zip(&b.rows)
            .find(|(x, y)| x.homology_dim != y.homology_dim || x.dim_domain != y.dim_domain)
            .map(|(x, y)| (*x, *y))
    } else {
        None
    };
    Comparison {
        equal: ranks_equal && first_homology_difference.is_none(),
        ranks,
        first_homology_difference,
    }
}
