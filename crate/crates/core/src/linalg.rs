//! Exact rank of sparse integer matrices over `F_p` or `Q`.
//!
//! Graded pieces of the complexes built here are extremely sparse and split into
//! many independent blocks, so [`rank`] first separates the matrix into connected
//! components of its row/column incidence graph and eliminates each block densely.

use num_bigint::BigInt;
use num_traits::Zero;
use petgraph::unionfind::UnionFind;

use crate::field::{inv_mod, Field};

/// Sparse integer matrix in coordinate form. Duplicate coordinates are summed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(usize, usize, i64)>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, entries: Vec::new() }
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = IntMatrix::new(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged dense matrix");
            for (c, &v) in row.iter().enumerate() {
                if v != 0 {
                    m.push(r, c, v);
                }
            }
        }
        m
    }

    pub fn push(&mut self, row: usize, col: usize, value: i64) {
        debug_assert!(row < self.rows && col < self.cols);
        self.entries.push((row, col, value));
    }

    pub fn transpose(&self) -> IntMatrix {
        IntMatrix {
            rows: self.cols,
            cols: self.rows,
            entries: self.entries.iter().map(|&(r, c, v)| (c, r, v)).collect(),
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut d = vec![vec![0i64; self.cols]; self.rows];
        for &(r, c, v) in &self.entries {
            d[r][c] += v;
        }
        d
    }

    /// Splits into independent blocks, each as a small dense matrix.
    fn blocks(&self) -> Vec<Vec<Vec<i64>>> {
        if self.entries.is_empty() {
            return Vec::new();
        }
        // nodes 0..rows are rows, rows..rows+cols are columns
        let mut uf = UnionFind::<usize>::new(self.rows + self.cols);
        for &(r, c, _) in &self.entries {
            uf.union(r, self.rows + c);
        }
        let labels = uf.into_labeling();
        let mut block_of = std::collections::HashMap::new();
        let mut row_slot = vec![usize::MAX; self.rows];
        let mut col_slot = vec![usize::MAX; self.cols];
        let mut shapes: Vec<(usize, usize)> = Vec::new();
        for &(r, c, _) in &self.entries {
            let b = *block_of.entry(labels[r]).or_insert_with(|| {
                shapes.push((0, 0));
                shapes.len() - 1
            });
            if row_slot[r] == usize::MAX {
                row_slot[r] = shapes[b].0;
                shapes[b].0 += 1;
            }
            if col_slot[c] == usize::MAX {
                col_slot[c] = shapes[b].1;
                shapes[b].1 += 1;
            }
        }
        let mut dense: Vec<Vec<Vec<i64>>> =
            shapes.iter().map(|&(r, c)| vec![vec![0i64; c]; r]).collect();
        for &(r, c, v) in &self.entries {
            let b = block_of[&labels[r]];
            dense[b][row_slot[r]][col_slot[c]] += v;
        }
        dense
    }
}

/// Exact rank of `m` over `field`.
pub fn rank(m: &IntMatrix, field: Field) -> usize {
    m.blocks()
        .into_iter()
        .map(|block| match field {
            Field::Prime(p) => rank_mod_p(block, p),
            Field::Rational => rank_bareiss(block),
        })
        .sum()
}

/// Gaussian elimination over `F_p`, first-nonzero pivoting.
pub fn rank_mod_p(block: Vec<Vec<i64>>, p: u64) -> usize {
    let mut a: Vec<Vec<u64>> = block
        .into_iter()
        .map(|row| row.into_iter().map(|v| v.rem_euclid(p as i64) as u64).collect())
        .collect();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pivot) = (r..rows).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, pivot);
        let inv = inv_mod(a[r][c], p);
        for v in &mut a[r][c..] {
            *v = *v * inv % p;
        }
        let (top, rest) = a.split_at_mut(r + 1);
        let pivot_row = &top[r];
        for row in rest {
            let f = row[c];
            if f == 0 {
                continue;
            }
            for (v, &pv) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                *v = (*v + p - f * pv % p) % p;
            }
        }
        r += 1;
    }
    r
}

/// Fraction-free (Bareiss) elimination over the integers, which gives the rank over `Q`.
pub fn rank_bareiss(block: Vec<Vec<i64>>) -> usize {
    let mut a: Vec<Vec<BigInt>> = block
        .into_iter()
        .map(|row| row.into_iter().map(BigInt::from).collect())
        .collect();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut prev = BigInt::from(1);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pivot) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, pivot);
        let (top, rest) = a.split_at_mut(r + 1);
        let pivot_row = &top[r];
        for row in rest.iter_mut() {
            let lead = std::mem::take(&mut row[c]);
            for j in c + 1..cols {
                let v = &pivot_row[c] * &row[j] - &lead * &pivot_row[j];
                debug_assert!((&v % &prev).is_zero(), "Bareiss division must be exact");
                row[j] = v / &prev;
            }
        }
        prev = a[r][c].clone();
        r += 1;
    }
    r
}
