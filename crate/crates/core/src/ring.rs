//! Arithmetic in `R = k[x_1..x_n]/I` where `I` is generated by quadratic monomials.
//!
//! Variables are 1-based throughout the public API (`x_1` is label `1`), matching
//! the ring spec files. A generator `(i, j)` with `i <= j` stands for `x_i x_j`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{Field, FieldError, Scalar};

#[derive(Debug, Error)]
pub enum RingError {
    #[error("invalid ring spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("operands belong to rings with different variable counts ({0} and {1})")]
    ArityMismatch(usize, usize),
    #[error("failed to read ring spec: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed ring spec JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// Number of variables plus the normalized set of quadratic monomial generators.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawRingSpec", into = "RawRingSpec")]
pub struct RingSpec {
    num_vars: usize,
    generators: BTreeSet<(usize, usize)>,
}

/// On-disk form: `{"variables": n, "generators": [[i, j], ...]}`, 1-based, unnormalized.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawRingSpec {
    variables: usize,
    generators: Vec<[usize; 2]>,
}

impl TryFrom<RawRingSpec> for RingSpec {
    type Error = RingError;

    fn try_from(raw: RawRingSpec) -> Result<Self, Self::Error> {
        let pairs: Vec<_> = raw.generators.iter().map(|&[i, j]| (i, j)).collect();
        RingSpec::normalize(&pairs, raw.variables)
    }
}

impl From<RingSpec> for RawRingSpec {
    fn from(spec: RingSpec) -> Self {
        RawRingSpec {
            variables: spec.num_vars,
            generators: spec.generators.iter().map(|&(i, j)| [i, j]).collect(),
        }
    }
}

impl RingSpec {
    /// Sorts each pair, dedups, and checks every index lies in `1..=n`.
    pub fn normalize(raw_pairs: &[(usize, usize)], n: usize) -> Result<Self, RingError> {
        if n == 0 {
            return Err(RingError::InvalidSpec("at least one variable is required".into()));
        }
        let mut generators = BTreeSet::new();
        for &(a, b) in raw_pairs {
            for idx in [a, b] {
                if idx == 0 || idx > n {
                    return Err(RingError::InvalidSpec(format!(
                        "generator x{a}x{b} uses index {idx} outside 1..={n}"
                    )));
                }
            }
            generators.insert((a.min(b), a.max(b)));
        }
        Ok(RingSpec { num_vars: n, generators })
    }

    pub fn from_json(text: &str) -> Result<Self, RingError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, RingError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("ring spec serializes")
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn generators(&self) -> &BTreeSet<(usize, usize)> {
        &self.generators
    }

    /// `true` iff `x_i x_j ∈ I`.
    pub fn kills(&self, i: usize, j: usize) -> bool {
        self.generators.contains(&(i.min(j), i.max(j)))
    }

    /// Labels `j` with `x_i x_j ∈ I`, ascending.
    pub fn annihilating_labels(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (1..=self.num_vars).filter(move |&j| self.kills(i, j))
    }

    /// `true` iff `x_i` divides some generator.
    pub fn is_factor(&self, i: usize) -> bool {
        self.generators.iter().any(|&(a, b)| a == i || b == i)
    }

    pub fn reduce_monomial(&self, m: &Monomial) -> Option<Monomial> {
        m.is_admissible(self).then(|| m.clone())
    }

    /// Admissible monomials of degree exactly `d`, largest exponent vector first.
    pub fn enumerate_basis(&self, d: usize) -> Vec<Monomial> {
        let mut out = Vec::new();
        let mut exps = vec![0u32; self.num_vars];
        self.fill_basis(0, d as u32, &mut exps, &mut out);
        out
    }

    fn fill_basis(&self, var: usize, remaining: u32, exps: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if var + 1 == self.num_vars {
            exps[var] = remaining;
            if self.compatible(var, remaining, exps) {
                out.push(Monomial(exps.clone()));
            }
            exps[var] = 0;
            return;
        }
        for e in (0..=remaining).rev() {
            if !self.compatible(var, e, exps) {
                continue;
            }
            exps[var] = e;
            self.fill_basis(var + 1, remaining - e, exps, out);
            exps[var] = 0;
        }
    }

    /// Can `x_{var+1}^e` join the exponents already fixed for earlier variables?
    fn compatible(&self, var: usize, e: u32, exps: &[u32]) -> bool {
        if e == 0 {
            return true;
        }
        let label = var + 1;
        if e >= 2 && self.kills(label, label) {
            return false;
        }
        (0..var).all(|other| exps[other] == 0 || !self.kills(other + 1, label))
    }

    pub fn hilbert_function(&self, d_max: usize) -> Vec<usize> {
        (0..=d_max).map(|d| self.enumerate_basis(d).len()).collect()
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k[x1..x{}]/(", self.num_vars)?;
        for (idx, (i, j)) in self.generators.iter().enumerate() {
            if idx > 0 {
                f.write_str(", ")?;
            }
            if i == j {
                write!(f, "x{i}^2")?;
            } else {
                write!(f, "x{i}x{j}")?;
            }
        }
        f.write_str(")")
    }
}

/// Exponent vector of length `n`. Ordered lexicographically on the exponents.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    /// The variable `x_label` (1-based).
    pub fn var(n: usize, label: usize) -> Self {
        let mut m = Self::one(n);
        m.0[label - 1] = 1;
        m
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn exponent(&self, label: usize) -> u32 {
        self.0[label - 1]
    }

    pub fn is_admissible(&self, spec: &RingSpec) -> bool {
        spec.generators.iter().all(|&(i, j)| {
            if i == j {
                self.0[i - 1] < 2
            } else {
                self.0[i - 1] == 0 || self.0[j - 1] == 0
            }
        })
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn mul_var(&self, label: usize) -> Monomial {
        let mut m = self.clone();
        m.0[label - 1] += 1;
        m
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree() == 0 {
            return f.write_str("1");
        }
        let mut first = true;
        for (idx, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            write!(f, "x{}", idx + 1)?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// A sparse `k`-linear combination of admissible monomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingElement {
    field: Field,
    terms: BTreeMap<Monomial, Scalar>,
}

impl RingElement {
    pub fn zero(field: Field) -> Self {
        RingElement { field, terms: BTreeMap::new() }
    }

    pub fn one(spec: &RingSpec, field: Field) -> Self {
        Self::monomial(spec, field, Monomial::one(spec.num_vars()), Scalar::one(field))
    }

    pub fn var(spec: &RingSpec, field: Field, label: usize) -> Self {
        Self::monomial(spec, field, Monomial::var(spec.num_vars(), label), Scalar::one(field))
    }

    /// `c · m`, reduced (zero if `m ∈ I`).
    pub fn monomial(spec: &RingSpec, field: Field, m: Monomial, c: Scalar) -> Self {
        let mut out = Self::zero(field);
        if let Some(m) = spec.reduce_monomial(&m) {
            if !c.is_zero() {
                out.terms.insert(m, c);
            }
        }
        out
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Scalar> {
        &self.terms
    }

    fn accumulate(&mut self, m: Monomial, c: Scalar) -> Result<(), RingError> {
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(slot) => {
                if !c.is_zero() {
                    slot.insert(c);
                }
            }
            Entry::Occupied(mut slot) => {
                let sum = slot.get().try_add(&c)?;
                if sum.is_zero() {
                    slot.remove();
                } else {
                    *slot.get_mut() = sum;
                }
            }
        }
        Ok(())
    }

    pub fn add(&self, other: &RingElement) -> Result<RingElement, RingError> {
        if self.field != other.field {
            return Err(FieldError::Mismatch(self.field, other.field).into());
        }
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.accumulate(m.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn neg(&self) -> RingElement {
        RingElement {
            field: self.field,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect(),
        }
    }

    /// Distributive product with every product monomial reduced modulo `I`.
    pub fn multiply(spec: &RingSpec, a: &RingElement, b: &RingElement) -> Result<RingElement, RingError> {
        if a.field != b.field {
            return Err(FieldError::Mismatch(a.field, b.field).into());
        }
        let mut out = RingElement::zero(a.field);
        for (ma, ca) in &a.terms {
            if ma.0.len() != spec.num_vars() {
                return Err(RingError::ArityMismatch(ma.0.len(), spec.num_vars()));
            }
            for (mb, cb) in &b.terms {
                if mb.0.len() != spec.num_vars() {
                    return Err(RingError::ArityMismatch(mb.0.len(), spec.num_vars()));
                }
                if let Some(m) = spec.reduce_monomial(&ma.mul(mb)) {
                    out.accumulate(m, ca.try_mul(cb)?)?;
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            if idx > 0 {
                f.write_str(" + ")?;
            }
            if c.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{c}*{m}")?;
            }
        }
        Ok(())
    }
}
