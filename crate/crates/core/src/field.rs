//! Coefficient fields: exact rationals and prime fields `F_p`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Prime used when no field is requested explicitly.
pub const DEFAULT_PRIME: u64 = 32003;

/// Residues are multiplied as `u64`, so the modulus must fit in 32 bits.
const MAX_PRIME: u64 = u32::MAX as u64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("prime {0} exceeds the supported bound {MAX_PRIME}")]
    PrimeTooLarge(u64),
    #[error("unrecognized field `{0}` (expected `q` or `fp:<prime>`)")]
    Unrecognized(String),
    #[error("operands live in different fields ({0} and {1})")]
    Mismatch(Field, Field),
}

/// The coefficient field `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Field {
    Rational,
    Prime(u64),
}

impl Field {
    /// Validates `p` and builds `F_p`. `p = 2` is accepted with a warning:
    /// in characteristic 2 every sign is invisible.
    pub fn prime(p: u64) -> Result<Self, FieldError> {
        if p > MAX_PRIME {
            return Err(FieldError::PrimeTooLarge(p));
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if p == 2 {
            log::warn!("working over F_2: sign conventions cannot be checked in characteristic 2");
        }
        Ok(Field::Prime(p))
    }

    pub fn characteristic(self) -> u64 {
        match self {
            Field::Rational => 0,
            Field::Prime(p) => p,
        }
    }
}

impl Default for Field {
    fn default() -> Self {
        Field::Prime(DEFAULT_PRIME)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => f.write_str("q"),
            Field::Prime(p) => write!(f, "fp:{p}"),
        }
    }
}

impl FromStr for Field {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("q") {
            return Ok(Field::Rational);
        }
        let p = s
            .strip_prefix("fp:")
            .and_then(|p| p.parse::<u64>().ok())
            .ok_or_else(|| FieldError::Unrecognized(s.to_string()))?;
        Field::prime(p)
    }
}

impl From<Field> for String {
    fn from(f: Field) -> String {
        f.to_string()
    }
}

impl TryFrom<String> for Field {
    type Error = FieldError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// An element of a [`Field`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    /// Always stored in lowest terms (guaranteed by `BigRational`).
    Rational(BigRational),
    /// `value` lies in `[0, modulus)`.
    Residue { value: u64, modulus: u64 },
}

impl Scalar {
    pub fn zero(field: Field) -> Self {
        Self::from_i64(field, 0)
    }

    pub fn one(field: Field) -> Self {
        Self::from_i64(field, 1)
    }

    pub fn from_i64(field: Field, v: i64) -> Self {
        match field {
            Field::Rational => Scalar::Rational(BigRational::from_integer(BigInt::from(v))),
            Field::Prime(p) => Scalar::Residue {
                value: v.rem_euclid(p as i64) as u64,
                modulus: p,
            },
        }
    }

    pub fn field(&self) -> Field {
        match self {
            Scalar::Rational(_) => Field::Rational,
            Scalar::Residue { modulus, .. } => Field::Prime(*modulus),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_zero(),
            Scalar::Residue { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_one(),
            Scalar::Residue { value, .. } => *value == 1,
        }
    }

    pub fn try_add(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Ok(Scalar::Rational(a + b)),
            (Scalar::Residue { value: a, modulus: p }, Scalar::Residue { value: b, modulus: q })
                if p == q =>
            {
                Ok(Scalar::Residue { value: (a + b) % p, modulus: *p })
            }
            _ => Err(FieldError::Mismatch(self.field(), other.field())),
        }
    }

    pub fn try_mul(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Ok(Scalar::Rational(a * b)),
            (Scalar::Residue { value: a, modulus: p }, Scalar::Residue { value: b, modulus: q })
                if p == q =>
            {
                Ok(Scalar::Residue { value: (a * b) % p, modulus: *p })
            }
            _ => Err(FieldError::Mismatch(self.field(), other.field())),
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(-a),
            Scalar::Residue { value, modulus } => Scalar::Residue {
                value: (modulus - value) % modulus,
                modulus: *modulus,
            },
        }
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        match self {
            Scalar::Rational(a) => Some(Scalar::Rational(a.recip())),
            Scalar::Residue { value, modulus } => Some(Scalar::Residue {
                value: inv_mod(*value, *modulus),
                modulus: *modulus,
            }),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(q) if q.is_integer() => write!(f, "{}", q.numer()),
            Scalar::Rational(q) => {
                let sign = if q.is_negative() { "-" } else { "" };
                write!(f, "{sign}{}/{}", q.numer().abs(), q.denom())
            }
            Scalar::Residue { value, .. } => write!(f, "{value}"),
        }
    }
}

/// Inverse of `a` modulo the prime `p` via Fermat.
pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a % p, p - 2, p)
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64 % p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

impl From<BigRational> for Scalar {
    fn from(q: BigRational) -> Self {
        Scalar::Rational(q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_field_names() {
        assert_eq!("q".parse::<Field>().unwrap(), Field::Rational);
        assert_eq!("fp:32003".parse::<Field>().unwrap(), Field::Prime(32003));
        assert_eq!("fp:4".parse::<Field>(), Err(FieldError::NotPrime(4)));
        assert!(matches!("z".parse::<Field>(), Err(FieldError::Unrecognized(_))));
        assert_eq!(Field::default().to_string(), "fp:32003");
    }

    #[test]
    fn characteristic_two_is_allowed() {
        assert_eq!(Field::prime(2).unwrap(), Field::Prime(2));
    }

    #[test]
    fn residues_stay_reduced() {
        let f = Field::Prime(7);
        let a = Scalar::from_i64(f, -1);
        assert_eq!(a, Scalar::Residue { value: 6, modulus: 7 });
        let b = a.try_mul(&a).unwrap();
        assert!(b.is_one());
        let inv3 = Scalar::from_i64(f, 3).inv().unwrap();
        assert!(inv3.try_mul(&Scalar::from_i64(f, 3)).unwrap().is_one());
        assert!(Scalar::zero(f).inv().is_none());
        assert!(a.try_add(&Scalar::one(f)).unwrap().is_zero());
    }

    #[test]
    fn rationals_reduce() {
        let half = Scalar::Rational(BigRational::new(2.into(), 4.into()));
        assert_eq!(half.to_string(), "1/2");
        let two = half.inv().unwrap();
        assert_eq!(two.to_string(), "2");
        assert_eq!(half.neg().to_string(), "-1/2");
    }

    #[test]
    fn mixing_fields_is_an_error() {
        let a = Scalar::one(Field::Rational);
        let b = Scalar::one(Field::Prime(5));
        assert!(matches!(a.try_add(&b), Err(FieldError::Mismatch(..))));
        let c = Scalar::one(Field::Prime(3));
        assert!(matches!(b.try_mul(&c), Err(FieldError::Mismatch(..))));
    }
}
