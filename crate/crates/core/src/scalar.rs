//! Exact scalar fields.
//!
//! Everything numeric in the crate is generic over [`Field`], an exact ordered
//! field. The canonical instance is [`Rational`] (arbitrary precision); the
//! fixed-width ratio types also qualify but panic or wrap on overflow, so they
//! are only suitable for tiny inputs.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{Num, One, Signed, Zero};

pub type Rational = BigRational;

pub trait Field:
    Clone + Debug + Display + Num + Signed + PartialOrd + Ord + Send + Sync + 'static
{
    fn from_i64(value: i64) -> Self;

    fn is_integral(&self) -> bool;

    fn floor_value(&self) -> Self;

    /// `num / den`; panics if the value does not fit the field.
    fn from_bigint_ratio(num: &BigInt, den: &BigInt) -> Self;

    /// Converts to an arbitrary-precision rational.
    fn to_rational(&self) -> Rational;
}

impl<I> Field for Ratio<I>
where
    I: Integer + Signed + Clone + Debug + Display + From<i64> + Into<BigInt> + TryFrom<BigInt> + Send + Sync + 'static,
{
    fn from_i64(value: i64) -> Self {
        Ratio::from_integer(I::from(value))
    }

    fn is_integral(&self) -> bool {
        self.is_integer()
    }

    fn floor_value(&self) -> Self {
        self.floor()
    }

    fn from_bigint_ratio(num: &BigInt, den: &BigInt) -> Self {
        let convert = |v: &BigInt| I::try_from(v.clone()).ok().expect("value exceeds the field's range");
        Ratio::new(convert(num), convert(den))
    }

    fn to_rational(&self) -> Rational {
        Rational::new(self.numer().clone().into(), self.denom().clone().into())
    }
}

pub fn rational_from_i64(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Parses `p/q` or `p` (optionally signed).
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (numer, denom) = match text.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (text, "1"),
    };
    let numer = BigInt::from_str_radix(numer, 10).ok()?;
    let denom = BigInt::from_str_radix(denom, 10).ok()?;
    if denom.is_zero() {
        return None;
    }
    Some(Rational::new(numer, denom))
}

/// `"p/q"`, or `"p"` when the denominator is one.
pub fn format_rational<T: Field>(value: &T) -> String {
    let r = value.to_rational();
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn format_vector<T: Field>(values: &[T]) -> Vec<String> {
    values.iter().map(format_rational).collect()
}

pub fn dot<T: Field>(coeffs: &[i64], x: &[T]) -> T {
    coeffs
        .iter()
        .zip(x)
        .filter(|(c, _)| **c != 0)
        .fold(T::zero(), |acc, (c, v)| acc + T::from_i64(*c) * v.clone())
}

/// Serde helpers rendering rationals as strings.
pub mod serde_rational {
    use serde::ser::SerializeSeq;
    use serde::Serializer;

    use super::{format_rational, Field};

    pub fn serialize<T: Field, S: Serializer>(value: &T, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(value))
    }

    pub fn option<T: Field, S: Serializer>(value: &Option<T>, s: S) -> Result<S::Ok, S::Error> {
        match value {
            Some(v) => s.serialize_str(&format_rational(v)),
            None => s.serialize_none(),
        }
    }

    pub fn vec<T: Field, S: Serializer>(values: &[T], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(values.len()))?;
        for v in values {
            seq.serialize_element(&format_rational(v))?;
        }
        seq.end()
    }

    pub fn vec_of_vec<T: Field, S: Serializer>(values: &[Vec<T>], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(values.len()))?;
        for v in values {
            let row: Vec<String> = v.iter().map(format_rational).collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }

    pub fn option_vec<T: Field, S: Serializer>(
        values: &Option<Vec<T>>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        match values {
            Some(v) => vec(v, s),
            None => s.serialize_none(),
        }
    }
}
