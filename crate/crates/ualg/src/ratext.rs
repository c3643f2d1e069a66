//! Exact extended nonnegative rationals: `ℚ≥0 ∪ {∞}`.
//!
//! All quantitative machinery runs on these instead of floats. Exactness
//! matters twice over: the tightening fixpoints in [`crate::quantalg`]
//! terminate because entries move on a common-denominator grid, and proof
//! reconstruction needs bound arithmetic to be reversible.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// A nonnegative rational or infinity. Addition absorbs into infinity;
/// the order places infinity above every finite value.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Ext {
    Finite(BigRational),
    Infinite,
}

impl Ext {
    /// Zero.
    pub fn zero() -> Self {
        Ext::Finite(BigRational::zero())
    }

    /// `p/q` in lowest terms. Fails on `q == 0` or a negative value.
    pub fn ratio(p: i64, q: i64) -> Result<Self, Error> {
        if q == 0 {
            return Err(Error::malformed("zero denominator"));
        }
        let r = BigRational::new(BigInt::from(p), BigInt::from(q));
        Ext::from_rational(r)
    }

    /// Wraps a rational, rejecting negatives.
    pub fn from_rational(r: BigRational) -> Result<Self, Error> {
        if r.is_negative() {
            Err(Error::NegativeEpsilon(r.to_string()))
        } else {
            Ok(Ext::Finite(r))
        }
    }

    /// A whole number.
    pub fn int(n: u64) -> Self {
        Ext::Finite(BigRational::from(BigInt::from(n)))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Ext::Finite(r) if r.is_zero())
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Ext::Infinite)
    }
}

impl Add<&Ext> for &Ext {
    type Output = Ext;

    fn add(self, rhs: &Ext) -> Ext {
        match (self, rhs) {
            (Ext::Finite(a), Ext::Finite(b)) => Ext::Finite(a + b),
            _ => Ext::Infinite,
        }
    }
}

impl PartialOrd for Ext {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ext {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Ext::Finite(a), Ext::Finite(b)) => a.cmp(b),
            (Ext::Finite(_), Ext::Infinite) => Ordering::Less,
            (Ext::Infinite, Ext::Finite(_)) => Ordering::Greater,
            (Ext::Infinite, Ext::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::Finite(r) => write!(f, "{r}"),
            Ext::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for Ext {
    type Err = Error;

    /// Accepts `inf`, an integer, or `p/q`. Negative values are rejected.
    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s == "∞" {
            return Ok(Ext::Infinite);
        }
        let r = BigRational::from_str(s)
            .map_err(|e| Error::malformed(format!("bad rational `{s}`: {e}")))?;
        Ext::from_rational(r)
    }
}

impl Serialize for Ext {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Ext {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct V;
        impl de::Visitor<'_> for V {
            type Value = Ext;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "a string like \"3/4\" or \"inf\", or a nonnegative integer")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Ext, E> {
                Ext::from_str(v).map_err(E::custom)
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Ext, E> {
                Ok(Ext::int(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Ext, E> {
                u64::try_from(v).map(Ext::int).map_err(|_| {
                    E::custom(Error::NegativeEpsilon(v.to_string()))
                })
            }
        }
        deserializer.deserialize_any(V)
    }
}
