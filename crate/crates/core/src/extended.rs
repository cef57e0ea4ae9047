//! Extended reals `[-inf, +inf)` as used for Green-function values.
//!
//! The pole value is a dedicated variant rather than an IEEE infinity so that
//! arithmetic on finite values never silently produces `NaN`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtReal {
    NegInfinity,
    Finite(f64),
}

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal::Finite(0.0);

    /// Maps `f64::NEG_INFINITY` onto the sentinel; every other value is kept.
    pub fn from_f64(v: f64) -> Self {
        if v == f64::NEG_INFINITY {
            ExtReal::NegInfinity
        } else {
            ExtReal::Finite(v)
        }
    }

    /// `log(v)` for `v >= 0`, with `log 0 = -inf`.
    pub fn ln(v: f64) -> Self {
        if v <= 0.0 {
            ExtReal::NegInfinity
        } else {
            ExtReal::Finite(v.ln())
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::NegInfinity => f64::NEG_INFINITY,
            ExtReal::Finite(v) => v,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::NegInfinity => None,
            ExtReal::Finite(v) => Some(v),
        }
    }

    pub fn is_neg_infinite(self) -> bool {
        matches!(self, ExtReal::NegInfinity)
    }

    /// `exp` of the value, with `exp(-inf) = 0`.
    pub fn exp(self) -> f64 {
        match self {
            ExtReal::NegInfinity => 0.0,
            ExtReal::Finite(v) => v.exp(),
        }
    }

    pub fn max(self, other: ExtReal) -> ExtReal {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Absolute difference; two poles are at distance zero, a pole and a finite
    /// value at distance `+inf`.
    pub fn abs_diff(self, other: ExtReal) -> f64 {
        match (self, other) {
            (ExtReal::NegInfinity, ExtReal::NegInfinity) => 0.0,
            (ExtReal::Finite(a), ExtReal::Finite(b)) => (a - b).abs(),
            _ => f64::INFINITY,
        }
    }

    /// Arithmetic mean in the extended reals: any pole makes the mean a pole.
    pub fn mean<I: IntoIterator<Item = ExtReal>>(values: I) -> ExtReal {
        let mut sum = 0.0;
        let mut n = 0usize;
        for v in values {
            match v {
                ExtReal::NegInfinity => return ExtReal::NegInfinity,
                ExtReal::Finite(x) => {
                    sum += x;
                    n += 1;
                }
            }
        }
        if n == 0 {
            ExtReal::ZERO
        } else {
            ExtReal::Finite(sum / n as f64)
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (ExtReal::NegInfinity, ExtReal::NegInfinity) => Some(Ordering::Equal),
            (ExtReal::NegInfinity, _) => Some(Ordering::Less),
            (_, ExtReal::NegInfinity) => Some(Ordering::Greater),
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.partial_cmp(b),
        }
    }
}

impl std::ops::Add for ExtReal {
    type Output = ExtReal;

    fn add(self, rhs: ExtReal) -> ExtReal {
        match (self, rhs) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a + b),
            _ => ExtReal::NegInfinity,
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInfinity => write!(f, "-inf"),
            ExtReal::Finite(v) => write!(f, "{v}"),
        }
    }
}

// JSON has no infinities: the pole is written as the string "-inf".
impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtReal::NegInfinity => s.serialize_str("-inf"),
            ExtReal::Finite(v) => s.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(ExtReal::Finite(v)),
            Repr::Str(s) if s == "-inf" => Ok(ExtReal::NegInfinity),
            Repr::Str(s) => Err(serde::de::Error::custom(format!(
                "expected a number or \"-inf\", got {s:?}"
            ))),
        }
    }
}
