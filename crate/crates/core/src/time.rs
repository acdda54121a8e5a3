//! Random times on the grid `0..=T` with an explicit infinity.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A single value of a random time. `Infinite` orders after every grid time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Time {
    At(usize),
    Infinite,
}

impl Time {
    pub fn is_finite(self) -> bool {
        matches!(self, Time::At(_))
    }

    pub fn finite(self) -> Option<usize> {
        match self {
            Time::At(t) => Some(t),
            Time::Infinite => None,
        }
    }

    /// Grid index used to read a process at this time (`X_∞ := X_T`).
    pub fn clamp(self, horizon: usize) -> usize {
        match self {
            Time::At(t) => t.min(horizon),
            Time::Infinite => horizon,
        }
    }

    pub fn is_at(self, t: usize) -> bool {
        self == Time::At(t)
    }

    pub fn le(self, t: usize) -> bool {
        matches!(self, Time::At(s) if s <= t)
    }

    pub fn lt(self, t: usize) -> bool {
        matches!(self, Time::At(s) if s < t)
    }
}

impl fmt::Display for Time {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Time::At(t) => write!(f, "{t}"),
            Time::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Time {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Time::At(t) => serializer.serialize_u64(*t as u64),
            Time::Infinite => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Time {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct Visitor;
        impl serde::de::Visitor<'_> for Visitor {
            type Value = Time;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a nonnegative integer or \"inf\"")
            }
            fn visit_u64<E: serde::de::Error>(self, v: u64) -> Result<Time, E> {
                Ok(Time::At(v as usize))
            }
            fn visit_i64<E: serde::de::Error>(self, v: i64) -> Result<Time, E> {
                if v < 0 {
                    return Err(E::custom(format!("negative time value {v}")));
                }
                Ok(Time::At(v as usize))
            }
            fn visit_str<E: serde::de::Error>(self, v: &str) -> Result<Time, E> {
                if v == "inf" {
                    Ok(Time::Infinite)
                } else {
                    Err(E::custom(format!("unknown time literal {v:?}")))
                }
            }
        }
        deserializer.deserialize_any(Visitor)
    }
}

/// An arbitrary map from outcomes to `{0, …, T, ∞}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RandomTime(Vec<Time>);

impl RandomTime {
    pub fn new(values: Vec<Time>) -> Self {
        RandomTime(values)
    }

    pub fn constant(n: usize, value: Time) -> Self {
        RandomTime(vec![value; n])
    }

    /// Finite values as `Some(t)`, infinity as `None`.
    pub fn from_options(values: &[Option<usize>]) -> Self {
        RandomTime(
            values
                .iter()
                .map(|v| v.map_or(Time::Infinite, Time::At))
                .collect(),
        )
    }

    pub fn values(&self) -> &[Time] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn at(&self, outcome: usize) -> Time {
        self.0[outcome]
    }

    /// Checks every finite value lies in `0..=horizon`.
    pub fn validate(&self, n: usize, horizon: usize) -> Result<()> {
        if self.len() != n {
            return Err(Error::SizeMismatch {
                expected: n,
                found: self.len(),
            });
        }
        for (outcome, v) in self.0.iter().enumerate() {
            if let Time::At(value) = *v {
                if value > horizon {
                    return Err(Error::TimeOutOfRange {
                        outcome,
                        value,
                        horizon,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn indicator_eq(&self, t: usize) -> Vec<bool> {
        self.0.iter().map(|v| v.is_at(t)).collect()
    }

    pub fn indicator_finite(&self) -> Vec<bool> {
        self.0.iter().map(|v| v.is_finite()).collect()
    }

    pub fn is_everywhere_infinite(&self) -> bool {
        self.0.iter().all(|v| !v.is_finite())
    }

    /// Pointwise minimum.
    pub fn pointwise_min(&self, other: &RandomTime) -> RandomTime {
        RandomTime(self.0.iter().zip(&other.0).map(|(a, b)| *a.min(b)).collect())
    }
}

impl fmt::Display for RandomTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}
