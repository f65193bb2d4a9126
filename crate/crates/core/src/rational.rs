//! Exact rationals for distances and control bounds.

use std::cmp::Ordering;
use std::fmt;

use num_rational::Ratio;
use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type Q = Ratio<i128>;

pub fn q(n: i128, d: i128) -> Q {
    Q::new(n, d)
}

pub fn qi(n: i128) -> Q {
    Q::from_integer(n)
}

/// Parses "3", "-2/5".
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let d: i128 = b.trim().parse().ok()?;
            if d == 0 {
                return None;
            }
            Some(Q::new(a.trim().parse().ok()?, d))
        }
        None => s.parse().ok().map(Q::from_integer),
    }
}

pub fn fmt_q(x: &Q) -> String {
    if *x.denom() == 1 {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Rationals serialize as strings so that JSON stays exact.
pub mod qser {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        fmt_q(x).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_q(&s).ok_or_else(|| serde::de::Error::custom(format!("bad rational {s:?}")))
    }
}

pub mod qvec {
    use super::*;

    pub fn serialize<S: Serializer>(x: &[Q], s: S) -> Result<S::Ok, S::Error> {
        x.iter().map(fmt_q).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Q>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter().map(|s| parse_q(s).ok_or_else(|| serde::de::Error::custom(format!("bad rational {s:?}")))).collect()
    }
}

pub mod qmat {
    use super::*;

    pub fn serialize<S: Serializer>(x: &[Vec<Q>], s: S) -> Result<S::Ok, S::Error> {
        x.iter().map(|r| r.iter().map(fmt_q).collect::<Vec<_>>()).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Q>>, D::Error> {
        let v = Vec::<Vec<String>>::deserialize(d)?;
        v.iter().map(|r| r.iter().map(|s| parse_q(s).ok_or_else(|| serde::de::Error::custom(format!("bad rational {s:?}")))).collect()).collect()
    }
}

/// A distance in `[0, ∞]`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dist {
    Finite(Q),
    Infinite,
}

impl Dist {
    pub fn zero() -> Dist {
        Dist::Finite(Q::zero())
    }

    pub fn finite(self) -> Option<Q> {
        match self {
            Dist::Finite(x) => Some(x),
            Dist::Infinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Dist::Finite(_))
    }

    pub fn plus(self, o: Dist) -> Dist {
        match (self, o) {
            (Dist::Finite(a), Dist::Finite(b)) => Dist::Finite(a + b),
            _ => Dist::Infinite,
        }
    }

    pub fn scale(self, c: Q) -> Dist {
        match self {
            Dist::Finite(a) => Dist::Finite(a * c),
            Dist::Infinite => Dist::Infinite,
        }
    }
}

impl PartialOrd for Dist {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dist {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Dist::Finite(a), Dist::Finite(b)) => a.cmp(b),
            (Dist::Finite(_), Dist::Infinite) => Ordering::Less,
            (Dist::Infinite, Dist::Finite(_)) => Ordering::Greater,
            (Dist::Infinite, Dist::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Debug for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dist::Finite(x) => write!(f, "{}", fmt_q(x)),
            Dist::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Dist {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_string().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Dist {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Dist, D::Error> {
        let s = String::deserialize(d)?;
        if s == "inf" {
            return Ok(Dist::Infinite);
        }
        parse_q(&s).map(Dist::Finite).ok_or_else(|| serde::de::Error::custom(format!("bad distance {s:?}")))
    }
}


pub mod opt_q_str {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Option<Q>, s: S) -> Result<S::Ok, S::Error> {
        x.as_ref().map(fmt_q).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Q>, D::Error> {
        let v = Option::<String>::deserialize(d)?;
        v.map(|s| parse_q(&s).ok_or_else(|| serde::de::Error::custom(format!("bad rational {s:?}")))).transpose()
    }
}
