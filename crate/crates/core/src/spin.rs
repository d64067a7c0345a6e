use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A spin quantum number stored as the integer `2J`.
///
/// Accepts `"1/2"`, `"0.5"`, `"1"`, `"3/2"`, `"1.5"` and so on. Storing twice the
/// spin keeps comparisons exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Spin(u32);

impl Spin {
    pub const HALF: Spin = Spin(1);
    pub const ONE: Spin = Spin(2);

    pub fn from_twice(twice: u32) -> Result<Self> {
        if twice == 0 {
            return Err(Error::InvalidSpin("0".into()));
        }
        Ok(Spin(twice))
    }

    /// `2J`.
    pub fn twice(self) -> u32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    /// Hilbert-space dimension `2J + 1`.
    pub fn dim(self) -> usize {
        self.0 as usize + 1
    }

    /// Number of SU(2J+1) generators, `4J(J+1) = D^2 - 1`.
    pub fn generator_count(self) -> usize {
        let d = self.dim();
        d * d - 1
    }

    pub fn is_integer(self) -> bool {
        self.0.is_multiple_of(2)
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl FromStr for Spin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let bad = || Error::InvalidSpin(s.to_string());
        let twice = if let Some((num, den)) = t.split_once('/') {
            let num: u32 = num.trim().parse().map_err(|_| bad())?;
            match den.trim() {
                "1" => num.checked_mul(2).ok_or_else(bad)?,
                "2" => num,
                _ => return Err(bad()),
            }
        } else if let Ok(k) = t.parse::<u32>() {
            k.checked_mul(2).ok_or_else(bad)?
        } else {
            let x: f64 = t.parse().map_err(|_| bad())?;
            let tw = 2.0 * x;
            if !tw.is_finite() || tw < 0.5 || (tw - tw.round()).abs() > 1e-9 || tw > u32::MAX as f64 {
                return Err(bad());
            }
            tw.round() as u32
        };
        Spin::from_twice(twice).map_err(|_| bad())
    }
}

impl Serialize for Spin {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Spin {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
