//! Integer capacity units.
//!
//! All link and flow quantities are carried as whole kilobits per second.
//! One Mbps is exactly 1000 units, so decimal Mbps values with up to three
//! fractional digits (2.2, 3.3, 0.028) convert without rounding.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Kilobits per second in one megabit per second.
pub const KBPS_PER_MBPS: u64 = 1000;

/// A non-negative capacity or flow value in kbps.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct CapacityKbps(u64);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CapacityError {
    #[error("capacity arithmetic overflowed")]
    Overflow,
    #[error("capacity arithmetic underflowed")]
    Underflow,
    #[error("`{0}` is not a non-negative Mbps value with at most 3 decimals")]
    Invalid(String),
}

impl CapacityKbps {
    pub const ZERO: CapacityKbps = CapacityKbps(0);

    pub const fn from_kbps(kbps: u64) -> Self {
        CapacityKbps(kbps)
    }

    pub fn from_mbps(mbps: u64) -> Result<Self, CapacityError> {
        mbps.checked_mul(KBPS_PER_MBPS)
            .map(CapacityKbps)
            .ok_or(CapacityError::Overflow)
    }

    pub const fn kbps(self) -> u64 {
        self.0
    }

    /// Lossy view in Mbps, for reporting only.
    pub fn as_mbps_f64(self) -> f64 {
        self.0 as f64 / KBPS_PER_MBPS as f64
    }

    pub fn checked_add(self, other: Self) -> Result<Self, CapacityError> {
        self.0
            .checked_add(other.0)
            .map(CapacityKbps)
            .ok_or(CapacityError::Overflow)
    }

    pub fn checked_sub(self, other: Self) -> Result<Self, CapacityError> {
        self.0
            .checked_sub(other.0)
            .map(CapacityKbps)
            .ok_or(CapacityError::Underflow)
    }

    pub fn checked_sum<I: IntoIterator<Item = Self>>(iter: I) -> Result<Self, CapacityError> {
        iter.into_iter()
            .try_fold(CapacityKbps::ZERO, |acc, c| acc.checked_add(c))
    }

    /// Parses a decimal Mbps literal such as `2.2`, `5`, `5.0` or `0.028`.
    ///
    /// Exponents, signs and more than three fractional digits are rejected;
    /// trailing zeros beyond the third decimal are tolerated.
    pub fn parse_mbps(text: &str) -> Result<Self, CapacityError> {
        let invalid = || CapacityError::Invalid(text.to_string());
        let (whole, frac) = match text.split_once('.') {
            Some((w, f)) => (w, f),
            None => (text, ""),
        };
        if whole.is_empty() && frac.is_empty() {
            return Err(invalid());
        }
        if !whole.bytes().all(|b| b.is_ascii_digit()) || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(invalid());
        }
        let frac = frac.trim_end_matches('0');
        if frac.len() > 3 {
            return Err(invalid());
        }
        let whole: u64 = if whole.is_empty() {
            0
        } else {
            whole.parse().map_err(|_| invalid())?
        };
        let mut milli: u64 = 0;
        for (i, b) in frac.bytes().enumerate() {
            milli += u64::from(b - b'0') * 10u64.pow(2 - i as u32);
        }
        whole
            .checked_mul(KBPS_PER_MBPS)
            .and_then(|k| k.checked_add(milli))
            .map(CapacityKbps)
            .ok_or(CapacityError::Overflow)
    }

    /// Shortest exact decimal Mbps rendering: `2200` kbps prints as `2.2`.
    pub fn to_mbps_string(self) -> String {
        let whole = self.0 / KBPS_PER_MBPS;
        let milli = self.0 % KBPS_PER_MBPS;
        if milli == 0 {
            return whole.to_string();
        }
        let frac = format!("{milli:03}");
        format!("{whole}.{}", frac.trim_end_matches('0'))
    }
}

impl FromStr for CapacityKbps {
    type Err = CapacityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CapacityKbps::parse_mbps(s)
    }
}

impl fmt::Display for CapacityKbps {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} kbps", self.0)
    }
}

impl From<CapacityKbps> for u64 {
    fn from(c: CapacityKbps) -> u64 {
        c.0
    }
}
