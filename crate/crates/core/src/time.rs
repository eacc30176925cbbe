//! Event time and processing time share one integer time domain measured in
//! whole minutes since midnight of day 0.

use std::fmt;
use std::ops::{Add, Sub};
use std::str::FromStr;

use crate::error::{Error, Result};

/// A point in time, or the `Bottom` sentinel that precedes every finite
/// point. Variant order gives `Bottom < Minutes(_)` under the derived `Ord`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum Timestamp {
    #[default]
    Bottom,
    Minutes(i64),
}

impl Timestamp {
    pub const BOTTOM: Timestamp = Timestamp::Bottom;

    pub const fn from_minutes(minutes: i64) -> Self {
        Timestamp::Minutes(minutes)
    }

    /// `hm(8, 7)` is 8:07.
    pub const fn hm(hours: i64, minutes: i64) -> Self {
        Timestamp::Minutes(hours * 60 + minutes)
    }

    pub fn minutes(self) -> Option<i64> {
        match self {
            Timestamp::Bottom => None,
            Timestamp::Minutes(m) => Some(m),
        }
    }

    pub fn is_bottom(self) -> bool {
        matches!(self, Timestamp::Bottom)
    }

    pub fn checked_add(self, d: Duration) -> Option<Timestamp> {
        match self {
            Timestamp::Bottom => None,
            Timestamp::Minutes(m) => m.checked_add(d.0).map(Timestamp::Minutes),
        }
    }

    pub fn checked_sub(self, d: Duration) -> Option<Timestamp> {
        match self {
            Timestamp::Bottom => None,
            Timestamp::Minutes(m) => m.checked_sub(d.0).map(Timestamp::Minutes),
        }
    }
}

impl Add<Duration> for Timestamp {
    type Output = Timestamp;

    /// Panics on `Bottom` or overflow; use [`Timestamp::checked_add`] for
    /// untrusted operands.
    fn add(self, d: Duration) -> Timestamp {
        self.checked_add(d).expect("timestamp arithmetic on BOTTOM or overflow")
    }
}

impl Sub<Duration> for Timestamp {
    type Output = Timestamp;

    fn sub(self, d: Duration) -> Timestamp {
        self.checked_sub(d).expect("timestamp arithmetic on BOTTOM or overflow")
    }
}

impl fmt::Display for Timestamp {
    /// `H:MM`, hours unpadded. Negative instants render with a leading `-`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Timestamp::Bottom => f.write_str("BOTTOM"),
            Timestamp::Minutes(m) => {
                let sign = if m < 0 { "-" } else { "" };
                let abs = m.unsigned_abs();
                write!(f, "{sign}{}:{:02}", abs / 60, abs % 60)
            }
        }
    }
}

impl FromStr for Timestamp {
    type Err = Error;

    /// Accepts `H:MM` and `HH:MM` (and a leading `-`). `BOTTOM` parses to the
    /// sentinel.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("invalid time '{s}', expected H:MM"));
        if s.eq_ignore_ascii_case("bottom") {
            return Ok(Timestamp::Bottom);
        }
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (h, m) = body.split_once(':').ok_or_else(bad)?;
        if h.is_empty()
            || m.len() != 2
            || !h.bytes().all(|b| b.is_ascii_digit())
            || !m.bytes().all(|b| b.is_ascii_digit())
        {
            return Err(bad());
        }
        let hours: i64 = h.parse().map_err(|_| bad())?;
        let mins: i64 = m.parse().map_err(|_| bad())?;
        if mins >= 60 {
            return Err(bad());
        }
        let total = hours.checked_mul(60).and_then(|x| x.checked_add(mins)).ok_or_else(bad)?;
        Ok(Timestamp::Minutes(if neg { -total } else { total }))
    }
}

/// A non-negative span of whole minutes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Duration(i64);

impl Duration {
    pub const ZERO: Duration = Duration(0);

    pub fn minutes(m: i64) -> Result<Self> {
        if m < 0 {
            return Err(Error::Validation(format!("negative duration {m} minutes")));
        }
        Ok(Duration(m))
    }

    pub fn as_minutes(self) -> i64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Duration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} MINUTES", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bottom_precedes_everything() {
        assert!(Timestamp::BOTTOM < Timestamp::from_minutes(i64::MIN));
        assert!(Timestamp::BOTTOM < Timestamp::hm(0, 0));
    }

    #[test]
    fn parse_and_render() {
        let t: Timestamp = "8:07".parse().unwrap();
        assert_eq!(t, Timestamp::hm(8, 7));
        assert_eq!(t.to_string(), "8:07");
        assert_eq!("08:07".parse::<Timestamp>().unwrap(), t);
        assert_eq!("0:00".parse::<Timestamp>().unwrap().to_string(), "0:00");
        assert_eq!("-0:05".parse::<Timestamp>().unwrap(), Timestamp::from_minutes(-5));
        assert_eq!(Timestamp::from_minutes(-5).to_string(), "-0:05");
        assert!("8:7".parse::<Timestamp>().is_err());
        assert!("8:60".parse::<Timestamp>().is_err());
        assert!("x".parse::<Timestamp>().is_err());
    }

    #[test]
    fn arithmetic_is_exact() {
        let d = Duration::minutes(10).unwrap();
        assert_eq!(Timestamp::hm(8, 20) - d, Timestamp::hm(8, 10));
        assert_eq!(Timestamp::hm(8, 55) + d, Timestamp::hm(9, 5));
        assert_eq!(Timestamp::BOTTOM.checked_add(d), None);
        assert!(Duration::minutes(-1).is_err());
    }
}
