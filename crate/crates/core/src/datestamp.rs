use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Datelike, Days, NaiveDate, Utc};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid datestamp {0:?}, expected YYYY-MM-DD")]
pub struct DatestampError(pub String);

/// A day-granular UTC calendar date, rendered `YYYY-MM-DD`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Datestamp(NaiveDate);

impl Datestamp {
    pub fn from_ymd(year: i32, month: u32, day: u32) -> Option<Self> {
        if !(1000..=9999).contains(&year) {
            return None;
        }
        NaiveDate::from_ymd_opt(year, month, day).map(Self)
    }

    /// The calendar date of `at` in UTC.
    pub fn of(at: DateTime<Utc>) -> Self {
        Self(at.date_naive())
    }

    pub fn date(self) -> NaiveDate {
        self.0
    }

    pub fn year(self) -> i32 {
        self.0.year()
    }

    pub fn pred(self) -> Self {
        Self(self.0 - Days::new(1))
    }

    pub fn succ(self) -> Self {
        Self(self.0 + Days::new(1))
    }

    pub fn add_days(self, days: u64) -> Self {
        Self(self.0 + Days::new(days))
    }
}

impl fmt::Display for Datestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.format("%Y-%m-%d"))
    }
}

impl FromStr for Datestamp {
    type Err = DatestampError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || DatestampError(s.to_owned());
        let b = s.as_bytes();
        let shape_ok = b.len() == 10
            && b[4] == b'-'
            && b[7] == b'-'
            && b.iter()
                .enumerate()
                .all(|(i, c)| i == 4 || i == 7 || c.is_ascii_digit());
        if !shape_ok {
            return Err(err());
        }
        let year = s[..4].parse().map_err(|_| err())?;
        let month = s[5..7].parse().map_err(|_| err())?;
        let day = s[8..].parse().map_err(|_| err())?;
        Self::from_ymd(year, month, day).ok_or_else(err)
    }
}

impl Serialize for Datestamp {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Datestamp {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_and_render() {
        let d: Datestamp = "2001-01-25".parse().unwrap();
        assert_eq!(d.to_string(), "2001-01-25");
        assert_eq!(d.pred().to_string(), "2001-01-24");
        assert_eq!("2001-03-01".parse::<Datestamp>().unwrap().pred().to_string(), "2001-02-28");
        for bad in ["2001-1-25", "2001-02-30", "01-01-2001", "2001/01/25", "2001-01-25T00", ""] {
            assert!(bad.parse::<Datestamp>().is_err(), "{bad}");
        }
    }

    proptest! {
        #[test]
        fn ordering_matches_rendering(a in 0u64..40_000, b in 0u64..40_000) {
            let base = Datestamp::from_ymd(1991, 8, 1).unwrap();
            let (da, db) = (base.add_days(a), base.add_days(b));
            prop_assert_eq!(da.cmp(&db), a.cmp(&b));
            prop_assert_eq!(da.to_string().len(), 10);
            prop_assert_eq!(da.to_string().cmp(&db.to_string()), a.cmp(&b));
            prop_assert_eq!(da.to_string().parse::<Datestamp>().unwrap(), da);
        }
    }
}
