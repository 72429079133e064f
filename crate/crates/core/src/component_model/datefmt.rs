//! Exact-pattern date formats built from `YYYY`, `MM` and `DD` tokens.

use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Token {
    Year,
    Month,
    Day,
}

impl Token {
    fn width(self) -> usize {
        match self {
            Token::Year => 4,
            Token::Month | Token::Day => 2,
        }
    }
}

/// A date pattern such as `YYYY-MM-DD` or `DD/MM/YYYY`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DateFormat {
    pattern: String,
    order: [Token; 3],
    separator: char,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unsupported date format `{0}`")]
pub struct BadDateFormat(pub String);

impl FromStr for DateFormat {
    type Err = BadDateFormat;

    fn from_str(pattern: &str) -> Result<Self, Self::Err> {
        let bad = || BadDateFormat(pattern.to_string());
        let separator = if pattern.contains('-') {
            '-'
        } else if pattern.contains('/') {
            '/'
        } else {
            return Err(bad());
        };
        let parts: Vec<&str> = pattern.split(separator).collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let mut order = [Token::Year; 3];
        for (slot, part) in order.iter_mut().zip(&parts) {
            *slot = match *part {
                "YYYY" => Token::Year,
                "MM" => Token::Month,
                "DD" => Token::Day,
                _ => return Err(bad()),
            };
        }
        let distinct = order.contains(&Token::Year) && order.contains(&Token::Month) && order.contains(&Token::Day);
        if !distinct {
            return Err(bad());
        }
        Ok(DateFormat {
            pattern: pattern.to_string(),
            order,
            separator,
        })
    }
}

impl Default for DateFormat {
    fn default() -> Self {
        DateFormat::iso()
    }
}

impl fmt::Display for DateFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pattern)
    }
}

impl DateFormat {
    pub fn iso() -> Self {
        "YYYY-MM-DD".parse().expect("iso pattern")
    }

    pub fn pattern(&self) -> &str {
        &self.pattern
    }

    /// Parses `text` only if it matches the pattern exactly (digit counts and separators).
    pub fn parse(&self, text: &str) -> Option<NaiveDate> {
        let parts: Vec<&str> = text.split(self.separator).collect();
        if parts.len() != 3 {
            return None;
        }
        let (mut y, mut m, mut d) = (0i32, 0u32, 0u32);
        for (token, part) in self.order.iter().zip(&parts) {
            if part.len() != token.width() || !part.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            let n: u32 = part.parse().ok()?;
            match token {
                Token::Year => y = n as i32,
                Token::Month => m = n,
                Token::Day => d = n,
            }
        }
        NaiveDate::from_ymd_opt(y, m, d)
    }

    pub fn format(&self, date: NaiveDate) -> String {
        let render = |t: &Token| match t {
            Token::Year => format!("{:04}", date.year()),
            Token::Month => format!("{:02}", date.month()),
            Token::Day => format!("{:02}", date.day()),
        };
        let sep = self.separator.to_string();
        self.order.iter().map(render).collect::<Vec<_>>().join(&sep)
    }
}

pub fn parse_iso(text: &str) -> Option<NaiveDate> {
    DateFormat::iso().parse(text)
}

/// First day of the month containing `date`.
pub fn month_start(date: NaiveDate) -> NaiveDate {
    date.with_day(1).expect("day 1 exists")
}

pub fn add_months(month: NaiveDate, delta: i32) -> NaiveDate {
    let total = month.year() * 12 + month.month0() as i32 + delta;
    NaiveDate::from_ymd_opt(total.div_euclid(12), total.rem_euclid(12) as u32 + 1, 1).expect("valid month")
}

pub fn month_label(month: NaiveDate) -> String {
    format!("{:04}-{:02}", month.year(), month.month())
}

pub fn days_in_month(month: NaiveDate) -> impl Iterator<Item = NaiveDate> {
    let next = add_months(month, 1);
    month.iter_days().take_while(move |d| *d < next)
}
