//! Per-row erasure profiles: how many erasures beyond the row parities each affected row has.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::construction::ErasurePattern;
use crate::error::VerifyError;

/// Ordered list of positive parts, one per affected row (rows taken top to bottom).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct ErasureProfile {
    parts: Vec<usize>,
}

impl ErasureProfile {
    pub fn new(parts: Vec<usize>) -> Result<Self, VerifyError> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(VerifyError::BadProfile(format!("{parts:?} must be nonempty with positive parts")));
        }
        Ok(ErasureProfile { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn sum(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn rows(&self) -> usize {
        self.parts.len()
    }

    pub fn is_odd(&self) -> bool {
        self.parts.iter().all(|p| p % 2 == 1)
    }

    /// The profile of a pattern given `r` row parities. Rows with at most `r` erasures are
    /// skipped; `None` when no row has more than `r`.
    pub fn of_pattern(pattern: &ErasurePattern, r: usize) -> Option<Self> {
        let parts: Vec<usize> = pattern.by_row().iter().filter(|(_, c)| c.len() > r).map(|(_, c)| c.len() - r).collect();
        (!parts.is_empty()).then_some(ErasureProfile { parts })
    }
}

impl TryFrom<Vec<usize>> for ErasureProfile {
    type Error = VerifyError;
    fn try_from(parts: Vec<usize>) -> Result<Self, VerifyError> {
        ErasureProfile::new(parts)
    }
}

impl From<ErasureProfile> for Vec<usize> {
    fn from(p: ErasureProfile) -> Vec<usize> {
        p.parts
    }
}

impl fmt::Display for ErasureProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl FromStr for ErasureProfile {
    type Err = VerifyError;
    fn from_str(s: &str) -> Result<Self, VerifyError> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts = inner
            .split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|_| VerifyError::BadProfile(s.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        ErasureProfile::new(parts)
    }
}

/// All compositions of `s` with at most `m` parts, in descending lexicographic order.
pub fn enumerate_profiles(s: usize, m: usize) -> Vec<ErasureProfile> {
    fn rec(left: usize, max_parts: usize, cur: &mut Vec<usize>, out: &mut Vec<ErasureProfile>) {
        if left == 0 {
            out.push(ErasureProfile { parts: cur.clone() });
            return;
        }
        if cur.len() == max_parts {
            return;
        }
        for first in (1..=left).rev() {
            cur.push(first);
            rec(left - first, max_parts, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if s > 0 {
        rec(s, m, &mut Vec::new(), &mut out);
    }
    out
}

/// Only the profiles whose parts are all odd, same order.
pub fn odd_profiles(s: usize, m: usize) -> Vec<ErasureProfile> {
    enumerate_profiles(s, m).into_iter().filter(ErasureProfile::is_odd).collect()
}

/// Lowers every even part by one.
pub fn reduce_profile_odd(profile: &ErasureProfile) -> ErasureProfile {
    ErasureProfile { parts: profile.parts.iter().map(|&p| if p % 2 == 0 { p - 1 } else { p }).collect() }
}
