//! PMDS verification: an exhaustive oracle over erasure patterns and fast checks built
//! from unit tests over index tuples.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::construction::{CodeParams, ErasurePattern};

mod eval;
mod fast;
mod moore;
mod oracle;
mod profile;

pub use eval::{Evaluator, Gf2k};
pub use fast::{check_fast, check_special_combo_1_4, ComboVerdict};
pub use moore::{moore_determinant, moore_matrix};
pub use oracle::{
    count_patterns, oracle_is_correcting, oracle_is_correcting_with, oracle_is_pmds, oracle_is_pmds_with,
    pattern_is_correctable, OracleOptions, DEFAULT_BUDGET,
};
pub use profile::{enumerate_profiles, odd_profiles, reduce_profile_odd, ErasureProfile};

/// Which test rejected a code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Condition {
    /// Sum of `x^k` over an odd-profile pattern with `stage` global parities is not a unit.
    OddSum { stage: usize },
    /// `1 + x^l1 + ... + x^lk` over `size` columns of one row is not a unit.
    RowOddSum { size: usize },
    /// The two-row quadratic form for two row parities and two global parities.
    TwoRowQuadratic,
    /// 3x3 determinant for three erasures in one row and two in another.
    TripleAndPair,
    /// 3x3 determinant for two erasures in each of three rows.
    ThreePairs,
    /// Three erasures in one row of the row/column construction.
    ThreeInRow,
    /// `1 + x^d` is not a unit.
    Binomial,
    /// Exhaustive search found a singular pattern.
    Oracle,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::OddSum { stage } => write!(f, "odd-sum[s={stage}]"),
            Condition::RowOddSum { size } => write!(f, "row-odd-sum[{size}]"),
            Condition::TwoRowQuadratic => f.write_str("two-row-quadratic"),
            Condition::TripleAndPair => f.write_str("det3[triple,pair]"),
            Condition::ThreePairs => f.write_str("det3[pair,pair,pair]"),
            Condition::ThreeInRow => f.write_str("three-in-row"),
            Condition::Binomial => f.write_str("binomial"),
            Condition::Oracle => f.write_str("oracle"),
        }
    }
}

impl Serialize for Condition {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Fast,
    Oracle,
}

/// Outcome of a PMDS check. A negative verdict always carries a witness whose erasure
/// submatrix was confirmed singular.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PmdsVerdict {
    pub is_pmds: bool,
    pub failing_profile: Option<ErasureProfile>,
    pub witness: Option<ErasurePattern>,
    pub failed_condition: Option<Condition>,
    pub method: Method,
}

impl PmdsVerdict {
    pub(crate) fn pass(method: Method) -> Self {
        PmdsVerdict { is_pmds: true, failing_profile: None, witness: None, failed_condition: None, method }
    }

    pub(crate) fn fail(params: &CodeParams, witness: ErasurePattern, condition: Condition, method: Method) -> Self {
        PmdsVerdict {
            is_pmds: false,
            failing_profile: ErasureProfile::of_pattern(&witness, params.r()),
            witness: Some(witness),
            failed_condition: Some(condition),
            method,
        }
    }

    /// `key: value` lines.
    pub fn to_text(&self, params: &CodeParams) -> String {
        let mut out = format!("code: {params}\nPMDS: {}\n", if self.is_pmds { "yes" } else { "no" });
        if let Some(c) = &self.failed_condition {
            out += &format!("failed condition: {c}\n");
        }
        if let Some(p) = &self.failing_profile {
            out += &format!("failing profile: {p}\n");
        }
        if let Some(w) = &self.witness {
            out += &format!("witness: {w}\n");
        }
        out += match self.method {
            Method::Fast => "method: fast\n",
            Method::Oracle => "method: oracle\n",
        };
        out
    }

    pub fn to_json(&self, params: &CodeParams) -> serde_json::Value {
        serde_json::json!({
            "params": {
                "m": params.m(),
                "n": params.n(),
                "r": params.r(),
                "s": params.s(),
                "variant": params.variant().cli_name(),
                "modulus": params.ring().to_string(),
            },
            "is_pmds": self.is_pmds,
            "failed_condition": self.failed_condition,
            "failing_profile": self.failing_profile,
            "witness": self.witness.as_ref().map(|w| w.positions().iter().map(|p| [p.row, p.col]).collect::<Vec<_>>()),
            "method": self.method,
        })
    }
}
