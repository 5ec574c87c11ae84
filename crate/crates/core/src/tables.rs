//! Published PMDS tables as presets, and a runner that re-derives every verdict.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::construction::{CodeParams, Variant};
use crate::error::VerifyError;
use crate::ring::Ring;
use crate::verifier::{check_fast, oracle_is_pmds, PmdsVerdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    /// Squared construction, two global parities, irreducible moduli.
    Table1,
    /// Squared construction, two global parities, reducible `M_p`.
    Table2,
    /// Squared construction, three global parities, reducible `M_p`.
    Table3,
    /// Consecutive construction, three global parities, reducible `M_p`.
    Table4,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::Table1, Preset::Table2, Preset::Table3, Preset::Table4];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Table1 => "table1",
            Preset::Table2 => "table2",
            Preset::Table3 => "table3",
            Preset::Table4 => "table4",
        }
    }

    pub fn variant(self) -> Variant {
        match self {
            Preset::Table4 => Variant::Consecutive,
            _ => Variant::Squared,
        }
    }

    pub fn global_parities(self) -> usize {
        match self {
            Preset::Table1 | Preset::Table2 => 2,
            Preset::Table3 | Preset::Table4 => 3,
        }
    }

    pub fn entries(self) -> Vec<TableEntry> {
        match self {
            Preset::Table1 => parse_rows(TABLE1, true),
            Preset::Table2 => parse_rows(TABLE2, false),
            Preset::Table3 => parse_rows(TABLE3, false),
            Preset::Table4 => parse_rows(TABLE4, false),
        }
    }
}

impl Preset {
    /// Header of the modulus column.
    pub fn modulus_head(self) -> &'static str {
        if self == Preset::Table1 {
            "f"
        } else {
            "p"
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Preset::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| format!("unknown preset {s:?}; expected table1..table4"))
    }
}

// modulus: m/n[ N] ... ; a trailing N marks a published "not PMDS"
const TABLE1: &str = "
435: 5/5
567: 7/5
433: 10/5
1021: 20/6
1231: 10/7
3025: 21/6 15/7
6015: 29/6 25/7 22/8
5361: 13/10
15647: 67/6 58/7 50/8 24/9 22/10
227215: 404/6 346/7 303/8 269/9 242/10 164/11 160/12 59/16 45/17 53/18 24/20 19/22 21/23 18/24 17/25 16/26
";

const TABLE2: &str = "
17: 4/4
23: 3/7 4/5
31: 5/6N 6/5N
41: 5/8 6/6 8/5
43: 5/8 6/7
47: 4/11 5/9
71: 7/10 8/8 10/7
73: 6/12N 7/10N 8/9N 9/8N
79: 6/13 7/11 8/9
89: 8/11N 9/9N 11/8
97: 8/12 10/9 12/8
103: 9/11 10/10 11/9
109: 9/12 10/10 12/9
113: 10/11 11/10 12/9
127: 11/11 13/9
137: 11/12 12/11 13/10 15/9 16/8
151: 15/10 16/9
157: 12/13 13/12 14/11 15/10 16/9
167: 12/13 13/12 15/11 16/10
191: 13/14 14/13 17/11
193: 16/12
199: 14/14 16/12
223: 15/14 17/13
229: 15/15 16/14
233: 15/15 16/14
239: 15/15 16/14
241: 16/15
251: 16/15 25/10
257: 16/16 32/8
";

const TABLE3: &str = "
17: 4/4N
23: 3/7 4/5
31: 5/6N 6/5N
41: 5/8 6/6 8/5
43: 5/8N 6/7N
47: 4/11 5/9
71: 7/10 8/8 10/7
73: 6/12N 7/10N 8/9N 9/8N
79: 6/13 7/11 8/9
89: 8/11N 9/9N 11/8N
97: 8/12 10/9 12/8
103: 9/11 10/10 11/9
109: 9/12 10/10 12/9
113: 10/11 11/10 12/9
127: 11/11N 13/9N
137: 11/12 12/11
151: 15/10N 16/9N
157: 12/13 16/9
167: 16/10
191: 17/11
193: 16/12
199: 16/12
223: 17/13
229: 16/14 28/8
233: 23/10
239: 26/9
241: 16/15N 24/10N
251: 25/10
257: 16/16N 32/8N
";

const TABLE4: &str = "
17: 4/4N
23: 3/7N 4/5
31: 5/6N 6/5N
41: 5/8N 6/6 8/5
43: 5/8N 6/7N
47: 4/11 5/9
71: 7/10 8/8 10/7
73: 6/12N 7/10N 8/9N 9/8N
79: 6/13 7/11 8/9
89: 8/11N 9/9N 11/8N
97: 8/12 10/9 12/8
103: 9/11 10/10 11/9
109: 9/12 10/10 12/9
113: 10/11N 11/10N 12/9N
127: 11/11N 13/9N
137: 11/12 12/11 13/10 15/9 16/8
151: 15/10N 16/9N
157: 12/13 13/12 16/9
167: 16/10
191: 17/11
193: 16/12
199: 16/12
223: 17/13
229: 16/14 28/8
233: 23/10
239: 26/9
241: 24/10N
251: 25/10
257: 16/16N 32/8N
";

/// One published row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableEntry {
    /// `mp:<p>` or an octal polynomial.
    pub modulus: String,
    pub m: usize,
    pub n: usize,
    /// `None` for instances outside the published tables.
    pub published_pmds: Option<bool>,
}

fn parse_rows(text: &str, octal: bool) -> Vec<TableEntry> {
    let mut out = Vec::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let (modulus, shapes) = line.split_once(':').expect("table row");
        let modulus = if octal { modulus.trim().to_string() } else { format!("mp:{}", modulus.trim()) };
        for shape in shapes.split_whitespace() {
            let (no, shape) = match shape.strip_suffix('N') {
                Some(s) => (true, s),
                None => (false, shape),
            };
            let (m, n) = shape.split_once('/').expect("m/n");
            out.push(TableEntry { modulus: modulus.clone(), m: m.parse().unwrap(), n: n.parse().unwrap(), published_pmds: Some(!no) });
        }
    }
    out
}

/// A re-derived row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub entry: TableEntry,
    pub exponent: u64,
    pub verdict: PmdsVerdict,
}

impl TableRow {
    pub fn matches(&self) -> bool {
        self.entry.published_pmds.is_none_or(|p| p == self.verdict.is_pmds)
    }
}

pub fn entry_params(preset: Preset, entry: &TableEntry) -> Result<CodeParams, VerifyError> {
    let ring = Ring::parse(&entry.modulus)?;
    Ok(CodeParams::new(entry.m, entry.n, 1, preset.global_parities(), preset.variant(), ring)?)
}

/// Every valid `(modulus, m, n)` combination, one row parity, in the given order.
pub fn run_custom(moduli: &[String], shapes: &[(usize, usize)], variant: Variant, s: usize) -> Result<Vec<TableRow>, VerifyError> {
    let mut jobs = Vec::new();
    for modulus in moduli {
        let ring = Ring::parse(modulus)?;
        for &(m, n) in shapes {
            if let Ok(params) = CodeParams::new(m, n, 1, s, variant, ring.clone()) {
                let entry = TableEntry { modulus: ring.to_string(), m, n, published_pmds: None };
                jobs.push((entry, params));
            }
        }
    }
    jobs.into_par_iter()
        .map(|(entry, params)| {
            let verdict = verify(&params)?;
            Ok(TableRow { exponent: params.ring().exponent(), entry, verdict })
        })
        .collect()
}

/// Fast check, or the oracle when no fast check covers the case.
pub fn verify(params: &CodeParams) -> Result<PmdsVerdict, VerifyError> {
    match check_fast(params) {
        Err(VerifyError::UnsupportedCase(_)) => oracle_is_pmds(params),
        other => other,
    }
}

pub fn run_preset(preset: Preset) -> Result<Vec<TableRow>, VerifyError> {
    preset
        .entries()
        .into_par_iter()
        .map(|entry| {
            let params = entry_params(preset, &entry)?;
            let verdict = verify(&params)?;
            Ok(TableRow { exponent: params.ring().exponent(), entry, verdict })
        })
        .collect()
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "YES"
    } else {
        "NO"
    }
}

fn modulus_label(entry: &TableEntry) -> String {
    entry.modulus.strip_prefix("mp:").unwrap_or(&entry.modulus).to_string()
}

fn published_label(entry: &TableEntry) -> &'static str {
    entry.published_pmds.map(yes_no).unwrap_or("-")
}

/// Aligned text or CSV. `head` names the modulus column.
pub fn format_rows(head: &str, rows: &[TableRow], csv: bool) -> String {
    let mut out = String::new();
    if csv {
        out += &format!("{head},e,m,n,pmds,published,match,failed_condition,witness\n");
        for r in rows {
            out += &format!(
                "{},{},{},{},{},{},{},{},{}\n",
                modulus_label(&r.entry),
                r.exponent,
                r.entry.m,
                r.entry.n,
                yes_no(r.verdict.is_pmds),
                published_label(&r.entry),
                r.matches(),
                r.verdict.failed_condition.map(|c| c.to_string()).unwrap_or_default(),
                r.verdict.witness.as_ref().map(|w| w.to_string()).unwrap_or_default(),
            );
        }
        return out;
    }
    out += &format!("{head:>8} {:>6} {:>4} {:>4}  {:<5} {:<9} {}\n", "e", "m", "n", "PMDS?", "published", "witness");
    let mut last = String::new();
    for r in rows {
        let label = modulus_label(&r.entry);
        let shown = if label == last { String::new() } else { label.clone() };
        last = label;
        out += &format!(
            "{shown:>8} {:>6} {:>4} {:>4}  {:<5} {:<9} {}\n",
            r.exponent,
            r.entry.m,
            r.entry.n,
            yes_no(r.verdict.is_pmds),
            if r.matches() { published_label(&r.entry).to_string() } else { format!("{}!", published_label(&r.entry)) },
            r.verdict.witness.as_ref().map(|w| w.to_string()).unwrap_or_default(),
        );
    }
    out
}
