//! Exhaustive search over erasure patterns.
//!
//! For a profile `(s_1, ..., s_t)` the search visits row tuples `i_1 < ... < i_t` in
//! lexicographic order and, within each, column subsets of size `s_j + r` per row with
//! every row's subsets in colexicographic order and the last row varying fastest.
//! The first singular pattern in that order is the witness.

use rayon::prelude::*;

use super::profile::{enumerate_profiles, reduce_profile_odd, ErasureProfile};
use super::{Condition, Method, PmdsVerdict};
use crate::codec::combinations;
use crate::construction::{CodeParams, ErasurePattern, Position, Variant};
use crate::error::VerifyError;
use crate::poly::BinPoly;
use crate::residue::full_column_rank;

pub const DEFAULT_BUDGET: u128 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleOptions {
    /// Largest number of patterns the search may visit.
    pub budget: u128,
    /// Check only odd profiles, each on the code with correspondingly fewer global
    /// parities. Honoured for one row parity and the squared construction; ignored otherwise.
    pub odd_only: bool,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { budget: DEFAULT_BUDGET, odd_only: false }
    }
}

fn binom(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn feasible(params: &CodeParams, profile: &ErasureProfile) -> bool {
    profile.rows() <= params.m() && profile.parts().iter().all(|&p| p + params.r() <= params.n())
}

/// Number of patterns with the given profile (zero when it cannot occur).
pub fn count_patterns(params: &CodeParams, profile: &ErasureProfile) -> u128 {
    if !feasible(params, profile) {
        return 0;
    }
    let cols: u128 = profile.parts().iter().map(|&p| binom(params.n(), p + params.r())).product();
    binom(params.m(), profile.rows()) * cols
}

enum Entries {
    Word { h: Vec<u64>, modulus: u64 },
    Poly { h: Vec<BinPoly>, modulus: BinPoly },
}

/// Parity-check entries laid out for repeated rank tests.
struct Checker {
    m: usize,
    n: usize,
    r: usize,
    s: usize,
    entries: Entries,
}

impl Checker {
    fn new(params: &CodeParams) -> Self {
        let h = params.parity_check();
        let cells = params.cells();
        let ring = params.ring();
        let entries = match ring.modulus().to_u64() {
            Some(modulus) => Entries::Word {
                h: (0..params.parity_rows())
                    .flat_map(|row| (0..cells).map(move |c| (row, c)))
                    .map(|(row, c)| h.entry(row, c).to_u64().unwrap())
                    .collect(),
                modulus,
            },
            None => Entries::Poly {
                h: (0..params.parity_rows()).flat_map(|row| h.row(row).to_vec()).collect(),
                modulus: ring.modulus().clone(),
            },
        };
        Checker { m: params.m(), n: params.n(), r: params.r(), s: params.s(), entries }
    }

    /// Whether the erasures (rows ascending, columns per row) leave the code unable to
    /// recover them.
    fn singular(&self, rows: &[usize], cols: &[&[usize]]) -> bool {
        let cells = self.m * self.n;
        let mut prow: Vec<usize> = rows.iter().flat_map(|&i| i * self.r..(i + 1) * self.r).collect();
        prow.extend(self.m * self.r..self.m * self.r + self.s);
        let flat: Vec<usize> = rows.iter().zip(cols).flat_map(|(&i, cs)| cs.iter().map(move |&c| i * self.n + c)).collect();
        let (nr, nc) = (prow.len(), flat.len());
        match &self.entries {
            Entries::Word { h, modulus } => {
                let mut a = Vec::with_capacity(nr * nc);
                for &pr in &prow {
                    a.extend(flat.iter().map(|&c| h[pr * cells + c]));
                }
                !full_column_rank(a, nr, nc, *modulus)
            }
            Entries::Poly { h, modulus } => {
                let mut a = Vec::with_capacity(nr * nc);
                for &pr in &prow {
                    a.extend(flat.iter().map(|&c| h[pr * cells + c].clone()));
                }
                !full_column_rank(a, nr, nc, modulus.clone())
            }
        }
    }

    fn singular_pattern(&self, pattern: &ErasurePattern) -> bool {
        let by_row = pattern.by_row();
        let rows: Vec<usize> = by_row.iter().map(|(i, _)| *i).collect();
        let cols: Vec<&[usize]> = by_row.iter().map(|(_, c)| c.as_slice()).collect();
        self.singular(&rows, &cols)
    }
}

/// Whether the code recovers every symbol of the pattern.
pub fn pattern_is_correctable(params: &CodeParams, pattern: &ErasurePattern) -> bool {
    pattern.is_empty() || !Checker::new(params).singular_pattern(pattern)
}

fn colex_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut v: Vec<Vec<usize>> = combinations(n, k).collect();
    v.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
    v
}

fn search(checker: &Checker, params: &CodeParams, profile: &ErasureProfile) -> Option<ErasurePattern> {
    if !feasible(params, profile) {
        return None;
    }
    let t = profile.rows();
    let subsets: Vec<Vec<Vec<usize>>> = profile.parts().iter().map(|&p| colex_subsets(params.n(), p + params.r())).collect();
    let row_tuples: Vec<Vec<usize>> = combinations(params.m(), t).collect();
    row_tuples.par_iter().find_map_first(|rows| {
        let mut idx = vec![0usize; t];
        loop {
            let cols: Vec<&[usize]> = (0..t).map(|j| subsets[j][idx[j]].as_slice()).collect();
            if checker.singular(rows, &cols) {
                let positions = rows
                    .iter()
                    .zip(&cols)
                    .flat_map(|(&i, cs)| cs.iter().map(move |&c| Position::new(i, c)))
                    .collect();
                return Some(ErasurePattern::for_params(positions, params).expect("valid positions"));
            }
            let mut j = t;
            loop {
                if j == 0 {
                    return None;
                }
                j -= 1;
                idx[j] += 1;
                if idx[j] < subsets[j].len() {
                    break;
                }
                idx[j] = 0;
            }
        }
    })
}

pub fn oracle_is_correcting(params: &CodeParams, profile: &ErasureProfile) -> Result<PmdsVerdict, VerifyError> {
    oracle_is_correcting_with(params, profile, DEFAULT_BUDGET)
}

pub fn oracle_is_correcting_with(params: &CodeParams, profile: &ErasureProfile, budget: u128) -> Result<PmdsVerdict, VerifyError> {
    if profile.sum() != params.s() {
        return Err(VerifyError::BadProfile(profile.to_string()));
    }
    let needed = count_patterns(params, profile);
    if needed > budget {
        return Err(VerifyError::BudgetExceeded { needed, budget });
    }
    let checker = Checker::new(params);
    Ok(match search(&checker, params, profile) {
        Some(w) => PmdsVerdict::fail(params, w, Condition::Oracle, Method::Oracle),
        None => PmdsVerdict::pass(Method::Oracle),
    })
}

pub fn oracle_is_pmds(params: &CodeParams) -> Result<PmdsVerdict, VerifyError> {
    oracle_is_pmds_with(params, &OracleOptions::default())
}

pub fn oracle_is_pmds_with(params: &CodeParams, opts: &OracleOptions) -> Result<PmdsVerdict, VerifyError> {
    let profiles: Vec<ErasureProfile> =
        enumerate_profiles(params.s(), params.m()).into_iter().filter(|p| feasible(params, p)).collect();
    let reduce = opts.odd_only && params.r() == 1 && params.variant() == Variant::Squared;
    // (profile searched, profile it stands for)
    let mut jobs: Vec<(ErasureProfile, ErasureProfile)> = Vec::new();
    for p in profiles {
        let q = if reduce { reduce_profile_odd(&p) } else { p.clone() };
        if !jobs.iter().any(|(done, _)| *done == q) {
            jobs.push((q, p));
        }
    }
    let mut needed = 0u128;
    for (q, _) in &jobs {
        needed += count_patterns(&params.with_global_parities(q.sum())?, q);
    }
    if needed > opts.budget {
        return Err(VerifyError::BudgetExceeded { needed, budget: opts.budget });
    }
    let full = Checker::new(params);
    for (q, original) in &jobs {
        let sub = params.with_global_parities(q.sum())?;
        let checker = if q.sum() == params.s() { None } else { Some(Checker::new(&sub)) };
        let Some(w) = search(checker.as_ref().unwrap_or(&full), &sub, q) else { continue };
        let witness = if q == original { w } else { lift_witness(params, &w, original)? };
        if !full.singular_pattern(&witness) {
            return Err(VerifyError::Inconsistent(format!(
                "pattern {witness} lifted from profile {q} to {original} is recoverable"
            )));
        }
        return Ok(PmdsVerdict::fail(params, witness, Condition::Oracle, Method::Oracle));
    }
    Ok(PmdsVerdict::pass(Method::Oracle))
}

/// Adds one erasure to each row whose part in `original` is even.
fn lift_witness(params: &CodeParams, w: &ErasurePattern, original: &ErasureProfile) -> Result<ErasurePattern, VerifyError> {
    let mut positions = w.positions().to_vec();
    for ((row, cols), &part) in w.by_row().iter().zip(original.parts()) {
        if part % 2 == 0 {
            let free = (0..params.n()).find(|c| !cols.contains(c)).expect("feasible profile leaves a free column");
            positions.push(Position::new(*row, free));
        }
    }
    ErasurePattern::for_params(positions, params).map_err(|e| VerifyError::Inconsistent(e.to_string()))
}
