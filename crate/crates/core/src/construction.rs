//! Parity-check matrices of the three code families and erasure patterns on the array.
//!
//! Parity rows are ordered block by block: array row `i` owns rows `i*r .. i*r + r`,
//! and the `s` global rows follow. Column `i*n + j` is array position `(i, j)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{CodecError, ParamsError};
use crate::matrix::RingMatrix;
use crate::ring::Ring;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    /// Row block `l >= 1` uses exponents `k * 2^(l-1)`, global `u` uses `k * 2^(r+u-1)`
    /// (`k` is the flat position). Row block 0 is all ones. CLI name `c0`.
    Squared,
    /// Row block `l` uses `l * k`, global `u` uses `(r + u) * k`. CLI name `c1`.
    Consecutive,
    /// One all-ones row per array row and two globals with exponents `j` and `i + j`.
    /// Needs `r = 1` and `s <= 2`. CLI name `c2`.
    RowColumn,
}

impl Variant {
    pub fn cli_name(self) -> &'static str {
        match self {
            Variant::Squared => "c0",
            Variant::Consecutive => "c1",
            Variant::RowColumn => "c2",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.cli_name())
    }
}

impl FromStr for Variant {
    type Err = ParamsError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "c0" | "squared" => Ok(Variant::Squared),
            "c1" | "consecutive" => Ok(Variant::Consecutive),
            "c2" | "row-column" | "rowcolumn" => Ok(Variant::RowColumn),
            _ => Err(ParamsError::UnknownVariant(s.to_string())),
        }
    }
}

/// An `m x n` array code with `r` parities per row and `s` global parities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeParams {
    m: usize,
    n: usize,
    r: usize,
    s: usize,
    variant: Variant,
    ring: Ring,
}

impl CodeParams {
    pub fn new(m: usize, n: usize, r: usize, s: usize, variant: Variant, ring: Ring) -> Result<Self, ParamsError> {
        if m == 0 {
            return Err(ParamsError::NoRows(m));
        }
        if n < 2 {
            return Err(ParamsError::TooFewColumns(n));
        }
        if r == 0 || r >= n {
            return Err(ParamsError::BadRowParity { r, n });
        }
        let k = (m * (n - r)) as i64 - s as i64;
        if k < 1 {
            return Err(ParamsError::NoData(k));
        }
        // the row-column variant only needs distinct powers along a row and down a column
        let span = if variant == Variant::RowColumn { m.max(n) } else { m * n } as u64;
        if span > ring.exponent() {
            return Err(ParamsError::ExponentTooSmall { cells: span, exponent: ring.exponent() });
        }
        if variant == Variant::RowColumn && (r != 1 || s > 2) {
            return Err(ParamsError::UnsupportedVariant("r = 1 and s <= 2 for c2".into()));
        }
        Ok(CodeParams { m, n, r, s, variant, ring })
    }

    pub fn m(&self) -> usize {
        self.m
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn r(&self) -> usize {
        self.r
    }
    pub fn s(&self) -> usize {
        self.s
    }
    pub fn variant(&self) -> Variant {
        self.variant
    }
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    /// Same code shape with a different number of global parities.
    pub fn with_global_parities(&self, s: usize) -> Result<Self, ParamsError> {
        CodeParams::new(self.m, self.n, self.r, s, self.variant, self.ring.clone())
    }

    pub fn cells(&self) -> usize {
        self.m * self.n
    }

    /// Number of data symbols, `m(n - r) - s`.
    pub fn data_len(&self) -> usize {
        self.m * (self.n - self.r) - self.s
    }

    pub fn parity_rows(&self) -> usize {
        self.m * self.r + self.s
    }

    pub fn flat(&self, i: usize, j: usize) -> usize {
        i * self.n + j
    }

    /// Exponent of `x` at parity row `row`, array position `(i, j)`; `None` for a structural zero.
    pub fn entry_exponent(&self, row: usize, i: usize, j: usize) -> Option<u64> {
        let e = self.ring.exponent();
        let k = self.flat(i, j) as u64 % e;
        let mr = self.m * self.r;
        let scaled = |t: u64| (k as u128 * t as u128 % e as u128) as u64;
        let pow2 = |t: usize| {
            let mut v = 1u64 % e;
            for _ in 0..t {
                v = (v as u128 * 2 % e as u128) as u64;
            }
            v
        };
        if row < mr {
            let (block, l) = (row / self.r, row % self.r);
            if block != i {
                return None;
            }
            Some(match self.variant {
                Variant::Squared if l == 0 => 0,
                Variant::Squared => scaled(pow2(l - 1)),
                Variant::Consecutive => scaled(l as u64),
                Variant::RowColumn => 0,
            })
        } else {
            let u = row - mr;
            Some(match self.variant {
                Variant::Squared => scaled(pow2(self.r + u - 1)),
                Variant::Consecutive => scaled((self.r + u) as u64),
                Variant::RowColumn if u == 0 => j as u64 % e,
                Variant::RowColumn => (i + j) as u64 % e,
            })
        }
    }

    pub fn parity_check(&self) -> RingMatrix {
        let n = self.n;
        RingMatrix::from_fn(&self.ring, self.parity_rows(), self.cells(), |row, col| {
            self.entry_exponent(row, col / n, col % n)
                .map(|k| self.ring.alpha_pow(k as i64))
                .unwrap_or_default()
        })
    }
}

impl fmt::Display for CodeParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(m={}, n={}, r={}, s={}; {})", self.variant, self.m, self.n, self.r, self.s, self.ring)
    }
}

pub fn build_parity_check(params: &CodeParams) -> RingMatrix {
    params.parity_check()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Position {
    pub row: usize,
    pub col: usize,
}

impl Position {
    pub fn new(row: usize, col: usize) -> Self {
        Position { row, col }
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.row, self.col)
    }
}

/// Sorted set of erased array positions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ErasurePattern {
    positions: Vec<Position>,
}

impl ErasurePattern {
    pub fn new(mut positions: Vec<Position>, m: usize, n: usize) -> Result<Self, CodecError> {
        positions.sort();
        if let Some(w) = positions.windows(2).find(|w| w[0] == w[1]) {
            return Err(CodecError::InvalidPattern(format!("position {} listed twice", w[0])));
        }
        if let Some(p) = positions.iter().find(|p| p.row >= m || p.col >= n) {
            return Err(CodecError::InvalidPattern(format!("position {p} outside {m}x{n} array")));
        }
        Ok(ErasurePattern { positions })
    }

    pub fn for_params(positions: Vec<Position>, params: &CodeParams) -> Result<Self, CodecError> {
        Self::new(positions, params.m(), params.n())
    }

    /// Parses positions like `0,1;2,3` or `0,1 2,3`.
    pub fn parse(s: &str, m: usize, n: usize) -> Result<Self, CodecError> {
        let mut out = Vec::new();
        for tok in s.split(|c: char| c == ';' || c.is_whitespace()).filter(|t| !t.is_empty()) {
            let (a, b) = tok.split_once(',').ok_or_else(|| CodecError::InvalidPattern(format!("expected row,col, got {tok:?}")))?;
            let row = a.trim().parse().map_err(|_| CodecError::InvalidPattern(format!("bad row in {tok:?}")))?;
            let col = b.trim().parse().map_err(|_| CodecError::InvalidPattern(format!("bad column in {tok:?}")))?;
            out.push(Position { row, col });
        }
        Self::new(out, m, n)
    }

    pub fn positions(&self) -> &[Position] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// `(row, erased columns)` for every row with at least one erasure.
    pub fn by_row(&self) -> Vec<(usize, Vec<usize>)> {
        let mut out: Vec<(usize, Vec<usize>)> = Vec::new();
        for p in &self.positions {
            match out.last_mut() {
                Some((r, cols)) if *r == p.row => cols.push(p.col),
                _ => out.push((p.row, vec![p.col])),
            }
        }
        out
    }

    pub fn flat_indices(&self, n: usize) -> Vec<usize> {
        self.positions.iter().map(|p| p.row * n + p.col).collect()
    }
}

impl fmt::Display for ErasurePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.positions.iter().map(|p| p.to_string()).collect();
        f.write_str(&parts.join(";"))
    }
}

/// Columns of the parity-check matrix at the erased positions (all parity rows kept).
pub fn erasure_submatrix(h: &RingMatrix, params: &CodeParams, pattern: &ErasurePattern) -> RingMatrix {
    h.select_columns(&pattern.flat_indices(params.n()))
}

/// The erasure submatrix without rows that vanish on every erased column, together with
/// the indices of the kept parity rows. For the PMDS pattern shapes this is square.
pub fn erasure_system(h: &RingMatrix, params: &CodeParams, pattern: &ErasurePattern) -> (RingMatrix, Vec<usize>) {
    let kept: Vec<usize> = (0..params.parity_rows())
        .filter(|&row| pattern.positions().iter().any(|p| params.entry_exponent(row, p.row, p.col).is_some()))
        .collect();
    let sub = erasure_submatrix(h, params, pattern).select_rows(&kept);
    (sub, kept)
}
