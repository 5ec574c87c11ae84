//! Systematic encoding and erasure decoding.

use crate::construction::{erasure_submatrix, CodeParams, ErasurePattern, Position, Variant};
use crate::error::CodecError;
use crate::matrix::RingMatrix;
use crate::poly::BinPoly;
use crate::ring::{Ring, RingElement};

/// The `m x n` array of symbols, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArrayCodeword {
    params: CodeParams,
    cells: Vec<BinPoly>,
}

impl ArrayCodeword {
    pub fn zero(params: &CodeParams) -> Self {
        ArrayCodeword { params: params.clone(), cells: vec![BinPoly::zero(); params.cells()] }
    }

    pub fn from_cells(params: &CodeParams, cells: Vec<BinPoly>) -> Result<Self, CodecError> {
        if cells.len() != params.cells() {
            return Err(CodecError::SizeMismatch(format!("{} symbols for a {}x{} array", cells.len(), params.m(), params.n())));
        }
        let ring = params.ring();
        let cells = cells.iter().map(|c| ring.reduce(c)).collect();
        Ok(ArrayCodeword { params: params.clone(), cells })
    }

    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    pub fn cells(&self) -> &[BinPoly] {
        &self.cells
    }

    pub fn cell(&self, i: usize, j: usize) -> &BinPoly {
        &self.cells[self.params.flat(i, j)]
    }

    pub fn get(&self, i: usize, j: usize) -> RingElement {
        RingElement::new(self.params.ring(), self.cell(i, j))
    }

    pub fn set(&mut self, i: usize, j: usize, v: &BinPoly) {
        let k = self.params.flat(i, j);
        self.cells[k] = self.params.ring().reduce(v);
    }

    /// Copy with every erased position set to zero.
    pub fn erased(&self, pattern: &ErasurePattern) -> Self {
        let mut w = self.clone();
        for p in pattern.positions() {
            w.set(p.row, p.col, &BinPoly::zero());
        }
        w
    }
}

/// Where the parity symbols sit in the array.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityLayout {
    positions: Vec<Position>,
}

impl ParityLayout {
    pub fn new(mut positions: Vec<Position>) -> Self {
        positions.sort();
        ParityLayout { positions }
    }

    /// Row parities in the last `r` columns; globals to their left, filling the last row
    /// right to left and then earlier rows.
    pub fn trailing(params: &CodeParams) -> Self {
        let (m, n, r) = (params.m(), params.n(), params.r());
        let mut pos: Vec<Position> = (0..m).flat_map(|i| (n - r..n).map(move |j| Position::new(i, j))).collect();
        let data_cols = n - r;
        for u in 0..params.s() {
            pos.push(Position::new(m - 1 - u / data_cols, data_cols - 1 - u % data_cols));
        }
        ParityLayout::new(pos)
    }

    /// Row parities in the last `r` columns; globals one per row from the bottom up.
    pub fn spread(params: &CodeParams) -> Self {
        let (m, n, r) = (params.m(), params.n(), params.r());
        let mut pos: Vec<Position> = (0..m).flat_map(|i| (n - r..n).map(move |j| Position::new(i, j))).collect();
        for u in 0..params.s() {
            pos.push(Position::new(m - 1 - u % m, n - r - 1 - u / m));
        }
        ParityLayout::new(pos)
    }

    pub fn positions(&self) -> &[Position] {
        &self.positions
    }

    pub fn contains(&self, p: Position) -> bool {
        self.positions.binary_search(&p).is_ok()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DecodeStrategy {
    /// Closed forms for the common one-row-parity cases, square systems otherwise.
    #[default]
    Auto,
    /// Always solve the erasure system directly.
    Generic,
}

/// A code ready for encoding and decoding.
#[derive(Clone, Debug)]
pub struct CodeInstance {
    params: CodeParams,
    h: RingMatrix,
    layout: ParityLayout,
    data_positions: Vec<Position>,
    /// Inverse of the parity-check columns at the layout positions.
    encoder: RingMatrix,
}

impl CodeInstance {
    pub fn new(params: &CodeParams) -> Result<Self, CodecError> {
        let first = Self::with_layout(params, ParityLayout::trailing(params));
        match first {
            Err(CodecError::LayoutNotInvertible) => Self::with_layout(params, ParityLayout::spread(params)),
            other => other,
        }
    }

    pub fn with_layout(params: &CodeParams, layout: ParityLayout) -> Result<Self, CodecError> {
        if layout.positions().len() != params.parity_rows() {
            return Err(CodecError::SizeMismatch(format!(
                "layout has {} positions, code has {} parity rows",
                layout.positions().len(),
                params.parity_rows()
            )));
        }
        let h = params.parity_check();
        let pattern = ErasurePattern::for_params(layout.positions().to_vec(), params)?;
        let sub = erasure_submatrix(&h, params, &pattern);
        if !sub.is_invertible()? {
            return Err(CodecError::LayoutNotInvertible);
        }
        let encoder = sub.inverse().map_err(|_| CodecError::LayoutNotInvertible)?;
        let data_positions = (0..params.m())
            .flat_map(|i| (0..params.n()).map(move |j| Position::new(i, j)))
            .filter(|p| !layout.contains(*p))
            .collect();
        Ok(CodeInstance { params: params.clone(), h, layout, data_positions, encoder })
    }

    pub fn params(&self) -> &CodeParams {
        &self.params
    }
    pub fn parity_check(&self) -> &RingMatrix {
        &self.h
    }
    pub fn layout(&self) -> &ParityLayout {
        &self.layout
    }
    pub fn data_positions(&self) -> &[Position] {
        &self.data_positions
    }

    fn ring(&self) -> &Ring {
        self.params.ring()
    }

    pub fn encode(&self, data: &[RingElement]) -> Result<ArrayCodeword, CodecError> {
        if data.iter().any(|e| !e.ring().same(self.ring())) {
            return Err(crate::error::AlgebraError::ModulusMismatch.into());
        }
        let polys: Vec<BinPoly> = data.iter().map(|e| e.value().clone()).collect();
        self.encode_polys(&polys)
    }

    pub fn encode_polys(&self, data: &[BinPoly]) -> Result<ArrayCodeword, CodecError> {
        if data.len() != self.params.data_len() {
            return Err(CodecError::SizeMismatch(format!("{} data symbols, code takes {}", data.len(), self.params.data_len())));
        }
        let mut w = ArrayCodeword::zero(&self.params);
        for (p, v) in self.data_positions.iter().zip(data) {
            w.set(p.row, p.col, v);
        }
        let syn = self.syndrome_polys(&w);
        let parity = self.encoder.mul_vec(&syn)?;
        for (p, v) in self.layout.positions().iter().zip(&parity) {
            w.set(p.row, p.col, v);
        }
        Ok(w)
    }

    /// Data symbols in encoding order.
    pub fn extract_data(&self, w: &ArrayCodeword) -> Vec<BinPoly> {
        self.data_positions.iter().map(|p| w.cell(p.row, p.col).clone()).collect()
    }

    fn syndrome_polys(&self, w: &ArrayCodeword) -> Vec<BinPoly> {
        self.h.mul_vec(w.cells()).expect("codeword length matches parity-check width")
    }

    pub fn syndromes(&self, w: &ArrayCodeword) -> Vec<RingElement> {
        self.syndrome_polys(w).iter().map(|v| RingElement::new(self.ring(), v)).collect()
    }

    pub fn is_codeword(&self, w: &ArrayCodeword) -> bool {
        self.syndrome_polys(w).iter().all(BinPoly::is_zero)
    }

    fn check_word(&self, w: &ArrayCodeword) -> Result<(), CodecError> {
        if w.params() != &self.params {
            return Err(CodecError::SizeMismatch(format!("word for {} given to {}", w.params(), self.params)));
        }
        Ok(())
    }

    /// Recovers up to `r` erasures in one array row from that row's parities.
    pub fn row_decode(&self, w: &ArrayCodeword, row: usize, cols: &[usize]) -> Result<Vec<RingElement>, CodecError> {
        self.check_word(w)?;
        let r = self.params.r();
        if cols.len() > r {
            return Err(CodecError::InvalidPattern(format!("{} erasures in row {row}, row code corrects {r}", cols.len())));
        }
        if row >= self.params.m() || cols.iter().any(|&c| c >= self.params.n()) {
            return Err(CodecError::InvalidPattern("position outside the array".into()));
        }
        let mut word = w.clone();
        for &c in cols {
            word.set(row, c, &BinPoly::zero());
        }
        let vals = self.solve_row(&word, row, cols)?;
        Ok(vals.iter().map(|v| RingElement::new(self.ring(), v)).collect())
    }

    /// `word` has zeros at the erased columns of `row`.
    fn solve_row(&self, word: &ArrayCodeword, row: usize, cols: &[usize]) -> Result<Vec<BinPoly>, CodecError> {
        if cols.is_empty() {
            return Ok(Vec::new());
        }
        let r = self.params.r();
        let n = self.params.n();
        let block: Vec<usize> = (row * r..row * r + r).collect();
        let flat: Vec<usize> = cols.iter().map(|&c| row * n + c).collect();
        let row_cells = &word.cells()[row * n..row * n + n];
        for rows in combinations(r, cols.len()) {
            let hrows: Vec<usize> = rows.iter().map(|&l| block[l]).collect();
            let a = self.h.select_rows(&hrows).select_columns(&flat);
            let rhs: Vec<BinPoly> = hrows
                .iter()
                .map(|&hr| {
                    let hrow = &self.h.row(hr)[row * n..row * n + n];
                    hrow.iter().zip(row_cells).fold(BinPoly::zero(), |acc, (a, b)| &acc + &self.ring().mul(a, b))
                })
                .collect();
            if let Ok(x) = a.solve_polys(&rhs) {
                return Ok(x);
            }
        }
        Err(CodecError::NotCorrectable)
    }

    pub fn decode_erasures(&self, w: &ArrayCodeword, pattern: &ErasurePattern) -> Result<ArrayCodeword, CodecError> {
        self.decode_with(w, pattern, DecodeStrategy::Auto)
    }

    pub fn decode_with(&self, w: &ArrayCodeword, pattern: &ErasurePattern, strategy: DecodeStrategy) -> Result<ArrayCodeword, CodecError> {
        self.check_word(w)?;
        let (m, n, r, s) = (self.params.m(), self.params.n(), self.params.r(), self.params.s());
        if pattern.positions().iter().any(|p| p.row >= m || p.col >= n) {
            return Err(CodecError::InvalidPattern("position outside the array".into()));
        }
        let mut word = w.erased(pattern);
        let rows = pattern.by_row();
        let mut extra = 0;
        for (_, cols) in &rows {
            if cols.len() > r + s {
                return Err(CodecError::NotCorrectable);
            }
            extra += cols.len().saturating_sub(r);
        }
        if extra > s {
            return Err(CodecError::NotCorrectable);
        }
        let mut heavy = Vec::new();
        for (row, cols) in &rows {
            if cols.len() <= r {
                let vals = self.solve_row(&word, *row, cols)?;
                for (c, v) in cols.iter().zip(vals) {
                    word.set(*row, *c, &v);
                }
            } else {
                heavy.push((*row, cols.clone()));
            }
        }
        if !heavy.is_empty() {
            let fast = strategy == DecodeStrategy::Auto
                && r == 1
                && extra == 2
                && matches!(self.params.variant(), Variant::Squared | Variant::Consecutive);
            let solved = if fast { self.solve_two_extra(&word, &heavy)? } else { None };
            let vals = match solved {
                Some(v) => v,
                None => self.solve_heavy(&word, &heavy, extra)?,
            };
            let mut it = vals.into_iter();
            for (row, cols) in &heavy {
                for c in cols {
                    word.set(*row, *c, &it.next().expect("one value per erasure"));
                }
            }
        }
        if !self.is_codeword(&word) {
            return Err(CodecError::Inconsistent("recovered array fails the parity checks; input was not a codeword".into()));
        }
        Ok(word)
    }

    /// Closed forms for one row parity and two extra erasures: three erasures in one row,
    /// or two erasures in each of two rows. Uses the row syndromes and the first two
    /// global syndromes. `Ok(None)` means the shape is not covered.
    fn solve_two_extra(&self, word: &ArrayCodeword, heavy: &[(usize, Vec<usize>)]) -> Result<Option<Vec<BinPoly>>, CodecError> {
        let ring = self.ring().clone();
        let n = self.params.n();
        let syn = self.syndrome_polys(word);
        let g1 = &syn[self.params.m()];
        let g2 = &syn[self.params.m() + 1];
        let gamma = |i: usize, j: usize| ring.alpha_pow((i * n + j) as i64);
        let mul = |a: &BinPoly, b: &BinPoly| ring.mul(a, b);
        let div = |a: &BinPoly, b: &BinPoly| ring.inverse(b).map(|inv| ring.mul(a, &inv)).map_err(|_| CodecError::NotCorrectable);
        match heavy {
            [(i, cols)] if cols.len() == 3 => {
                let sr = &syn[*i];
                let [c0, c1, c2] = [gamma(*i, cols[0]), gamma(*i, cols[1]), gamma(*i, cols[2])];
                let solve_one = |a: &BinPoly, b: &BinPoly, c: &BinPoly| -> Result<BinPoly, CodecError> {
                    let num = &(&mul(sr, &mul(b, c)) + &mul(g1, &(b + c))) + g2;
                    div(&num, &mul(&(a + b), &(a + c)))
                };
                let x0 = solve_one(&c0, &c1, &c2)?;
                let x1 = solve_one(&c1, &c0, &c2)?;
                let x2 = &(sr + &x0) + &x1;
                Ok(Some(vec![x0, x1, x2]))
            }
            [(i0, p), (i1, q)] if p.len() == 2 && q.len() == 2 => {
                let (ga, gb) = (gamma(*i0, p[0]), gamma(*i0, p[1]));
                let (gc, gd) = (gamma(*i1, q[0]), gamma(*i1, q[1]));
                let (s0, s1) = (&syn[*i0], &syn[*i1]);
                let a_ = &ga + &gb;
                let c_ = &gc + &gd;
                let t1 = &(g1 + &mul(&gb, s0)) + &mul(&gd, s1);
                let t2 = &(g2 + &mul(&mul(&gb, &gb), s0)) + &mul(&mul(&gd, &gd), s1);
                let ac = &a_ + &c_;
                let a = div(&(&mul(&t1, &c_) + &t2), &mul(&a_, &ac))?;
                let c = div(&(&t2 + &mul(&a_, &t1)), &mul(&c_, &ac))?;
                let b = &a + s0;
                let d = &c + s1;
                Ok(Some(vec![a, b, c, d]))
            }
            _ => Ok(None),
        }
    }

    /// Solves for the erasures in rows with more than `r` erasures, using their row
    /// parities and `extra` of the global parities.
    fn solve_heavy(&self, word: &ArrayCodeword, heavy: &[(usize, Vec<usize>)], extra: usize) -> Result<Vec<BinPoly>, CodecError> {
        let (m, n, r, s) = (self.params.m(), self.params.n(), self.params.r(), self.params.s());
        let syn = self.syndrome_polys(word);
        let flat: Vec<usize> = heavy.iter().flat_map(|(i, cols)| cols.iter().map(move |c| i * n + c)).collect();
        let block_rows: Vec<usize> = heavy.iter().flat_map(|(i, _)| i * r..i * r + r).collect();
        let cols_h = self.h.select_columns(&flat);
        for globals in combinations(s, extra) {
            let rows: Vec<usize> = block_rows.iter().copied().chain(globals.iter().map(|u| m * r + u)).collect();
            let a = cols_h.select_rows(&rows);
            let rhs: Vec<BinPoly> = rows.iter().map(|&k| syn[k].clone()).collect();
            if let Ok(x) = a.solve_polys(&rhs) {
                return Ok(x);
            }
        }
        // no square subsystem works; fall back to all equations, then to mixed combinations
        let rows: Vec<usize> = block_rows.iter().copied().chain(m * r..m * r + s).collect();
        let a = cols_h.select_rows(&rows);
        let rhs: Vec<BinPoly> = rows.iter().map(|&k| syn[k].clone()).collect();
        if let Ok(x) = a.solve_polys(&rhs) {
            return Ok(x);
        }
        if !a.has_full_column_rank() {
            return Err(CodecError::NotCorrectable);
        }
        let ring = self.ring();
        let k = flat.len();
        for seed in 1..64u64 {
            let g = RingMatrix::from_fn(ring, k, rows.len(), |i, j| {
                let h = (seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ ((i * 131 + j) as u64).wrapping_mul(0xbf58_476d_1ce4_e5b9)) >> 17;
                ring.alpha_pow((h % ring.exponent()) as i64)
            });
            let ga = g.mul(&a)?;
            let grhs = g.mul_vec(&rhs)?;
            if let Ok(x) = ga.solve_polys(&grhs) {
                if a.mul_vec(&x)? == rhs {
                    return Ok(x);
                }
            }
        }
        Err(CodecError::Inconsistent("full-rank erasure system could not be solved".into()))
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut cur: Option<Vec<usize>> = (k <= n).then(|| (0..k).collect());
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let mut next = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                cur = None;
                break;
            }
            i -= 1;
            if next[i] < n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                cur = Some(next);
                break;
            }
        }
        Some(out)
    })
}
