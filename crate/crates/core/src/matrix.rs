//! Dense matrices over a quotient ring.

use std::fmt;

use crate::error::MatrixError;
use crate::poly::BinPoly;
use crate::residue::full_column_rank;
use crate::ring::{Ring, RingElement};

#[derive(Clone, Debug)]
pub struct RingMatrix {
    ring: Ring,
    rows: usize,
    cols: usize,
    data: Vec<BinPoly>,
}

impl RingMatrix {
    pub fn zeros(ring: &Ring, rows: usize, cols: usize) -> Self {
        RingMatrix { ring: ring.clone(), rows, cols, data: vec![BinPoly::zero(); rows * cols] }
    }

    pub fn identity(ring: &Ring, n: usize) -> Self {
        let mut m = Self::zeros(ring, n, n);
        for i in 0..n {
            m.data[i * n + i] = BinPoly::one();
        }
        m
    }

    pub fn from_fn(ring: &Ring, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BinPoly) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(ring.reduce(&f(i, j)));
            }
        }
        RingMatrix { ring: ring.clone(), rows, cols, data }
    }

    pub fn from_elements(rows: &[Vec<RingElement>]) -> Result<Self, MatrixError> {
        let first = rows
            .first()
            .and_then(|r| r.first())
            .ok_or_else(|| MatrixError::DimensionMismatch("empty matrix".into()))?;
        let ring = first.ring().clone();
        let cols = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(MatrixError::DimensionMismatch("ragged rows".into()));
            }
            for e in row {
                if !e.ring().same(&ring) {
                    return Err(crate::error::AlgebraError::ModulusMismatch.into());
                }
                data.push(e.value().clone());
            }
        }
        Ok(RingMatrix { ring, rows: rows.len(), cols, data })
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, i: usize, j: usize) -> &BinPoly {
        &self.data[i * self.cols + j]
    }

    pub fn get(&self, i: usize, j: usize) -> RingElement {
        RingElement::new(&self.ring, self.entry(i, j))
    }

    pub fn set(&mut self, i: usize, j: usize, v: &BinPoly) {
        self.data[i * self.cols + j] = self.ring.reduce(v);
    }

    pub fn row(&self, i: usize) -> &[BinPoly] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        RingMatrix::from_fn(&self.ring, self.rows, cols.len(), |i, j| self.entry(i, cols[j]).clone())
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        RingMatrix::from_fn(&self.ring, rows.len(), self.cols, |i, j| self.entry(rows[i], j).clone())
    }

    pub fn mul(&self, o: &RingMatrix) -> Result<RingMatrix, MatrixError> {
        if !self.ring.same(&o.ring) {
            return Err(crate::error::AlgebraError::ModulusMismatch.into());
        }
        if self.cols != o.rows {
            return Err(MatrixError::DimensionMismatch(format!("{}x{} times {}x{}", self.rows, self.cols, o.rows, o.cols)));
        }
        let mut out = RingMatrix::zeros(&self.ring, self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.entry(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.entry(k, j);
                    if !b.is_zero() {
                        out.data[i * o.cols + j] += &self.ring.mul(a, b);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BinPoly]) -> Result<Vec<BinPoly>, MatrixError> {
        if v.len() != self.cols {
            return Err(MatrixError::DimensionMismatch(format!("vector of length {} for {} columns", v.len(), self.cols)));
        }
        Ok((0..self.rows)
            .map(|i| {
                let mut acc = BinPoly::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += &self.ring.mul(a, b);
                    }
                }
                acc
            })
            .collect())
    }

    fn require_square(&self) -> Result<usize, MatrixError> {
        if self.rows != self.cols {
            return Err(MatrixError::NotSquare { rows: self.rows, cols: self.cols });
        }
        Ok(self.rows)
    }

    /// Cofactor expansion up to 6x6, fraction-free elimination over GF(2)[x] above that.
    pub fn determinant(&self) -> Result<RingElement, MatrixError> {
        let n = self.require_square()?;
        let d = if n <= 6 { self.det_cofactor() } else { self.det_bareiss() };
        Ok(RingElement::new(&self.ring, &d))
    }

    fn det_cofactor(&self) -> BinPoly {
        fn rec(m: &RingMatrix, row: usize, used: u32) -> BinPoly {
            let n = m.rows;
            if row == n {
                return BinPoly::one();
            }
            let mut acc = BinPoly::zero();
            for j in 0..n {
                if used >> j & 1 == 1 || m.entry(row, j).is_zero() {
                    continue;
                }
                let minor = rec(m, row + 1, used | 1 << j);
                if !minor.is_zero() {
                    acc += &m.ring.mul(m.entry(row, j), &minor);
                }
            }
            acc
        }
        rec(self, 0, 0)
    }

    fn det_bareiss(&self) -> BinPoly {
        let n = self.rows;
        let mut a = self.data.clone();
        let mut prev = BinPoly::one();
        for k in 0..n.saturating_sub(1) {
            if a[k * n + k].is_zero() {
                let Some(r) = (k + 1..n).find(|&r| !a[r * n + k].is_zero()) else {
                    return BinPoly::zero();
                };
                for j in 0..n {
                    a.swap(k * n + j, r * n + j);
                }
            }
            let pivot = a[k * n + k].clone();
            for i in k + 1..n {
                let lead = a[i * n + k].clone();
                for j in k + 1..n {
                    let num = &pivot.mul(&a[i * n + j]) + &lead.mul(&a[k * n + j]);
                    let (q, r) = num.div_rem(&prev);
                    debug_assert!(r.is_zero(), "fraction-free step must divide exactly");
                    a[i * n + j] = q;
                }
            }
            prev = pivot;
        }
        self.ring.reduce(&a[n * n - 1])
    }

    /// True iff the determinant is a unit. Computed by exact elimination with modulus
    /// splitting, which agrees with `gcd(det, f) = 1` for the squarefree moduli used here.
    pub fn is_invertible(&self) -> Result<bool, MatrixError> {
        self.require_square()?;
        Ok(self.has_full_column_rank())
    }

    /// Trivial kernel over the ring (for square matrices: invertible).
    pub fn has_full_column_rank(&self) -> bool {
        let f = self.ring.modulus();
        if let Some(m) = f.to_u64() {
            let words: Vec<u64> = self.data.iter().map(|p| p.to_u64().unwrap()).collect();
            full_column_rank(words, self.rows, self.cols, m)
        } else {
            full_column_rank(self.data.clone(), self.rows, self.cols, f.clone())
        }
    }

    pub fn solve(&self, rhs: &[RingElement]) -> Result<Vec<RingElement>, MatrixError> {
        for e in rhs {
            if !e.ring().same(&self.ring) {
                return Err(crate::error::AlgebraError::ModulusMismatch.into());
            }
        }
        let b: Vec<BinPoly> = rhs.iter().map(|e| e.value().clone()).collect();
        Ok(self.solve_polys(&b)?.iter().map(|v| RingElement::new(&self.ring, v)).collect())
    }

    /// Solves `self * x = rhs` for `rows >= cols`, requiring a unique solution.
    /// Gauss-Jordan with unit pivots; square systems without a unit pivot fall back to
    /// Cramer's rule when the determinant is a unit.
    pub fn solve_polys(&self, rhs: &[BinPoly]) -> Result<Vec<BinPoly>, MatrixError> {
        if rhs.len() != self.rows {
            return Err(MatrixError::DimensionMismatch(format!("rhs of length {} for {} rows", rhs.len(), self.rows)));
        }
        if self.rows < self.cols {
            return Err(MatrixError::SingularSystem { column: self.rows });
        }
        match self.gauss_jordan(rhs) {
            Ok(x) => Ok(x),
            Err(col) if self.rows == self.cols => self.cramer(rhs).ok_or(MatrixError::SingularSystem { column: col }),
            Err(col) => Err(MatrixError::SingularSystem { column: col }),
        }
    }

    fn gauss_jordan(&self, rhs: &[BinPoly]) -> Result<Vec<BinPoly>, usize> {
        let (rows, cols) = (self.rows, self.cols);
        let w = cols + 1;
        let ring = &self.ring;
        let mut a = Vec::with_capacity(rows * w);
        for i in 0..rows {
            a.extend_from_slice(self.row(i));
            a.push(rhs[i].clone());
        }
        for c in 0..cols {
            let mut found = None;
            for r in c..rows {
                let e = &a[r * w + c];
                if e.is_one() {
                    found = Some((r, BinPoly::one()));
                    break;
                }
                if let Ok(inv) = ring.inverse(e) {
                    found = Some((r, inv));
                    break;
                }
            }
            let (pr, inv) = found.ok_or(c)?;
            for j in 0..w {
                a.swap(pr * w + j, c * w + j);
            }
            if !inv.is_one() {
                for j in c..w {
                    a[c * w + j] = ring.mul(&a[c * w + j], &inv);
                }
            }
            let pivot_row: Vec<BinPoly> = a[c * w..(c + 1) * w].to_vec();
            for r in 0..rows {
                if r == c || a[r * w + c].is_zero() {
                    continue;
                }
                let f = a[r * w + c].clone();
                for j in c..w {
                    if !pivot_row[j].is_zero() {
                        let t = ring.mul(&f, &pivot_row[j]);
                        a[r * w + j] += &t;
                    }
                }
            }
        }
        // leftover equations must be satisfied
        for r in cols..rows {
            if !a[r * w + cols].is_zero() {
                return Err(cols);
            }
        }
        Ok((0..cols).map(|c| a[c * w + cols].clone()).collect())
    }

    fn cramer(&self, rhs: &[BinPoly]) -> Option<Vec<BinPoly>> {
        let det = self.determinant().ok()?;
        let inv = det.inverse().ok()?;
        let n = self.rows;
        let x: Vec<BinPoly> = (0..n)
            .map(|c| {
                let mut m = self.clone();
                for (r, v) in rhs.iter().enumerate() {
                    m.data[r * n + c] = v.clone();
                }
                let d = m.determinant().expect("square");
                self.ring.mul(d.value(), inv.value())
            })
            .collect();
        debug_assert_eq!(self.mul_vec(&x).ok()?, rhs.iter().map(|v| self.ring.reduce(v)).collect::<Vec<_>>());
        Some(x)
    }

    pub fn inverse(&self) -> Result<RingMatrix, MatrixError> {
        let n = self.require_square()?;
        let mut out = RingMatrix::zeros(&self.ring, n, n);
        for c in 0..n {
            let mut e = vec![BinPoly::zero(); n];
            e[c] = BinPoly::one();
            let col = self.solve_polys(&e)?;
            for (r, v) in col.into_iter().enumerate() {
                out.data[r * n + c] = v;
            }
        }
        Ok(out)
    }

    /// Entries written as powers of `a` (the class of `x`): `1`, `a^k`, `0`, or the
    /// polynomial itself when the entry is not a power of `x`.
    pub fn alpha_grid(&self) -> String {
        let cells: Vec<String> = self
            .data
            .iter()
            .map(|v| {
                if v.is_zero() {
                    "0".to_string()
                } else {
                    match self.ring.log_alpha(v) {
                        Some(0) => "1".to_string(),
                        Some(1) => "a".to_string(),
                        Some(k) => format!("a^{k}"),
                        None => format!("[{v}]"),
                    }
                }
            })
            .collect();
        let width = cells.iter().map(|c| c.len()).max().unwrap_or(1);
        let mut s = String::new();
        for i in 0..self.rows {
            let line: Vec<String> = (0..self.cols).map(|j| format!("{:>width$}", cells[i * self.cols + j])).collect();
            s.push_str(line.join(" ").trim_end());
            s.push('\n');
        }
        s
    }
}

impl PartialEq for RingMatrix {
    fn eq(&self, o: &RingMatrix) -> bool {
        self.ring.same(&o.ring) && self.rows == o.rows && self.cols == o.cols && self.data == o.data
    }
}

impl fmt::Display for RingMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.alpha_grid())
    }
}

pub fn determinant(m: &RingMatrix) -> Result<RingElement, MatrixError> {
    m.determinant()
}

pub fn is_invertible(m: &RingMatrix) -> Result<bool, MatrixError> {
    m.is_invertible()
}

pub fn solve_linear(m: &RingMatrix, rhs: &[RingElement]) -> Result<Vec<RingElement>, MatrixError> {
    m.solve(rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_matrix(ring: Ring, n: usize) -> impl Strategy<Value = RingMatrix> {
        let b = ring.degree();
        proptest::collection::vec(proptest::collection::vec(any::<u64>(), b.div_ceil(64)), n * n).prop_map(move |cells| {
            let mut it = cells.into_iter();
            RingMatrix::from_fn(&ring, n, n, |_, _| BinPoly::from_limbs(&it.next().unwrap()))
        })
    }

    /// Matrices of powers of x and 0/1 entries, where singular cases are common.
    fn arb_sparse(ring: Ring, n: usize) -> impl Strategy<Value = RingMatrix> {
        let e = ring.exponent() as i64;
        proptest::collection::vec(prop_oneof![Just(None), (0..e).prop_map(Some), Just(Some(0))], n * n).prop_map(move |cells| {
            let mut it = cells.into_iter();
            RingMatrix::from_fn(&ring, n, n, |_, _| it.next().unwrap().map(|k| ring.alpha_pow(k)).unwrap_or_default())
        })
    }

    fn gcd_rule(m: &RingMatrix) -> bool {
        m.determinant().unwrap().is_unit()
    }

    #[test]
    fn vandermonde_three_in_one_row() {
        // columns (a^j, a^2j, a^4j) scaled by the row offset: three erasures in row i0 of a
        // code with two global parities and row parity; det is
        // a^(3 i0 n + 2 j0 + j1) (1 + a^(j1-j0)) (1 + a^(j2-j0)) (1 + a^(j2-j1))
        let ring = Ring::all_ones(17).unwrap();
        let n = 4;
        for (i0, j0, j1, j2) in [(0i64, 0i64, 1i64, 2i64), (1, 0, 2, 3), (2, 1, 2, 3), (3, 0, 1, 3)] {
            let cols = [j0, j1, j2].map(|j| i0 * n + j);
            let m = RingMatrix::from_fn(&ring, 3, 3, |r, c| if r == 0 { BinPoly::one() } else { ring.alpha_pow(cols[c] << (r - 1)) });
            let one = BinPoly::one();
            let f = |d: i64| &one + &ring.alpha_pow(d);
            let expect = [ring.alpha_pow(3 * i0 * n + 2 * j0 + j1), f(j1 - j0), f(j2 - j0), f(j2 - j1)]
                .iter()
                .fold(BinPoly::one(), |acc, v| ring.mul(&acc, v));
            assert_eq!(m.determinant().unwrap().value(), &expect);
        }
    }

    #[test]
    fn product_ring_needs_cramer() {
        // M_7 splits; [[e1, e2], [e2, e1]] can have a unit determinant without unit entries
        let ring = Ring::all_ones(7).unwrap();
        let f1 = BinPoly::from_exponents([0, 1, 3]);
        let f2 = BinPoly::from_exponents([0, 2, 3]);
        // idempotent-like elements: multiples of one factor only
        let e1 = ring.reduce(&f1);
        let e2 = ring.reduce(&f2);
        assert!(!ring.is_unit(&e1) && !ring.is_unit(&e2));
        let m = RingMatrix::from_fn(&ring, 2, 2, |i, j| if i == j { e1.clone() } else { e2.clone() });
        let det = m.determinant().unwrap();
        assert_eq!(m.is_invertible().unwrap(), det.is_unit());
        if det.is_unit() {
            let rhs = vec![ring.alpha(1), ring.alpha(2)];
            let x = m.solve(&rhs).unwrap();
            let back = m.mul_vec(&x.iter().map(|v| v.value().clone()).collect::<Vec<_>>()).unwrap();
            assert_eq!(back, rhs.iter().map(|v| v.value().clone()).collect::<Vec<_>>());
        }
    }

    #[test]
    fn bareiss_matches_cofactor_on_boundary() {
        let ring = Ring::all_ones(17).unwrap();
        let m = RingMatrix::from_fn(&ring, 6, 6, |i, j| ring.alpha_pow((i * 7 + j * j * 3 + i * j) as i64));
        assert_eq!(ring.reduce(&m.det_bareiss()), m.det_cofactor());
    }

    #[test]
    fn non_square_is_rejected() {
        let ring = Ring::all_ones(5).unwrap();
        let m = RingMatrix::zeros(&ring, 2, 3);
        assert_eq!(m.determinant(), Err(MatrixError::NotSquare { rows: 2, cols: 3 }));
        assert!(m.is_invertible().is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn invertibility_matches_gcd_rule_mp(m in (2usize..6).prop_flat_map(|n| arb_sparse(Ring::all_ones(17).unwrap(), n))) {
            prop_assert_eq!(m.is_invertible().unwrap(), gcd_rule(&m));
        }

        #[test]
        fn invertibility_matches_gcd_rule_big(m in (2usize..5).prop_flat_map(|n| arb_sparse(Ring::all_ones(73).unwrap(), n))) {
            prop_assert_eq!(m.is_invertible().unwrap(), gcd_rule(&m));
        }

        #[test]
        fn invertibility_matches_gcd_rule_field(m in (2usize..6).prop_flat_map(|n| arb_sparse(Ring::parse("435").unwrap(), n))) {
            prop_assert_eq!(m.is_invertible().unwrap(), gcd_rule(&m));
        }

        #[test]
        fn bareiss_matches_cofactor(m in (1usize..7).prop_flat_map(|n| arb_matrix(Ring::all_ones(31).unwrap(), n))) {
            prop_assert_eq!(m.ring().reduce(&m.det_bareiss()), m.det_cofactor());
        }

        #[test]
        fn large_determinant_matches_rank(m in (7usize..10).prop_flat_map(|n| arb_sparse(Ring::all_ones(23).unwrap(), n))) {
            prop_assert_eq!(m.is_invertible().unwrap(), gcd_rule(&m));
        }

        #[test]
        fn solve_roundtrip(m in (1usize..6).prop_flat_map(|n| arb_matrix(Ring::all_ones(13).unwrap(), n)), seed in any::<u64>()) {
            let ring = m.ring().clone();
            let x: Vec<BinPoly> = (0..m.cols()).map(|i| ring.reduce(&BinPoly::from_u64(seed.rotate_left(i as u32 * 7)))).collect();
            let b = m.mul_vec(&x).unwrap();
            match m.solve_polys(&b) {
                Ok(sol) => {
                    prop_assert!(m.is_invertible().unwrap());
                    prop_assert_eq!(sol, x);
                }
                Err(_) => prop_assert!(!m.is_invertible().unwrap()),
            }
        }

        #[test]
        fn inverse_is_two_sided(m in (1usize..5).prop_flat_map(|n| arb_matrix(Ring::parse("435").unwrap(), n))) {
            if let Ok(inv) = m.inverse() {
                let id = RingMatrix::identity(m.ring(), m.rows());
                prop_assert_eq!(m.mul(&inv).unwrap(), id.clone());
                prop_assert_eq!(inv.mul(&m).unwrap(), id);
            } else {
                prop_assert!(!m.is_invertible().unwrap());
            }
        }
    }
}
