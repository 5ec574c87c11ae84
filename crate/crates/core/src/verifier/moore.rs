//! Moore matrices and their determinant over characteristic two.

use crate::error::MatrixError;
use crate::matrix::RingMatrix;
use crate::ring::RingElement;

/// Square matrix whose row `u` holds the entries of `first_row` raised to `2^u`.
pub fn moore_matrix(first_row: &[RingElement]) -> Result<RingMatrix, MatrixError> {
    let mut rows = vec![first_row.to_vec()];
    for _ in 1..first_row.len() {
        let next = rows.last().unwrap().iter().map(|v| v * v).collect();
        rows.push(next);
    }
    RingMatrix::from_elements(&rows)
}

/// Product over all nonempty subsets of the subset sums, which equals the determinant
/// of [`moore_matrix`] in characteristic two.
pub fn moore_determinant(first_row: &[RingElement]) -> Result<RingElement, MatrixError> {
    let Some(first) = first_row.first() else {
        return Err(MatrixError::DimensionMismatch("empty row".into()));
    };
    let ring = first.ring().clone();
    if first_row.iter().any(|v| !v.ring().same(&ring)) {
        return Err(crate::error::AlgebraError::ModulusMismatch.into());
    }
    let k = first_row.len();
    if k >= usize::BITS as usize - 1 {
        return Err(MatrixError::DimensionMismatch(format!("{k} entries is too many")));
    }
    let mut sums = vec![ring.zero(); 1usize << k];
    let mut det = ring.one();
    for mask in 1usize..1 << k {
        let low = mask.trailing_zeros() as usize;
        sums[mask] = &sums[mask & (mask - 1)] + &first_row[low];
        det = &det * &sums[mask];
    }
    Ok(det)
}
