//! Residue arithmetic shared by the exact rank test, with a single-word backend
//! for moduli of degree at most 63.

use crate::poly::{clmul, BinPoly};

pub(crate) trait Residue: Clone + PartialEq + std::fmt::Debug {
    fn is_zero(&self) -> bool;
    fn is_one(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn mul_mod(&self, o: &Self, m: &Self) -> Self;
    fn rem(&self, m: &Self) -> Self;
    fn div_exact(&self, d: &Self) -> Self;
    /// gcd with `m`, plus the inverse modulo `m` when the gcd is 1.
    fn gcd_inv(&self, m: &Self) -> (Self, Option<Self>);
}

impl Residue for BinPoly {
    fn is_zero(&self) -> bool {
        BinPoly::is_zero(self)
    }
    fn is_one(&self) -> bool {
        BinPoly::is_one(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul_mod(&self, o: &Self, m: &Self) -> Self {
        if self.is_one() {
            return o.clone();
        }
        if o.is_one() {
            return self.clone();
        }
        if let Some(p) = m.all_ones_length() {
            let mut r = self.mul(o).fold_cyclic(p);
            if r.coeff(p - 1) {
                r += m;
            }
            return r;
        }
        BinPoly::mul_mod(self, o, m)
    }
    fn rem(&self, m: &Self) -> Self {
        BinPoly::rem(self, m)
    }
    fn div_exact(&self, d: &Self) -> Self {
        self.div_rem(d).0
    }
    fn gcd_inv(&self, m: &Self) -> (Self, Option<Self>) {
        let (g, s, _) = BinPoly::ext_gcd(self, m);
        if g.is_one() {
            let inv = s.rem(m);
            (g, Some(inv))
        } else {
            (g, None)
        }
    }
}

#[inline]
fn deg64(a: u64) -> u32 {
    63 - a.leading_zeros()
}

/// Remainder of a 128-bit polynomial by a nonzero `m`.
#[inline]
pub(crate) fn rem128(mut x: u128, m: u64) -> u64 {
    let d = deg64(m);
    let mm = m as u128;
    while x >> d != 0 {
        let top = 127 - x.leading_zeros();
        x ^= mm << (top - d);
    }
    x as u64
}

#[inline]
pub(crate) fn divrem64(a: u64, b: u64) -> (u64, u64) {
    let db = deg64(b);
    let (mut q, mut r) = (0u64, a);
    while r != 0 && deg64(r) >= db {
        let s = deg64(r) - db;
        q ^= 1 << s;
        r ^= b << s;
    }
    (q, r)
}

/// Product modulo `m` for single-word residues. All-ones moduli take a folding shortcut.
#[inline]
pub(crate) fn mul_mod64(a: u64, b: u64, m: u64) -> u64 {
    if a == 1 {
        return b;
    }
    if b == 1 {
        return a;
    }
    let prod = clmul(a, b);
    if m & m.wrapping_add(1) == 0 {
        // m = 1 + x + ... + x^(p-1); reduce modulo x^p - 1, then fix the top bit
        let p = 64 - m.leading_zeros();
        let mask = (1u128 << p) - 1;
        let mut r = (prod & mask) ^ (prod >> p);
        r = (r & mask) ^ (r >> p);
        let mut r = r as u64;
        if r >> (p - 1) & 1 == 1 {
            r ^= m;
        }
        r
    } else {
        rem128(prod, m)
    }
}

impl Residue for u64 {
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn is_one(&self) -> bool {
        *self == 1
    }
    fn add(&self, o: &Self) -> Self {
        self ^ o
    }
    fn mul_mod(&self, o: &Self, m: &Self) -> Self {
        mul_mod64(*self, *o, *m)
    }
    fn rem(&self, m: &Self) -> Self {
        rem128(*self as u128, *m)
    }
    fn div_exact(&self, d: &Self) -> Self {
        divrem64(*self, *d).0
    }
    fn gcd_inv(&self, m: &Self) -> (Self, Option<Self>) {
        let (mut r0, mut r1) = (*m, *self);
        let (mut s0, mut s1) = (0u64, 1u64);
        while r1 != 0 {
            let (q, r) = divrem64(r0, r1);
            (r0, r1) = (r1, r);
            let s2 = s0 ^ clmul(q, s1) as u64;
            (s0, s1) = (s1, s2);
        }
        if r0 == 1 {
            (1, Some(s0.rem(m)))
        } else {
            (r0, None)
        }
    }
}

/// Whether the `rows x cols` matrix (row-major, entries reduced modulo `modulus`) has
/// trivial kernel over the ring. Exact for squarefree moduli: when a column has nonzero
/// entries but no unit, the modulus is split along a gcd and both factors are processed.
pub(crate) fn full_column_rank<R: Residue>(a: Vec<R>, rows: usize, cols: usize, modulus: R) -> bool {
    if cols > rows {
        return false;
    }
    let mut stack = vec![(a, modulus, 0usize)];
    'task: while let Some((mut a, g, start)) = stack.pop() {
        for c in start..cols {
            let mut pivot = None;
            let mut divisor = None;
            for r in c..rows {
                let e = &a[r * cols + c];
                if e.is_zero() {
                    continue;
                }
                if e.is_one() {
                    pivot = Some((r, e.clone()));
                    break;
                }
                let (d, inv) = e.gcd_inv(&g);
                if let Some(inv) = inv {
                    pivot = Some((r, inv));
                    break;
                }
                if divisor.is_none() {
                    divisor = Some(d);
                }
            }
            let Some((pr, inv)) = pivot else {
                let Some(d) = divisor else { return false };
                let h = g.div_exact(&d);
                for m in [d, h] {
                    let sub: Vec<R> = a.iter().map(|e| e.rem(&m)).collect();
                    stack.push((sub, m, c));
                }
                continue 'task;
            };
            if pr != c {
                for j in c..cols {
                    a.swap(pr * cols + j, c * cols + j);
                }
            }
            for r in c + 1..rows {
                let e = a[r * cols + c].clone();
                if e.is_zero() {
                    continue;
                }
                let f = e.mul_mod(&inv, &g);
                for j in c..cols {
                    let t = a[c * cols + j].clone();
                    if t.is_zero() {
                        continue;
                    }
                    let v = a[r * cols + j].add(&f.mul_mod(&t, &g));
                    a[r * cols + j] = v;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn product_ring_needs_splitting() {
        // modulo M_7 = (1+x+x^3)(1+x^2+x^3): diag(a, b) with a = 1+x+x^3 only vanishes on one factor
        let m = 0b111_1111u64;
        let a = 0b1011u64;
        assert!(!full_column_rank(vec![a, 0, 0, 1], 2, 2, m));
        let b = 0b1101u64;
        // [[a, 1], [1, b]] has det a*b + 1 = M_7 + 1 + ... ; compare with the BinPoly backend
        let mat = vec![a, 1, 1, b];
        let big: Vec<BinPoly> = mat.iter().map(|&v| BinPoly::from_u64(v)).collect();
        assert_eq!(full_column_rank(mat, 2, 2, m), full_column_rank(big, 2, 2, BinPoly::from_u64(m)));
    }

    proptest! {
        #[test]
        fn word_and_poly_backends_agree(a in any::<u64>(), b in any::<u64>(), p in prop::sample::select(vec![5u32, 17, 31, 47, 61])) {
            let m = (1u64 << p) - 1;
            let (a, b) = (a.rem(&m), b.rem(&m));
            let (pa, pb, pm) = (BinPoly::from_u64(a), BinPoly::from_u64(b), BinPoly::from_u64(m));
            prop_assert_eq!(BinPoly::from_u64(a.mul_mod(&b, &m)), pa.mul_mod(&pb, &pm));
            let (g, inv) = a.gcd_inv(&m);
            let (pg, pinv) = pa.gcd_inv(&pm);
            if a != 0 {
                prop_assert_eq!(BinPoly::from_u64(g), pg);
                prop_assert_eq!(inv.map(BinPoly::from_u64), pinv);
            }
        }

        #[test]
        fn generic_modulus_mul(a in any::<u32>(), b in any::<u32>()) {
            let m = 0o435u64;
            let (a, b) = ((a as u64).rem(&m), (b as u64).rem(&m));
            prop_assert_eq!(BinPoly::from_u64(a.mul_mod(&b, &m)), BinPoly::from_u64(a).mul_mod(&BinPoly::from_u64(b), &BinPoly::from_u64(m)));
        }
    }
}
