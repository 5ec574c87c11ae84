//! Unit testing by evaluation.
//!
//! A polynomial `g` is a unit modulo a squarefree `f` exactly when `g` does not vanish at any
//! root of `f`. For `M_p` the roots are the primitive `p`-th roots of unity, which fall into
//! one conjugacy class per cyclotomic coset of 2 modulo `p`; evaluating at one representative
//! per class is enough. For irreducible `f` the ring is already a field and `x` is a root.
//! Roots live in `GF(2^k)` with `k <= 128`, stored as `u128`.

use crate::poly::{clmul, multiplicative_order_of_two, BinPoly};
use crate::ring::{ModulusKind, Ring};

/// `GF(2^k)` as polynomials modulo an irreducible `q` of degree `k`.
#[derive(Clone, Debug)]
pub struct Gf2k {
    k: u32,
    mask: u128,
    /// `red[b][v]` is `v(x) * x^(k + 8b) mod q`.
    red: Vec<[u128; 256]>,
}

impl Gf2k {
    pub fn new(q: &BinPoly) -> Self {
        let k = q.degree().expect("nonzero modulus") as u32;
        assert!((1..=128).contains(&k), "field degree {k} outside 1..=128");
        let mask = if k == 128 { u128::MAX } else { (1u128 << k) - 1 };
        let nbytes = (k as usize - 1).div_ceil(8);
        let mut red = Vec::with_capacity(nbytes);
        for b in 0..nbytes {
            let base: Vec<u128> = (0..8)
                .map(|t| BinPoly::monomial(k as usize + 8 * b + t).rem(q).to_u128().unwrap())
                .collect();
            let mut table = [0u128; 256];
            for v in 1..256usize {
                let low = v.trailing_zeros() as usize;
                table[v] = table[v & (v - 1)] ^ base[low];
            }
            red.push(table);
        }
        Gf2k { k, mask, red }
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    #[inline]
    pub fn mul(&self, a: u128, b: u128) -> u128 {
        if self.k <= 64 {
            return self.reduce(clmul(a as u64, b as u64), 0);
        }
        let (a0, a1) = (a as u64, (a >> 64) as u64);
        let (b0, b1) = (b as u64, (b >> 64) as u64);
        let mut lo = clmul(a0, b0);
        let mut hi = clmul(a1, b1);
        let mid = clmul(a0, b1) ^ clmul(a1, b0);
        lo ^= mid << 64;
        hi ^= mid >> 64;
        self.reduce(lo, hi)
    }

    #[inline]
    fn reduce(&self, lo: u128, hi: u128) -> u128 {
        let k = self.k;
        let high = if k == 128 { hi } else { (lo >> k) | if hi == 0 { 0 } else { hi << (128 - k) } };
        let mut r = lo & self.mask;
        let mut h = high;
        for t in &self.red {
            if h == 0 {
                break;
            }
            r ^= t[(h & 0xff) as usize];
            h >>= 8;
        }
        r
    }

    pub fn pow(&self, a: u128, mut e: u128) -> u128 {
        let mut base = a;
        let mut acc = 1u128;
        while e != 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            e >>= 1;
            if e != 0 {
                base = self.mul(base, base);
            }
        }
        acc
    }

    /// Inverse of a nonzero element (Fermat).
    pub fn inv(&self, a: u128) -> u128 {
        debug_assert!(a != 0);
        let order = if self.k == 128 { u128::MAX } else { (1u128 << self.k) - 1 };
        self.pow(a, order - 1)
    }
}

/// Finds an irreducible polynomial of degree `k` with few terms.
pub fn sparse_irreducible(k: usize) -> BinPoly {
    let one = BinPoly::one();
    let top = BinPoly::monomial(k);
    if k == 1 {
        return &top + &one;
    }
    for a in 1..k {
        let q = &(&top + &BinPoly::monomial(a)) + &one;
        if q.is_irreducible() {
            return q;
        }
    }
    for a in 3..k {
        for b in 2..a {
            for c in 1..b {
                let q = BinPoly::from_exponents([k, a, b, c, 0]);
                if q.is_irreducible() {
                    return q;
                }
            }
        }
    }
    unreachable!("every degree has an irreducible trinomial or pentanomial below 129")
}

/// Powers of one root of each irreducible factor of the modulus.
#[derive(Clone, Debug)]
pub struct Evaluator {
    field: Gf2k,
    exponent: u64,
    /// `tables[pt][i]` is `zeta_pt^i` for `i < exponent`.
    tables: Vec<Vec<u128>>,
}

/// Power tables above this many entries per point are not built.
const TABLE_LIMIT: u64 = 1 << 22;

impl Evaluator {
    /// `None` when the roots need a field larger than `GF(2^128)` or the tables would be too big.
    pub fn new(ring: &Ring) -> Option<Evaluator> {
        match ring.kind() {
            ModulusKind::AllOnes { p } => {
                let k = multiplicative_order_of_two(p) as usize;
                if k > 128 {
                    return None;
                }
                let q = sparse_irreducible(k);
                let field = Gf2k::new(&q);
                let group = if k == 128 { u128::MAX } else { (1u128 << k) - 1 };
                let cofactor = group / p as u128;
                let zeta = (2u128..)
                    .map(|g| field.pow(g, cofactor))
                    .find(|&z| z != 1)
                    .expect("GF(2^k) has elements of order p");
                let mut seen = vec![false; p as usize];
                let mut tables = Vec::new();
                for c in 1..p {
                    if seen[c as usize] {
                        continue;
                    }
                    let mut v = c;
                    loop {
                        seen[v as usize] = true;
                        v = v * 2 % p;
                        if v == c {
                            break;
                        }
                    }
                    let root = field.pow(zeta, c as u128);
                    tables.push(power_table(&field, root, p));
                }
                Some(Evaluator { field, exponent: p, tables })
            }
            ModulusKind::Irreducible => {
                let b = ring.degree();
                if b > 128 || ring.exponent() > TABLE_LIMIT {
                    return None;
                }
                let field = Gf2k::new(ring.modulus());
                let root = if b == 1 { 1 } else { 2 };
                let tables = vec![power_table(&field, root, ring.exponent())];
                Some(Evaluator { field, exponent: ring.exponent(), tables })
            }
        }
    }

    pub fn field(&self) -> &Gf2k {
        &self.field
    }

    pub fn points(&self) -> usize {
        self.tables.len()
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    /// `zeta_pt^k` for any integer `k`.
    #[inline]
    pub fn power(&self, pt: usize, k: i64) -> u128 {
        self.tables[pt][k.rem_euclid(self.exponent as i64) as usize]
    }

    pub fn table(&self, pt: usize) -> &[u128] {
        &self.tables[pt]
    }

    /// Values of `sum x^k` over the exponents, one per point.
    pub fn eval_sparse(&self, exps: &[i64]) -> Vec<u128> {
        (0..self.points()).map(|pt| exps.iter().fold(0u128, |acc, &k| acc ^ self.power(pt, k))).collect()
    }

    /// Whether `sum x^k` over the exponents (repeats cancel) is a unit in the ring.
    pub fn is_unit_sparse(&self, exps: &[i64]) -> bool {
        self.eval_sparse(exps).iter().all(|&v| v != 0)
    }

    /// Values of an arbitrary residue at each point.
    pub fn eval_poly(&self, a: &BinPoly) -> Vec<u128> {
        let exps: Vec<i64> = a.exponents().map(|e| e as i64).collect();
        self.eval_sparse(&exps)
    }
}

fn power_table(field: &Gf2k, root: u128, len: u64) -> Vec<u128> {
    let mut v = Vec::with_capacity(len as usize);
    let mut cur = 1u128;
    for _ in 0..len {
        v.push(cur);
        cur = field.mul(cur, root);
    }
    debug_assert_eq!(cur, 1, "root order must divide the exponent");
    v
}
