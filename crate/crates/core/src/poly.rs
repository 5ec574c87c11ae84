//! Polynomials over GF(2) stored as packed little-endian bit limbs.
//!
//! Bit `i` of the packed representation is the coefficient of `x^i`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul};

use smallvec::SmallVec;

use crate::error::AlgebraError;

type Limbs = SmallVec<[u64; 8]>;

/// Carry-less 64x64 -> 128 bit product.
#[inline]
pub fn clmul(a: u64, b: u64) -> u128 {
    #[cfg(target_arch = "x86_64")]
    {
        if std::arch::is_x86_feature_detected!("pclmulqdq") {
            // SAFETY: feature presence checked at runtime just above.
            return unsafe { clmul_hw(a, b) };
        }
    }
    clmul_soft(a, b)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "pclmulqdq")]
unsafe fn clmul_hw(a: u64, b: u64) -> u128 {
    use std::arch::x86_64::{_mm_clmulepi64_si128, _mm_set_epi64x};
    let r = _mm_clmulepi64_si128(_mm_set_epi64x(0, a as i64), _mm_set_epi64x(0, b as i64), 0);
    std::mem::transmute::<_, u128>(r)
}

pub fn clmul_soft(a: u64, b: u64) -> u128 {
    let mut acc = 0u128;
    let mut b = b;
    let a = a as u128;
    while b != 0 {
        let i = b.trailing_zeros();
        acc ^= a << i;
        b &= b - 1;
    }
    acc
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BinPoly {
    limbs: Limbs,
}

impl BinPoly {
    pub fn zero() -> Self {
        BinPoly { limbs: Limbs::new() }
    }

    pub fn one() -> Self {
        Self::from_u64(1)
    }

    pub fn x() -> Self {
        Self::from_u64(2)
    }

    pub fn monomial(k: usize) -> Self {
        let mut limbs = Limbs::from_elem(0, k / 64 + 1);
        limbs[k / 64] = 1u64 << (k % 64);
        BinPoly { limbs }
    }

    pub fn from_u64(v: u64) -> Self {
        let mut p = BinPoly { limbs: smallvec::smallvec![v] };
        p.trim();
        p
    }

    pub fn from_u128(v: u128) -> Self {
        let mut p = BinPoly { limbs: smallvec::smallvec![v as u64, (v >> 64) as u64] };
        p.trim();
        p
    }

    pub fn from_limbs(limbs: &[u64]) -> Self {
        let mut p = BinPoly { limbs: Limbs::from_slice(limbs) };
        p.trim();
        p
    }

    /// Sum of `x^e` over the given exponents (repeated exponents cancel).
    pub fn from_exponents<I: IntoIterator<Item = usize>>(exps: I) -> Self {
        let mut p = BinPoly::zero();
        for e in exps {
            p.toggle(e);
        }
        p.trim();
        p
    }

    /// `1 + x + ... + x^(len-1)`.
    pub fn all_ones(len: usize) -> Self {
        let mut limbs = Limbs::from_elem(u64::MAX, len.div_ceil(64));
        if !len.is_multiple_of(64) {
            *limbs.last_mut().unwrap() = (1u64 << (len % 64)) - 1;
        }
        let mut p = BinPoly { limbs };
        p.trim();
        p
    }

    pub fn limbs(&self) -> &[u64] {
        &self.limbs
    }

    pub fn to_u64(&self) -> Option<u64> {
        match self.limbs.len() {
            0 => Some(0),
            1 => Some(self.limbs[0]),
            _ => None,
        }
    }

    pub fn to_u128(&self) -> Option<u128> {
        match self.limbs.len() {
            0 => Some(0),
            1 => Some(self.limbs[0] as u128),
            2 => Some(self.limbs[0] as u128 | (self.limbs[1] as u128) << 64),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.limbs.len() == 1 && self.limbs[0] == 1
    }

    pub fn degree(&self) -> Option<usize> {
        let top = *self.limbs.last()?;
        Some((self.limbs.len() - 1) * 64 + 63 - top.leading_zeros() as usize)
    }

    pub fn coeff(&self, i: usize) -> bool {
        self.limbs.get(i / 64).is_some_and(|l| l >> (i % 64) & 1 == 1)
    }

    pub fn set_coeff(&mut self, i: usize, v: bool) {
        if self.coeff(i) != v {
            self.toggle(i);
            self.trim();
        }
    }

    fn toggle(&mut self, i: usize) {
        if self.limbs.len() <= i / 64 {
            self.limbs.resize(i / 64 + 1, 0);
        }
        self.limbs[i / 64] ^= 1u64 << (i % 64);
    }

    /// Number of nonzero coefficients.
    pub fn weight(&self) -> u32 {
        self.limbs.iter().map(|l| l.count_ones()).sum()
    }

    /// Exponents with nonzero coefficient, ascending.
    pub fn exponents(&self) -> impl Iterator<Item = usize> + '_ {
        self.limbs.iter().enumerate().flat_map(|(w, &l)| {
            let mut bits = l;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(w * 64 + b)
            })
        })
    }

    /// `Some(p)` when the polynomial is `1 + x + ... + x^(p-1)`.
    pub fn all_ones_length(&self) -> Option<usize> {
        let d = self.degree()?;
        (self.weight() as usize == d + 1).then_some(d + 1)
    }

    fn trim(&mut self) {
        while self.limbs.last() == Some(&0) {
            self.limbs.pop();
        }
    }

    pub fn shl(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let (w, b) = (k / 64, k % 64);
        let mut limbs = Limbs::from_elem(0, self.limbs.len() + w + 1);
        for (i, &l) in self.limbs.iter().enumerate() {
            limbs[i + w] ^= l << b;
            if b != 0 {
                limbs[i + w + 1] ^= l >> (64 - b);
            }
        }
        let mut p = BinPoly { limbs };
        p.trim();
        p
    }

    pub fn shr(&self, k: usize) -> Self {
        let (w, b) = (k / 64, k % 64);
        if w >= self.limbs.len() {
            return Self::zero();
        }
        let n = self.limbs.len() - w;
        let mut limbs = Limbs::from_elem(0, n);
        for i in 0..n {
            let mut v = self.limbs[i + w] >> b;
            if b != 0 && i + w + 1 < self.limbs.len() {
                v |= self.limbs[i + w + 1] << (64 - b);
            }
            limbs[i] = v;
        }
        let mut p = BinPoly { limbs };
        p.trim();
        p
    }

    /// Keep only the coefficients of `x^0 .. x^(k-1)`.
    pub fn low_bits(&self, k: usize) -> Self {
        let mut p = self.clone();
        let words = k.div_ceil(64);
        p.limbs.truncate(words);
        if !k.is_multiple_of(64) && p.limbs.len() == words {
            p.limbs[words - 1] &= (1u64 << (k % 64)) - 1;
        }
        p.trim();
        p
    }

    /// `self ^= other * x^shift`
    fn xor_shifted(&mut self, other: &Self, shift: usize) {
        let (w, b) = (shift / 64, shift % 64);
        let need = other.limbs.len() + w + usize::from(b != 0);
        if self.limbs.len() < need {
            self.limbs.resize(need, 0);
        }
        for (i, &l) in other.limbs.iter().enumerate() {
            self.limbs[i + w] ^= l << b;
            if b != 0 {
                self.limbs[i + w + 1] ^= l >> (64 - b);
            }
        }
        self.trim();
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if self.is_one() {
            return other.clone();
        }
        if other.is_one() {
            return self.clone();
        }
        let mut limbs = Limbs::from_elem(0, self.limbs.len() + other.limbs.len());
        for (i, &a) in self.limbs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.limbs.iter().enumerate() {
                let p = clmul(a, b);
                limbs[i + j] ^= p as u64;
                limbs[i + j + 1] ^= (p >> 64) as u64;
            }
        }
        let mut p = BinPoly { limbs };
        p.trim();
        p
    }

    /// Quotient and remainder. Panics when `d` is zero.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("polynomial division by zero");
        let mut r = self.clone();
        let mut q = BinPoly::zero();
        while let Some(rd) = r.degree() {
            if rd < dd {
                break;
            }
            q.toggle(rd - dd);
            r.xor_shifted(d, rd - dd);
        }
        q.trim();
        (q, r)
    }

    /// Remainder modulo `d`. Panics when `d` is zero.
    pub fn rem(&self, d: &Self) -> Self {
        let dd = d.degree().expect("polynomial division by zero");
        if self.degree().is_none_or(|sd| sd < dd) {
            return self.clone();
        }
        let mut r = self.clone();
        while let Some(rd) = r.degree() {
            if rd < dd {
                break;
            }
            r.xor_shifted(d, rd - dd);
        }
        r
    }

    /// Reduce modulo `x^p - 1`.
    pub fn fold_cyclic(&self, p: usize) -> Self {
        let mut r = self.clone();
        while r.degree().is_some_and(|d| d >= p) {
            let hi = r.shr(p);
            r = r.low_bits(p);
            r += &hi;
        }
        r
    }

    pub fn mul_mod(&self, other: &Self, m: &Self) -> Self {
        self.mul(other).rem(m)
    }

    pub fn square_mod(&self, m: &Self) -> Self {
        self.mul_mod(self, m)
    }

    pub fn pow_mod(&self, mut e: u128, m: &Self) -> Self {
        let mut base = self.rem(m);
        let mut acc = BinPoly::one().rem(m);
        while e != 0 {
            if e & 1 == 1 {
                acc = acc.mul_mod(&base, m);
            }
            e >>= 1;
            if e != 0 {
                base = base.square_mod(m);
            }
        }
        acc
    }

    /// Returns `(g, s, t)` with `s*a + t*b = g = gcd(a, b)`.
    pub fn ext_gcd(a: &Self, b: &Self) -> (Self, Self, Self) {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (BinPoly::one(), BinPoly::zero());
        let (mut t0, mut t1) = (BinPoly::zero(), BinPoly::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s2 = &s0 + &q.mul(&s1);
            s0 = std::mem::replace(&mut s1, s2);
            let t2 = &t0 + &q.mul(&t1);
            t0 = std::mem::replace(&mut t1, t2);
        }
        (r0, s0, t0)
    }

    pub fn gcd(a: &Self, b: &Self) -> Result<Self, AlgebraError> {
        if a.is_zero() && b.is_zero() {
            return Err(AlgebraError::ZeroGcd);
        }
        let (mut r0, mut r1) = (a.clone(), b.clone());
        while !r1.is_zero() {
            let r = r0.rem(&r1);
            r0 = std::mem::replace(&mut r1, r);
        }
        Ok(r0)
    }

    /// Inverse modulo `m`, if it exists.
    pub fn inv_mod(&self, m: &Self) -> Option<Self> {
        let a = self.rem(m);
        if a.is_zero() {
            return None;
        }
        let (g, s, _) = Self::ext_gcd(&a, m);
        g.is_one().then(|| s.rem(m))
    }

    pub fn from_octal(s: &str) -> Result<Self, AlgebraError> {
        let t = s.trim();
        let t = t.strip_prefix("0o").unwrap_or(t);
        if t.is_empty() {
            return Err(AlgebraError::InvalidOctal(s.to_string()));
        }
        let mut p = BinPoly::zero();
        for (pos, c) in t.chars().rev().enumerate() {
            let d = c.to_digit(8).ok_or_else(|| AlgebraError::InvalidOctal(s.to_string()))?;
            for b in 0..3 {
                if d >> b & 1 == 1 {
                    p.toggle(3 * pos + b);
                }
            }
        }
        p.trim();
        Ok(p)
    }

    pub fn to_octal(&self) -> String {
        let Some(d) = self.degree() else {
            return "0".to_string();
        };
        let digits = d / 3 + 1;
        (0..digits)
            .rev()
            .map(|k| {
                let v = (0..3).filter(|&b| self.coeff(3 * k + b)).map(|b| 1u32 << b).sum::<u32>();
                char::from_digit(v, 8).unwrap()
            })
            .collect()
    }

    /// Rabin's irreducibility test.
    pub fn is_irreducible(&self) -> bool {
        let Some(d) = self.degree() else { return false };
        if d == 0 {
            return false;
        }
        let x = BinPoly::x();
        // x^(2^k) mod f for k = 0..=d
        let mut frob = Vec::with_capacity(d + 1);
        let mut cur = x.rem(self);
        frob.push(cur.clone());
        for _ in 0..d {
            cur = cur.square_mod(self);
            frob.push(cur.clone());
        }
        if frob[d] != x.rem(self) {
            return false;
        }
        for q in prime_factors(d as u128) {
            let k = d / q as usize;
            let h = &frob[k] + &x;
            if h.is_zero() || !BinPoly::gcd(&h, self).unwrap().is_one() {
                return false;
            }
        }
        true
    }
}

impl AddAssign<&BinPoly> for BinPoly {
    fn add_assign(&mut self, rhs: &BinPoly) {
        if self.limbs.len() < rhs.limbs.len() {
            self.limbs.resize(rhs.limbs.len(), 0);
        }
        for (a, b) in self.limbs.iter_mut().zip(rhs.limbs.iter()) {
            *a ^= b;
        }
        self.trim();
    }
}

impl Add for &BinPoly {
    type Output = BinPoly;
    fn add(self, rhs: &BinPoly) -> BinPoly {
        let mut r = self.clone();
        r += rhs;
        r
    }
}

impl Mul for &BinPoly {
    type Output = BinPoly;
    fn mul(self, rhs: &BinPoly) -> BinPoly {
        BinPoly::mul(self, rhs)
    }
}

impl fmt::Display for BinPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let exps: Vec<usize> = self.exponents().collect();
        let terms: Vec<String> = exps
            .iter()
            .rev()
            .map(|&e| match e {
                0 => "1".to_string(),
                1 => "x".to_string(),
                _ => format!("x^{e}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl fmt::Debug for BinPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinPoly(0o{})", self.to_octal())
    }
}

impl std::str::FromStr for BinPoly {
    type Err = AlgebraError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BinPoly::from_octal(s)
    }
}

pub fn poly_gcd(a: &BinPoly, b: &BinPoly) -> Result<BinPoly, AlgebraError> {
    BinPoly::gcd(a, b)
}

/// Multiplicative order of `x` modulo `f`: the least `e >= 1` with `f | x^e - 1`.
pub fn exponent_of(f: &BinPoly) -> Result<u64, AlgebraError> {
    let d = f.degree().ok_or(AlgebraError::ConstantModulus)?;
    if d == 0 {
        return Err(AlgebraError::ConstantModulus);
    }
    if !f.coeff(0) {
        return Err(AlgebraError::DivisibleByX);
    }
    let x = BinPoly::x();
    let one = BinPoly::one();
    if d <= 126 && f.is_irreducible() {
        // the order divides 2^d - 1
        let mut e: u128 = if d == 128 { u128::MAX } else { (1u128 << d) - 1 };
        for q in prime_factors(e) {
            while e.is_multiple_of(q) && x.pow_mod(e / q, f) == one {
                e /= q;
            }
        }
        return u64::try_from(e).map_err(|_| AlgebraError::DegreeTooLarge(d));
    }
    if let Some(p) = f.all_ones_length() {
        let p = p as u64;
        if is_prime(p) {
            return Ok(p);
        }
    }
    const LIMIT: u64 = 1 << 24;
    let mut cur = x.rem(f);
    for e in 1..=LIMIT {
        if cur == one {
            return Ok(e);
        }
        cur = cur.shl(1).rem(f);
    }
    Err(AlgebraError::ExponentSearchExhausted(LIMIT))
}

/// Whether 2 generates the multiplicative group modulo the prime `p`.
/// `p = 2` returns true so that the result agrees with irreducibility of `1 + x`.
pub fn is_two_primitive(p: u64) -> bool {
    if p == 2 {
        return true;
    }
    if !is_prime(p) {
        return false;
    }
    multiplicative_order_of_two(p) == p - 1
}

/// Order of 2 modulo an odd `p`.
pub fn multiplicative_order_of_two(p: u64) -> u64 {
    assert!(p > 2 && p % 2 == 1, "order of 2 needs an odd modulus");
    let mut v = 2 % p;
    let mut k = 1;
    while v != 1 {
        v = v * 2 % p;
        k += 1;
    }
    k
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    // deterministic Miller-Rabin for 64-bit inputs
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn primes_up_to(limit: u64) -> Vec<u64> {
    (2..=limit).filter(|&n| is_prime(n)).collect()
}

fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod_u64(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod_u64(r, a, m);
        }
        a = mul_mod_u64(a, a, m);
        e >>= 1;
    }
    r
}

fn is_prime_u128(n: u128) -> bool {
    match u64::try_from(n) {
        Ok(v) => is_prime(v),
        Err(_) => {
            // only reached for cofactors of 2^d - 1 with d > 64; trial division up to a
            // bound then a Fermat check in u128 arithmetic
            if n.is_multiple_of(2) {
                return false;
            }
            pow_mod_u128(3, n - 1, n) == 1 && pow_mod_u128(5, n - 1, n) == 1 && pow_mod_u128(7, n - 1, n) == 1
        }
    }
}

fn mul_mod_u128(a: u128, b: u128, m: u128) -> u128 {
    // double-and-add, avoids 256-bit intermediates
    let (mut a, mut b, mut r) = (a % m, b, 0u128);
    while b > 0 {
        if b & 1 == 1 {
            r = add_mod_u128(r, a, m);
        }
        a = add_mod_u128(a, a, m);
        b >>= 1;
    }
    r
}

fn add_mod_u128(a: u128, b: u128, m: u128) -> u128 {
    let (s, over) = a.overflowing_add(b);
    if over || s >= m {
        s.wrapping_sub(m)
    } else {
        s
    }
}

fn pow_mod_u128(mut a: u128, mut e: u128, m: u128) -> u128 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod_u128(r, a, m);
        }
        a = mul_mod_u128(a, a, m);
        e >>= 1;
    }
    r
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn pollard_brent(n: u128) -> u128 {
    if n.is_multiple_of(2) {
        return 2;
    }
    for c in 1u128.. {
        let f = |x: u128| add_mod_u128(mul_mod_u128(x, x, n), c, n);
        let (mut x, mut y, mut d) = (2u128, 2u128, 1u128);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd_u128(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
    }
    unreachable!()
}

/// Distinct prime factors, ascending.
pub fn prime_factors(mut n: u128) -> Vec<u128> {
    let mut out = Vec::new();
    let mut p = 2u128;
    while p * p <= n && p < 1 << 16 {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    let mut stack = vec![n];
    while let Some(v) = stack.pop() {
        if v == 1 {
            continue;
        }
        if is_prime_u128(v) {
            out.push(v);
            continue;
        }
        let d = pollard_brent(v);
        stack.push(d);
        stack.push(v / d);
    }
    out.sort_unstable();
    out.dedup();
    out
}
