//! Quotient rings GF(2)[x]/(f) for the two modulus families used by the codes:
//! an irreducible `f`, or the all-ones polynomial `1 + x + ... + x^(p-1)` for a prime `p`.

use std::fmt;
use std::ops::{Add, Mul};
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::AlgebraError;
use crate::poly::{exponent_of, is_prime, BinPoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModulusKind {
    Irreducible,
    AllOnes { p: u64 },
}

/// Powers of `x` are cached up to this exponent.
const POWER_TABLE_LIMIT: u64 = 1 << 20;

#[derive(Debug)]
pub struct ModulusSpec {
    poly: BinPoly,
    degree: usize,
    exponent: u64,
    kind: ModulusKind,
    powers: OnceLock<Vec<BinPoly>>,
}

impl ModulusSpec {
    pub fn poly(&self) -> &BinPoly {
        &self.poly
    }
    pub fn degree(&self) -> usize {
        self.degree
    }
    pub fn exponent(&self) -> u64 {
        self.exponent
    }
    pub fn kind(&self) -> ModulusKind {
        self.kind
    }
}

/// Shared handle to a modulus. Cheap to clone.
#[derive(Clone, Debug)]
pub struct Ring(Arc<ModulusSpec>);

impl Ring {
    /// `1 + x + ... + x^(p-1)` for an odd prime `p`.
    pub fn all_ones(p: u64) -> Result<Ring, AlgebraError> {
        if p < 3 || !is_prime(p) {
            return Err(AlgebraError::NotOddPrime(p));
        }
        let poly = BinPoly::all_ones(p as usize);
        Ok(Ring(Arc::new(ModulusSpec {
            poly,
            degree: p as usize - 1,
            exponent: p,
            kind: ModulusKind::AllOnes { p },
            powers: OnceLock::new(),
        })))
    }

    pub fn irreducible(f: BinPoly) -> Result<Ring, AlgebraError> {
        let degree = f.degree().ok_or(AlgebraError::ConstantModulus)?;
        if degree == 0 {
            return Err(AlgebraError::ConstantModulus);
        }
        if !f.is_irreducible() {
            return Err(AlgebraError::NotIrreducible(f.to_octal()));
        }
        let exponent = exponent_of(&f)?;
        Ok(Ring(Arc::new(ModulusSpec { poly: f, degree, exponent, kind: ModulusKind::Irreducible, powers: OnceLock::new() })))
    }

    /// Parses `mp:<p>` or an octal polynomial such as `435`.
    pub fn parse(s: &str) -> Result<Ring, AlgebraError> {
        let t = s.trim();
        if let Some(p) = t.strip_prefix("mp:").or_else(|| t.strip_prefix("MP:")) {
            let p: u64 = p.trim().parse().map_err(|_| AlgebraError::InvalidModulus(s.to_string()))?;
            return Ring::all_ones(p);
        }
        let f = BinPoly::from_octal(t).map_err(|_| AlgebraError::InvalidModulus(s.to_string()))?;
        Ring::irreducible(f)
    }

    pub fn spec(&self) -> &ModulusSpec {
        &self.0
    }
    pub fn modulus(&self) -> &BinPoly {
        &self.0.poly
    }
    /// Degree of the modulus, i.e. the number of bits per symbol.
    pub fn degree(&self) -> usize {
        self.0.degree
    }
    /// Multiplicative order of `x` in the ring.
    pub fn exponent(&self) -> u64 {
        self.0.exponent
    }
    pub fn kind(&self) -> ModulusKind {
        self.0.kind
    }

    pub fn same(&self, other: &Ring) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.poly == other.0.poly
    }

    pub fn reduce(&self, a: &BinPoly) -> BinPoly {
        match self.0.kind {
            ModulusKind::AllOnes { p } => {
                let p = p as usize;
                let mut r = a.fold_cyclic(p);
                if r.coeff(p - 1) {
                    r += &self.0.poly;
                }
                r
            }
            ModulusKind::Irreducible => a.rem(&self.0.poly),
        }
    }

    pub fn add(&self, a: &BinPoly, b: &BinPoly) -> BinPoly {
        a + b
    }

    /// Product of two reduced residues.
    pub fn mul(&self, a: &BinPoly, b: &BinPoly) -> BinPoly {
        if a.is_one() {
            return b.clone();
        }
        if b.is_one() {
            return a.clone();
        }
        self.reduce(&a.mul(b))
    }

    /// `x^k` reduced, for any integer `k` (negative powers exist because `x` is a unit).
    pub fn alpha_pow(&self, k: i64) -> BinPoly {
        let e = self.0.exponent;
        let k = k.rem_euclid(e as i64) as u64;
        match self.0.kind {
            ModulusKind::AllOnes { p } => {
                if k + 1 < p {
                    BinPoly::monomial(k as usize)
                } else {
                    BinPoly::all_ones(p as usize - 1)
                }
            }
            ModulusKind::Irreducible => {
                if e <= POWER_TABLE_LIMIT {
                    self.power_table()[k as usize].clone()
                } else {
                    BinPoly::x().pow_mod(k as u128, &self.0.poly)
                }
            }
        }
    }

    fn power_table(&self) -> &[BinPoly] {
        self.0.powers.get_or_init(|| {
            let mut v = Vec::with_capacity(self.0.exponent as usize);
            let mut cur = BinPoly::one();
            for _ in 0..self.0.exponent {
                v.push(cur.clone());
                cur = self.reduce(&cur.shl(1));
            }
            v
        })
    }

    /// Discrete log base `x` when the residue is a power of `x`.
    pub fn log_alpha(&self, a: &BinPoly) -> Option<u64> {
        match self.0.kind {
            ModulusKind::AllOnes { p } => {
                if a.weight() == 1 {
                    a.degree().map(|d| d as u64)
                } else if a.all_ones_length() == Some(p as usize - 1) {
                    Some(p - 1)
                } else {
                    None
                }
            }
            ModulusKind::Irreducible => {
                if self.0.exponent <= POWER_TABLE_LIMIT {
                    self.power_table().iter().position(|v| v == a).map(|i| i as u64)
                } else {
                    None
                }
            }
        }
    }

    pub fn is_unit(&self, a: &BinPoly) -> bool {
        !a.is_zero() && BinPoly::gcd(a, &self.0.poly).map(|g| g.is_one()).unwrap_or(false)
    }

    pub fn inverse(&self, a: &BinPoly) -> Result<BinPoly, AlgebraError> {
        a.inv_mod(&self.0.poly).ok_or(AlgebraError::NotInvertible)
    }

    pub fn elem(&self, a: &BinPoly) -> RingElement {
        RingElement { ring: self.clone(), value: self.reduce(a) }
    }

    pub fn zero(&self) -> RingElement {
        RingElement { ring: self.clone(), value: BinPoly::zero() }
    }

    pub fn one(&self) -> RingElement {
        RingElement { ring: self.clone(), value: BinPoly::one() }
    }

    pub fn alpha(&self, k: i64) -> RingElement {
        RingElement { ring: self.clone(), value: self.alpha_pow(k) }
    }
}

impl PartialEq for Ring {
    fn eq(&self, other: &Ring) -> bool {
        self.same(other)
    }
}
impl Eq for Ring {}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0.kind {
            ModulusKind::AllOnes { p } => write!(f, "mp:{p}"),
            ModulusKind::Irreducible => write!(f, "{}", self.0.poly.to_octal()),
        }
    }
}

/// A residue together with its ring.
#[derive(Clone, Debug)]
pub struct RingElement {
    ring: Ring,
    value: BinPoly,
}

impl RingElement {
    pub fn new(ring: &Ring, value: &BinPoly) -> Self {
        ring.elem(value)
    }
    pub fn ring(&self) -> &Ring {
        &self.ring
    }
    pub fn value(&self) -> &BinPoly {
        &self.value
    }
    pub fn into_value(self) -> BinPoly {
        self.value
    }
    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }
    pub fn is_one(&self) -> bool {
        self.value.is_one()
    }
    pub fn is_unit(&self) -> bool {
        self.ring.is_unit(&self.value)
    }

    pub fn checked_add(&self, o: &RingElement) -> Result<RingElement, AlgebraError> {
        if !self.ring.same(&o.ring) {
            return Err(AlgebraError::ModulusMismatch);
        }
        Ok(RingElement { ring: self.ring.clone(), value: &self.value + &o.value })
    }

    pub fn checked_mul(&self, o: &RingElement) -> Result<RingElement, AlgebraError> {
        if !self.ring.same(&o.ring) {
            return Err(AlgebraError::ModulusMismatch);
        }
        Ok(RingElement { ring: self.ring.clone(), value: self.ring.mul(&self.value, &o.value) })
    }

    pub fn inverse(&self) -> Result<RingElement, AlgebraError> {
        Ok(RingElement { ring: self.ring.clone(), value: self.ring.inverse(&self.value)? })
    }

    pub fn pow(&self, mut e: u64) -> RingElement {
        let mut base = self.value.clone();
        let mut acc = BinPoly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.ring.mul(&acc, &base);
            }
            base = self.ring.mul(&base, &base);
            e >>= 1;
        }
        RingElement { ring: self.ring.clone(), value: acc }
    }
}

impl PartialEq for RingElement {
    fn eq(&self, o: &RingElement) -> bool {
        self.ring.same(&o.ring) && self.value == o.value
    }
}
impl Eq for RingElement {}

impl Add for &RingElement {
    type Output = RingElement;
    /// Panics when the operands live in different rings; use `checked_add` to get an error instead.
    fn add(self, o: &RingElement) -> RingElement {
        self.checked_add(o).expect("ring element modulus mismatch")
    }
}

impl Mul for &RingElement {
    type Output = RingElement;
    fn mul(self, o: &RingElement) -> RingElement {
        self.checked_mul(o).expect("ring element modulus mismatch")
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}
