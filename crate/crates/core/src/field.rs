//! Ground fields: the rationals and prime fields of odd characteristic.
//!
//! A [`Field`] value is a small context object; elements are plain data and
//! all arithmetic goes through the field, so `F_p` elements stay a bare `u64`.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rational::{Rational, RationalParseError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Rationals,
    PrimeField,
}

/// Runtime description of a supported ground field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    Rationals,
    /// Always an odd prime.
    PrimeField(u64),
}

/// Validates a field description. Characteristic 2 and composite moduli are rejected.
pub fn make_field(kind: FieldKind, modulus: Option<u64>) -> Result<FieldSpec> {
    match kind {
        FieldKind::Rationals => Ok(FieldSpec::Rationals),
        FieldKind::PrimeField => {
            let p = modulus.ok_or(Error::MissingModulus)?;
            PrimeField::new(p).map(|f| FieldSpec::PrimeField(f.modulus()))
        }
    }
}

impl FieldSpec {
    pub fn characteristic(&self) -> u64 {
        match self {
            FieldSpec::Rationals => 0,
            FieldSpec::PrimeField(p) => *p,
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => f.write_str("Q"),
            FieldSpec::PrimeField(p) => write!(f, "Fp:{}", p),
        }
    }
}

/// Accepts `Q` or `Fp:<p>`.
impl FromStr for FieldSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "Q" {
            return Ok(FieldSpec::Rationals);
        }
        let p = s
            .strip_prefix("Fp:")
            .and_then(|d| d.parse::<u64>().ok())
            .ok_or_else(|| Error::MalformedLiteral(s.to_string()))?;
        make_field(FieldKind::PrimeField, Some(p))
    }
}

/// Exact field arithmetic.
pub trait Field: Clone + PartialEq + fmt::Debug {
    type Elem: Clone + PartialEq + Eq + Ord + fmt::Debug;

    fn spec(&self) -> FieldSpec;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// Fails with [`Error::DivisionByZero`] on zero.
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem>;
    fn parse(&self, text: &str) -> Result<Self::Elem>;
    fn render(&self, a: &Self::Elem) -> String;
    /// A small random element; rationals draw numerators and denominators
    /// from a short range so that exact tests stay fast.
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;
    /// Every element, for finite fields.
    fn elements(&self) -> Option<Vec<Self::Elem>>;

    fn characteristic(&self) -> u64 {
        self.spec().characteristic()
    }

    /// Entries of `L_{A_1} ... L_{A_k}` on `M_n`, row-major `n^2 x n^2`.
    fn jordan_word_product(&self, n: usize, factors: &[Matrix<Self>]) -> Vec<Self::Elem>
    where
        Self: Sized,
    {
        crate::jordan::word_product_generic(self, n, factors)
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    fn half(&self, a: &Self::Elem) -> Self::Elem {
        // char != 2 is a construction invariant of every field
        self.div(a, &self.from_i64(2)).expect("2 is invertible")
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Signed integer power; negative exponents invert first.
    fn powi(&self, a: &Self::Elem, e: i64) -> Result<Self::Elem> {
        if e >= 0 {
            Ok(self.pow(a, e as u64))
        } else {
            Ok(self.pow(&self.inv(a)?, e.unsigned_abs()))
        }
    }

    /// Nonzero scan order used for deterministic parameter searches:
    /// `1, -1, 2, -2, ...` over the rationals, `1, 2, ...` over `F_p`.
    fn scan_candidate(&self, k: u64) -> Self::Elem {
        match self.spec() {
            FieldSpec::Rationals => {
                let m = (k / 2 + 1) as i64;
                self.from_i64(if k.is_multiple_of(2) { m } else { -m })
            }
            FieldSpec::PrimeField(_) => self.from_i64(k as i64 + 1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = Rational;

    fn spec(&self) -> FieldSpec {
        FieldSpec::Rationals
    }

    fn zero(&self) -> Rational {
        Rational::zero()
    }

    fn one(&self) -> Rational {
        Rational::one()
    }

    fn from_i64(&self, v: i64) -> Rational {
        Rational::from_integer(v)
    }

    fn add(&self, a: &Rational, b: &Rational) -> Rational {
        a.add(b)
    }

    fn sub(&self, a: &Rational, b: &Rational) -> Rational {
        a.sub(b)
    }

    fn mul(&self, a: &Rational, b: &Rational) -> Rational {
        a.mul(b)
    }

    fn neg(&self, a: &Rational) -> Rational {
        a.neg()
    }

    fn is_zero(&self, a: &Rational) -> bool {
        a.is_zero()
    }

    fn is_one(&self, a: &Rational) -> bool {
        a.is_one()
    }

    fn inv(&self, a: &Rational) -> Result<Rational> {
        a.inv().ok_or(Error::DivisionByZero)
    }

    fn jordan_word_product(&self, n: usize, factors: &[Matrix<Self>]) -> Vec<Rational> {
        crate::qeval::word_product(n, factors)
    }

    fn half(&self, a: &Rational) -> Rational {
        a.half()
    }

    fn parse(&self, text: &str) -> Result<Rational> {
        Rational::parse(text).map_err(|e| match e {
            RationalParseError::ZeroDenominator => Error::ZeroDenominator,
            RationalParseError::Malformed => Error::MalformedLiteral(text.to_string()),
        })
    }

    fn render(&self, a: &Rational) -> String {
        a.to_string()
    }

    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Rational {
        let num = rng.random_range(-9i64..=9);
        let den = if rng.random_bool(0.5) { 1 } else { rng.random_range(1i64..=6) };
        Rational::new(num, den).expect("nonzero denominator")
    }

    fn elements(&self) -> Option<Vec<Rational>> {
        None
    }
}

/// `F_p` for an odd prime `p`; elements are residues in `[0, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p == 2 {
            return Err(Error::CharTwo);
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn from_u64(&self, v: u64) -> u64 {
        v % self.p
    }

    /// Smallest `g` with multiplicative order `p - 1`.
    pub fn multiplicative_generator(&self) -> u64 {
        let order = self.p - 1;
        let factors = prime_factors(order);
        (2..self.p)
            .find(|&g| factors.iter().all(|&q| pow_mod(g, order / q, self.p) != 1))
            .unwrap_or(1) // p = 3: 2 is found; only reached for p = 2, which is rejected
    }
}

impl Field for PrimeField {
    type Elem = u64;

    fn spec(&self) -> FieldSpec {
        FieldSpec::PrimeField(self.p)
    }

    fn zero(&self) -> u64 {
        0
    }

    fn one(&self) -> u64 {
        1
    }

    fn from_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }

    #[inline]
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = *a as u128 + *b as u128;
        (s % self.p as u128) as u64
    }

    #[inline]
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            self.p - (b - a)
        }
    }

    #[inline]
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mul_mod(*a, *b, self.p)
    }

    #[inline]
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }

    fn inv(&self, a: &u64) -> Result<u64> {
        if *a == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(pow_mod(*a, self.p - 2, self.p))
    }

    fn half(&self, a: &u64) -> u64 {
        // (p + 1) / 2 is the inverse of 2
        mul_mod(*a, self.p / 2 + 1, self.p)
    }

    fn parse(&self, text: &str) -> Result<u64> {
        let t = text.trim();
        let (neg, digits) = match t.strip_prefix('-') {
            Some(d) => (true, d),
            None => (false, t),
        };
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::MalformedLiteral(text.to_string()));
        }
        // Reduce digit by digit so arbitrarily long literals are accepted.
        let v = digits.bytes().fold(0u64, |acc, b| {
            self.add(&mul_mod(acc, 10, self.p), &((b - b'0') as u64 % self.p))
        });
        Ok(if neg { self.neg(&v) } else { v })
    }

    fn render(&self, a: &u64) -> String {
        a.to_string()
    }

    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.random_range(0..self.p)
    }

    fn elements(&self) -> Option<Vec<u64>> {
        Some((0..self.p).collect())
    }
}

/// The generator of `F_p^x` for a prime-field spec.
pub fn multiplicative_generator(field: FieldSpec) -> Result<u64> {
    match field {
        FieldSpec::Rationals => Err(Error::NotFinite),
        FieldSpec::PrimeField(p) => Ok(PrimeField::new(p)?.multiplicative_generator()),
    }
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, exact for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &w in &WITNESSES {
        if n.is_multiple_of(w) {
            return n == w;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut q = 2u64;
    while q.saturating_mul(q) <= n {
        if n.is_multiple_of(q) {
            out.push(q);
            while n.is_multiple_of(q) {
                n /= q;
            }
        }
        q += if q == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}
