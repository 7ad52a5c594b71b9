//! Scalar backends: a prime field F_p or the rationals.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::LinalgError;

/// The ground field. Every matrix and vector carries exactly one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Field {
    Prime(u64),
    Rational,
}

/// A field element. `Mod` values are canonical residues in `[0, p)`,
/// `Rat` values are kept in lowest terms by `BigRational`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scalar {
    Mod(u64),
    Rat(BigRational),
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Field {
    /// Prime field with modulus `p`. Moduli are limited to 32 bits so that
    /// products of residues never overflow.
    pub fn prime(p: u64) -> Result<Field, LinalgError> {
        if p >= 1 << 32 || !is_prime(p) {
            return Err(LinalgError::NotPrime(p));
        }
        Ok(Field::Prime(p))
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Prime(p) => *p,
            Field::Rational => 0,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Field::Prime(_))
    }

    /// Number of elements, if finite.
    pub fn order(&self) -> Option<u64> {
        match self {
            Field::Prime(p) => Some(*p),
            Field::Rational => None,
        }
    }

    pub fn zero(&self) -> Scalar {
        match self {
            Field::Prime(_) => Scalar::Mod(0),
            Field::Rational => Scalar::Rat(BigRational::zero()),
        }
    }

    pub fn one(&self) -> Scalar {
        match self {
            Field::Prime(_) => Scalar::Mod(1),
            Field::Rational => Scalar::Rat(BigRational::one()),
        }
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        match self {
            Field::Prime(p) => Scalar::Mod(v.rem_euclid(*p as i64) as u64),
            Field::Rational => Scalar::Rat(BigRational::from_integer(BigInt::from(v))),
        }
    }

    /// `num / den` in this field; fails when `den` vanishes.
    pub fn from_ratio(&self, num: i64, den: i64) -> Result<Scalar, LinalgError> {
        let d = self.from_i64(den);
        let inv = self.inv(&d).ok_or(LinalgError::DivisionByZero)?;
        Ok(self.mul(&self.from_i64(num), &inv))
    }

    /// Whether `s` is a legal value of this backend.
    pub fn owns(&self, s: &Scalar) -> bool {
        match (self, s) {
            (Field::Prime(p), Scalar::Mod(v)) => v < p,
            (Field::Rational, Scalar::Rat(_)) => true,
            _ => false,
        }
    }

    pub fn check(&self, s: &Scalar) -> Result<(), LinalgError> {
        if self.owns(s) {
            Ok(())
        } else {
            Err(LinalgError::MixedBackend)
        }
    }

    #[inline]
    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (Field::Prime(p), Scalar::Mod(x), Scalar::Mod(y)) => Scalar::Mod((x + y) % p),
            (Field::Rational, Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x + y),
            _ => panic!("scalar backend mismatch"),
        }
    }

    #[inline]
    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (Field::Prime(p), Scalar::Mod(x), Scalar::Mod(y)) => Scalar::Mod((x + p - y) % p),
            (Field::Rational, Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x - y),
            _ => panic!("scalar backend mismatch"),
        }
    }

    #[inline]
    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (Field::Prime(p), Scalar::Mod(x), Scalar::Mod(y)) => Scalar::Mod(x * y % p),
            (Field::Rational, Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x * y),
            _ => panic!("scalar backend mismatch"),
        }
    }

    #[inline]
    pub fn neg(&self, a: &Scalar) -> Scalar {
        match (self, a) {
            (Field::Prime(p), Scalar::Mod(x)) => Scalar::Mod((p - x) % p),
            (Field::Rational, Scalar::Rat(x)) => Scalar::Rat(-x),
            _ => panic!("scalar backend mismatch"),
        }
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self, a: &Scalar) -> Option<Scalar> {
        if a.is_zero() {
            return None;
        }
        match (self, a) {
            (Field::Prime(p), Scalar::Mod(x)) => Some(Scalar::Mod(pow_mod(*x, p - 2, *p))),
            (Field::Rational, Scalar::Rat(x)) => Some(Scalar::Rat(x.recip())),
            _ => panic!("scalar backend mismatch"),
        }
    }

    /// The element with index `k` in a fixed enumeration of a finite field.
    pub fn element(&self, k: u64) -> Scalar {
        match self {
            Field::Prime(p) => Scalar::Mod(k % p),
            Field::Rational => self.from_i64(k as i64),
        }
    }

    /// Parse an integer or `num/den` literal.
    pub fn parse(&self, text: &str) -> Result<Scalar, LinalgError> {
        let text = text.trim();
        let bad = || LinalgError::Parse(text.to_string());
        match text.split_once('/') {
            Some((n, d)) => {
                let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
                let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
                if d.is_zero() {
                    return Err(LinalgError::DivisionByZero);
                }
                match self {
                    Field::Rational => Ok(Scalar::Rat(BigRational::new(n, d))),
                    Field::Prime(_) => {
                        let n = self.reduce_bigint(&n);
                        let d = self.reduce_bigint(&d);
                        let inv = self.inv(&d).ok_or(LinalgError::DivisionByZero)?;
                        Ok(self.mul(&n, &inv))
                    }
                }
            }
            None => {
                let n = BigInt::from_str(text).map_err(|_| bad())?;
                Ok(self.reduce_bigint(&n))
            }
        }
    }

    fn reduce_bigint(&self, n: &BigInt) -> Scalar {
        match self {
            Field::Prime(p) => {
                let r = n.mod_floor_u64(*p);
                Scalar::Mod(r)
            }
            Field::Rational => Scalar::Rat(BigRational::from_integer(n.clone())),
        }
    }
}

trait ModFloor {
    fn mod_floor_u64(&self, p: u64) -> u64;
}

impl ModFloor for BigInt {
    fn mod_floor_u64(&self, p: u64) -> u64 {
        let m = BigInt::from(p);
        let r = ((self % &m) + &m) % &m;
        r.to_u64().expect("residue fits")
    }
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

impl Scalar {
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Mod(v) => *v == 0,
            Scalar::Rat(r) => r.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Mod(v) => *v == 1,
            Scalar::Rat(r) => r.is_one(),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Mod(v) => write!(f, "{v}"),
            Scalar::Rat(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else if r.is_negative() {
                    write!(f, "-{}/{}", r.numer().abs(), r.denom())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Prime(p) => write!(f, "{p}"),
            Field::Rational => write!(f, "rationals"),
        }
    }
}

impl FromStr for Field {
    type Err = LinalgError;

    fn from_str(s: &str) -> Result<Field, LinalgError> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("rationals") || s == "Q" {
            return Ok(Field::Rational);
        }
        let p: u64 = s.parse().map_err(|_| LinalgError::Parse(s.to_string()))?;
        Field::prime(p)
    }
}
