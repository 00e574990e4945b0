//! Exact coefficient rings: arbitrary-precision rationals and integers, and
//! prime fields on machine words. No floating point anywhere.

use std::fmt;

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::error::{Error, Result};

/// Ring-object interface. Operations take the ring by reference so that
/// element types can stay plain data (a prime-field element is a bare `u64`).
pub trait RingOps: Clone + Send + Sync + fmt::Debug + 'static {
    type Elem: Clone + PartialEq + Eq + fmt::Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool {
        *a == self.zero()
    }
    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }
    // Ring objects carry context (e.g. the modulus), so the conversion
    // takes `&self` by design.
    #[allow(clippy::wrong_self_convention)]
    fn from_i64(&self, n: i64) -> Self::Elem;
    /// Multiplicative inverse, for field elements. `None` when not invertible.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn is_field(&self) -> bool;

    /// `a^k` with the empty-product convention `a^0 = 1`, including `a = 0`.
    fn pow(&self, a: &Self::Elem, k: u32) -> Self::Elem {
        let mut acc = self.one();
        for _ in 0..k {
            acc = self.mul(&acc, a);
        }
        acc
    }

    fn add_assign(&self, a: &mut Self::Elem, b: &Self::Elem) {
        *a = self.add(a, b);
    }

    fn format(&self, a: &Self::Elem) -> String;
    fn parse(&self, s: &str) -> Result<Self::Elem>;
    fn name(&self) -> String;
}

/// The field of rational numbers with arbitrary-precision arithmetic.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RationalRing;

impl RingOps for RationalRing {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn from_i64(&self, n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }
    fn is_field(&self) -> bool {
        true
    }
    fn format(&self, a: &BigRational) -> String {
        if a.denom().is_one() {
            a.numer().to_string()
        } else {
            format!("{}/{}", a.numer(), a.denom())
        }
    }
    fn parse(&self, s: &str) -> Result<BigRational> {
        let s = s.trim();
        let parsed = match s.split_once('/') {
            Some((num, den)) => {
                let n: BigInt = num
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad rational: {s:?}")))?;
                let d: BigInt = den
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad rational: {s:?}")))?;
                if d.is_zero() {
                    return Err(Error::Parse(format!("zero denominator: {s:?}")));
                }
                BigRational::new(n, d)
            }
            None => {
                let n: BigInt = s
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad rational: {s:?}")))?;
                BigRational::from_integer(n)
            }
        };
        Ok(parsed)
    }
    fn name(&self) -> String {
        "Q".into()
    }
}

/// The ring of integers with arbitrary-precision arithmetic.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IntegerRing;

impl RingOps for IntegerRing {
    type Elem = BigInt;

    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::one()
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn sub(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a - b
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn from_i64(&self, n: i64) -> BigInt {
        BigInt::from(n)
    }
    fn inv(&self, a: &BigInt) -> Option<BigInt> {
        if a.abs().is_one() {
            Some(a.clone())
        } else {
            None
        }
    }
    fn is_field(&self) -> bool {
        false
    }
    fn format(&self, a: &BigInt) -> String {
        a.to_string()
    }
    fn parse(&self, s: &str) -> Result<BigInt> {
        s.trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad integer: {s:?}")))
    }
    fn name(&self) -> String {
        "Z".into()
    }
}

/// The prime field `F_p` with residues on machine words. The modulus is kept
/// below `2^31` so products never overflow a `u64`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Parse(format!("{p} is not prime")));
        }
        if p >= 1 << 31 {
            return Err(Error::SizeLimit(format!("prime modulus {p} >= 2^31")));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }
}

impl RingOps for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.p
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.p
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        (a + self.p - b) % self.p
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.p - a) % self.p
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn from_i64(&self, n: i64) -> u64 {
        n.rem_euclid(self.p as i64) as u64
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            return None;
        }
        // Fermat: a^(p-2) mod p.
        let mut base = *a % self.p;
        let mut exp = self.p - 2;
        let mut acc = 1u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % self.p;
            }
            base = base * base % self.p;
            exp >>= 1;
        }
        Some(acc)
    }
    fn is_field(&self) -> bool {
        true
    }
    fn format(&self, a: &u64) -> String {
        format!("{} mod {}", a, self.p)
    }
    fn parse(&self, s: &str) -> Result<u64> {
        let s = s.trim();
        let body = match s.split_once("mod") {
            Some((v, m)) => {
                let m: u64 = m
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad modulus in {s:?}")))?;
                if m != self.p {
                    return Err(Error::Parse(format!(
                        "modulus mismatch: {m} in {s:?}, ring has {}",
                        self.p
                    )));
                }
                v.trim()
            }
            None => s,
        };
        let n: i64 = body
            .parse()
            .map_err(|_| Error::Parse(format!("bad residue: {s:?}")))?;
        Ok(self.from_i64(n))
    }
    fn name(&self) -> String {
        format!("F:{}", self.p)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Coefficient ring selector, as it appears in configuration and reports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoefficientRing {
    Rational,
    Integer,
    PrimeField(u64),
}

impl CoefficientRing {
    /// Parses "Q", "Z" or "F:p".
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "Q" | "q" => Ok(CoefficientRing::Rational),
            "Z" | "z" => Ok(CoefficientRing::Integer),
            other => {
                if let Some(p) = other
                    .strip_prefix("F:")
                    .or_else(|| other.strip_prefix("f:"))
                {
                    let p: u64 = p
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad prime in {other:?}")))?;
                    PrimeField::new(p)?;
                    Ok(CoefficientRing::PrimeField(p))
                } else {
                    Err(Error::Parse(format!(
                        "unknown coefficient ring {other:?}; expected Q, Z or F:p"
                    )))
                }
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            CoefficientRing::Rational => "Q".into(),
            CoefficientRing::Integer => "Z".into(),
            CoefficientRing::PrimeField(p) => format!("F:{p}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_parse_and_format() {
        let q = RationalRing;
        let x = q.parse("2/3").unwrap();
        assert_eq!(q.format(&x), "2/3");
        let y = q.parse("-1").unwrap();
        assert_eq!(q.format(&y), "-1");
        let z = q.parse(" 4/6 ").unwrap();
        assert_eq!(q.format(&z), "2/3");
        assert!(q.parse("1/0").is_err());
    }

    #[test]
    fn prime_field_ops() {
        let f7 = PrimeField::new(7).unwrap();
        assert_eq!(f7.parse("4 mod 7").unwrap(), 4);
        assert_eq!(f7.parse("-1").unwrap(), 6);
        assert_eq!(f7.inv(&3), Some(5));
        assert_eq!(f7.mul(&3, &5), 1);
        assert!(f7.parse("4 mod 5").is_err());
        assert!(PrimeField::new(6).is_err());
    }

    #[test]
    fn delta_power_empty_product() {
        let z = IntegerRing;
        let zero = z.zero();
        assert_eq!(z.pow(&zero, 0), z.one());
        assert_eq!(z.pow(&zero, 3), z.zero());
    }

    #[test]
    fn ring_spec_parsing() {
        assert_eq!(
            CoefficientRing::parse("F:5").unwrap(),
            CoefficientRing::PrimeField(5)
        );
        assert!(CoefficientRing::parse("F:4").is_err());
        assert!(CoefficientRing::parse("R").is_err());
    }
}
