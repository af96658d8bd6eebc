//! Exact scalars: arbitrary-precision rationals and prime fields.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::error::{Error, Result};

/// The scalar field of the combinatorial core.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldTag {
    Rationals,
    PrimeField(u64),
}

impl FieldTag {
    /// Validates that a prime-field modulus really is prime (trial division;
    /// moduli here are small test primes).
    pub fn new_prime(p: u64) -> Result<FieldTag> {
        if p < 2 || p >= 1 << 31 {
            return Err(Error::NotPrime(p));
        }
        let mut d = 2u64;
        while d * d <= p {
            if p % d == 0 {
                return Err(Error::NotPrime(p));
            }
            d += 1;
        }
        Ok(FieldTag::PrimeField(p))
    }

    pub fn zero(&self) -> Scalar {
        match self {
            FieldTag::Rationals => Scalar::Rat(BigRational::zero()),
            FieldTag::PrimeField(p) => Scalar::Mod { value: 0, modulus: *p },
        }
    }

    pub fn one(&self) -> Scalar {
        match self {
            FieldTag::Rationals => Scalar::Rat(BigRational::one()),
            FieldTag::PrimeField(p) => Scalar::Mod { value: 1 % p, modulus: *p },
        }
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        match self {
            FieldTag::Rationals => Scalar::Rat(BigRational::from_integer(BigInt::from(v))),
            FieldTag::PrimeField(p) => {
                let p = *p as i128;
                let r = ((v as i128 % p) + p) % p;
                Scalar::Mod { value: r as u64, modulus: p as u64 }
            }
        }
    }

    /// Parses `"p/q"`, `"-3"` and plain integers into a field element.
    pub fn parse(&self, s: &str) -> Result<Scalar> {
        let s = s.trim();
        match self {
            FieldTag::Rationals => {
                if let Some((num, den)) = s.split_once('/') {
                    let n = BigInt::from_str(num.trim())
                        .map_err(|e| Error::Parse(format!("bad numerator {num:?}: {e}")))?;
                    let d = BigInt::from_str(den.trim())
                        .map_err(|e| Error::Parse(format!("bad denominator {den:?}: {e}")))?;
                    if d.is_zero() {
                        return Err(Error::Parse(format!("zero denominator in {s:?}")));
                    }
                    Ok(Scalar::Rat(BigRational::new(n, d)))
                } else {
                    let n = BigInt::from_str(s)
                        .map_err(|e| Error::Parse(format!("bad integer {s:?}: {e}")))?;
                    Ok(Scalar::Rat(BigRational::from_integer(n)))
                }
            }
            FieldTag::PrimeField(_) => {
                let v = i64::from_str(s)
                    .map_err(|e| Error::Parse(format!("bad residue {s:?}: {e}")))?;
                Ok(self.from_i64(v))
            }
        }
    }
}

impl fmt::Display for FieldTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldTag::Rationals => write!(f, "rationals"),
            FieldTag::PrimeField(p) => write!(f, "F{p}"),
        }
    }
}

/// An exact field element. Rationals are kept in lowest terms by
/// `BigRational`; residues are kept in `0..modulus`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scalar {
    Rat(BigRational),
    Mod { value: u64, modulus: u64 },
}

impl Scalar {
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_zero(),
            Scalar::Mod { value, .. } => *value == 0,
        }
    }

    pub fn field(&self) -> FieldTag {
        match self {
            Scalar::Rat(_) => FieldTag::Rationals,
            Scalar::Mod { modulus, .. } => FieldTag::PrimeField(*modulus),
        }
    }

    /// Multiplicative inverse; `SingularBasis` would be a misnomer here, so a
    /// zero argument reports as a parse-level error for the caller to wrap.
    pub fn inverse(&self) -> Result<Scalar> {
        match self {
            Scalar::Rat(r) => {
                if r.is_zero() {
                    Err(Error::Parse("inverse of zero".into()))
                } else {
                    Ok(Scalar::Rat(r.recip()))
                }
            }
            Scalar::Mod { value, modulus } => {
                if *value == 0 {
                    return Err(Error::Parse("inverse of zero".into()));
                }
                // extended Euclid on (value, modulus); modulus is prime
                let (mut r0, mut r1) = (*modulus as i128, *value as i128);
                let (mut s0, mut s1) = (0i128, 1i128);
                while r1 != 0 {
                    let q = r0 / r1;
                    (r0, r1) = (r1, r0 - q * r1);
                    (s0, s1) = (s1, s0 - q * s1);
                }
                debug_assert_eq!(r0, 1);
                let m = *modulus as i128;
                let inv = ((s0 % m) + m) % m;
                Ok(Scalar::Mod { value: inv as u64, modulus: *modulus })
            }
        }
    }

    fn check_same(&self, other: &Scalar) -> (FieldTag, FieldTag) {
        (self.field(), other.field())
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident, $ratop:tt, $modexpr:expr) => {
        impl $trait for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a $ratop b),
                    (
                        Scalar::Mod { value: a, modulus: p },
                        Scalar::Mod { value: b, modulus: q },
                    ) if p == q => {
                        let f: fn(u64, u64, u64) -> u64 = $modexpr;
                        Scalar::Mod { value: f(*a, *b, *p), modulus: *p }
                    }
                    _ => {
                        let (fa, fb) = self.check_same(rhs);
                        panic!("scalar arithmetic across fields: {fa} vs {fb}");
                    }
                }
            }
        }
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
    };
}

scalar_binop!(Add, add, +, |a, b, p| ((a as u128 + b as u128) % p as u128) as u64);
scalar_binop!(Sub, sub, -, |a, b, p| ((a as u128 + p as u128 - b as u128) % p as u128) as u64);
scalar_binop!(Mul, mul, *, |a, b, p| ((a as u128 * b as u128) % p as u128) as u64);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rat(r) => Scalar::Rat(-r),
            Scalar::Mod { value, modulus } => Scalar::Mod {
                value: if *value == 0 { 0 } else { modulus - value },
                modulus: *modulus,
            },
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else if r.denom().is_negative() {
                    // BigRational normalizes denominators positive; kept for safety
                    write!(f, "{}/{}", -r.numer(), -r.denom())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Mod { value, .. } => write!(f, "{value}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_parsing_normalizes() {
        let q = FieldTag::Rationals;
        assert_eq!(q.parse("4/6").unwrap(), q.parse("2/3").unwrap());
        assert_eq!(q.parse("-4/-6").unwrap(), q.parse("2/3").unwrap());
        assert_eq!(q.parse("7").unwrap().to_string(), "7");
        assert_eq!(q.parse("-3/4").unwrap().to_string(), "-3/4");
        assert!(q.parse("1/0").is_err());
    }

    #[test]
    fn prime_field_arithmetic() {
        let f5 = FieldTag::new_prime(5).unwrap();
        let a = f5.from_i64(3);
        let b = f5.from_i64(4);
        assert_eq!(&a + &b, f5.from_i64(2));
        assert_eq!(&a * &b, f5.from_i64(2));
        assert_eq!(&a - &b, f5.from_i64(4));
        assert_eq!(a.inverse().unwrap(), f5.from_i64(2));
        assert_eq!(f5.from_i64(-1), f5.from_i64(4));
    }

    #[test]
    fn rejects_composite_modulus() {
        assert!(FieldTag::new_prime(6).is_err());
        assert!(FieldTag::new_prime(1).is_err());
        assert!(FieldTag::new_prime(2).is_ok());
    }

    #[test]
    fn rational_inverse_roundtrip() {
        let q = FieldTag::Rationals;
        let a = q.parse("-5/7").unwrap();
        assert_eq!(&a * &a.inverse().unwrap(), q.one());
    }
}
