//! Exact rational helpers and quadratic surds `q·√d`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = num_rational::BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Renders `p/q`, or `p` when the denominator is one.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn serialize_rational<S: serde::Serializer>(
    q: &Rational,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(q))
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Exact integer power with a possibly negative exponent.
pub fn rational_pow(base: &Rational, exp: i32) -> Rational {
    if exp >= 0 {
        num_traits::pow(base.clone(), exp as usize)
    } else {
        num_traits::pow(base.recip(), (-exp) as usize)
    }
}

fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let root = n.sqrt();
    (&root * &root == *n).then_some(root)
}

/// Square root of a rational, when it is rational.
pub fn rational_sqrt(q: &Rational) -> Option<Rational> {
    let p = exact_sqrt(q.numer())?;
    let d = exact_sqrt(q.denom())?;
    Some(Rational::new(p, d))
}

/// A real number `coeff · √radicand` with a squarefree positive radicand.
/// Radicand one means the value is rational.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Surd {
    pub coeff: Rational,
    pub radicand: BigInt,
}

impl Surd {
    pub fn rational(q: Rational) -> Self {
        Surd {
            coeff: q,
            radicand: BigInt::one(),
        }
    }

    /// `coeff · √rho` for a nonnegative rational `rho`, normalized.
    pub fn with_sqrt(coeff: Rational, rho: &Rational) -> Self {
        assert!(!rho.is_negative(), "square root of a negative rational");
        if rho.is_zero() || coeff.is_zero() {
            return Surd::rational(Rational::zero());
        }
        // √(p/q) = √(pq)/q
        let pq = rho.numer() * rho.denom();
        let (square, free) = split_square(&pq);
        Surd {
            coeff: coeff * Rational::new(square, rho.denom().clone()),
            radicand: free,
        }
    }

    pub fn is_rational(&self) -> bool {
        self.radicand.is_one()
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.coeff) * self.radicand.to_f64().unwrap_or(f64::NAN).sqrt()
    }
}

/// Writes `n = s² · f` with `f` squarefree; returns `(s, f)`.
fn split_square(n: &BigInt) -> (BigInt, BigInt) {
    let mut rest = n.clone();
    let mut square = BigInt::one();
    let mut free = BigInt::one();
    let mut p = BigInt::from(2);
    while &p * &p <= rest {
        let mut count = 0u32;
        while rest.is_multiple_of(&p) {
            rest /= &p;
            count += 1;
        }
        square *= num_traits::pow(p.clone(), (count / 2) as usize);
        if count % 2 == 1 {
            free *= &p;
        }
        p += 1;
    }
    free *= rest;
    (square, free)
}

impl fmt::Display for Surd {
    /// Rational values print as `p/q`; irrational ones as
    /// `irrational:sqrt(d)` or `irrational:p/q*sqrt(d)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            f.write_str(&format_rational(&self.coeff))
        } else if self.coeff.is_one() {
            write!(f, "irrational:sqrt({})", self.radicand)
        } else {
            write!(
                f,
                "irrational:{}*sqrt({})",
                format_rational(&self.coeff),
                self.radicand
            )
        }
    }
}
