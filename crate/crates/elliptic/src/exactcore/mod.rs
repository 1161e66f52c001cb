//! Exact arithmetic: rationals, cyclotomic numbers and dense matrices over them.

mod cyclotomic;
mod matrix;

pub use cyclotomic::{crecip, cyclotomic_polynomial, euler_phi, fdiv, rational_in, root_of_unity_in, Cyclotomic};
pub use matrix::{ExactMatrix, Field};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision rational number in lowest terms with positive denominator.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("linear system has no solution")]
    Inconsistent,
    #[error("matrix is singular")]
    Singular,
    #[error("cannot parse rational from {0:?}")]
    Parse(String),
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Formats as `p/q`, or just `p` when the denominator is one.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational, ExactError> {
    let t = s.trim();
    let err = || ExactError::Parse(s.to_string());
    match t.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| err())?;
            let q: BigInt = q.trim().parse().map_err(|_| err())?;
            if q.is_zero() {
                return Err(err());
            }
            Ok(Rational::new(p, q))
        }
        None => Ok(Rational::from_integer(t.parse().map_err(|_| err())?)),
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Both parts overflow f64; scale them down together.
        let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
        let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
        let d = (r.denom() >> shift).to_f64().unwrap_or(1.0);
        n / d
    })
}

pub fn is_integer(r: &Rational) -> bool {
    r.denom().is_one()
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(items: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    use num_integer::Integer;
    items
        .into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

/// Greatest common divisor of a family of rationals (the positive generator of the
/// additive group they span); zero for an empty or all-zero family.
pub fn rational_gcd<'a>(items: impl IntoIterator<Item = &'a Rational>) -> Rational {
    use num_integer::Integer;
    let items: Vec<&Rational> = items.into_iter().collect();
    let den = common_denominator(items.iter().copied());
    let g = items.iter().fold(BigInt::zero(), |acc, r| {
        let scaled = (*r * Rational::from_integer(den.clone())).to_integer();
        acc.gcd(&scaled)
    });
    Rational::new(g.abs(), den)
}
