//! Exact decimal conversion for scalars wider than f64.

use crate::exactcore::{rational_to_f64, Rational};
use num_bigint::BigInt;
use num_traits::{Pow, Signed, Zero};

/// `digits` significant decimal digits of r, as `d.ddd…e±k` with trailing zeros removed.
pub fn rational_to_decimal(r: &Rational, digits: u32) -> String {
    if r.is_zero() {
        return "0e0".to_string();
    }
    let sign = if r.is_negative() { "-" } else { "" };
    let a = r.abs();
    let ten = BigInt::from(10);
    let lo = Pow::pow(&ten, digits - 1);
    let hi = &lo * &ten;
    let mut e = rational_to_f64(&a).log10().floor() as i64;
    let mantissa = loop {
        let k = e - digits as i64 + 1;
        let scaled = if k >= 0 { &a / Rational::from_integer(Pow::pow(&ten, k as u64)) } else { &a * Rational::from_integer(Pow::pow(&ten, (-k) as u64)) };
        let m = scaled.round().to_integer();
        if m >= hi {
            e += 1;
        } else if m < lo {
            e -= 1;
        } else {
            break m;
        }
    };
    let s = mantissa.to_string();
    let frac = s[1..].trim_end_matches('0');
    if frac.is_empty() {
        format!("{sign}{}e{e}", &s[..1])
    } else {
        format!("{sign}{}.{frac}e{e}", &s[..1])
    }
}

/// Parses a decimal literal (optional sign, fraction and exponent) exactly.
pub fn parse_decimal_rational(s: &str) -> Option<Rational> {
    let t = s.trim();
    let (mant, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i64>().ok()?),
        None => (t, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    if ip.is_empty() && fp.is_empty() || !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("0{ip}{fp}").parse().ok()?;
    let e = exp - fp.len() as i64;
    let ten = BigInt::from(10);
    let p = Rational::from_integer(Pow::pow(&ten, e.unsigned_abs()));
    let mut r = Rational::from_integer(digits);
    r = if e >= 0 { r * p } else { r / p };
    Some(if neg { -r } else { r })
}

/// Nearest double-double (hi, lo) to r.
pub fn rational_to_pair(r: &Rational) -> (f64, f64) {
    let hi = rational_to_f64(r);
    let rest = r - Rational::from_float(hi).unwrap_or_else(Rational::zero);
    (hi, rational_to_f64(&rest))
}

pub fn pair_to_rational(hi: f64, lo: f64) -> Option<Rational> {
    Some(Rational::from_float(hi)? + Rational::from_float(lo)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactcore::rat;

    #[test]
    fn decimal_round_trip() {
        assert_eq!(rational_to_decimal(&rat(1, 3), 5), "3.3333e-1");
        assert_eq!(rational_to_decimal(&rat(-250, 1), 5), "-2.5e2");
        assert_eq!(rational_to_decimal(&rat(999_999, 1), 3), "1e6");
        assert_eq!(parse_decimal_rational("-1.25e-1"), Some(rat(-1, 8)));
        assert_eq!(parse_decimal_rational("12"), Some(rat(12, 1)));
        assert_eq!(parse_decimal_rational("x1"), None);
        assert_eq!(parse_decimal_rational("."), None);
    }
}
