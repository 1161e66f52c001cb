//! JSON encodings: exact numbers as "p/q" strings, complex numbers as [re, im] decimal
//! strings at working precision.

use elliptic::exactcore::{format_rational, Cyclotomic, ExactMatrix, Rational};
use elliptic::series::{format_exponent, QJet, QSeries, Scalar};
use num_complex::Complex;
use serde_json::{json, Value};

pub const SCHEMA: &str = "ellfrob/1";

pub fn rat(r: &Rational) -> Value {
    Value::String(format_rational(r))
}

pub fn rats(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rat).collect())
}

pub fn rat_rows(rows: &[Vec<Rational>]) -> Value {
    Value::Array(rows.iter().map(|r| rats(r)).collect())
}

pub fn matrix(m: &ExactMatrix) -> Value {
    Value::Array((0..m.rows()).map(|i| rats(&m.row(i))).collect())
}

pub fn cyc(c: &Cyclotomic) -> Value {
    Value::String(c.to_string())
}

pub fn cplx<T: Scalar>(z: Complex<T>) -> Value {
    json!([z.re.to_decimal(), z.im.to_decimal()])
}

/// Residuals are plain JSON numbers (null if not finite).
pub fn residual(x: f64) -> Value {
    json!(x)
}

pub fn series<T: Scalar>(s: &QSeries<T>) -> Value {
    let prec = if s.is_exact() { "exact".to_string() } else { format_exponent(s.prec(), s.den()) };
    let terms: Vec<Value> = s.terms().map(|(e, c)| json!({ "q": format_exponent(e, s.den()), "c": cplx(c) })).collect();
    json!({ "prec": prec, "terms": terms })
}

pub fn jet<T: Scalar>(j: &QJet<T>) -> Value {
    Value::Array(j.terms().map(|(b, s)| json!({ "x": b, "series": series(s) })).collect())
}
