//! Truncated q-series (functions on the upper half plane) and graded jets with
//! q-series coefficients.

pub mod decimal;
mod qjet;
mod qseries;

pub use qjet::{format_exponent, monomials_of_weight, multi_factorial, weight_of, MultiIndex, QJet};
pub use qseries::{QSeries, EXACT};

use num_complex::Complex;
use num_traits::{Float, FloatConst};
use std::fmt::{Debug, Display, LowerExp};
use thiserror::Error;

/// Real scalar type of the numeric kernel.
pub trait Scalar: Float + FloatConst + Debug + Display + LowerExp + Send + Sync + 'static {
    /// Unit roundoff. `Float::epsilon` is unreliable for compound types.
    fn roundoff() -> Self;
    /// Shortest decimal string that parses back to the same value.
    fn to_decimal(self) -> String;
    fn parse_decimal(s: &str) -> Option<Self>;
}

impl Scalar for f32 {
    fn roundoff() -> Self {
        f32::EPSILON
    }

    fn to_decimal(self) -> String {
        format!("{self:e}")
    }

    fn parse_decimal(s: &str) -> Option<Self> {
        s.trim().parse().ok()
    }
}

impl Scalar for f64 {
    fn roundoff() -> Self {
        f64::EPSILON
    }

    fn to_decimal(self) -> String {
        format!("{self:e}")
    }

    fn parse_decimal(s: &str) -> Option<Self> {
        s.trim().parse().ok()
    }
}

impl Scalar for twofloat::TwoFloat {
    fn roundoff() -> Self {
        // 2^-104
        twofloat::TwoFloat::from(f64::EPSILON * f64::EPSILON / 4.0)
    }

    fn to_decimal(self) -> String {
        if !self.hi().is_finite() {
            return format!("{:e}", self.hi());
        }
        let Some(r) = decimal::pair_to_rational(self.hi(), self.lo()) else {
            return format!("{:e}", self.hi());
        };
        // About 32 digits usually suffice; a lo part far below hi needs more, so search
        // for the shortest exact form (round trips are monotone in the digit count).
        let exact = |d: u32| Self::parse_decimal(&decimal::rational_to_decimal(&r, d)) == Some(self);
        let digits = match (32..=40).find(|&d| exact(d)) {
            Some(d) => d,
            None => {
                let (mut lo, mut hi) = (40, 800);
                while hi - lo > 1 {
                    let mid = (lo + hi) / 2;
                    if exact(mid) {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                hi
            }
        };
        decimal::rational_to_decimal(&r, digits)
    }

    fn parse_decimal(s: &str) -> Option<Self> {
        let (hi, lo) = decimal::rational_to_pair(&decimal::parse_decimal_rational(s)?);
        Some(twofloat::TwoFloat::new_add(hi, lo))
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("no invertible pivot in column {column} (all candidates vanish to working precision)")]
    NonUnitPivot { column: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("cannot parse exchange row {0:?}")]
    Parse(String),
}

pub type SeriesMatrix<T> = Vec<Vec<QSeries<T>>>;

fn matrix_scale<T: Scalar>(m: &SeriesMatrix<T>) -> T {
    m.iter().flatten().fold(T::zero(), |a, s| a.max(s.max_abs()))
}

/// Correction passes after the first elimination.
const REFINE_STEPS: usize = 2;

/// Solves M X = B over truncated Laurent series by Gaussian elimination, choosing in each
/// column the pivot of least valuation (ties broken by leading magnitude). Leading
/// coefficients below tol·max|M| are treated as cancellation noise.
///
/// Pivot inverses can have fast-growing coefficients, and round-off in low orders then
/// swamps the residual at high orders. A few steps of iterative refinement
/// (X += M⁻¹(B − MX)) bring the residual back to round-off level.
pub fn qsolve<T: Scalar>(m: &SeriesMatrix<T>, b: &SeriesMatrix<T>, tol: T) -> Result<SeriesMatrix<T>, SeriesError> {
    let k = m.len();
    if m.iter().any(|r| r.len() != k) || b.len() != k {
        return Err(SeriesError::Dimension(format!("{}x? system with {} right-hand rows", k, b.len())));
    }
    let mut x = eliminate(m, b, tol)?;
    for _ in 0..REFINE_STEPS {
        let mx = qmatmul(m, &x);
        let res: SeriesMatrix<T> = b.iter().zip(&mx).map(|(br, mr)| br.iter().zip(mr).map(|(u, v)| u.sub_ref(v)).collect()).collect();
        let d = eliminate(m, &res, tol)?;
        for (xr, dr) in x.iter_mut().zip(&d) {
            for (u, v) in xr.iter_mut().zip(dr) {
                *u = u.add_ref(v);
            }
        }
    }
    Ok(x)
}

fn eliminate<T: Scalar>(m: &SeriesMatrix<T>, b: &SeriesMatrix<T>, tol: T) -> Result<SeriesMatrix<T>, SeriesError> {
    let k = m.len();
    let r = b.first().map_or(0, |x| x.len());
    let thr = matrix_scale(m) * tol;
    let mut a: SeriesMatrix<T> = m.iter().zip(b).map(|(row, rhs)| row.iter().chain(rhs).cloned().collect()).collect();
    for col in 0..k {
        let mut best: Option<(usize, i64, T)> = None;
        for (i, row) in a.iter().enumerate().skip(col) {
            let s = row[col].chop_leading_abs(thr);
            if let Some(v) = s.valuation_abs(thr) {
                let mag = s.coeff(v).norm();
                let better = match best {
                    None => true,
                    Some((_, bv, bm)) => v < bv || (v == bv && mag > bm),
                };
                if better {
                    best = Some((i, v, mag));
                }
            }
        }
        let Some((p, _, _)) = best else {
            return Err(SeriesError::NonUnitPivot { column: col });
        };
        a.swap(col, p);
        let piv = a[col][col].chop_leading_abs(thr);
        let inv = piv.inv(tol).ok_or(SeriesError::NonUnitPivot { column: col })?;
        let prow: Vec<QSeries<T>> = a[col].iter().map(|x| x.mul_ref(&inv)).collect();
        a[col] = prow.clone();
        for i in 0..k {
            if i == col || a[i][col].is_zero() {
                continue;
            }
            let f = a[i][col].clone();
            for j in col..k + r {
                a[i][j] = a[i][j].sub_ref(&f.mul_ref(&prow[j]));
            }
        }
    }
    Ok(a.into_iter().map(|row| row[k..].to_vec()).collect())
}

/// Inverse of a square series matrix.
pub fn qinv_matrix<T: Scalar>(m: &SeriesMatrix<T>, tol: T) -> Result<SeriesMatrix<T>, SeriesError> {
    let k = m.len();
    let den = m.first().and_then(|r| r.first()).map_or(1, |s| s.den());
    let id: SeriesMatrix<T> = (0..k)
        .map(|i| (0..k).map(|j| if i == j { QSeries::one(den) } else { QSeries::zero(den, EXACT) }).collect())
        .collect();
    qsolve(m, &id, tol)
}

/// Product of series matrices.
pub fn qmatmul<T: Scalar>(a: &SeriesMatrix<T>, b: &SeriesMatrix<T>) -> SeriesMatrix<T> {
    let den = a.first().and_then(|r| r.first()).map_or(1, |s| s.den());
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| row.iter().zip(b).fold(QSeries::zero(den, EXACT), |acc, (x, brow)| acc.add_ref(&x.mul_ref(&brow[j]))))
                .collect()
        })
        .collect()
}

/// Determinant by fraction-free expansion along elimination (small matrices only).
pub fn qdet<T: Scalar>(m: &SeriesMatrix<T>, tol: T) -> QSeries<T> {
    let k = m.len();
    let den = m.first().and_then(|r| r.first()).map_or(1, |s| s.den());
    let thr = matrix_scale(m) * tol;
    let mut a = m.clone();
    let mut det = QSeries::one(den);
    for col in 0..k {
        let p = (col..k)
            .filter_map(|i| a[i][col].chop_leading_abs(thr).valuation_abs(thr).map(|v| (i, v)))
            .min_by_key(|x| x.1);
        let Some((p, _)) = p else {
            return QSeries::zero(den, det.prec());
        };
        if p != col {
            a.swap(p, col);
            det = det.scale_real(-T::one());
        }
        let piv = a[col][col].chop_leading_abs(thr);
        det = det.mul_ref(&piv);
        let inv = piv.inv(tol).expect("nonzero pivot");
        for i in col + 1..k {
            let f = a[i][col].mul_ref(&inv);
            for j in col..k {
                a[i][j] = a[i][j].sub_ref(&f.mul_ref(&a[col][j]));
            }
        }
    }
    det
}

/// Complex scalar from an f64 pair.
pub fn cplx<T: Scalar>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::from(re).unwrap(), T::from(im).unwrap())
}

/// −2π√−1.
pub fn minus_two_pi_i<T: Scalar>() -> Complex<T> {
    Complex::new(T::zero(), -T::TAU())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn rand_series(rng: &mut impl Rng, start: i64, n: usize) -> QSeries<f64> {
        let coeffs = (0..n).map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        QSeries::from_coeffs(1, start, coeffs, start + n as i64)
    }

    #[test]
    fn solve_unit_pivot_system() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let m: SeriesMatrix<f64> = (0..3).map(|_| (0..3).map(|_| rand_series(&mut rng, 0, 21)).collect()).collect();
        let v: SeriesMatrix<f64> = (0..3).map(|_| vec![rand_series(&mut rng, 0, 21)]).collect();
        let x = qsolve(&m, &v, 1e-13).unwrap();
        let back = qmatmul(&m, &x);
        for tau in [Complex::new(0.0, 0.9), Complex::new(0.3, 1.1), Complex::new(-0.2, 0.7)] {
            for i in 0..3 {
                // Compare on the common known range.
                let p = back[i][0].prec().min(v[i][0].prec());
                let d = back[i][0].truncate(p).eval_tau(tau) - v[i][0].truncate(p).eval_tau(tau);
                assert!(d.norm() < 1e-10, "{}", d.norm());
            }
        }
    }

    #[test]
    fn solve_with_laurent_pivot() {
        // [[q, 1], [1, 0]] has no unit in the first column's first row; pivoting handles it.
        let q = QSeries::<f64>::monomial(Complex::new(1.0, 0.0), 1, 1, EXACT);
        let one = QSeries::<f64>::one(1);
        let zero = QSeries::<f64>::zero(1, EXACT);
        let m = vec![vec![q.clone(), one.clone()], vec![one.clone(), zero.clone()]];
        let inv = qinv_matrix(&m, 1e-13).unwrap();
        let prod = qmatmul(&m, &inv);
        assert!(prod[0][0].distance(&one) < 1e-15 && prod[0][1].distance(&zero) < 1e-15);
        assert!(qdet(&m, 1e-13).distance(&one.scale_real(-1.0)) < 1e-15);
    }
}
