use super::Scalar;
use num_complex::Complex;
use num_traits::{One, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Truncated Laurent series in t = q^{1/den}:
/// Σ_k coeffs[k] t^{start+k} + O(t^{prec}), with implicit zeros between the stored
/// coefficients and `prec`.
#[derive(Clone, PartialEq)]
pub struct QSeries<T: Scalar> {
    den: u32,
    start: i64,
    coeffs: Vec<Complex<T>>,
    prec: i64,
}

/// Precision used for exactly known series (constants, monomials).
pub const EXACT: i64 = i64::MAX / 4;

impl<T: Scalar> QSeries<T> {
    pub fn zero(den: u32, prec: i64) -> Self {
        QSeries { den, start: prec.min(EXACT), coeffs: Vec::new(), prec }
    }

    pub fn constant(c: Complex<T>, den: u32, prec: i64) -> Self {
        Self::monomial(c, 0, den, prec)
    }

    pub fn one(den: u32) -> Self {
        Self::constant(Complex::one(), den, EXACT)
    }

    /// c·t^e.
    pub fn monomial(c: Complex<T>, e: i64, den: u32, prec: i64) -> Self {
        if e >= prec {
            return Self::zero(den, prec);
        }
        QSeries { den, start: e, coeffs: vec![c], prec }
    }

    /// Sums the given (t-exponent, coefficient) pairs, dropping exponents ≥ prec.
    pub fn from_terms(den: u32, prec: i64, terms: impl IntoIterator<Item = (i64, Complex<T>)>) -> Self {
        let terms: Vec<(i64, Complex<T>)> = terms.into_iter().filter(|(e, _)| *e < prec).collect();
        let Some(lo) = terms.iter().map(|t| t.0).min() else {
            return Self::zero(den, prec);
        };
        let hi = terms.iter().map(|t| t.0).max().unwrap();
        let mut coeffs = vec![Complex::zero(); (hi - lo + 1) as usize];
        for (e, c) in terms {
            coeffs[(e - lo) as usize] = coeffs[(e - lo) as usize] + c;
        }
        QSeries { den, start: lo, coeffs, prec }.trimmed()
    }

    pub fn from_coeffs(den: u32, start: i64, coeffs: Vec<Complex<T>>, prec: i64) -> Self {
        let mut s = QSeries { den, start, coeffs, prec };
        s.clip();
        s.trimmed()
    }

    fn clip(&mut self) {
        if self.start >= self.prec {
            self.coeffs.clear();
            self.start = self.prec;
        } else {
            let max = (self.prec - self.start) as usize;
            self.coeffs.truncate(max);
        }
    }

    /// Drops exactly-zero leading and trailing coefficients.
    fn trimmed(mut self) -> Self {
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead == self.coeffs.len() {
            self.coeffs.clear();
            self.start = self.prec;
            return self;
        }
        self.coeffs.drain(..lead);
        self.start += lead as i64;
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        self
    }

    pub fn den(&self) -> u32 {
        self.den
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    /// Lowest stored t-exponent (a lower bound for the valuation).
    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn is_exact(&self) -> bool {
        self.prec >= EXACT
    }

    /// True when every known coefficient is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of t^e (zero outside the stored range; callers check e < prec).
    pub fn coeff(&self, e: i64) -> Complex<T> {
        if e < self.start || e >= self.start + self.coeffs.len() as i64 {
            Complex::zero()
        } else {
            self.coeffs[(e - self.start) as usize]
        }
    }

    /// (t-exponent, coefficient) pairs of the stored nonzero coefficients.
    pub fn terms(&self) -> impl Iterator<Item = (i64, Complex<T>)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(k, c)| (self.start + k as i64, *c))
    }

    pub fn max_abs(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |m, c| m.max(c.norm()))
    }

    /// First exponent whose coefficient exceeds `tol` times the largest one.
    pub fn valuation(&self, tol: T) -> Option<i64> {
        self.valuation_abs(self.max_abs() * tol)
    }

    /// First exponent whose coefficient exceeds the absolute threshold `thr`.
    pub fn valuation_abs(&self, thr: T) -> Option<i64> {
        self.coeffs.iter().position(|c| c.norm() > thr).map(|k| self.start + k as i64)
    }

    /// Removes leading coefficients below tol·max_abs (numerical cancellation noise).
    pub fn chop_leading(&self, tol: T) -> Self {
        self.chop_leading_abs(self.max_abs() * tol)
    }

    pub fn chop_leading_abs(&self, thr: T) -> Self {
        match self.valuation_abs(thr) {
            None => Self::zero(self.den, self.prec),
            Some(v) => {
                let k = (v - self.start) as usize;
                QSeries { den: self.den, start: v, coeffs: self.coeffs[k..].to_vec(), prec: self.prec }
            }
        }
    }

    pub fn truncate(&self, prec: i64) -> Self {
        let mut s = self.clone();
        s.prec = s.prec.min(prec);
        s.clip();
        s.trimmed()
    }

    pub fn with_prec(mut self, prec: i64) -> Self {
        self.prec = prec;
        self.clip();
        self.trimmed()
    }

    fn check_den(&self, o: &Self) {
        assert_eq!(self.den, o.den, "q-series with different exponent denominators");
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        if c.is_zero() {
            return Self::zero(self.den, self.prec);
        }
        QSeries { den: self.den, start: self.start, coeffs: self.coeffs.iter().map(|x| *x * c).collect(), prec: self.prec }
    }

    pub fn scale_real(&self, r: T) -> Self {
        self.scale(Complex::new(r, T::zero()))
    }

    /// Multiplication by t^k.
    pub fn shift(&self, k: i64) -> Self {
        let sat = |x: i64| if x >= EXACT { x } else { x + k };
        QSeries { den: self.den, start: sat(self.start), coeffs: self.coeffs.clone(), prec: sat(self.prec) }
    }

    fn combine(&self, o: &Self, sign: T) -> Self {
        self.check_den(o);
        let prec = self.prec.min(o.prec);
        if self.coeffs.is_empty() && o.coeffs.is_empty() {
            return Self::zero(self.den, prec);
        }
        let lo = if self.coeffs.is_empty() {
            o.start
        } else if o.coeffs.is_empty() {
            self.start
        } else {
            self.start.min(o.start)
        };
        let end = |x: &Self| if x.coeffs.is_empty() { lo } else { x.start + x.coeffs.len() as i64 };
        let (hi_a, hi_b) = (end(self), end(o));
        let hi = hi_a.max(hi_b).min(prec);
        if hi <= lo {
            return Self::zero(self.den, prec);
        }
        let mut coeffs = vec![Complex::zero(); (hi - lo) as usize];
        for (e, c) in self.terms() {
            if e < hi {
                coeffs[(e - lo) as usize] = coeffs[(e - lo) as usize] + c;
            }
        }
        for (e, c) in o.terms() {
            if e < hi {
                coeffs[(e - lo) as usize] = coeffs[(e - lo) as usize] + c * sign;
            }
        }
        QSeries { den: self.den, start: lo, coeffs, prec }.trimmed()
    }

    pub fn add_ref(&self, o: &Self) -> Self {
        self.combine(o, T::one())
    }

    pub fn sub_ref(&self, o: &Self) -> Self {
        self.combine(o, -T::one())
    }

    pub fn mul_ref(&self, o: &Self) -> Self {
        self.check_den(o);
        let va = self.start;
        let vb = o.start;
        let prec = self.prec.saturating_add(vb).min(o.prec.saturating_add(va)).min(EXACT);
        if self.coeffs.is_empty() || o.coeffs.is_empty() {
            return Self::zero(self.den, prec);
        }
        let start = va + vb;
        let len = ((self.coeffs.len() + o.coeffs.len() - 1) as i64).min(prec - start).max(0) as usize;
        let mut coeffs = vec![Complex::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() || i >= len {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate().take(len - i) {
                coeffs[i + j] = coeffs[i + j] + *a * *b;
            }
        }
        QSeries { den: self.den, start, coeffs, prec }.trimmed()
    }

    /// Multiplicative inverse; leading coefficients below tol·max are treated as zero.
    pub fn inv(&self, tol: T) -> Option<Self> {
        let f = self.chop_leading(tol);
        if f.coeffs.is_empty() {
            return None;
        }
        let v = f.start;
        // f = t^v u, u = Σ u_k t^k known for k < rel.
        let rel = if f.is_exact() { f.coeffs.len() as i64 + 64 } else { f.prec - v };
        let rel_prec = if f.is_exact() && f.coeffs.len() == 1 { EXACT } else { rel };
        let n = if rel_prec >= EXACT { 1 } else { rel.max(0) as usize };
        let u0 = f.coeffs[0];
        let inv0: Complex<T> = crate::exactcore::crecip(u0);
        let mut out: Vec<Complex<T>> = Vec::with_capacity(n);
        for k in 0..n {
            if k == 0 {
                out.push(inv0);
                continue;
            }
            let mut s: Complex<T> = Complex::zero();
            for j in 1..=k.min(f.coeffs.len() - 1) {
                s = s + f.coeffs[j] * out[k - j];
            }
            out.push(-s * inv0);
        }
        let prec = if rel_prec >= EXACT { EXACT } else { -v + rel };
        Some(QSeries { den: self.den, start: -v, coeffs: out, prec }.trimmed())
    }

    /// t-exponent e corresponds to the q-exponent e/den.
    pub fn q_exponent(&self, e: i64) -> (i64, u32) {
        (e, self.den)
    }

    /// q·d/dq.
    pub fn theta(&self) -> Self {
        let d = T::from(self.den).unwrap();
        QSeries {
            den: self.den,
            start: self.start,
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| *c * crate::exactcore::fdiv(T::from(self.start + k as i64).unwrap(), d))
                .collect(),
            prec: self.prec,
        }
        .trimmed()
    }

    /// d/dτ = 2π√−1·q·d/dq.
    pub fn d_tau(&self) -> Self {
        self.theta().scale(Complex::new(T::zero(), T::TAU()))
    }

    /// Value at τ (q = exp(2π√−1 τ), t = q^{1/den}).
    pub fn eval_tau(&self, tau: Complex<T>) -> Complex<T> {
        let d = T::from(self.den).unwrap();
        let i2pi = Complex::new(T::zero(), T::TAU());
        let step = (i2pi * tau * crate::exactcore::fdiv(T::one(), d)).exp();
        let mut p = (i2pi * tau * crate::exactcore::fdiv(T::from(self.start).unwrap(), d)).exp();
        let mut acc = Complex::zero();
        for c in &self.coeffs {
            acc = acc + *c * p;
            p = p * step;
        }
        acc
    }

    /// Largest coefficient difference over exponents below both precisions.
    pub fn distance(&self, o: &Self) -> T {
        let d = self.sub_ref(o);
        d.max_abs()
    }

    /// Series with f64-free conversion of the scalar type.
    pub fn cast<U: Scalar>(&self) -> QSeries<U> {
        QSeries {
            den: self.den,
            start: self.start,
            coeffs: self.coeffs.iter().map(|c| Complex::new(U::from(c.re).unwrap(), U::from(c.im).unwrap())).collect(),
            prec: self.prec,
        }
    }
}

impl<T: Scalar> fmt::Debug for QSeries<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QSeries[den {}](", self.den)?;
        for (e, c) in self.terms() {
            write!(f, "({:?}{:+?}i)t^{} + ", c.re, c.im, e)?;
        }
        if self.is_exact() {
            write!(f, "exact)")
        } else {
            write!(f, "O(t^{}))", self.prec)
        }
    }
}

impl<'a, T: Scalar> Add<&'a QSeries<T>> for &'a QSeries<T> {
    type Output = QSeries<T>;
    fn add(self, o: &'a QSeries<T>) -> QSeries<T> {
        self.add_ref(o)
    }
}

impl<'a, T: Scalar> Sub<&'a QSeries<T>> for &'a QSeries<T> {
    type Output = QSeries<T>;
    fn sub(self, o: &'a QSeries<T>) -> QSeries<T> {
        self.sub_ref(o)
    }
}

impl<'a, T: Scalar> Mul<&'a QSeries<T>> for &'a QSeries<T> {
    type Output = QSeries<T>;
    fn mul(self, o: &'a QSeries<T>) -> QSeries<T> {
        self.mul_ref(o)
    }
}

impl<T: Scalar> Neg for &QSeries<T> {
    type Output = QSeries<T>;
    fn neg(self) -> QSeries<T> {
        self.scale_real(-T::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    type S = QSeries<f64>;
    fn c(x: f64) -> Complex<f64> {
        Complex::new(x, 0.0)
    }

    #[test]
    fn geometric_series() {
        let one_minus_q = S::from_terms(1, EXACT, [(0, c(1.0)), (1, c(-1.0))]);
        let geo = S::from_coeffs(1, 0, vec![c(1.0); 21], 21);
        let p = &one_minus_q * &geo;
        assert_eq!(p.prec(), 21);
        assert!(p.distance(&S::one(1)) < 1e-15);
        let inv = one_minus_q.inv(1e-14).unwrap().truncate(21);
        assert!(inv.distance(&geo) < 1e-15);
    }

    #[test]
    fn precision_of_products() {
        let f = S::from_coeffs(2, 3, vec![c(1.0), c(2.0)], 10);
        let g = S::from_coeffs(2, -1, vec![c(1.0), c(0.5)], 6);
        let p = &f * &g;
        assert_eq!(p.start(), 2);
        assert_eq!(p.prec(), 9);
        let fi = f.inv(1e-14).unwrap();
        assert_eq!(fi.start(), -3);
        assert_eq!(fi.prec(), 4);
        assert!((&f * &fi).distance(&S::one(2)) < 1e-14);
    }

    #[test]
    fn tau_derivative_and_evaluation() {
        let f = S::from_terms(3, 30, [(1, c(2.0)), (4, c(-1.0))]);
        let tau = Complex::new(0.1, 0.8);
        let h = 1e-5;
        let num = (f.eval_tau(tau + h) - f.eval_tau(tau - h)) / (2.0 * h);
        assert!((num - f.d_tau().eval_tau(tau)).norm() < 1e-6);
    }
}
