use super::{QSeries, Scalar, SeriesError};
use num_complex::Complex;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

pub type MultiIndex = Vec<u32>;

/// Polynomial in z^1..z^n with q-series coefficients, truncated at weighted degree
/// `max_weight` where z^β has weight d_β.
#[derive(Clone, Debug, PartialEq)]
pub struct QJet<T: Scalar> {
    weights: Vec<u32>,
    max_weight: u32,
    den: u32,
    terms: BTreeMap<MultiIndex, QSeries<T>>,
}

pub fn weight_of(weights: &[u32], b: &[u32]) -> u32 {
    weights.iter().zip(b).map(|(w, x)| w * x).sum()
}

/// b! = b_1!⋯b_n!.
pub fn multi_factorial(b: &[u32]) -> f64 {
    b.iter().map(|&k| (1..=k).map(f64::from).product::<f64>()).product()
}

/// All multi-indices b with d·b = m.
pub fn monomials_of_weight(weights: &[u32], m: u32) -> Vec<MultiIndex> {
    fn rec(w: &[u32], i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if i == w.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let mut k = 0;
        while k * w[i] <= left {
            cur.push(k);
            rec(w, i + 1, left - k * w[i], cur, out);
            cur.pop();
            k += 1;
        }
    }
    let mut out = Vec::new();
    rec(weights, 0, m, &mut Vec::new(), &mut out);
    out
}

impl<T: Scalar> QJet<T> {
    pub fn zero(weights: Vec<u32>, max_weight: u32, den: u32) -> Self {
        QJet { weights, max_weight, den, terms: BTreeMap::new() }
    }

    pub fn constant(weights: Vec<u32>, max_weight: u32, c: QSeries<T>) -> Self {
        let den = c.den();
        let mut j = Self::zero(weights, max_weight, den);
        j.insert(vec![0; j.weights.len()], c);
        j
    }

    /// The coordinate z^β (zero-based index β).
    pub fn variable(weights: Vec<u32>, max_weight: u32, den: u32, beta: usize) -> Self {
        let mut j = Self::zero(weights, max_weight, den);
        let mut b = vec![0; j.weights.len()];
        b[beta] = 1;
        j.insert(b, QSeries::one(den));
        j
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn max_weight(&self) -> u32 {
        self.max_weight
    }

    pub fn den(&self) -> u32 {
        self.den
    }

    pub fn nvars(&self) -> usize {
        self.weights.len()
    }

    pub fn weight(&self, b: &[u32]) -> u32 {
        weight_of(&self.weights, b)
    }

    /// Adds c·z^b (dropped beyond the weight truncation).
    pub fn insert(&mut self, b: MultiIndex, c: QSeries<T>) {
        assert_eq!(b.len(), self.weights.len());
        if self.weight(&b) > self.max_weight {
            return;
        }
        let v = match self.terms.remove(&b) {
            Some(old) => old.add_ref(&c),
            None => c,
        };
        if !(v.is_zero() && v.is_exact()) {
            self.terms.insert(b, v);
        }
    }

    pub fn coeff(&self, b: &[u32]) -> Option<&QSeries<T>> {
        self.terms.get(b)
    }

    /// Coefficient of z^b, zero series of precision `prec` when absent.
    pub fn coeff_or_zero(&self, b: &[u32], prec: i64) -> QSeries<T> {
        self.terms.get(b).cloned().unwrap_or_else(|| QSeries::zero(self.den, prec))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &QSeries<T>)> {
        self.terms.iter()
    }

    /// Lowest coefficient precision.
    pub fn prec(&self) -> i64 {
        self.terms.values().map(|s| s.prec()).min().unwrap_or(super::EXACT)
    }

    /// Graded piece of weighted degree j.
    pub fn piece(&self, j: u32) -> Self {
        let mut out = Self::zero(self.weights.clone(), self.max_weight, self.den);
        for (b, c) in &self.terms {
            if self.weight(b) == j {
                out.terms.insert(b.clone(), c.clone());
            }
        }
        out
    }

    pub fn truncate_weight(&self, max_weight: u32) -> Self {
        let mut out = Self::zero(self.weights.clone(), max_weight.min(self.max_weight), self.den);
        for (b, c) in &self.terms {
            if self.weight(b) <= out.max_weight {
                out.terms.insert(b.clone(), c.clone());
            }
        }
        out
    }

    /// The same terms under a new weight bound, for jets that are exact polynomials.
    pub fn with_max_weight(&self, max_weight: u32) -> Self {
        let mut out = self.truncate_weight(max_weight);
        out.max_weight = max_weight;
        out
    }

    fn same_shape(&self, o: &Self) {
        assert_eq!(self.weights, o.weights, "jets over different gradings");
        assert_eq!(self.den, o.den);
    }

    pub fn add_ref(&self, o: &Self) -> Self {
        self.same_shape(o);
        let mut out = self.clone();
        out.max_weight = self.max_weight.min(o.max_weight);
        out.terms.retain(|b, _| weight_of(&self.weights, b) <= out.max_weight);
        for (b, c) in &o.terms {
            out.insert(b.clone(), c.clone());
        }
        out
    }

    pub fn sub_ref(&self, o: &Self) -> Self {
        self.add_ref(&o.scale(Complex::new(-T::one(), T::zero())))
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = v.scale(c);
        }
        out
    }

    pub fn scale_series(&self, s: &QSeries<T>) -> Self {
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = v.mul_ref(s);
        }
        out
    }

    /// Graded product truncated at the smaller weight bound.
    pub fn mul_ref(&self, o: &Self) -> Self {
        self.same_shape(o);
        let mw = self.max_weight.min(o.max_weight);
        let mut out = Self::zero(self.weights.clone(), mw, self.den);
        for (b1, c1) in &self.terms {
            let w1 = self.weight(b1);
            if w1 > mw {
                continue;
            }
            for (b2, c2) in &o.terms {
                if w1 + self.weight(b2) > mw {
                    continue;
                }
                let b: MultiIndex = b1.iter().zip(b2).map(|(x, y)| x + y).collect();
                out.insert(b, c1.mul_ref(c2));
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(self.weights.clone(), self.max_weight, QSeries::one(self.den));
        for _ in 0..k {
            acc = acc.mul_ref(self);
        }
        acc
    }

    /// Formal ∂/∂z^β; the weight bound drops by d_β.
    pub fn deriv(&self, beta: usize) -> Self {
        let mw = self.max_weight.saturating_sub(self.weights[beta]);
        let mut out = Self::zero(self.weights.clone(), mw, self.den);
        for (b, c) in &self.terms {
            if b[beta] == 0 {
                continue;
            }
            let mut nb = b.clone();
            nb[beta] -= 1;
            out.insert(nb, c.scale_real(T::from(b[beta]).unwrap()));
        }
        out
    }

    /// d/dτ applied to every coefficient.
    pub fn d_tau(&self) -> Self {
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = v.d_tau();
        }
        out
    }

    pub fn map_coeffs(&self, f: impl Fn(&QSeries<T>) -> QSeries<T>) -> Self {
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = f(v);
        }
        out
    }

    /// Value at (z, τ).
    pub fn eval(&self, z: &[Complex<T>], tau: Complex<T>) -> Complex<T> {
        let mut acc = Complex::zero();
        for (b, c) in &self.terms {
            let mut m: Complex<T> = Complex::one();
            for (zi, &k) in z.iter().zip(b) {
                m = m * zi.powu(k);
            }
            acc = acc + c.eval_tau(tau) * m;
        }
        acc
    }

    pub fn max_abs(&self) -> T {
        self.terms.values().fold(T::zero(), |m, c| m.max(c.max_abs()))
    }

    /// Largest change between two truncations of the same jet: over all monomials, the
    /// coefficient difference below both precisions relative to max(1, |coefficient|).
    pub fn drift(&self, o: &Self) -> f64 {
        let keys: std::collections::BTreeSet<&MultiIndex> = self.terms.keys().chain(o.terms.keys()).collect();
        keys.into_iter()
            .map(|b| {
                let a = self.coeff_or_zero(b, super::EXACT);
                let c = o.coeff_or_zero(b, super::EXACT);
                let d = a.sub_ref(&c).max_abs().to_f64().unwrap_or(f64::INFINITY);
                d / a.max_abs().to_f64().unwrap_or(f64::INFINITY).max(1.0)
            })
            .fold(0.0, f64::max)
    }

    /// Rows "b_1 … b_n ; exponent ; re ; im" with the exponent as a reduced fraction.
    pub fn exchange_rows(&self) -> Vec<String> {
        let mut rows = Vec::new();
        for (b, c) in &self.terms {
            let idx: Vec<String> = b.iter().map(|x| x.to_string()).collect();
            for (e, v) in c.terms() {
                rows.push(format!(
                    "{} ; {} ; {} ; {}",
                    idx.join(" "),
                    format_exponent(e, self.den),
                    v.re.to_decimal(),
                    v.im.to_decimal()
                ));
            }
        }
        rows
    }

    /// Rows "b_1 … b_n ; precision" giving each coefficient's O(q^p) (or "exact").
    pub fn precision_rows(&self) -> Vec<String> {
        self.terms
            .iter()
            .map(|(b, c)| {
                let p = if c.is_exact() { "exact".to_string() } else { format_exponent(c.prec(), self.den) };
                format!("{} ; {p}", b.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "))
            })
            .collect()
    }

    /// Applies rows from [`QJet::precision_rows`].
    pub fn set_precisions<'a>(&mut self, rows: impl IntoIterator<Item = &'a str>) -> Result<(), SeriesError> {
        for row in rows {
            let bad = || SeriesError::Parse(row.to_string());
            let (b, p) = row.split_once(';').ok_or_else(bad)?;
            let b: Vec<u32> = b.split_whitespace().map(str::parse).collect::<Result<_, _>>().map_err(|_| bad())?;
            if b.len() != self.weights.len() {
                return Err(bad());
            }
            let p = match p.trim() {
                "exact" => super::EXACT,
                t => {
                    let (num, den) = parse_exponent(t).ok_or_else(bad)?;
                    if (num * self.den as i64) % den != 0 {
                        return Err(bad());
                    }
                    num * self.den as i64 / den
                }
            };
            let s = self.terms.remove(&b).unwrap_or_else(|| QSeries::zero(self.den, p)).with_prec(p);
            if !(s.is_zero() && s.is_exact()) {
                self.terms.insert(b, s);
            }
        }
        Ok(())
    }

    /// Parses exchange rows into a jet with common exponent denominator `den` and
    /// coefficient precision `prec` (in units of q^{1/den}).
    pub fn from_exchange_rows<'a>(
        weights: Vec<u32>,
        max_weight: u32,
        den: u32,
        prec: i64,
        rows: impl IntoIterator<Item = &'a str>,
    ) -> Result<Self, SeriesError> {
        let mut acc: BTreeMap<MultiIndex, Vec<(i64, Complex<T>)>> = BTreeMap::new();
        let n = weights.len();
        for row in rows {
            let bad = || SeriesError::Parse(row.to_string());
            let parts: Vec<&str> = row.split(';').map(str::trim).collect();
            if parts.len() != 4 {
                return Err(bad());
            }
            let b: Result<Vec<u32>, _> = parts[0].split_whitespace().map(str::parse).collect();
            let b = b.map_err(|_| bad())?;
            if b.len() != n {
                return Err(bad());
            }
            let (p, q) = parse_exponent(parts[1]).ok_or_else(bad)?;
            if (p * den as i64) % q != 0 {
                return Err(bad());
            }
            let re = T::parse_decimal(parts[2]).ok_or_else(bad)?;
            let im = T::parse_decimal(parts[3]).ok_or_else(bad)?;
            acc.entry(b).or_default().push((p * den as i64 / q, Complex::new(re, im)));
        }
        let mut j = Self::zero(weights, max_weight, den);
        for (b, t) in acc {
            j.insert(b, QSeries::from_terms(den, prec, t));
        }
        Ok(j)
    }
}

/// "p/q" or "p" with q > 0.
fn parse_exponent(s: &str) -> Option<(i64, i64)> {
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim().parse().ok()?, q.trim().parse().ok()?),
        None => (s.trim().parse().ok()?, 1),
    };
    (q > 0).then_some((p, q))
}

pub fn format_exponent(e: i64, den: u32) -> String {
    let g = num_integer::gcd(e, den as i64).max(1);
    let (p, q) = (e / g, den as i64 / g);
    if q == 1 {
        p.to_string()
    } else {
        format!("{p}/{q}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_of_variable() {
        let z = QJet::<f64>::variable(vec![1, 1, 2], 4, 1, 0);
        let s = z.mul_ref(&z);
        assert_eq!(s.terms().count(), 1);
        let c = s.coeff(&[2, 0, 0]).unwrap();
        assert_eq!(c.coeff(0), Complex::new(1.0, 0.0));
    }

    #[test]
    fn monomial_counts() {
        assert_eq!(monomials_of_weight(&[1, 1, 2], 2).len(), 4);
        assert_eq!(monomials_of_weight(&[1, 1, 2], 0), vec![vec![0, 0, 0]]);
        assert_eq!(monomials_of_weight(&[1, 1, 1, 1, 2], 1).len(), 4);
    }

    #[test]
    fn exchange_round_trip() {
        let mut j = QJet::<f64>::zero(vec![1, 2], 4, 3);
        j.insert(vec![1, 1], QSeries::from_terms(3, 12, [(-1, Complex::new(0.5, -2.0)), (4, Complex::new(1.25, 0.0))]));
        let rows = j.exchange_rows();
        assert_eq!(rows[0], "1 1 ; -1/3 ; 5e-1 ; -2e0");
        let back = QJet::<f64>::from_exchange_rows(vec![1, 2], 4, 3, 12, rows.iter().map(String::as_str)).unwrap();
        assert_eq!(back, j);
    }

    #[test]
    fn exchange_round_trip_keeps_double_double_precision() {
        use twofloat::TwoFloat;
        let third = crate::exactcore::fdiv(TwoFloat::from(1.0), TwoFloat::from(3.0));
        let c = Complex::new(third, -third * TwoFloat::from(1e-20));
        let mut j = QJet::<TwoFloat>::zero(vec![1], 2, 1);
        j.insert(vec![2], QSeries::from_terms(1, 5, [(0, c)]));
        let rows = j.exchange_rows();
        let back = QJet::<TwoFloat>::from_exchange_rows(vec![1], 2, 1, 5, rows.iter().map(String::as_str)).unwrap();
        assert_eq!(back, j);
    }

    #[test]
    fn drift_ignores_terms_beyond_the_common_precision() {
        let c = |re: f64| Complex::new(re, 0.0);
        let mut a = QJet::<f64>::zero(vec![1], 2, 1);
        a.insert(vec![1], QSeries::from_terms(1, 4, [(0, c(2.0)), (3, c(5.0))]));
        let mut b = QJet::<f64>::zero(vec![1], 2, 1);
        b.insert(vec![1], QSeries::from_terms(1, 6, [(0, c(2.0)), (3, c(5.0)), (5, c(7.0))]));
        assert_eq!(a.drift(&b), 0.0);
        b.insert(vec![2], QSeries::from_terms(1, 6, [(1, c(0.5))]));
        assert_eq!(a.drift(&b), 0.5);
    }
}
