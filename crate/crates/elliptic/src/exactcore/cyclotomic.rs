use super::Rational;
use num_complex::{Complex, Complex64};
use num_integer::Integer;
use num_traits::{Float, FloatConst, One, ToPrimitive, Zero};
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

/// a/b followed by one residual correction. Some compound float types only divide to the
/// accuracy of their leading word; this restores full working precision.
pub fn fdiv<T: Float>(a: T, b: T) -> T {
    let q = a / b;
    q + (a - b * q) / b
}

/// 1/z with the corrected real division.
pub fn crecip<T: Float>(z: Complex<T>) -> Complex<T> {
    let r = fdiv(T::one(), z.norm_sqr());
    Complex::new(z.re * r, -z.im * r)
}

/// A small rational as a float of type T (numerator and denominator must fit in i64).
pub fn rational_in<T: Float>(r: &Rational) -> T {
    let cv = |x: &num_bigint::BigInt| T::from(x.to_i64().expect("small rational")).unwrap();
    fdiv(cv(r.numer()), cv(r.denom()))
}

/// exp(2π√−1·k/n) in precision T: the f64 value refined by Newton steps on z^n = 1.
pub fn root_of_unity_in<T: Float + FloatConst>(n: u32, k: i64) -> Complex<T> {
    let k = k.rem_euclid(n as i64);
    let g = num_integer::gcd(k, n as i64).max(1);
    let (k, n) = (k / g, (n as i64 / g) as u32);
    let ang = std::f64::consts::TAU * k as f64 / n as f64;
    let mut z = Complex::new(T::from(ang.cos()).unwrap(), T::from(ang.sin()).unwrap());
    if n <= 2 {
        return if n == 1 { Complex::new(T::one(), T::zero()) } else { Complex::new(-T::one(), T::zero()) };
    }
    let nn = T::from(n).unwrap();
    for _ in 0..3 {
        let zn1 = z.powu(n - 1);
        let f = zn1 * z - Complex::new(T::one(), T::zero());
        z = z - f * crecip(zn1 * nn);
    }
    z
}

pub fn euler_phi(n: u32) -> u32 {
    (1..=n).filter(|k| k.gcd(&n) == 1).count() as u32
}

fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    // den is monic
    let mut rem = num.to_vec();
    let dl = den.len();
    let mut quot = vec![0i64; num.len() + 1 - dl];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dl - 1];
        quot[i] = c;
        for (j, &dj) in den.iter().enumerate() {
            rem[i + j] -= c * dj;
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quot
}

fn cyclotomic_cache() -> &'static RwLock<HashMap<u32, Arc<Vec<i64>>>> {
    static CACHE: OnceLock<RwLock<HashMap<u32, Arc<Vec<i64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Integer coefficients (constant term first) of the N-th cyclotomic polynomial.
pub fn cyclotomic_polynomial(n: u32) -> Arc<Vec<i64>> {
    assert!(n >= 1, "cyclotomic order must be positive");
    if let Some(p) = cyclotomic_cache().read().unwrap().get(&n) {
        return p.clone();
    }
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in (1..n).filter(|d| n % d == 0) {
        let pd = cyclotomic_polynomial(d);
        num = poly_div_exact(&num, &pd);
    }
    let p = Arc::new(num);
    cyclotomic_cache().write().unwrap().insert(n, p.clone());
    p
}

/// Element of the cyclotomic field Q(ζ_N), ζ_N = exp(2πi/N), stored in the power basis
/// 1, ζ, …, ζ^{φ(N)-1}. Elements of different orders combine in the compositum.
#[derive(Clone)]
pub struct Cyclotomic {
    order: u32,
    coeffs: Vec<Rational>,
}

impl Cyclotomic {
    pub fn from_rational(r: Rational) -> Self {
        Cyclotomic { order: 1, coeffs: vec![r] }
    }

    /// ζ_N^k.
    pub fn root_of_unity(n: u32, k: i64) -> Self {
        let e = k.rem_euclid(n as i64) as usize;
        let mut poly = vec![Rational::zero(); e + 1];
        poly[e] = Rational::one();
        Self::from_poly(n, poly)
    }

    /// Reduces an arbitrary polynomial in ζ_N modulo Φ_N.
    pub fn from_poly(n: u32, mut poly: Vec<Rational>) -> Self {
        let phi = cyclotomic_polynomial(n);
        let deg = phi.len() - 1;
        while poly.len() > deg {
            let top = poly.pop().unwrap();
            if top.is_zero() {
                continue;
            }
            let shift = poly.len() - deg;
            for (j, &c) in phi.iter().take(deg).enumerate() {
                if c != 0 {
                    poly[shift + j] -= &top * Rational::from_integer(c.into());
                }
            }
        }
        poly.resize(deg, Rational::zero());
        Cyclotomic { order: n, coeffs: poly }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Re-expresses this element inside Q(ζ_m), where the order divides m.
    pub fn lift(&self, m: u32) -> Self {
        assert!(m % self.order == 0, "order {} does not divide {}", self.order, m);
        if m == self.order {
            return self.clone();
        }
        let step = (m / self.order) as usize;
        let mut poly = vec![Rational::zero(); (self.coeffs.len().max(1) - 1) * step + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            poly[k * step] = c.clone();
        }
        Self::from_poly(m, poly)
    }

    fn common(a: &Self, b: &Self) -> (Self, Self) {
        let m = a.order.lcm(&b.order);
        (a.lift(m), b.lift(m))
    }

    /// Returns the rational value when the element lies in Q.
    pub fn as_rational(&self) -> Option<Rational> {
        self.coeffs[1..].iter().all(|c| c.is_zero()).then(|| self.coeffs[0].clone())
    }

    /// Image under the automorphism ζ ↦ ζ^k (k coprime to the order).
    pub fn galois(&self, k: i64) -> Self {
        let n = self.order as i64;
        let mut out = Self::from_rational(Rational::zero()).lift(self.order);
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let term = Cyclotomic::root_of_unity(self.order, (j as i64 * k).rem_euclid(n)).scale(c);
            out = out + term;
        }
        out
    }

    /// Complex conjugate (ζ ↦ ζ^{-1}).
    pub fn conj(&self) -> Self {
        self.galois(-1)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Cyclotomic { order: self.order, coeffs: self.coeffs.iter().map(|c| c * r).collect() }
    }

    pub fn to_complex(&self) -> Complex64 {
        let n = self.order as f64;
        self.coeffs.iter().enumerate().fold(Complex64::new(0.0, 0.0), |acc, (k, c)| {
            let ang = 2.0 * std::f64::consts::PI * k as f64 / n;
            acc + Complex64::from_polar(super::rational_to_f64(c), ang)
        })
    }

    /// The value in a complex type of any precision, with ζ_N refined to full working
    /// precision.
    pub fn to_complex_in<T: Float + FloatConst>(&self) -> Complex<T> {
        let z = root_of_unity_in::<T>(self.order, 1);
        let mut p = Complex::new(T::one(), T::zero());
        let mut acc = Complex::new(T::zero(), T::zero());
        for c in &self.coeffs {
            if !c.is_zero() {
                acc = acc + p * rational_in::<T>(c);
            }
            p = p * z;
        }
        acc
    }

    /// √r for rational r as an element of a cyclotomic field (Kronecker–Weber via Gauss
    /// sums); negative arguments give √|r|·√−1. The principal (non-negative real or
    /// positive imaginary) branch is returned.
    pub fn sqrt_rational(r: &Rational) -> Self {
        use num_traits::{Signed, ToPrimitive};
        if r.is_zero() {
            return Cyclotomic::zero();
        }
        let prod = (r.numer() * r.denom()).abs().to_u64().expect("radicand fits in u64");
        // prod = s² · m with m squarefree
        let (mut m, mut s, mut rest, mut p) = (1u64, 1u64, prod, 2u64);
        while p * p <= rest {
            let mut e = 0;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            s *= p.pow(e / 2);
            if e % 2 == 1 {
                m *= p;
            }
            p += 1;
        }
        m *= rest;
        let mut root = Cyclotomic::from_rational(Rational::new(s.into(), r.denom().clone()));
        let mut k = m;
        let mut q = 2u64;
        while k > 1 {
            if k % q == 0 {
                root = &root * &sqrt_prime(q);
                k /= q;
            }
            q += 1;
        }
        if r.is_negative() {
            root = &root * &Cyclotomic::root_of_unity(4, 1);
        }
        root
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let d = self.coeffs.len();
        // Columns of the multiplication-by-self map in the power basis.
        let cols: Vec<Vec<Rational>> = (0..d)
            .map(|k| (self * &Cyclotomic::root_of_unity(self.order, k as i64)).coeffs)
            .collect();
        let m = super::ExactMatrix::from_fn(d, d, |i, j| cols[j][i].clone());
        let mut e0 = vec![Rational::zero(); d];
        e0[0] = Rational::one();
        let sol = m.solve(&super::ExactMatrix::column(e0)).ok()?;
        Some(Cyclotomic { order: self.order, coeffs: (0..d).map(|i| sol.get(i, 0).clone()).collect() })
    }
}

/// √p for a prime p.
fn sqrt_prime(p: u64) -> Cyclotomic {
    if p == 2 {
        return &Cyclotomic::root_of_unity(8, 1) + &Cyclotomic::root_of_unity(8, 7);
    }
    let n = p as u32;
    let mut g = Cyclotomic::zero();
    for k in 1..p {
        let leg = (1..=(p - 1) / 2).fold(1u64, |acc, _| acc * k % p);
        let c = if leg == 1 { Rational::one() } else { -Rational::one() };
        g = &g + &Cyclotomic::root_of_unity(n, k as i64).scale(&c);
    }
    // g² = (−1)^{(p−1)/2} p
    if p % 4 == 1 {
        g
    } else {
        &g * &Cyclotomic::root_of_unity(4, 3)
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            return self.coeffs == other.coeffs;
        }
        let (a, b) = Self::common(self, other);
        a.coeffs == b.coeffs
    }
}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => super::format_rational(c),
                _ => format!("({})*z{}^{}", super::format_rational(c), self.order, k),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl Zero for Cyclotomic {
    fn zero() -> Self {
        Self::from_rational(Rational::zero())
    }
    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

impl One for Cyclotomic {
    fn one() -> Self {
        Self::from_rational(Rational::one())
    }
}

impl From<Rational> for Cyclotomic {
    fn from(r: Rational) -> Self {
        Self::from_rational(r)
    }
}

impl<'a> Add<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, rhs: &Cyclotomic) -> Cyclotomic {
        let (a, b) = Cyclotomic::common(self, rhs);
        Cyclotomic {
            order: a.order,
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect(),
        }
    }
}

impl<'a> Sub<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, rhs: &Cyclotomic) -> Cyclotomic {
        let (a, b) = Cyclotomic::common(self, rhs);
        Cyclotomic {
            order: a.order,
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect(),
        }
    }
}

impl<'a> Mul<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, rhs: &Cyclotomic) -> Cyclotomic {
        let (a, b) = Cyclotomic::common(self, rhs);
        let mut poly = vec![Rational::zero(); a.coeffs.len() + b.coeffs.len() - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    poly[i + j] += x * y;
                }
            }
        }
        Cyclotomic::from_poly(a.order, poly)
    }
}

impl<'a> Div<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn div(self, rhs: &Cyclotomic) -> Cyclotomic {
        self * &rhs.inv().expect("division by zero cyclotomic")
    }
}

impl Neg for &Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        Cyclotomic { order: self.order, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Cyclotomic> for Cyclotomic {
            type Output = Cyclotomic;
            fn $m(self, rhs: Cyclotomic) -> Cyclotomic {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactcore::rat;

    #[test]
    fn square_roots_of_rationals() {
        for (n, d) in [(2, 1), (3, 1), (5, 4), (12, 7), (-3, 2), (1, 9), (30, 1)] {
            let r = rat(n, d);
            let s = Cyclotomic::sqrt_rational(&r);
            assert_eq!(&s * &s, Cyclotomic::from_rational(r.clone()));
            let z = s.to_complex();
            let v = n as f64 / d as f64;
            let expect = if v >= 0.0 { Complex64::new(v.sqrt(), 0.0) } else { Complex64::new(0.0, (-v).sqrt()) };
            assert!((z - expect).norm() < 1e-12, "{n}/{d}: {z}");
        }
    }

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(*cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(*cyclotomic_polynomial(2), vec![1, 1]);
        assert_eq!(*cyclotomic_polynomial(3), vec![1, 1, 1]);
        assert_eq!(*cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(*cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(*cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(30).len() - 1, euler_phi(30) as usize);
    }

    #[test]
    fn roots_of_unity_multiply() {
        let z = Cyclotomic::root_of_unity(6, 1);
        let mut p = Cyclotomic::one();
        for _ in 0..6 {
            p = &p * &z;
        }
        assert_eq!(p, Cyclotomic::one());
        assert_eq!(&z * &z, Cyclotomic::root_of_unity(3, 1));
        assert_eq!(Cyclotomic::root_of_unity(2, 1), Cyclotomic::from_rational(rat(-1, 1)));
    }

    #[test]
    fn inverse_and_conjugate() {
        let x = &Cyclotomic::root_of_unity(5, 2) + &Cyclotomic::from_rational(rat(3, 7));
        let y = x.inv().unwrap();
        assert_eq!(&x * &y, Cyclotomic::one());
        let c = x.conj();
        let zc = c.to_complex();
        let zx = x.to_complex();
        assert!((zc - zx.conj()).norm() < 1e-12);
    }

    #[test]
    fn rational_detection() {
        let z = Cyclotomic::root_of_unity(3, 1);
        let s = &z + &z.conj();
        assert_eq!(s.as_rational(), Some(rat(-1, 1)));
        assert_eq!(z.as_rational(), None);
    }
}
