//! W-invariant theta functions, their Taylor jets along L^⊥, the maps φ and ψ, and good
//! basic invariants.

mod basic;
mod exchange;
mod theta;

pub use basic::{expand_in, expand_many, solve_tol, substitute, BasicInvariantSet, Expansion, GoodnessReport, PointValue};
pub use exchange::{parse_invariant_file, write_invariant_file, InvariantFile, LabelledJet, EXCHANGE_MAGIC, EXCHANGE_VERSION};
pub use theta::{span_dimension, ThetaInvariant};

use crate::coxeter::{hyperbolic_coxeter, CoxeterData, CoxeterError};
use crate::exactcore::{common_denominator, rational_to_f64, Cyclotomic, ExactMatrix, Rational};
use crate::rootsys::MarkedEllipticRootSystem;
use crate::series::{monomials_of_weight, MultiIndex, Scalar, SeriesError};
use num_complex::Complex;
use crate::triplet::{lperp_chart, standard_triplet, AdmissibleTriplet, LperpChart, TripletError};
use crate::C64;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InvariantError {
    #[error(transparent)]
    Coxeter(#[from] CoxeterError),
    #[error(transparent)]
    Triplet(#[from] TripletError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("orbit of weight {weight:?} at level {level} exceeded {limit} terms")]
    OrbitTooLarge { weight: Vec<i64>, level: u32, limit: usize },
    #[error("alcove weights at level {level}: {found} but {expected} monomials of that degree")]
    SpanMismatch { level: u32, found: usize, expected: usize },
    #[error("could not reach rank {needed} at degree {degree} from orbit sums")]
    RankDeficient { degree: u32, needed: usize },
    #[error("{0}")]
    Verification(String),
    #[error("invariant file, line {line}: {message}")]
    Exchange { line: usize, message: String },
}

/// Hard cap on the number of orbit terms kept for one theta function.
pub const ORBIT_LIMIT: usize = 4_000_000;

/// Everything fixed once per root system: Coxeter data, a triplet with its chart, the
/// fundamental weights and the integer data used by the orbit enumeration.
#[derive(Debug, Clone)]
pub struct InvariantContext {
    pub sys: MarkedEllipticRootSystem,
    pub data: CoxeterData,
    pub triplet: AdmissibleTriplet,
    pub chart: LperpChart,
    pub fundamental_weights: Vec<Vec<Rational>>,
    /// q-exponents of orbit terms lie in (1/den)ℤ.
    pub den: u32,
    /// Series are kept modulo q^{q_order}.
    pub q_order: i64,
    /// Jets are kept up to this weighted degree.
    pub jet_bound: u32,
    /// Orbit vectors are stored as `scale` times their coordinates.
    pub(crate) scale: i64,
    /// μ ↦ (μ_β) as a complex n × dim matrix.
    pub(crate) zrow: Vec<Vec<C64>>,
    /// The same matrix exactly, up to the factors (−2π√−1)^{−z_pow[β]}.
    zrow_exact: Vec<Vec<Cyclotomic>>,
    /// μ_a = (a_int·μ)/a_den and μ_δ = (d_int·μ)/d_den.
    pub(crate) a_int: Vec<i64>,
    pub(crate) a_den: i64,
    pub(crate) d_int: Vec<i64>,
    pub(crate) d_den: i64,
}

fn to_i64(x: &BigInt) -> i64 {
    x.to_i64().expect("coordinate fits in i64")
}

fn integer_row(row: &[Rational]) -> (Vec<i64>, i64) {
    let den = common_denominator(row.iter());
    let ints = row.iter().map(|x| to_i64(&(x * Rational::from(den.clone())).to_integer())).collect();
    (ints, to_i64(&den))
}

impl InvariantContext {
    /// Builds the context from the zero-type (r = 0) triplet, dual-normalized when the
    /// codimension is one.
    pub fn new(sys: MarkedEllipticRootSystem, seed: u64, q_order: i64, jet_bound: u32) -> Result<Self, InvariantError> {
        let data = hyperbolic_coxeter(&sys)?;
        let triplet = standard_triplet(&sys, &data, &Rational::zero(), seed)?;
        Self::with_triplet(sys, data, triplet, q_order, jet_bound)
    }

    pub fn with_triplet(
        sys: MarkedEllipticRootSystem,
        data: CoxeterData,
        triplet: AdmissibleTriplet,
        q_order: i64,
        jet_bound: u32,
    ) -> Result<Self, InvariantError> {
        let chart = lperp_chart(&triplet, &sys);
        let l = sys.l;
        let dim = sys.dim();
        let n = sys.n();
        // ω_i = Σ_k X_{ki} α_k with Ĩ(ω_i, α_j^∨) = δ_ij.
        let g = sys.finite_gram();
        let gd = ExactMatrix::from_fn(l, l, |i, j| g.get(i, j) * Rational::from_integer(2.into()) / g.get(j, j));
        let xt = gd.inverse().expect("finite Cartan matrix is invertible");
        let fundamental_weights: Vec<Vec<Rational>> = (0..l)
            .map(|i| {
                let mut v = vec![Rational::zero(); dim];
                for k in 0..l {
                    v[k] = xt.get(i, k).clone();
                }
                v
            })
            .collect();
        let scale = to_i64(&common_denominator(fundamental_weights.iter().flatten()));
        let drow = chart.to_l.row(n + 1);
        let arow = chart.to_l.row(n);
        let (d_int, d_den) = integer_row(&drow);
        let (a_int, a_den) = integer_row(&arow);
        let dot = |r: &[Rational], v: &[Rational]| r.iter().zip(v).fold(Rational::zero(), |acc, (x, y)| acc + x * y);
        let mut den = BigInt::one();
        let mut gens: Vec<Vec<Rational>> = fundamental_weights.clone();
        gens.extend((0..l).map(|i| sys.simple_root(i)));
        gens.push(sys.lambda0());
        gens.push(sys.delta());
        for v in &gens {
            den = den.lcm(dot(&drow, v).denom());
        }
        let zrow = (0..n)
            .map(|beta| {
                (0..dim)
                    .map(|i| {
                        (0..n).fold(C64::new(0.0, 0.0), |acc, j| acc + chart.z_of_l[beta][j] * rational_to_f64(chart.to_l.get(j, i)))
                    })
                    .collect()
            })
            .collect();
        let zrow_exact: Vec<Vec<Cyclotomic>> = (0..n)
            .map(|beta| {
                (0..dim)
                    .map(|i| {
                        (0..n).fold(Cyclotomic::zero(), |acc, j| {
                            let t = chart.to_l.get(j, i);
                            if t.is_zero() {
                                acc
                            } else {
                                &acc + &chart.z_exact[beta][j].scale(t)
                            }
                        })
                    })
                    .collect()
            })
            .collect();
        Ok(InvariantContext {
            zrow_exact,
            sys,
            data,
            triplet,
            chart,
            fundamental_weights,
            den: den.to_u32().expect("small q-denominator"),
            q_order,
            jet_bound,
            scale,
            zrow,
            a_int,
            a_den,
            d_int,
            d_den,
        })
    }

    pub fn n(&self) -> usize {
        self.sys.n()
    }

    pub fn degrees(&self) -> &[u32] {
        &self.data.degrees
    }

    pub fn d_n(&self) -> u32 {
        self.data.d_n
    }

    /// Series precision in units of q^{1/den}.
    pub fn prec(&self) -> i64 {
        self.q_order * self.den as i64
    }

    /// Dominant weights Σ k_i ω_i with Σ k_i·(comark of α_i) ≤ m, as coefficient vectors k.
    pub fn alcove_weights(&self, m: u32) -> Vec<Vec<i64>> {
        let l = self.sys.l;
        let co: Vec<i64> = self.sys.comarks[1..].to_vec();
        let mut out = Vec::new();
        fn rec(co: &[i64], i: usize, left: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
            if i == co.len() {
                out.push(cur.clone());
                return;
            }
            let mut k = 0;
            while k * co[i] <= left {
                cur.push(k);
                rec(co, i + 1, left - k * co[i], cur, out);
                cur.pop();
                k += 1;
            }
        }
        rec(&co, 0, m as i64, &mut Vec::with_capacity(l), &mut out);
        out
    }

    /// Monomials z^b (equivalently x^b) of weighted degree m.
    pub fn monomials(&self, m: u32) -> Vec<MultiIndex> {
        monomials_of_weight(self.degrees(), m)
    }

    /// μ ↦ (μ_β) in precision T, per unit of the orbit scale.
    pub(crate) fn zrow_in<T: Scalar>(&self) -> Vec<Vec<Complex<T>>> {
        let m2pi = Complex::new(T::zero(), -T::TAU());
        let s = T::from(self.scale).unwrap();
        self.zrow_exact
            .iter()
            .zip(&self.chart.z_pow)
            .map(|(row, &p)| {
                let f = crate::exactcore::crecip(m2pi).powi(p) * crate::exactcore::fdiv(T::one(), s);
                row.iter().map(|c| if c.is_zero() { Complex::new(T::zero(), T::zero()) } else { c.to_complex_in::<T>() * f }).collect()
            })
            .collect()
    }

    /// Table of exp(−2π√−1·k/N) in precision T, indexed by `phase_index`.
    pub(crate) fn phase_table_in<T: Scalar>(&self) -> Vec<Complex<T>> {
        let den = self.a_den * self.scale;
        (0..den).map(|k| crate::exactcore::root_of_unity_in::<T>(den as u32, -k)).collect()
    }

    /// k with μ_a ≡ k/N mod ℤ, N = a_den·scale.
    pub(crate) fn phase_index(&self, v: &[i64]) -> usize {
        let num: i128 = self.a_int.iter().zip(v).map(|(a, b)| *a as i128 * *b as i128).sum();
        let den = self.a_den as i128 * self.scale as i128;
        num.rem_euclid(den) as usize
    }

    /// Exact q-exponent of a scaled orbit vector in units of q^{1/den}: −μ_δ·den.
    pub(crate) fn exponent(&self, v: &[i64]) -> i64 {
        let num: i128 = self.d_int.iter().zip(v).map(|(a, b)| *a as i128 * *b as i128).sum();
        let den = self.d_den as i128 * self.scale as i128;
        let e = -num * self.den as i128;
        assert!(e % den == 0, "q-exponent outside (1/den)Z");
        (e / den) as i64
    }

    /// μ_a modulo ℤ in [0, 1) for a scaled orbit vector, reduced exactly.
    pub(crate) fn phase_fraction(&self, v: &[i64]) -> f64 {
        let num: i128 = self.a_int.iter().zip(v).map(|(a, b)| *a as i128 * *b as i128).sum();
        let den = self.a_den as i128 * self.scale as i128;
        num.rem_euclid(den) as f64 / den as f64
    }

    /// The coordinates μ_β of a scaled orbit vector.
    pub(crate) fn zcoords(&self, v: &[i64]) -> Vec<C64> {
        let s = self.scale as f64;
        self.zrow
            .iter()
            .map(|row| row.iter().zip(v).fold(C64::new(0.0, 0.0), |acc, (r, &x)| if x == 0 { acc } else { acc + r * (x as f64) }) / s)
            .collect()
    }

    /// Random sample points (τ, z) with |q| ≤ q_max and |z^β| ≤ z_max.
    pub fn sample_points(&self, count: usize, seed: u64, q_max: f64, z_max: f64) -> Vec<(C64, Vec<C64>)> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n = self.n();
        // |q| = exp(−2π Im τ) ≤ q_max  ⇔  Im τ ≥ −ln(q_max)/2π.
        let im_min = -q_max.ln() / std::f64::consts::TAU;
        (0..count)
            .map(|_| {
                let tau = C64::new(rng.gen_range(-0.5..0.5), im_min + rng.gen_range(0.0..0.3));
                let z = (0..n)
                    .map(|_| C64::from_polar(z_max * rng.gen_range(0.0f64..1.0).sqrt(), rng.gen_range(0.0..std::f64::consts::TAU)))
                    .collect();
                (tau, z)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fundamental_weights_pair_with_coroots() {
        let sys = MarkedEllipticRootSystem::build("G2".parse().unwrap());
        let ctx = InvariantContext::new(sys, 1, 4, 4).unwrap();
        for (i, w) in ctx.fundamental_weights.iter().enumerate() {
            for j in 0..ctx.sys.l {
                let c = ctx.sys.coroot(&ctx.sys.simple_root(j)).unwrap();
                let p = ctx.sys.form(w, &c);
                assert_eq!(p, if i == j { Rational::one() } else { Rational::zero() });
            }
        }
    }
}
