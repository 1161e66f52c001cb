use super::{InvariantContext, InvariantError, ORBIT_LIMIT};
use crate::coxeter::LinearAuto;
use crate::exactcore::{common_denominator, Rational};
use crate::series::{multi_factorial, MultiIndex, QJet, QSeries, Scalar};
use crate::C64;
use num_complex::Complex;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use std::collections::{HashSet, VecDeque};

/// Orbit terms per parallel work unit.
const CHUNK: usize = 4096;

/// Σ exp⟨μ, x⟩ over the W-orbit of λ + m·Λ0, truncated at q^{q_order}.
///
/// Orbit vectors are stored scaled by the context's integer `scale`. Amplitudes are all
/// 1: the generating reflections never move the a-coordinate by a non-integer, and an
/// integer multiple of a contributes exp(−2π√−1·k) = 1.
#[derive(Debug, Clone)]
pub struct ThetaInvariant {
    pub level: u32,
    /// λ = Σ k_i ω_i.
    pub weight: Vec<i64>,
    pub terms: Vec<Vec<i64>>,
    /// Exponent of each term in units of q^{1/den}.
    pub exponents: Vec<i64>,
    /// All terms with q-exponent below q_order are present.
    pub q_order: i64,
}

/// Number of dominant alcove weights of level m; an error if it differs from the number
/// of monomials of degree m in the degrees of the system.
pub fn span_dimension(ctx: &InvariantContext, m: u32) -> Result<usize, InvariantError> {
    let found = ctx.alcove_weights(m).len();
    let expected = ctx.monomials(m).len();
    if found != expected {
        return Err(InvariantError::SpanMismatch { level: m, found, expected });
    }
    Ok(found)
}

struct Reflection {
    root: Vec<i64>,
    covector: Vec<i64>,
    den: i64,
}

fn reflections(ctx: &InvariantContext) -> Vec<Reflection> {
    let sys = &ctx.sys;
    let mut roots = vec![sys.affine_root()];
    roots.extend((0..sys.l).map(|i| sys.simple_root(i)));
    roots
        .into_iter()
        .map(|r| {
            let norm = sys.form(&r, &r);
            let cov: Vec<Rational> = sys
                .gram
                .mul_vec(&r)
                .iter()
                .map(|x| x * Rational::from_integer(2.into()) / &norm)
                .collect();
            let den = common_denominator(cov.iter());
            let dq = Rational::from(den.clone());
            Reflection {
                root: r.iter().map(|x| x.to_integer().to_i64().unwrap()).collect(),
                covector: cov.iter().map(|x| (x * &dq).to_integer().to_i64().unwrap()).collect(),
                den: den.to_i64().unwrap(),
            }
        })
        .collect()
}

/// Largest raw δ-depth E = −(δ-coefficient) an orbit vector can have while its chart
/// q-exponent stays below q_order, from ℓ ≥ E − ‖φ‖·√(|λ|² + 2mE) + const.
fn depth_bound(ctx: &InvariantContext, lambda: &[Rational], m: u32, prec: i64) -> f64 {
    let sys = &ctx.sys;
    let l = sys.l;
    let n = ctx.n();
    let drow = ctx.chart.to_l.row(n + 1);
    // φ(v) = −μ_δ on the finite part; covector f_i = φ(α_i).
    let f: Vec<f64> = (0..l).map(|i| -crate::exactcore::rational_to_f64(&drow[i])).collect();
    let g = sys.finite_gram();
    let ginv = g.inverse().unwrap();
    let mut phi2 = 0.0;
    for i in 0..l {
        for j in 0..l {
            phi2 += f[i] * crate::exactcore::rational_to_f64(ginv.get(i, j)) * f[j];
        }
    }
    let a = phi2.max(0.0).sqrt();
    let b = crate::exactcore::rational_to_f64(&sys.form(lambda, lambda));
    let c = -(m as f64) * crate::exactcore::rational_to_f64(&drow[sys.idx_lambda0()]);
    let p = prec as f64 / ctx.den as f64 + 1.0;
    if m == 0 {
        return p - c;
    }
    let mf = m as f64;
    // E − a√(b + 2mE) + c = p; u = √(b + 2mE).
    let u = mf * a + (mf * mf * a * a + b + 2.0 * mf * (p - c)).max(0.0).sqrt();
    (u * u - b) / (2.0 * mf) + 1.0
}

impl ThetaInvariant {
    /// The orbit sum for λ = Σ k_i ω_i at level m, by breadth-first closure under the
    /// affine simple reflections with pruning on the δ-depth.
    pub fn orbit(ctx: &InvariantContext, k: &[i64], m: u32) -> Result<Self, InvariantError> {
        Self::orbit_to(ctx, k, m, ctx.prec())
    }

    /// The same orbit cut at q^{prec/den} instead of q^{q_order}.
    fn orbit_to(ctx: &InvariantContext, k: &[i64], m: u32, prec: i64) -> Result<Self, InvariantError> {
        let sys = &ctx.sys;
        let dim = sys.dim();
        let mut lambda = vec![Rational::zero(); dim];
        for (ki, w) in k.iter().zip(&ctx.fundamental_weights) {
            for (x, y) in lambda.iter_mut().zip(w) {
                *x += y * Rational::from_integer((*ki).into());
            }
        }
        let emax = depth_bound(ctx, &lambda, m, prec);
        let s = ctx.scale;
        let mut start: Vec<i64> = lambda
            .iter()
            .map(|x| (x * Rational::from_integer(s.into())).to_integer().to_i64().unwrap())
            .collect();
        start[sys.idx_lambda0()] = m as i64 * s;
        let refl = reflections(ctx);
        let idx_d = sys.idx_delta();
        let mut seen: HashSet<Vec<i64>> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(start.clone());
        queue.push_back(start);
        let mut terms = Vec::new();
        let mut exponents = Vec::new();
        while let Some(v) = queue.pop_front() {
            let e = ctx.exponent(&v);
            if e < prec {
                terms.push(v.clone());
                exponents.push(e);
                if terms.len() > ORBIT_LIMIT {
                    return Err(InvariantError::OrbitTooLarge {
                        weight: k.to_vec(),
                        level: m,
                        limit: ORBIT_LIMIT,
                    });
                }
            }
            for r in &refl {
                let num: i64 = r.covector.iter().zip(&v).map(|(a, b)| a * b).sum();
                let q = r.den * s;
                assert!(num % q == 0, "weight is not integral on a coroot");
                let kk = num / q;
                if kk == 0 {
                    continue;
                }
                let w: Vec<i64> = v.iter().zip(&r.root).map(|(x, y)| x - kk * y * s).collect();
                let depth = -(w[idx_d] as f64) / s as f64;
                if depth > emax || seen.contains(&w) {
                    continue;
                }
                seen.insert(w.clone());
                queue.push_back(w);
            }
        }
        Ok(ThetaInvariant {
            level: m,
            weight: k.to_vec(),
            terms,
            exponents,
            q_order: prec / ctx.den as i64,
        })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Every term has Λ0-coefficient equal to the level.
    pub fn euler_degree_consistent(&self, ctx: &InvariantContext) -> bool {
        let i = ctx.sys.idx_lambda0();
        self.terms.iter().all(|t| t[i] == self.level as i64 * ctx.scale)
    }

    /// Value and gradient (∂/∂z^0 = ∂/∂τ, ∂/∂z^1, …, ∂/∂z^n) at chart point (τ, z), summing
    /// the exponentials with the vectors transformed by `g` (None for the identity):
    /// f(g^{-1}·x) = Σ exp⟨x, g μ⟩. Transformed terms at or beyond q^{q_order} are dropped,
    /// so the result is the truncation of f∘g^{-1} at the same order as f.
    pub fn eval_transformed(&self, ctx: &InvariantContext, tau: C64, z: &[C64], g: Option<&[Vec<i64>]>) -> (C64, Vec<C64>) {
        let n = ctx.n();
        let two_pi_i = C64::new(0.0, std::f64::consts::TAU);
        let prec = ctx.prec();
        let term = |t: &Vec<i64>| {
            let v: Vec<i64> = match g {
                Some(m) => apply(m, t),
                None => t.clone(),
            };
            let ei = ctx.exponent(&v);
            if ei >= prec {
                return (C64::new(0.0, 0.0), vec![C64::new(0.0, 0.0); n + 1]);
            }
            let mz = ctx.zcoords(&v);
            let e = ei as f64 / ctx.den as f64;
            let lin = mz.iter().zip(z).fold(C64::new(0.0, 0.0), |acc, (a, b)| acc + a * b);
            let x = (lin + two_pi_i * tau * e - two_pi_i * ctx.phase_fraction(&v)).exp();
            let mut gr = Vec::with_capacity(n + 1);
            gr.push(two_pi_i * e * x);
            gr.extend(mz.iter().map(|m| m * x));
            (x, gr)
        };
        let add = |(a, ga): (C64, Vec<C64>), (b, gb): (C64, Vec<C64>)| (a + b, ga.iter().zip(&gb).map(|(x, y)| x + y).collect::<Vec<_>>());
        let zero = || (C64::new(0.0, 0.0), vec![C64::new(0.0, 0.0); n + 1]);
        // Fixed chunks summed in order keep the result independent of scheduling.
        let parts: Vec<(C64, Vec<C64>)> = self.terms.par_chunks(CHUNK).map(|c| c.iter().map(term).fold(zero(), add)).collect();
        parts.into_iter().fold(zero(), add)
    }

    pub fn eval(&self, ctx: &InvariantContext, tau: C64, z: &[C64]) -> (C64, Vec<C64>) {
        self.eval_transformed(ctx, tau, z, None)
    }

    /// Largest |f(w̃·x) − f(x)| / max(1, |f(x)|) over the generators w̃_{α_i}, w̃_{α_i+a}
    /// and the given points, both sides taken modulo q^{q_order}.
    ///
    /// A reflection can carry a term far past the cut (and bring one back from there), so
    /// f∘w̃ mod q^{q_order} is summed over an orbit enumerated afresh with a cut deep enough
    /// to hold every preimage. Terms missed by the pruned enumeration show up here.
    pub fn invariance_residual(&self, ctx: &InvariantContext, points: &[(C64, Vec<C64>)]) -> Result<f64, InvariantError> {
        let gens: Vec<Vec<Vec<i64>>> = ctx.sys.generators().iter().map(int_matrix).collect();
        let deepest = gens
            .iter()
            .flat_map(|g| self.terms.iter().map(move |t| ctx.exponent(&apply(g, t))))
            .max()
            .unwrap_or(0)
            .max(ctx.prec());
        let ext = Self::orbit_to(ctx, &self.weight, self.level, deepest + 1)?;
        let mut worst: f64 = 0.0;
        for (tau, z) in points {
            let (f0, _) = self.eval(ctx, *tau, z);
            for g in &gens {
                // w̃ is an involution, so f(w̃·x) = Σ exp⟨x, w̃μ⟩.
                let (f1, _) = ext.eval_transformed(ctx, *tau, z, Some(g));
                worst = worst.max((f1 - f0).norm() / f0.norm().max(1.0));
            }
        }
        Ok(worst)
    }

    /// Largest |f(u^{-1}·x) − ζ^{-m} f(x)| / max(1, |f(x)|) for the unipotent part u.
    ///
    /// u has a fractional shift along a, so uμ − μ is formed exactly and paired through
    /// the chart.
    pub fn unipotent_residual(&self, ctx: &InvariantContext, points: &[(C64, Vec<C64>)]) -> f64 {
        let u = &ctx.data.unip;
        let zeta = ctx.data.zeta().to_complex();
        let factor = zeta.powi(-(self.level as i32));
        let s = Rational::from_integer(ctx.scale.into());
        let shifts: Vec<Vec<Rational>> = self
            .terms
            .iter()
            .map(|t| {
                let v: Vec<Rational> = t.iter().map(|&x| Rational::from_integer(x.into()) / &s).collect();
                u.apply(&v).iter().zip(&v).map(|(x, y)| x - y).collect()
            })
            .collect();
        points
            .iter()
            .map(|(tau, z)| {
                let (f0, _) = self.eval(ctx, *tau, z);
                let f1 = self.terms.iter().zip(&shifts).fold(C64::new(0.0, 0.0), |acc, (t, d)| {
                    acc + term_value(ctx, t, *tau, z) * ctx.chart.pairing(d, *tau, z).exp()
                });
                (f1 - factor * f0).norm() / f0.norm().max(1.0)
            })
            .fold(0.0, f64::max)
    }

    /// Taylor jet around L^⊥: the coefficient of z^b is Σ_μ exp(−2π√−1 μ_a) q^{ℓ(μ)} μ^b / b!.
    pub fn taylor_jet<T: Scalar>(&self, ctx: &InvariantContext) -> QJet<T> {
        let weights = ctx.degrees().to_vec();
        let jb = ctx.jet_bound;
        let monos: Vec<MultiIndex> = (0..=jb).flat_map(|w| ctx.monomials(w)).collect();
        let inv_fact: Vec<T> = monos
            .iter()
            .map(|b| crate::exactcore::fdiv(T::one(), T::from(multi_factorial(b)).unwrap()))
            .collect();
        let prec = ctx.prec();
        let emin = self.exponents.iter().copied().min().unwrap_or(0).min(prec);
        let len = (prec - emin) as usize;
        let n = ctx.n();
        let maxpow: Vec<usize> = weights.iter().map(|&w| (jb / w) as usize).collect();
        let zrow = ctx.zrow_in::<T>();
        let phases = ctx.phase_table_in::<T>();
        let zero = Complex::new(T::zero(), T::zero());
        let one = Complex::new(T::one(), T::zero());
        let parts: Vec<Vec<Vec<Complex<T>>>> = self
            .terms
            .par_chunks(CHUNK)
            .zip(self.exponents.par_chunks(CHUNK))
            .map(|(ts, es)| {
                ts.iter().zip(es).fold(vec![vec![zero; len]; monos.len()], |mut acc, (t, &e)| {
                    let mz: Vec<Complex<T>> = zrow
                        .iter()
                        .map(|row| {
                            row.iter()
                                .zip(t.iter())
                                .fold(zero, |s, (r, &x)| if x == 0 { s } else { s + *r * T::from(x).unwrap() })
                        })
                        .collect();
                    let ph = phases[ctx.phase_index(t)];
                    let pows: Vec<Vec<Complex<T>>> = (0..n)
                        .map(|b| {
                            let mut p = vec![one; maxpow[b] + 1];
                            for k in 1..=maxpow[b] {
                                p[k] = p[k - 1] * mz[b];
                            }
                            p
                        })
                        .collect();
                    let slot = (e - emin) as usize;
                    for (i, b) in monos.iter().enumerate() {
                        let mut v = ph * inv_fact[i];
                        for (beta, &k) in b.iter().enumerate() {
                            if k > 0 {
                                v = v * pows[beta][k as usize];
                            }
                        }
                        acc[i][slot] = acc[i][slot] + v;
                    }
                    acc
                })
            })
            .collect();
        let acc = parts
            .into_iter()
            .reduce(|mut a, b| {
                for (x, y) in a.iter_mut().zip(&b) {
                    for (p, q) in x.iter_mut().zip(y) {
                        *p = *p + *q;
                    }
                }
                a
            })
            .unwrap_or_else(|| vec![vec![zero; len]; monos.len()]);
        let mut jet = QJet::zero(weights, jb, ctx.den);
        for (b, coeffs) in monos.into_iter().zip(acc) {
            if coeffs.iter().all(|z| z.re == T::zero() && z.im == T::zero()) {
                continue;
            }
            jet.insert(b, QSeries::from_coeffs(ctx.den, emin, coeffs, prec));
        }
        jet
    }
}

/// exp⟨x, μ⟩ for a scaled orbit vector.
fn term_value(ctx: &InvariantContext, v: &[i64], tau: C64, z: &[C64]) -> C64 {
    let two_pi_i = C64::new(0.0, std::f64::consts::TAU);
    let e = ctx.exponent(v) as f64 / ctx.den as f64;
    let lin = ctx.zcoords(v).iter().zip(z).fold(C64::new(0.0, 0.0), |acc, (a, b)| acc + a * b);
    (lin + two_pi_i * tau * e - two_pi_i * ctx.phase_fraction(v)).exp()
}

fn apply(g: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
    g.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

pub(crate) fn int_matrix(g: &LinearAuto) -> Vec<Vec<i64>> {
    assert!(g.is_integral(), "group element with non-integral matrix");
    let m = &g.matrix;
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.get(i, j).to_integer().to_i64().unwrap()).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::MarkedEllipticRootSystem;

    fn ctx(t: &str, q: i64, j: u32) -> InvariantContext {
        InvariantContext::new(MarkedEllipticRootSystem::build(t.parse().unwrap()), 1, q, j).unwrap()
    }

    #[test]
    fn constant_orbit() {
        let c = ctx("A1", 10, 2);
        let f = ThetaInvariant::orbit(&c, &[0], 0).unwrap();
        assert_eq!(f.len(), 1);
        let j = f.taylor_jet::<f64>(&c);
        assert_eq!(j.terms().count(), 1);
        assert!((j.coeff(&[0, 0]).unwrap().coeff(0) - C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn span_dimensions_match_monomial_counts() {
        for t in ["A1", "G2", "D4", "B3", "C3", "F4"] {
            let c = ctx(t, 4, 2);
            for m in 0..=4 {
                span_dimension(&c, m).unwrap_or_else(|e| panic!("{t}: {e}"));
            }
        }
    }

    #[test]
    fn a1_thetas_are_invariant() {
        let c = ctx("A1", 20, 2);
        let pts = c.sample_points(5, 3, 0.3, 0.2);
        for k in c.alcove_weights(2) {
            let f = ThetaInvariant::orbit(&c, &k, 2).unwrap();
            assert!(f.euler_degree_consistent(&c));
            let r = f.invariance_residual(&c, &pts).unwrap();
            assert!(r < 1e-8, "{k:?}: {r}");
            let u = f.unipotent_residual(&c, &pts);
            assert!(u < 1e-8, "{k:?}: {u}");
        }
    }

    #[test]
    fn g2_and_d4_thetas_are_invariant() {
        for t in ["G2", "D4"] {
            let c = ctx(t, 20, 2);
            let pts = c.sample_points(5, 11, 0.3, 0.2);
            for m in 1..=c.d_n() {
                for k in c.alcove_weights(m) {
                    let f = ThetaInvariant::orbit(&c, &k, m).unwrap();
                    let r = f.invariance_residual(&c, &pts).unwrap();
                    let u = f.unipotent_residual(&c, &pts);
                    assert!(r < 1e-8 && u < 1e-8, "{t} {k:?}: {r} {u}");
                }
            }
        }
    }

    #[test]
    fn jet_vanishing_pattern() {
        let c = ctx("G2", 8, 4);
        for m in 1..=2 {
            for k in c.alcove_weights(m) {
                let f = ThetaInvariant::orbit(&c, &k, m).unwrap();
                let j = f.taylor_jet::<f64>(&c);
                let scale = j.max_abs();
                for (b, s) in j.terms() {
                    let w = j.weight(b);
                    if (w + c.d_n() - m % c.d_n()) % c.d_n() != 0 {
                        assert!(s.max_abs() < 1e-9 * scale, "{k:?} {b:?}: {}", s.max_abs());
                    }
                }
            }
        }
    }

    #[test]
    fn euler_derivative_along_zn() {
        // ∂f/∂z^n = m/(−2π√−1)·f for degree-m f in the dual-normalized chart.
        let c = ctx("G2", 8, 4);
        let n = c.n();
        for k in c.alcove_weights(2) {
            let f = ThetaInvariant::orbit(&c, &k, 2).unwrap();
            let j = f.taylor_jet::<f64>(&c);
            let lhs = j.deriv(n - 1);
            let rhs = j
                .scale(C64::new(0.0, 2.0 / std::f64::consts::TAU))
                .truncate_weight(lhs.max_weight());
            // 1/(−2π√−1) = √−1/(2π)
            assert!(lhs.sub_ref(&rhs).max_abs() < 1e-9 * j.max_abs().max(1.0));
        }
    }
}
