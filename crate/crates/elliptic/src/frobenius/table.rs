use super::{check_duality, extended_degrees, intersection_expansions, lift, FrobeniusError};
use crate::exactcore::{rational_in, rational_to_f64, ExactMatrix, Rational};
use crate::invariants::{BasicInvariantSet, Expansion};
use crate::series::{minus_two_pi_i, QJet, QSeries, Scalar, EXACT};
use crate::C64;
use num_complex::Complex;
use num_traits::{One, Zero};
use rayon::prelude::*;

/// Flat metric, structure constants and the data they are built from.
///
/// With unit field e = s·∂/∂x^n the metric is g^{αβ} = Lie_e(cĨ)(dx^α, dx^β) and
/// C_{αβ}^γ = Σ g_{αα'} g_{ββ'} g^{γγ'} ∂_{γ'}((d_n/(d_{α'} + d_{β'}))·cĨ(dx^{α'}, dx^{β'}))
/// for α ≠ n, C_{nβ}^γ = δ_{βγ}/s. The normalized structure is s = 1.
#[derive(Debug, Clone)]
pub struct FrobeniusTable<T: Scalar> {
    /// d_0 = 0, d_1, …, d_n.
    pub degrees: Vec<u32>,
    pub d_n: u32,
    pub unit_scale: Rational,
    /// c = −2π√−1/d_n.
    pub c: Complex<T>,
    /// g^{αβ}, exact.
    pub metric_upper: ExactMatrix,
    /// g_{αβ}, exact.
    pub metric: ExactMatrix,
    /// Largest non-constant part of ∂/∂x^n (cĨ) before rounding to the exact metric.
    pub metric_constancy: f64,
    /// cĨ(dx^α, dx^β) as polynomials in x^1..x^n.
    pub intersection: Vec<Vec<QJet<T>>>,
    /// constants[α][β][γ] = C_{αβ}^γ.
    pub constants: Vec<Vec<Vec<QJet<T>>>>,
    /// Weight bound of the polynomial representation (4d_n, enough for all products used).
    pub max_weight: u32,
    pub den: u32,
}

pub fn metric_and_constants<T: Scalar>(xs: &BasicInvariantSet<T>) -> Result<FrobeniusTable<T>, FrobeniusError> {
    metric_and_constants_scaled(xs, &Rational::one())
}

/// The structure with unit field s·∂/∂x^n, i.e. (∘/s, s·e, g/s) for the same cĨ.
pub fn metric_and_constants_scaled<T: Scalar>(xs: &BasicInvariantSet<T>, s: &Rational) -> Result<FrobeniusTable<T>, FrobeniusError> {
    check_duality(xs)?;
    let exps = intersection_expansions(xs)?;
    metric_and_constants_from(xs, &exps, s)
}

/// As [`metric_and_constants_scaled`], reusing expansions from [`intersection_expansions`].
pub fn metric_and_constants_from<T: Scalar>(
    xs: &BasicInvariantSet<T>,
    exps: &[Vec<Expansion<T>>],
    s: &Rational,
) -> Result<FrobeniusTable<T>, FrobeniusError> {
    let degrees = extended_degrees(xs);
    let n = xs.n();
    let d_n = degrees[n];
    let w = 4 * d_n;
    let c = minus_two_pi_i::<T>() * crate::exactcore::fdiv(T::one(), T::from(d_n).unwrap());
    let intersection = exps.iter().map(|r| r.iter().map(|e| e.coeffs.scale(c).with_max_weight(w)).collect()).collect();
    build(degrees, c, intersection, s, xs.jets[0].den(), w)
}

fn build<T: Scalar>(
    degrees: Vec<u32>,
    c: Complex<T>,
    intersection: Vec<Vec<QJet<T>>>,
    s: &Rational,
    den: u32,
    w: u32,
) -> Result<FrobeniusTable<T>, FrobeniusError> {
    let n = degrees.len() - 1;
    let d_n = degrees[n];
    let weights = degrees[1..].to_vec();
    let mut upper = ExactMatrix::zeros(n + 1, n + 1);
    let mut constancy = 0.0f64;
    for a in 0..=n {
        for b in 0..=n {
            let dj = intersection[a][b].deriv(n - 1);
            let v = dj.coeff(&vec![0; n]).map_or(Complex::zero(), |s| s.coeff(0));
            let rest = dj.sub_ref(&QJet::constant(weights.clone(), dj.max_weight(), QSeries::constant(v, den, EXACT)));
            let vf = super::lower(v);
            let res = rest.max_abs().to_f64().unwrap() / vf.norm().max(1.0);
            constancy = constancy.max(res);
            if res > 1e-6 {
                return Err(FrobeniusError::NonConstantMetric { alpha: a, beta: b, residual: res });
            }
            let r = vf.re.round();
            if (vf - C64::new(r, 0.0)).norm() > 1e-6 {
                return Err(FrobeniusError::NonIntegralMetric { alpha: a, beta: b, value: vf });
            }
            upper.set(a, b, Rational::from_integer((r as i64).into()) * s);
        }
    }
    let lower = upper.inverse().map_err(|_| FrobeniusError::DegenerateDenominator(n, n))?;
    let mut table = FrobeniusTable {
        degrees,
        d_n,
        unit_scale: s.clone(),
        c,
        metric_upper: upper,
        metric: lower,
        metric_constancy: constancy,
        intersection,
        constants: Vec::new(),
        max_weight: w,
        den,
    };
    let triples: Vec<(usize, usize, usize)> = (0..=n).flat_map(|a| (0..=n).flat_map(move |b| (0..=n).map(move |g| (a, b, g)))).collect();
    let flat: Vec<Result<QJet<T>, FrobeniusError>> = triples.par_iter().map(|&(a, b, g)| table.structure_constant(a, b, g)).collect();
    let mut it = flat.into_iter();
    let mut constants = vec![vec![Vec::with_capacity(n + 1); n + 1]; n + 1];
    for &(a, b, _) in &triples {
        constants[a][b].push(it.next().unwrap()?);
    }
    table.constants = constants;
    Ok(table)
}

impl<T: Scalar> FrobeniusTable<T> {
    pub fn n(&self) -> usize {
        self.degrees.len() - 1
    }

    fn weights(&self) -> Vec<u32> {
        self.degrees[1..].to_vec()
    }

    pub fn zero(&self) -> QJet<T> {
        QJet::zero(self.weights(), self.max_weight, self.den)
    }

    pub fn constant(&self, c: Complex<T>) -> QJet<T> {
        QJet::constant(self.weights(), self.max_weight, QSeries::constant(c, self.den, EXACT))
    }

    /// The coordinate x^σ, σ ≥ 1.
    pub fn coordinate(&self, sigma: usize) -> QJet<T> {
        QJet::variable(self.weights(), self.max_weight, self.den, sigma - 1)
    }

    /// ∂/∂x^γ; ∂_0 = ∂/∂τ on the coefficients.
    pub fn partial(&self, j: &QJet<T>, g: usize) -> QJet<T> {
        if g == 0 {
            j.d_tau()
        } else {
            j.deriv(g - 1).with_max_weight(self.max_weight)
        }
    }

    fn structure_constant(&self, a: usize, b: usize, g: usize) -> Result<QJet<T>, FrobeniusError> {
        let n = self.n();
        if a == n {
            let v = if b == g { rational_in::<T>(&self.unit_scale.recip()) } else { T::zero() };
            return Ok(self.constant(Complex::new(v, T::zero())));
        }
        let mut acc = self.zero();
        for a1 in 0..=n {
            let ga = self.metric.get(a, a1);
            if ga.is_zero() {
                continue;
            }
            for b1 in 0..=n {
                let gb = self.metric.get(b, b1);
                if gb.is_zero() {
                    continue;
                }
                for g1 in 0..=n {
                    let gg = self.metric_upper.get(g, g1);
                    if gg.is_zero() {
                        continue;
                    }
                    let wsum = self.degrees[a1] + self.degrees[b1];
                    if wsum == 0 {
                        return Err(FrobeniusError::DegenerateDenominator(a, b));
                    }
                    let k = ga * gb * gg * Rational::new(self.d_n.into(), wsum.into());
                    let term = self.partial(&self.intersection[a1][b1], g1);
                    acc = acc.add_ref(&term.scale(Complex::new(rational_in::<T>(&k), T::zero())));
                }
            }
        }
        Ok(acc)
    }

    /// c_{αβγ} = Σ_σ g_{γσ} C_{αβ}^σ.
    pub fn lowered(&self, a: usize, b: usize, g: usize) -> QJet<T> {
        (0..=self.n()).fold(self.zero(), |acc, s| {
            let m = self.metric.get(g, s);
            if m.is_zero() {
                acc
            } else {
                acc.add_ref(&self.constants[a][b][s].scale(Complex::new(rational_in::<T>(m), T::zero())))
            }
        })
    }

    /// The same intersection form with unit field s·∂/∂x^n.
    pub fn rescaled(&self, s: &Rational) -> Result<Self, FrobeniusError> {
        build(self.degrees.clone(), self.c, self.intersection.clone(), s, self.den, self.max_weight)
    }

    /// Structure constants at (τ, x): C[α][β][γ].
    pub fn constants_at(&self, tau: C64, x: &[C64]) -> Vec<Vec<Vec<C64>>> {
        let (xt, tt) = lift_point::<T>(tau, x);
        self.constants
            .iter()
            .map(|r| r.iter().map(|c| c.iter().map(|j| super::lower(j.eval(&xt, tt))).collect()).collect())
            .collect()
    }
}

fn lift_point<T: Scalar>(tau: C64, x: &[C64]) -> (Vec<Complex<T>>, Complex<T>) {
    (x.iter().map(|z| lift(*z)).collect(), lift(tau))
}

/// Worst residual of each axiom over the sample points (τ, x).
#[derive(Debug, Clone, Default)]
pub struct FrobeniusReport {
    /// |g_{αβ} − δ_{α+β,n}/s|, exact.
    pub metric: f64,
    pub metric_constancy: f64,
    /// |s·C_{nβ}^γ − δ_{βγ}| and the same for C_{βn}^γ from the general formula.
    pub unit_row: f64,
    pub commutativity: f64,
    pub associativity: f64,
    /// Total symmetry of c_{αβγ}.
    pub symmetry: f64,
    /// ∂_ρ c_{αβγ} = ∂_α c_{ρβγ}.
    pub potentiality: f64,
    /// Coefficients of C_{αβ}^γ off the weight d_n + d_γ − d_α − d_β.
    pub euler: f64,
    /// g(E_norm, g*(dx^α)∘g*(dx^β)) = cĨ(dx^α, dx^β).
    pub recovery: f64,
    /// g^{αβ} = Lie_e(cĨ)(dx^α, dx^β).
    pub lie_metric: f64,
    pub points: usize,
}

impl FrobeniusReport {
    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("metric", self.metric),
            ("metric_constancy", self.metric_constancy),
            ("unit_row", self.unit_row),
            ("commutativity", self.commutativity),
            ("associativity", self.associativity),
            ("symmetry", self.symmetry),
            ("potentiality", self.potentiality),
            ("euler", self.euler),
            ("recovery", self.recovery),
            ("lie_metric", self.lie_metric),
        ]
    }

    pub fn worst(&self) -> f64 {
        self.entries().into_iter().map(|e| e.1).fold(0.0, f64::max)
    }
}

struct Points<T: Scalar> {
    pts: Vec<(Vec<Complex<T>>, Complex<T>)>,
}

impl<T: Scalar> Points<T> {
    /// max_p |diff(p)| / max(1, Σ|term(p)|).
    fn residual(&self, diff: &QJet<T>, terms: &[&QJet<T>]) -> f64 {
        self.pts
            .iter()
            .map(|(x, t)| {
                let d = super::lower(diff.eval(x, *t)).norm();
                let s: f64 = terms.iter().map(|j| super::lower(j.eval(x, *t)).norm()).sum();
                d / s.max(1.0)
            })
            .fold(0.0, f64::max)
    }
}

pub fn verify_frobenius<T: Scalar>(table: &FrobeniusTable<T>, samples: &[(C64, Vec<C64>)]) -> FrobeniusReport {
    let n = table.n();
    let pts = Points { pts: samples.iter().map(|(t, x)| lift_point::<T>(*t, x)).collect() };
    let c = &table.constants;
    let s = &table.unit_scale;
    let mut r = FrobeniusReport { points: samples.len(), metric_constancy: table.metric_constancy, ..Default::default() };
    let idx: Vec<usize> = (0..=n).collect();

    for a in 0..=n {
        for b in 0..=n {
            let want = if a + b == n { s.recip() } else { Rational::zero() };
            r.metric = r.metric.max(rational_to_f64(&(table.metric.get(a, b) - &want)).abs());
        }
    }

    let inv_s = Complex::new(rational_in::<T>(&s.recip()), T::zero());
    for b in 0..=n {
        for g in 0..=n {
            let want = table.constant(if b == g { inv_s } else { Complex::zero() });
            for j in [&c[n][b][g], &c[b][n][g]] {
                r.unit_row = r.unit_row.max(pts.residual(&j.sub_ref(&want), &[j]));
            }
        }
    }

    r.commutativity = idx
        .par_iter()
        .map(|&a| {
            let mut w = 0.0f64;
            for b in 0..=n {
                for g in 0..=n {
                    w = w.max(pts.residual(&c[a][b][g].sub_ref(&c[b][a][g]), &[&c[a][b][g], &c[b][a][g]]));
                }
            }
            w
        })
        .reduce(|| 0.0, f64::max);

    // (∂_α∘∂_β)∘∂_γ = ∂_α∘(∂_β∘∂_γ), component ρ.
    r.associativity = idx
        .par_iter()
        .map(|&a| {
            let mut w = 0.0f64;
            for b in 0..=n {
                for g in 0..=n {
                    for rho in 0..=n {
                        let left: Vec<QJet<T>> = (0..=n).map(|sg| c[a][b][sg].mul_ref(&c[sg][g][rho])).collect();
                        let right: Vec<QJet<T>> = (0..=n).map(|sg| c[b][g][sg].mul_ref(&c[a][sg][rho])).collect();
                        let diff = left.iter().fold(table.zero(), |acc, j| acc.add_ref(j));
                        let diff = right.iter().fold(diff, |acc, j| acc.sub_ref(j));
                        let terms: Vec<&QJet<T>> = left.iter().chain(&right).collect();
                        w = w.max(pts.residual(&diff, &terms));
                    }
                }
            }
            w
        })
        .reduce(|| 0.0, f64::max);

    let lowered: Vec<Vec<Vec<QJet<T>>>> =
        idx.par_iter().map(|&a| (0..=n).map(|b| (0..=n).map(|g| table.lowered(a, b, g)).collect()).collect()).collect();
    let mut sym = 0.0f64;
    for a in 0..=n {
        for b in 0..=n {
            for g in 0..=n {
                let x = &lowered[a][b][g];
                for y in [&lowered[b][a][g], &lowered[a][g][b]] {
                    sym = sym.max(pts.residual(&x.sub_ref(y), &[x, y]));
                }
            }
        }
    }
    r.symmetry = sym;

    r.potentiality = idx
        .par_iter()
        .map(|&rho| {
            let mut w = 0.0f64;
            for a in 0..=n {
                for b in 0..=n {
                    for g in 0..=n {
                        let x = table.partial(&lowered[a][b][g], rho);
                        let y = table.partial(&lowered[rho][b][g], a);
                        w = w.max(pts.residual(&x.sub_ref(&y), &[&x, &y]));
                    }
                }
            }
            w
        })
        .reduce(|| 0.0, f64::max);

    let weights = table.degrees[1..].to_vec();
    let mut eu = 0.0f64;
    for a in 0..=n {
        for b in 0..=n {
            for g in 0..=n {
                let j = &c[a][b][g];
                let want = table.d_n as i64 + table.degrees[g] as i64 - table.degrees[a] as i64 - table.degrees[b] as i64;
                let scale = j.max_abs().to_f64().unwrap().max(1.0);
                for (m, s) in j.terms() {
                    if crate::series::weight_of(&weights, m) as i64 != want {
                        eu = eu.max(s.max_abs().to_f64().unwrap() / scale);
                    }
                }
            }
        }
    }
    r.euler = eu;

    // Σ_{σ,γ} (d_σ/d_n)·x^σ·g_{σγ}·Σ_{α',β'} g^{αα'} g^{ββ'} C_{α'β'}^γ.
    let rat = |q: &Rational| Complex::new(rational_in::<T>(q), T::zero());
    let euler_form: Vec<QJet<T>> = (0..=n)
        .map(|g| {
            (1..=n).fold(table.zero(), |acc, sg| {
                let m = table.metric.get(sg, g);
                if m.is_zero() {
                    return acc;
                }
                let k = m * Rational::new(table.degrees[sg].into(), table.d_n.into());
                acc.add_ref(&table.coordinate(sg).scale(rat(&k)))
            })
        })
        .collect();
    let pairs: Vec<(usize, usize)> = (0..=n).flat_map(|a| (0..=n).map(move |b| (a, b))).collect();
    r.recovery = pairs
        .par_iter()
        .map(|&(a, b)| {
            let mut acc = table.zero();
            for a1 in 0..=n {
                let u = table.metric_upper.get(a, a1);
                if u.is_zero() {
                    continue;
                }
                for b1 in 0..=n {
                    let v = table.metric_upper.get(b, b1);
                    if v.is_zero() {
                        continue;
                    }
                    for g in 0..=n {
                        let t = c[a1][b1][g].mul_ref(&euler_form[g]).scale(rat(&(u * v)));
                        acc = acc.add_ref(&t);
                    }
                }
            }
            let want = &table.intersection[a][b];
            pts.residual(&acc.sub_ref(want), &[&acc, want])
        })
        .reduce(|| 0.0, f64::max);

    let mut lie = 0.0f64;
    for a in 0..=n {
        for b in 0..=n {
            let l = table.partial(&table.intersection[a][b], n).scale(rat(s));
            let g = table.constant(rat(table.metric_upper.get(a, b)));
            lie = lie.max(pts.residual(&l.sub_ref(&g), &[&l, &g]));
        }
    }
    r.lie_metric = lie;
    r
}

/// Rebuilds the table with unit field s·∂/∂x^n and returns the largest deviation from
/// (C/s, s·e, g/s), together with the axiom report of the rebuilt table.
pub fn scaling_covariance<T: Scalar>(
    table: &FrobeniusTable<T>,
    s: &Rational,
    samples: &[(C64, Vec<C64>)],
) -> Result<(f64, FrobeniusReport), FrobeniusError> {
    let scaled = table.rescaled(&(s * &table.unit_scale))?;
    let n = table.n();
    let inv = Complex::new(rational_in::<T>(&s.recip()), T::zero());
    let mut worst = 0.0f64;
    for a in 0..=n {
        for b in 0..=n {
            let want = table.metric.get(a, b) / s;
            worst = worst.max(rational_to_f64(&(scaled.metric.get(a, b) - &want)).abs());
            for g in 0..=n {
                let x = &scaled.constants[a][b][g];
                let y = table.constants[a][b][g].scale(inv);
                let scale = y.max_abs().to_f64().unwrap().max(1.0);
                worst = worst.max(x.sub_ref(&y).max_abs().to_f64().unwrap() / scale);
            }
        }
    }
    // e' = s·e: the unit row of the rebuilt table is δ/(s·s0).
    let e_ratio = rational_to_f64(&(&scaled.unit_scale / &table.unit_scale)) - rational_to_f64(s);
    worst = worst.max(e_ratio.abs());
    let report = verify_frobenius(&scaled, samples);
    Ok((worst, report))
}
