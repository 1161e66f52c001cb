//! The Frobenius structure of a codimension-one system, read off from the Taylor
//! coefficients of good basic invariants.
//!
//! Indices run over 0..n with x^0 = τ (so ∂_0 = ∂/∂τ on q-series coefficients) and
//! α* = n − α. The dual-normalized chart has Ĩ(z^α, z^β) = δ_{α+β,n}.

mod flat;
mod table;

pub use flat::{flatness_equivalences, perturb_product, perturb_scaled, FlatnessReport};
pub use table::{
    metric_and_constants, metric_and_constants_from, metric_and_constants_scaled, scaling_covariance, verify_frobenius, FrobeniusReport, FrobeniusTable,
};

use crate::invariants::{expand_many, BasicInvariantSet, Expansion, InvariantContext, InvariantError};
use crate::series::{minus_two_pi_i, monomials_of_weight, QJet, QSeries, Scalar, EXACT};
use crate::C64;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use thiserror::Error;

/// An invariant written in the basic invariants; the coefficients A_a (terms x^a·x^n) and
/// B_b (terms with b_n = 0) are the entries of `coeffs`.
pub type InvariantExpansion<T> = Expansion<T>;

#[derive(Debug, Error)]
pub enum FrobeniusError {
    #[error("the construction needs codimension one, got degrees {0:?}")]
    Codimension(Vec<u32>),
    #[error("degrees {0:?} violate d_α + d_(n−α) = d_n")]
    NotDual(Vec<u32>),
    #[error("g^({alpha},{beta}) is not constant (residual {residual:e})")]
    NonConstantMetric { alpha: usize, beta: usize, residual: f64 },
    #[error("g^({alpha},{beta}) = {value} is not an integer")]
    NonIntegralMetric { alpha: usize, beta: usize, value: C64 },
    #[error("degenerate structure-constant denominator at ({0}, {1})")]
    DegenerateDenominator(usize, usize),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
}

/// d_α for α = 0..n, with d_0 = 0.
pub fn extended_degrees<T: Scalar>(xs: &BasicInvariantSet<T>) -> Vec<u32> {
    std::iter::once(0).chain(xs.degrees.iter().copied()).collect()
}

/// Codimension one and dual degrees, asserted before any Frobenius computation.
pub fn check_duality<T: Scalar>(xs: &BasicInvariantSet<T>) -> Result<(), FrobeniusError> {
    let d = extended_degrees(xs);
    let n = xs.n();
    let d_n = d[n];
    if d.iter().filter(|&&x| x == d_n).count() != 1 {
        return Err(FrobeniusError::Codimension(xs.degrees.clone()));
    }
    if (0..=n).any(|a| d[a] + d[n - a] != d_n) {
        return Err(FrobeniusError::NotDual(xs.degrees.clone()));
    }
    Ok(())
}

fn den_of<T: Scalar>(xs: &BasicInvariantSet<T>) -> u32 {
    xs.jets[0].den()
}

/// (∂_0 x^α, ∂_1 x^α, …, ∂_n x^α) as jets truncated at weight `w`; x^0 = τ.
pub(crate) fn gradient<T: Scalar>(xs: &BasicInvariantSet<T>, alpha: usize, w: u32) -> Vec<QJet<T>> {
    let n = xs.n();
    let den = den_of(xs);
    if alpha == 0 {
        let mut g = vec![QJet::zero(xs.degrees.clone(), w, den); n + 1];
        g[0] = QJet::constant(xs.degrees.clone(), w, QSeries::one(den));
        return g;
    }
    let j = &xs.jets[alpha - 1];
    let mut g = vec![j.d_tau().truncate_weight(w)];
    g.extend((0..n).map(|b| j.deriv(b).truncate_weight(w)));
    g
}

/// Ĩ(dx^α, dx^β) = Σ_γ ∂_γ x^α · ∂_{γ*} x^β as a jet of weight d_α + d_β.
pub fn intersection_form<T: Scalar>(xs: &BasicInvariantSet<T>, alpha: usize, beta: usize) -> QJet<T> {
    let d = extended_degrees(xs);
    let n = xs.n();
    let w = d[alpha] + d[beta];
    let ga = gradient(xs, alpha, w);
    let gb = if alpha == beta { ga.clone() } else { gradient(xs, beta, w) };
    (0..=n).fold(QJet::zero(xs.degrees.clone(), w, den_of(xs)), |acc, g| acc.add_ref(&ga[g].mul_ref(&gb[n - g])))
}

/// expand(f) for an invariant of degree m ≤ 2d_n given by its jet.
pub fn expand<T: Scalar>(f: &QJet<T>, m: u32, xs: &BasicInvariantSet<T>) -> Result<InvariantExpansion<T>, FrobeniusError> {
    Ok(expand_many(xs, std::slice::from_ref(f), m)?.pop().unwrap())
}

/// expand(Ĩ(dx^α, dx^β)) for all 0 ≤ α, β ≤ n (a symmetric table).
pub fn intersection_expansions<T: Scalar>(xs: &BasicInvariantSet<T>) -> Result<Vec<Vec<InvariantExpansion<T>>>, FrobeniusError> {
    let n = xs.n();
    let d = extended_degrees(xs);
    let den = den_of(xs);
    let pairs: Vec<(usize, usize)> = (0..=n).flat_map(|a| (a..=n).map(move |b| (a, b))).collect();
    let forms: Vec<QJet<T>> = pairs.par_iter().map(|&(a, b)| intersection_form(xs, a, b)).collect();
    let mut out: Vec<Vec<Option<InvariantExpansion<T>>>> = vec![vec![None; n + 1]; n + 1];
    let mut weights: Vec<u32> = pairs.iter().map(|&(a, b)| d[a] + d[b]).collect();
    weights.sort_unstable();
    weights.dedup();
    for m in weights {
        let idx: Vec<usize> = (0..pairs.len()).filter(|&i| d[pairs[i].0] + d[pairs[i].1] == m).collect();
        let exps = if m == 0 {
            idx.iter().map(|_| Expansion { degree: 0, coeffs: QJet::zero(xs.degrees.clone(), 0, den), lower_residual: 0.0 }).collect()
        } else {
            let fs: Vec<QJet<T>> = idx.iter().map(|&i| forms[i].clone()).collect();
            expand_many(xs, &fs, m)?
        };
        for (&i, e) in idx.iter().zip(exps) {
            let (a, b) = pairs[i];
            out[b][a] = Some(e.clone());
            out[a][b] = Some(e);
        }
    }
    Ok(out.into_iter().map(|r| r.into_iter().map(Option::unwrap).collect()).collect())
}

/// The closed form of expand(Ĩ(dx^α, dx^β)) in good invariants:
/// δ_{α+β,n}·(d_n/(−2π√−1))·x^n + Σ_{b_n = 0} (1/b!)∂^b(∂x^α/∂z^{β*} + ∂x^β/∂z^{α*})|_{L^⊥}·x^b.
pub fn intersection_taylor_formula<T: Scalar>(xs: &BasicInvariantSet<T>, alpha: usize, beta: usize) -> InvariantExpansion<T> {
    let n = xs.n();
    let d = extended_degrees(xs);
    let den = den_of(xs);
    let m = d[alpha] + d[beta];
    let mut coeffs = QJet::zero(xs.degrees.clone(), m, den);
    if alpha + beta == n {
        let a = Complex::new(T::from(d[n]).unwrap(), T::zero()) * crate::exactcore::crecip(minus_two_pi_i::<T>());
        let mut b = vec![0; n];
        b[n - 1] = 1;
        coeffs.insert(b, QSeries::constant(a, den, EXACT));
    }
    let src = gradient(xs, alpha, m)[n - beta].add_ref(&gradient(xs, beta, m)[n - alpha]);
    for b in monomials_of_weight(&xs.degrees, m) {
        if b[n - 1] != 0 {
            continue;
        }
        if let Some(c) = src.coeff(&b) {
            coeffs.insert(b, c.clone());
        }
    }
    Expansion { degree: m, coeffs, lower_residual: 0.0 }
}

/// Worst coefficientwise relative difference between two expansions of the same degree.
pub fn expansion_distance<T: Scalar>(a: &InvariantExpansion<T>, b: &InvariantExpansion<T>) -> f64 {
    let scale = a.coeffs.max_abs().max(b.coeffs.max_abs()).to_f64().unwrap();
    if scale == 0.0 {
        return 0.0;
    }
    let diff = a.coeffs.sub_ref(&b.coeffs).max_abs().to_f64().unwrap();
    diff / scale.max(1e-300)
}

/// The main identity over all pairs: the worst relative gap between expand(Ĩ(dx^α, dx^β))
/// and its closed form, with the per-pair table.
#[derive(Debug, Clone)]
pub struct MainIdentityReport {
    pub worst: f64,
    pub pairs: Vec<(usize, usize, f64)>,
    /// Largest lower-weight remainder of the direct expansions.
    pub fit_residual: f64,
}

pub fn main_identity<T: Scalar>(xs: &BasicInvariantSet<T>) -> Result<MainIdentityReport, FrobeniusError> {
    check_duality(xs)?;
    let exps = intersection_expansions(xs)?;
    Ok(main_identity_with(xs, &exps))
}

/// As [`main_identity`], reusing expansions from [`intersection_expansions`].
pub fn main_identity_with<T: Scalar>(xs: &BasicInvariantSet<T>, exps: &[Vec<InvariantExpansion<T>>]) -> MainIdentityReport {
    let n = xs.n();
    let mut pairs = Vec::new();
    let mut fit = 0.0f64;
    for a in 0..=n {
        for b in a..=n {
            let closed = intersection_taylor_formula(xs, a, b);
            pairs.push((a, b, expansion_distance(&exps[a][b], &closed)));
            fit = fit.max(exps[a][b].lower_residual);
        }
    }
    let worst = pairs.iter().map(|p| p.2).fold(0.0, f64::max);
    MainIdentityReport { worst, pairs, fit_residual: fit }
}

/// Random points (τ, x^1..x^n) of the x-chart with |q| ≤ q_max and |x^α| ≤ x_max.
pub fn sample_x_points(n: usize, count: usize, seed: u64, q_max: f64, x_max: f64) -> Vec<(C64, Vec<C64>)> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let im_min = -q_max.ln() / std::f64::consts::TAU;
    (0..count)
        .map(|_| {
            let tau = C64::new(rng.gen_range(-0.5..0.5), im_min + rng.gen_range(0.0..0.3));
            let x = (0..n)
                .map(|_| C64::from_polar(x_max * rng.gen_range(0.0f64..1.0).sqrt(), rng.gen_range(0.0..std::f64::consts::TAU)))
                .collect();
            (tau, x)
        })
        .collect()
}

/// Pointwise oracle for the expansions: |Ĩ(dx^α,dx^β) − Σ P_b x^b| / max(1, |Ĩ|) at points
/// (τ, z) of Y, with Ĩ from the gradients of the orbit sums and x from direct evaluation.
pub fn expansion_fit_at_points<T: Scalar>(
    ctx: &InvariantContext,
    xs: &BasicInvariantSet<T>,
    exps: &[Vec<InvariantExpansion<T>>],
    points: &[(C64, Vec<C64>)],
) -> f64 {
    let n = xs.n();
    points
        .par_iter()
        .map(|(tau, z)| {
            let pv = xs.point_values(ctx, *tau, z);
            let x: Vec<C64> = pv.iter().map(|p| p.value).collect();
            let grad = |a: usize| -> Vec<C64> {
                if a == 0 {
                    let mut g = vec![C64::new(0.0, 0.0); n + 1];
                    g[0] = C64::new(1.0, 0.0);
                    g
                } else {
                    pv[a - 1].grad.clone()
                }
            };
            let mut worst = 0.0f64;
            for a in 0..=n {
                let ga = grad(a);
                for b in a..=n {
                    let gb = grad(b);
                    let direct: C64 = (0..=n).map(|g| ga[g] * gb[n - g]).sum();
                    let fit = exps[a][b].eval(*tau, &x);
                    worst = worst.max((direct - fit).norm() / direct.norm().max(1.0));
                }
            }
            worst
        })
        .reduce(|| 0.0, f64::max)
}

/// Complex<T> from a sample coordinate.
pub(crate) fn lift<T: Scalar>(z: C64) -> Complex<T> {
    Complex::new(T::from(z.re).unwrap(), T::from(z.im).unwrap())
}

pub(crate) fn lower<T: Scalar>(z: Complex<T>) -> C64 {
    C64::new(z.re.to_f64().unwrap(), z.im.to_f64().unwrap())
}

#[cfg(test)]
mod tests;
