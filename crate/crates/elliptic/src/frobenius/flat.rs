use super::{intersection_form, FrobeniusError};
use crate::invariants::{expand_in, BasicInvariantSet};
use crate::series::{monomials_of_weight, QJet, QSeries, Scalar, EXACT};
use num_complex::Complex;

/// The four flatness conditions for a basic set x', each as a residual:
/// (i) ∂/∂x'^n ∈ V = ℂ·∂/∂x^n (x good), (ii) (∂/∂x'^n)² Ĩ(dx'^n, dx'^n) = 0,
/// (iii) Ĩ(dx'^n, dx'^n)|_{L^⊥} = 0, (iv) x'^n|_{L^⊥} constant.
#[derive(Debug, Clone)]
pub struct FlatnessReport {
    pub unit_in_v: f64,
    pub second_derivative: f64,
    pub form_on_lperp: f64,
    pub restriction_constant: f64,
    pub holds: [bool; 4],
    pub agree: bool,
    /// For good sets: |Gram(ψ(x^α), ψ(x^β)) − δ_{α+β,n}| over 0 ≤ α, β ≤ n.
    pub isometry: Option<f64>,
}

/// Non-constant part of a q-series relative to its constant term.
fn non_constant<T: Scalar>(s: &QSeries<T>) -> f64 {
    let c = s.coeff(0);
    let rest = s.sub_ref(&QSeries::constant(c, s.den(), EXACT));
    rest.max_abs().to_f64().unwrap() / c.norm().to_f64().unwrap().max(1e-300)
}

/// Checks the four conditions for `xs` against the good set `good`, with `tol` deciding
/// which hold.
pub fn flatness_equivalences<T: Scalar>(
    xs: &BasicInvariantSet<T>,
    good: &BasicInvariantSet<T>,
    tol: f64,
) -> Result<FlatnessReport, FrobeniusError> {
    let n = xs.n();
    let d_n = xs.d_n();
    let mut en = vec![0; n];
    en[n - 1] = 1;
    let zero = vec![0; n];

    // (i) x^n = k(τ)·x'^n + (lower products): ∂/∂x'^n = k·∂/∂x^n.
    let e = expand_in(xs, &good.jets[n - 1], d_n)?;
    let unit_in_v = non_constant(&e.coeff(&en));

    let form = intersection_form(xs, n, n);
    let e2 = expand_in(xs, &form, 2 * d_n)?;
    let second_derivative = e2.coeff(&en.iter().map(|k| 2 * k).collect::<Vec<_>>()).max_abs().to_f64().unwrap();

    let top = xs.restrictions()[n - 1].clone();
    let cn = top.coeff(0).norm().to_f64().unwrap().max(1e-300);
    let form_on_lperp = form.coeff_or_zero(&zero, EXACT).max_abs().to_f64().unwrap() / (cn * cn);
    let restriction_constant = non_constant(&top);

    let vals = [unit_in_v, second_derivative, form_on_lperp, restriction_constant];
    let holds = vals.map(|v| v < tol);
    let agree = holds.iter().all(|&h| h == holds[0]);
    let isometry = if xs.good { Some(isometry_residual(xs)) } else { None };
    Ok(FlatnessReport { unit_in_v, second_derivative, form_on_lperp, restriction_constant, holds, agree, isometry })
}

/// Gram of the linear parts of ψ(x^0) = z^0, ψ(x^1), …, ψ(x^n) under the anti-diagonal
/// form, against δ_{α+β,n}.
fn isometry_residual<T: Scalar>(xs: &BasicInvariantSet<T>) -> f64 {
    let n = xs.n();
    let den = xs.jets[0].den();
    // lin[α][γ] = coefficient of z^γ in ψ(x^α), γ = 0..n.
    let mut lin: Vec<Vec<QSeries<T>>> = vec![vec![QSeries::zero(den, EXACT); n + 1]; n + 1];
    lin[0][0] = QSeries::one(den);
    for a in 1..=n {
        let psi = xs.psi(&unit(n, a - 1));
        for g in 1..=n {
            lin[a][g] = psi.coeff_or_zero(&unit(n, g - 1), EXACT);
        }
    }
    let mut worst = 0.0f64;
    for a in 0..=n {
        for b in 0..=n {
            let gram = (0..=n).fold(QSeries::zero(den, EXACT), |acc, g| acc.add_ref(&lin[a][g].mul_ref(&lin[b][n - g])));
            let want = if a + b == n { QSeries::one(den) } else { QSeries::zero(den, EXACT) };
            worst = worst.max(gram.sub_ref(&want).max_abs().to_f64().unwrap());
        }
    }
    worst
}

fn unit(n: usize, i: usize) -> Vec<u32> {
    let mut b = vec![0; n];
    b[i] = 1;
    b
}

/// x'^n = (1 + q)·x^n, the others unchanged: x'^n|_{L^⊥} is no longer constant.
pub fn perturb_scaled<T: Scalar>(xs: &BasicInvariantSet<T>) -> BasicInvariantSet<T> {
    let n = xs.n();
    let den = xs.jets[0].den();
    let one = Complex::new(T::one(), T::zero());
    let f = QSeries::from_terms(den, EXACT, [(0, one), (den as i64, one)]);
    let mut combos = identity_combos(xs);
    combos[n - 1] = combos[n - 1].scale_series(&f);
    xs.recombine(&combos)
}

/// x'^n = x^n + q·x^b for the first product x^b of lower invariants of degree d_n. Such a
/// term vanishes on L^⊥ to second order, so all four conditions keep holding.
pub fn perturb_product<T: Scalar>(xs: &BasicInvariantSet<T>) -> BasicInvariantSet<T> {
    let n = xs.n();
    let den = xs.jets[0].den();
    let mut combos = identity_combos(xs);
    if let Some(b) = monomials_of_weight(&xs.degrees, xs.d_n()).into_iter().find(|b| b[n - 1] == 0) {
        let q = QSeries::monomial(Complex::new(T::one(), T::zero()), den as i64, den, EXACT);
        let mut p = QJet::zero(xs.degrees.clone(), xs.d_n(), den);
        p.insert(b, q);
        combos[n - 1] = combos[n - 1].add_ref(&p);
    }
    xs.recombine(&combos)
}

fn identity_combos<T: Scalar>(xs: &BasicInvariantSet<T>) -> Vec<QJet<T>> {
    let den = xs.jets[0].den();
    (0..xs.n()).map(|a| QJet::variable(xs.degrees.clone(), xs.d_n(), den, a)).collect()
}
