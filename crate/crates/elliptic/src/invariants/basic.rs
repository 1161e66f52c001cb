use super::{InvariantContext, InvariantError, ThetaInvariant};
use crate::series::{qdet, qsolve, weight_of, MultiIndex, QJet, QSeries, Scalar, SeriesMatrix, EXACT};
use crate::C64;
use num_complex::Complex;
use rayon::prelude::*;

/// Generic point of the upper half plane used for rank decisions over F(H).
const GENERIC_TAU: (f64, f64) = (0.123, 0.9);
const RANK_TOL: f64 = 1e-8;

/// Working tolerance for series elimination: ε^{3/4} of the scalar type.
pub fn solve_tol<T: Scalar>() -> T {
    T::roundoff().powf(T::from(0.75).unwrap())
}

fn to_c64<T: Scalar>(z: Complex<T>) -> C64 {
    C64::new(z.re.to_f64().unwrap(), z.im.to_f64().unwrap())
}

fn from_c64<T: Scalar>(z: C64) -> Complex<T> {
    Complex::new(T::from(z.re).unwrap(), T::from(z.im).unwrap())
}

/// Rank of a family of complex vectors, by elimination with a threshold relative to the
/// largest entry.
pub(crate) fn complex_rank(rows: &[Vec<C64>]) -> usize {
    let mut a: Vec<Vec<C64>> = rows.to_vec();
    let scale = a.iter().flatten().fold(0.0f64, |m, z| m.max(z.norm()));
    if scale == 0.0 {
        return 0;
    }
    let cols = a.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..a.len()).max_by(|&i, &j| a[i][c].norm().total_cmp(&a[j][c].norm())) else {
            break;
        };
        if a[p][c].norm() <= RANK_TOL * scale {
            continue;
        }
        a.swap(rank, p);
        let piv = a[rank][c];
        for i in rank + 1..a.len() {
            let f = a[i][c] / piv;
            if f == C64::new(0.0, 0.0) {
                continue;
            }
            for j in c..cols {
                let v = a[rank][j];
                a[i][j] -= f * v;
            }
        }
        rank += 1;
    }
    rank
}

/// Value of the polynomial `poly` (in variables with the given jets as values).
pub fn substitute<T: Scalar>(poly: &QJet<T>, vals: &[QJet<T>]) -> QJet<T> {
    let first = &vals[0];
    let mut out = QJet::zero(first.weights().to_vec(), vals.iter().map(|v| v.max_weight()).min().unwrap(), first.den());
    let mut cache: Vec<Vec<QJet<T>>> = vals.iter().map(|v| vec![QJet::constant(v.weights().to_vec(), v.max_weight(), QSeries::one(v.den()))]).collect();
    for (b, c) in poly.terms() {
        let mut term = QJet::constant(first.weights().to_vec(), out.max_weight(), c.clone());
        for (g, &k) in b.iter().enumerate() {
            while cache[g].len() <= k as usize {
                let next = cache[g].last().unwrap().mul_ref(&vals[g]);
                cache[g].push(next);
            }
            if k > 0 {
                term = term.mul_ref(&cache[g][k as usize]);
            }
        }
        out = out.add_ref(&term);
    }
    out
}

/// Value and gradient (∂_0 = ∂/∂τ, ∂_1, …, ∂_n) of one invariant at a point of the chart.
#[derive(Debug, Clone)]
pub struct PointValue {
    pub value: C64,
    pub grad: Vec<C64>,
}

/// Basic invariants x^1..x^n, each a polynomial (with q-series coefficients) in selected
/// orbit sums θ_1..θ_n, where θ_α has degree d_α.
#[derive(Debug, Clone)]
pub struct BasicInvariantSet<T: Scalar> {
    pub degrees: Vec<u32>,
    pub thetas: Vec<ThetaInvariant>,
    pub theta_jets: Vec<QJet<T>>,
    /// x^α as a polynomial in θ (variables weighted by the degrees).
    pub combos: Vec<QJet<T>>,
    /// Taylor jets of x^α around L^⊥.
    pub jets: Vec<QJet<T>>,
    pub good: bool,
    pub compatible: bool,
}

/// Worst residual of each defining property of a good compatible set.
#[derive(Debug, Clone, Default)]
pub struct GoodnessReport {
    /// |(1/a!)∂^a x^α|_{L^⊥}| for d·a = d_α, |a| ≥ 2.
    pub goodness: f64,
    /// |(∂x^α/∂z^β)|_{L^⊥} − δ_αβ|.
    pub compatibility: f64,
    /// |(1/b!)∂^b[x − x|]^a|_{L^⊥} − δ_ab| for d·a = d·b up to the checked degree.
    pub delta_property: f64,
    pub delta_degree: u32,
    /// |∂/∂z^0 of (1/a!)∂^a x^α|_{L^⊥}| for d·a = d_α.
    pub z0_property: f64,
    /// |x^n|_{L^⊥} + 2π√−1/d_n| / |2π/d_n|; None outside codimension one.
    pub top_restriction: Option<f64>,
    /// The Jacobian determinant at L^⊥ has a nonzero leading coefficient.
    pub jacobian_unit: bool,
}

impl GoodnessReport {
    pub fn worst(&self) -> f64 {
        [self.goodness, self.compatibility, self.delta_property, self.z0_property, self.top_restriction.unwrap_or(0.0)]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// f ∈ S^W_m written as Σ_{d·b = m} P_b(τ) x^b in a basic set.
#[derive(Debug, Clone)]
pub struct Expansion<T: Scalar> {
    pub degree: u32,
    /// Polynomial in x^1..x^n (weights d) with q-series coefficients.
    pub coeffs: QJet<T>,
    /// Largest coefficient of lower weighted degree left after converting back from the
    /// recentred variables (zero for an exact solve).
    pub lower_residual: f64,
}

impl<T: Scalar> Expansion<T> {
    pub fn coeff(&self, b: &[u32]) -> QSeries<T> {
        self.coeffs.coeff_or_zero(b, EXACT)
    }

    /// Σ P_b(τ) x^b at given values of x^1..x^n.
    pub fn eval(&self, tau: C64, x: &[C64]) -> C64 {
        self.coeffs.terms().fold(C64::new(0.0, 0.0), |acc, (b, s)| {
            let mut m = to_c64(s.eval_tau(from_c64(tau)));
            for (xi, &k) in x.iter().zip(b) {
                m *= xi.powu(k);
            }
            acc + m
        })
    }
}

fn unit_vec(n: usize, i: usize) -> MultiIndex {
    let mut b = vec![0; n];
    b[i] = 1;
    b
}

impl<T: Scalar> BasicInvariantSet<T> {
    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    pub fn d_n(&self) -> u32 {
        *self.degrees.last().unwrap()
    }

    fn jet_den(&self) -> u32 {
        self.jets[0].den()
    }

    /// x^α|_{L^⊥}.
    pub fn restrictions(&self) -> Vec<QSeries<T>> {
        let zero = vec![0; self.n()];
        self.jets.iter().map(|j| j.coeff_or_zero(&zero, EXACT)).collect()
    }

    /// Greedy choice of orbit sums: at each degree take alcove-weight orbit sums whose ψ
    /// images extend the span of ψ-images of products of the generators already chosen.
    pub fn select(ctx: &InvariantContext) -> Result<Self, InvariantError> {
        let degrees = ctx.degrees().to_vec();
        let n = degrees.len();
        let tau0 = C64::new(GENERIC_TAU.0, GENERIC_TAU.1);
        let mut thetas: Vec<ThetaInvariant> = Vec::with_capacity(n);
        let mut jets: Vec<QJet<T>> = Vec::with_capacity(n);
        let mut chosen_deg: Vec<u32> = Vec::with_capacity(n);
        let mut start = 0;
        while start < n {
            let m = degrees[start];
            let need = degrees[start..].iter().take_while(|&&d| d == m).count();
            let zmon = ctx.monomials(m);
            let sample = |j: &QJet<T>| -> Vec<C64> {
                zmon.iter().map(|b| j.coeff(b).map_or(C64::new(0.0, 0.0), |s| to_c64(s.eval_tau(from_c64(tau0))))).collect()
            };
            // ψ-images of the products of lower generators.
            let mut rows: Vec<Vec<C64>> = Vec::new();
            let consts: Vec<QSeries<T>> = jets.iter().map(|j: &QJet<T>| j.coeff_or_zero(&vec![0; n], EXACT)).collect();
            for a in crate::series::monomials_of_weight(&chosen_deg, m) {
                let mut p = QJet::constant(degrees.clone(), ctx.jet_bound, QSeries::one(ctx.den));
                for (g, &k) in a.iter().enumerate() {
                    let y = jets[g].sub_ref(&QJet::constant(degrees.clone(), ctx.jet_bound, consts[g].clone()));
                    for _ in 0..k {
                        p = p.mul_ref(&y);
                    }
                }
                rows.push(sample(&p.piece(m)));
            }
            let mut rank = complex_rank(&rows);
            let mut got = 0;
            for k in ctx.alcove_weights(m) {
                if got == need {
                    break;
                }
                let th = ThetaInvariant::orbit(ctx, &k, m)?;
                let j: QJet<T> = th.taylor_jet(ctx);
                rows.push(sample(&j.piece(m)));
                let r = complex_rank(&rows);
                if r > rank {
                    rank = r;
                    got += 1;
                    thetas.push(th);
                    jets.push(j);
                    chosen_deg.push(m);
                } else {
                    rows.pop();
                }
            }
            if got < need {
                return Err(InvariantError::RankDeficient { degree: m, needed: need });
            }
            start += need;
        }
        let combos = (0..n).map(|a| QJet::variable(degrees.clone(), *degrees.last().unwrap(), ctx.den, a)).collect();
        Ok(BasicInvariantSet { degrees, thetas, theta_jets: jets.clone(), combos, jets, good: false, compatible: false })
    }

    /// A new set with x'^α = combos[α](x), where `combos` are polynomials in the current
    /// x^1..x^n.
    pub fn recombine(&self, combos: &[QJet<T>]) -> Self {
        let new_combos: Vec<QJet<T>> = combos.iter().map(|c| substitute(c, &self.combos)).collect();
        let jets = new_combos.iter().map(|c| substitute(c, &self.theta_jets)).collect();
        BasicInvariantSet {
            degrees: self.degrees.clone(),
            thetas: self.thetas.clone(),
            theta_jets: self.theta_jets.clone(),
            combos: new_combos,
            jets,
            good: false,
            compatible: false,
        }
    }

    /// φ(x^a) = Σ_b (1/b!)∂^b[x − x|_{L^⊥}]^a|_{L^⊥} z^b.
    pub fn phi(&self, a: &[u32]) -> QJet<T> {
        let n = self.n();
        let w = self.jets[0].weights().to_vec();
        let mw = self.jets[0].max_weight();
        let consts = self.restrictions();
        let mut p = QJet::constant(w.clone(), mw, QSeries::one(self.jet_den()));
        for (g, &k) in a.iter().enumerate() {
            if k == 0 {
                continue;
            }
            let y = self.jets[g].sub_ref(&QJet::constant(w.clone(), mw, consts[g].clone()));
            p = p.mul_ref(&y.pow(k));
        }
        debug_assert_eq!(a.len(), n);
        p
    }

    /// ψ(x^a): the weighted-degree d·a part of φ(x^a).
    pub fn psi(&self, a: &[u32]) -> QJet<T> {
        self.phi(a).piece(weight_of(&self.degrees, a))
    }

    /// M_{b,a} = coefficient of z^b in ψ(x^a), over monomials of weighted degree m.
    pub fn psi_matrix(&self, m: u32) -> SeriesMatrix<T> {
        let mons = crate::series::monomials_of_weight(&self.degrees, m);
        let images: Vec<QJet<T>> = mons.par_iter().map(|a| self.psi(a)).collect();
        let den = self.jet_den();
        mons.iter().map(|b| images.iter().map(|im| im.coeff(b).cloned().unwrap_or_else(|| QSeries::zero(den, EXACT))).collect()).collect()
    }

    /// (∂x^α/∂z^β)|_{L^⊥}, α, β = 1..n.
    pub fn jacobian(&self) -> SeriesMatrix<T> {
        let n = self.n();
        let den = self.jet_den();
        (0..n).map(|a| (0..n).map(|b| self.jets[a].coeff(&unit_vec(n, b)).cloned().unwrap_or_else(|| QSeries::zero(den, EXACT))).collect()).collect()
    }

    /// ψ restricted to degree m is invertible over F(H): elimination on psi_matrix(m)
    /// finds a pivot with nonzero leading coefficient in every column.
    pub fn psi_invertible(&self, m: u32) -> bool {
        let mat = self.psi_matrix(m);
        mat.is_empty() || crate::series::qinv_matrix(&mat, solve_tol::<T>()).is_ok()
    }

    pub fn jacobian_is_unit(&self) -> bool {
        let tol = solve_tol::<T>();
        let j = self.jacobian();
        let scale = j.iter().flatten().fold(T::zero(), |m, s| m.max(s.max_abs()));
        let det = qdet(&j, tol);
        det.valuation_abs(scale.powi(self.n() as i32) * tol).is_some()
    }

    /// x^α := ψ^{-1}(z^α): solves ψ_{d_α}·c = e_α over q-series and recombines.
    pub fn make_good(&self) -> Result<(Self, GoodnessReport), InvariantError> {
        let n = self.n();
        let den = self.jet_den();
        let tol = solve_tol::<T>();
        let mut combos: Vec<Option<QJet<T>>> = vec![None; n];
        let mut start = 0;
        while start < n {
            let m = self.degrees[start];
            let block: Vec<usize> = (start..n).take_while(|&a| self.degrees[a] == m).collect();
            let mons = crate::series::monomials_of_weight(&self.degrees, m);
            let mat = self.psi_matrix(m);
            let rhs: SeriesMatrix<T> = mons
                .iter()
                .map(|b| block.iter().map(|&al| if *b == unit_vec(n, al) { QSeries::one(den) } else { QSeries::zero(den, EXACT) }).collect())
                .collect();
            let sol = qsolve(&mat, &rhs, tol)?;
            for (k, &al) in block.iter().enumerate() {
                let mut c = QJet::zero(self.degrees.clone(), self.d_n(), den);
                for (a, row) in mons.iter().zip(&sol) {
                    c.insert(a.clone(), row[k].clone());
                }
                combos[al] = Some(c);
            }
            start += block.len();
        }
        let combos: Vec<QJet<T>> = combos.into_iter().map(Option::unwrap).collect();
        let mut good = self.recombine(&combos);
        let report = good.goodness_report(2 * good.d_n());
        let ok = report.worst() < 1e-6;
        good.good = ok;
        good.compatible = ok && report.jacobian_unit;
        Ok((good, report))
    }

    /// Residuals of the goodness, compatibility, δ-, z^0- and restriction properties; the
    /// δ-property is checked for all degrees up to `delta_degree` (capped by the jet bound).
    pub fn goodness_report(&self, delta_degree: u32) -> GoodnessReport {
        let n = self.n();
        let d_n = self.d_n();
        let mut r = GoodnessReport::default();
        for al in 0..n {
            let m = self.degrees[al];
            let piece = self.jets[al].piece(m);
            let scale = piece.max_abs().to_f64().unwrap().max(1.0);
            for b in crate::series::monomials_of_weight(&self.degrees, m) {
                let c = self.jets[al].coeff(&b);
                let size: u32 = b.iter().sum();
                if size >= 2 {
                    r.goodness = r.goodness.max(c.map_or(0.0, |s| s.max_abs().to_f64().unwrap()) / scale);
                }
                if let Some(s) = c {
                    r.z0_property = r.z0_property.max(s.d_tau().max_abs().to_f64().unwrap() / scale);
                }
            }
        }
        let jac = self.jacobian();
        for (a, row) in jac.iter().enumerate() {
            for (b, s) in row.iter().enumerate() {
                let d = if a == b { s.sub_ref(&QSeries::one(s.den())) } else { s.clone() };
                r.compatibility = r.compatibility.max(d.max_abs().to_f64().unwrap());
            }
        }
        let top = delta_degree.min(self.jets[0].max_weight());
        r.delta_degree = top;
        for m in 1..=top {
            let mat = self.psi_matrix(m);
            for (i, row) in mat.iter().enumerate() {
                for (j, s) in row.iter().enumerate() {
                    let d = if i == j { s.sub_ref(&QSeries::one(s.den())) } else { s.clone() };
                    r.delta_property = r.delta_property.max(d.max_abs().to_f64().unwrap());
                }
            }
        }
        let top_count = self.degrees.iter().filter(|&&d| d == d_n).count();
        if top_count == 1 {
            let target = Complex::new(T::zero(), -crate::exactcore::fdiv(T::TAU(), T::from(d_n).unwrap()));
            let x = self.restrictions()[n - 1].sub_ref(&QSeries::constant(target, self.jet_den(), EXACT));
            r.top_restriction = Some((x.max_abs() / target.im.abs()).to_f64().unwrap());
        }
        r.jacobian_unit = self.jacobian_is_unit();
        r
    }

    /// Values and gradients of x^1..x^n at (τ, z), from direct evaluation of the orbit sums
    /// and the chain rule through the combinations.
    pub fn point_values(&self, ctx: &InvariantContext, tau: C64, z: &[C64]) -> Vec<PointValue> {
        let n = self.n();
        let th: Vec<(C64, Vec<C64>)> = self.thetas.iter().map(|t| t.eval(ctx, tau, z)).collect();
        let vals: Vec<Complex<T>> = th.iter().map(|v| from_c64(v.0)).collect();
        let tau_t = from_c64::<T>(tau);
        self.combos
            .iter()
            .map(|c| {
                let value = to_c64(c.eval(&vals, tau_t));
                let mut grad = vec![to_c64(c.d_tau().eval(&vals, tau_t)); 1];
                grad.extend(std::iter::repeat(C64::new(0.0, 0.0)).take(n));
                for g in 0..n {
                    let dc = to_c64(c.deriv(g).eval(&vals, tau_t));
                    if dc == C64::new(0.0, 0.0) {
                        continue;
                    }
                    for (k, gk) in grad.iter_mut().enumerate() {
                        *gk += dc * th[g].1[k];
                    }
                }
                PointValue { value, grad }
            })
            .collect()
    }
}

/// Writes the degree-m invariant with jet `f` as Σ_{d·b = m} P_b x^b in the set `xs`.
///
/// In the recentred variables y = x − x|_{L^⊥} only weights m, m − d_n, … occur; the
/// ψ-systems are solved from the bottom weight up, subtracting the jets φ(y^a) of the parts
/// already found. The top-weight coefficients are the P_b.
pub fn expand_in<T: Scalar>(xs: &BasicInvariantSet<T>, f: &QJet<T>, m: u32) -> Result<Expansion<T>, InvariantError> {
    Ok(expand_many(xs, std::slice::from_ref(f), m)?.pop().unwrap())
}

/// `expand_in` for several invariants of the same degree, sharing the ψ-eliminations.
pub fn expand_many<T: Scalar>(xs: &BasicInvariantSet<T>, fs: &[QJet<T>], m: u32) -> Result<Vec<Expansion<T>>, InvariantError> {
    let n = xs.n();
    let d_n = xs.d_n();
    let den = xs.jet_den();
    let tol = solve_tol::<T>();
    if let Some(f) = fs.iter().find(|f| f.max_weight() < m) {
        return Err(InvariantError::Verification(format!("jet known to weight {} < {m}", f.max_weight())));
    }
    let prec = fs.iter().map(|f| f.prec()).min().unwrap_or(EXACT);
    let mut ytilde: Vec<QJet<T>> = fs.iter().map(|_| QJet::zero(xs.degrees.clone(), m, den)).collect();
    let mut rest: Vec<QJet<T>> = fs.iter().map(|f| f.truncate_weight(m)).collect();
    let mut k = m % d_n;
    loop {
        let mons = crate::series::monomials_of_weight(&xs.degrees, k);
        if !mons.is_empty() {
            let rhs: SeriesMatrix<T> = mons.iter().map(|b| rest.iter().map(|r| r.coeff_or_zero(b, prec)).collect()).collect();
            let sol = if k == 0 { rhs } else { qsolve(&xs.psi_matrix(k), &rhs, tol)? };
            let phis: Vec<QJet<T>> = if k < m { mons.par_iter().map(|a| xs.phi(a).truncate_weight(m)).collect() } else { Vec::new() };
            for (i, (a, row)) in mons.iter().zip(&sol).enumerate() {
                for (j, c) in row.iter().enumerate() {
                    if c.is_zero() && c.is_exact() {
                        continue;
                    }
                    ytilde[j].insert(a.clone(), c.clone());
                    if k < m {
                        rest[j] = rest[j].sub_ref(&phis[i].scale_series(c));
                    }
                }
            }
        }
        if k >= m {
            break;
        }
        k += d_n;
    }
    // Back to x: Σ_a P̃_a (x − c)^a; the top weight is P̃ itself.
    let consts = xs.restrictions();
    let yvars: Vec<QJet<T>> = (0..n)
        .map(|g| QJet::variable(xs.degrees.clone(), m, den, g).sub_ref(&QJet::constant(xs.degrees.clone(), m, consts[g].clone())))
        .collect();
    Ok(ytilde
        .par_iter()
        .map(|yt| {
            let full = substitute(yt, &yvars);
            let top = full.piece(m);
            let scale = top.max_abs().to_f64().unwrap().max(1.0);
            let lower = full
                .terms()
                .filter(|(b, _)| weight_of(&xs.degrees, b) < m)
                .fold(0.0f64, |acc, (_, s)| acc.max(s.max_abs().to_f64().unwrap()));
            Expansion { degree: m, coeffs: top, lower_residual: lower / scale }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::MarkedEllipticRootSystem;
    use twofloat::TwoFloat;

    fn ctx(t: &str, q: i64) -> InvariantContext {
        let sys = MarkedEllipticRootSystem::build(t.parse().unwrap());
        let d = crate::coxeter::hyperbolic_coxeter(&sys).unwrap().d_n;
        InvariantContext::new(sys, 1, q, 3 * d).unwrap()
    }

    #[test]
    fn rank_of_dependent_rows() {
        let a = vec![C64::new(1.0, 0.0), C64::new(2.0, 1.0)];
        let b = a.iter().map(|z| z * C64::new(0.0, 3.0)).collect();
        assert_eq!(complex_rank(&[a.clone(), b]), 1);
        assert_eq!(complex_rank(&[a, vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)]]), 2);
    }

    #[test]
    fn g2_good_invariants() {
        let c = ctx("G2", 12);
        let xs = BasicInvariantSet::<TwoFloat>::select(&c).unwrap();
        assert_eq!(xs.n(), 3);
        assert!(xs.jacobian_is_unit());
        // x^α|_{L^⊥} = 0 below the top degree.
        let r = xs.restrictions();
        for a in 0..2 {
            assert!(r[a].max_abs() < 1e-9, "{a}: {}", r[a].max_abs());
        }
        let (good, rep) = xs.make_good().unwrap();
        assert!(good.good && good.compatible, "{rep:?}");
        assert!((1..=4).all(|m| good.psi_invertible(m)));
        assert!(rep.worst() < 1e-8, "{rep:?}");
    }

    #[test]
    fn expansion_of_products_is_monomial() {
        let c = ctx("G2", 12);
        let xs = BasicInvariantSet::<TwoFloat>::select(&c).unwrap();
        let f = xs.jets[0].mul_ref(&xs.jets[1]).mul_ref(&xs.jets[2]);
        let e = expand_in(&xs, &f, 4).unwrap();
        for (b, s) in e.coeffs.terms() {
            let want = if *b == vec![1, 1, 1] { TwoFloat::from(1.0) } else { TwoFloat::from(0.0) };
            let c = QSeries::constant(Complex::new(want, TwoFloat::from(0.0)), s.den(), EXACT);
            assert!(s.sub_ref(&c).max_abs() < 1e-8, "{b:?}");
        }
        assert!(e.lower_residual < 1e-8, "{}", e.lower_residual);
    }

    #[test]
    fn exchange_file_round_trip() {
        let c = ctx("G2", 10);
        let (xs, _) = BasicInvariantSet::<TwoFloat>::select(&c).unwrap().make_good().unwrap();
        let text = super::super::write_invariant_file(&c, &xs);
        let f = super::super::parse_invariant_file::<TwoFloat>(&text).unwrap();
        assert_eq!(f.jets.len(), 3);
        let back = BasicInvariantSet::from_file(&c, &f).unwrap();
        assert!(back.good);
        // Bit-for-bit: the cache must not perturb later output.
        assert_eq!(back.combos, xs.combos);
        assert_eq!(back.jets, xs.jets);
        assert!(super::super::parse_invariant_file::<TwoFloat>(&text.replace("end\n", "")).is_err());
        assert!(super::super::parse_invariant_file::<TwoFloat>("garbage").is_err());
    }
}
