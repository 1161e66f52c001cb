//! Hyperbolic Coxeter transformation, its Jordan decomposition and the degrees.

use crate::exactcore::{int, is_integer, Cyclotomic, ExactMatrix, Rational};
use crate::rootsys::MarkedEllipticRootSystem;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoxeterError {
    #[error("no vertex ordering gives a hyperbolic Coxeter element (finite order, roots off Im(c − id), K_Z generation) ({0} orderings tried)")]
    NoOrdering(usize),
    #[error("the equation c̃λ = λ − I_R(λ,δ)a/d_n has no solution outside F")]
    NoLambda,
}

/// Exact automorphism of F̃ with its membership flags for O(F̃, F, rad I).
#[derive(Debug, Clone, PartialEq)]
pub struct LinearAuto {
    pub matrix: ExactMatrix,
    pub preserves_form: bool,
    pub maps_f_into_f: bool,
    pub fixes_rad: bool,
}

impl LinearAuto {
    pub fn new(sys: &MarkedEllipticRootSystem, matrix: ExactMatrix) -> Self {
        let d = sys.dim();
        assert_eq!((matrix.rows(), matrix.cols()), (d, d));
        let t = matrix.transpose();
        let preserves_form = &(&t * &sys.gram) * &matrix == sys.gram;
        let lz = sys.idx_lambda0();
        let maps_f_into_f = (0..lz).all(|j| matrix.get(lz, j).is_zero());
        let ia = sys.idx_a();
        let fixes_rad = (0..d).all(|i| *matrix.get(i, ia) == if i == ia { Rational::one() } else { Rational::zero() });
        LinearAuto { matrix, preserves_form, maps_f_into_f, fixes_rad }
    }

    pub fn identity(sys: &MarkedEllipticRootSystem) -> Self {
        Self::new(sys, ExactMatrix::identity(sys.dim()))
    }

    pub fn in_group(&self) -> bool {
        self.preserves_form && self.maps_f_into_f && self.fixes_rad
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn apply(&self, v: &[Rational]) -> Vec<Rational> {
        self.matrix.mul_vec(v)
    }

    /// self ∘ other.
    pub fn compose(&self, other: &LinearAuto) -> LinearAuto {
        LinearAuto {
            matrix: &self.matrix * &other.matrix,
            preserves_form: self.preserves_form && other.preserves_form,
            maps_f_into_f: self.maps_f_into_f && other.maps_f_into_f,
            fixes_rad: self.fixes_rad && other.fixes_rad,
        }
    }

    pub fn inverse(&self) -> LinearAuto {
        LinearAuto { matrix: self.matrix.inverse().expect("automorphism"), ..self.clone() }
    }

    pub fn pow(&self, k: u32) -> LinearAuto {
        LinearAuto { matrix: self.matrix.pow(k), ..self.clone() }
    }

    pub fn is_identity(&self) -> bool {
        self.matrix == ExactMatrix::identity(self.dim())
    }

    pub fn is_integral(&self) -> bool {
        (0..self.dim()).all(|i| (0..self.dim()).all(|j| is_integer(self.matrix.get(i, j))))
    }

    /// Restriction to F (the first l+2 coordinates), valid when F is invariant.
    pub fn restrict_to_f(&self) -> ExactMatrix {
        let k = self.dim() - 1;
        ExactMatrix::from_fn(k, k, |i, j| self.matrix.get(i, j).clone())
    }

    /// For an element of K_ℝ (identity on F, Λ0 ↦ Λ0 + s·a) returns s.
    pub fn k_shift(&self, sys: &MarkedEllipticRootSystem) -> Option<Rational> {
        let lz = sys.idx_lambda0();
        let f_identity = (0..lz).all(|j| (0..self.dim()).all(|i| *self.matrix.get(i, j) == if i == j { Rational::one() } else { Rational::zero() }));
        if !f_identity {
            return None;
        }
        let ok = (0..self.dim()).all(|i| {
            let v = self.matrix.get(i, lz);
            if i == lz {
                v.is_one()
            } else {
                i == sys.idx_a() || v.is_zero()
            }
        });
        ok.then(|| self.matrix.get(sys.idx_a(), lz).clone())
    }
}

/// Checks on one candidate c̃.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoxeterChecks {
    /// c is semi-simple of finite order with root-of-unity spectrum and eigenvalue 1 present.
    pub finite_order: bool,
    pub roots_off_image: bool,
    pub image_membership: bool,
    pub generates_k: bool,
}

impl CoxeterChecks {
    pub fn all(&self) -> bool {
        self.finite_order && self.roots_off_image && self.image_membership && self.generates_k
    }
}

#[derive(Debug, Clone)]
pub struct CoxeterData {
    pub c_tilde: LinearAuto,
    /// Reflection vertices in the order of the product c̃ = w̃_{v_1} ⋯ w̃_{v_k}.
    pub vertices: Vec<Vec<Rational>>,
    pub orderings_tried: usize,
    pub d_n: u32,
    /// Degrees d_1 ≤ … ≤ d_n.
    pub degrees: Vec<u32>,
    /// ζ = exp(2π√−1·zeta_exponent/d_n).
    pub zeta_exponent: i64,
    pub ss: LinearAuto,
    pub unip: LinearAuto,
    /// Bases of Im(c − id) and Ker(c − id) as vectors of F̃.
    pub f_ne1: Vec<Vec<Rational>>,
    pub f_eq1: Vec<Vec<Rational>>,
    pub lambda: Vec<Rational>,
    pub codim: usize,
    /// unip(Λ0) = Λ0 + unip_shift·a.
    pub unip_shift: Rational,
    pub checks: CoxeterChecks,
}

fn embed_f(v: &[Rational]) -> Vec<Rational> {
    let mut w = v.to_vec();
    w.push(Rational::zero());
    w
}

/// Order of a matrix of finite order, up to `max`.
fn matrix_order(m: &ExactMatrix, max: u32) -> Option<u32> {
    let id = ExactMatrix::identity(m.rows());
    let mut p = m.clone();
    for k in 1..=max {
        if p == id {
            return Some(k);
        }
        p = &p * m;
    }
    None
}

/// Multiplicity of each exp(2π√−1 k/N), k = 0..N−1, as an eigenvalue of `m`; the
/// multiplicities sum to the size of `m` iff `m` is diagonalizable over Q(ζ_N).
pub fn root_of_unity_multiplicities(m: &ExactMatrix, order: u32) -> Vec<usize> {
    let mc = m.to_cyclotomic();
    (0..order)
        .map(|k| mc.eigenspace(&Cyclotomic::root_of_unity(order, k as i64)).len())
        .collect()
}

/// Default ordering: each vertex of maximal comark α followed by its duplicate
/// α* = α + a, then the remaining vertices, α_0 before α_1..α_l.
fn vertex_list(sys: &MarkedEllipticRootSystem) -> Vec<Vec<Rational>> {
    let l = sys.l;
    let verts: Vec<Vec<Rational>> = std::iter::once(sys.affine_root()).chain((0..l).map(|i| sys.simple_root(i))).collect();
    let maxc = *sys.comarks.iter().max().unwrap();
    let mut pairs = Vec::new();
    let mut rest = Vec::new();
    for (i, v) in verts.iter().enumerate() {
        if sys.comarks[i] == maxc {
            let mut w = v.clone();
            w[sys.idx_a()] += Rational::one();
            pairs.push(v.clone());
            pairs.push(w);
        } else {
            rest.push(v.clone());
        }
    }
    pairs.extend(rest);
    pairs
}

fn product_of_reflections(sys: &MarkedEllipticRootSystem, verts: &[Vec<Rational>]) -> LinearAuto {
    verts.iter().fold(LinearAuto::identity(sys), |acc, v| acc.compose(&sys.reflection(v).unwrap()))
}

/// For an arbitrary c on F: no root α + m a + k δ lies in Im(c − id).
/// Decompose each finite root as α' + r with α' ∈ Im(c−id), r ∈ Ker(c−id); a translate
/// of α lies in Im(c−id) iff r ∈ ℤa ⊕ ℤδ.
pub fn roots_avoid_image(sys: &MarkedEllipticRootSystem, c_f: &ExactMatrix) -> bool {
    let k = c_f.rows();
    let cm1 = c_f - &ExactMatrix::identity(k);
    let im = cm1.column_space();
    let ker = cm1.kernel();
    if im.len() + ker.len() != k {
        return false;
    }
    let mut cols = im.clone();
    cols.extend(ker.iter().cloned());
    let basis = ExactMatrix::from_columns(k, &cols);
    let l = sys.l;
    for i in 0..sys.finite_roots.len() {
        let alpha = &sys.finite_root_vector(i)[..k];
        let coef = basis.solve(&ExactMatrix::column(alpha.to_vec())).expect("basis of F");
        let r: Vec<Rational> = (0..k)
            .map(|row| (0..ker.len()).map(|j| &ker[j][row] * coef.get(im.len() + j, 0)).sum())
            .collect();
        let in_rad_lattice = (0..l).all(|t| r[t].is_zero()) && is_integer(&r[l]) && is_integer(&r[l + 1]);
        if in_rad_lattice {
            return false;
        }
    }
    true
}

/// (c̃ − 1)ξ + I_R(ξ,δ)a/d_n ∈ Im(c − id) for every basis vector ξ, and c̃^{d_n}
/// is a generator of K_ℤ (shift ±s0 with s0 the K_ℤ step).
fn image_checks(sys: &MarkedEllipticRootSystem, c_tilde: &LinearAuto, d_n: u32, f_ne1: &[Vec<Rational>], step: &Rational) -> (bool, bool) {
    let d = sys.dim();
    let im = ExactMatrix::from_columns(d, f_ne1);
    let rank = im.rank();
    let delta = sys.delta();
    let membership = (0..d).all(|j| {
        let xi = sys.unit(j);
        let mut v = c_tilde.apply(&xi);
        for (x, y) in v.iter_mut().zip(&xi) {
            *x -= y;
        }
        let ir = &sys.c0 * sys.form(&xi, &delta) / int(d_n as i64);
        v[sys.idx_a()] += ir;
        if f_ne1.is_empty() {
            v.iter().all(|x| x.is_zero())
        } else {
            im.hstack(&ExactMatrix::column(v)).rank() == rank
        }
    });
    let generator = match c_tilde.pow(d_n).k_shift(sys) {
        Some(s) => !step.is_zero() && (s == *step || s == -step.clone()),
        None => false,
    };
    (membership, generator)
}

fn analyze(sys: &MarkedEllipticRootSystem, verts: Vec<Vec<Rational>>, tried: usize, step: &Rational) -> Result<CoxeterData, CoxeterChecks> {
    let c_tilde = product_of_reflections(sys, &verts);
    let c_f = c_tilde.restrict_to_f();
    let k = c_f.rows();
    let fail = CoxeterChecks { finite_order: false, roots_off_image: false, image_membership: false, generates_k: false };
    let Some(d_n) = matrix_order(&c_f, 240) else {
        return Err(fail);
    };
    let mult = root_of_unity_multiplicities(&c_f, d_n);
    let finite_order = mult.iter().sum::<usize>() == k && mult[0] >= 1;
    if !finite_order {
        return Err(fail);
    }
    // Degrees: remove one eigenvalue 1; exponent k ↦ degree k, with 0 ↦ d_n.
    let mut degrees = Vec::new();
    for (e, &m) in mult.iter().enumerate() {
        let deg = if e == 0 { d_n } else { e as u32 };
        let count = if e == 0 { m - 1 } else { m };
        degrees.extend(std::iter::repeat(deg).take(count));
    }
    degrees.sort_unstable();
    let cm1 = &c_f - &ExactMatrix::identity(k);
    let f_ne1: Vec<Vec<Rational>> = cm1.column_space().iter().map(|v| embed_f(v)).collect();
    let f_eq1: Vec<Vec<Rational>> = cm1.kernel().iter().map(|v| embed_f(v)).collect();
    let roots_off_image = roots_avoid_image(sys, &c_f);
    let (image_membership, generates_k) = image_checks(sys, &c_tilde, d_n, &f_ne1, step);
    let checks = CoxeterChecks { finite_order, roots_off_image, image_membership, generates_k };
    if !checks.all() {
        return Err(checks);
    }
    let (lambda, ss, unip) = jordan_parts(sys, &c_tilde, d_n, &f_ne1, &f_eq1).ok_or(checks.clone())?;
    let unip_shift = unip.k_shift(sys).ok_or(checks.clone())?;
    // ζ = exp(2π√−1 s) with s = unip_shift (a multiple of 1/d_n).
    let s_scaled = &unip_shift * int(d_n as i64);
    let zeta_exponent: i64 = if is_integer(&s_scaled) {
        let t: i64 = s_scaled.to_integer().try_into().unwrap();
        t.rem_euclid(d_n as i64)
    } else {
        return Err(checks);
    };
    let codim = degrees.iter().filter(|&&x| x == d_n).count();
    Ok(CoxeterData {
        c_tilde,
        vertices: verts,
        orderings_tried: tried,
        d_n,
        degrees,
        zeta_exponent,
        ss,
        unip,
        f_ne1,
        f_eq1,
        lambda,
        codim,
        unip_shift,
        checks,
    })
}

/// λ ∉ F with c̃λ = λ − I_R(λ,δ)a/d_n, and the factors c̃ = ss·unip.
fn jordan_parts(
    sys: &MarkedEllipticRootSystem,
    c_tilde: &LinearAuto,
    d_n: u32,
    f_ne1: &[Vec<Rational>],
    f_eq1: &[Vec<Rational>],
) -> Option<(Vec<Rational>, LinearAuto, LinearAuto)> {
    let d = sys.dim();
    let k = d - 1;
    // Solve (c − 1)x = (c̃ − 1)Λ0 + I_R(Λ0,δ)a/d_n for x ∈ F; then λ = Λ0 − x.
    let l0 = sys.lambda0();
    let mut rhs = c_tilde.apply(&l0);
    for (x, y) in rhs.iter_mut().zip(&l0) {
        *x -= y;
    }
    rhs[sys.idx_a()] += &sys.c0 * sys.form(&l0, &sys.delta()) / int(d_n as i64);
    if !rhs[sys.idx_lambda0()].is_zero() {
        return None;
    }
    let cm1 = &c_tilde.restrict_to_f() - &ExactMatrix::identity(k);
    let x = cm1.solve(&ExactMatrix::column(rhs[..k].to_vec())).ok()?;
    let mut lambda = l0.clone();
    for i in 0..k {
        lambda[i] -= x.get(i, 0);
    }
    let mut cols: Vec<Vec<Rational>> = f_ne1.to_vec();
    cols.extend(f_eq1.iter().cloned());
    cols.push(lambda.clone());
    let p = ExactMatrix::from_columns(d, &cols);
    let mut images: Vec<Vec<Rational>> = f_ne1.iter().map(|v| c_tilde.apply(v)).collect();
    images.extend(f_eq1.iter().cloned());
    images.push(lambda.clone());
    let q = ExactMatrix::from_columns(d, &images);
    let ss_m = &q * &p.inverse().ok()?;
    let ss = LinearAuto::new(sys, ss_m);
    let unip = LinearAuto::new(sys, &ss.inverse().matrix * &c_tilde.matrix);
    Some((lambda, ss, unip))
}

/// Builds c̃ with the default vertex ordering (duplicated vertices, then α_0, then
/// α_1..α_l); on failure of any check, searches permutations of that ordering.
pub fn hyperbolic_coxeter(sys: &MarkedEllipticRootSystem) -> Result<CoxeterData, CoxeterError> {
    hyperbolic_coxeter_limited(sys, 5040)
}

pub fn hyperbolic_coxeter_limited(sys: &MarkedEllipticRootSystem, max_orderings: usize) -> Result<CoxeterData, CoxeterError> {
    let step = sys.k_integral_step();
    let base = vertex_list(sys);
    let mut idx: Vec<usize> = (0..base.len()).collect();
    let mut tried = 0;
    loop {
        tried += 1;
        let verts: Vec<Vec<Rational>> = idx.iter().map(|&i| base[i].clone()).collect();
        if let Ok(data) = analyze(sys, verts, tried, &step) {
            return Ok(data);
        }
        if tried >= max_orderings || !next_permutation(&mut idx) {
            return Err(CoxeterError::NoOrdering(tried));
        }
    }
}

/// Checks on the product of reflections in the given order (for inspection of
/// orderings other than the accepted one).
pub fn coxeter_checks_for(sys: &MarkedEllipticRootSystem, verts: &[Vec<Rational>]) -> CoxeterChecks {
    let step = sys.k_integral_step();
    match analyze(sys, verts.to_vec(), 1, &step) {
        Ok(d) => d.checks,
        Err(r) => r,
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

impl CoxeterData {
    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    /// dim F^{=1} − 1, the fibre dimension of the fixed locus over H.
    pub fn fixed_locus_dim(&self) -> usize {
        let v = self.f_eq1.len() - 1;
        assert_eq!(v, self.codim, "fixed locus dimension disagrees with the codimension");
        v
    }

    /// ζ as an exact cyclotomic number.
    pub fn zeta(&self) -> Cyclotomic {
        Cyclotomic::root_of_unity(self.d_n, self.zeta_exponent)
    }

    /// ss·unip = unip·ss = c̃.
    pub fn jordan_commutes(&self) -> bool {
        let a = self.ss.compose(&self.unip);
        let b = self.unip.compose(&self.ss);
        a.matrix == self.c_tilde.matrix && b.matrix == self.c_tilde.matrix
    }

    /// Multiplicities of ζ^k as eigenvalues of ss on F̃ compared with the prediction
    /// ζ^{d_1},…,ζ^{d_n},1,1.
    pub fn ss_spectrum_matches(&self) -> bool {
        let dn = self.d_n;
        let got = root_of_unity_multiplicities(&self.ss.matrix, dn);
        let mut want = vec![0usize; dn as usize];
        want[0] += 2;
        for &d in &self.degrees {
            let e = (self.zeta_exponent * d as i64).rem_euclid(dn as i64) as usize;
            want[e] += 1;
        }
        got == want
    }

    /// Whether each degree pairs with its dual: d_α + d_{n−α} = d_n.
    pub fn degrees_dual(&self) -> bool {
        let n = self.n();
        (1..n).all(|a| self.degrees[a - 1] + self.degrees[n - a - 1] == self.d_n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(t: &str) -> (MarkedEllipticRootSystem, CoxeterData) {
        let sys = MarkedEllipticRootSystem::build(t.parse().unwrap());
        let d = hyperbolic_coxeter(&sys).unwrap();
        (sys, d)
    }

    #[test]
    fn degrees_small_types() {
        for (t, dn, deg) in [
            ("A1", 1, vec![1, 1]),
            ("G2", 2, vec![1, 1, 2]),
            ("D4", 2, vec![1, 1, 1, 1, 2]),
            ("C3", 1, vec![1, 1, 1, 1]),
            ("B3", 2, vec![1, 1, 1, 2]),
        ] {
            let (_, d) = data(t);
            assert_eq!(d.d_n, dn, "{t}");
            assert_eq!(d.degrees, deg, "{t}");
            assert_eq!(d.orderings_tried, 1, "{t}");
        }
    }

    #[test]
    fn degrees_are_the_comarks() {
        for t in ["A2", "B4", "C4", "D5", "E6", "F4"] {
            let (sys, d) = data(t);
            let mut c: Vec<u32> = sys.comarks.iter().map(|&x| x as u32).collect();
            c.sort_unstable();
            assert_eq!(d.degrees, c, "{t}");
            assert!(d.degrees_dual() || d.codim > 1, "{t}");
        }
    }

    #[test]
    fn codimension_one_types() {
        for t in ["D4", "E6", "E7", "F4", "G2"] {
            assert_eq!(data(t).1.codim, 1, "{t}");
        }
        for t in ["A1", "A3", "B4", "C3", "D5"] {
            assert!(data(t).1.codim > 1, "{t}");
        }
    }

    #[test]
    fn jordan_factors() {
        let (sys, d) = data("G2");
        assert!(d.jordan_commutes());
        assert_eq!(&d.unip_shift * int(d.d_n as i64), -Rational::one());
        assert!(d.ss_spectrum_matches());
        assert!(d.ss.in_group() && d.unip.in_group());
        assert_eq!(d.ss.pow(d.d_n).matrix, ExactMatrix::identity(sys.dim()));
        assert_eq!(d.fixed_locus_dim(), 1);
    }

    #[test]
    fn roots_avoid_image_negative_control() {
        let sys = MarkedEllipticRootSystem::build("G2".parse().unwrap());
        let w = sys.reflection(&sys.simple_root(0)).unwrap();
        assert!(!roots_avoid_image(&sys, &w.restrict_to_f()));
    }

    #[test]
    fn k_shift_of_translation_commutator() {
        let sys = MarkedEllipticRootSystem::build("A1".parse().unwrap());
        assert_eq!(sys.k_integral_step(), Rational::one());
        assert!(LinearAuto::identity(&sys).k_shift(&sys).unwrap().is_zero());
    }

    #[test]
    fn permutations_enumerate() {
        let mut v = vec![0, 1, 2];
        let mut n = 1;
        while next_permutation(&mut v) {
            n += 1;
        }
        assert_eq!(n, 6);
    }
}
