//! Admissible triplets (g, ζ, L(r)) built from the hyperbolic Coxeter transformation,
//! their eigen-coordinates and the chart on L^⊥.

use crate::coxeter::{root_of_unity_multiplicities, CoxeterData, LinearAuto};
use crate::exactcore::{int, is_integer, rat, Cyclotomic, ExactMatrix, Rational};
use crate::rootsys::MarkedEllipticRootSystem;
use crate::C64;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TripletError {
    #[error("no regular point found after {tries} attempts (seed {seed})")]
    NoRegularPoint { tries: usize, seed: u64 },
    #[error("admissibility fails: {0}")]
    NotAdmissible(String),
    #[error("dual normalization needs {0}")]
    NotNormalizable(String),
}

const REGULAR_POINT_TRIES: usize = 200;

/// A point z of Hom(F, ℂ) vanishing on Im(c − id), encoded by two rational functionals:
/// ⟨v, z⟩ = −2π√−1 (A(v) + τ·D(v)). A(a) = 1, D(δ) = 1, A(δ) = D(a) = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularPoint {
    pub a_fun: Vec<Rational>,
    pub d_fun: Vec<Rational>,
    pub seed: u64,
}

fn dot(u: &[Rational], v: &[Rational]) -> Rational {
    u.iter().zip(v).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

fn two_pi_i() -> C64 {
    C64::new(0.0, std::f64::consts::TAU)
}

impl RegularPoint {
    /// (A(v), D(v)).
    pub fn values(&self, v: &[Rational]) -> (Rational, Rational) {
        (dot(&self.a_fun, v), dot(&self.d_fun, v))
    }

    pub fn pairing(&self, v: &[Rational], tau: C64) -> C64 {
        let (a, d) = self.values(v);
        -two_pi_i() * (crate::exactcore::rational_to_f64(&a) + tau * crate::exactcore::rational_to_f64(&d))
    }

    /// Exact regularity: no root α + m·a + k·δ pairs to zero, i.e. A(α), D(α) are never
    /// both integers.
    pub fn is_regular(&self, sys: &MarkedEllipticRootSystem) -> bool {
        (0..sys.finite_roots.len()).all(|i| {
            let (a, d) = self.values(&sys.finite_root_vector(i));
            !(is_integer(&a) && is_integer(&d))
        })
    }

    /// Null directions of z inside F^{=1}: {x : A(x) = D(x) = 0}.
    pub fn l0(&self, sys: &MarkedEllipticRootSystem, data: &CoxeterData) -> Vec<Vec<Rational>> {
        let comp = complement_of_rad(sys, &data.f_eq1);
        comp.into_iter()
            .map(|k| {
                let (u, v) = self.values(&k);
                let mut x = k;
                x[sys.idx_a()] -= u;
                x[sys.idx_delta()] -= v;
                x
            })
            .collect()
    }
}

/// Vectors of `space` completing {a, δ} to a basis of it.
fn complement_of_rad(sys: &MarkedEllipticRootSystem, space: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let d = sys.dim();
    let mut acc = vec![sys.a(), sys.delta()];
    let mut out = Vec::new();
    for v in space {
        let mut trial = acc.clone();
        trial.push(v.clone());
        if ExactMatrix::from_columns(d, &trial).rank() == trial.len() {
            acc = trial;
            out.push(v.clone());
        }
    }
    out
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    rat(rng.gen_range(-97..=97), rng.gen_range(1..=97))
}

/// A point of 𝔼^c ∩ 𝔼_τ off all reflection hyperplanes. For codimension one the point is
/// forced; otherwise the free coordinates on F^{=1} are random rationals from `seed`.
pub fn regular_point(sys: &MarkedEllipticRootSystem, data: &CoxeterData, seed: u64) -> Result<RegularPoint, TripletError> {
    let d = sys.dim();
    let extra = complement_of_rad(sys, &data.f_eq1);
    let mut basis: Vec<Vec<Rational>> = data.f_ne1.clone();
    basis.push(sys.a());
    basis.push(sys.delta());
    basis.extend(extra.iter().cloned());
    basis.push(sys.lambda0());
    let b = ExactMatrix::from_columns(d, &basis);
    let bt_inv = b.transpose().inverse().map_err(|e| TripletError::NotAdmissible(format!("F^≠1 ⊕ F^=1 ⊕ ℚΛ0 degenerate: {e}")))?;
    let k = data.f_ne1.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tries = if extra.is_empty() { 1 } else { REGULAR_POINT_TRIES };
    for _ in 0..tries {
        let mut va = vec![Rational::zero(); d];
        let mut vd = vec![Rational::zero(); d];
        va[k] = Rational::one();
        vd[k + 1] = Rational::one();
        for j in 0..extra.len() {
            va[k + 2 + j] = random_rational(&mut rng);
            vd[k + 2 + j] = random_rational(&mut rng);
        }
        let p = RegularPoint { a_fun: bt_inv.mul_vec(&va), d_fun: bt_inv.mul_vec(&vd), seed };
        if p.is_regular(sys) {
            return Ok(p);
        }
    }
    Err(TripletError::NoRegularPoint { tries, seed })
}

/// The three clauses of admissibility, reported separately.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityReport {
    /// F̃ = L ⊕ rad I.
    pub splitting: bool,
    /// L ∩ R = ∅.
    pub root_free: bool,
    /// ζ is a primitive d_n-th root of unity.
    pub zeta_primitive: bool,
    /// g multiplies each level-m exponential by ζ^m (g acts on S^W_m by ζ^m).
    pub invariant_eigen: bool,
    /// g preserves L.
    pub preserves_l: bool,
    /// g|_L is semisimple with spectrum {ζ^{d_α}}.
    pub spectrum_on_l: bool,
}

impl AdmissibilityReport {
    pub fn clause_i(&self) -> bool {
        self.splitting && self.root_free
    }

    pub fn clause_ii(&self) -> bool {
        self.zeta_primitive && self.invariant_eigen
    }

    pub fn clause_iii(&self) -> bool {
        self.preserves_l && self.spectrum_on_l
    }

    pub fn all(&self) -> bool {
        self.clause_i() && self.clause_ii() && self.clause_iii()
    }

    pub fn failures(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        if !self.clause_i() {
            v.push("(i) L is not a root-free splitting subspace");
        }
        if !self.clause_ii() {
            v.push("(ii) g does not act on invariants of degree m by ζ^m");
        }
        if !self.clause_iii() {
            v.push("(iii) g is not semisimple on L with eigenvalues ζ^{d_α}");
        }
        v
    }
}

/// Inverse of [L | a | δ] (None if L ⊕ rad I ≠ F̃).
fn coords_in(sys: &MarkedEllipticRootSystem, l_basis: &[Vec<Rational>]) -> Option<ExactMatrix> {
    let mut cols = l_basis.to_vec();
    cols.push(sys.a());
    cols.push(sys.delta());
    let m = ExactMatrix::from_columns(sys.dim(), &cols);
    m.inverse().ok()
}

/// Matrix of g|_L in the basis `l_basis` together with the flag that g(L) ⊂ L.
fn restrict(g: &LinearAuto, l_basis: &[Vec<Rational>], inv: &ExactMatrix) -> (ExactMatrix, bool) {
    let n = l_basis.len();
    let mut ok = true;
    let mut s = ExactMatrix::zeros(n, n);
    for (j, l) in l_basis.iter().enumerate() {
        let c = inv.mul_vec(&g.apply(l));
        ok &= c[n].is_zero() && c[n + 1].is_zero();
        for i in 0..n {
            s.set(i, j, c[i].clone());
        }
    }
    (s, ok)
}

/// Validates an arbitrary triplet (g, ζ = exp(2π√−1·zeta_exponent/d_n), L) against the
/// three clauses, with the degrees d_1..d_n of the system.
pub fn check_admissibility(
    sys: &MarkedEllipticRootSystem,
    g: &LinearAuto,
    zeta_exponent: i64,
    d_n: u32,
    degrees: &[u32],
    l_basis: &[Vec<Rational>],
) -> AdmissibilityReport {
    let n = sys.n();
    let inv = if l_basis.len() == n { coords_in(sys, l_basis) } else { None };
    let splitting = inv.is_some();
    let root_free = splitting && matches!(sys.root_in_subspace(l_basis), Ok(None));
    let zeta_primitive = zeta_exponent.gcd(&(d_n as i64)) == 1;
    // g = c̃·u^{-1} with c̃ ∈ W, so g acts on S^W_m as u^{-1} does. u = g^{-1}c̃ must move each
    // μ by a multiple Δ of a with exp(−2π√−1·Δ) = ζ^{-m}, m = Ĩ(μ,δ): Δ vanishes on level
    // zero and Δ(Λ0) ≡ zeta_exponent/d_n mod ℤ.
    let invariant_eigen = match crate::coxeter::hyperbolic_coxeter(sys) {
        Ok(w) if g.in_group() => {
            let u = g.inverse().compose(&w.c_tilde);
            let delta = sys.delta();
            let target = rat(zeta_exponent, d_n as i64);
            (0..sys.dim()).all(|i| {
                let e = sys.unit(i);
                let img = u.apply(&e);
                let level = sys.form(&e, &delta);
                img.iter().zip(&e).enumerate().all(|(j, (x, y))| {
                    let diff = x - y;
                    if j == sys.idx_a() {
                        is_integer(&(diff - &level * &target))
                    } else {
                        diff.is_zero()
                    }
                })
            })
        }
        _ => false,
    };
    let (preserves_l, spectrum_on_l) = match &inv {
        Some(inv) => {
            let (s, pres) = restrict(g, l_basis, inv);
            let got = root_of_unity_multiplicities(&s, d_n);
            let mut want = vec![0usize; d_n as usize];
            for &dd in degrees {
                want[(zeta_exponent * dd as i64).rem_euclid(d_n as i64) as usize] += 1;
            }
            (pres, pres && got == want)
        }
        None => (false, false),
    };
    AdmissibilityReport { splitting, root_free, zeta_primitive, invariant_eigen, preserves_l, spectrum_on_l }
}

/// (g, ζ, L) together with eigen-coordinates. The eigenvector z^α (α = 1..n) is
/// (−2π√−1)^{z_pow[α−1]} · z_basis[α−1] with z_basis exact in a cyclotomic field; the
/// extra coordinate z^0 is the function ⟨δ,x⟩/(−2π√−1).
#[derive(Debug, Clone)]
pub struct AdmissibleTriplet {
    pub g: LinearAuto,
    pub zeta_exponent: i64,
    pub d_n: u32,
    pub degrees: Vec<u32>,
    pub r: Rational,
    pub point: RegularPoint,
    /// F^{≠1} basis, then L_0, then λ_r.
    pub l_basis: Vec<Vec<Rational>>,
    pub l0: Vec<Vec<Rational>>,
    pub lambda_r: Vec<Rational>,
    pub z_basis: Vec<Vec<Cyclotomic>>,
    pub z_pow: Vec<i32>,
    pub signature: (usize, usize, usize),
    pub dual_normalized: bool,
    pub report: AdmissibilityReport,
}

fn cyc_form(sys: &MarkedEllipticRootSystem, u: &[Cyclotomic], v: &[Cyclotomic]) -> Cyclotomic {
    let mut acc = Cyclotomic::zero();
    for (i, ui) in u.iter().enumerate() {
        if ui.is_zero() {
            continue;
        }
        for (j, vj) in v.iter().enumerate() {
            let gij = sys.gram.get(i, j);
            if gij.is_zero() || vj.is_zero() {
                continue;
            }
            acc = &acc + &(ui * vj).scale(gij);
        }
    }
    acc
}

fn to_cyc(v: &[Rational]) -> Vec<Cyclotomic> {
    v.iter().map(|x| Cyclotomic::from_rational(x.clone())).collect()
}

/// Σ_j c_j·l_j for cyclotomic coefficients.
fn combine(l_basis: &[Vec<Rational>], c: &[Cyclotomic]) -> Vec<Cyclotomic> {
    let d = l_basis[0].len();
    let mut out = vec![Cyclotomic::zero(); d];
    for (cj, lj) in c.iter().zip(l_basis) {
        if cj.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(lj) {
            if !x.is_zero() {
                *o = &*o + &cj.scale(x);
            }
        }
    }
    out
}

fn signature_of(sys: &MarkedEllipticRootSystem, basis: &[Vec<Rational>]) -> (usize, usize, usize) {
    let k = basis.len();
    let g = ExactMatrix::from_fn(k, k, |i, j| sys.form(&basis[i], &basis[j]));
    g.signature().expect("Gram matrices are symmetric")
}

/// L(r) = F^{≠1} ⊕ L_0 ⊕ ℚλ_r with Ĩ(λ_r, λ_r) = r, and the triplet (c̃^ss, ζ, L(r)).
pub fn build_l(sys: &MarkedEllipticRootSystem, data: &CoxeterData, point: &RegularPoint, r: &Rational) -> Result<AdmissibleTriplet, TripletError> {
    let d = sys.dim();
    let l0 = point.l0(sys, data);
    let mut u: Vec<Vec<Rational>> = data.f_ne1.clone();
    u.extend(l0.iter().cloned());
    // (F^{≠1} ⊕ L_0)^⊥
    let rows: Vec<Vec<Rational>> = u.iter().map(|x| sys.gram.mul_vec(x)).collect();
    let perp = if rows.is_empty() {
        (0..d).map(|i| sys.unit(i)).collect()
    } else {
        ExactMatrix::from_rows(rows).kernel()
    };
    let il = sys.idx_lambda0();
    let w = perp
        .iter()
        .find(|v| !v[il].is_zero())
        .ok_or_else(|| TripletError::NotAdmissible("(F^≠1 ⊕ L_0)^⊥ lies in F".into()))?;
    let mut w: Vec<Rational> = w.iter().map(|x| x / &w[il]).collect();
    w[sys.idx_a()] = Rational::zero();
    w[sys.idx_delta()] = Rational::zero();
    // Ĩ(w + tδ, w + tδ) = Ĩ(w,w) + 2t·Ĩ(w,δ), and Ĩ(w,δ) = 1.
    let t = (r - sys.form(&w, &w)) / int(2);
    w[sys.idx_delta()] = t;
    let lambda_r = w;
    debug_assert_eq!(&sys.form(&lambda_r, &lambda_r), r);
    let mut l_basis = u;
    l_basis.push(lambda_r.clone());
    let report = check_admissibility(sys, &data.ss, data.zeta_exponent, data.d_n, &data.degrees, &l_basis);
    if !report.all() {
        return Err(TripletError::NotAdmissible(report.failures().join("; ")));
    }
    let signature = signature_of(sys, &l_basis);
    let (z_basis, z_pow) = eigen_coordinates(sys, data, &l_basis);
    Ok(AdmissibleTriplet {
        g: data.ss.clone(),
        zeta_exponent: data.zeta_exponent,
        d_n: data.d_n,
        degrees: data.degrees.clone(),
        r: r.clone(),
        point: point.clone(),
        l_basis,
        l0,
        lambda_r,
        z_basis,
        z_pow,
        signature,
        dual_normalized: false,
        report,
    })
}

/// Eigenvectors of g on L ⊗ ℂ: z^α spans part of the ζ^{d_α} eigenspace, indices with equal
/// degree filled in kernel order.
fn eigen_coordinates(sys: &MarkedEllipticRootSystem, data: &CoxeterData, l_basis: &[Vec<Rational>]) -> (Vec<Vec<Cyclotomic>>, Vec<i32>) {
    let inv = coords_in(sys, l_basis).expect("splitting checked");
    let (s, _) = restrict(&data.ss, l_basis, &inv);
    let sc = s.to_cyclotomic();
    let n = l_basis.len();
    let mut out: Vec<Vec<Cyclotomic>> = Vec::with_capacity(n);
    let mut alpha = 0;
    while alpha < n {
        let deg = data.degrees[alpha];
        let count = data.degrees.iter().filter(|&&x| x == deg).count();
        let ev = Cyclotomic::root_of_unity(data.d_n, data.zeta_exponent * deg as i64);
        let space = sc.eigenspace(&ev);
        assert_eq!(space.len(), count, "eigenspace of ζ^{deg} has the wrong dimension");
        out.extend(space.iter().map(|c| combine(l_basis, c)));
        alpha += count;
    }
    (out, vec![0; n])
}

impl AdmissibleTriplet {
    pub fn n(&self) -> usize {
        self.l_basis.len()
    }

    pub fn zeta(&self) -> Cyclotomic {
        Cyclotomic::root_of_unity(self.d_n, self.zeta_exponent)
    }

    /// Positive, zero or negative type from the signature.
    pub fn signature_type(&self) -> &'static str {
        let n = self.n();
        match self.signature {
            (p, 0, 0) if p == n => "positive",
            (p, 1, 0) if p + 1 == n => "zero",
            (p, 0, 1) if p + 1 == n => "negative",
            _ => "other",
        }
    }

    /// g·z^α = ζ^{d_α} z^α exactly for every α.
    pub fn eigen_relations_hold(&self) -> bool {
        let gm = self.g.matrix.to_cyclotomic();
        let zeta = self.zeta();
        self.z_basis.iter().zip(&self.degrees).all(|(z, &d)| {
            let lhs = gm.mul_vec(z);
            let mut f = Cyclotomic::one();
            for _ in 0..d {
                f = &f * &zeta;
            }
            lhs.iter().zip(z).all(|(x, y)| *x == &f * y)
        })
    }

    /// Gram matrix of (z^0, z^1, …, z^n) under Ĩ, when every entry is exact (no leftover
    /// power of 2π√−1); entry (0, β) uses z^0 = δ/(−2π√−1).
    pub fn z_gram_exact(&self, sys: &MarkedEllipticRootSystem) -> Option<ExactMatrix<Cyclotomic>> {
        let n = self.n();
        let mut vecs = vec![to_cyc(&sys.delta())];
        vecs.extend(self.z_basis.iter().cloned());
        let mut pows = vec![-1];
        pows.extend(self.z_pow.iter().copied());
        let mut m = ExactMatrix::<Cyclotomic>::zeros(n + 1, n + 1);
        for i in 0..=n {
            for j in 0..=n {
                let v = cyc_form(sys, &vecs[i], &vecs[j]);
                if !v.is_zero() && pows[i] + pows[j] != 0 {
                    return None;
                }
                m.set(i, j, v);
            }
        }
        Some(m)
    }
}

/// Re-chooses z^1..z^n so that Ĩ(z^α, z^β) = δ_{α+β,n} for 0 ≤ α, β ≤ n (codimension one,
/// zero type). z^n = −2π√−1·λ_0/Ĩ(δ,λ_0) and blocks of dual degrees are paired exactly.
pub fn dual_normalize(sys: &MarkedEllipticRootSystem, data: &CoxeterData, t: &AdmissibleTriplet) -> Result<AdmissibleTriplet, TripletError> {
    if data.codim != 1 {
        return Err(TripletError::NotNormalizable(format!("codimension 1 (got {})", data.codim)));
    }
    if t.signature_type() != "zero" {
        return Err(TripletError::NotNormalizable(format!("a zero-type signature (got {:?})", t.signature)));
    }
    if !data.degrees_dual() {
        return Err(TripletError::NotNormalizable("dual degrees d_α + d_{n−α} = d_n".into()));
    }
    let n = t.n();
    let inv = coords_in(sys, &t.l_basis).expect("splitting");
    let (s, _) = restrict(&t.g, &t.l_basis, &inv);
    let sc = s.to_cyclotomic();
    let mut z: Vec<Option<Vec<Cyclotomic>>> = vec![None; n];
    let mut pow = vec![0i32; n];
    let dn = data.d_n;
    let delta = sys.delta();
    let scale = sys.form(&delta, &t.lambda_r);
    z[n - 1] = Some(to_cyc(&t.lambda_r.iter().map(|x| x / &scale).collect::<Vec<_>>()));
    pow[n - 1] = 1;
    let mut alpha = 1;
    while alpha < n {
        let deg = data.degrees[alpha - 1];
        let count = data.degrees[..n - 1].iter().filter(|&&x| x == deg).count();
        let (p, k) = (alpha, count);
        if 2 * deg == dn {
            // Self-dual block: ζ^{deg} = −1, a rational eigenspace.
            let rational_space = (&s + &ExactMatrix::identity(n)).kernel();
            let mut orth: Vec<Vec<Rational>> = Vec::new();
            for c in rational_space {
                let mut v = combine_rational(&t.l_basis, &c);
                for o in &orth {
                    let f = sys.form(&v, o) / sys.form(o, o);
                    for (x, y) in v.iter_mut().zip(o) {
                        *x -= &f * y;
                    }
                }
                orth.push(v);
            }
            assert_eq!(orth.len(), k);
            for i in 0..k / 2 {
                let j = k - 1 - i;
                let (ni, nj) = (sys.form(&orth[i], &orth[i]), sys.form(&orth[j], &orth[j]));
                // c² = −ni/nj makes e_i + c·e_j isotropic; (e_i − c·e_j)/(2ni) is its dual.
                let c = Cyclotomic::sqrt_rational(&(-(&ni / &nj)));
                let ei = to_cyc(&orth[i]);
                let ej = to_cyc(&orth[j]);
                let zi: Vec<Cyclotomic> = ei.iter().zip(&ej).map(|(x, y)| x + &(&c * y)).collect();
                let h = (int(2) * &ni).recip();
                let zj: Vec<Cyclotomic> = ei.iter().zip(&ej).map(|(x, y)| (x - &(&c * y)).scale(&h)).collect();
                z[p - 1 + i] = Some(zi);
                z[p - 1 + j] = Some(zj);
            }
            if k % 2 == 1 {
                let m = k / 2;
                let nm = sys.form(&orth[m], &orth[m]);
                let root = Cyclotomic::sqrt_rational(&nm.recip());
                z[p - 1 + m] = Some(to_cyc(&orth[m]).iter().map(|x| x * &root).collect());
            }
        } else if 2 * deg < dn {
            let ev = Cyclotomic::root_of_unity(dn, data.zeta_exponent * deg as i64);
            let ev2 = Cyclotomic::root_of_unity(dn, data.zeta_exponent * (dn - deg) as i64);
            let v: Vec<Vec<Cyclotomic>> = sc.eigenspace(&ev).iter().map(|c| combine(&t.l_basis, c)).collect();
            let w: Vec<Vec<Cyclotomic>> = sc.eigenspace(&ev2).iter().map(|c| combine(&t.l_basis, c)).collect();
            assert_eq!((v.len(), w.len()), (k, k));
            let gm = ExactMatrix::<Cyclotomic>::from_fn(k, k, |i, j| cyc_form(sys, &v[i], &w[j]));
            let ginv = gm.inverse().map_err(|_| TripletError::NotNormalizable("a nondegenerate pairing of dual eigenspaces".into()))?;
            for i in 0..k {
                z[p - 1 + i] = Some(v[i].clone());
                // Y_i = Σ_j w_j (G^{-1})_{j i} is dual to v_i; it is z^{n−(p+i)}.
                let mut y = vec![Cyclotomic::zero(); sys.dim()];
                for (j, wj) in w.iter().enumerate() {
                    let c = ginv.get(j, i);
                    if c.is_zero() {
                        continue;
                    }
                    for (o, x) in y.iter_mut().zip(wj) {
                        *o = &*o + &(c * x);
                    }
                }
                z[n - (p + i) - 1] = Some(y);
            }
        }
        alpha += k;
    }
    let z_basis: Vec<Vec<Cyclotomic>> = z.into_iter().map(|v| v.expect("every index assigned")).collect();
    let out = AdmissibleTriplet { z_basis, z_pow: pow, dual_normalized: true, ..t.clone() };
    debug_assert!(out.eigen_relations_hold());
    Ok(out)
}

fn combine_rational(l_basis: &[Vec<Rational>], c: &[Rational]) -> Vec<Rational> {
    let d = l_basis[0].len();
    let mut out = vec![Rational::zero(); d];
    for (cj, lj) in c.iter().zip(l_basis) {
        for (o, x) in out.iter_mut().zip(lj) {
            *o += cj * x;
        }
    }
    out
}

/// Coordinates of a vector μ ∈ F̃ adapted to (z^1..z^n, a, δ).
#[derive(Debug, Clone, PartialEq)]
pub struct ChartCoords {
    /// μ_β with μ = Σ μ_β z^β + μ_a·a + μ_δ·δ.
    pub z: Vec<C64>,
    pub a: Rational,
    pub delta: Rational,
}

/// The chart of Y given by (z^0 = τ, z^1, …, z^n); its zero section is L^⊥.
#[derive(Debug, Clone)]
pub struct LperpChart {
    /// Inverse of [l_1 … l_n | a | δ].
    pub to_l: ExactMatrix,
    /// L-coordinates → z-coordinates.
    pub z_of_l: Vec<Vec<C64>>,
    /// The same map exactly: z^β-coordinate = (−2π√−1)^{−z_pow[β]}·Σ_j z_exact[β][j]·l_j.
    pub z_exact: Vec<Vec<Cyclotomic>>,
    pub z_pow: Vec<i32>,
    n: usize,
}

pub fn lperp_chart(t: &AdmissibleTriplet, sys: &MarkedEllipticRootSystem) -> LperpChart {
    let n = t.n();
    let to_l = coords_in(sys, &t.l_basis).expect("splitting");
    // z^β = Σ_j C_{jβ} l_j (up to the power of −2π√−1).
    let z_in_l: Vec<Vec<Cyclotomic>> = t
        .z_basis
        .iter()
        .map(|z| {
            let zc: Vec<Cyclotomic> = (0..n)
                .map(|j| {
                    let row = to_l.row(j);
                    row.iter().zip(z).fold(Cyclotomic::zero(), |acc, (a, b)| if a.is_zero() { acc } else { &acc + &b.scale(a) })
                })
                .collect();
            zc
        })
        .collect();
    let cm = ExactMatrix::<Cyclotomic>::from_fn(n, n, |j, beta| z_in_l[beta][j].clone());
    let cinv = cm.inverse().expect("eigenvectors span L");
    let m2pi = -two_pi_i();
    let z_of_l = (0..n)
        .map(|beta| {
            let f = m2pi.powi(-t.z_pow[beta]);
            (0..n).map(|j| cinv.get(beta, j).to_complex() * f).collect()
        })
        .collect();
    let z_exact = (0..n).map(|beta| (0..n).map(|j| cinv.get(beta, j).clone()).collect()).collect();
    LperpChart { to_l, z_of_l, z_exact, z_pow: t.z_pow.clone(), n }
}

impl LperpChart {
    pub fn decompose(&self, mu: &[Rational]) -> ChartCoords {
        let c = self.to_l.mul_vec(mu);
        let n = self.n;
        let cf: Vec<f64> = c[..n].iter().map(crate::exactcore::rational_to_f64).collect();
        let z = self.z_of_l.iter().map(|row| row.iter().zip(&cf).fold(C64::new(0.0, 0.0), |acc, (m, x)| acc + m * x)).collect();
        ChartCoords { z, a: c[n].clone(), delta: c[n + 1].clone() }
    }

    /// ⟨v, x⟩ at the point with coordinates (τ, z^1..z^n).
    pub fn pairing(&self, v: &[Rational], tau: C64, z: &[C64]) -> C64 {
        let c = self.decompose(v);
        let lin = c.z.iter().zip(z).fold(C64::new(0.0, 0.0), |acc, (a, b)| acc + a * b);
        lin - two_pi_i() * (crate::exactcore::rational_to_f64(&c.a) + tau * crate::exactcore::rational_to_f64(&c.delta))
    }

    /// ⟨v, x_τ⟩ for the point x_τ ∈ L^⊥ over τ.
    pub fn point_pairing(&self, v: &[Rational], tau: C64) -> C64 {
        self.pairing(v, tau, &vec![C64::new(0.0, 0.0); self.n])
    }

    /// g·x_τ = x_τ for every τ: ⟨x_τ, g^{-1}γ⟩ = ⟨x_τ, γ⟩ on a basis, checked exactly.
    pub fn fixed_by(&self, g: &LinearAuto, sys: &MarkedEllipticRootSystem) -> bool {
        let gi = g.inverse();
        let n = self.n;
        (0..sys.dim()).all(|i| {
            let e = sys.unit(i);
            let a = self.to_l.mul_vec(&gi.apply(&e));
            let b = self.to_l.mul_vec(&e);
            a[n] == b[n] && a[n + 1] == b[n + 1]
        })
    }

    /// ⟨α + m·a + k·δ, x_τ⟩ ≠ 0 for all finite roots and |m|, |k| ≤ bound.
    pub fn regular_at(&self, sys: &MarkedEllipticRootSystem, tau: C64, bound: i64) -> bool {
        (0..sys.finite_roots.len()).all(|i| {
            let base = self.point_pairing(&sys.finite_root_vector(i), tau);
            (-bound..=bound).all(|m| {
                (-bound..=bound).all(|k| (base - two_pi_i() * (m as f64 + tau * k as f64)).norm() > 1e-9)
            })
        })
    }
}

/// Convenience: the triplet of type r for a system, dual-normalized when possible
/// (codimension one and r = 0).
pub fn standard_triplet(sys: &MarkedEllipticRootSystem, data: &CoxeterData, r: &Rational, seed: u64) -> Result<AdmissibleTriplet, TripletError> {
    let p = regular_point(sys, data, seed)?;
    let t = build_l(sys, data, &p, r)?;
    if data.codim == 1 && r.is_zero() {
        dual_normalize(sys, data, &t)
    } else {
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::hyperbolic_coxeter;

    fn setup(t: &str) -> (MarkedEllipticRootSystem, CoxeterData) {
        let sys = MarkedEllipticRootSystem::build(t.parse().unwrap());
        let d = hyperbolic_coxeter(&sys).unwrap();
        (sys, d)
    }

    #[test]
    fn signatures_follow_the_sign_of_r() {
        for ty in ["A1", "G2", "D4", "B3"] {
            let (sys, d) = setup(ty);
            let n = sys.n();
            let p = regular_point(&sys, &d, 11).unwrap();
            for (r, want) in [(-1, (n - 1, 0, 1)), (0, (n - 1, 1, 0)), (1, (n, 0, 0))] {
                let t = build_l(&sys, &d, &p, &int(r)).unwrap();
                assert_eq!(t.signature, want, "{ty} r={r}");
                assert!(t.report.all());
                assert!(t.eigen_relations_hold(), "{ty} r={r}");
            }
        }
    }

    #[test]
    fn higher_codimension_uses_random_point() {
        let (sys, d) = setup("A3");
        assert!(d.codim >= 2);
        let p = regular_point(&sys, &d, 5).unwrap();
        assert!(p.is_regular(&sys));
        let t = build_l(&sys, &d, &p, &int(0)).unwrap();
        assert_eq!(t.l0.len(), d.codim - 1);
        assert!(t.report.all());
    }

    #[test]
    fn non_admissible_subspace_is_reported() {
        let (sys, d) = setup("G2");
        // Replace L by F^{≠1} ⊕ span(α_1): contains a root.
        let mut l = d.f_ne1.clone();
        l.push(sys.simple_root(1));
        let rep = check_admissibility(&sys, &d.ss, d.zeta_exponent, d.d_n, &d.degrees, &l);
        assert!(!rep.root_free);
        assert!(!rep.all());
        assert!(rep.clause_ii());
    }

    #[test]
    fn dual_basis_is_anti_diagonal() {
        for ty in ["G2", "D4", "F4", "E6"] {
            let (sys, d) = setup(ty);
            let t = standard_triplet(&sys, &d, &int(0), 1).unwrap();
            assert!(t.dual_normalized);
            let n = t.n();
            let g = t.z_gram_exact(&sys).expect("exact Gram");
            for i in 0..=n {
                for j in 0..=n {
                    let want = if i + j == n { Cyclotomic::one() } else { Cyclotomic::zero() };
                    assert_eq!(g.get(i, j), &want, "{ty} ({i},{j})");
                }
            }
            assert!(t.eigen_relations_hold());
        }
    }

    #[test]
    fn chart_of_lperp() {
        let (sys, d) = setup("G2");
        let t = standard_triplet(&sys, &d, &int(0), 1).unwrap();
        let ch = lperp_chart(&t, &sys);
        assert!(ch.fixed_by(&t.g, &sys));
        let tau = C64::new(0.1, 0.8);
        assert!(ch.regular_at(&sys, tau, 10));
        // z^0(x_τ) = τ and ⟨a, x_τ⟩ = −2π√−1.
        let z0 = ch.point_pairing(&sys.delta(), tau) / (-two_pi_i());
        assert!((z0 - tau).norm() < 1e-14);
        assert!((ch.point_pairing(&sys.a(), tau) + two_pi_i()).norm() < 1e-14);
        // Each z^β vanishes on L^⊥: decompose z^β's rational span members, here l ∈ L.
        for l in &t.l_basis {
            assert!(ch.point_pairing(l, tau).norm() < 1e-14);
        }
        // The z^n-coordinate of a level-m vector is m/(−2π√−1).
        let mut mu = sys.lambda0();
        mu[0] = rat(1, 3);
        let c = ch.decompose(&mu);
        assert!((c.z[t.n() - 1] - C64::new(1.0, 0.0) / (-two_pi_i())).norm() < 1e-14);
    }
}
