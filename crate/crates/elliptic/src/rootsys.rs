//! Marked elliptic root systems of type X_l^(1,1) and their hyperbolic extension.
//!
//! Coordinates on F̃ are taken in the basis (α_1, …, α_l, a, δ, Λ0).

use crate::coxeter::LinearAuto;
use crate::exactcore::{int, is_integer, rat, rational_gcd, ExactMatrix, Rational};
use num_traits::{One, Zero};
use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RootSysError {
    #[error("unsupported root system type {0}")]
    Unsupported(String),
    #[error("isotropic vector has no reflection")]
    Isotropic,
    #[error("subspace does not split rad I: {0}")]
    NotSplitting(String),
    #[error("malformed root system description: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

/// Finite Cartan type X_l.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CartanType {
    pub family: Family,
    pub rank: usize,
}

impl CartanType {
    pub fn new(family: Family, rank: usize) -> Result<Self, RootSysError> {
        let ok = match family {
            Family::A => rank >= 1,
            Family::B => rank >= 2,
            Family::C => rank >= 3,
            Family::D => rank >= 4,
            Family::E => (6..=8).contains(&rank),
            Family::F => rank == 4,
            Family::G => rank == 2,
        };
        if ok {
            Ok(CartanType { family, rank })
        } else {
            Err(RootSysError::Unsupported(format!("{:?}{}", family, rank)))
        }
    }

    /// Squared lengths of the simple roots (long roots have length 2) and the bonds
    /// (i, j) of the Dynkin diagram, Bourbaki numbering, zero-based.
    fn diagram(&self) -> (Vec<Rational>, Vec<(usize, usize)>) {
        let l = self.rank;
        let chain = |k: usize| (0..k.saturating_sub(1)).map(|i| (i, i + 1)).collect::<Vec<_>>();
        match self.family {
            Family::A => (vec![int(2); l], chain(l)),
            Family::B => {
                let mut n = vec![int(2); l];
                n[l - 1] = int(1);
                (n, chain(l))
            }
            Family::C => {
                let mut n = vec![int(1); l];
                n[l - 1] = int(2);
                (n, chain(l))
            }
            Family::D => {
                let mut e = chain(l - 1);
                e.push((l - 3, l - 1));
                (vec![int(2); l], e)
            }
            Family::E => {
                let mut e = vec![(0, 2), (1, 3), (2, 3)];
                e.extend((3..l - 1).map(|i| (i, i + 1)));
                (vec![int(2); l], e)
            }
            Family::F => (vec![int(2), int(2), int(1), int(1)], chain(4)),
            Family::G => (vec![rat(2, 3), int(2)], chain(2)),
        }
    }
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{}", self.family, self.rank)
    }
}

impl FromStr for CartanType {
    type Err = RootSysError;
    /// Parses labels such as `G2`, `d4`, `E8`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let mut chars = s.chars();
        let fam = match chars.next().map(|c| c.to_ascii_uppercase()) {
            Some('A') => Family::A,
            Some('B') => Family::B,
            Some('C') => Family::C,
            Some('D') => Family::D,
            Some('E') => Family::E,
            Some('F') => Family::F,
            Some('G') => Family::G,
            _ => return Err(RootSysError::Unsupported(s.to_string())),
        };
        let rank: usize = chars.as_str().parse().map_err(|_| RootSysError::Unsupported(s.to_string()))?;
        CartanType::new(fam, rank)
    }
}

/// Root α + m·a + k·δ with α a finite root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RootIndex {
    pub finite_part: usize,
    pub a_shift: i64,
    pub delta_shift: i64,
}

#[derive(Debug, Clone)]
pub struct MarkedEllipticRootSystem {
    /// Type label; `None` for systems assembled from raw data.
    pub cartan: Option<CartanType>,
    pub label: String,
    pub l: usize,
    /// Gram matrix of Ĩ on F̃.
    pub gram: ExactMatrix,
    /// Finite roots in the simple-root basis (integer rows of length l).
    pub finite_roots: Vec<Vec<i64>>,
    /// Marks of the affine diagram, index 0 is the affine vertex.
    pub marks: Vec<i64>,
    /// Comarks a_i^∨ = a_i |α_i|^2 / 2, index 0 is the affine vertex.
    pub comarks: Vec<i64>,
    /// Constant with I_R = c0·I.
    pub c0: Rational,
    /// Highest root in the simple-root basis.
    pub highest_root: Vec<i64>,
    pub degrees: Option<Vec<u32>>,
}

/// Result of the elliptic root system axioms check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub full_lattice: bool,
    pub integrality: bool,
    pub reflection_closed: bool,
    pub irreducible: bool,
    pub radical_is_a: bool,
    pub signature: (usize, usize, usize),
}

impl AxiomReport {
    pub fn all_pass(&self, n: usize) -> bool {
        self.full_lattice
            && self.integrality
            && self.reflection_closed
            && self.irreducible
            && self.radical_is_a
            && self.signature == (n, 1, 1)
    }

    pub fn violations(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        if !self.full_lattice {
            v.push("(i) Q(R) is not a full lattice");
        }
        if !self.integrality {
            v.push("(ii) I(α,β^∨) not integral");
        }
        if !self.reflection_closed {
            v.push("(iii) w_α(R) ≠ R");
        }
        if !self.irreducible {
            v.push("(iv) R decomposes orthogonally");
        }
        if !self.radical_is_a {
            v.push("rad Ĩ ≠ ℝa");
        }
        v
    }
}

impl MarkedEllipticRootSystem {
    pub fn build(cartan: CartanType) -> Self {
        let l = cartan.rank;
        let (norms, bonds) = cartan.diagram();
        let mut fin = ExactMatrix::<Rational>::zeros(l, l);
        for i in 0..l {
            fin.set(i, i, norms[i].clone());
        }
        for &(i, j) in &bonds {
            let v = -std::cmp::max(norms[i].clone(), norms[j].clone()) / int(2);
            fin.set(i, j, v.clone());
            fin.set(j, i, v);
        }
        let roots = positive_roots(&fin);
        let mut finite_roots: Vec<Vec<i64>> = roots.clone();
        finite_roots.extend(roots.iter().map(|r| r.iter().map(|x| -x).collect::<Vec<_>>()));
        let highest = roots.iter().max_by_key(|r| r.iter().sum::<i64>()).unwrap().clone();
        let mut sys = Self::assemble(Some(cartan), cartan.to_string(), &fin, finite_roots);
        sys.highest_root = highest.clone();
        sys.marks = std::iter::once(1).chain(highest.iter().copied()).collect();
        sys.comarks = std::iter::once(1)
            .chain((0..l).map(|i| {
                let c = int(highest[i]) * fin.get(i, i) / int(2);
                assert!(is_integer(&c));
                c.to_integer().try_into().unwrap()
            }))
            .collect();
        sys
    }

    /// Assembles a system from a finite Gram matrix (simple-root basis) and a finite
    /// root list; used for serialized input and for negative controls.
    pub fn assemble(cartan: Option<CartanType>, label: String, fin: &ExactMatrix, finite_roots: Vec<Vec<i64>>) -> Self {
        let l = fin.rows();
        let gram = ExactMatrix::from_fn(l + 3, l + 3, |i, j| {
            if i < l && j < l {
                fin.get(i, j).clone()
            } else if (i == l + 1 && j == l + 2) || (i == l + 2 && j == l + 1) {
                Rational::one()
            } else {
                Rational::zero()
            }
        });
        let mut sys = MarkedEllipticRootSystem {
            cartan,
            label,
            l,
            gram,
            finite_roots,
            marks: Vec::new(),
            comarks: Vec::new(),
            c0: Rational::one(),
            highest_root: Vec::new(),
            degrees: None,
        };
        sys.c0 = sys.compute_c0();
        sys
    }

    pub fn dim(&self) -> usize {
        self.l + 3
    }

    pub fn n(&self) -> usize {
        self.l + 1
    }

    pub fn idx_a(&self) -> usize {
        self.l
    }

    pub fn idx_delta(&self) -> usize {
        self.l + 1
    }

    pub fn idx_lambda0(&self) -> usize {
        self.l + 2
    }

    pub fn unit(&self, i: usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.dim()];
        v[i] = Rational::one();
        v
    }

    pub fn a(&self) -> Vec<Rational> {
        self.unit(self.idx_a())
    }

    pub fn delta(&self) -> Vec<Rational> {
        self.unit(self.idx_delta())
    }

    pub fn lambda0(&self) -> Vec<Rational> {
        self.unit(self.idx_lambda0())
    }

    /// Finite Gram block on the simple roots.
    pub fn finite_gram(&self) -> ExactMatrix {
        ExactMatrix::from_fn(self.l, self.l, |i, j| self.gram.get(i, j).clone())
    }

    pub fn form(&self, u: &[Rational], v: &[Rational]) -> Rational {
        self.gram.bilinear(u, v)
    }

    /// Vector of F̃ for the root α + m·a + k·δ.
    pub fn root_vector(&self, r: RootIndex) -> Vec<Rational> {
        let mut v: Vec<Rational> = self.finite_roots[r.finite_part].iter().map(|&x| int(x)).collect();
        v.push(int(r.a_shift));
        v.push(int(r.delta_shift));
        v.push(Rational::zero());
        v
    }

    pub fn finite_root_vector(&self, i: usize) -> Vec<Rational> {
        self.root_vector(RootIndex { finite_part: i, a_shift: 0, delta_shift: 0 })
    }

    /// α_0 = δ − θ.
    pub fn affine_root(&self) -> Vec<Rational> {
        let mut v: Vec<Rational> = self.highest_root.iter().map(|&x| int(-x)).collect();
        v.push(Rational::zero());
        v.push(Rational::one());
        v.push(Rational::zero());
        v
    }

    pub fn simple_root(&self, i: usize) -> Vec<Rational> {
        self.unit(i)
    }

    pub fn coroot(&self, v: &[Rational]) -> Result<Vec<Rational>, RootSysError> {
        let nn = self.form(v, v);
        if nn.is_zero() {
            return Err(RootSysError::Isotropic);
        }
        let s = int(2) / nn;
        Ok(v.iter().map(|x| x * &s).collect())
    }

    /// w̃_v(u) = u − Ĩ(u, v^∨) v.
    pub fn reflection(&self, v: &[Rational]) -> Result<LinearAuto, RootSysError> {
        let cv = self.coroot(v)?;
        let gcv = self.gram.mul_vec(&cv);
        let d = self.dim();
        let m = ExactMatrix::from_fn(d, d, |i, j| {
            let id = if i == j { Rational::one() } else { Rational::zero() };
            id - &v[i] * &gcv[j]
        });
        Ok(LinearAuto::new(self, m))
    }

    /// Reflection in a root given by index.
    pub fn root_reflection(&self, r: RootIndex) -> LinearAuto {
        self.reflection(&self.root_vector(r)).expect("roots are non-isotropic")
    }

    fn finite_root_set(&self) -> HashSet<Vec<i64>> {
        self.finite_roots.iter().cloned().collect()
    }

    fn finite_pairing(&self, i: usize, j: usize) -> Rational {
        // I(α_i, α_j^∨) for finite roots given by index.
        let u = self.finite_root_vector(i);
        let v = self.finite_root_vector(j);
        int(2) * self.form(&u, &v) / self.form(&v, &v)
    }

    pub fn axioms_check(&self) -> AxiomReport {
        let l = self.l;
        let nr = self.finite_roots.len();
        // (i): all coordinates integral, the simple-root basis vectors are roots, and the
        // root vectors together with a, δ span F.
        let set = self.finite_root_set();
        let integral_basis = (0..l).all(|i| {
            let mut e = vec![0i64; l];
            e[i] = 1;
            set.contains(&e)
        });
        let mut cols: Vec<Vec<Rational>> = (0..nr).map(|i| self.finite_root_vector(i)[..l + 2].to_vec()).collect();
        cols.push(self.a()[..l + 2].to_vec());
        cols.push(self.delta()[..l + 2].to_vec());
        let full_rank = ExactMatrix::from_columns(l + 2, &cols).rank() == l + 2;
        let full_lattice = integral_basis && full_rank;

        let integrality = (0..nr).all(|i| (0..nr).all(|j| is_integer(&self.finite_pairing(i, j))));

        let reflection_closed = integrality
            && (0..nr).all(|j| {
                (0..nr).all(|i| {
                    let p = self.finite_pairing(i, j).to_integer();
                    let p: i64 = p.try_into().unwrap_or(i64::MAX);
                    let img: Vec<i64> = self.finite_roots[i]
                        .iter()
                        .zip(&self.finite_roots[j])
                        .map(|(x, y)| x - p * y)
                        .collect();
                    set.contains(&img)
                })
            });

        let irreducible = {
            let mut seen = vec![false; nr];
            let mut queue = VecDeque::new();
            if nr > 0 {
                seen[0] = true;
                queue.push_back(0);
            }
            while let Some(i) = queue.pop_front() {
                for j in 0..nr {
                    if !seen[j] && !self.finite_pairing(i, j).is_zero() {
                        seen[j] = true;
                        queue.push_back(j);
                    }
                }
            }
            seen.iter().all(|&s| s)
        };

        let rad = self.gram.kernel();
        let radical_is_a = rad.len() == 1 && {
            let v = &rad[0];
            (0..self.dim()).all(|i| i == self.idx_a() || v[i].is_zero())
        };
        let signature = self.gram.signature().expect("gram is symmetric");
        AxiomReport { full_lattice, integrality, reflection_closed, irreducible, radical_is_a, signature }
    }

    /// The least positive c0 making c0·I an even form on the coroot lattice.
    fn compute_c0(&self) -> Rational {
        let l = self.l;
        let fin = self.finite_gram();
        let cor: Vec<Vec<Rational>> = (0..l)
            .map(|i| {
                let s = int(2) / fin.get(i, i);
                (0..l).map(|k| if k == i { s.clone() } else { Rational::zero() }).collect()
            })
            .collect();
        let mut vals = Vec::new();
        for i in 0..l {
            for j in 0..l {
                let p = fin.bilinear(&cor[i], &cor[j]);
                vals.push(if i == j { p / int(2) } else { p });
            }
        }
        let g = rational_gcd(vals.iter());
        if g.is_zero() {
            Rational::one()
        } else {
            g.recip()
        }
    }

    /// Decides whether some root α + m·a + k·δ lies in the span of `basis`, which must
    /// be a complement of rad I = span(a, δ) in F̃. Returns the offending root if any.
    pub fn root_in_subspace(&self, basis: &[Vec<Rational>]) -> Result<Option<RootIndex>, RootSysError> {
        let d = self.dim();
        if basis.len() != self.n() {
            return Err(RootSysError::NotSplitting(format!("expected {} vectors, got {}", self.n(), basis.len())));
        }
        let mut cols = basis.to_vec();
        cols.push(self.a());
        cols.push(self.delta());
        let m = ExactMatrix::from_columns(d, &cols);
        if m.rank() != d {
            return Err(RootSysError::NotSplitting("L + rad I is not all of F̃".into()));
        }
        let rhs = ExactMatrix::from_columns(d, &(0..self.finite_roots.len()).map(|i| self.finite_root_vector(i)).collect::<Vec<_>>());
        let sol = m.solve(&rhs).expect("square invertible");
        let nb = basis.len();
        for i in 0..self.finite_roots.len() {
            let u = sol.get(nb, i);
            let v = sol.get(nb + 1, i);
            if is_integer(u) && is_integer(v) {
                let u: i64 = u.to_integer().try_into().unwrap();
                let v: i64 = v.to_integer().try_into().unwrap();
                return Ok(Some(RootIndex { finite_part: i, a_shift: -u, delta_shift: -v }));
            }
        }
        Ok(None)
    }

    /// Generators used for group-level checks: w̃_{α_i} and w̃_{α_i + a} for the affine
    /// vertices α_0, …, α_l.
    pub fn generators(&self) -> Vec<LinearAuto> {
        let mut out = Vec::new();
        let mut verts = vec![self.affine_root()];
        verts.extend((0..self.l).map(|i| self.simple_root(i)));
        for v in &verts {
            out.push(self.reflection(v).unwrap());
            let mut va = v.clone();
            va[self.idx_a()] += Rational::one();
            out.push(self.reflection(&va).unwrap());
        }
        out
    }

    /// Positive generator s0 of the shifts Λ0 ↦ Λ0 + s·a realized inside W by the
    /// Heisenberg relations between the translations T_a(α^∨) = w̃_{α+a}w̃_α,
    /// T_δ(α^∨) = w̃_{α+δ}w̃_α and T_{a+δ}(α^∨) = w̃_{α+a+δ}w̃_α, together with the
    /// commutators of a- and δ-translations along different simple coroots.
    pub fn k_integral_step(&self) -> Rational {
        let l = self.l;
        let shifted = |v: &[Rational], da: i64, dd: i64| {
            let mut w = v.to_vec();
            w[self.idx_a()] += int(da);
            w[self.idx_delta()] += int(dd);
            w
        };
        let translation = |v: &[Rational], da: i64, dd: i64| {
            self.reflection(&shifted(v, da, dd)).unwrap().compose(&self.reflection(v).unwrap())
        };
        let mut shifts = Vec::new();
        for i in 0..l {
            let ai = self.simple_root(i);
            let ta = translation(&ai, 1, 0);
            let td = translation(&ai, 0, 1);
            let tad = translation(&ai, 1, 1);
            let k = tad.inverse().compose(&ta).compose(&td);
            shifts.extend(k.k_shift(self));
            for j in 0..l {
                let tdj = translation(&self.simple_root(j), 0, 1);
                let comm = ta.compose(&tdj).compose(&ta.inverse()).compose(&tdj.inverse());
                shifts.extend(comm.k_shift(self));
            }
        }
        rational_gcd(shifts.iter())
    }

    /// Serializes to the text exchange format (type, rank, Gram rows, finite roots).
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("type {}\n", self.label));
        s.push_str(&format!("rank {}\n", self.l));
        s.push_str("gram\n");
        for i in 0..self.dim() {
            let row: Vec<String> = (0..self.dim()).map(|j| crate::exactcore::format_rational(self.gram.get(i, j))).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s.push_str("roots\n");
        for r in &self.finite_roots {
            let row: Vec<String> = r.iter().map(|x| x.to_string()).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, RootSysError> {
        let bad = |m: &str| RootSysError::Malformed(m.to_string());
        let mut lines = text.lines().map(str::trim).filter(|x| !x.is_empty() && !x.starts_with('#'));
        let label = lines.next().and_then(|x| x.strip_prefix("type ")).ok_or_else(|| bad("missing type line"))?.trim().to_string();
        let l: usize = lines
            .next()
            .and_then(|x| x.strip_prefix("rank "))
            .and_then(|x| x.trim().parse().ok())
            .ok_or_else(|| bad("missing rank line"))?;
        if lines.next() != Some("gram") {
            return Err(bad("missing gram section"));
        }
        let mut rows = Vec::new();
        for _ in 0..l + 3 {
            let line = lines.next().ok_or_else(|| bad("short gram"))?;
            let row: Result<Vec<Rational>, _> = line.split_whitespace().map(crate::exactcore::parse_rational).collect();
            let row = row.map_err(|e| RootSysError::Malformed(e.to_string()))?;
            if row.len() != l + 3 {
                return Err(bad("gram row length"));
            }
            rows.push(row);
        }
        let gram = ExactMatrix::from_rows(rows);
        if lines.next() != Some("roots") {
            return Err(bad("missing roots section"));
        }
        let mut roots = Vec::new();
        for line in lines {
            let r: Result<Vec<i64>, _> = line.split_whitespace().map(str::parse).collect();
            let r = r.map_err(|_| bad("root row"))?;
            if r.len() != l {
                return Err(bad("root row length"));
            }
            roots.push(r);
        }
        let fin = ExactMatrix::from_fn(l, l, |i, j| gram.get(i, j).clone());
        let cartan = label.parse::<CartanType>().ok().filter(|c| c.rank == l);
        let mut sys = match cartan {
            Some(c) => {
                let built = Self::build(c);
                if built.finite_gram() == fin {
                    built
                } else {
                    Self::assemble(Some(c), label.clone(), &fin, roots.clone())
                }
            }
            None => Self::assemble(None, label.clone(), &fin, roots.clone()),
        };
        sys.gram = gram;
        sys.finite_roots = roots;
        Ok(sys)
    }
}

/// Positive roots (simple-root coordinates) of the finite system with the given Gram
/// matrix, generated by α-string closure in order of height.
fn positive_roots(fin: &ExactMatrix) -> Vec<Vec<i64>> {
    let l = fin.rows();
    let pair = |r: &[i64], i: usize| -> i64 {
        // ⟨r, α_i^∨⟩
        let s: Rational = (0..l).map(|k| int(r[k]) * fin.get(k, i)).sum();
        let v = int(2) * s / fin.get(i, i);
        v.to_integer().try_into().unwrap()
    };
    let mut set: BTreeSet<Vec<i64>> = BTreeSet::new();
    let mut layer: Vec<Vec<i64>> = (0..l)
        .map(|i| {
            let mut e = vec![0; l];
            e[i] = 1;
            e
        })
        .collect();
    set.extend(layer.iter().cloned());
    while !layer.is_empty() {
        let mut next = Vec::new();
        for r in &layer {
            for i in 0..l {
                // p = largest k with r − kα_i a root.
                let mut p = 0;
                loop {
                    let mut s = r.clone();
                    s[i] -= p + 1;
                    if set.contains(&s) {
                        p += 1;
                    } else {
                        break;
                    }
                }
                let q = p - pair(r, i);
                if q > 0 {
                    let mut s = r.clone();
                    s[i] += 1;
                    if set.insert(s.clone()) {
                        next.push(s);
                    }
                }
            }
        }
        layer = next;
    }
    set.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(s: &str) -> MarkedEllipticRootSystem {
        MarkedEllipticRootSystem::build(s.parse().unwrap())
    }

    #[test]
    fn root_counts() {
        // |R_fin| = l·h.
        for (t, count) in [("A1", 2), ("A3", 12), ("B3", 18), ("C3", 18), ("D4", 24), ("G2", 12), ("F4", 48), ("E6", 72)] {
            assert_eq!(sys(t).finite_roots.len(), count, "{t}");
        }
    }

    #[test]
    fn marks_and_comarks() {
        assert_eq!(sys("G2").marks, vec![1, 3, 2]);
        assert_eq!(sys("G2").comarks, vec![1, 1, 2]);
        assert_eq!(sys("F4").marks, vec![1, 2, 3, 4, 2]);
        assert_eq!(sys("F4").comarks, vec![1, 2, 3, 2, 1]);
        assert_eq!(sys("D4").comarks, vec![1, 1, 2, 1, 1]);
        assert_eq!(sys("E8").marks, vec![1, 2, 3, 4, 6, 5, 4, 3, 2]);
    }

    #[test]
    fn dimensions() {
        assert_eq!(sys("A1").dim(), 4);
        let g = sys("G2");
        assert_eq!((g.dim(), g.n()), (5, 3));
    }

    #[test]
    fn reflection_basics() {
        let s = sys("G2");
        for i in 0..s.finite_roots.len() {
            let v = s.finite_root_vector(i);
            let w = s.reflection(&v).unwrap();
            let img = w.apply(&v);
            assert_eq!(img, v.iter().map(|x| -x).collect::<Vec<_>>());
            assert_eq!(w.compose(&w).matrix, ExactMatrix::identity(s.dim()));
            assert!(w.preserves_form && w.maps_f_into_f && w.fixes_rad);
        }
        assert!(s.reflection(&s.a()).is_err());
    }

    #[test]
    fn c0_is_one_in_long_root_normalization() {
        for t in ["A1", "B3", "C3", "D4", "F4", "G2", "E6"] {
            assert_eq!(sys(t).c0, Rational::one(), "{t}");
        }
    }

    #[test]
    fn text_round_trip_preserves_data() {
        let s = sys("F4");
        let t = MarkedEllipticRootSystem::from_text(&s.to_text()).unwrap();
        assert_eq!(t.gram, s.gram);
        assert_eq!(t.finite_roots, s.finite_roots);
        assert_eq!(t.comarks, s.comarks);
    }
}
