use super::{Cyclotomic, ExactError, Rational};
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Exact field usable as matrix entries.
pub trait Field: Clone + PartialEq + fmt::Debug + Zero + One + Send + Sync {
    fn add_ref(&self, o: &Self) -> Self;
    fn sub_ref(&self, o: &Self) -> Self;
    fn mul_ref(&self, o: &Self) -> Self;
    fn neg_ref(&self) -> Self;
    fn inv_ref(&self) -> Self;
    fn from_rational(r: &Rational) -> Self;
}

impl Field for Rational {
    fn add_ref(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn inv_ref(&self) -> Self {
        self.recip()
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
}

impl Field for Cyclotomic {
    fn add_ref(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn inv_ref(&self) -> Self {
        self.inv().expect("inverse of zero")
    }
    fn from_rational(r: &Rational) -> Self {
        Cyclotomic::from_rational(r.clone())
    }
}

/// Dense row-major matrix over an exact field.
#[derive(Clone, PartialEq)]
pub struct ExactMatrix<F: Field = Rational> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Field> fmt::Debug for ExactMatrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ExactMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        Ok(())
    }
}

/// Reduced row echelon form together with its pivot columns.
struct Echelon<F: Field> {
    m: ExactMatrix<F>,
    pivots: Vec<usize>,
}

impl<F: Field> ExactMatrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExactMatrix { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { F::one() } else { F::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ExactMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        ExactMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    /// Matrix whose columns are the given vectors (all of length `dim`).
    pub fn from_columns(dim: usize, cols: &[Vec<F>]) -> Self {
        Self::from_fn(dim, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn column(v: Vec<F>) -> Self {
        ExactMatrix { rows: v.len(), cols: 1, data: v }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<F> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<F> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<F>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> ExactMatrix<G> {
        ExactMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn scale(&self, s: &F) -> Self {
        ExactMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x.mul_ref(s)).collect() }
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self, ExactError> {
        if self.cols != o.rows {
            return Err(ExactError::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j).add_ref(&a.mul_ref(b));
                        out.set(i, j, v);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(self.cols, v.len(), "vector length mismatch");
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(F::zero(), |acc, j| {
                    let a = self.get(i, j);
                    if a.is_zero() || v[j].is_zero() {
                        acc
                    } else {
                        acc.add_ref(&a.mul_ref(&v[j]))
                    }
                })
            })
            .collect()
    }

    /// Bilinear form vᵀ M w.
    pub fn bilinear(&self, v: &[F], w: &[F]) -> F {
        let mw = self.mul_vec(w);
        v.iter().zip(&mw).fold(F::zero(), |acc, (a, b)| acc.add_ref(&a.mul_ref(b)))
    }

    pub fn pow(&self, k: u32) -> Self {
        assert!(self.is_square());
        let mut out = Self::identity(self.rows);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                out = &out * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        out
    }

    pub fn hstack(&self, o: &Self) -> Self {
        assert_eq!(self.rows, o.rows);
        Self::from_fn(self.rows, self.cols + o.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                o.get(i, j - self.cols).clone()
            }
        })
    }

    pub fn vstack(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.cols);
        Self::from_fn(self.rows + o.rows, self.cols, |i, j| {
            if i < self.rows {
                self.get(i, j).clone()
            } else {
                o.get(i - self.rows, j).clone()
            }
        })
    }

    fn echelon(&self) -> Echelon<F> {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = m.get(r, c).inv_ref();
            for j in c..m.cols {
                let v = m.get(r, j).mul_ref(&inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let rj = m.get(r, j);
                    if !rj.is_zero() {
                        let v = m.get(i, j).sub_ref(&f.mul_ref(rj));
                        m.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        Echelon { m, pivots }
    }

    pub fn rank(&self) -> usize {
        self.echelon().pivots.len()
    }

    /// Basis of the null space {v : M v = 0}; empty iff the map is injective.
    pub fn kernel(&self) -> Vec<Vec<F>> {
        let Echelon { m, pivots } = self.echelon();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![F::zero(); self.cols];
                v[fc] = F::one();
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = m.get(r, fc).neg_ref();
                }
                v
            })
            .collect()
    }

    /// Basis of the column space, chosen among the columns of the matrix.
    pub fn column_space(&self) -> Vec<Vec<F>> {
        self.echelon().pivots.iter().map(|&c| self.col(c)).collect()
    }

    /// Some solution X of M X = B (free variables set to zero).
    pub fn solve(&self, b: &Self) -> Result<Self, ExactError> {
        if b.rows != self.rows {
            return Err(ExactError::Dimension(format!("rhs has {} rows, matrix {}", b.rows, self.rows)));
        }
        let aug = self.hstack(b);
        let Echelon { m, pivots } = aug.echelon();
        if pivots.iter().any(|&p| p >= self.cols) {
            return Err(ExactError::Inconsistent);
        }
        let mut x = Self::zeros(self.cols, b.cols);
        for (r, &pc) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                x.set(pc, j, m.get(r, self.cols + j).clone());
            }
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<Self, ExactError> {
        if !self.is_square() {
            return Err(ExactError::Dimension("inverse of non-square matrix".into()));
        }
        if self.rank() < self.rows {
            return Err(ExactError::Singular);
        }
        self.solve(&Self::identity(self.rows))
    }

    pub fn determinant(&self) -> F {
        assert!(self.is_square());
        let mut m = self.clone();
        let n = self.rows;
        let mut det = F::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m.get(i, c).is_zero()) else {
                return F::zero();
            };
            if p != c {
                for j in 0..n {
                    m.data.swap(p * n + j, c * n + j);
                }
                det = det.neg_ref();
            }
            let piv = m.get(c, c).clone();
            det = det.mul_ref(&piv);
            let inv = piv.inv_ref();
            for i in c + 1..n {
                let f = m.get(i, c).mul_ref(&inv);
                if f.is_zero() {
                    continue;
                }
                for j in c..n {
                    let v = m.get(i, j).sub_ref(&f.mul_ref(m.get(c, j)));
                    m.set(i, j, v);
                }
            }
        }
        det
    }

    /// Kernel of (M − λ·id).
    pub fn eigenspace(&self, eigenvalue: &F) -> Vec<Vec<F>> {
        assert!(self.is_square());
        let shifted = Self::from_fn(self.rows, self.cols, |i, j| {
            if i == j {
                self.get(i, j).sub_ref(eigenvalue)
            } else {
                self.get(i, j).clone()
            }
        });
        shifted.kernel()
    }
}

impl ExactMatrix<Rational> {
    pub fn from_ints(rows: &[Vec<i64>]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| super::int(x)).collect()).collect())
    }

    pub fn to_cyclotomic(&self) -> ExactMatrix<Cyclotomic> {
        self.map(|x| Cyclotomic::from_rational(x.clone()))
    }

    /// Signature (positive, zero, negative) of a symmetric rational matrix, computed by
    /// symmetric congruence diagonalization.
    pub fn signature(&self) -> Result<(usize, usize, usize), ExactError> {
        if !self.is_symmetric() {
            return Err(ExactError::NotSymmetric);
        }
        let n = self.rows;
        let mut a = self.clone();
        let (mut p, mut z, mut m) = (0, 0, 0);
        let mut k = 0;
        while k < n {
            // Bring a nonzero diagonal entry to position k if possible.
            if a.get(k, k).is_zero() {
                if let Some(i) = (k + 1..n).find(|&i| !a.get(i, i).is_zero()) {
                    a.swap_sym(k, i);
                } else if let Some(j) = (k + 1..n).find(|&j| !a.get(k, j).is_zero()) {
                    // a_kk = a_jj = 0 with a_kj ≠ 0: replace e_k by e_k + e_j.
                    a.add_sym(k, j);
                } else {
                    // Row k vanishes entirely.
                    z += 1;
                    k += 1;
                    continue;
                }
            }
            let piv = a.get(k, k).clone();
            if piv.is_positive() {
                p += 1;
            } else {
                m += 1;
            }
            for i in k + 1..n {
                let f = a.get(i, k) / &piv;
                if f.is_zero() {
                    continue;
                }
                for j in k..n {
                    let v = a.get(i, j) - &f * a.get(k, j);
                    a.set(i, j, v);
                }
                for j in k..n {
                    let v = a.get(j, i) - &f * a.get(j, k);
                    a.set(j, i, v);
                }
            }
            k += 1;
        }
        Ok((p, z, m))
    }

    fn swap_sym(&mut self, i: usize, j: usize) {
        let n = self.rows;
        for c in 0..n {
            self.data.swap(i * n + c, j * n + c);
        }
        for r in 0..n {
            self.data.swap(r * n + i, r * n + j);
        }
    }

    /// Congruence by the elementary matrix replacing basis vector i with e_i + e_j.
    fn add_sym(&mut self, i: usize, j: usize) {
        let n = self.rows;
        for c in 0..n {
            let v = self.get(i, c) + self.get(j, c);
            self.set(i, c, v);
        }
        for r in 0..n {
            let v = self.get(r, i) + self.get(r, j);
            self.set(r, i, v);
        }
    }
}

impl<F: Field> Mul for &ExactMatrix<F> {
    type Output = ExactMatrix<F>;
    fn mul(self, o: &ExactMatrix<F>) -> ExactMatrix<F> {
        self.try_mul(o).expect("matrix dimension mismatch")
    }
}

impl<F: Field> Add for &ExactMatrix<F> {
    type Output = ExactMatrix<F>;
    fn add(self, o: &ExactMatrix<F>) -> ExactMatrix<F> {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.add_ref(b)).collect(),
        }
    }
}

impl<F: Field> Sub for &ExactMatrix<F> {
    type Output = ExactMatrix<F>;
    fn sub(self, o: &ExactMatrix<F>) -> ExactMatrix<F> {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.sub_ref(b)).collect(),
        }
    }
}

impl<F: Field> Neg for &ExactMatrix<F> {
    type Output = ExactMatrix<F>;
    fn neg(self) -> ExactMatrix<F> {
        self.map(|x| x.neg_ref())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactcore::{int, rat};

    #[test]
    fn kernel_trivial_cases() {
        assert!(ExactMatrix::<Rational>::identity(3).kernel().is_empty());
        assert_eq!(ExactMatrix::<Rational>::zeros(2, 2).kernel().len(), 2);
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let m = ExactMatrix::from_ints(&[vec![1, 2, 3, 4], vec![2, 4, 6, 8], vec![0, 1, 1, 0]]);
        let k = m.kernel();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(m.mul_vec(v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn signature_small() {
        let d = ExactMatrix::from_ints(&[vec![1, 0], vec![0, -1]]);
        assert_eq!(d.signature().unwrap(), (1, 0, 1));
        let h = ExactMatrix::from_ints(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(h.signature().unwrap(), (1, 0, 1));
        let s = ExactMatrix::from_ints(&[vec![0, 0, 0], vec![0, 2, -1], vec![0, -1, 2]]);
        assert_eq!(s.signature().unwrap(), (2, 1, 0));
        let ns = ExactMatrix::from_ints(&[vec![0, 1], vec![2, 0]]);
        assert_eq!(ns.signature(), Err(ExactError::NotSymmetric));
    }

    #[test]
    fn solve_and_inverse() {
        let m = ExactMatrix::from_rows(vec![vec![rat(1, 2), int(1)], vec![int(3), int(4)]]);
        let inv = m.inverse().unwrap();
        assert_eq!(&m * &inv, ExactMatrix::identity(2));
        assert_eq!(m.determinant(), rat(-1, 1));
        let singular = ExactMatrix::from_ints(&[vec![1, 2], vec![2, 4]]);
        assert_eq!(singular.inverse(), Err(ExactError::Singular));
        let b = ExactMatrix::column(vec![int(1), int(1)]);
        assert_eq!(singular.solve(&b), Err(ExactError::Inconsistent));
    }

    #[test]
    fn eigenspace_of_rotation_over_cyclotomic_field() {
        // Rotation by 2π/3 has eigenvalues ζ_3 and ζ_3^2.
        let r = ExactMatrix::from_ints(&[vec![0, -1], vec![1, -1]]).to_cyclotomic();
        let z = Cyclotomic::root_of_unity(3, 1);
        assert_eq!(r.eigenspace(&z).len(), 1);
        assert_eq!(r.eigenspace(&Cyclotomic::root_of_unity(3, 2)).len(), 1);
        assert!(r.eigenspace(&Cyclotomic::one()).is_empty());
        assert_eq!(ExactMatrix::<Cyclotomic>::identity(3).eigenspace(&Cyclotomic::one()).len(), 3);
    }
}
