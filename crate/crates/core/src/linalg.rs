//! Dense exact matrices over a [`Field`].
//!
//! Every elimination routine pivots on the first nonzero entry in scan order,
//! so results (kernels, solutions, normal forms) are deterministic.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::Field;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<F: Field> {
    field: F,
    rows: usize,
    cols: usize,
    data: Vec<F::Elem>,
}

/// `T = U * diag(I_r, 0) * W` with `U`, `W` invertible.
#[derive(Debug, Clone, PartialEq)]
pub struct RankNormalForm<F: Field> {
    pub u: Matrix<F>,
    pub rank: usize,
    pub w: Matrix<F>,
}

impl<F: Field> Matrix<F> {
    pub fn new(field: F, rows: usize, cols: usize, data: Vec<F::Elem>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: format!("{} entries", rows * cols),
                got: format!("{}", data.len()),
            });
        }
        Ok(Matrix { field, rows, cols, data })
    }

    pub fn zeros(field: F, rows: usize, cols: usize) -> Self {
        let data = alloc::vec![field.zero(); rows * cols];
        Matrix { field, rows, cols, data }
    }

    pub fn identity(field: F, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = m.field.one();
        }
        m
    }

    pub fn from_fn(field: F, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F::Elem) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { field, rows, cols, data }
    }

    /// Small integer literals, mostly for tests and fixed data.
    pub fn from_i64_rows(field: F, rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self::from_fn(field.clone(), r, c, |i, j| field.from_i64(rows[i][j]))
    }

    pub fn diagonal(field: F, entries: &[F::Elem]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(field, n, n);
        for (i, e) in entries.iter().enumerate() {
            m.data[i * n + i] = e.clone();
        }
        m
    }

    /// The matrix unit `E_ij` (0-based).
    pub fn unit(field: F, n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        m.data[i * n + j] = m.field.one();
        m
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[F::Elem] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [F::Elem] {
        &mut self.data
    }

    pub fn get(&self, i: usize, j: usize) -> &F::Elem {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F::Elem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[F::Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<F::Elem> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| self.field.is_zero(x))
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let x = self.get(i, j);
                    if i == j {
                        self.field.is_one(x)
                    } else {
                        self.field.is_zero(x)
                    }
                })
            })
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: format!("{}x{}", self.rows, self.cols),
                got: format!("{}x{}", other.rows, other.cols),
            });
        }
        Ok(())
    }

    pub fn mat_mul(&self, other: &Self) -> Result<Self> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: format!("{} rows", self.cols),
                got: format!("{} rows", other.rows),
            });
        }
        let f = &self.field;
        let mut out = Self::zeros(f.clone(), self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if f.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if f.is_zero(b) {
                        continue;
                    }
                    let idx = i * other.cols + j;
                    out.data[idx] = f.add(&out.data[idx], &f.mul(a, b));
                }
            }
        }
        Ok(out)
    }

    /// Product of same-shape square matrices; panics on mismatch.
    pub fn mul(&self, other: &Self) -> Self {
        self.mat_mul(other).expect("compatible operands")
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let f = &self.field;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| f.add(a, b)).collect();
        Ok(Matrix { field: f.clone(), rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let f = &self.field;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| f.sub(a, b)).collect();
        Ok(Matrix { field: f.clone(), rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        let f = &self.field;
        let data = self.data.iter().map(|a| f.mul(a, c)).collect();
        Matrix { field: f.clone(), rows: self.rows, cols: self.cols, data }
    }

    pub fn neg(&self) -> Self {
        let f = &self.field;
        let data = self.data.iter().map(|a| f.neg(a)).collect();
        Matrix { field: f.clone(), rows: self.rows, cols: self.cols, data }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.field.clone(), self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul_vec(&self, v: &[F::Elem]) -> Result<Vec<F::Elem>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: format!("vector of length {}", self.cols),
                got: format!("{}", v.len()),
            });
        }
        let f = &self.field;
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(f.zero(), |acc, (a, b)| f.add(&acc, &f.mul(a, b)))
            })
            .collect())
    }

    pub fn trace(&self) -> Result<F::Elem> {
        if !self.is_square() {
            return Err(Error::NotSquare);
        }
        let f = &self.field;
        Ok((0..self.rows).fold(f.zero(), |acc, i| f.add(&acc, self.get(i, i))))
    }

    pub fn is_upper_triangular(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self.field.is_zero(self.get(i, j))))
    }

    pub fn is_lower_triangular(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self.field.is_zero(self.get(i, j))))
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// `row[target] += c * row[source]`
    pub fn add_row_multiple(&mut self, target: usize, source: usize, c: &F::Elem) {
        if self.field.is_zero(c) {
            return;
        }
        for j in 0..self.cols {
            let s = self.field.mul(c, self.get(source, j));
            let idx = target * self.cols + j;
            self.data[idx] = self.field.add(&self.data[idx], &s);
        }
    }

    /// `col[target] += c * col[source]`
    pub fn add_col_multiple(&mut self, target: usize, source: usize, c: &F::Elem) {
        if self.field.is_zero(c) {
            return;
        }
        for i in 0..self.rows {
            let s = self.field.mul(c, self.get(i, source));
            let idx = i * self.cols + target;
            self.data[idx] = self.field.add(&self.data[idx], &s);
        }
    }

    pub fn scale_row(&mut self, i: usize, c: &F::Elem) {
        for j in 0..self.cols {
            let idx = i * self.cols + j;
            self.data[idx] = self.field.mul(&self.data[idx], c);
        }
    }

    pub fn scale_col(&mut self, j: usize, c: &F::Elem) {
        for i in 0..self.rows {
            let idx = i * self.cols + j;
            self.data[idx] = self.field.mul(&self.data[idx], c);
        }
    }

    /// Exact determinant by Gaussian elimination.
    pub fn determinant(&self) -> Result<F::Elem> {
        if !self.is_square() {
            return Err(Error::NotSquare);
        }
        let f = self.field.clone();
        let n = self.rows;
        let mut m = self.clone();
        let mut det = f.one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !f.is_zero(m.get(i, k))) else {
                return Ok(f.zero());
            };
            if p != k {
                m.swap_rows(p, k);
                det = f.neg(&det);
            }
            let pivot = m.get(k, k).clone();
            det = f.mul(&det, &pivot);
            let pinv = f.inv(&pivot)?;
            for i in k + 1..n {
                let c = f.neg(&f.mul(m.get(i, k), &pinv));
                m.add_row_multiple(i, k, &c);
            }
        }
        Ok(det)
    }

    /// Reduced row-echelon form and pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let f = self.field.clone();
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !f.is_zero(m.get(i, c))) else {
                continue;
            };
            m.swap_rows(p, r);
            let inv = f.inv(m.get(r, c)).expect("pivot is nonzero");
            m.scale_row(r, &inv);
            for i in 0..self.rows {
                if i != r && !f.is_zero(m.get(i, c)) {
                    let coef = f.neg(m.get(i, c));
                    m.add_row_multiple(i, r, &coef);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::NotSquare);
        }
        let n = self.rows;
        let f = self.field.clone();
        let aug = Self::from_fn(f.clone(), n, 2 * n, |i, j| {
            if j < n {
                self.get(i, j).clone()
            } else if j - n == i {
                f.one()
            } else {
                f.zero()
            }
        });
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::Singular);
        }
        Ok(Self::from_fn(f, n, n, |i, j| r.get(i, n + j).clone()))
    }

    /// One solution of `A x = b`; free variables are set to zero.
    pub fn solve(&self, b: &[F::Elem]) -> Result<Vec<F::Elem>> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: format!("right-hand side of length {}", self.rows),
                got: format!("{}", b.len()),
            });
        }
        let f = self.field.clone();
        let n = self.cols;
        let aug = Self::from_fn(f.clone(), self.rows, n + 1, |i, j| {
            if j < n {
                self.get(i, j).clone()
            } else {
                b[i].clone()
            }
        });
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&n) {
            return Err(Error::Inconsistent);
        }
        let mut x = alloc::vec![f.zero(); n];
        for (row, &c) in pivots.iter().enumerate() {
            x[c] = r.get(row, n).clone();
        }
        Ok(x)
    }

    /// Null-space basis, one vector per free column in increasing order.
    pub fn kernel_basis(&self) -> Vec<Vec<F::Elem>> {
        let f = self.field.clone();
        let (r, pivots) = self.rref();
        let mut basis = Vec::new();
        let mut next_pivot = 0;
        for free in 0..self.cols {
            if next_pivot < pivots.len() && pivots[next_pivot] == free {
                next_pivot += 1;
                continue;
            }
            let mut v = alloc::vec![f.zero(); self.cols];
            v[free] = f.one();
            for (row, &c) in pivots.iter().enumerate() {
                v[c] = f.neg(r.get(row, free));
            }
            basis.push(v);
        }
        basis
    }

    /// Full Gauss-Jordan with recorded row and column operations.
    ///
    /// Row operations `R` and column operations `C` bring the matrix to
    /// `R T C = diag(I_r, 0)`; then `U = R^-1`, `W = C^-1`.
    pub fn rank_normal_form(&self) -> Result<RankNormalForm<F>> {
        if !self.is_square() {
            return Err(Error::NotSquare);
        }
        let f = self.field.clone();
        let d = self.rows;
        let mut m = self.clone();
        let mut rops = Self::identity(f.clone(), d);
        let mut cops = Self::identity(f.clone(), d);
        let mut rank = 0;
        while rank < d {
            let Some((pi, pj)) = (rank..d)
                .flat_map(|i| (rank..d).map(move |j| (i, j)))
                .find(|&(i, j)| !f.is_zero(m.get(i, j)))
            else {
                break;
            };
            m.swap_rows(rank, pi);
            rops.swap_rows(rank, pi);
            m.swap_cols(rank, pj);
            cops.swap_cols(rank, pj);
            let inv = f.inv(m.get(rank, rank))?;
            m.scale_row(rank, &inv);
            rops.scale_row(rank, &inv);
            for i in 0..d {
                if i != rank && !f.is_zero(m.get(i, rank)) {
                    let c = f.neg(m.get(i, rank));
                    m.add_row_multiple(i, rank, &c);
                    rops.add_row_multiple(i, rank, &c);
                }
            }
            for j in 0..d {
                if j != rank && !f.is_zero(m.get(rank, j)) {
                    let c = f.neg(m.get(rank, j));
                    m.add_col_multiple(j, rank, &c);
                    cops.add_col_multiple(j, rank, &c);
                }
            }
            rank += 1;
        }
        Ok(RankNormalForm {
            u: rops.inverse()?,
            rank,
            w: cops.inverse()?,
        })
    }

    /// `diag(I_r, 0)` of size `d`.
    pub fn partial_identity(field: F, d: usize, r: usize) -> Self {
        let mut m = Self::zeros(field, d, d);
        for i in 0..r.min(d) {
            m.data[i * d + i] = m.field.one();
        }
        m
    }
}

impl<F: Field> RankNormalForm<F> {
    pub fn reconstruct(&self) -> Matrix<F> {
        let d = self.u.rows();
        let mid = Matrix::partial_identity(self.u.field().clone(), d, self.rank);
        self.u.mul(&mid).mul(&self.w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};
    use crate::rational::Rational;

    fn q(rows: &[&[i64]]) -> Matrix<Rationals> {
        Matrix::from_i64_rows(Rationals, rows)
    }

    #[test]
    fn mat_mul_examples() {
        let e12 = Matrix::unit(Rationals, 2, 0, 1);
        let e21 = Matrix::unit(Rationals, 2, 1, 0);
        assert_eq!(e12.mul(&e21), Matrix::unit(Rationals, 2, 0, 0));
        let r_plus = q(&[&[1, 1], &[-1, -1]]);
        assert!(r_plus.mul(&r_plus).is_zero());
        let a = q(&[&[1, 2], &[3, 4]]);
        assert_eq!(Matrix::identity(Rationals, 2).mul(&a), a);
        assert!(matches!(a.mat_mul(&q(&[&[1, 2, 3]])), Err(Error::DimensionMismatch { .. })));
        let f5 = Matrix::identity(PrimeField::new(5).unwrap(), 2);
        let f7 = Matrix::identity(PrimeField::new(7).unwrap(), 2);
        assert_eq!(f5.mat_mul(&f7), Err(Error::FieldMismatch));
    }

    #[test]
    fn determinant_examples() {
        // columns: coordinates of B1..B4 in (E11, E12, E21, E22)
        let h = Rational::new(1, 2).unwrap();
        let one = Rational::one();
        let z = Rational::zero();
        let change = Matrix::new(
            Rationals,
            4,
            4,
            alloc::vec![
                h.clone(), z.clone(), one.clone(), one.clone(),
                z.clone(), one.clone(), one.clone(), z.clone(),
                one.clone(), z.clone(), z.clone(), z.clone(),
                h, z.clone(), one.clone(), one.neg(),
            ],
        )
        .unwrap();
        assert_eq!(change.determinant().unwrap(), Rational::from_integer(2));
        let f3 = PrimeField::new(3).unwrap();
        assert_eq!(Matrix::from_i64_rows(f3, &[&[0, 1], &[1, 1]]).determinant(), Ok(2));
        assert_eq!(Matrix::identity(Rationals, 5).determinant().unwrap(), Rational::one());
        assert_eq!(q(&[&[1, 2, 3]]).determinant(), Err(Error::NotSquare));
    }

    #[test]
    fn inverse_examples() {
        let inv = Matrix::diagonal(Rationals, &[Rational::from_integer(2), Rational::one()])
            .inverse()
            .unwrap();
        assert_eq!(inv, Matrix::diagonal(Rationals, &[Rational::new(1, 2).unwrap(), Rational::one()]));
        assert_eq!(q(&[&[1, 1], &[0, 1]]).inverse().unwrap(), q(&[&[1, -1], &[0, 1]]));
        assert_eq!(q(&[&[1, 2], &[2, 4]]).inverse(), Err(Error::Singular));
    }

    #[test]
    fn solve_examples() {
        let one = Rational::one();
        let z = Rational::zero();
        let e12 = Matrix::unit(Rationals, 2, 0, 1);
        assert_eq!(e12.solve(&[one.clone(), z.clone()]).unwrap(), [z.clone(), one.clone()]);
        assert_eq!(
            Matrix::zeros(Rationals, 2, 2).solve(&[one.clone(), z.clone()]),
            Err(Error::Inconsistent)
        );
        let v = [Rational::from_integer(3), Rational::new(-1, 7).unwrap()];
        assert_eq!(Matrix::identity(Rationals, 2).solve(&v).unwrap(), v);
    }

    #[test]
    fn kernel_examples() {
        let e12 = Matrix::unit(Rationals, 2, 0, 1);
        assert_eq!(e12.kernel_basis(), [[Rational::one(), Rational::zero()]]);
        assert!(Matrix::identity(Rationals, 3).kernel_basis().is_empty());
    }

    #[test]
    fn rank_normal_form_conventions() {
        let z = Matrix::zeros(Rationals, 3, 3);
        let rnf = z.rank_normal_form().unwrap();
        assert_eq!(rnf.rank, 0);
        assert!(rnf.u.is_identity() && rnf.w.is_identity());
        let g = q(&[&[2, 1], &[1, 1]]);
        let rnf = g.rank_normal_form().unwrap();
        assert_eq!(rnf.rank, 2);
        assert_eq!(rnf.u.mul(&rnf.w), g);
        let s = q(&[&[0, 0, 0], &[0, 2, 4], &[0, 1, 2]]);
        let rnf = s.rank_normal_form().unwrap();
        assert_eq!(rnf.rank, 1);
        assert_eq!(rnf.reconstruct(), s);
    }
}
