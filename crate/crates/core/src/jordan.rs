//! Operators on `M_n(K)` as `n^2 x n^2` matrices.
//!
//! Coordinates are row-major: `E_ij` (0-based) sits at position `i * n + j`.
//! Column `k` of an operator matrix holds the coordinates of the image of the
//! `k`-th basis unit, so composition `P o Q` is the matrix product `P * Q`.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::Matrix;

/// Row-major coordinatization of `M_n(K)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisMap {
    n: usize,
}

impl BasisMap {
    pub fn new(n: usize) -> Self {
        BasisMap { n }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.n * self.n
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.n && j < self.n);
        i * self.n + j
    }

    pub fn unit(&self, k: usize) -> (usize, usize) {
        (k / self.n, k % self.n)
    }

    pub fn vectorize<F: Field>(&self, x: &Matrix<F>) -> Vec<F::Elem> {
        x.data().to_vec()
    }

    pub fn unvectorize<F: Field>(&self, field: F, v: &[F::Elem]) -> Matrix<F> {
        Matrix::new(field, self.n, self.n, v.to_vec()).expect("vector of length n^2")
    }
}

/// An element of `End_K(M_n(K))` in [`BasisMap`] coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix<F: Field> {
    n: usize,
    body: Matrix<F>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl<F: Field> OperatorMatrix<F> {
    pub fn from_matrix(n: usize, body: Matrix<F>) -> Result<Self> {
        let d = n * n;
        if body.rows() != d || body.cols() != d {
            return Err(Error::DimensionMismatch {
                expected: format!("{d}x{d}"),
                got: format!("{}x{}", body.rows(), body.cols()),
            });
        }
        Ok(OperatorMatrix { n, body })
    }

    /// Infers `n` from a square `d x d` matrix.
    pub fn from_square(body: Matrix<F>) -> Result<Self> {
        if !body.is_square() {
            return Err(Error::NotSquare);
        }
        let d = body.rows();
        let n = (0..=d).find(|k| k * k >= d).unwrap_or(0);
        if n * n != d {
            return Err(Error::DimensionNotSquare(d));
        }
        Self::from_matrix(n, body)
    }

    pub fn identity(field: F, n: usize) -> Self {
        OperatorMatrix { n, body: Matrix::identity(field, n * n) }
    }

    pub fn zero(field: F, n: usize) -> Self {
        OperatorMatrix { n, body: Matrix::zeros(field, n * n, n * n) }
    }

    /// `id + t * e_target e_source^T`: the source unit gains `t` times the target unit.
    pub fn transvection(field: F, n: usize, target: usize, source: usize, t: &F::Elem) -> Self {
        let mut op = Self::identity(field, n);
        let cur = op.body.get(target, source).clone();
        let v = op.body.field().add(&cur, t);
        op.body.set(target, source, v);
        op
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.n * self.n
    }

    pub fn field(&self) -> &F {
        self.body.field()
    }

    pub fn body(&self) -> &Matrix<F> {
        &self.body
    }

    pub fn into_body(self) -> Matrix<F> {
        self.body
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.field() != other.field() {
            return Err(Error::FieldMismatch);
        }
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: format!("n = {}", self.n),
                got: format!("n = {}", other.n),
            });
        }
        Ok(())
    }

    /// `self o other`
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(OperatorMatrix { n: self.n, body: self.body.mat_mul(&other.body)? })
    }

    /// `compose` for operands known to be compatible.
    pub fn then_apply(&self, other: &Self) -> Self {
        self.compose(other).expect("compatible operators")
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(OperatorMatrix { n: self.n, body: self.body.add(&other.body)? })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(OperatorMatrix { n: self.n, body: self.body.sub(&other.body)? })
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        OperatorMatrix { n: self.n, body: self.body.scale(c) }
    }

    pub fn inverse(&self) -> Result<Self> {
        Ok(OperatorMatrix { n: self.n, body: self.body.inverse()? })
    }

    pub fn determinant(&self) -> F::Elem {
        self.body.determinant().expect("operator matrices are square")
    }

    pub fn rank(&self) -> usize {
        self.body.rank()
    }

    pub fn is_identity(&self) -> bool {
        self.body.is_identity()
    }

    /// Image of the matrix `x` under the operator.
    pub fn apply(&self, x: &Matrix<F>) -> Result<Matrix<F>> {
        if x.rows() != self.n || x.cols() != self.n {
            return Err(Error::DimensionMismatch {
                expected: format!("{0}x{0}", self.n),
                got: format!("{}x{}", x.rows(), x.cols()),
            });
        }
        let v = self.body.mul_vec(x.data())?;
        Matrix::new(self.field().clone(), self.n, self.n, v)
    }

    /// Replaces `self` by `L_A o self`, column by column, in `O(n^5)`.
    pub(crate) fn left_apply_jordan(&mut self, a: &Matrix<F>) {
        let n = self.n;
        let d = n * n;
        let f = self.body.field().clone();
        let ad = a.data();
        let body = self.body.data_mut();
        let mut x = Vec::with_capacity(d);
        for col in 0..d {
            x.clear();
            x.extend((0..d).map(|k| body[k * d + col].clone()));
            for i in 0..n {
                for j in 0..n {
                    // (A X)_ij + (X A)_ij
                    let mut acc = f.zero();
                    for k in 0..n {
                        let aik = &ad[i * n + k];
                        if !f.is_zero(aik) {
                            let xkj = &x[k * n + j];
                            if !f.is_zero(xkj) {
                                acc = f.add(&acc, &f.mul(aik, xkj));
                            }
                        }
                        let akj = &ad[k * n + j];
                        if !f.is_zero(akj) {
                            let xik = &x[i * n + k];
                            if !f.is_zero(xik) {
                                acc = f.add(&acc, &f.mul(xik, akj));
                            }
                        }
                    }
                    body[(i * n + j) * d + col] = f.half(&acc);
                }
            }
        }
    }
}

pub(crate) fn word_product_generic<F: Field>(field: &F, n: usize, factors: &[Matrix<F>]) -> Vec<F::Elem> {
    let mut acc = OperatorMatrix::identity(field.clone(), n);
    for a in factors.iter().rev() {
        if !a.is_identity() {
            acc.left_apply_jordan(a);
        }
    }
    acc.into_body().data().to_vec()
}

fn check_square_n<F: Field>(a: &Matrix<F>) -> Result<usize> {
    if !a.is_square() {
        return Err(Error::NotSquare);
    }
    Ok(a.rows())
}

/// Operator matrix of `X -> f(X)` for a linear `f`, built column by column.
fn operator_from_fn<F: Field>(field: &F, n: usize, mut f: impl FnMut(&Matrix<F>) -> Matrix<F>) -> OperatorMatrix<F> {
    let d = n * n;
    let mut body = Matrix::zeros(field.clone(), d, d);
    for col in 0..d {
        let e = Matrix::unit(field.clone(), n, col / n, col % n);
        let img = f(&e);
        for (row, v) in img.data().iter().enumerate() {
            body.set(row, col, v.clone());
        }
    }
    OperatorMatrix { n, body }
}

/// `A o B = (AB + BA) / 2`
pub fn jordan_product<F: Field>(a: &Matrix<F>, b: &Matrix<F>) -> Result<Matrix<F>> {
    let n = check_square_n(a)?;
    if b.rows() != n || b.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: format!("{n}x{n}"),
            got: format!("{}x{}", b.rows(), b.cols()),
        });
    }
    let s = a.mat_mul(b)?.add(&b.mat_mul(a)?)?;
    let f = a.field();
    let half = f.half(&f.one());
    Ok(s.scale(&half))
}

/// The multiplication operator `L_A : X -> A o X`.
pub fn op_l<F: Field>(a: &Matrix<F>) -> Result<OperatorMatrix<F>> {
    let n = check_square_n(a)?;
    let f = a.field().clone();
    let d = n * n;
    let mut body = Matrix::zeros(f.clone(), d, d);
    // column (k, l): (A E_kl + E_kl A) / 2 has A_ik at (i, l) and A_lj at (k, j)
    for k in 0..n {
        for l in 0..n {
            let col = k * n + l;
            for i in 0..n {
                let row = i * n + l;
                let v = f.add(body.get(row, col), a.get(i, k));
                body.set(row, col, v);
            }
            for j in 0..n {
                let row = k * n + j;
                let v = f.add(body.get(row, col), a.get(l, j));
                body.set(row, col, v);
            }
        }
    }
    let half = f.half(&f.one());
    Ok(OperatorMatrix { n, body: body.scale(&half) })
}

/// The quadratic operator `U_A : X -> A X A`.
pub fn op_u<F: Field>(a: &Matrix<F>) -> Result<OperatorMatrix<F>> {
    let n = check_square_n(a)?;
    let f = a.field().clone();
    let d = n * n;
    // column (k, l): (A E_kl A)_ij = A_ik A_lj
    let body = Matrix::from_fn(f.clone(), d, d, |row, col| {
        let (i, j) = (row / n, row % n);
        let (k, l) = (col / n, col % n);
        f.mul(a.get(i, k), a.get(l, j))
    });
    Ok(OperatorMatrix { n, body })
}

/// Associative left (`X -> AX`) or right (`X -> XA`) multiplication.
pub fn op_assoc_mult<F: Field>(a: &Matrix<F>, side: Side) -> Result<OperatorMatrix<F>> {
    let n = check_square_n(a)?;
    let f = a.field().clone();
    Ok(match side {
        Side::Left => operator_from_fn(&f, n, |x| a.mul(x)),
        Side::Right => operator_from_fn(&f, n, |x| x.mul(a)),
    })
}

/// `Phi_S : X -> S X S^-1`.
pub fn conj_operator<F: Field>(s: &Matrix<F>) -> Result<OperatorMatrix<F>> {
    let n = check_square_n(s)?;
    let s_inv = s.inverse()?;
    let f = s.field().clone();
    Ok(operator_from_fn(&f, n, |x| s.mul(x).mul(&s_inv)))
}

/// `<X, Y> = Tr(XY)`
pub fn trace_pairing<F: Field>(x: &Matrix<F>, y: &Matrix<F>) -> Result<F::Elem> {
    x.mat_mul(y)?.trace()
}

pub fn is_rank_one_square_zero<F: Field>(m: &Matrix<F>) -> bool {
    m.is_square() && m.rank() == 1 && m.mul(m).is_zero()
}

/// `S A S^-1`
pub fn conjugate<F: Field>(s: &Matrix<F>, s_inv: &Matrix<F>, a: &Matrix<F>) -> Matrix<F> {
    s.mul(a).mul(s_inv)
}
