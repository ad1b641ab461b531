//! Words `[A_1, ..., A_k]` standing for the composition `L_{A_1} ... L_{A_k}`.
//!
//! The last factor is applied first.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::jordan::OperatorMatrix;
use crate::linalg::Matrix;

#[derive(Debug, Clone, PartialEq)]
pub struct Word<F: Field> {
    field: F,
    n: usize,
    factors: Vec<Matrix<F>>,
}

impl<F: Field> Word<F> {
    pub fn new(field: F, n: usize, factors: Vec<Matrix<F>>) -> Result<Self> {
        for a in &factors {
            check_factor(&field, n, a)?;
        }
        Ok(Word { field, n, factors })
    }

    pub fn empty(field: F, n: usize) -> Self {
        Word { field, n, factors: Vec::new() }
    }

    pub fn single(a: Matrix<F>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::NotSquare);
        }
        let (field, n) = (a.field().clone(), a.rows());
        Ok(Word { field, n, factors: alloc::vec![a] })
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn factors(&self) -> &[Matrix<F>] {
        &self.factors
    }

    pub fn into_factors(self) -> Vec<Matrix<F>> {
        self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Appends one factor on the right (it will be applied before the others).
    pub fn push(&mut self, a: Matrix<F>) -> Result<()> {
        check_factor(&self.field, self.n, &a)?;
        self.factors.push(a);
        Ok(())
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
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

    pub fn append(&mut self, other: &Self) -> Result<()> {
        self.check_compatible(other)?;
        self.factors.extend(other.factors.iter().cloned());
        Ok(())
    }

    pub fn concat(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.append(other)?;
        Ok(out)
    }

    pub fn repeat(&self, r: usize) -> Self {
        let mut factors = Vec::with_capacity(self.factors.len() * r);
        for _ in 0..r {
            factors.extend(self.factors.iter().cloned());
        }
        Word { field: self.field.clone(), n: self.n, factors }
    }

    /// Applies `f` to every factor; `f` must preserve the shape.
    pub fn map_factors(&self, f: impl FnMut(&Matrix<F>) -> Matrix<F>) -> Self {
        let factors = self.factors.iter().map(f).collect();
        Word { field: self.field.clone(), n: self.n, factors }
    }

    /// Conjugates every factor: `A -> S A S^-1`.
    pub fn conjugated(&self, s: &Matrix<F>, s_inv: &Matrix<F>) -> Self {
        self.map_factors(|a| s.mul(a).mul(s_inv))
    }

    /// Embeds an `m x m` word into `n x n` matrices as `diag(A, I)` blocks
    /// placed at the given rows/columns.
    pub fn embedded(&self, n: usize, positions: &[usize]) -> Result<Self> {
        if positions.len() != self.n || positions.iter().any(|&p| p >= n) {
            return Err(Error::BadIndices(format!("{positions:?} in n = {n}")));
        }
        let factors = self
            .factors
            .iter()
            .map(|a| {
                let mut big = Matrix::identity(self.field.clone(), n);
                for (r, &pr) in positions.iter().enumerate() {
                    for (c, &pc) in positions.iter().enumerate() {
                        big.set(pr, pc, a.get(r, c).clone());
                    }
                }
                big
            })
            .collect();
        Ok(Word { field: self.field.clone(), n, factors })
    }

    pub fn evaluate(&self) -> OperatorMatrix<F> {
        let d = self.n * self.n;
        let data = self.field.jordan_word_product(self.n, &self.factors);
        let body = Matrix::new(self.field.clone(), d, d, data).expect("d x d entries");
        OperatorMatrix::from_matrix(self.n, body).expect("d x d")
    }

    pub fn verify(&self, target: &OperatorMatrix<F>) -> Result<FactorizationReport<F>> {
        if target.field() != &self.field {
            return Err(Error::FieldMismatch);
        }
        if target.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: format!("n = {}", self.n),
                got: format!("n = {}", target.n()),
            });
        }
        let verified = &self.evaluate() == target;
        Ok(FactorizationReport {
            length: self.len(),
            word: self.clone(),
            target: target.clone(),
            verified,
        })
    }
}

fn check_factor<F: Field>(field: &F, n: usize, a: &Matrix<F>) -> Result<()> {
    if a.field() != field {
        return Err(Error::FieldMismatch);
    }
    if a.rows() != n || a.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: format!("{n}x{n}"),
            got: format!("{}x{}", a.rows(), a.cols()),
        });
    }
    Ok(())
}

/// Free-function form of [`Word::evaluate`].
pub fn evaluate<F: Field>(w: &Word<F>) -> OperatorMatrix<F> {
    w.evaluate()
}

pub fn concat<F: Field>(w1: &Word<F>, w2: &Word<F>) -> Result<Word<F>> {
    w1.concat(w2)
}

pub fn repeat<F: Field>(w: &Word<F>, r: usize) -> Word<F> {
    w.repeat(r)
}

pub fn verify<F: Field>(w: &Word<F>, target: &OperatorMatrix<F>) -> Result<FactorizationReport<F>> {
    w.verify(target)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactorizationReport<F: Field> {
    pub word: Word<F>,
    pub target: OperatorMatrix<F>,
    pub verified: bool,
    pub length: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};
    use crate::jordan::{op_l, op_u};
    use crate::rational::Rational;

    #[test]
    fn empty_and_identity_words() {
        let w = Word::empty(Rationals, 3);
        assert!(w.evaluate().is_identity());
        let i3 = Matrix::identity(Rationals, 3);
        let w = Word::new(Rationals, 3, alloc::vec![i3.clone(), i3]).unwrap();
        assert!(w.evaluate().is_identity());
    }

    #[test]
    fn evaluation_order_is_last_first() {
        let f5 = PrimeField::new(5).unwrap();
        let a = Matrix::from_i64_rows(f5, &[&[1, 2], &[0, 3]]);
        let b = Matrix::from_i64_rows(f5, &[&[0, 1], &[4, 1]]);
        let w = Word::new(f5, 2, alloc::vec![a.clone(), b.clone()]).unwrap();
        let expect = op_l(&a).unwrap().then_apply(&op_l(&b).unwrap());
        assert_eq!(w.evaluate(), expect);
    }

    #[test]
    fn repeat_over_f5() {
        let f5 = PrimeField::new(5).unwrap();
        let m = Matrix::unit(f5, 2, 0, 1);
        let i = Matrix::identity(f5, 2);
        let block = Word::new(f5, 2, alloc::vec![i.add(&m).unwrap(), i.sub(&m).unwrap()]).unwrap();
        assert!(block.repeat(0).is_empty());
        assert_eq!(block.repeat(1), block);
        let target = OperatorMatrix::identity(f5, 2).add(&op_u(&m).unwrap()).unwrap();
        assert_eq!(block.repeat(3).evaluate(), target);
    }

    #[test]
    fn verify_reports() {
        let w = Word::empty(Rationals, 2);
        let report = w.verify(&OperatorMatrix::identity(Rationals, 2)).unwrap();
        assert!(report.verified);
        assert_eq!(report.length, 0);
        let e12 = Word::single(Matrix::unit(Rationals, 2, 0, 1)).unwrap();
        assert!(!e12.verify(&OperatorMatrix::identity(Rationals, 2)).unwrap().verified);
        assert!(e12.verify(&OperatorMatrix::identity(Rationals, 3)).is_err());
    }

    #[test]
    fn concat_checks_shapes() {
        let a = Word::empty(Rationals, 2);
        let b = Word::empty(Rationals, 3);
        assert!(a.concat(&b).is_err());
        assert_eq!(a.concat(&Word::empty(Rationals, 2)).unwrap(), a);
        assert_eq!(
            Word::new(Rationals, 2, alloc::vec![Matrix::identity(Rationals, 3)]),
            Err(Error::DimensionMismatch { expected: "2x2".into(), got: "3x3".into() })
        );
    }

    #[test]
    fn embedding_places_blocks() {
        let a = Matrix::from_i64_rows(Rationals, &[&[2, 3], &[5, 7]]);
        let w = Word::single(a).unwrap().embedded(3, &[0, 2]).unwrap();
        let big = &w.factors()[0];
        assert_eq!(big.get(0, 2), &Rational::from_integer(3));
        assert_eq!(big.get(1, 1), &Rational::one());
        assert_eq!(big.get(2, 0), &Rational::from_integer(5));
    }
}
