//! From operators to words: special linear, general linear and singular cases.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::jordan::{op_l, OperatorMatrix};
use crate::linalg::Matrix;
use crate::transvect::{four_factor_scalars, TransvectionSpec};
use crate::words::{FactorizationReport, Word};

/// `G = pre_1 ... pre_a * diag(diagonal) * post_1 ... post_b`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlDecomposition<F: Field> {
    pub pre_specs: Vec<TransvectionSpec<F>>,
    pub diagonal: Vec<F::Elem>,
    pub post_specs: Vec<TransvectionSpec<F>>,
}

impl<F: Field> SlDecomposition<F> {
    /// The diagonal factor as a product of standard transvections.
    pub fn diagonal_specs(&self, field: &F) -> Vec<TransvectionSpec<F>> {
        let f = field;
        let mut out = Vec::new();
        let mut acc = f.one();
        for i in 0..self.diagonal.len().saturating_sub(1) {
            acc = f.mul(&acc, &self.diagonal[i]);
            if f.is_one(&acc) {
                continue;
            }
            // diag(a, a^-1) = x12(a - 1) x21(1) x12(a^-1 - 1) x21(-a)
            let a = acc.clone();
            let a_inv = f.inv(&a).expect("diagonal of an invertible matrix");
            let one = f.one();
            for (target, source, t) in [
                (i, i + 1, f.sub(&a, &one)),
                (i + 1, i, one.clone()),
                (i, i + 1, f.sub(&a_inv, &one)),
                (i + 1, i, f.neg(&a)),
            ] {
                if !f.is_zero(&t) {
                    out.push(TransvectionSpec::standard(target, source, t));
                }
            }
        }
        out
    }

    /// Every transvection of the decomposition, left to right.
    pub fn all_specs(&self, field: &F) -> Vec<TransvectionSpec<F>> {
        let mut out = self.pre_specs.clone();
        out.extend(self.diagonal_specs(field));
        out.extend(self.post_specs.iter().cloned());
        out
    }

    pub fn replay(&self, field: &F, n: usize) -> Result<OperatorMatrix<F>> {
        let diag = Matrix::diagonal(field.clone(), &self.diagonal);
        let mut acc = OperatorMatrix::identity(field.clone(), n);
        for s in &self.pre_specs {
            acc = acc.compose(&s.operator(field, n)?)?;
        }
        acc = acc.compose(&OperatorMatrix::from_matrix(n, diag)?)?;
        for s in &self.post_specs {
            acc = acc.compose(&s.operator(field, n)?)?;
        }
        Ok(acc)
    }
}

/// Gaussian elimination of a determinant-one operator down to a diagonal.
pub fn sl_decompose<F: Field>(g: &OperatorMatrix<F>) -> Result<SlDecomposition<F>> {
    let f = g.field().clone();
    if !f.is_one(&g.determinant()) {
        return Err(Error::NotSL);
    }
    let d = g.dim();
    let mut a = g.body().clone();
    let mut left = Vec::new();
    let mut right = Vec::new();
    for k in 0..d {
        if f.is_zero(a.get(k, k)) {
            let r = (k + 1..d)
                .find(|&r| !f.is_zero(a.get(r, k)))
                .expect("trailing block is invertible");
            // the pivot is zero, so t = 1 already makes it nonzero
            let t = f.one();
            a.add_row_multiple(k, r, &t);
            left.push(TransvectionSpec::standard(k, r, t));
        }
        let pivot_inv = f.inv(a.get(k, k))?;
        for r in k + 1..d {
            if !f.is_zero(a.get(r, k)) {
                let t = f.neg(&f.mul(a.get(r, k), &pivot_inv));
                a.add_row_multiple(r, k, &t);
                left.push(TransvectionSpec::standard(r, k, t));
            }
        }
        for s in k + 1..d {
            if !f.is_zero(a.get(k, s)) {
                let t = f.neg(&f.mul(a.get(k, s), &pivot_inv));
                a.add_col_multiple(s, k, &t);
                right.push(TransvectionSpec::standard(k, s, t));
            }
        }
    }
    let diagonal = (0..d).map(|k| a.get(k, k).clone()).collect();
    // L G R = D, so G = L^-1 D R^-1
    let pre_specs = left.iter().map(|s| s.inverse(&f)).collect();
    let post_specs = right.iter().rev().map(|s| s.inverse(&f)).collect();
    Ok(SlDecomposition { pre_specs, diagonal, post_specs })
}

/// Word for a determinant-one operator.
pub fn word_for_sl<F: Field>(g: &OperatorMatrix<F>) -> Result<Word<F>> {
    let f = g.field().clone();
    let n = g.n();
    let dec = sl_decompose(g)?;
    let mut w = Word::empty(f.clone(), n);
    for spec in dec.all_specs(&f) {
        w.append(&spec.word(&f, n)?)?;
    }
    Ok(w)
}

/// `64u / (u+1)^2`, or `None` for `u = -1`.
pub fn sigma_of<F: Field>(field: &F, u: &F::Elem) -> Option<F::Elem> {
    let up1 = field.add(u, &field.one());
    let den = field.mul(&up1, &up1);
    field.div(&field.mul(&field.from_i64(64), u), &den).ok()
}

/// Whether `u` lies in the finite set where the five-factor inverse of
/// `m(u) = L_{diag(u, 1, ..., 1)}` is unavailable.
pub fn is_exceptional<F: Field>(field: &F, u: &F::Elem) -> bool {
    if field.is_zero(u) {
        return true;
    }
    match sigma_of(field, u) {
        None => true,
        Some(s) => [2, -2, -4].iter().any(|&v| s == field.from_i64(v)),
    }
}

fn corner_diag<F: Field>(field: &F, n: usize, v: &F::Elem) -> Matrix<F> {
    let mut m = Matrix::identity(field.clone(), n);
    m.set(0, 0, v.clone());
    m
}

/// Five-factor word for the inverse of `L_{diag(u, 1, ..., 1)}`.
pub fn word_m_u_inverse<F: Field>(field: &F, n: usize, u: &F::Elem) -> Result<Word<F>> {
    if is_exceptional(field, u) {
        return Err(Error::ExceptionalParameter(field.render(u)));
    }
    let sigma = sigma_of(field, u).expect("u != -1");
    let mut w = Word::single(corner_diag(field, n, &field.inv(u)?))?;
    for v in four_factor_scalars(field, &sigma)? {
        w.push(corner_diag(field, n, &v))?;
    }
    Ok(w)
}

/// `det L_{diag(u, 1, ..., 1)} = u ((u + 1) / 2)^(2n - 2)`.
pub fn det_m<F: Field>(field: &F, n: usize, u: &F::Elem) -> F::Elem {
    let h = field.half(&field.add(u, &field.one()));
    field.mul(u, &field.pow(&h, 2 * n as u64 - 2))
}

/// Single-factor generators of the determinant group over a prime field,
/// each paired with `det L_A`.
pub fn finite_det_generators<F: Field>(field: &F, n: usize) -> Result<Vec<(F::Elem, Matrix<F>)>> {
    let elems = field.elements().ok_or(Error::NotFinite)?;
    let f = field;
    let minus_one = f.neg(&f.one());
    let mut gens: Vec<(F::Elem, Matrix<F>)> = elems
        .iter()
        .filter(|t| !f.is_zero(t) && **t != minus_one)
        .map(|t| (det_m(f, n, t), corner_diag(f, n, t)))
        .collect();
    if f.characteristic() == 3 && n >= 2 {
        let mut b = Matrix::identity(f.clone(), n);
        b.set(0, 0, f.zero());
        b.set(0, 1, f.one());
        b.set(1, 0, f.one());
        let value = op_l(&b)?.determinant();
        gens.push((value, b));
    }
    Ok(gens)
}

/// Breadth-first closure of the generator values in `K^x`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaSearch<F: Field> {
    pub generators: Vec<(F::Elem, Matrix<F>)>,
    /// Every reached determinant with a shortest list of generator indices.
    pub reached: BTreeMap<F::Elem, Vec<usize>>,
}

impl<F: Field> DeltaSearch<F> {
    pub fn word_for(&self, field: &F, n: usize, gamma: &F::Elem) -> Option<Word<F>> {
        let path = self.reached.get(gamma)?;
        let factors = path.iter().map(|&i| self.generators[i].1.clone()).collect();
        Word::new(field.clone(), n, factors).ok()
    }
}

pub fn delta_search<F: Field>(field: &F, n: usize) -> Result<DeltaSearch<F>> {
    let generators = finite_det_generators(field, n)?;
    let f = field;
    let mut reached: BTreeMap<F::Elem, Vec<usize>> = BTreeMap::new();
    reached.insert(f.one(), Vec::new());
    let mut queue = VecDeque::from([f.one()]);
    while let Some(x) = queue.pop_front() {
        let path = reached[&x].clone();
        for (i, (value, _)) in generators.iter().enumerate() {
            let y = f.mul(&x, value);
            if !reached.contains_key(&y) {
                let mut p = path.clone();
                p.push(i);
                reached.insert(y.clone(), p);
                queue.push_back(y);
            }
        }
    }
    Ok(DeltaSearch { generators, reached })
}

/// A word whose operator is invertible with determinant `gamma`.
pub fn det_match_word<F: Field>(field: &F, gamma: &F::Elem, n: usize) -> Result<Word<F>> {
    let f = field;
    if f.is_zero(gamma) {
        return Err(Error::ZeroDeterminant);
    }
    if f.is_one(gamma) {
        return Ok(Word::empty(f.clone(), n));
    }
    if n == 1 {
        return Word::single(Matrix::diagonal(f.clone(), core::slice::from_ref(gamma)));
    }
    if f.characteristic() != 0 {
        let search = delta_search(f, n)?;
        return search
            .word_for(f, n, gamma)
            .ok_or_else(|| Error::DeterminantUnreachable(f.render(gamma)));
    }
    let r = 2 * n as u64 - 2;
    for k in 2i64.. {
        let y = f.from_i64(k);
        let yr = f.pow(&y, r);
        if yr == *gamma || f.mul(&yr, &y) == *gamma {
            continue;
        }
        let x = f.div(gamma, &yr)?;
        let den = f.sub(&x, &y);
        let ym1 = f.sub(&y, &f.one());
        let b = f.div(&ym1, &den)?;
        let a = f.mul(&x, &b);
        if is_exceptional(f, &a) || is_exceptional(f, &b) {
            continue;
        }
        // det = det m(a) / det m(b) = x y^r = gamma
        let mut w = Word::single(corner_diag(f, n, &a))?;
        w.append(&word_m_u_inverse(f, n, &b)?)?;
        return Ok(w);
    }
    unreachable!("only finitely many y are excluded")
}

/// Word for an invertible operator.
pub fn word_for_gl<F: Field>(g: &OperatorMatrix<F>) -> Result<Word<F>> {
    let f = g.field().clone();
    let det = g.determinant();
    if f.is_zero(&det) {
        return Err(Error::Singular);
    }
    let h = det_match_word(&f, &det, g.n())?;
    let rest = if h.is_empty() {
        g.clone()
    } else {
        h.evaluate().inverse()?.compose(g)?
    };
    let mut w = h;
    w.append(&word_for_sl(&rest)?)?;
    Ok(w)
}

/// `diag(0, 1, ..., 1)`, whose `L` has rank `n^2 - 1`.
pub fn rank_drop_factor<F: Field>(field: &F, n: usize) -> Matrix<F> {
    corner_diag(field, n, &field.zero())
}

/// Permutation operator exchanging coordinates `k` and `d - 1`.
fn swap_last<F: Field>(field: &F, n: usize, k: usize) -> OperatorMatrix<F> {
    let d = n * n;
    let mut m = Matrix::identity(field.clone(), d);
    m.swap_cols(k, d - 1);
    OperatorMatrix::from_matrix(n, m).expect("d x d")
}

/// `E_k`: the coordinate idempotent killing coordinate `k` only.
pub fn coordinate_idempotent<F: Field>(field: &F, n: usize, k: usize) -> OperatorMatrix<F> {
    let d = n * n;
    let mut m = Matrix::identity(field.clone(), d);
    m.set(k, k, field.zero());
    OperatorMatrix::from_matrix(n, m).expect("d x d")
}

/// Word for `E_k = P_k E P_k^-1` with `E = diag(I_{d-1}, 0)`.
pub fn word_for_coordinate_idempotent<F: Field>(field: &F, n: usize, k: usize) -> Result<Word<F>> {
    let a0 = rank_drop_factor(field, n);
    let rnf = op_l(&a0)?.into_body().rank_normal_form()?;
    let (u_inv, w_inv) = (rnf.u.inverse()?, rnf.w.inverse()?);
    let p = swap_last(field, n, k);
    let left = p.compose(&OperatorMatrix::from_matrix(n, u_inv)?)?;
    let right = OperatorMatrix::from_matrix(n, w_inv)?.compose(&p)?;
    let mut w = word_for_gl(&left)?;
    w.push(a0)?;
    w.append(&word_for_gl(&right)?)?;
    Ok(w)
}

/// Word for a singular operator.
///
/// With `T = U diag(I_r, 0) W` and `diag(I_r, 0) = E_r ... E_{d-1}`, each
/// `E_k = P_k U_A^-1 L_{A_0} W_A^-1 P_k` contributes one factor `A_0`; the
/// invertible operators between consecutive copies of `A_0` are merged before
/// being factored.
pub fn word_for_singular<F: Field>(t: &OperatorMatrix<F>) -> Result<Word<F>> {
    let f = t.field().clone();
    let n = t.n();
    let d = t.dim();
    let rnf = t.body().rank_normal_form()?;
    if rnf.rank == d {
        return Err(Error::NotSingular);
    }
    if rnf.rank == 0 {
        return Word::single(Matrix::zeros(f, n, n));
    }
    let a0 = rank_drop_factor(&f, n);
    let a_rnf = op_l(&a0)?.into_body().rank_normal_form()?;
    let op = |m: Matrix<F>| OperatorMatrix::from_matrix(n, m);
    let ua_inv = op(a_rnf.u.inverse()?)?;
    let wa_inv = op(a_rnf.w.inverse()?)?;
    let u = op(rnf.u)?;
    let w_last = op(rnf.w)?;
    let ks: Vec<usize> = (rnf.rank..d).collect();

    let mut pieces = Vec::with_capacity(ks.len() + 1);
    pieces.push(u.compose(&swap_last(&f, n, ks[0]))?.compose(&ua_inv)?);
    for pair in ks.windows(2) {
        let mid = wa_inv
            .compose(&swap_last(&f, n, pair[0]))?
            .compose(&swap_last(&f, n, pair[1]))?
            .compose(&ua_inv)?;
        pieces.push(mid);
    }
    pieces.push(wa_inv.compose(&swap_last(&f, n, ks[ks.len() - 1]))?.compose(&w_last)?);

    let mut word = Word::empty(f.clone(), n);
    for (i, g) in pieces.iter().enumerate() {
        if i > 0 {
            word.push(a0.clone())?;
        }
        word.append(&word_for_gl(g)?)?;
    }
    Ok(word)
}

/// Factors any operator on `M_n(K)` and verifies the result.
pub fn factorize<F: Field>(t: &OperatorMatrix<F>) -> Result<FactorizationReport<F>> {
    let f = t.field().clone();
    let n = t.n();
    let word = if n == 1 && t.is_identity() {
        Word::empty(f, 1)
    } else if n == 1 {
        Word::single(Matrix::diagonal(f, core::slice::from_ref(t.body().get(0, 0))))?
    } else if t.rank() == t.dim() {
        word_for_gl(t)?
    } else {
        word_for_singular(t)?
    };
    let report = word.verify(t)?;
    if !report.verified {
        log::error!("factorization of a {}x{} operator failed verification", t.dim(), t.dim());
    }
    Ok(report)
}
