//! Words for transvections.
//!
//! Building blocks, from the bottom up:
//!
//! * `id +- U_{E12}` (an explicit rational word, or `[(I+M), (I-M)]^r` in
//!   characteristic `p`), transported to any rank-one square-zero `N` by
//!   conjugation, giving `u_N(t) = id + t U_N`;
//! * the twelve elementary transvections `x_rs(t)` of a corner
//!   `C_ij = span{E_ii, E_ij, E_ji, E_jj}` relative to the basis
//!   `B1 = E_ji + (E_ii + E_jj)/2, B2 = E_ij, B3 = E_ii + E_jj + E_ij, B4 = E_ii - E_jj`;
//! * standard-unit transvections `tau_{u,v}(t) : E_v -> E_v + t E_u`, first
//!   inside a corner and then along paths of corners via commutators.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::jordan::{is_rank_one_square_zero, OperatorMatrix};
use crate::linalg::Matrix;
use crate::words::Word;

/// Ordered basis that transvection indices refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TransvectionBasis {
    /// `E_ij` at row-major position `i * n + j`.
    StandardUnits,
    /// The corner basis `B1..B4` of `C_ij` (0-based positions 0..4).
    Corner(CornerIndex),
}

/// A corner `(i, j)` with `i < j`, 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CornerIndex {
    i: usize,
    j: usize,
}

impl CornerIndex {
    pub fn new(i: usize, j: usize, n: usize) -> Result<Self> {
        if i >= j || j >= n {
            return Err(Error::BadIndices(format!("corner ({i}, {j}) in n = {n}")));
        }
        Ok(CornerIndex { i, j })
    }

    pub fn i(&self) -> usize {
        self.i
    }

    pub fn j(&self) -> usize {
        self.j
    }

    /// Standard units of the corner in the order `E_ii, E_ij, E_ji, E_jj`.
    pub fn units(&self) -> [(usize, usize); 4] {
        let (i, j) = (self.i, self.j);
        [(i, i), (i, j), (j, i), (j, j)]
    }

    fn contains(&self, u: (usize, usize)) -> bool {
        self.units().contains(&u)
    }

    /// `iota_ij`: places a 2x2 matrix on rows and columns `i, j` of a zero matrix.
    pub fn embed<F: Field>(&self, a: &Matrix<F>, n: usize) -> Matrix<F> {
        let mut out = Matrix::zeros(a.field().clone(), n, n);
        let idx = [self.i, self.j];
        for r in 0..2 {
            for c in 0..2 {
                out.set(idx[r], idx[c], a.get(r, c).clone());
            }
        }
        out
    }

    /// Columns are the corner basis vectors in the coordinates `E_ii, E_ij, E_ji, E_jj`.
    pub fn basis_change<F: Field>(field: &F) -> Matrix<F> {
        let h = field.half(&field.one());
        let (z, o) = (field.zero(), field.one());
        let m1 = field.neg(&o);
        let data = vec![
            h.clone(), z.clone(), o.clone(), o.clone(),
            z.clone(), o.clone(), o.clone(), z.clone(),
            o.clone(), z.clone(), z.clone(), z.clone(),
            h, z, o, m1,
        ];
        Matrix::new(field.clone(), 4, 4, data).expect("4x4")
    }
}

/// One elementary transvection `id + t e_target e_source^T` relative to a basis.
#[derive(Debug, Clone, PartialEq)]
pub struct TransvectionSpec<F: Field> {
    pub basis: TransvectionBasis,
    pub target: usize,
    pub source: usize,
    pub t: F::Elem,
}

impl<F: Field> TransvectionSpec<F> {
    pub fn standard(target: usize, source: usize, t: F::Elem) -> Self {
        TransvectionSpec { basis: TransvectionBasis::StandardUnits, target, source, t }
    }

    pub fn inverse(&self, field: &F) -> Self {
        TransvectionSpec { t: field.neg(&self.t), ..self.clone() }
    }

    /// The operator in standard-unit coordinates.
    pub fn operator(&self, field: &F, n: usize) -> Result<OperatorMatrix<F>> {
        if self.target == self.source {
            return Err(Error::BadIndices(format!("target = source = {}", self.target)));
        }
        match self.basis {
            TransvectionBasis::StandardUnits => {
                if self.target >= n * n || self.source >= n * n {
                    return Err(Error::BadIndices(format!(
                        "({}, {}) in dimension {}",
                        self.target,
                        self.source,
                        n * n
                    )));
                }
                Ok(OperatorMatrix::transvection(field.clone(), n, self.target, self.source, &self.t))
            }
            TransvectionBasis::Corner(c) => {
                if self.target >= 4 || self.source >= 4 || c.j >= n {
                    return Err(Error::BadIndices(format!("({}, {}) in a corner", self.target, self.source)));
                }
                Ok(corner_operator(field, n, c, self.target, self.source, &self.t))
            }
        }
    }

    pub fn word(&self, field: &F, n: usize) -> Result<Word<F>> {
        match self.basis {
            TransvectionBasis::StandardUnits => {
                let d = n * n;
                if self.target >= d || self.source >= d {
                    return Err(Error::BadIndices(format!("({}, {}) in dimension {d}", self.target, self.source)));
                }
                word_standard_tau(
                    field,
                    n,
                    (self.target / n, self.target % n),
                    (self.source / n, self.source % n),
                    &self.t,
                )
            }
            TransvectionBasis::Corner(c) => word_m2_elementary(field, n, c, self.target + 1, self.source + 1, &self.t),
        }
    }
}

/// `id + t eps_rs` on corner `c` (0-based `r, s` in the corner basis), identity elsewhere.
pub fn corner_operator<F: Field>(field: &F, n: usize, c: CornerIndex, r: usize, s: usize, t: &F::Elem) -> OperatorMatrix<F> {
    let p = CornerIndex::basis_change(field);
    let p_inv = p.inverse().expect("corner basis change is invertible");
    let units = c.units().map(|(a, b)| a * n + b);
    let mut op = OperatorMatrix::identity(field.clone(), n).into_body();
    // t * P e_r e_s^T P^-1, written on the corner coordinates
    for a in 0..4 {
        for b in 0..4 {
            let v = field.mul(t, &field.mul(p.get(a, r), p_inv.get(s, b)));
            let cur = op.get(units[a], units[b]).clone();
            op.set(units[a], units[b], field.add(&cur, &v));
        }
    }
    OperatorMatrix::from_matrix(n, op).expect("square")
}

fn require_char0<F: Field>(field: &F) -> Result<()> {
    if field.characteristic() != 0 {
        return Err(Error::WrongField { required: "Q" });
    }
    Ok(())
}

fn q<F: Field>(field: &F, num: i64, den: i64) -> F::Elem {
    field.div(&field.from_i64(num), &field.from_i64(den)).expect("nonzero denominator")
}

fn mat2<F: Field>(field: &F, e: [[F::Elem; 2]; 2]) -> Matrix<F> {
    let [[a, b], [c, d]] = e;
    Matrix::new(field.clone(), 2, 2, vec![a, b, c, d]).expect("2x2")
}

/// The sixteen 2x2 rational matrices whose `L`-word is `id + U_{E12}`.
pub fn plus_e12_factors<F: Field>(field: &F) -> Vec<Matrix<F>> {
    let f = field;
    let e = |a: (i64, i64), b: (i64, i64), c: (i64, i64), d: (i64, i64)| {
        mat2(f, [[q(f, a.0, a.1), q(f, b.0, b.1)], [q(f, c.0, c.1), q(f, d.0, d.1)]])
    };
    let one = (1, 1);
    let b1 = e(one, (3, 2), (1, 2), one);
    let b2 = e(one, (-3, 2), (-1, 2), one);
    let b3 = e(one, (3, 1), one, one);
    let b4 = e(one, (-3, 1), (-1, 1), one);
    let b5 = e(one, one, (3, 1), one);
    let b6 = e(one, (-1, 1), (-3, 1), one);
    let b7 = e(one, (0, 1), one, one);
    let b8 = e(one, (0, 1), (-1, 1), one);
    let b11 = e(one, (1, 2), (3, 2), one);
    let b12 = e(one, (-1, 2), (-3, 2), one);
    vec![
        b1,
        b2,
        b3.clone(),
        b4.clone(),
        b5.clone(),
        b6.clone(),
        b7.clone(),
        b8.clone(),
        b7,
        b8,
        b11,
        b12,
        b5,
        b6,
        b3,
        b4,
    ]
}

/// `sigma_0 = (1024/13)^2`, the scalar the 16-factor word leaves on the mixed units.
pub fn plus_e12_sigma<F: Field>(field: &F) -> F::Elem {
    field.pow(&q(field, 1024, 13), 2)
}

/// Scalars `v_1..v_4` with `v_1 v_2 v_3 v_4 = 1` and `prod (1 + v_j) = sigma`.
pub fn four_factor_scalars<F: Field>(field: &F, sigma: &F::Elem) -> Result<[F::Elem; 4]> {
    let f = field;
    let two = f.from_i64(2);
    let four = f.from_i64(4);
    let eight = f.from_i64(8);
    let sp2 = f.add(sigma, &two);
    let sm2 = f.sub(sigma, &two);
    let sp4 = f.add(sigma, &four);
    if f.is_zero(sigma) || f.is_zero(&sp2) || f.is_zero(&sm2) || f.is_zero(&sp4) {
        return Err(Error::ExceptionalParameter(f.render(sigma)));
    }
    let v1 = f.div(&f.neg(&eight), &f.mul(sigma, &sp2))?;
    let v2 = f.div(&sp2, &sm2)?;
    let v3 = f.div(&f.mul(&sm2, &sp4), &eight)?;
    let v4 = f.div(&f.neg(sigma), &sp4)?;
    Ok([v1, v2, v3, v4])
}

/// Word for `id + sign * U_{E12}` over the rationals.
pub fn word_id_pm_u_e12_char0<F: Field>(field: &F, n: usize, sign: i8) -> Result<Word<F>> {
    require_char0(field)?;
    if n < 2 {
        return Err(Error::BadIndices(format!("E12 needs n >= 2, got {n}")));
    }
    let f = field;
    if sign < 0 {
        let e12 = Matrix::unit(f.clone(), n, 0, 1);
        let i = Matrix::identity(f.clone(), n);
        let block = Word::new(f.clone(), n, vec![i.add(&e12)?, i.sub(&e12)?])?;
        return Ok(block.repeat(2));
    }
    let base = Word::new(f.clone(), 2, plus_e12_factors(f))?;
    if n == 2 {
        return Ok(base);
    }
    let positions: Vec<usize> = (0..2).collect();
    let mut out = Word::empty(f.clone(), n);
    for v in four_factor_scalars(f, &plus_e12_sigma(f))? {
        let mut d = Matrix::identity(f.clone(), n);
        d.set(0, 0, v.clone());
        d.set(1, 1, v);
        out.push(d)?;
    }
    out.append(&base.embedded(n, &positions)?)?;
    Ok(out)
}

/// `[(I+M), (I-M)]^r` with `r = -2 sign (mod p)`, evaluating to `id + sign * U_M`.
pub fn word_id_pm_u_charp<F: Field>(m: &Matrix<F>, sign: i8) -> Result<Word<F>> {
    let f = m.field();
    let p = f.characteristic();
    if p == 0 {
        return Err(Error::WrongField { required: "Fp" });
    }
    if !is_rank_one_square_zero(m) {
        return Err(Error::NotRankOneSquareZero);
    }
    let r = if sign > 0 { p - 2 } else { 2 % p };
    let i = Matrix::identity(f.clone(), m.rows());
    let block = Word::new(f.clone(), m.rows(), vec![i.add(m)?, i.sub(m)?])?;
    Ok(block.repeat(r as usize))
}

/// An invertible `S` with `M = S E12 S^-1`.
pub fn similarity_to_e12<F: Field>(m: &Matrix<F>) -> Result<Matrix<F>> {
    if !is_rank_one_square_zero(m) {
        return Err(Error::NotRankOneSquareZero);
    }
    let f = m.field();
    let n = m.rows();
    let b1 = (0..n)
        .map(|j| m.column(j))
        .find(|c| c.iter().any(|x| !f.is_zero(x)))
        .expect("rank one");
    let b2 = m.solve(&b1)?;
    let mut kernel_part = vec![b1.clone()];
    for v in m.kernel_basis() {
        if kernel_part.len() == n - 1 {
            break;
        }
        let mut trial = kernel_part.clone();
        trial.push(v);
        if columns_rank(f, n, &trial) == trial.len() {
            kernel_part = trial;
        }
    }
    let mut cols = vec![b1, b2];
    cols.extend(kernel_part.into_iter().skip(1));
    let s = Matrix::from_fn(f.clone(), n, n, |r, c| cols[c][r].clone());
    Ok(s)
}

fn columns_rank<F: Field>(f: &F, n: usize, cols: &[Vec<F::Elem>]) -> usize {
    Matrix::from_fn(f.clone(), n, cols.len(), |r, c| cols[c][r].clone()).rank()
}

/// Word for `id +- U_M` with `M` rank-one square-zero, in either characteristic.
fn word_id_pm_u<F: Field>(m: &Matrix<F>, sign: i8) -> Result<Word<F>> {
    let f = m.field();
    if f.characteristic() != 0 {
        return word_id_pm_u_charp(m, sign);
    }
    let s = similarity_to_e12(m)?;
    let s_inv = s.inverse()?;
    Ok(word_id_pm_u_e12_char0(f, m.rows(), sign)?.conjugated(&s, &s_inv))
}

/// Word for `u_N(t) = id + t U_N`.
pub fn word_u_of_n<F: Field>(nmat: &Matrix<F>, t: &F::Elem) -> Result<Word<F>> {
    if !is_rank_one_square_zero(nmat) {
        return Err(Error::NotRankOneSquareZero);
    }
    let f = nmat.field();
    let n = nmat.rows();
    let mut out = Word::empty(f.clone(), n);
    if f.is_zero(t) {
        return Ok(out);
    }
    // t = x^2 - y^2 and U_{zN} = z^2 U_N; the two factors commute since U_N^2 = 0
    let x = f.half(&f.add(t, &f.one()));
    let y = f.half(&f.sub(t, &f.one()));
    if !f.is_zero(&x) {
        out.append(&word_id_pm_u(&nmat.scale(&x), 1)?)?;
    }
    if !f.is_zero(&y) {
        out.append(&word_id_pm_u(&nmat.scale(&y), -1)?)?;
    }
    Ok(out)
}

/// Word for the inverse of `g_R = L_{I+R}`.
pub fn word_gr_inverse<F: Field>(r: &Matrix<F>) -> Result<Word<F>> {
    let f = r.field();
    let half = f.half(&f.one());
    let mut w = word_u_of_n(r, &half)?;
    w.push(Matrix::identity(f.clone(), r.rows()).sub(r)?)?;
    Ok(w)
}

/// `g_P u_Q(t) g_P^-1` for corner matrices `P, Q`.
fn corner_conjugate<F: Field>(
    field: &F,
    n: usize,
    c: CornerIndex,
    p: &Matrix<F>,
    qm: &Matrix<F>,
    t: &F::Elem,
) -> Result<Word<F>> {
    if field.is_zero(t) {
        return Ok(Word::empty(field.clone(), n));
    }
    let p_big = c.embed(p, n);
    let q_big = c.embed(qm, n);
    let mut w = Word::single(Matrix::identity(field.clone(), n).add(&p_big)?)?;
    w.append(&word_u_of_n(&q_big, t)?)?;
    w.append(&word_gr_inverse(&p_big)?)?;
    Ok(w)
}

/// The 2x2 matrices used by the corner construction.
struct CornerMatrices<F: Field> {
    e12: Matrix<F>,
    e21: Matrix<F>,
    two_e21: Matrix<F>,
    r_plus: Matrix<F>,
    r_minus: Matrix<F>,
    r: Matrix<F>,
    s: Matrix<F>,
}

impl<F: Field> CornerMatrices<F> {
    fn new(field: &F) -> Self {
        let m = |rows: &[&[i64]]| Matrix::from_i64_rows(field.clone(), rows);
        CornerMatrices {
            e12: m(&[&[0, 1], &[0, 0]]),
            e21: m(&[&[0, 0], &[1, 0]]),
            two_e21: m(&[&[0, 0], &[2, 0]]),
            r_plus: m(&[&[1, 1], &[-1, -1]]),
            r_minus: m(&[&[-1, 1], &[-1, 1]]),
            r: m(&[&[-2, -1], &[4, 2]]),
            s: m(&[&[-1, -1], &[1, 1]]),
        }
    }
}

/// The conjugates displayed for `M_2`, as words on corner `c`.
///
/// * `U21(t)  = u_{E12}(t)`                 = `id + t eps21`
/// * `G12(t)  = g_{E12} u_{E21}(t) g^-1`    = `id + t eps12`
/// * `RPlus`  = `g_{R+} u_{E21}(t) g^-1`    = `id + t (eps12/2 - eps13/2 + eps14)`
/// * `RMinus` = `g_{R-} u_{E21}(t) g^-1`    = `id + t (eps12/2 - eps13/2 - eps14)`
/// * `G32(s)  = g_{2E21} u_{E12}(s) g^-1`   = `id + 2s eps32`
/// * `V(t)    = g_R u_S(t) g_R^-1`          = `id + t (-eps12 + eps32 + eps42)`
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CornerConjugate {
    U21,
    G12,
    RPlus,
    RMinus,
    G32,
    V,
}

impl CornerConjugate {
    pub const ALL: [CornerConjugate; 6] = [
        CornerConjugate::U21,
        CornerConjugate::G12,
        CornerConjugate::RPlus,
        CornerConjugate::RMinus,
        CornerConjugate::G32,
        CornerConjugate::V,
    ];

    /// The word for parameter `t`.
    pub fn word<F: Field>(self, field: &F, n: usize, c: CornerIndex, t: &F::Elem) -> Result<Word<F>> {
        let m = CornerMatrices::new(field);
        match self {
            CornerConjugate::U21 => word_u_of_n(&c.embed(&m.e12, n), t),
            CornerConjugate::G12 => corner_conjugate(field, n, c, &m.e12, &m.e21, t),
            CornerConjugate::RPlus => corner_conjugate(field, n, c, &m.r_plus, &m.e21, t),
            CornerConjugate::RMinus => corner_conjugate(field, n, c, &m.r_minus, &m.e21, t),
            CornerConjugate::G32 => corner_conjugate(field, n, c, &m.two_e21, &m.e12, t),
            CornerConjugate::V => corner_conjugate(field, n, c, &m.r, &m.s, t),
        }
    }

    /// The claimed value as `id + t * sum coeff * eps_rs` (1-based `r, s`).
    pub fn claimed<F: Field>(self, field: &F, n: usize, c: CornerIndex, t: &F::Elem) -> OperatorMatrix<F> {
        let f = field;
        let h = f.half(&f.one());
        let one = f.one();
        let terms: Vec<(usize, usize, F::Elem)> = match self {
            CornerConjugate::U21 => vec![(2, 1, one)],
            CornerConjugate::G12 => vec![(1, 2, one)],
            CornerConjugate::RPlus => vec![(1, 2, h.clone()), (1, 3, f.neg(&h)), (1, 4, one)],
            CornerConjugate::RMinus => vec![(1, 2, h.clone()), (1, 3, f.neg(&h)), (1, 4, f.neg(&one))],
            CornerConjugate::G32 => vec![(3, 2, f.from_i64(2))],
            CornerConjugate::V => vec![(1, 2, f.neg(&one)), (3, 2, one.clone()), (4, 2, one)],
        };
        let id = OperatorMatrix::identity(f.clone(), n);
        let mut acc = id.clone();
        for (r, s, coeff) in terms {
            let e = corner_operator(f, n, c, r - 1, s - 1, &f.mul(t, &coeff)).sub(&id).expect("same shape");
            acc = acc.add(&e).expect("same shape");
        }
        acc
    }
}

/// Relative word cost of each `x_rs`, used to prefer cheap decompositions.
fn elementary_weight(r: usize, s: usize) -> u64 {
    match (r, s) {
        (2, 1) => 1,
        (1, 2) | (3, 2) => 2,
        (1, 4) => 4,
        (1, 3) | (3, 1) | (4, 2) => 6,
        (2, 4) => 10,
        (2, 3) | (4, 1) => 14,
        (3, 4) => 24,
        (4, 3) => 40,
        _ => u64::MAX / 64,
    }
}

/// Word for the corner transvection `x_rs(t) = id + t eps_rs` (1-based `r != s`).
pub fn word_m2_elementary<F: Field>(field: &F, n: usize, c: CornerIndex, r: usize, s: usize, t: &F::Elem) -> Result<Word<F>> {
    if r == s || !(1..=4).contains(&r) || !(1..=4).contains(&s) || c.j >= n {
        return Err(Error::BadIndices(format!("x_{r}{s} on corner ({}, {})", c.i, c.j)));
    }
    let f = field;
    if f.is_zero(t) {
        return Ok(Word::empty(f.clone(), n));
    }
    let x = |r: usize, s: usize, t: &F::Elem| word_m2_elementary(f, n, c, r, s, t);
    let conj = |k: CornerConjugate, t: &F::Elem| k.word(f, n, c, t);
    let one = f.one();
    let neg = |a: &F::Elem| f.neg(a);
    // [a, b] = a b a^-1 b^-1 with inverses from negated parameters
    let commutator = |a: &dyn Fn(&F::Elem) -> Result<Word<F>>,
                      pa: &F::Elem,
                      b: &dyn Fn(&F::Elem) -> Result<Word<F>>,
                      pb: &F::Elem|
     -> Result<Word<F>> {
        let mut w = a(pa)?;
        w.append(&b(pb)?)?;
        w.append(&a(&neg(pa))?)?;
        w.append(&b(&neg(pb))?)?;
        Ok(w)
    };
    let cat = |parts: Vec<Word<F>>| -> Result<Word<F>> {
        let mut w = Word::empty(f.clone(), n);
        for p in &parts {
            w.append(p)?;
        }
        Ok(w)
    };
    let half = |a: &F::Elem| f.half(a);
    match (r, s) {
        (2, 1) => conj(CornerConjugate::U21, t),
        (1, 2) => conj(CornerConjugate::G12, t),
        (1, 4) => cat(vec![
            conj(CornerConjugate::RPlus, &half(t))?,
            conj(CornerConjugate::RMinus, &neg(&half(t)))?,
        ]),
        (1, 3) => cat(vec![
            conj(CornerConjugate::RPlus, &neg(t))?,
            conj(CornerConjugate::RMinus, &neg(t))?,
            x(1, 2, t)?,
        ]),
        (2, 3) => commutator(&|a| x(2, 1, a), &one, &|b| x(1, 3, b), t),
        (2, 4) => commutator(&|a| x(2, 1, a), &one, &|b| x(1, 4, b), t),
        (3, 2) => conj(CornerConjugate::G32, &half(t)),
        (3, 1) => commutator(&|a| x(3, 2, a), t, &|b| x(2, 1, b), &one),
        (4, 2) => cat(vec![x(1, 2, t)?, x(3, 2, &neg(t))?, conj(CornerConjugate::V, t)?]),
        (4, 1) => commutator(&|a| x(4, 2, a), t, &|b| x(2, 1, b), &one),
        (4, 3) => commutator(&|a| x(4, 2, a), t, &|b| x(2, 3, b), &one),
        (3, 4) => commutator(&|a| x(3, 2, a), &one, &|b| x(2, 4, b), t),
        _ => unreachable!("validated above"),
    }
}

fn unit_in_range(u: (usize, usize), n: usize) -> bool {
    u.0 < n && u.1 < n
}

/// First corner (lexicographic) containing both units.
fn common_corner(n: usize, a: (usize, usize), b: (usize, usize)) -> Option<CornerIndex> {
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| CornerIndex { i, j }))
        .find(|c| c.contains(a) && c.contains(b))
}

/// Word for `tau_{a,b}(t)` with both units in corner `c`, via `I + a' c^T` conjugated
/// by a product of commuting corner transvections.
fn word_tau_in_corner<F: Field>(
    field: &F,
    n: usize,
    c: CornerIndex,
    a: (usize, usize),
    b: (usize, usize),
    t: &F::Elem,
) -> Result<Word<F>> {
    let f = field;
    let units = c.units();
    let ua = units.iter().position(|&u| u == a).expect("unit in corner");
    let ub = units.iter().position(|&u| u == b).expect("unit in corner");
    let p = CornerIndex::basis_change(f);
    let p_inv = p.inverse()?;
    // in corner-basis coordinates the operator is I + t (P^-1 e_a)(e_b^T P)
    let av: Vec<F::Elem> = (0..4).map(|k| p_inv.get(k, ua).clone()).collect();
    let bv: Vec<F::Elem> = (0..4).map(|k| p.get(ub, k).clone()).collect();

    let mut best: Option<(u64, Vec<(usize, usize, F::Elem)>, Vec<(usize, usize, F::Elem)>)> = None;
    for k in (0..4).filter(|&k| !f.is_zero(&av[k])) {
        let ak = &av[k];
        let a_norm: Vec<F::Elem> = av.iter().map(|x| f.div(x, ak).expect("nonzero")).collect();
        let b_scaled: Vec<F::Elem> = bv.iter().map(|x| f.mul(&f.mul(x, ak), t)).collect();
        let g: Vec<(usize, usize, F::Elem)> = (0..4)
            .filter(|&i| i != k && !f.is_zero(&a_norm[i]))
            .map(|i| (i, k, a_norm[i].clone()))
            .collect();
        // c^T = b'^T g, with g = I + (a' - e_k) e_k^T
        let bdot = (0..4)
            .filter(|&i| i != k)
            .fold(f.zero(), |acc, i| f.add(&acc, &f.mul(&b_scaled[i], &a_norm[i])));
        let cvec: Vec<F::Elem> = (0..4)
            .map(|j| if j == k { f.add(&b_scaled[k], &bdot) } else { b_scaled[j].clone() })
            .collect();
        debug_assert!(f.is_zero(&cvec[k]));
        let mid: Vec<(usize, usize, F::Elem)> = (0..4)
            .filter(|&j| j != k && !f.is_zero(&cvec[j]))
            .map(|j| (k, j, cvec[j].clone()))
            .collect();
        let cost: u64 = g.iter().map(|e| 2 * elementary_weight(e.0 + 1, e.1 + 1)).sum::<u64>()
            + mid.iter().map(|e| elementary_weight(e.0 + 1, e.1 + 1)).sum::<u64>();
        if best.as_ref().is_none_or(|b| cost < b.0) {
            best = Some((cost, g, mid));
        }
    }
    let (_, g, mid) = best.expect("a has a nonzero coordinate");
    let mut w = Word::empty(f.clone(), n);
    for (r, s, v) in &g {
        w.append(&word_m2_elementary(f, n, c, r + 1, s + 1, v)?)?;
    }
    for (r, s, v) in &mid {
        w.append(&word_m2_elementary(f, n, c, r + 1, s + 1, v)?)?;
    }
    for (r, s, v) in &g {
        w.append(&word_m2_elementary(f, n, c, r + 1, s + 1, &f.neg(v))?)?;
    }
    Ok(w)
}

/// Shortest path between units in the graph whose edges join units sharing a corner.
fn unit_path(n: usize, from: (usize, usize), to: (usize, usize)) -> Vec<(usize, usize)> {
    let d = n * n;
    let idx = |u: (usize, usize)| u.0 * n + u.1;
    let mut prev = vec![usize::MAX; d];
    let mut queue = VecDeque::new();
    prev[idx(from)] = idx(from);
    queue.push_back(from);
    while let Some(u) = queue.pop_front() {
        if u == to {
            break;
        }
        for k in 0..d {
            let v = (k / n, k % n);
            if prev[k] == usize::MAX && common_corner(n, u, v).is_some() {
                prev[k] = idx(u);
                queue.push_back(v);
            }
        }
    }
    let mut path = vec![to];
    let mut cur = idx(to);
    while cur != idx(from) {
        cur = prev[cur];
        path.push((cur / n, cur % n));
    }
    path.reverse();
    path
}

/// Word for the standard transvection `tau_{a,b}(t) : E_b -> E_b + t E_a`.
pub fn word_standard_tau<F: Field>(
    field: &F,
    n: usize,
    a: (usize, usize),
    b: (usize, usize),
    t: &F::Elem,
) -> Result<Word<F>> {
    if n < 2 || a == b || !unit_in_range(a, n) || !unit_in_range(b, n) {
        return Err(Error::BadIndices(format!("tau between {a:?} and {b:?} in n = {n}")));
    }
    if field.is_zero(t) {
        return Ok(Word::empty(field.clone(), n));
    }
    let path = unit_path(n, a, b);
    tau_along(field, n, &path, t)
}

fn tau_along<F: Field>(field: &F, n: usize, path: &[(usize, usize)], t: &F::Elem) -> Result<Word<F>> {
    let (a, b) = (path[0], path[path.len() - 1]);
    if path.len() == 2 {
        let c = common_corner(n, a, b).expect("adjacent units share a corner");
        return word_tau_in_corner(field, n, c, a, b, t);
    }
    // tau_{a,b}(t) = [tau_{a,w}(1), tau_{w,b}(t)] for the last inner vertex w
    let split = path.len() - 2;
    let one = field.one();
    let m1 = field.neg(&one);
    let head = &path[..=split];
    let tail = &path[split..];
    let mut w = tau_along(field, n, head, &one)?;
    w.append(&tau_along(field, n, tail, t)?)?;
    w.append(&tau_along(field, n, head, &m1)?)?;
    w.append(&tau_along(field, n, tail, &field.neg(t))?)?;
    Ok(w)
}
