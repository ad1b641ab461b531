//! Verification instruments: the triangular determinant formula for `L_A`,
//! multiplicative-character sums over `F_p`, the survey of reachable
//! determinants, and a registry of checkable operator identities.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;
use num_traits::Float;
use rand::Rng;

use crate::error::{Error, Result};
use crate::factor::delta_search;
use crate::field::{pow_mod, Field, FieldSpec, PrimeField};
use crate::jordan::{conj_operator, op_assoc_mult, op_l, op_u, trace_pairing, OperatorMatrix, Side};
use crate::linalg::Matrix;
use crate::transvect::{four_factor_scalars, plus_e12_factors, plus_e12_sigma, word_gr_inverse, word_u_of_n, CornerConjugate, CornerIndex};
use crate::words::Word;

/// `2^(-n^2) prod_{i,j} (l_i + l_j)` over the diagonal of a triangular `A`.
pub fn det_l_formula<F: Field>(a: &Matrix<F>) -> Result<F::Elem> {
    if !a.is_square() {
        return Err(Error::NotSquare);
    }
    if !a.is_upper_triangular() && !a.is_lower_triangular() {
        return Err(Error::NotTriangular);
    }
    let f = a.field();
    let n = a.rows();
    let half = f.half(&f.one());
    let mut acc = f.one();
    for i in 0..n {
        for j in 0..n {
            let s = f.add(a.get(i, i), a.get(j, j));
            acc = f.mul(&acc, &f.mul(&s, &half));
        }
    }
    Ok(acc)
}

/// Multiplicative characters of `F_p^x`: `chi_j(g^a) = exp(2 pi i j a / (p - 1))`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacterTable {
    p: u64,
    generator: u64,
    /// `log[x] = a` with `g^a = x`, for `1 <= x < p`.
    log: Vec<u64>,
}

impl CharacterTable {
    pub fn new(p: u64) -> Result<Self> {
        let field = PrimeField::new(p)?;
        let generator = field.multiplicative_generator();
        let mut log = vec![0u64; p as usize];
        let mut x = 1u64;
        for a in 0..p - 1 {
            log[x as usize] = a;
            x = x * generator % p;
        }
        Ok(CharacterTable { p, generator, log })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn generator(&self) -> u64 {
        self.generator
    }

    pub fn order(&self) -> u64 {
        self.p - 1
    }

    pub fn discrete_log(&self, x: u64) -> Option<u64> {
        let x = x % self.p;
        (x != 0).then(|| self.log[x as usize])
    }

    /// `chi_j(x)`, extended by `chi_j(0) = 0` for every `j`.
    pub fn chi(&self, j: u64, x: u64) -> Complex64 {
        match self.discrete_log(x) {
            None => Complex64::new(0.0, 0.0),
            Some(a) => {
                let k = (j % self.order()) * a % self.order();
                Complex64::from_polar(1.0, 2.0 * PI * k as f64 / self.order() as f64)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigmaClass {
    /// `chi^m` is trivial, so the sum collapses to `-chi(-1)`.
    TrivialPower,
    /// `chi^(m+1)` is trivial: `J(chi, chi^-1) = -chi(-1)`.
    InverseCase,
    /// Both characters nontrivial with nontrivial product: `|J| = sqrt(p)`.
    JacobiCase,
}

impl SigmaClass {
    pub fn as_str(self) -> &'static str {
        match self {
            SigmaClass::TrivialPower => "TrivialPower",
            SigmaClass::InverseCase => "InverseCase",
            SigmaClass::JacobiCase => "JacobiCase",
        }
    }
}

/// `Sigma = sum_t chi(t) chi^m(t + 1)` for one character.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaValue {
    pub p: u64,
    pub m: u64,
    pub j: u64,
    pub value: Complex64,
    pub classification: SigmaClass,
}

impl SigmaValue {
    pub fn magnitude(&self) -> f64 {
        self.value.norm()
    }

    /// `1` for the two degenerate classes, `sqrt(p)` otherwise.
    pub fn expected_magnitude(&self) -> f64 {
        match self.classification {
            SigmaClass::TrivialPower | SigmaClass::InverseCase => 1.0,
            SigmaClass::JacobiCase => Float::sqrt(self.p as f64),
        }
    }

    pub fn matches_classification(&self, tol: f64) -> bool {
        Float::abs(self.magnitude() - self.expected_magnitude()) <= tol
    }
}

pub fn jacobi_sigma(p: u64, m: u64, j: u64) -> Result<SigmaValue> {
    let table = CharacterTable::new(p)?;
    jacobi_sigma_with(&table, m, j)
}

pub fn jacobi_sigma_with(table: &CharacterTable, m: u64, j: u64) -> Result<SigmaValue> {
    let p = table.p();
    let q = table.order();
    if j.is_multiple_of(q) {
        return Err(Error::TrivialCharacter);
    }
    let jm = (j % q) * (m % q) % q;
    let mut value = Complex64::new(0.0, 0.0);
    for t in 0..p {
        value += table.chi(j, t) * table.chi(jm, (t + 1) % p);
    }
    let classification = if jm == 0 {
        SigmaClass::TrivialPower
    } else if (jm + j).is_multiple_of(q) {
        SigmaClass::InverseCase
    } else {
        SigmaClass::JacobiCase
    };
    Ok(SigmaValue { p, m, j, value, classification })
}

/// Every nontrivial `j` for one `(p, m)`.
pub fn jacobi_table(p: u64, m: u64) -> Result<Vec<SigmaValue>> {
    let table = CharacterTable::new(p)?;
    (1..table.order()).map(|j| jacobi_sigma_with(&table, m, j)).collect()
}

/// The subgroup of `F_p^x` reached by determinants of single-factor generators.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaSurvey {
    pub p: u64,
    pub n: usize,
    /// `(det L_A, A)` for each generator.
    pub generators: Vec<(u64, Matrix<PrimeField>)>,
    /// Every reached determinant with a shortest list of generator indices.
    pub table: Vec<(u64, Vec<usize>)>,
}

impl DeltaSurvey {
    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn is_full(&self) -> bool {
        self.order() as u64 == self.p - 1
    }

    pub fn word_for(&self, gamma: u64) -> Option<Word<PrimeField>> {
        let (_, path) = self.table.iter().find(|(g, _)| *g == gamma % self.p)?;
        let field = PrimeField::new(self.p).ok()?;
        let factors = path.iter().map(|&i| self.generators[i].1.clone()).collect();
        Word::new(field, self.n, factors).ok()
    }
}

pub fn delta_survey(p: u64, n: usize) -> Result<DeltaSurvey> {
    let field = PrimeField::new(p)?;
    let search = delta_search(&field, n)?;
    Ok(DeltaSurvey {
        p,
        n,
        generators: search.generators,
        table: search.reached.into_iter().collect(),
    })
}

/// Identities known to the registry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum IdentityId {
    /// The explicit 16-factor rational word for `id + U_{E12}` and its padding.
    PlusE12Word,
    /// The six corner conjugates of the `M_2` construction.
    CornerConjugates,
    /// `2 L_A = Lambda_A + Pi_A` and the commuting of left and right multiplications.
    JordanAssocSplit,
    /// `L_N^2 = U_N / 2` and `U_N(X) = <N, X> N` for rank-one square-zero `N`.
    SquareZeroQuadratic,
    /// `Phi_S L_A Phi_S^-1 = L_{S A S^-1}`, same for `U`.
    ConjugationCovariance,
    /// The word for `g_R^-1`.
    GInverse,
    /// `v_1 v_2 v_3 v_4 = 1` and `prod (1 + v_j) = sigma`.
    FourFactorScalars,
    /// Triangular determinant formula and its invertibility criterion.
    DetFormula,
    /// `u_N(t) u_N(-t) = id`, and the word for `u_N(t)`.
    RootTransvectionInverse,
}

impl IdentityId {
    pub const ALL: [IdentityId; 9] = [
        IdentityId::PlusE12Word,
        IdentityId::CornerConjugates,
        IdentityId::JordanAssocSplit,
        IdentityId::SquareZeroQuadratic,
        IdentityId::ConjugationCovariance,
        IdentityId::GInverse,
        IdentityId::FourFactorScalars,
        IdentityId::DetFormula,
        IdentityId::RootTransvectionInverse,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            IdentityId::PlusE12Word => "appendix-a",
            IdentityId::CornerConjugates => "appendix-b",
            IdentityId::JordanAssocSplit => "jordan-assoc-split",
            IdentityId::SquareZeroQuadratic => "square-zero-quadratic",
            IdentityId::ConjugationCovariance => "conjugation-covariance",
            IdentityId::GInverse => "g-inverse",
            IdentityId::FourFactorScalars => "four-factor-scalars",
            IdentityId::DetFormula => "det-formula",
            IdentityId::RootTransvectionInverse => "root-transvection-inverse",
        }
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IdentityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        IdentityId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::UnknownIdentity(s.to_string()))
    }
}

/// Resolves an identity id, or `"all"`, to the list to run.
pub fn parse_identity_selection(which: &str) -> Result<Vec<IdentityId>> {
    if which == "all" {
        Ok(IdentityId::ALL.to_vec())
    } else {
        Ok(vec![which.parse()?])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityCheck {
    pub id: IdentityId,
    pub field: FieldSpec,
    pub n: usize,
    pub pass: bool,
    /// Set when the identity does not apply to this field or size.
    pub skipped: Option<String>,
    pub counterexample: Option<String>,
}

impl IdentityCheck {
    fn new(id: IdentityId, field: FieldSpec, n: usize, outcome: Outcome) -> Self {
        let (pass, skipped, counterexample) = match outcome {
            Outcome::Pass => (true, None, None),
            Outcome::Skip(why) => (true, Some(why), None),
            Outcome::Fail(cx) => (false, None, Some(cx)),
        };
        IdentityCheck { id, field, n, pass, skipped, counterexample }
    }
}

enum Outcome {
    Pass,
    Skip(String),
    Fail(String),
}

/// Runs the selected identities with `samples` random inputs each.
pub fn check_identities<F: Field, R: Rng + ?Sized>(
    which: &str,
    field: &F,
    n: usize,
    samples: usize,
    rng: &mut R,
) -> Result<Vec<IdentityCheck>> {
    let ids = parse_identity_selection(which)?;
    if n == 0 {
        return Err(Error::BadIndices("n must be positive".into()));
    }
    let mut out = Vec::with_capacity(ids.len());
    for id in ids {
        let outcome = match id {
            IdentityId::PlusE12Word => plus_e12_word_check(field, n, &plus_e12_factors(field)),
            IdentityId::CornerConjugates => corner_conjugates_check(field, n, samples, rng),
            IdentityId::JordanAssocSplit => jordan_assoc_split(field, n, samples, rng),
            IdentityId::SquareZeroQuadratic => square_zero_quadratic(field, n, samples, rng),
            IdentityId::ConjugationCovariance => conjugation_covariance(field, n, samples, rng),
            IdentityId::GInverse => g_inverse(field, n, samples, rng),
            IdentityId::FourFactorScalars => four_factor(field, samples, rng),
            IdentityId::DetFormula => det_formula(field, n, samples, rng),
            IdentityId::RootTransvectionInverse => root_transvection_inverse(field, n, samples, rng),
        }?;
        out.push(IdentityCheck::new(id, field.spec(), n, outcome));
    }
    Ok(out)
}

/// The plus-E12 word check on caller-supplied sixteen `2x2` factors.
pub fn check_plus_e12_word<F: Field>(field: &F, n: usize, factors: &[Matrix<F>]) -> Result<IdentityCheck> {
    let outcome = plus_e12_word_check(field, n, factors)?;
    Ok(IdentityCheck::new(IdentityId::PlusE12Word, field.spec(), n, outcome))
}

fn show<F: Field>(m: &Matrix<F>) -> String {
    let f = m.field();
    let rows: Vec<String> = (0..m.rows())
        .map(|i| {
            let cells: Vec<String> = m.row(i).iter().map(|x| f.render(x)).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

fn scalar_matrix<F: Field>(field: &F, n: usize, num: i64, den: i64) -> Matrix<F> {
    let c = field.div(&field.from_i64(num), &field.from_i64(den)).expect("odd or unit denominator");
    Matrix::identity(field.clone(), n).scale(&c)
}

fn id_plus_u_e12<F: Field>(field: &F, n: usize) -> Result<OperatorMatrix<F>> {
    OperatorMatrix::identity(field.clone(), n).add(&op_u(&Matrix::unit(field.clone(), n, 0, 1))?)
}

fn plus_e12_word_check<F: Field>(field: &F, n: usize, factors: &[Matrix<F>]) -> Result<Outcome> {
    let f = field;
    if factors.len() != 16 || factors.iter().any(|b| b.rows() != 2 || b.cols() != 2) {
        return Err(Error::DimensionMismatch { expected: "16 factors of size 2x2".into(), got: format!("{} factors", factors.len()) });
    }
    if n < 2 {
        return Ok(Outcome::Skip("needs n >= 2".into()));
    }
    let i2 = Matrix::identity(f.clone(), 2);
    let c: Vec<Matrix<F>> = factors.iter().map(|b| b.add(&i2).expect("2x2").scale(&f.half(&f.one()))).collect();
    let pairs = [(13, 16), (1, 4), (1, 4), (1, 1), (1, 1), (13, 16), (1, 4), (1, 4)];
    for (k, &(num, den)) in pairs.iter().enumerate() {
        let prod = c[2 * k].mul(&c[2 * k + 1]);
        if prod != scalar_matrix(f, 2, num, den) {
            return Ok(Outcome::Fail(format!("C{} C{} = {} != {num}/{den} I", 2 * k + 1, 2 * k + 2, show(&prod))));
        }
    }
    let forward = c.iter().skip(1).fold(c[0].clone(), |acc, x| acc.mul(x));
    let backward = c.iter().rev().skip(1).fold(c[15].clone(), |acc, x| acc.mul(x));
    let expect_all = scalar_matrix(f, 2, 169, 65536);
    if forward != expect_all || backward != expect_all {
        return Ok(Outcome::Fail(format!("forward product = {}, backward product = {}", show(&forward), show(&backward))));
    }
    let base = Word::new(f.clone(), 2, factors.to_vec())?;
    let got = base.evaluate();
    if got != id_plus_u_e12(f, 2)? {
        return Ok(Outcome::Fail(format!("16-factor word evaluates to {}", show(got.body()))));
    }
    if n == 2 {
        return Ok(Outcome::Pass);
    }
    // the padding needs sigma_0 = (1024/13)^2 outside {0, 2, -2, -4}
    if f.characteristic() == 13 {
        return Ok(Outcome::Skip("sigma_0 has a factor 13 in its denominator".into()));
    }
    let sigma = plus_e12_sigma(f);
    let Ok(vs) = four_factor_scalars(f, &sigma) else {
        return Ok(Outcome::Skip(format!("sigma_0 = {} is exceptional here", f.render(&sigma))));
    };
    let mut padded = Word::empty(f.clone(), n);
    for v in vs {
        let mut d = Matrix::identity(f.clone(), n);
        d.set(0, 0, v.clone());
        d.set(1, 1, v);
        padded.push(d)?;
    }
    padded.append(&base.embedded(n, &[0, 1])?)?;
    let got = padded.evaluate();
    if got != id_plus_u_e12(f, n)? {
        return Ok(Outcome::Fail(format!("{}-factor padded word evaluates to {}", padded.len(), show(got.body()))));
    }
    Ok(Outcome::Pass)
}

fn random_matrix<F: Field, R: Rng + ?Sized>(field: &F, rows: usize, cols: usize, rng: &mut R) -> Matrix<F> {
    Matrix::from_fn(field.clone(), rows, cols, |_, _| field.random(rng))
}

fn random_invertible<F: Field, R: Rng + ?Sized>(field: &F, n: usize, rng: &mut R) -> (Matrix<F>, Matrix<F>) {
    loop {
        let s = random_matrix(field, n, n, rng);
        if let Ok(s_inv) = s.inverse() {
            return (s, s_inv);
        }
    }
}

/// A random `u v^T` with `v^T u = 0`, both vectors nonzero.
pub fn random_rank_one_square_zero<F: Field, R: Rng + ?Sized>(field: &F, n: usize, rng: &mut R) -> Result<Matrix<F>> {
    let f = field;
    if n < 2 {
        return Err(Error::BadIndices("no rank-one square-zero matrix for n = 1".into()));
    }
    loop {
        let u: Vec<F::Elem> = (0..n).map(|_| f.random(rng)).collect();
        let mut v: Vec<F::Elem> = (0..n).map(|_| f.random(rng)).collect();
        let Some(k) = (0..n).find(|&k| !f.is_zero(&u[k])) else { continue };
        let rest = (0..n).filter(|&i| i != k).fold(f.zero(), |acc, i| f.add(&acc, &f.mul(&u[i], &v[i])));
        v[k] = f.neg(&f.div(&rest, &u[k])?);
        if v.iter().all(|x| f.is_zero(x)) {
            continue;
        }
        return Ok(Matrix::from_fn(f.clone(), n, n, |i, j| f.mul(&u[i], &v[j])));
    }
}

fn corner_conjugates_check<F: Field, R: Rng + ?Sized>(field: &F, n: usize, samples: usize, rng: &mut R) -> Result<Outcome> {
    if n < 2 {
        return Ok(Outcome::Skip("needs n >= 2".into()));
    }
    let mut corners = vec![CornerIndex::new(0, 1, n)?];
    if n >= 3 {
        corners.push(CornerIndex::new(1, n - 1, n)?);
    }
    for c in corners {
        for which in CornerConjugate::ALL {
            for _ in 0..samples {
                let t = field.random(rng);
                let got = which.word(field, n, c, &t)?.evaluate();
                if got != which.claimed(field, n, c, &t) {
                    return Ok(Outcome::Fail(format!("{which:?} on corner ({}, {}) at t = {}", c.i() + 1, c.j() + 1, field.render(&t))));
                }
            }
        }
    }
    Ok(Outcome::Pass)
}

fn jordan_assoc_split<F: Field, R: Rng + ?Sized>(field: &F, n: usize, samples: usize, rng: &mut R) -> Result<Outcome> {
    let two = field.from_i64(2);
    for _ in 0..samples {
        let a = random_matrix(field, n, n, rng);
        let b = random_matrix(field, n, n, rng);
        let left = op_assoc_mult(&a, Side::Left)?;
        let right = op_assoc_mult(&a, Side::Right)?;
        if op_l(&a)?.scale(&two) != left.add(&right)? {
            return Ok(Outcome::Fail(format!("2 L_A != Lambda_A + Pi_A for A = {}", show(&a))));
        }
        let right_b = op_assoc_mult(&b, Side::Right)?;
        if left.then_apply(&right_b) != right_b.then_apply(&left) {
            return Ok(Outcome::Fail(format!("Lambda_A Pi_B != Pi_B Lambda_A for A = {}, B = {}", show(&a), show(&b))));
        }
        if left.compose(&op_assoc_mult(&b, Side::Left)?)? != op_assoc_mult(&a.mul(&b), Side::Left)? {
            return Ok(Outcome::Fail(format!("Lambda_A Lambda_B != Lambda_AB for A = {}, B = {}", show(&a), show(&b))));
        }
        // 4 [L_A, L_B] = Lambda_[A,B] - Pi_[A,B]
        let (la, lb) = (op_l(&a)?, op_l(&b)?);
        let bracket = la.compose(&lb)?.sub(&lb.compose(&la)?)?.scale(&field.from_i64(4));
        let ab = a.mul(&b).sub(&b.mul(&a))?;
        if bracket != op_assoc_mult(&ab, Side::Left)?.sub(&op_assoc_mult(&ab, Side::Right)?)? {
            return Ok(Outcome::Fail(format!("4 [L_A, L_B] != Lambda_[A,B] - Pi_[A,B] for A = {}, B = {}", show(&a), show(&b))));
        }
        // U_A = 2 L_A^2 - L_{A^2}
        let quad = la.compose(&la)?.scale(&two).sub(&op_l(&a.mul(&a))?)?;
        if quad != op_u(&a)? {
            return Ok(Outcome::Fail(format!("U_A != 2 L_A^2 - L_(A^2) for A = {}", show(&a))));
        }
    }
    Ok(Outcome::Pass)
}

fn square_zero_quadratic<F: Field, R: Rng + ?Sized>(field: &F, n: usize, samples: usize, rng: &mut R) -> Result<Outcome> {
    if n < 2 {
        return Ok(Outcome::Skip("needs n >= 2".into()));
    }
    let f = field;
    for _ in 0..samples {
        let nm = random_rank_one_square_zero(f, n, rng)?;
        let ln = op_l(&nm)?;
        let un = op_u(&nm)?;
        if ln.compose(&ln)? != un.scale(&f.half(&f.one())) {
            return Ok(Outcome::Fail(format!("L_N^2 != U_N / 2 for N = {}", show(&nm))));
        }
        let x = random_matrix(f, n, n, rng);
        if un.apply(&x)? != nm.scale(&trace_pairing(&nm, &x)?) {
            return Ok(Outcome::Fail(format!("U_N(X) != <N, X> N for N = {}, X = {}", show(&nm), show(&x))));
        }
        if un.rank() != 1 || !un.compose(&un)?.body().is_zero() {
            return Ok(Outcome::Fail(format!("U_N is not rank-one nilpotent for N = {}", show(&nm))));
        }
    }
    Ok(Outcome::Pass)
}

fn conjugation_covariance<F: Field, R: Rng + ?Sized>(field: &F, n: usize, samples: usize, rng: &mut R) -> Result<Outcome> {
    for _ in 0..samples {
        let (s, s_inv) = random_invertible(field, n, rng);
        let a = random_matrix(field, n, n, rng);
        let phi = conj_operator(&s)?;
        let phi_inv = conj_operator(&s_inv)?;
        let sas = s.mul(&a).mul(&s_inv);
        if phi.compose(&op_l(&a)?)?.compose(&phi_inv)? != op_l(&sas)? {
            return Ok(Outcome::Fail(format!("L covariance fails for S = {}, A = {}", show(&s), show(&a))));
        }
        if phi.compose(&op_u(&a)?)?.compose(&phi_inv)? != op_u(&sas)? {
            return Ok(Outcome::Fail(format!("U covariance fails for S = {}, A = {}", show(&s), show(&a))));
        }
    }
    Ok(Outcome::Pass)
}

fn g_inverse<F: Field, R: Rng + ?Sized>(field: &F, n: usize, samples: usize, rng: &mut R) -> Result<Outcome> {
    if n < 2 {
        return Ok(Outcome::Skip("needs n >= 2".into()));
    }
    let id = OperatorMatrix::identity(field.clone(), n);
    for _ in 0..samples {
        let r = random_rank_one_square_zero(field, n, rng)?;
        let g = op_l(&Matrix::identity(field.clone(), n).add(&r)?)?;
        let lr = op_l(&r)?;
        let series = id.sub(&lr)?.add(&lr.compose(&lr)?)?;
        if g.compose(&series)? != id {
            return Ok(Outcome::Fail(format!("g_R (id - L_R + L_R^2) != id for R = {}", show(&r))));
        }
        if word_gr_inverse(&r)?.evaluate() != series {
            return Ok(Outcome::Fail(format!("word for g_R^-1 is wrong for R = {}", show(&r))));
        }
    }
    Ok(Outcome::Pass)
}

fn four_factor<F: Field, R: Rng + ?Sized>(field: &F, samples: usize, rng: &mut R) -> Result<Outcome> {
    let f = field;
    let exceptional = [0, 2, -2, -4].map(|v| f.from_i64(v));
    for s in &exceptional {
        if four_factor_scalars(f, s).is_ok() {
            return Ok(Outcome::Fail(format!("sigma = {} was accepted", f.render(s))));
        }
    }
    if let Some(all) = f.elements() {
        if all.iter().all(|x| exceptional.contains(x)) {
            return Ok(Outcome::Pass);
        }
    }
    let mut tested = 0;
    while tested < samples {
        let sigma = f.random(rng);
        if exceptional.contains(&sigma) {
            continue;
        }
        tested += 1;
        let v = four_factor_scalars(f, &sigma)?;
        let prod = v.iter().fold(f.one(), |acc, x| f.mul(&acc, x));
        let shifted = v.iter().fold(f.one(), |acc, x| f.mul(&acc, &f.add(x, &f.one())));
        if !f.is_one(&prod) || shifted != sigma {
            return Ok(Outcome::Fail(format!("sigma = {}", f.render(&sigma))));
        }
    }
    Ok(Outcome::Pass)
}

/// A random triangular matrix whose diagonal often produces `l_i + l_j = 0`.
fn random_triangular<F: Field, R: Rng + ?Sized>(field: &F, n: usize, rng: &mut R) -> Matrix<F> {
    let upper = rng.random_bool(0.5);
    Matrix::from_fn(field.clone(), n, n, |i, j| {
        if i == j {
            field.from_i64(rng.random_range(-3..=3))
        } else if (i < j) == upper {
            field.random(rng)
        } else {
            field.zero()
        }
    })
}

fn det_formula<F: Field, R: Rng + ?Sized>(field: &F, n: usize, samples: usize, rng: &mut R) -> Result<Outcome> {
    let f = field;
    for _ in 0..samples {
        let a = random_triangular(f, n, rng);
        let formula = det_l_formula(&a)?;
        let direct = op_l(&a)?.determinant();
        if formula != direct {
            return Ok(Outcome::Fail(format!("formula {} != det {} for A = {}", f.render(&formula), f.render(&direct), show(&a))));
        }
        let criterion = (0..n).any(|i| (0..n).any(|j| f.is_zero(&f.add(a.get(i, i), a.get(j, j)))));
        if criterion != f.is_zero(&direct) {
            return Ok(Outcome::Fail(format!("invertibility criterion disagrees for A = {}", show(&a))));
        }
    }
    Ok(Outcome::Pass)
}

fn root_transvection_inverse<F: Field, R: Rng + ?Sized>(field: &F, n: usize, samples: usize, rng: &mut R) -> Result<Outcome> {
    if n < 2 {
        return Ok(Outcome::Skip("needs n >= 2".into()));
    }
    let f = field;
    let id = OperatorMatrix::identity(f.clone(), n);
    for _ in 0..samples {
        let nm = random_rank_one_square_zero(f, n, rng)?;
        let t = f.random(rng);
        let un = op_u(&nm)?;
        let plus = id.add(&un.scale(&t))?;
        let minus = id.add(&un.scale(&f.neg(&t)))?;
        if plus.compose(&minus)? != id {
            return Ok(Outcome::Fail(format!("u_N(t) u_N(-t) != id for N = {}, t = {}", show(&nm), f.render(&t))));
        }
        if word_u_of_n(&nm, &t)?.evaluate() != plus {
            return Ok(Outcome::Fail(format!("word for u_N(t) is wrong for N = {}, t = {}", show(&nm), f.render(&t))));
        }
    }
    Ok(Outcome::Pass)
}

/// Whether `g` has multiplicative order exactly `p - 1`.
pub fn has_full_order(g: u64, p: u64) -> bool {
    !g.is_multiple_of(p) && (1..p - 1).all(|e| pow_mod(g, e, p) != 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rationals;
    use crate::rational::Rational;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn det_formula_examples() {
        for n in 1..=3 {
            let i = Matrix::identity(Rationals, n);
            assert!(Rationals.is_one(&det_l_formula(&i).unwrap()));
            let mut a = i.clone();
            a.set(0, 0, Rational::zero());
            assert!(det_l_formula(&a).unwrap().is_zero());
            let u = Rational::new(5, 3).unwrap();
            a.set(0, 0, u.clone());
            let expect = crate::factor::det_m(&Rationals, n, &u);
            assert_eq!(det_l_formula(&a).unwrap(), expect);
            assert_eq!(op_l(&a).unwrap().determinant(), expect);
        }
        let full = Matrix::from_i64_rows(Rationals, &[&[1, 2], &[3, 4]]);
        assert_eq!(det_l_formula(&full), Err(Error::NotTriangular));
    }

    #[test]
    fn character_table_is_multiplicative() {
        for p in [3, 5, 7, 11, 13] {
            let t = CharacterTable::new(p).unwrap();
            assert!(has_full_order(t.generator(), p));
            for j in 0..p - 1 {
                assert!((t.chi(0, 1 + j % (p - 1)) - Complex64::new(1.0, 0.0)).norm() < 1e-9);
                for x in 1..p {
                    for y in 1..p {
                        let lhs = t.chi(j, x * y % p);
                        assert!((lhs - t.chi(j, x) * t.chi(j, y)).norm() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn jacobi_examples() {
        let s = jacobi_sigma(5, 2, 2).unwrap();
        assert_eq!(s.classification, SigmaClass::TrivialPower);
        assert!(Float::abs(s.magnitude() - 1.0) < 1e-6);
        let s = jacobi_sigma(5, 2, 1).unwrap();
        assert_eq!(s.classification, SigmaClass::JacobiCase);
        assert!(Float::abs(s.magnitude() - Float::sqrt(5f64)) < 1e-6);
        let s = jacobi_sigma(7, 2, 2).unwrap();
        assert_eq!(s.classification, SigmaClass::InverseCase);
        assert!(Float::abs(s.magnitude() - 1.0) < 1e-6);
        assert_eq!(jacobi_sigma(7, 2, 0), Err(Error::TrivialCharacter));
        assert_eq!(jacobi_sigma(7, 2, 6), Err(Error::TrivialCharacter));
        assert_eq!(jacobi_sigma(4, 2, 1), Err(Error::NotPrime(4)));
        assert_eq!(jacobi_sigma(2, 2, 1), Err(Error::CharTwo));
    }

    /// Oracle: brute-force character values via repeated multiplication.
    #[test]
    fn sigma_against_bruteforce() {
        for p in [5u64, 7, 11, 13] {
            let g = (2..p).find(|&g| has_full_order(g, p)).unwrap();
            let q = p - 1;
            let chi = |j: u64, x: u64| -> Complex64 {
                if x.is_multiple_of(p) {
                    return Complex64::new(0.0, 0.0);
                }
                let a = (0..q).find(|&a| pow_mod(g, a, p) == x % p).unwrap();
                Complex64::from_polar(1.0, 2.0 * PI * ((j * a) % q) as f64 / q as f64)
            };
            for m in [2u64, 4] {
                for j in 1..q {
                    let direct: Complex64 = (0..p).map(|t| chi(j, t) * chi(j * m % q, t + 1)).sum();
                    let s = jacobi_sigma(p, m, j).unwrap();
                    assert!((s.value - direct).norm() < 1e-9, "p={p} m={m} j={j}");
                    assert!(s.matches_classification(1e-6), "p={p} m={m} j={j}: {}", s.magnitude());
                    assert!(s.magnitude() < (p - 2) as f64);
                }
            }
        }
    }

    /// Oracle: exhaustive closure of the generator values under multiplication.
    #[test]
    fn delta_survey_matches_closure() {
        for p in [3u64, 5, 7, 11, 13] {
            for n in [2usize, 3] {
                let s = delta_survey(p, n).unwrap();
                let mut closure = alloc::collections::BTreeSet::from([1u64]);
                loop {
                    let before = closure.len();
                    let next: Vec<u64> = closure
                        .iter()
                        .flat_map(|x| s.generators.iter().map(move |(g, _)| x * g % p))
                        .collect();
                    closure.extend(next);
                    if closure.len() == before {
                        break;
                    }
                }
                assert_eq!(s.order(), closure.len());
                assert!(s.is_full(), "p={p} n={n}");
                for (gamma, _) in &s.table {
                    let w = s.word_for(*gamma).unwrap();
                    assert_eq!(w.evaluate().determinant(), *gamma);
                }
            }
        }
        assert_eq!(delta_survey(3, 2).unwrap().order(), 2);
    }

    #[test]
    fn all_identities_pass_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=3 {
            for r in check_identities("all", &Rationals, n, 3, &mut rng).unwrap() {
                assert!(r.pass, "{r:?}");
            }
            for p in [3, 5, 7, 13] {
                let f = PrimeField::new(p).unwrap();
                for r in check_identities("all", &f, n, 3, &mut rng).unwrap() {
                    assert!(r.pass, "{r:?}");
                }
            }
        }
        assert_eq!(
            check_identities("no-such-id", &Rationals, 2, 1, &mut rng),
            Err(Error::UnknownIdentity("no-such-id".into()))
        );
    }

    #[test]
    fn corrupted_factor_fails() {
        let mut factors = plus_e12_factors(&Rationals);
        factors[2].set(0, 1, Rational::from_integer(4));
        let r = check_plus_e12_word(&Rationals, 2, &factors).unwrap();
        assert!(!r.pass);
        assert!(r.counterexample.is_some());
        let good = check_plus_e12_word(&Rationals, 3, &plus_e12_factors(&Rationals)).unwrap();
        assert!(good.pass && good.skipped.is_none());
    }
}
